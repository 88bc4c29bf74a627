"""Pilot power allocation for the target cell.

The allocator minimizes the per-cell average of the expected relative
estimation error subject to a total budget P and per-user box bounds
[P/(2K), mu*P/K].  With other cells' powers fixed, each user contributes
through the pair (upsilon_k, beta_k): contamination-plus-noise level and
own-channel gain.  The KKT solution without the box is a square-root
water-filling over w_k = upsilon_k / beta_k; box violations are resolved
by pinning the worst violator to its bound and re-solving on the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import LS, MMSE, check_method

# Fraction of the average per-user power reserved as the lower bound:
# rho_min = P/(2K) makes rho_min * K / P one half by construction.
ALPHA = 0.5


@dataclass(frozen=True)
class InterferenceProfile:
    """Per-user quantities the allocator needs, for one large-scale drop.

    ``upsilon[k]`` is the contamination-plus-noise level of user k,
    ``beta_target[k]`` the user's own gain at the serving BS, and
    ``rho_other`` the fixed other-cell pilot powers that produced upsilon
    (row 0 unused).
    """

    upsilon: np.ndarray       # (K,)
    beta_target: np.ndarray   # (K,)
    rho_other: np.ndarray | None = None

    def __post_init__(self) -> None:
        ups = np.asarray(self.upsilon, dtype=float)
        beta = np.asarray(self.beta_target, dtype=float)
        if ups.shape != beta.shape or ups.ndim != 1:
            raise ValueError("upsilon and beta_target must be equal-length 1-D arrays")
        if np.any(ups <= 0) or np.any(beta <= 0):
            raise ValueError("upsilon and beta_target must be positive")
        object.__setattr__(self, "upsilon", ups)
        object.__setattr__(self, "beta_target", beta)

    @property
    def num_users(self) -> int:
        return self.upsilon.shape[0]

    @property
    def weight(self) -> np.ndarray:
        """Water-filling weights w_k = upsilon_k / beta_k."""
        return self.upsilon / self.beta_target

    @classmethod
    def from_scenario(cls, beta_slice, rho_other) -> "InterferenceProfile":
        """Build the profile from target-BS gains and other-cell powers.

        upsilon_k = sum_{l != 0} rho_other[l, k] * beta_slice[l, k] + 1.
        """
        beta_slice = np.asarray(beta_slice, dtype=float)
        rho_other = np.asarray(rho_other, dtype=float)
        if beta_slice.shape != rho_other.shape or beta_slice.ndim != 2:
            raise ValueError("beta_slice and rho_other must share an (L, K) shape")
        ups = np.einsum("lk,lk->k", rho_other[1:], beta_slice[1:]) + 1.0
        return cls(upsilon=ups, beta_target=beta_slice[0].copy(), rho_other=rho_other)


def eppa_profile(beta_slice, P: float, K: int) -> InterferenceProfile:
    """Profile with every other cell transmitting the flat power P/K."""
    beta_slice = np.asarray(beta_slice, dtype=float)
    rho_other = np.full_like(beta_slice, P / K)
    rho_other[0] = 0.0
    return InterferenceProfile.from_scenario(beta_slice, rho_other)


def unconstrained_optimum(method: str, profile: InterferenceProfile, P: float) -> np.ndarray:
    """Budget-only KKT solution over the sqrt weights.

    LS:   rho_k = P * sqrt(w_k) / sum sqrt(w)
    MMSE: rho_k = sqrt(w_k) / lambda - w_k with
          lambda = sum sqrt(w) / (P + sum w)

    Both exhaust the budget exactly; MMSE entries can be negative for
    heavy weights, which the box stage later resolves.
    """
    check_method(method)
    if P <= 0:
        raise ValueError("budget must be positive")
    return _water_fill(method, profile.weight, P)


def _water_fill(method: str, w: np.ndarray, P: float) -> np.ndarray:
    sqrt_w = np.sqrt(w)
    share = sqrt_w / sqrt_w.sum()
    if method == LS:
        return P * share
    # (P + sum w) * share - w, split so the weight part cancels cleanly
    # when the weights are all equal
    return P * share + (w.sum() * share - w)


@dataclass(frozen=True)
class PilotAllocation:
    """Result of the box-constrained allocation.

    ``free``, ``at_min`` and ``at_max`` partition the user indices: free
    users carry the re-solved water-filling powers, the others sit exactly
    on a box bound.
    """

    rho: np.ndarray
    free: frozenset[int]
    at_min: frozenset[int]
    at_max: frozenset[int]
    method: str
    objective: float
    P_total: float
    rho_min: float
    rho_max: float

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho, dtype=float)
        object.__setattr__(self, "rho", rho)
        K = rho.shape[0]
        groups = (self.free, self.at_min, self.at_max)
        if sum(len(g) for g in groups) != K or set().union(*groups) != set(range(K)):
            raise ValueError("free/at_min/at_max must partition the user indices")
        if abs(rho.sum() - self.P_total) > 1e-9 * self.P_total:
            raise ValueError("allocation does not exhaust the budget")
        tol = 1e-12 * self.P_total
        for k in self.at_min:
            if rho[k] != self.rho_min:
                raise ValueError(f"user {k} marked at_min but rho != rho_min")
        for k in self.at_max:
            if rho[k] != self.rho_max:
                raise ValueError(f"user {k} marked at_max but rho != rho_max")
        for k in self.free:
            if not (self.rho_min - tol <= rho[k] <= self.rho_max + tol):
                raise ValueError(f"free user {k} outside the power box")


def ppa_allocate(method: str, profile: InterferenceProfile, cfg) -> PilotAllocation:
    """Allocate the cell's pilot budget under the per-user power box.

    Starts from :func:`unconstrained_optimum`; while some user violates
    the box, the violator farthest from its bound is pinned there (lower
    bound wins ties), the spent power is removed from the budget and the
    remaining users are re-solved.  At most K passes are needed.
    """
    check_method(method)
    K = profile.num_users
    if cfg.K != K:
        raise ValueError(f"configuration is for K={cfg.K} users, profile has {K}")
    lo, hi = cfg.rho_min, cfg.rho_max
    if not (lo > 0 and hi >= lo):
        raise ValueError("invalid power box")
    if K * lo > cfg.P_total or K * hi < cfg.P_total:
        raise ValueError("power box cannot meet the budget")

    w = profile.weight
    rho = np.empty(K)
    free = list(range(K))
    at_min: list[int] = []
    at_max: list[int] = []
    budget = cfg.P_total
    rho[free] = _water_fill(method, w[free], budget)
    for _ in range(K):
        sub = rho[free]
        low = [k for k, v in zip(free, sub) if v < lo]
        high = [k for k, v in zip(free, sub) if v > hi]
        if not low and not high:
            break
        k_star = max(low, key=lambda k: abs(rho[k] - lo), default=None)
        t_star = max(high, key=lambda k: abs(rho[k] - hi), default=None)
        # Pinning must leave the rest of the budget inside the remaining
        # box; on extreme weight skews the preferred direction can break
        # that, in which case the other violator is pinned instead.  The
        # slack absorbs rounding when the budget sits exactly on a corner
        # of the box (e.g. every remaining user forced to a bound).
        n_rest = len(free) - 1
        slack = 1e-9 * cfg.P_total
        min_ok = (low and n_rest * lo <= budget - lo + slack
                  and budget - lo <= n_rest * hi + slack)
        max_ok = (high and n_rest * lo <= budget - hi + slack
                  and budget - hi <= n_rest * hi + slack)
        prefer_min = not high or (low and abs(rho[k_star] - lo) >= abs(rho[t_star] - hi))
        if min_ok and (prefer_min or not max_ok):
            rho[k_star] = lo
            budget -= lo
            free.remove(k_star)
            at_min.append(k_star)
        else:
            rho[t_star] = hi
            budget -= hi
            free.remove(t_star)
            at_max.append(t_star)
        if free:
            rho[free] = _water_fill(method, w[free], budget)
    return PilotAllocation(
        rho=rho,
        free=frozenset(free),
        at_min=frozenset(at_min),
        at_max=frozenset(at_max),
        method=method,
        objective=objective_value(method, rho, profile, cfg.M),
        P_total=cfg.P_total,
        rho_min=lo,
        rho_max=hi,
    )


def objective_value(method: str, rho, profile: InterferenceProfile, M: int,
                    exact: bool = True) -> float:
    """Cell-average expected relative estimation error of an allocation.

    With ``exact=False`` the MMSE term is replaced by its upper bound
    M*upsilon/((M-1)(upsilon + rho*beta)), the function the allocator
    actually minimizes; for LS bound and exact value coincide.
    """
    check_method(method)
    if M < 2:
        raise ValueError("the objective needs M >= 2")
    rho = np.asarray(rho, dtype=float)
    if rho.shape != profile.upsilon.shape:
        raise ValueError("rho must have one entry per user")
    if np.any(rho <= 0):
        raise ValueError("pilot powers must be positive")
    ups = profile.upsilon
    own = rho * profile.beta_target
    m_ratio = M / (M - 1)
    if method == LS:
        terms = m_ratio * ups / own
    elif exact:
        terms = ups * (ups + m_ratio * own) / (ups + own) ** 2
    else:
        terms = m_ratio * ups / (ups + own)
    return float(terms.mean())


def make_objective(method: str, profile: InterferenceProfile, M: int,
                   exact: bool = True):
    """Objective and gradient callables for a general-purpose solver.

    Returns ``(fun, grad)`` evaluating :func:`objective_value` and its
    analytic derivative with respect to the power vector.
    """
    check_method(method)
    ups = profile.upsilon
    beta = profile.beta_target
    K = profile.num_users
    m_ratio = M / (M - 1)

    def fun(rho: np.ndarray) -> float:
        return objective_value(method, rho, profile, M, exact=exact)

    if method == LS:
        def grad(rho: np.ndarray) -> np.ndarray:
            return -m_ratio * ups / (beta * rho ** 2) / K
    elif exact:
        def grad(rho: np.ndarray) -> np.ndarray:
            own = beta * rho
            return ups * beta * ((m_ratio - 2.0) * ups - m_ratio * own) / (ups + own) ** 3 / K
    else:
        def grad(rho: np.ndarray) -> np.ndarray:
            return -m_ratio * ups * beta / (ups + beta * rho) ** 2 / K

    return fun, grad


@dataclass(frozen=True)
class AsymptoticGroups:
    """High-budget limit of the allocation's user partition.

    With every power written as a fixed fraction delta of the budget, the
    noise term drops out of the weights and the pinned/free partition
    stops depending on P.  The stored per-user constants evaluate the
    limiting expected relative estimation error:

    ``interference[k]`` = sum_{l != 0} delta[l, k] * beta[l, k],
    ``psi[k]``          = sqrt(beta_0k * interference[k]),
    ``phi[k]``          = interference[k] * sum over free users of
                          sqrt(interference / beta_0),
    ``varphi``          = 1 - (alpha*|at_min| + mu*|at_max|)/K,
    ``varpi``           = sum over free users of interference / beta_0.
    """

    method: str
    delta: np.ndarray          # (L, K) other-cell power fractions, row 0 unused
    free: frozenset[int]
    at_min: frozenset[int]
    at_max: frozenset[int]
    alpha: float
    mu: float
    beta_target: np.ndarray    # (K,)
    interference: np.ndarray   # (K,)
    psi: np.ndarray            # (K,)
    phi: np.ndarray            # (K,)
    varphi: float
    varpi: float


def asymptotic_groups(method: str, delta, beta_slice, cfg,
                      reference_power: float = 1.0e6) -> AsymptoticGroups:
    """Partition users as the pilot budget grows without bound.

    ``delta[l, k]`` are the other-cell power fractions rho_lk/P.  The
    noise-free allocation is solved at ``reference_power``; because the
    weights scale linearly with the budget the resulting partition is
    budget-invariant, which a change of ``reference_power`` leaves intact.
    """
    check_method(method)
    delta = np.asarray(delta, dtype=float)
    beta_slice = np.asarray(beta_slice, dtype=float)
    if delta.shape != beta_slice.shape or delta.ndim != 2:
        raise ValueError("delta and beta_slice must share an (L, K) shape")
    if np.any(delta[1:] <= 0) or np.any(delta[1:] >= 1):
        raise ValueError("power fractions must lie in (0, 1)")
    K = delta.shape[1]
    if cfg.K != K:
        raise ValueError(f"configuration is for K={cfg.K} users, delta has {K}")
    interference = np.einsum("lk,lk->k", delta[1:], beta_slice[1:])
    # noise-free profile at the reference budget; the +1 noise term is gone
    profile = InterferenceProfile(upsilon=interference * reference_power,
                                  beta_target=beta_slice[0].copy())
    ref_cfg = cfg.replace(P_total=reference_power)
    alloc = ppa_allocate(method, profile, ref_cfg)
    ratio = interference / beta_slice[0]
    free_sqrt_sum = float(np.sqrt(ratio[list(alloc.free)]).sum()) if alloc.free else 0.0
    varphi = 1.0 - (ALPHA * len(alloc.at_min) + cfg.mu * len(alloc.at_max)) / K
    varpi = float(ratio[list(alloc.free)].sum()) if alloc.free else 0.0
    return AsymptoticGroups(
        method=method,
        delta=delta,
        free=alloc.free,
        at_min=alloc.at_min,
        at_max=alloc.at_max,
        alpha=ALPHA,
        mu=cfg.mu,
        beta_target=beta_slice[0].copy(),
        interference=interference,
        psi=np.sqrt(beta_slice[0] * interference),
        phi=interference * free_sqrt_sum,
        varphi=varphi,
        varpi=varpi,
    )


def exp_rcee_asymptotic(method: str, groups: AsymptoticGroups, k: int) -> float:
    """Limiting expected relative estimation error of user k.

    Users pinned at a bound keep a fixed share of the budget, so their
    limit only involves that share; free users keep the water-filling
    ratios, which brings in the group constants.
    """
    check_method(method)
    if method != groups.method:
        raise ValueError("groups were derived for the other estimation method")
    interference = groups.interference[k]
    beta0 = groups.beta_target[k]
    K = groups.interference.shape[0]
    if k in groups.at_min:
        fraction = groups.alpha / K  # rho_min = alpha * P / K
    elif k in groups.at_max:
        fraction = groups.mu / K
    else:
        if method == LS:
            return groups.phi[k] / (groups.varphi * groups.psi[k])
        return groups.phi[k] / ((groups.varphi + groups.varpi) * groups.psi[k])
    if method == LS:
        return interference / (fraction * beta0)
    return interference / (interference + fraction * beta0)


def asymptotic_average(method: str, groups: AsymptoticGroups) -> float:
    """Cell-average of :func:`exp_rcee_asymptotic` over the K users."""
    K = groups.interference.shape[0]
    return float(np.mean([exp_rcee_asymptotic(method, groups, k) for k in range(K)]))
