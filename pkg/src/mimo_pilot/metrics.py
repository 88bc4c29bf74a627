"""Estimation-error, SINR and rate figures of merit.

Closed forms throughout refer to the correlated-pilot uplink: for user k
the relevant inputs are the per-cell pilot powers rho[l] and large-scale
gains beta[l] of that user's index, with the target cell at position 0.
The recurring quantity

    upsilon = sum_{l != 0} rho[l] * beta[l] + 1

is the contamination-plus-noise level seen by the correlator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimators import LS, MMSE, check_method


def _cols(rho_col, beta_col):
    rho = np.asarray(rho_col, dtype=float)
    beta = np.asarray(beta_col, dtype=float)
    if rho.shape != beta.shape or rho.ndim != 1:
        raise ValueError("rho_col and beta_col must be 1-D arrays of equal length")
    if np.any(rho < 0) or np.any(beta <= 0):
        raise ValueError("powers must be non-negative and gains positive")
    if rho[0] <= 0:
        raise ValueError("target-cell power must be positive")
    return rho, beta


def upsilon(rho_col, beta_col) -> float:
    """Contamination-plus-noise level sum_{l != 0} rho_l beta_l + 1."""
    rho, beta = _cols(rho_col, beta_col)
    return float(np.dot(rho[1:], beta[1:]) + 1.0)


def rcee_sample(h, h_hat) -> float:
    """Squared estimation error relative to the channel energy.

    ||h - hhat||^2 / ||h||^2 for one channel vector; raises on a zero
    channel, for which the ratio is undefined.
    """
    h = np.asarray(h)
    h_hat = np.asarray(h_hat)
    energy = float(np.vdot(h, h).real)
    if energy == 0.0:
        raise ValueError("relative error undefined for a zero channel")
    err = h_hat - h
    return float(np.vdot(err, err).real) / energy


def rcee_prefix_samples(h, h_hat, m_values) -> np.ndarray:
    """Relative errors restricted to the first m antennas, for each m.

    Valid because per-antenna correlation estimates only involve the same
    antenna's observations: the length-m estimate equals the first m rows
    of the full-length estimate.  ``h``/``h_hat`` are (..., M); returns an
    array of shape (len(m_values),) + batch shape.
    """
    h = np.asarray(h)
    h_hat = np.asarray(h_hat)
    m_values = np.asarray(m_values, dtype=int)
    if np.any(m_values < 1) or np.any(m_values > h.shape[-1]):
        raise ValueError("antenna counts must lie in [1, M]")
    err_c = np.cumsum(np.abs(h_hat - h) ** 2, axis=-1)
    sig_c = np.cumsum(np.abs(h) ** 2, axis=-1)
    idx = m_values - 1
    return np.moveaxis(err_c[..., idx] / sig_c[..., idx], -1, 0)


def exp_rcee_closed(method: str, M: int, rho_col, beta_col) -> float:
    """Expected relative estimation error at M antennas.

    Infinite for M = 1 (the inverse channel energy has no mean there).
    For M >= 2:

        LS:   M * upsilon / ((M-1) * rho_0 * beta_0)
        MMSE: upsilon * (upsilon + M rho_0 beta_0 / (M-1))
              / (sum_l rho_l beta_l + 1)^2
    """
    check_method(method)
    if not (isinstance(M, (int, np.integer)) and M >= 1):
        raise ValueError("M must be a positive integer")
    rho, beta = _cols(rho_col, beta_col)
    if M == 1:
        return math.inf
    ups = upsilon(rho, beta)
    own = rho[0] * beta[0]
    if method == LS:
        return M * ups / ((M - 1) * own)
    total = float(np.dot(rho, beta) + 1.0)
    return ups * (ups + M * own / (M - 1)) / total ** 2


def exp_rcee_bound_mmse(M: int, rho_col, beta_col) -> float:
    """Upper bound M*upsilon / ((M-1)(sum_l rho_l beta_l + 1)) on the MMSE error.

    Strictly above the exact expectation for every M >= 2.
    """
    if not (isinstance(M, (int, np.integer)) and M >= 2):
        raise ValueError("the bound needs M >= 2")
    rho, beta = _cols(rho_col, beta_col)
    ups = upsilon(rho, beta)
    total = float(np.dot(rho, beta) + 1.0)
    return M * ups / ((M - 1) * total)


def exp_rcee_limit(method: str, rho_col, beta_col) -> float:
    """Large-antenna limit of the expected relative estimation error.

    LS tends to upsilon / (rho_0 beta_0); MMSE to upsilon / (upsilon +
    rho_0 beta_0).  Neither vanishes while other cells transmit on the
    same sequence, which is the pilot-contamination floor in M.
    """
    check_method(method)
    rho, beta = _cols(rho_col, beta_col)
    ups = upsilon(rho, beta)
    own = rho[0] * beta[0]
    if method == LS:
        return ups / own
    return ups / (ups + own)


def exp_rcee_eppa_limit(method: str, beta_col, K: int, P: float) -> float:
    """Large-antenna error limit under equal pilot powers rho = P/K.

    The power cancels almost everywhere, leaving the interference gains
    plus the noise share K/P.
    """
    check_method(method)
    beta = np.asarray(beta_col, dtype=float)
    if beta.ndim != 1 or np.any(beta <= 0):
        raise ValueError("beta_col must be 1-D with positive gains")
    if K < 1 or P <= 0:
        raise ValueError("K must be >= 1 and P positive")
    interference = float(beta[1:].sum()) + K / P
    if method == LS:
        return interference / beta[0]
    return interference / (float(beta.sum()) + K / P)


def exp_rcee_eppa_floor(method: str, beta_col) -> float:
    """Joint limit of :func:`exp_rcee_eppa_limit` as the budget grows.

    Only the gain ratios survive: LS gives sum_{l != 0} beta_l / beta_0,
    MMSE gives sum_{l != 0} beta_l / sum_l beta_l.
    """
    check_method(method)
    beta = np.asarray(beta_col, dtype=float)
    if beta.ndim != 1 or np.any(beta <= 0):
        raise ValueError("beta_col must be 1-D with positive gains")
    interference = float(beta[1:].sum())
    if method == LS:
        return interference / beta[0]
    return interference / float(beta.sum())


def sinr_closed(M: int, rho_col, beta_slice, rho_u: float, k: int) -> float:
    """Matched-filter uplink SINR of target-cell user k at M antennas.

    ``rho_col`` holds the per-cell pilot powers of user index k and
    ``beta_slice`` the full (L, K) gains toward the target BS.  The value
    is the same whichever of the two estimators produced the filter,
    because they are collinear.
    """
    if M < 1:
        raise ValueError("M must be a positive integer")
    if rho_u <= 0:
        raise ValueError("rho_u must be positive")
    beta_slice = np.asarray(beta_slice, dtype=float)
    if beta_slice.ndim != 2:
        raise ValueError("beta_slice must be (L, K)")
    rho, beta_k = _cols(rho_col, beta_slice[:, k])
    own = rho[0] * beta_k[0]
    numer = M * own * beta_k[0]
    coherent = M * float(np.dot(rho[1:], beta_k[1:] ** 2))
    level = float(np.dot(rho, beta_k) + 1.0)
    numer_total = level * (1.0 / rho_u + float(beta_slice.sum()))
    return numer / (coherent + numer_total)


def sinr_limit(rho_col, beta_col) -> float:
    """Large-antenna SINR limit rho_0 beta_0^2 / sum_{l != 0} rho_l beta_l^2.

    Infinite when no other cell reuses the sequence: without pilot
    contamination the matched filter's SINR grows without bound in M.
    """
    rho, beta = _cols(rho_col, beta_col)
    denom = float(np.dot(rho[1:], beta[1:] ** 2))
    if denom == 0.0:
        return math.inf
    return rho[0] * beta[0] ** 2 / denom


def achievable_rate(cfg, sinr: float) -> float:
    """Net uplink rate (B/Gamma) * slot_fraction * (Tu/To) * log2(1+SINR)."""
    if sinr < 0:
        raise ValueError("SINR must be non-negative")
    return cfg.rate_prefactor * math.log2(1.0 + sinr)


@dataclass(frozen=True)
class RateSummary:
    """Cell-level rate figures: worst user and per-user average."""

    minimum: float
    average: float


def rate_summary(rates) -> RateSummary:
    """Collapse per-user rates into the cell minimum and average."""
    r = np.asarray(rates, dtype=float)
    if r.size == 0:
        raise ValueError("rate summary of an empty collection is undefined")
    if np.any(r < 0):
        raise ValueError("rates must be non-negative")
    return RateSummary(minimum=float(r.min()), average=float(r.mean()))


@dataclass(frozen=True)
class RceeReport:
    """Per-user Monte-Carlo error estimates next to their closed forms."""

    method: str
    num_antennas: int
    mc_mean: np.ndarray        # (K,)
    mc_stderr: np.ndarray      # (K,)
    closed_form: np.ndarray    # (K,)
    limit: np.ndarray          # (K,)

    @property
    def average_mc(self) -> float:
        return float(self.mc_mean.mean())

    @property
    def average_closed_form(self) -> float:
        return float(self.closed_form.mean())


@dataclass(frozen=True)
class RateReport:
    """Per-user rates plus the cell summary they collapse to."""

    method: str
    scheme: str
    rates: np.ndarray          # (K,)
    summary: RateSummary
