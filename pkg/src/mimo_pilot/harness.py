"""Experiment orchestration: seeding, Monte-Carlo sweeps and reports.

Every random draw comes from :func:`seed_schedule`, a counter-style
stream factory keyed by (root seed, trial index, purpose tag).  Workers
therefore never share generator state, results do not depend on the
worker count, and a rerun with the same seed reproduces every byte of
the output.
"""

from __future__ import annotations

import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import metrics, ppa
from .airlink import empirical_sinr_terms, pilot_phase, sample_channels
from .estimators import LS, MMSE, METHODS, estimate_ls, estimate_mmse
from .scenario import (REUSE_FACTORS, SystemConfig, build_layout, drop_users,
                       large_scale)

EXPERIMENTS = ("fig3", "fig4a", "fig4b", "fig5a", "fig5b", "validate")
SCHEMES = ("ppa", "eppa", "ref")

GRID_COLUMNS = ("experiment", "metric", "gamma", "method", "scheme", "x",
                "mc_mean", "mc_stderr", "closed_form", "asymptote")
CDF_COLUMNS = ("experiment", "metric", "gamma", "method", "scheme", "value", "cdf")


def seed_schedule(seed: int, trial: int, purpose: str) -> np.random.Generator:
    """Independent generator for one (trial, purpose) slot under a root seed.

    Identical arguments always give an identical stream; distinct trials
    or purposes give statistically independent streams.  The purpose tag
    is hashed with crc32, which is stable across runs and platforms.
    """
    if not (isinstance(seed, (int, np.integer)) and seed >= 0):
        raise ValueError("seed must be a non-negative integer")
    if not (isinstance(trial, (int, np.integer)) and trial >= 0):
        raise ValueError("trial must be a non-negative integer")
    if not purpose:
        raise ValueError("purpose tag must be a non-empty string")
    tag = zlib.crc32(purpose.encode("utf-8"))
    return np.random.default_rng((int(seed), int(trial), tag))


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous empirical distribution function."""

    values: np.ndarray  # sorted ascending

    def evaluate(self, x) -> np.ndarray | float:
        n = self.values.size
        out = np.searchsorted(self.values, np.asarray(x), side="right") / n
        return float(out) if out.ndim == 0 else out

    def curve(self):
        """Jump points and the distribution level reached at each."""
        n = self.values.size
        return self.values, np.arange(1, n + 1) / n


def empirical_cdf(samples) -> EmpiricalCdf:
    s = np.asarray(samples, dtype=float).ravel()
    if s.size == 0:
        raise ValueError("empirical distribution of an empty sample is undefined")
    if not np.all(np.isfinite(s)):
        raise ValueError("samples must be finite")
    return EmpiricalCdf(values=np.sort(s))


def ks_distance(a: EmpiricalCdf, b: EmpiricalCdf) -> float:
    """Kolmogorov-Smirnov distance between two empirical distributions.

    Both functions are piecewise constant, so the supremum is attained at
    a jump point of either one.
    """
    grid = np.union1d(a.values, b.values)
    return float(np.max(np.abs(a.evaluate(grid) - b.evaluate(grid))))


@dataclass(frozen=True)
class ExperimentPlan:
    """What to sweep and how hard to sample.

    ``n_large`` counts user drops (large-scale realizations), ``n_small``
    fast-fading trials per drop.  Schemes: "ppa" is the closed-form
    allocator, "eppa" flat P/K, "ref" the iterative reference solver.
    """

    experiment: str
    gammas: tuple[int, ...]
    m_grid: tuple[int, ...] = ()
    p_grid_db: tuple[float, ...] = ()
    n_large: int = 20
    n_small: int = 50
    schemes: tuple[str, ...] = ("ppa", "eppa")
    methods: tuple[str, ...] = (LS, MMSE)
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}")
        if not self.gammas or any(g not in REUSE_FACTORS for g in self.gammas):
            raise ValueError(f"gammas must be drawn from {REUSE_FACTORS}")
        if any(m < 2 for m in self.m_grid):
            raise ValueError("antenna counts must be at least 2")
        if list(self.m_grid) != sorted(set(self.m_grid)):
            raise ValueError("m_grid must be strictly increasing")
        if self.n_large < 1 or self.n_small < 0:
            raise ValueError("n_large must be >= 1 and n_small >= 0")
        if not self.schemes or any(s not in SCHEMES for s in self.schemes):
            raise ValueError(f"schemes must be drawn from {SCHEMES}")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ValueError(f"methods must be drawn from {METHODS}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.experiment in ("fig3", "fig5a") and not self.m_grid:
            raise ValueError(f"{self.experiment} needs an antenna grid")
        if self.experiment == "fig4b" and not self.p_grid_db:
            raise ValueError("fig4b needs a budget grid in dB")


_DESK_M_GRID = (8, 16, 32, 64, 128, 256, 512)
_DESK_P_GRID_DB = (20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0)


def plan_for(experiment: str, paper_scale: bool = False, gammas=None,
             jobs: int = 1, schemes=None, n_large: int | None = None,
             n_small: int | None = None) -> ExperimentPlan:
    """Desk-scale defaults for each experiment, or the full-size counts.

    Desk scale keeps every qualitative effect visible in seconds; the
    paper-scale flag restores 100 drops x 100 fading trials.
    """
    if experiment not in EXPERIMENTS:
        raise ValueError(f"experiment must be one of {EXPERIMENTS}")
    mc_drops = 100 if paper_scale else 20
    mc_trials = 100 if paper_scale else 50
    defaults: dict[str, dict] = {
        "fig3": dict(gammas=(1, 3, 7), m_grid=_DESK_M_GRID,
                     n_large=mc_drops, n_small=mc_trials),
        "fig4a": dict(gammas=(1, 3, 7), n_large=100, n_small=0),
        "fig4b": dict(gammas=(1, 3, 7), p_grid_db=_DESK_P_GRID_DB,
                      n_large=mc_drops, n_small=mc_trials),
        "fig5a": dict(gammas=(1,), m_grid=_DESK_M_GRID, n_large=mc_drops, n_small=0),
        "fig5b": dict(gammas=(1,), n_large=100, n_small=0),
        "validate": dict(gammas=(1,), n_large=1, n_small=4000),
    }
    kw = defaults[experiment]
    if gammas is not None:
        kw["gammas"] = tuple(gammas)
    if schemes is not None:
        kw["schemes"] = tuple(schemes)
    if n_large is not None:
        kw["n_large"] = n_large
    if n_small is not None:
        kw["n_small"] = n_small
    return ExperimentPlan(experiment=experiment, jobs=jobs, **kw)


def default_config(experiment: str = "fig3", seed: int = 0) -> SystemConfig:
    """Simulation defaults: 7 cells, 10 users, 40 dB budget, 20 dB data power.

    The validate experiment uses a smaller cell load and antenna count so
    its Monte-Carlo bands are tight within seconds.
    """
    if experiment == "validate":
        return SystemConfig(K=3, M=8, P_total=3.0e3, mu=1.5, rho_u=100.0, seed=seed)
    return SystemConfig(K=10, M=200, P_total=1.0e4, mu=3.0, rho_u=100.0, seed=seed)


@dataclass(frozen=True)
class MetricReport:
    """Flat result table of one experiment run."""

    experiment: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def select(self, **filters) -> list[tuple]:
        idx = {c: i for i, c in enumerate(self.columns)}
        out = []
        for row in self.rows:
            if all(row[idx[c]] == v for c, v in filters.items()):
                out.append(row)
        return out

    def column(self, name: str, rows=None) -> list:
        i = self.columns.index(name)
        return [row[i] for row in (self.rows if rows is None else rows)]


# ---------------------------------------------------------------------------
# per-drop computations


def _realization(cfg: SystemConfig, drop: int):
    tag = f"gamma={cfg.Gamma}"
    layout = build_layout(cfg)
    pos = drop_users(cfg, layout, seed_schedule(cfg.seed, drop, f"positions/{tag}"))
    return large_scale(cfg, layout, pos, seed_schedule(cfg.seed, drop, f"shadowing/{tag}"))


def _allocations(cfg: SystemConfig, profile: ppa.InterferenceProfile,
                 schemes, methods) -> dict:
    """Target-cell power vectors for every (scheme, method) pair."""
    flat = np.full(cfg.K, cfg.P_total / cfg.K)
    out = {}
    for method in methods:
        for scheme in schemes:
            if scheme == "eppa":
                out[(scheme, method)] = flat
            elif scheme == "ppa":
                out[(scheme, method)] = ppa.ppa_allocate(method, profile, cfg).rho
            else:
                out[(scheme, method)] = _reference_allocation(method, profile, cfg)
    return out


def _reference_allocation(method: str, profile: ppa.InterferenceProfile,
                          cfg: SystemConfig) -> np.ndarray:
    from .refsolver import ConstrainedProblem, solve

    fun, grad = ppa.make_objective(method, profile, cfg.M, exact=(method == LS))
    problem = ConstrainedProblem(objective=fun, gradient=grad, total=cfg.P_total,
                                 lower=cfg.rho_min, upper=cfg.rho_max,
                                 dimension=cfg.K)
    return solve(problem).x


def _rho_matrix(cfg: SystemConfig, rho_target: np.ndarray) -> np.ndarray:
    rho = np.full((cfg.L, cfg.K), cfg.P_total / cfg.K)
    rho[0] = rho_target
    return rho


def _closed_average(method: str, rho_mat, beta_slice, M: int) -> float:
    vals = [metrics.exp_rcee_closed(method, M, rho_mat[:, k], beta_slice[:, k])
            for k in range(beta_slice.shape[1])]
    return float(np.mean(vals))


def _limit_average(method: str, rho_mat, beta_slice) -> float:
    vals = [metrics.exp_rcee_limit(method, rho_mat[:, k], beta_slice[:, k])
            for k in range(beta_slice.shape[1])]
    return float(np.mean(vals))


def _mc_rcee_drop(cfg: SystemConfig, plan: ExperimentPlan, drop: int,
                  rho_mats: dict, combos, m_grid) -> dict:
    """Average relative error per combo and antenna count for one drop.

    One fading draw per trial at the largest antenna count serves every
    grid point (estimates restricted to the first m antennas coincide
    with length-m estimates) and, through stream replay of the pilot
    noise, every allocation, so all curves see common randomness.
    """
    tag = f"gamma={cfg.Gamma}"
    beta_slice = rho_mats["__beta__"]
    m_top = max(m_grid)
    acc = {combo: np.zeros(len(m_grid)) for combo in combos}
    for s in range(plan.n_small):
        t_id = drop * plan.n_small + s
        ch = sample_channels(beta_slice, m_top, seed_schedule(cfg.seed, t_id, f"channel/{tag}"))
        estimates = {}
        for combo in combos:
            alloc_key = combo[0], combo[1]
            obs = pilot_phase(ch, rho_mats[alloc_key], cfg.tau,
                              seed_schedule(cfg.seed, t_id, f"pilot-noise/{tag}"))
            method = combo[1]
            est = estimate_ls(obs) if method == LS else estimate_mmse(obs, beta_slice)
            estimates[combo] = est
        for combo, est in estimates.items():
            lam = metrics.rcee_prefix_samples(ch.h[0], est.h_hat, m_grid)
            acc[combo] += lam.mean(axis=1)
    return {combo: acc[combo] / plan.n_small for combo in combos}


# ---------------------------------------------------------------------------
# experiment bodies (each worker handles one (gamma, drop) pair)


def _fig3_drop(args) -> dict:
    plan, cfg, drop = args
    real = _realization(cfg, drop)
    beta_slice = real.target_slice
    profile = ppa.eppa_profile(beta_slice, cfg.P_total, cfg.K)
    allocs = _allocations(cfg, profile, plan.schemes, plan.methods)
    combos = sorted(allocs)
    rho_mats = {key: _rho_matrix(cfg, rho) for key, rho in allocs.items()}
    out = {"closed": {}, "limit": {}, "mc": {}}
    for (scheme, method), rho_mat in rho_mats.items():
        out["closed"][(scheme, method)] = [
            _closed_average(method, rho_mat, beta_slice, M) for M in plan.m_grid]
        out["limit"][(scheme, method)] = _limit_average(method, rho_mat, beta_slice)
    if plan.n_small > 0:
        rho_mats["__beta__"] = beta_slice
        out["mc"] = _mc_rcee_drop(cfg, plan, drop, rho_mats, combos, plan.m_grid)
    return out


def _fig4a_drop(args) -> dict:
    plan, cfg, drop = args
    real = _realization(cfg, drop)
    beta_slice = real.target_slice
    profile = ppa.eppa_profile(beta_slice, cfg.P_total, cfg.K)
    allocs = _allocations(cfg, profile, plan.schemes, plan.methods)
    return {key: _limit_average(key[1], _rho_matrix(cfg, rho), beta_slice)
            for key, rho in allocs.items()}


def _fig4b_drop(args) -> dict:
    plan, cfg, drop = args
    real = _realization(cfg, drop)
    beta_slice = real.target_slice
    out = {"closed": {}, "asym": {}, "mc": {}}
    mc_rho_mats = {"__beta__": beta_slice}
    combos = None
    for i, p_db in enumerate(plan.p_grid_db):
        cfg_p = cfg.replace(P_total=10.0 ** (p_db / 10.0))
        profile = ppa.eppa_profile(beta_slice, cfg_p.P_total, cfg_p.K)
        allocs = _allocations(cfg_p, profile, plan.schemes, plan.methods)
        combos = sorted(allocs)
        for key, rho in allocs.items():
            rho_mat = _rho_matrix(cfg_p, rho)
            out["closed"].setdefault(key, []).append(
                _closed_average(key[1], rho_mat, beta_slice, cfg.M))
            mc_rho_mats[(i,) + key] = rho_mat
    delta = np.full((cfg.L, cfg.K), 1.0 / cfg.K)
    for method in plan.methods:
        groups = ppa.asymptotic_groups(method, delta, beta_slice, cfg)
        for scheme in plan.schemes:
            if scheme == "eppa":
                vals = [metrics.exp_rcee_eppa_floor(method, beta_slice[:, k])
                        for k in range(cfg.K)]
                out["asym"][(scheme, method)] = float(np.mean(vals))
            else:
                out["asym"][(scheme, method)] = ppa.asymptotic_average(method, groups)
    if plan.n_small > 0:
        out["mc"] = _mc_rcee_p_sweep(cfg, plan, drop, mc_rho_mats, combos)
    return out


def _mc_rcee_p_sweep(cfg: SystemConfig, plan: ExperimentPlan, drop: int,
                     rho_mats: dict, combos) -> dict:
    tag = f"gamma={cfg.Gamma}"
    beta_slice = rho_mats["__beta__"]
    n_p = len(plan.p_grid_db)
    acc = {combo: np.zeros(n_p) for combo in combos}
    for s in range(plan.n_small):
        t_id = drop * plan.n_small + s
        ch = sample_channels(beta_slice, cfg.M, seed_schedule(cfg.seed, t_id, f"channel/{tag}"))
        for i in range(n_p):
            for combo in combos:
                obs = pilot_phase(ch, rho_mats[(i,) + combo], cfg.tau,
                                  seed_schedule(cfg.seed, t_id, f"pilot-noise/{tag}"))
                method = combo[1]
                est = estimate_ls(obs) if method == LS else estimate_mmse(obs, beta_slice)
                lam = metrics.rcee_prefix_samples(ch.h[0], est.h_hat, [cfg.M])
                acc[combo][i] += float(lam.mean())
    return {combo: acc[combo] / plan.n_small for combo in combos}


def _rates_for(cfg: SystemConfig, rho_mat, beta_slice, M: int | None):
    """Per-user rates at M antennas, or in the large-antenna limit."""
    rates = []
    for k in range(cfg.K):
        if M is None:
            sinr = metrics.sinr_limit(rho_mat[:, k], beta_slice[:, k])
        else:
            sinr = metrics.sinr_closed(M, rho_mat[:, k], beta_slice, cfg.rho_u, k)
        rates.append(metrics.achievable_rate(cfg, sinr))
    return metrics.rate_summary(rates)


def _fig5a_drop(args) -> dict:
    plan, cfg, drop = args
    real = _realization(cfg, drop)
    beta_slice = real.target_slice
    profile = ppa.eppa_profile(beta_slice, cfg.P_total, cfg.K)
    allocs = _allocations(cfg, profile, plan.schemes, plan.methods)
    out = {}
    for key, rho in allocs.items():
        rho_mat = _rho_matrix(cfg, rho)
        out[key] = [_rates_for(cfg, rho_mat, beta_slice, M).minimum
                    for M in plan.m_grid]
    return out


def _fig5b_drop(args) -> dict:
    plan, cfg, drop = args
    real = _realization(cfg, drop)
    beta_slice = real.target_slice
    profile = ppa.eppa_profile(beta_slice, cfg.P_total, cfg.K)
    allocs = _allocations(cfg, profile, plan.schemes, plan.methods)
    return {key: _rates_for(cfg, _rho_matrix(cfg, rho), beta_slice, None).average
            for key, rho in allocs.items()}


def _validate_drop(args) -> dict:
    plan, cfg, drop = args
    real = _realization(cfg, drop)
    beta_slice = real.target_slice
    profile = ppa.eppa_profile(beta_slice, cfg.P_total, cfg.K)
    allocs = _allocations(cfg, profile, plan.schemes, plan.methods)
    combos = sorted(allocs)
    rho_mats = {key: _rho_matrix(cfg, rho) for key, rho in allocs.items()}
    tag = f"gamma={cfg.Gamma}"

    lam_trials = {combo: np.empty(plan.n_small) for combo in combos}
    channels = []
    estimates = {combo: [] for combo in combos}
    for s in range(plan.n_small):
        t_id = drop * plan.n_small + s
        ch = sample_channels(beta_slice, cfg.M, seed_schedule(cfg.seed, t_id, f"channel/{tag}"))
        channels.append(ch)
        for combo in combos:
            obs = pilot_phase(ch, rho_mats[combo], cfg.tau,
                              seed_schedule(cfg.seed, t_id, f"pilot-noise/{tag}"))
            method = combo[1]
            est = estimate_ls(obs) if method == LS else estimate_mmse(obs, beta_slice)
            estimates[combo].append(est)
            lam = metrics.rcee_prefix_samples(ch.h[0], est.h_hat, [cfg.M])
            lam_trials[combo][s] = float(lam.mean())

    out = {"rcee": {}, "sinr": {}}
    for combo in combos:
        scheme, method = combo
        rho_mat = rho_mats[combo]
        trials = lam_trials[combo]
        out["rcee"][combo] = (
            float(trials.mean()),
            float(trials.std(ddof=1) / np.sqrt(plan.n_small)),
            _closed_average(method, rho_mat, beta_slice, cfg.M),
            _limit_average(method, rho_mat, beta_slice),
        )
        emp = []
        closed = []
        lim = []
        for k in range(cfg.K):
            moments = empirical_sinr_terms(channels, estimates[combo], cfg.rho_u, k)
            emp.append(moments.sinr)
            closed.append(metrics.sinr_closed(cfg.M, rho_mat[:, k], beta_slice,
                                              cfg.rho_u, k))
            lim.append(metrics.sinr_limit(rho_mat[:, k], beta_slice[:, k]))
        out["sinr"][combo] = (float(np.mean(emp)), None,
                              float(np.mean(closed)), float(np.mean(lim)))
    return out


_DROP_BODIES = {
    "fig3": _fig3_drop,
    "fig4a": _fig4a_drop,
    "fig4b": _fig4b_drop,
    "fig5a": _fig5a_drop,
    "fig5b": _fig5b_drop,
    "validate": _validate_drop,
}


def _run_drop(args):
    plan, cfg, gamma, drop = args
    cfg_g = cfg.replace(Gamma=gamma)
    return _DROP_BODIES[plan.experiment]((plan, cfg_g, drop))


def _map_tasks(plan: ExperimentPlan, cfg: SystemConfig):
    tasks = [(plan, cfg, gamma, drop)
             for gamma in plan.gammas for drop in range(plan.n_large)]
    if plan.jobs == 1:
        results = [_run_drop(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            results = list(pool.map(_run_drop, tasks, chunksize=1))
    per_gamma: dict[int, list] = {g: [] for g in plan.gammas}
    for task, res in zip(tasks, results):
        per_gamma[task[2]].append(res)
    return per_gamma


def _mean_stderr(values) -> tuple[float, float | None]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, None
    return mean, float(arr.std(ddof=1) / np.sqrt(arr.size))


def run_experiment(plan: ExperimentPlan, cfg: SystemConfig) -> MetricReport:
    """Execute one experiment; drop-level work may run in a process pool.

    The reduction over drops always happens in drop order, so the report
    is a pure function of (plan, cfg) regardless of ``jobs``.
    """
    if cfg.K < 2:
        raise ValueError("experiments need at least two users per cell")
    per_gamma = _map_tasks(plan, cfg)
    rows: list[tuple] = []
    combos = sorted((s, m) for s in plan.schemes for m in plan.methods)

    if plan.experiment == "fig3":
        for gamma in plan.gammas:
            drops = per_gamma[gamma]
            for scheme, method in combos:
                for i, M in enumerate(plan.m_grid):
                    closed = np.mean([d["closed"][(scheme, method)][i] for d in drops])
                    limit = np.mean([d["limit"][(scheme, method)] for d in drops])
                    if plan.n_small > 0:
                        mc, se = _mean_stderr([d["mc"][(scheme, method)][i] for d in drops])
                    else:
                        mc, se = None, None
                    rows.append(("fig3", "exp_rcee", gamma, method, scheme, M,
                                 mc, se, float(closed), float(limit)))
        return MetricReport("fig3", GRID_COLUMNS, tuple(rows))

    if plan.experiment == "fig4a":
        for gamma in plan.gammas:
            drops = per_gamma[gamma]
            for scheme, method in combos:
                cdf = empirical_cdf([d[(scheme, method)] for d in drops])
                for value, level in zip(*cdf.curve()):
                    rows.append(("fig4a", "exp_rcee", gamma, method, scheme,
                                 float(value), float(level)))
        return MetricReport("fig4a", CDF_COLUMNS, tuple(rows))

    if plan.experiment == "fig4b":
        for gamma in plan.gammas:
            drops = per_gamma[gamma]
            for scheme, method in combos:
                for i, p_db in enumerate(plan.p_grid_db):
                    closed = np.mean([d["closed"][(scheme, method)][i] for d in drops])
                    asym = np.mean([d["asym"][(scheme, method)] for d in drops])
                    if plan.n_small > 0:
                        mc, se = _mean_stderr([d["mc"][(scheme, method)][i] for d in drops])
                    else:
                        mc, se = None, None
                    rows.append(("fig4b", "exp_rcee", gamma, method, scheme,
                                 float(p_db), mc, se, float(closed), float(asym)))
        return MetricReport("fig4b", GRID_COLUMNS, tuple(rows))

    if plan.experiment == "fig5a":
        for gamma in plan.gammas:
            drops = per_gamma[gamma]
            for scheme, method in combos:
                for i, M in enumerate(plan.m_grid):
                    closed = np.mean([d[(scheme, method)][i] for d in drops])
                    rows.append(("fig5a", "rate_min", gamma, method, scheme, M,
                                 None, None, float(closed), None))
        return MetricReport("fig5a", GRID_COLUMNS, tuple(rows))

    if plan.experiment == "fig5b":
        for gamma in plan.gammas:
            drops = per_gamma[gamma]
            for scheme, method in combos:
                cdf = empirical_cdf([d[(scheme, method)] for d in drops])
                for value, level in zip(*cdf.curve()):
                    rows.append(("fig5b", "rate_av", gamma, method, scheme,
                                 float(value), float(level)))
        return MetricReport("fig5b", CDF_COLUMNS, tuple(rows))

    # validate: closed forms against Monte-Carlo at the configured M
    for gamma in plan.gammas:
        drops = per_gamma[gamma]
        for metric_name in ("rcee", "sinr"):
            label = "exp_rcee" if metric_name == "rcee" else "sinr"
            for scheme, method in combos:
                for d in drops:
                    mc, se, closed, limit = d[metric_name][(scheme, method)]
                    rows.append(("validate", label, gamma, method, scheme, cfg.M,
                                 mc, se, closed, limit))
    return MetricReport("validate", GRID_COLUMNS, tuple(rows))


# ---------------------------------------------------------------------------
# allocator timing


def bench_allocators(k_values=(2, 3, 4, 5, 6, 7, 8, 9, 10), seed: int = 0,
                     budget: float = 1.0e4) -> list[tuple]:
    """Time the closed-form allocator against the reference solver.

    One synthetic interference profile per K; both solvers minimize the
    same average-error objective.  Returns rows (K, closed-form seconds,
    reference seconds, speedup), each the best of three measurements.
    """
    from .refsolver import ConstrainedProblem, solve

    rows = []
    for K in k_values:
        rng = seed_schedule(seed, K, "bench-profile")
        ups = 1.0 + (budget / K) * 10.0 ** rng.normal(-1.5, 0.6, K)
        beta0 = 10.0 ** rng.normal(-1.0, 0.6, K)
        profile = ppa.InterferenceProfile(upsilon=ups, beta_target=beta0)
        cfg = SystemConfig(K=K, M=200, P_total=budget, mu=1.5, seed=seed)

        loops = 100
        best_ppa = min(
            _timed(lambda: ppa.ppa_allocate(LS, profile, cfg), loops)
            for _ in range(3))
        fun, grad = ppa.make_objective(LS, profile, cfg.M)
        problem = ConstrainedProblem(objective=fun, gradient=grad,
                                     total=cfg.P_total, lower=cfg.rho_min,
                                     upper=cfg.rho_max, dimension=K)
        best_ref = min(_timed(lambda: solve(problem), 1) for _ in range(3))
        rows.append((K, best_ppa, best_ref, best_ref / best_ppa))
    return rows


def _timed(fn, loops: int) -> float:
    start = time.perf_counter()
    for _ in range(loops):
        fn()
    return (time.perf_counter() - start) / loops
