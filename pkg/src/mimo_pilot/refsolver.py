"""General-purpose solver for budgeted box-constrained minimization.

Used as an independent check of the closed-form allocator: it knows
nothing about the objective's structure beyond a gradient, and handles
the feasible set {sum x = total, lo <= x <= hi} by Euclidean projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def project_bounded_simplex(v, total: float, lo: float, hi: float) -> np.ndarray:
    """Euclidean projection onto {x : sum x = total, lo <= x_i <= hi}.

    The projection is x_i = clip(v_i - theta, lo, hi) for the theta making
    the budget tight; sum clip(v - theta) is non-increasing in theta, so
    theta is bracketed and bisected, then recovered exactly from the free
    set (the clipped pattern makes the budget equation linear in theta).
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("v must be a non-empty 1-D array")
    if not lo <= hi:
        raise ValueError("need lo <= hi")
    n = v.size
    slack = 1e-12 * max(1.0, abs(total))
    if not (n * lo - slack <= total <= n * hi + slack):
        raise ValueError("box and budget are incompatible")

    def budget(theta: float) -> float:
        return float(np.clip(v - theta, lo, hi).sum()) - total

    a, b = float(v.min() - hi), float(v.max() - lo)
    if budget(a) < 0 or budget(b) > 0:  # only possible at the degenerate edges
        theta = a if abs(budget(a)) <= abs(budget(b)) else b
    else:
        while b - a > 1e-13 * max(1.0, abs(a), abs(b)):
            mid = 0.5 * (a + b)
            if budget(mid) > 0:
                a = mid
            else:
                b = mid
        theta = 0.5 * (a + b)
        x = v - theta
        free = (x > lo) & (x < hi)
        if np.any(free):
            pinned = np.where(x >= hi, hi, 0.0) + np.where(x <= lo, lo, 0.0)
            theta = (v[free].sum() - (total - pinned.sum())) / free.sum()
    return np.clip(v - theta, lo, hi)


@dataclass(frozen=True)
class ConstrainedProblem:
    """Minimize ``objective`` over {sum x = total, lower <= x <= upper}.

    Provide either a start point ``x0`` or the ``dimension`` so the solver
    can start from the uniform feasible point.
    """

    objective: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    total: float
    lower: float
    upper: float
    x0: np.ndarray | None = None
    dimension: int | None = None


@dataclass(frozen=True)
class SolveResult:
    x: np.ndarray
    objective: float
    iterations: int
    converged: bool
    pg_norm: float


def solve(problem: ConstrainedProblem, tol: float = 1e-10,
          max_iter: int = 100_000) -> SolveResult:
    """Projected gradient descent with a backtracking line search.

    Steps x+ = proj(x - t * grad) are accepted under an Armijo decrease
    along the projection arc; the accepted step seeds the next trial step
    via the Barzilai-Borwein ratio.  Terminates when the fixed-step
    projected-gradient norm ||x - proj(x - grad)|| drops below ``tol`` or
    after ``max_iter`` iterations, in which case the best point found is
    returned with ``converged=False`` rather than raising.
    """
    def proj(z: np.ndarray) -> np.ndarray:
        return project_bounded_simplex(z, problem.total, problem.lower, problem.upper)

    if problem.x0 is not None:
        x = proj(np.asarray(problem.x0, dtype=float))
    elif problem.dimension is not None:
        x = proj(np.full(problem.dimension, problem.total / problem.dimension))
    else:
        raise ValueError("provide x0 or dimension")
    f = problem.objective(x)
    g = problem.gradient(x)
    t = 1.0
    pg = x - proj(x - g)
    pg_norm = float(np.linalg.norm(pg))
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if pg_norm < tol:
            return SolveResult(x=x, objective=f, iterations=iterations - 1,
                               converged=True, pg_norm=pg_norm)
        accepted = False
        while t > 1e-300:
            x_new = proj(x - t * g)
            step = x_new - x
            decrease = float(np.dot(g, step))
            f_new = problem.objective(x_new)
            if f_new <= f + 1e-4 * decrease:
                accepted = True
                break
            t *= 0.5
        if not accepted or not np.any(x_new != x):
            break  # stalled at numerical resolution
        g_new = problem.gradient(x_new)
        # Barzilai-Borwein step for the next iteration, kept positive
        y = g_new - g
        sy = float(np.dot(step, y))
        if sy > 0:
            t = float(np.dot(step, step)) / sy
        else:
            t *= 2.0
        x, f, g = x_new, f_new, g_new
        pg = x - proj(x - g)
        pg_norm = float(np.linalg.norm(pg))
    return SolveResult(x=x, objective=f, iterations=iterations,
                       converged=pg_norm < tol, pg_norm=pg_norm)
