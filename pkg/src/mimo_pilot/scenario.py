"""System configuration, cell geometry and large-scale fading.

The deployment is a target hexagonal cell at the origin surrounded by one
ring of co-channel interferer cells.  Cell spacing follows from the reuse
factor, users are dropped uniformly in each hexagon, and the attenuation
between every user and the target base station combines log-normal
shadowing with a distance power law.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Only a single interferer ring is modelled, so these are the reuse factors
# for which the co-channel distance D = r*sqrt(3*Gamma) is meaningful.
REUSE_FACTORS = (1, 3, 7)

MAX_CELLS = 7


class ConfigurationError(ValueError):
    """A system configuration violates one of its validity constraints."""


class FixtureFormatError(ValueError):
    """A large-scale fading fixture file is malformed."""


def db_to_linear(value_db: float) -> float:
    """Convert a dB quantity to linear scale."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    """Convert a positive linear quantity to dB."""
    if value <= 0:
        raise ValueError("dB conversion requires a positive value")
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class SystemConfig:
    """Static parameters of the multi-cell uplink.

    Parameters
    ----------
    K : int
        Users per cell (at least 2).
    M : int
        Base-station antennas (at least 2; the expected relative estimation
        error is unbounded for a single antenna).
    P_total : float
        Total pilot power budget of a cell, linear scale.
    L : int
        Number of cells including the target cell, at most 7 (one ring).
    tau : int or None
        Pilot sequence length; defaults to K.  Each cell reuses the same
        orthonormal book, which is what creates pilot contamination.
    mu : float
        Upper-bound multiplier of the per-user power box
        [P/(2K), mu*P/K]; must lie in [3/2, (K+1)/2] so that the box
        intersects the budget hyperplane.
    rho_u : float
        Uplink data transmit power (linear) used in the SINR expressions.
    Gamma : int
        Frequency reuse factor, one of {1, 3, 7}.
    r : float
        Cell radius (circumradius of the hexagon), metres.
    sigma_sh : float
        Shadowing standard deviation in dB; 0 disables shadowing.
    gamma_pl : float
        Path-loss exponent.
    r_min : float
        Reference distance of the attenuation model, metres.
    B : float
        Bandwidth in Hz.
    slot_fraction : float
        Fraction (T_s - T_p)/T_s of the slot left for uplink data.
    Tu, To : float
        Useful symbol duration and total symbol duration; only their ratio
        enters the rate, so any common time unit works.
    seed : int
        Root seed for every random stream derived from this configuration.
    """

    K: int
    M: int
    P_total: float
    L: int = 7
    tau: int | None = None
    mu: float = 1.5
    rho_u: float = 100.0
    Gamma: int = 1
    r: float = 500.0
    sigma_sh: float = 8.0
    gamma_pl: float = 3.8
    r_min: float = 200.0
    B: float = 20.0e6
    slot_fraction: float = 3.0 / 7.0
    Tu: float = 66.7
    To: float = 71.4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tau is None:
            object.__setattr__(self, "tau", self.K)
        if not (isinstance(self.K, int) and self.K >= 2):
            raise ConfigurationError("K must be an integer >= 2")
        if not (isinstance(self.M, int) and self.M >= 2):
            raise ConfigurationError("M must be an integer >= 2")
        if not (isinstance(self.L, int) and 1 <= self.L <= MAX_CELLS):
            raise ConfigurationError(f"L must be an integer in [1, {MAX_CELLS}]")
        if not (isinstance(self.tau, int) and self.tau >= self.K):
            raise ConfigurationError("tau must be an integer >= K")
        if not self.P_total > 0:
            raise ConfigurationError("P_total must be positive")
        if not (1.5 <= self.mu <= (self.K + 1) / 2):
            raise ConfigurationError(
                f"mu={self.mu} outside [1.5, {(self.K + 1) / 2}] for K={self.K}"
            )
        if not self.rho_u > 0:
            raise ConfigurationError("rho_u must be positive")
        if self.Gamma not in REUSE_FACTORS:
            raise ConfigurationError(f"Gamma must be one of {REUSE_FACTORS}")
        if not (self.r > 0 and self.r_min > 0):
            raise ConfigurationError("r and r_min must be positive")
        if self.sigma_sh < 0:
            raise ConfigurationError("sigma_sh must be non-negative")
        if not self.gamma_pl > 0:
            raise ConfigurationError("gamma_pl must be positive")
        if not self.B > 0:
            raise ConfigurationError("B must be positive")
        if not 0 < self.slot_fraction < 1:
            raise ConfigurationError("slot_fraction must lie in (0, 1)")
        if not (self.Tu > 0 and self.To > 0):
            raise ConfigurationError("Tu and To must be positive")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigurationError("seed must be a non-negative integer")

    @property
    def rho_min(self) -> float:
        """Lower per-user pilot power bound P/(2K)."""
        return self.P_total / (2 * self.K)

    @property
    def rho_max(self) -> float:
        """Upper per-user pilot power bound mu*P/K."""
        return self.mu * self.P_total / self.K

    @property
    def cell_spacing(self) -> float:
        """Distance between co-channel cell centres, r*sqrt(3*Gamma)."""
        return self.r * math.sqrt(3.0 * self.Gamma)

    @property
    def rate_prefactor(self) -> float:
        """Bandwidth and overhead factor multiplying log2(1 + SINR)."""
        return (self.B / self.Gamma) * self.slot_fraction * (self.Tu / self.To)

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_file(cls, path: str | Path) -> "SystemConfig":
        """Read a ``key = value`` configuration file.

        Keys are field names of this class; values are parsed with the
        field's type.  Blank lines and ``#`` comments are ignored.
        """
        text = Path(path).read_text()
        known = {f.name: f for f in dataclasses.fields(cls)}
        values: dict[str, object] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in known:
                raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                if key in ("K", "M", "L", "tau", "Gamma", "seed"):
                    values[key] = int(val)
                else:
                    values[key] = float(val)
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {val!r}") from exc
        missing = {"K", "M", "P_total"} - set(values)
        if missing:
            raise ConfigurationError(f"{path}: missing required keys {sorted(missing)}")
        return cls(**values)  # type: ignore[arg-type]

    def to_file(self, path: str | Path) -> None:
        """Write every field as a ``key = value`` line."""
        lines = [f"{f.name} = {getattr(self, f.name)}" for f in dataclasses.fields(self)]
        Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class CellLayout:
    """Cell centre coordinates; the target cell is index 0 at the origin."""

    centers: np.ndarray  # (L, 2)
    radius: float
    reuse_factor: int

    @property
    def num_cells(self) -> int:
        return self.centers.shape[0]

    @property
    def spacing(self) -> float:
        return self.radius * math.sqrt(3.0 * self.reuse_factor)


def build_layout(cfg: SystemConfig) -> CellLayout:
    """Place the target cell at the origin and L-1 co-channel interferers.

    The interferers sit on a ring of radius r*sqrt(3*Gamma) at multiples
    of 60 degrees, the first-ring positions of a hexagonal reuse pattern.
    """
    d = cfg.cell_spacing
    centers = np.zeros((cfg.L, 2))
    for i in range(1, cfg.L):
        angle = math.radians(60.0 * (i - 1))
        centers[i] = (d * math.cos(angle), d * math.sin(angle))
    return CellLayout(centers=centers, radius=cfg.r, reuse_factor=cfg.Gamma)


def in_hexagon(points: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Membership test for a flat-top hexagon of given circumradius.

    Accepts an (n, 2) array and returns a boolean mask.  Boundary points
    count as inside.
    """
    p = np.atleast_2d(points) - np.asarray(center)
    x, y = np.abs(p[:, 0]), np.abs(p[:, 1])
    s3 = math.sqrt(3.0)
    return (y <= s3 * radius / 2.0) & (s3 * x + y <= s3 * radius)


def sample_hexagon(center, radius: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n points uniformly from a flat-top hexagon.

    Rejection sampling from the bounding rectangle; acceptance rate is
    3/4, so the expected number of proposals is 4n/3.  Consumes a
    deterministic function of the generator state.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    center = np.asarray(center, dtype=float)
    out = np.empty((n, 2))
    filled = 0
    while filled < n:
        need = n - filled
        # modest oversampling keeps the loop count low without wasting draws
        batch = need + max(8, need // 2)
        cand = np.empty((batch, 2))
        cand[:, 0] = rng.uniform(-radius, radius, batch)
        cand[:, 1] = rng.uniform(-math.sqrt(3.0) * radius / 2.0,
                                 math.sqrt(3.0) * radius / 2.0, batch)
        good = cand[in_hexagon(cand, np.zeros(2), radius)]
        take = min(need, good.shape[0])
        out[filled:filled + take] = good[:take]
        filled += take
    return out + center


def drop_users(cfg: SystemConfig, layout: CellLayout, rng: np.random.Generator) -> np.ndarray:
    """Place K users uniformly in each cell; returns an (L, K, 2) array."""
    positions = np.empty((layout.num_cells, cfg.K, 2))
    for l in range(layout.num_cells):
        positions[l] = sample_hexagon(layout.centers[l], layout.radius, cfg.K, rng)
    return positions


def attenuation(distance, r_min: float, exponent: float):
    """Distance-dependent part of the large-scale gain, 1/(1 + (d/r_min)^gamma).

    Bounded by 1 at zero distance, equals 1/2 at the reference distance.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d < 0):
        raise ValueError("distances must be non-negative")
    return 1.0 / (1.0 + (d / r_min) ** exponent)


def sample_shadowing(sigma_sh: float, size, rng: np.random.Generator) -> np.ndarray:
    """Log-normal shadowing gains: 10*log10(z) is N(0, sigma_sh^2)."""
    if sigma_sh < 0:
        raise ValueError("sigma_sh must be non-negative")
    return 10.0 ** (sigma_sh * rng.standard_normal(size) / 10.0)


@dataclass(frozen=True)
class LargeScaleRealization:
    """Large-scale gains beta[j, l, k]: user k of cell l seen by BS j.

    Only the target-cell slice beta[0] is consulted by the estimation and
    allocation code; the full tensor is kept so a realization is
    self-contained.  ``positions`` is None for table-born realizations.
    """

    beta: np.ndarray  # (L, L, K)
    positions: np.ndarray | None = None

    def __post_init__(self) -> None:
        b = np.asarray(self.beta, dtype=float)
        if b.ndim != 3 or b.shape[0] != b.shape[1]:
            raise ValueError("beta must have shape (L, L, K)")
        if not np.all(np.isfinite(b)) or np.any(b <= 0):
            raise ValueError("large-scale gains must be positive and finite")
        object.__setattr__(self, "beta", b)

    @property
    def num_cells(self) -> int:
        return self.beta.shape[0]

    @property
    def num_users(self) -> int:
        return self.beta.shape[2]

    @property
    def target_slice(self) -> np.ndarray:
        """Gains (L, K) toward the target base station."""
        return self.beta[0]


def large_scale(cfg: SystemConfig, layout: CellLayout, positions: np.ndarray,
                rng: np.random.Generator) -> LargeScaleRealization:
    """Compute the large-scale gain tensor for one user drop.

    beta[j, l, k] = z / (1 + (d/r_min)^gamma_pl) with d the distance from
    user (l, k) to BS j and z an i.i.d. log-normal shadowing gain.  With
    sigma_sh = 0 the gains are a deterministic function of geometry.
    """
    positions = np.asarray(positions, dtype=float)
    L = layout.num_cells
    if positions.shape != (L, cfg.K, 2):
        raise ValueError(f"positions must have shape ({L}, {cfg.K}, 2)")
    # distances: BS j at centers[j], user (l, k) at positions[l, k]
    diff = positions[None, :, :, :] - layout.centers[:, None, None, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    z = sample_shadowing(cfg.sigma_sh, (L, L, cfg.K), rng)
    beta = z * attenuation(dist, cfg.r_min, cfg.gamma_pl)
    return LargeScaleRealization(beta=beta, positions=positions)


def save_beta_fixture(real: LargeScaleRealization, path: str | Path, cell: int = 0) -> None:
    """Write one target-cell slice of the gain tensor as CSV.

    Header row is ``user_1,...,user_K``; each of the L data rows gives the
    gains from that cell's users toward base station ``cell``.
    """
    b = real.beta[cell]
    header = ",".join(f"user_{k + 1}" for k in range(b.shape[1]))
    rows = [",".join(repr(float(v)) for v in row) for row in b]
    Path(path).write_text(header + "\n" + "\n".join(rows) + "\n")


def load_beta_fixture(path: str | Path) -> LargeScaleRealization:
    """Load a target-cell gain slice saved by :func:`save_beta_fixture`.

    The slice is replicated across the target-cell axis so the result is a
    well-formed (L, L, K) realization; code only ever reads slice 0.
    """
    text = Path(path).read_text()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FixtureFormatError(f"{path}: empty fixture")
    header = [h.strip() for h in lines[0].split(",")]
    expected = [f"user_{k + 1}" for k in range(len(header))]
    if header != expected:
        raise FixtureFormatError(f"{path}: header must be user_1..user_K, got {header}")
    K = len(header)
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != K:
            raise FixtureFormatError(f"{path}:{lineno}: expected {K} columns, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise FixtureFormatError(f"{path}:{lineno}: non-numeric entry") from exc
    slab = np.asarray(rows)
    if not np.all(np.isfinite(slab)) or np.any(slab <= 0):
        raise FixtureFormatError(f"{path}: gains must be positive and finite")
    if not 1 <= slab.shape[0] <= MAX_CELLS:
        raise FixtureFormatError(
            f"{path}: needs 1 to {MAX_CELLS} cell rows, got {slab.shape[0]}")
    L = slab.shape[0]
    beta = np.broadcast_to(slab, (L, L, K)).copy()
    return LargeScaleRealization(beta=beta, positions=None)
