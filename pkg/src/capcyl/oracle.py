"""Finite-difference Sturm-Liouville oracle.

Each angular Fourier mode ``n`` reduces the Jacobi eigenproblem on the
cylinder to

    -f'' = mu f  on [0, T],    lambda = mu / (1 + r^2) + n^2 / r^2 - varpi,

with Dirichlet, Neumann or Robin end conditions. The operator ``-d^2/dt^2`` is
discretized by second-order central differences into a symmetric tridiagonal
matrix whose off-diagonal is exactly ``-1/h^2``:

* a Dirichlet end sits on a grid vertex (the boundary value is eliminated);
* a Robin end sits half a cell outside the last unknown, and the ghost value
  is eliminated through ``f_ghost = c f_edge`` with
  ``c = (1 + a h/2) / (1 - a h/2)``, which only alters the corner diagonal.

Both closures are second-order accurate. Eigenvalues are located by
bisection on Sturm counts (the inertia of ``A - s I`` from the LDL^T
recursion), so the negative count needed for Morse indices never requires an
eigenvector.

This module is deliberately independent of :mod:`capcyl.spectra` and
:mod:`capcyl.roots`: it only needs the end conditions from
:mod:`capcyl.geometry`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import geometry as geo
from .errors import DomainError

try:
    from numba import njit
except Exception:  # pragma: no cover
    def njit(*args, **kwargs):
        def wrapper(func):
            return func
        return wrapper

DEFAULT_GRID = 2000
MIN_GRID = 16
BISECTION_TOL = 1e-12
#: window (surface scale) inside which eigenvalues are classified by grid doubling
ZERO_WINDOW = 1e-3
ZERO_TOL = 1e-9


@dataclass(frozen=True)
class Neumann:
    pass


@dataclass(frozen=True)
class DirichletBC:
    pass


@dataclass(frozen=True)
class Robin:
    """f' + a f = 0 at the lower end, f' - a f = 0 at the upper end."""

    a: float


BoundaryCondition = Union[DirichletBC, Neumann, Robin]


def as_bc(value: float | str) -> BoundaryCondition:
    """Translate a :func:`capcyl.geometry.robin_coefficient` result."""
    if value == geo.DIRICHLET:
        return DirichletBC()
    if value == 0.0:
        return Neumann()
    return Robin(float(value))


@dataclass(frozen=True)
class ModeProblem:
    r: float
    T: float
    n: int
    bc_lower: BoundaryCondition
    bc_upper: BoundaryCondition
    grid_n: int = DEFAULT_GRID

    def __post_init__(self):
        if self.grid_n < MIN_GRID:
            raise DomainError(f"grid_n must be >= {MIN_GRID}, got {self.grid_n}")
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise DomainError(f"T must be finite and > 0, got {self.T!r}")
        for bc in (self.bc_lower, self.bc_upper):
            if isinstance(bc, Robin) and not math.isfinite(bc.a):
                raise DomainError(f"Robin coefficient must be finite, got {bc.a!r}")

    @property
    def scale(self) -> float:
        return 1.0 / (1.0 + self.r * self.r)

    @property
    def shift(self) -> float:
        r2 = self.r * self.r
        return self.n * self.n / r2 - 1.0 / (r2 * (1.0 + r2))


@dataclass(frozen=True)
class DiscreteOperator:
    """Symmetric tridiagonal ``-d^2/dt^2``; surface eigenvalue = scale * mu + shift."""

    diag: np.ndarray
    off: np.ndarray
    h: float
    scale: float
    shift: float
    nodes: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.diag.size

    def to_surface(self, mu):
        return self.scale * np.asarray(mu) + self.shift

    def to_matrix(self, lam: float) -> float:
        return (lam - self.shift) / self.scale

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


def _offset(bc: BoundaryCondition) -> float:
    # distance, in cells, from the boundary to the first unknown
    return 1.0 if isinstance(bc, DirichletBC) else 0.5


def _corner(bc: BoundaryCondition, h: float) -> float:
    if isinstance(bc, DirichletBC):
        return 2.0
    a = bc.a if isinstance(bc, Robin) else 0.0
    if abs(a) * h >= 1.0:
        raise DomainError(f"grid too coarse for Robin coefficient a={a!r} (a h = {a * h:.3g})")
    c = (1.0 + 0.5 * a * h) / (1.0 - 0.5 * a * h)
    return 2.0 - c


def assemble_interval(
    T: float, lower: BoundaryCondition, upper: BoundaryCondition, grid_n: int, scale: float = 1.0, shift: float = 0.0
) -> DiscreteOperator:
    """Discretize ``-f''`` on ``[0, T]`` with ``grid_n`` unknowns."""
    n = int(grid_n)
    if n < MIN_GRID:
        raise DomainError(f"grid_n must be >= {MIN_GRID}, got {grid_n}")
    o_lo, o_hi = _offset(lower), _offset(upper)
    h = T / (n - 1 + o_lo + o_hi)
    inv_h2 = 1.0 / (h * h)
    diag = np.full(n, 2.0 * inv_h2)
    diag[0] = _corner(lower, h) * inv_h2
    diag[-1] = _corner(upper, h) * inv_h2
    off = np.full(n - 1, -inv_h2)
    nodes = h * (o_lo + np.arange(n))
    return DiscreteOperator(diag=diag, off=off, h=h, scale=scale, shift=shift, nodes=nodes)


def assemble(problem: ModeProblem) -> DiscreteOperator:
    return assemble_interval(
        problem.T, problem.bc_lower, problem.bc_upper, problem.grid_n, problem.scale, problem.shift
    )


# --------------------------------------------------------------------------
# Sturm counts and bisection
# --------------------------------------------------------------------------


@njit(cache=True)
def _sturm_count(diag, off, s):
    """Number of eigenvalues of the tridiagonal matrix strictly below ``s``."""
    n = diag.shape[0]
    pivmin = 1e-300
    count = 0
    q = diag[0] - s
    if q == 0.0:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, n):
        q = diag[i] - s - off[i - 1] * off[i - 1] / q
        if q == 0.0:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def _bisect_index(diag, off, k, lo, hi, tol):
    """k-th smallest eigenvalue (0-based) inside the bracket [lo, hi]."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)) or mid == lo or mid == hi:
            break
        if _sturm_count(diag, off, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _gershgorin(op: DiscreteOperator) -> tuple[float, float]:
    rad = np.zeros(op.size)
    rad[:-1] += np.abs(op.off)
    rad[1:] += np.abs(op.off)
    return float(np.min(op.diag - rad)), float(np.max(op.diag + rad))


def count_below(op: DiscreteOperator, lam: float) -> int:
    """Number of surface eigenvalues strictly below ``lam``."""
    return int(_sturm_count(op.diag, op.off, op.to_matrix(lam)))


def matrix_eigenvalues(op: DiscreteOperator, indices: Sequence[int], tol: float = BISECTION_TOL) -> np.ndarray:
    lo, hi = _gershgorin(op)
    lo -= 1.0 + abs(lo) * 1e-12
    hi += 1.0 + abs(hi) * 1e-12
    return np.array([_bisect_index(op.diag, op.off, int(k), lo, hi, tol) for k in indices])


def lowest_eigenvalues(op: DiscreteOperator, k: int, tol: float = BISECTION_TOL) -> np.ndarray:
    """The ``k`` smallest eigenvalues on the surface scale, ascending."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    k = min(k, op.size)
    return op.to_surface(matrix_eigenvalues(op, range(k), tol))


def eigenvalues_below(op: DiscreteOperator, lam_max: float, tol: float = BISECTION_TOL) -> np.ndarray:
    """All surface eigenvalues strictly below ``lam_max``."""
    k = count_below(op, lam_max)
    if k == 0:
        return np.empty(0)
    return lowest_eigenvalues(op, k, tol)


# --------------------------------------------------------------------------
# Scenario level
# --------------------------------------------------------------------------


def angular_modes(scenario: geo.SupportScenario) -> tuple[int, int]:
    """First admissible angular mode and the multiplicity of each n >= 1.

    On the full circle each n >= 1 carries cos and sin; on the half circle with
    clamped sides only sin(n theta), n >= 1, survives.
    """
    if getattr(scenario, "angular_domain", "full") == "half_dirichlet":
        return 1, 1
    return 0, 2


def _multiplicity(n: int, pair: int) -> int:
    return 1 if n == 0 else pair


def mode_operator(
    scenario: geo.SupportScenario, geom: geo.CylinderGeometry | None, n: int, grid_n: int
) -> DiscreteOperator:
    """Discrete 1-D operator for angular mode ``n`` of ``scenario``."""
    geo.validate(scenario, geom)
    if isinstance(scenario, geo.SlabHorosphere):
        # t-direction clamped, lateral mode cos(n pi s) exact
        tau2 = scenario.tau ** 2
        return assemble_interval(
            scenario.T, DirichletBC(), DirichletBC(), grid_n, scale=tau2, shift=tau2 * (n * math.pi) ** 2
        )
    lower, upper = geo.end_conditions(scenario, geom)
    T = geo.scenario_length(scenario, geom)
    return assemble(ModeProblem(geom.r, T, n, as_bc(lower), as_bc(upper), grid_n))


@dataclass
class OracleIndex:
    count: int
    converged: bool
    nullity: int
    counts: tuple[int, int]
    grid_n: int

    def __iter__(self):
        # unpacks as (count, converged)
        return iter((self.count, self.converged))


def _classify_mode(op_n: DiscreteOperator, op_2n: DiscreteOperator, tol: float) -> tuple[int, int, int]:
    """Negative counts on both grids and the nullity, using grid doubling near 0.

    Eigenvalues farther than ZERO_WINDOW from 0 are classified by their sign
    directly. Inside the window the discretization error is estimated from the
    two grids; an eigenvalue whose extrapolated value lies within three error
    estimates (or ``tol``) of zero counts towards the nullity, not the index.
    """
    far = count_below(op_n, -ZERO_WINDOW)
    upto = count_below(op_n, ZERO_WINDOW)
    far_2n = count_below(op_2n, -ZERO_WINDOW)
    upto_2n = count_below(op_2n, ZERO_WINDOW)
    lo_idx = min(far, far_2n)
    hi_idx = max(upto, upto_2n)
    neg_n = lo_idx
    neg_2n = lo_idx
    nullity = 0
    if hi_idx > lo_idx:
        idx = range(lo_idx, hi_idx)
        lam_n = op_n.to_surface(matrix_eigenvalues(op_n, idx))
        lam_2n = op_2n.to_surface(matrix_eigenvalues(op_2n, idx))
        for a, b in zip(lam_n, lam_2n):
            err = abs(a - b)
            band = max(tol, 3.0 * err)
            extrapolated = b + (b - a) / 3.0
            if abs(extrapolated) <= band:
                nullity += 1
                continue
            neg_n += a < -band
            neg_2n += b < -band
    return neg_n, neg_2n, nullity


def oracle_index(
    scenario: geo.SupportScenario,
    geom: geo.CylinderGeometry | None,
    grid_n: int = DEFAULT_GRID,
    tol: float = ZERO_TOL,
) -> OracleIndex:
    """Negative-eigenvalue count at ``grid_n`` and ``2 grid_n``.

    The angular modes are scanned upwards from the first admissible one. The
    1-D operator is the same for every n and only the shift n^2/r^2 grows, so
    the scan stops at the first mode whose lowest eigenvalue is clearly
    positive on both grids; no higher mode can contribute.
    """
    n, pair = angular_modes(scenario)
    c1 = c2 = nullity = 0
    while True:
        op_n = mode_operator(scenario, geom, n, grid_n)
        op_2n = mode_operator(scenario, geom, n, 2 * grid_n)
        if min(lowest_eigenvalues(op_n, 1)[0], lowest_eigenvalues(op_2n, 1)[0]) > ZERO_WINDOW:
            break
        mult = _multiplicity(n, pair)
        a, b, z = _classify_mode(op_n, op_2n, tol)
        c1 += mult * a
        c2 += mult * b
        nullity += mult * z
        n += 1
    return OracleIndex(count=c2, converged=c1 == c2, nullity=nullity, counts=(c1, c2), grid_n=grid_n)


def mode_eigenvalues(
    scenario: geo.SupportScenario, geom: geo.CylinderGeometry | None, n: int, grid_n: int, lam_max: float
) -> np.ndarray:
    return eigenvalues_below(mode_operator(scenario, geom, n, grid_n), lam_max)


# --------------------------------------------------------------------------
# Closed form vs oracle
# --------------------------------------------------------------------------

CROSSCHECK_CAP = 10.0
#: grid-to-grid changes below this many rounding units of ||A|| carry no order information
ORDER_NOISE_FACTOR = 10.0


@dataclass
class Mismatch:
    branch: str
    m: int
    n: int
    closed_form: float
    oracle: float

    @property
    def deviation(self) -> float:
        return abs(self.closed_form - self.oracle)


@dataclass
class CrossCheckReport:
    scenario: str
    grid_n: int
    compared: int
    max_deviation: float
    worst: Optional[tuple[str, int, int]]
    order: float
    tol: float
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def _closed_form_by_mode(scenario, geom, cap: float) -> dict[int, list]:
    # imported here so that the oracle itself never depends on the closed forms
    from . import spectra

    if isinstance(scenario, geo.SlabHorosphere):
        tau2 = scenario.tau ** 2
        m_max = int(math.sqrt(cap / tau2) * scenario.T / math.pi) + 1
        n_max = int(math.sqrt(cap / tau2) / math.pi) + 1
        entries = spectra.slab_horosphere_spectrum(scenario.tau, scenario.T, max(m_max, 1), n_max)
    else:
        m_max = spectra._m_needed(scenario, geom, cap)
        modes = spectra.longitudinal_modes(scenario, geom, m_max)
        n_max = spectra._n_needed(geom, modes, cap)
        entries = spectra._entries(geom, modes, spectra._angular_modes(scenario, n_max))
    by_mode: dict[int, list] = {}
    for e in entries:
        if e.lam < cap:
            by_mode.setdefault(e.n, []).append(e)
    return by_mode


def crosscheck(
    scenario: geo.SupportScenario,
    geom: geo.CylinderGeometry | None,
    tol: float = 1e-3,
    grid_n: int = 4000,
    cap: float = CROSSCHECK_CAP,
) -> CrossCheckReport:
    """Compare every closed-form eigenvalue below ``cap`` with the oracle.

    Entries are matched by rank within each angular mode. The convergence
    order comes from the entry whose value moves most between grid_n and
    2 grid_n, using a third, coarser grid at grid_n / 2 (a finer third grid
    would be limited by rounding in the 1/h^2 entries).
    """
    by_mode = _closed_form_by_mode(scenario, geom, cap)
    mismatches: list[Mismatch] = []
    worst_dev, worst = 0.0, None
    compared = 0
    order_probe = (0.0, None, None)
    noise = 0.0
    for n in sorted(by_mode):
        expected = by_mode[n]
        op = mode_operator(scenario, geom, n, grid_n)
        got = lowest_eigenvalues(op, len(expected))
        op_2 = mode_operator(scenario, geom, n, 2 * grid_n)
        got_2 = lowest_eigenvalues(op_2, len(expected))
        noise = max(noise, ORDER_NOISE_FACTOR * np.finfo(float).eps * _gershgorin(op)[1] * op.scale)
        for k, e in enumerate(expected):
            compared += 1
            dev = abs(got[k] - e.lam)
            if dev > worst_dev:
                worst_dev, worst = dev, (e.branch, e.m, e.n)
            if dev > tol:
                mismatches.append(Mismatch(e.branch, e.m, e.n, e.lam, float(got[k])))
            step = abs(got[k] - got_2[k])
            if step > order_probe[0]:
                order_probe = (step, n, k)
        # an oracle eigenvalue below the cap with no closed-form partner
        extra = count_below(op_2, cap - tol) - len(expected)
        if extra > 0:
            mismatches.append(Mismatch("missing", -1, n, math.nan, float(lowest_eigenvalues(op_2, len(expected) + 1)[-1])))
    order = math.nan
    step, n, k = order_probe
    if n is not None and step > noise:
        lam_half = lowest_eigenvalues(mode_operator(scenario, geom, n, max(grid_n // 2, MIN_GRID)), k + 1)[k]
        lam = lowest_eigenvalues(mode_operator(scenario, geom, n, grid_n), k + 1)[k]
        order = math.log2(abs(lam_half - lam) / step)
    return CrossCheckReport(
        scenario=scenario.kind,
        grid_n=grid_n,
        compared=compared,
        max_deviation=worst_dev,
        worst=worst,
        order=order,
        tol=tol,
        mismatches=mismatches,
    )
