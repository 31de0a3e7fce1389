"""Neutral periods of the cylinder family and the linearized bifurcation test.

For perturbations of period T in t, rescale s = 2 pi t / T so every period
lives on [0, 2 pi] x S^1. The linearized mean-curvature operator is then

    L_T = (2 pi / T)^2 / (1 + r^2) d^2/ds^2 + (1 / r^2) d^2/dtheta^2 + varpi

and its eigenfunctions cos(m s) cos(n theta) etc. give

    lambda_{m,n}(T) = 4 pi^2 m^2 / (T^2 (1 + r^2)) + (n^2 - 1 + n^2 r^2) / (r^2 (1 + r^2)).

Only n = 0 can vanish, at T0 = 2 pi m r. A simple-eigenvalue bifurcation
needs a one-dimensional kernel on functions even in s and theta and a nonzero
pairing of (d/dT) L_T u0 with u0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import geometry as geo
from . import oracle
from .errors import DomainError, NoKernelError
from .spectra import EigenvalueEntry

KERNEL_TOL = 1e-9
N_SCAN = 3


def periodic_eigenvalue(geom: geo.CylinderGeometry, T: float, m: int, n: int) -> float:
    r2 = geom.r ** 2
    return (2.0 * math.pi * m / T) ** 2 / (1.0 + r2) + (n * n - 1.0 + n * n * r2) / (r2 * (1.0 + r2))


def periodic_eigenvalue_slope(geom: geo.CylinderGeometry, T: float, m: int) -> float:
    """d lambda_{m,n} / dT (independent of n)."""
    return -8.0 * math.pi ** 2 * m * m / (T ** 3 * (1.0 + geom.r ** 2))


def _multiplicity(m: int, n: int) -> int:
    return (1 if m == 0 else 2) * (1 if n == 0 else 2)


def periodic_spectrum(geom: geo.CylinderGeometry, T: float, m_max: int = 5, n_max: int = N_SCAN) -> list[EigenvalueEntry]:
    if not (math.isfinite(T) and T > 0.0):
        raise DomainError(f"T must be finite and > 0, got {T!r}")
    if m_max < 0 or n_max < 0:
        raise DomainError(f"cutoffs must be >= 0, got m_max={m_max}, n_max={n_max}")
    out = [
        EigenvalueEntry("trig", m, n, periodic_eigenvalue(geom, T, m, n), 2.0 * math.pi * m / T, _multiplicity(m, n))
        for m in range(m_max + 1)
        for n in range(n_max + 1)
    ]
    out.sort(key=EigenvalueEntry.sort_key)
    return out


@dataclass(frozen=True)
class BifurcationPoint:
    T0: float
    label: tuple[int, int]


def find_bifurcation_points(geom: geo.CylinderGeometry, m_max: int) -> list[BifurcationPoint]:
    """Periods T0 = 2 pi m r, m = 1..m_max, where lambda_{m,0} vanishes."""
    if m_max < 1:
        raise DomainError(f"m_max must be >= 1, got {m_max}")
    return [BifurcationPoint(2.0 * math.pi * m * geom.r, (m, 0)) for m in range(1, m_max + 1)]


def bisect_neutral_period(geom: geo.CylinderGeometry, m: int, lo: float, hi: float, tol: float = 1e-13) -> float:
    """Zero of T -> lambda_{m,0}(T) inside [lo, hi] by plain bisection."""
    f = lambda T: periodic_eigenvalue(geom, T, m, 0)
    f_lo = f(lo)
    if (f_lo < 0.0) == (f(hi) < 0.0):
        raise DomainError(f"lambda_{{{m},0}} does not change sign on [{lo!r}, {hi!r}]")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def transversality(geom: geo.CylinderGeometry, T0: float, m: int) -> float:
    """Pairing of (d/dT) L_T cos(m s) with cos(m s) over [0, 2pi] x S^1.

    (d/dT) L_T cos(m s) = 8 pi^2 m^2 / (T^3 (1 + r^2)) cos(m s) and the
    integral of cos^2(m s) over the torus is 2 pi^2.
    """
    return -periodic_eigenvalue_slope(geom, T0, m) * 2.0 * math.pi ** 2


@dataclass
class BifurcationReport:
    T0: float
    T0_candidates: list[float]
    kernel_dim_full: int
    kernel_dim_even: int
    kernel_label: tuple[int, int]
    transversality: float
    slope: float
    kernel_modes: list[EigenvalueEntry] = field(default_factory=list)

    @property
    def conditions_hold(self) -> bool:
        return self.kernel_dim_even == 1 and self.transversality != 0.0


def check_cr_conditions(geom: geo.CylinderGeometry, T0: float, tol: float = KERNEL_TOL) -> BifurcationReport:
    if not (math.isfinite(T0) and T0 > 0.0):
        raise DomainError(f"T0 must be finite and > 0, got {T0!r}")
    m_top = int(math.ceil(T0 / (2.0 * math.pi * geom.r))) + 1
    entries = periodic_spectrum(geom, T0, m_top, N_SCAN)
    kernel = [e for e in entries if abs(e.lam) <= tol]
    if not kernel:
        nearest = min(entries, key=lambda e: abs(e.lam))
        raise NoKernelError(
            f"no kernel at T0={T0!r}: smallest |lambda| is {abs(nearest.lam):.3g} at (m, n)=({nearest.m}, {nearest.n})"
        )
    full = sum(e.multiplicity for e in kernel)
    # on functions even in s and theta only cos(m s) cos(n theta) survives
    even = len(kernel)
    label = (kernel[0].m, kernel[0].n)
    return BifurcationReport(
        T0=T0,
        T0_candidates=[p.T0 for p in find_bifurcation_points(geom, m_top)],
        kernel_dim_full=full,
        kernel_dim_even=even,
        kernel_label=label,
        transversality=transversality(geom, T0, label[0]),
        slope=periodic_eigenvalue_slope(geom, T0, label[0]),
        kernel_modes=kernel,
    )


def oracle_kernel_dims(
    geom: geo.CylinderGeometry, T0: float, grid_n: int = oracle.DEFAULT_GRID, tol: float = KERNEL_TOL
) -> tuple[int, int]:
    """(even, odd) kernel dimensions in s for n = 0 from the finite-difference oracle.

    A T-periodic function even about t = 0 is a Neumann function on [0, T/2];
    an odd one is a Dirichlet function there.
    """
    counts = []
    for bc in (oracle.Neumann(), oracle.DirichletBC()):
        problem_ops = [
            oracle.assemble(oracle.ModeProblem(geom.r, 0.5 * T0, 0, bc, bc, g)) for g in (grid_n, 2 * grid_n)
        ]
        counts.append(oracle._classify_mode(problem_ops[0], problem_ops[1], tol)[2])
    return counts[0], counts[1]


def neutral_period(geom: geo.CylinderGeometry, m: int = 1) -> float:
    return 2.0 * math.pi * m * geom.r

