"""Closed-form Jacobi eigenvalues of supported cylinder pieces and their indices.

Separating u(t, theta) = f(t) g(theta) on the cylinder of model radius r
turns the Jacobi eigenproblem into -f'' = mu f on [0, T] and

    lambda = mu / (1 + r^2) + n^2 / r^2 - varpi.

Every longitudinal solution is one of

* trig:        f = A cos(delta t) + B sin(delta t),    mu = delta^2
* hyperbolic:  f = A cosh(delta t) + B sinh(delta t),  mu = -delta^2
* linear:      f = A + B t,                            mu = 0

and which of them satisfy the end conditions depends on the support. The
families returned here do not depend on n, so a scenario is described by its
list of longitudinal modes and the angular modes are added on top.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

from . import geometry as geo
from . import roots
from .errors import DomainError

Branch = Literal["trig", "hyperbolic", "linear"]

_BRANCH_ORDER = {"hyperbolic": 0, "linear": 1, "trig": 2}

DEFAULT_N_MAX = 3
LINEAR_BRANCH_TOL = 1e-12
ZERO_REL_TOL = 1e-9


@dataclass(frozen=True)
class EigenvalueEntry:
    branch: Branch
    m: int
    n: int
    lam: float
    delta: Optional[float] = None
    multiplicity: int = 1

    def sort_key(self):
        return (self.lam, _BRANCH_ORDER[self.branch], self.m, self.n)


@dataclass(frozen=True)
class LongitudinalMode:
    branch: Branch
    m: int
    delta: Optional[float]

    @property
    def mu(self) -> float:
        if self.branch == "trig":
            return self.delta * self.delta
        if self.branch == "hyperbolic":
            return -self.delta * self.delta
        return 0.0


@dataclass
class IndexReport:
    scenario: str
    counted_index: int
    nullity: int
    paper_index: Optional[int]
    agrees: Optional[bool]
    weak_index_bounds: tuple[int, int]
    negatives: list[EigenvalueEntry] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def strongly_stable(self) -> bool:
        return self.counted_index == 0

    @property
    def lambda_min(self) -> Optional[float]:
        return self.negatives[0].lam if self.negatives else None


# --------------------------------------------------------------------------
# Eigenvalue formulas
# --------------------------------------------------------------------------


def trig_eigenvalue(geom: geo.CylinderGeometry, delta: float, n: int) -> float:
    return delta * delta / (1.0 + geom.r ** 2) + n * n / geom.r ** 2 - geom.varpi


def hyperbolic_eigenvalue(geom: geo.CylinderGeometry, delta: float, n: int) -> float:
    return -delta * delta / (1.0 + geom.r ** 2) + n * n / geom.r ** 2 - geom.varpi


def linear_eigenvalue(geom: geo.CylinderGeometry, n: int) -> float:
    return n * n / geom.r ** 2 - geom.varpi


def eigenvalue(geom: geo.CylinderGeometry, mode: LongitudinalMode, n: int) -> float:
    return mode.mu / (1.0 + geom.r ** 2) + n * n / geom.r ** 2 - geom.varpi


def dirichlet_eigenvalue(geom: geo.CylinderGeometry, T: float, m: int, n: int) -> float:
    """m^2 pi^2 / ((1+r^2) T^2) + (n^2 - 1 + n^2 r^2) / (r^2 (1+r^2))."""
    r2 = geom.r ** 2
    return (m * math.pi / T) ** 2 / (1.0 + r2) + (n * n - 1.0 + n * n * r2) / (r2 * (1.0 + r2))


# --------------------------------------------------------------------------
# Longitudinal modes per support
# --------------------------------------------------------------------------


def _cosine_modes(T: float, m_max: int, first: int) -> list[LongitudinalMode]:
    return [LongitudinalMode("trig", m, m * math.pi / T) for m in range(first, m_max + 1)]


def _trig_roots(eq, m_max: int) -> list[LongitudinalMode]:
    return [LongitudinalMode("trig", root.m, root.delta) for root in roots.roots_in_intervals(eq, m_max).roots]


def _robin_dirichlet_modes(T: float, theta: float, m_max: int) -> list[LongitudinalMode]:
    # f'(0) + Theta f(0) = 0, f(T) = 0
    modes = []
    if abs(T * theta - 1.0) < LINEAR_BRANCH_TOL:
        modes.append(LongitudinalMode("linear", 0, None))
    if theta == 1.0:
        hyp, trig = roots.TanhLinear(T), roots.TanLinear(T)
    else:
        hyp, trig = roots.TanhScaled(T, theta), roots.TanScaled(T, theta)
    modes += [LongitudinalMode("hyperbolic", root.m, root.delta) for root in roots.hyperbolic_roots(hyp).roots]
    modes += _trig_roots(trig, m_max)
    return modes


def longitudinal_modes(
    scenario: geo.SupportScenario, geom: geo.CylinderGeometry, m_max: int
) -> list[LongitudinalMode]:
    """Solutions of -f'' = mu f under the end conditions of ``scenario``.

    ``m_max`` bounds the trig labels (the interval index for transcendental
    roots).
    """
    if isinstance(scenario, geo.SlabHorosphere):
        raise TypeError("the slab spectrum is not of cylinder type; use slab_horosphere_spectrum")
    geo.validate(scenario, geom)
    if isinstance(scenario, geo.Dirichlet):
        return _cosine_modes(scenario.T, m_max, 1)
    if isinstance(scenario, geo.GeodesicSpheres):
        # Neumann at both ends: the constant function is admissible too
        return [LongitudinalMode("linear", 0, None)] + _cosine_modes(scenario.T, m_max, 1)
    if isinstance(scenario, geo.Horospheres):
        # f'(0) + f(0) = 0 and f'(T) + f(T) = 0 force delta = 1 on the hyperbolic branch
        return [LongitudinalMode("hyperbolic", 0, 1.0)] + _cosine_modes(scenario.T, m_max, 1)
    if isinstance(scenario, geo.HalfGeodesicPlane):
        T = scenario.T
        return [LongitudinalMode("trig", m, (2 * m + 1) * math.pi / (2.0 * T)) for m in range(m_max + 1)]
    if isinstance(scenario, geo.HalfHorosphere):
        return _robin_dirichlet_modes(scenario.T, 1.0, m_max)
    if isinstance(scenario, geo.Equidistant):
        return _robin_dirichlet_modes(scenario.T, geo.equidistant_theta(scenario.H0, geom), m_max)
    if isinstance(scenario, geo.Ball):
        ball = geo.ball_geometry(scenario.H0, scenario.rho, geom.r)
        hyp = roots.hyperbolic_roots(roots.TanhBall(ball.T, ball.sigma))
        modes = [LongitudinalMode("hyperbolic", root.m, root.delta) for root in hyp.roots]
        return modes + _trig_roots(roots.TanBall(ball.T, ball.sigma), m_max)
    raise TypeError(f"unsupported scenario {scenario!r}")


def _angular_modes(scenario, n_max: int) -> list[tuple[int, int]]:
    """(n, multiplicity) for n up to ``n_max``."""
    if getattr(scenario, "angular_domain", "full") == "half_dirichlet":
        return [(n, 1) for n in range(1, n_max + 1)]
    return [(n, 1 if n == 0 else 2) for n in range(0, n_max + 1)]


def _entries(
    geom: geo.CylinderGeometry, modes: list[LongitudinalMode], angular: list[tuple[int, int]]
) -> list[EigenvalueEntry]:
    out = [
        EigenvalueEntry(mode.branch, mode.m, n, eigenvalue(geom, mode, n), mode.delta, mult)
        for mode in modes
        for n, mult in angular
    ]
    out.sort(key=EigenvalueEntry.sort_key)
    return out


def _check_cutoffs(m_max: int, n_max: int) -> None:
    if m_max < 0 or n_max < 0:
        raise DomainError(f"cutoffs must be >= 0, got m_max={m_max}, n_max={n_max}")


def spectrum(
    scenario: geo.SupportScenario,
    geom: Optional[geo.CylinderGeometry],
    m_max: int = 10,
    n_max: int = DEFAULT_N_MAX,
) -> list[EigenvalueEntry]:
    """Eigenvalues of ``scenario`` with longitudinal label <= m_max and n <= n_max, ascending."""
    _check_cutoffs(m_max, n_max)
    if isinstance(scenario, geo.SlabHorosphere):
        return slab_horosphere_spectrum(scenario.tau, scenario.T, max(m_max, 1), n_max)
    return _entries(geom, longitudinal_modes(scenario, geom, m_max), _angular_modes(scenario, n_max))


def dirichlet_spectrum(geom, T, m_max=10, n_max=DEFAULT_N_MAX, angular_domain="full"):
    return spectrum(geo.Dirichlet(T, angular_domain=angular_domain), geom, m_max, n_max)


def spheres_spectrum(geom, T, m_max=10, n_max=DEFAULT_N_MAX, angular_domain="full"):
    return spectrum(geo.GeodesicSpheres(T, angular_domain=angular_domain), geom, m_max, n_max)


def horospheres_spectrum(geom, T, m_max=10, n_max=DEFAULT_N_MAX, angular_domain="full"):
    return spectrum(geo.Horospheres(T, angular_domain=angular_domain), geom, m_max, n_max)


def half_plane_spectrum(geom, T, m_max=10, n_max=DEFAULT_N_MAX, angular_domain="full"):
    return spectrum(geo.HalfGeodesicPlane(T, angular_domain=angular_domain), geom, m_max, n_max)


def half_horosphere_spectrum(geom, T, m_max=10, n_max=DEFAULT_N_MAX, angular_domain="full"):
    return spectrum(geo.HalfHorosphere(T, angular_domain=angular_domain), geom, m_max, n_max)


def equidistant_spectrum(geom, T, H0, m_max=10, n_max=DEFAULT_N_MAX, angular_domain="full"):
    return spectrum(geo.Equidistant(T, H0=H0, angular_domain=angular_domain), geom, m_max, n_max)


def ball_spectrum(H0, rho, geom, m_max=10, n_max=DEFAULT_N_MAX, angular_domain="full"):
    return spectrum(geo.Ball(H0, rho, angular_domain=angular_domain), geom, m_max, n_max)


def slab_horosphere_spectrum(tau: float, T: float, m_max: int = 10, n_max: int = DEFAULT_N_MAX) -> list[EigenvalueEntry]:
    """tau^2 (n^2 pi^2 + (m pi / T)^2), m >= 1, n >= 0.

    Clamped in t and free (cos(n pi s)) across the slab; the same list
    describes the wedge case.
    """
    geo.SlabHorosphere(tau, T)
    if m_max < 1 or n_max < 0:
        raise DomainError(f"slab cutoffs need m_max >= 1 and n_max >= 0, got {m_max}, {n_max}")
    tau2 = tau * tau
    out = []
    for m in range(1, m_max + 1):
        delta = m * math.pi / T
        for n in range(n_max + 1):
            out.append(EigenvalueEntry("trig", m, n, tau2 * ((n * math.pi) ** 2 + delta * delta), delta))
    out.sort(key=EigenvalueEntry.sort_key)
    return out


# --------------------------------------------------------------------------
# Index
# --------------------------------------------------------------------------


def _m_needed(scenario, geom: geo.CylinderGeometry, extra: float = 0.0) -> int:
    """Trig labels needed to list every mode with mu < (1+r^2) (varpi + extra)."""
    T = geo.scenario_length(scenario, geom)
    delta_cap = math.sqrt((1.0 + geom.r ** 2) * (geom.varpi + max(extra, 0.0)))
    return int(math.ceil(delta_cap * T / math.pi)) + 2


def _n_needed(geom: geo.CylinderGeometry, modes: list[LongitudinalMode], cap: float) -> int:
    """Largest n for which some mode can still lie below ``cap``."""
    if not modes:
        return 0
    lowest = min(mode.mu for mode in modes) / (1.0 + geom.r ** 2) - geom.varpi
    room = cap - lowest
    if room <= 0.0:
        return 0
    return int(math.floor(geom.r * math.sqrt(room))) + 1


def dirichlet_eta(geom: geo.CylinderGeometry, T: float) -> int:
    """max{m >= 1 : m < T / (pi r)}, or 0 when empty."""
    x = T / (math.pi * geom.r)
    return max(int(math.ceil(x)) - 1, 0)


def half_plane_eta(geom: geo.CylinderGeometry, T: float) -> int:
    """max{m >= 0 : 2m + 1 < 2T / (pi r)}, or 0 when empty; the literal eta formula."""
    y = 2.0 * T / (math.pi * geom.r)
    m = -1
    while 2 * (m + 1) + 1 < y:
        m += 1
    return max(m, 0)


def _robin_dirichlet_paper_index(modes, geom, T_theta: float) -> int:
    labels = [mode.m for mode in modes if mode.branch == "trig" and mode.delta < 1.0 / geom.r]
    eta = max(labels) if labels else 0
    return eta if T_theta < 1.0 else 1 + eta


def paper_index(scenario: geo.SupportScenario, geom: Optional[geo.CylinderGeometry]) -> Optional[int]:
    """Index predicted by the closed-form eta formulas, evaluated literally.

    ``None`` where no formula is available (half-circle pieces of supports
    other than the clamped one).
    """
    if isinstance(scenario, geo.SlabHorosphere):
        return 0
    half = getattr(scenario, "angular_domain", "full") == "half_dirichlet"
    if isinstance(scenario, geo.Dirichlet):
        return 0 if half else dirichlet_eta(geom, scenario.T)
    if half:
        return None
    if isinstance(scenario, geo.GeodesicSpheres):
        return dirichlet_eta(geom, scenario.T)
    if isinstance(scenario, geo.Horospheres):
        return dirichlet_eta(geom, scenario.T) + 1
    if isinstance(scenario, geo.HalfGeodesicPlane):
        return half_plane_eta(geom, scenario.T)
    if isinstance(scenario, (geo.HalfHorosphere, geo.Equidistant, geo.Ball)):
        m_max = _m_needed(scenario, geom)
        modes = longitudinal_modes(scenario, geom, m_max)
        if isinstance(scenario, geo.Ball):
            return 1 + sum(1 for mode in modes if mode.branch == "trig" and mode.delta < 1.0 / geom.r)
        theta = 1.0 if isinstance(scenario, geo.HalfHorosphere) else geo.equidistant_theta(scenario.H0, geom)
        return _robin_dirichlet_paper_index(modes, geom, scenario.T * theta)
    raise TypeError(f"unsupported scenario {scenario!r}")


def zero_tolerance(entries: list[EigenvalueEntry]) -> float:
    lam_max = max((abs(e.lam) for e in entries), default=0.0)
    return ZERO_REL_TOL * max(1.0, lam_max)


def index_listing(scenario: geo.SupportScenario, geom: Optional[geo.CylinderGeometry]) -> list[EigenvalueEntry]:
    """Every eigenvalue that could be <= 0, plus the next ones, ascending.

    m and n are chosen so that no omitted entry can be negative or zero: the
    trig labels cover all delta with delta^2 <= (1+r^2) varpi, and the angular
    scan stops where n^2/r^2 exceeds the most negative longitudinal part.
    """
    if isinstance(scenario, geo.SlabHorosphere):
        return slab_horosphere_spectrum(scenario.tau, scenario.T, 2, 1)
    modes = longitudinal_modes(scenario, geom, _m_needed(scenario, geom))
    n_max = max(_n_needed(geom, modes, 0.0), 1)
    return _entries(geom, modes, _angular_modes(scenario, n_max))


def index_report(scenario: geo.SupportScenario, geom: Optional[geo.CylinderGeometry]) -> IndexReport:
    entries = index_listing(scenario, geom)
    tol = zero_tolerance(entries)
    negatives = [e for e in entries if e.lam < -tol]
    counted = sum(e.multiplicity for e in negatives)
    nullity = sum(e.multiplicity for e in entries if abs(e.lam) <= tol)
    predicted = paper_index(scenario, geom)
    notes = []
    if predicted is not None and predicted != counted:
        notes.append(f"closed-form eta formula gives {predicted}, direct count gives {counted}")
    return IndexReport(
        scenario=scenario.kind,
        counted_index=counted,
        nullity=nullity,
        paper_index=predicted,
        agrees=None if predicted is None else predicted == counted,
        weak_index_bounds=(max(counted - 1, 0), counted),
        negatives=negatives,
        notes=notes,
    )


def lambda_min(scenario: geo.SupportScenario, geom: Optional[geo.CylinderGeometry]) -> float:
    return index_listing(scenario, geom)[0].lam
