"""Scalar geometry of Killing cylinders and their umbilical supports.

The cylinder of hyperbolic radius ``R`` is parametrized in the upper
half-space model as ``Psi(t, theta) = e^t (r cos theta, r sin theta, 1)`` with
``r = sinh R``. Every support configuration is reduced here to its 1-D end
conditions, written in the convention

    lower end:  f'(t0) + a f(t0) = 0
    upper end:  f'(t1) - a f(t1) = 0

where ``a = q * sqrt(1 + r^2)`` is the reduced Robin coefficient and ``q`` the
surface coefficient entering the boundary term of the second variation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Union

from .errors import DegenerateConfigurationError, DomainError, NoIntersectionError

AngularDomain = Literal["full", "half_dirichlet"]
End = Literal["lower", "upper"]

#: Marker returned by :func:`robin_coefficient` for a clamped (u = 0) end.
DIRICHLET = "dirichlet"

#: alpha below this is treated as tangency between cylinder and sphere.
TANGENCY_TOL = 1e-10


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class CylinderGeometry:
    R: float
    r: float
    varpi: float
    H: float
    A2: float
    kappa1: float
    kappa2: float

    @property
    def cosh_R(self) -> float:
        return math.sqrt(1.0 + self.r * self.r)

    @property
    def jacobi_potential(self) -> float:
        """|A|^2 - 2, the zeroth-order term of the Jacobi operator."""
        return self.A2 - 2.0


def cylinder_geometry(R: float) -> CylinderGeometry:
    """Invariants of the Killing cylinder of hyperbolic radius ``R``."""
    R = _check_positive("R", R)
    return _from_r(R, math.sinh(R))


def cylinder_geometry_from_r(r: float) -> CylinderGeometry:
    """Same as :func:`cylinder_geometry` but keyed by the model radius ``r = sinh R``."""
    r = _check_positive("r", r)
    return _from_r(math.asinh(r), r)


def _from_r(R: float, r: float) -> CylinderGeometry:
    r2 = r * r
    c = math.sqrt(1.0 + r2)
    kappa1 = c / r
    kappa2 = r / c
    return CylinderGeometry(
        R=R,
        r=r,
        varpi=1.0 / (r2 * (1.0 + r2)),
        H=(1.0 + 2.0 * r2) / (2.0 * r * c),
        A2=((1.0 + r2) ** 2 + r2 * r2) / (r2 * (1.0 + r2)),
        kappa1=kappa1,
        kappa2=kappa2,
    )


# --------------------------------------------------------------------------
# Support scenarios
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Bounded:
    T: float
    angular_domain: AngularDomain = field(default="full", kw_only=True)

    def __post_init__(self):
        _check_positive("T", self.T)
        if self.angular_domain not in ("full", "half_dirichlet"):
            raise DomainError(f"unknown angular domain {self.angular_domain!r}")


@dataclass(frozen=True)
class Dirichlet(_Bounded):
    """Both boundary circles clamped."""

    kind = "dirichlet"


@dataclass(frozen=True)
class GeodesicSpheres(_Bounded):
    """Between the totally geodesic hemispheres S_{tau0} and S_{tau2}."""

    kind = "spheres"


@dataclass(frozen=True)
class Horospheres(_Bounded):
    """Between the horospheres z = 1 and z = e^T."""

    kind = "horospheres"


@dataclass(frozen=True)
class HalfGeodesicPlane(_Bounded):
    """Piece [0, T] of the half cylinder resting on the geodesic plane S_{tau0}."""

    kind = "half-plane"


@dataclass(frozen=True)
class HalfHorosphere(_Bounded):
    """Piece [0, T] of the half cylinder resting on the horosphere z = 1."""

    kind = "half-horosphere"


@dataclass(frozen=True)
class Equidistant(_Bounded):
    """Piece [0, T] resting on an equidistant surface of mean curvature H0 in (0, 1)."""

    H0: float = field(kw_only=True)
    kind = "equidistant"

    def __post_init__(self):
        super().__post_init__()
        if not (0.0 < self.H0 < 1.0):
            raise DomainError(f"equidistant support needs 0 < H0 < 1, got {self.H0!r}")


@dataclass(frozen=True)
class Ball:
    """Cylinder inside the ball bounded by the sphere x^2+y^2+(z-c)^2 = rho^2."""

    H0: float
    rho: float
    angular_domain: AngularDomain = field(default="full", kw_only=True)
    kind = "ball"

    def __post_init__(self):
        if not (math.isfinite(self.H0) and self.H0 > 1.0):
            raise DomainError(f"ball support needs H0 > 1, got {self.H0!r}")
        _check_positive("rho", self.rho)

    @property
    def c(self) -> float:
        return self.H0 * self.rho


@dataclass(frozen=True)
class SlabHorosphere:
    """Horosphere z = tau between two geodesic planes (or a symmetric wedge).

    The lateral width is normalized to 2 (|y| < 1); ``T`` is the exhaustion length.
    """

    tau: float
    T: float
    half_width: float = 1.0
    kind = "slab-horosphere"

    def __post_init__(self):
        _check_positive("tau", self.tau)
        _check_positive("T", self.T)
        if self.half_width != 1.0:
            raise DomainError("slab half width is normalized to 1")


SupportScenario = Union[
    Dirichlet,
    GeodesicSpheres,
    Horospheres,
    HalfGeodesicPlane,
    HalfHorosphere,
    Equidistant,
    Ball,
    SlabHorosphere,
]


# --------------------------------------------------------------------------
# Ball geometry
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BallGeometry:
    H0: float
    rho: float
    c: float
    alpha: float
    beta: float
    t_minus: float
    t_plus: float
    T: float
    sigma: float


def max_ball_radius(H0: float) -> float:
    """Largest model radius for which the cylinder meets the sphere, 1/sqrt(H0^2-1)."""
    return 1.0 / math.sqrt(H0 * H0 - 1.0)


def ball_geometry(H0: float, rho: float, r: float) -> BallGeometry:
    if not (math.isfinite(H0) and H0 > 1.0):
        raise DomainError(f"ball support needs H0 > 1, got {H0!r}")
    rho = _check_positive("rho", rho)
    r = _check_positive("r", r)
    disc = 1.0 - r * r * (H0 * H0 - 1.0)
    if disc <= 0.0:
        raise NoIntersectionError(
            f"r={r!r} >= 1/sqrt(H0^2-1)={max_ball_radius(H0)!r}: cylinder misses the sphere"
        )
    alpha = math.sqrt(disc)
    if alpha < TANGENCY_TOL:
        raise DegenerateConfigurationError(f"alpha={alpha!r}: cylinder tangent to the sphere")
    beta = rho / (1.0 + r * r)
    t_minus = math.log(beta * (H0 - alpha))
    t_plus = math.log(beta * (H0 + alpha))
    return BallGeometry(
        H0=H0,
        rho=rho,
        c=H0 * rho,
        alpha=alpha,
        beta=beta,
        t_minus=t_minus,
        t_plus=t_plus,
        # log of the ratio is better conditioned than t_plus - t_minus
        T=math.log((H0 + alpha) / (H0 - alpha)),
        sigma=H0 / alpha,
    )


def equidistant_theta(H0: float, geom: CylinderGeometry) -> float:
    """Reduced Robin coefficient of an equidistant support."""
    return H0 / math.sqrt(1.0 + geom.r ** 2 * (1.0 - H0 * H0))


# --------------------------------------------------------------------------
# Boundary data
# --------------------------------------------------------------------------


def robin_coefficient(scenario: SupportScenario, end: End, geom: CylinderGeometry) -> float | str:
    """Reduced Robin coefficient ``a`` at one end, or :data:`DIRICHLET`.

    Horospheres carry opposite signs at the two ends: the lower horosphere
    bends away from the enclosed region and the upper one towards it, so
    the lower end destabilizes (a = +1) and the upper end stabilizes (a = -1).
    """
    if end not in ("lower", "upper"):
        raise ValueError(f"end must be 'lower' or 'upper', got {end!r}")
    lower = end == "lower"
    if isinstance(scenario, Dirichlet):
        return DIRICHLET
    if isinstance(scenario, GeodesicSpheres):
        return 0.0
    if isinstance(scenario, Horospheres):
        return 1.0 if lower else -1.0
    if isinstance(scenario, HalfGeodesicPlane):
        return 0.0 if lower else DIRICHLET
    if isinstance(scenario, HalfHorosphere):
        return 1.0 if lower else DIRICHLET
    if isinstance(scenario, Equidistant):
        return equidistant_theta(scenario.H0, geom) if lower else DIRICHLET
    if isinstance(scenario, Ball):
        return ball_geometry(scenario.H0, scenario.rho, geom.r).sigma
    if isinstance(scenario, SlabHorosphere):
        # side walls are geodesic planes or equidistants met at the right angle: q = 0
        return DIRICHLET
    raise TypeError(f"unsupported scenario {scenario!r}")


def surface_robin_coefficient(scenario: SupportScenario, end: End, geom: CylinderGeometry) -> float | str:
    """Full surface coefficient ``q`` (the reduced one divided by sqrt(1+r^2))."""
    a = robin_coefficient(scenario, end, geom)
    if a == DIRICHLET:
        return a
    return a / geom.cosh_R


def end_conditions(scenario: SupportScenario, geom: CylinderGeometry) -> tuple[float | str, float | str]:
    return robin_coefficient(scenario, "lower", geom), robin_coefficient(scenario, "upper", geom)


def scenario_length(scenario: SupportScenario, geom: CylinderGeometry | None) -> float:
    """Length in t of the cylinder piece (derived from the sphere for a ball)."""
    if isinstance(scenario, Ball):
        return ball_geometry(scenario.H0, scenario.rho, geom.r).T
    return scenario.T


def validate(scenario: SupportScenario, geom: CylinderGeometry | None) -> None:
    """Raise if ``scenario`` cannot be combined with ``geom``."""
    if isinstance(scenario, SlabHorosphere):
        return
    if geom is None:
        raise DomainError(f"scenario {scenario.kind!r} needs a cylinder radius")
    if isinstance(scenario, Ball):
        ball_geometry(scenario.H0, scenario.rho, geom.r)


CriticalKind = Literal["strong", "stable", "half_plane_stable"]

_CRITICAL_FACTOR = {"strong": math.pi, "stable": 2.0 * math.pi, "half_plane_stable": 1.5 * math.pi}


def critical_length(geom: CylinderGeometry, kind: CriticalKind) -> float:
    """Plateau-Rayleigh type threshold length: pi r, 2 pi r or 3 pi r / 2."""
    try:
        factor = _CRITICAL_FACTOR[kind]
    except KeyError:
        raise ValueError(f"unknown threshold kind {kind!r}") from None
    return factor * geom.r
