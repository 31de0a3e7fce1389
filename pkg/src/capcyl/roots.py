"""Bracketed roots of the transcendental eigenvalue equations.

Every trigonometric equation is of the form ``tan(T x) = n(x) / d(x)`` and is
solved in the pole-free form

    F(x) = sin(T x) d(x) - cos(T x) n(x),

which is entire in ``x``. Its roots are sought interval by interval on

    I_0 = (0, pi/(2T)),   I_m = ((2m-1) pi/(2T), (2m+1) pi/(2T)),  m >= 1,

i.e. between consecutive poles of ``tan(T x)``. The hyperbolic equations
``tanh(T x) = x / Theta`` have at most one positive root, which lies in
``(0, Theta)``; it is reported with interval label 0.

The hyperbolic ball equation ``tanh(T x) = 2 sigma x / (sigma^2 + x^2)`` comes
from ``e^{2Tx} = ((sigma + x) / (sigma - x))^2`` and keeps both square-root
branches: one root below ``sigma`` (label 0, present iff ``sigma T > 2``) and
one above it (label 1, always present).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import ConvergenceError, DomainError

#: roots closer than this to a pole of tan(T x) are spurious artefacts of clearing denominators
ENDPOINT_TOL = 1e-8
#: roots this close (relatively) to the pole of the ball's right-hand side get flagged
POLE_FLAG_TOL = 1e-6
SCAN_POINTS = 256
MAX_BISECTIONS = 80
MAX_NEWTON = 5
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class TanLinear:
    """tan(T x) = x"""

    T: float

    def parts(self, x):
        return x, 1.0, 1.0, 0.0

    def limit_at_zero(self) -> float:
        # lim F(x)/x as x -> 0+
        return self.T - 1.0


@dataclass(frozen=True)
class TanScaled:
    """tan(T x) = x / Theta"""

    T: float
    Theta: float

    def parts(self, x):
        return x, 1.0, self.Theta, 0.0

    def limit_at_zero(self) -> float:
        return self.Theta * self.T - 1.0


@dataclass(frozen=True)
class TanBall:
    """tan(T x) = 2 sigma x / (sigma^2 - x^2)"""

    T: float
    sigma: float

    def parts(self, x):
        s = self.sigma
        return 2.0 * s * x, 2.0 * s, s * s - x * x, -2.0 * x

    def limit_at_zero(self) -> float:
        s = self.sigma
        return s * (s * self.T - 2.0)


@dataclass(frozen=True)
class TanhLinear:
    """tanh(T x) = x"""

    T: float

    @property
    def Theta(self) -> float:
        return 1.0


@dataclass(frozen=True)
class TanhScaled:
    """tanh(T x) = x / Theta"""

    T: float
    Theta: float


@dataclass(frozen=True)
class TanhBall:
    """tanh(T x) = 2 sigma x / (sigma^2 + x^2)"""

    T: float
    sigma: float


TanEq = Union[TanLinear, TanScaled, TanBall]
TanhEq = Union[TanhLinear, TanhScaled]
TranscendentalEq = Union[TanLinear, TanScaled, TanBall, TanhLinear, TanhScaled, TanhBall]
_HYPERBOLIC = (TanhLinear, TanhScaled, TanhBall)


def _validate(eq: TranscendentalEq) -> None:
    for name in ("T", "Theta", "sigma"):
        value = getattr(eq, name, None)
        if value is not None and not (math.isfinite(value) and value > 0.0):
            raise DomainError(f"{type(eq).__name__}.{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class Root:
    m: int
    delta: float
    residual: float


@dataclass
class RootSet:
    equation: TranscendentalEq
    roots: list[Root] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def deltas(self) -> list[float]:
        return [root.delta for root in self.roots]

    def __len__(self) -> int:
        return len(self.roots)


# --------------------------------------------------------------------------
# Residual forms
# --------------------------------------------------------------------------


def cleared(eq: TanEq, x: float) -> float:
    """Pole-free form F(x) = sin(Tx) d(x) - cos(Tx) n(x)."""
    n, _, d, _ = eq.parts(x)
    tx = eq.T * x
    return math.sin(tx) * d - math.cos(tx) * n


def _cleared_derivative(eq: TanEq, x: float) -> float:
    n, dn, d, dd = eq.parts(x)
    tx = eq.T * x
    s, c = math.sin(tx), math.cos(tx)
    return eq.T * c * d + s * dd + eq.T * s * n - c * dn


def _hyperbolic(eq: TanhEq, x: float) -> float:
    return math.tanh(eq.T * x) * eq.Theta - x


def _hyperbolic_derivative(eq: TanhEq, x: float) -> float:
    return eq.T * eq.Theta / math.cosh(eq.T * x) ** 2 - 1.0


def _ball_branch(eq: TanhBall, x: float, upper: bool) -> float:
    # |sigma - x| = (sigma + x) e^{-T x}; unlike the tanh form this does not
    # cancel when T sigma is large and the upper root hugs sigma
    gap = x - eq.sigma if upper else eq.sigma - x
    return gap - (eq.sigma + x) * math.exp(-eq.T * x)


def _ball_branch_derivative(eq: TanhBall, x: float, upper: bool) -> float:
    e = math.exp(-eq.T * x)
    return (1.0 if upper else -1.0) - e + eq.T * (eq.sigma + x) * e


def residual(eq: TranscendentalEq, x: float) -> float:
    """Scale-free residual of ``eq`` at ``x``.

    For the tan family this is F(x) / hypot(n(x), d(x)), i.e. the sine of the
    phase mismatch; for the tanh family it is tanh(Tx) minus the right-hand side.
    """
    if isinstance(eq, TanhBall):
        return math.tanh(eq.T * x) - 2.0 * eq.sigma * x / (eq.sigma ** 2 + x * x)
    if isinstance(eq, (TanhLinear, TanhScaled)):
        return math.tanh(eq.T * x) - x / eq.Theta
    n, _, d, _ = eq.parts(x)
    return cleared(eq, x) / math.hypot(n, d)


def original_residual(eq: TranscendentalEq, x: float) -> float:
    """Residual of the uncleared equation, poles included: tan(Tx) - n/d."""
    if isinstance(eq, _HYPERBOLIC):
        return residual(eq, x)
    n, _, d, _ = eq.parts(x)
    return math.tan(eq.T * x) - n / d


# --------------------------------------------------------------------------
# Intervals
# --------------------------------------------------------------------------


def interval(T: float, m: int) -> tuple[float, float]:
    if m < 0:
        raise ValueError(f"interval index must be >= 0, got {m}")
    w = math.pi / T
    if m == 0:
        return 0.0, 0.5 * w
    return (m - 0.5) * w, (m + 0.5) * w


def bracket_intervals(T: float, m_max: int) -> list[tuple[float, float]]:
    """I_0, I_1, ..., I_{m_max} for ``tan(T x)``."""
    if not (math.isfinite(T) and T > 0.0):
        raise DomainError(f"T must be finite and > 0, got {T!r}")
    return [interval(T, m) for m in range(m_max + 1)]


def interval_index(T: float, x: float) -> int:
    """Label m of the interval I_m containing ``x > 0``."""
    return int(math.floor(x * T / math.pi + 0.5))


# --------------------------------------------------------------------------
# Solvers
# --------------------------------------------------------------------------


def _bisect(g, lo: float, hi: float, glo: float, tol: float) -> float:
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)) or mid in (lo, hi):
            return mid
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm < 0.0) == (glo < 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    if hi - lo <= 1e3 * tol * max(1.0, abs(lo)):
        return 0.5 * (lo + hi)
    raise ConvergenceError(f"bisection did not reach tol={tol} on bracket ({lo!r}, {hi!r})")


def _polish(g, dg, x: float, lo: float, hi: float) -> float:
    """Guarded Newton steps; a step leaving the bracket or not decreasing |g| is discarded."""
    gx = g(x)
    for _ in range(MAX_NEWTON):
        slope = dg(x)
        if gx == 0.0 or slope == 0.0:
            break
        cand = x - gx / slope
        if not (lo < cand < hi):
            break
        gc = g(cand)
        if abs(gc) >= abs(gx):
            break
        x, gx = cand, gc
    return x


def _scan_sign_changes(g, lo: float, hi: float, g_lo: float, points: int) -> list[tuple[float, float, float]]:
    brackets = []
    prev_x, prev_g = lo, g_lo
    for k in range(1, points + 1):
        x = lo + (hi - lo) * k / points
        gx = g(x)
        if gx == 0.0:
            brackets.append((x, x, 0.0))
        elif prev_g != 0.0 and (gx < 0.0) != (prev_g < 0.0):
            brackets.append((prev_x, x, prev_g))
        prev_x, prev_g = x, gx
    return brackets


def _solve_hyperbolic(eq: TanhEq, tol: float) -> Optional[tuple[float, float]]:
    # g(x) = Theta tanh(T x) - x is concave on x > 0 with g(0) = 0, g'(0) = T Theta - 1
    if eq.T * eq.Theta <= 1.0:
        return None
    g = lambda x: _hyperbolic(eq, x)
    hi = eq.Theta
    lo = 0.5 * hi
    while g(lo) <= 0.0:
        lo *= 0.5
        if lo < 1e-300:
            return None
    x = _bisect(g, lo, hi, g(lo), tol)
    x = _polish(g, lambda t: _hyperbolic_derivative(eq, t), x, lo, hi)
    return x, residual(eq, x)


def _solve_ball_hyperbolic(eq: TanhBall, m: int, tol: float) -> Optional[tuple[float, float]]:
    s = eq.sigma
    upper = m == 1
    g = lambda x: _ball_branch(eq, x, upper)
    dg = lambda x: _ball_branch_derivative(eq, x, upper)
    if m == 0:
        # g(0) = 0, g'(0) = sigma T - 2, g(sigma) < 0
        if s * eq.T <= 2.0:
            return None
        hi = s
        lo = 0.5 * s
        while g(lo) <= 0.0:
            lo *= 0.5
            if lo < 1e-300:
                return None
    elif m == 1:
        lo, hi = s, 2.0 * s
        while g(hi) <= 0.0:
            hi *= 2.0
            if not math.isfinite(hi):
                raise ConvergenceError(f"no upper bracket for {eq!r}")
    else:
        return None
    x = _bisect(g, lo, hi, g(lo), tol)
    x = _polish(g, dg, x, lo, hi)
    return x, residual(eq, x)


def _candidates(eq: TanEq, m: int, tol: float, points: int) -> list[float]:
    lo, hi = interval(eq.T, m)
    if m == 0:
        # divide out the trivial root at 0; the limit fixes the sign at the left end
        g = lambda x: cleared(eq, x) / x
        g_lo = eq.limit_at_zero()
        dg = lambda x: (_cleared_derivative(eq, x) - cleared(eq, x) / x) / x
    else:
        g = lambda x: cleared(eq, x)
        g_lo = g(lo)
        dg = lambda x: _cleared_derivative(eq, x)
    found = []
    for a, b, ga in _scan_sign_changes(g, lo, hi, g_lo, points):
        if a == b:
            x = a
        else:
            x = _bisect(g, a, b, ga, tol)
            x = _polish(g, dg, x, a, b)
        found.append(x)
    return found


def solve_in_interval(
    eq: TranscendentalEq, m: int, tol: float = 1e-15, *, points: int = SCAN_POINTS
) -> Optional[tuple[float, float]]:
    """The root of ``eq`` in I_m, as ``(delta, residual)``, or ``None``.

    For the tanh equations only ``m = 0`` is meaningful and denotes the
    unique positive root, which exists iff ``T Theta > 1``. For
    :class:`TanhBall` ``m = 0`` and ``m = 1`` are the roots below and above
    ``sigma``.
    """
    _validate(eq)
    if tol <= 0.0:
        raise ValueError("tol must be > 0")
    if m < 0:
        raise ValueError(f"interval index must be >= 0, got {m}")
    if isinstance(eq, TanhBall):
        return _solve_ball_hyperbolic(eq, m, tol)
    if isinstance(eq, (TanhLinear, TanhScaled)):
        return _solve_hyperbolic(eq, tol) if m == 0 else None
    lo, hi = interval(eq.T, m)
    width = hi - lo
    roots = []
    for x in _candidates(eq, m, tol, points):
        if x - lo < ENDPOINT_TOL * width or hi - x < ENDPOINT_TOL * width:
            continue
        roots.append((x, residual(eq, x)))
    if not roots:
        return None
    if len(roots) > 1:
        roots = _merge(roots, width)
    if len(roots) > 1:
        raise ConvergenceError(
            f"{len(roots)} roots of {eq!r} in I_{m}=({lo!r}, {hi!r}); expected at most one"
        )
    return roots[0]


def _merge(roots: list[tuple[float, float]], width: float) -> list[tuple[float, float]]:
    merged = [roots[0]]
    for x, res in roots[1:]:
        if abs(x - merged[-1][0]) < 1e-9 * width:
            if abs(res) < abs(merged[-1][1]):
                merged[-1] = (x, res)
        else:
            merged.append((x, res))
    return merged


def solve_all_below(eq: TranscendentalEq, delta_max: float, tol: float = 1e-15) -> RootSet:
    """Every root of ``eq`` with ``0 < delta < delta_max``."""
    _validate(eq)
    if not delta_max > 0.0:
        raise ValueError(f"delta_max must be > 0, got {delta_max!r}")
    out = RootSet(equation=eq)
    if isinstance(eq, _HYPERBOLIC):
        for m in _hyperbolic_labels(eq):
            hit = solve_in_interval(eq, m, tol)
            if hit is not None and hit[0] < delta_max:
                out.roots.append(Root(m, hit[0], hit[1]))
        return out
    m = 0
    while interval(eq.T, m)[0] < delta_max:
        hit = solve_in_interval(eq, m, tol)
        if hit is not None and hit[0] < delta_max:
            out.roots.append(Root(m, hit[0], hit[1]))
            if isinstance(eq, TanBall) and abs(hit[0] - eq.sigma) < POLE_FLAG_TOL * eq.sigma:
                out.flags.append(f"root {hit[0]!r} in I_{m} lies next to the pole sigma={eq.sigma!r}")
        m += 1
    return out


def roots_in_intervals(eq: TranscendentalEq, m_max: int, tol: float = 1e-15) -> RootSet:
    """Roots found in I_0, ..., I_{m_max} (label 0 for the tanh root)."""
    _validate(eq)
    out = RootSet(equation=eq)
    if isinstance(eq, _HYPERBOLIC):
        for m in _hyperbolic_labels(eq):
            hit = solve_in_interval(eq, m, tol)
            if hit is not None:
                out.roots.append(Root(m, *hit))
        return out
    for m in range(m_max + 1):
        hit = solve_in_interval(eq, m, tol)
        if hit is not None:
            out.roots.append(Root(m, *hit))
    return out


def _hyperbolic_labels(eq) -> tuple[int, ...]:
    return (0, 1) if isinstance(eq, TanhBall) else (0,)


def hyperbolic_roots(eq: TranscendentalEq, tol: float = 1e-15) -> RootSet:
    """All positive roots of a tanh equation."""
    if not isinstance(eq, _HYPERBOLIC):
        raise TypeError(f"{type(eq).__name__} is not a hyperbolic equation")
    return roots_in_intervals(eq, 0, tol)
