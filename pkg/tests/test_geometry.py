import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from capcyl import geometry as geo
from capcyl.errors import DomainError, NoIntersectionError


def test_unit_radius_values(unit_cylinder):
    g = unit_cylinder
    assert g.varpi == pytest.approx(0.5, abs=1e-15)
    assert g.H == pytest.approx(3.0 / (2.0 * math.sqrt(2.0)), abs=1e-15)
    assert g.A2 == pytest.approx(2.5, abs=1e-15)
    assert g.kappa1 == pytest.approx(math.sqrt(2.0))
    assert g.kappa2 == pytest.approx(1.0 / math.sqrt(2.0))


@given(st.floats(min_value=1e-3, max_value=50.0))
def test_invariants_from_principal_curvatures(r):
    g = geo.cylinder_geometry_from_r(r)
    assert g.H == pytest.approx(0.5 * (g.kappa1 + g.kappa2), rel=1e-12)
    assert g.A2 == pytest.approx(g.kappa1 ** 2 + g.kappa2 ** 2, rel=1e-12)
    # the Jacobi potential |A|^2 - 2 is exactly varpi on a Killing cylinder
    assert g.jacobi_potential == pytest.approx(g.varpi, rel=1e-9, abs=1e-12)
    assert g.kappa1 * g.kappa2 == pytest.approx(1.0, rel=1e-12)


@given(st.floats(min_value=1e-3, max_value=5.0))
def test_R_and_r_constructors_agree(R):
    a = geo.cylinder_geometry(R)
    b = geo.cylinder_geometry_from_r(math.sinh(R))
    assert a.r == pytest.approx(b.r, rel=1e-14)
    assert a.varpi == pytest.approx(b.varpi, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_radius_must_be_positive(bad):
    with pytest.raises(DomainError):
        geo.cylinder_geometry(bad)
    with pytest.raises(DomainError):
        geo.cylinder_geometry_from_r(bad)


def test_ball_reference_configuration():
    b = geo.ball_geometry(2.0, 2.0, 0.5)
    assert b.alpha == pytest.approx(0.5, abs=1e-15)
    assert b.sigma == pytest.approx(4.0, abs=1e-14)
    assert b.T == pytest.approx(math.log(5.0 / 3.0), abs=1e-15)
    assert b.t_plus - b.t_minus == pytest.approx(b.T, abs=1e-14)


@pytest.mark.parametrize("H0,rho,r", [(2.0, 2.0, 0.5), (1.5, 0.7, 0.3), (3.0, 5.0, 0.01), (1.1, 1.0, 1.5)])
def test_ball_boundary_circles_lie_on_sphere(H0, rho, r):
    b = geo.ball_geometry(H0, rho, r)
    for t in (b.t_minus, b.t_plus):
        x, z = math.exp(t) * r, math.exp(t)
        assert x * x + (z - b.c) ** 2 == pytest.approx(rho * rho, rel=1e-12)


def test_ball_needs_intersection():
    with pytest.raises(NoIntersectionError):
        geo.ball_geometry(2.0, 2.0, 0.6)


def test_ball_tangency_is_degenerate():
    r = geo.max_ball_radius(2.0)
    with pytest.raises(DomainError):
        geo.ball_geometry(2.0, 2.0, r)


@pytest.mark.parametrize("H0", [1.0, 0.5, float("nan")])
def test_ball_needs_H0_above_one(H0):
    with pytest.raises(DomainError):
        geo.Ball(H0, 1.0)


@pytest.mark.parametrize("H0", [0.0, 1.0, 1.2])
def test_equidistant_needs_H0_in_unit_interval(H0):
    with pytest.raises(DomainError):
        geo.Equidistant(1.0, H0=H0)


def test_equidistant_theta_reference():
    g = geo.cylinder_geometry_from_r(1.0)
    assert geo.equidistant_theta(0.6, g) == pytest.approx(0.6 / math.sqrt(1.64), abs=1e-15)
    assert geo.equidistant_theta(0.6, g) == pytest.approx(0.46852, abs=1e-5)


def test_end_conditions_table(unit_cylinder):
    g = unit_cylinder
    D = geo.DIRICHLET
    assert geo.end_conditions(geo.Dirichlet(1.0), g) == (D, D)
    assert geo.end_conditions(geo.GeodesicSpheres(1.0), g) == (0.0, 0.0)
    assert geo.end_conditions(geo.Horospheres(1.0), g) == (1.0, -1.0)
    assert geo.end_conditions(geo.HalfGeodesicPlane(1.0), g) == (0.0, D)
    assert geo.end_conditions(geo.HalfHorosphere(1.0), g) == (1.0, D)
    lo, hi = geo.end_conditions(geo.Ball(2.0, 2.0), geo.cylinder_geometry_from_r(0.5))
    assert lo == hi == pytest.approx(4.0)


def test_surface_coefficient_of_upper_horosphere(unit_cylinder):
    q = geo.surface_robin_coefficient(geo.Horospheres(2.0), "upper", unit_cylinder)
    assert q == pytest.approx(-1.0 / math.sqrt(2.0))


def test_critical_lengths():
    g = geo.cylinder_geometry(1.0)
    assert geo.critical_length(g, "strong") == math.pi * math.sinh(1.0)
    assert geo.critical_length(g, "stable") == 2.0 * math.pi * math.sinh(1.0)
    assert geo.critical_length(g, "half_plane_stable") == pytest.approx(1.5 * math.pi * math.sinh(1.0))
    with pytest.raises(ValueError):
        geo.critical_length(g, "weak")


def test_scenario_validation():
    with pytest.raises(DomainError):
        geo.Dirichlet(0.0)
    with pytest.raises(DomainError):
        geo.Dirichlet(1.0, angular_domain="quarter")
    with pytest.raises(DomainError):
        geo.SlabHorosphere(1.0, 1.0, half_width=2.0)
    with pytest.raises(DomainError):
        geo.validate(geo.Dirichlet(1.0), None)


@pytest.mark.parametrize("H0", [1.2, 2.0, 3.0])
def test_ball_piece_shortens_with_radius(H0):
    top = geo.max_ball_radius(H0)
    lengths = [geo.ball_geometry(H0, 2.0, r).T for r in top * np.linspace(0.01, 0.99, 40)]
    assert all(b < a for a, b in zip(lengths, lengths[1:]))


@pytest.mark.parametrize("r", [0.01, 0.2, 0.5, 0.57])
def test_ball_sigma_between_poles(r):
    b = geo.ball_geometry(2.0, 2.0, r)
    assert math.pi / (2 * b.T) < b.sigma < math.pi / b.T
