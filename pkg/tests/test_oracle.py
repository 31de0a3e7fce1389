import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capcyl import geometry as geo
from capcyl import oracle as O
from capcyl.errors import DomainError


def test_dirichlet_interval_eigenvalues():
    op = O.assemble_interval(math.pi, O.DirichletBC(), O.DirichletBC(), 2000)
    mu = O.lowest_eigenvalues(op, 3)
    for k, value in enumerate(mu, start=1):
        assert value == pytest.approx(k * k, rel=1e-5)


def test_neumann_constant_mode():
    op = O.assemble_interval(3.0, O.Neumann(), O.Neumann(), 2000)
    assert abs(O.lowest_eigenvalues(op, 1)[0]) < 1e-9


def test_horosphere_pair_has_exact_minus_one():
    # f' + f = 0 at t = 0 and f' + f = 0 at t = T: solved by e^{-t}
    op = O.assemble_interval(7.0, O.Robin(1.0), O.Robin(-1.0), 2000)
    assert O.lowest_eigenvalues(op, 1)[0] == pytest.approx(-1.0, abs=1e-5)


def test_destabilizing_robin_at_both_ends():
    # two nearly degenerate modes close to -1 on a long interval
    op = O.assemble_interval(7.0, O.Robin(1.0), O.Robin(1.0), 2000)
    mu = O.lowest_eigenvalues(op, 2)
    assert mu[0] == pytest.approx(-1.0, abs=1e-2)
    assert mu[1] == pytest.approx(-1.0, abs=1e-2)
    assert mu[0] < -1.0 < mu[1]


def test_surface_scale_dirichlet(unit_cylinder):
    op = O.mode_operator(geo.Dirichlet(7.0), unit_cylinder, 0, 2000)
    assert O.lowest_eigenvalues(op, 1)[0] == pytest.approx(-0.39929, abs=1e-4)


def test_horosphere_first_angular_mode_is_neutral(unit_cylinder):
    op = O.mode_operator(geo.Horospheres(7.0), unit_cylinder, 1, 2000)
    assert abs(O.lowest_eigenvalues(op, 1)[0]) < 1e-5


def test_operator_structure():
    op = O.assemble_interval(2.0, O.Robin(0.7), O.DirichletBC(), 100)
    assert np.all(op.off == -1.0 / op.h ** 2)
    dense = op.dense()
    assert np.array_equal(dense, dense.T)
    # Robin end is half a cell from the boundary, Dirichlet end a full cell
    assert op.nodes[0] == pytest.approx(0.5 * op.h)
    assert op.nodes[-1] == pytest.approx(2.0 - op.h)


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=16, max_value=60),
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=-2.0, max_value=8.0),
)
def test_sturm_count_matches_dense_solver(n, a_lo, a_hi, shift):
    op = O.assemble_interval(1.5, O.Robin(a_lo), O.Robin(a_hi), n)
    dense = np.linalg.eigvalsh(op.dense())
    s = shift * op.diag.max() / 4.0
    expected = int(np.sum(dense < s))
    assert O.count_below(op, s) == expected or np.min(np.abs(dense - s)) < 1e-9 * op.diag.max()


@pytest.mark.parametrize("n", [16, 64, 257])
def test_bisection_matches_dense_solver(n):
    op = O.assemble_interval(2.0, O.Robin(1.3), O.Neumann(), n)
    dense = np.linalg.eigvalsh(op.dense())
    got = O.matrix_eigenvalues(op, range(5))
    assert got == pytest.approx(dense[:5], rel=1e-10, abs=1e-8)


def test_bottom_eigenvalue_monotone_in_robin_coefficient():
    values = []
    for a in np.linspace(-2.0, 3.0, 11):
        op = O.assemble_interval(2.0, O.Robin(float(a)), O.DirichletBC(), 1000)
        values.append(O.lowest_eigenvalues(op, 1)[0])
    assert all(b < a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize(
    "scenario,r,expected",
    [
        (geo.Dirichlet(7.0), 1.0, 2),
        (geo.HalfGeodesicPlane(5.0), 1.0, 2),
        (geo.Horospheres(7.0), 1.0, 3),
        (geo.GeodesicSpheres(7.0), 1.0, 3),
        (geo.HalfHorosphere(2.0), 1.0, 1),
        (geo.SlabHorosphere(1.0, 1.0), None, 0),
        (geo.Dirichlet(7.0, angular_domain="half_dirichlet"), 1.0, 0),
    ],
)
def test_oracle_index_examples(scenario, r, expected):
    geom = None if r is None else geo.cylinder_geometry_from_r(r)
    count, converged = O.oracle_index(scenario, geom, 2000)
    assert converged
    assert count == expected


def test_ball_oracle_scans_past_first_angular_mode():
    # the lowest Robin mode on the short ball piece is far below -1, so the
    # n = 1 and n = 2 pairs go negative as well
    res = O.oracle_index(geo.Ball(2.0, 2.0), geo.cylinder_geometry_from_r(0.5), 2000)
    assert res.converged
    assert res.count == 6
    assert res.nullity == 2


@pytest.mark.parametrize("grid_n", [1000, 2000])
def test_grid_doubling_keeps_counts(grid_n):
    for scenario, r in [
        (geo.Dirichlet(7.0), 1.0),
        (geo.Horospheres(5.0), 0.5),
        (geo.Ball(2.0, 2.0), 0.4),
        (geo.Equidistant(3.0, H0=0.6), 1.0),
    ]:
        res = O.oracle_index(scenario, geo.cylinder_geometry_from_r(r), grid_n)
        assert res.counts[0] == res.counts[1]


def test_invalid_problems():
    with pytest.raises(DomainError):
        O.ModeProblem(1.0, 1.0, 0, O.Neumann(), O.Neumann(), grid_n=8)
    with pytest.raises(DomainError):
        O.ModeProblem(1.0, -1.0, 0, O.Neumann(), O.Neumann())
    with pytest.raises(DomainError):
        O.ModeProblem(1.0, 1.0, 0, O.Robin(float("inf")), O.Neumann())
    with pytest.raises(DomainError):
        O.assemble_interval(1.0, O.Robin(100.0), O.Neumann(), 16)


def test_crosscheck_horospheres(unit_cylinder):
    rep = O.crosscheck(geo.Horospheres(7.0), unit_cylinder, tol=1e-3, grid_n=4000)
    assert rep.passed
    assert rep.max_deviation < 1e-3
    assert rep.order == pytest.approx(2.0, abs=0.3)


def test_crosscheck_slab_reaches_mixed_mode():
    rep = O.crosscheck(geo.SlabHorosphere(1.0, 1.0), None, tol=1e-3, grid_n=4000, cap=25.0)
    assert rep.passed
    # (m, n) = (1, 0) and (1, 1) = 2 pi^2 both lie below 25
    assert rep.compared == 2


def test_crosscheck_flags_a_wrong_closed_form(unit_cylinder, monkeypatch):
    from capcyl import spectra

    real = spectra.longitudinal_modes

    def shifted(scenario, geom, m_max):
        return [spectra.LongitudinalMode(m.branch, m.m, m.delta * 1.01) for m in real(scenario, geom, m_max)]

    monkeypatch.setattr(spectra, "longitudinal_modes", shifted)
    rep = O.crosscheck(geo.Dirichlet(7.0), unit_cylinder, tol=1e-3, grid_n=2000)
    assert not rep.passed
    assert rep.mismatches[0].deviation > 1e-3
