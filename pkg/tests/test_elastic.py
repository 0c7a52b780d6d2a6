import numpy as np
import pytest

from plastoframe.elastic import assemble, frame_response, lateral_response, solve
from plastoframe.model import FrameGeometry

E = 210000.0


def test_dof_count_portal(portal):
    m = assemble(portal.geometry, (5, 5), E, portal.catalog)
    assert m.n_dof == 3


def test_dof_count_two_storey(two_storey):
    m = assemble(two_storey.geometry, (5, 5, 3, 4), E, two_storey.catalog)
    assert m.n_dof == 8


def test_symmetric_positive_definite_asymmetric_assignment(five_storey):
    m = assemble(five_storey.geometry, (9, 1, 2, 7, 10, 3, 1, 1, 6, 4), E, five_storey.catalog)
    assert np.array_equal(m.matrix, m.matrix.T)
    assert np.linalg.eigvalsh(m.matrix).min() > 0


def test_rigid_beam_portal_matches_shear_frame(portal):
    m = assemble(portal.geometry, (5, 5), E, portal.catalog, beam_scale=1e6)
    r = lateral_response(m, [100.0])
    ei = E * 1e3 * 5410e-8
    expected = 2 * 12 * ei / 3.0**3  # kN/m
    assert expected * 1e3 == pytest.approx(1.010e7, rel=1e-3)
    assert r.stiffness == pytest.approx(expected, rel=0.01)


def test_vanishing_beam_gives_cantilevers(portal):
    # two independent cantilever columns sharing the floor translation
    m = assemble(portal.geometry, (5, 5), E, portal.catalog, beam_scale=1e-9)
    r = lateral_response(m, [200.0])
    ei = E * 1e3 * 5410e-8
    assert ei * 1e3 == pytest.approx(1.1361e7, rel=1e-4)
    assert r.top_displacement == pytest.approx(100.0 * 27.0 / (3 * ei), rel=1e-6)
    assert r.top_displacement == pytest.approx(0.0792, abs=5e-5)


def test_doubling_e_halves_displacements(two_storey):
    f = two_storey.loads.forces("A")
    u1 = lateral_response(assemble(two_storey.geometry, (5, 5, 3, 4), E, two_storey.catalog), f)
    u2 = lateral_response(assemble(two_storey.geometry, (5, 5, 3, 4), 2 * E, two_storey.catalog), f)
    np.testing.assert_allclose(u2.floor_displacements, u1.floor_displacements / 2, rtol=1e-12)


def test_zero_force_rejected(two_storey):
    m = assemble(two_storey.geometry, (5, 5, 3, 4), E, two_storey.catalog)
    with pytest.raises(ValueError):
        lateral_response(m, [0.0, 0.0])


@pytest.mark.parametrize("genes", [(5, 5, 3, 4), (1, 10, 10, 1), (10, 1, 1, 10)])
def test_linearity_superposition_reciprocity(two_storey, genes):
    m = assemble(two_storey.geometry, genes, E, two_storey.catalog)
    fa, fb = two_storey.loads.forces("A"), two_storey.loads.forces("B")
    ua, ub = solve(m, fa), solve(m, fb)
    np.testing.assert_allclose(solve(m, 3.7 * fa), 3.7 * ua, rtol=1e-10, atol=0)
    np.testing.assert_allclose(solve(m, fa + fb), ua + ub, rtol=1e-10, atol=1e-16)
    flex = np.column_stack([solve(m, e)[:2] for e in np.eye(2)])
    assert flex[0, 1] == pytest.approx(flex[1, 0], rel=1e-10)


@pytest.mark.parametrize("pattern", ["A", "B"])
def test_floor_displacements_increase_with_height(five_storey, pattern):
    r = frame_response((5, 3, 5, 3, 5, 2, 3, 2, 1, 1), five_storey, pattern)
    assert np.all(np.diff(r.floor_displacements) >= 0)
    assert r.top_displacement > 0
    assert r.stiffness == pytest.approx(five_storey.loads.forces(pattern).sum() / r.top_displacement)


def test_multi_storey_rigid_beams_storey_stiffness():
    # rigid beams: each storey is a shear spring with N_c * 12EI/H^3
    from plastoframe.config import fixture_problem

    p = fixture_problem("two_storey")
    g = FrameGeometry(2, 3, 4.0, 3.0)
    m = assemble(g, (5, 5, 5, 5), E, p.catalog, beam_scale=1e7)
    u = solve(m, [0.0, 100.0])[:2]
    k_storey = 3 * 12 * E * 1e3 * 5410e-8 / 27.0
    assert u[0] == pytest.approx(100.0 / k_storey, rel=0.01)
    assert u[1] == pytest.approx(200.0 / k_storey, rel=0.01)
