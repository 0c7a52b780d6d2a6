import pytest
from hypothesis import given, settings, strategies as st

from plastoframe.config import ConfigError, fixture_text, parse_problem
from plastoframe.model import (
    FrameGeometry,
    ModelError,
    Profile,
    area_length,
    frame_mass,
    max_mass,
    plastic_moment,
)

# Table of HEA profiles: (W_p cm^3, M_p kN*m)
TABLE_MP = [
    (173.5, 40.7725), (245.1, 57.5985), (324.9, 76.3515), (429.5, 100.9325), (568.5, 133.5975),
    (744.6, 174.981), (919.8, 216.153), (1112, 261.32), (1383, 325.005), (1628, 382.58),
]


def member_sum(genes, problem):
    """Independent oracle: walk every physical member and add A * length."""
    g = problem.geometry
    total = 0.0
    for floor in range(g.n_floors):
        col, beam = genes[2 * floor], genes[2 * floor + 1]
        for _ in range(g.n_columns):
            total += problem.catalog[col - 1].area_cm2 * g.storey_height
        for _ in range(g.n_columns - 1):
            total += problem.catalog[beam - 1].area_cm2 * g.bay_length
    return total


@pytest.mark.parametrize("wp, mp", TABLE_MP)
def test_plastic_moment_matches_table(wp, mp):
    p = Profile(1, "x", 1.0, 1.0, wp, mp)
    assert plastic_moment(p, 235.0) == pytest.approx(mp, abs=5e-5)


def test_catalog_mp_consistent(two_storey):
    for prof in two_storey.catalog:
        assert plastic_moment(prof) == pytest.approx(prof.mp_knm, abs=5e-5)


def test_profile_rejects_zero_modulus():
    with pytest.raises(ModelError):
        Profile(1, "bad", 100.0, 10.0, 0.0, 1.0)


def test_parse_two_storey(two_storey):
    g, loads = two_storey.geometry, two_storey.loads
    assert (g.n_floors, g.n_columns, g.bay_length, g.storey_height) == (2, 3, 4.0, 3.0)
    assert loads.q == (50.0, 50.0)
    assert loads.forces_a == (400.0, 400.0)
    assert loads.forces_b == (266.67, 533.33)
    assert two_storey.weights.as_tuple() == (0.2, 0.6, 0.1, 0.1)
    assert two_storey.calibration.e_mpa == 210000.0


def test_parse_five_storey(five_storey):
    g, loads = five_storey.geometry, five_storey.loads
    assert (g.n_floors, g.n_columns, g.bay_length, g.storey_height) == (5, 4, 6.5, 3.2)
    assert loads.q == (25.0,) * 5
    assert loads.forces_a == (325.0,) * 5


def test_parse_defaults_filled():
    text = fixture_text("portal")
    p = parse_problem(text)
    assert p.weights.as_tuple() == (0.2, 0.6, 0.1, 0.1)
    assert p.calibration.rho == 7850.0 and p.calibration.kappa == 0.5


def test_parse_rejects_catalog_index_zero():
    text = fixture_text("two_storey").replace("{id: 1, name: HE 140A", "{id: 0, name: HE 140A")
    with pytest.raises(ConfigError, match="catalog.0.id"):
        parse_problem(text)


def test_parse_names_unknown_key():
    text = fixture_text("two_storey").replace("bay_length_m", "bay_len")
    with pytest.raises(ConfigError, match="geometry"):
        parse_problem(text)


def test_parse_rejects_wrong_mp():
    text = fixture_text("two_storey").replace("Mp_knm: 40.7725", "Mp_knm: 45.0")
    with pytest.raises(ConfigError, match="Wp\\*fy"):
        parse_problem(text)


def test_parse_rejects_short_force_list():
    text = fixture_text("two_storey").replace("[400.0, 400.0]", "[400.0]")
    with pytest.raises(ConfigError, match="forces_a"):
        parse_problem(text)


def test_geometry_invariants():
    with pytest.raises(ModelError):
        FrameGeometry(0, 3, 4.0, 3.0)
    with pytest.raises(ModelError):
        FrameGeometry(2, 1, 4.0, 3.0)


def test_area_length_two_storey(two_storey):
    genes = (5, 5, 3, 4)
    assert member_sum(genes, two_storey) == pytest.approx(626.26, abs=1e-9)
    assert area_length(genes, two_storey) == pytest.approx(member_sum(genes, two_storey), rel=1e-12)


def test_max_mass_two_storey(two_storey):
    assert member_sum((10,) * 4, two_storey) == pytest.approx(1398.42, abs=1e-9)
    assert max_mass(two_storey) == frame_mass((10,) * 4, two_storey)
    assert max_mass(two_storey) == pytest.approx(7850 * 1398.42e-4, rel=1e-12)


def test_max_mass_five_storey(five_storey):
    assert member_sum((10,) * 10, five_storey) == pytest.approx(6642.495, abs=1e-6)
    assert max_mass(five_storey) == pytest.approx(7850 * 6642.495e-4, rel=1e-12)


def test_single_profile_catalog(two_storey):
    import dataclasses

    p = dataclasses.replace(two_storey, catalog=two_storey.catalog[:1])
    assert max_mass(p) == frame_mass((1, 1, 1, 1), p)


@settings(max_examples=60, deadline=None)
@given(
    genes=st.lists(st.integers(1, 10), min_size=4, max_size=4),
    pos=st.integers(0, 3),
    bump=st.integers(1, 9),
)
def test_mass_monotone_in_area(two_storey, genes, pos, bump):
    # catalog areas increase with id, so a larger gene never lowers the mass
    bigger = list(genes)
    bigger[pos] = min(10, genes[pos] + bump)
    assert frame_mass(bigger, two_storey) >= frame_mass(genes, two_storey)
    assert frame_mass(genes, two_storey) <= max_mass(two_storey)


def test_check_chromosome(two_storey):
    assert two_storey.check_chromosome([5, 5, 3, 4]) == (5, 5, 3, 4)
    with pytest.raises(ModelError, match="catalog index"):
        two_storey.check_chromosome([0, 1, 1, 1])
    with pytest.raises(ModelError, match="2\\*n_floors"):
        two_storey.check_chromosome([1, 1, 1])
