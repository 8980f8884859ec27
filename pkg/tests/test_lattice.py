import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracwalk.lattice import (
    A,
    B,
    BoundarySpec,
    Lattice,
    SiteId,
    adjacency_matrix,
    build,
    build_armchair_nanotube,
    build_sheet,
    build_torus,
    neighbors,
)


def test_torus_12_has_288_sites_of_valence_3(torus12):
    assert torus12.n_sites == 288
    assert np.all(torus12.valence() == 3)
    assert np.all(adjacency_matrix(torus12).sum(axis=1) == 3)


def test_torus_neighbour_rule(torus12):
    got = {s.key for s in neighbors(torus12, torus12.site(0, 0, A))}
    assert got == {(11, 0, B), (11, 1, B), (0, 0, B)}
    got = {s.key for s in neighbors(torus12, torus12.site(5, 7, A))}
    assert got == {(5, 7, B), (4, 7, B), (4, 8, B)}


def test_smallest_torus_saturates_multi_edges():
    lat = build_torus(1, 1)
    assert lat.n_sites == 2
    np.testing.assert_array_equal(adjacency_matrix(lat), [[0, 1], [1, 0]])


def test_torus_3x3_spectrum():
    lat = build_torus(3, 3)
    adj = adjacency_matrix(lat)
    assert lat.n_sites == 18
    np.testing.assert_array_equal(adj.sum(axis=1), 3)
    ev = np.linalg.eigvalsh(-adj)
    assert ev.min() >= -3 - 1e-12 and ev.max() <= 3 + 1e-12
    np.testing.assert_allclose(np.sort(ev), np.sort(-ev), atol=1e-10)


def test_site_lookup_wraps_on_torus(torus12):
    assert torus12.site(12, -1, B) == torus12.site(0, 11, B)


@pytest.mark.parametrize("args", [(0, 3), (3, 0), (-1, 2)])
def test_torus_rejects_bad_dims(args):
    with pytest.raises(ValueError):
        build_torus(*args)


def test_sheet_site_counts(bearded, zigzag):
    assert bearded.n_sites == 200
    assert zigzag.n_sites == 218


def test_small_bearded_sheet_structure():
    lat = build_sheet(4, 4, "bearded")
    val = lat.valence()
    assert val.max() == 3
    assert val.min() == 1
    edge = [s.linear for s in lat.sites if s.cell_beta in (0, 3)]
    assert set(val[edge]) <= {1, 2, 3}
    assert np.all(val[[s.linear for s in lat.sites if s.cell_beta == 0 and s.sublattice == A]] == 1)


def test_sheet_corner_has_few_neighbours(bearded):
    corner = bearded.site(0, 0, A)
    assert 1 <= len(neighbors(bearded, corner)) <= 2


def test_sheet_rejects_bad_input():
    with pytest.raises(ValueError):
        build_sheet(0, 3)
    with pytest.raises(ValueError):
        build_sheet(3, 3, "armchair")


def test_nanotube_320_sites(tube):
    assert tube.n_sites == 320
    assert tube.valence().min() < 3
    assert tube.valence().max() == 3


@pytest.mark.parametrize("n_x, has_zero", [(5, True), (6, False), (7, False), (8, True), (9, False), (11, True)])
def test_nanotube_zero_modes_follow_length_rule(n_x, has_zero):
    ev = np.linalg.eigvalsh(-adjacency_matrix(build_armchair_nanotube(n_x, 6)))
    assert (np.min(np.abs(ev)) < 1e-10) == has_zero


def test_nanotube_rejects_bad_dims():
    with pytest.raises(ValueError):
        build_armchair_nanotube(1, 4)


def test_neighbors_rejects_foreign_site(torus12):
    with pytest.raises(KeyError):
        neighbors(torus12, SiteId(5, 99, 99, A))


def test_every_neighbour_pair_is_an_edge(bearded):
    edges = set(bearded.edges)
    for s in bearded.sites:
        for t in neighbors(bearded, s):
            assert (min(s.linear, t.linear), max(s.linear, t.linear)) in edges


def test_json_round_trip(zigzag):
    d = json.loads(zigzag.to_json())
    assert d["n_sites"] == 218
    back = Lattice.from_dict(d)
    assert back.edges == zigzag.edges and back.sites == zigzag.sites
    assert build(BoundarySpec.from_dict(d["boundary"])).edges == zigzag.edges


def _structural_checks(lat):
    adj = adjacency_matrix(lat)
    np.testing.assert_array_equal(adj, adj.T)
    assert np.all(np.diag(adj) == 0)
    assert sorted(s.linear for s in lat.sites) == list(range(lat.n_sites))
    for i, j in lat.edges:
        assert lat.sites[i].sublattice != lat.sites[j].sublattice
    ev = np.linalg.eigvalsh(adj)
    np.testing.assert_allclose(np.sort(ev), np.sort(-ev), atol=1e-10)
    assert 1 <= lat.valence().min() and lat.valence().max() <= 3


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7))
def test_torus_structure(m, n):
    lat = build_torus(m, n)
    assert lat.n_sites == 2 * m * n
    _structural_checks(lat)
    if m >= 3 and n >= 3:
        assert np.all(lat.valence() == 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 9), st.integers(1, 6))
def test_nanotube_structure(n_x, n_cells):
    lat = build_armchair_nanotube(n_x, n_cells)
    assert lat.n_sites == 2 * n_x * n_cells
    _structural_checks(lat)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 8), st.integers(1, 8), st.sampled_from(["bearded", "zigzag"]))
def test_sheet_structure(n_x, n_y, edge):
    lat = build_sheet(n_x, n_y, edge)
    extra = 2 * (n_x - 1) if edge == "zigzag" else 0
    assert lat.n_sites == 2 * n_x * n_y + extra
    _structural_checks(lat)
