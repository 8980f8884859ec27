import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracwalk.lattice import A, B
from diracwalk.operators import ThreeBond, search_hamiltonian
from diracwalk.reduced import (
    CROSS_SUBLATTICE,
    EQUIVALENT,
    NONEQUIVALENT,
    classify_pair,
    embedding_basis,
    reduced_comm_evolution,
    reduced_communication,
    reduced_extra_site,
    reduced_search_evolution,
    reduced_three_bond,
    search_time,
    transfer_time,
)

CLASSES = list(itertools.product(range(3), range(3)))


def test_three_bond_levels_at_288():
    ev = reduced_three_bond(288).eigenvalues()
    np.testing.assert_allclose(ev, [-2 * np.sqrt(3 / 288), 0, 2 * np.sqrt(3 / 288)], atol=1e-15)
    np.testing.assert_allclose(ev[-1], 0.2041241452, rtol=1e-9)


def test_origin_model_is_real():
    m = reduced_three_bond(288, 0, 0)
    assert np.all(m.matrix.imag == 0)


def test_zero_level_has_no_local_component():
    vals, vecs = np.linalg.eigh(reduced_three_bond(288, 1, 2).matrix)
    assert abs(vecs[2, 1]) < 1e-14


@pytest.mark.parametrize("a, b", CLASSES)
@pytest.mark.parametrize("sub", [A, B])
def test_closed_form_levels_all_classes(a, b, sub):
    n = 648
    np.testing.assert_allclose(reduced_three_bond(n, a, b, sub).eigenvalues(),
                               [-2 * np.sqrt(3 / n), 0, 2 * np.sqrt(3 / n)], atol=1e-12)
    np.testing.assert_allclose(reduced_extra_site(n, a, b, sub).eigenvalues(),
                               [-2 / np.sqrt(n), 0, 2 / np.sqrt(n)], atol=1e-12)


def test_search_evolution_endpoints():
    m = reduced_three_bond(288)
    np.testing.assert_allclose(reduced_search_evolution(m, 0.0), (1, 0), atol=1e-14)
    t = np.pi / 4 * np.sqrt(96)
    np.testing.assert_allclose(search_time(m), t)
    np.testing.assert_allclose(reduced_search_evolution(m, t), (0, 1), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 200), st.integers(0, 2), st.integers(0, 2))
def test_search_evolution_is_a_two_level_rotation(t, a, b):
    m = reduced_three_bond(288, a, b)
    ps, pl = reduced_search_evolution(m, t)
    e = 2 * np.sqrt(3 / 288)
    np.testing.assert_allclose([ps, pl], [np.cos(e * t) ** 2, np.sin(e * t) ** 2], atol=1e-12)


def test_extra_site_time():
    m = reduced_extra_site(288)
    np.testing.assert_allclose(search_time(m), 13.3286488, rtol=1e-7)
    np.testing.assert_allclose(m.eigenvalues()[-1] / reduced_three_bond(288).eigenvalues()[-1], 1 / np.sqrt(3))
    assert reduced_search_evolution(m, 0.0)[1] == 0


@pytest.mark.parametrize("src, tgt", [((0, 0), (1, 1)), ((0, 0), (3, 0)), ((2, 1), (0, 2))])
def test_equivalent_pair_levels(src, tgt):
    m = reduced_communication(288, src, tgt)
    assert m.kind == EQUIVALENT
    lam = 2 * np.sqrt(6 / 288)
    np.testing.assert_allclose(m.eigenvalues(), [-lam, 0, 0, lam], atol=1e-12)
    np.testing.assert_allclose(lam, 0.2886751346, rtol=1e-9)


@pytest.mark.parametrize("src, tgt", [((0, 0), (1, 0)), ((0, 0), (0, 1)), ((1, 1), (2, 1))])
def test_nonequivalent_pair_levels(src, tgt):
    m = reduced_communication(288, src, tgt)
    assert m.kind == NONEQUIVALENT
    u = np.sqrt(6 / 288)
    np.testing.assert_allclose(m.eigenvalues(), [-np.sqrt(3) * u, -u, u, np.sqrt(3) * u], atol=1e-12)


def test_communication_matrix_shape():
    h = reduced_communication(288, (0, 0), (1, 0)).matrix
    np.testing.assert_allclose(h, h.conj().T)
    assert np.all(np.diag(h) == 0)


def test_cross_sublattice_has_no_model():
    with pytest.raises(ValueError):
        reduced_communication(288, (0, 0), (1, 1), A, B)
    assert classify_pair((0, 0, A), (1, 1, B)) == CROSS_SUBLATTICE


def test_invalid_n():
    with pytest.raises(ValueError):
        reduced_three_bond(200)


def test_equivalent_transfer():
    m = reduced_communication(288, (0, 0), (1, 1))
    np.testing.assert_allclose(reduced_comm_evolution(m, 0.0), (1, 0), atol=1e-14)
    np.testing.assert_allclose(reduced_comm_evolution(m, transfer_time(288)), (0, 1), atol=1e-12)
    np.testing.assert_allclose(transfer_time(288), 10.8827961854, rtol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 300))
def test_comm_evolution_closed_forms(t):
    lam2 = 2 * np.sqrt(6 / 288)
    ps, pt = reduced_comm_evolution(reduced_communication(288, (0, 0), (1, 1)), t)
    np.testing.assert_allclose([ps, pt], [0.25 * (np.cos(lam2 * t) + 1) ** 2, 0.25 * (np.cos(lam2 * t) - 1) ** 2], atol=1e-12)
    u = np.sqrt(6 / 288)
    ps, pt = reduced_comm_evolution(reduced_communication(288, (0, 0), (1, 0)), t)
    c3, c1 = np.cos(np.sqrt(3) * u * t), np.cos(u * t)
    np.testing.assert_allclose([ps, pt], [0.25 * (c3 + c1) ** 2, 0.25 * (c3 - c1) ** 2], atol=1e-12)
    assert ps + pt <= 1 + 1e-12


def test_nonequivalent_transfer_is_incomplete_and_position_independent():
    t = np.linspace(0, 400, 4001)
    a = np.array([reduced_comm_evolution(reduced_communication(288, (0, 0), (1, 0)), x)[1] for x in t])
    b = np.array([reduced_comm_evolution(reduced_communication(288, (2, 2), (1, 2)), x)[1] for x in t])
    assert a.max() < 1
    np.testing.assert_allclose(a, b, atol=1e-12)


@pytest.mark.parametrize("a, b", CLASSES)
@pytest.mark.parametrize("sub", [A, B])
def test_compression_of_full_hamiltonian(torus12, a, b, sub):
    q = embedding_basis(torus12, a, b, sub)
    np.testing.assert_allclose(q.conj().T @ q, np.eye(3), atol=1e-12)
    h = search_hamiltonian(torus12, ThreeBond(torus12.site(a, b, sub)))
    np.testing.assert_allclose(q.conj().T @ h @ q, reduced_three_bond(288, a, b, sub).matrix, atol=1e-12)


def test_embedded_action_residual(torus12):
    q = embedding_basis(torus12, 0, 0)
    h = search_hamiltonian(torus12, ThreeBond(torus12.site(0, 0, A)))
    m = reduced_three_bond(288).matrix
    # the Dirac states are exact zero modes; only |ell> leaks into the bulk
    assert np.linalg.norm(h @ q[:, :2] - q @ m[:, :2]) < 1e-12
    leak = np.linalg.norm(h @ q[:, 2] - q @ m[:, 2])
    assert 0 < leak <= np.sqrt(3)
