import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracwalk.dynamics import (
    Trajectory,
    evolve,
    farthest_equivalent_site,
    localized_state_snapshot,
    normalize,
    optimal_start_state,
    pair_case,
    refine_peak,
    reference_time,
    run_communication,
    run_search,
    start_state_family,
    zero_mode_weights,
)
from diracwalk.lattice import A, B, adjacency_matrix, build_torus
from diracwalk.operators import ExtraSite, SingleBond, ThreeBond, perturber_probes, search_hamiltonian
from diracwalk.reduced import CROSS_SUBLATTICE, EQUIVALENT, NONEQUIVALENT
from diracwalk.spectral import crossing_levels, dirac_states, eigendecompose
from diracwalk.theory import UnperturbedSpectrum, solve_perturbed_energy


@pytest.fixture(scope="module")
def search12(torus12):
    return run_search(torus12, ThreeBond(torus12.site(0, 0, A)))


# -- propagation ---------------------------------------------------------------

def test_evolve_at_zero_returns_start(torus6):
    d = eigendecompose(-adjacency_matrix(torus6))
    psi = normalize(np.arange(72.0))
    np.testing.assert_allclose(evolve(d, psi, [0.0])[0], psi, atol=1e-12)


def test_eigenstate_only_picks_up_phase(torus6):
    d = eigendecompose(-adjacency_matrix(torus6))
    v = d.eigenvectors[:, 5]
    out = evolve(d, v, [0.0, 1.3, 7.0])
    np.testing.assert_allclose(np.abs(np.conj(v) @ out.T), 1, atol=1e-12)
    np.testing.assert_allclose(out[1], np.exp(-1.3j * d.eigenvalues[5]) * v, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 50), st.floats(0.1, 3))
def test_two_site_rabi_oscillation(t, j):
    d = eigendecompose(np.array([[0.0, j], [j, 0.0]]))
    out = evolve(d, np.array([1.0, 0.0]), [t])[0]
    np.testing.assert_allclose(abs(out[1]) ** 2, np.sin(j * t) ** 2, atol=1e-12)


def test_unitarity(torus12):
    d = eigendecompose(search_hamiltonian(torus12, ThreeBond(torus12.site(0, 0, A))))
    rng = np.random.default_rng(0)
    psi = normalize(rng.normal(size=288) + 1j * rng.normal(size=288))
    out = evolve(d, psi, np.linspace(0, 100, 50))
    np.testing.assert_allclose(np.linalg.norm(out, axis=1), 1, atol=1e-10)


def test_evolve_checks_state(torus6):
    d = eigendecompose(-adjacency_matrix(torus6))
    with pytest.raises(ValueError):
        evolve(d, normalize(np.ones(73)), [0.0])
    with pytest.raises(ValueError):
        evolve(d, np.ones(72), [0.0])


def test_refine_peak_recovers_parabola_vertex():
    t = np.linspace(0, 1, 11)
    y = 2 - (t - 0.537) ** 2
    tp, yp = refine_peak(t, y)
    assert abs(tp - 0.537) < 1e-12 and abs(yp - 2) < 1e-12
    assert refine_peak(t, t) == (1.0, 1.0)


# -- start states ----------------------------------------------------------------

def test_optimal_start_at_origin(torus12):
    k, kp = dirac_states(torus12, A)
    s = optimal_start_state(torus12, ThreeBond(torus12.site(0, 0, A)))
    np.testing.assert_allclose(s, (k + kp) / np.sqrt(2), atol=1e-14)


@pytest.mark.parametrize("a, b", [(1, 0), (2, 1), (5, 7), (11, 3)])
def test_optimal_start_closed_form(torus12, a, b):
    k, kp = dirac_states(torus12, A)
    mu = 2 * np.pi / 3 * (a + 2 * b)
    expected = np.exp(-1j * mu) / np.sqrt(2) * (k + np.exp(-2j * np.pi / 3 * (a - b)) * kp)
    np.testing.assert_allclose(optimal_start_state(torus12, ThreeBond(torus12.site(a, b, A))), expected, atol=1e-13)


def test_three_distinct_starts_per_sublattice(torus12):
    starts = {}
    for s in torus12.sites:
        v = optimal_start_state(torus12, ThreeBond(s))
        assert abs(np.linalg.norm(v) - 1) < 1e-12
        key = (s.sublattice, tuple(np.round(v / v[np.flatnonzero(np.abs(v) > 1e-9)[0]], 8)))
        starts.setdefault(s.sublattice, set()).add(key)
    assert len(starts[A]) == 3 and len(starts[B]) == 3
    assert len(start_state_family(torus12)) == 6


def test_start_needs_dirac_points():
    lat = build_torus(10, 10)
    with pytest.raises(ValueError):
        optimal_start_state(lat, ThreeBond(lat.site(0, 0, A)))


def test_nodal_nanotube_site_has_no_start(tube):
    w = zero_mode_weights(tube)
    assert w[tube.site(2, 0, A).linear] < 1e-20 and w[tube.site(4, 0, A).linear] > 1e-3
    with pytest.raises(ValueError):
        optimal_start_state(tube, ThreeBond(tube.site(2, 0, A)))


def test_extra_site_start_is_padded(torus6):
    s = optimal_start_state(torus6, ExtraSite(torus6.site(0, 0, A)))
    assert s.shape == (73,) and s[-1] == 0


# -- searches --------------------------------------------------------------------

def test_three_bond_search_oracle(search12):
    assert 0.40 <= search12.peak_probability <= 0.50
    np.testing.assert_allclose(search12.peak_probability, 0.430182, atol=1e-5)
    np.testing.assert_allclose(search12.reference_time, np.pi / 4 * np.sqrt(96))
    assert 1.0 <= search12.peak_time / search12.reference_time <= 2.0


def test_tracked_probability_bounded(search12):
    assert np.all(search12.trajectory.total <= 1 + 1e-9)
    assert set(search12.trajectory.tracked) == {"B(0,0)", "B(11,0)", "B(11,1)"}


def test_decoupled_site_stays_empty(torus12):
    p = ThreeBond(torus12.site(0, 0, A))
    d = eigendecompose(search_hamiltonian(torus12, p))
    # B-sublattice Dirac states have no weight on the marked A site
    k, kp = dirac_states(torus12, B)
    out = evolve(d, normalize(k + 1j * kp), np.linspace(0, 40, 81))
    assert np.max(np.abs(out[:, p.marked.linear]) ** 2) <= 1e-16


def test_full_and_log_corrected_two_level_peaks_agree(search12):
    e = solve_perturbed_energy(UnperturbedSpectrum.from_torus(12, 12))
    t_model = np.pi / (2 * e)
    assert abs(search12.peak_time - t_model) <= 0.35 * t_model
    tr = search12.trajectory
    early = tr.times <= search12.peak_time
    # rises monotonically on the coarse scale like sin^2
    assert np.corrcoef(tr.total[early], np.sin(e * tr.times[early]) ** 2)[0, 1] > 0.95


def test_single_bond_vertex_pair_and_neighbours(torus12):
    r = run_search(torus12, SingleBond((0, 0)))
    vertices = r.site_peaks["A(0,0)"] + r.site_peaks["B(0,0)"]
    assert 0.16 <= vertices <= 0.18
    neighbours = [v for k, v in r.site_peaks.items() if k not in ("A(0,0)", "B(0,0)")]
    assert len(neighbours) == 4 and all(0.05 <= v <= 0.11 for v in neighbours)
    assert 0.40 <= r.peak_probability <= 0.55


def test_extra_site_search(torus12):
    r = run_search(torus12, ExtraSite(torus12.site(0, 0, A)))
    assert r.peak_probability >= 0.4
    np.testing.assert_allclose(r.reference_time, np.pi / 4 * np.sqrt(288))
    assert 1.0 <= r.peak_time / r.reference_time <= 2.0


def test_reference_time_is_pi_over_gap_off_torus(tube):
    p = ThreeBond(tube.site(4, 0, A))
    d = eigendecompose(search_hamiltonian(tube, p))
    em, ep = crossing_levels(d, perturber_probes(tube, p))
    assert ep - em > 1e-4
    np.testing.assert_allclose(reference_time(tube, p), np.pi / (ep - em), rtol=1e-12)


def test_reference_time_falls_back_on_exact_crossing():
    # removing one A site from a 10x10 torus leaves a B zero mode touching the neighbours
    lat = build_torus(10, 10)
    p = ThreeBond(lat.site(0, 0, A))
    d = eigendecompose(search_hamiltonian(lat, p))
    ell = perturber_probes(lat, p)
    assert crossing_levels(d, ell) == (0.0, 0.0)
    w = np.sum(np.abs(d.eigenvectors.T @ ell) ** 2, axis=1)
    ev = d.eigenvalues
    ep = ev[ev > 1e-9][np.argmax(w[ev > 1e-9])]
    np.testing.assert_allclose(reference_time(lat, p), np.pi / (2 * ep), rtol=1e-12)


def test_sheet_search_from_delocalized_state(bearded):
    p = ThreeBond(bearded.site(5, 5, A))
    r = run_search(bearded, p)
    assert r.start_descriptor == "lowest delocalized eigenstate"
    np.testing.assert_allclose(r.reference_time, 15.6, atol=0.05)
    assert r.peak_probability > 0.05 and 1.0 <= r.peak_time / r.reference_time <= 2.0


def test_search_rejects_short_grid(torus6):
    with pytest.raises(ValueError):
        run_search(torus6, ThreeBond(torus6.site(0, 0, A)), n_steps=2)


def test_search_outputs(tmp_path, search12):
    search12.trajectory.to_csv(tmp_path / "t.csv")
    rows = list(csv.reader(open(tmp_path / "t.csv")))
    assert rows[0] == ["time", "B(0,0)", "B(11,0)", "B(11,1)", "total"] and len(rows) == 601
    search12.to_json(tmp_path / "s.json", {"lattice": "torus"})
    d = json.loads((tmp_path / "s.json").read_text())
    assert d["peak_probability"] == search12.peak_probability and d["config"] == {"lattice": "torus"}


def test_trajectory_groups():
    states = np.array([[1, 0, 0], [0, 0.6, 0.8]], dtype=complex)
    tr = Trajectory.from_states([0, 1], states, [("x", [0]), ("yz", [1, 2])])
    np.testing.assert_allclose(tr.tracked["yz"], [0, 1])
    np.testing.assert_allclose(tr.total, [1, 1])


# -- snapshots and communication --------------------------------------------------

def test_three_bond_snapshot(torus12):
    o = torus12.site(0, 0, A)
    s = localized_state_snapshot(torus12, ThreeBond(o))
    assert abs(np.linalg.norm(s) - 1) < 1e-12
    assert np.sum(np.abs(s[list(torus12.neighbor_indices(o.linear))]) ** 2) >= 0.4


def test_extra_site_snapshot(torus12):
    s = localized_state_snapshot(torus12, ExtraSite(torus12.site(0, 0, A)))
    assert s.shape == (289,)
    # the extra site outweighs every lattice site, including the one it hangs off
    assert abs(s[-1]) ** 2 >= 0.4 and abs(s[-1]) ** 2 > 5 * np.max(np.abs(s[:-1]) ** 2)


def test_farthest_equivalent(torus12):
    t = farthest_equivalent_site(torus12, torus12.site(0, 0, A))
    assert t.key == (4, 4, A)
    assert pair_case(ThreeBond(torus12.site(0, 0, A)), ThreeBond(t)) == EQUIVALENT


def test_equivalent_transfer(torus12):
    src = ThreeBond(torus12.site(0, 0, A))
    r = run_communication(torus12, src, ThreeBond(torus12.site(4, 4, A)))
    assert r.case == EQUIVALENT
    assert r.target_peak >= 0.9 * r.source_initial
    assert 1.0 <= r.target_peak_time / (np.pi / 2 * np.sqrt(48)) <= 2.0
    assert np.all(r.trajectory.total <= 1 + 1e-9)


@pytest.mark.parametrize("shift", [(3, 5), (1, 2), (7, 7)])
def test_nonequivalent_transfer_is_translation_invariant(torus12, shift):
    def run(a, b):
        return run_communication(torus12, ThreeBond(torus12.site(a, b, A)), ThreeBond(torus12.site(a + 4, b + 5, A)))

    base, moved = run(0, 0), run(*shift)
    assert base.case == moved.case == NONEQUIVALENT
    for k in ("source", "target"):
        np.testing.assert_allclose(base.trajectory.tracked[k], moved.trajectory.tracked[k], atol=1e-8)


def test_cross_sublattice_transfer_is_slow(torus12):
    src = ThreeBond(torus12.site(0, 0, A))
    tgt = ThreeBond(torus12.site(5, 3, B))
    t_c = np.pi / 2 * np.sqrt(48)
    r = run_communication(torus12, src, tgt, t_max=25 * t_c, n_steps=6000)
    assert r.case == CROSS_SUBLATTICE
    early = r.trajectory.times <= 2.5 * t_c
    assert r.trajectory.tracked["target"][early].max() < 0.1
    assert r.target_peak > 0.3 and r.target_peak_time > 5 * t_c


def test_communication_extra_sites_track_extra_indices(torus6):
    r = run_communication(torus6, ExtraSite(torus6.site(0, 0, A)), ExtraSite(torus6.site(3, 3, A)), n_steps=50)
    assert r.source_initial >= 0.4
    assert r.to_dict()["case"] == EQUIVALENT
