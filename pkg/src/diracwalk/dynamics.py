"""Exact time evolution, search runs and two-site state transfer."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .lattice import A, B, SHEET, Lattice, SiteId, adjacency_matrix
from .operators import (
    ExtraSite,
    Perturbation,
    SingleBond,
    ThreeBond,
    communication_hamiltonian,
    search_hamiltonian,
    perturber_probes,
    single_bond_sites,
    tracked_sites,
)
from .reduced import (
    EQUIVALENT,
    classify_pair,
    reduced_extra_site,
    reduced_three_bond,
    search_time,
    transfer_time,
)
from .spectral import (
    ZERO_TOL,
    SpectralDecomposition,
    crossing_levels,
    dirac_states,
    dominant_perturber_levels,
    eigendecompose,
    first_delocalized_state,
)

NORM_TOL = 1e-12
DEFAULT_STEPS = 600
WINDOW_FACTOR = 2.5


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if nrm < 1e-14:
        raise ValueError("cannot normalize a zero vector")
    return psi / nrm


def check_state(psi: np.ndarray, dim: int | None = None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if dim is not None and psi.shape != (dim,):
        raise ValueError(f"state has shape {psi.shape}, operator dimension is {dim}")
    if abs(np.linalg.norm(psi) - 1) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm {np.linalg.norm(psi):.15f})")
    return psi


def evolve(decomp: SpectralDecomposition, psi0: np.ndarray, times: Sequence[float]) -> np.ndarray:
    """Rows are ``psi(t) = V exp(-iEt) V^dagger psi0`` for each ``t``."""
    psi0 = check_state(psi0, decomp.dim)
    v = decomp.eigenvectors
    c = v.conj().T @ psi0
    t = np.atleast_1d(np.asarray(times, dtype=float))
    phases = np.exp(-1j * np.outer(t, decomp.eigenvalues))
    return (phases * c) @ v.T


def refine_peak(times: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Global maximum of a sampled series, refined by a parabola through the bracketing samples."""
    i = int(np.argmax(y))
    if 0 < i < len(y) - 1:
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        denom = y0 - 2 * y1 + y2
        if denom < 0:
            h = times[i + 1] - times[i]
            d = 0.5 * (y0 - y2) / denom
            return float(times[i] + d * h), float(y1 - 0.25 * (y0 - y2) * d)
    return float(times[i]), float(y[i])


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    tracked: dict[str, np.ndarray]
    total: np.ndarray

    @classmethod
    def from_states(cls, times, states: np.ndarray, groups: Sequence[tuple[str, Sequence[int]]]):
        probs = np.abs(states) ** 2
        tracked = {label: probs[:, list(idx)].sum(axis=1) for label, idx in groups}
        total = np.sum(list(tracked.values()), axis=0)
        return cls(np.asarray(times, dtype=float), tracked, total)

    def peak(self, label: str | None = None) -> tuple[float, float]:
        """``(time, probability)`` of the refined maximum of one series (default: total)."""
        return refine_peak(self.times, self.total if label is None else self.tracked[label])

    def to_csv(self, path: str | Path) -> None:
        labels = list(self.tracked)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time", *labels, "total"])
            for i, t in enumerate(self.times):
                w.writerow([repr(float(t)), *(repr(float(self.tracked[k][i])) for k in labels),
                            repr(float(self.total[i]))])


@dataclass(frozen=True)
class SearchResult:
    peak_probability: float
    peak_time: float
    trajectory: Trajectory
    start_descriptor: str
    reference_time: float
    site_peaks: dict[str, float] = field(default_factory=dict)

    def to_dict(self, config: dict | None = None) -> dict:
        return {
            "peak_probability": self.peak_probability,
            "peak_time": self.peak_time,
            "reference_time": self.reference_time,
            "start": self.start_descriptor,
            "site_peaks": self.site_peaks,
            "config": config or {},
        }

    def to_json(self, path: str | Path, config: dict | None = None) -> None:
        Path(path).write_text(json.dumps(self.to_dict(config), indent=2, sort_keys=True) + "\n")


# -- start states -----------------------------------------------------------

def _pad(psi: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros(dim, dtype=complex)
    out[: len(psi)] = psi
    return out


def _marked_indices(lat: Lattice, pert: Perturbation) -> list[int]:
    if isinstance(pert, ThreeBond):
        return [pert.marked.linear]
    if isinstance(pert, ExtraSite):
        return [pert.attach.linear]
    if isinstance(pert, SingleBond):
        return list(single_bond_sites(lat, pert.cell))
    raise TypeError(f"unsupported perturbation {pert!r}")


def zero_mode_basis(lat: Lattice, tol: float = ZERO_TOL) -> np.ndarray:
    """Orthonormal columns spanning the zero-energy eigenspace of ``-A``."""
    if lat.is_torus and lat.dims[0] % 3 == 0 and lat.dims[1] % 3 == 0:
        return np.column_stack([*dirac_states(lat, A), *dirac_states(lat, B)])
    d = eigendecompose(-adjacency_matrix(lat))
    return d.eigenvectors[:, d.zero_modes(tol)].astype(complex)


def zero_mode_weights(lat: Lattice, basis: np.ndarray | None = None) -> np.ndarray:
    """Per-site weight ``||P_0 |j>||^2`` of the zero-energy eigenspace; nodal sites give 0."""
    basis = zero_mode_basis(lat) if basis is None else basis
    return np.sum(np.abs(basis) ** 2, axis=1)


def dirac_projected_start(lat: Lattice, sites: Sequence[int], basis: np.ndarray | None = None) -> np.ndarray:
    """Normalized projection of ``sum_j |j>`` onto the zero modes of ``-A``.

    For one marked site this is the superposition ``sum_D |D><D|o>`` that
    maximizes overlap with the marked site's Dirac content.
    """
    basis = zero_mode_basis(lat) if basis is None else basis
    v = np.zeros(lat.n_sites, dtype=complex)
    v[list(sites)] = 1.0
    proj = basis @ (basis.conj().T @ v)
    if np.linalg.norm(proj) < 1e-9:
        raise ValueError("marked sites have no weight on the zero-energy states")
    return normalize(proj)


def optimal_start_state(lat: Lattice, pert: Perturbation) -> np.ndarray:
    """Start state for a search, sized to the search Hamiltonian.

    Lattices with zero modes use the projection of the marked site(s) onto
    them; sheets use the lowest delocalized (non-edge) eigenstate of ``-A``.
    """
    dim = lat.n_sites + (1 if isinstance(pert, ExtraSite) else 0)
    if lat.boundary.variant == SHEET:
        d = eigendecompose(-adjacency_matrix(lat))
        return _pad(normalize(d.eigenvectors[:, first_delocalized_state(d, lat)]), dim)
    if lat.is_torus and (lat.dims[0] % 3 or lat.dims[1] % 3):
        raise ValueError("optimal start needs a torus with both dimensions divisible by 3")
    return _pad(dirac_projected_start(lat, _marked_indices(lat, pert)), dim)


def start_state_family(lat: Lattice) -> list[tuple[str, np.ndarray]]:
    """The six distinct optimal start states of a torus: three phase classes per sublattice."""
    out = []
    for sub in (A, B):
        basis = np.column_stack(dirac_states(lat, sub))
        for c in range(3):
            site = lat.site(c, 0, sub)
            out.append((f"{sub}-class{c}", dirac_projected_start(lat, [site.linear], basis)))
    return out


def _describe_start(lat: Lattice, pert: Perturbation) -> str:
    if lat.boundary.variant == SHEET:
        return "lowest delocalized eigenstate"
    marked = ",".join(lat.sites[i].label for i in _marked_indices(lat, pert))
    return f"zero-mode projection of {marked}"


def reference_time(lat: Lattice, pert: Perturbation, decomp: SpectralDecomposition | None = None) -> float:
    """Expected first peak time used to size the default time window.

    Three-bond and extra-site searches on tori with Dirac points use the
    few-state model; otherwise ``pi / gap`` of the actual spectrum. When the
    levels next to zero cross exactly, the gap is taken between the levels
    that carry most of the perturber weight.
    """
    if lat.is_torus and lat.dims[0] % 3 == 0 and lat.dims[1] % 3 == 0:
        if isinstance(pert, ThreeBond):
            return search_time(reduced_three_bond(lat.n_sites))
        if isinstance(pert, ExtraSite):
            return search_time(reduced_extra_site(lat.n_sites))
    if decomp is None:
        decomp = eigendecompose(search_hamiltonian(lat, pert))
    probes = perturber_probes(lat, pert)
    em, ep = crossing_levels(decomp, probes)
    if ep - em < 1e-9:
        em, ep = dominant_perturber_levels(decomp, probes)
    return float(np.pi / (ep - em))


def run_search(
    lat: Lattice,
    pert: Perturbation,
    gamma_c: float | None = None,
    t_max: float | None = None,
    n_steps: int = DEFAULT_STEPS,
    start: np.ndarray | None = None,
    start_descriptor: str | None = None,
) -> SearchResult:
    """Evolve from ``start`` under the search Hamiltonian and track the marked region."""
    h = search_hamiltonian(lat, pert, gamma_c)
    decomp = eigendecompose(h)
    t_ref = reference_time(lat, pert, decomp if gamma_c is None else None)
    if start is None:
        start = optimal_start_state(lat, pert)
        start_descriptor = start_descriptor or _describe_start(lat, pert)
    if t_max is None:
        t_max = WINDOW_FACTOR * t_ref
    if n_steps < 3:
        raise ValueError("need at least 3 time samples")
    times = np.linspace(0.0, t_max, n_steps)
    states = evolve(decomp, start, times)
    sites = tracked_sites(lat, pert)
    traj = Trajectory.from_states(times, states, [(label, [i]) for label, i in sites])
    t_pk, p_pk = traj.peak()
    site_peaks = {label: traj.peak(label)[1] for label in traj.tracked}
    return SearchResult(p_pk, t_pk, traj, start_descriptor or "user supplied", t_ref, site_peaks)


def localized_state_snapshot(
    lat: Lattice,
    pert: Perturbation,
    gamma_c: float | None = None,
    start: np.ndarray | None = None,
) -> np.ndarray:
    """State of a single-perturbation search at its peak time."""
    res = run_search(lat, pert, gamma_c, start=start)
    if start is None:
        start = optimal_start_state(lat, pert)
    decomp = eigendecompose(search_hamiltonian(lat, pert, gamma_c))
    return normalize(evolve(decomp, start, [res.peak_time])[0])


# -- communication ----------------------------------------------------------

def _site_of(pert: Perturbation) -> SiteId:
    if isinstance(pert, ThreeBond):
        return pert.marked
    if isinstance(pert, ExtraSite):
        return pert.attach
    raise TypeError("communication needs ThreeBond or ExtraSite perturbations")


def pair_case(src: Perturbation, tgt: Perturbation) -> str:
    return classify_pair(_site_of(src).key, _site_of(tgt).key)


def farthest_equivalent_site(lat: Lattice, source: SiteId) -> SiteId:
    """Equivalent same-sublattice site at maximal graph distance (lowest index on ties)."""
    dist = np.full(lat.n_sites, -1)
    dist[source.linear] = 0
    frontier = [source.linear]
    while frontier:
        nxt = []
        for i in frontier:
            for j in lat.neighbor_indices(i):
                if dist[j] < 0:
                    dist[j] = dist[i] + 1
                    nxt.append(j)
        frontier = nxt
    best = None
    for s in lat.sites:
        if s.linear != source.linear and classify_pair(source.key, s.key) == EQUIVALENT:
            if best is None or dist[s.linear] > dist[best.linear]:
                best = s
    if best is None:
        raise ValueError("no equivalent site on this lattice")
    return best


@dataclass(frozen=True)
class CommResult:
    trajectory: Trajectory
    case: str
    source_initial: float
    target_peak: float
    target_peak_time: float
    reference_time: float

    def to_dict(self, config: dict | None = None) -> dict:
        return {
            "case": self.case,
            "source_initial": self.source_initial,
            "target_peak": self.target_peak,
            "target_peak_time": self.target_peak_time,
            "reference_time": self.reference_time,
            "config": config or {},
        }


def _comm_groups(lat: Lattice, src: Perturbation, tgt: Perturbation) -> list[tuple[str, list[int]]]:
    if isinstance(src, ThreeBond):
        return [("source", list(lat.neighbor_indices(src.marked.linear))),
                ("target", list(lat.neighbor_indices(tgt.marked.linear)))]
    return [("source", [lat.n_sites]), ("target", [lat.n_sites + 1])]


def run_communication(
    lat: Lattice,
    src: Perturbation,
    tgt: Perturbation,
    t_max: float | None = None,
    n_steps: int = DEFAULT_STEPS,
    start: np.ndarray | None = None,
) -> CommResult:
    """Transfer from the source region to the target region under both perturbations.

    The default start is the peak state of a search with the source alone.
    """
    h = communication_hamiltonian(lat, src, tgt)
    decomp = eigendecompose(h)
    if start is None:
        start = _pad(localized_state_snapshot(lat, src), h.shape[0])
    t_ref = transfer_time(lat.n_sites)
    times = np.linspace(0.0, WINDOW_FACTOR * t_ref if t_max is None else t_max, n_steps)
    states = evolve(decomp, start, times)
    traj = Trajectory.from_states(times, states, _comm_groups(lat, src, tgt))
    t_pk, p_pk = traj.peak("target")
    return CommResult(traj, pair_case(src, tgt), float(traj.tracked["source"][0]), p_pk, t_pk, t_ref)
