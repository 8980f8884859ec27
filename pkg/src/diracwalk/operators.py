"""Walk, search and communication Hamiltonians.

All operators are dense real symmetric ``numpy`` arrays (every Hamiltonian
built here has real entries). Three ways of marking a site are supported:

* :class:`ThreeBond` -- every bond of the marked site gets ``+1`` added, so at
  ``gamma = 1`` the site decouples from ``-gamma * A``.
* :class:`SingleBond` -- the intra-cell A-B bond of one cell gets ``+1``.
* :class:`ExtraSite` -- an additional site coupled with ``-1`` to one lattice
  site, with on-site energy ``gamma``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lattice import A, B, Lattice, SiteId, adjacency_matrix

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class ThreeBond:
    marked: SiteId
    kind = "three_bond"
    critical_gamma = 1.0


@dataclass(frozen=True)
class SingleBond:
    cell: tuple[int, int]
    kind = "single_bond"
    critical_gamma = 1.0 / 3.0


@dataclass(frozen=True)
class ExtraSite:
    attach: SiteId
    kind = "extra_site"
    critical_gamma = 0.0


Perturbation = ThreeBond | SingleBond | ExtraSite


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> float:
    """Return ``max |H - H^dagger|``; raise if it exceeds ``tol``."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"operator must be square, got shape {h.shape}")
    err = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if err > tol:
        raise ValueError(f"operator is not Hermitian (residual {err:.3e} > {tol:.1e})")
    return err


def walk_hamiltonian(lat: Lattice, eps_d: float = 0.0, v: float = -1.0) -> np.ndarray:
    """``eps_d * I + v * A``; the defaults give ``H = -A``."""
    return eps_d * np.eye(lat.n_sites) + v * adjacency_matrix(lat)


def _check_site(lat: Lattice, s: SiteId) -> int:
    if not (0 <= s.linear < lat.n_sites) or lat.sites[s.linear] != s:
        raise KeyError(f"site {s!r} is not part of this lattice")
    return s.linear


def neighbor_state(lat: Lattice, s: SiteId) -> np.ndarray:
    """Uniform normalized superposition over the neighbours of ``s``."""
    nb = list(lat.neighbor_indices(_check_site(lat, s)))
    ell = np.zeros(lat.n_sites)
    ell[nb] = 1.0 / np.sqrt(len(nb))
    return ell


def three_bond_perturbation(lat: Lattice, marked: SiteId) -> np.ndarray:
    """``sqrt(d) (|ell><o| + |o><ell|)``: ``+1`` on each bond of the marked site.

    ``d`` is the actual valence (3 on a torus, 1-3 near open edges).
    """
    o = _check_site(lat, marked)
    nb = list(lat.neighbor_indices(o))
    if not nb:
        raise ValueError(f"marked site {marked.label} has no neighbours")
    w = np.zeros((lat.n_sites, lat.n_sites))
    w[o, nb] = 1.0
    w[nb, o] = 1.0
    return w


def single_bond_sites(lat: Lattice, cell: tuple[int, int]) -> tuple[int, int]:
    a = lat.site(*cell, A).linear
    b = lat.site(*cell, B).linear
    if b not in lat.neighbor_indices(a):
        raise ValueError(f"cell {cell} has no intra-cell A-B bond")
    return a, b


def single_bond_perturbation(lat: Lattice, cell: tuple[int, int]) -> np.ndarray:
    a, b = single_bond_sites(lat, cell)
    w = np.zeros((lat.n_sites, lat.n_sites))
    w[a, b] = w[b, a] = 1.0
    return w


def extra_site_perturbation(lat: Lattice, attach: SiteId, gamma: float) -> np.ndarray:
    """``(N+1) x (N+1)`` matrix; the extra site is the last basis state."""
    o = _check_site(lat, attach)
    n = lat.n_sites
    w = np.zeros((n + 1, n + 1))
    w[o, n] = w[n, o] = -1.0
    w[n, n] = gamma
    return w


def _pad(h: np.ndarray, dim: int) -> np.ndarray:
    if h.shape[0] == dim:
        return h
    out = np.zeros((dim, dim), dtype=h.dtype)
    out[: h.shape[0], : h.shape[0]] = h
    return out


def perturbation_matrix(lat: Lattice, pert: Perturbation, gamma: float = 0.0) -> np.ndarray:
    if isinstance(pert, ThreeBond):
        return three_bond_perturbation(lat, pert.marked)
    if isinstance(pert, SingleBond):
        return single_bond_perturbation(lat, pert.cell)
    if isinstance(pert, ExtraSite):
        return extra_site_perturbation(lat, pert.attach, gamma)
    raise TypeError(f"unsupported perturbation {pert!r}")


def search_hamiltonian(lat: Lattice, pert: Perturbation, gamma: float | None = None) -> np.ndarray:
    """``-gamma A + W`` for bond perturbations, ``-A + W(gamma)`` for an extra site.

    ``gamma`` defaults to the critical value of the perturbation.
    """
    if gamma is None:
        gamma = pert.critical_gamma
    if isinstance(pert, ExtraSite):
        w = extra_site_perturbation(lat, pert.attach, gamma)
        return _pad(-adjacency_matrix(lat), w.shape[0]) + w
    return -gamma * adjacency_matrix(lat) + perturbation_matrix(lat, pert)


def communication_hamiltonian(lat: Lattice, source: Perturbation, target: Perturbation) -> np.ndarray:
    """``-A + W_s + W_t`` (three-bond) or ``-A + W_s(0) + W_t(0)`` (extra sites).

    Extra sites are appended in the order source, target.
    """
    if type(source) is not type(target) or not isinstance(source, (ThreeBond, ExtraSite)):
        raise TypeError("source and target must both be ThreeBond or both ExtraSite")
    n = lat.n_sites
    h = -adjacency_matrix(lat)
    if isinstance(source, ThreeBond):
        s, t = _check_site(lat, source.marked), _check_site(lat, target.marked)
        if s == t:
            raise ValueError("source and target coincide")
        if ({s} | set(lat.neighbor_indices(s))) & ({t} | set(lat.neighbor_indices(t))):
            raise ValueError("source and target neighbourhoods overlap")
        return h + three_bond_perturbation(lat, source.marked) + three_bond_perturbation(lat, target.marked)
    s, t = _check_site(lat, source.attach), _check_site(lat, target.attach)
    if s == t:
        raise ValueError("source and target coincide")
    h = _pad(h, n + 2)
    h[s, n] = h[n, s] = -1.0
    h[t, n + 1] = h[n + 1, t] = -1.0
    return h


def tracked_sites(lat: Lattice, pert: Perturbation) -> list[tuple[str, int]]:
    """(label, index) pairs whose probabilities signal a successful search."""
    if isinstance(pert, ThreeBond):
        o = _check_site(lat, pert.marked)
        return [(lat.sites[j].label, j) for j in lat.neighbor_indices(o)]
    if isinstance(pert, SingleBond):
        a, b = single_bond_sites(lat, pert.cell)
        idx = [a, b] + [j for j in lat.neighbor_indices(a) if j != b] + [j for j in lat.neighbor_indices(b) if j != a]
        return [(lat.sites[j].label, j) for j in idx]
    if isinstance(pert, ExtraSite):
        return [("extra", lat.n_sites)]
    raise TypeError(f"unsupported perturbation {pert!r}")


def perturber_probes(lat: Lattice, pert: Perturbation) -> np.ndarray:
    """Columns spanning the local states the perturbation couples to the lattice.

    Used to tell perturber-carrying levels from spectator zero modes.
    """
    if isinstance(pert, ThreeBond):
        return neighbor_state(lat, pert.marked)[:, None]
    if isinstance(pert, SingleBond):
        a, b = single_bond_sites(lat, pert.cell)
        probes = np.zeros((lat.n_sites, 2))
        probes[a, 0] = probes[b, 1] = 1.0
        return probes
    if isinstance(pert, ExtraSite):
        probe = np.zeros((lat.n_sites + 1, 1))
        probe[-1, 0] = 1.0
        return probe
    raise TypeError(f"unsupported perturbation {pert!r}")


def save_operator_csv(h: np.ndarray, path: str | Path) -> None:
    """Row-major dense dump; each row holds ``re, im`` pairs."""
    h = np.asarray(h, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([h.shape[0], h.shape[1]])
        for row in h:
            w.writerow([repr(float(x)) for z in row for x in (z.real, z.imag)])


def load_operator_csv(path: str | Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    nr, nc = (int(x) for x in rows[0])
    vals = np.array([[float(x) for x in r] for r in rows[1:]])
    if vals.shape != (nr, 2 * nc):
        raise ValueError("operator file is truncated or malformed")
    return vals[:, 0::2] + 1j * vals[:, 1::2]
