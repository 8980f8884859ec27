"""Exact diagonalization, torus band structure and gap measurements."""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .lattice import A, B, SHEET, Lattice, build_torus
from .operators import (
    Perturbation,
    SingleBond,
    ThreeBond,
    check_hermitian,
    perturber_probes,
    search_hamiltonian,
)

ZERO_TOL = 1e-9
OMEGA = np.exp(2j * np.pi / 3)


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def residual(self, h: np.ndarray) -> float:
        """``max_a ||H v_a - E_a v_a||``."""
        r = h @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return float(np.max(np.linalg.norm(r, axis=0)))

    def zero_modes(self, tol: float = ZERO_TOL) -> np.ndarray:
        return np.flatnonzero(np.abs(self.eigenvalues) < tol)


def _fix_phases(vecs: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    # first component with |v_j| > tol becomes real positive
    first = np.argmax(np.abs(vecs) > tol, axis=0)
    lead = vecs[first, np.arange(vecs.shape[1])]
    return vecs * (np.abs(lead) / lead)


def eigendecompose(h: np.ndarray, hermitian_tol: float = 1e-10) -> SpectralDecomposition:
    """Full eigendecomposition with ascending eigenvalues and fixed phases.

    Real symmetric input yields real eigenvectors.
    """
    check_hermitian(h, hermitian_tol)
    vals, vecs = np.linalg.eigh(h)
    if not np.all(np.isfinite(vals)):
        raise np.linalg.LinAlgError("eigensolver returned non-finite eigenvalues")
    return SpectralDecomposition(vals, _fix_phases(vecs))


# -- torus band structure ---------------------------------------------------

@dataclass(frozen=True)
class MomentumPoint:
    k_x: float
    k_y: float
    p: int | None = None
    q: int | None = None
    m: int | None = None
    n: int | None = None

    @classmethod
    def from_labels(cls, p: int, q: int, m: int, n: int) -> "MomentumPoint":
        kx = 2 * np.pi * p / m
        ky = (4 * np.pi * q / n - kx) / np.sqrt(3)
        return cls(kx, ky, p, q, m, n)

    @property
    def is_dirac(self) -> bool:
        """Exact integer test; only available for labelled points."""
        if self.p is None:
            return False
        p, q, m, n = self.p, self.q, self.m, self.n
        return (3 * p == m and 3 * q == 2 * n) or (3 * p == 2 * m and 3 * q == n)


def quantized_momenta(m: int, n: int) -> list[MomentumPoint]:
    if m < 1 or n < 1:
        raise ValueError(f"torus dimensions must be positive, got ({m}, {n})")
    return [MomentumPoint.from_labels(p, q, m, n) for p in range(m) for q in range(n)]


def _radicand(k: MomentumPoint) -> float:
    if k.is_dirac:
        return 0.0
    c = np.cos(k.k_x / 2)
    r = 1 + 4 * c * c + 4 * c * np.cos(np.sqrt(3) * k.k_y / 2)
    if r < 0:
        if r < -1e-12:
            raise ValueError(f"negative dispersion radicand {r:.3e} at {k}")
        r = 0.0
    return float(r)


def dispersion(k: MomentumPoint, eps_d: float = 0.0, v: float = -1.0) -> tuple[float, float]:
    """Band energies ``(eps_plus, eps_minus)`` of ``eps_d + v A`` at ``k``."""
    e = abs(v) * np.sqrt(_radicand(k))
    return eps_d + e, eps_d - e


def torus_band_energies(m: int, n: int, eps_d: float = 0.0, v: float = -1.0) -> np.ndarray:
    """Sorted multiset of both bands over the quantized momenta."""
    out = [e for k in quantized_momenta(m, n) for e in dispersion(k, eps_d, v)]
    return np.sort(np.array(out))


def _require_torus(lat: Lattice, need_dirac: bool = False) -> tuple[int, int]:
    if not lat.is_torus:
        raise ValueError("operation requires a torus lattice")
    m, n = lat.dims
    if need_dirac and (m % 3 or n % 3):
        raise ValueError(f"Dirac states need both torus dimensions divisible by 3, got ({m}, {n})")
    return m, n


def dirac_states(lat: Lattice, sublattice: str = A) -> tuple[np.ndarray, np.ndarray]:
    """Zero-energy torus states ``(K, K')`` supported on one sublattice."""
    _require_torus(lat, need_dirac=True)
    if sublattice not in (A, B):
        raise ValueError(f"unknown sublattice {sublattice!r}")
    sigma = 1 if sublattice == B else 0
    amp = np.sqrt(2.0 / lat.n_sites)
    k = np.zeros(lat.n_sites, dtype=complex)
    kp = np.zeros(lat.n_sites, dtype=complex)
    for s in lat.sites:
        if s.sublattice == sublattice:
            a, b = s.cell_alpha, s.cell_beta
            k[s.linear] = amp * OMEGA ** ((a + 2 * b + 2 * sigma) % 3)
            kp[s.linear] = amp * OMEGA ** ((2 * a + b) % 3)
    return k, kp


def bloch_phase(k: MomentumPoint, band: str) -> complex:
    """``C(k)`` linking B to A amplitudes in the Bloch eigenstate of ``-A``."""
    if k.is_dirac:
        raise ValueError("C(k) is undefined at a Dirac point; use dirac_states")
    t1, t2 = 2 * np.pi * k.p / k.m, 2 * np.pi * k.q / k.n
    f = np.exp(-1j * t1) + np.exp(1j * (t2 - t1)) + 1.0
    if abs(f) < 1e-12:
        raise ValueError("C(k) is undefined at a Dirac point; use dirac_states")
    e = abs(f) if band == "+" else -abs(f)
    return -e / f


def bloch_eigenstate(lat: Lattice, k: MomentumPoint, band: str) -> np.ndarray:
    """Normalized eigenstate of ``-A`` with eigenvalue ``eps_plus`` or ``eps_minus``."""
    m, n = _require_torus(lat)
    if band not in ("+", "-"):
        raise ValueError(f"band must be '+' or '-', got {band!r}")
    if k.p is None or (k.m, k.n) != (m, n):
        raise ValueError("momentum point must carry quantized labels for this torus")
    c = bloch_phase(k, band)
    t1, t2 = 2 * np.pi * k.p / m, 2 * np.pi * k.q / n
    psi = np.empty(lat.n_sites, dtype=complex)
    for s in lat.sites:
        phase = np.exp(1j * (t1 * s.cell_alpha + t2 * s.cell_beta))
        psi[s.linear] = phase if s.sublattice == A else c * phase
    return psi / np.sqrt(2 * m * n)


# -- gamma sweeps and gaps --------------------------------------------------

@dataclass(frozen=True)
class GammaSweep:
    gamma_grid: np.ndarray
    traces: np.ndarray
    tracked_window: tuple[float, float] = (-0.6, 0.6)

    def max_jump(self) -> float:
        """Largest change of any sorted level between adjacent grid points."""
        if len(self.gamma_grid) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.traces, axis=0))))

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["gamma", "level_index", "eigenvalue"])
            for g, trace in zip(self.gamma_grid, self.traces):
                for i, e in enumerate(trace):
                    w.writerow([repr(float(g)), i, repr(float(e))])


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def gamma_sweep(
    lat: Lattice,
    pert: Perturbation,
    gamma_grid: Sequence[float] | None = None,
    workers: int = 1,
    window: tuple[float, float] = (-0.6, 0.6),
) -> GammaSweep:
    """Spectra of the search Hamiltonian over ``gamma_grid`` (default 301 points on [0, 1.5])."""
    grid = np.linspace(0.0, 1.5, 301) if gamma_grid is None else np.asarray(gamma_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("gamma grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("gamma grid must be strictly increasing")

    def levels(g):
        try:
            return np.linalg.eigvalsh(search_hamiltonian(lat, pert, g))
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(f"eigensolver failed at gamma={g}: {exc}") from exc

    traces = np.array(_map(levels, list(grid), workers))
    return GammaSweep(grid, traces, window)


def crossing_levels(
    decomp: SpectralDecomposition,
    probes: np.ndarray,
    zero_tol: float = ZERO_TOL,
    weight_tol: float = 1e-8,
) -> tuple[float, float]:
    """Perturbed levels ``(E_minus, E_plus)`` bracketing zero energy.

    Exact zero modes are skipped unless the zero eigenspace carries weight of
    the perturber probes, in which case the levels cross and ``(0, 0)`` is
    returned. The zero eigenspace is handled as a whole so the answer does not
    depend on the basis LAPACK picks inside it.
    """
    vals, vecs = decomp.eigenvalues, decomp.eigenvectors
    zero = np.abs(vals) < zero_tol
    if zero.any():
        w = np.linalg.norm(vecs[:, zero].conj().T @ probes) ** 2
        if w > weight_tol:
            return 0.0, 0.0
    pos = vals[(vals >= zero_tol)]
    neg = vals[(vals <= -zero_tol)]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("no nonzero eigenvalue pair around zero energy")
    return float(neg.max()), float(pos.min())


def dominant_perturber_levels(
    decomp: SpectralDecomposition,
    probes: np.ndarray,
    zero_tol: float = ZERO_TOL,
) -> tuple[float, float]:
    """Nonzero levels ``(E_minus, E_plus)`` carrying the most probe weight on each side of zero.

    Used where the levels adjacent to zero cross exactly, so the pair that
    actually couples the perturber to the bulk must be picked by weight.
    """
    vals, vecs = decomp.eigenvalues, decomp.eigenvectors
    w = np.sum(np.abs(vecs.conj().T @ probes) ** 2, axis=1)
    pos = np.flatnonzero(vals >= zero_tol)
    neg = np.flatnonzero(vals <= -zero_tol)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("no nonzero eigenvalue pair around zero energy")
    return float(vals[neg[np.argmax(w[neg])]]), float(vals[pos[np.argmax(w[pos])]])


def avoided_crossing_gap(
    lat: Lattice,
    pert: Perturbation,
    gamma_c: float | None = None,
    zero_tol: float = ZERO_TOL,
) -> float:
    """Gap ``E_plus - E_minus`` of the search Hamiltonian at ``gamma_c``."""
    h = search_hamiltonian(lat, pert, gamma_c)
    em, ep = crossing_levels(eigendecompose(h), perturber_probes(lat, pert), zero_tol)
    return ep - em


@dataclass(frozen=True)
class GapScalingResult:
    sizes: np.ndarray
    gaps: np.ndarray
    c1: float
    c2: float
    residual1: float
    residual2: float

    @property
    def preferred(self) -> str:
        return "c2/sqrt(N ln N)" if self.residual2 < self.residual1 else "c1/sqrt(N)"

    def to_dict(self) -> dict:
        return {
            "sizes": [int(x) for x in self.sizes],
            "gaps": [float(x) for x in self.gaps],
            "c1": self.c1,
            "c2": self.c2,
            "residual1": self.residual1,
            "residual2": self.residual2,
            "preferred": self.preferred,
        }

    def to_csv(self, path: str | Path) -> None:
        n = self.sizes.astype(float)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["N", "gap", "fit1", "fit2"])
            for ni, g in zip(n, self.gaps):
                w.writerow([int(ni), repr(float(g)), repr(self.c1 / np.sqrt(ni)),
                            repr(self.c2 / np.sqrt(ni * np.log(ni)))])


def fit_gap_models(sizes: Sequence[int], gaps: Sequence[float]) -> GapScalingResult:
    """One-parameter least squares of ``gaps`` against ``1/sqrt(N)`` and ``1/sqrt(N ln N)``.

    Residuals are sums of squared deviations.
    """
    n = np.asarray(sizes, dtype=float)
    y = np.asarray(gaps, dtype=float)
    if n.size < 2 or n.size != y.size:
        raise ValueError("need matching size and gap lists with at least two entries")
    if np.any(y <= 0):
        raise ValueError("gaps must be positive")
    out = []
    for f in (1 / np.sqrt(n), 1 / np.sqrt(n * np.log(n))):
        c = float(f @ y / (f @ f))
        out += [c, float(np.sum((y - c * f) ** 2))]
    c1, r1, c2, r2 = out
    return GapScalingResult(np.asarray(sizes, dtype=int), y, c1, c2, r1, r2)


def default_perturbation(lat: Lattice, kind: str = "three_bond") -> Perturbation:
    if kind == "three_bond":
        return ThreeBond(lat.site(0, 0, A))
    if kind == "single_bond":
        return SingleBond((0, 0))
    raise ValueError(f"gap scaling supports three_bond or single_bond, got {kind!r}")


def gap_scaling_fit(sizes: Sequence[tuple[int, int]], kind: str = "three_bond", workers: int = 1) -> GapScalingResult:
    """Gap at the critical coupling on each torus, then fit both scaling laws."""
    sizes = [tuple(s) for s in sizes]
    if len(sizes) < 4:
        raise ValueError(f"gap scaling needs at least 4 sizes, got {len(sizes)}")
    for m, n in sizes:
        if m % 3 or n % 3:
            raise ValueError(f"torus ({m}, {n}) has no Dirac points; use multiples of 3")

    def gap(mn):
        lat = build_torus(*mn)
        return avoided_crossing_gap(lat, default_perturbation(lat, kind))

    gaps = _map(gap, sizes, workers)
    return fit_gap_models([2 * m * n for m, n in sizes], gaps)


# -- finite sheets ------------------------------------------------------------

def sheet_edge_sites(lat: Lattice, rows: int = 1) -> np.ndarray:
    """Sites in the outermost ``rows`` dimer rows on the bearded/zigzag sides."""
    if lat.boundary.variant != SHEET:
        raise ValueError("edge sites are defined for sheet lattices only")
    n_y = lat.dims[1]
    return np.array([s.linear for s in lat.sites if s.cell_beta < rows or s.cell_beta >= n_y - rows], dtype=int)


def edge_weights(decomp: SpectralDecomposition, lat: Lattice, rows: int = 1) -> np.ndarray:
    idx = sheet_edge_sites(lat, rows)
    return np.sum(np.abs(decomp.eigenvectors[idx, :]) ** 2, axis=0)


def edge_state_detection(
    decomp: SpectralDecomposition,
    lat: Lattice,
    energy_window: float = 0.2,
    boundary_weight_threshold: float = 0.5,
    rows: int = 1,
) -> list[int]:
    """Indices of near-zero eigenstates concentrated on the sheet edges."""
    w = edge_weights(decomp, lat, rows)
    near = np.abs(decomp.eigenvalues) < energy_window
    return [int(i) for i in np.flatnonzero(near & (w > boundary_weight_threshold))]


def first_delocalized_state(
    decomp: SpectralDecomposition,
    lat: Lattice,
    energy_window: float = 0.2,
    boundary_weight_threshold: float = 0.5,
    zero_tol: float = ZERO_TOL,
) -> int:
    """Non-edge eigenstate with the smallest nonzero ``|E|`` (positive on ties)."""
    edge = set(edge_state_detection(decomp, lat, energy_window, boundary_weight_threshold))
    vals = decomp.eigenvalues
    cands = [i for i in range(len(vals)) if i not in edge and abs(vals[i]) >= zero_tol]
    if not cands:
        raise ValueError("no delocalized eigenstate found")
    return min(cands, key=lambda i: (round(abs(vals[i]), 12), -vals[i]))
