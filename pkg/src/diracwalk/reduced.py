"""Few-state models of search and state transfer near the Dirac energy.

On a torus with both dimensions divisible by 3, a marked site ``o`` sees the
two Dirac states of its own sublattice with phases ``exp(i mu_o)`` and
``exp(i nu_o)``::

    A site (a, b):  mu = 2pi/3 (a + 2b),      nu = 2pi/3 (2a + b)
    B site (a, b):  mu = 2pi/3 (a + 2b + 2),  nu = 2pi/3 (2a + b)

Two same-sublattice sites are *equivalent* when they share ``mu mod 2pi``
(equivalently ``a + 2b mod 3``); only then do they share a start state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import A, B, Lattice

EQUIVALENT = "equivalent"
NONEQUIVALENT = "nonequivalent"
CROSS_SUBLATTICE = "cross_sublattice"


def dirac_phases(alpha: int, beta: int, sublattice: str = A) -> tuple[float, float]:
    """``(mu, nu)`` reduced to ``[0, 2pi)``."""
    if sublattice not in (A, B):
        raise ValueError(f"unknown sublattice {sublattice!r}")
    shift = 2 if sublattice == B else 0
    mu = 2 * np.pi / 3 * ((alpha + 2 * beta + shift) % 3)
    nu = 2 * np.pi / 3 * ((2 * alpha + beta) % 3)
    return mu, nu


def phase_class(alpha: int, beta: int) -> int:
    return (alpha + 2 * beta) % 3


def classify_pair(src: tuple[int, int, str], tgt: tuple[int, int, str]) -> str:
    """Relation between two marked sites given as ``(alpha, beta, sublattice)``."""
    if src[2] != tgt[2]:
        return CROSS_SUBLATTICE
    if phase_class(src[0], src[1]) == phase_class(tgt[0], tgt[1]):
        return EQUIVALENT
    return NONEQUIVALENT


def _check_n(n_sites: int) -> None:
    if n_sites <= 0 or n_sites % 18:
        raise ValueError(f"N = {n_sites} is not 2mn with m, n multiples of 3")


@dataclass(frozen=True)
class ReducedModel:
    basis_labels: tuple[str, ...]
    matrix: np.ndarray
    prefactor: float
    kind: str

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def evolve(self, psi0: np.ndarray, t: float) -> np.ndarray:
        vals, vecs = np.linalg.eigh(self.matrix)
        return vecs @ (np.exp(-1j * vals * t) * (vecs.conj().T @ psi0))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "basis": list(self.basis_labels),
            "prefactor": self.prefactor,
            "matrix_re": self.matrix.real.tolist(),
            "matrix_im": self.matrix.imag.tolist(),
            "eigenvalues": self.eigenvalues().tolist(),
        }


def _three_state(prefactor: float, mu: float, nu: float, labels, kind) -> ReducedModel:
    h = np.zeros((3, 3), dtype=complex)
    h[0, 2], h[1, 2] = np.exp(-1j * mu), np.exp(-1j * nu)
    h[2, :2] = h[:2, 2].conj()
    return ReducedModel(tuple(labels), prefactor * h, prefactor, kind)


def reduced_three_bond(n_sites: int, alpha_o: int = 0, beta_o: int = 0, sublattice: str = A) -> ReducedModel:
    """``sqrt(6/N)`` coupling of ``(K, K')`` to the neighbour state; levels ``0, +-2 sqrt(3/N)``."""
    _check_n(n_sites)
    mu, nu = dirac_phases(alpha_o, beta_o, sublattice)
    return _three_state(np.sqrt(6.0 / n_sites), mu, nu, ("K", "K'", "ell"), "three_bond")


def reduced_extra_site(n_sites: int, alpha_o: int = 0, beta_o: int = 0, sublattice: str = A) -> ReducedModel:
    """Same phase structure with prefactor ``sqrt(2/N)``; levels ``0, +-2/sqrt(N)``."""
    _check_n(n_sites)
    mu, nu = dirac_phases(alpha_o, beta_o, sublattice)
    return _three_state(np.sqrt(2.0 / n_sites), mu, nu, ("K", "K'", "site"), "extra_site")


def start_vector(model: ReducedModel) -> np.ndarray:
    """Optimal start ``(e^{-i mu} K + e^{-i nu} K')/sqrt(2)`` in the model basis."""
    v = np.zeros(model.matrix.shape[0], dtype=complex)
    v[:2] = model.matrix[:2, 2] / model.prefactor / np.sqrt(2)
    return v


def reduced_search_evolution(model: ReducedModel, t: float) -> tuple[float, float]:
    """``(p_start, p_local)`` after time ``t`` from the optimal start."""
    if model.matrix.shape != (3, 3):
        raise ValueError("search evolution needs a 3-state model")
    s = start_vector(model)
    psi = model.evolve(s, t)
    return float(abs(np.vdot(s, psi)) ** 2), float(abs(psi[2]) ** 2)


def search_time(model: ReducedModel) -> float:
    """First time the local state is fully populated: ``pi / (2 E_plus)``."""
    return float(np.pi / (2 * model.eigenvalues().max()))


def reduced_communication(
    n_sites: int,
    src: tuple[int, int],
    tgt: tuple[int, int],
    sublattice: str = A,
    tgt_sublattice: str | None = None,
) -> ReducedModel:
    """Basis ``(K, K', ell_s, ell_t)``, off-diagonal blocks ``sqrt(6/N) C``."""
    _check_n(n_sites)
    if tgt_sublattice is not None and tgt_sublattice != sublattice:
        raise ValueError("no reduced model for a cross-sublattice pair")
    mu_s, nu_s = dirac_phases(*src, sublattice)
    mu_t, nu_t = dirac_phases(*tgt, sublattice)
    c = np.exp(-1j * np.array([[mu_s, mu_t], [nu_s, nu_t]]))
    pref = np.sqrt(6.0 / n_sites)
    h = np.zeros((4, 4), dtype=complex)
    h[:2, 2:] = c
    h[2:, :2] = c.conj().T
    kind = EQUIVALENT if phase_class(*src) == phase_class(*tgt) else NONEQUIVALENT
    return ReducedModel(("K", "K'", "ell_s", "ell_t"), pref * h, pref, kind)


def reduced_comm_evolution(model: ReducedModel, t: float) -> tuple[float, float]:
    """``(p_source, p_target)`` after time ``t`` from the source neighbour state."""
    if model.matrix.shape != (4, 4):
        raise ValueError("communication evolution needs a 4-state model")
    psi = model.evolve(np.array([0, 0, 1, 0], dtype=complex), t)
    return float(abs(psi[2]) ** 2), float(abs(psi[3]) ** 2)


def transfer_time(n_sites: int) -> float:
    """Full transfer time ``(pi/2) sqrt(N/6)`` between equivalent sites."""
    return float(np.pi / 2 * np.sqrt(n_sites / 6.0))


def embedding_basis(lat: Lattice, alpha_o: int, beta_o: int, sublattice: str = A) -> np.ndarray:
    """Columns ``(K, K', ell)`` of the three-state model embedded in the lattice."""
    from .operators import neighbor_state
    from .spectral import dirac_states

    k, kp = dirac_states(lat, sublattice)
    ell = neighbor_state(lat, lat.site(alpha_o, beta_o, sublattice))
    return np.column_stack([k, kp, ell.astype(complex)])
