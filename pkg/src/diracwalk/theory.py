"""Secular equation for the three-bond search on a torus and its lattice sums.

With the marked site decoupled (``gamma = 1``), every perturbed level ``E``
that is not also an unperturbed level solves ``F(E) = 0`` with::

    F(E) = sqrt(3)/N * sum_k [1/(E - eps_k) + 1/(E + eps_k)]

summed over all quantized momenta (``eps_k >= 0`` is the upper band). Near
zero the Dirac points contribute the pole ``4 sqrt(3)/(N E)`` and the rest
expands in the moments::

    I_n = sqrt(3)/N * sum_{k not Dirac} [eps_k^-n + (-eps_k)^-n]

Close to a Dirac point ``N eps^2`` tends to a quadratic form in the
momentum offsets, so ``I_2k / N^(k-1)`` approaches Epstein zeta values and
``I_2`` grows like ``ln N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, optimize

from .spectral import SpectralDecomposition, dispersion, quantized_momenta

SQRT3 = np.sqrt(3.0)
POLE_TOL = 1e-12
BRACKET_OFFSET = 2e-12


@dataclass(frozen=True)
class UnperturbedSpectrum:
    eps: np.ndarray
    dirac: np.ndarray
    n_sites: int
    dims: tuple[int, int]

    @classmethod
    def from_torus(cls, m: int, n: int) -> "UnperturbedSpectrum":
        ks = quantized_momenta(m, n)
        eps = np.array([dispersion(k)[0] for k in ks])
        return cls(eps, np.array([k.is_dirac for k in ks]), 2 * m * n, (m, n))

    @property
    def dirac_count(self) -> int:
        return int(self.dirac.sum())

    @property
    def bulk(self) -> np.ndarray:
        return self.eps[~self.dirac]

    @property
    def eps_min(self) -> float:
        """Smallest positive non-Dirac energy."""
        return float(self.bulk.min())


def f_of_e(e: float, spec: UnperturbedSpectrum) -> float:
    d = np.concatenate([e - spec.eps, e + spec.eps])
    if np.min(np.abs(d)) < POLE_TOL:
        raise ValueError(f"E = {e} lies on an unperturbed level")
    return float(SQRT3 / spec.n_sites * np.sum(1.0 / d))


def f_prime(e: float, spec: UnperturbedSpectrum) -> float:
    d = np.concatenate([e - spec.eps, e + spec.eps])
    if np.min(np.abs(d)) < POLE_TOL:
        raise ValueError(f"E = {e} lies on an unperturbed level")
    return float(-SQRT3 / spec.n_sites * np.sum(1.0 / d**2))


def solve_perturbed_energy(spec: UnperturbedSpectrum, xtol: float = 1e-15) -> float:
    """Root of ``F`` in ``(0, eps_min)``: the perturbed level just above zero."""
    if spec.dirac_count == 0:
        raise ValueError("no Dirac points; F has no pole at zero energy")
    lo, hi = BRACKET_OFFSET, spec.eps_min - BRACKET_OFFSET
    flo, fhi = f_of_e(lo, spec), f_of_e(hi, spec)
    if np.sign(flo) == np.sign(fhi):
        raise ValueError("F does not change sign between zero and the first bulk level")
    return float(optimize.brentq(f_of_e, lo, hi, args=(spec,), xtol=xtol, rtol=4 * np.finfo(float).eps))


def i_sum(order: int, spec: UnperturbedSpectrum) -> float:
    if order < 1:
        raise ValueError("order must be >= 1")
    e = spec.bulk
    return float(SQRT3 / spec.n_sites * np.sum(e ** (-order) + (-e) ** (-order)))


def e_plus_estimate(n_sites: int, i2: float) -> tuple[float, float]:
    """Truncated-expansion estimates ``(E_plus, F'(E_plus))``."""
    if i2 <= 0:
        raise ValueError("I2 must be positive")
    return float(np.sqrt(4 * SQRT3 / (n_sites * i2))), float(-2 * i2)


def success_amplitude(i2: float, e_plus: float, t: float) -> float:
    """Predicted neighbour amplitude ``3^(-1/4) I2^(-1/2) |sin(E_plus t)|``."""
    return float(3 ** -0.25 / np.sqrt(i2) * abs(np.sin(e_plus * t)))


# -- Epstein zeta -----------------------------------------------------------

@dataclass(frozen=True)
class EpsteinForm:
    s: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        if s.shape != (2, 2) or not np.allclose(s, s.T):
            raise ValueError("Epstein form must be a symmetric 2x2 matrix")
        if s[0, 0] <= 0 or np.linalg.det(s) <= 0:
            raise ValueError("Epstein form must be positive definite")
        object.__setattr__(self, "s", s)

    def __call__(self, p, q):
        s = self.s
        return s[0, 0] * p * p + 2 * s[0, 1] * p * q + s[1, 1] * q * q

    def scaled(self, c: float) -> "EpsteinForm":
        return EpsteinForm(c * self.s)


DIRAC_FORM = EpsteinForm(4 * np.pi**2 * np.array([[2.0, -1.0], [-1.0, 2.0]]))


@dataclass(frozen=True)
class EpsteinValue:
    value: float
    partial: float
    tail: float
    tail_bound: float
    cutoff: int


def _square_tail(form: EpsteinForm, x: float, half: float) -> float:
    # 1/2 * integral of Q^-x outside the square [-half, half]^2 in polar form
    s = form.s

    def integrand(t):
        c, si = np.cos(t), np.sin(t)
        qt = s[0, 0] * c * c + 2 * s[0, 1] * c * si + s[1, 1] * si * si
        r = half / max(abs(c), abs(si))
        return qt ** (-x) * r ** (2 - 2 * x) / (2 * x - 2)

    pts = [k * np.pi / 4 for k in range(1, 8)]
    val, _ = integrate.quad(integrand, 0, 2 * np.pi, points=pts, limit=200, epsabs=0, epsrel=1e-12)
    return 0.5 * val


def epstein_zeta_report(form: EpsteinForm, x: float, cutoff: int = 500) -> EpsteinValue:
    """Partial sum over ``[-cutoff, cutoff]^2`` plus a continuum tail estimate.

    ``tail_bound`` is the size of the tail of one extra shell, a conservative
    scale for the error of the tail estimate.
    """
    if x <= 1:
        raise ValueError("Epstein zeta diverges for x <= 1")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    r = np.arange(-cutoff, cutoff + 1, dtype=float)
    p, q = np.meshgrid(r, r, indexing="ij")
    vals = form(p, q)
    vals[cutoff, cutoff] = np.inf
    partial = 0.5 * float(np.sum(vals ** (-x)))
    tail = _square_tail(form, x, cutoff + 0.5)
    bound = abs(_square_tail(form, x, cutoff - 0.5) - tail)
    return EpsteinValue(partial + tail, partial, tail, bound, cutoff)


def epstein_zeta(form: EpsteinForm, x: float, cutoff: int = 500) -> float:
    return epstein_zeta_report(form, x, cutoff).value


# -- logarithmic growth of I2 ------------------------------------------------

def centered_offsets(m: int) -> np.ndarray:
    """``m`` consecutive integers centred on zero (one extra on the negative side when ``m`` is even)."""
    return np.arange(-(m // 2), m - m // 2)


def restricted_lattice_sum(m: int, form: EpsteinForm = DIRAC_FORM, half_width: int | None = None) -> float:
    """``sum 1/Q(p, q)`` over the index rectangle of an ``m x m`` torus re-centred on a Dirac point.

    With ``half_width`` the sum is restricted to the square ``|p|, |q| <= half_width``.
    """
    r = centered_offsets(m).astype(float)
    if half_width is not None:
        if not 0 < half_width <= min(-r[0], r[-1]):
            raise ValueError("square must lie inside the index rectangle")
        r = r[np.abs(r) <= half_width]
    p, q = np.meshgrid(r, r, indexing="ij")
    vals = form(p, q)
    vals[(p == 0) & (q == 0)] = np.inf
    return float(np.sum(1.0 / vals))


@dataclass(frozen=True)
class LogBounds:
    sizes: tuple[int, ...]
    n_sites: np.ndarray
    sums: np.ndarray
    square_sums: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        return self.sums / np.log(self.n_sites)

    @property
    def c1(self) -> float:
        return float(self.ratios.min())

    @property
    def c2(self) -> float:
        return float(self.ratios.max())


def log_bound_table(sizes: Sequence[int], form: EpsteinForm = DIRAC_FORM) -> LogBounds:
    """Full-rectangle and inscribed-square sums for square tori ``m x m``."""
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 4:
        raise ValueError(f"need at least 4 sizes, got {len(sizes)}")
    for m in sizes:
        if m % 3:
            raise ValueError(f"size {m} is not a multiple of 3")
    sums = np.array([restricted_lattice_sum(m, form) for m in sizes])
    squares = np.array([restricted_lattice_sum(m, form, (m - 1) // 2) for m in sizes])
    return LogBounds(sizes, np.array([2 * m * m for m in sizes], dtype=float), sums, squares)


def i2_log_bounds(sizes: Sequence[int], form: EpsteinForm = DIRAC_FORM) -> tuple[float, float]:
    """Empirical ``(min, max)`` of the restricted sum divided by ``ln N``."""
    t = log_bound_table(sizes, form)
    return t.c1, t.c2


# -- overlap of the start state with the perturbed pair -----------------------

@dataclass(frozen=True)
class OverlapReport:
    e_plus: float
    direct: float
    formula: float
    marked: float


def plus_state_index(decomp: SpectralDecomposition, zero_tol: float = 1e-9, degeneracy_tol: float = 1e-9) -> int:
    vals = decomp.eigenvalues
    pos = np.flatnonzero(vals >= zero_tol)
    if pos.size == 0:
        raise ValueError("no positive eigenvalue")
    i = int(pos[0])
    if pos.size > 1 and vals[pos[1]] - vals[i] < degeneracy_tol:
        raise ValueError("lowest positive level is degenerate; eigenvector is ambiguous")
    return i


def overlap_start_perturbed(
    decomp: SpectralDecomposition,
    start: np.ndarray,
    marked_index: int,
    spec: UnperturbedSpectrum,
) -> OverlapReport:
    """``|<start|psi_plus>|`` directly and from ``(1/E) sqrt(sqrt3/|F'(E)|) |<start|o>|``."""
    i = plus_state_index(decomp)
    e = float(decomp.eigenvalues[i])
    psi = decomp.eigenvectors[:, i]
    direct = abs(np.vdot(start, psi))
    formula = np.sqrt(SQRT3 / abs(f_prime(e, spec))) / e * abs(start_marked_overlap(spec, start, marked_index))
    return OverlapReport(e, float(direct), float(formula), float(abs(psi[marked_index])))


def start_marked_overlap(spec: UnperturbedSpectrum, start: np.ndarray, marked_index: int) -> complex:
    """``<start|o>`` for the unperturbed lattice (start lives in the Dirac subspace)."""
    return complex(np.conj(start[marked_index]))
