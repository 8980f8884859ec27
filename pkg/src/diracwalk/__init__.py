"""Continuous-time quantum walk search on honeycomb lattices."""

from .lattice import (
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
from .operators import (
    ExtraSite,
    SingleBond,
    ThreeBond,
    communication_hamiltonian,
    search_hamiltonian,
    walk_hamiltonian,
)
from .spectral import SpectralDecomposition, eigendecompose

__all__ = [
    "A",
    "B",
    "BoundarySpec",
    "ExtraSite",
    "Lattice",
    "SingleBond",
    "SiteId",
    "SpectralDecomposition",
    "ThreeBond",
    "adjacency_matrix",
    "build",
    "build_armchair_nanotube",
    "build_sheet",
    "build_torus",
    "communication_hamiltonian",
    "eigendecompose",
    "neighbors",
    "search_hamiltonian",
    "walk_hamiltonian",
]
