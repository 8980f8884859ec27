"""Honeycomb lattices on a torus, an armchair nanotube and a finite sheet.

Every lattice is a list of :class:`SiteId` plus an undirected edge list.
Sites are ordered sublattice-major (all A sites first), then by cell
``(beta, alpha)`` in row-major order, so ``site.linear`` is a stable dense
index for every matrix and file produced downstream.

Torus ``(m, n)``::

    A(a, b) -- B(a, b), B(a-1, b), B(a-1, b+1)      (indices mod m, n)

Armchair nanotube ``(n_x, n_cells)``: ``alpha`` runs along the open tube
axis (``0 .. n_x-1``), ``beta`` is the cell index around the periodic
circumference. Each cell holds two zigzag chains::

    A(m, l) -- B(m-1, l), B(m+1, l)          (open ends)
    A(m, l) -- B(m, l)        m even
    A(m, l) -- B(m, l+1)      m odd         (l mod n_cells)

so ``N = 2 * n_x * n_cells`` and an A site with even ``m`` keeps all of its
neighbours inside its own cell.

Finite sheet ``(n_x, n_y)``: rows ``beta = 0 .. n_y-1`` of vertical A-B
dimers, row ``beta`` shifted by half a cell when ``beta`` is odd::

        B   B   B   B          row 1 (shifted)
        |   |   |   |
        A   A   A   A
       / \\ / \\ / \\ /
      B   B   B   B            row 0
      |   |   |   |
      A   A   A   A            <- bearded edge (valence-1 A sites)

    A(i, j) -- B(i, j)
    A(i, j) -- B(i, j-1), B(i+1, j-1)    j odd
    A(i, j) -- B(i, j-1), B(i-1, j-1)    j even, j > 0

The bearded sheet has ``2 * n_x * n_y`` sites and armchair left/right edges.
The zigzag sheet caps the two beards with ``n_x - 1`` extra sites each
(B sites in row ``-1``, A sites in row ``n_y``), each bonded to two
adjacent beard sites, giving ``2 * n_x * n_y + 2 * (n_x - 1)`` sites
(200 and 218 for ``(10, 10)``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

A = "A"
B = "B"
SUBLATTICES = (A, B)

TORUS = "torus"
NANOTUBE = "armchair_nanotube"
SHEET = "sheet"
BEARDED = "bearded"
ZIGZAG = "zigzag"


@dataclass(frozen=True, order=True)
class SiteId:
    linear: int
    cell_alpha: int
    cell_beta: int
    sublattice: str
    extra: bool = False

    @property
    def key(self) -> tuple[int, int, str]:
        return (self.cell_alpha, self.cell_beta, self.sublattice)

    @property
    def label(self) -> str:
        if self.extra:
            return f"site{self.linear}"
        return f"{self.sublattice}({self.cell_alpha},{self.cell_beta})"


@dataclass(frozen=True)
class BoundarySpec:
    variant: str
    dims: tuple[int, int]
    edge: str | None = None

    def to_dict(self) -> dict:
        out = {"variant": self.variant, "dims": list(self.dims)}
        if self.edge is not None:
            out["edge"] = self.edge
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "BoundarySpec":
        return cls(d["variant"], tuple(int(x) for x in d["dims"]), d.get("edge"))


@dataclass(frozen=True)
class Lattice:
    sites: tuple[SiteId, ...]
    edges: tuple[tuple[int, int], ...]
    boundary: BoundarySpec
    _index: dict = field(default=None, repr=False, compare=False)
    _adj: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        index = {s.key: s.linear for s in self.sites}
        adj = [[] for _ in self.sites]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def dims(self) -> tuple[int, int]:
        return self.boundary.dims

    @property
    def is_torus(self) -> bool:
        return self.boundary.variant == TORUS

    def site(self, alpha: int, beta: int, sublattice: str = A) -> SiteId:
        """Look up a site by cell coordinates (wrapped on periodic axes)."""
        if self.boundary.variant == TORUS:
            m, n = self.dims
            alpha, beta = alpha % m, beta % n
        elif self.boundary.variant == NANOTUBE:
            beta = beta % self.dims[1]
        try:
            return self.sites[self._index[(alpha, beta, sublattice)]]
        except KeyError:
            raise KeyError(f"no site {sublattice}({alpha},{beta}) in {self.boundary.variant} lattice") from None

    def neighbor_indices(self, i: int) -> tuple[int, ...]:
        return self._adj[i]

    def valence(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj])

    def sublattice_mask(self, sublattice: str) -> np.ndarray:
        return np.array([s.sublattice == sublattice for s in self.sites])

    def boundary_sites(self, depth: int = 1) -> np.ndarray:
        """Indices within graph distance ``depth - 1`` of an under-coordinated site."""
        frontier = set(np.flatnonzero(self.valence() < 3).tolist())
        seen = set(frontier)
        for _ in range(depth - 1):
            frontier = {j for i in frontier for j in self._adj[i]} - seen
            seen |= frontier
        return np.array(sorted(seen), dtype=int)

    def to_dict(self) -> dict:
        return {
            "boundary": self.boundary.to_dict(),
            "n_sites": self.n_sites,
            "sites": [
                {"linear": s.linear, "alpha": s.cell_alpha, "beta": s.cell_beta,
                 "sublattice": s.sublattice, "extra": s.extra}
                for s in self.sites
            ],
            "edges": [list(e) for e in self.edges],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "Lattice":
        sites = tuple(
            SiteId(s["linear"], s["alpha"], s["beta"], s["sublattice"], s.get("extra", False))
            for s in d["sites"]
        )
        if len(sites) != d["n_sites"]:
            raise ValueError("n_sites does not match the site list")
        return _finish(sites, ((int(i), int(j)) for i, j in d["edges"]), BoundarySpec.from_dict(d["boundary"]))


def neighbors(lat: Lattice, s: SiteId) -> list[SiteId]:
    """Sorted neighbour list of ``s``."""
    if not (0 <= s.linear < lat.n_sites) or lat.sites[s.linear] != s:
        raise KeyError(f"unknown site {s!r}")
    return [lat.sites[j] for j in lat.neighbor_indices(s.linear)]


def _finish(sites, pairs: Iterable[tuple[int, int]], boundary: BoundarySpec) -> Lattice:
    edges = set()
    for i, j in pairs:
        if i == j:
            raise ValueError("self-loop in edge list")
        edges.add((min(i, j), max(i, j)))
    return Lattice(tuple(sites), tuple(sorted(edges)), boundary)


def _enumerate(keys: Iterable[tuple[int, int, str]]) -> tuple[list[SiteId], dict]:
    ordered = sorted(keys, key=lambda k: (SUBLATTICES.index(k[2]), k[1], k[0]))
    sites = [SiteId(i, a, b, s) for i, (a, b, s) in enumerate(ordered)]
    return sites, {s.key: s.linear for s in sites}


def build_torus(m: int, n: int) -> Lattice:
    """Honeycomb torus of ``m x n`` cells (``N = 2mn``)."""
    if m < 1 or n < 1:
        raise ValueError(f"torus dimensions must be positive, got ({m}, {n})")
    sites, idx = _enumerate((a, b, s) for s in SUBLATTICES for b in range(n) for a in range(m))
    pairs = []
    for b in range(n):
        for a in range(m):
            i = idx[(a, b, A)]
            for da, db in ((0, 0), (-1, 0), (-1, 1)):
                pairs.append((i, idx[((a + da) % m, (b + db) % n, B)]))
    return _finish(sites, pairs, BoundarySpec(TORUS, (m, n)))


def build_armchair_nanotube(n_x: int, n_cells: int) -> Lattice:
    """Finite armchair nanotube, ``n_x`` sites along the axis, periodic in cells."""
    if n_x < 2 or n_cells < 1:
        raise ValueError(f"nanotube needs n_x >= 2 and n_cells >= 1, got ({n_x}, {n_cells})")
    sites, idx = _enumerate((a, b, s) for s in SUBLATTICES for b in range(n_cells) for a in range(n_x))
    pairs = []
    for l in range(n_cells):
        for a in range(n_x):
            i = idx[(a, l, A)]
            for da in (-1, 1):
                if 0 <= a + da < n_x:
                    pairs.append((i, idx[(a + da, l, B)]))
            pairs.append((i, idx[(a, l if a % 2 == 0 else (l + 1) % n_cells, B)]))
    return _finish(sites, pairs, BoundarySpec(NANOTUBE, (n_x, n_cells)))


def build_sheet(n_x: int, n_y: int, edge: str = BEARDED) -> Lattice:
    """Open rectangular sheet with armchair sides and bearded or zigzag top/bottom."""
    if n_x < 1 or n_y < 1:
        raise ValueError(f"sheet dimensions must be positive, got ({n_x}, {n_y})")
    edge = edge.lower()
    if edge not in (BEARDED, ZIGZAG):
        raise ValueError(f"edge must be 'bearded' or 'zigzag', got {edge!r}")

    def lower_partners(i, j):
        # B sites in row j-1 bonded to A(i, j)
        return (i, i + 1) if j % 2 else (i, i - 1)

    keys = [(i, j, s) for s in SUBLATTICES for j in range(n_y) for i in range(n_x)]
    bonds = []
    for j in range(n_y):
        for i in range(n_x):
            bonds.append(((i, j, A), (i, j, B)))
            if j > 0:
                bonds += [((i, j, A), (k, j - 1, B)) for k in lower_partners(i, j) if 0 <= k < n_x]
    if edge == ZIGZAG:
        # bottom cap: B(k, -1) under two beards A(k, 0), A(k+1, 0) (row 0 is even)
        for k in range(n_x - 1):
            keys.append((k, -1, B))
            bonds += [((k, 0, A), (k, -1, B)), ((k + 1, 0, A), (k, -1, B))]
        # top cap: A(i, n_y) over two beards B(., n_y-1)
        for i in range(n_x):
            ks = [k for k in lower_partners(i, n_y) if 0 <= k < n_x]
            if len(ks) == 2:
                keys.append((i, n_y, A))
                bonds += [((i, n_y, A), (k, n_y - 1, B)) for k in ks]
    sites, idx = _enumerate(keys)
    pairs = [(idx[u], idx[v]) for u, v in bonds]
    return _finish(sites, pairs, BoundarySpec(SHEET, (n_x, n_y), edge))


def build(boundary: BoundarySpec) -> Lattice:
    if boundary.variant == TORUS:
        return build_torus(*boundary.dims)
    if boundary.variant == NANOTUBE:
        return build_armchair_nanotube(*boundary.dims)
    if boundary.variant == SHEET:
        return build_sheet(*boundary.dims, edge=boundary.edge or BEARDED)
    raise ValueError(f"unknown boundary variant {boundary.variant!r}")


def adjacency_matrix(lat: Lattice) -> np.ndarray:
    """Symmetric 0/1 adjacency matrix in linear-index order."""
    adj = np.zeros((lat.n_sites, lat.n_sites))
    if lat.edges:
        e = np.asarray(lat.edges)
        adj[e[:, 0], e[:, 1]] = 1.0
        adj[e[:, 1], e[:, 0]] = 1.0
    return adj
