"""Oriented boundary (incidence) matrices of a triangulated surface.

Sign convention: an edge (u, v) with u < v contributes -1 at row u and +1
at row v of d1; a triangle contributes its three edges with signs from its
cyclic vertex order (+1 when traversed low-to-high).  With this convention
d1 @ d2 = 0 identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import TriangulatedSurface


@dataclass(frozen=True)
class BoundaryMatrices:
    d1: np.ndarray  # (V, E) int64, entries in {-1, 0, +1}
    d2: np.ndarray  # (E, F) int64, entries in {-1, 0, +1}

    def composition_is_zero(self) -> bool:
        return not np.any(self.d1 @ self.d2)


def boundary_matrices(surface: TriangulatedSurface) -> BoundaryMatrices:
    nv, ne, nf = surface.n_vertices, surface.n_edges, surface.n_triangles
    d1 = np.zeros((nv, ne), dtype=np.int64)
    for k, (u, v) in enumerate(surface.edges):
        d1[u, k] = -1
        d1[v, k] = 1
    index = surface.edge_index()
    d2 = np.zeros((ne, nf), dtype=np.int64)
    for j, (a, b, c) in enumerate(surface.triangles):
        for x, y in ((a, b), (b, c), (c, a)):
            e = (x, y) if x < y else (y, x)
            d2[index[e], j] = 1 if x < y else -1
    return BoundaryMatrices(d1, d2)


def sparse_triplets(matrix: np.ndarray) -> list[list[int]]:
    """(row, col, sign) triplets in row-major order, for serialization."""
    rows, cols = np.nonzero(matrix)
    return [[int(r), int(c), int(matrix[r, c])] for r, c in zip(rows, cols)]


def from_triplets(shape: tuple[int, int], triplets) -> np.ndarray:
    out = np.zeros(shape, dtype=np.int64)
    for r, c, s in triplets:
        out[r, c] = s
    return out
