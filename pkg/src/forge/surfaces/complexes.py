"""Random triangulations of closed surfaces.

Spheres come from convex hulls of seeded points on the unit sphere (a
Delaunay triangulation of the sphere); tori and Klein bottles from an
``rows x cols`` grid with wraparound identifications, the Klein bottle
gluing one direction with a reflection.  Each grid square is split along a
seeded diagonal, so repeated calls with one seed are bit-identical while
different seeds vary the combinatorics.  Disjoint unions shift indices and
concatenate, which makes the boundary matrices block diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .. import rng as _rng

KINDS = ("sphere", "torus", "klein", "union")


class ParameterError(ValueError):
    """A generation parameter is outside its documented domain."""


class GenerationError(RuntimeError):
    """The generator produced an invalid complex (internal failure)."""


@dataclass(frozen=True)
class Component:
    kind: str
    orientable: bool
    genus: int | None = None  # metadata only, drives no logic


@dataclass(frozen=True)
class TriangulatedSurface:
    kind: str
    n_vertices: int
    edges: tuple[tuple[int, int], ...]       # sorted pairs, lexicographic
    triangles: tuple[tuple[int, int, int], ...]  # oriented vertex triples
    components: tuple[Component, ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles

    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}


def _edges_of_triangle(tri: tuple[int, int, int]):
    a, b, c = tri
    yield (min(a, b), max(a, b))
    yield (min(b, c), max(b, c))
    yield (min(c, a), max(c, a))


def _assemble(kind: str, n_vertices: int, triangles, components) -> TriangulatedSurface:
    edge_set = set()
    for tri in triangles:
        edge_set.update(_edges_of_triangle(tri))
    surface = TriangulatedSurface(
        kind=kind,
        n_vertices=n_vertices,
        edges=tuple(sorted(edge_set)),
        triangles=tuple(triangles),
        components=tuple(components),
    )
    validate_surface(surface)
    return surface


def validate_surface(surface: TriangulatedSurface) -> None:
    """Check the closed-surface invariants; raise GenerationError if broken."""
    nv = surface.n_vertices
    if nv <= 0:
        raise GenerationError("empty vertex set")
    seen_edges = set()
    for u, v in surface.edges:
        if not (0 <= u < v < nv):
            raise GenerationError(f"bad edge ({u}, {v})")
        if (u, v) in seen_edges:
            raise GenerationError(f"duplicate edge ({u}, {v})")
        seen_edges.add((u, v))
    edge_use: dict[tuple[int, int], int] = {e: 0 for e in surface.edges}
    seen_tris = set()
    for tri in surface.triangles:
        if len(set(tri)) != 3 or not all(0 <= x < nv for x in tri):
            raise GenerationError(f"degenerate triangle {tri}")
        key = tuple(sorted(tri))
        if key in seen_tris:
            raise GenerationError(f"duplicate triangle {tri}")
        seen_tris.add(key)
        for e in _edges_of_triangle(tri):
            if e not in edge_use:
                raise GenerationError(f"triangle {tri} uses unknown edge {e}")
            edge_use[e] += 1
    if any(count != 2 for count in edge_use.values()):
        raise GenerationError("surface is not closed: an edge is not in 2 triangles")
    if 3 * surface.n_triangles != 2 * surface.n_edges:
        raise GenerationError("3F != 2E")
    expect_orientable = all(c.orientable for c in surface.components)
    if _is_orientable(surface) != expect_orientable:
        raise GenerationError("orientability does not match the declared kind")


def _is_orientable(surface: TriangulatedSurface) -> bool:
    """Whether some flip assignment makes all edge traversals opposite."""
    incidence: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for t, tri in enumerate(surface.triangles):
        a, b, c = tri
        for x, y in ((a, b), (b, c), (c, a)):
            e = (min(x, y), max(x, y))
            incidence.setdefault(e, []).append((t, 1 if x < y else -1))
    flip = [-1] * len(surface.triangles)
    for start in range(len(surface.triangles)):
        if flip[start] >= 0:
            continue
        flip[start] = 0
        stack = [start]
        while stack:
            t = stack.pop()
            for e in _edges_of_triangle(surface.triangles[t]):
                pair = incidence[e]
                (t1, s1), (t2, s2) = pair
                other, rel = (t2, s1 * s2) if t1 == t else (t1, s1 * s2)
                # rel == -1: traversals already opposite -> same flip class.
                want = flip[t] if rel == -1 else 1 - flip[t]
                if flip[other] < 0:
                    flip[other] = want
                    stack.append(other)
                elif flip[other] != want:
                    return False
    return True


def generate_surface(
    kind: str, size_param: int, seed: int, cols: int | None = None
) -> TriangulatedSurface:
    """Generate one closed surface of the requested topological type.

    ``size_param`` is the sample-point count for spheres and the grid row
    count for tori and Klein bottles (``cols`` defaults to ``size_param``).
    Deterministic in (kind, size_param, cols, seed).
    """
    if kind == "sphere":
        if size_param < 4:
            raise ParameterError("sphere needs at least 4 sample points")
        return _generate_sphere(size_param, seed)
    if kind in ("torus", "klein"):
        rows = size_param
        ncols = size_param if cols is None else cols
        if rows < 3 or ncols < 3:
            raise ParameterError(f"{kind} needs a grid of at least 3x3")
        return _generate_grid(kind, rows, ncols, seed)
    if kind == "union":
        raise ParameterError("build unions with disjoint_union(parts)")
    raise ParameterError(f"unknown surface kind {kind!r}")


def _generate_sphere(n_points: int, seed: int) -> TriangulatedSurface:
    gen = _rng.generator(seed, "sphere", n_points)
    points = gen.normal(size=(n_points, 3))
    norms = np.linalg.norm(points, axis=1, keepdims=True)
    if np.any(norms < 1e-12):
        raise GenerationError("degenerate sample point at the origin")
    points /= norms
    hull = ConvexHull(points)
    if len(np.unique(hull.simplices)) != n_points:
        raise GenerationError("hull dropped a sample point")
    triangles = []
    for simplex in hull.simplices:
        a, b, c = (int(x) for x in simplex)
        # Orient each facet so its normal points away from the origin; this
        # is a coherent orientation of the sphere.
        normal = np.cross(points[b] - points[a], points[c] - points[a])
        if np.dot(normal, points[a] + points[b] + points[c]) < 0:
            b, c = c, b
        triangles.append((a, b, c))
    triangles.sort()
    return _assemble(
        "sphere", n_points, triangles, [Component("sphere", True, 0)]
    )


def _generate_grid(kind: str, rows: int, ncols: int, seed: int) -> TriangulatedSurface:
    gen = _rng.generator(seed, kind, rows, ncols)
    diagonals = gen.random((rows, ncols)) < 0.5

    def vid(i: int, j: int) -> int:
        return i * ncols + j

    def ident(i: int, j: int) -> int:
        j %= ncols
        if i < rows:
            return vid(i, j)
        if kind == "torus":
            return vid(0, j)
        return vid(0, (ncols - j) % ncols)  # reflected gluing

    triangles = []
    for i in range(rows):
        for j in range(ncols):
            a = ident(i, j)
            b = ident(i, j + 1)
            c = ident(i + 1, j)
            d = ident(i + 1, j + 1)
            if diagonals[i, j]:
                triangles.append((a, b, d))
                triangles.append((a, d, c))
            else:
                triangles.append((a, b, c))
                triangles.append((b, d, c))
    component = Component(kind, kind == "torus", 1 if kind == "torus" else None)
    return _assemble(kind, rows * ncols, triangles, [component])


def disjoint_union(parts: list[TriangulatedSurface]) -> TriangulatedSurface:
    """Shifted-index union; boundary matrices become block diagonal."""
    if not parts:
        raise ParameterError("disjoint_union needs at least one part")
    triangles: list[tuple[int, int, int]] = []
    components: list[Component] = []
    offset = 0
    for part in parts:
        triangles.extend(
            (a + offset, b + offset, c + offset) for a, b, c in part.triangles
        )
        components.extend(part.components)
        offset += part.n_vertices
    return _assemble("union", offset, triangles, components)
