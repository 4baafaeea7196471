"""Datapoints: the eight-feature view of a surface plus ground-truth labels.

Features, in canonical order: rank(d1), rank(d2), null(d1), null(d2),
height(d1)=V, width(d1)=E, height(d2)=E, width(d2)=F.  Labels follow from
exact ranks: b0 = V - rank(d1), b1 = null(d1) - rank(d2), b2 = null(d2),
and the two Euler-characteristic definitions (V - E + F versus the
alternating Betti sum) are asserted to agree for every datapoint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .. import rng as _rng
from .boundary import boundary_matrices, from_triplets, sparse_triplets
from .complexes import (
    ParameterError,
    TriangulatedSurface,
    disjoint_union,
    generate_surface,
)
from .rank import exact_rank

#: Class composition of each dataset, in parity with the premise pairings.
DATASET_CLASSES = {
    "D0": ("sphere", "torus"),
    "D1": ("sphere", "torus", "klein"),
    "D2": ("sphere", "torus", "union"),
    "D3": ("sphere", "torus", "klein", "union"),
}

#: Which kinds union parts may draw from, per dataset.
_UNION_PART_KINDS = {
    "D2": ("sphere", "torus"),
    "D3": ("sphere", "torus", "klein"),
}


class InternalConsistencyError(RuntimeError):
    """The generator produced a datapoint whose invariants disagree."""


@dataclass(frozen=True)
class Datapoint:
    features: tuple[int, ...]  # (r1, r2, n1, n2, h1, w1, h2, w2)
    b0: int
    b1: int
    b2: int
    chi: int
    kind: str

    @property
    def labels(self) -> tuple[int, int, int, int, str]:
        return (self.b0, self.b1, self.b2, self.chi, self.kind)


def count_components(surface: TriangulatedSurface) -> int:
    """Connected components of the 1-skeleton (union-find)."""
    parent = list(range(surface.n_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in surface.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(x) for x in range(surface.n_vertices)})


def make_datapoint(surface: TriangulatedSurface) -> Datapoint:
    mats = boundary_matrices(surface)
    r1 = exact_rank(mats.d1)
    r2 = exact_rank(mats.d2)
    v, e, f = surface.n_vertices, surface.n_edges, surface.n_triangles
    n1 = e - r1
    n2 = f - r2
    b0 = v - r1
    b1 = n1 - r2
    b2 = n2
    chi = v - e + f
    if chi != b0 - b1 + b2:
        raise InternalConsistencyError(
            f"Euler characteristic definitions disagree: {chi} != {b0 - b1 + b2}"
        )
    if b0 != count_components(surface):
        raise InternalConsistencyError("b0 does not count the components")
    return Datapoint(
        features=(r1, r2, n1, n2, v, e, e, f),
        b0=b0,
        b1=b1,
        b2=b2,
        chi=chi,
        kind=surface.kind,
    )


def feature_matrix(data: list[Datapoint]) -> np.ndarray:
    return np.array([d.features for d in data], dtype=np.int64)


# --------------------------------------------------------------------------
# Dataset assembly

#: Per-kind size ranges (inclusive); values are drawn from a clipped normal
#: centered on the range so V, E, F marginals come out roughly bell shaped.
SIZE_RANGES = {
    "sphere": (12, 48),
    "torus": (4, 10),
    "klein": (4, 10),
}
UNION_SIZE_RANGES = {
    "sphere": (8, 24),
    "torus": (3, 7),
    "klein": (3, 7),
}
UNION_PARTS = (2, 3)


def _sample_size(kind: str, gen: np.random.Generator, ranges) -> int:
    lo, hi = ranges[kind]
    value = gen.normal((lo + hi) / 2.0, (hi - lo) / 6.0)
    return int(np.clip(round(value), lo, hi))


def _generate_one(
    kind: str, dataset_id: str, seed: int, index: int, sizes, union_sizes, union_parts
) -> TriangulatedSurface:
    gen = _rng.generator(seed, "size", kind, index)
    if kind == "union":
        part_kinds = _UNION_PART_KINDS[dataset_id]
        n_parts = int(gen.integers(union_parts[0], union_parts[1] + 1))
        parts = []
        for p in range(n_parts):
            part_kind = part_kinds[int(gen.integers(len(part_kinds)))]
            size = _sample_size(part_kind, gen, union_sizes)
            cols = None
            if part_kind != "sphere":
                cols = _sample_size(part_kind, gen, union_sizes)
            parts.append(
                generate_surface(
                    part_kind, size, _rng.derive_seed(seed, kind, index, p), cols
                )
            )
        return disjoint_union(parts)
    size = _sample_size(kind, gen, sizes)
    cols = None
    if kind != "sphere":
        cols = _sample_size(kind, gen, sizes)
    return generate_surface(kind, size, _rng.derive_seed(seed, kind, index), cols)


def build_dataset(
    dataset_id: str,
    per_class: int,
    seed: int,
    with_surfaces: bool = False,
    sizes: dict | None = None,
    union_sizes: dict | None = None,
    union_parts: tuple[int, int] = UNION_PARTS,
):
    """Balanced dataset for one of D0..D3: ``per_class`` of each class.

    Returns a list of datapoints, or (datapoints, surfaces) pairs when
    ``with_surfaces`` is set.  Deterministic in (dataset_id, per_class,
    seed) and independent of generation order.
    """
    if dataset_id not in DATASET_CLASSES:
        raise ParameterError(f"unknown dataset {dataset_id!r}")
    if per_class <= 0:
        raise ParameterError("per_class must be positive")
    sizes = sizes or SIZE_RANGES
    union_sizes = union_sizes or UNION_SIZE_RANGES
    datapoints: list[Datapoint] = []
    surfaces: list[TriangulatedSurface] = []
    for kind in DATASET_CLASSES[dataset_id]:
        for index in range(per_class):
            surface = _generate_one(
                kind, dataset_id, seed, index, sizes, union_sizes, union_parts
            )
            datapoints.append(make_datapoint(surface))
            if with_surfaces:
                surfaces.append(surface)
    if with_surfaces:
        return datapoints, surfaces
    return datapoints


# --------------------------------------------------------------------------
# Serialization: one JSON object per line, stable field order.

def dataset_records(dataset_id: str, per_class: int, seed: int, **kw) -> list[dict]:
    datapoints, surfaces = build_dataset(dataset_id, per_class, seed, True, **kw)
    records = []
    for dp, surface in zip(datapoints, surfaces):
        mats = boundary_matrices(surface)
        records.append(
            {
                "kind": dp.kind,
                "seed": seed,
                "v": surface.n_vertices,
                "e": surface.n_edges,
                "f": surface.n_triangles,
                "d1": sparse_triplets(mats.d1),
                "d2": sparse_triplets(mats.d2),
                "features": list(dp.features),
                "labels": {
                    "b0": dp.b0,
                    "b1": dp.b1,
                    "b2": dp.b2,
                    "chi": dp.chi,
                    "kind": dp.kind,
                },
            }
        )
    return records


def write_dataset(path, dataset_id: str, per_class: int, seed: int, **kw) -> int:
    records = dataset_records(dataset_id, per_class, seed, **kw)
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")
    return len(records)


def read_dataset(path) -> list[Datapoint]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            labels = rec["labels"]
            out.append(
                Datapoint(
                    features=tuple(rec["features"]),
                    b0=labels["b0"],
                    b1=labels["b1"],
                    b2=labels["b2"],
                    chi=labels["chi"],
                    kind=labels["kind"],
                )
            )
    return out


def read_record_matrices(record: dict):
    """Rebuild the dense boundary matrices of one serialized record."""
    d1 = from_triplets((record["v"], record["e"]), record["d1"])
    d2 = from_triplets((record["e"], record["f"]), record["d2"])
    return d1, d2
