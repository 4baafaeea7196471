"""Surface generation: counts, invariants, unions, determinism, errors."""

import numpy as np
import pytest

from forge.surfaces import (
    ParameterError,
    boundary_matrices,
    build_dataset,
    count_components,
    dataset_records,
    disjoint_union,
    exact_rank,
    generate_surface,
    make_datapoint,
    read_dataset,
    write_dataset,
)
from forge.surfaces.datapoints import read_record_matrices


def test_minimal_sphere_is_tetrahedron():
    s = generate_surface("sphere", 4, seed=11)
    assert (s.n_vertices, s.n_edges, s.n_triangles) == (4, 6, 4)
    assert s.euler_characteristic == 2


def test_torus_grid_3x3_counts():
    # Hand enumeration of the identified 3x3 grid: 9 vertices, one
    # horizontal + one vertical + one diagonal edge per vertex, two
    # triangles per grid square.
    t = generate_surface("torus", 3, seed=0)
    assert (t.n_vertices, t.n_edges, t.n_triangles) == (9, 27, 18)
    assert t.euler_characteristic == 0


def test_klein_grid_3x3_counts():
    k = generate_surface("klein", 3, seed=0)
    assert (k.n_vertices, k.n_edges, k.n_triangles) == (9, 27, 18)
    assert k.euler_characteristic == 0


@pytest.mark.parametrize("kind,expected", [
    ("sphere", (1, 0, 1, 2)),
    ("torus", (1, 2, 1, 0)),
    ("klein", (1, 1, 0, 0)),
])
def test_labels_per_kind(kind, expected):
    for seed in (1, 2):
        size = 12 if kind == "sphere" else 4
        dp = make_datapoint(generate_surface(kind, size, seed))
        assert (dp.b0, dp.b1, dp.b2, dp.chi) == expected


def test_grid_sweep_is_valid():
    for kind in ("torus", "klein"):
        for rows in range(3, 8):
            for cols in range(3, 8):
                s = generate_surface(kind, rows, seed=5, cols=cols)
                assert s.n_vertices == rows * cols
                assert 3 * s.n_triangles == 2 * s.n_edges


def test_union_of_single_part_keeps_invariants():
    s = generate_surface("sphere", 9, seed=2)
    u = disjoint_union([s])
    assert make_datapoint(u).labels[:4] == make_datapoint(s).labels[:4]


def test_union_sphere_torus_labels():
    u = disjoint_union([
        generate_surface("sphere", 8, seed=3),
        generate_surface("torus", 4, seed=3),
    ])
    dp = make_datapoint(u)
    assert (dp.b0, dp.b1, dp.b2, dp.chi) == (2, 2, 2, 2)


def test_union_two_spheres():
    u = disjoint_union([
        generate_surface("sphere", 6, seed=1),
        generate_surface("sphere", 7, seed=2),
    ])
    dp = make_datapoint(u)
    assert dp.chi == 4 and dp.b0 == 2


def test_union_additivity_against_exact_rank():
    parts = [
        generate_surface("sphere", 10, seed=4),
        generate_surface("torus", 4, seed=4),
        generate_surface("klein", 4, seed=4),
    ]
    union = disjoint_union(parts)
    dp = make_datapoint(union)
    part_dps = [make_datapoint(p) for p in parts]
    for i in range(8):
        assert dp.features[i] == sum(p.features[i] for p in part_dps)
    assert dp.b0 == sum(p.b0 for p in part_dps)
    assert dp.b1 == sum(p.b1 for p in part_dps)
    assert dp.b2 == sum(p.b2 for p in part_dps)


def test_boundary_matrix_shapes_and_composition():
    s = generate_surface("torus", 5, seed=8)
    mats = boundary_matrices(s)
    assert mats.d1.shape == (s.n_vertices, s.n_edges)
    assert mats.d2.shape == (s.n_edges, s.n_triangles)
    assert mats.composition_is_zero()
    # d1 columns: one +1 and one -1 each.
    assert np.all(mats.d1.sum(axis=0) == 0)
    assert np.all(np.abs(mats.d1).sum(axis=0) == 2)
    # d2 columns: exactly three nonzero entries.
    assert np.all(np.abs(mats.d2).sum(axis=0) == 3)


def test_union_block_diagonal():
    a = generate_surface("sphere", 6, seed=1)
    b = generate_surface("torus", 3, seed=1)
    mats = boundary_matrices(disjoint_union([a, b]))
    # Cross blocks are zero: edges of one part never touch the other's
    # vertices.
    assert not mats.d1[: a.n_vertices, a.n_edges :].any()
    assert not mats.d1[a.n_vertices :, : a.n_edges].any()
    assert not mats.d2[: a.n_edges, a.n_triangles :].any()
    assert not mats.d2[a.n_edges :, : a.n_triangles].any()


def test_count_components_matches_rank_identity():
    for kind, size in [("sphere", 14), ("torus", 5)]:
        s = generate_surface(kind, size, seed=6)
        dp = make_datapoint(s)
        mats = boundary_matrices(s)
        assert count_components(s) == s.n_vertices - exact_rank(mats.d1)
        assert count_components(s) == dp.b0
    u = disjoint_union([
        generate_surface("sphere", 6, seed=0),
        generate_surface("torus", 3, seed=0),
        generate_surface("torus", 3, seed=1),
    ])
    assert count_components(u) == 3


def test_determinism():
    a = generate_surface("torus", 6, seed=42, cols=5)
    b = generate_surface("torus", 6, seed=42, cols=5)
    assert a == b
    c = generate_surface("torus", 6, seed=43, cols=5)
    assert a != c  # diagonals differ


def test_parameter_errors():
    with pytest.raises(ParameterError):
        generate_surface("sphere", 3, seed=0)
    with pytest.raises(ParameterError):
        generate_surface("torus", 2, seed=0)
    with pytest.raises(ParameterError):
        generate_surface("dodecahedron", 5, seed=0)
    with pytest.raises(ParameterError):
        disjoint_union([])
    with pytest.raises(ParameterError):
        build_dataset("D9", 10, 0)


def test_dataset_classes_and_balance():
    data = build_dataset("D3", 5, seed=77)
    kinds = [d.kind for d in data]
    for kind in ("sphere", "torus", "klein", "union"):
        assert kinds.count(kind) == 5
    for dp in data:
        # rank-nullity both maps, and the two Euler definitions agree.
        r1, r2, n1, n2, h1, w1, h2, w2 = dp.features
        assert r1 + n1 == w1 and r2 + n2 == w2 and w1 == h2
        assert h1 - w1 + w2 == dp.b0 - dp.b1 + dp.b2 == dp.chi


def test_dataset_roundtrip(tmp_path):
    path = tmp_path / "data.jsonl"
    n = write_dataset(path, "D2", 4, seed=5)
    assert n == 12
    loaded = read_dataset(path)
    direct = build_dataset("D2", 4, seed=5)
    assert [d.features for d in loaded] == [d.features for d in direct]
    assert [d.labels for d in loaded] == [d.labels for d in direct]


def test_record_matrices_reconstruct():
    rec = dataset_records("D0", 2, seed=9)[0]
    d1, d2 = read_record_matrices(rec)
    assert not (d1 @ d2).any()
    assert exact_rank(d1) == rec["features"][0]
    assert exact_rank(d2) == rec["features"][1]
