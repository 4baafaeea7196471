"""Exact rank against an independent rational-elimination oracle."""

from fractions import Fraction

import numpy as np
import pytest

from forge.surfaces import boundary_matrices, exact_rank, generate_surface


def rank_oracle(matrix) -> int:
    """Plain Gaussian elimination over Fractions; brute-force reference."""
    m = [[Fraction(int(x)) for x in row] for row in np.asarray(matrix)]
    if not m or not m[0]:
        return 0
    rows, cols = len(m), len(m[0])
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = Fraction(1) / m[rank][col]
        m[rank] = [x * inv for x in m[rank]]
        for r in range(rows):
            if r != rank and m[r][col]:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def test_zero_matrix():
    assert exact_rank(np.zeros((3, 5), dtype=int)) == 0


def test_identity_pattern():
    assert exact_rank(np.eye(4, dtype=int)) == 4


def test_tetrahedron_d1_rank():
    mats = boundary_matrices(generate_surface("sphere", 4, seed=0))
    assert mats.d1.shape == (4, 6)
    assert exact_rank(mats.d1) == 3
    assert rank_oracle(mats.d1) == 3


def test_matches_oracle_on_random_small_matrices():
    gen = np.random.default_rng(7)
    for _ in range(200):
        rows = int(gen.integers(1, 8))
        cols = int(gen.integers(1, 8))
        m = gen.integers(-3, 4, size=(rows, cols))
        assert exact_rank(m) == rank_oracle(m)


def test_matches_oracle_on_boundary_matrices():
    for kind, size, seed in [("sphere", 10, 3), ("torus", 4, 5), ("klein", 4, 9)]:
        mats = boundary_matrices(generate_surface(kind, size, seed))
        assert exact_rank(mats.d1) == rank_oracle(mats.d1)
        assert exact_rank(mats.d2) == rank_oracle(mats.d2)


def test_rank_deterministic_and_exact_on_wide_entries():
    m = np.array([[2**40, 1], [1, 2**40]], dtype=np.int64)
    assert exact_rank(m) == 2
    m2 = np.array([[2**40, 2**40], [2**40, 2**40]], dtype=np.int64)
    assert exact_rank(m2) == 1


def test_bigint_fallback_agrees():
    # Force entries past the int64 guard through Python integers.
    big = 2**70
    m = [[big, 0, big], [0, big, big], [big, big, 2 * big]]
    assert exact_rank(np.array(m, dtype=object)) == 2


def test_rejects_non_integer():
    with pytest.raises(ValueError):
        exact_rank(np.array([[0.5, 1.0]]))
