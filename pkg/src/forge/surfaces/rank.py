"""Exact matrix rank over the rationals.

Bareiss fraction-free elimination: every intermediate entry is a minor of
the input matrix, all divisions are exact, and no floating point is touched.
The fast path runs vectorized on int64 and monitors entry growth; if the
next update could exceed 2**62 it restarts on Python big integers, which are
exact at any width.  For incidence-style inputs (entries in {-1, 0, +1})
intermediate growth is mild and the fast path always suffices.
"""

from __future__ import annotations

import numpy as np

_GUARD = 1 << 31  # |entries| below this keep one Bareiss step inside int64


def exact_rank(matrix) -> int:
    """Rank of an integer matrix over the rationals, computed exactly."""
    a = np.asarray(matrix)
    if a.ndim != 2:
        raise ValueError("exact_rank expects a 2-D matrix")
    if a.size == 0:
        return 0
    if a.dtype == object:
        if not all(isinstance(x, (int, np.integer)) for row in a for x in row):
            raise ValueError("exact_rank expects integer entries")
        if max(abs(int(x)) for row in a for x in row) < _GUARD:
            return _rank_int64(a.astype(np.int64))
        return _rank_bigint([[int(x) for x in row] for row in a])
    if not np.issubdtype(a.dtype, np.integer):
        raise ValueError("exact_rank expects integer entries")
    return _rank_int64(a.astype(np.int64).copy())


def _rank_int64(m: np.ndarray) -> int:
    rows, cols = m.shape
    steps = min(rows, cols)
    prev = 1
    for k in range(steps):
        sub = m[k:, k:]
        if not sub.any():
            return k
        flat = np.argmax(sub != 0)
        pr, pc = divmod(int(flat), sub.shape[1])
        if pr:
            m[[k, k + pr], k:] = m[[k + pr, k], k:]
        if pc:
            m[:, [k, k + pc]] = m[:, [k + pc, k]]
        pivot = int(m[k, k])
        if k + 1 == steps:
            return k + 1
        peak = max(int(np.abs(m[k:, k:]).max()), abs(pivot))
        if peak >= _GUARD:
            return k + _rank_bigint(m[k:, k:].tolist(), prev)
        block = m[k + 1 :, k + 1 :]
        update = block * pivot - np.outer(m[k + 1 :, k], m[k, k + 1 :])
        np.floor_divide(update, prev, out=block)
        m[k + 1 :, k] = 0
        prev = pivot
    return steps


def _rank_bigint(m: list[list[int]], prev: int = 1) -> int:
    rows = len(m)
    cols = len(m[0]) if rows else 0
    steps = min(rows, cols)
    for k in range(steps):
        pr = pc = -1
        for i in range(k, rows):
            row = m[i]
            for j in range(k, cols):
                if row[j]:
                    pr, pc = i, j
                    break
            if pr >= 0:
                break
        if pr < 0:
            return k
        if pr != k:
            m[k], m[pr] = m[pr], m[k]
        if pc != k:
            for row in m:
                row[k], row[pc] = row[pc], row[k]
        pivot = m[k][k]
        for i in range(k + 1, rows):
            mik = m[i][k]
            mi, mk = m[i], m[k]
            for j in range(k + 1, cols):
                mi[j] = (mi[j] * pivot - mik * mk[j]) // prev
            mi[k] = 0
        prev = pivot
    return steps
