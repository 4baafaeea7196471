"""Exact affine elimination with combination tracking.

Rows represent equations ``coeffs . x + constant = 0`` over the canonical
feature axes.  The system keeps itself in reduced form as equations are
added and records, for every derived row, the rational combination of input
equations that produced it; those combinations are the certificates handed
back by the prover.
"""

from __future__ import annotations

from fractions import Fraction

from ..statements.canonical import CANON_FEATURES

_DIM = len(CANON_FEATURES)


class AffineSystem:
    def __init__(self) -> None:
        # Each row: (coeffs list[Fraction], const Fraction, combo dict tag->Fraction)
        self.rows: list[tuple[list[Fraction], Fraction, dict]] = []
        self.pivots: list[int] = []          # pivot column of each row
        self.contradiction: dict | None = None  # combo proving 0 = nonzero
        self.ops = 0

    def copy(self) -> "AffineSystem":
        dup = AffineSystem()
        dup.rows = [(list(c), k, dict(m)) for c, k, m in self.rows]
        dup.pivots = list(self.pivots)
        dup.contradiction = dict(self.contradiction) if self.contradiction else None
        return dup

    def add(self, coeffs, constant, tag) -> None:
        """Insert one equation; updates the reduced basis and contradiction."""
        if self.contradiction is not None:
            return
        row = [Fraction(c) for c in coeffs]
        const = Fraction(constant)
        combo = {tag: Fraction(1)}
        row, const, combo = self._reduce(row, const, combo)
        pivot = next((i for i, c in enumerate(row) if c), None)
        if pivot is None:
            if const != 0:
                self.contradiction = combo
            return
        inv = Fraction(1) / row[pivot]
        row = [c * inv for c in row]
        const *= inv
        combo = {t: v * inv for t, v in combo.items()}
        # Back-substitute into existing rows to stay fully reduced.
        for idx, (r, k, m) in enumerate(self.rows):
            if r[pivot]:
                f = r[pivot]
                new_r = [a - f * b for a, b in zip(r, row)]
                new_k = k - f * const
                new_m = _merge(m, combo, -f)
                self.rows[idx] = (new_r, new_k, new_m)
                self.ops += 1
        self.rows.append((row, const, combo))
        self.pivots.append(pivot)

    def _reduce(self, row, const, combo):
        for (r, k, m), pivot in zip(self.rows, self.pivots):
            if row[pivot]:
                f = row[pivot]
                row = [a - f * b for a, b in zip(row, r)]
                const -= f * k
                combo = _merge(combo, m, -f)
                self.ops += 1
        return row, const, combo

    def forced_value(self, coeffs, constant=0):
        """Value of ``coeffs . x + constant`` on the solution set, if pinned.

        Returns (value: Fraction, combo) or None when the functional is not
        constant on the solutions.
        """
        row = [Fraction(c) for c in coeffs]
        const = Fraction(constant)
        row, const, combo = self._reduce(row, const, {})
        if any(row):
            return None
        return const, combo

    def pinned_variables(self) -> dict[int, Fraction]:
        """Variables whose value is fixed by the system."""
        out: dict[int, Fraction] = {}
        for (r, k), pivot in zip(((r, k) for r, k, _ in self.rows), self.pivots):
            if all(c == 0 for i, c in enumerate(r) if i != pivot):
                out[pivot] = -k  # x_pivot + k = 0
        return out

    def solve_parametric(self):
        """(pivot rows, free columns) for enumerating integer solutions.

        Each pivot row expresses x_pivot = -const - sum(coeff * x_free).
        """
        free = [i for i in range(_DIM) if i not in self.pivots]
        rows = []
        for (r, k, _), pivot in zip(self.rows, self.pivots):
            rows.append((pivot, [(i, r[i]) for i in free if r[i]], k))
        return rows, free


def _merge(a: dict, b: dict, factor: Fraction) -> dict:
    out = dict(a)
    for tag, val in b.items():
        new = out.get(tag, Fraction(0)) + factor * val
        if new:
            out[tag] = new
        elif tag in out:
            del out[tag]
    return out
