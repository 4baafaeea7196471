"""Concept detection against a brute-force span-membership oracle.

The oracle re-implements the documented rule from scratch with sympy
rational matrices: find the smallest concept subset whose span (together
with the premise functionals) contains the atom's linear part with
admissible coefficients, and union the subsets that achieve it.
"""

from itertools import combinations

import numpy as np
import sympy

from forge.prover import PremiseSet
from forge.statements import detect_concepts, parse
from forge.statements.canonical import atomic_formulae
from forge.statements.concepts import ConceptFlags, concept_vectors

P0 = PremiseSet.from_groups("P0")
P01 = PremiseSet.from_groups("P0", "P1")
P012 = PremiseSet.from_groups("P0", "P1", "P2")

GOLDEN_STATEMENTS = {
    1: "(⟹ (¬ (= r2 (+ (- n1 h1) r1))) (¬ (= (+ n2 h2) (+ h1 w2))))",
    2: "(⟹ (= (+ n1 1) w2) (¬ (= (+ (- h1 w1) w2) 0)))",
    3: "(⟹ (= r1 (- w1 r2)) (¬ (= (- w1 n2) (+ r2 h1))))",
    4: "(⟹ (∧ (= n1 r2) (= (* n2 w2) n2)) (¬ (= w1 (+ (+ h1 n2) r2))))",
}


def test_golden_statement_one_fires_everything():
    flags = detect_concepts(parse(GOLDEN_STATEMENTS[1]), P0)
    assert flags == ConceptFlags(True, True, True, True)


def test_golden_statements_fire_chi_and_some_betti():
    for idx in (1, 2, 3, 4):
        flags = detect_concepts(parse(GOLDEN_STATEMENTS[idx]), P0)
        assert flags.has_chi, idx
        assert flags.any_b(), idx


def test_alternating_sum_fires_chi_only():
    flags = detect_concepts(parse("(= (+ (- h1 w1) w2) 2)"), P0)
    assert flags == ConceptFlags(True, False, False, False)


def test_bare_dimension_fires_nothing():
    assert detect_concepts(parse("(= h1 2)"), ()) == ConceptFlags()
    assert detect_concepts(parse("(= h1 2)"), P0) == ConceptFlags()


def test_premise_trivial_atoms_fire_nothing():
    # Restating a premise is not noticing a concept.
    assert detect_concepts(parse("(= (+ r1 n1) w1)"), P012) == ConceptFlags()
    assert detect_concepts(parse("(= n2 1)"), P012) == ConceptFlags()
    # Without the orientability premise, n2 = 1 is exactly the top Betti
    # number.
    assert detect_concepts(parse("(= n2 1)"), P0) == ConceptFlags(
        False, False, False, True
    )


def test_middle_betti_form():
    assert detect_concepts(parse("(= n1 r2)"), P0) == ConceptFlags(
        False, False, True, False
    )


def test_invariance_under_premise_substitution():
    # Rewriting with rank-nullity (n1 -> w1 - r1) must not change flags.
    a = parse("(= n1 r2)")
    b = parse("(= (- w1 r1) r2)")
    assert detect_concepts(a, P0) == detect_concepts(b, P0)
    c = parse("(= (+ (- h1 w1) w2) 2)")
    d = parse("(= (+ (- h1 w1) (+ r2 n2)) 2)")  # w2 -> r2 + n2
    assert detect_concepts(c, P0) == detect_concepts(d, P0)


# ---------------------------------------------------------------------------
# Brute-force oracle.

_CONCEPTS = ("chi", "b0", "b1", "b2")


def oracle_flags(statement, premises, mode="integer") -> ConceptFlags:
    vecs = concept_vectors()
    premise_rows = [sympy.Matrix(list(v)) for v in premises.linear_functionals()]
    fired: set[str] = set()
    for atom in atomic_formulae(statement):
        f = sympy.Matrix(list(atom.canonical.linear))
        if f.is_zero_matrix:
            continue
        found_k = None
        for k in range(0, 5):
            if found_k is not None:
                break
            for subset in combinations(_CONCEPTS, k):
                cols = [sympy.Matrix(list(vecs[name])) for name in subset]
                basis = cols + premise_rows
                if basis:
                    m = sympy.Matrix.hstack(*basis)
                    aug = sympy.Matrix.hstack(m, f)
                    solvable = m.rank() == aug.rank()
                else:
                    solvable = f.is_zero_matrix
                if not solvable:
                    continue
                if k == 0:
                    found_k = 0  # premise-trivial: no flags
                    break
                coeffs = _particular_solution(m, f)[: len(subset)]
                if any(c == 0 for c in coeffs):
                    continue
                if mode == "integer" and not all(
                    sympy.Rational(c).q == 1 for c in coeffs
                ):
                    continue
                found_k = k
                fired.update(subset)
    return ConceptFlags(
        "chi" in fired, "b0" in fired, "b1" in fired, "b2" in fired
    )


def _particular_solution(m, f):
    solution, params = m.gauss_jordan_solve(f)
    return list(solution.subs({p: 0 for p in params}))


def _random_small_statement(gen):
    from forge.statements import FEATURES, Arith, Const, Equals, Feature

    def arith(depth):
        if depth == 0 or gen.random() < 0.45:
            if gen.random() < 0.75:
                return Feature(FEATURES[int(gen.integers(8))])
            return Const(int(gen.integers(-4, 5)))
        op = "+-*"[int(gen.integers(3))]
        return Arith(op, arith(depth - 1), arith(depth - 1))

    from forge.statements import tree_size

    while True:
        s = Equals(arith(2), arith(2))
        if tree_size(s) <= 7:
            return s


def test_flags_match_bruteforce_oracle_on_random_statements():
    gen = np.random.default_rng(2024)
    for premises in (P0, P01, P012):
        for _ in range(70):
            s = _random_small_statement(gen)
            assert detect_concepts(s, premises) == oracle_flags(s, premises), (
                str(s),
                premises.label,
            )


def test_flags_match_oracle_on_golden_set():
    for idx, text in GOLDEN_STATEMENTS.items():
        s = parse(text)
        for premises in (P0, P01):
            assert detect_concepts(s, premises) == oracle_flags(s, premises), idx
