"""Canonical forms: algebraic identities, idempotence, truth preservation."""

import numpy as np

from forge.statements import atomic_formulae, canonicalize, parse
from forge.statements.canonical import CanonicalForm


def canon_of(text: str) -> CanonicalForm:
    atoms = atomic_formulae(parse(text))
    assert len(atoms) == 1
    return atoms[0].canonical


def test_rearranged_equalities_share_canonical_form():
    a = canon_of("(= (+ (- h1 w1) w2) 2)")
    b = canon_of("(= w2 (- (+ 2 w1) h1))")
    assert a.key() == b.key()


def test_simple_linear_coefficients():
    c = canon_of("(= (+ n1 1) w2)")
    by_name = dict(zip(("r1", "r2", "n1", "n2", "h1", "w1", "w2"), c.linear))
    assert by_name["n1"] == 1 and by_name["w2"] == -1
    assert c.constant == 1
    assert c.is_linear


def test_nonlinear_monomial_extraction():
    c = canon_of("(= (* n2 w2) n2)")
    assert not c.is_linear
    assert c.nonlinear == ((("n2", "w2"), -1),)
    by_name = dict(zip(("r1", "r2", "n1", "n2", "h1", "w1", "w2"), c.linear))
    assert by_name["n2"] == 1  # sign-normalized: leading coefficient positive


def test_idempotence():
    for text in [
        "(= (+ (- h1 w1) w2) 2)",
        "(= (* n2 w2) n2)",
        "(= (* 2 h1) (* 3 w2))",
    ]:
        atom = atomic_formulae(parse(text))[0]
        again = canonicalize(atom.node)
        assert again.key() == atom.canonical.key()


def test_content_and_sign_normalization():
    assert canon_of("(= (* 2 h1) 4)").key() == canon_of("(= h1 2)").key()
    assert canon_of("(= h1 w1)").key() == canon_of("(= w1 h1)").key()


def test_h2_and_w1_are_interchangeable():
    assert canon_of("(= h2 2)").key() == canon_of("(= w1 2)").key()
    assert canon_of("(= h2 w1)").is_trivially_true


def test_trivial_forms():
    assert canon_of("(= n2 n2)").is_trivially_true
    assert canon_of("(= 0 3)").is_trivially_false
    assert canon_of("(= (* n2 w2) (* w2 n2))").is_trivially_true


def test_atomic_formulae_enumeration():
    assert len(atomic_formulae(parse("(= (+ (- h1 w1) w2) 2)"))) == 1
    two = parse("(⟹ (= (+ n1 1) w2) (¬ (= (+ (- h1 w1) w2) 0)))")
    assert len(atomic_formulae(two)) == 2
    assert len(atomic_formulae(parse("(¬ (= h1 2))"))) == 1


def test_canonical_equality_implies_same_truth_on_random_tuples():
    gen = np.random.default_rng(3)
    pairs = [
        ("(= (+ (- h1 w1) w2) 2)", "(= w2 (- (+ 2 w1) h1))"),
        ("(= (* 2 h1) (* 2 w2))", "(= h1 w2)"),
        ("(= (+ h2 n1) 3)", "(= (+ w1 n1) 3)"),
    ]
    for left, right in pairs:
        a = atomic_formulae(parse(left))[0]
        b = atomic_formulae(parse(right))[0]
        assert a.canonical.key() == b.canonical.key()
        for _ in range(1000):
            features = tuple(int(x) for x in gen.integers(0, 30, size=8))
            # h2 aliases w1 in the canonical feature space.
            features = features[:6] + (features[5], features[7])
            from forge.statements import evaluate

            assert evaluate(a.node, features) == evaluate(b.node, features)
            assert a.canonical.holds(features) == evaluate(a.node, features)
