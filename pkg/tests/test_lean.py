"""Theorem-file export: hypotheses, syntax mapping, byte stability."""

from forge.prover import PremiseSet, export_lean, lean_file_name
from forge.statements import parse

P0 = PremiseSet.from_groups("P0")
P012 = PremiseSet.from_groups("P0", "P1", "P2")

GOLDEN_ONE = "(⟹ (¬ (= r2 (+ (- n1 h1) r1))) (¬ (= (+ n2 h2) (+ h1 w2))))"


def test_hypotheses_are_exactly_the_rank_nullities():
    text = export_lean(parse(GOLDEN_ONE), P0)
    assert "(p1 : r1 + n1 = w1)" in text
    assert "(p2 : r2 + n2 = w2)" in text
    assert "p3" not in text and "p4" not in text


def test_full_premise_header():
    text = export_lean(parse(GOLDEN_ONE), P012)
    assert "(p3 : h1 = r1 + 1)" in text
    assert "(p4 : n2 = 1)" in text


def test_byte_stability():
    s = parse(GOLDEN_ONE)
    assert export_lean(s, P0) == export_lean(s, P0)
    assert lean_file_name(s, P0) == lean_file_name(s, P0)
    assert lean_file_name(s, P0) != lean_file_name(s, P012)


def test_header_declares_modules_and_maps():
    text = export_lean(parse("(= h1 2)"), P0)
    for needle in [
        "DivisionRing R",
        "V0 V1 V2",
        "Module R V0",
        "D1 : V1",
        "D2 : V2",
        ":= by",
    ]:
        assert needle in text


def test_multiplication_maps_to_ring_syntax():
    text = export_lean(parse("(= (* n2 w2) n2)"), P0)
    assert "(n2 * w2) = n2" in text


def test_negated_equality_renders_as_disequality():
    text = export_lean(parse("(¬ (= h1 2))"), P0)
    assert "h1 ≠ 2" in text


def test_quantification_is_implicit_in_binders():
    text = export_lean(parse("(= h1 2)"), P0)
    assert "(r1 r2 n1 n2 h1 w1 h2 w2 : ℤ)" in text
    assert "∀" not in text


def test_harvested_statements_become_hypotheses():
    grown = P0.with_statement(parse("(= (* 2 w1) (* 3 w2))"))
    text = export_lean(parse("(= h1 2)"), grown)
    assert "(q1 : (2 * w1) = (3 * w2))" in text
