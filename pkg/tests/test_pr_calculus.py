import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.lark import from_lark

from diagforge.core.pr.enumeration import decode_index, iter_terms
from diagforge.core.pr.evaluator import PrLimits, ResourceExhausted, eval_pr
from diagforge.core.pr.syntax import PrSyntaxError, parse_pr, pr_parser, print_pr
from diagforge.core.pr.terms import SUCC, ZERO, Comp, PrArityError, PrimRec, Proj, term_depth

ADD = PrimRec(Proj(1, 1), Comp(SUCC, (Proj(2, 3),)))


def test_parse_base_cases() -> None:
    assert parse_pr("Z") == ZERO
    assert parse_pr("S") == SUCC
    assert parse_pr("C[S; P[1,1]]") == Comp(SUCC, (Proj(1, 1),))
    assert parse_pr("  R[ P[1,1] ;C[S;P[2,3]] ]\n") == ADD


def test_parse_rejects_projection_past_arity() -> None:
    with pytest.raises(PrArityError) as exc:
        parse_pr("P[3,2]")
    assert exc.value.node == "P[3,2]"


def test_parse_rejects_mismatched_composition() -> None:
    # outer S takes one argument but two inner terms are supplied
    with pytest.raises(PrArityError) as exc:
        parse_pr("C[S; Z; Z]")
    assert exc.value.node.startswith("C[")

    with pytest.raises(PrArityError):
        parse_pr("R[Z; P[1,2]]")


def test_parse_reports_syntax_position() -> None:
    with pytest.raises(PrSyntaxError) as exc:
        parse_pr("C[S; Q]")
    assert exc.value.line == 1
    assert exc.value.column == 6

    with pytest.raises(PrSyntaxError):
        parse_pr("C[S; Z")


def test_print_canonical_form() -> None:
    assert print_pr(ZERO) == "Z"
    assert print_pr(SUCC) == "S"
    assert print_pr(Comp(SUCC, (ZERO,))) == "C[S; Z]"
    assert print_pr(ADD) == "R[P[1,1]; C[S; P[2,3]]]"


def test_eval_examples() -> None:
    assert eval_pr(ZERO, (7,)) == 0
    assert eval_pr(ADD, (2, 3)) == 5
    assert eval_pr(Proj(2, 3), (7, 8, 9)) == 8


def test_add_agrees_with_builtin_addition() -> None:
    for a in range(50):
        for b in range(50):
            assert eval_pr(ADD, (a, b)) == a + b


def test_eval_rejects_wrong_argument_count() -> None:
    with pytest.raises(ValueError):
        eval_pr(ADD, (1,))


def test_deep_recursion_uses_no_host_stack() -> None:
    assert eval_pr(ADD, (200_000, 1)) == 200_001


def test_step_cap_is_not_divergence() -> None:
    with pytest.raises(ResourceExhausted) as exc:
        eval_pr(ADD, (100, 0), PrLimits(max_steps=10))
    assert exc.value.resource == "steps"
    assert exc.value.limit == 10


def test_bit_cap() -> None:
    with pytest.raises(ResourceExhausted) as exc:
        eval_pr(SUCC, (7,), PrLimits(max_bits=3))
    assert exc.value.resource == "bits"


def test_values_are_arbitrary_precision() -> None:
    assert eval_pr(SUCC, (2**200,)) == 2**200 + 1
    assert eval_pr(ADD, (3, 2**100)) == 2**100 + 3


def test_print_parse_roundtrip_on_small_terms() -> None:
    count = 0
    for term in iter_terms(max_depth=3, max_arity=3, max_width=1):
        assert term_depth(term) <= 3
        assert parse_pr(print_pr(term)) == term
        count += 1
    assert count > 500


@settings(max_examples=200)
@given(st.integers(min_value=0, max_value=10**12))
def test_print_parse_roundtrip_on_decoded_terms(x: int) -> None:
    term = decode_index(x)
    assert parse_pr(print_pr(term)) == term


@settings(max_examples=200)
@given(from_lark(pr_parser()))
def test_grammar_texts_parse_or_fail_on_arity(text: str) -> None:
    try:
        term = parse_pr(text)
    except PrArityError:
        return
    assert parse_pr(print_pr(term)) == term
