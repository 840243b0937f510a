import random

from hypothesis import given, settings
from hypothesis import strategies as st

from diagforge.core.pairing import pair, pair_tuple, unpair, unpair_tuple
from diagforge.core.pr.enumeration import (
    decode_index,
    diagonal_h,
    encode_term,
    iter_terms,
    unary_args,
    universal_pr_eval,
)
from diagforge.core.pr.evaluator import PrLimits, ResourceExhausted, eval_pr
from diagforge.core.pr.terms import SUCC, ZERO, Comp, PrimRec, Proj

LIMITS = PrLimits(max_steps=50_000)


def test_pairing_is_cantor() -> None:
    assert [pair(0, 0), pair(0, 1), pair(1, 0), pair(1, 1)] == [0, 1, 2, 4]
    for z in range(2000):
        assert pair(*unpair(z)) == z
    assert unpair_tuple(pair_tuple([4, 0, 7]), 3) == (4, 0, 7)


def test_pinned_base_cases() -> None:
    assert encode_term(ZERO) == 0
    assert encode_term(SUCC) == 1
    assert decode_index(0) == ZERO
    assert decode_index(1) == SUCC


def test_successor_of_zero_has_an_inverse_code() -> None:
    term = Comp(SUCC, (ZERO,))
    assert decode_index(encode_term(term)) == term


def test_every_natural_decodes_and_reencodes() -> None:
    for x in range(10_000):
        assert encode_term(decode_index(x)) == x


def test_small_terms_encode_injectively() -> None:
    seen: dict[int, object] = {}
    for term in iter_terms(max_depth=3, max_arity=3, max_width=1):
        code = encode_term(term)
        assert decode_index(code) == term
        assert seen.setdefault(code, term) == term


@settings(max_examples=300)
@given(st.integers(min_value=0, max_value=2**64))
def test_decode_is_total_on_large_indices(x: int) -> None:
    assert encode_term(decode_index(x)) == x


def test_universal_eval_examples() -> None:
    assert universal_pr_eval(encode_term(ZERO), 9) == 0
    assert universal_pr_eval(encode_term(SUCC), 9) == 10
    # arity-3 projection on (9, 0, 0)
    assert universal_pr_eval(encode_term(Proj(1, 3)), 9) == 9
    assert universal_pr_eval(encode_term(Proj(2, 3)), 9) == 0


def test_unary_coercion_recurses_on_the_argument() -> None:
    add = PrimRec(Proj(1, 1), Comp(SUCC, (Proj(2, 3),)))
    assert unary_args(4, 2) == (4, 0)
    assert universal_pr_eval(encode_term(add), 4) == 4


def test_universal_eval_agrees_with_direct_evaluation() -> None:
    rng = random.Random(7)
    checked = capped = 0
    for _ in range(500):
        x = rng.randrange(10_000)
        arg = rng.randrange(11)
        term = decode_index(x)
        try:
            expected = eval_pr(term, unary_args(arg, term.arity), LIMITS)
        except ResourceExhausted:
            capped += 1
            continue
        assert universal_pr_eval(x, arg, LIMITS) == expected
        checked += 1
    assert checked > 0
    assert checked + capped == 500


def test_diagonal_h_examples() -> None:
    assert diagonal_h(encode_term(ZERO)) == 1
    x = encode_term(SUCC)
    assert diagonal_h(x) == x + 2


def test_diagonal_h_differs_from_every_member_at_its_index() -> None:
    definite = 0
    for x in range(2000):
        try:
            psi = universal_pr_eval(x, x, LIMITS)
            h = diagonal_h(x, LIMITS)
        except ResourceExhausted:
            continue
        assert h == psi + 1
        assert h != psi
        definite += 1
    assert definite > 0
