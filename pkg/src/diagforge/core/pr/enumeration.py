from __future__ import annotations

from collections.abc import Iterator
from itertools import product

from diagforge.core.models import GodelIndex, NatValue
from diagforge.core.pairing import pair, pair_tuple, unpair, unpair_tuple
from diagforge.core.pr.evaluator import DEFAULT_LIMITS, PrLimits, eval_pr
from diagforge.core.pr.terms import SUCC, ZERO, Comp, PrimRec, Proj, PrTerm, Succ, Zero

# Arity-1 terms reserve local codes 0..2 for Z, S, P[1,1]; compositions follow.
_UNARY_BASE = 3


def encode_term(term: PrTerm) -> GodelIndex:
    return GodelIndex(pair(term.arity - 1, _encode_local(term)))


def decode_index(x: int) -> PrTerm:
    if x < 0:
        raise ValueError(f"Gödel index must be a natural, got {x}.")
    arity_minus_one, local = unpair(x)
    return _decode_local(local, arity_minus_one + 1)


def unary_args(arg: int, arity: int) -> tuple[int, ...]:
    return (arg,) + (0,) * (arity - 1)


def universal_pr_eval(x: int, arg: int, limits: PrLimits = DEFAULT_LIMITS) -> NatValue:
    term = decode_index(x)
    return NatValue(eval_pr(term, unary_args(arg, term.arity), limits))


def diagonal_h(x: int, limits: PrLimits = DEFAULT_LIMITS) -> NatValue:
    return NatValue(universal_pr_eval(x, x, limits) + 1)


def _encode_local(term: PrTerm) -> int:
    n = term.arity
    if isinstance(term, Zero):
        return 0
    if isinstance(term, Succ):
        return 1
    if isinstance(term, Proj):
        return 2 if n == 1 else term.i - 1
    if isinstance(term, Comp):
        m = len(term.inners)
        payload = pair(
            m - 1,
            pair(_encode_local(term.outer), pair_tuple([_encode_local(t) for t in term.inners])),
        )
        return _UNARY_BASE + payload if n == 1 else n + 2 * payload
    if isinstance(term, PrimRec):
        payload = pair(_encode_local(term.base), _encode_local(term.step))
        return n + 2 * payload + 1
    raise TypeError(f"Not a PR term: {term!r}")


def _decode_local(z: int, n: int) -> PrTerm:
    if n == 1:
        if z == 0:
            return ZERO
        if z == 1:
            return SUCC
        if z == 2:
            return Proj(1, 1)
        return _decode_comp(z - _UNARY_BASE, n)

    if z < n:
        return Proj(z + 1, n)
    payload, tag = divmod(z - n, 2)
    if tag == 0:
        return _decode_comp(payload, n)
    base_code, step_code = unpair(payload)
    return PrimRec(_decode_local(base_code, n - 1), _decode_local(step_code, n + 1))


def _decode_comp(payload: int, n: int) -> Comp:
    m_minus_one, rest = unpair(payload)
    m = m_minus_one + 1
    outer_code, inners_code = unpair(rest)
    outer = _decode_local(outer_code, m)
    inners = tuple(_decode_local(c, n) for c in unpair_tuple(inners_code, m))
    return Comp(outer, inners)


def iter_terms(*, max_depth: int, max_arity: int, max_width: int) -> Iterator[PrTerm]:
    """Every well-formed term within the given depth, arity and composition-width limits."""
    by_arity: dict[int, list[PrTerm]] = {n: [] for n in range(1, max_arity + 1)}
    by_arity[1].extend([ZERO, SUCC])
    for n in range(1, max_arity + 1):
        by_arity[n].extend(Proj(i, n) for i in range(1, n + 1))

    for _ in range(max_depth - 1):
        grown: dict[int, list[PrTerm]] = {n: list(ts) for n, ts in by_arity.items()}
        seen = {n: set(ts) for n, ts in grown.items()}
        for n in range(1, max_arity + 1):
            candidates: list[PrTerm] = []
            for m in range(1, min(max_width, max_arity) + 1):
                for outer in by_arity[m]:
                    for inners in product(by_arity[n], repeat=m):
                        candidates.append(Comp(outer, inners))
            if n >= 2 and n + 1 <= max_arity:
                for base in by_arity[n - 1]:
                    for step in by_arity[n + 1]:
                        candidates.append(PrimRec(base, step))
            for t in candidates:
                if t not in seen[n]:
                    seen[n].add(t)
                    grown[n].append(t)
        by_arity = grown

    for n in range(1, max_arity + 1):
        yield from by_arity[n]
