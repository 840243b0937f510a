from __future__ import annotations

from collections.abc import Iterator

from diagforge.core.machines.tm import BLANK, MOVES, ONE, Rule, TmSpec
from diagforge.core.models import GodelIndex

HALT = "halt"
_SYMBOLS = (BLANK, ONE)


class TmEncodingError(ValueError):
    pass


def _radix(k: int) -> int:
    # 0 = no rule, otherwise 1 + next_state * 6 + write * 3 + move.
    return 6 * (k + 1) + 1


def _class_size(k: int) -> int:
    return _radix(k) ** (2 * k)


def _state_name(i: int, k: int) -> str:
    return HALT if i == k else f"q{i}"


def _blocks() -> Iterator[tuple[int, int]]:
    offset, k = 0, 1
    while True:
        yield k, offset
        offset += _class_size(k)
        k += 1


def decode_tm(x: int) -> TmSpec:
    if x < 0:
        raise ValueError(f"Machine index must be a natural, got {x}.")
    for k, offset in _blocks():
        size = _class_size(k)
        if x < offset + size:
            digits_value = x - offset
            break

    base = _radix(k)
    rules: list[Rule] = []
    for slot in range(2 * k):
        digits_value, d = divmod(digits_value, base)
        if d == 0:
            continue
        nxt, rest = divmod(d - 1, 6)
        write, move = divmod(rest, 3)
        state, sym = divmod(slot, 2)
        rules.append(
            Rule(
                state=f"q{state}",
                read=_SYMBOLS[sym],
                next_state=_state_name(nxt, k),
                write=_SYMBOLS[write],
                move=MOVES[move],
            )
        )
    return TmSpec(
        states=tuple(f"q{i}" for i in range(k)) + (HALT,),
        alphabet=_SYMBOLS,
        rules=tuple(rules),
        start="q0",
        halt=(HALT,),
    )


def canonicalize_tm(spec: TmSpec) -> TmSpec:
    """Rename a binary-alphabet spec into the q0..q(k-1)/halt canonical form.

    Every halt state collapses into `halt`; rules leaving halt states are dropped
    since they never fire.
    """
    extra = set(spec.alphabet) - {spec.blank, ONE}
    if extra:
        raise TmEncodingError(f"Only the alphabet {{blank, 1}} is numbered, got {sorted(extra)}.")
    if len(spec.halt) > 1:
        raise TmEncodingError("Numbered machines have a single halt state.")
    if spec.start in spec.halt:
        return decode_tm(0)

    live = [spec.start] + [s for s in spec.states if s != spec.start and s not in spec.halt]
    names = {s: f"q{i}" for i, s in enumerate(live)}
    names.update({h: HALT for h in spec.halt})
    sym = {spec.blank: BLANK, ONE: ONE}
    rules = tuple(
        Rule(names[r.state], sym[r.read], names[r.next_state], sym[r.write], r.move)
        for r in spec.rules
        if r.state not in spec.halt
    )
    return TmSpec(
        states=tuple(names[s] for s in live) + (HALT,),
        alphabet=_SYMBOLS,
        rules=rules,
        start="q0",
        halt=(HALT,),
    )


def encode_tm(spec: TmSpec) -> GodelIndex:
    canon = canonicalize_tm(spec)
    k = len(canon.states) - 1
    base = _radix(k)
    state_idx = {s: i for i, s in enumerate(canon.states)}
    digits = [0] * (2 * k)
    for r in canon.rules:
        slot = 2 * state_idx[r.state] + _SYMBOLS.index(r.read)
        digits[slot] = (
            1
            + 6 * state_idx[r.next_state]
            + 3 * _SYMBOLS.index(r.write)
            + MOVES.index(r.move)
        )

    value = 0
    for d in reversed(digits):
        value = value * base + d
    offset = sum(_class_size(j) for j in range(1, k))
    return GodelIndex(offset + value)
