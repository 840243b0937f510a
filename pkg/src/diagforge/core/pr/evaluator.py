from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

from diagforge.core.pr.terms import Comp, PrimRec, Proj, PrTerm, Succ, Zero

_EVAL = 0
_APPLY = 1
_LOOP = 2


@dataclass(frozen=True)
class PrLimits:
    max_steps: int = 10_000_000
    max_bits: int = 1_000_000

    def __post_init__(self) -> None:
        if self.max_steps < 1 or self.max_bits < 1:
            raise ValueError("PR limits must be positive.")


DEFAULT_LIMITS = PrLimits()


class ResourceExhausted(RuntimeError):
    """Raised when evaluation hits an engineering cap. Never means divergence."""

    def __init__(self, resource: Literal["steps", "bits"], limit: int) -> None:
        super().__init__(f"PR evaluation exceeded the {resource} cap ({limit}).")
        self.resource = resource
        self.limit = limit


def eval_pr(term: PrTerm, args: Sequence[int], limits: PrLimits = DEFAULT_LIMITS) -> int:
    args = tuple(args)
    if len(args) != term.arity:
        raise ValueError(f"Term has arity {term.arity} but got {len(args)} arguments.")
    for a in args:
        if not isinstance(a, int) or a < 0:
            raise ValueError(f"Arguments must be naturals, got {a!r}.")

    max_steps = limits.max_steps
    max_bits = limits.max_bits
    values: list[int] = []
    work: list[tuple] = [(_EVAL, term, args)]
    steps = 0

    while work:
        op = work.pop()
        tag = op[0]
        if tag == _EVAL:
            steps += 1
            if steps > max_steps:
                raise ResourceExhausted("steps", max_steps)
            t, a = op[1], op[2]
            kind = type(t)
            if kind is Proj:
                values.append(a[t.i - 1])
            elif kind is Succ:
                v = a[0] + 1
                if v.bit_length() > max_bits:
                    raise ResourceExhausted("bits", max_bits)
                values.append(v)
            elif kind is Zero:
                values.append(0)
            elif kind is Comp:
                work.append((_APPLY, t.outer, len(t.inners)))
                for inner in reversed(t.inners):
                    work.append((_EVAL, inner, a))
            elif kind is PrimRec:
                y, rest = a[0], a[1:]
                work.append((_LOOP, t.step, rest, 0, y))
                work.append((_EVAL, t.base, rest))
            else:
                raise TypeError(f"Not a PR term: {t!r}")
        elif tag == _APPLY:
            m = op[2]
            vals = tuple(values[-m:])
            del values[-m:]
            work.append((_EVAL, op[1], vals))
        else:
            step, rest, k, y = op[1], op[2], op[3], op[4]
            if k == y:
                continue
            acc = values.pop()
            work.append((_LOOP, step, rest, k + 1, y))
            work.append((_EVAL, step, (k, acc, *rest)))

    return values[0]
