from __future__ import annotations

from dataclasses import dataclass, field


class PrArityError(ValueError):
    def __init__(self, node: str, message: str) -> None:
        super().__init__(f"{node}: {message}")
        self.node = node


@dataclass(frozen=True)
class Zero:
    @property
    def arity(self) -> int:
        return 1


@dataclass(frozen=True)
class Succ:
    @property
    def arity(self) -> int:
        return 1


@dataclass(frozen=True)
class Proj:
    i: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise PrArityError(f"P[{self.i},{self.n}]", "projection arity must be at least 1")
        if not 1 <= self.i <= self.n:
            raise PrArityError(f"P[{self.i},{self.n}]", "projection index exceeds arity")

    @property
    def arity(self) -> int:
        return self.n


@dataclass(frozen=True)
class Comp:
    outer: PrTerm
    inners: tuple[PrTerm, ...]
    arity: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        inners = tuple(self.inners)
        object.__setattr__(self, "inners", inners)
        if not inners:
            raise PrArityError("C[...]", "composition needs at least one inner term")
        arities = {t.arity for t in inners}
        if len(arities) != 1:
            raise PrArityError(
                _node_label(self.outer, inners),
                f"inner terms disagree on arity ({', '.join(str(a) for a in sorted(arities))})",
            )
        if self.outer.arity != len(inners):
            raise PrArityError(
                _node_label(self.outer, inners),
                f"outer term has arity {self.outer.arity} but {len(inners)} inner terms",
            )
        object.__setattr__(self, "arity", inners[0].arity)


@dataclass(frozen=True)
class PrimRec:
    base: PrTerm
    step: PrTerm
    arity: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.step.arity != self.base.arity + 2:
            raise PrArityError(
                "R[...]",
                f"step arity {self.step.arity} must be base arity {self.base.arity} + 2",
            )
        object.__setattr__(self, "arity", self.base.arity + 1)


PrTerm = Zero | Succ | Proj | Comp | PrimRec

ZERO = Zero()
SUCC = Succ()


def term_depth(term: PrTerm) -> int:
    if isinstance(term, Comp):
        return 1 + max(term_depth(term.outer), *(term_depth(t) for t in term.inners))
    if isinstance(term, PrimRec):
        return 1 + max(term_depth(term.base), term_depth(term.step))
    return 1


def _node_label(outer: PrTerm, inners: tuple[PrTerm, ...]) -> str:
    from diagforge.core.pr.syntax import print_pr

    try:
        parts = "; ".join(print_pr(t) for t in (outer, *inners))
    except Exception:  # noqa: BLE001
        return "C[...]"
    return f"C[{parts}]"
