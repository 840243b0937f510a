from __future__ import annotations

from functools import lru_cache

from lark import Lark, Transformer
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from diagforge.core.pr.terms import (
    SUCC,
    ZERO,
    Comp,
    PrArityError,
    PrimRec,
    Proj,
    PrTerm,
    Succ,
    Zero,
)

PR_GRAMMAR = r"""
?start: term

?term: zero
     | succ
     | proj
     | comp
     | primrec

zero: "Z"
succ: "S"
proj: "P" "[" NAT "," NAT "]"
comp: "C" "[" term (";" term)+ "]"
primrec: "R" "[" term ";" term "]"

NAT: /[0-9]+/

%import common.WS
%ignore WS
"""


class PrSyntaxError(ValueError):
    def __init__(self, message: str, *, position: int, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.position = position
        self.line = line
        self.column = column


@lru_cache(maxsize=1)
def pr_parser() -> Lark:
    return Lark(PR_GRAMMAR, parser="lalr")


class _TermBuilder(Transformer):
    def zero(self, _children: list) -> Zero:
        return ZERO

    def succ(self, _children: list) -> Succ:
        return SUCC

    def proj(self, children: list) -> Proj:
        i, n = children
        return Proj(int(i), int(n))

    def comp(self, children: list) -> Comp:
        outer, *inners = children
        return Comp(outer, tuple(inners))

    def primrec(self, children: list) -> PrimRec:
        base, step = children
        return PrimRec(base, step)


def parse_pr(text: str) -> PrTerm:
    try:
        tree = pr_parser().parse(text)
    except UnexpectedEOF as e:
        line = text.count("\n") + 1
        column = len(text) - (text.rfind("\n") + 1) + 1
        raise PrSyntaxError(
            "Unexpected end of term", position=len(text), line=line, column=column
        ) from e
    except UnexpectedInput as e:
        raise PrSyntaxError(
            "Unexpected input in term",
            position=e.pos_in_stream if e.pos_in_stream is not None else -1,
            line=e.line if isinstance(e.line, int) else -1,
            column=e.column if isinstance(e.column, int) else -1,
        ) from e

    try:
        return _TermBuilder().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, PrArityError):
            raise e.orig_exc from None
        raise


def print_pr(term: PrTerm) -> str:
    if isinstance(term, Zero):
        return "Z"
    if isinstance(term, Succ):
        return "S"
    if isinstance(term, Proj):
        return f"P[{term.i},{term.n}]"
    if isinstance(term, Comp):
        parts = "; ".join(print_pr(t) for t in (term.outer, *term.inners))
        return f"C[{parts}]"
    if isinstance(term, PrimRec):
        return f"R[{print_pr(term.base)}; {print_pr(term.step)}]"
    raise TypeError(f"Not a PR term: {term!r}")
