from __future__ import annotations

import logging
import re
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import ClassVar, Literal

from diagforge.core.machines.accelerating import HaltingAtm, WriteOnceViolation, verdict_value
from diagforge.core.machines.halting import (
    DiagonalValue,
    diagonal_g,
    halting_f,
    lba_halt_decide,
    semi_decide_halt,
    verify_divergence_certificate,
    verify_halt_certificate,
)
from diagforge.core.machines.ittm import LIMIT_RULES, ittm_decide_halting
from diagforge.core.machines.numbering import decode_tm
from diagforge.core.models import DeciderLimitError, Halts, OutOfSpaceError, SpaceBound, Unknown
from diagforge.core.pr.enumeration import diagonal_h, universal_pr_eval
from diagforge.core.pr.evaluator import PrLimits, ResourceExhausted

_LOGGER = logging.getLogger(__name__)

_RANGE_RE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")

Outcome = Literal["agree", "disagree", "unknown", "out-of-space"]


class SweepRangeError(ValueError):
    def __init__(self, text: str, message: str) -> None:
        super().__init__(f"Bad sweep range {text!r}: {message}")
        self.text = text


class SweepCommandError(ValueError):
    pass


def parse_range(text: str) -> range:
    """Parse a half-open `a..b` range; `0..100` covers 0 <= x < 100."""
    m = _RANGE_RE.match(text)
    if not m:
        raise SweepRangeError(text, "expected a..b with naturals a and b")
    lo, hi = int(m.group(1)), int(m.group(2))
    if hi <= lo:
        raise SweepRangeError(text, "range is empty")
    return range(lo, hi)


@dataclass(frozen=True)
class SweepContext:
    bound: SpaceBound = field(default_factory=lambda: SpaceBound(16))
    budget: int = 100_000
    max_steps: int = 10_000_000
    pr_limits: PrLimits = field(default_factory=PrLimits)


@dataclass(frozen=True)
class SweepRow:
    x: int
    outcome: Outcome
    detail: str


@dataclass(frozen=True)
class SweepSummary:
    agree: int = 0
    disagree: int = 0
    unknown: int = 0
    out_of_space: int = 0


@dataclass(frozen=True)
class SweepReport:
    kind: ClassVar[str] = "sweep"
    command: str
    range: str
    rows: tuple[SweepRow, ...]
    summary: SweepSummary


def _verdict(ok: bool, detail: str) -> tuple[Outcome, str]:
    return ("agree" if ok else "disagree"), detail


def _diag_g(x: int, ctx: SweepContext) -> tuple[Outcome, str]:
    g = diagonal_g(x, ctx.bound, max_steps=ctx.max_steps)
    spec = decode_tm(x)
    if isinstance(g, DiagonalValue):
        ok = verify_divergence_certificate(spec, x, ctx.bound, g.certificate)
        ok = ok and isinstance(semi_decide_halt(x, x, ctx.budget), Unknown)
        return _verdict(ok, f"g = {g.value}; psi_x(x) diverges")
    ok = verify_halt_certificate(spec, x, g.certificate)
    return _verdict(ok, f"g diverges; psi_x(x) halts in {g.certificate.steps} steps")


def _pr_h(x: int, ctx: SweepContext) -> tuple[Outcome, str]:
    psi = universal_pr_eval(x, x, ctx.pr_limits)
    h = diagonal_h(x, ctx.pr_limits)
    return _verdict(h == psi + 1 and h != psi, f"h = {h}, psi_x(x) = {psi}")


def _halt_semi(x: int, ctx: SweepContext) -> tuple[Outcome, str]:
    answer = semi_decide_halt(x, x, ctx.budget)
    if isinstance(answer, Unknown):
        return "unknown", answer.reason
    return _verdict(verify_halt_certificate(decode_tm(x), x, answer), f"halts in {answer.steps}")


def _halt_exact(x: int, ctx: SweepContext) -> tuple[Outcome, str]:
    answer = lba_halt_decide(x, x, ctx.bound, max_steps=ctx.max_steps)
    spec = decode_tm(x)
    if isinstance(answer, Halts):
        return _verdict(verify_halt_certificate(spec, x, answer), f"halts in {answer.steps}")
    ok = verify_divergence_certificate(spec, x, ctx.bound, answer)
    return _verdict(ok, f"cycle of length {answer.cycle_length} from step {answer.cycle_start}")


def _ittm_decide(x: int, ctx: SweepContext) -> tuple[Outcome, str]:
    expected = halting_f(x, x, "exact", bound=ctx.bound, max_steps=ctx.max_steps)
    got = [ittm_decide_halting(x, ctx.bound, rule, max_steps=ctx.max_steps) for rule in LIMIT_RULES]
    return _verdict(all(v == expected for v in got), f"f = {expected}, limsup/liminf = {got}")


def _atm_halting(x: int, ctx: SweepContext) -> tuple[Outcome, str]:
    expected = halting_f(x, x, "exact", bound=ctx.bound, max_steps=ctx.max_steps)
    got = verdict_value(HaltingAtm().run_exact(x, ctx.bound, ctx.max_steps))
    return _verdict(got == expected, f"f = {expected}, ATM output = {got}")


SweepFn = Callable[[int, SweepContext], tuple[Outcome, str]]

SWEEPS: dict[str, SweepFn] = {
    "diag g": _diag_g,
    "pr h": _pr_h,
    "halt semi": _halt_semi,
    "halt exact": _halt_exact,
    "ittm decide": _ittm_decide,
    "atm halting": _atm_halting,
}


def _row(fn: SweepFn, x: int, ctx: SweepContext) -> SweepRow:
    try:
        outcome, detail = fn(x, ctx)
    except OutOfSpaceError as e:
        return SweepRow(x=x, outcome="out-of-space", detail=str(e))
    except DeciderLimitError as e:
        return SweepRow(x=x, outcome="unknown", detail=str(e))
    except ResourceExhausted as e:
        return SweepRow(x=x, outcome="unknown", detail=str(e))
    except WriteOnceViolation as e:
        return SweepRow(x=x, outcome="disagree", detail=str(e))
    return SweepRow(x=x, outcome=outcome, detail=detail)


def sweep(
    command: str, indices: range | str, ctx: SweepContext | None = None, *, workers: int = 4
) -> SweepReport:
    """Run one cross-check per index on worker threads; rows come back in index order."""
    try:
        fn = SWEEPS[" ".join(command.split())]
    except KeyError:
        raise SweepCommandError(
            f"Cannot sweep {command!r}; choose one of: {', '.join(SWEEPS)}."
        ) from None
    if isinstance(indices, str):
        indices = parse_range(indices)
    if len(indices) == 0:
        raise SweepRangeError(f"{indices.start}..{indices.stop}", "range is empty")
    ctx = ctx or SweepContext()

    with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
        futures = [ex.submit(_row, fn, x, ctx) for x in indices]
        rows = tuple(f.result() for f in futures)

    counts = {"agree": 0, "disagree": 0, "unknown": 0, "out-of-space": 0}
    for row in rows:
        counts[row.outcome] += 1
    summary = SweepSummary(
        agree=counts["agree"],
        disagree=counts["disagree"],
        unknown=counts["unknown"],
        out_of_space=counts["out-of-space"],
    )
    _LOGGER.info("Sweep %r over %s..%s: %s", command, indices.start, indices.stop, summary)
    return SweepReport(
        command=" ".join(command.split()),
        range=f"{indices.start}..{indices.stop}",
        rows=rows,
        summary=summary,
    )
