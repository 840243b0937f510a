from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import ClassVar, Literal

from diagforge.core.machines.halting import (
    DEFAULT_BOUND,
    DEFAULT_BUDGET,
    DEFAULT_MAX_STEPS,
    decide_spec,
    explore,
    semi_decide_spec,
)
from diagforge.core.machines.numbering import decode_tm
from diagforge.core.machines.tm import BLANK, ONE, DenseRun, SparseRun, TmSpec
from diagforge.core.machines.tm_format import parse_tm
from diagforge.core.models import (
    DeciderLimitError,
    DivergesProven,
    Halts,
    OutOfSpaceError,
    SpaceBound,
)
from diagforge.core.pairing import pair, unpair

_LOGGER = logging.getLogger(__name__)

OUTPUT_CELL = 0

# Input 0 marks the output square, any other input leaves it blank.
NEGATION_TABLE = """\
start: q0
halt: halt
q0 _ -> r _ L
r 1 -> t 1 L
t 1 -> halt 1 S
t _ -> m _ R
m 1 -> m2 1 R
m2 _ -> halt 1 S
"""


class AtmProgramError(ValueError):
    pass


class WriteOnceViolation(RuntimeError):
    def __init__(self, step: int, symbol: str) -> None:
        super().__init__(
            f"Output square rewritten with {symbol!r} at step {step} after it was marked."
        )
        self.step = step
        self.symbol = symbol


@dataclass(frozen=True)
class Marked:
    kind: ClassVar[str] = "marked"
    step: int


@dataclass(frozen=True)
class UnmarkedAtBudget:
    kind: ClassVar[str] = "unmarked-at-budget"
    budget: int


@dataclass(frozen=True)
class UnmarkedProven:
    kind: ClassVar[str] = "unmarked-proven"
    certificate: Halts | DivergesProven


AtmVerdict = Marked | UnmarkedAtBudget | UnmarkedProven


def verdict_value(verdict: AtmVerdict) -> int | None:
    if isinstance(verdict, Marked):
        return 1
    if isinstance(verdict, UnmarkedProven):
        return 0
    return None


class AtmProgram(ABC):
    """An accelerating machine whose answer is its write-once output square."""

    @property
    @abstractmethod
    def name(self) -> str:
        raise NotImplementedError

    @abstractmethod
    def run_semi(self, value: int | None, budget: int) -> AtmVerdict:
        raise NotImplementedError

    @abstractmethod
    def run_exact(self, value: int | None, bound: SpaceBound, max_steps: int) -> AtmVerdict:
        raise NotImplementedError

    @abstractmethod
    def internal_answer(
        self, value: int | None, bound: SpaceBound, max_steps: int
    ) -> Halts | DivergesProven:
        """Whether the internal timescale is finite on this input."""
        raise NotImplementedError

    def halts_uniformly_beyond(self, n: int, answer: Halts) -> bool:
        """Whether halting on input n within `answer.steps` carries over to every larger input."""
        return False


class _OutputSquare:
    def __init__(self) -> None:
        self.marked_at: int | None = None

    def check(self, step: int, current: str, written: str) -> None:
        if current == ONE and written != ONE:
            raise WriteOnceViolation(step, written)
        if current != ONE and written == ONE and self.marked_at is None:
            self.marked_at = step


class TableAtm(AtmProgram):
    """A transition table run directly; cell 0 is the output square."""

    def __init__(self, spec: TmSpec, name: str = "table") -> None:
        extra = set(spec.alphabet) - {BLANK, ONE}
        if extra or spec.blank != BLANK:
            raise AtmProgramError(f"ATM alphabet must be {{_, 1}}, got {list(spec.alphabet)}.")
        self.spec = spec
        self._name = name

    @property
    def name(self) -> str:
        return self._name

    def run_semi(self, value: int | None, budget: int) -> AtmVerdict:
        run = SparseRun.from_input(self.spec, value)
        square = _OutputSquare()
        while True:
            rule = run.pending_rule()
            if rule is None:
                break
            if run.steps >= budget:
                break
            if run.head == OUTPUT_CELL:
                square.check(run.steps + 1, run.tape.get(OUTPUT_CELL, BLANK), rule.write)
            run.step()
        if square.marked_at is not None:
            return Marked(step=square.marked_at)
        if rule is None:
            return UnmarkedProven(certificate=Halts(steps=run.steps, output=run.output()))
        return UnmarkedAtBudget(budget=budget)

    def _explore(
        self, value: int | None, bound: SpaceBound, max_steps: int, square: _OutputSquare
    ) -> Halts | DivergesProven:
        run = DenseRun.from_input(self.spec, value, bound)
        symbols = self.spec.alphabet

        def watch(r: DenseRun) -> None:
            if r.head == OUTPUT_CELL:
                action = r.pending()
                assert action is not None
                square.check(r.steps + 1, r.cell(OUTPUT_CELL), symbols[action[1]])

        return explore(run, max_steps=max_steps, before_step=watch)

    def run_exact(self, value: int | None, bound: SpaceBound, max_steps: int) -> AtmVerdict:
        square = _OutputSquare()
        try:
            answer = self._explore(value, bound, max_steps, square)
        except (OutOfSpaceError, DeciderLimitError):
            # A mark is final even if the rest of the run cannot be decided.
            if square.marked_at is None:
                raise
            return Marked(step=square.marked_at)
        if square.marked_at is not None:
            return Marked(step=square.marked_at)
        return UnmarkedProven(certificate=answer)

    def internal_answer(
        self, value: int | None, bound: SpaceBound, max_steps: int
    ) -> Halts | DivergesProven:
        return self._explore(value, bound, max_steps, _OutputSquare())

    def halts_uniformly_beyond(self, n: int, answer: Halts) -> bool:
        # Within n + 1 steps the head never reads past the leftmost input cell,
        # so every longer input replays the same run.
        return answer.steps <= n + 1


class HaltingAtm(AtmProgram):
    """Simulates a machine on normal squares and marks the output square when it halts.

    With no fixed target the machine with index n is simulated on n, which makes
    this the halting-problem ATM.
    """

    def __init__(self, target: TmSpec | None = None, name: str | None = None) -> None:
        self.target = target
        self._name = name or ("halting-problem" if target is None else "halting")

    @property
    def name(self) -> str:
        return self._name

    def _machine(self, value: int | None) -> TmSpec:
        if self.target is not None:
            return self.target
        return decode_tm(value or 0)

    def run_semi(self, value: int | None, budget: int) -> AtmVerdict:
        answer = semi_decide_spec(self._machine(value), value, budget)
        if isinstance(answer, Halts):
            return Marked(step=answer.steps + 1)
        return UnmarkedAtBudget(budget=budget)

    def run_exact(self, value: int | None, bound: SpaceBound, max_steps: int) -> AtmVerdict:
        answer = decide_spec(self._machine(value), value, bound, max_steps=max_steps)
        if isinstance(answer, Halts):
            return Marked(step=answer.steps + 1)
        return UnmarkedProven(certificate=answer)

    def internal_answer(
        self, value: int | None, bound: SpaceBound, max_steps: int
    ) -> Halts | DivergesProven:
        answer = decide_spec(self._machine(value), value, bound, max_steps=max_steps)
        if isinstance(answer, Halts):
            return Halts(steps=answer.steps + 1, output=1)
        return answer

    def halts_uniformly_beyond(self, n: int, answer: Halts) -> bool:
        # Only a fixed target runs the same table on every input.
        return self.target is not None and answer.steps - 1 <= n + 1


class SelfApplicationAtm(AtmProgram):
    """Input x: runs the table ATM with index x on x and marks iff it marks."""

    name = "self-application"

    def run_semi(self, value: int | None, budget: int) -> AtmVerdict:
        x = value or 0
        return TableAtm(decode_tm(x)).run_semi(x, budget)

    def run_exact(self, value: int | None, bound: SpaceBound, max_steps: int) -> AtmVerdict:
        x = value or 0
        return TableAtm(decode_tm(x)).run_exact(x, bound, max_steps)

    def internal_answer(
        self, value: int | None, bound: SpaceBound, max_steps: int
    ) -> Halts | DivergesProven:
        x = value or 0
        return TableAtm(decode_tm(x)).internal_answer(x, bound, max_steps)


class UniversalAtm(AtmProgram):
    """Input pair(x, n): runs the table ATM with index x on n and marks iff it marks."""

    name = "universal"

    def _split(self, value: int | None) -> tuple[TableAtm, int]:
        x, n = unpair(value or 0)
        return TableAtm(decode_tm(x), name=f"atm-{x}"), n

    def run_semi(self, value: int | None, budget: int) -> AtmVerdict:
        inner, n = self._split(value)
        return inner.run_semi(n, budget)

    def run_exact(self, value: int | None, bound: SpaceBound, max_steps: int) -> AtmVerdict:
        inner, n = self._split(value)
        return inner.run_exact(n, bound, max_steps)

    def internal_answer(
        self, value: int | None, bound: SpaceBound, max_steps: int
    ) -> Halts | DivergesProven:
        inner, n = self._split(value)
        return inner.internal_answer(n, bound, max_steps)


def atm_run(
    prog: AtmProgram,
    value: int | None,
    budget: int = DEFAULT_BUDGET,
    bound: SpaceBound | None = None,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> AtmVerdict:
    if bound is None:
        verdict = prog.run_semi(value, budget)
    else:
        verdict = prog.run_exact(value, bound, max_steps)
    _LOGGER.debug("ATM %s on %s: %s", prog.name, value, verdict)
    return verdict


def re_characteristic(
    enumerator: TmSpec,
    n: int,
    budget: int = DEFAULT_BUDGET,
    bound: SpaceBound | None = None,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> AtmVerdict:
    prog = HaltingAtm(enumerator, name="re-characteristic")
    return atm_run(prog, n, budget, bound, max_steps=max_steps)


def universal_atm_run(
    x: int,
    value: int,
    budget: int = DEFAULT_BUDGET,
    bound: SpaceBound | None = None,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> AtmVerdict:
    return atm_run(UniversalAtm(), pair(x, value), budget, bound, max_steps=max_steps)


EXTERNAL_TIME_REASON = "output square only settles at external time"
UNCERTIFIED_REASON = "internal finiteness not certified"


@dataclass(frozen=True)
class CompositionCheck:
    kind: ClassVar[str] = "composition-check"
    first: str
    second: str
    accepted: bool
    reason: str
    probes: tuple[int, ...]
    max_internal_steps: int | None = None
    witness_input: int | None = None
    witness: Halts | DivergesProven | None = None


def compose_check(
    first: AtmProgram,
    second: AtmProgram,
    probes: Iterable[int] = range(8),
    bound: SpaceBound = DEFAULT_BOUND,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> CompositionCheck:
    """Accept `second . first` only when `first` is certified finite on every input.

    Every probe must halt internally, and some probe n must halt in a way that carries
    over to all inputs above n while every input below n is itself a probe.
    """
    probes = tuple(probes)
    diverging: tuple[int, DivergesProven] | None = None
    uncertified: int | None = None
    halted: dict[int, Halts] = {}
    for n in probes:
        try:
            answer = first.internal_answer(n, bound, max_steps)
        except (OutOfSpaceError, DeciderLimitError) as e:
            _LOGGER.debug("Probe %s of %s not certified: %s", n, first.name, e)
            if uncertified is None:
                uncertified = n
            continue
        if isinstance(answer, DivergesProven):
            if diverging is None:
                diverging = (n, answer)
        else:
            halted[n] = answer

    def rejected(
        reason: str,
        witness_input: int | None = None,
        witness: DivergesProven | None = None,
    ) -> CompositionCheck:
        return CompositionCheck(
            first=first.name,
            second=second.name,
            accepted=False,
            reason=reason,
            probes=probes,
            witness_input=witness_input,
            witness=witness,
        )

    if diverging is not None:
        return rejected(EXTERNAL_TIME_REASON, diverging[0], witness=diverging[1])
    if uncertified is not None:
        return rejected(UNCERTIFIED_REASON, uncertified)
    covered = set(probes)
    uniform = next(
        (
            n
            for n in sorted(halted)
            if covered.issuperset(range(n)) and first.halts_uniformly_beyond(n, halted[n])
        ),
        None,
    )
    if uniform is None:
        _LOGGER.debug("%s halts on every probe but none carries over to larger inputs", first.name)
        return rejected(UNCERTIFIED_REASON)
    longest = max(a.steps for n, a in halted.items() if n <= uniform)
    return CompositionCheck(
        first=first.name,
        second=second.name,
        accepted=True,
        reason=(
            f"first stage halts internally within {longest} steps on every input "
            f"(uniform from input {uniform})"
        ),
        probes=probes,
        max_internal_steps=longest,
    )


@dataclass
class ComposedAtm(AtmProgram):
    """`second . first`; the first stage's answer is handed over on normal squares."""

    first: AtmProgram
    second: AtmProgram
    check: CompositionCheck = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.second.name}.{self.first.name}"

    def _handover(self, verdict: AtmVerdict) -> int:
        value = verdict_value(verdict)
        if value is None:
            raise AtmProgramError(f"First stage {self.first.name} did not settle: {verdict}.")
        return value

    def run_semi(self, value: int | None, budget: int) -> AtmVerdict:
        return self.second.run_semi(self._handover(self.first.run_semi(value, budget)), budget)

    def run_exact(self, value: int | None, bound: SpaceBound, max_steps: int) -> AtmVerdict:
        mid = self._handover(self.first.run_exact(value, bound, max_steps))
        return self.second.run_exact(mid, bound, max_steps)

    def internal_answer(
        self, value: int | None, bound: SpaceBound, max_steps: int
    ) -> Halts | DivergesProven:
        head = self.first.internal_answer(value, bound, max_steps)
        if isinstance(head, DivergesProven):
            return head
        mid = self._handover(self.first.run_exact(value, bound, max_steps))
        tail = self.second.internal_answer(mid, bound, max_steps)
        if isinstance(tail, DivergesProven):
            return DivergesProven(
                cycle_start=head.steps + tail.cycle_start, cycle_length=tail.cycle_length
            )
        return Halts(steps=head.steps + tail.steps, output=tail.output)


def compose(
    first: AtmProgram,
    second: AtmProgram,
    probes: Iterable[int] = range(8),
    bound: SpaceBound = DEFAULT_BOUND,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> ComposedAtm:
    check = compose_check(first, second, probes, bound, max_steps=max_steps)
    if not check.accepted:
        raise AtmProgramError(f"Cannot compose {second.name} after {first.name}: {check.reason}.")
    return ComposedAtm(first, second, check)


@dataclass(frozen=True)
class InternalHaltReport:
    kind: ClassVar[str] = "internal-halt"
    program: str
    answer: Halts | DivergesProven
    tier: Literal["atm", "exact-decider"]


def internal_halt_query(
    prog: AtmProgram,
    value: int | None,
    bound: SpaceBound = DEFAULT_BOUND,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> InternalHaltReport:
    """Answer whether `prog` halts internally, labelled with the tier entitled to the answer.

    The exact decider computes every answer here. A `Halts` answer is labelled `atm`
    because an ATM can observe the halt at a finite internal step; a `DivergesProven`
    answer is always labelled `exact-decider`.
    """
    answer = prog.internal_answer(value, bound, max_steps)
    tier: Literal["atm", "exact-decider"] = "atm" if isinstance(answer, Halts) else "exact-decider"
    return InternalHaltReport(program=prog.name, answer=answer, tier=tier)


def negation_atm() -> TableAtm:
    return TableAtm(parse_tm(NEGATION_TABLE), name="negation")
