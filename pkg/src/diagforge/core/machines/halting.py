from __future__ import annotations

import logging
from collections.abc import Callable, Generator, Hashable, Iterator, Mapping
from dataclasses import dataclass
from typing import ClassVar, Literal, TypeVar

from diagforge.core.machines.numbering import decode_tm
from diagforge.core.machines.tm import DenseRun, Halted, SparseRun, TmSpec, run_bounded
from diagforge.core.models import (
    DeciderLimitError,
    DivergesProven,
    Halts,
    OutOfSpaceError,
    SpaceBound,
    Tier,
    Unknown,
)

_LOGGER = logging.getLogger(__name__)

DEFAULT_BUDGET = 100_000
DEFAULT_BOUND = SpaceBound(16)
DEFAULT_MAX_STEPS = 10_000_000

K = TypeVar("K", bound=Hashable)


def explore(
    run: DenseRun,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
    before_step: Callable[[DenseRun], None] | None = None,
) -> Halts | DivergesProven:
    """Drive a dense run until it halts or provably cycles (Brent's algorithm).

    Step counts in the answer are relative to the run's position on entry.
    `before_step` sees every configuration that is about to take a transition.
    """
    steps = _exploring(run, max_steps=max_steps, before_step=before_step)
    while True:
        try:
            next(steps)
        except StopIteration as done:
            return done.value


def _exploring(
    run: DenseRun,
    *,
    max_steps: int,
    before_step: Callable[[DenseRun], None] | None = None,
) -> Generator[None, None, Halts | DivergesProven]:
    # Yields once per transition taken, so callers can interleave the search.
    origin = run.clone()
    start = run.steps
    tortoise = run.key()
    power = lam = 1
    while True:
        if run.halted:
            return Halts(steps=run.steps - start, output=run.output())
        if run.steps - start >= max_steps:
            raise DeciderLimitError(max_steps)
        if before_step is not None:
            before_step(run)
        run.step()
        yield
        if run.matches(tortoise):
            break
        if power == lam:
            tortoise = run.key()
            power *= 2
            lam = 0
        lam += 1

    hare = origin.clone()
    advance(hare, lam)
    mu = 0
    while not hare.matches(origin.key()):
        origin.step()
        hare.step()
        mu += 1
        yield
    return DivergesProven(cycle_start=mu, cycle_length=lam)


def advance(run: DenseRun, n: int) -> DenseRun:
    for _ in range(n):
        run.step()
    return run


def semi_decide_halt(x: int, y: int | None, budget: int = DEFAULT_BUDGET) -> Halts | Unknown:
    return semi_decide_spec(decode_tm(x), y, budget)


def semi_decide_spec(spec: TmSpec, y: int | None, budget: int = DEFAULT_BUDGET) -> Halts | Unknown:
    outcome = run_bounded(spec, y, budget)
    if isinstance(outcome, Halted):
        return Halts(steps=outcome.steps, output=outcome.output)
    return outcome


def decide_spec(
    spec: TmSpec,
    y: int | None,
    bound: SpaceBound = DEFAULT_BOUND,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> Halts | DivergesProven:
    answer = explore(DenseRun.from_input(spec, y, bound), max_steps=max_steps)
    _LOGGER.debug("Exact tier on input %s at s=%s: %s", y, bound.s, answer)
    return answer


def lba_halt_decide(
    x: int,
    y: int | None,
    bound: SpaceBound = DEFAULT_BOUND,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> Halts | DivergesProven:
    return decide_spec(decode_tm(x), y, bound, max_steps=max_steps)


def halting_f(
    x: int,
    y: int | None,
    tier: Tier,
    *,
    budget: int = DEFAULT_BUDGET,
    bound: SpaceBound = DEFAULT_BOUND,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> int | Unknown:
    if tier == "semi":
        answer: Halts | DivergesProven | Unknown = semi_decide_halt(x, y, budget)
    elif tier == "exact":
        answer = lba_halt_decide(x, y, bound, max_steps=max_steps)
    else:
        raise ValueError(f"Unknown tier {tier!r}.")
    if isinstance(answer, Halts):
        return 1
    if isinstance(answer, DivergesProven):
        return 0
    return answer


@dataclass(frozen=True)
class DiagonalValue:
    kind: ClassVar[str] = "value"
    value: int
    certificate: DivergesProven


@dataclass(frozen=True)
class DivergesMarker:
    kind: ClassVar[str] = "diverges-marker"
    certificate: Halts


def diagonal_g(
    x: int,
    bound: SpaceBound = DEFAULT_BOUND,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> DiagonalValue | DivergesMarker:
    answer = lba_halt_decide(x, x, bound, max_steps=max_steps)
    if isinstance(answer, DivergesProven):
        return DiagonalValue(value=0, certificate=answer)
    return DivergesMarker(certificate=answer)


def verify_halt_certificate(spec: TmSpec, y: int | None, answer: Halts) -> bool:
    run = SparseRun.from_input(spec, y)
    for _ in range(answer.steps):
        if not run.step():
            return False
    return run.pending_rule() is None and run.output() == answer.output


def verify_divergence_certificate(
    spec: TmSpec, y: int | None, bound: SpaceBound, answer: DivergesProven
) -> bool:
    if answer.cycle_length < 1:
        return False
    try:
        run = DenseRun.from_input(spec, y, bound)
        for _ in range(answer.cycle_start):
            if run.halted:
                return False
            run.step()
        mark = run.key()
        for _ in range(answer.cycle_length):
            if run.halted:
                return False
            run.step()
    except OutOfSpaceError:
        return False
    return run.matches(mark)


def dovetail(
    jobs: Mapping[K, tuple[TmSpec, int | None]], budget: int = DEFAULT_BUDGET
) -> Iterator[tuple[K, Halts]]:
    """Interleave bounded runs one step at a time, yielding each as it halts."""
    live = {key: SparseRun.from_input(spec, y) for key, (spec, y) in jobs.items()}
    for _ in range(budget + 1):
        if not live:
            return
        finished = []
        for key, run in live.items():
            if run.pending_rule() is None:
                finished.append(key)
                yield key, Halts(steps=run.steps, output=run.output())
        for key in finished:
            del live[key]
        for run in live.values():
            run.step()
    if live:
        _LOGGER.debug("Dovetailing stopped at budget %s with %s runs live", budget, len(live))


@dataclass(frozen=True)
class RaceReport:
    kind: ClassVar[str] = "race"
    x: int
    converged: Literal["machine", "g"]
    machine: Halts | Unknown
    g: DiagonalValue | DivergesMarker
    rounds: int

    @property
    def both_converged(self) -> bool:
        return isinstance(self.machine, Halts) and isinstance(self.g, DiagonalValue)


def race_diagonal(
    x: int,
    bound: SpaceBound = DEFAULT_BOUND,
    budget: int = DEFAULT_BUDGET,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> RaceReport:
    """Step machine x on x and the g decider in turn until one side converges.

    A halting machine settles g(x) as divergent on the spot. The machine stops
    taking steps once it has used `budget`; the decider runs to its own limit.
    """
    spec = decode_tm(x)
    machine = SparseRun.from_input(spec, x)
    decider = _exploring(DenseRun.from_input(spec, x, bound), max_steps=max_steps)
    rounds = 0
    while True:
        if machine.pending_rule() is None:
            halts = Halts(steps=machine.steps, output=machine.output())
            return RaceReport(
                x=x,
                converged="machine",
                machine=halts,
                g=DivergesMarker(certificate=halts),
                rounds=rounds,
            )
        try:
            next(decider)
        except StopIteration as done:
            answer: Halts | DivergesProven = done.value
            g = (
                DiagonalValue(value=0, certificate=answer)
                if isinstance(answer, DivergesProven)
                else DivergesMarker(certificate=answer)
            )
            still_running = Unknown(
                budget=machine.steps, reason="still running when the decider converged"
            )
            _LOGGER.debug("Race on %s settled by the decider after %s rounds", x, rounds)
            return RaceReport(x=x, converged="g", machine=still_running, g=g, rounds=rounds)
        rounds += 1
        if machine.steps < budget:
            machine.step()
