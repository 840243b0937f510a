from __future__ import annotations

import logging
from dataclasses import dataclass

from diagforge.core.machines.halting import (
    DEFAULT_BOUND,
    DEFAULT_BUDGET,
    DEFAULT_MAX_STEPS,
    lba_halt_decide,
)
from diagforge.core.machines.tm import BLANK, ONE, Rule, SparseRun, TmSpec
from diagforge.core.models import Halts, SpaceBound, Unknown

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleMachine:
    """A table machine with one query state answered by the exact halting tier.

    In `query` the machine asks whether machine x halts on x, where x is the
    number of ones on the tape minus one, and moves to `yes` or `no` in one step.
    """

    spec: TmSpec
    query: str
    yes: str
    no: str
    bound: SpaceBound = DEFAULT_BOUND
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self) -> None:
        for s in (self.query, self.yes, self.no):
            if s not in self.spec.states:
                raise ValueError(f"O-machine state {s!r} is not declared.")
        if self.query in self.spec.halt or any(r.state == self.query for r in self.spec.rules):
            raise ValueError("The query state is answered by the oracle and cannot have rules.")

    def ask(self, ones: int) -> bool:
        if ones == 0:
            return False
        answer = lba_halt_decide(ones - 1, ones - 1, self.bound, max_steps=self.max_steps)
        _LOGGER.debug("Oracle query on %s: %s", ones - 1, answer)
        return isinstance(answer, Halts)


def run_o_machine(
    machine: OracleMachine, value: int | None, budget: int = DEFAULT_BUDGET
) -> Halts | Unknown:
    run = SparseRun.from_input(machine.spec, value)
    while True:
        if run.state == machine.query:
            if run.steps >= budget:
                return Unknown(budget=budget)
            run.state = machine.yes if machine.ask(run.output()) else machine.no
            run.steps += 1
            continue
        if run.pending_rule() is None:
            return Halts(steps=run.steps, output=run.output())
        if run.steps >= budget:
            return Unknown(budget=budget)
        run.step()


def _eraser(state: str, then: str, final: str) -> list[Rule]:
    # Erase the input block to the left of the head, then write `final` on the stop cell.
    return [
        Rule(state, BLANK, then, BLANK, "L"),
        Rule(then, ONE, then, BLANK, "L"),
        Rule(then, BLANK, "halt", final, "S"),
    ]


def negated_halting_o_machine(
    bound: SpaceBound = DEFAULT_BOUND, max_steps: int = DEFAULT_MAX_STEPS
) -> OracleMachine:
    """Outputs 1 - f(x, x): one query, then an unconditional branch on the answer."""
    rules = _eraser("yes", "erase-yes", BLANK) + _eraser("no", "erase-no", ONE)
    spec = TmSpec(
        states=("ask", "yes", "erase-yes", "no", "erase-no", "halt"),
        alphabet=(BLANK, ONE),
        rules=tuple(rules),
        start="ask",
        halt=("halt",),
    )
    return OracleMachine(spec, query="ask", yes="yes", no="no", bound=bound, max_steps=max_steps)
