from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import ClassVar, Literal

from diagforge.core.models import (
    DivergesProven,
    NatValue,
    OutOfSpaceError,
    SpaceBound,
    Unknown,
    input_ones,
)

Move = Literal["L", "R", "S"]

BLANK = "_"
ONE = "1"
MOVES: tuple[Move, ...] = ("L", "R", "S")
_DELTA: dict[str, int] = {"L": -1, "R": 1, "S": 0}


@dataclass(frozen=True)
class Rule:
    state: str
    read: str
    next_state: str
    write: str
    move: Move


@dataclass(frozen=True)
class TmSpec:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    rules: tuple[Rule, ...]
    start: str
    halt: tuple[str, ...] = ()
    blank: str = BLANK

    def __post_init__(self) -> None:
        halt = tuple(dict.fromkeys(self.halt))
        states = tuple(dict.fromkeys(s for s in self.states if s not in halt)) + halt
        alphabet = tuple(dict.fromkeys((self.blank, ONE, *self.alphabet)))
        object.__setattr__(self, "halt", halt)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "alphabet", alphabet)

        if self.start not in states:
            raise ValueError(f"Start state {self.start!r} is not declared.")
        seen: set[tuple[str, str]] = set()
        for r in self.rules:
            for s in (r.state, r.next_state):
                if s not in states:
                    raise ValueError(f"Rule {r} references undeclared state {s!r}.")
            for sym in (r.read, r.write):
                if sym not in alphabet:
                    raise ValueError(f"Rule {r} references undeclared symbol {sym!r}.")
            if r.move not in _DELTA:
                raise ValueError(f"Rule {r} has invalid move {r.move!r}.")
            key = (r.state, r.read)
            if key in seen:
                raise ValueError(f"Duplicate rule for {key}.")
            seen.add(key)

        order = {s: i for i, s in enumerate(states)}
        sym_order = {s: i for i, s in enumerate(alphabet)}
        rules = tuple(sorted(self.rules, key=lambda r: (order[r.state], sym_order[r.read])))
        object.__setattr__(self, "rules", rules)

    @cached_property
    def table(self) -> dict[tuple[str, str], Rule]:
        return {(r.state, r.read): r for r in self.rules}

    def rule_for(self, state: str, symbol: str) -> Rule | None:
        if state in self.halt:
            return None
        return self.table.get((state, symbol))


@dataclass(frozen=True)
class TmConfig:
    tape: tuple[tuple[int, str], ...]
    head: int
    state: str
    steps: int = 0
    blank: str = BLANK

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise ValueError("Step count must be non-negative.")
        cells = dict(self.tape)
        object.__setattr__(
            self,
            "tape",
            tuple(sorted((c, s) for c, s in cells.items() if s != self.blank)),
        )

    def symbol_at(self, cell: int) -> str:
        for c, s in self.tape:
            if c == cell:
                return s
        return self.blank

    def count(self, symbol: str = ONE) -> int:
        return sum(1 for _, s in self.tape if s == symbol)


@dataclass(frozen=True)
class HaltSignal:
    config: TmConfig
    reason: Literal["halt-state", "no-transition"]


@dataclass(frozen=True)
class Halted:
    kind: ClassVar[str] = "halted"
    output: NatValue
    steps: int


@dataclass(frozen=True)
class Diverges:
    kind: ClassVar[str] = "diverges"
    witness: DivergesProven


RunOutcome = Halted | Diverges | Unknown


def input_tape(value: int | None) -> dict[int, str]:
    ones = input_ones(value)
    return {-c: ONE for c in range(1, ones + 1)}


def initial_config(spec: TmSpec, value: int | None) -> TmConfig:
    return TmConfig(
        tape=tuple(input_tape(value).items()),
        head=0,
        state=spec.start,
        blank=spec.blank,
    )


def step(spec: TmSpec, cfg: TmConfig) -> TmConfig | HaltSignal:
    if cfg.state in spec.halt:
        return HaltSignal(cfg, "halt-state")
    rule = spec.rule_for(cfg.state, cfg.symbol_at(cfg.head))
    if rule is None:
        return HaltSignal(cfg, "no-transition")
    cells = dict(cfg.tape)
    cells[cfg.head] = rule.write
    return TmConfig(
        tape=tuple(cells.items()),
        head=cfg.head + _DELTA[rule.move],
        state=rule.next_state,
        steps=cfg.steps + 1,
        blank=cfg.blank,
    )


class SparseRun:
    """Unbounded-tape run; the tape is a dict of non-blank cells."""

    def __init__(self, spec: TmSpec, config: TmConfig) -> None:
        self.spec = spec
        self.tape: dict[int, str] = dict(config.tape)
        self.head = config.head
        self.state = config.state
        self.steps = config.steps

    @classmethod
    def from_input(cls, spec: TmSpec, value: int | None) -> SparseRun:
        return cls(spec, initial_config(spec, value))

    def pending_rule(self) -> Rule | None:
        return self.spec.rule_for(self.state, self.tape.get(self.head, self.spec.blank))

    def step(self) -> bool:
        rule = self.pending_rule()
        if rule is None:
            return False
        if rule.write == self.spec.blank:
            self.tape.pop(self.head, None)
        else:
            self.tape[self.head] = rule.write
        self.head += _DELTA[rule.move]
        self.state = rule.next_state
        self.steps += 1
        return True

    def output(self) -> int:
        return sum(1 for s in self.tape.values() if s == ONE)

    def to_config(self) -> TmConfig:
        cells = tuple(self.tape.items())
        return TmConfig(cells, self.head, self.state, self.steps, self.spec.blank)


def run_bounded(spec: TmSpec, value: int | None, budget: int) -> Halted | Unknown:
    if budget < 0:
        raise ValueError("Budget must be non-negative.")
    run = SparseRun.from_input(spec, value)
    while True:
        if run.pending_rule() is None:
            return Halted(output=NatValue(run.output()), steps=run.steps)
        if run.steps >= budget:
            return Unknown(budget=budget)
        run.step()


class DenseRun:
    """Run confined to a bounded region, tape held as a bytearray of symbol indices.

    Configurations of a dense run are comparable by `key()`; the region plus the
    spec's finite state set make the configuration space finite.
    """

    def __init__(self, spec: TmSpec, config: TmConfig, lo: int, hi: int) -> None:
        if not lo <= config.head <= hi:
            raise OutOfSpaceError(step=config.steps, head=config.head, region=(lo, hi))
        self.spec = spec
        self.lo = lo
        self.hi = hi
        self._symbols = spec.alphabet
        sym_index = {s: i for i, s in enumerate(spec.alphabet)}
        self._blank = sym_index[spec.blank]
        self._one = sym_index[ONE]
        state_index = {s: i for i, s in enumerate(spec.states)}
        self._state_names = spec.states
        self._halting = frozenset(state_index[s] for s in spec.halt)
        table: list[list[tuple[int, int, int] | None]] = [
            [None] * len(spec.alphabet) for _ in spec.states
        ]
        for r in spec.rules:
            table[state_index[r.state]][sym_index[r.read]] = (
                state_index[r.next_state],
                sym_index[r.write],
                _DELTA[r.move],
            )
        self._table = table

        self.tape = bytearray([self._blank]) * (hi - lo + 1)
        for cell, sym in config.tape:
            if not lo <= cell <= hi:
                raise OutOfSpaceError(step=config.steps, head=cell, region=(lo, hi))
            self.tape[cell - lo] = sym_index[sym]
        self.head = config.head
        self.state = state_index[config.state]
        self.steps = config.steps

    @classmethod
    def from_input(cls, spec: TmSpec, value: int | None, bound: SpaceBound) -> DenseRun:
        lo, hi = bound.region(input_ones(value))
        return cls(spec, initial_config(spec, value), lo, hi)

    def clone(self) -> DenseRun:
        other = object.__new__(DenseRun)
        other.__dict__.update(self.__dict__)
        other.tape = bytearray(self.tape)
        return other

    @property
    def in_region(self) -> bool:
        return self.lo <= self.head <= self.hi

    def read(self) -> int:
        if not self.in_region:
            return self._blank
        return self.tape[self.head - self.lo]

    def pending(self) -> tuple[int, int, int] | None:
        if self.state in self._halting:
            return None
        return self._table[self.state][self.read()]

    @property
    def halted(self) -> bool:
        return self.pending() is None

    def step(self) -> None:
        if not self.in_region:
            raise OutOfSpaceError(step=self.steps, head=self.head, region=(self.lo, self.hi))
        action = self._table[self.state][self.tape[self.head - self.lo]]
        if action is None or self.state in self._halting:
            raise RuntimeError("step() called on a halted run.")
        nxt, write, delta = action
        self.tape[self.head - self.lo] = write
        self.head += delta
        self.state = nxt
        self.steps += 1

    def key(self) -> tuple[int, int, bytes]:
        return self.state, self.head, bytes(self.tape)

    def matches(self, key: tuple[int, int, bytes]) -> bool:
        return self.state == key[0] and self.head == key[1] and self.tape == key[2]

    def cell(self, cell: int) -> str:
        if not self.lo <= cell <= self.hi:
            return self._symbols[self._blank]
        return self._symbols[self.tape[cell - self.lo]]

    def set_cell(self, cell: int, symbol: str) -> None:
        self.tape[cell - self.lo] = self._symbols.index(symbol)

    @property
    def state_name(self) -> str:
        return self._state_names[self.state]

    def output(self) -> int:
        return self.tape.count(self._one)

    def to_config(self) -> TmConfig:
        cells = tuple(
            (self.lo + i, self._symbols[b]) for i, b in enumerate(self.tape) if b != self._blank
        )
        return TmConfig(cells, self.head, self.state_name, self.steps, self.spec.blank)
