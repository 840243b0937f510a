from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import ClassVar, Literal

from diagforge.core.machines.halting import DEFAULT_BOUND, DEFAULT_MAX_STEPS, advance, explore
from diagforge.core.machines.numbering import decode_tm
from diagforge.core.machines.tm import (
    BLANK,
    ONE,
    DenseRun,
    HaltSignal,
    TmConfig,
    TmSpec,
    initial_config,
    step,
)
from diagforge.core.models import (
    DeciderLimitError,
    DivergesProven,
    Halts,
    SpaceBound,
    Unknown,
    input_ones,
)

_LOGGER = logging.getLogger(__name__)

LimitRule = Literal["limsup", "liminf"]
LIMIT_RULES: tuple[LimitRule, ...] = ("limsup", "liminf")
LIMIT_STATE = "limit"
DEFAULT_CLOCK_CAP = 4


class ClockOverflow(RuntimeError):
    def __init__(self, cap: int) -> None:
        super().__init__(f"Ordinal clock passed the cap ω·{cap}.")
        self.cap = cap


@dataclass(frozen=True, order=True)
class OrdinalClock:
    """The ordinal ω·a + b."""

    a: int = 0
    b: int = 0

    def __post_init__(self) -> None:
        if self.a < 0 or self.b < 0:
            raise ValueError("Ordinal coefficients must be naturals.")

    def successor(self) -> OrdinalClock:
        return OrdinalClock(self.a, self.b + 1)

    def next_limit(self, cap: int = DEFAULT_CLOCK_CAP) -> OrdinalClock:
        if self.a + 1 > cap:
            raise ClockOverflow(cap)
        return OrdinalClock(self.a + 1, 0)

    def __str__(self) -> str:
        if self.a == 0:
            return str(self.b)
        head = "ω" if self.a == 1 else f"ω·{self.a}"
        return head if self.b == 0 else f"{head}+{self.b}"


def ittm_step(spec: TmSpec, cfg: TmConfig, clock: OrdinalClock) -> tuple[TmConfig, OrdinalClock]:
    result = step(spec, cfg)
    if isinstance(result, HaltSignal):
        return cfg, clock
    return result, clock.successor()


@dataclass(frozen=True)
class LimitResult:
    kind: ClassVar[str] = "limit"
    rule: LimitRule
    config: TmConfig
    certificate: Halts | DivergesProven


def limit_config(
    spec: TmSpec,
    bound: SpaceBound = DEFAULT_BOUND,
    rule: LimitRule = "limsup",
    *,
    value: int | None = None,
    start: TmConfig | None = None,
    region: tuple[int, int] | None = None,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> LimitResult | Unknown:
    """The configuration at stage ω of a run from `start` (or from input `value`).

    `region` defaults to the bounded region of input `value`.

    A halted run freezes, so its limit is its halt configuration. Otherwise the run
    is eventually periodic and every cell's cofinal values are exactly the values it
    takes on the detected cycle.
    """
    if rule not in LIMIT_RULES:
        raise ValueError(f"Unknown limit rule {rule!r}.")
    if start is None:
        start = initial_config(spec, value)
    lo, hi = region if region is not None else bound.region(input_ones(value))

    try:
        answer = explore(DenseRun(spec, start, lo, hi), max_steps=max_steps)
    except DeciderLimitError as e:
        return Unknown(budget=e.limit, reason="no cycle found within the step cap")
    if isinstance(answer, Halts):
        frozen = advance(DenseRun(spec, start, lo, hi), answer.steps).to_config()
        return LimitResult(rule=rule, config=frozen, certificate=answer)

    run = advance(DenseRun(spec, start, lo, hi), answer.cycle_start)
    seen: dict[int, set[str]] = {}
    for _ in range(answer.cycle_length):
        cell = run.head
        seen.setdefault(cell, {run.cell(cell)})
        run.step()
        seen[cell].add(run.cell(cell))

    fallback = ONE if rule == "limsup" else spec.blank
    cells = {c: s for c, s in run.to_config().tape}
    for cell, values in seen.items():
        cells[cell] = next(iter(values)) if len(values) == 1 else fallback
    config = TmConfig(tuple(cells.items()), head=0, state=LIMIT_STATE, steps=0, blank=spec.blank)
    return LimitResult(rule=rule, config=config, certificate=answer)


def verify_limit_certificate(
    spec: TmSpec,
    bound: SpaceBound,
    result: LimitResult,
    *,
    value: int | None = None,
) -> bool:
    """Replay one full cycle from snapshots and recompute every cell's cofinal values."""
    start = initial_config(spec, value)
    lo, hi = bound.region(input_ones(value))
    if isinstance(result.certificate, Halts):
        run = advance(DenseRun(spec, start, lo, hi), result.certificate.steps)
        return run.halted and run.to_config() == result.config

    cert = result.certificate
    run = advance(DenseRun(spec, start, lo, hi), cert.cycle_start)
    mark = run.key()
    snapshots = []
    for _ in range(cert.cycle_length):
        snapshots.append([run.cell(c) for c in range(lo, hi + 1)])
        run.step()
    if not run.matches(mark):
        return False

    fallback = ONE if result.rule == "limsup" else spec.blank
    expected = []
    for i, cell in enumerate(range(lo, hi + 1)):
        values = {snap[i] for snap in snapshots}
        sym = next(iter(values)) if len(values) == 1 else fallback
        if sym != spec.blank:
            expected.append((cell, sym))
    return (
        result.config.tape == tuple(expected)
        and result.config.head == 0
        and result.config.state == LIMIT_STATE
    )


@dataclass(frozen=True)
class IttmDecision:
    kind: ClassVar[str] = "ittm-decision"
    x: int
    rule: LimitRule
    value: int
    flag: str
    flag_cell: int
    stage: OrdinalClock
    certificate: Halts | DivergesProven
    tape: TmConfig


FlagPolarity = tuple[str, str]


def _flag_polarity(rule: LimitRule) -> FlagPolarity:
    # (initial, written on halt); the flag starts on the side the limit rule does not favour.
    return (BLANK, ONE) if rule == "limsup" else (ONE, BLANK)


def _with_cell(cfg: TmConfig, cell: int, symbol: str) -> TmConfig:
    return replace(cfg, tape=(*cfg.tape, (cell, symbol)))


def run_halting_decider(
    x: int,
    bound: SpaceBound = DEFAULT_BOUND,
    rule: LimitRule = "limsup",
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
    polarity: FlagPolarity | None = None,
) -> IttmDecision:
    """Simulate machine x on x next to a flag cell and read the flag at stage ω.

    The flag sits one cell past the bounded region, so the simulation never reaches it.
    A halting simulation writes it and stops at a finite stage; otherwise the decision
    is whatever `limit_config` leaves on the flag cell.
    """
    initial, on_halt = polarity if polarity is not None else _flag_polarity(rule)
    spec = decode_tm(x)
    lo, hi = bound.region(input_ones(x))
    flag_cell = hi + 1
    answer = explore(DenseRun.from_input(spec, x, bound), max_steps=max_steps)
    if isinstance(answer, Halts):
        halted = advance(DenseRun.from_input(spec, x, bound), answer.steps).to_config()
        tape = _with_cell(halted, flag_cell, on_halt)
        stage = OrdinalClock(0, answer.steps + 1)
    else:
        start = _with_cell(initial_config(spec, x), flag_cell, initial)
        limit = limit_config(
            spec, bound, rule, start=start, region=(lo, flag_cell), max_steps=max_steps
        )
        if isinstance(limit, Unknown):
            raise DeciderLimitError(limit.budget)
        tape = limit.config
        stage = OrdinalClock(1, 0)
    flag = tape.symbol_at(flag_cell)
    decision = IttmDecision(
        x=x,
        rule=rule,
        value=1 if flag == on_halt else 0,
        flag=flag,
        flag_cell=flag_cell,
        stage=stage,
        certificate=answer,
        tape=tape,
    )
    _LOGGER.debug("ITTM decision for %s under %s: %s at stage %s", x, rule, decision.value, stage)
    return decision


def ittm_decide_halting(
    x: int,
    bound: SpaceBound = DEFAULT_BOUND,
    rule: LimitRule = "limsup",
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> int:
    return run_halting_decider(x, bound, rule, max_steps=max_steps).value


@dataclass(frozen=True)
class BiasReport:
    kind: ClassVar[str] = "bias-invariance"
    x: int
    limsup: int
    liminf: int
    agree: bool
    differing_cells: tuple[int, ...]


def bias_invariance_check(
    x: int, bound: SpaceBound = DEFAULT_BOUND, *, max_steps: int = DEFAULT_MAX_STEPS
) -> BiasReport:
    up = run_halting_decider(x, bound, "limsup", max_steps=max_steps)
    down = run_halting_decider(x, bound, "liminf", max_steps=max_steps)
    up_cells, down_cells = dict(up.tape.tape), dict(down.tape.tape)
    differing = tuple(
        sorted(
            c
            for c in up_cells.keys() | down_cells.keys()
            if c != up.flag_cell
            and up_cells.get(c, BLANK) != down_cells.get(c, BLANK)
        )
    )
    return BiasReport(
        x=x,
        limsup=up.value,
        liminf=down.value,
        agree=up.value == down.value,
        differing_cells=differing,
    )


@dataclass(frozen=True)
class IttmHalted:
    kind: ClassVar[str] = "ittm-halted"
    clock: OrdinalClock
    output: int


@dataclass(frozen=True)
class IttmLoops:
    kind: ClassVar[str] = "ittm-loops"
    clock: OrdinalClock
    repeats: OrdinalClock


IttmOutcome = IttmHalted | IttmLoops | Unknown


def run_ittm(
    spec: TmSpec,
    value: int | None,
    bound: SpaceBound = DEFAULT_BOUND,
    rule: LimitRule = "limsup",
    clock_cap: int = DEFAULT_CLOCK_CAP,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> IttmOutcome:
    """Run through successive limit stages up to ω·clock_cap.

    A limit configuration seen twice means the run loops through every later limit.
    """
    region = bound.region(input_ones(value))
    cfg = initial_config(spec, value)
    clock = OrdinalClock()
    seen: dict[TmConfig, OrdinalClock] = {}
    while True:
        limit = limit_config(spec, bound, rule, start=cfg, region=region, max_steps=max_steps)
        if isinstance(limit, Unknown):
            return limit
        if isinstance(limit.certificate, Halts):
            return IttmHalted(
                clock=OrdinalClock(clock.a, limit.certificate.steps),
                output=limit.config.count(ONE),
            )
        try:
            clock = clock.next_limit(clock_cap)
        except ClockOverflow:
            return Unknown(budget=clock_cap, reason="ordinal clock cap reached")
        if LIMIT_STATE not in spec.states or LIMIT_STATE in spec.halt:
            return IttmHalted(clock=clock, output=limit.config.count(ONE))
        if limit.config in seen:
            return IttmLoops(clock=clock, repeats=seen[limit.config])
        seen[limit.config] = clock
        cfg = replace(limit.config, steps=0)
