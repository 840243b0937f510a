from dataclasses import replace

import pytest

from diagforge.core.machines import ittm
from diagforge.core.machines.halting import halting_f
from diagforge.core.machines.ittm import (
    LIMIT_RULES,
    ClockOverflow,
    IttmHalted,
    IttmLoops,
    LimitResult,
    OrdinalClock,
    bias_invariance_check,
    ittm_decide_halting,
    ittm_step,
    limit_config,
    run_halting_decider,
    run_ittm,
    verify_limit_certificate,
)
from diagforge.core.machines.numbering import decode_tm
from diagforge.core.machines.tm import TmConfig, TmSpec, initial_config
from diagforge.core.machines.tm_format import parse_tm
from diagforge.core.models import DivergesProven, Halts, OutOfSpaceError, SpaceBound, Unknown

SMALL = SpaceBound(8)
FLIPPER = "start: q0\nq0 _ -> q0 1 S\nq0 1 -> q0 _ S\n"
FLIPPER_LOOPING = FLIPPER + "limit 1 -> q0 1 S\nlimit _ -> q0 _ S\n"
FLIPPER_HALTING = "start: q0\nhalt: h\nq0 _ -> q0 1 S\nq0 1 -> q0 _ S\nlimit 1 -> h 1 R\n"


def test_ordinal_clock() -> None:
    assert str(OrdinalClock(0, 5)) == "5"
    assert str(OrdinalClock(1, 0)) == "ω"
    assert str(OrdinalClock(2, 3)) == "ω·2+3"
    assert OrdinalClock(0, 10**6) < OrdinalClock(1, 0)
    assert OrdinalClock(1, 4).next_limit() == OrdinalClock(2, 0)
    with pytest.raises(ClockOverflow):
        OrdinalClock(2, 0).next_limit(cap=2)


def test_ittm_step_freezes_on_halt() -> None:
    spec = decode_tm(0)
    cfg = initial_config(spec, 1)
    assert ittm_step(spec, cfg, OrdinalClock(0, 3)) == (cfg, OrdinalClock(0, 3))


def test_decider_examples_under_both_rules() -> None:
    for rule in LIMIT_RULES:
        halting = run_halting_decider(0, SMALL, rule)
        assert halting.value == 1
        assert halting.stage == OrdinalClock(0, 1)

        looping = run_halting_decider(3, SMALL, rule)
        assert looping.value == 0
        assert looping.stage == OrdinalClock(1, 0)
        assert isinstance(looping.certificate, DivergesProven)

    assert run_halting_decider(0, SMALL, "limsup").flag == "1"
    assert run_halting_decider(0, SMALL, "liminf").flag == "_"


def test_decision_reads_the_flag_cell_at_omega() -> None:
    up = run_halting_decider(3, SMALL, "limsup")
    down = run_halting_decider(3, SMALL, "liminf")
    assert up.flag_cell == down.flag_cell == 8
    assert up.tape.symbol_at(8) == "_"
    assert down.tape.symbol_at(8) == "1"
    assert down.tape.state == "limit"

    halted = run_halting_decider(0, SMALL, "liminf")
    assert halted.flag_cell == 8
    assert halted.tape.symbol_at(8) == "_"


def test_flag_starting_on_the_halt_side_flips_the_decision() -> None:
    assert run_halting_decider(3, SMALL, "liminf").value == 0
    wrong = run_halting_decider(3, SMALL, "liminf", polarity=("_", "_"))
    assert wrong.value == 1
    assert wrong.flag == "_"


def test_decision_follows_the_limit_configuration(monkeypatch: pytest.MonkeyPatch) -> None:
    def saturated(spec: TmSpec, *args: object, **kwargs: object) -> LimitResult:
        ones = tuple((c, "1") for c in range(-5, 9))
        return LimitResult(
            rule="limsup",
            config=TmConfig(ones, head=0, state="limit"),
            certificate=DivergesProven(cycle_start=0, cycle_length=1),
        )

    monkeypatch.setattr(ittm, "limit_config", saturated)
    assert run_halting_decider(3, SMALL, "limsup").value == 1
    assert run_halting_decider(3, SMALL, "liminf").value == 0
    report = bias_invariance_check(3, SMALL)
    assert not report.agree
    assert report.differing_cells == ()


@pytest.mark.slow
def test_decider_agrees_with_the_exact_tier() -> None:
    decided = 0
    for x in range(500):
        try:
            exact = halting_f(x, x, "exact", bound=SMALL)
        except OutOfSpaceError:
            continue
        for rule in LIMIT_RULES:
            assert ittm_decide_halting(x, SMALL, rule) == exact
        decided += 1
    assert decided > 0


@pytest.mark.slow
def test_decision_is_bias_invariant() -> None:
    for x in range(500):
        try:
            report = bias_invariance_check(x, SMALL)
        except OutOfSpaceError:
            continue
        assert report.agree
        assert report.limsup == report.liminf


def test_limit_of_a_flipping_cell_follows_the_rule() -> None:
    spec = parse_tm(FLIPPER)
    up = limit_config(spec, SMALL, "limsup")
    down = limit_config(spec, SMALL, "liminf")
    assert isinstance(up, LimitResult)
    assert isinstance(down, LimitResult)
    assert up.config.tape == ((0, "1"),)
    assert down.config.tape == ()
    assert up.config.state == "limit"
    assert up.certificate == DivergesProven(cycle_start=0, cycle_length=2)

    assert verify_limit_certificate(spec, SMALL, up)
    assert verify_limit_certificate(spec, SMALL, down)
    assert not verify_limit_certificate(spec, SMALL, replace(up, rule="liminf"))


def test_limit_of_a_halted_run_is_its_halt_configuration() -> None:
    spec = decode_tm(0)
    result = limit_config(spec, SMALL, value=2)
    assert isinstance(result, LimitResult)
    assert result.certificate == Halts(steps=0, output=3)
    assert result.config == initial_config(spec, 2)
    assert verify_limit_certificate(spec, SMALL, result, value=2)


def test_limit_config_errors() -> None:
    spec = parse_tm(FLIPPER)
    result = limit_config(spec, SMALL, max_steps=1)
    assert isinstance(result, Unknown)
    assert result.budget == 1
    with pytest.raises(ValueError):
        limit_config(spec, SMALL, "limit")  # type: ignore[arg-type]


def test_run_without_a_limit_state_halts_at_omega() -> None:
    spec = parse_tm(FLIPPER)
    assert run_ittm(spec, None, SMALL, "limsup") == IttmHalted(clock=OrdinalClock(1, 0), output=1)
    assert run_ittm(spec, None, SMALL, "liminf") == IttmHalted(clock=OrdinalClock(1, 0), output=0)


def test_run_continues_past_a_limit() -> None:
    spec = parse_tm(FLIPPER_HALTING)
    assert run_ittm(spec, None, SMALL, "limsup") == IttmHalted(clock=OrdinalClock(1, 1), output=1)
    assert run_ittm(spec, None, SMALL, "liminf") == IttmHalted(clock=OrdinalClock(1, 0), output=0)


def test_repeated_limit_configuration_loops() -> None:
    spec = parse_tm(FLIPPER_LOOPING)
    assert run_ittm(spec, None, SMALL, "limsup") == IttmLoops(
        clock=OrdinalClock(2, 0), repeats=OrdinalClock(1, 0)
    )
    capped = run_ittm(spec, None, SMALL, "limsup", clock_cap=1)
    assert isinstance(capped, Unknown)
    assert capped.budget == 1


def test_finite_halting_run_reports_finite_clock() -> None:
    assert run_ittm(decode_tm(0), 3, SMALL) == IttmHalted(clock=OrdinalClock(0, 0), output=4)
