import pytest

from diagforge.core.models import SpaceBound
from diagforge.core.pr.evaluator import PrLimits
from diagforge.core.sweep import (
    SWEEPS,
    SweepCommandError,
    SweepContext,
    SweepRangeError,
    parse_range,
    sweep,
)

SMALL = SweepContext(bound=SpaceBound(8), budget=10_000, max_steps=1_000_000)


def test_parse_range_is_half_open() -> None:
    assert parse_range("0..100") == range(0, 100)
    assert parse_range(" 3 .. 7 ") == range(3, 7)
    for bad in ("5..5", "7..3", "a..b", "-1..3", "4"):
        with pytest.raises(SweepRangeError):
            parse_range(bad)


def test_unknown_command_and_empty_range() -> None:
    with pytest.raises(SweepCommandError):
        sweep("tm dance", "0..3")
    with pytest.raises(SweepRangeError):
        sweep("halt exact", range(3, 3))


def test_exact_sweep_has_no_disagreement() -> None:
    report = sweep("halt exact", "0..40", SMALL)
    assert [row.x for row in report.rows] == list(range(40))
    s = report.summary
    assert s.disagree == 0
    assert s.agree > 0
    assert s.out_of_space > 0
    assert s.agree + s.disagree + s.unknown + s.out_of_space == 40
    assert report.rows[2].outcome == "out-of-space"


def test_sweep_is_independent_of_worker_count() -> None:
    assert sweep("diag g", "0..30", SMALL, workers=1) == sweep("diag g", "0..30", SMALL, workers=8)


def test_command_names_are_normalized() -> None:
    report = sweep("  diag   g ", "0..4", SMALL)
    assert report.command == "diag g"
    assert report.range == "0..4"


def test_semi_sweep_marks_divergent_rows_unknown() -> None:
    ctx = SweepContext(bound=SpaceBound(8), budget=100)
    report = sweep("halt semi", "0..10", ctx)
    assert report.rows[0].outcome == "agree"
    assert report.rows[3].outcome == "unknown"


def test_pr_sweep() -> None:
    ctx = SweepContext(pr_limits=PrLimits(max_steps=50_000))
    report = sweep("pr h", "0..60", ctx)
    assert report.summary.disagree == 0
    assert report.summary.agree > 0


def test_higher_tiers_agree_with_the_exact_decider() -> None:
    for command in ("ittm decide", "atm halting"):
        report = sweep(command, "0..40", SMALL)
        assert report.summary.disagree == 0
        assert report.summary.agree > 0


def test_every_registered_sweep_runs() -> None:
    for command in SWEEPS:
        report = sweep(command, "0..4", SMALL)
        assert len(report.rows) == 4
