import json
from pathlib import Path

import pytest

from diagforge import __version__
from diagforge.cli import dispatch
from diagforge.core.machines.accelerating import NEGATION_TABLE
from diagforge.core.machines.ittm import OrdinalClock
from diagforge.core.machines.tm import TmConfig
from diagforge.core.reports import Answer, ErrorReport, render, to_jsonable
from diagforge.core.settings import CONFIG_ENV

BB2 = (
    "start: q0\nhalt: halt\n"
    "q0 _ -> q1 1 R\nq0 1 -> q1 1 L\nq1 _ -> q0 1 L\nq1 1 -> halt 1 R\n"
)
LOOPER = "start: q0\nq0 _ -> q0 _ S\nq0 1 -> q0 1 S\n"
FLIPPER = "start: q0\nq0 _ -> q0 1 S\nq0 1 -> q0 _ S\n"


@pytest.fixture(autouse=True)
def _isolated_config(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(CONFIG_ENV, str(tmp_path / "absent.json"))


def _write(tmp_path: Path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _small_config(tmp_path: Path) -> str:
    settings = {"space": 8, "sweep_range": "0..64", "pr_max_steps": 50_000}
    return _write(tmp_path, "small.json", json.dumps(settings))


def _run(argv: list[str], capsys: pytest.CaptureFixture[str]) -> tuple[int, str]:
    code = dispatch(argv)
    return code, capsys.readouterr().out


def test_pr_commands(capsys: pytest.CaptureFixture[str]) -> None:
    assert _run(["pr", "h", "0"], capsys) == (0, "1\n")
    assert _run(["pr", "decode", "1"], capsys) == (0, "S\n")
    assert _run(["pr", "eval", "1", "9"], capsys) == (0, "10\n")


def test_tm_commands(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    bb2 = _write(tmp_path, "bb2.tm", BB2)
    code, out = _run(["tm", "run", bb2, "--json"], capsys)
    assert code == 0
    assert json.loads(out) == {
        "kind": "answer",
        "answer": "halted",
        "value": 4,
        "certificate": {"kind": "halted", "output": 4, "steps": 6},
        "tier": None,
    }

    code, out = _run(["tm", "show", "3"], capsys)
    assert code == 0
    assert "q0 _ -> q0 _ S" in out

    looper = _write(tmp_path, "loop.tm", "start: q0\nq0 _ -> q0 _ S\n")
    assert _run(["tm", "encode", looper], capsys) == (0, "3\n")

    code, out = _run(["tm", "run", looper, "--budget", "50"], capsys)
    assert code == 0
    assert out.startswith("unknown")


def test_halting_commands(capsys: pytest.CaptureFixture[str]) -> None:
    code, out = _run(["halt", "exact", "3", "3", "--json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["answer"] == "diverges-proven"
    assert data["value"] == 0
    assert data["tier"] == "exact"
    assert data["certificate"] == {"kind": "diverges-proven", "cycle_start": 0, "cycle_length": 1}

    code, out = _run(["halt", "semi", "0", "2"], capsys)
    assert code == 0
    assert out.startswith("halts 1 [semi]")


def test_diagonal_commands(capsys: pytest.CaptureFixture[str]) -> None:
    code, out = _run(["diag", "g", "3", "--space", "8"], capsys)
    assert code == 0
    assert out.startswith("value 0 [exact]")

    code, out = _run(["diag", "race", "3", "--space", "8", "--budget", "100", "--json"], capsys)
    assert code == 0
    assert json.loads(out)["converged"] == "g"


def test_space_must_be_positive(capsys: pytest.CaptureFixture[str]) -> None:
    assert dispatch(["halt", "exact", "3", "3", "--space", "0"]) == 2
    assert "error:" in capsys.readouterr().err
    assert dispatch(["pr", "h", "-4"]) == 2


def test_workbench_errors_exit_with_one(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    code, out = _run(["halt", "exact", "2", "2", "--space", "8"], capsys)
    assert code == 1
    assert out.startswith("error (OutOfSpaceError)")

    code, out = _run(["tm", "run", str(tmp_path / "missing.tm")], capsys)
    assert code == 1

    broken = _write(tmp_path, "broken.tm", "q0 _ -> q0 _ S\n")
    code, out = _run(["tm", "run", broken, "--json"], capsys)
    assert code == 1
    assert json.loads(out) == {
        "kind": "error",
        "error": "TmFormatError",
        "message": "missing start: header",
    }

    capped = _write(tmp_path, "capped.json", json.dumps({"pr_max_bits": 1}))
    code, out = _run(["pr", "eval", "1", "5", "--config", capped], capsys)
    assert code == 1
    assert "ResourceExhausted" in out


def test_atm_commands(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    neg = _write(tmp_path, "neg.tm", NEGATION_TABLE)
    looper = _write(tmp_path, "loop.tm", LOOPER)

    code, out = _run(["atm", "run", neg, "0"], capsys)
    assert code == 0
    assert out.startswith("marked 1 [semi]")

    code, out = _run(["atm", "run", neg, "2", "--space", "8"], capsys)
    assert code == 0
    assert out.startswith("unmarked-proven 0 [exact]")

    code, out = _run(["atm", "compose", looper, neg, "--space", "8", "--json"], capsys)
    assert code == 1
    data = json.loads(out)
    assert data["accepted"] is False
    assert data["witness_input"] == 0

    code, out = _run(["atm", "compose", neg, neg, "--space", "8", "--run", "0"], capsys)
    assert code == 0
    assert out.startswith("unmarked-proven 0 [exact]")


def test_ittm_commands(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, out = _run(["ittm", "decide", "3", "--space", "8", "--json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["value"] == 0
    assert data["stage"] == "ω"

    flipper = _write(tmp_path, "flip.tm", FLIPPER)
    argv = ["ittm", "limit", flipper, "--space", "8", "--rule", "liminf", "--json"]
    code, out = _run(argv, capsys)
    assert code == 0
    assert json.loads(out)["config"]["tape"] == {}

    code, out = _run(["ittm", "run", flipper, "--space", "8", "--json"], capsys)
    assert code == 0
    assert json.loads(out) == {"kind": "ittm-halted", "clock": "ω", "output": 1}


def test_ledger_report_lists_every_model(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    code, out = _run(["ledger", "report", "--json", "--config", _small_config(tmp_path)], capsys)
    assert code == 0
    reports = json.loads(out)
    assert len(reports) == 8
    assert all(r["sound"] for r in reports)
    by_name = {r["model"]: r["missing"] for r in reports}
    assert by_name["accelerating-tm"] == [7]


def test_ledger_audit_and_witness(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = _small_config(tmp_path)
    code, out = _run(["ledger", "audit", "primitive-recursive", "--config", config], capsys)
    assert code == 0
    assert out.startswith("primitive-recursive: lacks (4)")

    code, out = _run(["ledger", "witness", "toy-tables"], capsys)
    assert code == 0
    assert out.rstrip().endswith("ψ_3(3) ≠ ψ_3(3)")

    code, out = _run(["ledger", "witness", "turing-machines"], capsys)
    assert code == 1
    assert "WitnessPreconditionError" in out

    code, out = _run(["ledger", "audit", "no-such-model"], capsys)
    assert code == 1


def test_sweep_output_is_deterministic(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["sweep", "halt exact", "0..25", "--space", "8", "--json"]
    code, first = _run([*argv, "--workers", "1"], capsys)
    assert code == 0
    code, second = _run([*argv, "--workers", "6"], capsys)
    assert first == second
    assert len(json.loads(first)["rows"]) == 25


def test_sweep_rejects_bad_input(capsys: pytest.CaptureFixture[str]) -> None:
    assert dispatch(["sweep", "halt exact", "5..5"]) == 1
    assert dispatch(["sweep", "tm dance", "0..5"]) == 1
    capsys.readouterr()


def test_config_save_and_show(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    target = tmp_path / "saved.json"
    code, out = _run(["config", "save", str(target), "--space", "11"], capsys)
    assert code == 0
    assert out.strip() == str(target)

    code, out = _run(["config", "show", "--config", str(target), "--json"], capsys)
    assert code == 0
    assert json.loads(out)["space"] == 11


def test_config_file_from_environment(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    path = _write(tmp_path, "env.json", json.dumps({"output_format": "json"}))
    monkeypatch.setenv(CONFIG_ENV, path)
    code, out = _run(["pr", "h", "0"], capsys)
    assert code == 0
    assert json.loads(out) == 1


def test_version(capsys: pytest.CaptureFixture[str]) -> None:
    assert dispatch(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_renderers() -> None:
    assert to_jsonable(OrdinalClock(2, 3)) == "ω·2+3"
    assert to_jsonable(range(0, 5)) == "0..5"
    cfg = TmConfig(tape=((0, "1"),), head=1, state="q0", steps=2)
    assert to_jsonable(cfg) == {"state": "q0", "head": 1, "steps": 2, "tape": {"0": "1"}}
    assert render(Answer(answer="halts", value=1, tier="semi"), "text") == "halts 1 [semi]"
    assert render(ErrorReport(error="E", message="m"), "text") == "error (E): m"
    assert json.loads(render(ErrorReport(error="E", message="m"), "json"))["kind"] == "error"


def test_ledger_output_is_byte_identical_across_runs(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    config = _small_config(tmp_path)
    commands = (
        ["ledger", "report", "--json", "--seed", "3", "--config", config],
        ["ledger", "witness", "toy-tables", "--json", "--seed", "3"],
        ["ledger", "witness", "atm-forced-composition", "--space", "8", "--seed", "3"],
    )
    for argv in commands:
        code, first = _run(argv, capsys)
        assert code == 0
        code, second = _run(argv, capsys)
        assert code == 0
        assert first.encode() == second.encode()
