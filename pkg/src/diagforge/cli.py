from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import fields
from pathlib import Path
from typing import Any, NoReturn

from diagforge import __version__
from diagforge.core.diagonal.audit import UnknownModelError, capability_audit, ledger
from diagforge.core.diagonal.checks import CheckContext
from diagforge.core.diagonal.jspec import JSpecRejected
from diagforge.core.diagonal.witness import WitnessPreconditionError, contradiction_witness
from diagforge.core.machines.accelerating import (
    AtmProgramError,
    ComposedAtm,
    TableAtm,
    WriteOnceViolation,
    atm_run,
    compose_check,
    verdict_value,
)
from diagforge.core.machines.halting import (
    DiagonalValue,
    diagonal_g,
    lba_halt_decide,
    race_diagonal,
    semi_decide_halt,
)
from diagforge.core.machines.ittm import (
    LIMIT_RULES,
    ClockOverflow,
    limit_config,
    run_halting_decider,
    run_ittm,
)
from diagforge.core.machines.numbering import TmEncodingError, decode_tm, encode_tm
from diagforge.core.machines.tm import Halted, TmSpec, run_bounded
from diagforge.core.machines.tm_format import TmFormatError, format_tm, parse_tm
from diagforge.core.models import DeciderLimitError, Halts, OutOfSpaceError, SpaceBound
from diagforge.core.pr.enumeration import decode_index, diagonal_h, universal_pr_eval
from diagforge.core.pr.evaluator import PrLimits, ResourceExhausted
from diagforge.core.pr.syntax import PrSyntaxError, print_pr
from diagforge.core.pr.terms import PrArityError
from diagforge.core.reports import Answer, ErrorReport, render
from diagforge.core.settings import (
    ConfigError,
    ConfigStore,
    WorkbenchConfig,
    default_config_path,
    load_config,
)
from diagforge.core.sweep import (
    SWEEPS,
    SweepCommandError,
    SweepContext,
    SweepRangeError,
    parse_range,
    sweep,
)

_LOGGER = logging.getLogger(__name__)

WORKBENCH_ERRORS: tuple[type[Exception], ...] = (
    PrSyntaxError,
    PrArityError,
    ResourceExhausted,
    TmFormatError,
    TmEncodingError,
    OutOfSpaceError,
    DeciderLimitError,
    WriteOnceViolation,
    AtmProgramError,
    ClockOverflow,
    JSpecRejected,
    UnknownModelError,
    WitnessPreconditionError,
    ConfigError,
    SweepRangeError,
    SweepCommandError,
    OSError,
)


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def _natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {value}")
    return value


def _positive(text: str) -> int:
    value = _natural(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


Handler = Callable[[argparse.Namespace, WorkbenchConfig], Any]


def _bound(config: WorkbenchConfig) -> SpaceBound:
    return SpaceBound(config.space)


def _pr_limits(config: WorkbenchConfig) -> PrLimits:
    return PrLimits(max_steps=config.pr_max_steps, max_bits=config.pr_max_bits)


def _check_context(config: WorkbenchConfig) -> CheckContext:
    return CheckContext(
        bound=_bound(config),
        sweep=parse_range(config.sweep_range),
        budget=config.step_budget,
        max_steps=config.exact_max_steps,
        pr_limits=_pr_limits(config),
        seed=config.seed,
        sample_size=config.sample_size,
    )


def _read_tm(path: str) -> TmSpec:
    return parse_tm(Path(path).read_text(encoding="utf-8"))


def _answer(result: Any, tier: str | None = None) -> Answer:
    value = None
    if isinstance(result, Halts):
        value = 1
    elif isinstance(result, Halted):
        value = int(result.output)
    elif tier == "exact":
        value = 0
    return Answer(answer=result.kind, value=value, certificate=result, tier=tier)


# pr


def _pr_decode(args: argparse.Namespace, config: WorkbenchConfig) -> str:
    return print_pr(decode_index(args.x))


def _pr_eval(args: argparse.Namespace, config: WorkbenchConfig) -> int:
    return universal_pr_eval(args.x, args.arg, _pr_limits(config))


def _pr_h(args: argparse.Namespace, config: WorkbenchConfig) -> int:
    return diagonal_h(args.x, _pr_limits(config))


# tm


def _tm_run(args: argparse.Namespace, config: WorkbenchConfig) -> Answer:
    return _answer(run_bounded(_read_tm(args.file), args.input, config.step_budget))


def _tm_show(args: argparse.Namespace, config: WorkbenchConfig) -> str:
    return format_tm(decode_tm(args.x))


def _tm_encode(args: argparse.Namespace, config: WorkbenchConfig) -> int:
    return encode_tm(_read_tm(args.file))


# halt / diag


def _halt_semi(args: argparse.Namespace, config: WorkbenchConfig) -> Answer:
    return _answer(semi_decide_halt(args.x, args.y, config.step_budget), tier="semi")


def _halt_exact(args: argparse.Namespace, config: WorkbenchConfig) -> Answer:
    answer = lba_halt_decide(args.x, args.y, _bound(config), max_steps=config.exact_max_steps)
    return _answer(answer, tier="exact")


def _diag_g(args: argparse.Namespace, config: WorkbenchConfig) -> Answer:
    g = diagonal_g(args.x, _bound(config), max_steps=config.exact_max_steps)
    value = g.value if isinstance(g, DiagonalValue) else None
    return Answer(answer=g.kind, value=value, certificate=g.certificate, tier="exact")


def _diag_race(args: argparse.Namespace, config: WorkbenchConfig) -> Any:
    return race_diagonal(
        args.x, _bound(config), config.step_budget, max_steps=config.exact_max_steps
    )


# atm


def _atm_run(args: argparse.Namespace, config: WorkbenchConfig) -> Answer:
    prog = TableAtm(_read_tm(args.file), name=Path(args.file).stem)
    bound = SpaceBound(args.space) if args.space is not None else None
    verdict = atm_run(
        prog, args.input, config.step_budget, bound, max_steps=config.exact_max_steps
    )
    return Answer(
        answer=verdict.kind,
        value=verdict_value(verdict),
        certificate=verdict,
        tier="semi" if bound is None else "exact",
    )


def _atm_compose(args: argparse.Namespace, config: WorkbenchConfig) -> Any:
    first = TableAtm(_read_tm(args.first), name=Path(args.first).stem)
    second = TableAtm(_read_tm(args.second), name=Path(args.second).stem)
    check = compose_check(
        first, second, range(args.probes), _bound(config), max_steps=config.exact_max_steps
    )
    if not check.accepted or args.run is None:
        return check
    verdict = atm_run(
        ComposedAtm(first, second, check),
        args.run,
        bound=_bound(config),
        max_steps=config.exact_max_steps,
    )
    return Answer(
        answer=verdict.kind, value=verdict_value(verdict), certificate=verdict, tier="exact"
    )


# ittm


def _ittm_decide(args: argparse.Namespace, config: WorkbenchConfig) -> Any:
    return run_halting_decider(
        args.x, _bound(config), args.rule, max_steps=config.exact_max_steps
    )


def _ittm_limit(args: argparse.Namespace, config: WorkbenchConfig) -> Any:
    return limit_config(
        _read_tm(args.file),
        _bound(config),
        args.rule,
        value=args.input,
        max_steps=config.exact_max_steps,
    )


def _ittm_run(args: argparse.Namespace, config: WorkbenchConfig) -> Any:
    return run_ittm(
        _read_tm(args.file),
        args.input,
        _bound(config),
        args.rule,
        config.clock_cap,
        max_steps=config.exact_max_steps,
    )


# ledger


def _ledger_report(args: argparse.Namespace, config: WorkbenchConfig) -> Any:
    return ledger(_check_context(config))


def _ledger_audit(args: argparse.Namespace, config: WorkbenchConfig) -> Any:
    return capability_audit(args.model, _check_context(config))


def _ledger_witness(args: argparse.Namespace, config: WorkbenchConfig) -> Any:
    return contradiction_witness(args.model, _check_context(config))


# sweep / config


def _sweep(args: argparse.Namespace, config: WorkbenchConfig) -> Any:
    ctx = SweepContext(
        bound=_bound(config),
        budget=config.step_budget,
        max_steps=config.exact_max_steps,
        pr_limits=_pr_limits(config),
    )
    return sweep(args.command, args.range or config.sweep_range, ctx, workers=config.workers)


def _config_show(args: argparse.Namespace, config: WorkbenchConfig) -> Any:
    return config


def _config_save(args: argparse.Namespace, config: WorkbenchConfig) -> str:
    store = ConfigStore(Path(args.path) if args.path else default_config_path())
    store.set_config(config)
    return str(store.path)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (else $DIAGFORGE_CONFIG)")
    common.add_argument("--json", dest="output_format", action="store_const", const="json")
    common.add_argument("--format", dest="output_format", choices=("text", "json"))
    common.add_argument("--budget", dest="step_budget", type=_natural, help="step budget")
    common.add_argument("--max-steps", dest="exact_max_steps", type=_positive)
    common.add_argument("--seed", type=int)
    return common


def _add(
    group: Any,
    name: str,
    handler: Handler,
    parents: list[argparse.ArgumentParser],
    help_text: str,
) -> argparse.ArgumentParser:
    p = group.add_parser(name, parents=parents, help=help_text, description=help_text)
    p.set_defaults(handler=handler)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    space = argparse.ArgumentParser(add_help=False)
    space.add_argument("--space", type=_positive, help="space bound s in work cells")
    base = [common]
    bounded = [common, space]

    parser = _Parser(prog="diagforge", description="Computability and diagonalization workbench")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = parser.add_subparsers(dest="group", required=True, metavar="COMMAND")

    pr = top.add_parser("pr", help="primitive recursive terms").add_subparsers(
        dest="action", required=True
    )
    p = _add(pr, "decode", _pr_decode, base, "print the term with Gödel index x")
    p.add_argument("x", type=_natural)
    p = _add(pr, "eval", _pr_eval, base, "evaluate term x on a unary-coerced argument")
    p.add_argument("x", type=_natural)
    p.add_argument("arg", type=_natural)
    p = _add(pr, "h", _pr_h, base, "the diagonal h(x) = psi_x(x) + 1")
    p.add_argument("x", type=_natural)

    tm = top.add_parser("tm", help="Turing machines").add_subparsers(dest="action", required=True)
    p = _add(tm, "run", _tm_run, base, "run a machine file on an input within the step budget")
    p.add_argument("file")
    p.add_argument("input", nargs="?", type=_natural, help="omit for a blank tape")
    p = _add(tm, "show", _tm_show, base, "print the machine with index x")
    p.add_argument("x", type=_natural)
    p = _add(tm, "encode", _tm_encode, base, "print the index of a binary machine file")
    p.add_argument("file")

    halt = top.add_parser("halt", help="halting tiers").add_subparsers(
        dest="action", required=True
    )
    p = _add(halt, "semi", _halt_semi, base, "semi-decide whether machine x halts on y")
    p.add_argument("x", type=_natural)
    p.add_argument("y", type=_natural)
    p = _add(halt, "exact", _halt_exact, bounded, "decide halting within the space bound")
    p.add_argument("x", type=_natural)
    p.add_argument("y", type=_natural)

    diag = top.add_parser("diag", help="diagonal functions").add_subparsers(
        dest="action", required=True
    )
    p = _add(diag, "g", _diag_g, bounded, "the diagonal g(x), decided one tier up")
    p.add_argument("x", type=_natural)
    p = _add(diag, "race", _diag_race, bounded, "race machine x on x against the g decider")
    p.add_argument("x", type=_natural)

    atm = top.add_parser("atm", help="accelerating machines").add_subparsers(
        dest="action", required=True
    )
    p = _add(atm, "run", _atm_run, bounded, "run an ATM file; --space selects the exact tier")
    p.add_argument("file")
    p.add_argument("input", nargs="?", type=_natural)
    p = _add(atm, "compose", _atm_compose, bounded, "check whether two ATMs compose")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--probes", type=_positive, default=8, help="probe inputs 0..N")
    p.add_argument("--run", type=_natural, help="run the composition on this input")

    rules = argparse.ArgumentParser(add_help=False)
    rules.add_argument("--rule", choices=LIMIT_RULES, default="limsup")
    ittm = top.add_parser("ittm", help="infinite time machines").add_subparsers(
        dest="action", required=True
    )
    p = _add(ittm, "decide", _ittm_decide, [*bounded, rules], "decide whether x halts on x")
    p.add_argument("x", type=_natural)
    p = _add(ittm, "limit", _ittm_limit, [*bounded, rules], "the stage-ω configuration")
    p.add_argument("file")
    p.add_argument("input", nargs="?", type=_natural)
    p = _add(ittm, "run", _ittm_run, [*bounded, rules], "run through limit stages")
    p.add_argument("file")
    p.add_argument("input", nargs="?", type=_natural)
    p.add_argument("--clock-cap", dest="clock_cap", type=_positive)

    led = top.add_parser("ledger", help="capability ledger").add_subparsers(
        dest="action", required=True
    )
    _add(led, "report", _ledger_report, bounded, "audit every registered model")
    p = _add(led, "audit", _ledger_audit, bounded, "audit one registered model")
    p.add_argument("model")
    p = _add(led, "witness", _ledger_witness, bounded, "derive the self-inequality for a model")
    p.add_argument("model")

    p = top.add_parser("sweep", parents=bounded, help="cross-check a command over an index range")
    p.set_defaults(handler=_sweep)
    p.add_argument("command", help=f"one of: {', '.join(repr(c) for c in SWEEPS)}")
    p.add_argument("range", nargs="?", help="half-open a..b")
    p.add_argument("--workers", type=_positive)

    cfg = top.add_parser("config", help="workbench configuration").add_subparsers(
        dest="action", required=True
    )
    _add(cfg, "show", _config_show, bounded, "print the resolved configuration")
    p = _add(cfg, "save", _config_save, bounded, "write the resolved configuration")
    p.add_argument("path", nargs="?")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    names = {f.name for f in fields(WorkbenchConfig)}
    return {k: v for k, v in vars(args).items() if k in names}


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Run one command, print its report and return the exit status.

    0 on success, 1 when the workbench rejects the request, 2 on usage errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SystemExit as e:
        return int(e.code or 0)

    output_format = args.output_format or "text"
    try:
        config = load_config(args.config).with_overrides(**_overrides(args))
        output_format = config.output_format
        report = args.handler(args, config)
    except WORKBENCH_ERRORS as e:
        _LOGGER.info("Rejected %s %s: %s", args.group, getattr(args, "action", ""), e)
        print(render(ErrorReport(error=type(e).__name__, message=str(e)), output_format))
        return 1

    print(render(report, output_format))
    return 1 if getattr(report, "accepted", True) is False else 0
