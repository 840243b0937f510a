from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import ClassVar

from diagforge.core.diagonal.jspec import (
    BOOLEANS,
    NATURALS,
    Converged,
    JSpec,
    JSpecRejected,
    KMap,
    ValueSpace,
    build_j,
)
from diagforge.core.machines.accelerating import (
    EXTERNAL_TIME_REASON,
    HaltingAtm,
    SelfApplicationAtm,
    compose_check,
    negation_atm,
    verdict_value,
)
from diagforge.core.machines.halting import (
    halting_f,
    lba_halt_decide,
    semi_decide_halt,
    verify_divergence_certificate,
    verify_halt_certificate,
)
from diagforge.core.machines.numbering import decode_tm, encode_tm
from diagforge.core.machines.oracle import negated_halting_o_machine, run_o_machine
from diagforge.core.models import (
    DeciderLimitError,
    DivergesProven,
    Halts,
    OutOfSpaceError,
    SpaceBound,
    Unknown,
)
from diagforge.core.pr.enumeration import decode_index, diagonal_h, encode_term, universal_pr_eval
from diagforge.core.pr.evaluator import PrLimits, ResourceExhausted

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckContext:
    bound: SpaceBound = field(default_factory=lambda: SpaceBound(8))
    sweep: range = range(64)
    numbering_range: range = range(500)
    budget: int = 10_000
    max_steps: int = 1_000_000
    pr_limits: PrLimits = field(default_factory=lambda: PrLimits(max_steps=50_000))
    seed: int = 0
    sample_size: int = 64


@dataclass(frozen=True)
class CheckResult:
    kind: ClassVar[str] = "check"
    name: str
    passed: bool
    detail: str
    tested: int


CheckFn = Callable[[CheckContext], CheckResult]
CHECKS: dict[str, CheckFn] = {}


def _check(name: str) -> Callable[[CheckFn], CheckFn]:
    def register(fn: CheckFn) -> CheckFn:
        CHECKS[name] = fn
        return fn

    return register


def run_check(name: str, ctx: CheckContext | None = None) -> CheckResult:
    try:
        fn = CHECKS[name]
    except KeyError:
        raise KeyError(f"No executable check named {name!r}.") from None
    result = fn(ctx or CheckContext())
    _LOGGER.info("Check %s: %s (%s)", name, "passed" if result.passed else "FAILED", result.detail)
    return result


def _exact_or_none(x: int, y: int, ctx: CheckContext) -> Halts | DivergesProven | None:
    try:
        return lba_halt_decide(x, y, ctx.bound, max_steps=ctx.max_steps)
    except (OutOfSpaceError, DeciderLimitError):
        return None


@_check("tm-numbering-bijective")
def _tm_numbering(ctx: CheckContext) -> CheckResult:
    bad = [x for x in ctx.numbering_range if encode_tm(decode_tm(x)) != x]
    return CheckResult(
        name="tm-numbering-bijective",
        passed=not bad,
        detail=f"encode(decode(x)) = x on {len(ctx.numbering_range)} indices, {len(bad)} failures",
        tested=len(ctx.numbering_range),
    )


@_check("tm-universal-evaluation")
def _tm_universal(ctx: CheckContext) -> CheckResult:
    tested = 0
    bad = 0
    for x in ctx.sweep:
        answer = semi_decide_halt(x, x, ctx.budget)
        if isinstance(answer, Halts):
            tested += 1
            if not verify_halt_certificate(decode_tm(x), x, answer):
                bad += 1
    return CheckResult(
        name="tm-universal-evaluation",
        passed=bad == 0 and tested > 0,
        detail=f"{tested} self-applications interpreted and replayed, {bad} mismatches",
        tested=tested,
    )


@_check("tm-divergence-needs-higher-tier")
def _tm_divergence(ctx: CheckContext) -> CheckResult:
    diverging = 0
    bad = 0
    for x in ctx.sweep:
        answer = _exact_or_none(x, x, ctx)
        if not isinstance(answer, DivergesProven):
            continue
        diverging += 1
        inside = semi_decide_halt(x, x, ctx.budget)
        certified = verify_divergence_certificate(decode_tm(x), x, ctx.bound, answer)
        if not isinstance(inside, Unknown) or not certified:
            bad += 1
    return CheckResult(
        name="tm-divergence-needs-higher-tier",
        passed=diverging > 0 and bad == 0,
        detail=(
            f"{diverging} divergent self-applications: the in-class tier answered Unknown, "
            f"only the exact tier certified divergence ({bad} failures)"
        ),
        tested=diverging,
    )


def _probe_spec(codomain: ValueSpace, k: KMap, label: str) -> JSpec:
    return JSpec(
        name=label,
        domain=NATURALS,
        codomain=codomain,
        index_set=lambda x: True,
        y0=0,
        k=k,
        evaluator=lambda x: Converged(x),
        k_label=label,
    )


@_check("k-fixed-point-free")
def _k_maps(ctx: CheckContext) -> CheckResult:
    accepted = []
    for codomain, k, label in (
        (NATURALS, lambda y: y + 1, "successor"),
        (BOOLEANS, lambda y: 1 - y, "negation"),
    ):
        build_j(_probe_spec(codomain, k, label), seed=ctx.seed, sample_size=ctx.sample_size)
        accepted.append(label)
    try:
        identity = _probe_spec(NATURALS, lambda y: y, "identity")
        build_j(identity, seed=ctx.seed, sample_size=ctx.sample_size)
        identity_rejected = False
    except JSpecRejected:
        identity_rejected = True
    return CheckResult(
        name="k-fixed-point-free",
        passed=identity_rejected,
        detail=f"accepted {', '.join(accepted)}; identity rejected: {identity_rejected}",
        tested=3,
    )


@_check("pr-numbering-bijective")
def _pr_numbering(ctx: CheckContext) -> CheckResult:
    bad = [x for x in ctx.numbering_range if encode_term(decode_index(x)) != x]
    return CheckResult(
        name="pr-numbering-bijective",
        passed=not bad,
        detail=f"encode(decode(x)) = x on {len(ctx.numbering_range)} indices, {len(bad)} failures",
        tested=len(ctx.numbering_range),
    )


@_check("pr-diagonal-escapes")
def _pr_diagonal(ctx: CheckContext) -> CheckResult:
    definite = 0
    capped = 0
    violations = 0
    for x in ctx.sweep:
        try:
            psi = universal_pr_eval(x, x, ctx.pr_limits)
            h = diagonal_h(x, ctx.pr_limits)
        except ResourceExhausted:
            capped += 1
            continue
        definite += 1
        if h == psi or h != psi + 1:
            violations += 1
    return CheckResult(
        name="pr-diagonal-escapes",
        passed=definite > 0 and violations == 0,
        detail=(
            f"h(x) differs from psi_x(x) on all {definite} definite indices "
            f"({capped} capped, {violations} violations); "
            "the universal evaluator lies outside the class"
        ),
        tested=definite,
    )


@_check("atm-halting-solver")
def _atm_halting(ctx: CheckContext) -> CheckResult:
    tested = 0
    bad = 0
    atm = HaltingAtm()
    for x in ctx.sweep:
        try:
            verdict = atm.run_exact(x, ctx.bound, ctx.max_steps)
            expected = halting_f(x, x, "exact", bound=ctx.bound, max_steps=ctx.max_steps)
        except (OutOfSpaceError, DeciderLimitError):
            continue
        tested += 1
        if verdict_value(verdict) != expected:
            bad += 1
    return CheckResult(
        name="atm-halting-solver",
        passed=tested > 0 and bad == 0,
        detail=f"halting-problem ATM matched the exact tier on {tested} inputs, {bad} mismatches",
        tested=tested,
    )


@_check("atm-composition-rejected")
def _atm_composition(ctx: CheckContext) -> CheckResult:
    probes = range(8)
    limit_only = compose_check(
        SelfApplicationAtm(), negation_atm(), probes, ctx.bound, max_steps=ctx.max_steps
    )
    finite = compose_check(
        negation_atm(), negation_atm(), probes, ctx.bound, max_steps=ctx.max_steps
    )
    passed = (
        not limit_only.accepted and limit_only.reason == EXTERNAL_TIME_REASON and finite.accepted
    )
    return CheckResult(
        name="atm-composition-rejected",
        passed=passed,
        detail=(
            f"i(x) pipeline: {limit_only.reason}; "
            f"certified-finite pipeline accepted: {finite.accepted}"
        ),
        tested=2,
    )


@_check("o-machine-negates-halting")
def _o_machine(ctx: CheckContext) -> CheckResult:
    machine = negated_halting_o_machine(ctx.bound, max_steps=ctx.max_steps)
    tested = 0
    bad = 0
    for x in ctx.sweep:
        try:
            expected = halting_f(x, x, "exact", bound=ctx.bound, max_steps=ctx.max_steps)
            result = run_o_machine(machine, x, ctx.budget)
        except (OutOfSpaceError, DeciderLimitError):
            continue
        tested += 1
        if not isinstance(result, Halts) or result.output != 1 - expected:
            bad += 1
    return CheckResult(
        name="o-machine-negates-halting",
        passed=tested > 0 and bad == 0,
        detail=f"o-machine computed 1 - f(x, x) on {tested} inputs, {bad} mismatches",
        tested=tested,
    )
