from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import ClassVar

from diagforge.core.diagonal.checks import CheckContext, CheckResult, run_check
from diagforge.core.diagonal.registry import REGISTRY, Coding, ModelDescriptor, Status

_LOGGER = logging.getLogger(__name__)


class UnknownModelError(ValueError):
    def __init__(self, name: str) -> None:
        super().__init__(f"No registered model named {name!r} (known: {', '.join(REGISTRY)}).")
        self.name = name


@dataclass(frozen=True)
class PropertyReport:
    id: int
    status: Status
    justification: str
    check: str | None = None
    check_passed: bool | None = None
    citation: str | None = None


@dataclass(frozen=True)
class CodingReport:
    coding: str
    properties: tuple[PropertyReport, ...]
    missing: tuple[int, ...]


@dataclass(frozen=True)
class CapabilityReport:
    kind: ClassVar[str] = "capability"
    model: str
    description: str
    properties: tuple[PropertyReport, ...]
    missing: tuple[int, ...]
    alternatives: tuple[CodingReport, ...] = ()
    checks: tuple[CheckResult, ...] = ()
    sound: bool = True
    contradiction: bool = False
    transcript: tuple[str, ...] | None = None


def resolve_model(model: ModelDescriptor | str) -> ModelDescriptor:
    if isinstance(model, ModelDescriptor):
        return model
    try:
        return REGISTRY[model]
    except KeyError:
        raise UnknownModelError(model) from None


def _coding_report(
    coding: Coding, results: dict[str, CheckResult]
) -> tuple[CodingReport, bool]:
    rows = []
    sound = True
    for p in coding.properties:
        passed = None
        if p.check is not None:
            passed = results[p.check].passed
            sound = sound and passed
        rows.append(
            PropertyReport(
                id=p.id,
                status=p.status,
                justification=p.justification,
                check=p.check,
                check_passed=passed,
                citation=p.citation,
            )
        )
    return CodingReport(coding.name, tuple(rows), coding.missing), sound


def capability_audit(
    model: ModelDescriptor | str,
    ctx: CheckContext | None = None,
    *,
    cache: dict[str, CheckResult] | None = None,
) -> CapabilityReport:
    """Run every executable check behind a model's statuses and report what it lacks.

    A model is sound when each checked status is backed by a check that passes in
    the required direction.
    """
    descriptor = resolve_model(model)
    ctx = ctx or CheckContext()
    names = sorted({p.check for c in descriptor.codings for p in c.properties if p.check})
    cache = {} if cache is None else cache
    for name in names:
        if name not in cache:
            cache[name] = run_check(name, ctx)
    results = {name: cache[name] for name in names}

    reports = []
    sound = True
    for coding in descriptor.codings:
        report, ok = _coding_report(coding, results)
        reports.append(report)
        sound = sound and ok
    if not sound:
        _LOGGER.warning("Audit of %s has failing checks", descriptor.name)

    primary = reports[0]
    return CapabilityReport(
        model=descriptor.name,
        description=descriptor.description,
        properties=primary.properties,
        missing=primary.missing,
        alternatives=tuple(reports[1:]),
        checks=tuple(results[n] for n in names),
        sound=sound,
        contradiction=descriptor.contradiction_flag,
    )


def ledger(ctx: CheckContext | None = None) -> list[CapabilityReport]:
    ctx = ctx or CheckContext()
    cache: dict[str, CheckResult] = {}
    return [capability_audit(m, ctx, cache=cache) for m in REGISTRY.values()]
