from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import dataclass, fields, is_dataclass
from functools import singledispatch
from typing import Any, ClassVar

from diagforge.core.diagonal.audit import CapabilityReport
from diagforge.core.diagonal.registry import PROPERTY_NAMES
from diagforge.core.diagonal.witness import WitnessTranscript
from diagforge.core.machines.ittm import OrdinalClock
from diagforge.core.machines.tm import TmConfig
from diagforge.core.sweep import SweepReport


@dataclass(frozen=True)
class Answer:
    """A decision or value together with whatever certifies it."""

    kind: ClassVar[str] = "answer"
    answer: str
    value: int | None = None
    certificate: Any = None
    tier: str | None = None


@dataclass(frozen=True)
class ErrorReport:
    kind: ClassVar[str] = "error"
    error: str
    message: str


def to_jsonable(value: Any) -> Any:
    """Plain JSON data with dataclass fields in declaration order and `kind` first."""
    if isinstance(value, OrdinalClock):
        return str(value)
    if isinstance(value, TmConfig):
        return {
            "state": value.state,
            "head": value.head,
            "steps": value.steps,
            "tape": {str(cell): sym for cell, sym in value.tape},
        }
    if is_dataclass(value) and not isinstance(value, type):
        out: dict[str, Any] = {}
        kind = getattr(type(value), "kind", None)
        if isinstance(kind, str):
            out["kind"] = kind
        for f in fields(value):
            out[f.name] = to_jsonable(getattr(value, f.name))
        return out
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, range):
        return f"{value.start}..{value.stop}"
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def render_json(report: Any) -> str:
    return json.dumps(to_jsonable(report), ensure_ascii=False, indent=2)


def _compact(value: Any) -> str:
    data = to_jsonable(value)
    if isinstance(data, dict):
        kind = data.pop("kind", "")
        inner = ", ".join(f"{k}={_compact_plain(v)}" for k, v in data.items())
        return f"{kind}({inner})" if kind else inner
    return _compact_plain(data)


def _compact_plain(data: Any) -> str:
    if isinstance(data, dict):
        kind = data.get("kind", "")
        inner = ", ".join(f"{k}={_compact_plain(v)}" for k, v in data.items() if k != "kind")
        return f"{kind}({inner})"
    if isinstance(data, list):
        return "[" + ", ".join(_compact_plain(v) for v in data) + "]"
    if data is None:
        return "-"
    return str(data)


@singledispatch
def render_text(report: Any) -> str:
    if is_dataclass(report) and not isinstance(report, type):
        lines = []
        kind = getattr(type(report), "kind", None)
        if isinstance(kind, str):
            lines.append(kind)
        for f in fields(report):
            lines.append(f"  {f.name}: {_compact(getattr(report, f.name))}")
        return "\n".join(lines)
    return str(report)


@render_text.register
def _(report: list) -> str:
    return "\n\n".join(render_text(item) for item in report)


@render_text.register
def _(report: Answer) -> str:
    head = report.answer if report.value is None else f"{report.answer} {report.value}"
    if report.tier:
        head += f" [{report.tier}]"
    if report.certificate is not None:
        head += f"\n  certificate: {_compact(report.certificate)}"
    return head


@render_text.register
def _(report: ErrorReport) -> str:
    return f"error ({report.error}): {report.message}"


@render_text.register
def _(report: WitnessTranscript) -> str:
    verdict = "inconsistent" if report.inconsistent else "no contradiction"
    return "\n".join([f"witness for {report.model} (index {report.index}): {verdict}",
                      *(f"  {line}" for line in report.lines)])


@render_text.register
def _(report: CapabilityReport) -> str:
    missing = ", ".join(f"({p})" for p in report.missing) or "none"
    lines = [f"{report.model}: lacks {missing}" + ("" if report.sound else "  [CHECK FAILED]"),
             f"  {report.description}"]
    for p in report.properties:
        pointer = ""
        if p.check:
            pointer = f" [check {p.check}: {'passed' if p.check_passed else 'FAILED'}]"
        elif p.citation:
            pointer = f" [{p.citation}]"
        name = PROPERTY_NAMES[p.id]
        lines.append(f"  ({p.id}) {p.status:<15} {name}: {p.justification}{pointer}")
    for alt in report.alternatives:
        alt_missing = ", ".join(f"({p})" for p in alt.missing) or "none"
        lines.append(f"  under coding {alt.coding}: lacks {alt_missing}")
    return "\n".join(lines)


@render_text.register
def _(report: SweepReport) -> str:
    lines = [f"sweep {report.command!r} over {report.range}"]
    lines.extend(f"  {row.x}: {row.outcome} ({row.detail})" for row in report.rows)
    s = report.summary
    lines.append(
        f"summary: {s.agree} agree, {s.disagree} disagree, {s.unknown} unknown, "
        f"{s.out_of_space} out-of-space"
    )
    return "\n".join(lines)


def render(report: Any, output_format: str) -> str:
    if output_format == "json":
        return render_json(report)
    return render_text(report)
