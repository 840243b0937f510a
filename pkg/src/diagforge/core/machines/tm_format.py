from __future__ import annotations

import re

from diagforge.core.machines.tm import BLANK, MOVES, Rule, TmSpec

_HEADER_RE = re.compile(r"^(start|halt|blank|states|alphabet)\s*:\s*(.*)$")
_RULE_RE = re.compile(r"^(\S+)\s+(\S+)\s*->\s*(\S+)\s+(\S+)\s+(\S+)$")


class TmFormatError(ValueError):
    def __init__(self, line: int, message: str) -> None:
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{message}")
        self.line = line


def _values(raw: str) -> list[str]:
    return [v for v in re.split(r"[\s,]+", raw.strip()) if v]


def parse_tm(text: str) -> TmSpec:
    start: str | None = None
    halt: list[str] = []
    blank = BLANK
    declared_states: list[str] | None = None
    declared_symbols: list[str] | None = None
    rules: list[tuple[int, Rule]] = []
    seen: dict[tuple[str, str], int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        header = _HEADER_RE.match(line)
        if header:
            key, value = header.group(1), _values(header.group(2))
            if key == "start":
                if len(value) != 1:
                    raise TmFormatError(lineno, "start: takes exactly one state")
                if start is not None:
                    raise TmFormatError(lineno, "duplicate start: header")
                start = value[0]
            elif key == "halt":
                halt.extend(value)
            elif key == "blank":
                if len(value) != 1:
                    raise TmFormatError(lineno, "blank: takes exactly one symbol")
                blank = value[0]
            elif key == "states":
                declared_states = (declared_states or []) + value
            else:
                declared_symbols = (declared_symbols or []) + value
            continue

        m = _RULE_RE.match(line)
        if not m:
            raise TmFormatError(lineno, f"cannot parse rule {line!r}")
        state, read, next_state, write, move = m.groups()
        if move not in MOVES:
            raise TmFormatError(lineno, f"move must be one of L, R, S (got {move!r})")
        if (state, read) in seen:
            raise TmFormatError(
                lineno, f"duplicate rule for ({state}, {read}), first at line {seen[(state, read)]}"
            )
        seen[(state, read)] = lineno
        rules.append((lineno, Rule(state, read, next_state, write, move)))  # type: ignore[arg-type]

    if start is None:
        raise TmFormatError(0, "missing start: header")

    if declared_states is not None:
        states = [*declared_states, *halt]
        if start not in states:
            raise TmFormatError(0, f"start state {start!r} is not declared")
        for lineno, r in rules:
            for s in (r.state, r.next_state):
                if s not in states:
                    raise TmFormatError(lineno, f"undeclared state {s!r}")
    else:
        states = [start, *(r.state for _, r in rules), *halt]
        known = set(states)
        for lineno, r in rules:
            if r.next_state not in known:
                raise TmFormatError(lineno, f"undeclared state {r.next_state!r}")

    if declared_symbols is not None:
        symbols = {blank, *declared_symbols}
        for lineno, r in rules:
            for sym in (r.read, r.write):
                if sym not in symbols:
                    raise TmFormatError(lineno, f"undeclared symbol {sym!r}")
        alphabet = tuple(declared_symbols)
    else:
        alphabet = tuple(dict.fromkeys(sym for _, r in rules for sym in (r.read, r.write)))

    return TmSpec(
        states=tuple(states),
        alphabet=alphabet,
        rules=tuple(r for _, r in rules),
        start=start,
        halt=tuple(halt),
        blank=blank,
    )


def format_tm(spec: TmSpec) -> str:
    lines = [f"start: {spec.start}"]
    if spec.halt:
        lines.append(f"halt: {' '.join(spec.halt)}")
    lines.append(f"blank: {spec.blank}")
    lines.append(f"states: {' '.join(s for s in spec.states if s not in spec.halt)}")
    lines.append(f"alphabet: {' '.join(spec.alphabet)}")
    for r in spec.rules:
        lines.append(f"{r.state} {r.read} -> {r.next_state} {r.write} {r.move}")
    return "\n".join(lines) + "\n"
