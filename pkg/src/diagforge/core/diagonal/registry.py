from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from diagforge.core.diagonal.jspec import BOOLEANS, NATURALS, ValueSpace

Status = Literal["holds-checked", "holds-declared", "fails-checked", "fails-declared"]

PROPERTY_NAMES: dict[int, str] = {
    1: "has an encoding of each machine as an input",
    2: "recognizes which inputs encode machines",
    3: "detects when a machine diverges on its own encoding",
    4: "evaluates a machine on its own encoding",
    5: "has a fixed-point-free map on its outputs",
    6: "has conditional branching",
    7: "is closed under composition",
}


@dataclass(frozen=True)
class PropertyStatus:
    id: int
    status: Status
    justification: str
    check: str | None = None
    citation: str | None = None

    def __post_init__(self) -> None:
        if self.id not in PROPERTY_NAMES:
            raise ValueError(f"Unknown property ({self.id}).")
        if self.status.endswith("-checked") and not self.check:
            raise ValueError(f"Property ({self.id}) is marked checked but names no check.")
        if self.status.endswith("-declared") and not self.citation:
            raise ValueError(f"Declared property ({self.id}) needs a citation.")

    @property
    def holds(self) -> bool:
        return self.status.startswith("holds")


@dataclass(frozen=True)
class Coding:
    name: str
    properties: tuple[PropertyStatus, ...]

    def __post_init__(self) -> None:
        if tuple(p.id for p in self.properties) != tuple(PROPERTY_NAMES):
            raise ValueError(f"Coding {self.name!r} must list properties (1)-(7) in order.")

    @property
    def missing(self) -> tuple[int, ...]:
        return tuple(p.id for p in self.properties if not p.holds)


@dataclass(frozen=True)
class ModelDescriptor:
    name: str
    description: str
    domain: ValueSpace
    codomain: ValueSpace
    index_scheme: str | None
    codings: tuple[Coding, ...]
    contradiction_flag: bool = False

    def __post_init__(self) -> None:
        if not self.codings:
            raise ValueError(f"Model {self.name!r} has no coding.")
        for coding in self.codings:
            if not coding.missing and not self.contradiction_flag:
                raise ValueError(
                    f"Model {self.name!r} claims all seven properties under {coding.name!r} "
                    "without raising the contradiction flag."
                )

    @property
    def properties(self) -> tuple[PropertyStatus, ...]:
        return self.codings[0].properties

    @property
    def missing(self) -> tuple[int, ...]:
        return self.codings[0].missing


def _hc(pid: int, check: str, why: str) -> PropertyStatus:
    return PropertyStatus(pid, "holds-checked", why, check=check)


def _hd(pid: int, why: str, citation: str) -> PropertyStatus:
    return PropertyStatus(pid, "holds-declared", why, citation=citation)


def _fc(pid: int, check: str, why: str) -> PropertyStatus:
    return PropertyStatus(pid, "fails-checked", why, check=check)


def _fd(pid: int, why: str, citation: str) -> PropertyStatus:
    return PropertyStatus(pid, "fails-declared", why, citation=citation)


_CLASSICAL = "standard recursion theory (Rogers, Theory of Recursive Functions, 1967)"
_ATM = "accelerating machines (Copeland, Accelerating Turing Machines, 2002)"
_O_MACHINE = "oracle machines (Turing, Systems of Logic Based on Ordinals, 1939)"
_ITTM = "infinite time machines (Hamkins & Lewis, Infinite Time Turing Machines, 2000)"
_NETWORKS = "analog networks (Siegelmann, Neural Networks and Analog Computation, 1999)"
_ADIABATIC = "adiabatic quantum algorithms proposed for Hilbert's tenth problem (2003)"


TURING_MACHINES = ModelDescriptor(
    name="turing-machines",
    description="Turing machines; the exact tier decides the space-bounded subclass",
    domain=NATURALS,
    codomain=NATURALS,
    index_scheme="decode_tm: mixed-radix transition tables",
    codings=(
        Coding(
            "table-numbering",
            (
                _hc(1, "tm-numbering-bijective", "every spec has an index"),
                _hc(2, "tm-numbering-bijective", "every natural decodes to a valid spec"),
                _fc(
                    3,
                    "tm-divergence-needs-higher-tier",
                    "divergence of psi_x(x) is certified only by a decider outside the class",
                ),
                _hc(4, "tm-universal-evaluation", "psi_x(x) is computed by interpretation"),
                _hc(5, "k-fixed-point-free", "successor has no fixed point"),
                _hd(6, "transition tables branch on the scanned symbol", _CLASSICAL),
                _hd(7, "tables compose by sequencing", _CLASSICAL),
            ),
        ),
    ),
)

PRIMITIVE_RECURSIVE = ModelDescriptor(
    name="primitive-recursive",
    description="primitive-recursive function terms",
    domain=NATURALS,
    codomain=NATURALS,
    index_scheme="decode_index: tag-and-pair term numbering",
    codings=(
        Coding(
            "term-numbering",
            (
                _hc(1, "pr-numbering-bijective", "every term has an index"),
                _hc(2, "pr-numbering-bijective", "every natural decodes to a well-formed term"),
                _hd(3, "PR functions are total, so divergence never occurs", _CLASSICAL),
                _fc(
                    4,
                    "pr-diagonal-escapes",
                    "h(x) = psi_x(x) + 1 differs from every psi_x, so the evaluator is not PR",
                ),
                _hc(5, "k-fixed-point-free", "successor has no fixed point"),
                _hd(6, "definition by cases is primitive recursive", _CLASSICAL),
                _hd(7, "composition is a primitive-recursive operation", _CLASSICAL),
            ),
        ),
    ),
)

_TOTAL_COMMON = (
    _hd(1, "indices of total machines", _CLASSICAL),
    _hd(3, "total functions never diverge", _CLASSICAL),
    _hd(5, "successor has no fixed point", _CLASSICAL),
    _hd(6, "definition by cases preserves totality", _CLASSICAL),
    _hd(7, "composition preserves totality", _CLASSICAL),
)


def _total(p2: PropertyStatus, p4: PropertyStatus) -> tuple[PropertyStatus, ...]:
    by_id = {p.id: p for p in (*_TOTAL_COMMON, p2, p4)}
    return tuple(by_id[i] for i in PROPERTY_NAMES)


TOTAL_RECURSIVE = ModelDescriptor(
    name="total-recursive",
    description="total recursive functions; which property fails depends on the coding",
    domain=NATURALS,
    codomain=NATURALS,
    index_scheme="Turing indices of total machines, or an effective enumeration",
    codings=(
        Coding(
            "total-machine-indices",
            _total(
                _fd(2, "totality of an index is undecidable", _CLASSICAL),
                _hd(4, "a universal machine evaluates any total index", _CLASSICAL),
            ),
        ),
        Coding(
            "effective-enumeration",
            _total(
                _hd(2, "every natural is a member of the enumeration", _CLASSICAL),
                _fd(4, "the enumeration's evaluator diagonalizes out of the class", _CLASSICAL),
            ),
        ),
    ),
)

ACCELERATING = ModelDescriptor(
    name="accelerating-tm",
    description="accelerating Turing machines with a write-once output square",
    domain=NATURALS,
    codomain=BOOLEANS,
    index_scheme="decode_tm tables with cell 0 as the output square",
    codings=(
        Coding(
            "table-numbering",
            (
                _hd(1, "ATMs are table machines and share their indices", _ATM),
                _hd(2, "every natural decodes to a table", _ATM),
                _hc(
                    3,
                    "atm-halting-solver",
                    "marks at external time exactly when the simulated run halts",
                ),
                _hd(4, "a universal ATM simulates any ATM", _ATM),
                _hd(5, "negation has no fixed point on {0, 1}", _ATM),
                _hd(6, "tables branch on the scanned symbol", _ATM),
                _fc(
                    7,
                    "atm-composition-rejected",
                    "outputs settle only at external time, so stages cannot be chained",
                ),
            ),
        ),
    ),
)

O_MACHINES = ModelDescriptor(
    name="o-machines-atm-oracle",
    description="Turing machines with a halting oracle realized by an ATM",
    domain=NATURALS,
    codomain=NATURALS,
    index_scheme="tables with a query state",
    codings=(
        Coding(
            "table-numbering",
            (
                _hd(1, "o-machines are tables with a query state", _O_MACHINE),
                _hd(2, "table syntax is decidable", _O_MACHINE),
                _fd(3, "the oracle answers for plain machines, not for o-machines", _O_MACHINE),
                _hd(4, "a universal o-machine forwards queries", _O_MACHINE),
                _hd(5, "successor has no fixed point", _O_MACHINE),
                _hc(6, "o-machine-negates-halting", "branches on the oracle answer"),
                _hc(7, "o-machine-negates-halting", "oracle calls finish, so stages compose"),
            ),
        ),
    ),
)

ITTM = ModelDescriptor(
    name="ittm",
    description="infinite time Turing machines",
    domain=NATURALS,
    codomain=NATURALS,
    index_scheme="table numbering with a limit state",
    codings=(
        Coding(
            "table-numbering",
            (
                _hd(1, "ITTMs are tables and share their indices", _ITTM),
                _hd(2, "table syntax is decidable", _ITTM),
                _fd(3, "no ITTM decides ITTM divergence on its own encoding", _ITTM),
                _hd(4, "a universal ITTM exists", _ITTM),
                _hd(5, "successor has no fixed point", _ITTM),
                _hd(6, "tables branch on the scanned symbol", _ITTM),
                _hd(7, "halting ITTMs compose", _ITTM),
            ),
        ),
    ),
)

PROCESSOR_NETWORKS = ModelDescriptor(
    name="processor-networks",
    description="real-weighted processor networks (declared, not executable)",
    domain=ValueSpace("finite binary input streams"),
    codomain=BOOLEANS,
    index_scheme=None,
    codings=(
        Coding(
            "none",
            (
                _fd(1, "uncountably many networks but only countably many inputs", _NETWORKS),
                _fd(2, "follows from the absence of (1)", _NETWORKS),
                _fd(3, "follows from the absence of (1)", _NETWORKS),
                _fd(4, "no universal network exists", _NETWORKS),
                _hd(5, "negation has no fixed point on {0, 1}", _NETWORKS),
                _hd(6, "threshold units branch", _NETWORKS),
                _hd(7, "networks compose by wiring", _NETWORKS),
            ),
        ),
    ),
)

QUANTUM_ADIABATIC = ModelDescriptor(
    name="quantum-adiabatic",
    description="adiabatic quantum computers with continuous parameters (declared)",
    domain=ValueSpace("Diophantine equations"),
    codomain=BOOLEANS,
    index_scheme=None,
    codings=(
        Coding(
            "none",
            (
                _fd(1, "machines are indexed by continuous parameters", _ADIABATIC),
                _fd(2, "follows from the absence of (1)", _ADIABATIC),
                _fd(3, "follows from the absence of (1)", _ADIABATIC),
                _fd(4, "no universal machine over the continuum of parameters", _ADIABATIC),
                _hd(5, "negation has no fixed point on {0, 1}", _ADIABATIC),
                _hd(6, "measurement outcomes can be branched on", _ADIABATIC),
                _hd(7, "machines can be run in sequence", _ADIABATIC),
            ),
        ),
    ),
)

REGISTRY: dict[str, ModelDescriptor] = {
    m.name: m
    for m in (
        TURING_MACHINES,
        PRIMITIVE_RECURSIVE,
        TOTAL_RECURSIVE,
        ACCELERATING,
        O_MACHINES,
        ITTM,
        PROCESSOR_NETWORKS,
        QUANTUM_ADIABATIC,
    )
}


def all_claimed(name: str, description: str, citation: str) -> ModelDescriptor:
    """A descriptor asserting all seven properties, flagged as contradictory."""
    return ModelDescriptor(
        name=name,
        description=description,
        domain=NATURALS,
        codomain=BOOLEANS,
        index_scheme="claimed",
        codings=(
            Coding(
                "claimed",
                tuple(_hd(pid, "asserted", citation) for pid in PROPERTY_NAMES),
            ),
        ),
        contradiction_flag=True,
    )
