from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import ClassVar

from diagforge.core.diagonal.audit import UnknownModelError, resolve_model
from diagforge.core.diagonal.checks import CheckContext
from diagforge.core.diagonal.jspec import (
    BOOLEANS,
    NATURALS,
    Converged,
    Diverged,
    JDiverges,
    JProcedure,
    JSpec,
    JValue,
    SelfEvaluator,
    SelfResult,
    ValueSpace,
    build_j,
)
from diagforge.core.diagonal.registry import REGISTRY, ModelDescriptor, all_claimed
from diagforge.core.machines.accelerating import (
    AtmProgramError,
    ComposedAtm,
    SelfApplicationAtm,
    WriteOnceViolation,
    atm_run,
    compose_check,
    negation_atm,
    verdict_value,
)
from diagforge.core.models import DeciderLimitError, OutOfSpaceError, SpaceBound, Unknown

_LOGGER = logging.getLogger(__name__)


class WitnessPreconditionError(ValueError):
    pass


class DiagonalSubject(ABC):
    """A class of functions that claims to contain its own diagonal j."""

    @property
    @abstractmethod
    def name(self) -> str:
        raise NotImplementedError

    @property
    @abstractmethod
    def description(self) -> str:
        raise NotImplementedError

    @property
    @abstractmethod
    def codomain(self) -> ValueSpace:
        raise NotImplementedError

    @abstractmethod
    def own_index(self) -> int:
        raise NotImplementedError

    @abstractmethod
    def jspec(self, evaluator: SelfEvaluator) -> JSpec:
        """The class's j built over the given self-application procedure."""
        raise NotImplementedError

    @abstractmethod
    def self_evaluator(self) -> SelfEvaluator:
        raise NotImplementedError

    def probes(self) -> Iterable[int]:
        return ()

    def cross_checks(self, j: JProcedure) -> list[str]:
        return []

    @property
    def descriptor(self) -> ModelDescriptor:
        return all_claimed(self.name, self.description, "asserted by the subject under test")


def _negate(y: int) -> int | None:
    return 1 - y


def _self_reference(i: int) -> Unknown:
    return Unknown(budget=0, reason=f"member {i} applied to itself refers back to j")


class ToyTables(DiagonalSubject):
    """Four lookup tables over X = {0..3}; table 3 is claimed to be the class's j."""

    TABLES: ClassVar[tuple[tuple[int, ...], ...]] = ((0, 0, 0, 0), (1, 1, 1, 1), (0, 1, 0, 1))
    DOMAIN = ValueSpace("X", (0, 1, 2, 3))

    @property
    def name(self) -> str:
        return "toy-tables"

    @property
    def description(self) -> str:
        return "four lookup tables on {0..3} with values in {0, 1}; table 3 is claimed to be j"

    @property
    def codomain(self) -> ValueSpace:
        return BOOLEANS

    def own_index(self) -> int:
        return len(self.TABLES)

    def jspec(self, evaluator: SelfEvaluator) -> JSpec:
        return JSpec(
            name="toy-j",
            domain=self.DOMAIN,
            codomain=BOOLEANS,
            index_set=self.DOMAIN.contains,
            y0=0,
            k=_negate,
            evaluator=evaluator,
            k_label="not",
        )

    def self_evaluator(self) -> SelfEvaluator:
        def evaluate(x: int) -> SelfResult:
            if x < len(self.TABLES):
                return Converged(self.TABLES[x][x])
            return _self_reference(x)

        return evaluate

    def probes(self) -> Iterable[int]:
        return range(len(self.TABLES))

    def cross_checks(self, j: JProcedure) -> list[str]:
        row = []
        for x in self.probes():
            r = j(x)
            row.append(str(r.value) if isinstance(r, JValue) else "?")
        i = self.own_index()
        return [f"table {i} on 0..{i - 1} reads ({', '.join(row)}, ?) and must differ from "
                f"each table {list(self.probes())} on the diagonal"]


class AtmForcedComposition(DiagonalSubject):
    """Table ATMs with closure under composition asserted against the composition check.

    Forcing the rejected pipeline `negation . self-application` into the class gives
    i(x) = not psi_x(x) an index; the first one past the probes is claimed for it.
    """

    def __init__(
        self,
        bound: SpaceBound = SpaceBound(8),
        probes: Iterable[int] = range(8),
        max_steps: int = 1_000_000,
    ) -> None:
        self.bound = bound
        self._probes = tuple(probes)
        self.max_steps = max_steps

    @property
    def name(self) -> str:
        return "atm-forced-composition"

    @property
    def description(self) -> str:
        return "accelerating machines with property (7) forced on"

    @property
    def codomain(self) -> ValueSpace:
        return BOOLEANS

    def own_index(self) -> int:
        return max(self._probes, default=-1) + 1

    def jspec(self, evaluator: SelfEvaluator) -> JSpec:
        return JSpec(
            name="i",
            domain=NATURALS,
            codomain=BOOLEANS,
            index_set=lambda x: True,
            y0=0,
            k=_negate,
            evaluator=evaluator,
            k_label="not",
        )

    def self_evaluator(self) -> SelfEvaluator:
        claimed = self.own_index()
        atm = SelfApplicationAtm()

        def evaluate(x: int) -> SelfResult:
            if x == claimed:
                return _self_reference(x)
            try:
                verdict = atm.run_exact(x, self.bound, self.max_steps)
            except (OutOfSpaceError, DeciderLimitError, WriteOnceViolation) as e:
                return Unknown(budget=self.max_steps, reason=str(e))
            value = verdict_value(verdict)
            assert value is not None
            return Converged(value)

        return evaluate

    def probes(self) -> Iterable[int]:
        return self._probes

    def cross_checks(self, j: JProcedure) -> list[str]:
        first, second = SelfApplicationAtm(), negation_atm()
        check = compose_check(first, second, self._probes, self.bound, max_steps=self.max_steps)
        lines = [
            f"compose_check({first.name}, {second.name}): "
            f"{'accepted' if check.accepted else 'rejected'}: {check.reason}"
            + (f" (input {check.witness_input})" if check.witness_input is not None else ""),
            "forcing the composition anyway and cross-checking it against j:",
        ]
        forced = ComposedAtm(first, second, check)
        for x in self._probes:
            expected = j(x)
            try:
                got = verdict_value(atm_run(forced, x, bound=self.bound, max_steps=self.max_steps))
            except (OutOfSpaceError, DeciderLimitError, WriteOnceViolation, AtmProgramError) as e:
                lines.append(f"  x={x}: outside the exact tier ({type(e).__name__})")
                continue
            if isinstance(expected, JValue):
                verdict = "agree" if expected.value == got else "DISAGREE"
                lines.append(
                    f"  x={x}: j({x}) = {expected.value}, forced atm_run = {got} ({verdict})"
                )
            else:
                lines.append(f"  x={x}: j({x}) unknown, forced atm_run = {got}")
        return lines


WITNESS_SUBJECTS: dict[str, Callable[[], DiagonalSubject]] = {
    "toy-tables": ToyTables,
    "atm-forced-composition": AtmForcedComposition,
}


@dataclass(frozen=True)
class WitnessTranscript:
    kind: ClassVar[str] = "witness"
    model: str
    index: int
    lines: tuple[str, ...]
    inconsistent: bool


def _case_line(i: int, assumed: str, result: JValue | JDiverges | Unknown) -> tuple[str, bool]:
    lhs = f"ψ_{i}({i})"
    if isinstance(result, JValue):
        return f"case {lhs} {assumed}: j({i}) = {result.value}, so {lhs} = {result.value}", True
    if isinstance(result, JDiverges):
        return f"case {lhs} {assumed}: j({i}) diverges, so {lhs} diverges", True
    return f"case {lhs} {assumed}: j({i}) undecided ({result.reason})", False


def _subject_for(model: DiagonalSubject | ModelDescriptor | str) -> DiagonalSubject:
    if isinstance(model, DiagonalSubject):
        return model
    if isinstance(model, str) and model in WITNESS_SUBJECTS:
        return WITNESS_SUBJECTS[model]()
    descriptor = resolve_model(model)
    if descriptor.missing:
        raise WitnessPreconditionError(
            f"{descriptor.name} lacks properties {list(descriptor.missing)}; "
            "it cannot compute its own j, so there is no contradiction to derive."
        )
    raise WitnessPreconditionError(
        f"{descriptor.name} claims all seven properties but has no executable evaluator."
    )


def contradiction_witness(
    model: DiagonalSubject | ModelDescriptor | str, ctx: CheckContext | None = None
) -> WitnessTranscript:
    """Derive psi_i(i) != psi_i(i) for a subject claiming to contain its own j.

    Every possible value of psi_i(i), plus divergence, is assumed in turn; each
    assumption is refuted by evaluating j at i, which the claim makes equal to psi_i.
    """
    ctx = ctx or CheckContext()
    subject = _subject_for(model)
    i = subject.own_index()
    honest = subject.self_evaluator()
    j = build_j(subject.jspec(honest), seed=ctx.seed, sample_size=ctx.sample_size)
    spec = j.spec
    if not spec.index_set(i):
        raise WitnessPreconditionError(f"Claimed index {i} lies outside the index set.")

    lines = [
        f"subject {subject.name}: {subject.description}",
        f"claim: member {i} computes j (y0 = {spec.y0}, k = {spec.k_label}) inside the class",
    ]
    for x in subject.probes():
        r = j(x)
        shown: object = "?"
        if isinstance(r, JValue):
            shown = r.value
        elif isinstance(r, JDiverges):
            shown = "diverges"
        self_value = honest(x)
        psi = self_value.value if isinstance(self_value, Converged) else type(self_value).kind
        lines.append(f"ψ_{i}({x}) = j({x}) = {shown}, while ψ_{x}({x}) = {psi}")
    lines.extend(subject.cross_checks(j))
    lines.append(f"self-application: ψ_{i}({i}) = j({i}) = {spec.k_label}(ψ_{i}({i}))")

    hypotheses: list[tuple[str, Callable[[int], SelfResult]]] = []
    codomain = subject.codomain
    values = codomain.members if codomain.members is not None else j.checked[:8]
    for y in values:
        hypotheses.append(
            (f"= {y}", lambda x, y=y: Converged(y) if x == i else honest(x))
        )
    hypotheses.append(("diverges", lambda x: Diverged("assumed") if x == i else honest(x)))

    refuted = 0
    for assumed, evaluator in hypotheses:
        result = build_j(subject.jspec(evaluator), seed=ctx.seed, sample_size=ctx.sample_size)(i)
        line, decided = _case_line(i, assumed, result)
        contradicts = decided and not (
            isinstance(result, JValue) and assumed == f"= {result.value}"
        ) and not (isinstance(result, JDiverges) and assumed == "diverges")
        refuted += contradicts
        lines.append(line + (", contradicting the assumption" if contradicts else ""))

    inconsistent = refuted == len(hypotheses)
    if inconsistent:
        lines.append(f"every case is refuted: ψ_{i}({i}) ≠ ψ_{i}({i})")
    else:
        lines.append("some case is not refuted; no inconsistency derived")
    _LOGGER.info("Witness for %s: inconsistent=%s", subject.name, inconsistent)
    return WitnessTranscript(
        model=subject.name, index=i, lines=tuple(lines), inconsistent=inconsistent
    )


def known_models() -> list[str]:
    return [*REGISTRY, *WITNESS_SUBJECTS]


__all__ = [
    "AtmForcedComposition",
    "DiagonalSubject",
    "ToyTables",
    "UnknownModelError",
    "WITNESS_SUBJECTS",
    "WitnessPreconditionError",
    "WitnessTranscript",
    "contradiction_witness",
]
