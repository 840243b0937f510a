from __future__ import annotations

import logging
import random
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import ClassVar

from diagforge.core.machines.halting import DEFAULT_BOUND, DEFAULT_MAX_STEPS, lba_halt_decide
from diagforge.core.models import (
    DeciderLimitError,
    DivergesProven,
    Halts,
    OutOfSpaceError,
    SpaceBound,
    Unknown,
)
from diagforge.core.pr.enumeration import universal_pr_eval
from diagforge.core.pr.evaluator import DEFAULT_LIMITS, PrLimits, ResourceExhausted

_LOGGER = logging.getLogger(__name__)

# Infinite codomains are sampled below this ceiling on top of the first few naturals.
_SAMPLE_CEILING = 10**9
_SMALL_VALUES = 16


class JSpecRejected(ValueError):
    pass


@dataclass(frozen=True)
class ValueSpace:
    name: str
    members: tuple[int, ...] | None = None

    @property
    def finite(self) -> bool:
        return self.members is not None

    def contains(self, value: object) -> bool:
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            return False
        return self.members is None or value in self.members

    def describe(self) -> str:
        if self.members is None:
            return self.name
        return f"{self.name} {{{', '.join(str(m) for m in self.members)}}}"


NATURALS = ValueSpace("naturals")
BOOLEANS = ValueSpace("booleans", (0, 1))


@dataclass(frozen=True)
class Converged:
    kind: ClassVar[str] = "converged"
    value: int


@dataclass(frozen=True)
class Diverged:
    kind: ClassVar[str] = "diverged"
    certificate: DivergesProven | str


SelfResult = Converged | Diverged | Unknown
SelfEvaluator = Callable[[int], SelfResult]

# None stands for k diverging at y, which never equals y.
KMap = Callable[[int], int | None]


@dataclass(frozen=True)
class JSpec:
    name: str
    domain: ValueSpace
    codomain: ValueSpace
    index_set: Callable[[int], bool]
    y0: int
    k: KMap
    evaluator: SelfEvaluator
    k_label: str = "k"


@dataclass(frozen=True)
class JValue:
    kind: ClassVar[str] = "value"
    value: int
    branch: str
    self_value: int | None = None


@dataclass(frozen=True)
class JDiverges:
    kind: ClassVar[str] = "diverges"
    branch: str
    self_value: int


JResult = JValue | JDiverges | Unknown


@dataclass(frozen=True)
class JProcedure:
    spec: JSpec
    checked: tuple[int, ...]
    exhaustive: bool
    obligation: str | None = field(default=None)

    def __call__(self, x: int) -> JResult:
        spec = self.spec
        if not spec.domain.contains(x):
            raise ValueError(f"{x!r} is not in {spec.domain.describe()}.")
        if not spec.index_set(x):
            return JValue(value=spec.y0, branch="outside-index-set")
        result = spec.evaluator(x)
        if isinstance(result, Unknown):
            return result
        if isinstance(result, Diverged):
            return JValue(value=spec.y0, branch="self-application-diverges")
        ky = spec.k(result.value)
        if ky is None:
            return JDiverges(branch="k-diverges", self_value=result.value)
        return JValue(value=ky, branch="k-applied", self_value=result.value)


def _sample(codomain: ValueSpace, seed: int, sample_size: int) -> tuple[list[int], bool]:
    if codomain.members is not None:
        return list(codomain.members), True
    rng = random.Random(seed)
    small = list(range(_SMALL_VALUES))
    drawn = [rng.randrange(_SAMPLE_CEILING) for _ in range(max(0, sample_size - len(small)))]
    return sorted(set(small + drawn)), False


def build_j(spec: JSpec, *, seed: int = 0, sample_size: int = 64) -> JProcedure:
    """Validate a diagonal recipe and return j as a callable.

    k is checked for fixed points on all of a finite codomain, or on the first
    naturals plus a seeded sample otherwise; the unchecked rest is kept as an
    obligation on the procedure.
    """
    if not spec.codomain.contains(spec.y0):
        raise JSpecRejected(f"y0 = {spec.y0!r} is not in {spec.codomain.describe()}.")

    sample, exhaustive = _sample(spec.codomain, seed, sample_size)
    for y in sample:
        ky = spec.k(y)
        if ky is None:
            continue
        if ky == y:
            raise JSpecRejected(f"{spec.k_label} has a fixed point at {y}: k({y}) = {ky}.")
        if not spec.codomain.contains(ky):
            raise JSpecRejected(f"{spec.k_label} leaves {spec.codomain.describe()} at {y}.")

    obligation = None
    if not exhaustive:
        obligation = (
            f"{spec.k_label}(y) != y verified on {len(sample)} values (seed {seed}); "
            "unverified on the rest of the codomain"
        )
    _LOGGER.debug("Built j for %s (%s checked values)", spec.name, len(sample))
    return JProcedure(
        spec=spec, checked=tuple(sample), exhaustive=exhaustive, obligation=obligation
    )


def exact_self_evaluator(
    bound: SpaceBound = DEFAULT_BOUND, *, max_steps: int = DEFAULT_MAX_STEPS
) -> SelfEvaluator:
    def evaluate(x: int) -> SelfResult:
        try:
            answer = lba_halt_decide(x, x, bound, max_steps=max_steps)
        except OutOfSpaceError as e:
            return Unknown(budget=bound.s, reason=f"out of space: {e}")
        except DeciderLimitError as e:
            return Unknown(budget=e.limit, reason="exact decider step cap")
        if isinstance(answer, Halts):
            return Converged(answer.output)
        return Diverged(answer)

    return evaluate


def instantiate_g_as_j(
    bound: SpaceBound = DEFAULT_BOUND, *, max_steps: int = DEFAULT_MAX_STEPS
) -> JSpec:
    return JSpec(
        name="g",
        domain=NATURALS,
        codomain=NATURALS,
        index_set=lambda x: True,
        y0=0,
        k=lambda y: None,
        evaluator=exact_self_evaluator(bound, max_steps=max_steps),
        k_label="diverge",
    )


def pr_self_evaluator(limits: PrLimits = DEFAULT_LIMITS) -> SelfEvaluator:
    def evaluate(x: int) -> SelfResult:
        try:
            return Converged(universal_pr_eval(x, x, limits))
        except ResourceExhausted as e:
            return Unknown(budget=e.limit, reason=f"PR {e.resource} cap")

    return evaluate


def instantiate_h_as_j(limits: PrLimits = DEFAULT_LIMITS) -> JSpec:
    return JSpec(
        name="h",
        domain=NATURALS,
        codomain=NATURALS,
        index_set=lambda x: True,
        y0=0,
        k=lambda y: y + 1,
        evaluator=pr_self_evaluator(limits),
        k_label="successor",
    )
