from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Literal, NewType

NatValue = NewType("NatValue", int)
GodelIndex = NewType("GodelIndex", int)

Tier = Literal["semi", "exact"]


@dataclass(frozen=True)
class SpaceBound:
    s: int

    def __post_init__(self) -> None:
        if not isinstance(self.s, int) or self.s < 1:
            raise ValueError(f"Space bound must be a positive cell count, got {self.s!r}.")

    def region(self, input_ones: int) -> tuple[int, int]:
        # Input block, its left end-marker cell, then s work cells from the head start.
        return -(input_ones + 1), self.s - 1


@dataclass(frozen=True)
class Halts:
    kind: ClassVar[str] = "halts"
    steps: int
    output: int = 0


@dataclass(frozen=True)
class DivergesProven:
    kind: ClassVar[str] = "diverges-proven"
    cycle_start: int
    cycle_length: int


@dataclass(frozen=True)
class Unknown:
    kind: ClassVar[str] = "unknown"
    budget: int
    reason: str = "budget exhausted"


OracleAnswer = Halts | DivergesProven | Unknown


class OutOfSpaceError(RuntimeError):
    def __init__(self, *, step: int, head: int, region: tuple[int, int]) -> None:
        super().__init__(
            f"Head left the bounded region {region[0]}..{region[1]} at cell {head} (step {step})."
        )
        self.step = step
        self.head = head
        self.region = region


class DeciderLimitError(RuntimeError):
    def __init__(self, limit: int) -> None:
        super().__init__(f"Exact decider gave up after {limit} steps without a verdict.")
        self.limit = limit


def input_ones(value: int | None) -> int:
    if value is None:
        return 0
    if value < 0:
        raise ValueError(f"Natural number expected, got {value}.")
    return value + 1
