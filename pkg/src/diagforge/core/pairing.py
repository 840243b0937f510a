from __future__ import annotations

from math import isqrt


def pair(a: int, b: int) -> int:
    """Cantor pairing: a bijection N x N -> N.

    >>> pair(0, 0), pair(0, 1), pair(1, 0), pair(1, 1)
    (0, 1, 2, 4)
    """
    if a < 0 or b < 0:
        raise ValueError("pair() is defined on naturals only.")
    c = a + b
    return c * (c + 1) // 2 + a


def unpair(z: int) -> tuple[int, int]:
    if z < 0:
        raise ValueError("unpair() is defined on naturals only.")
    w = (isqrt(8 * z + 1) - 1) // 2
    a = z - w * (w + 1) // 2
    return a, w - a


def pair_tuple(values: tuple[int, ...] | list[int]) -> int:
    """Fixed-length tuple code: (x1, ..., xm) -> pair(x1, code(x2, ..., xm)).

    The length is not part of the code; callers must know it.
    """
    if not values:
        raise ValueError("pair_tuple() needs at least one value.")
    result = values[-1]
    for v in reversed(values[:-1]):
        result = pair(v, result)
    return result


def unpair_tuple(z: int, length: int) -> tuple[int, ...]:
    if length < 1:
        raise ValueError("unpair_tuple() needs a positive length.")
    out: list[int] = []
    for _ in range(length - 1):
        head, z = unpair(z)
        out.append(head)
    out.append(z)
    return tuple(out)
