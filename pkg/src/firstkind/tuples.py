"""Diophantine tuple checks, the regular extension d+, discards and triple kinds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Optional, Tuple

from .arith import as_perfect_square

__all__ = [
    "Double",
    "Triple",
    "Quadruple",
    "Discard",
    "is_m_tuple",
    "d_plus",
    "d_plus_from_roots",
    "is_discard_pair",
    "classify_triple",
    "DISCARD_FAMILIES",
]


def _root(n: int, what: str) -> int:
    r = as_perfect_square(n)
    if r is None:
        raise ValueError(f"{what} = {n} is not a perfect square")
    return r


@dataclass(frozen=True)
class Double:
    a: int
    b: int
    r: int

    @classmethod
    def of(cls, a: int, b: int) -> "Double":
        if not 0 < a < b:
            raise ValueError(f"need 0 < a < b, got ({a}, {b})")
        return cls(a, b, _root(a * b + 1, "ab+1"))


@dataclass(frozen=True)
class Triple:
    a: int
    b: int
    c: int
    r: int
    s: int
    t: int

    @classmethod
    def of(cls, a: int, b: int, c: int) -> "Triple":
        if not 0 < a < b < c:
            raise ValueError(f"need 0 < a < b < c, got ({a}, {b}, {c})")
        return cls(a, b, c, _root(a * b + 1, "ab+1"), _root(a * c + 1, "ac+1"), _root(b * c + 1, "bc+1"))


@dataclass(frozen=True)
class Quadruple:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if not 0 < self.a < self.b < self.c < self.d:
            raise ValueError(f"entries must be increasing and positive: {self}")
        if not is_m_tuple((self.a, self.b, self.c, self.d)):
            raise ValueError(f"{self} is not a Diophantine quadruple")


def is_m_tuple(values: Iterable[int]) -> bool:
    """True if every product of two distinct entries, plus one, is a square.

    >>> is_m_tuple({1, 3, 8, 120})
    True
    """
    vals = list(values)
    if not vals:
        raise ValueError("empty tuple")
    if len(set(vals)) != len(vals):
        raise ValueError(f"duplicate entries in {vals}")
    if min(vals) <= 0:
        raise ValueError(f"entries must be positive: {vals}")
    return all(as_perfect_square(x * y + 1) is not None for x, y in combinations(vals, 2))


def d_plus_from_roots(a: int, b: int, c: int, r: int, s: int, t: int) -> int:
    return a + b + c + 2 * a * b * c + 2 * r * s * t


def d_plus(a: int, b: int, c: int) -> int:
    """The regular extension of the triple {a, b, c}.

    >>> d_plus(1, 3, 8)
    120
    """
    tr = Triple.of(*sorted((a, b, c)))
    return d_plus_from_roots(tr.a, tr.b, tr.c, tr.r, tr.s, tr.t)


@dataclass(frozen=True)
class Discard:
    family: str
    k: int


def _quadratic_k(alpha: int, beta: int, gamma: int) -> Iterable[int]:
    """Integer candidates k >= 1 near the positive root of alpha k^2 + beta k = gamma."""
    disc = beta * beta + 4 * alpha * gamma
    k = (math.isqrt(disc) - beta) // (2 * alpha)
    return (j for j in (k - 1, k, k + 1) if j >= 1)


# (label, k -> pair, candidate k's from a)
DISCARD_FAMILIES: Tuple[Tuple[str, Callable[[int], Tuple[int, int]], Callable[[int], Iterable[int]]], ...] = (
    ("{k, k+2}", lambda k: (k, k + 2), lambda a: (a,)),
    ("{3k^2-2k, 3k^2+4k+1}", lambda k: (3 * k * k - 2 * k, 3 * k * k + 4 * k + 1), lambda a: _quadratic_k(3, -2, a)),
    (
        "{2(k+1)^2-2(k+1), 2(k+1)^2+2(k+1)}",
        lambda k: (2 * (k + 1) ** 2 - 2 * (k + 1), 2 * (k + 1) ** 2 + 2 * (k + 1)),
        # 2m^2 - 2m = a with m = k + 1
        lambda a: (m - 1 for m in _quadratic_k(2, -2, a)),
    ),
    (
        "{(k+1)^2-1, (k+1)^2+2(k+1)}",
        lambda k: ((k + 1) ** 2 - 1, (k + 1) ** 2 + 2 * (k + 1)),
        lambda a: (math.isqrt(a + 1) - 1,),
    ),
    ("{k, 4k+4}", lambda k: (k, 4 * k + 4), lambda a: (a,)),
)


def is_discard_pair(a: int, b: int) -> Optional[Discard]:
    """The known non-extendable family containing {a, b}, if any.

    Families are checked in a fixed order and the first match is returned.

    >>> is_discard_pair(8, 15)
    Discard(family='{(k+1)^2-1, (k+1)^2+2(k+1)}', k=2)
    """
    if not 0 < a < b:
        raise ValueError(f"need 0 < a < b, got ({a}, {b})")
    for label, pair, candidates in DISCARD_FAMILIES:
        for k in candidates(a):
            if k >= 1 and pair(k) == (a, b):
                return Discard(label, k)
    return None


def classify_triple(A: int, B: int, C: int) -> str:
    """Kind of the triple {A, B, C}: ``first``, ``second``, ``third`` or ``none``.

    first: C > B^5.  second: B > 4A and B^2 <= C <= B^5.
    third: B > 12A and B^(5/3) < C < B^2, tested as B^5 < C^3.
    """
    Triple.of(A, B, C)
    B5 = B ** 5
    if C > B5:
        return "first"
    if B > 4 * A and B * B <= C:
        return "second"
    if B > 12 * A and B5 < C ** 3 and C < B * B:
        return "third"
    return "none"
