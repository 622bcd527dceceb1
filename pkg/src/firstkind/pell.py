"""Pell machinery for extending a double {a, b} to triples {a, b, c}.

A positive integer c extends the double exactly when ``ac + 1 = x**2`` and
``bc + 1 = y**2``; eliminating c gives ``b x**2 - a y**2 = b - a``.  With
``g = gcd(a, b)``, ``a' = a/g``, ``b' = b/g`` and ``X = b' x`` this becomes the
generalized Pell equation ``X**2 - D y**2 = N`` where ``D = a' b'`` and
``N = b' (b' - a')``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .arith import as_perfect_square

__all__ = [
    "PellInstance",
    "FundamentalUnit",
    "SolutionClass",
    "reduce_instance",
    "fundamental_unit",
    "fundamental_solutions",
    "equivalent",
    "solution_sequence",
    "c_values",
    "extensions",
]

# Above this many y-values the class scan is done in numpy blocks.
_VECTOR_SCAN_MIN = 48
_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class PellInstance:
    a: int
    b: int
    r: int
    g: int
    a_dag: int
    b_dag: int
    D: int
    N: int


@dataclass(frozen=True)
class FundamentalUnit:
    u: int
    v: int


@dataclass(frozen=True)
class SolutionClass:
    X0: int
    y0: int


def reduce_instance(a: int, b: int) -> PellInstance:
    """Reduce ``b x^2 - a y^2 = b - a`` to ``X^2 - D y^2 = N``.

    >>> reduce_instance(2, 24)
    PellInstance(a=2, b=24, r=7, g=2, a_dag=1, b_dag=12, D=12, N=132)
    """
    if not 0 < a < b:
        raise ValueError(f"need 0 < a < b, got ({a}, {b})")
    r = as_perfect_square(a * b + 1)
    if r is None:
        raise ValueError(f"({a}, {b}) is not a double: {a * b + 1} is not a square")
    g = math.gcd(a, b)
    ad, bd = a // g, b // g
    return PellInstance(a, b, r, g, ad, bd, ad * bd, bd * (bd - ad))


def fundamental_unit(D: int) -> FundamentalUnit:
    """Least positive solution of ``u^2 - D v^2 = 1``.

    Walks the continued fraction of sqrt(D) (the PQa recurrence with P0 = 0,
    Q0 = 1) and tests each convergent.
    """
    if D < 2:
        raise ValueError(f"D must be at least 2, got {D}")
    a0 = math.isqrt(D)
    if a0 * a0 == D:
        raise ValueError(f"D = {D} is a perfect square")
    P, Q, q = 0, 1, a0
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    while h * h - D * k * k != 1:
        P = q * Q - P
        Q = (D - P * P) // Q
        q = (a0 + P) // Q
        h_prev, h = h, q * h + h_prev
        k_prev, k = k, q * k + k_prev
    return FundamentalUnit(h, k)


def equivalent(s1: Tuple[int, int], s2: Tuple[int, int], D: int, N: int) -> bool:
    """True if two solutions of ``X^2 - D y^2 = N`` lie in the same class."""
    X1, y1 = s1
    X2, y2 = s2
    return (X1 * X2 - D * y1 * y2) % N == 0 and (X1 * y2 - X2 * y1) % N == 0


def _scan_squares(D: int, N: int, y_max: int) -> List[Tuple[int, int]]:
    """All (X, y) with 0 <= y <= y_max, X > 0 and X^2 - D y^2 = N."""
    hits: List[Tuple[int, int]] = []
    if y_max < _VECTOR_SCAN_MIN or N + D * y_max * y_max >= _INT64_SAFE:
        for y in range(y_max + 1):
            X = as_perfect_square(N + D * y * y)
            if X is not None and X > 0:
                hits.append((X, y))
        return hits
    ys = np.arange(y_max + 1, dtype=np.int64)
    vals = N + D * ys * ys
    roots = np.sqrt(vals.astype(np.float64)).astype(np.int64)
    near = (roots * roots == vals) | ((roots + 1) * (roots + 1) == vals) | ((roots - 1) * (roots - 1) == vals)
    for y in np.nonzero(near)[0].tolist():
        X = as_perfect_square(N + D * y * y)
        if X is not None and X > 0:
            hits.append((X, y))
    return hits


def class_scan_limit(inst: PellInstance, unit: FundamentalUnit) -> int:
    """Largest y with ``y <= v sqrt(N) / sqrt(2 (u + 1))``, the class-representative bound."""
    # y^2 * 2(u+1) <= v^2 N, solved exactly
    return math.isqrt(unit.v * unit.v * inst.N // (2 * (unit.u + 1)))


def fundamental_solutions(inst: PellInstance, unit: FundamentalUnit) -> List[SolutionClass]:
    """One representative per class of solutions of ``X^2 - D y^2 = N``.

    Every class has a member with ``|y|`` below :func:`class_scan_limit`; the
    scan collects those and keeps the first (smallest ``|y|``) of each class.
    Conjugates ``(X, -y)`` are separate classes unless equivalent, so the plus
    direction of all returned classes covers every solution up to sign.
    """
    D, N = inst.D, inst.N
    reps: List[SolutionClass] = []
    for X, y in _scan_squares(D, N, class_scan_limit(inst, unit)):
        for cand in ((X, y), (X, -y)) if y else ((X, 0),):
            if not any(equivalent(cand, (c.X0, c.y0), D, N) for c in reps):
                reps.append(SolutionClass(*cand))
    return reps


def solution_sequence(cls: SolutionClass, unit: FundamentalUnit, D: int, direction: int = 1) -> Iterator[Tuple[int, int]]:
    """Yield the class representative and then its successive unit multiples.

    ``direction=+1`` multiplies by ``u + v sqrt(D)``, ``-1`` by ``u - v sqrt(D)``.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    u, v = unit.u, direction * unit.v
    Dv = D * v
    X, y = cls.X0, cls.y0
    while True:
        yield X, y
        X, y = u * X + Dv * y, v * X + u * y


def _regular_unit_power(inst: PellInstance, unit: FundamentalUnit) -> int:
    """k with (u + v sqrt D)^k = r + g sqrt D.

    Multiplying by ``r + g sqrt D`` maps integral (x, y) to integral (x, y) and
    back, so integrality along a class sequence is periodic with period k.
    """
    target = (inst.r, inst.g)
    X, y, k = unit.u, unit.v, 1
    while (X, y) != target:
        if X > inst.r:
            raise ArithmeticError(f"r + g sqrt(D) is not a power of the fundamental unit for {inst}")
        X, y = unit.u * X + inst.D * unit.v * y, unit.v * X + unit.u * y
        k += 1
    return k


def _class_extensions(inst: PellInstance, cls: SolutionClass, unit: FundamentalUnit, period: int) -> Iterator[Tuple[int, int, int]]:
    a, bd = inst.a, inst.b_dag
    seq = solution_sequence(cls, unit, inst.D, +1)
    head = [next(seq) for _ in range(period)]
    live = []
    for i, (X, y) in enumerate(head):
        if X % bd == 0 and ((X // bd) ** 2 - 1) % a == 0:
            live.append(i)
    if not live:
        return
    buffered = iter(head)
    n = 0
    while True:
        X, y = next(buffered, None) or next(seq)
        if n % period in live:
            x = X // bd
            c = (x * x - 1) // a
            if c > 0:
                yield c, x, abs(y)
        n += 1


def extensions(a: int, b: int, inst: Optional[PellInstance] = None) -> Iterator[Tuple[int, int, int]]:
    """Yield ``(c, s, t)`` with ``ac + 1 = s^2``, ``bc + 1 = t^2``, c strictly increasing."""
    inst = inst or reduce_instance(a, b)
    unit = fundamental_unit(inst.D)
    period = _regular_unit_power(inst, unit)
    streams = [_class_extensions(inst, cls, unit, period) for cls in fundamental_solutions(inst, unit)]
    last = 0
    for item in heapq.merge(*streams):
        c = item[0]
        if c < last:
            raise ArithmeticError(f"non-monotone extension stream for ({a}, {b}) at c={c}")
        if c != last:
            last = c
            yield item


def c_values(a: int, b: int) -> Iterator[int]:
    """Every positive c making {a, b, c} a Diophantine triple, in increasing order.

    >>> from itertools import islice
    >>> list(islice(c_values(1, 3), 3))
    [8, 120, 1680]
    """
    for c, _, _ in extensions(a, b):
        yield c
