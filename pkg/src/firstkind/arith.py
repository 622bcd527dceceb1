"""Exact integer primitives: square roots, factorization, divisors of r^2 - 1."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

__all__ = [
    "Factorization",
    "isqrt",
    "as_perfect_square",
    "is_square",
    "is_probable_prime",
    "factorize",
    "divisors_from_factors",
    "divisors_via_r",
    "SmallFactorTable",
]

_TRIAL_LIMIT = 1000
_SMALL_PRIMES = [p for p in range(2, _TRIAL_LIMIT) if all(p % q for q in range(2, math.isqrt(p) + 1))]

# Deterministic Miller-Rabin witnesses for n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981

# Quadratic residues modulo 64, 63, 65 and 11 for a cheap non-square screen.
_QR64 = frozenset(i * i % 64 for i in range(64))
_QR63 = frozenset(i * i % 63 for i in range(63))
_QR65 = frozenset(i * i % 65 for i in range(65))
_QR11 = frozenset(i * i % 11 for i in range(11))


@dataclass(frozen=True)
class Factorization:
    """Prime factorization ``value = prod(p**e for p, e in factors)``."""

    value: int
    factors: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factor list {self.factors!r}")
            last = p
            prod *= p ** e
        if prod != self.value:
            raise ValueError(f"factors {self.factors!r} do not multiply to {self.value}")

    def as_dict(self) -> Dict[int, int]:
        return dict(self.factors)

    def divisors(self) -> List[int]:
        return divisors_from_factors(self.factors)


def isqrt(n: int) -> int:
    """Return floor(sqrt(n)) computed with exact integer arithmetic.

    >>> isqrt(120), isqrt(32761)
    (10, 181)
    """
    if n < 0:
        raise ValueError(f"isqrt of negative number {n}")
    return math.isqrt(n)


def as_perfect_square(n: int) -> Optional[int]:
    """Return ``r`` with ``r*r == n`` if ``n`` is a perfect square, else None."""
    if n < 0:
        raise ValueError(f"negative input {n}")
    if (n & 63) not in _QR64:
        return None
    if n > 1 << 20 and (n % 63 not in _QR63 or n % 65 not in _QR65 or n % 11 not in _QR11):
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def is_square(n: int) -> bool:
    return n >= 0 and as_perfect_square(n) is not None


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, which covers every use here."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while not d & 1:
        d >>= 1
        s += 1
    bases: Iterable[int] = _MR_BASES
    if n >= _MR_DETERMINISTIC_LIMIT:
        rng = random.Random(n)
        bases = list(_MR_BASES) + [rng.randrange(2, n - 1) for _ in range(24)]
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int, seed: int) -> int:
    """Return a nontrivial factor of the odd composite ``n`` (Brent's variant)."""
    rng = random.Random(seed)
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split(n: int, out: Dict[int, int]) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = as_perfect_square(m)
        if r is not None:
            stack.extend((r, r))
            continue
        f = _brent_rho(m, seed=m)
        stack.extend((f, m // f))


def factorize(n: int, table: Optional["SmallFactorTable"] = None) -> Factorization:
    """Complete prime factorization of ``n >= 1``.

    Trial division by primes below 1000, then Brent-Pollard rho; every
    cofactor reported as prime has passed Miller-Rabin.  When ``table`` covers
    ``n`` the smallest-prime-factor table is used instead.
    """
    if n < 1:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    if table is not None and n <= table.limit:
        return Factorization(n, tuple(sorted(table.factor_dict(n).items())))
    found: Dict[int, int] = {}
    m = n
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found[p] = e
    if m > 1:
        if m < _TRIAL_LIMIT * _TRIAL_LIMIT:
            found[m] = found.get(m, 0) + 1
        else:
            _split(m, found)
    return Factorization(n, tuple(sorted(found.items())))


def divisors_from_factors(factors: Sequence[Tuple[int, int]] | Iterable[Tuple[int, int]]) -> List[int]:
    divs = [1]
    for p, e in factors:
        step = []
        pk = 1
        for _ in range(e):
            pk *= p
            step.extend(d * pk for d in divs)
        divs.extend(step)
    divs.sort()
    return divs


def _merge(f1: Dict[int, int], f2: Dict[int, int]) -> Dict[int, int]:
    merged = dict(f1)
    for p, e in f2.items():
        merged[p] = merged.get(p, 0) + e
    return merged


def divisors_via_r(r: int, table: Optional["SmallFactorTable"] = None) -> List[int]:
    """All divisors of ``r*r - 1`` in increasing order.

    ``r - 1`` and ``r + 1`` are factored separately and the two
    factorizations merged, which is much cheaper than factoring ``r*r - 1``.

    >>> divisors_via_r(4)
    [1, 3, 5, 15]
    """
    if r < 2:
        raise ValueError(f"divisors_via_r expects r >= 2, got {r}")
    if table is not None and r + 1 <= table.limit:
        merged = _merge(table.factor_dict(r - 1), table.factor_dict(r + 1))
    else:
        merged = _merge(factorize(r - 1).as_dict(), factorize(r + 1).as_dict())
    return divisors_from_factors(sorted(merged.items()))


class SmallFactorTable:
    """Smallest-prime-factor table for fast repeated factorization below ``limit``."""

    def __init__(self, limit: int):
        import numpy as np

        self.limit = int(limit)
        spf = np.zeros(self.limit + 1, dtype=np.int64)
        for p in range(2, math.isqrt(self.limit) + 1):
            if spf[p] == 0:
                block = spf[p * p :: p]
                block[block == 0] = p
        # unmarked entries >= 2 are prime
        idx = np.nonzero(spf == 0)[0]
        spf[idx] = idx
        self._spf = spf.tolist()

    def factor_dict(self, n: int) -> Dict[int, int]:
        spf = self._spf
        out: Dict[int, int] = {}
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        return out
