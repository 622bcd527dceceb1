"""Gap-principle inequalities and the size thresholds derived from them.

All real arithmetic runs in MPFR (through gmpy2) at ``prec`` bits, 160 by
default.  Comparisons whose two sides agree to within a relative
``SAFETY_MARGIN`` are reported as holding, so a rounding error can only ever
keep a candidate alive, never eliminate one.

Every inequality has the shape ``lhs < rhs`` where ``rhs`` is a ratio of
products of logarithms.  Logarithms are assembled from logs of the integer
inputs plus logs of the decimal constants, e.g.
``log(4.001 a b^2 d) = log 4.001 + log a + 2 log b + log d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Tuple, Union

import gmpy2
from gmpy2 import mpfr

__all__ = [
    "DEFAULT_PREC",
    "SAFETY_MARGIN",
    "RegimeError",
    "ScanCeilingError",
    "BracketError",
    "Verdict",
    "GammaParams",
    "w_ratio",
    "smallest_n0",
    "gamma3_of",
    "gamma_params",
    "hammond_holds",
    "lara_holds",
    "russell_holds",
    "lara_rhs",
    "LaraFilter",
    "d_max_hammond",
    "threshold_holds",
    "threshold_verdict",
    "threshold_b",
    "optimize_alpha",
    "STEVE_MARK_VARIANTS",
]

DEFAULT_PREC = 160
SAFETY_MARGIN = "1e-20"
N0_CEILING = 10**6
THRESHOLD_CEILING = 10**12

Real = Union[int, float, str, Fraction, Decimal, "mpfr"]


class RegimeError(ValueError):
    """An inequality was evaluated outside the regime where it is meaningful."""


class ScanCeilingError(ArithmeticError):
    """A scan hit its diagnostic ceiling without finding an answer."""


class BracketError(ArithmeticError):
    """Exponential bracketing of a threshold failed below the ceiling."""


@dataclass(frozen=True)
class Verdict:
    holds: bool
    lhs: "mpfr"
    rhs: "mpfr"
    margin_certified: bool

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class GammaParams:
    n0: int
    gamma1: "mpfr"
    gamma2: "mpfr"
    gamma3: "mpfr"
    # False when gamma2 a <= b cannot be met (b/a < gamma1^2)
    lemma_hypothesis: bool = True


def _context(prec: int):
    return gmpy2.context(precision=prec)


def _real(x: Real) -> "mpfr":
    """Convert to mpfr at the current precision; floats are read by their decimal repr."""
    if isinstance(x, Fraction):
        return mpfr(x.numerator) / x.denominator
    if isinstance(x, float):
        return mpfr(repr(x))
    if isinstance(x, Decimal):
        return mpfr(str(x))
    return mpfr(x)


@lru_cache(maxsize=None)
def _const_log(text: str, prec: int) -> "mpfr":
    with _context(prec):
        return gmpy2.log(mpfr(text))


def _ln(n: Real) -> "mpfr":
    return gmpy2.log(_real(n))


def _verdict(lhs, rhs) -> Verdict:
    gap = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    certified = gap > mpfr(SAFETY_MARGIN) * scale
    return Verdict(holds=bool(lhs < rhs) or not certified, lhs=lhs, rhs=rhs, margin_certified=bool(certified))


def _ratio(n1, n2, d1, d2, where: str):
    for value, label in ((d1, "denominator 1"), (d2, "denominator 2"), (n1, "numerator 1"), (n2, "numerator 2")):
        if value <= 0:
            raise RegimeError(f"{where}: log factor {label} is nonpositive ({value})")
    return (n1 * n2) / (d1 * d2)


# ---------------------------------------------------------------------------
# w and v


def _w_logs(a: int, b: int, d: int, prec: int):
    L = lambda s: _const_log(s, prec)
    la, lb, ld = _ln(a), _ln(b), _ln(d)
    top = 2 * L("2.001") + lb + ld
    tail = L("1.994") + (la - lb) / 2
    bottom = 2 * L("1.994") + la + ld
    return top, tail, bottom


def w_ratio(a: int, b: int, d: int, n: Union[int, float], prec: int = DEFAULT_PREC) -> "mpfr":
    """Upper bound on m/n for the indices of the associated Pellian solutions.

    ``[log(2.001^2 b d) + log(1.994 sqrt(a/b)) / n] / log(1.994^2 a d)``.
    Pass ``n=math.inf`` for the limit.
    """
    with _context(prec):
        top, tail, bottom = _w_logs(a, b, d, prec)
        if n == math.inf:
            return top / bottom
        return (top + tail / n) / bottom


def smallest_n0(a: int, b: int, d: int, prec: int = DEFAULT_PREC, ceiling: int = N0_CEILING) -> int:
    """Least ``n >= 2`` with ``(n + 1)/n < w(a, b, d, n)``.

    Both sides decrease in n and, multiplied through by ``n log(1.994^2 a d)``,
    the condition reads ``n (top - bottom) > bottom - tail``: once it holds it
    keeps holding.  The first success is found by galloping then bisection.
    """
    with _context(prec):
        top, tail, bottom = _w_logs(a, b, d, prec)

        def ok(n: int) -> bool:
            return bool((n + 1) * bottom < n * top + tail)

        if ok(2):
            return 2
        lo, hi = 2, 4
        while not ok(hi):
            if hi >= ceiling:
                raise ScanCeilingError(f"no n <= {ceiling} satisfies (n+1)/n < w for ({a}, {b}, {d})")
            lo, hi = hi, min(2 * hi, ceiling)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
        return hi


def gamma3_of(a: int, d: int, gamma1: Real, gamma2: Real, prec: int = DEFAULT_PREC) -> "mpfr":
    """``(1/g1) sqrt(1 + 1/(ad)) (sqrt((g2 ad + 1)/(ad + 1)) - g1)``; needs g2 > g1^2."""
    with _context(prec):
        g1, g2 = _real(gamma1), _real(gamma2)
        if not g2 > g1 * g1:
            raise ValueError(f"gamma2 = {g2} must exceed gamma1^2 = {g1 * g1}")
        ad = mpfr(a * d)
        return gmpy2.sqrt(1 + 1 / ad) * (gmpy2.sqrt((g2 * ad + 1) / (ad + 1)) - g1) / g1


def gamma_params(a: int, b: int, d: int, prec: int = DEFAULT_PREC) -> GammaParams:
    """n0, gamma1, gamma2 = max(b/a, gamma1^2) and gamma3 = v(a, d, gamma1, gamma2).

    When ``gamma1^2 >= b/a`` the bracket in v vanishes; gamma3 is then 0 and
    ``lemma_hypothesis`` is False.
    """
    n0 = smallest_n0(a, b, d, prec)
    with _context(prec):
        g1 = w_ratio(a, b, d, n0, prec)
        ratio = mpfr(b) / a
        g1sq = g1 * g1
        if ratio > g1sq:
            return GammaParams(n0, g1, ratio, gamma3_of(a, d, g1, ratio, prec))
        return GammaParams(n0, g1, g1sq, mpfr(0), lemma_hypothesis=False)


# ---------------------------------------------------------------------------
# gap-principle filters


def _check_ordered(a: int, b: int, d: int) -> None:
    if not 0 < a < b < d:
        raise RegimeError(f"need 0 < a < b < d, got ({a}, {b}, {d})")


def _lara_rhs(la, lb, lba, ld, prec):
    L = lambda s: _const_log(s, prec)
    return _ratio(
        L("4.001") + la + 2 * lb + ld,
        L("1.299") + (la + lb) / 2 - lba + ld,
        L("4") + lb + ld,
        L("0.1053") + ld - lb - 2 * lba,
        "lara",
    )


def lara_rhs(a: int, b: int, d: int, prec: int = DEFAULT_PREC) -> "mpfr":
    with _context(prec):
        return _lara_rhs(_ln(a), _ln(b), _ln(b - a), _ln(d), prec)


def hammond_holds(a: int, b: int, d: int, K: Real = "0.178", prec: int = DEFAULT_PREC) -> Verdict:
    """Filter for ``b >= 2a``: ``K sqrt(a d) / (4b) < rhs``.

    K is 0.178 in general and may be taken as 0.45 when a = 1.
    """
    _check_ordered(a, b, d)
    if b < 2 * a:
        raise RegimeError(f"hammond needs b >= 2a, got ({a}, {b})")
    with _context(prec):
        L = lambda s: _const_log(s, prec)
        la, lb, lba, ld = _ln(a), _ln(b), _ln(b - a), _ln(d)
        rhs = _ratio(
            L("4.001") + (la + lba) / 2 + 2 * lb + ld,
            L("1.299") + (la + lb) / 2 - lba + ld,
            L("4") + lb + ld,
            L("0.1053") + la - lb - 3 * lba + ld,
            "hammond",
        )
        lhs = _real(K) * gmpy2.sqrt(mpfr(a) * d) / (4 * b)
        return _verdict(lhs, rhs)


def lara_holds(a: int, b: int, d: int, prec: int = DEFAULT_PREC) -> Verdict:
    """Filter for ``a < b < 2a``: ``d^(1/8) / (4 sqrt(a)) < rhs``."""
    _check_ordered(a, b, d)
    with _context(prec):
        ld = _ln(d)
        rhs = _lara_rhs(_ln(a), _ln(b), _ln(b - a), ld, prec)
        lhs = gmpy2.exp(ld / 8) / (4 * gmpy2.sqrt(mpfr(a)))
        return _verdict(lhs, rhs)


def russell_holds(a: int, b: int, d: int, gamma3: Real, prec: int = DEFAULT_PREC) -> Verdict:
    """Filter for ``gamma2 a <= b < 2a``: ``gamma3 sqrt(a d) / (4b) < rhs`` (rhs as in lara)."""
    _check_ordered(a, b, d)
    with _context(prec):
        rhs = _lara_rhs(_ln(a), _ln(b), _ln(b - a), _ln(d), prec)
        lhs = _real(gamma3) * gmpy2.sqrt(mpfr(a) * d) / (4 * b)
        return _verdict(lhs, rhs)


class LaraFilter:
    """``lara_holds`` for many d sharing one (a, b).

    The d-independent part of every log factor is folded into a constant once,
    leaving one logarithm and a handful of MPFR operations per d.
    """

    def __init__(self, a: int, b: int, prec: int = DEFAULT_PREC):
        if not 0 < a < b:
            raise RegimeError(f"need 0 < a < b, got ({a}, {b})")
        self.a, self.b, self.prec = a, b, prec
        la, lb, lba = math.log(a), math.log(b), math.log(b - a)
        self._kf = (
            math.log(4.001) + la + 2 * lb,
            math.log(1.299) + (la + lb) / 2 - lba,
            math.log(4) + lb,
            math.log(0.1053) - lb - 2 * lba,
        )
        self._sqrt_a4f = 4 * math.sqrt(a)
        self._k = None

    def _mpfr_constants(self):
        L = lambda s: _const_log(s, self.prec)
        la, lb, lba = _ln(self.a), _ln(self.b), _ln(self.b - self.a)
        self._k = (
            L("4.001") + la + 2 * lb,
            L("1.299") + (la + lb) / 2 - lba,
            L("4") + lb,
            L("0.1053") - lb - 2 * lba,
        )
        self._sqrt_a4 = 4 * gmpy2.sqrt(mpfr(self.a))
        self._eps = mpfr(SAFETY_MARGIN)

    def __call__(self, d: int) -> Verdict:
        if d <= self.b:
            raise RegimeError(f"need d > b, got d={d}")
        with _context(self.prec):
            if self._k is None:
                self._mpfr_constants()
            k1, k2, k3, k4 = self._k
            ld = gmpy2.log(mpfr(d))
            n1, n2, d1, d2 = k1 + ld, k2 + ld, k3 + ld, k4 + ld
            if d2 <= 0 or d1 <= 0 or n1 <= 0 or n2 <= 0:
                raise RegimeError(f"lara: nonpositive log factor at ({self.a}, {self.b}, {d})")
            rhs = (n1 * n2) / (d1 * d2)
            lhs = gmpy2.exp(ld / 8) / self._sqrt_a4
            certified = abs(lhs - rhs) > self._eps * max(lhs, rhs)
            return Verdict(bool(lhs < rhs) or not certified, lhs, rhs, bool(certified))

    def holds(self, d: int) -> bool:
        """Same answer as ``self(d).holds``, deciding in double precision when safe.

        Every log factor is an O(1)-term sum of values below 10^4 in magnitude,
        so each carries absolute error under 1e-11; with all factors above 1 the
        ratio is good to ~1e-10 relative.  Gaps under 1e-6 go to MPFR.
        """
        f1, f2, f3, f4 = self._kf
        ld = math.log(d)
        n1, n2, d1, d2 = f1 + ld, f2 + ld, f3 + ld, f4 + ld
        if min(n1, n2, d1, d2) > 1.0:
            rhs = (n1 * n2) / (d1 * d2)
            lhs = math.exp(ld / 8) / self._sqrt_a4f
            if abs(lhs - rhs) > 1e-6 * max(lhs, rhs):
                return lhs < rhs
        return self(d).holds


# ---------------------------------------------------------------------------
# bound searches


def _largest_holding(pred: Callable[[int], bool], lo: int, ceiling: int, what: str) -> int:
    """Largest integer x >= lo with pred(x), given pred(lo) and eventual failure.

    Grows geometrically until pred fails, bisects, then samples ten points
    spaced geometrically beyond the boundary to confirm failure persists.
    """
    if not pred(lo):
        raise BracketError(f"{what}: inequality fails at the starting point {lo}")
    hi = max(2 * lo, lo + 1)
    while pred(hi):
        lo, hi = hi, 2 * hi
        if hi > ceiling:
            raise BracketError(f"{what}: still holds beyond {ceiling}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    for i in range(10):
        probe = lo + 1 + int((lo + 1) * (2 ** i - 1))
        if probe <= ceiling and pred(probe):
            raise BracketError(f"{what}: holds again at {probe} beyond boundary {lo}")
    return lo


def d_max_hammond(a: int, b: int, K: Real = "0.178", prec: int = DEFAULT_PREC,
                  d_start: Optional[int] = None, ceiling: int = 10**60) -> int:
    """Largest d (from ``d_start``, default ``b^5``) for which hammond still holds."""
    if b < 2 * a:
        raise RegimeError(f"hammond needs b >= 2a, got ({a}, {b})")
    start = b ** 5 if d_start is None else d_start
    return _largest_holding(lambda d: hammond_holds(a, b, d, K, prec).holds, start, ceiling,
                            f"d_max_hammond({a}, {b}, {K})")


def _regime_fail(lhs) -> Verdict:
    # a log factor in the denominator is nonpositive: the bound says nothing
    return Verdict(False, lhs, mpfr("-inf"), True)


def _pollock(b: int, prec: int) -> Verdict:
    L = lambda s: _const_log(s, prec)
    lb = _ln(b)
    lhs = gmpy2.exp(lb * 3 / 2)
    den = (L("4") + 6 * lb) * (L("0.1053") + lb)
    if den <= 0:
        return _regime_fail(lhs)
    rhs = 4 / mpfr("0.178") * (L("2.0005") + 8 * lb) * (L("1.8371") + 5 * lb) / den
    return _verdict(lhs, rhs)


def _turner(b: int, prec: int) -> Verdict:
    L = lambda s: _const_log(s, prec)
    lb = _ln(b)
    lhs = gmpy2.exp(lb / 8)
    den = (L("4") + 6 * lb) * (L("0.4212") + 2 * lb)
    if den <= 0:
        return _regime_fail(lhs)
    rhs = 4 * (L("4.001") + 8 * lb) * (L("0.433") + 6 * lb) / den
    return _verdict(lhs, rhs)


def _steve_mark(b: int, alpha: Real, prec: int, variant: str) -> Verdict:
    L = lambda s: _const_log(s, prec)
    al = _real(alpha)
    lal, l1m = gmpy2.log(al), gmpy2.log(1 - al)
    lb = _ln(b)
    lhs = gmpy2.exp(lb / 8)
    # "printed": b^6 in the a <= alpha b branch and b^5 in the a > alpha b branch.
    # "rederived": b^5 and b^6, from b - a >= (1 - alpha) b and b - a >= 3.
    p_low, p_high = (6, 5) if variant == "printed" else (5, 6)
    best = None
    # a <= alpha b
    den = (L("4") + 6 * lb) * (L("0.4212") + 2 * lb)
    if den > 0:
        best = 4 * gmpy2.sqrt(al) * (L("4.001") + lal + 8 * lb) * (L("1.299") + lal / 2 + p_low * lb - l1m) / den
    # a > alpha b
    den = (L("4") + 6 * lb) * (L("0.1053") + 2 * lb - 2 * l1m)
    if den > 0:
        mark = 4 * (L("4.001") + 8 * lb) * (L("0.433") + p_high * lb) / den
        best = mark if best is None else max(best, mark)
    return _regime_fail(lhs) if best is None else _verdict(lhs, best)


STEVE_MARK_VARIANTS = ("printed", "rederived")


def threshold_verdict(which: str, b: int, alpha: Optional[Real] = None, prec: int = DEFAULT_PREC,
                      variant: str = "printed") -> Verdict:
    """The named size inequality at this b, as a verdict.

    ``variant`` only affects ``steve_mark``; see :data:`STEVE_MARK_VARIANTS`.
    """
    with _context(prec):
        if which == "pollock":
            return _pollock(b, prec)
        if which == "turner":
            return _turner(b, prec)
        if which == "steve_mark":
            if alpha is None:
                raise ValueError("steve_mark needs alpha")
            if variant not in STEVE_MARK_VARIANTS:
                raise ValueError(f"unknown steve_mark variant {variant!r}")
            return _steve_mark(b, alpha, prec, variant)
    raise ValueError(f"unknown threshold {which!r}")


def threshold_holds(which: str, b: int, alpha: Optional[Real] = None, prec: int = DEFAULT_PREC,
                    variant: str = "printed") -> bool:
    return threshold_verdict(which, b, alpha, prec, variant).holds


def threshold_b(which: str, alpha: Optional[Real] = None, prec: int = DEFAULT_PREC,
                ceiling: int = THRESHOLD_CEILING, variant: str = "printed") -> int:
    """Largest integer b for which the named inequality holds.

    ``pollock`` bounds b when b >= 2a, ``turner`` and ``steve_mark`` (which
    needs ``alpha`` in [1/2, 1)) when b < 2a.
    """
    if which == "steve_mark":
        if alpha is None or not Fraction(1, 2) <= Fraction(str(alpha)) < 1:
            raise ValueError(f"steve_mark needs alpha in [1/2, 1), got {alpha}")
    elif alpha is not None:
        raise ValueError(f"{which} takes no alpha")
    pred = lambda b: threshold_holds(which, b, alpha, prec, variant)
    # small b can fail because a log factor is still negative there
    start = next((b for b in range(2, 1001) if pred(b)), None)
    if start is None:
        raise BracketError(f"{which}: never holds for b <= 1000")
    return _largest_holding(pred, start, ceiling, which)


def optimize_alpha(grid_step: Real = "1e-4", prec: int = DEFAULT_PREC,
                   variant: str = "printed") -> Tuple[Fraction, int]:
    """Grid search over alpha in [1/2, 1) minimizing ``threshold_b('steve_mark', alpha)``.

    Returns the first alpha attaining the minimum together with that bound.
    """
    step = Fraction(str(grid_step)) if not isinstance(grid_step, Fraction) else grid_step
    if not 0 < step <= Fraction(1, 2):
        raise ValueError(f"grid_step must lie in (0, 1/2], got {grid_step}")
    best: Optional[Tuple[Fraction, int]] = None
    alpha = Fraction(1, 2)
    while alpha < 1:
        bound = threshold_b("steve_mark", alpha, prec, variant=variant)
        if best is None or bound < best[1]:
            best = (alpha, bound)
        alpha += step
    assert best is not None
    return best
