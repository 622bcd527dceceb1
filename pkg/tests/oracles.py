"""Independent brute-force oracles.

Nothing here imports the package's arithmetic, Pell or bounds code: square
tests go through gmpy2, real arithmetic through mpmath, and the Pell route
uses the mirror equation (a' y)^2 - D x^2 = a'(a' - b') with negative N.
"""
from __future__ import annotations

import math
from typing import Dict, Iterator, List, Optional, Tuple

import gmpy2
import mpmath
import numpy as np


def is_sq(n: int) -> bool:
    return n >= 0 and gmpy2.is_square(n)


def sqrt_exact(n: int) -> int:
    r = int(gmpy2.isqrt(n))
    assert r * r == n, n
    return r


def trial_divisors(n: int) -> List[int]:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def trial_factor(n: int) -> List[Tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def naive_unit(D: int) -> Tuple[int, int]:
    v = 1
    while True:
        n = D * v * v + 1
        if gmpy2.is_square(n):
            return int(gmpy2.isqrt(n)), v
        v += 1


def sympy_unit(D: int) -> Tuple[int, int]:
    from sympy.solvers.diophantine.diophantine import diop_DN

    u, v = diop_DN(D, 1)[0]
    return int(u), int(v)


def _np_square_mask(vals: np.ndarray) -> np.ndarray:
    roots = np.floor(np.sqrt(vals.astype(np.float64))).astype(np.int64)
    hit = np.zeros(vals.shape, dtype=bool)
    for delta in (-1, 0, 1):
        s = roots + delta
        hit |= (s >= 0) & (s * s == vals)
    return hit


# ---------------------------------------------------------------------------
# doubles


def doubles_double_loop(b_max: int) -> List[Tuple[int, int, int]]:
    """(a, b, r) with a + 2 < b < 2a, b <= b_max, ab + 1 = r^2, by scanning every pair."""
    out = []
    for b in range(5, b_max + 1):
        a = np.arange(b // 2 + 1, b - 2, dtype=np.int64)
        a = a[2 * a > b]
        if a.size == 0:
            continue
        vals = a * b + 1
        for ai in a[_np_square_mask(vals)].tolist():
            out.append((ai, b, sqrt_exact(ai * b + 1)))
    out.sort(key=lambda t: (t[2], t[0]))
    return out


def doubles_difference_of_squares(b_max: int) -> List[Tuple[int, int, int]]:
    """Same set via b = a + k:  (2a + k)^2 - (2r)^2 = k^2 - 4 = e f.

    For each e the admissible k are the residues with k^2 = 4 (mod e); f, a and
    r follow, and every condition is re-checked exactly.
    """
    k_max = b_max // 2
    out = set()
    e_max = b_max // 11 + 2
    for e in range(1, e_max + 1):
        rho = np.arange(e, dtype=np.int64)
        roots = rho[(rho * rho - 4) % e == 0]
        k_lo = max(3, 5 * e)
        for r0 in roots.tolist():
            start = k_lo + ((r0 - k_lo) % e)
            ks = np.arange(start, k_max + 1, e, dtype=np.int64)
            if ks.size == 0:
                continue
            f = (ks * ks - 4) // e
            ok = (f > e) & ((f - e) % 4 == 0) & (((e + f) // 2 - ks) % 2 == 0)
            ks, f = ks[ok], f[ok]
            a = ((e + f) // 2 - ks) // 2
            keep = (a > ks) & (a + ks <= b_max)
            for k, ai, fi in zip(ks[keep].tolist(), a[keep].tolist(), f[keep].tolist()):
                b = ai + k
                r = (fi - e) // 4
                assert ai * b + 1 == r * r
                out.add((ai, b, r))
    return sorted(out, key=lambda t: (t[2], t[0]))


# ---------------------------------------------------------------------------
# triples


def c_scan(a: int, b: int, c_max: int) -> List[int]:
    """All c <= c_max with ac + 1 and bc + 1 squares, by scanning s = sqrt(ac + 1)."""
    s_max = math.isqrt(a * c_max + 1)
    s = np.arange(2, s_max + 1, dtype=np.int64)
    s = s[(s * s - 1) % a == 0]
    c = (s * s - 1) // a
    c = c[(c >= 1) & (c <= c_max)]
    if c.size and int(b) * int(c.max()) + 1 < 2**62:
        c = c[_np_square_mask(b * c + 1)]
        return sorted(set(c.tolist()))
    return sorted({ci for ci in c.tolist() if is_sq(b * ci + 1)})


def c_values_mirror(a: int, b: int, c_cap: int) -> List[int]:
    """All c <= c_cap extending {a, b}, via the negative-N mirror equation.

    ``b x^2 - a y^2 = b - a`` times a' gives ``Y^2 - D x^2 = -a'(b' - a')``
    with Y = a' y.  Every class has a member with
    ``|x| <= v sqrt(|M|) / sqrt(2 (u - 1))``; the orbits of all such small
    solutions (both signs) under the unit cover every solution.
    """
    g = math.gcd(a, b)
    ad, bd = a // g, b // g
    D = ad * bd
    M = ad * (ad - bd)
    u, v = naive_unit(D)
    x_lim = math.isqrt(v * v * -M // (2 * (u - 1))) + 1
    seeds = []
    for x in range(0, x_lim + 1):
        t = M + D * x * x
        if t >= 0 and is_sq(t):
            Y = int(gmpy2.isqrt(t))
            for sy in (1, -1):
                for sx in (1, -1):
                    seeds.append((sy * Y, sx * x))
    found = set()
    x_cap = math.isqrt(a * c_cap + 1) + 1
    for Y, x in seeds:
        # walk both ways along the orbit; |x| is unimodal, so once past the cap it stays past
        for sign in (1, -1):
            Yc, xc = Y, x
            for _ in range(10_000):
                if abs(xc) > x_cap:
                    break
                if Yc % ad == 0:
                    y = Yc // ad
                    if (xc * xc - 1) % a == 0:
                        c = (xc * xc - 1) // a
                        if 0 < c <= c_cap and b * c + 1 == y * y:
                            found.add(c)
                Yc, xc = u * Yc + sign * D * v * xc, sign * v * Yc + u * xc
            else:
                raise AssertionError(f"orbit walk did not leave the window for ({a}, {b})")
    return sorted(found)


# ---------------------------------------------------------------------------
# inequalities, re-derived with mpmath


def lara_mp(a: int, b: int, d: int, dps: int = 40) -> bool:
    with mpmath.workdps(dps):
        A, B, Dd = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(d)
        lhs = Dd ** (mpmath.mpf(1) / 8) / (4 * mpmath.sqrt(A))
        num = mpmath.log(mpmath.mpf("4.001") * A * B * B * Dd) * mpmath.log(
            mpmath.mpf("1.299") * mpmath.sqrt(A * B) / (B - A) * Dd)
        den = mpmath.log(4 * B * Dd) * mpmath.log(mpmath.mpf("0.1053") * Dd / (B * (B - A) ** 2))
        return lhs < num / den


def lara_batch(cands: List[Tuple[int, int, int, int]]) -> List[bool]:
    """lara for many (a, b, c, d) at once: float64 where the gap is wide, mpmath otherwise."""
    if not cands:
        return []
    arr = np.array([(a, b, float(d)) for a, b, _, d in cands], dtype=np.float64)
    A, B, Dd = arr[:, 0], arr[:, 1], arr[:, 2]
    lhs = Dd ** 0.125 / (4 * np.sqrt(A))
    n1 = np.log(4.001 * A * B * B * Dd)
    n2 = np.log(1.299 * np.sqrt(A * B) / (B - A) * Dd)
    d1 = np.log(4 * B * Dd)
    d2 = np.log(0.1053 * Dd / (B * (B - A) ** 2))
    rhs = n1 * n2 / (d1 * d2)
    sure = (np.minimum.reduce([n1, n2, d1, d2]) > 1) & (np.abs(lhs - rhs) > 1e-8 * np.maximum(lhs, rhs))
    out = (lhs < rhs).tolist()
    for i in np.flatnonzero(~sure).tolist():
        a, b, _, d = cands[i]
        out[i] = lara_mp(a, b, d)
    return out


def initial_list_oracle(doubles, d_lo_exp: int = 5, d_hi_exp: int = 8) -> List[Tuple[int, int, int, int]]:
    cands = []
    for a, b, r in doubles:
        d_lo, d_hi = b ** d_lo_exp, b ** d_hi_exp
        # d > 4abc, so c < b^hi / (4ab) covers the window
        cap = d_hi // (4 * a * b) + 1
        for c in c_values_mirror(a, b, cap):
            if c <= b:
                continue
            d = a + b + c + 2 * a * b * c + 2 * r * sqrt_exact(a * c + 1) * sqrt_exact(b * c + 1)
            if d_lo < d < d_hi:
                cands.append((a, b, c, d))
    return [e for e, ok in zip(cands, lara_batch(cands)) if ok]


def _mp(*xs):
    return [mpmath.mpf(x) for x in xs]


def lara_rhs_mp(a, b, d):
    A, B, Dd = _mp(a, b, d)
    return (mpmath.log(mpmath.mpf("4.001") * A * B ** 2 * Dd)
            * mpmath.log(mpmath.mpf("1.299") * mpmath.sqrt(A * B) / (B - A) * Dd)
            / (mpmath.log(4 * B * Dd) * mpmath.log(mpmath.mpf("0.1053") * Dd / (B * (B - A) ** 2))))


def hammond_sides_mp(a, b, d, K="0.178", dps=50):
    with mpmath.workdps(dps):
        A, B, Dd = _mp(a, b, d)
        lhs = mpmath.mpf(K) * mpmath.sqrt(A * Dd) / (4 * B)
        rhs = (mpmath.log(mpmath.mpf("4.001") * mpmath.sqrt(A * (B - A)) * B ** 2 * Dd)
               * mpmath.log(mpmath.mpf("1.299") * mpmath.sqrt(A * B) / (B - A) * Dd)
               / (mpmath.log(4 * B * Dd) * mpmath.log(mpmath.mpf("0.1053") * A * Dd / (B * (B - A) ** 3))))
        return lhs, rhs


def w_mp(a, b, d, n):
    A, B, Dd = _mp(a, b, d)
    return ((mpmath.log(mpmath.mpf("2.001") ** 2 * B * Dd) + mpmath.log(mpmath.mpf("1.994") * mpmath.sqrt(A / B)) / n)
            / mpmath.log(mpmath.mpf("1.994") ** 2 * A * Dd))


def gamma_worked_mp(a, b, d, dps=50):
    """n0, gamma1, gamma3 and both russell sides, by a linear scan over n."""
    with mpmath.workdps(dps):
        n = 2
        while not mpmath.mpf(n + 1) / n < w_mp(a, b, d, n):
            n += 1
        g1 = w_mp(a, b, d, n)
        g2 = max(mpmath.mpf(b) / a, g1 ** 2)
        ad = mpmath.mpf(a) * d
        g3 = mpmath.sqrt(1 + 1 / ad) * (mpmath.sqrt((g2 * ad + 1) / (ad + 1)) - g1) / g1
        lhs = g3 * mpmath.sqrt(ad) / (4 * b)
        return n, g1, g3, lhs, lara_rhs_mp(a, b, d)


def pollock_sides_mp(b, dps=50):
    with mpmath.workdps(dps):
        B = mpmath.mpf(b)
        lhs = B ** 1.5
        rhs = (4 / mpmath.mpf("0.178") * mpmath.log(mpmath.mpf("2.0005") * B ** 8) * mpmath.log(mpmath.mpf("1.8371") * B ** 5)
               / (mpmath.log(4 * B ** 6) * mpmath.log(mpmath.mpf("0.1053") * B)))
        return lhs, rhs


def turner_sides_mp(b, dps=50):
    with mpmath.workdps(dps):
        B = mpmath.mpf(b)
        lhs = B ** (mpmath.mpf(1) / 8)
        rhs = (4 * mpmath.log(mpmath.mpf("4.001") * B ** 8) * mpmath.log(mpmath.mpf("0.433") * B ** 6)
               / (mpmath.log(4 * B ** 6) * mpmath.log(mpmath.mpf("0.4212") * B ** 2)))
        return lhs, rhs
