"""Class numbers and the closed trace formula for Hecke operators on
level-1 cusp forms.

This module is the modular-forms side of the cross-validation: it never
touches curves or finite fields.  H(n) comes straight from reduced-form
enumeration (its own oracle), the trace of T(n) on S_k(SL(2,Z)) from the
closed formula

    Tr T(n) = -1/2 sum_t P_k(t, n) H(4n - t^2) - 1/2 sum_{dd'=n} min(d,d')^(k-1)

(with the weight-2 Eisenstein correction +sigma_1(n), which makes the
zero-dimensional S_2 trace vanish identically), and eigenvalue data from
the Hecke recursion T(p)T(p^m) = T(p^(m+1)) + p^(k-1) T(p^(m-1)) plus
Newton's identities.  All arithmetic is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import IntegrityError, UnsupportedRangeError, ValidationError

_H_CACHE: dict[int, Fraction] = {0: Fraction(-1, 12)}


def hurwitz(n: int) -> Fraction:
    """Hurwitz class number H(n) by reduced-form enumeration.

    Counts SL(2,Z)-classes of positive definite ax^2 + bxy + cy^2 with
    b^2 - 4ac = -n, reduced as |b| <= a <= c with b >= 0 on the
    boundary; multiples of x^2 + y^2 weigh 1/2 and multiples of
    x^2 + xy + y^2 weigh 1/3.  H(n) = 0 for n < 0 or n = 1, 2 mod 4,
    and H(0) = -1/12.
    """
    if n < 0:
        return Fraction(0)
    if n in _H_CACHE:
        return _H_CACHE[n]
    if n % 4 in (1, 2):
        _H_CACHE[n] = Fraction(0)
        return _H_CACHE[n]
    total = Fraction(0)
    for b in range(n % 2, math.isqrt(n // 3) + 1 if n >= 3 else 1, 2):
        m = b * b + n
        if m % 4:
            continue
        ac = m // 4
        a = max(b, 1)
        while a * a <= ac:
            if ac % a == 0:
                c = ac // a
                if b == 0 or b == a or a == c:
                    mult = 1
                else:
                    mult = 2  # both signs of b are reduced
                if b == 0 and a == c:
                    weight = Fraction(1, 2)  # multiple of x^2 + y^2
                elif b == a == c:
                    weight = Fraction(1, 3)  # multiple of x^2 + xy + y^2
                else:
                    weight = Fraction(1)
                total += mult * weight
            a += 1
    _H_CACHE[n] = total
    return total


def gegenbauer(k: int, t, n):
    """P_k(t, n): coefficient of x^(k-2) in 1/(1 - tx + nx^2)."""
    if k < 2:
        raise ValidationError("weight must be >= 2")
    g_prev, g_cur = 1, t
    if k == 2:
        return g_prev
    for _ in range(k - 3):
        g_prev, g_cur = g_cur, t * g_cur - n * g_prev
    return g_cur


def sigma1(n: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d
            if d * d != n:
                total += n // d
        d += 1
    return total


def trace_Tn(k: int, n: int) -> int:
    """Trace of T(n) on S_k(SL(2,Z)), exact.

    Odd k has no level-1 forms and returns 0.  The k = 2 case carries
    the Eisenstein correction, so it also returns 0 (dim S_2 = 0), but
    through full cancellation rather than a short circuit.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    if k % 2 == 1 or k < 2:
        return 0
    total = Fraction(0)
    t = -math.isqrt(4 * n)
    while t * t <= 4 * n:
        h = hurwitz(4 * n - t * t)
        if h:
            total += gegenbauer(k, t, n) * h
        t += 1
    total = -total / 2
    dsum = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            dp = n // d
            dsum += min(d, dp) ** (k - 1)
            if dp != d:
                dsum += min(dp, d) ** (k - 1)
        d += 1
    total -= Fraction(dsum, 2)
    if k == 2:
        total += sigma1(n)
    if total.denominator != 1:
        raise IntegrityError(f"trace formula returned non-integer at k={k}, n={n}")
    return int(total)


def dim_Mk(k: int) -> int:
    if k < 0 or k % 2 == 1:
        return 0
    if k % 12 == 2:
        return k // 12
    return k // 12 + 1


def dim_Sk(k: int) -> int:
    """dim S_k(SL(2,Z)): one less than dim M_k when that is positive
    and k > 0 (the constant weight-0 form is not a cusp form)."""
    if k <= 0 or k % 2 == 1:
        return 0
    m = dim_Mk(k)
    return max(m - 1, 0)


def _hecke_power_traces(k: int, p: int, r: int) -> list[int]:
    """Traces of T(p)^1 .. T(p)^r on S_k via the Hecke recursion."""
    d = dim_Sk(k)
    tr_prime_powers = [d] + [trace_Tn(k, p**i) for i in range(1, r + 1)]
    out = []
    # coeffs[i] = coefficient of T(p^i) in the expansion of T(p)^m
    coeffs = [0, 1]
    for m in range(1, r + 1):
        out.append(sum(c * tr_prime_powers[i] for i, c in enumerate(coeffs)))
        if m == r:
            break
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            if c == 0:
                continue
            nxt[i + 1] += c
            if i >= 1:
                nxt[i - 1] += c * p ** (k - 1)
        coeffs = nxt
    return out


def hecke_charpoly(k: int, p: int) -> list[int]:
    """Monic characteristic polynomial of T(p) on S_k, as the integer
    coefficient list [1, c_{d-1}, ..., c_0] from the leading term down.

    Eigenvalue extraction runs through Newton's identities and is capped
    at dim S_k <= 6, which covers every weight the extraction pipelines
    touch (s_68 = 5).
    """
    d = dim_Sk(k)
    if d > 6:
        raise UnsupportedRangeError("characteristic polynomials capped at dim 6")
    if d == 0:
        return [1]
    power_sums = _hecke_power_traces(k, p, d)
    e = [Fraction(1)] + [Fraction(0)] * d
    for m in range(1, d + 1):
        acc = Fraction(0)
        for i in range(1, m + 1):
            acc += (-1) ** (i - 1) * e[m - i] * power_sums[i - 1]
        e[m] = acc / m
    coeffs = [1]
    for m in range(1, d + 1):
        v = (-1) ** m * e[m]
        if v.denominator != 1:
            raise IntegrityError("non-integer characteristic polynomial")
        coeffs.append(int(v))
    return coeffs


def sk_frobenius_trace(k: int, p: int, r: int) -> int:
    """Power sum of the 2*dim S_k Frobenius eigenvalue pairs of the
    weight-k cusp motive at p^r: pairs (a, b) with a + b = Tr-compatible
    eigenvalue a_f(p) and ab = p^(k-1).

    Odd k returns 0 (no level-1 forms); k = 2 is a caller-side
    convention and rejected here.
    """
    if k % 2 == 1:
        return 0
    if k == 2:
        raise ValidationError("weight 2 follows the degenerate convention; see motive_ring")
    if k < 4:
        return 0
    if r == 0:
        return 2 * dim_Sk(k)
    if r == 1:
        return trace_Tn(k, p)
    return trace_Tn(k, p**r) - p ** (k - 1) * trace_Tn(k, p ** (r - 2))
