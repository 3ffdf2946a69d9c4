"""Exact arithmetic in the ring Z[L, S[2], S[4], ...] and the residue
formula for the Euler characteristics of pointed genus-1 moduli.

A MotiveExpr is a sparse integer combination of monomials
L^e * S[k_1] * ... * S[k_m] (k_i even >= 2, e possibly negative during
intermediate Laurent work).  Evaluation at a prime power sends L to p^r
and S[k] to the trace of the weight-k cusp motive (power-sum semantics;
S[2] evaluates to -1 - p^r, the degenerate convention that makes
S[2] + 1 = -L).

The residue formula is evaluated with the parenthesization calibrated
against the raw pointed counts (the printed source is ambiguous): the
series factor is sum_{k >= 0} (S[2k+2] + 1) L^-(2k+1) x^(2k), whose
k = 0 term is the constant -1, and the n! is cancelled against the
binomial by using the falling factorial directly, keeping everything in
integer arithmetic.
"""

from __future__ import annotations

import re
from fractions import Fraction

from . import eichler_selberg as es
from .errors import IntegrityError, UnsupportedRangeError, ValidationError


class MotiveExpr:
    """Element of Z[L^(+-1), S[2], S[4], ...] with value semantics."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for key, c in (terms.items() if isinstance(terms, dict) else terms):
                if c:
                    k = (int(key[0]), tuple(sorted(key[1])))
                    self.terms[k] = self.terms.get(k, 0) + c
                    if not self.terms[k]:
                        del self.terms[k]

    # -- constructors --------------------------------------------------------

    @staticmethod
    def const(n: int) -> "MotiveExpr":
        return MotiveExpr({(0, ()): int(n)})

    @staticmethod
    def lefschetz(e: int = 1) -> "MotiveExpr":
        return MotiveExpr({(e, ()): 1})

    @staticmethod
    def cusp_motive(k: int) -> "MotiveExpr":
        """S[k].  The degenerate weight 2 normalizes to -1 - L, and the
        motive of a zero-dimensional cusp space is zero."""
        if k < 2 or k % 2:
            raise ValidationError("cusp motives S[k] need even k >= 2")
        if k == 2:
            return MotiveExpr({(0, ()): -1, (1, ()): -1})
        if es.dim_Sk(k) == 0:
            return MotiveExpr()
        return MotiveExpr({(0, (k,)): 1})

    # -- ring operations ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MotiveExpr):
            return other
        if isinstance(other, int):
            return MotiveExpr.const(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self.terms)
        for k, c in o.terms.items():
            out[k] = out.get(k, 0) + c
        return MotiveExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return MotiveExpr({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = {}
        for (e1, s1), c1 in self.terms.items():
            for (e2, s2), c2 in o.terms.items():
                k = (e1 + e2, tuple(sorted(s1 + s2)))
                out[k] = out.get(k, 0) + c1 * c2
        return MotiveExpr(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValidationError("negative powers only for pure L monomials")
        out = MotiveExpr.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        return isinstance(o, MotiveExpr) and self.terms == o.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- structure ------------------------------------------------------------

    def is_polynomial_in_L(self) -> bool:
        return all(not s and e >= 0 for (e, s) in self.terms)

    def min_L_exponent(self) -> int:
        return min((e for (e, _) in self.terms), default=0)

    def s_weights(self):
        out = set()
        for (_, s) in self.terms:
            out.update(s)
        return sorted(out)

    def coefficient(self, L_exp: int, s_weights=()) -> int:
        return self.terms.get((L_exp, tuple(sorted(s_weights))), 0)

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, p: int, r: int = 1) -> int:
        """Frobenius trace at q = p^r: ring homomorphism to the integers."""
        total = Fraction(0)
        q = p**r
        for (e, s), c in self.terms.items():
            term = Fraction(c) * Fraction(q) ** e
            for k in s:
                if k == 2:
                    term *= -1 - q
                else:
                    term *= es.sk_frobenius_trace(k, p, r)
            total += term
        if total.denominator != 1:
            raise IntegrityError("evaluation of a Laurent expression is not integral")
        return int(total)

    # -- text form --------------------------------------------------------------

    def __repr__(self):
        return f"MotiveExpr({self!s})"

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: (-kv[0][0], kv[0][1]))
        parts = []
        for (e, s), c in items:
            factors = [f"S[{k}]" for k in s]
            if e == 1:
                factors.append("L")
            elif e != 0:
                factors.append(f"L^{e}")
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)


_TERM_RE = re.compile(r"^[+-]?\s*[^+-]*(?:\[[^\]]*\])?")


def parse_motive(text: str) -> MotiveExpr:
    """Parse the canonical text form, e.g. "3*L^4 + S[12]*L - 1"."""
    s = text.replace(" ", "")
    if not s:
        raise ValidationError("empty expression")
    # split into signed terms at top level
    terms = []
    cur = ""
    for ch in s:
        if ch in "+-" and cur and cur[-1] not in "^[+-*":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    total = MotiveExpr.const(0)
    for t in terms:
        sign = 1
        while t and t[0] in "+-":
            if t[0] == "-":
                sign = -sign
            t = t[1:]
        if not t:
            raise ValidationError("dangling sign in expression")
        term = MotiveExpr.const(sign)
        for factor in t.split("*"):
            if not factor:
                raise ValidationError("empty factor")
            if factor.isdigit():
                term = term * int(factor)
            elif factor == "L":
                term = term * MotiveExpr.lefschetz()
            elif factor.startswith("L^"):
                term = term * MotiveExpr.lefschetz(int(factor[2:]))
            elif factor.startswith("S[") and factor.endswith("]"):
                term = term * MotiveExpr.cusp_motive(int(factor[2:-1]))
            else:
                raise ValidationError(f"cannot parse factor {factor!r}")
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Gaussian binomials and polynomial point counts


def q_binomial_poly(m: int, r: int) -> list[int]:
    """Coefficients (ascending) of the Gaussian binomial [m r]_T as a
    polynomial in T, by the Pascal recurrence; division-free."""
    if r < 0 or r > m:
        return [0]
    prev = {0: [1]}  # row m=0
    for mm in range(1, m + 1):
        cur = {0: [1], mm: [1]}
        for rr in range(1, mm):
            a = prev.get(rr - 1, [0])
            b = prev.get(rr, [0])
            shifted = [0] * rr + b  # T^rr * b
            n = max(len(a), len(shifted))
            cur[rr] = [
                (a[i] if i < len(a) else 0) + (shifted[i] if i < len(shifted) else 0)
                for i in range(n)
            ]
        prev = cur
    return prev[r]


def q_binomial(n: int, d: int, q):
    """The Grassmannian of d-dimensional projective subspaces of P^n:
    [n+1 over d+1]_q, with q an integer or a MotiveExpr (use L for the
    motivic class)."""
    coeffs = q_binomial_poly(n + 1, d + 1)
    if isinstance(q, MotiveExpr):
        total = MotiveExpr.const(0)
        power = MotiveExpr.const(1)
        for c in coeffs:
            if c:
                total = total + c * power
            power = power * q
        return total
    total = 0
    power = 1
    for c in coeffs:
        total += c * power
        power *= q
    return total


def projective_space_class(n: int) -> MotiveExpr:
    return MotiveExpr({(i, ()): 1 for i in range(n + 1)})


def count_subspaces_bruteforce(n: int, d: int, q: int) -> int:
    """Independent oracle: enumerate (d+1)-dimensional linear subspaces
    of F_q^(n+1) as row-reduced spans.  Only sensible for tiny sizes."""
    from itertools import product

    from . import gf

    F = gf.make_field(*next(iter(gf.factorize(q).items())))
    dim = n + 1
    k = d + 1
    vectors = list(product(range(F.q), repeat=dim))

    def add(u, v):
        return tuple(F.add(a, b) for a, b in zip(u, v))

    def smul(c, u):
        return tuple(F.mul(c, a) for a in u)

    seen = set()
    for basis in product(vectors, repeat=k):
        span = {tuple([0] * dim)}
        for b in basis:
            new = set()
            for c in range(F.q):
                cb = smul(c, b)
                for v in span:
                    new.add(add(v, cb))
            span = new
        if len(span) == F.q**k:
            seen.add(frozenset(span))
    return len(seen)


# ---------------------------------------------------------------------------
# the residue formula for pointed genus-1 moduli


class LaurentSeries:
    """Formal Laurent polynomial in x with MotiveExpr coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        if coeffs:
            for e, m in coeffs.items():
                if m:
                    self.coeffs[e] = m

    @staticmethod
    def x(e: int = 1):
        return LaurentSeries({e: MotiveExpr.const(1)})

    @staticmethod
    def of(m: MotiveExpr):
        return LaurentSeries({0: m})

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, m in other.coeffs.items():
            out[e] = out.get(e, MotiveExpr.const(0)) + m
        return LaurentSeries(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return LaurentSeries({e: c * m for e, m in self.coeffs.items()})

    def __mul__(self, other):
        out = {}
        for e1, m1 in self.coeffs.items():
            for e2, m2 in other.coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, MotiveExpr.const(0)) + m1 * m2
        return LaurentSeries(out)

    def residue(self) -> MotiveExpr:
        return self.coeffs.get(-1, MotiveExpr.const(0))


def _getzler_integrand(n: int, kmax: int) -> LaurentSeries:
    L = MotiveExpr.lefschetz()
    A = (
        LaurentSeries.of(L)
        - LaurentSeries.x(1)
        - LaurentSeries({-1: L})
    )
    # falling factorial A (A-1) ... (A-n+1): the n! of the binomial is
    # cancelled against the n! multiplying the residue
    ff = LaurentSeries.of(MotiveExpr.const(1))
    for i in range(n):
        ff = ff * (A - LaurentSeries.of(MotiveExpr.const(i)))
    series = LaurentSeries({})
    for k in range(0, kmax + 1):
        if k == 0:
            coeff = MotiveExpr.const(-1)  # (S[2]+1)/L = -1
        else:
            coeff = (MotiveExpr.cusp_motive(2 * k + 2) + 1) * MotiveExpr.lefschetz(
                -(2 * k + 1)
            )
        series = series + LaurentSeries({2 * k: coeff})
    tail = LaurentSeries.x(1) - LaurentSeries({-1: L})
    return ff * series * tail


def getzler_ec_m1n(n: int) -> MotiveExpr:
    """e_c of the moduli of genus-1 curves with n+1 marked points, via
    the residue formula (n! folded into the falling factorial).

    The k-sum is truncated at 2k <= n+2 and the result is asserted
    stable against a deeper truncation; the output must be an honest
    polynomial (no Laurent leftovers), or the parenthesization would
    be wrong and we abort loudly.
    """
    if not 0 <= n <= 12:
        raise UnsupportedRangeError("pointed residue formula capped at n <= 12")
    kmax = (n + 2) // 2
    out = _getzler_integrand(n, kmax).residue()
    deeper = _getzler_integrand(n, kmax + 1).residue()
    if out != deeper:
        raise IntegrityError("residue formula is not truncation-stable")
    if out.min_L_exponent() < 0:
        raise IntegrityError("residue left negative powers of L")
    return out
