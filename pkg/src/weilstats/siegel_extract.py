"""Hecke-trace extraction for vector-valued Siegel modular forms of
degree 2 and 3 from curve statistics, plus the congruence checker.

Weight dictionaries: a local-system weight (a, b) corresponds to the
degree-2 modular weight (j, k) = (a-b, b+3); (a, b, c) corresponds to
(i, j, k) = (a-b, b-c, c+4).

The degree-2 extraction is

    Trace(T(q), S_{j,k}) = -[abelian-surface trace at (a,b)] + correction(a,b)

with the correction term assembled from cusp-form dimensions s_k and
the traces of the weight-k cusp motives.  The sign layout and the
prime-power semantics of the printed formula are corrupted in the
source (one misprinted subscript, an ambiguous leading sign); the
layout implemented here was fixed once by simultaneous regression
against the shipped golden eigenvalue tables at q = 2..5 and the
vanishing of every weight below the first cusp form, and is frozen by
the golden tests:

    correction(a, b) at q = s_{a-b+2}
                           - s_{a+b+4} * (S[a-b+2] + 1) * q^(b+1)
                           + { S[b+2]      a even
                             { -S[a+3]     a odd

where S[k] at q = p^r is the trace of T(q) on S_k (the counting-derived
prime-power convention; at r = 1 it agrees with the Frobenius power
sum), S[2] = -1 - q, and S[odd] = 0.  The trailing +1 printed next to
S[b+2] is absorbed differently in the source; the k = 13 scalar row
(constant term equal to the weight-12 coefficient itself) pins the
version without it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from . import eichler_selberg as es
from . import gf
from . import moduli_stats as ms
from .errors import UnsupportedRangeError, ValidationError

# ---------------------------------------------------------------------------
# weight dictionaries


def weight_from_modular_g2(j: int, k: int) -> tuple[int, int]:
    return (j + k - 3, k - 3)


def modular_from_weight_g2(a: int, b: int) -> tuple[int, int]:
    return (a - b, b + 3)


def weight_from_modular_g3(i: int, j: int, k: int) -> tuple[int, int, int]:
    return (i + j + k - 4, j + k - 4, k - 4)


def modular_from_weight_g3(a: int, b: int, c: int) -> tuple[int, int, int]:
    return (a - b, b - c, c + 4)


# ---------------------------------------------------------------------------
# cusp-motive traces at prime powers


def _split_prime_power(q: int) -> tuple[int, int]:
    pf = gf.factorize(q)
    if len(pf) != 1:
        raise ValidationError("q must be a prime power")
    (p, r), = pf.items()
    return p, r


def s_motive_trace(k: int, q: int) -> int:
    """Trace of the weight-k cusp motive at q, Hecke-at-q convention:
    Tr T(q) on S_k for even k >= 4, -1 - q at k = 2, 0 for odd k."""
    if k % 2 == 1:
        return 0
    if k == 2:
        return -1 - q
    if k < 2:
        raise ValidationError("no motive below weight 2")
    return es.trace_Tn(k, q)


def s_motive_plus_one(k: int, q: int) -> int:
    return s_motive_trace(k, q) + 1


def e2_extra_trace(a: int, b: int, p: int, r: int = 1) -> int:
    """The degree-2 correction term at q = p^r (layout frozen by the
    golden tables; see the module docstring).

    On the odd diagonal a = b the leading dimension term follows the
    weight-2 convention s_2 = -1; the classical lift eigenvalues of the
    weight-(0,10) and (0,12) scalar forms pin that value.
    """
    if a < b or b < 0:
        raise ValidationError("weight must be dominant")
    if (a + b) % 2 == 1:
        return 0
    q = p**r
    if a % 2 == 1 and a == b:
        total = -1
    else:
        total = es.dim_Sk(a - b + 2)
    total -= es.dim_Sk(a + b + 4) * s_motive_plus_one(a - b + 2, q) * q ** (b + 1)
    if a % 2 == 0:
        total += s_motive_trace(b + 2, q)
    else:
        total -= s_motive_trace(a + 3, q)
    return total


def genus2_hecke_trace(j: int, k: int, q: int, workers=None) -> int:
    """Trace of T(q) on the degree-2 cusp space S_{j,k}(Sp(4,Z)).

    q may be a prime power; the output then follows the counting-derived
    convention for composite Hecke operators.  The weight (j,k) = (0,3)
    (trivial local system) has no cusp forms and the correction formula
    does not specialize to it; it returns 0 directly, as do the
    non-dominant weights below it.
    """
    if j % 2 == 1 or j < 0:
        return 0
    if k < 3 or (j, k) == (0, 3):
        return 0
    a, b = weight_from_modular_g2(j, k)
    if (a + b) % 2 == 1:
        return 0
    p, r = _split_prime_power(q)
    return -ms.a2_trace(q, (a, b), workers=workers) + e2_extra_trace(a, b, p, r)


def e3_extra_trace(a: int, b: int, c: int, q: int, workers=None) -> int:
    """The degree-3 correction term: three abelian-surface traces at
    shifted weights plus three tensor products correction x cusp motive
    (trace of a tensor product = product of traces)."""
    if a < b or b < c or c < 0:
        raise ValidationError("weight must be dominant")
    if (a + b + c) % 2 == 1:
        return 0
    p, r = _split_prime_power(q)

    def a2t(lam):
        if (lam[0] + lam[1]) % 2 == 1:
            return 0
        return ms.a2_trace(q, lam, workers=workers)

    total = -a2t((a + 1, b + 1)) + a2t((a + 1, c)) - a2t((b, c))
    total -= e2_extra_trace(a + 1, b + 1, p, r) * s_motive_trace(c + 2, q)
    total += e2_extra_trace(a + 1, c, p, r) * s_motive_trace(b + 3, q)
    total -= e2_extra_trace(b, c, p, r) * s_motive_trace(a + 4, q)
    return total


def genus3_hecke_trace(i: int, j: int, k: int, q: int, workers=None) -> int:
    """Trace of T(q) on the degree-3 cusp space S_{i,j,k}(Sp(6,Z)):
    the full abelian-threefold trace minus the correction term."""
    a, b, c = weight_from_modular_g3(i, j, k)
    if a < b or b < c or c < 0:
        raise ValidationError(f"(i,j,k)=({i},{j},{k}) is not a valid weight")
    if (a + b + c) % 2 == 1:
        return 0
    return ms.a3_trace(q, (a, b, c), workers=workers) - e3_extra_trace(
        a, b, c, q, workers=workers
    )


# ---------------------------------------------------------------------------
# dimension data


@dataclass(frozen=True)
class DimensionRow:
    degree: int
    weight: tuple  # (j, k) or (i, j, k)
    dim: int
    source: str


def load_dimension_table() -> list[DimensionRow]:
    rows = []
    text = resources.files("weilstats").joinpath("data/siegel_dimensions.csv").read_text()
    for line in text.strip().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        parts = [x.strip() for x in line.split(",")]
        degree = int(parts[0])
        if degree == 2:
            weight = (int(parts[1]), int(parts[2]))
            dim, source = int(parts[3]), parts[4]
        else:
            weight = (int(parts[1]), int(parts[2]), int(parts[3]))
            dim, source = int(parts[4]), parts[5]
        rows.append(DimensionRow(degree=degree, weight=weight, dim=dim, source=source))
    return rows


def dimension_of(degree: int, weight: tuple) -> int | None:
    for row in load_dimension_table():
        if row.degree == degree and row.weight == tuple(weight):
            return row.dim
    return None


# ---------------------------------------------------------------------------
# quadratic-field arithmetic and the congruence check


@dataclass(frozen=True)
class QuadFieldElem:
    """x + y*sqrt(d) with exact rational components."""

    d: int
    x: Fraction
    y: Fraction

    @staticmethod
    def of(d, x, y=0):
        return QuadFieldElem(d, Fraction(x), Fraction(y))

    def __add__(self, o):
        o = self._coerce(o)
        return QuadFieldElem(self.d, self.x + o.x, self.y + o.y)

    def __sub__(self, o):
        o = self._coerce(o)
        return QuadFieldElem(self.d, self.x - o.x, self.y - o.y)

    def __mul__(self, o):
        o = self._coerce(o)
        return QuadFieldElem(
            self.d, self.x * o.x + self.d * self.y * o.y, self.x * o.y + self.y * o.x
        )

    __radd__ = __add__
    __rmul__ = __mul__

    def _coerce(self, o):
        if isinstance(o, QuadFieldElem):
            if o.d != self.d:
                raise ValidationError("mixed quadratic fields")
            return o
        return QuadFieldElem(self.d, Fraction(o), Fraction(0))

    def reduce_mod_split_prime(self, ell: int, u: int, v: int) -> int:
        """Reduction modulo the split prime (ell, u + v sqrt(d)):
        substitutes sqrt(d) = -u/v mod ell.  Requires v invertible."""
        if v % ell == 0:
            raise ValidationError("v not invertible modulo ell; ideal unusable")
        if self.x.denominator % ell == 0 or self.y.denominator % ell == 0:
            raise ValidationError("denominator not invertible modulo ell")
        root = (-u * pow(v, -1, ell)) % ell
        xv = self.x.numerator * pow(self.x.denominator, -1, ell)
        yv = self.y.numerator * pow(self.y.denominator, -1, ell)
        return (xv + yv * root) % ell


@dataclass
class HarderTranscript:
    ok: bool
    ell: int
    s: int
    sqrt_d_residue: int | None
    lam_f: QuadFieldElem | None
    lam_f_residue: int
    rhs_residue: int
    lhs_residue: int


def harder_check(a, b, p, lambda_F: int, ell: int, s: int = 1,
                 ideal_gen: tuple[int, int] | None = None,
                 d: int | None = None) -> HarderTranscript:
    """Check the congruence lambda_p(F) = p^(a+2) + lambda_p(f) + p^(b+1)
    modulo ell^s, with f the weight-(a+b+4) elliptic eigenform whose
    eigenvalue lambda_p(f) is recomputed from the Hecke characteristic
    polynomial.

    Quadratic eigenvalue fields need a split degree-1 prime
    (ell, u + v*sqrt(d)) and s = 1; rational eigenvalue fields allow
    s >= 1.  The critical-value divisibility hypothesis is the caller's
    input, never computed here.
    """
    if p == ell:
        raise ValidationError("p = ell reduction undefined for eigenvalue data")
    k = a + b + 4
    cp = es.hecke_charpoly(k, p)
    dim = len(cp) - 1
    if dim == 1:
        lam_f_int = -cp[1]
        modulus = ell**s
        lam_res = lam_f_int % modulus
        rhs = (pow(p, a + 2, modulus) + lam_res + pow(p, b + 1, modulus)) % modulus
        lhs = lambda_F % modulus
        return HarderTranscript(
            ok=lhs == rhs, ell=ell, s=s, sqrt_d_residue=None,
            lam_f=QuadFieldElem.of(0, lam_f_int), lam_f_residue=lam_res,
            rhs_residue=rhs, lhs_residue=lhs,
        )
    if dim != 2:
        raise UnsupportedRangeError("eigenvalue fields beyond quadratic unsupported")
    if ideal_gen is None or d is None:
        raise ValidationError("quadratic field needs the split-prime data (u, v) and d")
    if s != 1:
        raise ValidationError("s > 1 only supported for rational eigenvalue fields")
    u, v = ideal_gen
    # roots (T +- V sqrt(d))/2 of x^2 - Tx + N; orient by the sign of v
    T, N = -cp[1], cp[2]
    disc = T * T - 4 * N
    vsq, rem = divmod(disc, d)
    if rem != 0:
        raise ValidationError("discriminant is not a multiple of d")
    V = math.isqrt(vsq)
    if V * V != vsq:
        raise ValidationError("discriminant/d is not a perfect square")
    y = Fraction(V if v > 0 else -V, 2)
    lam_f = QuadFieldElem(d, Fraction(T, 2), y)
    root_res = (-u * pow(v, -1, ell)) % ell
    lam_res = lam_f.reduce_mod_split_prime(ell, u, v)
    rhs = (pow(p, a + 2, ell) + lam_res + pow(p, b + 1, ell)) % ell
    lhs = lambda_F % ell
    return HarderTranscript(
        ok=lhs == rhs, ell=ell, s=s, sqrt_d_residue=root_res,
        lam_f=lam_f, lam_f_residue=lam_res, rhs_residue=rhs, lhs_residue=lhs,
    )
