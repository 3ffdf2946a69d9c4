"""Mass-formula enumeration of isomorphism classes and exact weighted
character sums over them.

Everything runs on the orbit-stabilizer mass trick: summing a class
function f over isomorphism classes weighted by 1/#Aut equals
(1/#G) * sum of f over all equations in a parametrized family, where G
is the substitution group of the family.  Automorphism groups are never
computed individually.  The group orders used here:

- Weierstrass models:   #G = q^3 (q-1)
- hyperelliptic, odd q: #G = #GL_2(F_q)            (binary-form action)
- hyperelliptic, q even:#G = #GL_2(F_q) * q^(g+2)  (plus the j(x) shears)
- plane quartics:       #G = #PGL_3(F_q) * (q-1)   (forms up to scalar)

Each builder asserts its mass identity (q for Weierstrass models, q^3
for genus 2), so a wrong group order or enumeration domain fails loudly.
Weights are exact Fractions assembled from integer counters, so sharded
enumeration merges deterministically regardless of worker count.

Ensemble entries are keyed by the elementary symmetric functions
(e_1, ..., e_g) of the Frobenius eigenvalues; together with q these
determine the full characteristic polynomial through the symmetry
e_{g+i} = q^i e_{g-i}, which is what the symplectic character evaluator
consumes.
"""

from __future__ import annotations

import functools
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import curve_models as cm
from . import gf
from .errors import IntegrityError, UnsupportedRangeError, ValidationError

SCHEMA_VERSION = 1


def worker_count(explicit=None) -> int:
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get("WEILSTATS_THREADS")
    if env:
        return max(1, int(env))
    return min(os.cpu_count() or 1, 4)


def code_version_hash() -> str:
    """Hash of the sources that determine ensemble bytes; used to reject
    stale disk caches after the enumeration code changes."""
    h = hashlib.sha256()
    base = Path(__file__).parent
    for name in ("gf.py", "curve_models.py", "moduli_stats.py"):
        h.update((base / name).read_bytes())
    return h.hexdigest()[:12]


# ---------------------------------------------------------------------------
# symplectic Weyl characters
#
# Characters are polynomials in (e_1..e_g, q).  The complete homogeneous
# symmetric functions h_k of the full 2g-element eigenvalue multiset obey
# sum_j (-1)^j E_j h_{k-j} = 0 with E_j the elementary symmetrics, and
# E_{g+i} = q^i E_{g-i}.  The irreducible character of highest weight
# lambda is the Jacobi-Trudi-style determinant with entries
#   M[i][1] = h_{l_i - i + 1},
#   M[i][j] = h_{l_i - i + j} + q^(j-1) h_{l_i - i - j + 2}   (j >= 2),
# the q-powers restoring homogeneity of the similitude grading.

def _poly_add(a, b):
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _poly_scale(a, c):
    if c == 0:
        return {}
    return {k: v * c for k, v in a.items()}


def _poly_mul(a, b):
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            nv = out.get(k, 0) + va * vb
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


@functools.lru_cache(maxsize=None)
def _sym_h_polys(g: int, upto: int):
    """h_0..h_upto as polynomials in (e_1..e_g, q); monomial keys are
    exponent tuples (i_1..i_g, j)."""
    nv = g + 1
    zero = {}
    one = {tuple([0] * nv): 1}

    def var(i):  # e_i for 1 <= i <= g, q for i == 0
        key = [0] * nv
        key[i - 1 if i >= 1 else g] = 1
        return {tuple(key): 1}

    q = var(0)
    elems = [one] + [var(i) for i in range(1, g + 1)]
    # E_j for 0 <= j <= 2g with the similitude symmetry
    E = list(elems)
    for i in range(1, g + 1):
        qi = one
        for _ in range(i):
            qi = _poly_mul(qi, q)
        E.append(_poly_mul(qi, elems[g - i]))
    h = [one]
    for k in range(1, upto + 1):
        acc = zero
        for j in range(1, min(k, 2 * g) + 1):
            term = _poly_mul(E[j], h[k - j])
            acc = _poly_add(acc, _poly_scale(term, (-1) ** (j - 1)))
        h.append(acc)
    return h


def _det(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return _poly_add(
            _poly_mul(mat[0][0], mat[1][1]),
            _poly_scale(_poly_mul(mat[0][1], mat[1][0]), -1),
        )
    total = {}
    for j in range(n):
        minor = [[row[c] for c in range(n) if c != j] for row in mat[1:]]
        total = _poly_add(total, _poly_scale(_poly_mul(mat[0][j], _det(minor)), (-1) ** j))
    return total


@dataclass(frozen=True)
class CharPoly:
    """A cached symplectic character in Weil-coefficient coordinates."""

    genus: int
    weight: tuple
    poly: tuple  # canonical sorted ((exponents, coeff), ...)

    def evaluate(self, coeffs, q) -> int:
        """Fast path: numeric h-recurrence plus the determinant, avoiding
        the symbolic polynomial (tests pin both routes to each other)."""
        return _char_value(self.genus, self.weight, tuple(coeffs), q)

    def evaluate_symbolic(self, coeffs, q) -> int:
        coeffs = tuple(coeffs)
        total = 0
        for exps, c in self.poly:
            term = c
            for e, x in zip(exps[:-1], coeffs):
                term *= x ** e
            term *= q ** exps[-1]
            total += term
        return total

    def dimension(self) -> int:
        """Character value at the identity configuration (all eigenvalues
        1, q = 1), the Weyl dimension of the representation."""
        return self.evaluate_symbolic((math.comb(2 * self.genus, i) for i in
                                       range(1, self.genus + 1)), 1)


def _jt_matrix_entries(g, lam, h):
    ell = len(lam)
    mat = []
    for i in range(1, ell + 1):
        row = []
        for j in range(1, ell + 1):
            a = lam[i - 1] - i + j
            first = h[a] if 0 <= a else {}
            if j == 1:
                row.append(first)
                continue
            b = lam[i - 1] - i - j + 2
            second = h[b] if 0 <= b else {}
            if second:
                qj = {tuple([0] * g + [j - 1]): 1}
                second = _poly_mul(qj, second)
            row.append(_poly_add(first, second))
        mat.append(row)
    return mat


@functools.lru_cache(maxsize=None)
def symplectic_character(g: int, lam: tuple) -> CharPoly:
    """The irreducible Sp(2g) similitude character of highest weight lam,
    as an integer polynomial in (e_1..e_g, q).  Division-free and cached."""
    lam = tuple(lam)
    if len(lam) != g:
        raise ValidationError("weight length must equal the genus")
    if any(a < b for a, b in zip(lam, lam[1:])) or lam[-1] < 0:
        raise ValidationError("weight must be dominant (a >= b >= c >= 0)")
    if sum(lam) > 70:
        raise UnsupportedRangeError("weight size capped at 70")
    lam_red = tuple(x for x in lam if x > 0)
    if not lam_red:
        one = ((tuple([0] * (g + 1)), 1),)
        return CharPoly(genus=g, weight=lam, poly=one)
    maxh = max(lam_red[0] + len(lam_red), 2) + 2
    h = _sym_h_polys(g, maxh)
    det = _det(_jt_matrix_entries(g, lam_red, h))
    poly = tuple(sorted(det.items()))
    return CharPoly(genus=g, weight=lam, poly=poly)


@functools.lru_cache(maxsize=None)
def _char_value_cacheinfo(g, lam):
    lam_red = tuple(x for x in lam if x > 0)
    return lam_red


def _char_value(g, lam, coeffs, q) -> int:
    """Numeric character value via the h recurrence at one point."""
    lam_red = _char_value_cacheinfo(g, lam)
    if not lam_red:
        return 1
    upto = lam_red[0] + len(lam_red) + 2
    # E_j values with symmetry
    E = [1] + list(coeffs)
    for i in range(1, g + 1):
        E.append(q**i * E[g - i])
    h = [1] + [0] * upto
    for k in range(1, upto + 1):
        acc = 0
        for j in range(1, min(k, 2 * g) + 1):
            acc += (-1) ** (j - 1) * E[j] * h[k - j]
        h[k] = acc

    def hval(a):
        return h[a] if a >= 0 else 0

    ell = len(lam_red)
    mat = []
    for i in range(1, ell + 1):
        row = []
        for j in range(1, ell + 1):
            v = hval(lam_red[i - 1] - i + j)
            if j >= 2:
                v += q ** (j - 1) * hval(lam_red[i - 1] - i - j + 2)
            row.append(v)
        mat.append(row)
    if ell == 1:
        return mat[0][0]
    if ell == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    if ell == 3:
        return (
            mat[0][0] * (mat[1][1] * mat[2][2] - mat[1][2] * mat[2][1])
            - mat[0][1] * (mat[1][0] * mat[2][2] - mat[1][2] * mat[2][0])
            + mat[0][2] * (mat[1][0] * mat[2][1] - mat[1][1] * mat[2][0])
        )
    raise UnsupportedRangeError("genus capped at 3")


def weyl_dimension_g2(a: int, b: int) -> int:
    """Closed-form dimension of the Sp(4) representation (a, b)."""
    num = (a - b + 1) * (b + 1) * (a + 2) * (a + b + 3)
    assert num % 6 == 0
    return num // 6


def weyl_dimension_g3(a: int, b: int, c: int) -> int:
    """Closed-form dimension of the Sp(6) representation (a, b, c)."""
    x, y, z = a + 3, b + 2, c + 1
    num = (x * x - y * y) * (x * x - z * z) * (y * y - z * z) * x * y * z
    assert num % 720 == 0
    return num // 720


# ---------------------------------------------------------------------------
# ensembles


@dataclass
class ClassEnsemble:
    """Weighted multiset of Weil-coefficient vectors for one (genus, q).

    entries maps (coeff_tuple, twist_flag) to an exact positive weight.
    twist_flag marks plane-quartic entries of the genus-3 ensemble, whose
    character evaluation averages chi over the entry and its -1 twist.
    """

    genus: int
    q: int
    entries: dict = field(default_factory=dict)
    group_order: int | None = None

    def add(self, coeffs, weight, twist=False):
        key = (tuple(int(c) for c in coeffs), bool(twist))
        self.entries[key] = self.entries.get(key, Fraction(0)) + weight
        if not self.entries[key]:
            del self.entries[key]

    @property
    def mass(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    def char_sum(self, lam) -> Fraction:
        """Sum of weight * chi_lam over the ensemble, with the two-sided
        average on twist-flagged entries."""
        lam = tuple(lam)
        total = Fraction(0)
        for (coeffs, twist), w in self.entries.items():
            v = _char_value(self.genus, lam, coeffs, self.q)
            if twist:
                flipped = tuple(
                    (-c if i % 2 == 0 else c) for i, c in enumerate(coeffs)
                )
                v2 = _char_value(self.genus, lam, flipped, self.q)
                total += w * Fraction(v + v2, 2)
            else:
                total += w * v
        return total

    def char_sum_int(self, lam) -> int:
        v = self.char_sum(lam)
        if v.denominator != 1:
            raise IntegrityError(
                f"character sum is not an integer: {v} at weight {lam}"
            )
        return int(v)

    def hasse_window_ok(self) -> bool:
        cap = 2 * self.genus * math.isqrt(self.q) + self.genus
        return all(abs(c[0][0]) <= cap for c in self.entries)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        items = sorted(self.entries.items())
        return {
            "schema": SCHEMA_VERSION,
            "kind": "class_ensemble",
            "genus": self.genus,
            "q": self.q,
            "group_order": str(self.group_order) if self.group_order else None,
            "code_version": code_version_hash(),
            "entries": [
                [list(coeffs), twist, str(w.numerator), str(w.denominator)]
                for (coeffs, twist), w in items
            ],
        }

    @classmethod
    def from_json(cls, data: dict, check_version: bool = True) -> "ClassEnsemble":
        if data.get("schema") != SCHEMA_VERSION or data.get("kind") != "class_ensemble":
            raise ValidationError("not a class-ensemble file")
        if check_version and data.get("code_version") != code_version_hash():
            raise ValidationError(
                "ensemble cache was produced by a different code version"
            )
        ens = cls(
            genus=int(data["genus"]),
            q=int(data["q"]),
            group_order=int(data["group_order"]) if data.get("group_order") else None,
        )
        for coeffs, twist, num, den in data["entries"]:
            ens.add(tuple(coeffs), Fraction(int(num), int(den)), twist)
        return ens

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=0, sort_keys=True))

    @classmethod
    def load(cls, path, check_version: bool = True) -> "ClassEnsemble":
        return cls.from_json(json.loads(Path(path).read_text()), check_version)


# ---------------------------------------------------------------------------
# elliptic ensembles


def _decode_columns(np, codes, q, ncols):
    cols = []
    rest = codes
    for _ in range(ncols):
        cols.append((rest % q).astype(np.uint32))
        rest = rest // q
    return cols


def _elliptic_char2_shard(args):
    import numpy as np

    p, f, lo, hi = args
    F = gf.make_field(p, f)
    q = F.q
    codes = np.arange(lo, hi, dtype=np.int64)
    a1, a2, a3, a4, a6 = _decode_columns(np, codes, q, 5)
    smooth, counts = cm.batch_elliptic_counts(F, a1, a2, a3, a4, a6)
    t = (q + 1 - counts)[smooth]
    tmax = 2 * math.isqrt(q) + 1
    hist = np.bincount(t + tmax, minlength=2 * tmax + 1)
    return {int(tt - tmax): int(n) for tt, n in enumerate(hist) if n}


def _elliptic_odd_shard(args):
    import numpy as np

    p, f, lo, hi = args
    F = gf.make_field(p, f)
    q = F.q
    codes = np.arange(lo, hi, dtype=np.int64)
    a2, a4, a6 = _decode_columns(np, codes, q, 3)
    zero = np.zeros_like(a2)
    smooth, counts = cm.batch_elliptic_counts(F, zero, a2, zero, a4, a6)
    t = (q + 1 - counts)[smooth]
    tmax = 2 * math.isqrt(q) + 1
    hist = np.bincount(t + tmax, minlength=2 * tmax + 1)
    return {int(tt - tmax): int(n) for tt, n in enumerate(hist) if n}


def _run_sharded(fn, total, nshards, workers, static_args):
    bounds = [total * i // nshards for i in range(nshards + 1)]
    jobs = [static_args + (bounds[i], bounds[i + 1]) for i in range(nshards)]
    jobs = [j for j in jobs if j[-2] < j[-1]]
    merged: dict = {}
    if workers <= 1:
        results = map(fn, jobs)
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(fn, jobs))
    for r in results:
        for k, v in r.items():
            merged[k] = merged.get(k, 0) + v
    return merged


_ENSEMBLE_MEMO: dict = {}


def elliptic_ensemble(q: int, workers=None, shards=None) -> ClassEnsemble:
    """All Weierstrass models over F_q with weight 1/(q^3 (q-1)) each,
    aggregated by the Frobenius trace.  Mass identity: total = q.

    Odd characteristic runs over the completed-square family
    y^2 = cubic (each such model stands for exactly q^2 long models),
    characteristic 2 over the full q^5 coefficient space.
    """
    memo_key = ("elliptic", q)
    if memo_key in _ENSEMBLE_MEMO:
        return _ENSEMBLE_MEMO[memo_key]
    if q > 2**10:
        raise UnsupportedRangeError("elliptic ensembles capped at q <= 1024")
    pf = gf.factorize(q)
    if len(pf) != 1:
        raise ValidationError("q must be a prime power")
    (p, f), = pf.items()
    F = gf.make_field(p, f)
    w = worker_count(workers)
    if p == 2:
        total = q**5
        nshards = shards or max(w * 4, 16)
        hist = _run_sharded(_elliptic_char2_shard, total, min(nshards, q**2), w, (p, f))
        multiplier = 1
    else:
        total = q**3
        nshards = shards or max(w * 4, 8)
        hist = _run_sharded(_elliptic_odd_shard, total, min(nshards, q), w, (p, f))
        multiplier = q**2
    group = q**3 * (q - 1)
    ens = ClassEnsemble(genus=1, q=q, group_order=group)
    for t, n in sorted(hist.items()):
        if t * t > 4 * q:
            raise IntegrityError(f"trace {t} violates the eigenvalue bound at q={q}")
        ens.add((t,), Fraction(n * multiplier, group))
    if ens.mass != q:
        raise IntegrityError(f"elliptic mass identity failed at q={q}: {ens.mass}")
    _ENSEMBLE_MEMO[memo_key] = ens
    return ens


def sigma_moment(q: int, a: int, workers=None) -> int:
    """Minus the weighted sum of the degree-a symmetric eigenvalue power
    over the elliptic ensemble; exact integer."""
    if a < 0:
        raise ValidationError("moment index must be >= 0")
    ens = elliptic_ensemble(q, workers=workers)
    total = Fraction(0)
    for (coeffs, _), w in ens.entries.items():
        total += w * _char_value(1, (a,), coeffs, q)
    total = -total
    if total.denominator != 1:
        raise IntegrityError(f"sigma moment is not an integer at (q={q}, a={a})")
    return int(total)


def m1n_point_count(q: int, n: int, workers=None) -> Fraction:
    """Groupoid count of genus-1 curves with n distinct marked points:
    sum over classes of (N-1)(N-2)...(N-n+1) / #Aut with N = #E(F_q)."""
    if n < 1:
        raise ValidationError("need n >= 1 marked points")
    if q > 5:
        raise UnsupportedRangeError("pointed counts supported for q <= 5")
    if n > 16:
        raise UnsupportedRangeError("marked-point count capped at 16")
    ens = elliptic_ensemble(q, workers=workers)
    total = Fraction(0)
    for (coeffs, _), w in ens.entries.items():
        N = q + 1 - coeffs[0]
        prod = 1
        for j in range(1, n):
            prod *= N - j
        total += w * prod
    return total


# ---------------------------------------------------------------------------
# entry combination helpers (characteristic polynomials of Frobenius on H^1)


def coeffs_to_charpoly(coeffs, g: int, q: int):
    """Integer coefficient list (degree 2g, leading first) of
    x^2g - E1 x^(2g-1) + E2 x^(2g-2) - ..., with E_{g+i} = q^i E_{g-i}."""
    E = [1] + [int(c) for c in coeffs]
    for i in range(1, g + 1):
        E.append(q**i * E[g - i])
    return [(-1) ** j * E[j] for j in range(2 * g + 1)]


def charpoly_to_coeffs(poly, g: int):
    """Inverse of coeffs_to_charpoly (poly leading-first, monic, degree 2g)."""
    assert len(poly) == 2 * g + 1 and poly[0] == 1
    return tuple((-1) ** j * poly[j] for j in range(1, g + 1))


def combine_coeffs(c1, g1, c2, g2, q):
    """Weil coefficients of the union of two eigenvalue multisets."""
    p1 = coeffs_to_charpoly(c1, g1, q)
    p2 = coeffs_to_charpoly(c2, g2, q)
    prod = [0] * (len(p1) + len(p2) - 1)
    for i, a in enumerate(p1):
        if a:
            for j, b in enumerate(p2):
                prod[i + j] += a * b
    return charpoly_to_coeffs(prod, g1 + g2)


def induced_coeffs(beta: int, d: int, q: int):
    """Weil coefficients (genus d) of the degree-2d eigenvalue multiset of
    x^(2d) - beta x^d + q^d: a class over F_{q^d} pushed down to F_q."""
    poly = [0] * (2 * d + 1)
    poly[0] = 1
    poly[d] = -beta
    poly[2 * d] = q**d
    return charpoly_to_coeffs(poly, d)


# ---------------------------------------------------------------------------
# genus-2 ensembles


def _gl2_order(q: int) -> int:
    return (q * q - 1) * (q * q - q)


@functools.lru_cache(maxsize=None)
def _repeated_cubic_codes(p: int, f: int, ncoeffs: int):
    """Codes (in the base-q digit encoding of ncoeffs coefficients) of the
    forms c * m(x)^2 with m a monic cubic: degree-6 repeated factors that
    the depth-2 singular scan cannot see."""
    F = gf.make_field(p, f)
    q = F.q
    out = []
    for mcode in range(q**3):
        m = list(gf._digits(mcode, q, 3)) + [1]
        m2 = [0] * 7
        for i, a in enumerate(m):
            if a:
                for j, b in enumerate(m):
                    if b:
                        m2[i + j] = F.add(m2[i + j], F.mul(a, b))
        for c in range(1, q):
            code = 0
            for coef in reversed(m2):
                code = code * q + F.mul(c, coef)
            out.append(code)
    return sorted(set(out))


def _genus2_odd_shard(args):
    import numpy as np

    p, f, lo, hi = args
    F = gf.make_field(p, f)
    q = F.q
    codes = np.arange(lo, hi, dtype=np.int64)
    cols = _decode_columns(np, codes, q, 7)
    mask = cm.batch_hyperelliptic_odd_squarefree(F, cols, 2, scan_depth=2)
    bad = np.asarray(_repeated_cubic_codes(p, f, 7), dtype=np.int64)
    bad = bad[(bad >= lo) & (bad < hi)]
    mask[bad - lo] = False
    c1 = cm.batch_hyperelliptic_odd_counts(F, cols, 1)
    c2 = cm.batch_hyperelliptic_odd_counts(F, cols, 2)
    return _aggregate_genus2(np, q, mask, c1, c2)


def _genus2_char2_shard(args):
    import numpy as np

    p, f, lo, hi = args
    F = gf.make_field(p, f)
    q = F.q
    codes = np.arange(lo, hi, dtype=np.int64)
    h_cols = _decode_columns(np, codes % (q**4), q, 4)
    f_cols = _decode_columns(np, codes // (q**4), q, 7)
    mask = cm.batch_hyperelliptic_char2_smooth(F, h_cols, f_cols, 2)
    c1 = cm.batch_hyperelliptic_char2_counts(F, h_cols, f_cols, 1)
    c2 = cm.batch_hyperelliptic_char2_counts(F, h_cols, f_cols, 2)
    return _aggregate_genus2(np, q, mask, c1, c2)


def _aggregate_genus2(np, q, mask, c1, c2):
    s1 = (q + 1 - c1)[mask]
    s2 = (q * q + 1 - c2)[mask]
    num = s1 * s1 - s2
    if (num % 2).any():
        raise IntegrityError("genus-2 power sums have wrong parity")
    e1 = s1
    e2 = num // 2
    A = 4 * math.isqrt(q) + 4
    C = 6 * q + 8
    if (np.abs(e1) > A).any() or (np.abs(e2) > C).any():
        raise IntegrityError("genus-2 coefficients escaped the expected box")
    key = (e1 + A) * (2 * C + 1) + (e2 + C)
    hist = np.bincount(key, minlength=(2 * A + 1) * (2 * C + 1))
    out = {}
    for k, n in enumerate(hist):
        if n:
            out[(k // (2 * C + 1) - A, k % (2 * C + 1) - C)] = int(n)
    return out


def genus2_ensemble(q: int, workers=None, shards=None) -> ClassEnsemble:
    """All genus-2 models over F_q aggregated by (e_1, e_2), with stack
    weights.  Mass identity: total = q^3.

    Odd characteristic enumerates the q^7 binary-sextic coefficient
    vectors (squarefree, degree >= 5) under the GL_2 substitution
    action; characteristic 2 enumerates (h, f) pairs with deg h <= 3,
    deg f <= 6 under the group extended by the shears y -> y + j(x).
    """
    memo_key = ("genus2", q)
    if memo_key in _ENSEMBLE_MEMO:
        return _ENSEMBLE_MEMO[memo_key]
    if q not in (2, 3, 4, 5, 7, 9, 11):
        raise UnsupportedRangeError("genus-2 ensembles support q in {2,3,4,5,7,9,11}")
    (p, f), = gf.factorize(q).items()
    w = worker_count(workers)
    if p == 2:
        total = q**11
        hist = _run_sharded(
            _genus2_char2_shard, total, shards or max(4 * w, 8), w, (p, f)
        )
        group = _gl2_order(q) * q**4
    else:
        total = q**7
        hist = _run_sharded(
            _genus2_odd_shard, total, shards or max(4 * w, 8), w, (p, f)
        )
        group = _gl2_order(q)
    ens = ClassEnsemble(genus=2, q=q, group_order=group)
    for key, n in sorted(hist.items()):
        ens.add(key, Fraction(n, group))
    if ens.mass != q**3:
        raise IntegrityError(f"genus-2 mass identity failed at q={q}: {ens.mass}")
    _ENSEMBLE_MEMO[memo_key] = ens
    return ens


# ---------------------------------------------------------------------------
# symmetric-power strata and the abelian-surface trace


def sym_power_ensemble(q: int, n: int, workers=None) -> ClassEnsemble:
    """The n-th symmetric power of the elliptic ensemble as a genus-n
    ensemble: the cycle-index assembly over ordered tuples and the
    conjugate (induced) classes over F_{q^d}.

    n = 2: (ordered pairs + classes over F_{q^2}) / 2, mass q^2.
    n = 3: (triples + 3 * mixed + 2 * classes over F_{q^3}) / 6, mass q^3.
    """
    memo_key = ("sym", q, n)
    if memo_key in _ENSEMBLE_MEMO:
        return _ENSEMBLE_MEMO[memo_key]
    if n not in (2, 3):
        raise UnsupportedRangeError("symmetric powers implemented for n in {2,3}")
    e1 = elliptic_ensemble(q, workers=workers)
    ens = ClassEnsemble(genus=n, q=q)
    if n == 2:
        e2 = elliptic_ensemble(q**2, workers=workers)
        for (ca, _), wa in e1.entries.items():
            for (cb, _), wb in e1.entries.items():
                ens.add(combine_coeffs(ca, 1, cb, 1, q), wa * wb / 2)
        for (cb, _), wb in e2.entries.items():
            ens.add(induced_coeffs(cb[0], 2, q), wb / 2)
    else:
        e2 = elliptic_ensemble(q**2, workers=workers)
        e3 = elliptic_ensemble(q**3, workers=workers)
        singles = list(e1.entries.items())
        for (ca, _), wa in singles:
            for (cb, _), wb in singles:
                for (cc, _), wc in singles:
                    coeffs = combine_coeffs(
                        combine_coeffs(ca, 1, cb, 1, q), 2, cc, 1, q
                    )
                    ens.add(coeffs, wa * wb * wc / 6)
        for (ca, _), wa in singles:
            for (cb, _), wb in e2.entries.items():
                coeffs = combine_coeffs(ca, 1, induced_coeffs(cb[0], 2, q), 2, q)
                ens.add(coeffs, wa * wb / 2)  # 3/6 of the ordered count
        for (cb, _), wb in e3.entries.items():
            ens.add(induced_coeffs(cb[0], 3, q), wb / 3)  # 2/6
    expected_mass = q**n
    if ens.mass != expected_mass:
        raise IntegrityError(f"sym^{n} mass identity failed at q={q}: {ens.mass}")
    _ENSEMBLE_MEMO[memo_key] = ens
    return ens


def sym_power_trace(n: int, q: int, lam, workers=None) -> Fraction:
    """Character-weighted mass of the n-th symmetric-power stratum."""
    return sym_power_ensemble(q, n, workers=workers).char_sum(lam)


def a2_trace(q: int, lam, workers=None) -> int:
    """Frobenius trace on the compactly-supported Euler characteristic of
    the weight-lam local system over the moduli of principally polarized
    abelian surfaces: genus-2 Jacobians plus the product stratum."""
    a, b = lam
    if a < b or b < 0:
        raise ValidationError("weight must be dominant")
    if (a + b) % 2 == 1:
        return 0
    total = genus2_ensemble(q, workers=workers).char_sum(lam)
    total += sym_power_ensemble(q, 2, workers=workers).char_sum(lam)
    if total.denominator != 1:
        raise IntegrityError(f"abelian-surface trace not integral at {lam}")
    return int(total)


# ---------------------------------------------------------------------------
# genus-3 ensembles
#
# The quartic sweep checks smoothness by scanning for singular points over
# extensions of degree <= 3, which covers every singular configuration
# except products of two conics whose four intersection points form one
# Galois orbit of degree 4.  Those forms are marked singular generatively:
# every conic * conic product (including conjugate pairs over F_{q^2})
# is a singular quartic, and no other configuration escapes the scan
# (an irreducible quartic carries delta <= 3, and any factorization with
# a line has a singular point of degree <= 3).


@functools.lru_cache(maxsize=None)
def _conic_product_codes(p: int):
    """Sorted int64 codes (graded-lex digit encoding) of all ternary
    quartics that factor into two conics over F_p or as a conjugate
    conic pair over F_{p^2}."""
    import numpy as np

    F = gf.make_field(p, 1)
    q = p
    exps2 = cm.monomial_exponents(2)
    exps4 = cm.monomial_exponents(4)
    index4 = {e: i for i, e in enumerate(exps4)}
    pair_targets = [
        (i, j, index4[tuple(a + b for a, b in zip(exps2[i], exps2[j]))])
        for i in range(6)
        for j in range(6)
    ]
    out = set()

    def mark_products(E, cols1, cols2, to_base):
        B = BatchGFLocal = cm.BatchGF(E)
        n = cols1[0].shape[0]
        prod = [np.zeros(n, dtype=np.uint32) for _ in range(15)]
        for i, j, k in pair_targets:
            term = B.mul_t[cols1[i], cols2[j]]
            prod[k] = B.add(prod[k], term)
        if to_base is None:
            base_cols = prod
            ok = np.ones(n, dtype=bool)
        else:
            ok = np.ones(n, dtype=bool)
            base_cols = []
            for c in prod:
                mapped = to_base[c]
                ok &= mapped >= 0
                base_cols.append(np.where(mapped >= 0, mapped, 0).astype(np.int64))
        code = np.zeros(n, dtype=np.int64)
        for c in reversed(base_cols):
            code = code * q + c
        return set(code[ok].tolist())

    # rational conic pairs
    ncon = q**6
    codes = np.arange(ncon, dtype=np.int64)
    cols = _decode_columns(np, codes, q, 6)
    big1 = [np.repeat(c, ncon) for c in cols]
    big2 = [np.tile(c, ncon) for c in cols]
    out |= mark_products(F, big1, big2, None)

    # conjugate pairs over F_{q^2}
    E2 = gf.make_field(p, 2)
    emb = gf.embed_array(F, E2)
    inv_emb = -np.ones(E2.q, dtype=np.int64)
    inv_emb[emb] = np.arange(q)
    frob = np.array([E2.frobenius(x) for x in range(E2.q)], dtype=np.uint32)
    ncon2 = E2.q**6
    codes2 = np.arange(ncon2, dtype=np.int64)
    cols2 = _decode_columns(np, codes2, E2.q, 6)
    conj = [frob[c] for c in cols2]
    out |= mark_products(E2, cols2, conj, inv_emb)
    return np.array(sorted(out), dtype=np.int64)


@functools.lru_cache(maxsize=None)
def _quartic_point_tables(p: int, d: int):
    """Per extension degree d: projective points of P^2(F_{p^d}) and, for
    each of Q, Qx, Qy, Qz, the split evaluation tables over the high 8 /
    low 7 coefficient digits (meet-in-the-middle over the 15 monomials)."""
    import numpy as np

    F = gf.make_field(p, 1)
    E = gf.make_field(p, d)
    emb = gf.embed_array(F, E)
    B = cm.BatchGF(E)
    exps4 = cm.monomial_exponents(4)
    pts = list(cm.projective_points(E))

    # scalar multipliers phi[pi][j] at each point: the value multiplying
    # coefficient digit j in the evaluation of polynomial pi
    def mono_val(P, e):
        x, y, z = P
        return E.mul(E.mul(E.pow(x, e[0]), E.pow(y, e[1])), E.pow(z, e[2]))

    phis = []
    for P in pts:
        row = {"Q": [], "Qx": [], "Qy": [], "Qz": []}
        for j, e in enumerate(exps4):
            row["Q"].append(mono_val(P, e))
            for axis, name in enumerate(("Qx", "Qy", "Qz")):
                mult = e[axis] % p
                if e[axis] == 0 or mult == 0:
                    row[name].append(0)
                    continue
                e2 = list(e)
                e2[axis] -= 1
                row[name].append(E.mul(mult, mono_val(P, tuple(e2))))
        phis.append(row)

    hi_n, lo_n = p**8, p**7
    hi_cols = _decode_columns(np, np.arange(hi_n, dtype=np.int64), p, 8)
    lo_cols = _decode_columns(np, np.arange(lo_n, dtype=np.int64), p, 7)
    hi_emb = [emb[c] for c in hi_cols]
    lo_emb = [emb[c] for c in lo_cols]
    tables = []
    for P, row in zip(pts, phis):
        per_poly = {}
        for name in ("Q", "Qx", "Qy", "Qz"):
            tl = np.zeros(lo_n, dtype=np.uint32)
            th = np.zeros(hi_n, dtype=np.uint32)
            for j in range(7):
                s = row[name][j]
                if s:
                    tl = B.add(tl, B.mul_t[lo_emb[j], s])
            for j in range(7, 15):
                s = row[name][j]
                if s:
                    th = B.add(th, B.mul_t[hi_emb[j - 7], s])
            per_poly[name] = (th, tl)
        tables.append(per_poly)
    return tables


def _quartic_shard(args):
    import numpy as np

    p, lo, hi = args
    q = p
    codes = np.arange(lo, hi, dtype=np.int64)
    idx_lo = (codes % (q**7)).astype(np.int64)
    idx_hi = (codes // (q**7)).astype(np.int64)
    E_add = None
    singular = np.zeros(codes.shape, dtype=bool)
    counts = {}
    for d in (1, 2, 3):
        E = gf.make_field(p, d)
        B = cm.BatchGF(E)
        tables = _quartic_point_tables(p, d)
        cd = np.zeros(codes.shape, dtype=np.int32)
        for per_poly in tables:
            th, tl = per_poly["Q"]
            vq = B.add(th[idx_hi], tl[idx_lo])
            zero = vq == 0
            cd += zero
            sel = np.flatnonzero(zero)
            if sel.size:
                sub = np.ones(sel.size, dtype=bool)
                for name in ("Qx", "Qy", "Qz"):
                    th2, tl2 = per_poly[name]
                    v = B.add(th2[idx_hi[sel]], tl2[idx_lo[sel]])
                    sub &= v == 0
                    if not sub.any():
                        break
                singular[sel[sub]] = True
        counts[d] = cd
    bad = _conic_product_codes(p)
    bad = bad[(bad >= lo) & (bad < hi)]
    singular[bad - lo] = True
    smooth = ~singular
    s = {d: (q**d + 1 - counts[d].astype(np.int64))[smooth] for d in (1, 2, 3)}
    return _aggregate_genus3(np, q, s[1], s[2], s[3])


def _aggregate_genus3(np, q, s1, s2, s3):
    num2 = s1 * s1 - s2
    if (num2 % 2).any():
        raise IntegrityError("genus-3 parity failure in e_2")
    e2 = num2 // 2
    num3 = s1 * s1 * s1 - 3 * s1 * s2 + 2 * s3
    if (num3 % 6).any():
        raise IntegrityError("genus-3 divisibility failure in e_3")
    e3 = num3 // 6
    e1 = s1
    A = 6 * math.isqrt(q) + 6
    B2 = 15 * q + 16
    C3 = 20 * q * math.isqrt(q) + 40
    if (np.abs(e1) > A).any() or (np.abs(e2) > B2).any() or (np.abs(e3) > C3).any():
        raise IntegrityError("genus-3 coefficients escaped the expected box")
    key = ((e1 + A) * (2 * B2 + 1) + (e2 + B2)) * (2 * C3 + 1) + (e3 + C3)
    uniq, cnt = np.unique(key, return_counts=True)
    out = {}
    for k, n in zip(uniq.tolist(), cnt.tolist()):
        e3v = k % (2 * C3 + 1) - C3
        rest = k // (2 * C3 + 1)
        e2v = rest % (2 * B2 + 1) - B2
        e1v = rest // (2 * B2 + 1) - A
        out[(e1v, e2v, e3v)] = n
    return out


def _genus3_hyp_odd_shard(args):
    import numpy as np

    p, f, lo, hi = args
    F = gf.make_field(p, f)
    q = F.q
    codes = np.arange(lo, hi, dtype=np.int64)
    cols = _decode_columns(np, codes, q, 9)
    mask = cm.batch_hyperelliptic_odd_squarefree(F, cols, 3)
    cs = [cm.batch_hyperelliptic_odd_counts(F, cols, n) for n in (1, 2, 3)]
    s = [(q**n + 1 - c.astype(np.int64))[mask] for n, c in zip((1, 2, 3), cs)]
    return _aggregate_genus3(np, q, *s)


def _genus3_hyp_char2_shard(args):
    import numpy as np

    p, f, lo, hi = args
    F = gf.make_field(p, f)
    q = F.q
    codes = np.arange(lo, hi, dtype=np.int64)
    h_cols = _decode_columns(np, codes % (q**5), q, 5)
    f_cols = _decode_columns(np, codes // (q**5), q, 9)
    mask = cm.batch_hyperelliptic_char2_smooth(F, h_cols, f_cols, 3)
    cs = [cm.batch_hyperelliptic_char2_counts(F, h_cols, f_cols, n) for n in (1, 2, 3)]
    s = [(q**n + 1 - c.astype(np.int64))[mask] for n, c in zip((1, 2, 3), cs)]
    return _aggregate_genus3(np, q, *s)


def _pgl3_order(q: int) -> int:
    return q**3 * (q**3 - 1) * (q**2 - 1)


def genus3_ensemble(q: int, workers=None, shards=None) -> ClassEnsemble:
    """Genus-3 curves over F_q: the hyperelliptic locus plus all smooth
    plane quartics, the latter carrying the twist flag (the -1 twist of
    a quartic Jacobian is a principally polarized point not hit by any
    curve, while the hyperelliptic involution realizes -1)."""
    memo_key = ("genus3", q)
    if memo_key in _ENSEMBLE_MEMO:
        return _ENSEMBLE_MEMO[memo_key]
    if q not in (2, 3):
        raise UnsupportedRangeError("genus-3 ensembles support q in {2,3}")
    (p, f), = gf.factorize(q).items()
    w = worker_count(workers)
    ens = ClassEnsemble(genus=3, q=q)
    if p == 2:
        hyp_total = q**14  # q^5 h-polys x q^9 f-polys
        hyp = _run_sharded(
            _genus3_hyp_char2_shard, hyp_total, shards or max(w, 4), w, (p, f)
        )
        hyp_group = _gl2_order(q) * q**5
    else:
        hyp_total = q**9
        hyp = _run_sharded(
            _genus3_hyp_odd_shard, hyp_total, shards or max(w, 4), w, (p, f)
        )
        hyp_group = _gl2_order(q)
    for key, n in sorted(hyp.items()):
        ens.add(key, Fraction(n, hyp_group))
    quart_total = q**15
    quart = _run_sharded(
        _quartic_shard, quart_total, shards or max(4 * w, 8), w, (p,)
    )
    quart_group = _pgl3_order(q) * (q - 1)
    for key, n in sorted(quart.items()):
        ens.add(key, Fraction(n, quart_group), twist=True)
    _ENSEMBLE_MEMO[memo_key] = ens
    return ens


def product_stratum_ensemble(q: int, workers=None) -> ClassEnsemble:
    """Elliptic x genus-2-Jacobian products as a genus-3 ensemble:
    independent convolution, weights multiplied, eigenvalues unioned."""
    memo_key = ("e_x_g2", q)
    if memo_key in _ENSEMBLE_MEMO:
        return _ENSEMBLE_MEMO[memo_key]
    e1 = elliptic_ensemble(q, workers=workers)
    g2 = genus2_ensemble(q, workers=workers)
    ens = ClassEnsemble(genus=3, q=q)
    for (ca, _), wa in e1.entries.items():
        for (cb, _), wb in g2.entries.items():
            ens.add(combine_coeffs(ca, 1, cb, 2, q), wa * wb)
    _ENSEMBLE_MEMO[memo_key] = ens
    return ens


def a3_trace(q: int, lam, workers=None) -> int:
    """Frobenius trace on the compactly-supported Euler characteristic of
    the weight-lam local system over the moduli of principally polarized
    abelian threefolds: Jacobians (with the quartic twist average), the
    elliptic x abelian-surface products, and the triple-product stratum."""
    a, b, c = lam
    if a < b or b < c or c < 0:
        raise ValidationError("weight must be dominant")
    if (a + b + c) % 2 == 1:
        return 0
    total = genus3_ensemble(q, workers=workers).char_sum(lam)
    total += product_stratum_ensemble(q, workers=workers).char_sum(lam)
    total += sym_power_ensemble(q, 3, workers=workers).char_sum(lam)
    if total.denominator != 1:
        raise IntegrityError(f"abelian-threefold trace not integral at {lam}")
    return int(total)
