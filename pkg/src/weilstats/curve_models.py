"""Concrete curve models and exact point counting over F_{q^n}.

Model classes cover everything the statistics pipelines enumerate:
Weierstrass elliptic models in all characteristics, hyperelliptic
models of genus 2 and 3 (squarefree binary form in odd characteristic,
(h, f) pairs with y^2 + h(x)y = f(x) in characteristic 2), smooth plane
quartics, diagonal (hermitian / Fermat) plane curves, and the recursive
Artin-Schreier tower.

Scalar counting works on single models through Field methods; the
batch_* functions run the same counts on numpy arrays of coefficient
codes via field lookup tables, which is the packed fast path the big
enumeration sweeps use.  Both paths are exact integer arithmetic; the
test suite pins them against each other on random models.

Counts are projective: points at infinity are resolved on the smooth
model via the second affine chart x -> 1/x, y -> y/x^(g+1), never by
leading-coefficient case analysis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import gf
from .errors import UnsupportedRangeError, ValidationError
from .zeta_bounds import WeilData, weil_from_counts

_EXT_CAP = gf.SIZE_CAP


def _ext_field(field: gf.Field, n: int) -> gf.Field:
    if field.q**n > _EXT_CAP:
        raise UnsupportedRangeError(
            f"extension field size {field.q}^{n} exceeds the size cap"
        )
    return gf.make_field(field.p, field.f * n)


def _embed_coeffs(field, ext, coeffs):
    table = gf.embed(field, ext)
    return [table[c] for c in coeffs]


def _poly_eval(F, coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = F.add(F.mul(acc, x), c)
    return acc


def _poly_deriv(F, coeffs):
    return [F.mul((i % F.p), c) for i, c in enumerate(coeffs)][1:] if len(coeffs) > 1 else [0]


def _poly_degree(coeffs):
    d = len(coeffs) - 1
    while d > 0 and coeffs[d] == 0:
        d -= 1
    return d if (d > 0 or coeffs[0] != 0) else -1


def _poly_mod(F, a, b):
    """Remainder of a modulo b over the field (b nonzero)."""
    a = list(a)
    db = _poly_degree(b)
    inv_lead = F.inv(b[db])
    while _poly_degree(a) >= db:
        da = _poly_degree(a)
        factor = F.mul(a[da], inv_lead)
        for i in range(db + 1):
            a[da - db + i] = F.sub(a[da - db + i], F.mul(factor, b[i]))
        while len(a) > 1 and a[-1] == 0:
            a.pop()
        if _poly_degree(a) < 0:
            break
    return a


def _poly_gcd_is_constant(F, a, b):
    """gcd(a, b) over the field; True when it is a nonzero constant."""
    a, b = list(a), list(b)
    while _poly_degree(b) >= 0:
        a, b = b, _poly_mod(F, a, b)
    return _poly_degree(a) == 0


@dataclass(frozen=True)
class EllipticModel:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over `field`."""

    field: gf.Field
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    @property
    def genus(self):
        return 1

    def discriminant(self) -> int:
        F = self.field
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        c = lambda n: F.from_coeffs([n % F.p] + [0] * (F.f - 1))
        b2 = F.add(F.mul(a1, a1), F.mul(c(4), a2))
        b4 = F.add(F.mul(c(2), a4), F.mul(a1, a3))
        b6 = F.add(F.mul(a3, a3), F.mul(c(4), a6))
        b8 = F.add(
            F.add(F.mul(F.mul(a1, a1), a6), F.mul(c(4), F.mul(a2, a6))),
            F.add(
                F.sub(F.mul(a2, F.mul(a3, a3)), F.mul(a4, a4)),
                F.neg(F.mul(a1, F.mul(a3, a4))),
            ),
        )
        t1 = F.mul(F.mul(b2, b2), b8)
        t2 = F.mul(c(8), F.mul(b4, F.mul(b4, b4)))
        t3 = F.mul(c(27), F.mul(b6, b6))
        t4 = F.mul(c(9), F.mul(b2, F.mul(b4, b6)))
        return F.sub(F.sub(F.sub(t4, t1), t2), t3)

    def is_smooth(self) -> bool:
        return self.discriminant() != 0

    def count_points(self, n: int = 1) -> int:
        if not self.is_smooth():
            raise ValidationError("singular Weierstrass model")
        E = _ext_field(self.field, n)
        a1, a2, a3, a4, a6 = _embed_coeffs(
            self.field, E, [self.a1, self.a2, self.a3, self.a4, self.a6]
        )
        total = 1  # the point at infinity
        if E.p == 2:
            tr = E.np_trace_table
            for x in E.elements():
                h = E.add(E.mul(a1, x), a3)
                fx = E.add(
                    E.add(E.mul(E.mul(x, x), E.add(x, a2)), E.mul(a4, x)), a6
                )
                if h == 0:
                    total += 1  # squaring is bijective
                else:
                    u = E.mul(fx, E.pow(E.inv(h), 2))
                    total += 2 if int(tr[u]) == 0 else 0
        else:
            sc = E.np_sqrt_count_table
            inv4 = E.inv(E.from_coeffs([4 % E.p] + [0] * (E.f - 1)))
            for x in E.elements():
                fx = E.add(
                    E.add(E.mul(E.mul(x, x), E.add(x, a2)), E.mul(a4, x)), a6
                )
                h = E.add(E.mul(a1, x), a3)
                # complete the square: (2y + h)^2 = h^2 + 4f
                d = E.add(E.mul(h, h), E.mul(E.inv(inv4), fx))
                total += int(sc[d])
        return total

    def weil_data(self) -> WeilData:
        return weil_from_counts(self.field.q, 1, [self.count_points(1)])


@dataclass(frozen=True)
class HyperellipticModel:
    """Genus-g hyperelliptic model.

    Odd characteristic: y^2 = f(x) for the binary form with coefficient
    list f0..f_{2g+2}; smooth iff f is squarefree of degree >= 2g+1.
    Characteristic 2: y^2 + h(x)y = f(x) with deg h <= g+1,
    deg f <= 2g+2; smoothness is the chart-wise no-common-root
    criterion for (h, h'^2 f + f'^2).
    """

    field: gf.Field
    genus: int
    f_coeffs: tuple
    h_coeffs: tuple | None = None  # characteristic 2 only

    def __post_init__(self):
        g = self.genus
        if len(self.f_coeffs) != 2 * g + 3:
            raise ValidationError("f must have 2g+3 coefficients (degree 2g+2)")
        if self.field.p == 2:
            if self.h_coeffs is None:
                raise ValidationError("characteristic 2 needs the h polynomial")
            if len(self.h_coeffs) != g + 2:
                raise ValidationError("h must have g+2 coefficients (degree g+1)")
        elif self.h_coeffs is not None:
            raise ValidationError("h is only for characteristic 2")

    def is_smooth(self) -> tuple[bool, int]:
        F = self.field
        f = list(self.f_coeffs)
        if F.p != 2:
            if _poly_degree(f) < 2 * self.genus + 1:
                return False, self.genus
            fp = _poly_deriv(F, f)
            return _poly_gcd_is_constant(F, f, fp), self.genus
        h = list(self.h_coeffs)
        if _poly_degree(h) < 0:
            return False, self.genus  # h = 0 is inseparable
        hp = _poly_deriv(F, h)
        fp = _poly_deriv(F, f)
        # W = h'^2 f + f'^2; a common root of (h, W) is an affine singular point
        w = _poly_add(
            F,
            _poly_mul(F, _poly_mul(F, hp, hp), f),
            _poly_mul(F, fp, fp),
        )
        if not _poly_gcd_is_constant(F, h, w):
            return False, self.genus
        # second chart at u = 0: h~(u) = u^{g+1} h(1/u), f~(u) = u^{2g+2} f(1/u)
        g = self.genus
        ht = list(reversed(_pad(h, g + 2)))
        ft = list(reversed(_pad(f, 2 * g + 3)))
        if ht[0] == 0:
            lhs = F.mul(F.mul(ht[1], ht[1]), ft[0])
            rhs = F.mul(ft[1], ft[1])
            if F.add(lhs, rhs) == 0:
                return False, self.genus
        return True, self.genus

    def count_points(self, n: int = 1) -> int:
        ok, _ = self.is_smooth()
        if not ok:
            raise ValidationError("singular hyperelliptic model")
        E = _ext_field(self.field, n)
        f = _embed_coeffs(self.field, E, self.f_coeffs)
        if self.field.p != 2:
            sc = E.np_sqrt_count_table
            total = int(sc[f[-1]])  # chart 2 at u=0: v^2 = leading coefficient
            for x in E.elements():
                total += int(sc[_poly_eval(E, f, x)])
            return total
        h = _embed_coeffs(self.field, E, self.h_coeffs)
        tr = E.np_trace_table
        total = 0
        for x in E.elements():
            hx = _poly_eval(E, h, x)
            fx = _poly_eval(E, f, x)
            if hx == 0:
                total += 1
            else:
                total += 2 if int(tr[E.mul(fx, E.pow(E.inv(hx), 2))]) == 0 else 0
        # chart 2 fiber at u = 0
        hinf, finf = h[-1], f[-1]
        if hinf == 0:
            total += 1
        else:
            total += 2 if int(tr[E.mul(finf, E.pow(E.inv(hinf), 2))]) == 0 else 0
        return total

    def weil_data(self) -> WeilData:
        g = self.genus
        counts = [self.count_points(n) for n in range(1, g + 1)]
        return weil_from_counts(self.field.q, g, counts)


def _pad(c, n):
    return list(c) + [0] * (n - len(c))


def _poly_add(F, a, b):
    n = max(len(a), len(b))
    a, b = _pad(a, n), _pad(b, n)
    return [F.add(x, y) for x, y in zip(a, b)]


def _poly_mul(F, a, b):
    if not a or not b:
        return [0]
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return out


# ---------------------------------------------------------------------------
# plane curves


def monomial_exponents(degree: int):
    """Exponent triples of degree-d ternary monomials in graded-lex order."""
    out = []
    for ex in range(degree, -1, -1):
        for ey in range(degree - ex, -1, -1):
            out.append((ex, ey, degree - ex - ey))
    return out


@dataclass(frozen=True)
class PlaneCurveModel:
    """A projective plane curve of given degree, coefficients in
    graded-lex monomial order (15 entries for a quartic)."""

    field: gf.Field
    degree: int
    coeffs: tuple

    def __post_init__(self):
        want = len(monomial_exponents(self.degree))
        if len(self.coeffs) != want:
            raise ValidationError(
                f"degree-{self.degree} plane curve needs {want} coefficients"
            )
        if all(c == 0 for c in self.coeffs):
            raise ValidationError("zero form")

    @property
    def genus(self):
        d = self.degree
        return (d - 1) * (d - 2) // 2

    def _evaluate(self, E, coeffs, point):
        x, y, z = point
        total = 0
        for (ex, ey, ez), c in zip(monomial_exponents(self.degree), coeffs):
            if c == 0:
                continue
            m = E.mul(E.mul(E.pow(x, ex), E.pow(y, ey)), E.pow(z, ez))
            total = E.add(total, E.mul(c, m))
        return total

    def _partials(self):
        """Coefficient lists of dQ/dx, dQ/dy, dQ/dz in the degree-(d-1) basis."""
        F = self.field
        lower = monomial_exponents(self.degree - 1)
        index = {e: i for i, e in enumerate(lower)}
        outs = []
        for axis in range(3):
            pc = [0] * len(lower)
            for (ex, ey, ez), c in zip(monomial_exponents(self.degree), self.coeffs):
                e = [ex, ey, ez]
                if e[axis] == 0 or c == 0:
                    continue
                mult = e[axis] % F.p
                if mult == 0:
                    continue
                e2 = list(e)
                e2[axis] -= 1
                scalar = F.from_coeffs([mult] + [0] * (F.f - 1))
                i = index[tuple(e2)]
                pc[i] = F.add(pc[i], F.mul(scalar, c))
            outs.append(pc)
        return outs

    def _eval_lower(self, E, coeffs, point, degree):
        x, y, z = point
        total = 0
        for (ex, ey, ez), c in zip(monomial_exponents(degree), coeffs):
            if c == 0:
                continue
            m = E.mul(E.mul(E.pow(x, ex), E.pow(y, ey)), E.pow(z, ez))
            total = E.add(total, E.mul(c, m))
        return total

    def is_smooth(self, scan_degree: int = 3) -> tuple[bool, int]:
        """Scan for singular points over extensions of degree <= scan_degree.

        For quartics this is exhaustive: a singular point of a plane
        quartic has degree at most 3 over the base field.
        """
        F = self.field
        partials = self._partials()
        for d in range(1, scan_degree + 1):
            E = _ext_field(F, d)
            qc = _embed_coeffs(F, E, self.coeffs)
            pcs = [_embed_coeffs(F, E, pc) for pc in partials]
            for pt in projective_points(E):
                if self._evaluate(E, qc, pt) != 0:
                    continue
                if all(
                    self._eval_lower(E, pc, pt, self.degree - 1) == 0 for pc in pcs
                ):
                    return False, self.genus
        return True, self.genus

    def count_points(self, n: int = 1) -> int:
        E = _ext_field(self.field, n)
        qc = _embed_coeffs(self.field, E, self.coeffs)
        total = 0
        for pt in projective_points(E):
            if self._evaluate(E, qc, pt) == 0:
                total += 1
        return total

    def weil_data(self) -> WeilData:
        g = self.genus
        counts = [self.count_points(n) for n in range(1, g + 1)]
        return weil_from_counts(self.field.q, g, counts)


def projective_points(F: gf.Field):
    """The q^2 + q + 1 points of P^2(F) with normalized last coordinate."""
    for x in F.elements():
        for y in F.elements():
            yield (x, y, 1)
    for x in F.elements():
        yield (x, 1, 0)
    yield (1, 0, 0)


def count_diagonal_curve(F: gf.Field, m: int) -> int:
    """Points of x^m + y^m + z^m = 0 in P^2(F), via the value distribution
    of the power map (fast path for hermitian and Fermat models)."""
    counts = {}
    for x in F.elements():
        v = F.pow(x, m) if x else 0
        counts[v] = counts.get(v, 0) + 1
    affine = 0
    for a, ca in counts.items():
        for b, cb in counts.items():
            c = F.neg(F.add(a, b))
            if c in counts:
                affine += ca * cb * counts[c]
    # affine count includes (0,0,0); the rest are (q-1)-to-1 over P^2
    assert (affine - 1) % (F.q - 1) == 0
    return (affine - 1) // (F.q - 1)


@dataclass
class HermitianRecord:
    q0: int
    field: gf.Field
    model: PlaneCurveModel
    points: int
    genus: int
    weil_poly: list | None

    @property
    def defect_is_zero(self):
        from .zeta_bounds import defect

        return defect(self.field.q, self.genus, self.points) == 0


def hermitian_model(q0: int) -> HermitianRecord:
    """The plane curve x^(q0+1) + y^(q0+1) + z^(q0+1) = 0 over F_{q0^2},
    with its verification record: q0^3 + 1 rational points and genus
    q0(q0-1)/2.

    Smoothness is automatic (q0 + 1 is prime to the characteristic, so
    the partials vanish only at the origin); the genus comes from the
    smooth-plane-curve formula, cross-checked against the Weil
    polynomial degree for q0 <= 3 where the extension counts fit the
    field size cap.
    """
    if q0 not in (2, 3, 4):
        raise UnsupportedRangeError("hermitian models supported for q0 in {2,3,4}")
    ps = {2: 2, 3: 3, 4: 2}[q0]
    fdeg = {2: 2, 3: 2, 4: 4}[q0]
    F = gf.make_field(ps, fdeg)
    assert F.q == q0 * q0
    degree = q0 + 1
    exps = monomial_exponents(degree)
    coeffs = [0] * len(exps)
    for i, e in enumerate(exps):
        if e in ((degree, 0, 0), (0, degree, 0), (0, 0, degree)):
            coeffs[i] = 1
    model = PlaneCurveModel(field=F, degree=degree, coeffs=tuple(coeffs))
    smooth, genus = model.is_smooth(scan_degree=2)
    if not smooth:
        raise AssertionError("hermitian model cannot be singular")
    assert genus == q0 * (q0 - 1) // 2
    points = count_diagonal_curve(F, degree)
    weil = None
    if q0 <= 3:
        counts = [count_diagonal_curve(_ext_field(F, n), degree) for n in range(1, genus + 1)]
        assert counts[0] == points
        weil = weil_from_counts(F.q, genus, counts).weil_poly
    return HermitianRecord(
        q0=q0, field=F, model=model, points=points, genus=genus, weil_poly=weil
    )


# ---------------------------------------------------------------------------
# the recursive Artin-Schreier tower


@dataclass
class TowerCount:
    q0: int
    level: int
    chains: int       # tuples with x_i != 0 for i < level
    extendable: int   # additionally x_level != 0


def tower_count(q0: int, level: int) -> TowerCount:
    """Count affine solution chains (x_1, y_2, ..., y_n) over F_{q0^2}
    of y_{i+1}^q0 + y_{i+1} = x_i^(q0+1), x_{i+1} = y_{i+1}/x_i.

    `chains` requires only the x_i needed to write the equations
    (i < level) to be nonzero; `extendable` additionally requires the
    final x_level != 0, which is what feeds the next level.
    """
    if q0 not in (2, 3):
        raise UnsupportedRangeError("tower base restricted to q0 in {2,3}")
    if not 1 <= level <= 4:
        raise UnsupportedRangeError("tower level restricted to 1..4")
    F = gf.make_field(q0, 2)
    if level == 1:
        return TowerCount(q0=q0, level=1, chains=F.q, extendable=F.q - 1)
    chains = 0
    extendable = 0
    stack = [(x1, x1, 1) for x1 in F.elements() if x1 != 0]
    while stack:
        x_cur, _, lvl = stack.pop()
        if lvl == level:
            chains += 1
            if x_cur != 0:
                extendable += 1
            continue
        rhs = F.pow(x_cur, q0 + 1)
        for y in F.elements():
            if F.add(F.pow(y, q0), y) == rhs:
                x_next = F.div(y, x_cur)
                if lvl + 1 == level:
                    stack.append((x_next, None, lvl + 1))
                elif x_next != 0:
                    stack.append((x_next, None, lvl + 1))
        # nothing else
    return TowerCount(q0=q0, level=level, chains=chains, extendable=extendable)


# ---------------------------------------------------------------------------
# batch counting (numpy lookup-table arithmetic over coefficient arrays)


class BatchGF:
    """Vectorized field arithmetic over numpy arrays of element codes.

    Characteristic 2 uses packed XOR addition directly on the codes;
    everything else goes through lookup tables built once per field.
    """

    def __init__(self, field: gf.Field):
        import numpy as np

        self.np = np
        self.field = field
        self.q = field.q
        self.p = field.p
        self.mul_t = field.np_mul_table
        self.add_t = None if field.p == 2 else field.np_add_table
        self.inv_t = field.np_inv_table

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        return self.add_t[a, b]

    def mul(self, a, b):
        return self.mul_t[a, b]

    def scalar(self, n: int):
        """Code of the prime-field constant n."""
        return n % self.p

    def poly_eval(self, coeff_arrays, x_code: int):
        """Horner evaluation at a scalar point for coefficient arrays."""
        acc = None
        for c in reversed(coeff_arrays):
            if acc is None:
                acc = c if hasattr(c, "shape") else self.np.asarray(c)
                continue
            acc = self.add(self.mul_t[acc, x_code], c)
        return acc


def _as_cols(np, cols):
    return [np.asarray(c, dtype=np.uint32) for c in cols]


def batch_elliptic_counts(field: gf.Field, a1, a2, a3, a4, a6):
    """(smooth_mask, c(1) array) for Weierstrass coefficient arrays.

    Exact integer results; the general discriminant formula is evaluated
    through field tables, so all characteristics share one code path.
    """
    import numpy as np

    B = BatchGF(field)
    a1, a2, a3, a4, a6 = _as_cols(np, [a1, a2, a3, a4, a6])
    mt = B.mul_t
    neg = field.np_neg_table

    def cmul(n, arr):  # multiply by prime-field constant
        return mt[B.scalar(n), arr]

    b2 = B.add(mt[a1, a1], cmul(4, a2))
    b4 = B.add(cmul(2, a4), mt[a1, a3])
    b6 = B.add(mt[a3, a3], cmul(4, a6))
    b8 = B.add(
        B.add(mt[mt[a1, a1], a6], cmul(4, mt[a2, a6])),
        B.add(
            B.add(mt[a2, mt[a3, a3]], neg[mt[a4, a4]]),
            neg[mt[a1, mt[a3, a4]]],
        ),
    )
    delta = B.add(
        B.add(neg[mt[mt[b2, b2], b8]], neg[cmul(8, mt[b4, mt[b4, b4]])]),
        B.add(neg[cmul(27, mt[b6, b6])], cmul(9, mt[b2, mt[b4, b6]])),
    )
    smooth = delta != 0

    counts = np.ones(a1.shape, dtype=np.int64)  # point at infinity
    if field.p == 2:
        tr = field.np_trace_table
        inv_t = B.inv_t
        for x in field.elements():
            x2 = field.mul(x, x)
            x3 = field.mul(x2, x)
            fx = B.add(B.add(B.add(x3, mt[a2, x2]), mt[a4, x]), a6)
            h = B.add(mt[a1, x], a3)
            ih = inv_t[h]
            u = mt[fx, mt[ih, ih]]
            counts += np.where(h == 0, 1, 2 * (1 - tr[u].astype(np.int64)))
    else:
        sc = field.np_sqrt_count_table
        for x in field.elements():
            x2 = field.mul(x, x)
            x3 = field.mul(x2, x)
            fx = B.add(B.add(B.add(x3, mt[a2, x2]), mt[a4, x]), a6)
            h = B.add(mt[a1, x], a3)
            d = B.add(mt[h, h], mt[B.scalar(4), fx])
            counts += sc[d]
    return smooth, counts


def batch_hyperelliptic_odd_counts(field: gf.Field, f_cols, ext: int = 1):
    """c(ext) for arrays of binary-form coefficients (odd characteristic)."""
    import numpy as np

    E = _ext_field(field, ext)
    emb = gf.embed_array(field, E)
    cols = [emb[c] for c in _as_cols(np, f_cols)]
    B = BatchGF(E)
    sc = E.np_sqrt_count_table
    counts = sc[cols[-1]].astype(np.int64)  # chart-2 fiber at u = 0
    for x in E.elements():
        counts += sc[B.poly_eval(cols, x)]
    return counts


def batch_hyperelliptic_odd_squarefree(field: gf.Field, f_cols, genus: int,
                                       scan_depth: int | None = None):
    """Squarefree-and-degree mask via singular-point scan over the
    extensions that can carry a repeated root (degree <= g+1).

    scan_depth truncates the scan for callers that handle high-degree
    repeated factors separately (the full-enumeration builders mark the
    few c*m(x)^2 codes directly instead of scanning F_{q^3})."""
    import numpy as np

    cols = _as_cols(np, f_cols)
    deg_ok = (cols[-1] != 0) | (cols[-2] != 0)
    F = field
    fprime_scalars = [(i % F.p) for i in range(1, len(cols))]
    singular = np.zeros(cols[0].shape, dtype=bool)
    for d in range(1, (scan_depth or genus + 1) + 1):
        E = _ext_field(F, d)
        emb = gf.embed_array(F, E)
        ecols = [emb[c] for c in cols]
        B = BatchGF(E)
        dcols = [B.mul_t[s % E.p, c] for s, c in zip(fprime_scalars, ecols[1:])]
        for x in E.elements():
            fx = B.poly_eval(ecols, x)
            dfx = B.poly_eval(dcols, x)
            singular |= (fx == 0) & (dfx == 0)
    return deg_ok & ~singular


def batch_hyperelliptic_char2_counts(field: gf.Field, h_cols, f_cols, ext: int = 1):
    """c(ext) for (h, f) coefficient arrays in characteristic 2."""
    import numpy as np

    E = _ext_field(field, ext)
    emb = gf.embed_array(field, E)
    h = [emb[c] for c in _as_cols(np, h_cols)]
    f = [emb[c] for c in _as_cols(np, f_cols)]
    B = BatchGF(E)
    tr = E.np_trace_table
    inv_t = B.inv_t

    def fiber(hx, fx):
        ih = inv_t[hx]
        u = B.mul_t[fx, B.mul_t[ih, ih]]
        return np.where(hx == 0, 1, 2 * (1 - tr[u].astype(np.int64)))

    counts = fiber(h[-1], f[-1])  # chart-2 fiber at u = 0
    for x in E.elements():
        counts += fiber(B.poly_eval(h, x), B.poly_eval(f, x))
    return counts


def batch_hyperelliptic_char2_smooth(field: gf.Field, h_cols, f_cols, genus: int):
    """Chart-wise smoothness mask: no common root of (h, h'^2 f + f'^2)
    in the extensions of degree <= deg h, and the u = 0 check."""
    import numpy as np

    h = _as_cols(np, h_cols)
    f = _as_cols(np, f_cols)
    nonzero_h = np.zeros(h[0].shape, dtype=bool)
    for c in h:
        nonzero_h |= c != 0
    singular = np.zeros(h[0].shape, dtype=bool)
    for d in range(1, genus + 2):
        E = _ext_field(field, d)
        emb = gf.embed_array(field, E)
        he = [emb[c] for c in h]
        fe = [emb[c] for c in f]
        B = BatchGF(E)
        # in characteristic 2: h' keeps odd-degree coefficients only
        hp = [he[i] if i % 2 == 1 else np.zeros_like(he[i]) for i in range(1, len(he))]
        fp = [fe[i] if i % 2 == 1 else np.zeros_like(fe[i]) for i in range(1, len(fe))]
        for x in E.elements():
            hx = B.poly_eval(he, x)
            if not (hx == 0).any():
                continue
            hpx = B.poly_eval(hp, x)
            fpx = B.poly_eval(fp, x)
            fx = B.poly_eval(fe, x)
            w = B.mul_t[B.mul_t[hpx, hpx], fx] ^ B.mul_t[fpx, fpx]
            singular |= (hx == 0) & (w == 0)
    # chart 2 at u = 0: h~(0) = top h coeff, h~'(0) = next one, etc.
    B = BatchGF(field)
    ht0, ht1 = h[-1], h[-2]
    ft0, ft1 = f[-1], f[-2]
    w_inf = B.mul_t[B.mul_t[ht1, ht1], ft0] ^ B.mul_t[ft1, ft1]
    singular |= (ht0 == 0) & (w_inf == 0)
    return nonzero_h & ~singular
