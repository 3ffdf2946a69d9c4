"""Exact arithmetic for small finite fields F_q with q = p^f <= 2**20.

Field elements are plain ints in [0, q).  The code of an element is its
coefficient vector in the polynomial basis, packed in base p with the
constant coefficient least significant:

    code = c0 + c1*p + c2*p**2 + ... + c_{f-1}*p**(f-1)

so 0 and 1 are always the field's zero and one, and enumeration order is
integer-code order.  Elements carry no wrapper objects; all operations
are methods on the Field that owns them, which keeps inner loops cheap
and makes numpy table lookups trivial.

The modulus of F_{p^f} is the lexicographically least monic irreducible
polynomial of degree f over F_p (constant coefficient compared first),
recomputed deterministically, so two runs anywhere agree.  Fields of
size up to 2**16 get discrete-log/antilog tables (multiplication as
index addition); larger fields fall back to polynomial arithmetic.

Embeddings between fields of the same characteristic are built lazily
and cached per characteristic so that maps compose consistently along
towers: embed(a, c) == embed(b, c) o embed(a, b) whenever the degrees
are chained.  Prime-field embeddings are unique, and composite hops are
derived from a canonical chain through the largest intermediate field,
which removes any dependence on call order.
"""

from __future__ import annotations

import functools
from fractions import Fraction

from .errors import UnsupportedRangeError, ValidationError

SIZE_CAP = 2**20
_LOG_TABLE_CAP = 2**16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Factor n by trial division (n <= 2**20 here, so this is cheap)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# polynomial helpers over F_p; polys are tuples of ints, low degree first


def _poly_trim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _poly_mod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        top = a[-1] % p
        if top:
            shift = len(a) - 1 - dm
            for i in range(dm):
                a[shift + i] = (a[shift + i] - top * m[i]) % p
        a.pop()
    return _poly_trim(a)

def _poly_mulmod(a, b, m, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(out, m, p)


def _poly_powmod(a, e, m, p):
    r = (1,)
    while e:
        if e & 1:
            r = _poly_mulmod(r, a, m, p)
        a = _poly_mulmod(a, a, m, p)
        e >>= 1
    return r


def _poly_divmod(a, b, p):
    a = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and _poly_trim(a):
        da = len(a) - 1
        if da < db:
            break
        c = (a[-1] * inv_lead) % p
        q[da - db] = c
        for i in range(db + 1):
            a[da - db + i] = (a[da - db + i] - c * b[i]) % p
        a = list(_poly_trim(a))
        if not a:
            break
    return _poly_trim(q), _poly_trim(a)


def _poly_is_irreducible(m, p):
    """Exhaustive trial division by every monic polynomial of degree
    <= deg(m)//2, after a root scan.  Fine for deg <= 20 at this scale."""
    deg = len(m) - 1
    if deg == 1:
        return True
    for r in range(p):
        acc = 0
        for c in reversed(m):
            acc = (acc * r + c) % p
        if acc == 0:
            return False
    for d in range(2, deg // 2 + 1):
        for code in range(p**d):
            div = _digits(code, p, d) + (1,)
            _, rem = _poly_divmod(m, div, p)
            if not rem:
                return False
    return True


def _digits(code, p, length):
    out = []
    for _ in range(length):
        out.append(code % p)
        code //= p
    return tuple(out)


def _least_irreducible(p, f):
    """Lexicographically least monic irreducible of degree f over F_p,
    comparing the coefficient list (c0, ..., c_{f-1}) left to right."""
    if f == 1:
        return (0, 1)  # x
    for vec in _lex_vectors(p, f):
        cand = vec + (1,)
        if _poly_is_irreducible(cand, p):
            return cand
    raise AssertionError("no irreducible polynomial found")  # unreachable


def _lex_vectors(p, f):
    idx = [0] * f
    total = p**f
    for _ in range(total):
        yield tuple(idx)
        for i in range(f - 1, -1, -1):
            idx[i] += 1
            if idx[i] < p:
                break
            idx[i] = 0


class Field:
    """A finite field F_q, q = p^f, with elements coded as ints in [0, q).

    Immutable after construction; safe to share across workers.
    """

    def __init__(self, p: int, f: int):
        if not is_prime(p):
            raise ValidationError(f"characteristic {p} is not prime")
        if f < 1:
            raise ValidationError("extension degree must be >= 1")
        q = p**f
        if q > SIZE_CAP:
            raise UnsupportedRangeError(f"field size {q} exceeds cap {SIZE_CAP}")
        self.p = p
        self.f = f
        self.q = q
        self.modulus = _least_irreducible(p, f)
        # reduction of x^f, used by mul: x^f = -(m0 + m1 x + ... ) mod m
        self._xf = tuple((-c) % p for c in self.modulus[:f])
        self._log = None
        self._exp = None
        if q <= _LOG_TABLE_CAP:
            self._build_log_tables()
        self.generator = self._find_generator()
        # contract: the generator really has order q-1
        if self.pow(self.generator, q - 1) != 1:
            raise AssertionError("generator order check failed")
        if q > 2 and any(
            self.pow(self.generator, (q - 1) // ell) == 1
            for ell in factorize(q - 1)
        ):
            raise AssertionError("generator is not primitive")

    # -- representation ----------------------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        return _digits(a, self.p, self.f)

    def from_coeffs(self, cs) -> int:
        code = 0
        for c in reversed(list(cs)):
            code = code * self.p + (c % self.p)
        return code

    def elements(self):
        """All q elements, in deterministic coefficient-lex order."""
        return range(self.q)

    def __repr__(self):
        return f"Field(p={self.p}, f={self.f})"

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.f) == (other.p, other.f)

    def __hash__(self):
        return hash((self.p, self.f))

    # -- scalar arithmetic --------------------------------------------------

    def add(self, a: int, b: int) -> int:
        p = self.p
        if p == 2:
            return a ^ b
        code, mult = 0, 1
        for _ in range(self.f):
            code += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return code

    def neg(self, a: int) -> int:
        p = self.p
        if p == 2:
            return a
        code, mult = 0, 1
        for _ in range(self.f):
            code += ((-a) % p) * mult
            a //= p
            mult *= p
        return code

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self._log is not None:
            if a == 0 or b == 0:
                return 0
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._mul_poly(a, b)

    def _mul_poly(self, a, b):
        p, f = self.p, self.f
        da = _digits(a, p, f)
        db = _digits(b, p, f)
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(da):
            if ai:
                for j, bj in enumerate(db):
                    prod[i + j] += ai * bj
        # reduce degrees >= f using x^f = self._xf
        for k in range(2 * f - 2, f - 1, -1):
            c = prod[k] % p
            if c:
                for i, xi in enumerate(self._xf):
                    prod[k - f + i] += c * xi
            prod[k] = 0
        code, mult = 0, 1
        for i in range(f):
            code += (prod[i] % p) * mult
            mult *= p
        return code

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 has no negative powers")
            return 0
        if self._log is not None:
            return self._exp[(self._log[a] * e) % (self.q - 1)]
        e %= self.q - 1
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverting 0")
        if self._log is not None:
            return self._exp[(-self._log[a]) % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def absolute_trace(self, a: int) -> int:
        """Trace down to the prime field F_p, returned as an int in [0, p)."""
        t, cur = 0, a
        for _ in range(self.f):
            t = self.add(t, cur)
            cur = self.frobenius(cur)
        # the trace lies in the prime field, whose codes are 0..p-1
        assert t < self.p
        return t

    # -- tables --------------------------------------------------------------

    def _build_log_tables(self):
        p, f, q = self.p, self.f, self.q
        # candidate generators in enumeration order; use poly mul directly
        for g in range(1, q):
            seen_order = self._order_poly(g)
            if seen_order == q - 1:
                exp = [1] * (q - 1)
                log = [0] * q
                cur = 1
                for i in range(q - 1):
                    exp[i] = cur
                    log[cur] = i
                    cur = self._mul_poly(cur, g)
                assert cur == 1
                self._exp = exp
                self._log = log
                self._gen = g
                return
        raise AssertionError("no generator found")

    def _order_poly(self, a):
        n = self.q - 1
        order = n
        for ell, _ in factorize(n).items():
            while order % ell == 0:
                r = 1
                e = order // ell
                b = a
                ee = e
                while ee:
                    if ee & 1:
                        r = self._mul_poly(r, b)
                    b = self._mul_poly(b, b)
                    ee >>= 1
                if r == 1:
                    order //= ell
                else:
                    break
        return order

    def _find_generator(self):
        if self._log is not None:
            return self._gen
        n = self.q - 1
        primes = list(factorize(n))
        for g in range(2, self.q):
            if all(self.pow(g, n // ell) != 1 for ell in primes):
                return g
        raise AssertionError("no generator found")

    # numpy table kit for batch evaluation (the characteristic-2 packed
    # path and the odd-characteristic table path of the enumeration loops)

    @functools.cached_property
    def np_mul_table(self):
        import numpy as np

        if self.q > 2**11:
            raise UnsupportedRangeError("mul table only built for q <= 2048")
        t = np.zeros((self.q, self.q), dtype=np.uint32)
        for a in range(self.q):
            for b in range(a, self.q):
                v = self.mul(a, b)
                t[a, b] = v
                t[b, a] = v
        return t

    @functools.cached_property
    def np_add_table(self):
        import numpy as np

        if self.p == 2:
            raise AssertionError("char 2 addition is plain XOR; no table needed")
        if self.q > 2**11:
            raise UnsupportedRangeError("add table only built for q <= 2048")
        t = np.zeros((self.q, self.q), dtype=np.uint32)
        for a in range(self.q):
            for b in range(a, self.q):
                v = self.add(a, b)
                t[a, b] = v
                t[b, a] = v
        return t

    @functools.cached_property
    def np_neg_table(self):
        import numpy as np

        t = np.zeros(self.q, dtype=np.uint32)
        for a in range(self.q):
            t[a] = self.neg(a)
        return t

    @functools.cached_property
    def np_inv_table(self):
        import numpy as np

        t = np.zeros(self.q, dtype=np.uint32)
        for a in range(1, self.q):
            t[a] = self.inv(a)
        return t

    @functools.cached_property
    def np_sqrt_count_table(self):
        """Table v -> #{y : y^2 = v}; odd characteristic only."""
        import numpy as np

        if self.p == 2:
            raise AssertionError("use np_trace_table in characteristic 2")
        t = np.zeros(self.q, dtype=np.int64)
        for y in range(self.q):
            t[self.mul(y, y)] += 1
        return t

    @functools.cached_property
    def np_trace_table(self):
        """Table v -> absolute trace to F_2; characteristic 2 only."""
        import numpy as np

        assert self.p == 2
        t = np.zeros(self.q, dtype=np.uint8)
        for a in range(self.q):
            t[a] = self.absolute_trace(a)
        return t

    def np_pow_table(self, e):
        import numpy as np

        t = np.zeros(self.q, dtype=np.uint32)
        for a in range(self.q):
            t[a] = self.pow(a, e) if a else (1 if e == 0 else 0)
        return t


@functools.lru_cache(maxsize=None)
def make_field(p: int, f: int) -> Field:
    """Deterministic field constructor; cached so Field identity is stable."""
    return Field(p, f)


# ---------------------------------------------------------------------------
# compatible embeddings


def _all_roots(modulus, dst: Field):
    """All roots of `modulus` in dst, sorted by element code.

    Roots lie in the subfield of matching degree, so only its elements
    are scanned (reached through the multiplicative generator).
    """
    deg = len(modulus) - 1
    sub_q = dst.p**deg
    step = (dst.q - 1) // (sub_q - 1)
    candidates = [0] + sorted(
        {dst.pow(dst.generator, k * step) for k in range(sub_q - 1)}
    )
    roots = []
    for x in candidates:
        acc = 0
        for c in reversed(modulus):
            acc = dst.add(dst.mul(acc, x), c % dst.p)
        if acc == 0:
            roots.append(x)
    return roots


def _horner_image(src: Field, dst: Field, root: int, a: int) -> int:
    acc = 0
    for c in reversed(src.coeffs(a)):
        acc = dst.add(dst.mul(acc, root), c)
    return acc


@functools.lru_cache(maxsize=None)
def _prime_step_root(p: int, s: int, n: int) -> int:
    """Chosen image in F_{p^n} of the modulus root of F_{p^s}, n/s prime.

    The choice is the smallest root compatible with every elementary
    diamond (d; d*l, s; n) sitting under this edge, which is what makes
    composite embeddings independent of the chain they are built along.
    At this size cap each edge carries at most one such constraint, and
    a compatible root always exists because the candidate images sweep
    the full conjugate set.
    """
    src = make_field(p, s)
    dst = make_field(p, n)
    ell = n // s
    roots = _all_roots(src.modulus, dst)
    if len(roots) != s:
        raise AssertionError("conjugate count mismatch in embedding step")
    targets = []
    x_codes = {}
    for ell2 in sorted(factorize(s)):
        if ell2 <= ell:
            continue
        d = s // ell2
        if d == 1:
            continue  # prime-field compatibility is automatic
        a = d * ell
        x_d = p  # code of the polynomial-basis root x of F_{p^d} (d >= 2)
        img_in_s = _embed_table(p, d, s)[x_d]
        want = _embed_table(p, a, n)[_embed_table(p, d, a)[x_d]]
        targets.append((img_in_s, want))
    for r in roots:
        ok = True
        for img_in_s, want in targets:
            if _horner_image(src, dst, r, img_in_s) != want:
                ok = False
                break
        if ok:
            return r
    raise AssertionError(
        f"no diamond-compatible embedding root for degrees {s}|{n}"
    )


@functools.lru_cache(maxsize=None)
def _prime_step_table(p, s, n):
    src = make_field(p, s)
    dst = make_field(p, n)
    if s == 1:
        return tuple(range(p))
    root = _prime_step_root(p, s, n)
    return tuple(_horner_image(src, dst, root, a) for a in range(src.q))


@functools.lru_cache(maxsize=None)
def _embed_table(p, fs, fd):
    if fs == fd:
        return tuple(range(make_field(p, fs).q))
    primes = []
    for ell, mult in sorted(factorize(fd // fs).items()):
        primes.extend([ell] * mult)
    chain = [fs]
    for ell in primes:
        chain.append(chain[-1] * ell)
    table = list(range(make_field(p, fs).q))
    for s, n in zip(chain, chain[1:]):
        step = _prime_step_table(p, s, n)
        table = [step[x] for x in table]
    return tuple(table)


def embed(src: Field, dst: Field):
    """Ring embedding F_{p^fs} -> F_{p^fd} as a lookup list of length q_src.

    Raises ValidationError when the degrees are incompatible.  Embeddings
    compose consistently: embed(a, c)[x] == embed(b, c)[embed(a, b)[x]]
    for any tower a -> b -> c.
    """
    if src.p != dst.p:
        raise ValidationError("embeddings require equal characteristic")
    if dst.f % src.f != 0:
        raise ValidationError(
            f"no embedding: degree {src.f} does not divide {dst.f}"
        )
    return _embed_table(src.p, src.f, dst.f)


def embed_array(src: Field, dst: Field):
    """The embedding table as a numpy array for batch coefficient mapping."""
    import numpy as np

    return np.asarray(embed(src, dst), dtype=np.uint32)
