"""Exact finite-field and truncated unramified-Witt arithmetic.

F = F_{p^k} with k = f.  Elements are int encodings e = sum d_i p^i where
(d_0, ..., d_{k-1}) are the coordinates in the power basis {1, x, ..., x^{k-1}}
modulo the deterministic minimal irreducible: the lexicographically smallest
monic irreducible of degree k over F_p (candidates ordered by the integer
whose base-p digits are the non-leading coefficients).  The chosen polynomial
is part of every report fingerprint.

O_K/p^N (unramified, degree f) uses the same basis with the coefficients of
the minimal polynomial lifted verbatim to [0, p); elements are coordinate
tuples mod p^N.

Multiplication is table-driven: full flat tables for q <= 169, Zech
logarithms above that.  Addition is a flat table when small, digit arithmetic
otherwise.
"""

from __future__ import annotations

from .errors import NotAUnit


def _poly_mulmod(a, b, g, p):
    # a, b, g lists; g the non-leading coeffs of a monic degree-k modulus
    k = len(g)
    prod = [0] * (2 * k - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for i in range(2 * k - 2, k - 1, -1):
        c = prod[i]
        if c:
            prod[i] = 0
            for t in range(k):
                if g[t]:
                    prod[i - k + t] = (prod[i - k + t] - c * g[t]) % p
    return prod[:k]


def _poly_powmod(a, n, g, p):
    k = len(g)
    r = [1] + [0] * (k - 1)
    base = list(a)
    while n:
        if n & 1:
            r = _poly_mulmod(r, base, g, p)
        base = _poly_mulmod(base, base, g, p)
        n >>= 1
    return r


def _is_irreducible(g, p):
    """Monic degree-k polynomial with non-leading coeffs g irreducible over F_p."""
    k = len(g)
    x = [0, 1] if k > 1 else [0]
    if k == 1:
        return True
    # x^(p^k) == x mod g, and gcd(x^(p^(k/l)) - x, g) = 1 for prime l | k
    xq = list(x)
    for _ in range(k):
        xq = _poly_powmod(xq, p, g, p)
    if xq != x + [0] * (k - 2):
        return False
    for ell in _prime_divisors(k):
        xe = list(x)
        for _ in range(k // ell):
            xe = _poly_powmod(xe, p, g, p)
        diff = [(u - v) % p for u, v in zip(xe, x + [0] * (k - 2))]
        if _poly_gcd_is_one(diff, g, p) is False:
            return False
    return True


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _poly_gcd_is_one(a, g, p):
    # gcd of a (deg < k) with the monic modulus given by non-leading coeffs g
    k = len(g)
    b = g + [1]
    a = list(a)
    while any(a):
        # b mod a
        da = max(i for i, c in enumerate(a) if c)
        lead_inv = pow(a[da], p - 2, p)
        b = list(b)
        for i in range(len(b) - 1, da - 1, -1):
            c = b[i]
            if c:
                fac = c * lead_inv % p
                for t in range(da + 1):
                    b[i - da + t] = (b[i - da + t] - fac * a[t]) % p
        b = b[:da] or [0]
        a, b = b, a
    # gcd is b (up to scalar)
    db = [i for i, c in enumerate(b) if c]
    return db == [0]


def minimal_irreducible(p, k):
    """Non-leading coefficients of the first monic irreducible of degree k."""
    for m in range(p**k):
        g = []
        mm = m
        for _ in range(k):
            g.append(mm % p)
            mm //= p
        if k > 1 and g[0] == 0:
            continue  # divisible by x
        if _is_irreducible(g, p):
            return tuple(g)
    raise ArithmeticError("no irreducible found (unreachable)")


_FIELD_CACHE = {}


class Fq:
    """F_{p^k} with int-encoded elements."""

    def __new__(cls, p, k):
        key = (p, k)
        hit = _FIELD_CACHE.get(key)
        if hit is not None:
            return hit
        self = super().__new__(cls)
        self._init(p, k)
        _FIELD_CACHE[key] = self
        return self

    def _init(self, p, k):
        self.p = p
        self.k = k
        self.q = q = p**k
        self.g_coeffs = g = minimal_irreducible(p, k)

        def digits(e):
            out = []
            for _ in range(k):
                out.append(e % p)
                e //= p
            return out

        def enc(poly):
            e = 0
            for c in reversed(poly):
                e = e * p + c % p
            return e

        self._digits = digits
        self._enc = enc

        # generator and log/exp tables
        fact = _prime_divisors(q - 1)
        gen = None
        for cand in range(2, q):
            cd = digits(cand)
            if all(enc(_poly_powmod(cd, (q - 1) // ell, list(g), p)) != 1 for ell in fact):
                gen = cand
                break
        if gen is None:
            raise ArithmeticError("no generator (unreachable)")
        self.generator = gen
        EXP = [1] * (q - 1)
        gd = digits(gen)
        cur = [1] + [0] * (k - 1)
        for n in range(1, q - 1):
            cur = _poly_mulmod(cur, gd, list(g), p)
            EXP[n] = enc(cur)
        LOG = [0] * q
        for n, e in enumerate(EXP):
            LOG[e] = n
        self.EXP = EXP
        self.LOG = LOG

        def add_digitwise(a, b):
            e = 0
            mul = 1
            for _ in range(k):
                e += ((a + b) % p) * mul
                a //= p
                b //= p
                mul *= p
            return e

        if q <= 169:
            ADD = [0] * (q * q)
            MUL = [0] * (q * q)
            for a in range(q):
                for b in range(a, q):
                    s = add_digitwise(a, b)
                    ADD[a * q + b] = s
                    ADD[b * q + a] = s
            for a in range(1, q):
                la = LOG[a]
                for b in range(a, q):
                    m = EXP[(la + LOG[b]) % (q - 1)]
                    MUL[a * q + b] = m
                    MUL[b * q + a] = m
            self.add = lambda a, b: ADD[a * q + b]
            self.mul = lambda a, b: MUL[a * q + b]
        else:
            self.add = add_digitwise
            qm = q - 1

            def mul(a, b):
                if a == 0 or b == 0:
                    return 0
                return EXP[(LOG[a] + LOG[b]) % qm]

            self.mul = mul

        NEG = [0] * q
        for a in range(q):
            NEG[a] = enc([-d % p for d in digits(a)])
        self._NEG = NEG
        self.neg = lambda a: NEG[a]
        self.one = 1
        self.zero = 0

    def sub(self, a, b):
        return self.add(a, self._NEG[b])

    def inv(self, a):
        if a == 0:
            raise NotAUnit("0 has no inverse")
        return self.EXP[(self.q - 1 - self.LOG[a]) % (self.q - 1)]

    def pow(self, a, n):
        if a == 0:
            if n < 0:
                raise NotAUnit("0 has no inverse")
            return 1 if n == 0 else 0
        return self.EXP[(self.LOG[a] * n) % (self.q - 1)]

    def frob(self, a, j=1):
        """a^(p^j); j taken mod k."""
        if a == 0:
            return 0
        return self.EXP[(self.LOG[a] * pow(self.p, j % self.k, self.q - 1)) % (self.q - 1)]

    def scale_int(self, a, n):
        """n·a for an integer n (prime-field scalar)."""
        return self.mul(a, n % self.p)

    def from_int(self, n):
        return n % self.p

    def elem(self, e):
        return FElem(self, e % self.q)

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def coords(self, a):
        return tuple(self._digits(a))

    def from_coords(self, cs):
        return self._enc(list(cs))

    def __repr__(self):
        return f"Fq(p={self.p}, k={self.k})"


class FElem:
    """Thin operator wrapper over an int-encoded field element."""

    __slots__ = ("field", "e")

    def __init__(self, field, e):
        self.field = field
        self.e = e

    def __add__(self, other):
        return FElem(self.field, self.field.add(self.e, other.e))

    def __sub__(self, other):
        return FElem(self.field, self.field.sub(self.e, other.e))

    def __neg__(self):
        return FElem(self.field, self.field.neg(self.e))

    def __mul__(self, other):
        if isinstance(other, int):
            return FElem(self.field, self.field.scale_int(self.e, other))
        return FElem(self.field, self.field.mul(self.e, other.e))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FElem(self.field, self.field.mul(self.e, self.field.inv(other.e)))

    def __pow__(self, n):
        return FElem(self.field, self.field.pow(self.e, n))

    def __eq__(self, other):
        return isinstance(other, FElem) and self.field is other.field and self.e == other.e

    def __hash__(self):
        return hash((id(self.field), self.e))

    def __bool__(self):
        return self.e != 0

    def __repr__(self):
        return f"FElem({self.e})"


def witt_precision(p, D):
    """Digit count N for residue characteristic p at series cutoff D.

    One guard digit beyond what base-p exponent digit walks require.
    """
    D = max(D, 1)
    n = 0
    x = 1
    while x <= D:
        x *= p
        n += 1
    return n + 1  # floor(log_p D) + 2 == n + 1 since n = floor(log_p D) + 1


_WITT_CACHE = {}


class WittRing:
    """O_K/p^N: unramified degree-f extension truncated at p^N.

    Elements are coordinate tuples of length f mod p^N in the power basis,
    with the residue field's minimal polynomial lifted to integer
    coefficients in [0, p).
    """

    def __new__(cls, p, f, N):
        key = (p, f, N)
        hit = _WITT_CACHE.get(key)
        if hit is not None:
            return hit
        self = super().__new__(cls)
        self._init(p, f, N)
        _WITT_CACHE[key] = self
        return self

    def _init(self, p, f, N):
        self.p = p
        self.f = f
        self.N = N
        self.pN = p**N
        self.field = Fq(p, f)
        self.mod_coeffs = self.field.g_coeffs  # lifted verbatim
        self.zero = (0,) * f
        self.one = (1,) + (0,) * (f - 1)

    def add(self, a, b):
        pN = self.pN
        return tuple((x + y) % pN for x, y in zip(a, b))

    def sub(self, a, b):
        pN = self.pN
        return tuple((x - y) % pN for x, y in zip(a, b))

    def neg(self, a):
        pN = self.pN
        return tuple(-x % pN for x in a)

    def scale(self, c, a):
        pN = self.pN
        return tuple(c * x % pN for x in a)

    def mul(self, a, b):
        f = self.f
        pN = self.pN
        g = self.mod_coeffs
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        for i in range(2 * f - 2, f - 1, -1):
            c = prod[i] % pN
            if c:
                for t in range(f):
                    if g[t]:
                        prod[i - f + t] -= c * g[t]
        return tuple(x % pN for x in prod[:f])

    def pow(self, a, n):
        r = self.one
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def reduce_mod_p(self, a):
        """Residue-field encoding of a mod p."""
        p = self.p
        e = 0
        mul = 1
        for c in a:
            e += (c % p) * mul
            mul *= p
        return e

    def lift(self, e):
        """Field encoding -> coordinate tuple with digits in [0, p)."""
        return tuple(self.field.coords(e))

    def is_unit(self, a):
        return self.reduce_mod_p(a) != 0

    def inv(self, a):
        if not self.is_unit(a):
            raise NotAUnit(f"{a} not a unit")
        # Newton from the residue-field inverse
        x = self.lift(self.field.inv(self.reduce_mod_p(a)))
        prec = 1
        while prec < self.N:
            # x <- x(2 - a x)
            x = self.mul(x, self.sub(self.scale(2, self.one), self.mul(a, x)))
            prec *= 2
        return x

    def teichmuller(self, e):
        """Multiplicative lift of the field element with encoding e."""
        y = self.lift(e)
        for _ in range(self.N + 1):
            y2 = self.pow(y, self.field.q)
            if y2 == y:
                return y
            y = y2
        return y

    def unit_decompose(self, u):
        """u = [a0]·u1 with u1 = 1 mod p; returns (a0 encoding, u1 tuple)."""
        a0 = self.reduce_mod_p(u)
        if a0 == 0:
            raise NotAUnit("decomposition needs a unit")
        u1 = self.mul(u, self.inv(self.teichmuller(a0)))
        return a0, u1

    def elements_are_equal_mod(self, a, b, m):
        return all((x - y) % m == 0 for x, y in zip(a, b))

    def __repr__(self):
        return f"WittRing(p={self.p}, f={self.f}, N={self.N})"


def teichmuller(ring: WittRing, x: int):
    """Teichmuller lift of a residue-field element encoding in O_K/p^N."""
    return ring.teichmuller(x)


def zp_coordinates(ring: WittRing, y) -> tuple:
    """Coordinates of y in the power basis {1, x, ..., x^{f-1}} mod p^N."""
    return tuple(c % ring.pN for c in y)


def unit_decompose(ring: WittRing, u):
    return ring.unit_decompose(u)


def frobenius_power(field: Fq, a: int, j: int) -> int:
    """a^(p^j) on int encodings; j mod k."""
    return field.frob(a, j)
