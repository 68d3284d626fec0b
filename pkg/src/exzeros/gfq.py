"""Finite fields F_q, q = p^e, with table-driven arithmetic.

An element is stored as an integer code in ``[0, q)``: the code of
``c_0 + c_1 u + ... + c_{e-1} u^{e-1}`` is ``sum c_i p^i``.  In particular the
prime subfield F_p consists of the codes ``0 .. p-1`` and those codes are the
residues themselves.  Vectorised arithmetic on arrays of codes goes through
the precomputed ``add``/``mul`` tables, which is fast for the small q this
package targets.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
import itertools

import numpy as np

from . import _kernels

# Conway polynomials, ascending coefficients.  Part of the external interface:
# printed elements depend on the modulus, so defaults must never change.
CONWAY = {
    2: (2, 1, (1, 1)),
    3: (3, 1, (1, 1)),
    4: (2, 2, (1, 1, 1)),
    5: (5, 1, (3, 1)),
    7: (7, 1, (4, 1)),
    8: (2, 3, (1, 1, 0, 1)),
    9: (3, 2, (2, 2, 1)),
    16: (2, 4, (1, 1, 0, 0, 1)),
    25: (5, 2, (2, 4, 1)),
    27: (3, 3, (1, 2, 0, 1)),
}

MAX_TABLE_Q = 1024


class FieldError(ValueError):
    pass


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# --- tiny helpers for polynomials over F_p as tuples (used for the modulus) ---


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = _trim(a)
    m = _trim(m)
    inv = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a = _trim(a)
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pgcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base, n, m, p):
    result = [1]
    base = _pmod(base, m, p)
    while n:
        if n & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        n >>= 1
    return result


def is_irreducible_fp(f, p):
    """Rabin's test for a monic polynomial over F_p (ascending coefficients)."""
    f = _trim(f)
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    # x^(p^n) == x mod f
    xp = x
    for _ in range(n):
        xp = _ppowmod(xp, p, f, p)
    if _trim([(a - b) % p for a, b in itertools.zip_longest(xp, x, fillvalue=0)]):
        return False
    prime_divisors = [r for r in range(2, n + 1) if n % r == 0 and is_prime(r)]
    for r in prime_divisors:
        xp = x
        for _ in range(n // r):
            xp = _ppowmod(xp, p, f, p)
        diff = _trim([(a - b) % p for a, b in itertools.zip_longest(xp, x, fillvalue=0)])
        if len(_pgcd(f, diff, p)) != 1:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """F_q as F_p[u]/(modulus)."""

    p: int
    e: int
    modulus: tuple

    @property
    def q(self):
        return self.p**self.e

    @property
    def is_prime(self):
        return self.e == 1

    def __repr__(self):
        return f"FieldSpec(q={self.q}, modulus={list(self.modulus)})"

    # ----- codes <-> coordinates -----

    def coords(self, code):
        out = []
        for _ in range(self.e):
            code, c = divmod(code, self.p)
            out.append(c)
        return tuple(out)

    def code(self, coords):
        coords = list(coords) + [0] * (self.e - len(coords))
        if len(coords) > self.e:
            raise FieldError(f"too many coordinates for F_{self.q}")
        val = 0
        for c in reversed(coords):
            val = val * self.p + (c % self.p)
        return val

    @cached_property
    def _coord_matrix(self):
        codes = np.arange(self.q)
        return np.stack([(codes // self.p**i) % self.p for i in range(self.e)], axis=1)

    def to_coords(self, arr):
        """Array of codes -> array with a trailing axis of F_p coordinates."""
        return self._coord_matrix[np.asarray(arr, dtype=np.int64)]

    def from_coords(self, c):
        weights = self.p ** np.arange(self.e, dtype=np.int64)
        return (np.asarray(c, dtype=np.int64) % self.p) @ weights

    # ----- tables -----

    def _mul_codes(self, a, b):
        prod = _pmul(list(self.coords(a)), list(self.coords(b)), self.p)
        return self.code(_pmod(prod, list(self.modulus), self.p) if prod else [])

    @cached_property
    def add_table(self):
        c = self._coord_matrix
        s = (c[:, None, :] + c[None, :, :]) % self.p
        return self.from_coords(s)

    @cached_property
    def neg_table(self):
        return self.from_coords((-self._coord_matrix) % self.p)

    @cached_property
    def mul_table(self):
        if self.is_prime:
            x = np.arange(self.p)
            return (x[:, None] * x[None, :]) % self.p
        q = self.q
        t = np.zeros((q, q), dtype=np.int64)
        for a in range(1, q):
            for b in range(a, q):
                t[a, b] = t[b, a] = self._mul_codes(a, b)
        return t

    @cached_property
    def inv_table(self):
        t = np.zeros(self.q, dtype=np.int64)
        rows, cols = np.nonzero(self.mul_table == 1)
        t[rows] = cols
        return t

    @cached_property
    def frobenius_table(self):
        return np.array([self._pow_code(a, self.p) for a in range(self.q)], dtype=np.int64)

    def _pow_code(self, a, n):
        result, base = 1, a
        while n:
            if n & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            n >>= 1
        return result

    # ----- scalar helpers on codes -----

    def add(self, a, b):
        return int(self.add_table[a, b])

    def sub(self, a, b):
        return int(self.add_table[a, self.neg_table[b]])

    def neg(self, a):
        return int(self.neg_table[a])

    def mul(self, a, b):
        return int(self.mul_table[a, b])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return int(self.inv_table[a])

    def from_int(self, n):
        """Image of the integer n in the prime subfield."""
        return n % self.p

    # ----- vectorised helpers on code arrays -----

    def vadd(self, a, b):
        if self.is_prime:
            return (a + b) % self.p
        return self.add_table[a, b]

    def vsub(self, a, b):
        if self.is_prime:
            return (a - b) % self.p
        return self.add_table[a, self.neg_table[b]]

    def vneg(self, a):
        if self.is_prime:
            return (-a) % self.p
        return self.neg_table[a]

    def vmul(self, a, b):
        if self.is_prime:
            return (a * b) % self.p
        return self.mul_table[a, b]

    def vsum(self, a, axis=0):
        """Sum of codes along an axis (coordinatewise addition)."""
        if self.is_prime:
            return np.sum(a, axis=axis) % self.p
        return self.from_coords(np.sum(self.to_coords(a), axis=axis) % self.p)

    def conv(self, a, b):
        """Product of two coefficient arrays (polynomial multiplication)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.size == 0 or b.size == 0:
            return np.zeros(0, dtype=np.int64)
        if self.is_prime or (a.max() < self.p and b.max() < self.p):
            return _kernels.conv_mod(a, b, self.p)
        ca, cb = self.to_coords(a), self.to_coords(b)
        e, p = self.e, self.p
        # coordinates of the product as a polynomial in u of degree <= 2e-2
        prod = np.zeros((2 * e - 1, a.size + b.size - 1), dtype=np.int64)
        for i in range(e):
            if not ca[:, i].any():
                continue
            for j in range(e):
                if cb[:, j].any():
                    prod[i + j] += _kernels.conv_mod(ca[:, i].copy(), cb[:, j].copy(), p)
        # reduce u^k, k >= e, using the monic modulus
        mod = self.modulus
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k] % p
            if c.any():
                for i in range(e):
                    prod[k - e + i] -= c * mod[i]
            prod[k] = 0
        return self.from_coords((prod[:e] % p).T)

    def matmul(self, a, b):
        """Matrix product of code matrices."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.is_prime or (a.max(initial=0) < self.p and b.max(initial=0) < self.p):
            return (a @ b) % self.p
        ca, cb = self.to_coords(a), self.to_coords(b)
        e, p = self.e, self.p
        prod = np.zeros((2 * e - 1,) + (a.shape[0], b.shape[1]), dtype=np.int64)
        for i in range(e):
            for j in range(e):
                prod[i + j] += (ca[..., i] @ cb[..., j]) % p
        mod = self.modulus
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k] % p
            for i in range(e):
                prod[k - e + i] -= c * mod[i]
            prod[k] = 0
        return self.from_coords(np.moveaxis(prod[:e] % p, 0, -1))

    def vpow(self, a, n):
        """Elementwise a**n for an array of codes (0**0 == 1)."""
        a = np.asarray(a, dtype=np.int64)
        result = np.ones_like(a)
        base = a.copy()
        while n:
            if n & 1:
                result = self.vmul(result, base)
            base = self.vmul(base, base)
            n >>= 1
        return result

    # ----- elements -----

    def __call__(self, value):
        if isinstance(value, FqElement):
            if value.field != self:
                raise FieldError("element of a different field")
            return value
        if isinstance(value, (list, tuple)):
            return FqElement(self, self.code(value))
        return FqElement(self, int(value) % self.p)

    def element(self, code):
        if not 0 <= code < self.q:
            raise FieldError(f"code {code} outside F_{self.q}")
        return FqElement(self, int(code))

    def zero(self):
        return FqElement(self, 0)

    def one(self):
        return FqElement(self, 1)

    def gen(self):
        """The class of u (the modulus root); equals a primitive-root lift for e=1."""
        if self.e == 1:
            return FqElement(self, (-self.modulus[0]) % self.p)
        return FqElement(self, self.p)

    def elements(self):
        return [FqElement(self, c) for c in range(self.q)]

    def format_code(self, code):
        if self.e == 1:
            return str(int(code))
        return "[" + ",".join(str(c) for c in self.coords(int(code))) + "]"

    def header(self):
        return {"q": self.q, "p": self.p, "modulus": list(self.modulus)}


@dataclass(frozen=True)
class FqElement:
    field: FieldSpec
    code: int

    @property
    def coords(self):
        return self.field.coords(self.code)

    def _other(self, other):
        if isinstance(other, FqElement):
            if other.field != self.field:
                raise FieldError("mixed fields")
            return other.code
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElement(self.field, self.field.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElement(self.field, self.field.sub(self.code, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElement(self.field, self.field.sub(o, self.code))

    def __neg__(self):
        return FqElement(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElement(self.field, self.field.mul(self.code, o))

    __rmul__ = __mul__

    def inv(self):
        return FqElement(self.field, self.field.inv(self.code))

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * FqElement(self.field, o).inv()

    def __pow__(self, n):
        if n < 0:
            return self.inv() ** (-n)
        return FqElement(self.field, self.field._pow_code(self.code, n))

    def frobenius(self):
        return FqElement(self.field, int(self.field.frobenius_table[self.code]))

    def is_zero(self):
        return self.code == 0

    def __bool__(self):
        return self.code != 0

    def __str__(self):
        return self.field.format_code(self.code)

    def __repr__(self):
        return f"FqElement({self}, q={self.field.q})"


def field_construct(p, e=1, modulus=None):
    """Validated F_{p^e}; the modulus defaults to the built-in Conway table."""
    if not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if e < 1:
        raise FieldError("extension degree must be >= 1")
    q = p**e
    if q > MAX_TABLE_Q:
        raise FieldError(f"q={q} exceeds the supported table size {MAX_TABLE_Q}")
    if modulus is None:
        if q not in CONWAY or CONWAY[q][:2] != (p, e):
            raise FieldError(f"no built-in modulus for q={q}; pass one explicitly")
        modulus = CONWAY[q][2]
    modulus = tuple(int(c) % p for c in modulus)
    if len(_trim(modulus)) != e + 1:
        raise FieldError(f"modulus must have degree {e}")
    if modulus[-1] != 1:
        raise FieldError("modulus must be monic")
    if not is_irreducible_fp(modulus, p):
        raise FieldError(f"modulus {list(modulus)} is reducible over F_{p}")
    return _cached_field(p, e, modulus)


@lru_cache(maxsize=None)
def _cached_field(p, e, modulus):
    return FieldSpec(p, e, modulus)


def field_from_q(q):
    """F_q from the Conway table."""
    if q not in CONWAY:
        raise FieldError(f"q={q} is not in the built-in table {sorted(CONWAY)}")
    p, e, mod = CONWAY[q]
    return field_construct(p, e, mod)


def prime_factor_power(q):
    """(p, e) with q = p^e, or raise."""
    for p in range(2, q + 1):
        if q % p == 0:
            e, m = 0, q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                raise FieldError(f"{q} is not a prime power")
            return p, e
    raise FieldError(f"{q} is not a prime power")


def enumerate_monic(field, d):
    """Monic polynomials of degree d as coefficient tuples (a_0, ..., a_{d-1}).

    Codes are yielded in lexicographic order of (a_0, ..., a_{d-1}) with a_0
    varying slowest, so the order is deterministic across runs.
    """
    if d < 0:
        raise ValueError("degree must be >= 0")
    yield from itertools.product(range(field.q), repeat=d)


def monic_array(field, d):
    """All q^d monic polynomials of degree d as a (q^d, d+1) array of codes."""
    q = field.q
    if d == 0:
        return np.ones((1, 1), dtype=np.int64)
    idx = np.arange(q**d, dtype=np.int64)
    cols = [(idx // q ** (d - 1 - i)) % q for i in range(d)]
    return np.stack(cols + [np.ones_like(idx)], axis=1)
