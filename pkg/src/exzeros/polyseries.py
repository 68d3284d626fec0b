"""Exact polynomials, rational functions, truncated Laurent series and Newton polygons.

Coefficients are F_q codes (see :mod:`exzeros.gfq`) held in int64 numpy arrays.

Valuation convention: v(theta) = -1, so a Laurent series in 1/x is stored by
its ``order`` (the lowest power of 1/x present, i.e. its valuation) and a
``prec``: the value is known modulo terms of valuation >= prec.
"""

from fractions import Fraction
import itertools
import math

import numpy as np

from . import _kernels


def _as_arr(c):
    return np.asarray(c, dtype=np.int64)


def _trim(c):
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return c[:0].copy()
    return c[: nz[-1] + 1].copy()


def _in_prime_subfield(field, *arrays):
    return field.is_prime or all(a.size == 0 or int(a.max()) < field.p for a in arrays)


# ---------------------------------------------------------------------------
# univariate polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Dense polynomial over F_q in one variable; ``c[i]`` is the coefficient of x^i."""

    __slots__ = ("field", "c", "var")

    def __init__(self, field, coeffs, var="theta"):
        self.field = field
        self.c = _trim(_as_arr(coeffs).ravel())
        self.var = var

    # construction
    @classmethod
    def zero(cls, field, var="theta"):
        return cls(field, [], var)

    @classmethod
    def one(cls, field, var="theta"):
        return cls(field, [1], var)

    @classmethod
    def x(cls, field, var="theta"):
        return cls(field, [0, 1], var)

    @classmethod
    def monomial(cls, field, n, coeff=1, var="theta"):
        c = np.zeros(n + 1, dtype=np.int64)
        c[n] = coeff
        return cls(field, c, var)

    @classmethod
    def from_terms(cls, field, terms, var="theta"):
        """terms: mapping exponent -> code (codes of equal exponents are added)."""
        if not terms:
            return cls.zero(field, var)
        top = max(terms)
        c = np.zeros(top + 1, dtype=np.int64)
        for e, v in terms.items():
            c[e] = field.add(int(c[e]), int(v))
        return cls(field, c, var)

    # basic properties
    @property
    def deg(self):
        return self.c.size - 1  # -1 for the zero polynomial

    def is_zero(self):
        return self.c.size == 0

    def is_one(self):
        return self.c.size == 1 and self.c[0] == 1

    @property
    def lead(self):
        return int(self.c[-1]) if self.c.size else 0

    def coeff(self, i):
        return int(self.c[i]) if 0 <= i < self.c.size else 0

    def valuation_at_zero(self):
        nz = np.flatnonzero(self.c)
        return int(nz[0]) if nz.size else None

    def _check(self, other):
        if self.field != other.field:
            raise ValueError("polynomials over different fields")
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    def _new(self, c):
        return Poly(self.field, c, self.var)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.var == other.var and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash((self.var, self.c.tobytes()))

    # arithmetic
    def __add__(self, other):
        if isinstance(other, int):
            other = Poly(self.field, [other % self.field.p], self.var)
        self._check(other)
        n = max(self.c.size, other.c.size)
        a = np.zeros(n, dtype=np.int64)
        b = np.zeros(n, dtype=np.int64)
        a[: self.c.size] = self.c
        b[: other.c.size] = other.c
        return self._new(self.field.vadd(a, b))

    __radd__ = __add__

    def __neg__(self):
        return self._new(self.field.vneg(self.c))

    def __sub__(self, other):
        if isinstance(other, int):
            other = Poly(self.field, [other % self.field.p], self.var)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, code):
        return self._new(self.field.vmul(self.c, np.int64(code)))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other % self.field.p)
        if hasattr(other, "code") and not isinstance(other, Poly):
            return self.scale(other.code)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return self._new([])
        return self._new(self.field.conv(self.c, other.c))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.one(self.field, self.var)
        base = self
        # p-th powers are cheap: Frobenius on coefficients and spread exponents
        while n:
            n, digit = divmod(n, self.field.p)
            for _ in range(digit):
                result = result * base
            if n:
                base = base.frobenius_power()
        return result

    def frobenius_power(self):
        """self**p computed as sum c_i^p x^{ip}."""
        p = self.field.p
        if self.is_zero():
            return self
        out = np.zeros(self.deg * p + 1, dtype=np.int64)
        out[::p] = self.field.frobenius_table[self.c]
        return self._new(out)

    def derivative(self):
        if self.c.size <= 1:
            return self._new([])
        i = np.arange(1, self.c.size) % self.field.p
        return self._new(self.field.vmul(self.c[1:], i))

    def substitute_power(self, m):
        """x -> x^m."""
        if m < 1:
            raise ValueError("exponent must be >= 1")
        if self.is_zero():
            return self
        out = np.zeros(self.deg * m + 1, dtype=np.int64)
        out[::m] = self.c
        return self._new(out)

    def evaluate(self, x):
        """Value at a field code, or composition when x is a Poly."""
        if isinstance(x, Poly):
            result = Poly.zero(x.field, x.var)
            for coef in self.c[::-1]:
                result = result * x + Poly(x.field, [coef], x.var)
            return result
        code = x.code if hasattr(x, "code") else int(x)
        f = self.field
        acc = 0
        for coef in self.c[::-1]:
            acc = f.add(f.mul(acc, code), int(coef))
        return acc

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.lead))

    def divmod(self, other):
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        if self.deg < other.deg:
            return self._new([]), self
        inv_lead = f.inv(other.lead)
        if _in_prime_subfield(f, self.c, other.c):
            q, r = _kernels.divmod_mod(self.c.copy(), other.c.copy(), f.p, inv_lead)
            return self._new(q), self._new(r)
        r = self.c.copy()
        b = other.c
        db = b.size - 1
        quot = np.zeros(r.size - db, dtype=np.int64)
        for k in range(r.size - 1 - db, -1, -1):
            c = f.mul(int(r[k + db]), inv_lead)
            if c:
                quot[k] = c
                r[k : k + db + 1] = f.vsub(r[k : k + db + 1], f.vmul(b, np.int64(c)))
        return self._new(quot), self._new(r[:db])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("division is not exact")
        return q

    # output
    def terms(self):
        return [(int(i), int(self.c[i])) for i in np.flatnonzero(self.c)]

    def to_text(self):
        if self.is_zero():
            return "0"
        parts = []
        for e, code in reversed(self.terms()):
            cs = self.field.format_code(code)
            if e == 0:
                parts.append(cs)
                continue
            mono = self.var if e == 1 else f"{self.var}^{e}"
            parts.append(mono if code == 1 else f"{cs}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly({self.to_text()})"

    def to_json(self):
        return {"var": self.var, "coeffs": [int(v) for v in self.c]}


def poly_gcd(a, b):
    """Monic gcd over F_q."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a, b):
    """(g, s, t) with s*a + t*b = g monic."""
    r0, r1 = a, b
    s0, s1 = Poly.one(a.field, a.var), Poly.zero(a.field, a.var)
    t0, t1 = Poly.zero(a.field, a.var), Poly.one(a.field, a.var)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = r0.field.inv(r0.lead)
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


# ---------------------------------------------------------------------------
# rational functions in theta
# ---------------------------------------------------------------------------


class RationalFunction:
    """Reduced fraction num/den over F_q with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduced=False):
        if den is None:
            den = Poly.one(num.field, num.var)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            g = poly_gcd(num, den)
            if not g.is_one():
                num = num.exact_div(g)
                den = den.exact_div(g)
            inv = num.field.inv(den.lead)
            if inv != 1:
                num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def field(self):
        return self.num.field

    @classmethod
    def from_int(cls, field, n, var="theta"):
        return cls(Poly(field, [n % field.p], var), _reduced=False)

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, Poly):
            other = RationalFunction(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction(other)
        if isinstance(other, int):
            return RationalFunction.from_int(self.field, other, self.num.var)
        raise TypeError(type(other))

    def __add__(self, other):
        o = self._coerce(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        g = poly_gcd(self.den, o.den)
        d1 = self.den.exact_div(g)
        d2 = o.den.exact_div(g)
        return RationalFunction(self.num * d2 + o.num * d1, self.den * d2)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        g1 = poly_gcd(self.num, o.den) if not self.num.is_zero() else o.den
        g2 = poly_gcd(o.num, self.den) if not o.num.is_zero() else self.den
        n = self.num.exact_div(g1) * o.num.exact_div(g2) if not (self.num.is_zero() or o.num.is_zero()) else Poly.zero(self.field, self.num.var)
        d = (self.den.exact_div(g2)) * (o.den.exact_div(g1))
        return RationalFunction(n, d)

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        return self * self._coerce(other).inv()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inv()

    def __pow__(self, n):
        if n < 0:
            return self.inv() ** (-n)
        return RationalFunction(self.num**n, self.den**n, _reduced=True)

    def valuation(self):
        """v_infinity: deg den - deg num (None for zero)."""
        if self.is_zero():
            return None
        return self.den.deg - self.num.deg

    def to_laurent(self, prec):
        """Expansion in 1/theta, known to valuation ``prec``."""
        if self.is_zero():
            return PrecLaurent.zero(self.field, prec)
        n = PrecLaurent.from_poly(self.num, prec)
        d = PrecLaurent.from_poly(self.den, prec + max(self.num.deg, 0))
        return (n * d.inv()).truncate(prec)

    def to_text(self):
        if self.den.is_one():
            return self.num.to_text()
        return f"({self.num.to_text()}) / ({self.den.to_text()})"

    def __repr__(self):
        return f"RationalFunction({self.to_text()})"

    def to_json(self):
        return {"num": self.num.to_json()["coeffs"], "den": self.den.to_json()["coeffs"]}


# ---------------------------------------------------------------------------
# bivariate polynomials in (t, theta)
# ---------------------------------------------------------------------------


def _trim2(c):
    rows = np.flatnonzero(c.any(axis=1))
    cols = np.flatnonzero(c.any(axis=0))
    if rows.size == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return c[: rows[-1] + 1, : cols[-1] + 1].copy()


class BiPoly:
    """Dense element of F_q[t, theta]; ``c[a, b]`` is the coefficient of t^a theta^b."""

    __slots__ = ("field", "c")

    def __init__(self, field, c):
        self.field = field
        c = _as_arr(c)
        if c.ndim != 2:
            c = c.reshape(-1, 1) if c.size else np.zeros((0, 0), dtype=np.int64)
        self.c = _trim2(c)

    @classmethod
    def from_terms(cls, field, terms):
        """terms: iterable of (t_exp, theta_exp, code); repeated monomials are added."""
        terms = list(terms)
        if not terms:
            return cls(field, np.zeros((0, 0), dtype=np.int64))
        ta = max(t[0] for t in terms) + 1
        tb = max(t[1] for t in terms) + 1
        c = np.zeros((ta, tb), dtype=np.int64)
        for a, b, v in terms:
            c[a, b] = field.add(int(c[a, b]), int(v))
        return cls(field, c)

    @classmethod
    def one(cls, field):
        return cls(field, np.ones((1, 1), dtype=np.int64))

    @classmethod
    def from_poly_t(cls, p):
        return cls(p.field, p.c.reshape(-1, 1))

    @classmethod
    def from_poly_theta(cls, p):
        return cls(p.field, p.c.reshape(1, -1))

    @classmethod
    def from_theta_coeffs(cls, coeffs):
        """Polynomial in t whose coefficients are Polys in theta."""
        field = coeffs[0].field
        width = max((c.c.size for c in coeffs), default=0)
        arr = np.zeros((len(coeffs), max(width, 1)), dtype=np.int64)
        for i, c in enumerate(coeffs):
            arr[i, : c.c.size] = c.c
        return cls(field, arr)

    def is_zero(self):
        return self.c.size == 0

    @property
    def deg_t(self):
        return self.c.shape[0] - 1

    @property
    def deg_theta(self):
        return self.c.shape[1] - 1

    def total_degree(self):
        if self.is_zero():
            return -1
        a, b = np.nonzero(self.c)
        return int((a + b).max())

    def terms(self):
        """(t_exp, theta_exp, code) sorted by descending (total degree, t-degree)."""
        a, b = np.nonzero(self.c)
        order = np.lexsort((-a, -(a + b)))
        return [(int(a[i]), int(b[i]), int(self.c[a[i], b[i]])) for i in order]

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash((self.c.shape, self.c.tobytes()))

    def _pad(self, shape):
        out = np.zeros(shape, dtype=np.int64)
        out[: self.c.shape[0], : self.c.shape[1]] = self.c
        return out

    def __add__(self, other):
        if isinstance(other, int):
            other = BiPoly(self.field, np.full((1, 1), other % self.field.p))
        shape = (max(self.c.shape[0], other.c.shape[0]), max(self.c.shape[1], other.c.shape[1]))
        return BiPoly(self.field, self.field.vadd(self._pad(shape), other._pad(shape)))

    __radd__ = __add__

    def __neg__(self):
        return BiPoly(self.field, self.field.vneg(self.c))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, code):
        return BiPoly(self.field, self.field.vmul(self.c, np.int64(code)))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other % self.field.p)
        if self.is_zero() or other.is_zero():
            return BiPoly(self.field, np.zeros((0, 0), dtype=np.int64))
        f = self.field
        rows = self.c.shape[0] + other.c.shape[0] - 1
        if _in_prime_subfield(f, self.c, other.c):
            return BiPoly(f, _kernels.conv2d_trunc_mod(self.c, other.c, f.p, rows))
        cols = self.c.shape[1] + other.c.shape[1] - 1
        out = np.zeros((rows, cols), dtype=np.int64)
        for i in range(self.c.shape[0]):
            if not self.c[i].any():
                continue
            for k in range(other.c.shape[0]):
                if other.c[k].any():
                    prod = f.conv(self.c[i], other.c[k])
                    out[i + k, : prod.size] = f.vadd(out[i + k, : prod.size], prod)
        return BiPoly(f, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = BiPoly.one(self.field)
        for _ in range(n):
            result = result * self
        return result

    def swap(self):
        """f(t, theta) -> f(theta, t)."""
        return BiPoly(self.field, self.c.T)

    def derivative_t(self):
        if self.c.shape[0] <= 1:
            return BiPoly(self.field, np.zeros((0, 0), dtype=np.int64))
        i = (np.arange(1, self.c.shape[0]) % self.field.p)[:, None]
        return BiPoly(self.field, self.field.vmul(self.c[1:], i))

    def substitute_t_power(self, m):
        """t -> t^m."""
        if self.is_zero():
            return self
        out = np.zeros((self.deg_t * m + 1, self.c.shape[1]), dtype=np.int64)
        out[::m] = self.c
        return BiPoly(self.field, out)

    def substitute_theta_power(self, m):
        if self.is_zero():
            return self
        out = np.zeros((self.c.shape[0], self.deg_theta * m + 1), dtype=np.int64)
        out[:, ::m] = self.c
        return BiPoly(self.field, out)

    def frobenius_power(self):
        """self**p: coefficients to the p-th power, both exponents times p."""
        p = self.field.p
        out = np.zeros((self.deg_t * p + 1, self.deg_theta * p + 1), dtype=np.int64)
        out[::p, ::p] = self.field.frobenius_table[self.c]
        return BiPoly(self.field, out)

    def monomial_map(self, mt, mth, var="theta"):
        """Univariate image under t -> x^mt, theta -> x^mth."""
        a, b = np.nonzero(self.c)
        if a.size == 0:
            return Poly.zero(self.field, var)
        e = a * mt + b * mth
        out = np.zeros(int(e.max()) + 1, dtype=np.int64)
        vals = self.c[a, b]
        if _in_prime_subfield(self.field, vals):
            out = _kernels.scatter_add_mod(e, vals, self.field.p, out.size)
        else:
            for ei, v in zip(e, vals):
                out[ei] = self.field.add(int(out[ei]), int(v))
        return Poly(self.field, out, var)

    def t_coeffs(self):
        """Coefficients of t^0..t^deg as Polys in theta."""
        return [Poly(self.field, row, "theta") for row in self.c]

    def theta_coeffs(self):
        return [Poly(self.field, col, "t") for col in self.c.T]

    def eval_t(self, x):
        """Substitute t := x (a field code or a Poly in theta); result a Poly in theta."""
        coeffs = self.t_coeffs()
        if isinstance(x, Poly):
            result = Poly.zero(self.field, "theta")
            for c in reversed(coeffs):
                result = result * x + c
            return result
        return self._eval_axis0(x.code if hasattr(x, "code") else int(x))

    def _eval_axis0(self, code):
        f = self.field
        acc = np.zeros(max(self.c.shape[1], 0), dtype=np.int64)
        for row in self.c[::-1]:
            acc = f.vadd(f.vmul(acc, np.int64(code)), row)
        return Poly(f, acc, "theta")

    def eval_theta(self, code):
        """Substitute theta := field element; result a Poly in t."""
        img = self.swap()._eval_axis0(code.code if hasattr(code, "code") else int(code))
        return Poly(self.field, img.c, "t")

    def is_monic_in_theta(self):
        if self.is_zero():
            return False
        col = self.c[:, -1]
        return col[0] == 1 and not col[1:].any()

    def coeffs_in_prime_field(self):
        return self.is_zero() or int(self.c.max()) < self.field.p

    def to_text(self):
        if self.is_zero():
            return "0"
        parts = []
        for a, b, code in self.terms():
            mono = []
            if a:
                mono.append("t" if a == 1 else f"t^{a}")
            if b:
                mono.append("theta" if b == 1 else f"theta^{b}")
            cs = self.field.format_code(code)
            if not mono:
                parts.append(cs)
            elif code == 1:
                parts.append("*".join(mono))
            else:
                parts.append(cs + "*" + "*".join(mono))
        return " + ".join(parts)

    def __repr__(self):
        return f"BiPoly({self.to_text()})"

    def to_json(self):
        out = self.field.header()
        out["terms"] = [{"c": int(code) if self.field.e == 1 else list(self.field.coords(code)), "t": a, "theta": b} for a, b, code in self.terms()]
        return out

    @classmethod
    def from_json(cls, field, obj):
        terms = []
        for term in obj["terms"]:
            c = term["c"]
            code = field.code(c) if isinstance(c, list) else int(c)
            terms.append((term["t"], term["theta"], code))
        return cls.from_terms(field, terms)


# ---------------------------------------------------------------------------
# multivariate polynomials in (t_1, ..., t_s, theta)
# ---------------------------------------------------------------------------


class MultiPoly:
    """Sparse element of F_q[t_1..t_s, theta]; keys are exponent tuples of length s+1."""

    __slots__ = ("field", "s", "terms")

    def __init__(self, field, s, terms):
        self.field = field
        self.s = s
        self.terms = {tuple(int(x) for x in k): int(v) for k, v in terms.items() if v}
        for k in self.terms:
            if len(k) != s + 1 or min(k) < 0:
                raise ValueError(f"bad exponent tuple {k}")

    @classmethod
    def constant(cls, field, s, code=1):
        return cls(field, s, {(0,) * (s + 1): code})

    @classmethod
    def theta(cls, field, s):
        return cls(field, s, {(0,) * s + (1,): 1})

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.s == other.s and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        f = self.field
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = f.add(out.get(k, 0), v)
        return MultiPoly(f, self.s, out)

    def __neg__(self):
        return MultiPoly(self.field, self.s, {k: self.field.neg(v) for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        f = self.field
        if isinstance(other, int):
            c = other % f.p
            return MultiPoly(f, self.s, {k: f.mul(v, c) for k, v in self.terms.items()})
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = f.add(out.get(k, 0), f.mul(v1, v2))
        return MultiPoly(f, self.s, out)

    __rmul__ = __mul__

    def is_zero(self):
        return not self.terms

    def deg_theta(self):
        return max((k[-1] for k in self.terms), default=-1)

    def theta_coeff(self, b):
        """Coefficient of theta^b as a MultiPoly (theta exponent 0)."""
        return MultiPoly(self.field, self.s, {k[:-1] + (0,): v for k, v in self.terms.items() if k[-1] == b})

    def rho(self):
        """Lowest total t-degree of a monomial (infinity for zero)."""
        if not self.terms:
            return math.inf
        return min(sum(k[:-1]) for k in self.terms)

    def is_symmetric(self):
        # the transposition (0 1) and the cycle (0 1 ... s-1) generate S_s
        if self.s < 2:
            return True
        n = self.s
        gens = [lambda k: (k[1], k[0]) + k[2:], lambda k: k[1:n] + k[:1]]
        for g in gens:
            for k, v in self.terms.items():
                if self.terms.get(g(k[:-1]) + (k[-1],), 0) != v:
                    return False
        return True

    def is_monic_in_theta(self):
        r = self.deg_theta()
        lead = self.theta_coeff(r)
        return lead.terms == {(0,) * (self.s + 1): 1}

    def set_variables_zero(self, indices):
        """Substitute t_i = 0 for i in indices (0-based); keeps the variable count."""
        idx = list(indices)
        return MultiPoly(self.field, self.s, {k: v for k, v in self.terms.items() if all(k[i] == 0 for i in idx)})

    def drop_variables(self, keep):
        """Restrict to variables in ``keep`` (others must not occur)."""
        out = {}
        for k, v in self.terms.items():
            if any(k[i] for i in range(self.s) if i not in keep):
                raise ValueError("dropped variable occurs")
            out[tuple(k[i] for i in keep) + (k[-1],)] = v
        return MultiPoly(self.field, len(keep), out)

    def extend_variables(self, s):
        return MultiPoly(self.field, s, {k[:-1] + (0,) * (s - self.s) + (k[-1],): v for k, v in self.terms.items()})

    def specialize(self, powers):
        """t_i -> t^{powers[i]}; returns a BiPoly in (t, theta)."""
        if len(powers) != self.s:
            raise ValueError("need one exponent per variable")
        return BiPoly.from_terms(self.field, [(sum(e * m for e, m in zip(k[:-1], powers)), k[-1], v) for k, v in self.terms.items()])

    def to_text(self):
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda k: (-k[-1], -sum(k[:-1]), [-x for x in k[:-1]]))
        parts = []
        for k in keys:
            mono = [f"t{i+1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(k[:-1]) if e]
            if k[-1]:
                mono.append("theta" + (f"^{k[-1]}" if k[-1] > 1 else ""))
            cs = self.field.format_code(self.terms[k])
            if not mono:
                parts.append(cs)
            elif self.terms[k] == 1:
                parts.append("*".join(mono))
            else:
                parts.append(cs + "*" + "*".join(mono))
        return " + ".join(parts)

    def __repr__(self):
        return f"MultiPoly(s={self.s}: {self.to_text()})"

    def to_json(self):
        out = self.field.header()
        out["s"] = self.s
        keys = sorted(self.terms, key=lambda k: (-k[-1], [-x for x in k[:-1]]))
        out["terms"] = [{"c": self.terms[k], "t": list(k[:-1]), "theta": k[-1]} for k in keys]
        return out


def elementary_symmetric(field, s, m):
    """e_m(t_1..t_s) as a MultiPoly."""
    terms = {}
    for idx in itertools.combinations(range(s), m):
        k = [0] * (s + 1)
        for i in idx:
            k[i] = 1
        terms[tuple(k)] = 1
    return MultiPoly(field, s, terms)


def sigma_s(field, s, m):
    """Sum over disjoint J_1, ..., J_d in {1..s}, |J_u| = m_u, of prod_u prod_{i in J_u} t_i^u."""
    if sum(m) > s:
        return MultiPoly(field, s, {})
    # place the exponent-u variables one group at a time
    partial = [((0,) * s, frozenset(range(s)))]
    for u, mu in enumerate(m, start=1):
        nxt = []
        for k, free in partial:
            for idx in itertools.combinations(sorted(free), mu):
                kk = list(k)
                for i in idx:
                    kk[i] = u
                nxt.append((tuple(kk), free - set(idx)))
        partial = nxt
    return MultiPoly(field, s, {k + (0,): 1 for k, _ in partial})


# ---------------------------------------------------------------------------
# truncated Laurent series in 1/x
# ---------------------------------------------------------------------------


class PrecisionError(ArithmeticError):
    pass


class PrecLaurent:
    """sum_i coeffs[i] * x^-(order+i) + O(x^-prec).

    ``order`` is the valuation of the first stored coefficient (v(x) = -1).
    Leading zeros are stripped, so a nonzero leading coefficient means the
    valuation is exactly ``order``; an empty coefficient list means the value is
    zero to the stated precision (and then order == prec).
    """

    __slots__ = ("field", "order", "prec", "coeffs", "var")

    def __init__(self, field, order, prec, coeffs, var="1/theta"):
        coeffs = _as_arr(coeffs).ravel()
        n = prec - order
        if n < 0:
            raise ValueError("precision below order")
        if coeffs.size > n:
            coeffs = coeffs[:n]
        elif coeffs.size < n:
            coeffs = np.concatenate([coeffs, np.zeros(n - coeffs.size, dtype=np.int64)])
        nz = np.flatnonzero(coeffs)
        if nz.size == 0:
            order, coeffs = prec, coeffs[:0]
        elif nz[0] > 0:
            order += int(nz[0])
            coeffs = coeffs[nz[0] :]
        self.field = field
        self.order = int(order)
        self.prec = int(prec)
        self.coeffs = coeffs.copy()
        self.var = var

    @classmethod
    def zero(cls, field, prec, var="1/theta"):
        return cls(field, prec, prec, [], var)

    @classmethod
    def one(cls, field, prec, var="1/theta"):
        return cls(field, 0, prec, [1], var)

    @classmethod
    def from_poly(cls, p, prec, var="1/theta"):
        """A polynomial in x viewed in F_q((1/x))."""
        if p.is_zero():
            return cls.zero(p.field, prec, var)
        order = -p.deg
        if prec < order:
            return cls(p.field, prec, prec, [], var)
        return cls(p.field, order, prec, p.c[::-1], var)

    @classmethod
    def monomial(cls, field, valuation, prec, code=1, var="1/theta"):
        if valuation >= prec:
            return cls.zero(field, prec, var)
        return cls(field, valuation, prec, [code], var)

    def is_zero(self):
        return self.coeffs.size == 0

    @property
    def valuation(self):
        return None if self.is_zero() else self.order

    def coeff(self, v):
        """Coefficient of x^-v; raises if v is beyond the known precision."""
        if v >= self.prec:
            raise PrecisionError(f"coefficient at valuation {v} unknown (prec {self.prec})")
        i = v - self.order
        return int(self.coeffs[i]) if 0 <= i < self.coeffs.size else 0

    def dense(self, start, stop):
        """Coefficients at valuations start..stop-1 (stop <= prec)."""
        if stop > self.prec:
            raise PrecisionError("requested range beyond precision")
        out = np.zeros(max(stop - start, 0), dtype=np.int64)
        lo = max(start, self.order)
        hi = min(stop, self.order + self.coeffs.size)
        if hi > lo:
            out[lo - start : hi - start] = self.coeffs[lo - self.order : hi - self.order]
        return out

    def truncate(self, prec):
        prec = min(prec, self.prec)
        return PrecLaurent(self.field, min(self.order, prec), prec, self.coeffs, self.var)

    def _check(self, other):
        if self.field != other.field or self.var != other.var:
            raise ValueError("incompatible series")

    def __add__(self, other):
        if isinstance(other, int):
            other = PrecLaurent(self.field, 0, self.prec, [other % self.field.p], self.var) if self.prec > 0 else PrecLaurent.zero(self.field, self.prec, self.var)
        self._check(other)
        prec = min(self.prec, other.prec)
        order = min(self.order, other.order, prec)
        a = self.dense(order, prec)
        b = other.dense(order, prec)
        return PrecLaurent(self.field, order, prec, self.field.vadd(a, b), self.var)

    __radd__ = __add__

    def __neg__(self):
        return PrecLaurent(self.field, self.order, self.prec, self.field.vneg(self.coeffs), self.var)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, code):
        return PrecLaurent(self.field, self.order, self.prec, self.field.vmul(self.coeffs, np.int64(code)), self.var)

    def shift(self, m):
        """Multiply by x^m (lowers valuation and precision by m)."""
        return PrecLaurent(self.field, self.order - m, self.prec - m, self.coeffs, self.var)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other % self.field.p)
        if isinstance(other, Poly):
            other = PrecLaurent.from_poly(other, self.prec - self.order - max(other.deg, 0), self.var)
        self._check(other)
        # an exactly-zero factor still only pins the product to the other's precision
        prec = min(self.prec + other.order, other.prec + self.order)
        order = self.order + other.order
        if self.is_zero() or other.is_zero() or prec <= order:
            return PrecLaurent.zero(self.field, prec, self.var)
        n = prec - order
        prod = self.field.conv(self.coeffs[:n], other.coeffs[:n])
        return PrecLaurent(self.field, order, prec, prod[:n], self.var)

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("series is zero to its precision")
        f = self.field
        n = self.prec - self.order  # relative precision
        a = self.coeffs[:n]
        inv0 = f.inv(int(a[0]))
        # Newton iteration b <- b(2 - ab) doubles the known length
        b = np.array([inv0], dtype=np.int64)
        k = 1
        while k < n:
            k = min(2 * k, n)
            ab = f.conv(a[:k], b)[:k]
            two_minus = f.vneg(ab)
            two_minus[0] = f.add(int(two_minus[0]), 2 % f.p)
            b = f.conv(b, two_minus)[:k]
        return PrecLaurent(f, -self.order, n - self.order, b, self.var)

    def __truediv__(self, other):
        if isinstance(other, int):
            return self.scale(self.field.inv(other % self.field.p))
        return self * other.inv()

    def __pow__(self, n):
        if n < 0:
            return self.inv() ** (-n)
        if n == 0:
            return PrecLaurent.one(self.field, self.prec - self.order, self.var)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def agrees_with(self, other):
        """Equality on the common precision."""
        prec = min(self.prec, other.prec)
        lo = min(self.order, other.order, prec)
        return np.array_equal(self.dense(lo, prec), other.dense(lo, prec))

    def __eq__(self, other):
        if not isinstance(other, PrecLaurent):
            return NotImplemented
        return self.prec == other.prec and self.order == other.order and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.order, self.prec, self.coeffs.tobytes()))

    def to_json(self):
        return {"var": self.var, "order": self.order, "prec": self.prec, "coeffs": [int(c) for c in self.coeffs]}

    def to_text(self, max_terms=None):
        x = self.var.split("/")[-1]
        parts = []
        for i, code in enumerate(self.coeffs):
            if max_terms is not None and len(parts) >= max_terms:
                parts.append("...")
                break
            if code:
                v = self.order + i
                mono = "1" if v == 0 else (f"{x}^{-v}" if v < 0 else f"{x}^-{v}")
                cs = self.field.format_code(int(code))
                parts.append(mono if (code == 1 and v != 0) else (cs if v == 0 else f"{cs}*{mono}"))
        parts.append(f"O({x}^-{self.prec})")
        return " + ".join(parts)

    def __repr__(self):
        return f"PrecLaurent({self.to_text(8)})"


class LambdaLaurent:
    """sum_{i < q-1} lambda^i * comps[i] with lambda^(q-1) = -theta."""

    __slots__ = ("field", "comps")

    def __init__(self, field, comps):
        n = field.q - 1
        comps = list(comps)
        if len(comps) != n:
            raise ValueError(f"need {n} graded components")
        self.field = field
        self.comps = comps

    @classmethod
    def from_grade(cls, field, grade, x):
        n = field.q - 1
        comps = [None] * n
        comps[grade % n] = x
        out = cls(field, comps)
        # lambda^n = -theta folds higher grades down
        for _ in range(grade // n):
            out = out._times_minus_theta()
        return out

    @classmethod
    def lam(cls, field, prec):
        """lambda itself (for q = 2 this is -theta)."""
        return cls.from_grade(field, 1, PrecLaurent.one(field, prec))

    def _times_minus_theta(self):
        return LambdaLaurent(self.field, [None if c is None else (-c).shift(1) for c in self.comps])

    @property
    def prec(self):
        return min(c.prec for c in self.comps if c is not None)

    def grade(self, i):
        return self.comps[i]

    def __add__(self, other):
        comps = []
        for a, b in zip(self.comps, other.comps):
            if a is None:
                comps.append(b)
            elif b is None:
                comps.append(a)
            else:
                comps.append(a + b)
        return LambdaLaurent(self.field, comps)

    def __neg__(self):
        return LambdaLaurent(self.field, [None if c is None else -c for c in self.comps])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        n = self.field.q - 1
        if isinstance(other, (PrecLaurent, int)):
            return LambdaLaurent(self.field, [None if c is None else c * other for c in self.comps])
        comps = [None] * n
        for i, a in enumerate(self.comps):
            if a is None:
                continue
            for j, b in enumerate(other.comps):
                if b is None:
                    continue
                prod = a * b
                if i + j >= n:
                    prod = (-prod).shift(1)
                k = (i + j) % n
                comps[k] = prod if comps[k] is None else comps[k] + prod
        return LambdaLaurent(self.field, comps)

    __rmul__ = __mul__

    def inv(self):
        """Inverse of a single-grade element."""
        n = self.field.q - 1
        live = [i for i, c in enumerate(self.comps) if c is not None and not c.is_zero()]
        if len(live) != 1:
            raise ArithmeticError("only homogeneous elements are inverted")
        i = live[0]
        x = self.comps[i].inv()
        if i == 0:
            return LambdaLaurent.from_grade(self.field, 0, x)
        # lambda^-i = lambda^(n-i) / (-theta)
        y = (-x).shift(-1)
        return LambdaLaurent.from_grade(self.field, n - i, y)

    def __pow__(self, m):
        if m < 0:
            return self.inv() ** (-m)
        result = None
        base = self
        while m:
            if m & 1:
                result = base if result is None else result * base
            m >>= 1
            if m:
                base = base * base
        if result is None:
            return LambdaLaurent.from_grade(self.field, 0, PrecLaurent.one(self.field, self.prec))
        return result

    def agrees_with(self, other):
        for a, b in zip(self.comps, other.comps):
            if a is None and b is None:
                continue
            if a is None:
                a = PrecLaurent.zero(self.field, b.prec)
            if b is None:
                b = PrecLaurent.zero(self.field, a.prec)
            if not a.agrees_with(b):
                return False
        return True

    def to_json(self):
        return {"grades": [None if c is None else c.to_json() for c in self.comps]}

    def __repr__(self):
        return "LambdaLaurent(" + ", ".join(f"l^{i}: {c!r}" for i, c in enumerate(self.comps) if c is not None) + ")"


# ---------------------------------------------------------------------------
# Newton polygons
# ---------------------------------------------------------------------------


class NewtonPolygon:
    """Lower convex hull of points (abscissa, valuation)."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        self.vertices = [(int(x), Fraction(v)) for x, v in vertices]

    @classmethod
    def from_points(cls, points):
        pts = {}
        for x, v in points:
            if v is None or v == math.inf:
                continue
            v = Fraction(v)
            if x not in pts or v < pts[x]:
                pts[x] = v
        if not pts:
            raise ValueError("Newton polygon of an empty point set")
        hull = []
        for x in sorted(pts):
            pt = (x, pts[x])
            while len(hull) >= 2:
                (x1, v1), (x2, v2) = hull[-2], hull[-1]
                # drop the middle point unless it lies strictly below the chord
                if (v2 - v1) * (pt[0] - x1) >= (pt[1] - v1) * (x2 - x1):
                    hull.pop()
                else:
                    break
            hull.append(pt)
        return cls(hull)

    def segments(self):
        """List of (slope, width)."""
        out = []
        for (x1, v1), (x2, v2) in zip(self.vertices, self.vertices[1:]):
            out.append((Fraction(v2 - v1, 1) / (x2 - x1), x2 - x1))
        return out

    def slopes(self):
        return [s for s, _ in self.segments()]

    def root_valuations(self):
        """(valuation, multiplicity) of roots: a slope s segment of width w gives w roots of valuation -s."""
        return [(-s, w) for s, w in self.segments()]

    def __eq__(self, other):
        return isinstance(other, NewtonPolygon) and self.vertices == other.vertices

    def to_json(self):
        return {"vertices": [[x, _frac_json(v)] for x, v in self.vertices]}

    def __repr__(self):
        return "NewtonPolygon(" + ", ".join(f"({x},{v})" for x, v in self.vertices) + ")"


def _frac_json(v):
    v = Fraction(v)
    return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def newton_polygon(points):
    return NewtonPolygon.from_points(points)


def polygon_in_t(f):
    """Newton polygon of a BiPoly viewed as a polynomial in t over K_infinity."""
    pts = []
    for a, row in enumerate(f.c):
        nz = np.flatnonzero(row)
        if nz.size:
            pts.append((a, -int(nz[-1])))
    return NewtonPolygon.from_points(pts)


# ---------------------------------------------------------------------------
# square-freeness in t over F_q(theta)
# ---------------------------------------------------------------------------


def _content(coeffs):
    g = Poly.zero(coeffs[0].field, "theta")
    for c in coeffs:
        if not c.is_zero():
            g = poly_gcd(g, c) if not g.is_zero() else c.monic()
            if g.deg == 0:
                break
    return g


def _primitive(coeffs):
    g = _content(coeffs)
    if g.deg <= 0:
        lead = g.lead if not g.is_zero() else 1
        inv = coeffs[0].field.inv(lead)
        return [c.scale(inv) for c in coeffs]
    return [c.exact_div(g) for c in coeffs]


def _strip(coeffs):
    while coeffs and coeffs[-1].is_zero():
        coeffs = coeffs[:-1]
    return coeffs


def _prem(a, b):
    """Pseudo-remainder of a by b (lists of theta-Polys, ascending in t)."""
    a = list(a)
    lb = b[-1]
    db = len(b) - 1
    while a and len(a) - 1 >= db:
        la = a[-1]
        shift = len(a) - 1 - db
        a = [c * lb for c in a]
        for i, bc in enumerate(b):
            a[shift + i] = a[shift + i] - bc * la
        a = _strip(a)
    return a


def _gcd_coeffs_in_t(a, b):
    """Primitive gcd over F_q(theta) of coefficient lists (theta-Polys ascending in t)."""
    a, b = _strip(a), _strip(b)
    if not b:
        return _primitive(a) if a else a
    if not a:
        return _primitive(b)
    if len(a) < len(b):
        a, b = b, a
    a, b = _primitive(a), _primitive(b)
    while b:
        r = _strip(_prem(a, b))
        if not r:
            return b
        a, b = b, _primitive(r)
    return a


def gcd_degree_in_t(f, g):
    """t-degree of gcd(f, g) over F_q(theta) via a primitive remainder sequence."""
    return len(_gcd_coeffs_in_t(f.t_coeffs(), g.t_coeffs())) - 1


def _squarefree_specialised(f):
    """Certificate: some theta -> c in F_q keeps the t-degree and gives a squarefree image."""
    field = f.field
    lead = Poly(field, f.c[-1], "theta")
    for c in range(field.q):
        if lead.evaluate(c) == 0:
            continue
        img = f.eval_theta(c)
        d = img.derivative()
        if d.is_zero():
            continue
        if poly_gcd(img, d).deg == 0:
            return True
    return False


def squarefree_in_t(f):
    """True iff f has no repeated factor of positive t-degree over F_q(theta).

    A repeated irreducible factor divides f, df/dt and df/dtheta; conversely a
    common factor of all three would be a p-th power.  This also covers f in t^p.
    """
    if f.is_zero():
        raise ValueError("zero polynomial")
    if f.deg_t <= 0:
        return True
    df = f.derivative_t()
    if not df.is_zero() and _squarefree_specialised(f):
        return True
    g = _gcd_coeffs_in_t(f.t_coeffs(), df.t_coeffs())
    if len(g) <= 1:
        return True
    dth = f.swap().derivative_t().swap()
    return len(_gcd_coeffs_in_t(g, dth.t_coeffs())) <= 1
