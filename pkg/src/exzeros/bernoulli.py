"""Carlitz factorials, Bernoulli-Carlitz numbers and their reductions mod primes of A."""

from dataclasses import dataclass
from functools import lru_cache
import itertools

import numpy as np

from .gfq import monic_array
from .lseries import ell, weighted_tuples
from .polyseries import Poly, PrecLaurent, RationalFunction, poly_xgcd
from .powersums import DEFAULT_BUDGET, BudgetExceeded, base_digits, binom_mod_p, digit_sum, multinomial_mod_p

BC_CAP = 64


# ---------------------------------------------------------------------------
# Carlitz data
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def bracket(k, field):
    """[k] = theta^{q^k} - theta."""
    th = Poly.x(field)
    return th ** (field.q**k) - th


@lru_cache(maxsize=None)
def carlitz_D(i, field):
    if i == 0:
        return Poly.one(field)
    return bracket(i, field) * carlitz_D(i - 1, field) ** field.q


@dataclass(frozen=True)
class CarlitzData:
    field: object

    def bracket(self, k):
        return bracket(k, self.field)

    def D(self, i):
        return carlitz_D(i, self.field)

    def ell(self, d):
        return ell(d, self.field)


def carlitz_factorial(N, field):
    """Pi(N) = prod_i D_i^{n_i} over the base-q digits n_i of N."""
    out = Poly.one(field)
    for i, ni in enumerate(base_digits(N, field.q)):
        if ni:
            out = out * carlitz_D(i, field) ** ni
    return out


def product_of_monics(d, field):
    """prod_{a in A_{+,d}} a (for checking D_d)."""
    out = Poly.one(field)
    for row in monic_array(field, d):
        out = out * Poly(field, row)
    return out


# ---------------------------------------------------------------------------
# Bernoulli-Carlitz numbers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _inverse_exp_coeffs(n_max, field):
    """c_0..c_{n_max} with sum c_n z^n = z / e_C(z), e_C(z) = sum_i z^{q^i}/D_i."""
    q = field.q
    c = [RationalFunction(Poly.one(field))]
    inv_D = []
    i = 1
    while q**i - 1 <= n_max:
        inv_D.append((q**i - 1, RationalFunction(Poly.one(field), carlitz_D(i, field))))
        i += 1
    for n in range(1, n_max + 1):
        acc = RationalFunction(Poly.zero(field))
        for shift, dinv in inv_D:
            if shift > n:
                break
            if not c[n - shift].is_zero():
                acc = acc + c[n - shift] * dinv
        c.append(-acc)
    return tuple(c)


def bc_series(n_max, field, cap=BC_CAP):
    """[BC_0, ..., BC_{n_max}] from the inverted Carlitz exponential."""
    if n_max > cap:
        raise BudgetExceeded(f"BC_n requested up to {n_max}; cap is {cap}")
    c = _inverse_exp_coeffs(n_max, field)
    return [cn * RationalFunction(carlitz_factorial(n, field)) for n, cn in enumerate(c)]


def bc_number(n, field, cap=BC_CAP):
    return bc_series(n, field, cap)[n]


def bc_via_BN(N, d, field, B=None, budget=DEFAULT_BUDGET):
    """BC_{q^d - N} = (-1)^r Pi(N) Pi(q^d - N) B_N(theta, theta^{q^d}) / prod_l prod_{n != l, n < d} (theta^{q^l} - theta^{q^n})^{n_l}."""
    from .bnpoly import compute_BN

    q = field.q
    digits = base_digits(N, q)
    if (N - 1) % (q - 1) or sum(digits) < q:
        raise ValueError("need N = 1 mod (q-1) and l_q(N) >= q")
    if q**d <= N or d < len(digits):
        raise ValueError("need q^d > N")
    res = compute_BN(N, field, budget=budget) if B is None else None
    poly = B if B is not None else res.poly
    r = (sum(digits) - q) // (q - 1)
    num = poly.monomial_map(1, q**d)
    th = Poly.x(field)
    den = Poly.one(field)
    for l, nl in enumerate(digits):
        if not nl:
            continue
        for n in range(d):
            if n != l:
                den = den * (th ** (q**l) - th ** (q**n)) ** nl
    val = RationalFunction(num * carlitz_factorial(N, field) * carlitz_factorial(q**d - N, field), den)
    return -val if r % 2 else val


# ---------------------------------------------------------------------------
# zeta values and powers of the period
# ---------------------------------------------------------------------------


def _binom_neg_mod_p(n, m, p):
    """binom(-n, m) mod p = (-1)^m binom(n + m - 1, m)."""
    v = binom_mod_p(n + m - 1, m, p)
    return v if m % 2 == 0 else (-v) % p


def zeta_layer(n, d, P, field):
    """sum_{a in A_{+,d}} a^{-n} to absolute precision P via the multinomial expansion of <a>^{-n}."""
    q, p = field.q, field.p
    base = d * n
    out = np.zeros(max(P - base, 0), dtype=np.int64)
    if d == 0:
        return PrecLaurent.one(field, P)
    for W in range(P - base):
        for k in weighted_tuples(d, W):
            if any(kj == 0 or kj % (q - 1) for kj in k):
                continue
            c = _binom_neg_mod_p(n, sum(k), p) * multinomial_mod_p(k, p) % p
            if c:
                out[W] = (out[W] + c) % p
    if d % 2:
        out = (-out) % p
    return PrecLaurent(field, base, P, out)


def zeta_layer_bruteforce(n, d, P, field):
    """sum_{a in A_{+,d}} a^{-n} by enumeration."""
    acc = PrecLaurent.zero(field, P)
    for row in monic_array(field, d):
        a = PrecLaurent.from_poly(Poly(field, row), P + (n + 1) * d + 1)
        acc = acc + (a.inv() ** n).truncate(P)
    return acc


def zeta_tail_onset(n, d, q):
    """Lower bound for the valuation of the degree-d layer of zeta_A(n)."""
    return d * n + (q - 1) * d * (d + 1) // 2


def zeta_numeric(n, P, field, D=None):
    """zeta_A(n) to absolute precision P, summing layers until the tail bound exceeds P."""
    q = field.q
    acc = PrecLaurent.zero(field, P)
    d = 0
    while zeta_tail_onset(n, d, q) < P:
        if D is not None and d > D:
            raise ArithmeticError(f"precision {P} not reached with degrees <= {D}")
        acc = acc + zeta_layer(n, d, P, field)
        d += 1
    return acc


def pi_q_minus_1(P, field):
    """pi~^{q-1} = -theta^q prod_{j>=1} (1 - theta^{1-q^j})^{-(q-1)} to precision P."""
    q = field.q
    work = P + q
    prod = PrecLaurent.one(field, work)
    j = 1
    while q**j - 1 < work:
        prod = prod * (PrecLaurent.one(field, work) - PrecLaurent.monomial(field, q**j - 1, work))
        j += 1
    return (-(prod.inv() ** (q - 1))).shift(q).truncate(P)


def pi_power(m, P, field):
    """pi~^m for (q-1) | m, to absolute precision P (grade 0)."""
    q = field.q
    if m % (q - 1):
        raise ValueError("m must be a multiple of q - 1")
    e = m // (q - 1)
    if e == 0:
        return PrecLaurent.one(field, P)
    # pi~^{q-1} has valuation -q; the power loses |e| q digits of absolute precision
    base = pi_q_minus_1(P + abs(e) * q * 2 + q, field)
    return (base**e).truncate(P)


def bc_from_zeta(n, P, field):
    """Pi(n) zeta_A(n) / pi~^n to absolute precision P (for (q-1) | n, n > 0)."""
    q = field.q
    fact = carlitz_factorial(n, field)
    extra = fact.deg + 2 * n + 2 * q
    z = zeta_numeric(n, P + extra, field)
    ip = pi_power(-n, P + extra, field)
    return (z * ip * fact).truncate(P)


# ---------------------------------------------------------------------------
# primes of A and reductions
# ---------------------------------------------------------------------------


def is_irreducible(P):
    """Trial division by every monic polynomial of degree <= deg P / 2."""
    if P.deg <= 0:
        return False
    f = P.field
    for d in range(1, P.deg // 2 + 1):
        for row in monic_array(f, d):
            if (P % Poly(f, row)).is_zero():
                return False
    return True


@lru_cache(maxsize=None)
def _irreducible_codes(field, d):
    q = field.q
    if d == 1:
        return tuple(range(q))
    # sieve: mark every product of two monic factors of degree i and d - i
    reducible = np.zeros(q**d, dtype=bool)
    weights = q ** np.arange(d, dtype=np.int64)
    for i in range(1, d // 2 + 1):
        A = monic_array(field, i)
        B = monic_array(field, d - i)
        for a in A:
            prods = np.array([field.conv(a, b)[:d] for b in B], dtype=np.int64)
            reducible[prods @ weights] = True
    return tuple(int(x) for x in np.flatnonzero(~reducible))


def monic_irreducibles(field, d):
    """Monic irreducible polynomials of degree d, in increasing order of their coefficient code."""
    q = field.q
    out = []
    for code in _irreducible_codes(field, d):
        coeffs = [(code // q**i) % q for i in range(d)] + [1]
        out.append(Poly(field, coeffs))
    return out


def count_irreducibles(q, d):
    """Gauss' formula (1/d) sum_{e | d} mu(e) q^{d/e}."""

    def mu(n):
        res, m, f = 1, n, 2
        while f * f <= m:
            if m % f == 0:
                m //= f
                if m % f == 0:
                    return 0
                res = -res
            f += 1
        return -res if m > 1 else res

    return sum(mu(e) * q ** (d // e) for e in range(1, d + 1) if d % e == 0) // d


class NotIntegral(ArithmeticError):
    pass


def reduce_mod_P(x, P, check_irreducible=True):
    """Residue of x (a RationalFunction or Poly) in A/P."""
    if check_irreducible and not is_irreducible(P):
        raise ValueError(f"{P.to_text()} is not irreducible")
    if isinstance(x, Poly):
        return x % P
    num, den = x.num % P, x.den % P
    if den.is_zero():
        raise NotIntegral(f"denominator divisible by {P.to_text()}")
    g, s, _ = poly_xgcd(den, P)
    return (num * s) % P


# ---------------------------------------------------------------------------
# Theorem on non-vanishing of BC_{q^d - N} mod P
# ---------------------------------------------------------------------------


def hypothesis_holds(N, d, q):
    return q**d > N and d * (q - 1) >= (digit_sum(N, q) - 1) * N


def verify_theorem_1_2(N, d, field, B=None, bc_cap=BC_CAP, budget=DEFAULT_BUDGET):
    """Residues of B_N(theta, theta) modulo every monic irreducible P of degree d.

    Reports, per prime, whether the residue vanishes; when BC_{q^d - N} is
    within the cap it is reduced as well and the two vanishing patterns are compared.
    """
    from .bnpoly import compute_BN

    q = field.q
    if (N - 1) % (q - 1) or N < 2:
        raise ValueError("need N >= 2 and N = 1 mod (q-1)")
    if q**d <= N:
        raise ValueError("need q^d > N")
    res = compute_BN(N, field, budget=budget)
    B = res.poly if B is None else B
    r = res.r
    btt = B.monomial_map(1, 1)
    report = {
        "N": N,
        "d": d,
        "q": q,
        "bnn_nonzero": not btt.is_zero(),
        "bnn_degree": btt.deg,
        "degree_bound": btt.deg < (r + 1) * N,
        "hypothesis": hypothesis_holds(N, d, q),
        "records": [],
    }
    bc = None
    if q**d - N <= bc_cap and digit_sum(N, q) >= q:
        bc = bc_number(q**d - N, field, bc_cap)
    ok = True
    for P in monic_irreducibles(field, d):
        resid = btt % P
        rec = {"P": P.to_text(), "residue": resid.to_text(), "zero": resid.is_zero()}
        if report["hypothesis"] and resid.is_zero():
            ok = False
        if bc is not None:
            bres = reduce_mod_P(bc, P, check_irreducible=False)
            rec["bc_zero"] = bres.is_zero()
            if rec["bc_zero"] != rec["zero"]:
                ok = False
        report["records"].append(rec)
    report["pass"] = ok and report["bnn_nonzero"] and report["degree_bound"]
    return report


__all__ = [
    "CarlitzData",
    "bc_from_zeta",
    "bc_number",
    "bc_series",
    "bc_via_BN",
    "bracket",
    "carlitz_D",
    "carlitz_factorial",
    "count_irreducibles",
    "is_irreducible",
    "monic_irreducibles",
    "pi_power",
    "reduce_mod_P",
    "verify_theorem_1_2",
    "zeta_layer",
    "zeta_layer_bruteforce",
    "zeta_numeric",
]
