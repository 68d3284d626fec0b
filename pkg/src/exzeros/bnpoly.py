"""The polynomials B_N(t, theta) and BB_s(t_1, ..., t_s, theta).

Both are obtained from a truncated 1/theta-expansion:

    theta^{-r} B = L * prod_{j>=1} (1 - theta^{1-q^j}) * prod_v prod_{j>=0} (1 - t_v theta^{-q^j})^{-1}

with t_v running over t^{q^{e_i}} (for B_N) or t_1..t_s (for BB_s).  The
lambda-powers in the definition cancel against the sign prefactor, so the
right-hand side lives in F_p[t][[1/theta]].  The first r+1 rows give B; the
next ``tail`` rows must vanish, and the top row must be 1.  Both facts are
asserted.
"""

from dataclasses import dataclass
from fractions import Fraction
import itertools

import numpy as np

from . import _grid
from .lseries import alpha_table, kbar_weights
from .polyseries import (
    BiPoly,
    MultiPoly,
    Poly,
    _content,
    elementary_symmetric,
    gcd_degree_in_t,
    polygon_in_t,
    sigma_s,
    squarefree_in_t,
)
from .powersums import (
    DEFAULT_BUDGET,
    base_digits,
    check_budget,
    deg_S,
    digit_exponents,
    digit_sum,
    is_q_minimal,
)


class NormalizationError(AssertionError):
    """The truncated product failed the monicity or vanishing-tail self-check."""


def theta_degree(ell, q):
    """r = (l - q)/(q - 1) for l >= q, and 0 for l = 1."""
    if ell == 1:
        return 0
    if ell < q or (ell - 1) % (q - 1):
        raise ValueError(f"digit sum {ell} is not 1 mod {q - 1} and >= {q}")
    return (ell - q) // (q - 1)


def check_N(N, q):
    if N < 1 or (N - 1) % (q - 1):
        raise ValueError(f"N = {N} must be positive and congruent to 1 mod {q - 1}")


@dataclass(frozen=True)
class BNResult:
    N: int
    q: int
    r: int
    digits: tuple
    poly: BiPoly
    tail: int = 0

    @property
    def digit_top_index(self):
        return len(self.digits) - 1

    def swapped(self):
        """B_N(theta, t)."""
        return self.poly.swap()


@dataclass(frozen=True)
class BsResult:
    s: int
    q: int
    r: int
    poly: MultiPoly
    tail: int = 0


def _omega_factors(G, q, p, R, degrees_by_axis):
    """Apply prod_{j>=1}(1 - x^{q^j-1}) and prod over (axis, a, mult) of prod_j (1 - y^a x^{q^j})^{-mult}."""
    j = 1
    while q**j - 1 <= R:
        G = _grid.mul_one_minus(G, q**j - 1, p)
        j += 1
    for axis, a, mult in degrees_by_axis:
        j = 0
        while q**j <= R:
            G = _grid.div_one_minus(G, q**j, p, a=a, axis=axis, times=mult)
            j += 1
    return G


def _check_rows(G, r, what):
    top = G[0].reshape(-1)
    if top[0] != 1 or top[1:].any():
        raise NormalizationError(f"{what}: leading coefficient in theta is not 1")
    if G[r + 1 :].any():
        raise NormalizationError(f"{what}: expansion does not terminate at theta^-{r}")


def compute_BN(N, field, tail=2, budget=DEFAULT_BUDGET):
    q, p = field.q, field.p
    check_N(N, q)
    digits = tuple(base_digits(N, q))
    ell = sum(digits)
    r = theta_degree(ell, q)
    if ell in (1, q):
        return BNResult(N, q, 0, digits, BiPoly.one(field), 0)
    R = r + tail
    alphas = alpha_table(N, R, field, budget)
    width = 3 * N * R + 1
    G = np.zeros((R + 1, width), dtype=np.int64)
    G[:, : alphas.shape[1]] = alphas
    factors = [(0, q**l, nl) for l, nl in enumerate(digits) if nl]
    G = _omega_factors(G, q, p, R, factors)
    _check_rows(G, r, f"B_{N}")
    c = np.zeros((width, r + 1), dtype=np.int64)
    for i in range(r + 1):
        c[:, r - i] = G[i]
    return BNResult(N, q, r, digits, BiPoly(field, c), tail)


def _bs_cost(s, R):
    return (R + 1) ** (s + 1) * (s + 1) + sum((d + 1) ** s for d in range(R + 1))


def compute_Bs(s, field, tail=None, budget=DEFAULT_BUDGET):
    """BB_s as a MultiPoly; ``tail`` extra rows are checked to vanish (default 1 when affordable)."""
    q, p = field.q, field.p
    r = theta_degree(s, q)
    if s == q:
        return BsResult(s, q, 0, MultiPoly.constant(field, s), 0)
    if tail is None:
        tail = 1 if _bs_cost(s, r + 1) <= budget else 0
    R = r + tail
    check_budget(_bs_cost(s, R), budget, f"BB_{s}")
    shape = (R + 1,) * s
    strides = np.array([(R + 1) ** (s - 1 - v) for v in range(s)], dtype=np.int64)
    G = np.zeros((R + 1,) + shape, dtype=np.int64)
    G[0].flat[0] = 1
    for d in range(1, R + 1):
        weights = kbar_weights(d, R, q, p)
        if not weights:
            continue
        E = np.indices((d + 1,) * s).reshape(s, -1).T
        counts = np.stack([(E == n).sum(axis=1) for n in range(d)], axis=1)
        idx = E @ strides
        sign = 1 if d % 2 == 0 else p - 1
        for kb, w in weights.items():
            mask = np.ones(E.shape[0], dtype=bool)
            for n in range(d):
                col = counts[:, n]
                mask &= col >= kb[n]
                if q > 2:
                    mask &= (col - kb[n]) % (q - 1) == 0
            if not mask.any():
                continue
            sel = idx[mask]
            for i in np.flatnonzero(w):
                G[i].flat[sel] = (G[i].flat[sel] + sign * w[i]) % p
    G = _omega_factors(G, q, p, R, [(v, 1, 1) for v in range(s)])
    _check_rows(G, r, f"BB_{s}")
    terms = {}
    for i in range(r + 1):
        for pos in zip(*np.nonzero(G[i])):
            terms[tuple(int(x) for x in pos) + (r - i,)] = int(G[i][pos])
    return BsResult(s, q, r, MultiPoly(field, s, terms), tail)


def specialize_Bs(bs, exponents):
    """BB_s at t_i = t^{q^{e_i}}."""
    q = bs.q
    return bs.poly.specialize([q**e for e in exponents])


# ---------------------------------------------------------------------------
# closed forms for small s
# ---------------------------------------------------------------------------


def appendix_forms(field):
    """BB_q, BB_{2q-1}, BB_{3q-2} from the closed-form table.

    The cubic-degree term of BB_{3q-2} is read as q variables squared times
    q-1 further (disjoint) variables, plus e_{2q}.
    """
    q = field.q
    th = lambda s: MultiPoly.theta(field, s)
    one = lambda s: MultiPoly.constant(field, s)
    s2, s3 = 2 * q - 1, 3 * q - 2
    b2 = th(s2) - elementary_symmetric(field, s2, q)
    b3 = (
        th(s3) * th(s3)
        - th(s3) * (elementary_symmetric(field, s3, 2 * q - 1) + elementary_symmetric(field, s3, q))
        + sigma_s(field, s3, (q - 1, q))
        + elementary_symmetric(field, s3, 2 * q)
    )
    return {q: one(q), s2: b2, s3: b3}


# ---------------------------------------------------------------------------
# substitutions
# ---------------------------------------------------------------------------


def bn_at(B, value, q=None):
    """Substitute t := value in B(t, theta).

    value: "theta", ("theta^q^d", d) for theta^{q^d} with d >= 0, or a field code.
    """
    if value == "theta":
        return B.monomial_map(1, 1)
    if isinstance(value, tuple):
        _, d = value
        return B.monomial_map(B.field.q**d if q is None else q**d, 1)
    return B.eval_t(value)


def bn_theta_tq(B, d):
    """B(theta, theta^{q^d}), i.e. t := theta and theta := theta^{q^d}."""
    return B.monomial_map(1, B.field.q**d)


# ---------------------------------------------------------------------------
# structural checks
# ---------------------------------------------------------------------------


def _divisible_by_monic_t(B, m):
    """Is the BiPoly B divisible by the monic univariate m(t)?"""
    rows = [row.copy() for row in B.c]
    f = B.field
    dm = m.deg
    for k in range(len(rows) - 1, dm - 1, -1):
        c = rows[k]
        if c.any():
            for i in range(dm + 1):
                mc = int(m.c[i])
                if mc:
                    rows[k - dm + i] = f.vsub(rows[k - dm + i], f.vmul(c, np.int64(mc)))
    return not any(row.any() for row in rows[:dm])


def frobenius_scaling_checks(res, field, budget=DEFAULT_BUDGET):
    """Frobenius compatibility, B_{qN}(t) = B_N(t^q), the congruence mod (t^q - t)^2 and the t^p property."""
    q, p = field.q, field.p
    B, N, r = res.poly, res.N, res.r
    out = {}
    out["frobenius"] = B.substitute_t_power(p).substitute_theta_power(p) == B**p
    out["qN"] = compute_BN(q * N, field, budget=budget).poly == B.substitute_t_power(q)
    t = BiPoly.from_poly_t(Poly.x(field, "t"))
    th = BiPoly.from_poly_theta(Poly.x(field))
    tq_t = t**q - t
    if r >= 1:
        approx = (th - t) ** r - (tq_t * (th - t) ** (r - 1)) * (r % p)
    else:
        approx = BiPoly.one(field)
    mod = Poly(field, [0, 1], "t") ** q - Poly.x(field, "t")
    out["congruence"] = _divisible_by_monic_t(B - approx, mod * mod)
    if N % p == 0:
        out["t_p_powers"] = not any(B.c[a].any() for a in range(B.c.shape[0]) if a % p)
    return out


def degree_primitivity_checks(res):
    B, N, r = res.poly, res.N, res.r
    p = B.field.p
    out = {}
    if r >= 1:
        out["deg_t_at_least_p"] = B.deg_t >= p
    out["total_degree_bound"] = B.total_degree() <= max(r * N + r - 2, 0)
    out["primitive"] = _content(B.t_coeffs()).deg == 0
    return out


def root_valuations_t(res):
    """[(valuation, count)] of the roots of B_N(t, theta) in t, from the Newton polygon."""
    if res.r == 0:
        return []
    return polygon_in_t(res.poly).root_valuations()


def valuation_bound_check(res):
    """Are all root valuations v in [-1, -1/N]?  Returns (ok, valuations)."""
    vals = root_valuations_t(res)
    ok = all(Fraction(-1) <= v <= Fraction(-1, res.N) for v, _ in vals)
    return ok, vals


def vanishing_recursion_check(s, field, budget=DEFAULT_BUDGET):
    """BB_s(t_1..t_{s'}, 0..0) = (theta - t_1...t_{s'}) BB_{s'} with s' = s - (q-1)."""
    q = field.q
    sp = s - (q - 1)
    big = compute_Bs(s, field, budget=budget).poly
    small = compute_Bs(sp, field, budget=budget).poly
    lhs = big.set_variables_zero(range(sp, s)).drop_variables(list(range(sp)))
    prod = MultiPoly(field, sp, {(1,) * sp + (0,): 1})
    rhs = (MultiPoly.theta(field, sp) - prod) * small
    return lhs == rhs


def rho_check(bs):
    """rho(B_{i,s}) >= i(q-1) + 1 for i = 1..r."""
    q, r = bs.q, bs.r
    return all(bs.poly.theta_coeff(r - i).rho() >= i * (q - 1) + 1 for i in range(1, r + 1))


def no_small_roots_check(res, field, max_deg=2):
    """B_N(a, theta) != 0 for every a in F_q[theta] of degree <= max_deg."""
    q = field.q
    for d in range(max_deg + 1):
        for coeffs in itertools.product(range(q), repeat=d + 1):
            if d and coeffs[-1] == 0:
                continue
            if res.poly.eval_t(Poly(field, list(coeffs))).is_zero():
                return False
    return True


def theta_power_roots(res, imax):
    """Exponents i, |i| <= imax, with B_N(theta^{q^i}, theta) = 0.

    For i < 0 this is tested as B_N(theta, theta^{q^{-i}}) = 0 (raise to the q^{-i}-th power;
    the coefficients are in F_p).
    """
    q = res.q
    B = res.poly
    found = []
    for i in range(-imax, imax + 1):
        img = B.monomial_map(q**i, 1) if i >= 0 else B.monomial_map(1, q ** (-i))
        if img.is_zero():
            found.append(i)
    return found


def _prime_pairs(field, max_deg):
    from .bernoulli import monic_irreducibles

    for d in range(1, max_deg + 1):
        yield from monic_irreducibles(field, d)


def coprime_to_prime_powers(res, field, max_deg=3):
    """B_N(t, theta) coprime to P(t)^N - P(theta) for each monic irreducible P of degree <= max_deg.

    Roots of P(t)^N - P(theta) all have valuation -1/N; when no root of B_N does,
    coprimality is immediate, otherwise an exact gcd in t over F_q(theta) decides.
    """
    B, N = res.poly, res.N
    if res.r == 0:
        return {"pass": True, "exact_gcds": 0}
    vals = {v for v, _ in root_valuations_t(res)}
    exact = 0
    for P in _prime_pairs(field, max_deg):
        if Fraction(-1, N) not in vals:
            continue
        exact += 1
        Pt = BiPoly.from_poly_t(Poly(field, P.c, "t")) ** N - BiPoly.from_poly_theta(P)
        if gcd_degree_in_t(B, Pt) > 0:
            return {"pass": False, "witness": P.to_text(), "exact_gcds": exact}
    return {"pass": True, "exact_gcds": exact}


def root_separation_checks(res, field, max_deg=3, imax=None):
    """Square-freeness, no roots among theta^{q^i}, coprimality to P(t)^N - P."""
    imax = imax if imax is not None else len(res.digits) + 2
    return {
        "squarefree": squarefree_in_t(res.poly) and squarefree_in_t(res.swapped()),
        "no_theta_power_roots": not theta_power_roots(res, imax),
        "coprime_prime_powers": coprime_to_prime_powers(res, field, max_deg)["pass"],
    }


def simplicity_certificate(res):
    """Polygon of B_N(theta, t) in t: r segments of width 1 with distinct integer slopes."""
    if res.r == 0:
        return True
    segs = polygon_in_t(res.swapped()).segments()
    if len(segs) != res.r:
        return False
    slopes = [s for s, _ in segs]
    return all(w == 1 for _, w in segs) and all(s.denominator == 1 for s in slopes) and len(set(slopes)) == len(slopes)


def top_monomials(res):
    """Monomials of maximal total degree as (t_exp, theta_exp, code)."""
    terms = res.poly.terms()
    top = terms[0][0] + terms[0][1]
    return [t for t in terms if t[0] + t[1] == top]


def exceptional_zero_report(N, field, budget=DEFAULT_BUDGET):
    q = field.q
    res = compute_BN(N, field, budget=budget)
    if res.r == 0:
        raise ValueError("B_N = 1 has no exceptional zeros")
    B = res.poly
    r = res.r
    qmin = is_q_minimal(N, q)
    poly_t = polygon_in_t(B)
    poly_theta = polygon_in_t(res.swapped())
    tops = top_monomials(res)
    report = {
        "N": N,
        "q": q,
        "r": r,
        "q_minimal": qmin,
        "deg_t": B.deg_t,
        "degree_bracket": (r - 1) * N < B.deg_t <= r * N,
        "degree_bracket_strict": (r - 1) * N < B.deg_t < r * N,
        "top_monomials": [[a, b, c] for a, b, c in tops],
        "polygon_t": poly_t.to_json(),
        "root_valuations_t": [[str(v), w] for v, w in poly_t.root_valuations()],
        "polygon_theta_t": poly_theta.to_json(),
        "root_valuations_theta_t": [[str(v), w] for v, w in poly_theta.root_valuations()],
        "simplicity_certificate": simplicity_certificate(res),
        "squarefree_t_theta": squarefree_in_t(B),
        "squarefree_theta_t": squarefree_in_t(res.swapped()),
        "theta_power_roots": theta_power_roots(res, len(res.digits) + 2),
    }
    if q == field.p or qmin:
        bN = deg_S(r, N, field, budget)
        report["b_N"] = bN
        report["unique_top_monomial"] = len(tops) == 1 and tops[0][1] == 0 and tops[0][0] == bN
    return report


def distinct_exponent_N(N, q):
    """N = q^{e_1} + ... + q^{e_s} with distinct e_i (all base-q digits 0 or 1)."""
    return all(dg <= 1 for dg in base_digits(N, q))


__all__ = [
    "BNResult",
    "BsResult",
    "NormalizationError",
    "appendix_forms",
    "bn_at",
    "bn_theta_tq",
    "compute_BN",
    "compute_Bs",
    "no_small_roots_check",
    "root_separation_checks",
    "digit_exponents",
    "digit_sum",
    "distinct_exponent_N",
    "exceptional_zero_report",
    "frobenius_scaling_checks",
    "degree_primitivity_checks",
    "vanishing_recursion_check",
    "rho_check",
    "simplicity_certificate",
    "specialize_Bs",
    "theta_degree",
    "theta_power_roots",
]
