"""Truncations of L_N(t) in 1/theta and of curly-L_N(t) in 1/t.

L_N(t) = sum_{a monic} a(t)^N / a = sum_i alpha_{i,N}(t) theta^{-i}.
Expanding 1/a in 1/theta gives

    alpha_{i,N} = sum_{d + w(k) = i} C_k S_d(N, k),   C_k = (-1)^{|k|} |k|!/prod k_j!,

and S_d(N, k) only depends on kbar, so the k's are grouped by kbar before
the power sums are evaluated.
"""

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from . import _grid
from .gfq import monic_array
from .polyseries import BiPoly, NewtonPolygon, Poly, PrecLaurent, RationalFunction, newton_polygon
from .powersums import (
    DEFAULT_BUDGET,
    _monic_powers,
    base_digits,
    check_budget,
    digit_sum,
    kbar,
    multinomial_mod_p,
    power_sums_combinatorial,
)


def weighted_tuples(d, W):
    """All k in N^d with w(k) = sum_j (d - j) k_j equal to W."""
    out = []

    def rec(j, rest, acc):
        if j == d:
            if rest == 0:
                out.append(tuple(acc))
            return
        wt = d - j
        for kj in range(rest // wt + 1):
            acc.append(kj)
            rec(j + 1, rest - wt * kj, acc)
            acc.pop()

    rec(0, W, [])
    return out


def C_k(k, p):
    """(-1)^{|k|} multinomial(k) mod p."""
    m = multinomial_mod_p(k, p)
    return m if sum(k) % 2 == 0 else (-m) % p


@lru_cache(maxsize=None)
def kbar_weights(d, imax, q, p):
    """{kbar: array over i of sum C_k (mod p) for k with d + w(k) = i <= imax}."""
    table = {}
    for W in range(imax - d + 1):
        for k in weighted_tuples(d, W):
            c = C_k(k, p)
            if not c:
                continue
            kb = kbar(k, q)
            row = table.setdefault(kb, np.zeros(imax + 1, dtype=np.int64))
            row[d + W] = (row[d + W] + c) % p
    return {kb: row for kb, row in table.items() if row.any()}


def alpha_table(N, imax, field, budget=DEFAULT_BUDGET):
    """Rows alpha_{0,N}, ..., alpha_{imax,N} as an int array (imax+1, N*imax+1) over F_p."""
    p, q = field.p, field.q
    width = N * imax + 1
    out = np.zeros((imax + 1, width), dtype=np.int64)
    out[0, 0] = 1
    for d in range(1, imax + 1):
        weights = kbar_weights(d, imax, q, p)
        if not weights:
            continue
        kbs = list(weights)
        S = power_sums_combinatorial(d, N, kbs, field, budget)
        W = np.stack([weights[kb] for kb in kbs])  # (nk, imax+1)
        out[:, : S.shape[1]] = (out[:, : S.shape[1]] + W.T @ S) % p
    return out


def alpha_coeff(i, N, field, budget=DEFAULT_BUDGET):
    return Poly(field, alpha_table(N, i, field, budget)[i], "t")


def alpha_degree_bound(i, N, q):
    """N (max(log_q i, 0) + [l_q(N)/(q-1)] + 1), with log_q taken exactly as a real number."""
    import math

    lg = math.log(i, q) if i > 1 else 0.0
    return N * (lg + digit_sum(N, q) // (q - 1) + 1)


@dataclass
class LSeriesTruncation:
    N: int
    field: object
    alphas: np.ndarray

    @property
    def r_max(self):
        return self.alphas.shape[0] - 1

    def alpha(self, i):
        return Poly(self.field, self.alphas[i], "t")

    def degrees(self):
        return [self.alpha(i).deg for i in range(self.r_max + 1)]

    def deg_t(self):
        return max(self.degrees())

    def polygon(self):
        """Newton polygon in t: point (j, least i with t^j in alpha_i), since v(theta^-i) = i."""
        nz = self.alphas != 0
        pts = []
        for j in np.flatnonzero(nz.any(axis=0)):
            pts.append((int(j), int(np.argmax(nz[:, j]))))
        return newton_polygon(pts)


def lambda_truncation(N, r, field, budget=DEFAULT_BUDGET):
    return LSeriesTruncation(N, field, alpha_table(N, r, field, budget))


def certified_segments(N, M, field, budget=DEFAULT_BUDGET):
    """Segments (slope, width) of the polygon of Lambda_M that survive in Lambda_{M+1} and Lambda_{M+2}.

    A segment is kept only if it lies within the abscissa range [0, deg_t Lambda_M].
    """
    big = alpha_table(N, M + 2, field, budget)
    polys = [LSeriesTruncation(N, field, big[: M + 1 + j]).polygon() for j in range(3)]
    limit = LSeriesTruncation(N, field, big[: M + 1]).deg_t()

    def edges(poly):
        return set(zip(poly.vertices, poly.vertices[1:]))

    stable = edges(polys[0]) & edges(polys[1]) & edges(polys[2])
    out = []
    for (x1, v1), (x2, v2) in sorted(stable):
        if x2 <= limit:
            out.append(((v2 - v1) / (x2 - x1), x2 - x1))
    return out


# ---------------------------------------------------------------------------
# N = 1
# ---------------------------------------------------------------------------


def ell(d, field):
    """ell_d = (theta - theta^q) ... (theta - theta^{q^d})."""
    th = Poly.x(field)
    out = Poly.one(field)
    for i in range(1, d + 1):
        out = out * (th - th ** (field.q**i))
    return out


def l1_identities(d, field, budget=DEFAULT_BUDGET):
    """Check ell_d * sum 1/a = 1 and ell_d * sum a(t)/a = prod_{i<d} (t - theta^{q^i}) by enumeration."""
    q = field.q
    check_budget(q**d * (d + 1) * q**d, budget, "l1 identities")
    ld = ell(d, field)
    A = monic_array(field, d)
    inv_sum = Poly.zero(field)
    total = BiPoly(field, np.zeros((0, 0), dtype=np.int64))
    for row in A:
        a = Poly(field, row)
        co, rem = ld.divmod(a)
        if not rem.is_zero():
            return {"d": d, "sum_inverse": False, "sum_ratio": False, "detail": "ell_d not divisible by a"}
        inv_sum = inv_sum + co
        # a(t) * (ell_d / a): t-coefficients are row[n] * co
        total = total + BiPoly(field, np.outer(row, np.ones(1, dtype=np.int64))) * BiPoly.from_poly_theta(co)
    th = BiPoly.from_poly_theta(Poly.x(field))
    t = BiPoly.from_poly_t(Poly.x(field, "t"))
    expected = BiPoly.one(field)
    for i in range(d):
        expected = expected * (t - th ** (q**i))
    return {"d": d, "sum_inverse": inv_sum == Poly.one(field), "sum_ratio": total == expected}


def l1_t_coefficients(D, P, field):
    """Coefficients of t^0..t^D of L_1(t) = sum_d prod_{i<d}(t - theta^{q^i}) / ell_d, to precision P."""
    q = field.q
    out = [PrecLaurent.zero(field, P) for _ in range(D + 1)]
    t = BiPoly.from_poly_t(Poly.x(field, "t"))
    th = BiPoly.from_poly_theta(Poly.x(field))
    num = BiPoly.one(field)
    d = 0
    while True:
        ld = ell(d, field)
        # a degree-d layer has valuation >= deg ell_d - (1 + q + ... + q^{d-1})
        if ld.deg - (q**d - 1) // (q - 1) >= P:
            break
        inv = PrecLaurent.from_poly(ld, P + 2 * ld.deg + 1).inv()
        for m, coeff in enumerate(num.t_coeffs()[: D + 1]):
            out[m] = out[m] + (inv * coeff).truncate(P)
        num = num * (t - th ** (q**d))
        d += 1
    return out


def l1_polygon(D, P, field):
    """Newton polygon of L_1(t) in t from the valuations of its t-coefficients."""
    coeffs = l1_t_coefficients(D, P, field)
    return newton_polygon([(m, c.valuation) for m, c in enumerate(coeffs) if not c.is_zero()])


def pi_over_lambda(field, P):
    """theta * prod_{j>=1} (1 - theta^{1-q^j})^{-1}, to precision P."""
    q = field.q
    prod = PrecLaurent.one(field, P + 1)
    j = 1
    while q**j - 1 < P + 1:
        prod = prod * (PrecLaurent.one(field, P + 1) - PrecLaurent.monomial(field, q**j - 1, P + 1))
        j += 1
    return prod.inv().shift(1)


def pellarin_identity_check(P, D, field):
    """(theta - t) L_1(t) = (pi/lambda) prod_{j>=0} (1 - t/theta^{q^j}), t-coefficients 0..D to precision P."""
    q = field.q
    L = l1_t_coefficients(D + 1, P + 1, field)
    theta_L = [c.shift(1) for c in L]
    left = []
    for m in range(D + 1):
        val = theta_L[m]
        if m:
            val = val - L[m - 1]
        left.append(val)
    # prod_j (1 - t x_j), x_j = theta^{-q^j}; coefficient list over t
    prod = [PrecLaurent.one(field, P + 1)] + [PrecLaurent.zero(field, P + 1) for _ in range(D)]
    j = 0
    while q**j < P + 1:
        xj = PrecLaurent.monomial(field, q**j, P + 1)
        new = list(prod)
        for m in range(1, D + 1):
            new[m] = prod[m] - xj * prod[m - 1]
        prod = new
        j += 1
    c = pi_over_lambda(field, P + 1)
    right = [(c * x) for x in prod]
    ok = [a.truncate(P).agrees_with(b.truncate(P)) for a, b in zip(left, right)]
    return {"precision": P, "t_degree": D, "coefficients_agree": ok, "pass": all(ok)}


# ---------------------------------------------------------------------------
# curly-L_N(t) in 1/t and the Fitting identity
# ---------------------------------------------------------------------------


@dataclass
class CurlyLTruncation:
    """coeffs[j] in F_q[theta] is the coefficient of t^{-j}, j < P."""

    N: int
    P: int
    field: object
    coeffs: list = dc_field(default_factory=list)

    def as_array(self, width=None):
        width = width or max((c.c.size for c in self.coeffs), default=1)
        out = np.zeros((self.P, max(width, 1)), dtype=np.int64)
        for j, c in enumerate(self.coeffs):
            out[j, : c.c.size] = c.c
        return out


def _inverse_in_one_over_t(field, A, P):
    """For monic a of degree d (rows of A), coefficients of 1/a(t) = sum_k c_k t^{-d-k}, k < P."""
    n, width = A.shape
    d = width - 1
    rev = A[:, ::-1]  # rev[:, i] = a_{d-i}
    C = np.zeros((n, P), dtype=np.int64)
    C[:, 0] = 1
    for k in range(1, P):
        acc = np.zeros(n, dtype=np.int64)
        for i in range(1, min(k, d) + 1):
            acc = field.vadd(acc, field.vmul(rev[:, i], C[:, k - i]))
        C[:, k] = field.vneg(acc)
    return C


def curly_L(N, P, field, budget=DEFAULT_BUDGET):
    """sum_{d} sum_{a in A_{+,d}} a^N / a(t), coefficients of t^0..t^{-(P-1)}, by enumeration."""
    q = field.q
    check_budget(sum(q**d * (N * d + 1) * P for d in range(P)), budget, "curly L")
    width = N * (P - 1) + 1
    acc = np.zeros((P, width), dtype=np.int64)
    for d in range(P):
        A, R = _monic_powers(field, d, N)  # R[a] = a(theta)^N
        C = _inverse_in_one_over_t(field, A, P - d)
        block = field.matmul(np.ascontiguousarray(C.T), R)  # (P-d, N d + 1)
        acc[d:, : block.shape[1]] = field.vadd(acc[d:, : block.shape[1]], block)
    coeffs = [Poly(field, row) for row in acc]
    return CurlyLTruncation(N, P, field, coeffs)


def _fitting_rhs(N, P, field, B):
    """B_N(theta, t) * pibar * t^{-r} * prod_l prod_j (1 - theta^{q^l}/t^{q^j})^{n_l} as rows in u = 1/t."""
    q, p = field.q, field.p
    if not B.coeffs_in_prime_field():
        raise ValueError("B_N must have prime-field coefficients")
    r = B.deg_theta
    digits = base_digits(N, q)
    width = B.deg_t + 2 * N * P + 2
    G = np.zeros((P, width), dtype=np.int64)
    # B_N(theta, t): monomial t^a theta^b of B_N(t, theta) becomes theta^a t^b -> u^{r-b} theta^a
    for a, b, code in B.terms():
        if r - b < P:
            G[r - b, a] = (G[r - b, a] + code) % p
    j = 1
    while q**j - 1 < P:
        G = _grid.div_one_minus(G, q**j - 1, p)
        j += 1
    for l, nl in enumerate(digits):
        if not nl:
            continue
        j = 0
        while q**j < P:
            for _ in range(nl):
                G = _grid.mul_one_minus(G, q**j, p, a=q**l, axis=0)
            j += 1
    return G


def verify_fitting_identity(N, P, field, B=None, budget=DEFAULT_BUDGET):
    """Compare curly_L(N, P) with B_N(theta, t) pibar t^{-r} prod (omega-bar(theta^{q^l}))^{-n_l}."""
    from .bnpoly import compute_BN

    q = field.q
    if (N - 1) % (q - 1) or digit_sum(N, q) < q:
        raise ValueError("need N = 1 mod (q-1) and l_q(N) >= q")
    if B is None:
        B = compute_BN(N, field, budget=budget).poly
    rhs = _fitting_rhs(N, P, field, B)
    lhs = curly_L(N, P, field, budget)
    width = max(rhs.shape[1], lhs.as_array().shape[1])
    L = np.zeros((P, width), dtype=np.int64)
    L[:, : lhs.as_array().shape[1]] = lhs.as_array()
    Rr = np.zeros((P, width), dtype=np.int64)
    Rr[:, : rhs.shape[1]] = rhs
    mismatch = [j for j in range(P) if not np.array_equal(L[j], Rr[j])]
    return {"N": N, "q": q, "precision": P, "mismatch_rows": mismatch, "pass": not mismatch}


# ---------------------------------------------------------------------------
# exp of the t-motive phi^(N)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpCoefficient:
    """num / den with num in F_q[t, theta] and den in F_q[t] (stored as a BiPoly)."""

    num: BiPoly
    den: BiPoly

    def to_text(self):
        return f"({self.num.to_text()}) / ({self.den.to_text()})"


def phi_polynomial(N, field):
    """prod_l (theta^{q^l} - t)^{n_l}."""
    q = field.q
    t = BiPoly.from_poly_t(Poly.x(field, "t"))
    th = BiPoly.from_poly_theta(Poly.x(field))
    out = BiPoly.one(field)
    for l, nl in enumerate(base_digits(N, q)):
        if nl:
            out = out * (th ** (q**l) - t) ** nl
    return out


def exp_phi_coefficients(N, j_max, field):
    """e_j with e_0 = 1 and e_j (t^{q^j} - t) = P(t) e_{j-1}(t^q), P = prod_l (theta^{q^l} - t)^{n_l}.

    Closed form: prod_{n<j} P(t^{q^n}) / prod_{n<j} (t^{q^j} - t^{q^n}).
    """
    q = field.q
    P = phi_polynomial(N, field)
    t = BiPoly.from_poly_t(Poly.x(field, "t"))
    out = [ExpCoefficient(BiPoly.one(field), BiPoly.one(field))]
    num = BiPoly.one(field)
    for j in range(1, j_max + 1):
        num = num * P.substitute_t_power(q ** (j - 1))
        den = BiPoly.one(field)
        for n in range(j):
            den = den * (t ** (q**j) - t ** (q**n))
        out.append(ExpCoefficient(num, den))
    return out


def check_exp_functional_equation(coeffs, N, field):
    """e_j (t^{q^j} - t) == P(t) * e_{j-1}(t^q) for every j >= 1, cross-multiplied."""
    q = field.q
    P = phi_polynomial(N, field)
    t = BiPoly.from_poly_t(Poly.x(field, "t"))
    ok = []
    for j in range(1, len(coeffs)):
        e, prev = coeffs[j], coeffs[j - 1]
        lhs = e.num * (t ** (q**j) - t) * prev.den.substitute_t_power(q)
        rhs = P * prev.num.substitute_t_power(q) * e.den
        ok.append(lhs == rhs)
    return ok
