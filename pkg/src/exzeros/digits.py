"""Euler-type sums delta_N = sum_{k>=1} sum_{a in A_{+,k}} a'^N / a and the digit principle.

Layer k is summed over cosets of V_k = span_{F_q}{theta^j : j < k, p | j}.
Every element of b + V_k has the same derivative b', and

    sum_{v in V} 1/(b + v) = E_0 / e_V(b),

where e_V(x) = prod_{v in V} (x - v) = sum_i E_i x^{q^i} is F_q-linear and
E_0 = e_V'(x).  Each term b'^N E_0/e_V(b) has valuation at least
k|V| - deg E_0 - N deg b', which gives an explicit bound for every omitted layer.
"""

from dataclasses import dataclass, field as dc_field
import itertools

import numpy as np

from . import _kernels
from .bernoulli import carlitz_D, carlitz_factorial, bracket, pi_power
from .gfq import monic_array
from .lseries import pi_over_lambda
from .polyseries import LambdaLaurent, Poly, PrecLaurent, RationalFunction
from .powersums import BudgetExceeded, base_digits, check_budget, digit_sum

# multiply-adds in the batched layer sums; the grid q = 3, N <= 64, P = 20 needs ~2e9
DEFAULT_BUDGET = 10**10


# ---------------------------------------------------------------------------
# coset data for one layer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Layer:
    k: int
    J: tuple  # positions spanning V
    Jc: tuple  # free positions that change the derivative
    E: tuple  # e_V(x) = sum_i E[i] x^{q^i}
    v0: int  # valuation of E_0 / e_V(b)
    dmax: int  # max deg b' (-1 if b' = 0 always)

    @property
    def reps(self):
        return len(self.Jc)


def _subspace_polynomial(field, J):
    """Coefficients E_i of prod_{v in span theta^J} (x - v) as Polys in theta."""
    q = field.q
    E = [Poly.one(field)]
    for j in J:
        ew = Poly.zero(field)
        for i, Ei in enumerate(E):
            ew = ew + Ei * Poly.monomial(field, j * q**i)
        c = ew ** (q - 1)
        new = [-(c * E[0])]
        for i in range(1, len(E)):
            new.append(E[i - 1].substitute_power(q) - c * E[i])
        new.append(E[-1].substitute_power(q))
        E = new
    return tuple(E)


def _sum_degrees(J, q):
    """sum of deg v over the nonzero v in span theta^J (J ascending)."""
    return sum(j * (q - 1) * q**i for i, j in enumerate(J))


def _layer_shape(k, q, p):
    J = tuple(j for j in range(k) if j % p == 0)
    Jc = tuple(j for j in range(1, k) if j % p)
    degs = [j - 1 for j in Jc] + ([k - 1] if k % p else [])
    dmax = max(degs) if degs else -1
    v0 = k * q ** len(J) - _sum_degrees(J, q)
    return J, Jc, v0, dmax


_LAYERS = {}


def _layer(k, field):
    key = (field, k)
    if key not in _LAYERS:
        J, Jc, v0, dmax = _layer_shape(k, field.q, field.p)
        E = _subspace_polynomial(field, J)
        assert E[0].deg == k * field.q ** len(J) - v0
        _LAYERS[key] = _Layer(k, J, Jc, E, v0, dmax)
    return _LAYERS[key]


def layer_lower_bound(k, N, q, p):
    """Valuation bound for layer k of delta_N (None when the layer vanishes identically)."""
    _, _, v0, dmax = _layer_shape(k, q, p)
    if dmax < 0:
        return None
    return v0 - N * dmax


def tail_bound(N, D, q, p, horizon=64):
    """min over k > D of the layer bound.

    The bound grows like k q^{k/p} - N k, so past its minimum it increases; the
    scan stops once the bound has increased for ``horizon`` consecutive layers.
    """
    best = None
    prev = None
    rising = 0
    k = D + 1
    while rising < horizon:
        lb = layer_lower_bound(k, N, q, p)
        if lb is not None:
            best = lb if best is None else min(best, lb)
            rising = rising + 1 if prev is not None and lb > prev else 0
            prev = lb
        k += 1
    return best


def _rep_codes(layer, q):
    n = len(layer.Jc)
    return np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64).reshape(q**n, n)


# ---------------------------------------------------------------------------
# batched layer sums (prime fields)
# ---------------------------------------------------------------------------


def _rev_top(poly, L):
    """Top L coefficients of poly, highest first."""
    c = poly.c[::-1][:L]
    out = np.zeros(L, dtype=np.int64)
    out[: c.size] = c
    return out


def _batch_inverse(a, p, L):
    """Row-wise inverse of series with a[:, 0] = 1 (mod p) to length L."""
    b = np.zeros((a.shape[0], 1), dtype=np.int64)
    b[:, 0] = 1
    n = 1
    while n < L:
        n = min(2 * n, L)
        ab = _kernels.batch_series_mul_mod(a[:, :n], b, p, n)
        corr = (-ab) % p
        corr[:, 0] = (corr[:, 0] + 2) % p
        b = _kernels.batch_series_mul_mod(b, corr, p, n)
    return b


def _batch_power(x, N, p, L):
    result = None
    base = x
    while N:
        if N & 1:
            result = base.copy() if result is None else _kernels.batch_series_mul_mod(result, base, p, L)
        N >>= 1
        if N:
            base = _kernels.batch_series_mul_mod(base, base, p, L)
    return result


_SERIES_CACHE = {}


def _coset_series(layer, field, L):
    """Rows rev(E_0 / e_V(b)) for every representative b, to relative length L."""
    key = (field, layer.k)
    hit = _SERIES_CACHE.get(key)
    if hit is not None and hit.shape[1] >= L:
        return hit[:, :L]
    q, p, k = field.q, field.p, layer.k
    codes = _rep_codes(layer, q)
    R = codes.shape[0]
    De = k * q ** (len(layer.E) - 1)
    acc = np.zeros((R, L), dtype=np.int64)
    for i, Ei in enumerate(layer.E):
        if Ei.is_zero():
            continue
        top = Ei.deg + k * q**i
        off = De - top
        if off >= L:
            continue
        n = L - off
        M = np.zeros((R, n), dtype=np.int64)
        M[:, 0] = 1
        for col, j in enumerate(layer.Jc):
            pos = (k - j) * q**i
            if pos < n:
                M[:, pos] = codes[:, col]
        Erev = np.ascontiguousarray(np.broadcast_to(_rev_top(Ei, n), (R, n)))
        acc[:, off:] = (acc[:, off:] + _kernels.batch_series_mul_mod(Erev, M, p, n)) % p
    inv = _batch_inverse(acc, p, L)
    E0 = np.ascontiguousarray(np.broadcast_to(_rev_top(layer.E[0], L), (R, L)))
    out = _kernels.batch_series_mul_mod(E0, inv, p, L)
    out.setflags(write=False)
    _SERIES_CACHE[key] = out
    return out


def _derivative_rows(layer, field, L):
    """Rows rev(b') relative to degree dmax, truncated to L."""
    q, p, k = field.q, field.p, layer.k
    codes = _rep_codes(layer, q)
    X = np.zeros((codes.shape[0], L), dtype=np.int64)
    if k % p and layer.dmax - (k - 1) < L:
        X[:, layer.dmax - (k - 1)] = k % p
    for col, j in enumerate(layer.Jc):
        pos = layer.dmax - (j - 1)
        if pos < L:
            X[:, pos] = (X[:, pos] + (j % p) * codes[:, col]) % p
    return X


def delta_layer(N, k, P, field, budget=DEFAULT_BUDGET):
    """sum_{a in A_{+,k}} a'^N / a to absolute precision P."""
    layer = _layer(k, field)
    if layer.dmax < 0:
        return PrecLaurent.zero(field, P)
    base = layer.v0 - N * layer.dmax
    L = P - base
    if L <= 0:
        return PrecLaurent.zero(field, P)
    if not field.is_prime:
        return delta_layer_direct(N, k, P, field, budget)
    p = field.p
    check_budget(field.q ** len(layer.Jc) * L * L * max(N.bit_length(), 1), budget, f"delta layer {k}")
    S = _coset_series(layer, field, L)
    X = _batch_power(_derivative_rows(layer, field, L), N, p, L)
    vals = _kernels.batch_conv_sum_mod(X, S, p, L)
    return PrecLaurent(field, base, P, vals)


def delta_layer_direct(N, k, P, field, budget=DEFAULT_BUDGET):
    """The same layer by summing over every monic a of degree k."""
    check_budget(field.q**k * (P + N * k) ** 2, budget, "direct delta layer")
    acc = PrecLaurent.zero(field, P)
    work = P + N * k + k + 1
    for row in monic_array(field, k):
        a = Poly(field, row)
        da = a.derivative()
        if da.is_zero():
            continue
        term = PrecLaurent.from_poly(a, work).inv() * (da**N)
        acc = acc + term.truncate(P)
    return acc


# ---------------------------------------------------------------------------
# delta_N
# ---------------------------------------------------------------------------


@dataclass
class DeltaValue:
    N: int
    value: PrecLaurent
    precision: int
    depth: int
    layer_valuations: list = dc_field(default_factory=list)
    tail_bound: int = None
    observed_onset: int = None

    def graded(self):
        return LambdaLaurent.from_grade(self.value.field, 0, self.value)

    def to_json(self):
        return {
            "N": self.N,
            "precision": self.precision,
            "depth": self.depth,
            "layer_valuations": self.layer_valuations,
            "tail_bound": self.tail_bound,
            "observed_onset": self.observed_onset,
            "value": self.value.to_json(),
        }


def default_depth(N, P, q, p, max_depth=40):
    """Smallest D whose tail bound reaches P."""
    for D in range(max_depth + 1):
        tb = tail_bound(N, D, q, p)
        if tb is None or tb >= P:
            return D
    raise BudgetExceeded(f"precision {P} needs more than {max_depth} layers")


def delta_bruteforce(N, D, P, field, budget=DEFAULT_BUDGET):
    """Partial sum over layers 1..D; precision = min(P, bound on every omitted layer).

    D=None picks the smallest depth whose tail bound reaches P.
    """
    q, p = field.q, field.p
    if D is None:
        D = default_depth(N, P, q, p)
    acc = PrecLaurent.zero(field, P)
    vals = []
    for k in range(1, D + 1):
        lay = delta_layer(N, k, P, field, budget)
        vals.append(lay.valuation)
        acc = acc + lay
    tb = tail_bound(N, D, q, p)
    prec = P if tb is None else min(P, tb)
    # the first omitted layer is computed only as a measurement
    nxt = delta_layer(N, D + 1, P, field, budget) if budget is None or q ** len(_layer_shape(D + 1, q, p)[1]) <= budget else None
    onset = None if nxt is None else (P if nxt.is_zero() else nxt.valuation)
    return DeltaValue(N, acc.truncate(prec), prec, D, vals, tb, onset)


def delta_one_reference(D, P, field):
    """-sum_{k=1}^{D} 1/[k]."""
    acc = PrecLaurent.zero(field, P)
    for k in range(1, D + 1):
        acc = acc - RationalFunction(Poly.one(field), bracket(k, field)).to_laurent(P)
    return acc


def delta_closed(j, P, field):
    """delta_{q^j} = D_j/[j] pi~^{1-q^j} (= D_{j-1}^q pi~^{1-q^j}), grade 0."""
    if j < 1:
        raise ValueError("j >= 1")
    q = field.q
    coef = carlitz_D(j - 1, field) ** q
    work = P + coef.deg + 1
    val = (pi_power(1 - q**j, work, field) * coef).truncate(P)
    return DeltaValue(q**j, val, val.prec, 0)


# ---------------------------------------------------------------------------
# omega residues
# ---------------------------------------------------------------------------


def _pi_tilde(field, P):
    return LambdaLaurent.from_grade(field, 1, pi_over_lambda(field, P))


def _agree(a, b, P):
    """Gradewise agreement of two LambdaLaurent values to precision P."""
    for x, y in zip(a.comps, b.comps):
        if x is None and y is None:
            continue
        x = x if x is not None else PrecLaurent.zero(y.field, y.prec)
        y = y if y is not None else PrecLaurent.zero(x.field, x.prec)
        if min(x.prec, y.prec) < P:
            return None
        if not x.truncate(P).agrees_with(y.truncate(P)):
            return False
    return True


def omega_residue_check(j, P, field, D=3):
    """(t - theta^{q^j}) omega(t) at t = theta^{q^j} against -pi~^{q^j}/D_j, plus omega = exp_C(pi~/(theta - t)) to t-degree D."""
    q = field.q
    qj = q**j
    W = P + 4 * qj * (j + 2) + 4 * q * (D + 2) + 8
    one = PrecLaurent.one(field, W)
    # product with the j-th factor removed: -theta^{q^j} prod_{j' != j} (1 - theta^{q^j - q^j'})^{-1}
    prod = one
    for jp in range(j):
        prod = prod * (PrecLaurent.one(field, W) - PrecLaurent.monomial(field, -(qj - q**jp), W))
    jp = j + 1
    while q**jp - qj < W:
        prod = prod * (one - PrecLaurent.monomial(field, q**jp - qj, W))
        jp += 1
    lhs0 = (-(prod.inv())).shift(qj)
    lam = LambdaLaurent.from_grade(field, 1, PrecLaurent.one(field, W))
    lhs = lam * lhs0
    pit = _pi_tilde(field, W)
    rhs = -(pit**qj) * RationalFunction(Poly.one(field), carlitz_D(j, field)).to_laurent(W)
    residue_ok = _agree(lhs, rhs, P)

    # t-coefficients of omega: lambda h_m(theta^-1, theta^-q, ...)
    coeffs = [one] + [PrecLaurent.zero(field, W) for _ in range(D)]
    jj = 0
    while q**jj < W:
        step = PrecLaurent.monomial(field, q**jj, W)
        for m in range(1, D + 1):
            coeffs[m] = coeffs[m] + coeffs[m - 1] * step
        jj += 1
    exp_ok = True
    for m in range(D + 1):
        left = lam * coeffs[m]
        right = None
        i = 0
        while True:
            lead = q**i * (i + 1) - (q**i * q) // (q - 1) + q**i * (m + 1) - q**i
            if lead >= W and i > 0:
                break
            term = (pit ** (q**i)) * (RationalFunction(Poly.one(field), carlitz_D(i, field)).to_laurent(W) * PrecLaurent.monomial(field, q**i * (m + 1), W))
            right = term if right is None else right + term
            i += 1
        if _agree(left, right, P) is not True:
            exp_ok = False
    return {"j": j, "P": P, "residue": residue_ok is True, "exp_coefficients": exp_ok, "pass": residue_ok is True and exp_ok}


# ---------------------------------------------------------------------------
# digit principle
# ---------------------------------------------------------------------------


def beta_N(N, field, B=None):
    """(-1)^{(s-1)/(q-1)} B_N(theta, theta), s = l_q(N)."""
    from .bnpoly import compute_BN

    q = field.q
    s = digit_sum(N, q)
    poly = (compute_BN(N, field).poly if B is None else B).monomial_map(1, 1)
    return -poly if ((s - 1) // (q - 1)) % 2 else poly


def verify_digit_principle(N, P, field, D=None, budget=DEFAULT_BUDGET):
    """Compare delta_N / pi~ with the digit-principle products.

    ``printed``: beta_N Pi(N)/Pi([N/q])^q prod_{k>=1} (delta_{q^k}/pi~)^{n_k}.
    ``residue``: (-1)^s beta_N Pi(N) pi~^{-N}, the value obtained by evaluating
    the factorisation of L_N at t = theta through the omega residues.
    The two differ by (-1)^s pi~^{n_0}, which the report also checks; ``pass``
    refers to the residue form.
    """
    q, p = field.q, field.p
    digits = base_digits(N, q)
    s = sum(digits)
    if N < q or (N - 1) % (q - 1) or s < q:
        raise ValueError("need N >= q, N = 1 mod (q-1) and l_q(N) >= q")
    beta = beta_N(N, field)
    fact = carlitz_factorial(N, field)
    # pi~ powers get multiplied by polynomials of large degree; delta itself only needs P
    W = P + N * q // (q - 1) + fact.deg + beta.deg + 4 * q + 8
    delta = delta_bruteforce(N, D, P + 2, field, budget)
    pit = _pi_tilde(field, W)
    lhs = LambdaLaurent.from_grade(field, 0, delta.value) * pit.inv()

    quotient = RationalFunction(fact, carlitz_factorial(N // q, field) ** q)
    printed = LambdaLaurent.from_grade(field, 0, (quotient.to_laurent(W) * beta))
    for k, nk in enumerate(digits):
        if k == 0 or not nk:
            continue
        dk = delta_closed(k, W, field)
        printed = printed * (LambdaLaurent.from_grade(field, 0, dk.value) * pit.inv()) ** nk
    residue = LambdaLaurent.from_grade(field, 0, PrecLaurent.from_poly(beta * fact, W)) * pit ** (-N)
    if s % 2 and p != 2:
        residue = -residue
    target = P
    res_ok = _agree(lhs, residue, target)
    printed_ok = _agree(lhs, printed, target)
    # printed / residue = (-1)^s pi~^{n_0}
    n0 = digits[0]
    shifted = lhs * pit**n0
    if s % 2 and p != 2:
        shifted = -shifted
    ratio_ok = _agree(shifted, printed, target)
    return {
        "N": N,
        "q": q,
        "precision": target,
        "delta_precision": delta.precision,
        "depth": delta.depth,
        "residue_form": res_ok,
        "printed_form": printed_ok,
        "printed_over_residue_is_sign_pi_n0": ratio_ok,
        "pass": res_ok is True,
    }


__all__ = [
    "DeltaValue",
    "beta_N",
    "delta_bruteforce",
    "delta_closed",
    "delta_layer",
    "delta_layer_direct",
    "delta_one_reference",
    "layer_lower_bound",
    "omega_residue_check",
    "tail_bound",
    "verify_digit_principle",
]
