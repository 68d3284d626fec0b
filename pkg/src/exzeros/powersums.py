"""Power sums S_d(N, k) = sum over monic a of degree d of a(t)^N a^k.

Two independent routes are provided: brute-force enumeration of A_{+,d}, and
the digit formula

    S_d(N, k) = (-1)^d * sum_{m in U_d(N, kbar)} C(N, m) t^{deg m}

where U_d(N, kbar) collects the compositions N = m_0 + ... + m_d without
p-digit carries and with m_n - kbar_n a non-negative multiple of q - 1 for
n < d.  C(N, m) mod p is a product of digitwise multinomials (Lucas).
"""

from dataclasses import dataclass
from functools import lru_cache
import itertools
import math

import numpy as np

from .gfq import monic_array
from .polyseries import Poly

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    pass


def check_budget(cost, budget, what):
    if budget is not None and cost > budget:
        raise BudgetExceeded(f"{what}: estimated cost {cost:.3g} exceeds budget {budget:.3g}")


def base_digits(n, b):
    """Base-b digits of n, least significant first ([] for n = 0)."""
    out = []
    while n:
        n, r = divmod(n, b)
        out.append(r)
    return out


def digit_sum(n, q):
    """Sum of the base-q digits of n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum(base_digits(n, q))


def digit_exponents(n, q):
    """e_1 <= e_2 <= ... with n = sum q^{e_i}."""
    out = []
    for pos, dgt in enumerate(base_digits(n, q)):
        out += [pos] * dgt
    return out


def kbar(k, q):
    """Least kb_n in [0, q) with k_n + kb_n a positive multiple of q - 1."""
    out = []
    for kn in k:
        if kn < 0:
            raise ValueError("exponents must be >= 0")
        r = (-kn) % (q - 1)
        if kn + r == 0:
            r = q - 1
        out.append(r)
    return tuple(out)


def weight(k):
    """w(k) = sum_j (d - j) k_j for k = (k_0, ..., k_{d-1})."""
    d = len(k)
    return sum((d - j) * kj for j, kj in enumerate(k))


@dataclass(frozen=True)
class Composition:
    m: tuple

    @property
    def d(self):
        return len(self.m) - 1

    @property
    def deg(self):
        return sum(n * mn for n, mn in enumerate(self.m))

    def __iter__(self):
        return iter(self.m)


def binom_mod_p(n, k, p):
    """Binomial coefficient mod p by Lucas' theorem."""
    if k < 0 or k > n:
        return 0
    out = 1
    while n or k:
        a, b = n % p, k % p
        if b > a:
            return 0
        out = out * math.comb(a, b) % p
        n //= p
        k //= p
    return out


def multinomial_mod_p(parts, p):
    """(sum parts)! / prod parts! mod p as a product of binomials of partial sums."""
    out = 1
    total = 0
    for x in parts:
        total += x
        out = out * binom_mod_p(total, x, p) % p
        if not out:
            return 0
    return out


@lru_cache(maxsize=None)
def _digit_compositions(n, parts, p):
    """All compositions of a single digit n into ``parts`` buckets, with multinomial mod p."""
    rows = [c for c in itertools.product(range(n + 1), repeat=parts) if sum(c) == n]
    arr = np.array(rows, dtype=np.int64).reshape(-1, parts)
    mult = np.array([math.factorial(n) // math.prod(math.factorial(x) for x in c) % p for c in rows], dtype=np.int64)
    return arr, mult


def distribution_count(d, N, p):
    return math.prod(math.comb(dg + d, d) for dg in base_digits(N, p))


@lru_cache(maxsize=256)
def carry_free_compositions(d, N, p, budget=DEFAULT_BUDGET):
    """All m in N^{d+1} summing to N without p-digit carries, with C(N, m) mod p.

    Built digit by digit: each base-p digit of N is split over the d+1
    buckets independently.  Returns read-only arrays (M, coeff).
    """
    check_budget(distribution_count(d, N, p) * (d + 1), budget, "digit distribution")
    M = np.zeros((1, d + 1), dtype=np.int64)
    coeff = np.ones(1, dtype=np.int64)
    for pos, dg in enumerate(base_digits(N, p)):
        if dg == 0:
            continue
        comp, mult = _digit_compositions(dg, d + 1, p)
        M = (M[:, None, :] + (p**pos) * comp[None, :, :]).reshape(-1, d + 1)
        coeff = (coeff[:, None] * mult[None, :] % p).reshape(-1)
    M.setflags(write=False)
    coeff.setflags(write=False)
    return M, coeff


def _membership_mask(M, kb, q):
    d = len(kb)
    mask = np.ones(M.shape[0], dtype=bool)
    for n in range(d):
        col = M[:, n]
        mask &= col >= kb[n]
        if q > 2:
            mask &= (col - kb[n]) % (q - 1) == 0
    return mask


def enumerate_U(d, N, kb, q, p=None, budget=DEFAULT_BUDGET):
    """U_d(N, kb) as an array of shape (count, d + 1)."""
    p = p or _prime_of(q)
    if len(kb) != d:
        raise ValueError("kbar must have length d")
    M, _ = carry_free_compositions(d, N, p, budget)
    return M[_membership_mask(M, kb, q)]


def is_member(m, N, kb, q, p=None):
    p = p or _prime_of(q)
    if sum(m) != N or any(x < 0 for x in m):
        return False
    digits = [base_digits(x, p) for x in m]
    width = max((len(x) for x in digits), default=0)
    total = [sum(x[i] if i < len(x) else 0 for x in digits) for i in range(width)]
    if any(v >= p for v in total):
        return False
    for n, kn in enumerate(kb):
        if m[n] < kn or (m[n] - kn) % (q - 1):
            return False
    return True


def _prime_of(q):
    for p in range(2, q + 1):
        if q % p == 0:
            return p
    raise ValueError(q)


def _degrees(M):
    return M @ np.arange(M.shape[1], dtype=np.int64)


def greedy_element(d, N, kb, q, p=None, budget=DEFAULT_BUDGET):
    """Element of U_d(N, kb) with (m_d, ..., m_1) lexicographically largest, or None.

    For q = p this is the explicit digit construction (smallest powers of p
    go to the lowest buckets); otherwise it is selected from the enumeration.
    """
    p = p or _prime_of(q)
    if q == p:
        ell = digit_sum(N, p)
        if sum(kb) > ell:
            return None
        e = digit_exponents(N, p)
        sig = [0] + list(itertools.accumulate(kb)) + [ell]
        m = tuple(sum(p ** e[i] for i in range(sig[n], sig[n + 1])) for n in range(d + 1))
        return Composition(m)
    U = enumerate_U(d, N, kb, q, p, budget)
    if U.shape[0] == 0:
        return None
    keys = tuple(U[:, n] for n in range(1, d + 1))  # lexsort: last key is primary
    best = np.lexsort(keys)[-1]
    return Composition(tuple(int(x) for x in U[best]))


def optimal_elements(d, N, kb, q, p=None, budget=DEFAULT_BUDGET):
    """All maximisers of deg m over U_d(N, kb)."""
    U = enumerate_U(d, N, kb, q, p, budget)
    if U.shape[0] == 0:
        return []
    deg = _degrees(U)
    return [Composition(tuple(int(x) for x in row)) for row in U[deg == deg.max()]]


def _poly_from_dense(field, c):
    return Poly(field, c, "t")


def power_sums_combinatorial(d, N, kbars, field, budget=DEFAULT_BUDGET):
    """S_d(N, .) for several kbar tuples at once; returns an int array (len(kbars), N*d + 1)."""
    p, q = field.p, field.q
    kbars = [tuple(kb) for kb in kbars]
    out = np.zeros((len(kbars), N * d + 1), dtype=np.int64)
    if d == 0:
        out[:, 0] = 1
        return out
    M, coeff = carry_free_compositions(d, N, p, budget)
    deg = _degrees(M)
    sign = 1 if d % 2 == 0 else p - 1
    width = N * d + 1
    uniq = {}
    for i, kb in enumerate(kbars):
        uniq.setdefault(kb, []).append(i)
    for kb, rows in uniq.items():
        if len(kb) != d:
            raise ValueError("kbar must have length d")
        mask = _membership_mask(M, kb, q)
        if mask.any():
            vals = np.bincount(deg[mask], weights=coeff[mask], minlength=width)
            res = np.rint(vals).astype(np.int64) % p * sign % p
            out[rows] = res
    return out


def power_sum_combinatorial(d, N, k, field, budget=DEFAULT_BUDGET):
    """S_d(N, k) via U_d(N, kbar) and Lucas coefficients."""
    k = tuple(k)
    if len(k) != d:
        raise ValueError("k must have length d")
    kb = kbar(k, field.q)
    return _poly_from_dense(field, power_sums_combinatorial(d, N, [kb], field, budget)[0])


@lru_cache(maxsize=64)
def _monic_powers(field, d, N):
    """(A, R): all monic a of degree d (codes) and the coefficient rows of a(t)^N."""
    A = monic_array(field, d)
    R = np.zeros((A.shape[0], N * d + 1), dtype=np.int64)
    for i, row in enumerate(A):
        c = (Poly(field, row, "t") ** N).c
        R[i, : c.size] = c
    A.setflags(write=False)
    R.setflags(write=False)
    return A, R


def power_sums_bruteforce(d, N, ks, field, budget=DEFAULT_BUDGET):
    """S_d(N, k) for several k by direct summation over A_{+,d}."""
    q = field.q
    check_budget(q**d * (N * d + 1) * max(len(ks), 1), budget, "brute-force power sum")
    A, R = _monic_powers(field, d, N)
    W = np.ones((len(ks), A.shape[0]), dtype=np.int64)
    for i, k in enumerate(ks):
        if len(k) != d:
            raise ValueError("k must have length d")
        for j, kj in enumerate(k):
            W[i] = field.vmul(W[i], field.vpow(A[:, j], kj))
    return field.matmul(W, R)


def power_sum_bruteforce(d, N, k, field, budget=DEFAULT_BUDGET):
    """S_d(N, k) = sum over a in A_{+,d} of a(t)^N a^k, by enumeration."""
    return _poly_from_dense(field, power_sums_bruteforce(d, N, [tuple(k)], field, budget)[0])


def S(d, N, field, budget=DEFAULT_BUDGET):
    """S_d(N) = sum over a in A_{+,d} of a(t)^N."""
    return power_sum_combinatorial(d, N, (0,) * d, field, budget)


def deg_S(d, N, field, budget=DEFAULT_BUDGET):
    """deg_t S_d(N), or None when S_d(N) = 0."""
    s = S(d, N, field, budget)
    return None if s.is_zero() else s.deg


def bockle_nonvanishing(d, N, q, p=None):
    """S_d(N) != 0  iff  d(q-1) <= min_i l_q(p^i N); the minimum is periodic in i with period e."""
    p = p or _prime_of(q)
    e = round(math.log(q, p))
    return d * (q - 1) <= min(digit_sum(p**i * N, q) for i in range(e))


def is_q_minimal(N, q, p=None):
    p = p or _prime_of(q)
    e = round(math.log(q, p))
    return digit_sum(N, q) // (q - 1) == min(digit_sum(p**i * N, q) // (q - 1) for i in range(e))
