import pytest
from hypothesis import given, strategies as st

from exzeros import bernoulli as bc
from exzeros.bnpoly import compute_BN
from exzeros.gfq import field_from_q
from exzeros.lseries import ell
from exzeros.polyseries import Poly, PrecLaurent, RationalFunction
from exzeros.powersums import BudgetExceeded


def theta(F):
    return Poly.x(F)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_carlitz_data(q):
    F = field_from_q(q)
    th = theta(F)
    for k in range(4):
        assert bc.bracket(k, F) == th ** (q**k) - th
    for i in range(4):
        assert bc.carlitz_D(i, F).deg == i * q**i
    for d in range(4 if q < 4 else 3):
        assert bc.carlitz_D(d, F) == bc.product_of_monics(d, F)
    assert bc.CarlitzData(F).ell(2) == ell(2, F)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_carlitz_factorial(q):
    F = field_from_q(q)
    assert all(bc.carlitz_factorial(N, F) == Poly.one(F) for N in range(q))
    assert bc.carlitz_factorial(q, F) == bc.bracket(1, F)
    for N in range(1, 200):
        ratio = Poly.one(F)
        digits = []
        m = N
        while m:
            m, r = divmod(m, q)
            digits.append(r)
        for k, nk in enumerate(digits[1:], start=1):
            ratio = ratio * bc.bracket(k, F) ** nk
        assert bc.carlitz_factorial(N, F) == bc.carlitz_factorial(N // q, F) ** q * ratio


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_bc_small_values_and_zero_pattern(q):
    F = field_from_q(q)
    B = bc.bc_series(4 * (q - 1) + 3, F)
    assert B[0] == RationalFunction.from_int(F, 1)
    th = theta(F)
    assert B[q - 1] == RationalFunction(Poly.one(F), th - th**q)
    for n in range(1, len(B)):
        assert B[n].is_zero() == (n % (q - 1) != 0)


def test_bc_cap():
    with pytest.raises(BudgetExceeded):
        bc.bc_series(bc.BC_CAP + 1, field_from_q(2))


@pytest.mark.parametrize(
    "q,N,d",
    [(2, 7, 3), (2, 7, 4), (2, 7, 5), (3, 13, 3), (3, 17, 3), (2, 11, 4), (3, 7, 3)],
)
def test_bc_via_BN(q, N, d):
    F = field_from_q(q)
    assert bc.bc_via_BN(N, d, F) == bc.bc_number(q**d - N, F)


def test_bc_via_BN_named_examples():
    F2, F3 = field_from_q(2), field_from_q(3)
    assert bc.bc_via_BN(7, 4, F2) == bc.bc_series(16, F2)[9]
    assert bc.bc_via_BN(13, 3, F3) == bc.bc_series(27, F3)[14]


@pytest.mark.parametrize("q,n,d", [(2, 1, 3), (2, 3, 2), (3, 2, 2), (3, 4, 1), (4, 3, 1)])
def test_zeta_layers(q, n, d):
    F = field_from_q(q)
    P = d * n + 12
    layer = bc.zeta_layer(n, d, P, F)
    assert layer.agrees_with(bc.zeta_layer_bruteforce(n, d, P, F))
    assert layer.is_zero() or layer.valuation >= bc.zeta_tail_onset(n, d, q)


@pytest.mark.parametrize("q", [2, 3])
def test_zeta_route(q):
    F = field_from_q(q)
    for n in (q - 1, 2 * (q - 1)):
        exact = bc.bc_number(n, F)
        v = exact.valuation()
        z = bc.bc_from_zeta(n, v + 20, F)
        assert z.prec >= v + 20
        assert z.agrees_with(exact.to_laurent(v + 20))


@pytest.mark.parametrize("q", [2, 3, 4])
def test_pi_power_inverse(q):
    F = field_from_q(q)
    prod = bc.pi_power(q - 1, 30, F) * bc.pi_power(-(q - 1), 30, F)
    assert prod.truncate(30).agrees_with(PrecLaurent.one(F, 30))
    with pytest.raises(ValueError):
        bc.pi_power(1, 10, F) if q > 2 else bc.pi_power(0.5, 10, F)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_irreducible_counts(q):
    F = field_from_q(q)
    for d in range(1, 5 if q < 4 else 4):
        Ps = bc.monic_irreducibles(F, d)
        assert len(Ps) == bc.count_irreducibles(q, d)
        assert all(bc.is_irreducible(P) for P in Ps[:20])
        codes = [tuple(P.c[::-1]) for P in Ps]
        assert len(set(codes)) == len(codes)


def test_reduce_mod_P():
    F = field_from_q(2)
    th = theta(F)
    P = th**2 + th + 1
    x = RationalFunction(Poly.one(F), th - th**2)
    r = bc.reduce_mod_P(x, P)
    assert (r * (th - th**2)) % P == Poly.one(F)
    with pytest.raises(bc.NotIntegral):
        bc.reduce_mod_P(RationalFunction(Poly.one(F), P), P)
    with pytest.raises(ValueError):
        bc.reduce_mod_P(x, th**2 + 1)


@pytest.mark.parametrize("q", [2, 3])
def test_von_staudt_integrality(q):
    # BC_{q^d - N} is P-integral for deg P = d and q^d > N
    F = field_from_q(q)
    for d in (2, 3):
        for n in range(1, min(q**d - 1, bc.BC_CAP + 1)):
            x = bc.bc_number(n, F)
            for P in bc.monic_irreducibles(F, d):
                bc.reduce_mod_P(x, P, check_irreducible=False)


def test_nonvanishing_mod_primes_examples():
    F2, F3 = field_from_q(2), field_from_q(3)
    rep = bc.verify_theorem_1_2(7, 4, F2)
    assert len(rep["records"]) == 3
    assert all("bc_zero" in r and r["bc_zero"] == r["zero"] for r in rep["records"])
    assert rep["pass"]
    rep = bc.verify_theorem_1_2(7, 3, F3)
    assert rep["bnn_nonzero"] and rep["bnn_degree"] == 0
    B7 = compute_BN(7, F2).poly.monomial_map(1, 1)
    assert B7.deg < 14


@given(st.sampled_from([2, 3]), st.integers(2, 64), st.integers(1, 8))
def test_hypothesis_predicate(q, N, d):
    from exzeros.powersums import digit_sum

    assert bc.hypothesis_holds(N, d, q) == (q**d > N and d * (q - 1) >= (digit_sum(N, q) - 1) * N)
