from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from exzeros.gfq import field_from_q
from exzeros.polyseries import (
    BiPoly,
    LambdaLaurent,
    MultiPoly,
    NewtonPolygon,
    Poly,
    PrecLaurent,
    PrecisionError,
    RationalFunction,
    elementary_symmetric,
    poly_gcd,
    poly_xgcd,
    polygon_in_t,
    squarefree_in_t,
)

QS = [2, 3, 4, 5, 9]


@st.composite
def polys(draw, q=None, max_deg=8):
    q = draw(st.sampled_from(QS)) if q is None else q
    F = field_from_q(q)
    c = draw(st.lists(st.integers(0, q - 1), max_size=max_deg + 1))
    return Poly(F, c)


@st.composite
def poly_triples(draw):
    q = draw(st.sampled_from(QS))
    return draw(polys(q)), draw(polys(q)), draw(polys(q))


@given(poly_triples())
def test_ring_axioms(abc):
    a, b, c = abc
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert (a - b) + b == a


@given(poly_triples())
def test_division_and_xgcd(abc):
    a, b, _ = abc
    assume(not b.is_zero())
    qt, r = a.divmod(b)
    assert qt * b + r == a
    assert r.is_zero() or r.deg < b.deg
    g, s, t = poly_xgcd(a, b)
    assert s * a + t * b == g
    assert g == poly_gcd(a, b)
    assert (a % g).is_zero() and (b % g).is_zero()


@given(polys(max_deg=5), st.integers(0, 6))
def test_pow_and_frobenius(a, n):
    ref = Poly.one(a.field)
    for _ in range(n):
        ref = ref * a
    assert a**n == ref
    # (sum c_i x^i)^p = sum c_i^p x^{ip}
    assert a.frobenius_power() == a ** a.field.p


def test_rational_function_normalization():
    F = field_from_q(3)
    x = Poly.x(F)
    f = RationalFunction(x * x - 1, (x - 1).scale(2))
    assert f.den == Poly.one(F)
    assert f.num == (x + 1).scale(F.inv(2))
    assert (f * f.inv()) == RationalFunction.from_int(F, 1)
    assert RationalFunction(Poly.one(F), x**3 + x).valuation() == 3


@given(poly_triples())
def test_laurent_expansion_roundtrip(abc):
    a, b, _ = abc
    assume(not b.is_zero())
    f = RationalFunction(a, b)
    L = f.to_laurent(12)
    back = L * PrecLaurent.from_poly(b, 12 + b.deg)
    assert back.agrees_with(PrecLaurent.from_poly(a, 12))


@given(polys(max_deg=5), st.integers(-4, 4))
def test_laurent_inverse_and_powers(a, m):
    assume(not a.is_zero())
    P = 20
    x = PrecLaurent.from_poly(a, P)
    one = PrecLaurent.one(a.field, P)
    assert (x * x.inv()).agrees_with(one)
    y = x**m
    if m >= 0:
        assert y.agrees_with(PrecLaurent.from_poly(a**m, P))
    else:
        assert (y * x ** (-m)).agrees_with(one)
    # shift(m) multiplies by theta^m
    assert x.shift(m).agrees_with(x * PrecLaurent.monomial(a.field, -m, P + abs(m) + a.deg))


def test_precision_is_tracked():
    F = field_from_q(2)
    x = PrecLaurent(F, -2, 5, [1, 0, 1])
    assert x.valuation == -2 and x.prec == 5
    y = x * x
    assert y.prec == 3 and y.order == -4
    assert x.truncate(3).prec == 3


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_lambda_relation(q):
    F = field_from_q(q)
    lam = LambdaLaurent.lam(F, 10)
    minus_theta = LambdaLaurent.from_grade(F, 0, -PrecLaurent.monomial(F, -1, 10))
    assert (lam ** (q - 1)).agrees_with(minus_theta)
    assert (lam * lam.inv()).agrees_with(LambdaLaurent.from_grade(F, 0, PrecLaurent.one(F, 10)))


def test_newton_polygon_basic():
    NP = NewtonPolygon.from_points([(0, 0), (1, 5), (2, 1), (3, 3), (4, 0)])
    assert NP.vertices == [(0, 0), (4, 0)]
    NP = NewtonPolygon.from_points([(0, 4), (1, 1), (3, 0)])
    assert NP.segments() == [(Fraction(-3), 1), (Fraction(-1, 2), 2)]
    assert NP.root_valuations() == [(3, 1), (Fraction(1, 2), 2)]


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=6))
def test_polygon_of_product_of_linear_factors(vals):
    # prod (t - theta^{-v}) has exactly these root valuations
    F = field_from_q(3)
    f = BiPoly.one(F)
    for v in vals:
        # theta^a t - theta^b has the root theta^(b - a), of valuation a - b = v
        a, b = max(v, 0), max(-v, 0)
        f = f * BiPoly.from_terms(F, [(1, a, 1), (0, b, 2)])
    got = sorted((Fraction(v), w) for v, w in polygon_in_t(f).root_valuations())
    expect = sorted((Fraction(v), vals.count(v)) for v in set(vals))
    assert got == expect


def test_bipoly_swap_and_degrees():
    F = field_from_q(2)
    f = BiPoly.from_terms(F, [(6, 0, 1), (5, 0, 1), (3, 0, 1), (0, 1, 1)])
    assert (f.deg_t, f.deg_theta, f.total_degree()) == (6, 1, 6)
    g = f.swap()
    assert (g.deg_t, g.deg_theta) == (1, 6)
    assert g.swap() == f


@pytest.mark.parametrize("q", [2, 3])
def test_squarefree_in_t_handles_p_th_powers(q):
    F = field_from_q(q)
    t_p_plus_theta = BiPoly.from_terms(F, [(q, 0, 1), (0, 1, 1)])
    assert squarefree_in_t(t_p_plus_theta)  # inseparable in t but squarefree over F_q(theta)
    lin = BiPoly.from_terms(F, [(1, 0, 1), (0, 1, 1)])
    assert not squarefree_in_t(lin * lin)
    assert not squarefree_in_t(t_p_plus_theta * t_p_plus_theta)
    assert squarefree_in_t(lin * BiPoly.from_terms(F, [(1, 0, 1), (0, 2, 1)]))


def test_symmetric_functions():
    F = field_from_q(3)
    e2 = elementary_symmetric(F, 4, 2)
    assert e2.is_symmetric()
    assert len(e2.terms) == 6
    th = MultiPoly.theta(F, 4)
    assert (th + e2).is_monic_in_theta()
