from fractions import Fraction

import numpy as np
import pytest

from exzeros import lseries
from exzeros.gfq import field_from_q, monic_array
from exzeros.polyseries import BiPoly, Poly, PrecLaurent
from exzeros.powersums import deg_S, digit_sum


@pytest.mark.parametrize("q", [2, 3, 4])
def test_alpha_zero_is_one(q):
    F = field_from_q(q)
    for N in (1, 2, 5, 13):
        assert lseries.alpha_coeff(0, N, F) == Poly.one(F, "t")


@pytest.mark.parametrize("q", [2, 3])
def test_alpha_degrees_match_power_sums(q):
    F = field_from_q(q)
    for N in range(2, 40):
        if (N - 1) % (q - 1) or digit_sum(N, q) < q:
            continue
        r = (digit_sum(N, q) - q) // (q - 1)
        T = lseries.lambda_truncation(N, r, F)
        for i in range(1, r + 1):
            assert T.alpha(i).deg == deg_S(i, N, F)


def test_alpha_for_682():
    F = field_from_q(4)
    assert lseries.alpha_coeff(2, 682, F).deg == 680


@pytest.mark.parametrize("q", [2, 3, 4])
def test_degree_bound(q):
    F = field_from_q(q)
    for N in range(1, 30):
        T = lseries.lambda_truncation(N, 6, F)
        for i, d in enumerate(T.degrees()):
            if d >= 0:
                assert d <= lseries.alpha_degree_bound(i, N, q)


def test_n1_polygon_values():
    # q = 2, N = 1: v(alpha_d) = q(q^d - 1)/(q - 1) gives (0,0), (1,2), (2,6)
    F = field_from_q(2)
    NP = lseries.l1_polygon(2, 12, F)
    assert NP.vertices == [(0, 0), (1, 2), (2, 6)]


def test_l1_identities():
    F2 = field_from_q(2)
    th = Poly.x(F2)
    assert lseries.ell(1, F2) == th + th**2
    for q, d in [(2, 0), (2, 1), (2, 3), (3, 2), (4, 1)]:
        rep = lseries.l1_identities(d, field_from_q(q))
        assert rep["sum_inverse"] and rep["sum_ratio"]


@pytest.mark.parametrize("q", [2, 3])
def test_pellarin_identity(q):
    assert lseries.pellarin_identity_check(20, 3, field_from_q(q))["pass"]


def _curly_L_oracle(N, P, field):
    """Naive sum of a(theta)^N * (1/a(t)) with 1/a(t) from Laurent series inversion."""
    rows = [Poly.zero(field) for _ in range(P)]
    for d in range(P):
        for row in monic_array(field, d):
            inv = PrecLaurent.from_poly(Poly(field, row, "t"), P).inv()
            aN = Poly(field, row) ** N
            for j in range(P):
                c = int(inv.coeff(j))
                if c:
                    rows[j] = rows[j] + aN.scale(c)
    return rows


@pytest.mark.parametrize("q,N,P", [(2, 3, 4), (2, 7, 5), (3, 5, 3)])
def test_curly_L_against_naive_sum(q, N, P):
    F = field_from_q(q)
    L = lseries.curly_L(N, P, F)
    assert L.coeffs[0] == Poly.one(F)
    assert L.coeffs == _curly_L_oracle(N, P, F)


@pytest.mark.parametrize("q,N", [(2, 3), (2, 7), (3, 7), (2, 11), (3, 13)])
def test_fitting_identity(q, N):
    assert lseries.verify_fitting_identity(N, 8, field_from_q(q))["pass"]


def test_fitting_identity_detects_wrong_B():
    F = field_from_q(2)
    wrong = BiPoly.from_terms(F, [(0, 1, 1), (1, 0, 1)])
    rep = lseries.verify_fitting_identity(7, 8, F, B=wrong)
    assert not rep["pass"] and rep["mismatch_rows"]


def test_fitting_identity_rejects_bad_N():
    with pytest.raises(ValueError):
        lseries.verify_fitting_identity(4, 8, field_from_q(3))


def test_exp_coefficients():
    F = field_from_q(2)
    e = lseries.exp_phi_coefficients(3, 4, F)
    assert e[0].num == BiPoly.one(F) and e[0].den == BiPoly.one(F)
    t = BiPoly.from_poly_t(Poly.x(F, "t"))
    th = BiPoly.from_poly_theta(Poly.x(F))
    assert e[1].num == (th - t) * (th**2 - t)
    assert e[1].den == t - t**2
    for q, N in [(2, 3), (2, 7), (3, 5), (4, 5)]:
        F = field_from_q(q)
        assert all(lseries.check_exp_functional_equation(lseries.exp_phi_coefficients(N, 3, F), N, F))


@pytest.mark.parametrize("q,N", [(2, 7), (3, 13), (2, 23)])
def test_certified_segments_are_stable(q, N):
    F = field_from_q(q)
    segs = lseries.certified_segments(N, 4, F)
    assert segs
    for slope, width in segs:
        assert width >= 1
