import pytest

from exzeros import digits
from exzeros.bernoulli import bracket
from exzeros.gfq import field_from_q
from exzeros.polyseries import Poly, RationalFunction


@pytest.mark.parametrize("q", [2, 3])
def test_layer_of_log_derivative(q):
    # sum over monic a of degree n of a'/a is -1/[n]
    F = field_from_q(q)
    for n in range(1, 4):
        lay = digits.delta_layer(1, n, 30, F)
        ref = -RationalFunction(Poly.one(F), bracket(n, F)).to_laurent(30)
        assert lay.agrees_with(ref)


@pytest.mark.parametrize("q,N", [(2, 1), (2, 3), (2, 5), (2, 7), (3, 1), (3, 5), (3, 7), (5, 5)])
def test_batched_layers_match_direct(q, N):
    F = field_from_q(q)
    for k in range(1, 4 if q < 5 else 3):
        assert digits.delta_layer(N, k, 25, F).agrees_with(digits.delta_layer_direct(N, k, 25, F))


@pytest.mark.parametrize("q,N", [(2, 3), (2, 7), (3, 5), (3, 7), (2, 11)])
def test_layer_bound_is_a_lower_bound(q, N):
    F = field_from_q(q)
    for k in range(1, 5 if q == 2 else 4):
        lay = digits.delta_layer_direct(N, k, 200, F)
        bound = digits.layer_lower_bound(k, N, q, F.p)
        assert lay.is_zero() or lay.valuation >= bound


def test_delta_one():
    F = field_from_q(2)
    dv = digits.delta_bruteforce(1, 4, 40, F)
    ref = digits.delta_one_reference(4, 40, F)
    P = min(dv.precision, ref.prec)
    assert dv.value.truncate(P).agrees_with(ref.truncate(P))


@pytest.mark.parametrize("q,j", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_closed_forms(q, j):
    F = field_from_q(q)
    closed = digits.delta_closed(j, 20, F)
    brute = digits.delta_bruteforce(q**j, None, 20, F)
    assert brute.precision >= 20
    assert closed.value.agrees_with(brute.value)


def test_closed_form_j1_is_pi_power():
    from exzeros.bernoulli import pi_power

    F = field_from_q(3)
    assert digits.delta_closed(1, 20, F).value.agrees_with(pi_power(1 - 3, 20, F))


def test_precision_monotone_in_depth():
    F = field_from_q(2)
    precs = [digits.delta_bruteforce(7, D, 60, F).precision for D in range(1, 6)]
    assert precs == sorted(precs)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_omega_residues(j):
    rep = digits.omega_residue_check(j, 16, field_from_q(2))
    assert rep["residue"] and rep["exp_coefficients"]


@pytest.mark.parametrize("q,N", [(2, 3), (2, 7), (3, 7), (2, 13), (3, 17)])
def test_digit_principle(q, N):
    rep = digits.verify_digit_principle(N, 20, field_from_q(q))
    assert rep["pass"]
    assert rep["printed_over_residue_is_sign_pi_n0"]


def test_digit_principle_rejects_small_N():
    with pytest.raises(ValueError):
        digits.verify_digit_principle(2, 20, field_from_q(3))
