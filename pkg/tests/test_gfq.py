import numpy as np
import pytest
from hypothesis import given, strategies as st

from exzeros.gfq import (
    CONWAY,
    FieldError,
    FqElement,
    enumerate_monic,
    field_construct,
    field_from_q,
    is_irreducible_fp,
    monic_array,
    prime_factor_power,
)

QS = sorted(CONWAY)


def elements(q):
    return st.integers(0, q - 1)


@pytest.mark.parametrize("q", QS)
def test_tables_form_a_field(q):
    F = field_from_q(q)
    codes = np.arange(q)
    # additive group
    assert all(sorted(F.add_table[a]) == list(range(q)) for a in codes)
    # multiplicative group on nonzero codes
    for a in range(1, q):
        assert sorted(F.mul_table[a, 1:]) == list(range(1, q))
        assert F.mul(a, F.inv(a)) == 1
    assert (F.mul_table[0] == 0).all()


@pytest.mark.parametrize("q", QS)
def test_prime_subfield_codes_are_residues(q):
    F = field_from_q(q)
    for a in range(F.p):
        for b in range(F.p):
            assert F.add(a, b) == (a + b) % F.p
            assert F.mul(a, b) == (a * b) % F.p


@pytest.mark.parametrize("q", QS)
def test_frobenius_is_additive_and_fixes_prime_field(q):
    F = field_from_q(q)
    fr = F.frobenius_table
    for a in range(q):
        assert fr[a] == F.vpow(np.array([a]), F.p)[0]
        for b in range(q):
            assert fr[F.add(a, b)] == F.add(int(fr[a]), int(fr[b]))
    assert list(fr[: F.p]) == list(range(F.p))


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25])
def test_every_element_satisfies_x_to_the_q(q):
    F = field_from_q(q)
    codes = np.arange(q)
    assert np.array_equal(F.vpow(codes, q), codes)


@given(st.sampled_from(QS).flatmap(lambda q: st.tuples(st.just(q), elements(q), elements(q), elements(q))))
def test_distributive_and_associative(args):
    q, a, b, c = args
    F = field_from_q(q)
    x, y, z = (FqElement(F, v) for v in (a, b, c))
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert (x - y) + y == x
    if b:
        assert (x / y) * y == x


def test_construct_validation():
    with pytest.raises(FieldError):
        field_construct(4)
    with pytest.raises(FieldError):
        field_construct(2, 2, (1, 0, 1))  # u^2 + 1 = (u + 1)^2
    with pytest.raises(FieldError):
        field_construct(2, 2, (1, 1))
    with pytest.raises(FieldError):
        field_from_q(6)
    with pytest.raises(FieldError):
        prime_factor_power(12)
    assert prime_factor_power(27) == (3, 3)


def test_nonconway_modulus_gives_isomorphic_field():
    F = field_construct(3, 2, (1, 0, 1))  # u^2 + 1 is irreducible mod 3
    assert F.q == 9
    assert is_irreducible_fp((1, 0, 1), 3)
    assert all(F.mul(a, F.inv(a)) == 1 for a in range(1, 9))


def test_monic_enumeration_is_ordered_and_complete():
    F = field_from_q(3)
    M = monic_array(F, 2)
    assert M.shape == (9, 3)
    assert (M[:, -1] == 1).all()
    assert [tuple(r[:-1]) for r in M] == list(enumerate_monic(F, 2))
    assert len({tuple(r) for r in M}) == 9
