import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cslnc.field import (
    build_ext_field,
    check_prime,
    euler_totient,
    field_for,
    is_irreducible,
    mult_order,
    poly_gcd,
    primitive_root_of_unity,
    scalar_L_in_GFp,
    smallest_irreducible,
)

FIELDS = [(2, 1), (2, 3), (2, 4), (2, 6), (3, 1), (3, 2), (3, 4), (5, 1), (5, 2), (7, 1)]


def _order_brute(p, L):
    e, v = 1, p % L
    while v != 1 % L:
        v = v * p % L
        e += 1
    return e


@pytest.mark.parametrize("p,L,want", [(2, 5, 4), (2, 1, 1), (2, 9, 6), (3, 5, 4), (2, 7, 3), (5, 13, 4)])
def test_mult_order(p, L, want):
    assert mult_order(p, L) == want == _order_brute(p, L)


def test_mult_order_rejects_common_factor():
    with pytest.raises(ValueError):
        mult_order(3, 9)


@pytest.mark.parametrize("L,want", [(9, 6), (1, 1), (15, 8), (13, 12)])
def test_euler_totient(L, want):
    assert euler_totient(L) == want


@pytest.mark.parametrize("p,L,want", [(2, 5, (1, 1)), (3, 5, (2, 2)), (5, 7, (2, 3))])
def test_scalar_L(p, L, want):
    assert scalar_L_in_GFp(p, L) == want


def test_check_prime():
    assert check_prime(7) == 7
    for bad in (1, 4, 9, 15):
        with pytest.raises(ValueError):
            check_prime(bad)


def test_smallest_irreducible_is_smallest():
    # x^4 + x + 1 over GF(2) and x^2 + 1 over GF(3)
    assert smallest_irreducible(2, 4) == (1, 1, 0, 0, 1)
    assert smallest_irreducible(3, 2) == (1, 0, 1)
    assert is_irreducible([1, 1, 0, 0, 1], 2)
    assert not is_irreducible([1, 0, 0, 0, 1], 2)  # (x + 1)^4


@pytest.mark.parametrize("p,m", FIELDS)
def test_generator_has_full_order(p, m):
    F = build_ext_field(p, m)
    assert F.mult_order_of(F.generator) == F.order - 1


@pytest.mark.parametrize("p,m", FIELDS)
def test_log_exp_tables_are_inverse(p, m):
    F = build_ext_field(p, m)
    for a in range(1, F.order):
        assert F.pow(F.generator, F.log_table[a]) == a


@pytest.mark.parametrize("p,m", FIELDS)
def test_addition_matches_digitwise(p, m):
    F = build_ext_field(p, m)
    rng = np.random.default_rng(0)
    for a, b in rng.integers(0, F.order, (200, 2)):
        want = [(x + y) % p for x, y in zip(F.coeffs(int(a)), F.coeffs(int(b)))]
        assert F.coeffs(F.add(int(a), int(b))) == tuple(want)


@st.composite
def field_and_elems(draw, n=3):
    p, m = draw(st.sampled_from(FIELDS))
    F = build_ext_field(p, m)
    return F, [draw(st.integers(0, F.order - 1)) for _ in range(n)]


@given(field_and_elems())
def test_field_axioms(fe):
    F, (a, b, c) = fe
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0
    assert F.sub(F.add(a, b), b) == a
    if a:
        assert F.mul(a, F.pow(a, F.order - 2)) == 1
        assert F.mul(a, F.inv(a)) == 1


@given(field_and_elems(2))
def test_frobenius(fe):
    F, (a, b) = fe
    p = F.p
    assert F.pow(F.add(a, b), p) == F.add(F.pow(a, p), F.pow(b, p))


@given(field_and_elems(6))
def test_vector_ops_match_scalar(fe):
    F, vals = fe
    a, b = np.array(vals[:3]), np.array(vals[3:])
    assert F.vadd(a, b).tolist() == [F.add(int(x), int(y)) for x, y in zip(a, b)]
    assert F.vmul(a, b).tolist() == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert F.vsub(a, b).tolist() == [F.sub(int(x), int(y)) for x, y in zip(a, b)]
    assert F.vneg(a).tolist() == [F.neg(int(x)) for x in a]


@pytest.mark.parametrize("p,L", [(2, 5), (2, 9), (2, 7), (3, 5), (5, 7), (2, 15), (3, 13), (2, 1)])
def test_primitive_root_of_unity(p, L):
    F, beta = field_for(p, L)
    assert F.m == mult_order(p, L)
    powers = [beta**j for j in range(L)]
    assert len(set(powers)) == L
    assert beta**L == F.elem(1)
    for pw in powers:
        assert pw**L == F.elem(1)


def test_primitive_root_l1_is_one():
    F = build_ext_field(2, 1)
    assert primitive_root_of_unity(F, 1) == F.elem(1)


def test_poly_gcd_monic():
    # gcd((x+1)^2, x^2 - 1) = x + 1 over GF(3)
    assert poly_gcd([1, 2, 1], [2, 0, 1], 3) == [1, 1]
