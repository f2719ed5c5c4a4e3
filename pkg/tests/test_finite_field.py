import pytest
from hypothesis import given, strategies as st

from conftest import elements, fields
from valdef.finite_field import (artin_schreier, ff_arith, find_irreducible, frobenius_and_proot,
                                 is_irreducible_mod_p, least_prime_not_dividing, parse_field_spec,
                                 poly_roots_in_field)


def test_f4_gen_squared():
    F = parse_field_spec("2^2")
    assert F.modulus == (1, 1, 1)
    g = F.gen
    assert g * g == F.parse_element("g+1")


def test_f5_addition():
    F = parse_field_spec("5")
    assert ff_arith(F.element(2), F.element(4), "add") == F.element(1)


@given(st.data())
def test_multiplicative_identity(data):
    F = data.draw(fields)
    a = data.draw(elements(F))
    assert ff_arith(a, F.one, "mul") == a


def test_frobenius_examples():
    F = parse_field_spec("4")
    assert frobenius_and_proot(F.zero) == (F.zero, F.zero)
    assert F.gen.frobenius() == F.parse_element("g+1")


@given(st.data())
def test_proot_inverts_frobenius(data):
    F = data.draw(fields)
    a = data.draw(elements(F))
    fr, _ = frobenius_and_proot(a)
    assert frobenius_and_proot(fr)[1] == a
    assert fr == a ** F.p


@given(st.data())
def test_field_axioms(data):
    F = data.draw(fields)
    a, b, c = (data.draw(elements(F)) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a - a == F.zero
    if b:
        assert ff_arith(ff_arith(a, b, "div"), b, "mul") == a
        assert b * b.inverse() == F.one


@pytest.mark.parametrize("p,d,coeffs", [(2, 2, (1, 1, 1)), (2, 3, (1, 1, 0, 1)), (3, 1, (0, 1))])
def test_find_irreducible(p, d, coeffs):
    assert find_irreducible(p, d).coeffs == coeffs


def test_find_irreducible_is_smallest():
    # the other irreducible cubic over F_2 is x^3 + x^2 + 1, with larger index
    assert is_irreducible_mod_p((1, 0, 1, 1), 2)
    assert find_irreducible(2, 3).coeffs == (1, 1, 0, 1)


@pytest.mark.parametrize("k,expected", [(1, 2), (2, 3), (6, 5), (30, 7), (210, 11)])
def test_least_prime_not_dividing(k, expected):
    assert least_prime_not_dividing(k) == expected


def test_artin_schreier():
    assert artin_schreier(2).coeffs == (1, 1, 1)
    assert artin_schreier(3).coeffs == (2, 2, 0, 1)
    F = parse_field_spec("5")
    f = artin_schreier(5)
    assert all(f(c) == F.element(-1) for c in F.elements())


def test_roots():
    F4 = parse_field_spec("4")
    x_q_minus_x = [0, F4.q - 1] + [0] * (F4.q - 2) + [1]
    assert poly_roots_in_field(x_q_minus_x, F4) == F4.elements()
    assert poly_roots_in_field(find_irreducible(2, 2), parse_field_spec("2")) == []
    F2 = parse_field_spec("2")
    df = find_irreducible(2, 3).derivative()
    assert df == [1, 0, 1]
    assert poly_roots_in_field(df, F2) == [F2.one]


@pytest.mark.parametrize("spec,msg", [("6^1", "6 is not prime"), ("6", "6 is not a prime power"),
                                      ("2^x", "bad field spec"), ("2^17", "exceed")])
def test_bad_field_specs(spec, msg):
    with pytest.raises(ValueError, match=msg):
        parse_field_spec(spec)


def test_field_spec_forms_agree():
    assert parse_field_spec("9") == parse_field_spec("3^2")
    assert str(parse_field_spec("8")) == "2^3"


def test_element_literals():
    F = parse_field_spec("9")
    assert F.parse_element("g^2") == F.gen * F.gen
    assert F.parse_element("2*g + 1").index == 1 + 2 * 3
    with pytest.raises(ValueError):
        F.parse_element("2/2")


@given(st.data())
def test_index_round_trip(data):
    F = data.draw(fields)
    n = data.draw(st.integers(0, F.q - 1))
    assert F.from_index(n).index == n
