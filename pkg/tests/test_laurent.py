from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import fields, series
from valdef.finite_field import parse_field_spec
from valdef.laurent import (INF, LaurentPoly, NoPthRoot, RatFunc, Region, in_region, parse_series,
                            pth_power_root, ramify, series_arith, valuation)

F2, F3, F4, F9 = (parse_field_spec(s) for s in ("2", "3", "4", "9"))


def S(text, field=F2, ram=1):
    return parse_series(text, field, ram)


def test_arith_examples():
    assert series_arith(S("t + t^2"), S("t"), "sub") == S("t^2")
    assert series_arith(S("1+t"), S("1+t"), "mul") == S("1 + t^2")
    z = series_arith(S("t^3 + 1"), S("0"), "mul")
    assert z.is_zero() and valuation(z) == INF


def test_valuation_examples():
    assert valuation(S("t^-2 + 1")) == -2
    assert valuation(S("0")) == INF
    assert valuation(S("t^{1/2} + t", ram=2)) == Fraction(1, 2)


def test_region_examples():
    assert in_region(S("t^2"), Region("B", 1))
    assert in_region(S("t"), Region("S", 1))
    assert in_region(S("1+t"), Region("Bbar", 1, S("1")))
    assert not in_region(S("1+t"), Region("B", 1, S("1")))
    with pytest.raises(ValueError):
        Region("ball", 0)


def test_ramify_examples():
    assert ramify(S("t"), 2) == S("t^{1/2}", ram=2)
    x = S("t^-1 + t^3")
    assert ramify(x, 1) == x


@given(st.data())
def test_ramify_scales_valuation(data):
    F = data.draw(fields)
    x = data.draw(series(F, nonzero=True))
    n = data.draw(st.integers(1, 4))
    assert valuation(ramify(x, n)) == valuation(x) / n


def test_pth_root_examples():
    assert pth_power_root(S("t^2")) == S("t")
    with pytest.raises(NoPthRoot) as err:
        pth_power_root(S("t"))
    assert err.value.exponent == 1
    x = S("g*t^4 + t^2", F4)
    assert pth_power_root(x) == S("(g+1)*t^2 + t", F4)


@given(st.data())
def test_pth_root_inverts_frobenius(data):
    F = data.draw(fields)
    x = data.draw(series(F))
    assert pth_power_root(x ** F.p) == x


def test_parse_examples():
    x = S("(g+1)*t^-2 + g + 2*t^3", F9)
    assert sorted(x.terms) == [-2, 0, 3]
    assert S("0").is_zero()
    y = S("t^{1/2}+t", ram=2)
    assert len(y.terms) == 2 and y.ram == 2
    assert S("t^(1/2)", ram=2) == S("t^{1/2}", ram=2)


def test_parse_errors():
    with pytest.raises(ValueError):
        S("t^{1/2}")  # ramification 1 declared
    with pytest.raises(ValueError):
        S("t +")
    with pytest.raises(ValueError):
        S("x")


@given(st.data())
def test_print_parse_round_trip(data):
    F = data.draw(fields)
    e = data.draw(st.sampled_from([1, 2, 3]))
    x = data.draw(series(F, ram=e))
    assert parse_series(str(x), F, e) == x


@given(st.data())
def test_ring_laws(data):
    F = data.draw(fields)
    x, y, z = (data.draw(series(F)) for _ in range(3))
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert (x - y) + y == x


@given(st.data())
def test_valuation_laws(data):
    F = data.draw(fields)
    x, y = data.draw(series(F, nonzero=True)), data.draw(series(F, nonzero=True))
    assert valuation(x * y) == valuation(x) + valuation(y)
    s = x + y
    assert valuation(s) >= min(valuation(x), valuation(y))
    if valuation(x) != valuation(y):
        assert valuation(s) == min(valuation(x), valuation(y))


@given(st.data())
def test_mixed_ramification(data):
    F = data.draw(fields)
    x = data.draw(series(F, ram=2))
    y = data.draw(series(F, ram=3))
    s = x + y
    assert s.ram in (1, 2, 3, 6)
    assert s - y == x


@given(st.data())
def test_ratfunc_exact_inverse(data):
    F = data.draw(fields)
    x = data.draw(series(F, nonzero=True))
    r = 1 / x
    assert isinstance(r, (RatFunc, LaurentPoly))
    assert r * x == 1
    assert valuation(r) == -valuation(x)


def test_ratfunc_parse():
    r = S("t/(1+t)")
    assert isinstance(r, RatFunc)
    assert r * S("1+t") == S("t")
    assert r.valuation() == 1
