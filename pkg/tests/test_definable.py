import dataclasses

import pytest
from hypothesis import given, strategies as st

from conftest import fields, series
from valdef.definable import (ChiCertificate, build_V, chi_decide, compute_pipeline, in_V,
                              pipeline_params, set_membership, verify_certificate)
from valdef.finite_field import parse_field_spec
from valdef.laurent import parse_series
from valdef.local_solver import HenselCertificate

F2, F3, F4, F8, F9 = (parse_field_spec(s) for s in ("2", "3", "4", "8", "9"))


def S(text, field=F2, ram=1):
    return parse_series(text, field, ram)


def test_build_V_q2():
    spec = build_V(F2)
    assert spec.l == 2 and spec.f.coeffs == (1, 1, 1)
    assert spec.a_choices == (F2.zero, F2.one)


def test_build_V_q4():
    spec = build_V(F4)
    assert spec.l == 3 and spec.f.coeffs == (1, 1, 0, 1)
    assert F4.one not in spec.a_choices and len(spec.a_choices) == 3


def test_build_V_artin_schreier():
    for q in ("2", "3", "5"):
        F = parse_field_spec(q)
        spec = build_V(F, "artin_schreier")
        assert len(spec.a_choices) == F.q
    with pytest.raises(ValueError):
        build_V(F4, "artin_schreier")


@pytest.mark.parametrize("field", [F2, F3, F4, F8, F9])
def test_pipeline_parameters(field):
    p = compute_pipeline(build_V(field))
    assert (p.m, p.ell_prime, p.h) == (1, -1, 1)


def test_pipeline_formula():
    p = pipeline_params(2, -3)
    assert (p.m, p.ell_prime, p.h) == (3, -3, 3)
    for n in range(5):
        for ell in range(-4, 2):
            assert pipeline_params(n, ell).m > n


@pytest.mark.parametrize("text", ["t", "t^5 + t^7", "0"])
def test_in_V_positive(text):
    assert in_V(S(text), build_V(F2))


@given(st.data())
def test_V_sandwich(data):
    F = data.draw(fields)
    spec = build_V(F)
    w = data.draw(series(F, nonzero=True, vmin=-3, vmax=3, span=4))
    if w.valuation() >= 1:
        assert in_V(w, spec)
    elif w.valuation() < 0:
        assert not in_V(w, spec)


def test_chi_examples():
    res = chi_decide(S("t"))
    assert res and res.certificate.y == F2.zero
    res = chi_decide(S("g + t", F4))
    assert res and res.certificate.y == F4.gen
    res = chi_decide(S("t^-1"))
    assert not res and res.refutation.exponent == -1 and res.refutation.check()


@given(st.data())
def test_chi_round_trip(data):
    F = data.draw(fields)
    e = data.draw(st.sampled_from([1, 2, 3]))
    x = data.draw(series(F, ram=e, vmin=-4, vmax=4, span=4))
    res = chi_decide(x, e)
    assert bool(res) == (x.valuation() >= 0)
    if res:
        cert = res.certificate
        assert verify_certificate(x, cert)
        back = ChiCertificate.from_dict(cert.to_dict())
        assert verify_certificate(x, back)
        assert not verify_certificate(x + S("t^50", F, e), cert)


def _tamper_first_leaf(cert, delta):
    psi = cert.y_witness.plus
    leaf = psi.x_witness.plus
    h = leaf.certificate
    bad_h = HenselCertificate(h.poly, h.approx_root + delta, h.v_g, h.v_dg, h.precision)
    leaf = dataclasses.replace(leaf, certificate=bad_h)
    psi = dataclasses.replace(psi, x_witness=dataclasses.replace(psi.x_witness, plus=leaf))
    return dataclasses.replace(cert, y_witness=dataclasses.replace(cert.y_witness, plus=psi))


def test_tampered_leaf_rejected():
    x = S("1 + t + t^3")
    cert = chi_decide(x).certificate
    assert verify_certificate(x, cert)
    assert not verify_certificate(x, _tamper_first_leaf(cert, S("t")))
    assert not verify_certificate(x, dataclasses.replace(cert, y=F2.one + cert.y))


def test_stage_examples():
    assert set_membership(S("t"), "Y").verdict == "In"
    assert set_membership(S("t^-3"), "X").verdict == "Out"
    assert set_membership(S("1"), "Y").verdict == "Unknown"
    assert set_membership(S("t"), "V").verdict == "In"
    assert set_membership(S("t^-1"), "W").verdict == "Out"
    assert set_membership(S("1 + g*t", F4), "Y").verdict != "Out"
    with pytest.raises(ValueError):
        set_membership(S("t"), "Z")


@given(st.data())
def test_stages_never_contradict_the_chain(data):
    # every stage set lies inside O, and contains the maximal ideal
    F = data.draw(st.sampled_from([F2, F3]))
    w = data.draw(series(F, nonzero=True, vmin=-3, vmax=3, span=3))
    for stage in ("V", "W", "X", "Y"):
        m = set_membership(w, stage)
        if w.valuation() < 0:
            assert m.verdict == "Out"
        if w.valuation() >= 1:
            assert m.verdict == "In"
