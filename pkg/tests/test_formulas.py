import pytest
from hypothesis import given, strategies as st

from valdef._parse import ParseError
from valdef.definable import chi_decide
from valdef.finite_field import parse_field_spec
from valdef.formulas import (Atom, Exists, Formula, Fresh, OAtom, Or, Var, atoms,
                             count_quantifiers, emit_chi, eval_certified, eval_qf, folkloric_formula,
                             formula_from_json, formula_to_json, free_vars, h10_reduce,
                             parse_multipoly, parse_val_formula, pretty, rename_bound, substitute,
                             transport_backward, transport_forward, translate_val_to_ring, _Translator)
from valdef.laurent import parse_series
from valdef.sampling import make_rng
from valdef.suites import planted_zero, random_matrix

F2, F3, F4 = (parse_field_spec(s) for s in ("2", "3", "4"))


def S(text, field=F2, ram=1):
    return parse_series(text, field, ram)


def test_folkloric_formula():
    phi = folkloric_formula(2)
    assert pretty(phi) == "∃y (1 + x^2*t - y^2 ≐ 0)"
    assert eval_certified(phi, {"x": S("1", F3)}, F3).truth
    assert not eval_certified(phi, {"x": S("t^-1", F3)}, F3).truth
    with pytest.raises(ValueError):
        folkloric_formula(3, F3)


def test_emit_chi_shape_q2():
    chi = emit_chi(F2)
    assert chi.free == ("x",) and chi.language == "ring"
    assert count_quantifiers(chi) == 19
    assert len(atoms(chi)) == 16
    assert free_vars(chi.body) == {"x"}


def test_explicit_fp_contains_artin_schreier_atom():
    chi = emit_chi(F2, "explicit_fp")
    assert count_quantifiers(chi) == 10
    assert pretty(atoms(chi)[0]) == "(x - a + b)^2 + x - a + b ≐ 0"
    with pytest.raises(ValueError):
        emit_chi(F4, "explicit_fp")


@pytest.mark.parametrize("style", ["pipeline", "explicit_fp"])
@pytest.mark.parametrize("q", ["2", "3", "5"])
def test_emitted_chi_semantics(style, q):
    F = parse_field_spec(q)
    chi = emit_chi(F, style)
    rng = make_rng(11)
    from valdef.sampling import sample_series
    for _ in range(25):
        x = sample_series(rng, F, 4, span=4)
        assert eval_certified(chi, {"x": x}, F).truth == bool(chi_decide(x))


def test_explicit_matrix_at_uniformizer():
    chi = emit_chi(F2, "explicit_fp")
    ev = eval_certified(chi, {"x": S("t")}, F2)
    assert ev.truth and ev.evidence[0][:2] == ("chi", "accept")


def test_eval_qf_exactness():
    x = S("1+t")
    y = x.inverse_trunc(20)
    m = Atom(parse_val_formula("x*y - 1 = 0").body.term)
    assert not eval_qf(m, {"x": x, "y": y}, F2)
    assert eval_qf(m, {"x": x, "y": 1 / x}, F2)
    m2 = parse_val_formula("x^2 - t^2 = 0")
    assert eval_qf(m2, {"x": S("t")}, F2)
    with pytest.raises(ValueError):
        eval_qf(parse_val_formula("O(x)"), {"x": S("t")}, F2)


def test_parse_val_formula():
    alpha = parse_val_formula("~O(x) | (O(x*y) & x - y = 0)")
    assert alpha.free == ("x", "y") and alpha.language == "val"
    assert isinstance(alpha.body, Or)
    beta = parse_val_formula("exists y, z: O(y) & x - y*z = 0")
    assert beta.free == ("x",) and isinstance(beta.body, Exists)
    for bad in ("", "O(x", "x = ", "exists : O(x)", "x/y = 0"):
        with pytest.raises(ParseError):
            parse_val_formula(bad)


def test_translate_O_is_chi():
    out = translate_val_to_ring(parse_val_formula("O(x)"), F2)
    chi = emit_chi(F2)
    assert count_quantifiers(out) == count_quantifiers(chi)
    assert len(atoms(out)) == len(atoms(chi))
    assert out.language == "ring" and not any(isinstance(a, OAtom) for a in atoms(out))


def test_translate_not_O_block():
    out = translate_val_to_ring(parse_val_formula("~O(x)"), F2)
    assert isinstance(out.body, Exists) and out.body.tag == "not_O"
    assert eval_certified(out, {"x": S("t^-1")}, F2).truth
    assert not eval_certified(out, {"x": S("1+t")}, F2).truth


@pytest.mark.parametrize("field", [F2, F3])
def test_psi_defines_maximal_ideal(field):
    from valdef.sampling import sample_series
    tr = _Translator(field, {"x"})
    psi = Formula(("x",), tr.psi_M(Var("x")), "ring")
    rng = make_rng(5)
    for _ in range(100):
        x = sample_series(rng, field, 3, span=3)
        assert eval_certified(psi, {"x": x}, field).truth == (x.valuation() >= 1)


def test_json_round_trip_of_emitted_formulas():
    for F in (F2, F3, F4):
        chi = emit_chi(F)
        assert formula_from_json(formula_to_json(chi)) == chi


@given(st.integers(0, 2 ** 32))
def test_json_round_trip_random(seed):
    rng = make_rng(seed)
    alpha = Formula(("x", "y"), random_matrix(rng), "val")
    assert formula_from_json(formula_to_json(alpha)) == alpha
    # the printer flattens nested conjunctions, so compare truth values
    back = parse_val_formula(_ascii(pretty(alpha)))
    from valdef.suites import _assignment
    for _ in range(5):
        env = _assignment(rng, F2)
        assert eval_qf(back, env, F2, o_oracle=True) == eval_qf(alpha, env, F2, o_oracle=True)


def _ascii(text):
    return text.replace("≐", "=").replace("¬", "~").replace("∧", "&").replace("∨", "|")


def test_substitution_and_renaming():
    block = Exists(("y",), Atom(parse_val_formula("x - y = 0").body.term))
    assert substitute(block, {"y": Var("x")}) == block  # bound occurrences are untouched
    fresh = Fresh({"x", "y"})
    r = rename_bound(block, fresh)
    assert r.vars[0] not in ("x", "y")
    s2 = substitute(r, {"x": Var("y")})
    assert free_vars(s2) == {"y"}


def test_h10_examples():
    red = h10_reduce(parse_multipoly("x", F2))
    assert red.disjuncts == 2
    assert str(red.polys[1]) == "1"
    red = h10_reduce(parse_multipoly("x*y - 1", F3))
    assert red.disjuncts == 4
    i = red.subsets.index(("y",))
    assert red.polys[i] == parse_multipoly("x - y", F3, ("x", "y"))


def test_h10_cap():
    f = parse_multipoly("+".join(f"x{i}" for i in range(13)), F2)
    with pytest.raises(ValueError, match="cap"):
        h10_reduce(f)


@pytest.mark.parametrize("field", [F2, F3, F4])
def test_h10_transport(field):
    rng = make_rng(2)
    for _ in range(20):
        f, point = planted_zero(rng, field)
        red = h10_reduce(f)
        sub, b = transport_forward(f, point)
        assert all(v.is_zero() or v.valuation() >= 0 for v in b.values())
        assert eval_qf(red.formula, b, field)
        assert f(transport_backward(f, sub, b)).is_zero()


def test_multipoly_parsing():
    f = parse_multipoly("x^2*y + 2*x + g", parse_field_spec("9"))
    assert f.vars == ("x", "y") and f.total_degree == 3
    with pytest.raises(ParseError):
        parse_multipoly("x + t", F2)
    with pytest.raises(ParseError):
        parse_multipoly("x^-1", F2)
