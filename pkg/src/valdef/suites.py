"""Seeded property suites shared by the CLI and the test-suite.

Every suite returns a plain dict report.  Reports contain no timings or other
run-dependent data, so a fixed configuration reproduces them byte for byte.
"""

from fractions import Fraction

from .definable import build_V, chi_decide, in_V, verify_certificate
from .finite_field import poly_roots_in_field
from .formulas import (And, Atom, Not, OAtom, Or, Formula, eval_certified, eval_qf, h10_reduce, MultiPoly, pretty,
                       transport_backward, transport_forward, translate_val_to_ring)
from .laurent import LaurentPoly, Region, in_region
from .local_solver import LocalPoly, is_lth_power, root_exists, verify_root
from .sampling import make_rng, random_element, random_nonzero, sample_series

SUITES = ("spheres", "sandwich", "chi", "folkloric", "h10", "translate", "newton")


def _report(name, config, cases, notes=None):
    failed = sum(1 for c in cases if not c["ok"])
    return {"suite": name, "config": config, "passed": len(cases) - failed, "failed": failed,
            "cases": cases, "notes": notes or {}}


def default_l(field):
    """A prime different from the characteristic: 2 for odd q, 3 for even q."""
    return 3 if field.p == 2 else 2


# ---------------------------------------------------------------------------

def _ball_sample(rng, field, lo, ram):
    if rng.random() < 0.1:
        return LaurentPoly.zero(field, ram)
    return sample_series(rng, field, valuation=int(rng.integers(lo, lo + 6)), ram=ram)


def suite_spheres(field, samples, seed, ram=1, **_):
    """The three sphere/ball laws, ``samples`` instances each, radius n in [-5, 5]."""
    rng = make_rng(seed)
    cases = []
    for _ in range(samples):
        n = int(rng.integers(-5 * ram, 5 * ram + 1))
        r = Fraction(n, ram)
        x = _ball_sample(rng, field, n + 1, ram)
        y = sample_series(rng, field, valuation=n, ram=ram)
        d = x - y
        ok = in_region(x, Region("B", r)) and in_region(y, Region("S", r))
        ok = ok and in_region(d, Region("S", r)) and d + y == x
        cases.append({"law": "difference", "n": str(r), "x": str(x), "y": str(y), "ok": ok})
    for _ in range(samples):
        n = int(rng.integers(-5 * ram, 5 * ram + 1))
        r = Fraction(n, ram)
        x = _ball_sample(rng, field, n - 3, ram)
        lhs = in_region(x, Region("Bbar", r))
        rhs = in_region(x, Region("S", r)) != in_region(x, Region("B", r))
        cases.append({"law": "partition", "n": str(r), "x": str(x), "ok": lhs == rhs})
    for _ in range(samples):
        n = int(rng.integers(-5 * ram, 5 * ram + 1))
        r = Fraction(n, ram)
        x, y = _ball_sample(rng, field, n, ram), _ball_sample(rng, field, n, ram)
        ok = in_region(x - y, Region("Bbar", r))
        cases.append({"law": "closed", "n": str(r), "x": str(x), "y": str(y), "ok": ok})
    return _report("spheres", _config(field, samples, seed, ram=ram), cases)


def suite_sandwich(field, samples, seed, window=5, ram=1, **_):
    """``v(w) >= 1 => w in V`` and ``v(w) < 0 => w not in V``; the boundary is only counted."""
    rng = make_rng(seed)
    spec = build_V(field)
    cases = []
    boundary = {"in": 0, "out": 0}
    for _ in range(samples):
        w = sample_series(rng, field, window, ram)
        member = in_V(w, spec, ram)
        if w.val >= 1:
            ok = member
        elif w.val < 0:
            ok = not member
        else:
            ok = True
            boundary["in" if member else "out"] += 1
        cases.append({"w": str(w), "in_V": member, "ok": ok})
    return _report("sandwich", _config(field, samples, seed, window, ram), cases, {"v0_counts": boundary})


def suite_chi(field, samples, seed, window=5, ram=1, **_):
    """chi accepts exactly the samples with ``v >= 0``; accepted certificates re-verify."""
    rng = make_rng(seed)
    cases = []
    for _ in range(samples):
        x = sample_series(rng, field, window, ram)
        res = chi_decide(x, ram)
        expected = x.val >= 0
        if res:
            ok = expected and verify_certificate(x, res.certificate)
        else:
            ok = not expected and res.refutation.check()
        cases.append({"x": str(x), "accept": bool(res), "ok": ok})
    return _report("chi", _config(field, samples, seed, window, ram), cases)


def suite_folkloric(field, samples, seed, window=6, **_):
    """``1 + x^l t`` is an l-th power iff ``v(x) >= 0``."""
    from .local_solver import verify_hensel
    rng = make_rng(seed)
    l = default_l(field)
    t = LaurentPoly.uniformizer(field)
    cases = []
    for _ in range(samples):
        x = sample_series(rng, field, window)
        res = is_lth_power(1 + x ** l * t, l)
        ok = bool(res) == (x.val >= 0)
        if res:
            ok = ok and verify_hensel(res.certificate)
        cases.append({"x": str(x), "power": bool(res), "ok": ok})
    return _report("folkloric", _config(field, samples, seed, window) | {"l": l}, cases)


# ---------------------------------------------------------------------------

def _integral(rng, field):
    if rng.random() < 0.3:
        return LaurentPoly.zero(field)
    return sample_series(rng, field, valuation=int(rng.integers(0, 3)), span=3)


def irreducible_quadratics(field):
    """Monic ``z^2 + b z + c`` over F_q with no root in F_q, as ``(b, c)`` pairs."""
    out = []
    for b in field.elements():
        for c in field.elements():
            if not poly_roots_in_field([c, b, field.one], field):
                out.append((b, c))
    return out


def planted_polynomial(rng, field):
    """``(g, n_linear)``: product of linear factors and root-free quadratics."""
    n_lin = int(rng.integers(0, 3))
    n_quad = int(rng.integers(0, 3))
    if n_lin + n_quad == 0:
        n_lin, n_quad = (1, 0) if rng.random() < 0.5 else (0, 1)
    quads = irreducible_quadratics(field)
    one = LaurentPoly.const(field, 1)
    g = LocalPoly([one], field)
    roots = []
    for _ in range(n_lin):
        if roots and rng.random() < 0.2:
            r = roots[int(rng.integers(0, len(roots)))]
        elif rng.random() < 0.15:
            r = LaurentPoly.zero(field)
        else:
            r = sample_series(rng, field, 3, span=4)
        roots.append(r)
        g = g * LocalPoly([-r, one], field)
    for _ in range(n_quad):
        if rng.random() < 0.7:
            b, c = quads[int(rng.integers(0, len(quads)))]
            t = LaurentPoly.uniformizer(field)
            bb = LaurentPoly.const(field, b) + t * _integral(rng, field)
            cc = LaurentPoly.const(field, c) + t * _integral(rng, field)
        else:
            # z^2 - u t^(odd): the roots have half-integral valuation
            n = 2 * int(rng.integers(-2, 3)) + 1
            bb = LaurentPoly.zero(field)
            cc = -sample_series(rng, field, valuation=n, span=3)
        g = g * LocalPoly([cc, bb, one], field)
    return g, n_lin


def suite_newton(field, samples, seed, precision=None, **_):
    """Planted factorizations against root_exists, plus l-th powers ``y^l``."""
    from .local_solver import DEFAULT_PRECISION
    precision = precision or DEFAULT_PRECISION
    rng = make_rng(seed)
    cases = []
    for _ in range(samples):
        g, n_lin = planted_polynomial(rng, field)
        res = root_exists(g, precision)
        ok = res.exists == (n_lin > 0)
        if res.exists:
            ok = ok and verify_root(g, res.certificate)
        cases.append({"kind": "planted", "g": str(g), "linear_factors": n_lin, "root": res.exists, "ok": ok})
    l = default_l(field)
    for _ in range(samples):
        y = sample_series(rng, field, 4)
        res = is_lth_power(y ** l, l, precision)
        ok = res.is_power
        if ok:
            cert = res.certificate
            resid = cert.poly(cert.approx_root)
            ok = resid.is_zero() or resid.valuation() >= cert.precision
        cases.append({"kind": "lth_power", "y": str(y), "ok": ok})
    return _report("newton", _config(field, samples, seed) | {"precision": precision}, cases)


# ---------------------------------------------------------------------------

_VARS = ("x", "y", "z")


def _monomials(n, max_deg):
    out = [()]
    for _ in range(n):
        out = [m + (k,) for m in out for k in range(max_deg + 1)]
    return [m for m in out if sum(m) <= max_deg]


def planted_zero(rng, field, max_vars=3, max_deg=3):
    """``(f, point)`` with ``f(point) == 0``; ``f`` has at most 3 variables and degree at most 3."""
    n = int(rng.integers(1, max_vars + 1))
    names = _VARS[:n]
    x = {v: MultiPoly.var(field, names, v) for v in names}
    while True:
        if n == 1:
            c = random_element(rng, field)
            f = x["x"] - c
            point = {"x": LaurentPoly.const(field, c)}
            extra = max_deg - 1
        else:
            exps = [int(rng.integers(-3, 4)) for _ in names]
            coefs = [random_nonzero(rng, field) for _ in names]
            groups = {}
            for m in _monomials(n, max_deg):
                groups.setdefault(sum(a * e for a, e in zip(m, exps)), []).append(m)
            groups = [g for g in groups.values() if len(g) > 1]
            if not groups:
                continue
            grp = groups[int(rng.integers(0, len(groups)))]
            i, j = rng.choice(len(grp), 2, replace=False)
            alpha, beta = grp[int(i)], grp[int(j)]
            lam = field.one
            for a, b, c in zip(alpha, beta, coefs):
                lam = lam * c ** a / c ** b
            mono = lambda m: MultiPoly(field, names, {m: 1})
            f = mono(alpha) - mono(beta) * lam
            point = {v: LaurentPoly.monomial(field, c, e) for v, c, e in zip(names, coefs, exps)}
            extra = max_deg - f.total_degree
        if extra > 0 and rng.random() < 0.5:
            lin = MultiPoly.const(field, names, random_element(rng, field))
            for v in names:
                lin = lin + x[v] * random_element(rng, field)
            if not lin.is_zero():
                f = f * lin
        shifts = {v: random_element(rng, field) for v in names}
        f = f.shift({v: -s for v, s in shifts.items()})
        point = {v: point[v] + shifts[v] for v in names}
        if f.is_zero() or f.total_degree == 0:
            continue
        assert f(point).is_zero()
        return f, point


def suite_h10(field, samples, seed, **_):
    """Witness transport through the subset reduction, both directions."""
    rng = make_rng(seed)
    cases = []
    for _ in range(samples):
        f, point = planted_zero(rng, field)
        red = h10_reduce(f)
        subset, b = transport_forward(f, point)
        integral = all(v.is_zero() or v.valuation() >= 0 for v in b.values())
        forward = integral and eval_qf(red.formula, b, field)
        backward = True
        used = 0
        for sub, disjunct in zip(red.subsets, red.formula.body.args):
            if eval_qf(disjunct, b, field):
                used += 1
                back = transport_backward(f, sub, b)
                backward = backward and f(back).is_zero()
        ok = forward and backward and used >= 1
        cases.append({"f": str(f), "point": {k: str(v) for k, v in point.items()},
                      "subset": list(subset), "disjuncts_satisfied": used, "ok": ok})
    return _report("h10", _config(field, samples, seed), cases)


_TEMPLATES = ("x", "y", "x+y", "x-y", "x*y", "x*y-1", "x+1", "x^2-y", "x-2", "y+x^2")


def _template_term(text):
    from .formulas import _node_to_term
    from ._parse import parse_expr
    return _node_to_term(parse_expr(text))


def random_matrix(rng, depth=3):
    """Random quantifier-free valued-language matrix in ``x, y`` of depth at most ``depth``."""
    if depth == 0 or rng.random() < 0.3:
        term = _template_term(_TEMPLATES[int(rng.integers(0, len(_TEMPLATES)))])
        atom = OAtom(term) if rng.random() < 0.6 else Atom(term)
        return Not(atom) if rng.random() < 0.5 else atom
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return Not(random_matrix(rng, depth - 1))
    args = (random_matrix(rng, depth - 1), random_matrix(rng, depth - 1))
    return And(args) if kind == 1 else Or(args)


def _assignment(rng, field):
    x = sample_series(rng, field, 3, span=3)
    r = rng.random()
    if r < 0.15:
        y = x
    elif r < 0.25:
        y = x * x
    elif r < 0.35:
        y = 1 / x if not x.is_zero() else x
    else:
        y = sample_series(rng, field, 3, span=3)
    return {"x": x, "y": y}


def suite_translate(field, samples, seed, **_):
    """Valuation-oracle truth of a random matrix equals certified truth of its ring translation."""
    rng = make_rng(seed)
    cases = []
    for _ in range(samples):
        body = random_matrix(rng)
        alpha = Formula(("x", "y"), body, "val")
        env = _assignment(rng, field)
        truth = eval_qf(alpha, env, field, o_oracle=True)
        ring = translate_val_to_ring(alpha, field)
        certified = eval_certified(ring, env, field).truth
        cases.append({"alpha": pretty(body), "x": str(env["x"]), "y": str(env["y"]),
                      "oracle": truth, "certified": certified, "ok": truth == certified})
    return _report("translate", _config(field, samples, seed), cases)


# ---------------------------------------------------------------------------

def _config(field, samples, seed, window=None, ram=1):
    out = {"field": str(field), "samples": samples, "seed": seed, "ram": ram}
    if window is not None:
        out["window"] = window
    return out


def run_suite(name, field, samples, seed, window=None, ram=1, precision=None):
    fn = {"spheres": suite_spheres, "sandwich": suite_sandwich, "chi": suite_chi,
          "folkloric": suite_folkloric, "h10": suite_h10, "translate": suite_translate,
          "newton": suite_newton}.get(name)
    if fn is None:
        raise ValueError(f"unknown suite {name!r}")
    kwargs = {"ram": ram, "precision": precision}
    if window is not None:
        kwargs["window"] = window
    return fn(field, samples, seed, **kwargs)
