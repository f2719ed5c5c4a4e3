"""Formula ASTs, the emitted definitions of O, and the two formula-level reductions.

Terms are built from ``0``, ``1``, the constant ``t`` (only in the folkloric
formula), variables and ``+ - *`` (``Pow`` is repeated multiplication).  Field
constants of F_p appear as numerals, i.e. closed terms built from ``1``.

Existential blocks carry a ``tag`` naming the construction that produced them.
The certificate-backed evaluator uses the tag to synthesize witnesses: for
``chi`` blocks it runs :func:`valdef.definable.chi_decide` and transports the
certificate into the block's variables, and for the complement blocks it
inverts the subject.  A block that cannot hold is refuted by a valuation
argument instead.
"""

import json
from dataclasses import dataclass, field as dc_field

from ._parse import ParseError, _Parser, evaluate, parse_expr
from .definable import build_V, chi, compute_pipeline
from .finite_field import FFElement
from .laurent import LaurentPoly, RatFunc
from .local_solver import DEFAULT_PRECISION, is_lth_power, verify_hensel

FORMULA_SCHEMA = "valdef.formula/1"
MAX_H10_VARS = 12
MAX_TRANSLATE_Q = 64


# ---------------------------------------------------------------------------
# terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int  # 0 or 1


@dataclass(frozen=True)
class TConst:
    pass


@dataclass(frozen=True)
class FieldConst:
    """An F_q constant outside the closed terms (only in polynomials with F_q coefficients)."""
    text: str


@dataclass(frozen=True)
class Add:
    a: object
    b: object


@dataclass(frozen=True)
class Sub:
    a: object
    b: object


@dataclass(frozen=True)
class Mul:
    a: object
    b: object


@dataclass(frozen=True)
class Neg:
    a: object


@dataclass(frozen=True)
class Pow:
    a: object
    n: int


ZERO = Const(0)
ONE = Const(1)
T = TConst()


def numeral(n):
    """Closed term for the integer ``n >= 0`` (binary Horner form for large ``n``)."""
    if n < 0:
        raise ValueError("numerals are non-negative")
    if n == 0:
        return ZERO
    if n <= 4:
        out = ONE
        for _ in range(n - 1):
            out = Add(out, ONE)
        return out
    half = numeral(n // 2)
    out = Mul(Add(ONE, ONE), half)
    return Add(out, ONE) if n % 2 else out


def poly_term(coeffs, x, p):
    """``sum c_i x^i`` with residues mod ``p`` as numerals; ``coeffs`` constant-first."""
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i] % p
        if not c:
            continue
        mono = ONE if i == 0 else (x if i == 1 else Pow(x, i))
        if c == 1:
            parts.append(mono)
        elif i == 0:
            parts.append(numeral(c))
        else:
            parts.append(Mul(numeral(c), mono))
    if not parts:
        return ZERO
    out = parts[0]
    for t in parts[1:]:
        out = Add(out, t)
    return out


def term_vars(term, acc=None):
    acc = set() if acc is None else acc
    if isinstance(term, Var):
        acc.add(term.name)
    elif isinstance(term, (Add, Sub, Mul)):
        term_vars(term.a, acc)
        term_vars(term.b, acc)
    elif isinstance(term, (Neg, Pow)):
        term_vars(term.a, acc)
    return acc


def subst_term(term, mapping):
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    if isinstance(term, (Add, Sub, Mul)):
        return type(term)(subst_term(term.a, mapping), subst_term(term.b, mapping))
    if isinstance(term, Neg):
        return Neg(subst_term(term.a, mapping))
    if isinstance(term, Pow):
        return Pow(subst_term(term.a, mapping), term.n)
    return term


def eval_term(term, env, field, ram=1):
    if isinstance(term, Var):
        try:
            v = env[term.name]
        except KeyError:
            raise KeyError(f"missing variable {term.name!r}") from None
        if isinstance(v, (int, FFElement)):
            return LaurentPoly.const(field, v, ram)
        return v
    if isinstance(term, Const):
        return LaurentPoly.const(field, term.value, ram)
    if isinstance(term, TConst):
        return LaurentPoly.uniformizer(field, 1).with_ram(ram) if ram > 1 else LaurentPoly.uniformizer(field)
    if isinstance(term, FieldConst):
        return LaurentPoly.const(field, field.parse_element(term.text), ram)
    if isinstance(term, Add):
        return eval_term(term.a, env, field, ram) + eval_term(term.b, env, field, ram)
    if isinstance(term, Sub):
        return eval_term(term.a, env, field, ram) - eval_term(term.b, env, field, ram)
    if isinstance(term, Mul):
        return eval_term(term.a, env, field, ram) * eval_term(term.b, env, field, ram)
    if isinstance(term, Neg):
        return -eval_term(term.a, env, field, ram)
    if isinstance(term, Pow):
        return eval_term(term.a, env, field, ram) ** term.n
    raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    """``term ≐ 0``."""
    term: object


@dataclass(frozen=True)
class OAtom:
    """``O(term)``: the term lies in the valuation ring."""
    term: object


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: object
    tag: str = None
    subject: object = None
    roles: tuple = ()
    params: tuple = ()

    def role_map(self):
        return dict(self.roles)

    def param(self, key, default=None):
        return dict(self.params).get(key, default)


@dataclass(frozen=True)
class Formula:
    free: tuple
    body: object
    language: str = "ring"

    def __str__(self):
        return pretty(self.body)


def conj(*args):
    flat = []
    for a in args:
        flat.extend(a.args if isinstance(a, And) else (a,))
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def free_vars(node):
    if isinstance(node, (Atom, OAtom)):
        return term_vars(node.term)
    if isinstance(node, Not):
        return free_vars(node.arg)
    if isinstance(node, (And, Or)):
        out = set()
        for a in node.args:
            out |= free_vars(a)
        return out
    if isinstance(node, Exists):
        inner = free_vars(node.body)
        if node.subject is not None:
            inner |= term_vars(node.subject)
        return inner - set(node.vars)
    raise TypeError(f"not a formula: {node!r}")


def substitute(node, mapping):
    """Capture-free substitution of terms for free variables (bound names must be fresh)."""
    if isinstance(node, Exists):
        inner = {k: v for k, v in mapping.items() if k not in node.vars}
        subj = subst_term(node.subject, inner) if node.subject is not None else None
        return Exists(node.vars, substitute(node.body, inner), node.tag, subj, node.roles, node.params)
    if isinstance(node, Atom):
        return Atom(subst_term(node.term, mapping))
    if isinstance(node, OAtom):
        return OAtom(subst_term(node.term, mapping))
    if isinstance(node, Not):
        return Not(substitute(node.arg, mapping))
    return type(node)(tuple(substitute(a, mapping) for a in node.args))


class Fresh:
    """Generator of variable names not clashing with a reserved set."""

    def __init__(self, reserved=()):
        self.used = set(reserved)
        self.counter = {}

    def __call__(self, base):
        n = self.counter.get(base, 0)
        while True:
            n += 1
            name = f"{base}_{n}"
            if name not in self.used:
                self.counter[base] = n
                self.used.add(name)
                return name


def rename_bound(node, fresh):
    """Give every bound variable a fresh name."""
    if isinstance(node, Exists):
        ren = {v: fresh(v.split("_")[0]) for v in node.vars}
        body = substitute(rename_bound(node.body, fresh), {k: Var(v) for k, v in ren.items()})
        roles = tuple((ren.get(k, k), r) for k, r in node.roles)
        return Exists(tuple(ren[v] for v in node.vars), body, node.tag, node.subject, roles, node.params)
    if isinstance(node, Not):
        return Not(rename_bound(node.arg, fresh))
    if isinstance(node, (And, Or)):
        return type(node)(tuple(rename_bound(a, fresh) for a in node.args))
    return node


def count_quantifiers(node):
    if isinstance(node, Formula):
        return count_quantifiers(node.body)
    if isinstance(node, Exists):
        return len(node.vars) + count_quantifiers(node.body)
    if isinstance(node, Not):
        return count_quantifiers(node.arg)
    if isinstance(node, (And, Or)):
        return sum(count_quantifiers(a) for a in node.args)
    return 0


def atoms(node):
    if isinstance(node, (Atom, OAtom)):
        return [node]
    if isinstance(node, Not):
        return atoms(node.arg)
    if isinstance(node, (And, Or)):
        return [a for x in node.args for a in atoms(x)]
    return atoms(node.body)


def constants(term, acc=None):
    """All non-variable leaves of a term."""
    acc = [] if acc is None else acc
    if isinstance(term, (Const, TConst, FieldConst)):
        acc.append(term)
    elif isinstance(term, (Add, Sub, Mul)):
        constants(term.a, acc)
        constants(term.b, acc)
    elif isinstance(term, (Neg, Pow)):
        constants(term.a, acc)
    return acc


def formula_constants(node):
    out = []
    for a in atoms(node):
        constants(a.term, out)
    return out


# ---------------------------------------------------------------------------
# pretty printing and JSON
# ---------------------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Neg: 3, Pow: 4}


def pretty_term(term, parent=0):
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Const):
        return str(term.value)
    if isinstance(term, TConst):
        return "t"
    if isinstance(term, FieldConst):
        return f"[{term.text}]"
    prec = _PREC[type(term)]
    if isinstance(term, Add):
        s = f"{pretty_term(term.a, 1)} + {pretty_term(term.b, 1)}"
    elif isinstance(term, Sub):
        s = f"{pretty_term(term.a, 1)} - {pretty_term(term.b, 2)}"
    elif isinstance(term, Mul):
        s = f"{pretty_term(term.a, 2)}*{pretty_term(term.b, 3)}"
    elif isinstance(term, Neg):
        s = f"-{pretty_term(term.a, 3)}"
    else:
        s = f"{pretty_term(term.a, 5)}^{term.n}"
    return f"({s})" if prec < parent else s


def pretty(node, parent=0):
    if isinstance(node, Formula):
        return pretty(node.body, parent)
    if isinstance(node, Atom):
        return f"{pretty_term(node.term)} ≐ 0"
    if isinstance(node, OAtom):
        return f"O({pretty_term(node.term)})"
    if isinstance(node, Not):
        return f"¬{pretty(node.arg, 3)}"
    if isinstance(node, And):
        if not node.args:
            return "⊤"
        s = " ∧ ".join(pretty(a, 2) for a in node.args)
        return f"({s})" if parent >= 3 and len(node.args) > 1 else s
    if isinstance(node, Or):
        if not node.args:
            return "⊥"
        s = " ∨ ".join(pretty(a, 1) for a in node.args)
        return f"({s})" if parent >= 2 and len(node.args) > 1 else s
    if isinstance(node, Exists):
        return f"∃{' '.join(node.vars)} ({pretty(node.body)})"
    raise TypeError(f"not a formula: {node!r}")


def term_to_json(term):
    if isinstance(term, Var):
        return ["var", term.name]
    if isinstance(term, Const):
        return [str(term.value)]
    if isinstance(term, TConst):
        return ["t"]
    if isinstance(term, FieldConst):
        return ["c", term.text]
    if isinstance(term, Add):
        return ["+", term_to_json(term.a), term_to_json(term.b)]
    if isinstance(term, Sub):
        return ["-", term_to_json(term.a), term_to_json(term.b)]
    if isinstance(term, Mul):
        return ["*", term_to_json(term.a), term_to_json(term.b)]
    if isinstance(term, Neg):
        return ["neg", term_to_json(term.a)]
    return ["^", term_to_json(term.a), term.n]


def term_from_json(o):
    tag = o[0]
    if tag == "var":
        return Var(o[1])
    if tag in ("0", "1"):
        return Const(int(tag))
    if tag == "t":
        return T
    if tag == "c":
        return FieldConst(o[1])
    if tag == "neg":
        return Neg(term_from_json(o[1]))
    if tag == "^":
        return Pow(term_from_json(o[1]), int(o[2]))
    op = {"+": Add, "-": Sub, "*": Mul}[tag]
    return op(term_from_json(o[1]), term_from_json(o[2]))


def node_to_json(node):
    if isinstance(node, Atom):
        return {"op": "atom", "term": term_to_json(node.term)}
    if isinstance(node, OAtom):
        return {"op": "O", "term": term_to_json(node.term)}
    if isinstance(node, Not):
        return {"op": "not", "arg": node_to_json(node.arg)}
    if isinstance(node, (And, Or)):
        return {"op": "and" if isinstance(node, And) else "or", "args": [node_to_json(a) for a in node.args]}
    out = {"op": "exists", "vars": list(node.vars), "body": node_to_json(node.body)}
    if node.tag is not None:
        out["tag"] = node.tag
    if node.subject is not None:
        out["subject"] = term_to_json(node.subject)
    if node.roles:
        out["roles"] = [list(r) for r in node.roles]
    if node.params:
        out["params"] = [list(p) for p in node.params]
    return out


def node_from_json(o):
    op = o["op"]
    if op == "atom":
        return Atom(term_from_json(o["term"]))
    if op == "O":
        return OAtom(term_from_json(o["term"]))
    if op == "not":
        return Not(node_from_json(o["arg"]))
    if op in ("and", "or"):
        return (And if op == "and" else Or)(tuple(node_from_json(a) for a in o["args"]))
    if op == "exists":
        subj = term_from_json(o["subject"]) if "subject" in o else None
        return Exists(tuple(o["vars"]), node_from_json(o["body"]), o.get("tag"), subj,
                      tuple(tuple(r) for r in o.get("roles", ())),
                      tuple(tuple(p) for p in o.get("params", ())))
    raise ValueError(f"unknown formula node {op!r}")


def formula_to_json(formula, extra=None):
    out = {"schema": FORMULA_SCHEMA, "language": formula.language,
           "free": list(formula.free), "formula": node_to_json(formula.body)}
    if extra:
        out.update(extra)
    return out


def formula_from_json(o):
    if o.get("schema") != FORMULA_SCHEMA:
        raise ValueError(f"expected schema {FORMULA_SCHEMA!r}")
    return Formula(tuple(o["free"]), node_from_json(o["formula"]), o.get("language", "ring"))


def dumps(obj):
    """Canonical byte-stable JSON text."""
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# the folkloric formula and the emitted chi
# ---------------------------------------------------------------------------

def folkloric_formula(l, field=None):
    """``∃y (1 + x^l t - y^l ≐ 0)``, in the ring language with the constant ``t``."""
    if field is not None and l % field.p == 0:
        raise ValueError(f"l = {l} is divisible by the characteristic {field.p}")
    x, y = Var("x"), Var("y")
    u = Add(ONE, Mul(Pow(x, l), T))
    body = Atom(Sub(u, Pow(y, l)))
    return Formula(("x",), Exists(("y",), body, "lth_power", u, (("y", "root"),), (("l", l),)), "ring_t")


def emit_chi(field, style="pipeline"):
    """The parameter-free existential formula ``chi(x)`` defining O in ``F_q((t))``."""
    p, q = field.p, field.q
    x = Var("x")
    if style == "pipeline":
        spec = build_V(field)
        params = compute_pipeline(spec)
        f, df = list(spec.f.coeffs), spec.df
    elif style in ("explicit_fp", "explicit-fp"):
        if field.k != 1:
            raise ValueError("the explicit F_p formula needs a prime field (k = 1)")
        style = "explicit_fp"
        spec = build_V(field, "artin_schreier")
        params = compute_pipeline(spec)
        f, df = list(spec.f.coeffs), spec.df
    else:
        raise ValueError(f"unknown style {style!r}")
    m, h = params.m, params.h
    a, b = Var("a"), Var("b")
    xs = [Var(f"x{i}") for i in range(1, 5)]
    ys = [Var(f"y{i}") for i in range(1, 5)]
    pw = lambda s, n: s if n == 1 else Pow(s, n)
    parts = []
    roles = [("a", "plus"), ("b", "minus")] + [(f"x{i}", f"leaf:{i}") for i in range(1, 5)]
    if style == "pipeline":
        y = Var("y")
        zs = [Var(f"z{i}") for i in range(1, 5)]
        us = [Var(f"u{i}") for i in range(1, 5)]
        parts.append(Atom(Sub(Pow(y, q), y)))
        parts.append(Atom(Sub(Sub(x, y), Sub(a, b))))
        parts.append(Atom(Sub(pw(a, h), Sub(xs[0], xs[1]))))
        parts.append(Atom(Sub(pw(b, h), Sub(xs[2], xs[3]))))
        for i in range(4):
            fy = poly_term(f, ys[i], p)
            parts.append(Atom(Sub(Pow(ys[i], q), ys[i])))
            parts.append(Atom(Sub(Mul(us[i], poly_term(df, ys[i], p)), ONE)))
            parts.append(Atom(Sub(Mul(poly_term(f, zs[i], p), Add(ONE, Mul(pw(xs[i], m), fy))), fy)))
        names = ["y", "a", "b"] + [v.name for v in xs] + [n for i in range(4)
                                                          for n in (ys[i].name, us[i].name, zs[i].name)]
        roles = [("y", "residue")] + roles
        roles += [(f"y{i}", f"a_choice:{i}") for i in range(1, 5)]
        roles += [(f"u{i}", f"df_inverse:{i}") for i in range(1, 5)]
        roles += [(f"z{i}", f"leaf_root:{i}") for i in range(1, 5)]
        extra = (("style", "pipeline"), ("variant", "minimal"))
    else:
        s = Add(Sub(x, a), b)
        parts.append(Atom(Add(Pow(s, p), Mul(numeral(p - 1), s)) if p > 2 else Add(Pow(s, p), s)))
        parts.append(Atom(Sub(pw(a, h), Sub(xs[0], xs[1]))))
        parts.append(Atom(Sub(pw(b, h), Sub(xs[2], xs[3]))))
        for i in range(4):
            parts.append(Atom(Sub(Mul(poly_term(f, ys[i], p), Sub(pw(xs[i], m), ONE)), ONE)))
        names = ["a", "b"] + [v.name for v in xs] + [v.name for v in ys]
        roles += [(f"y{i}", f"leaf_root:{i}") for i in range(1, 5)]
        extra = (("style", "explicit_fp"), ("variant", "artin_schreier"), ("a", "1"))
    block = Exists(tuple(names), And(tuple(parts)), "chi", x, tuple(roles), extra)
    return Formula(("x",), block, "ring")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _is_zero(v):
    return v.is_zero()


def _valuation(v):
    return v.valuation()


def eval_qf(matrix, assignment, field, ram=1, o_oracle=False):
    """Exact truth of a quantifier-free matrix; ``O`` atoms need ``o_oracle=True``."""
    node = matrix.body if isinstance(matrix, Formula) else matrix
    return _eval_qf(node, assignment, field, ram, o_oracle)


def _eval_qf(node, env, field, ram, o_oracle):
    if isinstance(node, Atom):
        return _is_zero(eval_term(node.term, env, field, ram))
    if isinstance(node, OAtom):
        if not o_oracle:
            raise ValueError("O-atom encountered without the valuation oracle")
        return _valuation(eval_term(node.term, env, field, ram)) >= 0
    if isinstance(node, Not):
        return not _eval_qf(node.arg, env, field, ram, o_oracle)
    if isinstance(node, And):
        return all(_eval_qf(a, env, field, ram, o_oracle) for a in node.args)
    if isinstance(node, Or):
        return any(_eval_qf(a, env, field, ram, o_oracle) for a in node.args)
    raise ValueError("matrix is not quantifier-free")


class _UPoly:
    """Univariate polynomial in one certified variable, coefficients exact series."""

    __slots__ = ("c",)

    def __init__(self, c):
        self.c = c

    def _co(self, o):
        return o if isinstance(o, _UPoly) else _UPoly([o])

    def __add__(self, o):
        o = self._co(o)
        n = max(len(self.c), len(o.c))
        a = self.c + [0] * (n - len(self.c))
        b = o.c + [0] * (n - len(o.c))
        return _UPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return _UPoly([-x for x in self.c])

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        o = self._co(o)
        out = [0] * (len(self.c) + len(o.c) - 1)
        for i, x in enumerate(self.c):
            for j, y in enumerate(o.c):
                out[i + j] = out[i + j] + x * y
        return _UPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = _UPoly([1])
        for _ in range(n):
            out = out * self
        return out


def _upoly_of(term, env, zname, field, ram):
    env2 = dict(env)
    env2[zname] = _UPoly([LaurentPoly.zero(field, ram), LaurentPoly.const(field, 1, ram)])

    def ev(t):
        if isinstance(t, Var) and t.name == zname:
            return env2[zname]
        if isinstance(t, (Add, Sub, Mul)):
            a, b = ev(t.a), ev(t.b)
            return a + b if isinstance(t, Add) else (a - b if isinstance(t, Sub) else a * b)
        if isinstance(t, Neg):
            return -ev(t.a)
        if isinstance(t, Pow):
            return ev(t.a) ** t.n
        return eval_term(t, env, field, ram)

    out = ev(term)
    return out.c if isinstance(out, _UPoly) else [out]


def _proportional(coeffs, poly):
    """Cross-multiplication test ``coeffs ∝ poly.coeffs``."""
    coeffs = [LaurentPoly.zero(poly.field, poly.ram) if isinstance(c, int) and c == 0 else c for c in coeffs]
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    if len(coeffs) != len(poly.coeffs):
        return False
    la, lb = coeffs[-1], poly.lc
    return all(a * lb == b * la for a, b in zip(coeffs, poly.coeffs))


@dataclass
class Evaluation:
    truth: bool
    evidence: list = dc_field(default_factory=list)

    def __bool__(self):
        return self.truth


class CertifiedEvaluator:
    """Certificate-backed truth of emitted and translated ring formulas.

    Every existential block is either instantiated with synthesized witnesses
    and its body checked (atoms exactly, Hensel-certified variables by
    proportionality to the certificate's polynomial plus a margin re-check),
    or refuted by a valuation argument that is itself re-checked.
    """

    def __init__(self, field, ram=1, precision=DEFAULT_PRECISION):
        self.field = field
        self.ram = ram
        self.precision = precision
        self.evidence = []

    def evaluate(self, formula, assignment):
        node = formula.body if isinstance(formula, Formula) else formula
        self.evidence = []
        return Evaluation(self._eval(node, dict(assignment)), self.evidence)

    def _value(self, term, env):
        return eval_term(term, env, self.field, self.ram)

    def _eval(self, node, env):
        if isinstance(node, Atom):
            return _is_zero(self._value(node.term, env))
        if isinstance(node, OAtom):
            raise ValueError("O-atoms are not part of the ring language")
        if isinstance(node, Not):
            if count_quantifiers(node.arg):
                raise ValueError("negated existential block")
            return not self._eval(node.arg, env)
        if isinstance(node, And):
            return all(self._eval(a, env) for a in node.args)
        if isinstance(node, Or):
            return any(self._eval(a, env) for a in node.args)
        handler = getattr(self, f"_block_{node.tag}", None)
        if handler is None:
            raise ValueError(f"no witness synthesis for existential block tagged {node.tag!r}")
        return handler(node, env)

    def _certified_body(self, node, env, certs):
        """Check a conjunction in which each certified variable occurs in exactly one atom."""
        parts = node.body.args if isinstance(node.body, And) else (node.body,)
        seen = {z: 0 for z in certs}
        ok = True
        for atom in parts:
            if not isinstance(atom, Atom):
                ok = ok and self._eval(atom, env)
                continue
            zs = term_vars(atom.term) & set(certs)
            if not zs:
                ok = ok and self._eval(atom, env)
                continue
            if len(zs) > 1:
                raise ValueError("atom mixes two certified variables")
            z = zs.pop()
            seen[z] += 1
            cert = certs[z]
            coeffs = _upoly_of(atom.term, env, z, self.field, cert.poly.ram)
            ok = ok and _proportional(coeffs, cert.poly) and verify_hensel(cert)
        if any(n != 1 for n in seen.values()):
            raise ValueError("certified variable must occur in exactly one atom")
        return ok

    def _block_chi(self, node, env):
        x = self._value(node.subject, env)
        a = node.param("a")
        c = chi(self.field, node.param("variant", "minimal"), a)
        res = c.decide(x, self.ram)
        if not res:
            ok = res.refutation.check()
            self.evidence.append(("chi", "reject", str(res.refutation.exponent)))
            if not ok:
                raise AssertionError("refutation failed to re-check")
            return False
        cert = res.certificate
        values, certs = _transport(node, cert, c)
        env2 = dict(env)
        env2.update(values)
        self.evidence.append(("chi", "accept", str(cert.y)))
        return self._certified_body(node, env2, certs)

    def _block_lth_power(self, node, env):
        u = self._value(node.subject, env)
        if isinstance(u, RatFunc):
            raise ValueError("l-th power test needs a Laurent polynomial")
        l = node.param("l")
        res = is_lth_power(u, l, self.precision, self.ram)
        if not res:
            self.evidence.append(("lth_power", "reject", res.failed_test))
            return False
        (var,) = node.vars
        return self._certified_body(node, env, {var: res.certificate})

    def _block_not_O(self, node, env):
        s = self._value(node.subject, env)
        if s.is_zero() or s.valuation() >= 0:
            # z*s = 1 with v(z) >= 1 forces v(s) <= -1
            self.evidence.append(("not_O", "reject", str(s.valuation())))
            return False
        (var,) = node.vars
        env2 = dict(env)
        env2[var] = 1 / s
        return self._eval(node.body, env2)

    def _block_M(self, node, env):
        z = self._value(node.subject, env)
        if not z.is_zero() and z.valuation() * self.ram < 1:
            self.evidence.append(("M", "reject", str(z.valuation())))
            return False
        env2 = dict(env)
        for var, role in node.roles:
            env2[var] = self.field.from_index(int(role.partition(":")[2]))
        return self._eval(node.body, env2)

    def _block_inv_O(self, node, env):
        s = self._value(node.subject, env)
        if s.is_zero() or s.valuation() > 0:
            # w*s = 1 with v(w) >= 0 forces v(s) <= 0
            self.evidence.append(("inv_O", "reject", str(s.valuation())))
            return False
        (var,) = node.vars
        env2 = dict(env)
        env2[var] = 1 / s
        return self._eval(node.body, env2)


def _eval_fq(coeffs, a):
    acc = a * 0
    for c in reversed(coeffs):
        acc = acc * a + c
    return acc


def eval_certified(formula, assignment, field, ram=1, precision=DEFAULT_PRECISION):
    return CertifiedEvaluator(field, ram, precision).evaluate(formula, assignment)


def _transport(node, cert, c):
    leaves = list(cert.leaves())
    values, certs = {}, {}
    for var, role in node.roles:
        kind, _, idx = role.partition(":")
        leaf = leaves[int(idx) - 1] if idx else None
        if kind == "residue":
            values[var] = cert.y
        elif kind == "plus":
            values[var] = cert.y_witness.plus.base
        elif kind == "minus":
            values[var] = cert.y_witness.minus.base
        elif kind == "leaf":
            values[var] = leaf.base
        elif kind == "a_choice":
            values[var] = leaf.a
        elif kind == "df_inverse":
            values[var] = _eval_fq(c.spec.df, leaf.a).inverse()
        elif kind == "leaf_root":
            certs[var] = leaf.certificate
        else:
            raise ValueError(f"unknown role {role!r}")
    return values, certs


def chi_assignment(formula, cert):
    """Transport a ChiCertificate into the variables of an emitted chi block.

    Returns ``(values, certified)`` where ``certified`` maps the leaf-root
    variables to their Hensel certificates.
    """
    node = formula.body
    c = chi(cert.x.field, node.param("variant", "minimal"), node.param("a"))
    return _transport(node, cert, c)


# ---------------------------------------------------------------------------
# parsing of valued-language formulas
# ---------------------------------------------------------------------------

def _node_to_term(node, field=None):
    tag = node[0]
    if tag == "num":
        n = node[1] % field.p if field is not None else node[1]
        return numeral(n)
    if tag == "name":
        return T if node[1] == "t" else Var(node[1])
    if tag == "neg":
        return Neg(_node_to_term(node[1], field))
    if tag == "pow":
        e = node[2]
        if e.denominator != 1 or e < 0:
            raise ParseError("term exponents must be non-negative integers", node[3])
        return Pow(_node_to_term(node[1], field), int(e))
    if tag == "div":
        raise ParseError("division is not part of the language", node[3])
    op = {"add": Add, "sub": Sub, "mul": Mul}[tag]
    return op(_node_to_term(node[1], field), _node_to_term(node[2], field))


class _FormulaParser(_Parser):
    def __init__(self, text):
        super().__init__(text, extra_ops="=&|~!.:,")

    def at_name(self, name):
        tok = self.peek()
        return tok[0] == "name" and tok[1] == name

    def formula(self):
        if self.at_name("exists"):
            self.next()
            names = []
            while True:
                tok = self.next()
                if tok[0] != "name":
                    raise ParseError("expected variable name", tok[2])
                names.append(tok[1])
                if self.at(","):
                    self.next()
                    continue
                if self.at(".") or self.at(":"):
                    self.next()
                    break
            return Exists(tuple(names), self.formula())
        return self.disj()

    def disj(self):
        args = [self.conj()]
        while self.at("|"):
            self.next()
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self):
        args = [self.neg()]
        while self.at("&"):
            self.next()
            args.append(self.neg())
        return args[0] if len(args) == 1 else And(tuple(args))

    def neg(self):
        if self.at("~") or self.at("!"):
            self.next()
            return Not(self.neg())
        return self.primary()

    def primary(self):
        if self.at_name("O") and self.tokens[self.i + 1][0] == "op" and self.tokens[self.i + 1][1] == "(":
            self.next()
            self.expect("(")
            term = self.expr()
            self.expect(")")
            return OAtom(term)
        if self.at_name("exists"):
            return self.formula()
        save = self.i
        try:
            lhs = self.expr()
            self.expect("=")
            rhs = self.expr()
            return ("eq", lhs, rhs)
        except ParseError:
            self.i = save
            if not self.at("("):
                raise
        self.expect("(")
        node = self.formula()
        self.expect(")")
        return node


def _finish_terms(node, field):
    if isinstance(node, tuple) and node[0] == "eq":
        lhs, rhs = _node_to_term(node[1], field), _node_to_term(node[2], field)
        if rhs == ZERO:
            return Atom(lhs)
        return Atom(Sub(lhs, rhs))
    if isinstance(node, OAtom):
        return OAtom(_node_to_term(node.term, field))
    if isinstance(node, Not):
        return Not(_finish_terms(node.arg, field))
    if isinstance(node, (And, Or)):
        return type(node)(tuple(_finish_terms(a, field) for a in node.args))
    if isinstance(node, Exists):
        return Exists(node.vars, _finish_terms(node.body, field))
    raise TypeError(node)


def parse_val_formula(text, field=None):
    """Parse ASCII syntax: ``O(x)``, ``x*y - 1 = 0``, ``~``, ``&``, ``|``, ``exists y, z: ...``."""
    parser = _FormulaParser(text)
    if parser.peek()[0] == "end":
        raise ParseError("empty formula", 0)
    node = parser.formula()
    tok = parser.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    body = _finish_terms(node, field)
    language = "val" if any(isinstance(a, OAtom) for a in atoms(body)) else "ring"
    return Formula(tuple(sorted(free_vars(body))), body, language)


# ---------------------------------------------------------------------------
# valued language -> ring language
# ---------------------------------------------------------------------------

def _nnf(node, negate=False):
    if isinstance(node, (Atom, OAtom)):
        return Not(node) if negate else node
    if isinstance(node, Not):
        return _nnf(node.arg, not negate)
    if isinstance(node, (And, Or)):
        kind = type(node)
        if negate:
            kind = Or if kind is And else And
        return kind(tuple(_nnf(a, negate) for a in node.args))
    if isinstance(node, Exists):
        if negate:
            raise ValueError("input is not existential: negated quantifier")
        return Exists(node.vars, _nnf(node.body), node.tag, node.subject, node.roles, node.params)
    raise TypeError(node)


class _Translator:
    def __init__(self, field, reserved):
        if field.q > MAX_TRANSLATE_Q:
            raise ValueError(f"q = {field.q} exceeds the translator cap {MAX_TRANSLATE_Q}")
        self.field = field
        self.fresh = Fresh(reserved)
        self.chi = emit_chi(field).body

    def chi_of(self, term):
        block = rename_bound(self.chi, self.fresh)
        return substitute(block, {"x": term})

    def inv_block(self, s):
        w = self.fresh("w")
        body = And((Atom(Sub(Mul(Var(w), s), ONE)), self.chi_of(Var(w))))
        return Exists((w,), body, "inv_O", s, ((w, "inverse"),))

    def diagram(self, ys):
        """Finite diagram of F_q on ``ys`` (``ys[i]`` plays the element of index ``i``)."""
        F = self.field
        els = F.elements()
        idx = {e.index: i for i, e in enumerate(els)}
        parts = [Atom(ys[0])]
        for i in range(len(ys)):
            for j in range(i + 1, len(ys)):
                parts.append(Not(Atom(Sub(ys[i], ys[j]))))
        for i in range(len(ys)):
            for j in range(i, len(ys)):
                s = els[i] + els[j]
                parts.append(Atom(Sub(Add(ys[i], ys[j]), ys[idx[s.index]])))
                m = els[i] * els[j]
                parts.append(Atom(Sub(Mul(ys[i], ys[j]), ys[idx[m.index]])))
        if F.k > 1:
            gen = ys[F.gen.index]
            parts.append(Atom(poly_term(list(F.modulus), gen, F.p)))
        return parts

    def psi_M(self, z):
        names = [self.fresh("y") for _ in range(self.field.q)]
        ys = [Var(n) for n in names]
        parts = [self.chi_of(z)]
        parts += self.diagram(ys)
        for i in range(1, self.field.q):
            parts.append(self.inv_block(Add(ys[i], z)))
        roles = tuple((n, f"element:{i}") for i, n in enumerate(names))
        return Exists(tuple(names), And(tuple(parts)), "M", z, roles)

    def not_O(self, tau):
        z = self.fresh("z")
        body = And((Atom(Sub(Mul(Var(z), tau), ONE)), self.psi_M(Var(z))))
        return Exists((z,), body, "not_O", tau, ((z, "inverse"),))

    def translate(self, node):
        if isinstance(node, OAtom):
            return self.chi_of(node.term)
        if isinstance(node, Not) and isinstance(node.arg, OAtom):
            return self.not_O(node.arg.term)
        if isinstance(node, (Atom, Not)):
            return node
        if isinstance(node, (And, Or)):
            return type(node)(tuple(self.translate(a) for a in node.args))
        if isinstance(node, Exists):
            return Exists(node.vars, self.translate(node.body), node.tag, node.subject, node.roles, node.params)
        raise TypeError(node)


def _all_names(node, acc):
    if isinstance(node, (Atom, OAtom)):
        acc |= term_vars(node.term)
    elif isinstance(node, Not):
        _all_names(node.arg, acc)
    elif isinstance(node, (And, Or)):
        for a in node.args:
            _all_names(a, acc)
    elif isinstance(node, Exists):
        acc |= set(node.vars)
        _all_names(node.body, acc)
    return acc


def translate_val_to_ring(alpha, field):
    """Existential valued-language formula to an equivalent parameter-free ring formula."""
    body = _nnf(alpha.body)
    tr = _Translator(field, _all_names(body, set()) | set(alpha.free))
    out = tr.translate(body)
    return Formula(alpha.free, out, "ring")


# ---------------------------------------------------------------------------
# multivariate polynomials and the H10 reduction
# ---------------------------------------------------------------------------

class MultiPoly:
    """Sparse polynomial over F_q: exponent tuple -> nonzero FFElement."""

    __slots__ = ("field", "vars", "terms")

    def __init__(self, field, variables, terms):
        self.field = field
        self.vars = tuple(variables)
        self.terms = {e: field.element(c) for e, c in terms.items() if field.element(c)}

    @classmethod
    def const(cls, field, variables, c):
        return cls(field, variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, field, variables, name):
        e = tuple(1 if v == name else 0 for v in variables)
        return cls(field, variables, {e: 1})

    def degree_in(self, name):
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=0)

    @property
    def degrees(self):
        return {v: self.degree_in(v) for v in self.vars}

    @property
    def total_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        other = self._co(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, self.field.zero) + c
        return MultiPoly(self.field, self.vars, out)

    def __neg__(self):
        return MultiPoly(self.field, self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._co(other))

    def __mul__(self, other):
        other = self._co(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, self.field.zero) + c1 * c2
        return MultiPoly(self.field, self.vars, out)

    __radd__ = __add__
    __rmul__ = __mul__

    def __pow__(self, n):
        out = MultiPoly.const(self.field, self.vars, 1)
        for _ in range(n):
            out = out * self
        return out

    def _co(self, other):
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise ValueError("variable lists differ")
            return other
        return MultiPoly.const(self.field, self.vars, other)

    def __eq__(self, other):
        return isinstance(other, MultiPoly) and self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    def __call__(self, point):
        """Evaluate at a mapping variable -> series value."""
        F = self.field
        total = LaurentPoly.zero(F)
        for e, c in self.terms.items():
            term = LaurentPoly.const(F, c)
            for v, k in zip(self.vars, e):
                if k:
                    term = term * point[v] ** k
            total = total + term
        return total

    def shift(self, shifts):
        """``f(x + s)`` for a mapping variable -> F_q constant."""
        result = MultiPoly(self.field, self.vars, {})
        subs = [MultiPoly.var(self.field, self.vars, v) + shifts.get(v, 0) for v in self.vars]
        for e, c in self.terms.items():
            term = MultiPoly.const(self.field, self.vars, c)
            for s, k in zip(subs, e):
                term = term * s ** k
            result = result + term
        return result

    def to_term(self):
        F = self.field
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = None
            for v, k in zip(self.vars, e):
                if k:
                    f = Var(v) if k == 1 else Pow(Var(v), k)
                    mono = f if mono is None else Mul(mono, f)
            if c.index < F.p:
                n = c.index
                coef = None if n == 1 and mono is not None else numeral(n)
            else:
                coef = FieldConst(str(c))
            t = mono if coef is None else (coef if mono is None else Mul(coef, mono))
            parts.append(t)
        if not parts:
            return ZERO
        out = parts[0]
        for t in parts[1:]:
            out = Add(out, t)
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            cs = str(c)
            if "+" in cs:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif c == self.field.one:
                parts.append(mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"MultiPoly({self}, vars={self.vars})"


class _MultiRing:
    def __init__(self, field, variables):
        self.field = field
        self.vars = variables

    def num(self, n, pos):
        return MultiPoly.const(self.field, self.vars, n)

    def name(self, name, pos):
        if name == "g" and self.field.k > 1:
            return MultiPoly.const(self.field, self.vars, self.field.gen)
        if name == "t":
            raise ParseError("t is not allowed in a polynomial over F_q", pos)
        return MultiPoly.var(self.field, self.vars, name)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def pow(self, a, e, pos):
        if e.denominator != 1 or e < 0:
            raise ParseError("polynomial exponents must be non-negative integers", pos)
        return a ** int(e)


def _names_in(node, acc):
    if node[0] == "name":
        acc.add(node[1])
    elif node[0] in ("add", "sub", "mul", "div"):
        _names_in(node[1], acc)
        _names_in(node[2], acc)
    elif node[0] in ("neg", "pow"):
        _names_in(node[1], acc)
    return acc


def parse_multipoly(text, field, variables=None):
    """Parse ``"x^2*y + 2*x + 1"``; ``g`` is the field generator when ``k > 1``."""
    ast = parse_expr(text)
    if variables is None:
        names = _names_in(ast, set())
        names.discard("t")
        if field.k > 1:
            names.discard("g")
        variables = tuple(sorted(names))
    return evaluate(ast, _MultiRing(field, tuple(variables)))


@dataclass
class H10Reduction:
    poly: MultiPoly
    subsets: tuple
    polys: tuple
    formula: Formula

    @property
    def disjuncts(self):
        return len(self.subsets)


def subset_poly(f, subset):
    """``f_{x'} = f(x'') * prod_{x in x'} x^{d_x}`` where ``x''`` inverts the variables in ``subset``."""
    idx = [f.vars.index(v) for v in subset]
    deg = [f.degree_in(v) for v in f.vars]
    out = {}
    for e, c in f.terms.items():
        e2 = list(e)
        for i in idx:
            e2[i] = deg[i] - e[i]
            if e2[i] < 0:
                raise AssertionError("negative exponent after clearing denominators")
        out[tuple(e2)] = c
    return MultiPoly(f.field, f.vars, out)


def h10_reduce(f):
    """Disjunction over subsets ``x'`` of ``f_{x'} ≐ 0 ∧ ⋀_{x in x'} ¬x ≐ 0``."""
    n = len(f.vars)
    if n > MAX_H10_VARS:
        raise ValueError(f"{n} variables exceed the cap of {MAX_H10_VARS}")
    subsets, polys, disjuncts = [], [], []
    for mask in range(1 << n):
        sub = tuple(v for i, v in enumerate(f.vars) if mask >> i & 1)
        g = subset_poly(f, sub)
        subsets.append(sub)
        polys.append(g)
        parts = [Atom(g.to_term())] + [Not(Atom(Var(v))) for v in sub]
        disjuncts.append(parts[0] if len(parts) == 1 else And(tuple(parts)))
    formula = Formula(f.vars, Or(tuple(disjuncts)), "ring")
    return H10Reduction(f, tuple(subsets), tuple(polys), formula)


def h10_forward(f):
    """``∃x (f(x) ≐ 0 ∧ ⋀ O(x))``: zeros of ``f`` inside the valuation ring."""
    parts = [Atom(f.to_term())] + [OAtom(Var(v)) for v in f.vars]
    return Formula((), Exists(f.vars, And(tuple(parts))), "val")


def transport_forward(f, point):
    """Invert the negative-valuation coordinates of a zero: ``(subset, integral point)``."""
    subset = tuple(v for v in f.vars if not point[v].is_zero() and point[v].valuation() < 0)
    out = {v: (1 / point[v] if v in subset else point[v]) for v in f.vars}
    return subset, out


def transport_backward(f, subset, point):
    return {v: (1 / point[v] if v in subset else point[v]) for v in f.vars}
