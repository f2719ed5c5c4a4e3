"""Definable subsets of K = F_q((t^(1/e))) used to carve out the valuation ring.

The chain is

* ``V = U_{f,a} = f(K)^-1 - f(a)^-1`` (or the union over admissible ``a``),
  with ``B(n; 0) ⊆ V ⊆ Bbar(l_out; 0)``;
* ``W = {c : c^m in V}``, ``X = W - W``, ``psi(K) = {b : b^h in X}``;
* ``Y = psi(K) - psi(K)``, and ``x in O`` iff ``x in y + Y`` for some
  ``y`` with ``y^q = y``.

:func:`chi_decide` builds a witness tree for the last statement and
:func:`verify_certificate` re-checks such a tree by exact arithmetic only.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .finite_field import FFElement, PrimePoly, artin_schreier, find_irreducible, least_prime_not_dividing
from .laurent import LaurentPoly, parse_series
from .local_solver import (DEFAULT_PRECISION, HenselCertificate, decide_U_fa, hensel_lift,
                           u_fa_polynomial, verify_hensel)

CHI_SCHEMA = "valdef.chi-certificate/1"
REFUTATION_SCHEMA = "valdef.chi-refutation/1"


def _eval_list(coeffs, x):
    acc = x * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# the neighbourhood V and the pipeline parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NeighborhoodSpec:
    field: object
    f: PrimePoly
    a_choices: tuple
    inner_radius: Fraction
    outer_radius: Fraction
    variant: str = "minimal"
    mode: str = "union"

    @property
    def l(self):
        return self.f.degree

    @property
    def df(self):
        return self.f.derivative()

    @property
    def a(self):
        """Canonical choice: the admissible element of least index."""
        return self.a_choices[0]


def build_V(field, variant="minimal", mode="union", a=None):
    """Neighbourhood data for ``field``.

    ``variant="minimal"`` takes the canonical irreducible of prime degree
    ``l = least_prime_not_dividing(k)``; ``variant="artin_schreier"`` (prime
    fields only) takes ``x^p - x - 1``.  ``mode="single"`` restricts the union
    to one ``a``.
    """
    p, k = field.p, field.k
    if variant == "minimal":
        f = find_irreducible(p, least_prime_not_dividing(k))
    elif variant == "artin_schreier":
        if k != 1:
            raise ValueError("the Artin-Schreier neighbourhood needs a prime field")
        f = artin_schreier(p)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    # degree l is prime to k, so f stays irreducible over F_q; check the weaker
    # statement that matters here
    if any(not _eval_list(f.coeffs, c) for c in field.elements()):
        raise AssertionError(f"{f} has a root in F_{field.q}")
    df = f.derivative()
    choices = tuple(c for c in field.elements() if _eval_list(df, c))
    if not choices:
        raise AssertionError("no admissible a")
    if mode == "single":
        a = field.element(a) if a is not None else choices[0]
        if a not in choices:
            raise ValueError(f"Df({a}) = 0")
        choices = (a,)
    elif mode != "union":
        raise ValueError(f"unknown mode {mode!r}")
    # Hensel from z = a needs v(w) > 2 v(Df(a)) = 0 since Df(a) is a nonzero constant
    inner = Fraction(0)
    # f has no residue root, so v(f(z)) = min(0, l v(z)) and v(1/f(z)) >= 0
    outer = Fraction(0)
    return NeighborhoodSpec(field, f, choices, inner, outer, variant, mode)


@dataclass(frozen=True)
class PipelineParams:
    n: Fraction
    ell: Fraction
    m: int
    ell_prime: int
    h: int


def pipeline_params(n, ell):
    """Parameters for ``B(n; 0) ⊆ V ⊆ B(ell; 0)``."""
    n = Fraction(n)
    ell = Fraction(ell)
    m = math.floor(n) + 1
    ell_prime = min(math.floor(ell), -1)
    return PipelineParams(n, ell, m, ell_prime, -ell_prime)


def compute_pipeline(spec):
    # V ⊆ Bbar(l_out; 0) ⊆ B(l_out - 1; 0)
    return pipeline_params(spec.inner_radius, spec.outer_radius - 1)


def in_V(w, spec, ram=None, precision=DEFAULT_PRECISION):
    return decide_V(w, spec, ram, precision) is not None


def decide_V(w, spec, ram=None, precision=DEFAULT_PRECISION):
    """``(a, HenselCertificate)`` witnessing ``w in U_{f,a}``, or ``None``."""
    for a in spec.a_choices:
        d = decide_U_fa(w, spec.f, a, precision, ram)
        if d.exists:
            return a, d.certificate
    return None


# ---------------------------------------------------------------------------
# witness trees
# ---------------------------------------------------------------------------

@dataclass
class WWitness:
    """``base^m in U_{f,a}``; the certificate's root is the ``z`` with ``1/f(z) - 1/f(a) = base^m``."""
    base: LaurentPoly
    a: FFElement
    certificate: HenselCertificate


@dataclass
class XWitness:
    plus: WWitness
    minus: WWitness


@dataclass
class PsiWitness:
    base: LaurentPoly
    x_witness: XWitness


@dataclass
class YWitness:
    plus: PsiWitness
    minus: PsiWitness


@dataclass
class ChiCertificate:
    x: LaurentPoly
    ram: int
    y: FFElement
    y_witness: YWitness
    variant: str = "minimal"

    def leaves(self):
        for psi in (self.y_witness.plus, self.y_witness.minus):
            yield psi.x_witness.plus
            yield psi.x_witness.minus

    def to_dict(self):
        e = self.ram

        def w_dict(w):
            return {"base": str(w.base.with_ram(e)), "a": str(w.a), "hensel": w.certificate.to_dict()}

        def psi_dict(psi):
            return {"base": str(psi.base.with_ram(e)),
                    "x_witness": {"plus": w_dict(psi.x_witness.plus), "minus": w_dict(psi.x_witness.minus)}}

        return {
            "schema": CHI_SCHEMA,
            "field": str(self.x.field),
            "ram": e,
            "variant": self.variant,
            "x": str(self.x.with_ram(e)),
            "y": str(self.y),
            "y_witness": {"plus": psi_dict(self.y_witness.plus), "minus": psi_dict(self.y_witness.minus)},
        }

    @classmethod
    def from_dict(cls, d):
        from .finite_field import parse_field_spec
        if d.get("schema") != CHI_SCHEMA:
            raise ValueError(f"expected schema {CHI_SCHEMA!r}")
        field = parse_field_spec(d["field"])
        e = int(d["ram"])

        def w_from(o):
            return WWitness(parse_series(o["base"], field, e), field.parse_element(o["a"]),
                            HenselCertificate.from_dict(o["hensel"], field))

        def psi_from(o):
            xw = o["x_witness"]
            return PsiWitness(parse_series(o["base"], field, e), XWitness(w_from(xw["plus"]), w_from(xw["minus"])))

        yw = d["y_witness"]
        return cls(parse_series(d["x"], field, e), e, field.parse_element(d["y"]),
                   YWitness(psi_from(yw["plus"]), psi_from(yw["minus"])), d.get("variant", "minimal"))


@dataclass
class Refutation:
    """``v(x) < 0`` exhibited by the lowest term, while ``Y ⊆ O``."""
    x: LaurentPoly
    exponent: Fraction
    coefficient: FFElement
    reason: str = "Y is contained in O, so y + Y is contained in O for every y in F_q"

    def to_dict(self):
        return {"schema": REFUTATION_SCHEMA, "field": str(self.x.field), "ram": self.x.ram,
                "x": str(self.x), "exponent": f"{self.exponent.numerator}/{self.exponent.denominator}",
                "coefficient": str(self.coefficient), "reason": self.reason}

    def check(self):
        if self.x.is_zero():
            return False
        n, c = self.x.leading()
        return Fraction(n, self.x.ram) == self.exponent and c == self.coefficient and self.exponent < 0


@dataclass
class Accept:
    certificate: ChiCertificate

    def __bool__(self):
        return True


@dataclass
class Reject:
    refutation: Refutation

    def __bool__(self):
        return False


class Chi:
    """χ-membership for one field, with the neighbourhood and parameters fixed once."""

    def __init__(self, field, variant="minimal", precision=DEFAULT_PRECISION, a=None):
        self.field = field
        self.spec = build_V(field, variant)
        self.params = compute_pipeline(self.spec)
        self.precision = precision
        self.a = self.spec.a if a is None else field.element(a)
        if self.a not in self.spec.a_choices:
            raise ValueError(f"Df({self.a}) = 0")

    def _split(self, target, pi):
        """Write ``target`` (``v >= 1`` in uniformizer units, or 0) as a difference of elements of ``P ∪ {0}``."""
        zero = pi * 0
        if target.is_zero():
            return zero, zero
        if target.val == pi.val:
            return target, zero
        return target - pi, -pi

    def _w_witness(self, c, e):
        spec = self.spec
        a = self.a
        g, _ = u_fa_polynomial(c ** self.params.m, spec.f, a, e)
        z0 = LaurentPoly.const(self.field, a, e)
        return WWitness(c, a, hensel_lift(g, z0, self.precision))

    def _psi_witness(self, b, e, pi):
        plus, minus = self._split(b ** self.params.h, pi)
        return PsiWitness(b, XWitness(self._w_witness(plus, e), self._w_witness(minus, e)))

    def decide(self, x, ram=None):
        if x.field != self.field:
            raise ValueError("x lies over a different field")
        e = math.lcm(x.ram, ram or 1)
        x = x.with_ram(e)
        if not x.is_zero() and x.val < 0:
            n, c = x.leading()
            return Reject(Refutation(x, Fraction(n, e), c))
        y = x.constant_term()
        pi = LaurentPoly.uniformizer(self.field, e)
        u, v = self._split(x - y, pi)
        yw = YWitness(self._psi_witness(u, e, pi), self._psi_witness(v, e, pi))
        return Accept(ChiCertificate(x, e, y, yw, self.spec.variant))

    def check(self, x, cert):
        """List of ``(path, message)`` failures; empty means the certificate is valid for ``x``."""
        errors = []
        spec, params = self.spec, self.params
        e = cert.ram
        if cert.variant != spec.variant:
            errors.append(("variant", f"certificate built for {cert.variant!r}"))
            return errors
        if x.field != self.field or cert.x.field != self.field:
            errors.append(("field", "field mismatch"))
            return errors
        if e % x.ram:
            errors.append(("ram", f"input ramification {x.ram} does not divide {e}"))
            return errors
        if x.with_ram(e) != cert.x.with_ram(e):
            errors.append(("x", "certificate is for a different input"))
        y = cert.y
        if y ** self.field.q != y:
            errors.append(("y", "y^q != y"))
        yw = cert.y_witness
        if x - y != yw.plus.base - yw.minus.base:
            errors.append(("y_witness", "x - y != u - v"))
        for side in ("plus", "minus"):
            psi = getattr(yw, side)
            path = f"y_witness.{side}"
            xw = psi.x_witness
            if psi.base ** params.h != xw.plus.base - xw.minus.base:
                errors.append((path, "b^h != w1 - w2"))
            for wside in ("plus", "minus"):
                w = getattr(xw, wside)
                wpath = f"{path}.x_witness.{wside}"
                if w.a ** self.field.q != w.a or not _eval_list(spec.df, w.a):
                    errors.append((wpath, "a is not an admissible element of F_q"))
                    continue
                if spec.mode == "single" and w.a != spec.a:
                    errors.append((wpath, "a differs from the fixed choice"))
                cert_h = w.certificate
                if cert_h.poly.ram % e or e % w.base.ram:
                    errors.append((wpath, "ramification mismatch"))
                    continue
                g, _ = u_fa_polynomial(w.base ** params.m, spec.f, w.a, cert_h.poly.ram)
                if g != cert_h.poly:
                    errors.append((wpath, "Hensel polynomial is not f(z)(1 + c^m f(a)) - f(a)"))
                elif cert_h.poly.ram != e:
                    errors.append((wpath, "root lives outside the ambient field"))
                elif not verify_hensel(cert_h):
                    errors.append((wpath, "Hensel margin fails"))
        return errors

    def verify(self, x, cert):
        return not self.check(x, cert)


_CHI_CACHE = {}


def chi(field, variant="minimal", a=None):
    key = (field, variant, a)
    if key not in _CHI_CACHE:
        _CHI_CACHE[key] = Chi(field, variant, a=a)
    return _CHI_CACHE[key]


def chi_decide(x, ram=None, variant="minimal"):
    """Accept with a :class:`ChiCertificate` iff ``v(x) >= 0`` in ``F_q((t^(1/e)))``."""
    return chi(x.field, variant).decide(x, ram)


def verify_certificate(x, cert):
    """Exact re-check of every identity and Hensel leaf in ``cert``; never runs a search."""
    return chi(x.field, cert.variant).verify(x, cert)


def check_certificate(x, cert):
    return chi(x.field, cert.variant).check(x, cert)


# ---------------------------------------------------------------------------
# stage membership
# ---------------------------------------------------------------------------

@dataclass
class Membership:
    verdict: str
    witness: object = None
    reason: str = ""

    def __bool__(self):
        return self.verdict == "In"


_SEARCH_CAP = 64


def set_membership(w, stage, ram=None, variant="minimal"):
    """``In``/``Out`` for V and W; ``In``/``Out``/``Unknown`` for X and Y."""
    c = chi(w.field, variant)
    e = math.lcm(w.ram, ram or 1)
    w = w.with_ram(e)
    if stage == "V":
        return _v_member(c, w, e)
    if stage == "W":
        return _w_member(c, w, e)
    if stage in ("X", "Y"):
        return _diff_member(c, w, e, stage)
    raise ValueError(f"unknown stage {stage!r}")


def _v_member(c, w, e):
    found = decide_V(w, c.spec, e, c.precision)
    if found:
        return Membership("In", found, f"w in U_(f,{found[0]})")
    if not w.is_zero() and w.val < 0:
        return Membership("Out", None, "v(w) < 0 while V ⊆ O")
    return Membership("Out", None, "no admissible a has a root z")


def _w_member(c, w, e):
    res = _v_member(c, w ** c.params.m, e)
    if res:
        return Membership("In", res.witness, f"w^{c.params.m} in V")
    return Membership("Out", None, f"w^{c.params.m} not in V: {res.reason}")


def _diff_member(c, w, e, stage):
    if w.is_zero() or w.val >= 1:
        pi = LaurentPoly.uniformizer(w.field, e)
        if stage == "X":
            plus, minus = c._split(w, pi)
            return Membership("In", XWitness(c._w_witness(plus, e), c._w_witness(minus, e)), "M ⊆ X")
        plus, minus = c._split(w, pi)
        return Membership("In", YWitness(c._psi_witness(plus, e, pi), c._psi_witness(minus, e, pi)), "M ⊆ Y")
    if w.val < 0:
        return Membership("Out", None, f"v(w) < 0 while {stage} ⊆ O")
    # v(w) = 0: search differences whose second term is a constant
    field = w.field
    if field.q > _SEARCH_CAP:
        return Membership("Unknown", None, "v(w) = 0 and F_q too large for the constant search")
    member = _w_member if stage == "X" else _psi_member
    for k in field.elements():
        kc = LaurentPoly.const(field, k, e)
        lhs, rhs = member(c, w + kc, e), member(c, kc, e)
        if lhs and rhs:
            return Membership("In", (lhs.witness, rhs.witness), f"w = (w + {k}) - {k}")
    return Membership("Unknown", None, "v(w) = 0 and no difference with a constant term found")


def _psi_member(c, b, e):
    inner = _diff_member(c, b ** c.params.h, e, "X")
    return inner if inner.verdict == "In" else Membership("Unknown")
