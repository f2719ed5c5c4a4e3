"""Henselian root decisions over K = F_q((t^(1/e))).

Everything here works on polynomials whose coefficients are exact Laurent
polynomials.  Roots are reported through :class:`HenselCertificate`: an
approximate root ``z0`` together with the exact valuations of ``g(z0)`` and
``g'(z0)``.  A certificate is accepted by :func:`verify_hensel` only if, in the
Taylor expansion ``g(z0 + u) = sum_j G_j u^j``,

* ``v(G_0) > 2 v(G_1)`` (the classical Hensel margin), and
* ``v(G_j) + j*(v(G_0) - v(G_1)) > v(G_0)`` for every ``j >= 2``,

so that the Newton polygon of ``g(z0 + u)`` starts with an edge of length one.
That edge is a linear factor over the henselian field K, hence a root ``z*``
with ``v(z* - z0) = v(G_0) - v(G_1)``.  For integral data the second condition
follows from the first.
"""

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import reduce

import numpy as np

from . import _kernels
from .finite_field import FFElement, poly_roots_in_field
from .laurent import INF, LaurentPoly, divexact, lp_gcd

DEFAULT_PRECISION = 64


class HenselError(ValueError):
    """The starting point does not satisfy the Hensel margin."""

    def __init__(self, v_g, v_dg, detail=""):
        msg = f"Hensel margin violated: v(g(y0)) = {v_g}, v(g'(y0)) = {v_dg}"
        super().__init__(msg + (f" ({detail})" if detail else ""))
        self.v_g = v_g
        self.v_dg = v_dg


class DepthExceeded(RuntimeError):
    def __init__(self, bound, trace):
        super().__init__(f"Newton polygon recursion exceeded depth bound {bound}")
        self.bound = bound
        self.trace = trace


def _lcm(a, b):
    return a * b // math.gcd(a, b)


# ---------------------------------------------------------------------------
# polynomials over K
# ---------------------------------------------------------------------------

class LocalPoly:
    """Polynomial in ``z`` with LaurentPoly coefficients, constant-first.

    ``ram`` is the ambient ramification index: roots are sought in
    ``F_q((t^(1/ram)))``.  All coefficients are stored over that index.
    """

    __slots__ = ("field", "ram", "coeffs")

    def __init__(self, coeffs, field=None, ram=None):
        coeffs = list(coeffs)
        if field is None:
            field = next(c.field for c in coeffs if isinstance(c, LaurentPoly))
        e = ram or 1
        for c in coeffs:
            if isinstance(c, LaurentPoly):
                e = _lcm(e, c.ram)
        out = []
        for c in coeffs:
            if not isinstance(c, LaurentPoly):
                c = LaurentPoly.const(field, c, e)
            out.append(c.with_ram(e))
        while out and out[-1].is_zero():
            out.pop()
        self.field = field
        self.ram = e
        self.coeffs = out

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    @property
    def lc(self):
        return self.coeffs[-1]

    def with_ram(self, e):
        return LocalPoly(self.coeffs, self.field, _lcm(e, self.ram))

    def __call__(self, z):
        acc = LaurentPoly.zero(self.field, self.ram)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self):
        p = self.field.p
        return LocalPoly([c.scale(i % p) for i, c in enumerate(self.coeffs)][1:],
                         self.field, self.ram)

    def taylor_shift(self, z0):
        """Coefficients of ``g(z0 + u)`` in ``u`` (the Hasse derivatives at ``z0``)."""
        a = list(self.coeffs)
        n = len(a)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                a[j] = a[j] + z0 * a[j + 1]
        return LocalPoly(a, self.field, self.ram)

    def scale_var(self, n):
        """``g(s^n u)`` with ``s = t^(1/ram)``."""
        return LocalPoly([c.shift(n * i) for i, c in enumerate(self.coeffs)], self.field, self.ram)

    def mul_coeffs(self, c):
        return LocalPoly([a * c for a in self.coeffs], self.field, self.ram)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        zero = LaurentPoly.zero(self.field, self.ram)
        a = self.coeffs + [zero] * (n - len(self.coeffs))
        b = other.coeffs + [zero] * (n - len(other.coeffs))
        return LocalPoly([x + y for x, y in zip(a, b)], self.field, _lcm(self.ram, other.ram))

    def __neg__(self):
        return LocalPoly([-c for c in self.coeffs], self.field, self.ram)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LocalPoly):
            return self.mul_coeffs(other)
        if self.is_zero() or other.is_zero():
            return LocalPoly([], self.field, _lcm(self.ram, other.ram))
        out = [LaurentPoly.zero(self.field, self.ram)] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return LocalPoly(out, self.field, _lcm(self.ram, other.ram))

    def __eq__(self, other):
        if not isinstance(other, LocalPoly):
            return NotImplemented
        return len(self.coeffs) == len(other.coeffs) and all(
            a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def proportional_to(self, other):
        """True iff ``self = c * other`` for a nonzero scalar ``c`` in K."""
        if self.is_zero() or other.is_zero() or self.degree != other.degree:
            return False
        lead_a, lead_b = self.lc, other.lc
        return all(a * lead_b == b * lead_a for a, b in zip(self.coeffs, other.coeffs))

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
                parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"LocalPoly({self}, ram={self.ram})"

    @classmethod
    def from_roots(cls, roots, field, ram=1):
        g = cls([LaurentPoly.const(field, 1, ram)], field, ram)
        for r in roots:
            g = g * cls([-r, LaurentPoly.const(field, 1, ram)], field, ram)
        return g


# gcd machinery over R = F_q[s, 1/s] ----------------------------------------

def content(g):
    return reduce(lp_gcd, g.coeffs)


def primitive(g):
    if g.is_zero():
        return g
    c = content(g)
    out = [divexact(a, c) for a in g.coeffs]
    # pin the leading coefficient's lowest term to 1 for a canonical associate
    lead = out[-1]
    inv = lead.coefficient(lead.val).inverse()
    return LocalPoly([a.scale(inv).shift(-lead.val) for a in out], g.field, g.ram)


def pseudo_divmod(a, b):
    """``(q, r, m)`` with ``lc(b)^m * a == q*b + r`` and ``deg r < deg b``."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    zero = LaurentPoly.zero(a.field, a.ram)
    r = list(a.coeffs)
    db = b.degree
    lb = b.lc
    q = [zero] * max(0, len(r) - db)
    m = 0
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        lr = r[-1]
        q = [c * lb for c in q]
        q[shift] = q[shift] + lr
        r = [c * lb for c in r]
        for i, c in enumerate(b.coeffs):
            r[i + shift] = r[i + shift] - lr * c
        m += 1
        while r and r[-1].is_zero():
            r.pop()
    return LocalPoly(q, a.field, a.ram), LocalPoly(r, a.field, a.ram), m


def poly_gcd(a, b):
    """gcd in K[z] up to scalars, primitive over F_q[s, 1/s]."""
    if a.is_zero():
        return primitive(b)
    if b.is_zero():
        return primitive(a)
    if a.degree < b.degree:
        a, b = b, a
    a, b = primitive(a), primitive(b)
    while not b.is_zero():
        if b.degree == 0:
            return LocalPoly([LaurentPoly.const(a.field, 1, a.ram)], a.field, a.ram)
        _, r, _ = pseudo_divmod(a, b)
        a, b = b, (primitive(r) if not r.is_zero() else r)
    return a


def poly_divexact(a, b):
    q, r, _ = pseudo_divmod(a, b)
    if not r.is_zero():
        raise ValueError("polynomial not divisible")
    return primitive(q)


def divides(b, a):
    """True iff ``b`` divides ``a`` in K[z]."""
    _, r, _ = pseudo_divmod(a, b)
    return r.is_zero()


def resultant(a, b):
    """Resultant of ``a`` and ``b`` via fraction-free (Bareiss) elimination of the Sylvester matrix."""
    m, n = a.degree, b.degree
    size = m + n
    zero = LaurentPoly.zero(a.field, a.ram)
    rows = []
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(reversed(a.coeffs)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j, c in enumerate(reversed(b.coeffs)):
            row[i + j] = c
        rows.append(row)
    M = rows
    sign = 1
    prev = LaurentPoly.const(a.field, 1, a.ram)
    for k in range(size - 1):
        if M[k][k].is_zero():
            piv = next((i for i in range(k + 1, size) if not M[i][k].is_zero()), None)
            if piv is None:
                return zero
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                M[i][j] = divexact(M[k][k] * M[i][j] - M[i][k] * M[k][j], prev)
            M[i][k] = zero
        prev = M[k][k]
    det = M[size - 1][size - 1]
    return det if sign == 1 else -det


# ---------------------------------------------------------------------------
# Newton polygons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Edge:
    start: tuple
    end: tuple
    slope: Fraction

    @property
    def length(self):
        return self.end[0] - self.start[0]

    @property
    def root_valuation(self):
        return -self.slope


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple
    edges: tuple

    @property
    def height(self):
        vs = [v for _, v in self.vertices]
        return max(vs) - min(vs)


def newton_polygon(g):
    """Lower convex hull of ``(i, v(c_i))`` over the nonzero coefficients."""
    pts = [(i, c.valuation()) for i, c in enumerate(g.coeffs) if c]
    if not pts:
        raise ValueError("zero polynomial has no Newton polygon")
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] unless it lies strictly below the chord to pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    edges = tuple(Edge(a, b, Fraction(b[1] - a[1]) / (b[0] - a[0])) for a, b in zip(hull, hull[1:]))
    return NewtonPolygon(tuple(hull), edges)


def residual_polynomial(g, edge):
    """F_q-coefficients (constant-first, in ``y^(i - i0)``) of the edge's residual polynomial."""
    lam = edge.root_valuation
    i0, v0 = edge.start
    mu = v0 + lam * i0
    out = []
    for i in range(i0, edge.end[0] + 1):
        c = g.coeffs[i]
        if c and c.valuation() + lam * i == mu:
            out.append(c.coefficient(c.val))
        else:
            out.append(g.field.zero)
    return out


def _multiplicity(coeffs, r):
    m = 0
    cur = list(coeffs)
    while len(cur) > 1:
        # synthetic division by (y - r)
        acc = cur[-1] * 0
        quot = []
        for c in reversed(cur):
            acc = acc * r + c
            quot.append(acc)
        rem = quot.pop()
        if rem:
            break
        m += 1
        cur = list(reversed(quot))
    return m


# ---------------------------------------------------------------------------
# Hensel certificates
# ---------------------------------------------------------------------------

def _vnum(x):
    return None if x.is_zero() else x.val


def _fr(n, e):
    return INF if n is None else Fraction(n, e)


@dataclass
class HenselCertificate:
    poly: LocalPoly
    approx_root: LaurentPoly
    v_g: object
    v_dg: object
    precision: object

    def to_dict(self):
        e = self.poly.ram
        return {
            "field": str(self.poly.field),
            "ram": e,
            "poly": [str(c) for c in self.poly.coeffs],
            "approx_root": str(self.approx_root.with_ram(e)),
            "v_g": _fmt_val(self.v_g),
            "v_dg": _fmt_val(self.v_dg),
            "precision": _fmt_val(self.precision),
        }

    @classmethod
    def from_dict(cls, d, field):
        from .laurent import parse_series
        e = int(d["ram"])
        poly = LocalPoly([parse_series(s, field, e) for s in d["poly"]], field, e)
        return cls(poly, parse_series(d["approx_root"], field, e),
                   _parse_val(d["v_g"]), _parse_val(d["v_dg"]), _parse_val(d["precision"]))


def _fmt_val(v):
    if v == INF:
        return "inf"
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def _parse_val(s):
    if s == "inf":
        return INF
    num, _, den = str(s).partition("/")
    return Fraction(int(num), int(den or 1))


def _dominance(G):
    """Check the length-one first edge condition on Taylor coefficients ``G``."""
    v0 = _vnum(G.coeffs[0]) if G.coeffs and G.coeffs[0] else None
    if v0 is None:
        return True, None, None
    if len(G.coeffs) < 2 or not G.coeffs[1]:
        return False, v0, None
    v1 = G.coeffs[1].val
    delta = v0 - v1
    for j in range(2, len(G.coeffs)):
        c = G.coeffs[j]
        if c and c.val + j * delta <= v0:
            return False, v0, v1
    return True, v0, v1


def check_margin(g, z0):
    """Exact margins ``(ok, v_g, v_dg)`` at ``z0``, valuations as Fractions."""
    G = g.taylor_shift(z0)
    ok, v0, v1 = _dominance(G)
    if ok and v0 is not None and not v0 > 2 * v1:
        ok = False
    return ok, _fr(v0, g.ram), _fr(v1, g.ram)


def verify_hensel(cert):
    """Re-check a certificate by exact arithmetic only."""
    g = cert.poly
    if g.is_zero() or g.degree < 1:
        return False
    z0 = cert.approx_root
    if g.ram % z0.ram:
        return False
    G = g.taylor_shift(z0)
    ok, v0, v1 = _dominance(G)
    if not ok:
        return False
    e = g.ram
    if v0 is None:
        return cert.v_g == INF and cert.precision == INF
    if cert.v_g != Fraction(v0, e) or cert.v_dg != Fraction(v1, e):
        return False
    if not v0 > 2 * v1:
        return False
    return cert.precision == Fraction(v0 - v1, e)


# power-series Newton on raw coefficient blocks ----------------------------

def _block(x, n, k):
    """Coefficients of ``x`` (integral, ``val >= 0``) as an ``(n, k)`` block."""
    out = np.zeros((n, k), np.int64)
    if x.is_zero() or x.val >= n:
        return out
    rows = min(x.coef.shape[0], n - x.val)
    out[x.val:x.val + rows] = x.coef[:rows]
    return out


def _newton_series(H, u0, n, field):
    """Solve ``H(u) = 0`` mod ``s^n`` by Newton iteration from the constant ``u0``.

    ``H`` is a list of ``(n, k)`` blocks (integral coefficients) and ``H'(u0)``
    must be a unit.
    """
    p, mod = field.p, field.mod_array
    k = field.k
    d = len(H) - 1
    dH = [(j * H[j]) % p for j in range(1, d + 1)]
    u = np.zeros((n, k), np.int64)
    u[0] = u0
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        val = H[d][:prec].copy()
        for j in range(d - 1, -1, -1):
            val = (_pad(_kernels.mul_trunc(val, u[:prec], prec, p, mod), prec) + H[j][:prec]) % p
        der = dH[-1][:prec].copy()
        for j in range(d - 2, -1, -1):
            der = (_pad(_kernels.mul_trunc(der, u[:prec], prec, p, mod), prec) + dH[j][:prec]) % p
        lead = FFElement(field, tuple(int(c) for c in der[0]))
        inv = _kernels.inv_trunc(der, prec, lead.inverse().as_array(), p, mod)
        step = _pad(_kernels.mul_trunc(val, inv, prec, p, mod), prec)
        u[:prec] = (u[:prec] - step) % p
    return u


def _pad(a, n):
    if a.shape[0] == n:
        return a
    out = np.zeros((n, a.shape[1]), np.int64)
    out[:a.shape[0]] = a[:n]
    return out


def hensel_lift(g, y0, precision=DEFAULT_PRECISION):
    """Refine ``y0`` to a root approximation known modulo ``t^(precision/e)``.

    ``precision`` is in exponent-numerator units of the ambient ramification
    ``g.ram``.  Raises :class:`HenselError` if the margin fails at ``y0``.
    """
    y0 = y0.with_ram(_lcm(y0.ram, g.ram)) if g.ram % y0.ram == 0 else y0
    if y0.ram != g.ram:
        raise ValueError("starting point lies outside the ambient field")
    e = g.ram
    G = g.taylor_shift(y0)
    ok, v0, v1 = _dominance(G)
    if not ok:
        raise HenselError(_fr(v0, e), _fr(v1, e))
    if v0 is None:
        return HenselCertificate(g, y0, INF, _fr(_vnum(G.coeffs[1]) if len(G.coeffs) > 1 else None, e), INF)
    target = precision
    while True:
        delta = v0 - v1
        n = max(target - delta, 1)
        # H(u) = s^(-v0) G(y0 + s^delta u) has integral coefficients and H(0), H'(0) units
        H = [_block(c.shift(j * delta - v0), n, g.field.k) for j, c in enumerate(G.coeffs)]
        h0 = FFElement(g.field, tuple(int(c) for c in H[0][0]))
        h1 = FFElement(g.field, tuple(int(c) for c in H[1][0]))
        u0 = (-(h0 / h1)).as_array()
        u = _newton_series(H, u0, n, g.field)
        z = y0 + LaurentPoly(g.field, e, delta, u)
        z = z.truncate(max(target, delta + 1))
        ok, vg, vdg = check_margin(g, z)
        if vg == INF:
            return HenselCertificate(g, z, INF, vdg, INF)
        if ok and vg - vdg >= Fraction(target, e):
            return HenselCertificate(g, z, vg, vdg, vg - vdg)
        # margin too thin for the classical inequality: lift further
        target = 2 * target + 1


# ---------------------------------------------------------------------------
# decisions
# ---------------------------------------------------------------------------

@dataclass
class RootDecision:
    exists: bool
    certificate: HenselCertificate = None
    trace: list = dc_field(default_factory=list)

    def __bool__(self):
        return self.exists


@dataclass
class PowerDecision:
    is_power: bool
    certificate: HenselCertificate = None
    failed_test: str = None

    def __bool__(self):
        return self.is_power


def is_lth_power(u, l, precision=DEFAULT_PRECISION, ram=None):
    """Decide whether ``u`` is an ``l``-th power in ``F_q((t^(1/e)))``, ``l`` prime to ``p``."""
    field = u.field
    if l == field.p or l % field.p == 0:
        raise ValueError(f"l = {l} is divisible by the characteristic (inseparable case)")
    if u.is_zero():
        raise ValueError("u must be nonzero")
    e = _lcm(ram or u.ram, u.ram)
    u = u.with_ram(e)
    n, r = u.leading()
    if n % l:
        return PowerDecision(False, failed_test=f"valuation {Fraction(n, e)} not divisible by {l}")
    q = field.q
    if r ** ((q - 1) // math.gcd(l, q - 1)) != field.one:
        return PowerDecision(False, failed_test=f"residue {r} is not an {l}-th power in F_{q}")
    rho = poly_roots_in_field([-r] + [0] * (l - 1) + [1], field)[0]
    one = LaurentPoly.const(field, 1, e)
    zero = LaurentPoly.zero(field, e)
    g = LocalPoly([-u] + [zero] * (l - 1) + [one], field, e)
    y0 = LaurentPoly.monomial(field, rho, n // l, e)
    return PowerDecision(True, certificate=hensel_lift(g, y0, precision))


def _inseparable_reduction(g):
    """For ``g(z) = h(z^p)`` return polys ``H_i`` with ``g = sum_i s^i H_i^p``."""
    p = g.field.p
    e = g.ram
    parts = [[] for _ in range(p)]
    for j in range(0, len(g.coeffs), p):
        c = g.coeffs[j]
        split = [dict() for _ in range(p)]
        for n, a in c.terms.items():
            i = n % p
            split[i][(n - i) // p] = a.proot()
        for i in range(p):
            parts[i].append(LaurentPoly.from_terms(g.field, split[i], e))
    return [LocalPoly(h, g.field, e) for h in parts]


def _exact_root_cert(g, z):
    dz = g.derivative()(z)
    return HenselCertificate(g, z, INF, _fr(_vnum(dz), g.ram), INF)


def root_exists(g, precision=DEFAULT_PRECISION, depth_bound=None):
    """Decide whether ``g`` has a root in ``F_q((t^(1/g.ram)))``.

    Positive answers carry a certificate for a factor of ``g`` (so every root of
    ``cert.poly`` is a root of ``g``); negative answers carry the trace of the
    exhausted search.
    """
    trace = []
    cert = _decide(g, trace, precision, depth_bound)
    return RootDecision(cert is not None, cert, trace)


def _decide(g, trace, precision, depth_bound):
    if g.is_zero():
        raise ValueError("zero polynomial")
    if g.degree == 0:
        trace.append("constant polynomial: no root")
        return None
    if g.coeffs[0].is_zero():
        trace.append("constant term vanishes: root 0")
        return _exact_root_cert(g, LaurentPoly.zero(g.field, g.ram))
    dg = g.derivative()
    if dg.is_zero():
        hs = [h for h in _inseparable_reduction(g) if not h.is_zero()]
        r = reduce(poly_gcd, hs)
        trace.append(f"g' = 0: reduced to common factor of the p-parts, degree {r.degree}")
        return _decide(r, trace, precision, depth_bound)
    c = poly_gcd(g, dg)
    if c.degree >= 1:
        w = poly_divexact(g, c)
        trace.append(f"squarefree split: separable part degree {w.degree}, repeated part degree {c.degree}")
    else:
        w = g
    cert = _search_separable(w, trace, precision, depth_bound)
    if cert is None and c.degree >= 1:
        cert = _decide(c, trace, precision, depth_bound)
    return cert


def _height_depth_bound(w):
    poly = newton_polygon(w)
    return w.degree * (1 + int(math.ceil(poly.height * w.ram)))


def _discriminant_depth_bound(w):
    d = w.degree
    if d < 2:
        return 1
    e = w.ram
    res = resultant(w, w.derivative())
    if res.is_zero():
        raise ValueError("polynomial is not separable")
    v_res = Fraction(res.val)
    v_lc = Fraction(w.lc.val)
    lam_min = min(Fraction(ed.root_valuation) * e for ed in newton_polygon(w).edges)
    pair_sum = (v_res - (2 * d - 1) * v_lc) / 2
    rho_max = pair_sum - (d * (d - 1) // 2 - 1) * lam_min
    return int(math.ceil(max(rho_max - lam_min, 0))) + 2


def _search_separable(w, trace, precision, depth_bound):
    e = w.ram
    bound = depth_bound
    if bound is None:
        bound = max(_height_depth_bound(w), _discriminant_depth_bound(w))
    zero = LaurentPoly.zero(w.field, e)
    return _branch(w, w, zero, 0, 0, bound, trace, precision)


def _branch(w, G, offset, scale, depth, bound, trace, precision):
    """Roots of ``w`` of the form ``offset + s^scale * u`` where ``G(u) = w(offset + s^scale u)``."""
    field = w.field
    e = w.ram
    if G.coeffs[0].is_zero():
        trace.append(f"depth {depth}: exact root {offset}")
        return _exact_root_cert(w, offset)
    poly = newton_polygon(G)
    for edge in poly.edges:
        lam = edge.root_valuation * e
        if lam.denominator != 1:
            trace.append(f"depth {depth}: edge slope {edge.slope} not in (1/{e})Z")
            continue
        lam = int(lam)
        if depth > 0 and lam <= 0:
            continue
        res = residual_polynomial(G, edge)
        roots = [r for r in poly_roots_in_field(res, field) if r]
        if not roots:
            trace.append(f"depth {depth}: residual polynomial of slope {edge.slope} has no root in F_{field.q}")
            continue
        for r in roots:
            m = _multiplicity(res, r)
            z_lead = LaurentPoly.monomial(field, r, lam, e)
            z0 = offset + z_lead.shift(scale)
            if m == 1:
                trace.append(f"depth {depth}: simple residual root {r} at slope {edge.slope}")
                return hensel_lift(w, z0, precision)
            if depth + 1 > bound:
                raise DepthExceeded(bound, trace)
            trace.append(f"depth {depth}: residual root {r} of multiplicity {m}, refining")
            G1 = G.taylor_shift(z_lead).scale_var(lam)
            cert = _branch(w, G1, z0, scale + lam, depth + 1, bound, trace, precision)
            if cert is not None:
                return cert
    return None


def verify_root(g, cert):
    """``cert`` certifies a root of ``g``: its polynomial divides ``g`` and its margins re-check."""
    return divides(cert.poly, g.with_ram(cert.poly.ram)) and verify_hensel(cert)


# ---------------------------------------------------------------------------
# the sets U_{f,a}
# ---------------------------------------------------------------------------

def u_fa_polynomial(w, f, a, ram=None):
    """``f(z)*(D + N*f(a)) - f(a)*D`` for ``w = N/D``; roots are the ``z`` with ``1/f(z) - 1/f(a) = w``."""
    from .laurent import numer_denom
    num, den = numer_denom(w)
    e = _lcm(ram or num.ram, num.ram)
    num, den = num.with_ram(e), den.with_ram(e)
    field = num.field
    fa = f(a)
    lead = den + num.scale(fa)
    coeffs = [lead.scale(c) for c in f.coeffs]
    coeffs[0] = coeffs[0] - den.scale(fa)
    return LocalPoly(coeffs, field, e), lead


def decide_U_fa(w, f, a, precision=DEFAULT_PRECISION, ram=None):
    """Decide ``w in f(K)^-1 - f(a)^-1``; the certificate's root is a witness ``z``."""
    field = w.field
    a = field.element(a)
    fa = f(a)
    if not fa:
        raise ValueError("f(a) must be nonzero")
    if w.is_zero():
        e = ram or w.ram
        g, _ = u_fa_polynomial(w, f, a, e)
        return RootDecision(True, _exact_root_cert(g, LaurentPoly.const(field, a, g.ram)), ["w = 0: z = a"])
    if w.valuation() < 0:
        return RootDecision(False, None, ["v(w) < 0 but v(1/f(z) - 1/f(a)) >= 0 for every z"])
    g, lead = u_fa_polynomial(w, f, a, ram)
    if lead.is_zero():
        return RootDecision(False, None, ["1 + w*f(a) = 0: would need 1/f(z) = 0"])
    z0 = LaurentPoly.const(field, a, g.ram)
    ok, _, _ = check_margin(g, z0)
    if ok:
        return RootDecision(True, hensel_lift(g, z0, precision), ["Hensel from z = a"])
    return root_exists(g, precision)


def in_U_fa(w, f, a, precision=DEFAULT_PRECISION, ram=None):
    return decide_U_fa(w, f, a, precision, ram).exists
