"""Exact Laurent polynomials over F_q in a ramified variable ``s = t^(1/e)``.

``LaurentPoly`` is the exact, finitely supported element type every decision
procedure consumes.  A value stores its ramification index ``e`` and a dense
coefficient block starting at exponent-numerator ``val``; the term at row ``i``
is ``c_i * t^((val + i)/e)``.  Binary operations first move both operands to
the lcm of their ramification indices.

``RatFunc`` is a quotient of two Laurent polynomials.  It exists so that
intermediate witnesses such as ``1/x`` stay exact; it never needs an infinite
expansion except through :meth:`RatFunc.expand`.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from ._parse import ParseError, evaluate, parse_expr
from .finite_field import FFElement, FieldParams

INF = math.inf


class NoPthRoot(ValueError):
    """Raised by :meth:`LaurentPoly.pth_root` when some exponent is not divisible by ``p``."""

    def __init__(self, exponent):
        super().__init__(f"not a p-th power: exponent {exponent} is not divisible by p")
        self.exponent = exponent


def _trimmed(coef):
    nz = np.flatnonzero(coef.any(axis=1))
    if nz.size == 0:
        return None, None
    return int(nz[0]), coef[nz[0]:nz[-1] + 1]


class LaurentPoly:
    __slots__ = ("field", "ram", "val", "coef", "_hash")

    def __init__(self, field, ram, val, coef, _trusted=False):
        self.field = field
        self.ram = ram
        if _trusted:
            self.val, self.coef = val, coef
        else:
            coef = np.asarray(coef, np.int64) % field.p
            off, block = _trimmed(coef) if coef.shape[0] else (None, None)
            if off is None:
                self.val, self.coef = 0, np.zeros((0, field.k), np.int64)
            else:
                self.val, self.coef = val + off, block
        self._hash = None

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, field, ram=1):
        return cls(field, ram, 0, np.zeros((0, field.k), np.int64), _trusted=True)

    @classmethod
    def const(cls, field, c, ram=1):
        c = field.element(c)
        return cls(field, ram, 0, np.array([c.coeffs], np.int64))

    @classmethod
    def monomial(cls, field, c, n, ram=1):
        """``c * t^(n/ram)``."""
        c = field.element(c)
        return cls(field, ram, n, np.array([c.coeffs], np.int64))

    @classmethod
    def from_terms(cls, field, terms, ram=1):
        """Build from a mapping exponent-numerator -> coefficient."""
        terms = {n: field.element(c) for n, c in terms.items()}
        terms = {n: c for n, c in terms.items() if c}
        if not terms:
            return cls.zero(field, ram)
        lo, hi = min(terms), max(terms)
        coef = np.zeros((hi - lo + 1, field.k), np.int64)
        for n, c in terms.items():
            coef[n - lo] = c.coeffs
        return cls(field, ram, lo, coef)

    @classmethod
    def uniformizer(cls, field, ram=1):
        return cls.monomial(field, 1, 1, ram)

    # inspection -----------------------------------------------------------
    def is_zero(self):
        return self.coef.shape[0] == 0

    def __bool__(self):
        return self.coef.shape[0] != 0

    @property
    def terms(self):
        """Sorted dict exponent-numerator -> nonzero FFElement."""
        out = {}
        for i in np.flatnonzero(self.coef.any(axis=1)):
            out[self.val + int(i)] = FFElement(self.field, tuple(int(c) for c in self.coef[i]))
        return out

    @property
    def vnum(self):
        """Valuation in exponent-numerator units (``None`` for zero)."""
        return None if self.is_zero() else self.val

    @property
    def top(self):
        """Largest exponent-numerator present (``None`` for zero)."""
        return None if self.is_zero() else self.val + self.coef.shape[0] - 1

    def valuation(self):
        if self.is_zero():
            return INF
        return Fraction(self.val, self.ram)

    def coefficient(self, n):
        i = n - self.val
        if self.is_zero() or i < 0 or i >= self.coef.shape[0]:
            return self.field.zero
        return FFElement(self.field, tuple(int(c) for c in self.coef[i]))

    def leading(self):
        """``(numerator, coefficient)`` of the lowest-order term."""
        if self.is_zero():
            raise ValueError("zero series has no leading term")
        return self.val, self.coefficient(self.val)

    def constant_term(self):
        return self.coefficient(0)

    def is_constant(self):
        return self.is_zero() or (self.val == 0 and self.coef.shape[0] == 1)

    # ramification ---------------------------------------------------------
    def with_ram(self, e):
        """Same value written over ramification index ``e`` (a multiple of ``ram``)."""
        if e == self.ram:
            return self
        if e % self.ram:
            raise ValueError(f"ramification {e} is not a multiple of {self.ram}")
        f = e // self.ram
        if self.is_zero():
            return LaurentPoly.zero(self.field, e)
        n = self.coef.shape[0]
        coef = np.zeros(((n - 1) * f + 1, self.field.k), np.int64)
        coef[::f] = self.coef
        return LaurentPoly(self.field, e, self.val * f, coef, _trusted=True)

    def ramify(self, n):
        """Substitute ``t -> t^(1/n)``: same coefficients, exponents divided by ``n``."""
        if n < 1:
            raise ValueError("ramify needs a positive integer")
        return LaurentPoly(self.field, self.ram * n, self.val, self.coef, _trusted=True)

    def normalize(self):
        """Divide out the common factor of all exponent-numerators and ``ram``."""
        if self.is_zero():
            return LaurentPoly.zero(self.field, 1)
        g = self.ram
        for n in self.terms:
            g = math.gcd(g, n)
            if g == 1:
                return self
        terms = {n // g: c for n, c in self.terms.items()}
        return LaurentPoly.from_terms(self.field, terms, self.ram // g)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.field != self.field:
                raise ValueError(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, (int, FFElement)):
            return LaurentPoly.const(self.field, other, self.ram)
        return None

    def _aligned(self, other):
        if self.ram == other.ram:
            return self, other
        e = self.ram * other.ram // math.gcd(self.ram, other.ram)
        return self.with_ram(e), other.with_ram(e)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._aligned(other)
        if a.is_zero():
            return b
        if b.is_zero():
            return a
        lo = min(a.val, b.val)
        hi = max(a.top, b.top)
        coef = np.zeros((hi - lo + 1, a.field.k), np.int64)
        coef[a.val - lo:a.val - lo + a.coef.shape[0]] += a.coef
        coef[b.val - lo:b.val - lo + b.coef.shape[0]] += b.coef
        return LaurentPoly(a.field, a.ram, lo, coef)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.field, self.ram, self.val, (-self.coef) % self.field.p, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._aligned(other)
        if a.is_zero() or b.is_zero():
            return LaurentPoly.zero(a.field, a.ram)
        f = a.field
        if b.coef.shape[0] == 1 and not b.coef[0, 1:].any() and b.coef[0, 0] == 1:
            return LaurentPoly(f, a.ram, a.val + b.val, a.coef, _trusted=True)
        coef = _kernels.mul_full(a.coef, b.coef, f.p, f.mod_array)
        # F_q has no zero divisors, so the product block is already trimmed
        return LaurentPoly(f, a.ram, a.val + b.val, coef, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return RatFunc(LaurentPoly.const(self.field, 1, self.ram), self ** (-e))._lower()
        result = LaurentPoly.const(self.field, 1, self.ram)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, RatFunc):
            return RatFunc(self) / other
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero series")
        return RatFunc(self, other)._lower()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def scale(self, c):
        """Multiply by a field element."""
        c = self.field.element(c)
        if not c:
            return LaurentPoly.zero(self.field, self.ram)
        rows = np.repeat(np.array([c.coeffs], np.int64), self.coef.shape[0], axis=0)
        coef = _kernels.ff_mul_rows(self.coef, rows, self.field.p, self.field.mod_array)
        return LaurentPoly(self.field, self.ram, self.val, coef, _trusted=True)

    def shift(self, n):
        """Multiply by ``t^(n/ram)``."""
        return LaurentPoly(self.field, self.ram, self.val + n, self.coef, _trusted=True)

    def truncate(self, n):
        """Drop every term with exponent-numerator ``>= n``."""
        if self.is_zero() or n <= self.val:
            return LaurentPoly.zero(self.field, self.ram)
        return LaurentPoly(self.field, self.ram, self.val, self.coef[:n - self.val])

    def mul_trunc(self, other, n):
        """Product with every exponent-numerator ``>= n`` dropped (same ram required)."""
        if self.is_zero() or other.is_zero():
            return LaurentPoly.zero(self.field, self.ram)
        v = self.val + other.val
        rows = n - v
        if rows <= 0:
            return LaurentPoly.zero(self.field, self.ram)
        f = self.field
        coef = _kernels.mul_trunc(self.coef, other.coef, rows, f.p, f.mod_array)
        return LaurentPoly(f, self.ram, v, coef)

    def inverse_trunc(self, nterms):
        """The first ``nterms`` terms of ``1/self`` as a Laurent polynomial."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero series")
        f = self.field
        inv0 = self.coefficient(self.val).inverse().as_array()
        coef = _kernels.inv_trunc(self.coef, nterms, inv0, f.p, f.mod_array)
        return LaurentPoly(f, self.ram, -self.val, coef)

    def pth_root(self):
        """``y`` with ``y^p == self``; raises :class:`NoPthRoot` naming the first bad exponent."""
        p = self.field.p
        terms = self.terms
        for n in terms:
            if n % p:
                raise NoPthRoot(Fraction(n, self.ram))
        return LaurentPoly.from_terms(self.field, {n // p: c.proot() for n, c in terms.items()}, self.ram)

    def frobenius(self):
        p = self.field.p
        return LaurentPoly.from_terms(self.field, {n * p: c.frobenius() for n, c in self.terms.items()}, self.ram)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, FFElement)):
            other = self._coerce(other)
        if isinstance(other, RatFunc):
            return other == self
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if other.field != self.field:
            return False
        a, b = self._aligned(other)
        return a.val == b.val and a.coef.shape == b.coef.shape and np.array_equal(a.coef, b.coef)

    def __hash__(self):
        if self._hash is None:
            n = self.normalize()
            self._hash = hash((n.ram, n.val, n.coef.tobytes()))
        return self._hash

    # text -----------------------------------------------------------------
    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for n, c in self.terms.items():
            parts.append(_format_term(c, Fraction(n, self.ram)))
        return " + ".join(parts)

    def __repr__(self):
        return f"LaurentPoly({self}, F_{self.field}, ram={self.ram})"

    @classmethod
    def parse(cls, text, field, ram=1):
        return parse_series(text, field, ram)


def _format_term(c, exp):
    cs = str(c)
    if exp == 0:
        return f"({cs})" if "+" in cs else cs
    if exp == 1:
        mono = "t"
    elif exp.denominator == 1:
        mono = f"t^{exp.numerator}"
    else:
        mono = f"t^{{{exp.numerator}/{exp.denominator}}}"
    if cs == "1":
        return mono
    if "+" in cs:
        cs = f"({cs})"
    return f"{cs}*{mono}"


# ---------------------------------------------------------------------------
# Laurent polynomials as a Euclidean ring F_q[s, 1/s]
# ---------------------------------------------------------------------------

def _same_ram(a, b):
    if a.ram != b.ram:
        return a._aligned(b)
    return a, b


def divexact(a, b):
    """``a / b`` when ``b`` divides ``a`` in F_q[s, 1/s]; raises ``ValueError`` otherwise."""
    a, b = _same_ram(a, b)
    if b.is_zero():
        raise ZeroDivisionError("division by zero")
    if a.is_zero():
        return a
    f = a.field
    if b.coef.shape[0] == 1:
        inv = b.coefficient(b.val).inverse()
        return a.scale(inv).shift(-b.val)
    inv_lead = b.coefficient(b.top).inverse().as_array()
    q, r = _kernels.divmod_poly(a.coef, b.coef, inv_lead, f.p, f.mod_array)
    if r.any():
        raise ValueError("not divisible")
    return LaurentPoly(f, a.ram, a.val - b.val, q)


def unit_normal(a):
    """Associate of ``a`` with ``val == 0`` and lowest coefficient ``1``."""
    if a.is_zero():
        return a
    inv = a.coefficient(a.val).inverse()
    return a.scale(inv).shift(-a.val)


def lp_gcd(a, b):
    """Greatest common divisor in F_q[s, 1/s], unit-normalized."""
    a, b = _same_ram(a, b)
    f = a.field
    if a.is_zero():
        return unit_normal(b)
    if b.is_zero():
        return unit_normal(a)
    x = a.coef
    y = b.coef
    while y.shape[0] > 1:
        lead = FFElement(f, tuple(int(c) for c in y[-1])).inverse().as_array()
        _, r = _kernels.divmod_poly(x, y, lead, f.p, f.mod_array)
        off, r = _trimmed(r) if r.shape[0] else (None, None)
        if off is None:
            break
        x, y = y, r
    else:
        # y is a nonzero constant: coprime up to powers of s
        return LaurentPoly.const(f, 1, a.ram)
    return unit_normal(LaurentPoly(f, a.ram, 0, y))


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RatFunc:
    """Reduced quotient ``num / den`` with ``den`` unit-normalized."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = LaurentPoly.const(num.field, 1, num.ram)
        num, den = _same_ram(num, den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = num, LaurentPoly.const(num.field, 1, num.ram)
            return
        if den.coef.shape[0] > 1:
            g = lp_gcd(num, den)
            if g.coef.shape[0] > 1:
                num, den = divexact(num, g), divexact(den, g)
        lead = den.coefficient(den.val).inverse()
        self.num = num.scale(lead).shift(-den.val)
        self.den = den.scale(lead).shift(-den.val)

    @property
    def field(self):
        return self.num.field

    @property
    def ram(self):
        return self.num.ram

    def is_laurent(self):
        return self.den.is_constant()

    def _lower(self):
        """Collapse to a LaurentPoly when the denominator is 1."""
        return self.num if self.is_laurent() else self

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def valuation(self):
        if self.num.is_zero():
            return INF
        return self.num.valuation() - self.den.valuation()

    @property
    def vnum(self):
        return None if self.num.is_zero() else self.num.val - self.den.val

    @property
    def val(self):
        return self.num.val - self.den.val

    def with_ram(self, e):
        return RatFunc(self.num.with_ram(e), self.den.with_ram(e))

    def leading(self):
        n, c = self.num.leading()
        m, d = self.den.leading()
        return n - m, c / d

    def expand(self, nterms):
        """First ``nterms`` terms of the series expansion."""
        if self.num.is_zero():
            return self.num
        inv = self.den.inverse_trunc(nterms)
        return (self.num * inv).truncate(self.vnum + nterms)

    def coefficient(self, n):
        """Coefficient of ``t^(n/ram)`` in the expansion."""
        if self.num.is_zero() or n < self.vnum:
            return self.field.zero
        return self.expand(n - self.vnum + 1).coefficient(n)

    def constant_term(self):
        return self.coefficient(0)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, LaurentPoly):
            return RatFunc(other)
        if isinstance(other, (int, FFElement)):
            return RatFunc(LaurentPoly.const(self.field, other, self.ram))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)._lower()

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)._lower()

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero")
        return RatFunc(self.num * o.den, self.den * o.num)._lower()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, e):
        if e < 0:
            return (RatFunc(self.den, self.num)) ** (-e)
        return RatFunc(self.num ** e, self.den ** e)._lower()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((hash(self.num), hash(self.den)))

    def __str__(self):
        if self.is_laurent():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFunc({self}, F_{self.field}, ram={self.ram})"


def as_ratfunc(x):
    return x if isinstance(x, RatFunc) else RatFunc(x)


def numer_denom(x):
    """``(num, den)`` Laurent polynomials with ``x == num/den`` and ``v(den) == 0``."""
    if isinstance(x, RatFunc):
        return x.num, x.den
    return x, LaurentPoly.const(x.field, 1, x.ram)


def valuation(x):
    return x.valuation()


def vnum_at(x, e):
    """Valuation of ``x`` in units of ``1/e`` (``None`` for zero)."""
    v = x.valuation()
    if v == INF:
        return None
    w = v * e
    if w.denominator != 1:
        raise ValueError(f"valuation {v} is not in (1/{e})Z")
    return int(w)


def series_arith(x, y, op):
    """Ring operation by name: ``add``, ``sub`` or ``mul``."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown operation {op!r}")


def pth_power_root(x):
    return x.pth_root()


def ramify(x, n):
    return x.ramify(n)


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """``S(n)``, open ball ``B(n; a)`` or closed ball ``Bbar(n; a)``; ``n`` is a value."""

    kind: str
    n: Fraction
    center: object = None

    def __post_init__(self):
        if self.kind not in ("S", "B", "Bbar"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        object.__setattr__(self, "n", Fraction(self.n))


def in_region(x, region):
    d = x if region.center is None else x - region.center
    v = d.valuation()
    if region.kind == "S":
        return v == region.n
    if region.kind == "B":
        return v > region.n
    return v >= region.n


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

class _SeriesRing:
    def __init__(self, field, ram):
        self.field = field
        self.ram = ram

    def num(self, n, pos):
        return LaurentPoly.const(self.field, n, self.ram)

    def name(self, name, pos):
        if name == "g":
            return LaurentPoly.const(self.field, self.field.gen, self.ram)
        if name == "t":
            return LaurentPoly.monomial(self.field, 1, self.ram, self.ram)
        raise ParseError(f"unknown symbol {name!r}", pos)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b, pos):
        if b.is_zero():
            raise ParseError("division by zero", pos)
        return a / b

    def neg(self, a):
        return -a

    def pow(self, a, e, pos):
        if e.denominator == 1 and e >= 0:
            return a ** int(e)
        if a.is_zero() or a.coef.shape[0] != 1:
            raise ParseError("negative or fractional powers need a monomial base", pos)
        n, c = a.leading()
        exp = Fraction(n, self.ram) * e
        num = exp * self.ram
        if num.denominator != 1:
            raise ParseError(
                f"exponent {exp} has a denominator not dividing the declared ramification {self.ram}", pos)
        if e.denominator != 1 and c != 1:
            raise ParseError("fractional powers are only defined for t", pos)
        coeff = c ** int(e) if e.denominator == 1 else c
        return LaurentPoly.monomial(self.field, coeff, int(num), self.ram)


def parse_series(text, field, ram=1):
    """Parse a series literal such as ``"(g+1)*t^-2 + g + 2*t^3"`` or ``"t^{1/2}+t"``."""
    if not isinstance(field, FieldParams):
        raise TypeError("field must be FieldParams")
    return evaluate(parse_expr(text), _SeriesRing(field, ram))
