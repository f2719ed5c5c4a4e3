"""Finite fields F_q = F_p[g]/(modulus) and polynomials over F_p.

Every field is built on its canonical modulus: the monic irreducible of degree
``k`` whose coefficient vector, read as base-``p`` digits, is smallest.  Fields
are interned, so ``get_field(p, k) is get_field(p, k)``.
"""

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from . import _kernels
from ._parse import ParseError, evaluate, parse_expr

MAX_FIELD_SIZE = 2 ** 16


def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def least_prime_not_dividing(k):
    """Smallest prime ``l`` with ``l`` not dividing ``k``; always ``l <= k + 1``."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    l = 2
    while k % l == 0:
        l += 1
        while not is_prime(l):
            l += 1
    return l


# ---------------------------------------------------------------------------
# dense polynomials over F_p, constant-first lists of ints
# ---------------------------------------------------------------------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pmod(a, b, p):
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return _trim(a[:db])


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(a, e, m, p):
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible_mod_p(coeffs, p):
    """Ben-Or test: ``f`` has no factor of degree ``j`` for ``2j <= deg f``."""
    f = _trim([c % p for c in coeffs])
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    h = [0, 1]
    for _ in range(d // 2):
        h = _ppowmod(h, p, f, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _trim(diff), p)) > 1:
            return False
    return True


@dataclass(frozen=True)
class PrimePoly:
    """Monic polynomial over F_p, coefficients constant-first."""

    p: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) < 2 or self.coeffs[-1] % self.p != 1:
            raise ValueError("PrimePoly must be monic of degree >= 1")
        if any(not 0 <= c < self.p for c in self.coeffs):
            raise ValueError("coefficients must lie in [0, p)")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def derivative(self):
        """Formal derivative as a constant-first list (not necessarily monic)."""
        return _trim([(i * c) % self.p for i, c in enumerate(self.coeffs)][1:])

    def is_irreducible(self):
        return is_irreducible_mod_p(self.coeffs, self.p)

    def __call__(self, x):
        """Evaluate at an FFElement (or anything closed under + and *)."""
        acc = x * 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self):
        return _format_poly(self.coeffs, "x") or "0"


def _format_poly(coeffs, var):
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        if i == 0:
            parts.append(str(c))
            continue
        mono = var if i == 1 else f"{var}^{i}"
        parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts)


@lru_cache(maxsize=None)
def find_irreducible(p, d):
    """Canonical monic irreducible of degree ``d`` over F_p.

    Candidates are scanned by the integer ``sum(c_i * p**i)`` so the result is
    the smallest one in that order.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if d < 1:
        raise ValueError("degree must be >= 1")
    for n in range(p ** d):
        digits = []
        m = n
        for _ in range(d):
            digits.append(m % p)
            m //= p
        coeffs = digits + [1]
        if d > 1 and coeffs[0] == 0:
            continue
        if is_irreducible_mod_p(coeffs, p):
            return PrimePoly(p, tuple(coeffs))
    raise AssertionError("unreachable: irreducibles exist in every degree")


def artin_schreier(p):
    """``x^p - x - 1``, irreducible over F_p with derivative ``-1``."""
    coeffs = [0] * (p + 1)
    coeffs[0] = p - 1
    coeffs[1] = (coeffs[1] - 1) % p
    coeffs[p] = 1
    return PrimePoly(p, tuple(coeffs))


# ---------------------------------------------------------------------------
# F_q
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldParams:
    p: int
    k: int
    modulus: tuple
    mod_array: np.ndarray = dc_field(repr=False, compare=False, hash=False)

    @property
    def q(self):
        return self.p ** self.k

    def __str__(self):
        return f"{self.p}^{self.k}"

    # element constructors -------------------------------------------------
    def element(self, value):
        """Build an element from an int (embedded from F_p), a field index, or coeffs."""
        if isinstance(value, FFElement):
            return value
        if isinstance(value, (tuple, list, np.ndarray)):
            coeffs = tuple(int(c) % self.p for c in value)
            if len(coeffs) != self.k:
                raise ValueError("coefficient vector must have length k")
            return FFElement(self, coeffs)
        return FFElement(self, (int(value) % self.p,) + (0,) * (self.k - 1))

    def from_index(self, n):
        if not 0 <= n < self.q:
            raise ValueError("index out of range")
        coeffs = []
        for _ in range(self.k):
            coeffs.append(n % self.p)
            n //= self.p
        return FFElement(self, tuple(coeffs))

    @property
    def zero(self):
        return self.element(0)

    @property
    def one(self):
        return self.element(1)

    @property
    def gen(self):
        """The generator ``g``, a root of the modulus (``0`` when ``k == 1``)."""
        if self.k == 1:
            return self.element(-self.modulus[0])
        return FFElement(self, (0, 1) + (0,) * (self.k - 2))

    def elements(self):
        return [self.from_index(n) for n in range(self.q)]

    def element_table(self):
        """All elements as a ``(q, k)`` coefficient array, in index order."""
        return _element_table(self)

    def parse_element(self, text):
        return evaluate(parse_expr(text), _ElementRing(self))


@lru_cache(maxsize=None)
def _element_table(params):
    n = np.arange(params.q, dtype=np.int64)
    out = np.zeros((params.q, params.k), np.int64)
    for i in range(params.k):
        out[:, i] = n % params.p
        n //= params.p
    return out


@lru_cache(maxsize=None)
def get_field(p, k=1):
    """Intern ``F_{p^k}`` built on its canonical modulus."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if k < 1:
        raise ValueError("k must be >= 1")
    if p ** k > MAX_FIELD_SIZE:
        raise ValueError(f"field size {p}^{k} exceeds the cap {MAX_FIELD_SIZE}")
    modulus = find_irreducible(p, k)
    if not modulus.is_irreducible():
        raise AssertionError("canonical modulus failed irreducibility check")
    return FieldParams(p, k, modulus.coeffs, np.array(modulus.coeffs, np.int64))


def parse_field_spec(spec):
    """Parse ``"p^k"`` or a prime power ``"q"`` into a FieldParams."""
    text = str(spec).strip()
    if "^" in text:
        base, _, exp = text.partition("^")
        try:
            p, k = int(base), int(exp)
        except ValueError:
            raise ValueError(f"bad field spec {spec!r}") from None
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        return get_field(p, k)
    try:
        q = int(text)
    except ValueError:
        raise ValueError(f"bad field spec {spec!r}") from None
    for p in range(2, q + 1):
        if q % p == 0:
            k, m = 0, q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return get_field(p, k)
    raise ValueError(f"{q} is not a prime power")


@dataclass(frozen=True)
class FFElement:
    field: FieldParams
    coeffs: tuple

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, FFElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return self.field.element(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        return FFElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FFElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p, k = self.field.p, self.field.k
        if k == 1:
            return FFElement(self.field, (self.coeffs[0] * other.coeffs[0] % p,))
        acc = [0] * (2 * k - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    acc[i + j] += a * b
        mod = self.field.modulus
        for d in range(2 * k - 2, k - 1, -1):
            c = acc[d] % p
            if c:
                for i in range(k):
                    acc[d - k + i] -= c * mod[i]
        return FFElement(self.field, tuple(a % p for a in acc[:k]))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if not self:
            raise ZeroDivisionError("inverse of zero in " + str(self.field))
        if self.field.k == 1:
            return FFElement(self.field, (pow(self.coeffs[0], self.field.p - 2, self.field.p),))
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.field.element(other) * self.inverse()

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.element(other)
        if not isinstance(other, FFElement):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.coeffs))

    @property
    def index(self):
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.field.p + c
        return n

    def __lt__(self, other):
        return self.index < other.index

    def frobenius(self):
        return self ** self.field.p

    def proot(self):
        """The unique ``b`` with ``b^p == self``."""
        return self ** (self.field.p ** (self.field.k - 1))

    def as_array(self):
        return np.array(self.coeffs, np.int64)

    def __str__(self):
        return _format_poly(self.coeffs, "g") or "0"

    def __repr__(self):
        return f"FFElement({self}, F_{self.field})"


class _ElementRing:
    def __init__(self, params):
        self.params = params

    def num(self, n, pos):
        return self.params.element(n)

    def name(self, name, pos):
        if name != "g":
            raise ParseError(f"unknown symbol {name!r} in field element", pos)
        return self.params.gen

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
            raise ParseError("field element exponents must be non-negative integers", pos)
        return a ** int(e)


def ff_arith(a, b, op):
    """Binary field operation by name: ``add``, ``sub``, ``mul`` or ``div``."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def frobenius_and_proot(a):
    return a.frobenius(), a.proot()


def _as_fq_coeffs(f, params):
    if isinstance(f, PrimePoly):
        return [params.element(c) for c in f.coeffs]
    return [params.element(c) for c in f]


def poly_eval_all(f, params):
    """Values of ``f`` at every element of F_q, as a ``(q, k)`` array in index order."""
    coeffs = _as_fq_coeffs(f, params)
    xs = params.element_table()
    acc = np.zeros_like(xs)
    for c in reversed(coeffs):
        acc = _kernels.ff_mul_rows(acc, xs, params.p, params.mod_array)
        acc = (acc + np.array(c.coeffs, np.int64)) % params.p
    return acc


def poly_roots_in_field(f, params):
    """All roots of ``f`` in F_q by full enumeration, sorted by index."""
    coeffs = _as_fq_coeffs(f, params)
    if not any(coeffs):
        raise ValueError("zero polynomial has every element as a root")
    vals = poly_eval_all(coeffs, params)
    hits = np.flatnonzero(~vals.any(axis=1))
    return [params.from_index(int(i)) for i in hits]
