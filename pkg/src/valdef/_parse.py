"""Tokenizer and recursive-descent parser for ring expressions.

The grammar is shared by field element literals, series literals, polynomial
input and formula terms::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?
    atom   := INT | NAME | '(' expr ')'
    exponent := ['-'] INT | '(' ['-'] INT ')' | '{' ['-'] INT ['/' INT] '}'

Parsing produces a small tuple AST which each consumer evaluates in its own
ring.  Juxtaposition is not multiplication: ``2g`` is a syntax error.
"""

import re
from fractions import Fraction


class ParseError(ValueError):
    """Syntax error carrying the character offset where it was detected."""

    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def tokenize(text, extra_ops=""):
    allowed = "+-*^(){}/" + extra_ops
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in allowed:
                raise ParseError(f"unexpected character {ch!r}", start)
            tokens.append(("op", ch, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, extra_ops=""):
        self.tokens = tokenize(text, extra_ops)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.next()
        if tok[0] != "op" or tok[1] != value:
            raise ParseError(f"expected {value!r}", tok[2])
        return tok

    def at(self, value):
        tok = self.peek()
        return tok[0] == "op" and tok[1] == value

    def expr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.next()[1]
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.at("*") or self.at("/"):
            tok = self.next()
            if tok[1] == "*":
                node = ("mul", node, self.unary())
            else:
                node = ("div", node, self.unary(), tok[2])
        return node

    def unary(self):
        if self.at("-"):
            self.next()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            tok = self.next()
            return ("pow", base, self.exponent(), tok[2])
        return base

    def _signed_int(self):
        sign = 1
        if self.at("-"):
            self.next()
            sign = -1
        tok = self.next()
        if tok[0] != "int":
            raise ParseError("expected integer exponent", tok[2])
        return sign * tok[1]

    def exponent(self):
        # t^-2, t^(3), t^{1/2} and t^(1/2) are all accepted
        for open_, close in (("{", "}"), ("(", ")")):
            if self.at(open_):
                self.next()
                num = self._signed_int()
                den = 1
                if self.at("/"):
                    self.next()
                    tok = self.next()
                    if tok[0] != "int" or tok[1] == 0:
                        raise ParseError("expected positive denominator", tok[2])
                    den = tok[1]
                self.expect(close)
                return Fraction(num, den)
        return Fraction(self._signed_int())

    def atom(self):
        tok = self.next()
        kind, val, pos = tok
        if kind == "int":
            return ("num", val, pos)
        if kind == "name":
            return ("name", val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError("unexpected " + ("end of input" if kind == "end" else repr(val)), pos)


def parse_expr(text):
    """Parse ``text`` into an expression AST; the whole string must be consumed."""
    parser = _Parser(text)
    if parser.peek()[0] == "end":
        raise ParseError("empty expression", 0)
    node = parser.expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    return node


def evaluate(node, ring):
    """Fold an AST with a ring adaptor.

    ``ring`` supplies ``num(int, pos)``, ``name(str, pos)``, ``add``, ``sub``,
    ``mul``, ``neg`` and ``pow(base, Fraction, pos)``, and optionally
    ``div(a, b, pos)``.
    """
    tag = node[0]
    if tag == "num":
        return ring.num(node[1], node[2])
    if tag == "name":
        return ring.name(node[1], node[2])
    if tag == "neg":
        return ring.neg(evaluate(node[1], ring))
    if tag == "pow":
        return ring.pow(evaluate(node[1], ring), node[2], node[3])
    if tag == "div":
        if not hasattr(ring, "div"):
            raise ParseError("division is not allowed here", node[3])
        return ring.div(evaluate(node[1], ring), evaluate(node[2], ring), node[3])
    lhs = evaluate(node[1], ring)
    rhs = evaluate(node[2], ring)
    return getattr(ring, tag)(lhs, rhs)
