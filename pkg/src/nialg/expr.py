"""Parser and printer for the identity expression language.

Grammar: variables ``[a-z][a-z0-9]*``; products are explicit (``x*y`` for the
default operation, ``[x,y]``/``{x,y}`` for bracket operations, ``op(x,y)`` for
named ones); rational literals ``p/q``; ``+ - ( ) =``; whitespace ignored.
An equation ``L = R`` is normalized to ``L - R`` so every identity reads
``poly = 0``.  Juxtaposition is rejected, as are unparenthesized product
chains like ``a*b*c``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .magma import Signature


class ParseError(ValueError):
    def __init__(self, message, pos=None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Scal:
    coef: Fraction
    sub: "Expression"


@dataclass(frozen=True)
class Sum:
    terms: tuple


Expression = (Var, App, Scal, Sum)

_TOKEN = re.compile(
    r"\s*(?:(?P<name>[a-z][a-z0-9]*)|(?P<int>[0-9]+)|(?P<sym>[-+*/()\[\]{},=]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group("name"):
            tokens.append(("name", m.group("name"), m.start("name")))
        elif m.group("int"):
            tokens.append(("int", int(m.group("int")), m.start("int")))
        else:
            tokens.append(("sym", m.group("sym"), m.start("sym")))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, sym):
        kind, val, pos = self.next()
        if kind != "sym" or val != sym:
            raise ParseError(f"expected {sym!r}, found {val!r}", pos)

    def parse_equation(self):
        lhs = self.parse_sum()
        kind, val, pos = self.peek()
        if kind == "sym" and val == "=":
            self.next()
            rhs = self.parse_sum()
            kind, val, pos = self.peek()
            if kind != "end":
                raise ParseError(f"trailing input {val!r}", pos)
            return _sub(lhs, rhs)
        if kind != "end":
            raise ParseError(f"trailing input {val!r}", pos)
        return lhs

    def parse_sum(self):
        terms = []
        negate = False
        kind, val, _ = self.peek()
        if kind == "sym" and val in "+-":
            self.next()
            negate = val == "-"
        term = self.parse_term()
        terms.append(_negate(term) if negate else term)
        while True:
            kind, val, _ = self.peek()
            if kind == "sym" and val in "+-":
                self.next()
                term = self.parse_term()
                terms.append(_negate(term) if val == "-" else term)
            else:
                break
        return _mk_sum(terms)

    def parse_term(self):
        factors = [self.parse_factor()]
        while True:
            kind, val, _ = self.peek()
            if kind == "sym" and val == "*":
                self.next()
                factors.append(self.parse_factor())
            else:
                break
        coef = Fraction(1)
        exprs = []
        for f in factors:
            if isinstance(f, Fraction):
                coef *= f
            else:
                exprs.append(f)
        if not exprs:
            if coef == 0:
                return Sum(())  # the zero polynomial, e.g. the "0" in "L = 0"
            raise ParseError("bare scalar is not a valid expression",
                             self.peek()[2])
        if len(exprs) == 1:
            node = exprs[0]
        elif len(exprs) == 2:
            if not self.sig.has_op("*"):
                raise ParseError("operation '*' not in signature", self.peek()[2])
            node = App("*", exprs[0], exprs[1])
        else:
            raise ParseError("ambiguous product chain; parenthesize",
                             self.peek()[2])
        return _mk_scal(coef, node)

    def parse_factor(self):
        kind, val, pos = self.next()
        if kind == "int":
            k2, v2, _ = self.peek()
            if k2 == "sym" and v2 == "/":
                self.next()
                k3, v3, p3 = self.next()
                if k3 != "int":
                    raise ParseError("expected denominator", p3)
                if v3 == 0:
                    raise ParseError("zero denominator", p3)
                return Fraction(val, v3)
            return Fraction(val)
        if kind == "name":
            k2, v2, _ = self.peek()
            if k2 == "sym" and v2 == "(":
                if not self.sig.has_op(val):
                    raise ParseError(f"unknown operation {val!r}", pos)
                self.next()
                left = self.parse_sum()
                self.expect(",")
                right = self.parse_sum()
                self.expect(")")
                return App(val, left, right)
            return Var(val)
        if kind == "sym" and val == "(":
            inner = self.parse_sum()
            self.expect(")")
            return inner
        if kind == "sym" and val == "[":
            if not self.sig.has_op("[]"):
                raise ParseError("operation '[,]' not in signature", pos)
            left = self.parse_sum()
            self.expect(",")
            right = self.parse_sum()
            self.expect("]")
            return App("[]", left, right)
        if kind == "sym" and val == "{":
            if not self.sig.has_op("{}"):
                raise ParseError("operation '{,}' not in signature", pos)
            left = self.parse_sum()
            self.expect(",")
            right = self.parse_sum()
            self.expect("}")
            return App("{}", left, right)
        raise ParseError(f"unexpected token {val!r}", pos)


def _mk_scal(coef: Fraction, node):
    if coef == 1:
        return node
    if isinstance(node, Scal):
        return _mk_scal(coef * node.coef, node.sub)
    return Scal(coef, node)


def _mk_sum(terms):
    flat = []
    for t in terms:
        if isinstance(t, Sum):
            flat.extend(t.terms)
        else:
            flat.append(t)
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


ZERO = Sum(())


def _negate(node):
    if isinstance(node, Sum):
        return Sum(tuple(_negate(t) for t in node.terms))
    if isinstance(node, Scal):
        return _mk_scal(-node.coef, node.sub)
    return Scal(Fraction(-1), node)


def _sub(lhs, rhs):
    return _mk_sum([lhs, _negate(rhs)])


def parse(text: str, sig: Signature):
    """Parse an identity; equations come back moved to ``= 0`` form."""
    return _Parser(text, sig).parse_equation()


def variables(node) -> list:
    """Sorted list of distinct variable names."""
    out = set()

    def walk(n):
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, App):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, Scal):
            walk(n.sub)
        elif isinstance(n, Sum):
            for t in n.terms:
                walk(t)

    walk(node)
    return sorted(out)


def mirror_expr(node):
    """Swap the arguments of every application (right-normed variants)."""
    if isinstance(node, Var):
        return node
    if isinstance(node, App):
        return App(node.op, mirror_expr(node.right), mirror_expr(node.left))
    if isinstance(node, Scal):
        return Scal(node.coef, mirror_expr(node.sub))
    return Sum(tuple(mirror_expr(t) for t in node.terms))


def _needs_parens(node) -> bool:
    return isinstance(node, (Scal, Sum)) or (isinstance(node, App)
                                             and node.op == "*")


def _fmt_atom(node, sig: Signature) -> str:
    if isinstance(node, Var):
        return node.name
    if isinstance(node, App):
        l, r = _fmt_atom(node.left, sig), _fmt_atom(node.right, sig)
        if node.op == "[]":
            return f"[{l},{r}]"
        if node.op == "{}":
            return f"{{{l},{r}}}"
        if node.op == "*":
            if _needs_parens(node.left):
                l = f"({l})"
            if _needs_parens(node.right):
                r = f"({r})"
            return f"{l}*{r}"
        return f"{node.op}({l},{r})"
    if isinstance(node, Scal):
        sub = _fmt_atom(node.sub, sig)
        if _needs_parens(node.sub):
            sub = f"({sub})"
        if node.coef == -1:
            return f"-{sub}"
        return f"{node.coef}*{sub}"
    # sums inside factors always need parens
    return "(" + pretty(node, sig) + ")"


def pretty(node, sig: Signature) -> str:
    """Print an expression; ``parse(pretty(e)) == e`` on parser output."""
    if not isinstance(node, Sum):
        s = _fmt_atom(node, sig)
        return s
    if not node.terms:
        return "0"
    parts = []
    for t in node.terms:
        s = _fmt_atom(t, sig)
        if parts:
            if s.startswith("-"):
                parts.append("- " + s[1:])
            else:
                parts.append("+ " + s)
        else:
            parts.append(s)
    return " ".join(parts)
