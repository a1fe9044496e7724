"""Expression parser and domain documents.

Grammar (whitespace ignored)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom (('^' | '**') INT)?
    atom    := NUMBER | 'i' | VAR | FUNC '(' expr ')' | '(' expr ')' | '|' expr '|' '^' INT
    VAR     := z1 | z2 | z1bar | z2bar
    FUNC    := Re | Im | conj

Numbers are integers or decimals and are kept as exact rationals; ``a/b``
is ordinary division by a constant.  ``|e|^k`` needs an even k and expands to
(e conj(e))^(k/2).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import NonPolynomialModulus, ParseError, SchemaError
from .polyalg import MixedPolynomial, WeightSignature, to_text

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|(\*\*|[-+*/^()|,])|([A-Za-z_][A-Za-z_0-9]*))")

_VARS = {
    "z1": MixedPolynomial.monomial(1, 0, 0, 0),
    "z2": MixedPolynomial.monomial(0, 0, 1, 0),
    "z1bar": MixedPolynomial.monomial(0, 1, 0, 0),
    "z2bar": MixedPolynomial.monomial(0, 0, 0, 1),
}


def _tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", position=pos)
        start = m.start(m.lastindex)
        kind = ("num", "op", "name")[m.lastindex - 1]
        out.append((kind, m.group(m.lastindex), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.take()
        if v != value:
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", position=pos)

    def parse(self):
        e = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {v!r}", position=pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            f = self.unary()
            if op == "*":
                e = e * f
            else:
                if f.degree() > 0 or f.is_zero():
                    raise ParseError("division by a non-constant or zero expression", position=pos)
                e = e / _constant_of(f)
        return e

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def _exponent(self):
        kind, v, pos = self.take()
        if kind != "num" or not v.isdigit():
            raise ParseError("exponent must be a nonnegative integer", position=pos)
        return int(v), pos

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            k, _ = self._exponent()
            return base ** k
        return base

    def atom(self):
        kind, v, pos = self.take()
        if kind == "num":
            return MixedPolynomial.constant(Fraction(v))
        if kind == "name":
            if v == "i":
                return MixedPolynomial.constant((Fraction(0), Fraction(1)))
            if v in _VARS:
                return _VARS[v]
            if v in ("Re", "Im", "conj"):
                self.expect("(")
                e = self.expr()
                self.expect(")")
                return {"Re": e.real_part, "Im": e.imag_part, "conj": e.conj}[v]()
            raise ParseError(f"unknown name {v!r}", position=pos)
        if v == "(":
            e = self.expr()
            self.expect(")")
            return e
        if v == "|":
            e = self.expr()
            self.expect("|")
            if self.peek()[1] not in ("^", "**"):
                raise NonPolynomialModulus("a modulus needs an even power", position=pos)
            self.take()
            k, kpos = self._exponent()
            if k % 2:
                raise NonPolynomialModulus(f"odd power {k} of a modulus is not polynomial", position=kpos)
            return (e * e.conj()) ** (k // 2)
        raise ParseError(f"unexpected {v or 'end of input'!r}", position=pos)


def _constant_of(p):
    return p.coeff((0, 0, 0, 0))


def parse_expression(text):
    """Parse text into a MixedPolynomial with exact rational coefficients."""
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression", position=0)
    return _Parser(text).parse()


def format_expression(p):
    return to_text(p)


@dataclass
class DomainDocument:
    """Input for the CLI: expression text or JSON terms, weights and options."""

    text: str | None = None
    terms: list | None = None
    weights: WeightSignature | None = None
    q_text: str | None = None
    name: str = ""
    options: dict = field(default_factory=dict)

    def polynomial(self):
        if self.terms is not None:
            try:
                return MixedPolynomial.from_json_terms(self.terms)
            except (TypeError, ValueError) as e:
                raise SchemaError(f"bad term list: {e}") from e
        return parse_expression(self.text)

    def q_polynomial(self):
        return None if self.q_text is None else parse_expression(self.q_text)

    def to_json(self):
        out = {"name": self.name, "options": self.options}
        if self.text is not None:
            out["text"] = self.text
        if self.terms is not None:
            out["terms"] = self.terms
        if self.q_text is not None:
            out["Q"] = self.q_text
        if self.weights is not None:
            out["weights"] = self.weights.to_list()
        return out

    @classmethod
    def from_json(cls, d):
        if not isinstance(d, dict) or ("text" not in d and "terms" not in d):
            raise SchemaError("domain document needs 'text' or 'terms'")
        w = d.get("weights")
        return cls(d.get("text"), d.get("terms"), WeightSignature(*w) if w else None, d.get("Q"),
                   d.get("name", ""), dict(d.get("options", {})))


def load_domain_document(arg):
    """A path to a .json or text file, or the expression itself."""
    path = Path(arg)
    if len(arg) < 4096 and path.exists():
        raw = path.read_text()
        if path.suffix == ".json":
            try:
                return DomainDocument.from_json(json.loads(raw))
            except json.JSONDecodeError as e:
                raise SchemaError(f"{path}: {e}") from e
        return DomainDocument(text=raw.strip(), name=path.stem)
    return DomainDocument(text=arg)
