"""Text and JSON forms of multivectors.

Expression grammar (whitespace ignored)::

    expr    := product (("+" | "-") product)*
    product := wedge (("*" | "×" | "x") wedge | wedge)*    # juxtaposition multiplies
    wedge   := unary ("^" unary)*
    unary   := ("-" | "+" | "~") unary | postfix
    postfix := atom ("[" expr "]")*                       # U[W] is U W U^-1
    atom    := NUMBER | BLADE | "i" | "(" expr ")"

``BLADE`` is ``e`` followed by one digit per basis index (``e134``), or
``e_10_11`` when an index needs more than one digit.  Exponents in numbers
must use an upper-case ``E`` because ``3e12`` means ``3 * e12``.  A complex
coefficient is written ``(1.5-2i)e12``.
"""

from __future__ import annotations

import functools
import math
import re
from typing import Any

import numpy as np

from .algebra import Algebra, Multivector, Signature, algebra_for, commutator_product, sandwich
from .errors import ParseError

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:E[+-]?\d+)?)
  | (?P<blade>e_\d+(?:_\d+)*|e\d+)
  | (?P<imag>i)
  | (?P<op>[-+*^~\[\]()×x])
    """,
    re.VERBOSE,
)

_ATOM_START = {"number", "blade", "imag", "("}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "op":
                kind = value
            out.append((kind, value, pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, alg: Algebra):
        self.tokens = _tokenize(text)
        self.i = 0
        self.alg = alg

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, kind: str | None = None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Multivector:
        if self.peek() == "end":
            raise ParseError("empty expression", 0)
        value = self.expr()
        if self.peek() != "end":
            tok = self.tokens[self.i]
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
        return value

    def expr(self) -> Multivector:
        value = self.product()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def product(self) -> Multivector:
        value = self.wedge()
        while True:
            kind = self.peek()
            if kind == "*":
                self.take()
                value = value * self.wedge()
            elif kind in ("×", "x"):
                self.take()
                value = commutator_product(value, self.wedge())
            elif kind in _ATOM_START:
                value = value * self.wedge()
            else:
                return value

    def wedge(self) -> Multivector:
        value = self.unary()
        while self.peek() == "^":
            self.take()
            value = value ^ self.unary()
        return value

    def unary(self) -> Multivector:
        kind = self.peek()
        if kind == "-":
            self.take()
            return -self.unary()
        if kind == "+":
            self.take()
            return self.unary()
        if kind == "~":
            self.take()
            return ~self.unary()
        return self.postfix()

    def postfix(self) -> Multivector:
        value = self.atom()
        while self.peek() == "[":
            self.take()
            inner = self.expr()
            self.take("]")
            value = sandwich(value, inner)
        return value

    def atom(self) -> Multivector:
        kind, text, pos = self.take()
        if kind == "number":
            return self.alg.scalar(float(text))
        if kind == "imag":
            return self.alg.scalar(1j)
        if kind == "blade":
            return self.blade(text, pos)
        if kind == "(":
            value = self.expr()
            self.take(")")
            return value
        raise ParseError(f"unexpected token {text or 'end of input'!r}", pos)

    def blade(self, text: str, pos: int) -> Multivector:
        if text.startswith("e_"):
            labels = [int(s) for s in text[2:].split("_")]
        else:
            labels = [int(ch) for ch in text[1:]]
        if len(set(labels)) != len(labels):
            raise ParseError(f"duplicate index in blade {text!r}", pos)
        try:
            return self.alg.blade(*labels)
        except IndexError as exc:
            raise ParseError(f"{exc} in blade {text!r}", pos) from None


def parse(text: str, alg: Algebra) -> Multivector:
    """Evaluate multivector text in ``alg``; see the module docstring for the grammar."""
    return _Parser(text, alg).parse()


def _fmt_real(x: float) -> str:
    if math.isfinite(x) and float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x)).replace("e", "E")


def _blade_text(alg: Algebra, mask: int) -> str:
    labels = [alg.label(b) for b in range(alg.d) if mask >> b & 1]
    if not labels:
        return ""
    if max(labels) > 9:
        return "e_" + "_".join(str(lb) for lb in labels)
    return "e" + "".join(str(lb) for lb in labels)


@functools.lru_cache(maxsize=None)
def _blade_order(alg: Algebra) -> list[int]:
    masks = range(alg.n)
    return sorted(masks, key=lambda m: (bin(m).count("1"), [b for b in range(alg.d) if m >> b & 1]))


def format_multivector(mv: Multivector) -> str:
    """Canonical text; ``parse(format_multivector(x))`` reproduces ``x`` exactly."""
    alg = mv.alg
    parts: list[str] = []
    for mask in _blade_order(alg):
        c = mv.coeffs[mask]
        if c == 0:
            continue
        blade = _blade_text(alg, mask)
        if np.iscomplexobj(c) and c.imag != 0 and c.real == 0:
            im = float(c.imag)
            sign = "-" if im < 0 else "+"
            coef = ("" if abs(im) == 1 else _fmt_real(abs(im))) + "i"
        elif np.iscomplexobj(c) and c.imag != 0:
            im = c.imag
            coef = f"({_fmt_real(c.real)}{'-' if im < 0 else '+'}{_fmt_real(abs(im))}i)"
            sign = "+"
        else:
            re_ = float(c.real)
            sign = "-" if re_ < 0 else "+"
            mag = abs(re_)
            coef = "" if (mag == 1 and blade) else _fmt_real(mag)
        term = coef + blade
        if not parts:
            parts.append(term if sign == "+" else "-" + term)
        else:
            parts.append(f"{sign} {term}")
    return " ".join(parts) if parts else "0"


def to_json(mv: Multivector) -> dict[str, Any]:
    """``{"sig": [p, q, r], "terms": [{"blade": [...], "re": x, "im": y}]}``."""
    alg = mv.alg
    sig = alg.signature
    terms = []
    for mask in _blade_order(alg):
        c = complex(mv.coeffs[mask])
        if c == 0:
            continue
        terms.append({
            "blade": [alg.label(b) for b in range(alg.d) if mask >> b & 1],
            "re": c.real,
            "im": c.imag,
        })
    return {"sig": [sig.p, sig.q, sig.r], "terms": terms}


def from_json(data: dict[str, Any]) -> Multivector:
    try:
        alg = algebra_for(Signature(*data["sig"]))
        out = alg.zero()
        for term in data["terms"]:
            coef = complex(term.get("re", 0.0), term.get("im", 0.0))
            if coef.imag == 0:
                coef = coef.real
            out = out + alg.blade(*term["blade"], coefficient=coef)
        return out
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"malformed multivector JSON: {exc}") from None
