"""Canonical text forms, the expression parser and the presentation file format.

Expression grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'.') factor)*
    factor := atom ['^' ['-'] INT]
    atom   := INT ['/' INT] | NAME | '(' expr ')'

``q`` and ``l`` are the coefficient symbols (``l`` = exp(2 pi i theta));
every other name must be a generator of the presentation.  Negative powers
are allowed on ``q`` and ``l`` only.  Products keep their order.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from .algebra import NCPoly, Presentation, Word
from .coeff import ONE, Scalar
from .errors import ParseError, UsageError

SCALAR_SYMBOLS = {"q": (1, 0), "l": (0, 1)}

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def format_word(pres: Presentation, w: Word) -> str:
    if not w:
        return "1"
    parts = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        name = pres.generators[w[i]].name
        parts.append(name if j - i == 1 else f"{name}^{j - i}")
        i = j
    return ".".join(parts)


def _format_coeff_term(c: Scalar, body: str | None) -> tuple[bool, str]:
    """Return (negative, text) for coefficient ``c`` times word text ``body``."""
    if c.is_monomial():
        (eq, el), r = next(iter(c.items()))
        neg = r < 0
        mag = Scalar({(eq, el): abs(r)})
        if body is None:
            return neg, mag.to_text()
        if mag == ONE:
            return neg, body
        return neg, f"{mag.to_text()} * {body}"
    text = f"({c.to_text()})"
    return False, text if body is None else f"{text} * {body}"


def format_poly(p: NCPoly) -> str:
    if not p.terms:
        return "0"
    pres = p.pres
    words = sorted(p.terms, key=pres.display_key)
    if len(words) == 1 and words[0] == ():
        return p.terms[()].to_text()
    out = []
    for i, w in enumerate(words):
        neg, text = _format_coeff_term(p.terms[w], format_word(pres, w) if w else None)
        if i == 0:
            out.append(("-" if neg else "") + text)
        else:
            out.append(("- " if neg else "+ ") + text)
    return " ".join(out)


class _Parser:
    def __init__(self, text: str, pres: Presentation | None):
        self.text = text
        self.pres = pres
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            if m.group(1):
                self.toks.append(("int", m.group(1), m.start(1)))
            elif m.group(2):
                self.toks.append(("name", m.group(2), m.start(2)))
            elif m.group(3):
                self.toks.append(("op", m.group(3), m.start(3)))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg: str, pos: int | None = None):
        if pos is None:
            tok = self.peek()
            pos = tok[2] if tok else len(self.text)
        raise ParseError(msg, self.text, pos)

    def accept(self, op: str) -> bool:
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == op:
            self.i += 1
            return True
        return False

    # the parser works on dict[Word, Scalar] to stay presentation-agnostic

    def parse(self) -> dict[Word, Scalar]:
        if not self.toks:
            self.error("empty expression")
        val = self.expr()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()[1]!r}")
        return val

    def expr(self) -> dict[Word, Scalar]:
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        total = _scale(self.term(), sign)
        while True:
            if self.accept("+"):
                total = _add(total, self.term())
            elif self.accept("-"):
                total = _add(total, _scale(self.term(), -1))
            else:
                return total

    def term(self) -> dict[Word, Scalar]:
        val = self.factor()
        while self.accept("*") or self.accept("."):
            val = _mul(val, self.factor())
        return val

    def factor(self) -> dict[Word, Scalar]:
        start = self.peek()
        base, invertible = self.atom()
        if self.accept("^"):
            neg = self.accept("-")
            tok = self.peek()
            if tok is None or tok[0] != "int":
                self.error("expected integer exponent")
            self.i += 1
            n = int(tok[1])
            if neg:
                if not invertible:
                    self.error("negative powers are allowed on q and l only", start[2])
                (eq, el) = invertible
                return {(): Scalar.monomial(-eq * n, -el * n)}
            out: dict[Word, Scalar] = {(): ONE}
            for _ in range(n):
                out = _mul(out, base)
            return out
        return base

    def atom(self) -> tuple[dict[Word, Scalar], tuple[int, int] | None]:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of expression")
        kind, val, pos = tok
        if kind == "int":
            self.i += 1
            num = Fraction(int(val))
            if self.accept("/"):
                den = self.peek()
                if den is None or den[0] != "int":
                    self.error("expected integer denominator")
                self.i += 1
                if int(den[1]) == 0:
                    self.error("zero denominator", den[2])
                num /= int(den[1])
            return {(): Scalar.const(num)}, None
        if kind == "name":
            self.i += 1
            if val in SCALAR_SYMBOLS:
                e = SCALAR_SYMBOLS[val]
                return {(): Scalar.monomial(*e)}, e
            if self.pres is None or not self.pres.has(val):
                self.error(f"unknown generator {val!r}", pos)
            return {(self.pres.gen_id(val),): ONE}, None
        if val == "(":
            self.i += 1
            inner = self.expr()
            if not self.accept(")"):
                self.error("expected ')'")
            return inner, None
        self.error(f"unexpected {val!r}")


def _add(a: dict, b: dict) -> dict:
    out = dict(a)
    for w, c in b.items():
        v = out.get(w, Scalar()) + c
        if v:
            out[w] = v
        else:
            out.pop(w, None)
    return out


def _scale(a: dict, s: int) -> dict:
    return {w: c * s for w, c in a.items()} if s != 1 else a


def _mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for u, c in a.items():
        for v, d in b.items():
            w = u + v
            val = out.get(w, Scalar()) + c * d
            if val:
                out[w] = val
            else:
                out.pop(w, None)
    return out


def parse_poly(text: str, pres: Presentation) -> NCPoly:
    """Parse into a free (un-normalized) polynomial over ``pres``."""
    return NCPoly(pres, _Parser(text, pres).parse())


def parse_scalar(text: str) -> Scalar:
    terms = _Parser(text, None).parse()
    return terms.get((), Scalar())


# presentation files ---------------------------------------------------------


def _poly_terms(p: NCPoly) -> list[dict]:
    words = sorted(p.terms, key=p.pres.display_key)
    return [
        {"coeff": p.terms[w].to_text(), "word": p.pres.word_names(w)} for w in words
    ]


def presentation_to_dict(pres: Presentation) -> dict[str, Any]:
    return {
        "name": pres.name,
        "generators": [
            {
                "name": g.name,
                "adjoint": pres.generators[g.adjoint].name,
                "selfadjoint": g.selfadjoint,
                "weight": g.weight,
            }
            for g in pres.generators
        ],
        "rules": [
            {
                "lhs": pres.word_names(r.lhs),
                "rhs": [{"coeff": c.to_text(), "word": pres.word_names(w)} for w, c in r.rhs],
            }
            for r in pres.rules
        ],
        "relations": [_poly_terms(r) for r in pres.relations],
    }


def presentation_from_dict(data: dict[str, Any], validate: bool = True) -> Presentation:
    try:
        gens = []
        weights = {}
        for g in data["generators"]:
            name = g["name"]
            adj = name if g.get("selfadjoint") else g.get("adjoint", name)
            gens.append((name, adj))
            if "weight" in g:
                weights[name] = g["weight"]
        rules = [
            (r["lhs"], [(parse_scalar(t["coeff"]), t["word"]) for t in r["rhs"]])
            for r in data.get("rules", [])
        ]
        relations = [
            [(parse_scalar(t["coeff"]), t["word"]) for t in rel]
            for rel in data.get("relations", [])
        ]
        return Presentation(data["name"], gens, rules, relations, weights, validate=validate)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed presentation file: {exc}") from None


# JSON output ----------------------------------------------------------------


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            return json.dumps(str(obj))
        return format(obj, ".17g")
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalars
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON with floats written at 17 significant digits."""
    return _encode(obj, indent, 0)
