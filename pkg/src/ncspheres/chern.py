"""Matrices over a presentation, the two projectors, and the Chern character.

Chains live in the normalized (reduced) Hochschild complex: a tensor word
``(w0, w1, ..., wk)`` of normal words is dropped as soon as one of
``w1..wk`` is the unit.  Factors are always expanded multilinearly into
normal words, so a chain is a finite map from tuples of words to scalars.

The Chern character components are

    ch_0(E) = tr(E)                        (scalar part dropped)
    ch_n(E) = c_n tr((E - 1/2) (x) E (x) ... (x) E),   2n trailing factors,

with ``c_n = (-1)^n (2n)!/n!``.  With these constants
``b ch_{n+1} + B ch_n = 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .algebra import NCPoly, Presentation, Word, _accumulate, poly_mul
from .coeff import ONE, ZERO, Scalar
from .errors import UsageError

TensorWord = tuple[Word, ...]

BASIS_CONVENTION = (
    "tensor factors are normal words of the presentation's rewrite system "
    "(S4QT: alphastar^i alpha^j beta^k followed by U^m or Ustar^n); terms with "
    "a unit factor in positions 1..k are dropped (normalized complex)"
)

HALF = Fraction(1, 2)


class MatrixPoly:
    """Square matrix with :class:`NCPoly` entries over one presentation."""

    def __init__(self, pres: Presentation, entries: Sequence[Sequence[NCPoly]], normalized: bool = False):
        n = len(entries)
        if any(len(row) != n for row in entries):
            raise UsageError("matrix must be square")
        self.pres = pres
        self.n = n
        rows = []
        for row in entries:
            out = []
            for p in row:
                if p.pres is not pres:
                    raise UsageError("matrix entry over a different presentation")
                out.append(p if normalized else p.normalize())
            rows.append(out)
        self.entries: list[list[NCPoly]] = rows

    @classmethod
    def identity(cls, pres: Presentation, n: int) -> "MatrixPoly":
        return cls(pres, [[pres.one() if i == j else pres.zero() for j in range(n)] for i in range(n)], True)

    @classmethod
    def zeros(cls, pres: Presentation, n: int) -> "MatrixPoly":
        return cls(pres, [[pres.zero()] * n for _ in range(n)], True)

    @classmethod
    def parse(cls, pres: Presentation, rows: Sequence[Sequence[str]], factor: Scalar | int | Fraction = 1) -> "MatrixPoly":
        return cls(pres, [[pres.parse(t).scale(factor) for t in row] for row in rows])

    def __getitem__(self, ij: tuple[int, int]) -> NCPoly:
        i, j = ij
        return self.entries[i][j]

    def _same(self, other: "MatrixPoly") -> None:
        if other.pres is not self.pres:
            raise UsageError("matrices over different presentations")
        if other.n != self.n:
            raise UsageError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "MatrixPoly") -> "MatrixPoly":
        self._same(other)
        return MatrixPoly(
            self.pres,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            True,
        )

    def __sub__(self, other: "MatrixPoly") -> "MatrixPoly":
        self._same(other)
        return MatrixPoly(
            self.pres,
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            True,
        )

    def scale(self, s) -> "MatrixPoly":
        return MatrixPoly(self.pres, [[a.scale(s) for a in row] for row in self.entries], True)

    def __matmul__(self, other: "MatrixPoly") -> "MatrixPoly":
        return mat_mul(self, other)

    def adjoint(self) -> "MatrixPoly":
        return mat_adjoint(self)

    def trace(self) -> NCPoly:
        out = self.pres.zero()
        for i in range(self.n):
            out = out + self.entries[i][i]
        return out

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def degree(self) -> int:
        return max((p.degree() for row in self.entries for p in row), default=0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixPoly):
            return NotImplemented
        return self.pres is other.pres and self.n == other.n and all(
            a == b for r1, r2 in zip(self.entries, other.entries) for a, b in zip(r1, r2)
        )

    __hash__ = None

    def to_text(self) -> list[list[str]]:
        return [[p.to_text() for p in row] for row in self.entries]


def mat_mul(A: MatrixPoly, B: MatrixPoly) -> MatrixPoly:
    A._same(B)
    pres, n = A.pres, A.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = pres.zero()
            for k in range(n):
                a, b = A.entries[i][k], B.entries[k][j]
                if a and b:
                    acc = acc + poly_mul(a, b, pres)
            row.append(acc)
        rows.append(row)
    return MatrixPoly(pres, rows, True)


def mat_adjoint(A: MatrixPoly) -> MatrixPoly:
    n = A.n
    return MatrixPoly(A.pres, [[A.entries[j][i].star() for j in range(n)] for i in range(n)], True)


def projector_e(pres: Presentation) -> MatrixPoly:
    """The 4x4 projector over S4QT built from alpha, beta, U."""
    for g in ("alpha", "alphastar", "beta", "U", "Ustar"):
        if not pres.has(g):
            raise UsageError(f"projector e needs generator {g!r}; {pres.name} lacks it")
    rows = [
        ["1 + beta", "0", "U", "alphastar"],
        ["0", "1 + q^-1*beta", "alpha", "-l*Ustar"],
        ["Ustar", "alphastar", "1 - beta", "0"],
        ["alpha", "-l^-1*U", "0", "1 - q^-1*beta"],
    ]
    return MatrixPoly.parse(pres, rows, HALF)


def projector_eprime(pres: Presentation) -> MatrixPoly:
    """The 4x4 monopole-type projector; needs the central generator x."""
    for g in ("x", "alpha", "alphastar", "beta"):
        if not pres.has(g):
            raise UsageError(f"projector e' needs generator {g!r}; {pres.name} lacks it")
    rows = [
        ["1 + x", "0", "beta", "alphastar"],
        ["0", "1 + x", "alpha", "-q^-1*beta"],
        ["beta", "alphastar", "1 - x", "0"],
        ["alpha", "-q^-1*beta", "0", "1 - x"],
    ]
    return MatrixPoly.parse(pres, rows, HALF)


@dataclass
class IdempotentReport:
    square_residual: MatrixPoly
    adjoint_residual: MatrixPoly
    trace: NCPoly

    @property
    def idempotent(self) -> bool:
        return self.square_residual.is_zero()

    @property
    def selfadjoint(self) -> bool:
        return self.adjoint_residual.is_zero()

    def to_dict(self) -> dict:
        return {
            "idempotent": self.idempotent,
            "selfadjoint": self.selfadjoint,
            "square_residual": self.square_residual.to_text(),
            "adjoint_residual": self.adjoint_residual.to_text(),
            "trace": self.trace.to_text(),
        }


def idempotent_report(E: MatrixPoly) -> IdempotentReport:
    return IdempotentReport(mat_mul(E, E) - E, E - mat_adjoint(E), E.trace())


# chains -------------------------------------------------------------------


class Chain:
    """Element of degree ``k`` in the (normalized) Hochschild complex."""

    __slots__ = ("pres", "degree", "terms", "reduced")

    def __init__(self, pres: Presentation, degree: int, terms: Mapping[TensorWord, Scalar] | None = None, reduced: bool = True):
        self.pres = pres
        self.degree = degree
        self.reduced = reduced
        clean: dict[TensorWord, Scalar] = {}
        for tw, c in (terms or {}).items():
            if len(tw) != degree + 1:
                raise UsageError(f"tensor word of length {len(tw)} in a degree-{degree} chain")
            if reduced and any(w == () for w in tw[1:]):
                continue
            c = Scalar.coerce(c)
            v = clean.get(tw, ZERO) + c
            if v:
                clean[tw] = v
            else:
                clean.pop(tw, None)
        self.terms = clean

    @classmethod
    def zero(cls, pres: Presentation, degree: int) -> "Chain":
        return cls(pres, degree)

    @classmethod
    def from_factors(cls, factors: Sequence[NCPoly], coeff: Scalar | int = 1, reduced: bool = True) -> "Chain":
        """Multilinear expansion of ``coeff * f0 (x) f1 (x) ... (x) fk``."""
        if not factors:
            raise UsageError("a chain needs at least one factor")
        pres = factors[0].pres
        out: dict[TensorWord, Scalar] = {}
        _expand_into(out, [f.normalize().terms for f in factors], Scalar.coerce(coeff), reduced)
        return cls(pres, len(factors) - 1, out, reduced)

    def _same(self, other: "Chain") -> None:
        if other.pres is not self.pres:
            raise UsageError("chains over different presentations")
        if other.degree != self.degree:
            raise UsageError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "Chain") -> "Chain":
        self._same(other)
        out = dict(self.terms)
        for tw, c in other.terms.items():
            v = out.get(tw, ZERO) + c
            if v:
                out[tw] = v
            else:
                out.pop(tw, None)
        return Chain(self.pres, self.degree, out, self.reduced and other.reduced)

    def __neg__(self) -> "Chain":
        return self.scale(-1)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, s) -> "Chain":
        s = Scalar.coerce(s)
        return Chain(self.pres, self.degree, {tw: c * s for tw, c in self.terms.items()}, self.reduced)

    __rmul__ = scale

    def map_coeffs(self, f) -> "Chain":
        return Chain(self.pres, self.degree, {tw: f(c) for tw, c in self.terms.items()}, self.reduced)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.pres is other.pres and self.degree == other.degree and self.terms == other.terms

    __hash__ = None

    def drop_scalar_position0(self) -> "Chain":
        """Quotient position 0 by scalars too (used for ch_0 reporting)."""
        return Chain(self.pres, self.degree, {tw: c for tw, c in self.terms.items() if tw[0] != ()}, self.reduced)

    def l_spread(self) -> int:
        """max - min of the l-exponents over all coefficients (0 for empty)."""
        degs = set()
        for c in self.terms.values():
            degs |= c.l_degrees()
        return max(degs) - min(degs) if degs else 0

    def sorted_terms(self) -> list[tuple[TensorWord, Scalar]]:
        key = self.pres.display_key
        return sorted(self.terms.items(), key=lambda kv: tuple(key(w) for w in kv[0]))

    def to_dict(self) -> dict:
        return {
            "presentation": self.pres.name,
            "degree": self.degree,
            "terms": [
                {"coeff": c.to_text(), "factors": [self.pres.word_text(w) for w in tw]}
                for tw, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping, pres: Presentation) -> "Chain":
        from .formats import parse_scalar

        try:
            degree = int(data["degree"])
            out = cls.zero(pres, degree)
            for t in data["terms"]:
                factors = [pres.parse(f) for f in t["factors"]]
                if len(factors) != degree + 1:
                    raise UsageError("factor count does not match the chain degree")
                out = out + cls.from_factors(factors, parse_scalar(t["coeff"]))
            return out
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed chain data: {exc}") from None

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for tw, c in self.sorted_terms():
            parts.append(f"({c.to_text()}) " + " # ".join(self.pres.word_text(w) for w in tw))
        return "\n".join(parts)

    def __repr__(self) -> str:
        return f"Chain(degree={self.degree}, terms={len(self.terms)})"


def _expand_into(
    out: dict[TensorWord, Scalar],
    factor_terms: Sequence[Mapping[Word, Scalar]],
    coeff: Scalar,
    reduced: bool,
) -> None:
    lists = []
    for pos, terms in enumerate(factor_terms):
        items = [(w, c) for w, c in terms.items() if not (reduced and pos > 0 and w == ())]
        if not items:
            return
        lists.append(items)
    for combo in itertools.product(*lists):
        tw = tuple(w for w, _ in combo)
        c = coeff
        for _, d in combo:
            c = c * d
        v = out.get(tw, ZERO) + c
        if v:
            out[tw] = v
        else:
            out.pop(tw, None)


def dennis_trace(factors: Sequence[MatrixPoly], reduced: bool = True) -> Chain:
    """Sum over index cycles of (m0)_{i0 i1} (x) (m1)_{i1 i2} (x) ... (x) (mk)_{ik i0}."""
    if not factors:
        raise UsageError("dennis_trace needs at least one factor")
    pres, n = factors[0].pres, factors[0].n
    for m in factors[1:]:
        factors[0]._same(m)
    k = len(factors) - 1
    out: dict[TensorWord, Scalar] = {}
    ents = [[[m.entries[i][j].terms for j in range(n)] for i in range(n)] for m in factors]
    for idx in itertools.product(range(n), repeat=k + 1):
        fts = []
        for pos in range(k + 1):
            t = ents[pos][idx[pos]][idx[(pos + 1) % (k + 1)]]
            if not t:
                break
            fts.append(t)
        else:
            _expand_into(out, fts, ONE, reduced)
    return Chain(pres, k, out, reduced)


def chern_constant(n: int) -> Fraction:
    return Fraction((-1) ** n * factorial(2 * n), factorial(n))


def chern(E: MatrixPoly, n: int) -> Chain:
    """Component ch_n(E) for n in {0, 1, 2}; E is assumed idempotent."""
    if n not in (0, 1, 2):
        raise UsageError(f"ch_{n} is not supported (only n = 0, 1, 2)")
    if n == 0:
        return dennis_trace([E]).drop_scalar_position0()
    shifted = E - MatrixPoly.identity(E.pres, E.n).scale(HALF)
    return dennis_trace([shifted] + [E] * (2 * n)).scale(chern_constant(n))


# (b, B) operators -----------------------------------------------------------


def _product_terms(pres: Presentation, u: Word, v: Word) -> Mapping[Word, Scalar]:
    if not u:
        return {v: ONE}
    if not v:
        return {u: ONE}
    return pres._nf_concat(u, v, _unlimited())


def _unlimited():
    from .algebra import STEP_BUDGET, _Budget

    return _Budget(STEP_BUDGET)


def hochschild_b(c: Chain) -> Chain:
    """b(a0 (x) ... (x) an) = sum_i (-1)^i ... a_i a_{i+1} ... + (-1)^n a_n a_0 (x) ... ."""
    n = c.degree
    if n < 1:
        raise UsageError("hochschild_b needs a chain of degree >= 1")
    pres = c.pres
    out: dict[TensorWord, Scalar] = {}
    for tw, coeff in c.terms.items():
        for i in range(n):
            prod = _product_terms(pres, tw[i], tw[i + 1])
            sign = coeff if i % 2 == 0 else -coeff
            for w, d in prod.items():
                new = tw[:i] + (w,) + tw[i + 2:]
                _add_term(out, new, sign * d, c.reduced)
        prod = _product_terms(pres, tw[n], tw[0])
        sign = coeff if n % 2 == 0 else -coeff
        for w, d in prod.items():
            new = (w,) + tw[1:n]
            _add_term(out, new, sign * d, c.reduced)
    return Chain(pres, n - 1, out, c.reduced)


def connes_B(c: Chain) -> Chain:
    """B(a0 (x) ... (x) an) = sum_i (-1)^{n i} 1 (x) a_i (x) ... (x) a_n (x) a_0 (x) ... (x) a_{i-1}."""
    n = c.degree
    out: dict[TensorWord, Scalar] = {}
    for tw, coeff in c.terms.items():
        for i in range(n + 1):
            new = ((),) + tw[i:] + tw[:i]
            _add_term(out, new, coeff if (n * i) % 2 == 0 else -coeff, True)
    return Chain(c.pres, n + 1, out, True)


def _add_term(out: dict[TensorWord, Scalar], tw: TensorWord, c: Scalar, reduced: bool) -> None:
    if reduced and any(w == () for w in tw[1:]):
        return
    v = out.get(tw, ZERO) + c
    if v:
        out[tw] = v
    else:
        out.pop(tw, None)


# comparison -----------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    kind: str  # "equal" | "proportional" | "different"
    ratio: Scalar | None = None

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "ratio": None if self.ratio is None else self.ratio.to_text()}


def chain_compare(c1: Chain, c2: Chain) -> Verdict:
    """Exact comparison; ``ratio`` satisfies c2 = ratio * c1 when proportional."""
    c1._same(c2)
    if c1.terms == c2.terms:
        return Verdict("equal", ONE)
    if not c1.terms or not c2.terms or set(c1.terms) != set(c2.terms):
        return Verdict("different")
    tw0 = next(iter(c1.terms))
    mu = c2.terms[tw0].exact_div(c1.terms[tw0])
    if mu is None:
        return Verdict("different")
    for tw, c in c1.terms.items():
        if c * mu != c2.terms[tw]:
            return Verdict("different")
    return Verdict("proportional", mu)


def term_count(c: Chain) -> int:
    return len(c.terms)


def specialize_chain_q(c: Chain, value: int | Fraction) -> Chain:
    return c.map_coeffs(lambda s: s.at_q(value))


def cocycle_residual(E: MatrixPoly, n: int) -> Chain:
    """b(ch_{n+1}(E)) + B(ch_n(E)); zero for an idempotent E."""
    lower = dennis_trace([E]) if n == 0 else chern(E, n)
    return hochschild_b(chern(E, n + 1)) + connes_B(lower)


def chains_over(pres: Presentation, items: Iterable[tuple[Sequence[str], Scalar | int]]) -> Chain:
    """Build a chain from ``(factor_texts, coeff)`` pairs."""
    out = None
    for factors, coeff in items:
        ch = Chain.from_factors([pres.parse(f) for f in factors], coeff)
        out = ch if out is None else out + ch
    if out is None:
        raise UsageError("empty chain")
    return out
