"""Free *-algebras on a generator alphabet and normal forms modulo rewrite rules.

A :class:`Presentation` holds the generators (with their adjoint pairing), an
ordered list of oriented rules ``lhs -> rhs`` and the defining relations they
are meant to encode.  Rules must decrease a weighted degree-lexicographic
order, so rewriting terminates; confluence is not assumed and is checked
separately with :func:`confluence_probe`.

Words are tuples of generator ids; the empty tuple is the unit.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .coeff import ONE, ZERO, Scalar, ScalarLike
from .errors import NormalizationError, UsageError

Word = tuple[int, ...]

STEP_BUDGET = 10**6


@dataclass(frozen=True)
class Generator:
    id: int
    name: str
    adjoint: int
    weight: int = 1

    @property
    def selfadjoint(self) -> bool:
        return self.adjoint == self.id


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: tuple[tuple[Word, Scalar], ...]


class _Budget:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise NormalizationError("rewrite step budget exceeded")


class Presentation:
    """Finitely presented *-algebra over the Laurent coefficient ring.

    Parameters
    ----------
    name:
        Display name.
    generators:
        Sequence of ``(name, adjoint_name)`` pairs, listed in increasing
        precedence.  A generator is self-adjoint when both names agree.
    rules:
        Sequence of ``(lhs, rhs)`` where ``lhs`` is a list of generator names
        and ``rhs`` is a sequence of ``(coeff, names)`` pairs.
    relations:
        Defining relations (each meant to equal zero), given in the same
        ``(coeff, names)`` form as rule right-hand sides.
    weights:
        Optional positive weight per generator name (default 1).  Normal
        forms are taken with respect to weighted degree, then lexicographic
        order by precedence.
    """

    def __init__(
        self,
        name: str,
        generators: Sequence[tuple[str, str]],
        rules: Sequence[tuple[Sequence[str], Sequence[tuple[ScalarLike, Sequence[str]]]]],
        relations: Sequence[Sequence[tuple[ScalarLike, Sequence[str]]]] = (),
        weights: Mapping[str, int] | None = None,
        validate: bool = True,
    ):
        self.name = name
        weights = dict(weights or {})
        names = [g for g, _ in generators]
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate generator names in {name}")
        index = {g: i for i, g in enumerate(names)}
        gens = []
        for i, (g, adj) in enumerate(generators):
            if adj not in index:
                raise UsageError(f"adjoint {adj!r} of {g!r} is not a generator")
            w = int(weights.get(g, 1))
            if w < 1:
                raise UsageError(f"weight of {g!r} must be positive")
            gens.append(Generator(i, g, index[adj], w))
        for g in gens:
            if gens[g.adjoint].adjoint != g.id:
                raise UsageError(f"adjoint pairing of {g.name!r} is not an involution")
            if gens[g.adjoint].weight != g.weight:
                raise UsageError(f"{g.name!r} and its adjoint must share a weight")
        self.generators: tuple[Generator, ...] = tuple(gens)
        self._index = index

        self.rules: tuple[Rule, ...] = tuple(
            Rule(self.word(lhs), tuple((self.word(w), Scalar.coerce(c)) for c, w in rhs))
            for lhs, rhs in rules
        )
        for r in self.rules:
            if len(r.lhs) < 2:
                raise UsageError("rule left-hand sides must have length >= 2")
        self._by_last: dict[int, list[Rule]] = {}
        for r in self.rules:
            self._by_last.setdefault(r.lhs[-1], []).append(r)
        for lst in self._by_last.values():
            # longest match first: the leftmost redex in a prefix-normal word
            lst.sort(key=lambda r: -len(r.lhs))
        self._cache: dict[Word, dict[Word, Scalar]] = {}

        self.relations: tuple[NCPoly, ...] = tuple(
            self.poly_from_terms(rel) for rel in relations
        )
        if validate:
            for r in self.rules:
                for w, _ in r.rhs:
                    if not self.word_key(w) < self.word_key(r.lhs):
                        raise UsageError(
                            f"rule {self.word_text(r.lhs)} -> ... does not decrease "
                            f"the term order (offending word {self.word_text(w)})"
                        )

    # generators and words ----------------------------------------------

    def __repr__(self) -> str:
        return f"Presentation({self.name!r})"

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    def gen_id(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"unknown generator {name!r} in {self.name}") from None

    def has(self, name: str) -> bool:
        return name in self._index

    def word(self, names: Iterable[str]) -> Word:
        return tuple(self.gen_id(n) for n in names)

    def word_names(self, w: Word) -> list[str]:
        return [self.generators[i].name for i in w]

    def word_text(self, w: Word) -> str:
        from .formats import format_word

        return format_word(self, w)

    def word_key(self, w: Word) -> tuple[int, Word]:
        """Term order used for termination: weighted degree, then lex."""
        return (sum(self.generators[i].weight for i in w), w)

    def display_key(self, w: Word) -> tuple[int, Word]:
        """Order used for canonical text: length, then lex by precedence."""
        return (len(w), w)

    def adjoint_word(self, w: Word) -> Word:
        gens = self.generators
        return tuple(gens[i].adjoint for i in reversed(w))

    # polynomials --------------------------------------------------------

    def poly(self, terms: Mapping[Word, ScalarLike] | None = None) -> "NCPoly":
        return NCPoly(self, terms or {})

    def poly_from_terms(self, terms: Iterable[tuple[ScalarLike, Sequence[str]]]) -> "NCPoly":
        out: dict[Word, Scalar] = {}
        for c, names in terms:
            w = self.word(names)
            out[w] = out.get(w, ZERO) + Scalar.coerce(c)
        return NCPoly(self, out)

    def one(self) -> "NCPoly":
        return NCPoly(self, {(): ONE})

    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def gen(self, name: str) -> "NCPoly":
        return NCPoly(self, {(self.gen_id(name),): ONE})

    def scalar(self, s: ScalarLike) -> "NCPoly":
        return NCPoly(self, {(): Scalar.coerce(s)})

    def parse(self, text: str) -> "NCPoly":
        from .formats import parse_poly

        return parse_poly(text, self)

    # rewriting ----------------------------------------------------------

    def is_normal_word(self, w: Word) -> bool:
        for end in range(2, len(w) + 1):
            if self._match_end(w[:end]) is not None:
                return False
        return True

    def _match_end(self, w: Word) -> Rule | None:
        if not w:
            return None
        for r in self._by_last.get(w[-1], ()):
            n = len(r.lhs)
            if len(w) >= n and w[len(w) - n:] == r.lhs:
                return r
        return None

    def normal_form_word(self, w: Word, budget: _Budget | None = None) -> dict[Word, Scalar]:
        if budget is None:
            budget = _Budget(STEP_BUDGET)
        try:
            return self._nf(w, budget)
        except RecursionError:
            raise NormalizationError(f"rewriting of {self.word_text(w)} did not terminate") from None

    def _nf(self, w: Word, budget: _Budget) -> dict[Word, Scalar]:
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        if len(w) <= 1:
            result = {w: ONE}
        else:
            head, g = w[:-1], w[-1]
            pre = self._nf(head, budget)
            if len(pre) == 1 and pre.get(head) == ONE:
                r = self._match_end(w)
                if r is None:
                    result = {w: ONE}
                else:
                    budget.spend()
                    stem = w[: len(w) - len(r.lhs)]
                    result = {}
                    for rw, rc in r.rhs:
                        _accumulate(result, self._nf_concat(stem, rw, budget), rc)
            else:
                result = {}
                for u, c in pre.items():
                    _accumulate(result, self._nf(u + (g,), budget), c)
        self._cache[w] = result
        return result

    def _nf_concat(self, stem: Word, tail: Word, budget: _Budget) -> dict[Word, Scalar]:
        """Normal form of ``stem + tail`` for a normal ``stem``."""
        current: dict[Word, Scalar] = {stem: ONE}
        for g in tail:
            nxt: dict[Word, Scalar] = {}
            for u, c in current.items():
                _accumulate(nxt, self._nf(u + (g,), budget), c)
            current = nxt
        return current

    def normalize(self, p: "NCPoly") -> "NCPoly":
        self._check(p)
        budget = _Budget(STEP_BUDGET)
        out: dict[Word, Scalar] = {}
        for w, c in p.terms.items():
            _accumulate(out, self.normal_form_word(w, budget), c)
        return NCPoly._raw(self, out)

    def _check(self, p: "NCPoly") -> None:
        if p.pres is not self:
            raise UsageError(
                f"polynomial over {p.pres.name} used with presentation {self.name}"
            )

    def clear_cache(self) -> None:
        self._cache.clear()


def _accumulate(out: dict[Word, Scalar], src: Mapping[Word, Scalar], c: Scalar) -> None:
    for w, d in src.items():
        v = out.get(w, ZERO) + d * c
        if v:
            out[w] = v
        else:
            out.pop(w, None)


class NCPoly:
    """Finite linear combination of words with :class:`Scalar` coefficients.

    Addition and scaling are exact and never normalize.  Multiplication of two
    polynomials (``p * r``) returns the normalized product in the presentation;
    :meth:`free_mul` is the plain concatenation product.
    """

    __slots__ = ("pres", "terms")

    def __init__(self, pres: Presentation, terms: Mapping[Word, ScalarLike]):
        self.pres = pres
        clean: dict[Word, Scalar] = {}
        for w, c in terms.items():
            c = Scalar.coerce(c)
            if c:
                clean[tuple(w)] = clean.get(tuple(w), ZERO) + c
        self.terms = {w: c for w, c in clean.items() if c}

    @classmethod
    def _raw(cls, pres: Presentation, terms: dict[Word, Scalar]) -> "NCPoly":
        p = cls.__new__(cls)
        p.pres = pres
        p.terms = terms
        return p

    def _same(self, other: "NCPoly") -> None:
        if other.pres is not self.pres:
            raise UsageError(
                f"cannot combine polynomials over {self.pres.name} and {other.pres.name}"
            )

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def is_scalar(self) -> bool:
        return all(w == () for w in self.terms)

    def scalar_part(self) -> Scalar:
        return self.terms.get((), ZERO)

    def __add__(self, other: "NCPoly | ScalarLike") -> "NCPoly":
        if not isinstance(other, NCPoly):
            other = self.pres.scalar(other)
        self._same(other)
        out = dict(self.terms)
        _accumulate(out, other.terms, ONE)
        return NCPoly._raw(self.pres, out)

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly._raw(self.pres, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "NCPoly | ScalarLike") -> "NCPoly":
        if not isinstance(other, NCPoly):
            other = self.pres.scalar(other)
        return self + (-other)

    def __rsub__(self, other: ScalarLike) -> "NCPoly":
        return self.pres.scalar(other) - self

    def scale(self, s: ScalarLike) -> "NCPoly":
        s = Scalar.coerce(s)
        if not s:
            return self.pres.zero()
        return NCPoly._raw(self.pres, {w: c * s for w, c in self.terms.items()})

    def __mul__(self, other: "NCPoly | ScalarLike") -> "NCPoly":
        if not isinstance(other, NCPoly):
            return self.scale(other)
        return poly_mul(self, other, self.pres)

    def __rmul__(self, other: ScalarLike) -> "NCPoly":
        return self.scale(other)

    def __pow__(self, n: int) -> "NCPoly":
        out = self.pres.one()
        for _ in range(n):
            out = out * self
        return out

    def free_mul(self, other: "NCPoly") -> "NCPoly":
        self._same(other)
        out: dict[Word, Scalar] = {}
        for u, c in self.terms.items():
            for v, d in other.terms.items():
                w = u + v
                val = out.get(w, ZERO) + c * d
                if val:
                    out[w] = val
                else:
                    out.pop(w, None)
        return NCPoly._raw(self.pres, out)

    def normalize(self) -> "NCPoly":
        return self.pres.normalize(self)

    def star(self) -> "NCPoly":
        return star(self, self.pres)

    def free_star(self) -> "NCPoly":
        out: dict[Word, Scalar] = {}
        for w, c in self.terms.items():
            aw = self.pres.adjoint_word(w)
            out[aw] = out.get(aw, ZERO) + c.conj()
        return NCPoly(self.pres, out)

    def map_coeffs(self, f) -> "NCPoly":
        return NCPoly(self.pres, {w: f(c) for w, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int,)) or isinstance(other, Scalar):
            return self.terms == ({(): Scalar.coerce(other)} if other else {})
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.pres is other.pres and self.terms == other.terms

    __hash__ = None

    def to_text(self) -> str:
        from .formats import format_poly

        return format_poly(self)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"NCPoly({self.to_text()!r})"


# module-level operations ------------------------------------------------


def poly_add(p1: NCPoly, p2: NCPoly) -> NCPoly:
    return p1 + p2


def normalize(p: NCPoly, pres: Presentation | None = None) -> NCPoly:
    pres = pres or p.pres
    return pres.normalize(p)


def poly_mul(p1: NCPoly, p2: NCPoly, pres: Presentation | None = None) -> NCPoly:
    pres = pres or p1.pres
    pres._check(p1)
    pres._check(p2)
    budget = _Budget(STEP_BUDGET)
    left = pres.normalize(p1) if not _is_normal(p1) else p1
    out: dict[Word, Scalar] = {}
    for u, c in left.terms.items():
        for v, d in p2.terms.items():
            _accumulate(out, pres._nf_concat(u, v, budget), c * d)
    return NCPoly._raw(pres, out)


def _is_normal(p: NCPoly) -> bool:
    return all(p.pres.is_normal_word(w) for w in p.terms)


def star(p: NCPoly, pres: Presentation | None = None) -> NCPoly:
    pres = pres or p.pres
    pres._check(p)
    return pres.normalize(p.free_star())


# confluence probe ---------------------------------------------------------


@dataclass
class ProbeReport:
    presentation: str
    trials: int
    seed: int
    max_degree: int
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "presentation": self.presentation,
            "trials": self.trials,
            "seed": self.seed,
            "max_degree": self.max_degree,
            "passed": self.passed,
            "failures": self.failures,
        }


def random_word(pres: Presentation, rng: random.Random, max_degree: int) -> Word:
    n = rng.randint(0, max_degree)
    return tuple(rng.randrange(len(pres.generators)) for _ in range(n))


def confluence_probe(
    pres: Presentation,
    trials: int = 1000,
    seed: int = 0,
    max_degree: int = 6,
    max_failures: int = 10,
) -> ProbeReport:
    """Randomized check that the rewrite system defines an associative *-algebra.

    For random words x, y, z: (xy)z = x(yz) after normalization,
    star(star(x)) = x and star(xy) = star(y) star(x).  A rule set with a
    critical pair that does not resolve shows up as a violation of one of
    these identities.
    """
    if trials < 1:
        raise UsageError("trials must be >= 1")
    rng = random.Random(seed)
    report = ProbeReport(pres.name, trials, seed, max_degree)

    def fail(kind, *words, lhs, rhs):
        if len(report.failures) < max_failures:
            report.failures.append(
                {
                    "check": kind,
                    "words": [pres.word_text(w) for w in words],
                    "lhs": lhs.to_text(),
                    "rhs": rhs.to_text(),
                }
            )

    for _ in range(trials):
        x, y, z = (pres.poly({random_word(pres, rng, max_degree): ONE}) for _ in range(3))
        xw, yw, zw = (next(iter(p.terms)) for p in (x, y, z))
        left = poly_mul(poly_mul(x, y, pres), z, pres)
        right = poly_mul(x, poly_mul(y, z, pres), pres)
        if left != right:
            fail("associativity", xw, yw, zw, lhs=left, rhs=right)
        xs = star(star(x))
        nx = pres.normalize(x)
        if xs != nx:
            fail("involution", xw, lhs=xs, rhs=nx)
        sxy = star(poly_mul(x, y, pres))
        sysx = poly_mul(star(y), star(x), pres)
        if sxy != sysx:
            fail("anti-homomorphism", xw, yw, lhs=sxy, rhs=sysx)
        if len(report.failures) >= max_failures:
            break
    return report


def rule_star_residuals(pres: Presentation) -> list[NCPoly]:
    """normalize(star(lhs) - star(rhs)) for every rule; all zero when the
    starred rules are derivable."""
    out = []
    for r in pres.rules:
        diff = pres.poly({r.lhs: ONE}) - pres.poly(dict((w, c) for w, c in r.rhs))
        out.append(pres.normalize(diff.free_star()))
    return out


def relation_residuals(pres: Presentation) -> list[NCPoly]:
    return [pres.normalize(r) for r in pres.relations]


sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))
