"""Built-in presentations and relation / morphism / character / centre checks.

Generator names are ASCII spellings: ``alpha``, ``alphastar``, ``beta``,
``U``, ``Ustar`` for the four-sphere; ``a``, ``astar``, ``b`` for the Podles
sphere; ``t`` for the suspension coordinate; ``V``, ``Vstar`` for the unitary
of the crossed product; ``atilde``, ``atildestar``, ``btilde``,
``btildestar`` for the twisted three-sphere; ``x`` for the adjoined central
square root of ``Ustar.U``.

Normal forms for S4QT are words ``alphastar^i alpha^j beta^k`` followed by a
power of ``U`` or of ``Ustar`` (never both), with an optional leading ``x`` in
S4QT_X.  The same pattern (with ``t`` in place of ``U``) holds for SUSP; the
unitary ``V`` or ``Vstar`` goes rightmost in CROSS.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .algebra import NCPoly, Presentation, Word, normalize, poly_mul
from .coeff import ONE, Scalar
from .errors import UsageError

q = Scalar.monomial(1, 0)
qi = Scalar.monomial(-1, 0)
qi2 = Scalar.monomial(-2, 0)
lam = Scalar.monomial(0, 1)
lami = Scalar.monomial(0, -1)
one_minus_qi2 = ONE - qi2

PRESET_NAMES = ("S2Q", "S4QT", "S4QT_X", "S3T", "SUSP", "CROSS")


def _qsphere_rules(a: str, astar: str, b: str) -> list:
    """q-commutations and the difference of the two sphere relations."""
    return [
        ([b, a], [(q, [a, b])]),
        ([b, astar], [(qi, [astar, b])]),
        ([a, astar], [(1, [astar, a]), (one_minus_qi2, [b, b])]),
    ]


def _qsphere_relations(a: str, astar: str, b: str, extra: list[str] | None) -> list:
    """Two q-commutations and the two sphere relations, with an optional
    extra quadratic word added to both sphere relations."""
    tail = [(1, extra)] if extra else []
    return [
        [(1, [b, a]), (-q, [a, b])],
        [(1, [astar, b]), (-q, [b, astar])],
        [(1, [astar, a]), (1, [b, b])] + tail + [(-1, [])],
        [(1, [a, astar]), (qi2, [b, b])] + tail + [(-1, [])],
    ]


def _s2q() -> Presentation:
    gens = [("astar", "a"), ("a", "astar"), ("b", "b")]
    rules = [
        (["b", "a"], [(q, ["a", "b"])]),
        (["b", "astar"], [(qi, ["astar", "b"])]),
        (["astar", "a"], [(1, []), (-1, ["b", "b"])]),
        (["a", "astar"], [(1, []), (-qi2, ["b", "b"])]),
    ]
    rels = _qsphere_relations("a", "astar", "b", None)
    return Presentation("S2Q", gens, rules, rels, weights={"a": 2, "astar": 2, "b": 1})


def _s4qt_parts() -> tuple[list, list, list, dict]:
    gens = [("alphastar", "alpha"), ("alpha", "alphastar"), ("beta", "beta"), ("Ustar", "U"), ("U", "Ustar")]
    rules = _qsphere_rules("alpha", "alphastar", "beta") + [
        (["U", "alpha"], [(lam, ["alpha", "U"])]),
        (["U", "alphastar"], [(lami, ["alphastar", "U"])]),
        (["U", "beta"], [(1, ["beta", "U"])]),
        (["Ustar", "alpha"], [(lami, ["alpha", "Ustar"])]),
        (["Ustar", "alphastar"], [(lam, ["alphastar", "Ustar"])]),
        (["Ustar", "beta"], [(1, ["beta", "Ustar"])]),
        (["U", "Ustar"], [(1, ["Ustar", "U"])]),
        (["Ustar", "U"], [(1, []), (-1, ["alphastar", "alpha"]), (-1, ["beta", "beta"])]),
    ]
    rels = _qsphere_relations("alpha", "alphastar", "beta", ["Ustar", "U"]) + [
        [(1, ["U", "alpha"]), (-lam, ["alpha", "U"])],
        [(1, ["U", "alphastar"]), (-lami, ["alphastar", "U"])],
        [(1, ["U", "beta"]), (-1, ["beta", "U"])],
        [(1, ["Ustar", "U"]), (-1, ["U", "Ustar"])],
    ]
    weights = {"alpha": 2, "alphastar": 2, "beta": 1, "U": 3, "Ustar": 3}
    return gens, rules, rels, weights


def _s4qt() -> Presentation:
    gens, rules, rels, weights = _s4qt_parts()
    return Presentation("S4QT", gens, rules, rels, weights)


def _s4qt_x() -> Presentation:
    gens, rules, rels, weights = _s4qt_parts()
    others = [g for g, _ in gens]
    gens = [("x", "x")] + gens
    rules = rules + [([g, "x"], [(1, ["x", g])]) for g in others] + [
        (["x", "x"], [(1, []), (-1, ["alphastar", "alpha"]), (-1, ["beta", "beta"])]),
    ]
    rels = rels + [[(1, ["x", g]), (-1, [g, "x"])] for g in others] + [
        [(1, ["x", "x"]), (-1, ["Ustar", "U"])],
    ]
    return Presentation("S4QT_X", gens, rules, rels, dict(weights, x=3))


def _susp_parts() -> tuple[list, list, list, dict]:
    gens = [("astar", "a"), ("a", "astar"), ("b", "b"), ("t", "t")]
    rules = _qsphere_rules("a", "astar", "b") + [
        (["t", "a"], [(1, ["a", "t"])]),
        (["t", "astar"], [(1, ["astar", "t"])]),
        (["t", "b"], [(1, ["b", "t"])]),
        (["t", "t"], [(1, []), (-1, ["astar", "a"]), (-1, ["b", "b"])]),
    ]
    rels = _qsphere_relations("a", "astar", "b", ["t", "t"]) + [
        [(1, ["t", g]), (-1, [g, "t"])] for g in ("a", "astar", "b")
    ]
    return gens, rules, rels, {"a": 2, "astar": 2, "b": 1, "t": 3}


def _susp() -> Presentation:
    gens, rules, rels, weights = _susp_parts()
    return Presentation("SUSP", gens, rules, rels, weights)


def _cross() -> Presentation:
    gens, rules, rels, weights = _susp_parts()
    gens = gens + [("Vstar", "V"), ("V", "Vstar")]
    # V implements the Z-action: a -> l a, astar -> l^-1 astar, b and t fixed
    phase = {"a": lam, "astar": lami, "b": ONE, "t": ONE}
    for g, ph in phase.items():
        rules.append((["V", g], [(ph, [g, "V"])]))
        rules.append((["Vstar", g], [(ph.conj(), [g, "Vstar"])]))
    rules += [
        (["V", "Vstar"], [(1, [])]),
        (["Vstar", "V"], [(1, [])]),
    ]
    rels = rels + [
        [(1, ["V", "Vstar"]), (-1, [])],
        [(1, ["Vstar", "V"]), (-1, [])],
    ] + [[(1, ["V", g, "Vstar"]), (-ph, [g])] for g, ph in phase.items()]
    return Presentation("CROSS", gens, rules, rels, dict(weights, V=1, Vstar=1))


def _s3t() -> Presentation:
    gens = [("atildestar", "atilde"), ("atilde", "atildestar"), ("btildestar", "btilde"), ("btilde", "btildestar")]
    sphere = [(1, []), (-1, ["atildestar", "atilde"])]
    rules = [
        (["atilde", "atildestar"], [(1, ["atildestar", "atilde"])]),
        (["btilde", "atilde"], [(lam, ["atilde", "btilde"])]),
        (["btilde", "atildestar"], [(lami, ["atildestar", "btilde"])]),
        (["btildestar", "atilde"], [(lami, ["atilde", "btildestar"])]),
        (["btildestar", "atildestar"], [(lam, ["atildestar", "btildestar"])]),
        (["btildestar", "btilde"], sphere),
        (["btilde", "btildestar"], sphere),
    ]
    rels = [
        [(1, ["atilde", "atildestar"]), (-1, ["atildestar", "atilde"])],
        [(1, ["btilde", "btildestar"]), (-1, ["btildestar", "btilde"])],
        [(1, ["btilde", "atilde"]), (-lam, ["atilde", "btilde"])],
        [(1, ["btilde", "atildestar"]), (-lami, ["atildestar", "btilde"])],
        [(1, ["atildestar", "atilde"]), (1, ["btildestar", "btilde"]), (-1, [])],
    ]
    weights = {"atilde": 1, "atildestar": 1, "btilde": 2, "btildestar": 2}
    return Presentation("S3T", gens, rules, rels, weights)


_BUILDERS = {
    "S2Q": _s2q,
    "S4QT": _s4qt,
    "S4QT_X": _s4qt_x,
    "S3T": _s3t,
    "SUSP": _susp,
    "CROSS": _cross,
}


def preset(name: str) -> Presentation:
    """Shared instance of a built-in presentation (names are case-insensitive)."""
    key = name.upper()
    if key not in _BUILDERS:
        raise UsageError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return _cached(key)


@lru_cache(maxsize=None)
def _cached(key: str) -> Presentation:
    return _BUILDERS[key]()


def specialized(pres: Presentation, q_value: int | Fraction | None = None, l_value: int | None = None) -> Presentation:
    """Copy of ``pres`` with q and/or l substituted in every rule and relation."""

    def sub(c: Scalar) -> Scalar:
        if q_value is not None:
            c = c.at_q(q_value)
        if l_value is not None:
            c = c.at_l(l_value)
        return c

    gens = [(g.name, pres.generators[g.adjoint].name) for g in pres.generators]
    rules = [
        (pres.word_names(r.lhs), [(sub(c), pres.word_names(w)) for w, c in r.rhs if sub(c)])
        for r in pres.rules
    ]
    rels = [[(sub(c), pres.word_names(w)) for w, c in rel.terms.items()] for rel in pres.relations]
    tag = ",".join(
        s for s in (f"q={q_value}" if q_value is not None else "", f"l={l_value}" if l_value is not None else "") if s
    )
    return Presentation(
        f"{pres.name}[{tag}]", gens, rules, rels, {g.name: g.weight for g in pres.generators}
    )


# checks -------------------------------------------------------------------


def check_relations(pres: Presentation) -> list[NCPoly]:
    return [normalize(r) for r in pres.relations]


@dataclass
class MorphismSpec:
    source: Presentation
    target: Presentation
    images: dict[str, NCPoly]

    @classmethod
    def build(cls, source: Presentation, target: Presentation, images: Mapping[str, NCPoly | str | int]) -> "MorphismSpec":
        """Complete ``images`` with adjoint partners and validate them.

        A generator whose adjoint partner has an image may be omitted; its
        image is the star of the partner's.  Images given for both partners
        must agree up to star.
        """
        imgs: dict[str, NCPoly] = {}
        for name, val in images.items():
            if not source.has(name):
                raise UsageError(f"{name!r} is not a generator of {source.name}")
            if isinstance(val, str):
                val = target.parse(val)
            elif not isinstance(val, NCPoly):
                val = target.scalar(val)
            if val.pres is not target:
                raise UsageError(f"image of {name!r} does not live in {target.name}")
            imgs[name] = normalize(val)
        for g in source.generators:
            partner = source.generators[g.adjoint].name
            if g.name in imgs:
                continue
            if partner in imgs:
                imgs[g.name] = imgs[partner].star()
            else:
                raise UsageError(f"no image given for generator {g.name!r}")
        for g in source.generators:
            partner = source.generators[g.adjoint].name
            if imgs[partner] != imgs[g.name].star():
                raise UsageError(
                    f"image of {partner!r} is not the adjoint of the image of {g.name!r}"
                )
        return cls(source, target, imgs)

    def apply(self, p: NCPoly) -> NCPoly:
        if p.pres is not self.source:
            raise UsageError("polynomial is not over the morphism's source")
        tgt = self.target
        gen_img = [self.images[g.name] for g in self.source.generators]
        out = tgt.zero()
        cache: dict[Word, NCPoly] = {(): tgt.one()}

        def image_word(w: Word) -> NCPoly:
            hit = cache.get(w)
            if hit is None:
                hit = poly_mul(image_word(w[:-1]), gen_img[w[-1]], tgt)
                cache[w] = hit
            return hit

        for w, c in p.terms.items():
            out = out + image_word(w).scale(c)
        return out


def check_morphism(m: MorphismSpec) -> list[NCPoly]:
    """Residual of every source relation pushed through ``m``; all zero for a
    *-homomorphism."""
    return [normalize(m.apply(r)) for r in m.source.relations]


def check_character(
    pres: Presentation,
    values: Mapping[str, complex],
    q_val: float,
    theta_val: float,
    tol: float = 1e-12,
) -> list[float]:
    """Absolute residual of each defining relation at a one-dimensional
    *-representation given by ``values``."""
    full: dict[str, complex] = {}
    for name, v in values.items():
        if not pres.has(name):
            raise UsageError(f"{name!r} is not a generator of {pres.name}")
        full[name] = complex(v)
    for g in pres.generators:
        partner = pres.generators[g.adjoint].name
        if g.name not in full and partner in full:
            full[g.name] = full[partner].conjugate()
        if g.name not in full:
            raise UsageError(f"no value given for generator {g.name!r}")
    for g in pres.generators:
        partner = pres.generators[g.adjoint].name
        if abs(full[partner] - full[g.name].conjugate()) > tol:
            raise UsageError(f"value of {partner!r} is not the conjugate of the value of {g.name!r}")
    vals = [full[g.name] for g in pres.generators]
    out = []
    for rel in pres.relations:
        total = 0j
        for w, c in rel.terms.items():
            term = c.specialize(q_val, theta_val)
            for i in w:
                term *= vals[i]
            total += term
        out.append(abs(total))
    return out


def centrality_check(pres: Presentation, p: NCPoly) -> list[NCPoly]:
    """normalize(p g - g p) for each generator g."""
    out = []
    for g in pres.generators:
        gp = pres.gen(g.name)
        out.append(poly_mul(p, gp, pres) - poly_mul(gp, p, pres))
    return out


# named morphisms -------------------------------------------------------------


def s3t_projection() -> MorphismSpec:
    """S4QT -> S3T: beta -> 0, alpha -> atilde, U -> btilde."""
    return MorphismSpec.build(preset("S4QT"), preset("S3T"), {"alpha": "atilde", "beta": 0, "U": "btilde"})


def cross_embedding() -> MorphismSpec:
    """S4QT -> CROSS: alpha -> a, beta -> b, U -> V.t."""
    return MorphismSpec.build(preset("S4QT"), preset("CROSS"), {"alpha": "a", "beta": "b", "U": "V.t"})


def susp_inclusion() -> MorphismSpec:
    return MorphismSpec.build(preset("SUSP"), preset("CROSS"), {"a": "a", "b": "b", "t": "t"})


def identity_morphism(pres: Presentation) -> MorphismSpec:
    return MorphismSpec.build(pres, pres, {g.name: pres.gen(g.name) for g in pres.generators})
