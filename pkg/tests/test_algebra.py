import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest

from ncspheres.algebra import (
    Presentation,
    confluence_probe,
    normalize,
    poly_add,
    poly_mul,
    random_word,
    relation_residuals,
    rule_star_residuals,
    star,
)
from ncspheres.coeff import L, ONE, Q, Scalar
from ncspheres.errors import NormalizationError, ParseError, UsageError
from ncspheres.formats import presentation_from_dict, presentation_to_dict
from ncspheres.presets import PRESET_NAMES, preset, specialized


@pytest.fixture(scope="module")
def s4():
    return preset("S4QT")


def nf(pres, text):
    return pres.parse(text).normalize()


def random_poly(pres, rng, terms=3, max_degree=4):
    p = pres.zero()
    for _ in range(terms):
        w = random_word(pres, rng, max_degree)
        c = Scalar.monomial(rng.randint(-2, 2), rng.randint(-1, 1), rng.choice([1, -1, 2]))
        p = p + pres.poly({w: c})
    return p


# worked examples -----------------------------------------------------------


@pytest.mark.parametrize(
    "expr, expected",
    [
        ("beta.alpha", "q * alpha.beta"),
        ("Ustar.U", "1 - alphastar.alpha - beta^2"),
        ("alpha.alphastar", "alphastar.alpha + (-q^-2 + 1) * beta^2"),
        ("U.alpha", "l * alpha.U"),
        ("beta.alphastar", "q^-1 * alphastar.beta"),
        ("U.Ustar", "1 - alphastar.alpha - beta^2"),
        ("1", "1"),
        ("alpha - alpha", "0"),
        ("beta + beta", "2 * beta"),
    ],
)
def test_normal_forms(s4, expr, expected):
    assert nf(s4, expr).to_text() == expected


def test_poly_add_with_rewrite(s4):
    p = poly_add(s4.parse("alpha.beta"), nf(s4, "q*beta.alpha"))
    assert p == s4.parse("alpha.beta").scale(ONE + Q * Q)


def test_poly_mul_examples(s4):
    beta, alpha = s4.gen("beta"), s4.gen("alpha")
    assert poly_mul(beta, alpha, s4) == s4.parse("alpha.beta").scale(Q)
    sphere = s4.parse("alphastar.alpha + beta^2 + Ustar.U")
    p = s4.parse("alpha.U^2 - 3*beta.Ustar")
    assert poly_mul(sphere, p, s4) == normalize(p)
    assert poly_mul(p, sphere, s4) == normalize(p)
    assert poly_mul(s4.one(), p, s4) == normalize(p)


def test_star_examples(s4):
    assert star(s4.parse("alpha.beta")) == s4.parse("alphastar.beta").scale(Q**-1)
    assert star(s4.gen("U")) == s4.gen("Ustar")
    assert star(s4.parse("l*U.alpha")) == nf(s4, "l^-1*alphastar.Ustar")


def test_star_is_involution(s4):
    rng = random.Random(11)
    for _ in range(100):
        p = random_poly(s4, rng)
        assert star(star(p)) == normalize(p)


def test_idempotence_and_linearity(s4):
    rng = random.Random(5)
    a, b = Scalar.monomial(1, -1, 3), ONE - L
    for _ in range(50):
        p, r = random_poly(s4, rng), random_poly(s4, rng)
        n = normalize(p)
        assert normalize(n) == n
        assert all(s4.is_normal_word(w) for w in n.terms)
        assert normalize(p.scale(a) + r.scale(b)) == normalize(p).scale(a) + normalize(r).scale(b)


def test_empty_inputs(s4):
    assert normalize(s4.zero()).is_zero()
    assert normalize(s4.one()) == s4.one()
    assert poly_mul(s4.zero(), s4.gen("U"), s4).is_zero()


def test_mismatched_presentation_is_a_usage_error(s4):
    other = preset("S2Q")
    with pytest.raises(UsageError):
        poly_add(s4.gen("beta"), other.gen("b"))
    with pytest.raises(UsageError):
        normalize(other.gen("b"), s4)
    with pytest.raises(UsageError):
        poly_mul(s4.gen("beta"), other.gen("b"), s4)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_relations_and_rule_stars_vanish(name):
    pres = preset(name)
    assert all(r.is_zero() for r in relation_residuals(pres))
    assert all(r.is_zero() for r in rule_star_residuals(pres))


def test_preset_lookup_is_case_insensitive():
    assert preset("s4qt") is preset("S4QT")
    with pytest.raises(UsageError):
        preset("S7")


# rewriting system health ------------------------------------------------------


def _mis_oriented():
    data = presentation_to_dict(preset("S4QT"))
    for r in data["rules"]:
        if r["lhs"] == ["beta", "alpha"]:
            r["rhs"] = [{"coeff": "q^-1", "word": ["alpha", "beta"]}]
    return presentation_from_dict(data)


def test_probe_detects_mis_oriented_rule():
    bad = _mis_oriented()
    report = confluence_probe(bad, trials=1000, seed=1, max_degree=6)
    assert not report.passed
    assert report.failures[0]["check"] in {"associativity", "involution", "anti-homomorphism"}
    assert any(not r.is_zero() for r in relation_residuals(bad))


def test_probe_passes_on_s2q_and_s4qt():
    assert confluence_probe(preset("S2Q"), 1000, 0, 6).passed
    assert confluence_probe(preset("S4QT"), 1000, 0, 6).passed


def test_probe_rejects_zero_trials(s4):
    with pytest.raises(UsageError):
        confluence_probe(s4, trials=0)


def test_non_terminating_rules_hit_the_guard():
    loop = Presentation(
        "loop",
        [("a", "a"), ("b", "b")],
        [(["a", "b"], [(1, ["b", "a"])]), (["b", "a"], [(1, ["a", "b"])])],
        validate=False,
    )
    with pytest.raises(NormalizationError):
        normalize(loop.parse("a.b"))


def test_order_validation_rejects_increasing_rule():
    with pytest.raises(UsageError):
        Presentation("up", [("a", "a"), ("b", "b")], [(["a", "b"], [(1, ["b", "a", "a"])])])


def test_adjoint_pairing_must_be_an_involution():
    with pytest.raises(UsageError):
        Presentation("bad", [("a", "b"), ("b", "c"), ("c", "a")], [])


# limits ------------------------------------------------------------------


def test_commutative_limit():
    flat = specialized(preset("S4QT"), q_value=1, l_value=1)
    rng = random.Random(2)
    for _ in range(200):
        x = flat.poly({random_word(flat, rng, 4): ONE})
        y = flat.poly({random_word(flat, rng, 4): ONE})
        assert (poly_mul(x, y, flat) - poly_mul(y, x, flat)).is_zero()


def test_theta_zero_limit_makes_u_commute():
    s = specialized(preset("S4QT"), l_value=1)
    for g in ("alpha", "alphastar", "beta"):
        assert nf(s, f"U.{g}") == s.parse(f"{g}.U")
        assert nf(s, f"Ustar.{g}") == s.parse(f"{g}.Ustar")
    # the q-deformation survives
    assert nf(s, "beta.alpha") == s.parse("q*alpha.beta")


@pytest.mark.parametrize("g", ["alpha", "alphastar", "beta", "U", "Ustar"])
def test_uustar_is_central(s4, g):
    z = s4.parse("U.Ustar")
    gen = s4.gen(g)
    assert (poly_mul(z, gen, s4) - poly_mul(gen, z, s4)).is_zero()


# concurrency -------------------------------------------------------------


def test_parallel_normalization_matches_sequential():
    rng = random.Random(9)
    words = [random_word(preset("S4QT"), rng, 7) for _ in range(300)]

    def fresh():
        return presentation_from_dict(presentation_to_dict(preset("S4QT")))

    seq = fresh()
    expected = [seq.normalize(seq.poly({w: ONE})) for w in words]
    par = fresh()
    with ThreadPoolExecutor(max_workers=8) as pool:
        got = list(pool.map(lambda w: par.normalize(par.poly({w: ONE})), words))
    assert [g.terms for g in got] == [e.terms for e in expected]


# parsing -----------------------------------------------------------------


@pytest.mark.parametrize(
    "text, pos",
    [("beta.(alpha", 11), ("beta..alpha", 5), ("gamma", 0), ("alpha^-1", 0), ("", 0), ("1/0", 2)],
)
def test_parse_errors_carry_positions(s4, text, pos):
    with pytest.raises(ParseError) as info:
        s4.parse(text)
    assert info.value.pos == pos
    assert "^" in str(info.value)


def test_parse_accepts_coefficients(s4):
    p = s4.parse("(1 - q^-2)*beta^2 + 2/3*l^-1*U - (alpha)")
    assert p.terms[s4.word(["beta", "beta"])] == ONE - Q**-2
    assert p.terms[s4.word(["U"])] == Scalar.monomial(0, -1, Fraction(2, 3))
    assert p.terms[s4.word(["alpha"])] == -ONE


def test_canonical_text_roundtrip(s4):
    rng = random.Random(4)
    for _ in range(50):
        p = normalize(random_poly(s4, rng))
        assert s4.parse(p.to_text()) == p
