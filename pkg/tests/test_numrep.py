import math
import random

import numpy as np
import pytest
import scipy.sparse as sp

from ncspheres import numrep
from ncspheres.algebra import random_word
from ncspheres.chern import MatrixPoly, dennis_trace, projector_e, projector_eprime
from ncspheres.coeff import Scalar
from ncspheres.errors import DomainError, UsageError
from ncspheres.presets import check_character, preset

Q_NUM = 0.5
THETA = math.sqrt(2) - 1
PHI = 0.7


@pytest.fixture(scope="module")
def rho():
    return numrep.rho_phi(Q_NUM, THETA, PHI, 40, 40)


@pytest.fixture(scope="module")
def small():
    return numrep.rho_phi(Q_NUM, THETA, PHI, 12, 12)


def random_poly(pres, rng, max_degree):
    p = pres.zero()
    for _ in range(rng.randint(1, 4)):
        w = random_word(pres, rng, max_degree)
        c = Scalar.monomial(rng.randint(-2, 2), rng.randint(-2, 2), rng.choice([1, -1, 2, 3]))
        p = p + pres.poly({w: c})
    return p


# Podles sphere -----------------------------------------------------------


@pytest.mark.parametrize("sign", [1, -1])
def test_podles_relations(sign):
    rep = numrep.podles_rep(0.5, sign, 40)
    for r in numrep.relation_residuals(preset("S2Q"), rep, 2):
        assert r.residual_norm < 1e-12


def test_podles_weights_solve_the_recurrence():
    # a*a + b^2 = 1 and a a* + q^-2 b^2 = 1 on e_n fix w_n^2 = 1 - q^{2(n+1)}
    q, N = 0.3, 10
    rep = numrep.podles_rep(q, 1, N)
    a = rep.ops["a"].toarray()
    for n in range(N - 1):
        assert a[n + 1, n] ** 2 == pytest.approx(1 - q ** (2 * (n + 1)))
    b = rep.ops["b"].toarray()
    assert np.allclose(np.diag(b), q ** (np.arange(N) + 1.0))


def test_podles_near_q_one():
    rep = numrep.podles_rep(1 - 1e-9, -1, 5)
    assert np.abs(rep.ops["a"].toarray()).max() < 1e-3
    assert np.allclose(rep.ops["b"].toarray(), -np.eye(5), atol=1e-7)


@pytest.mark.parametrize("q", [0.0, 1.0, 1.5, -0.2])
def test_domain_errors(q):
    with pytest.raises(DomainError):
        numrep.podles_rep(q)
    with pytest.raises(DomainError):
        numrep.rho_phi(q, THETA, PHI)


def test_other_domain_errors():
    with pytest.raises(DomainError):
        numrep.rho_phi(0.5, THETA, 2 * math.pi)
    with pytest.raises(DomainError):
        numrep.rho_phi(0.5, THETA, PHI, N=1)
    with pytest.raises(DomainError):
        numrep.podles_rep(0.5, sign=2)


# four-sphere family ------------------------------------------------------


def test_rho_relations_at_default_parameters(rho):
    res = numrep.relation_residuals(preset("S4QT"), rho, 3)
    assert len(res) == 8
    assert max(r.residual_norm for r in res) < 1e-10


@pytest.mark.parametrize("phi", [0.0, 1.3, math.pi / 2, 4.0])
def test_rho_relations_any_phi(phi):
    rep = numrep.rho_phi(0.4, 0.123, phi, 10, 10)
    assert max(r.residual_norm for r in numrep.relation_residuals(preset("S4QT"), rep, 2)) < 1e-10


def test_degenerate_member(small):
    rep = numrep.rho_phi(Q_NUM, THETA, math.pi / 2, 12, 12)
    assert np.abs(rep.ops["alpha"].toarray()).max() < 1e-15
    assert np.abs(rep.ops["beta"].toarray()).max() < 1e-15


def test_zero_margin_shows_truncation(small):
    res = numrep.relation_residuals(preset("S4QT"), small, 0)
    assert max(r.residual_norm for r in res) > 0.1


def test_residuals_shrink_with_margin(small):
    pres = preset("S4QT")
    by_margin = {m: [r.residual_norm for r in numrep.relation_residuals(pres, small, m)] for m in (1, 2, 4)}
    for m in (1, 2):
        for a, b in zip(by_margin[m], by_margin[2 * m]):
            assert b <= a + 1e-15


def test_adjoint_pairs(rho):
    for g, h in (("alpha", "alphastar"), ("U", "Ustar")):
        d = rho.ops[g].adjoint().matrix - rho.ops[h].matrix
        assert abs(d).max() == 0


def test_represent_unit(small):
    pres = preset("S4QT")
    assert abs(numrep.represent(pres.one(), small).matrix - small.identity().matrix).max() == 0


def test_missing_generator(small):
    sx = preset("S4QT_X")
    rep = numrep.podles_rep(0.5, 1, 5)
    with pytest.raises(UsageError):
        numrep.represent(sx.gen("x"), rep)


def test_star_is_adjoint(small):
    pres = preset("S4QT")
    rng = random.Random(4)
    for _ in range(30):
        p = random_poly(pres, rng, 4)
        rhs = numrep.represent(p, small).adjoint().matrix
        # the free star is exact; the normalized star agrees on the interior
        assert numrep.operator_norm(numrep.represent(p.free_star(), small).matrix - rhs) < 1e-12
        assert numrep.interior_residual(numrep.represent(p.star(), small).matrix - rhs, small, 4) < 1e-12


def test_normalize_commutes_with_represent(rho):
    pres = preset("S4QT")
    rng = random.Random(0)
    cache = {}
    for _ in range(200):
        p = random_poly(pres, rng, 5)
        d = numrep.represent(p.normalize(), rho, cache).matrix - numrep.represent(p, rho, cache).matrix
        assert numrep.interior_residual(d, rho, max(3, p.degree())) < 1e-8


def test_short_margin_can_break_long_words(small):
    # Ustar.U^4 -> (1 - alphastar.alpha - beta^2).U^3; the raw word shifts a
    # vector three steps from the window edge out of the window
    pres = preset("S4QT")
    p = pres.parse("Ustar.U^4")
    d = numrep.represent(p.normalize(), small).matrix - numrep.represent(p, small).matrix
    assert numrep.interior_residual(d, small, 3) > 0.1
    assert numrep.interior_residual(d, small, 5) < 1e-12


def test_multiplicativity(rho):
    pres = preset("S4QT")
    rng = random.Random(6)
    cache = {}
    for _ in range(40):
        x, y = random_poly(pres, rng, 2), random_poly(pres, rng, 3)
        prod = numrep.represent(x * y, rho, cache).matrix
        sep = numrep.represent(x, rho, cache).matrix @ numrep.represent(y, rho, cache).matrix
        assert numrep.interior_residual(prod - sep, rho, 5) < 1e-8


def test_x_represented_as_central_root(small):
    sx = preset("S4QT_X")
    res = numrep.relation_residuals(sx, small, 3)
    assert max(r.residual_norm for r in res) < 1e-10


def test_frobenius_is_an_upper_bound(small):
    pres = preset("S4QT")
    op = numrep.represent(pres.parse("alpha + U.beta - 2*alphastar"), small)
    assert numrep.operator_norm(op.matrix) <= numrep.interior_residual(op, small, 0, norm="fro") + 1e-12
    with pytest.raises(UsageError):
        numrep.interior_residual(op, small, 0, norm="max")


def test_operator_norm_matches_dense():
    rng = np.random.default_rng(1)
    m = sp.random(60, 60, density=0.03, random_state=2) + 1j * sp.random(60, 60, density=0.03, random_state=3)
    assert numrep.operator_norm(m) == pytest.approx(np.linalg.norm(m.toarray(), 2), rel=1e-12)
    assert numrep.operator_norm(sp.csr_matrix((5, 5))) == 0.0
    d = sp.diags(rng.standard_normal(30))
    assert numrep.operator_norm(d) == pytest.approx(np.abs(d.diagonal()).max())


# spectra -----------------------------------------------------------------


def test_projector_spectrum(rho):
    rep = numrep.projector_spectrum(projector_e(preset("S4QT")), rho, 3)
    assert rep.max_distance_to_01 < 1e-6
    assert rep.selfadjoint_defect < 1e-12
    assert rep.dimension > 0
    counts = rep.histogram()["counts"]
    assert sum(counts) == rep.dimension


def test_eprime_spectrum(small):
    rep = numrep.projector_spectrum(projector_eprime(preset("S4QT_X")), small, 3)
    assert rep.max_distance_to_01 < 1e-6


def test_identity_and_half_identity_spectra(small):
    pres = preset("S4QT")
    ident = numrep.projector_spectrum(MatrixPoly.identity(pres, 2), small, 1)
    assert np.allclose(ident.eigenvalues, 1)
    half = numrep.projector_spectrum(MatrixPoly.parse(pres, [["1/2", "0"], ["0", "1/2"]]), small, 1)
    assert half.max_distance_to_01 == pytest.approx(0.5)


def test_spectrum_margin_below_degree(small):
    pres = preset("S4QT")
    E = MatrixPoly.parse(pres, [["alpha.alphastar"]])
    with pytest.raises(UsageError):
        numrep.projector_spectrum(E, small, 1)


# characters as one-dimensional representations ----------------------------


@pytest.mark.parametrize(
    "values",
    [
        {"alpha": 1, "alphastar": 1, "beta": 0, "U": 0, "Ustar": 0},
        {"alpha": 0, "alphastar": 0, "beta": 0, "U": 1j, "Ustar": -1j},
    ],
)
def test_characters_as_representations(values):
    pres = preset("S4QT")
    rep = numrep.character_rep(values, Q_NUM, THETA)
    res = numrep.relation_residuals(pres, rep, 0)
    assert max(r.residual_norm for r in res) < 1e-12
    assert max(check_character(pres, values, Q_NUM, THETA)) < 1e-12


# chain contraction oracle ------------------------------------------------


@pytest.mark.parametrize("k", [1, 2, 3])
def test_dennis_contraction_matches_block_trace(small, k):
    pres = preset("S4QT")
    E = projector_e(pres)
    factors = [E] * k
    chain = dennis_trace(factors, reduced=False)
    lhs = numrep.contract_chain(chain, small)
    rhs = numrep.contract_dennis(factors, small)
    assert numrep.operator_norm(lhs - rhs) < 1e-12


def test_normalization_commutes_with_contraction(small):
    # free (un-normalized) entries E.E versus the normalized product
    pres = preset("S4QT")
    E = projector_e(pres)
    raw = [[sum((E.entries[i][m].free_mul(E.entries[m][j]) for m in range(4)), pres.zero()) for j in range(4)] for i in range(4)]
    E2 = E @ E
    lhs = numrep.contract_dennis([E2, E], small)
    rhs = numrep.contract_dennis([E2, E], small, raw_entries=[raw, E.entries])
    assert numrep.interior_residual(lhs - rhs, small, 4) < 1e-8

