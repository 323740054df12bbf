"""Truncated operator realizations of S2Q and S4QT.

Podles sphere on span(e_0..e_{N-1}):

    b e_n = sign * q^{n+1} e_n,    a e_n = sqrt(1 - q^{2(n+1)}) e_{n+1}

(the up-shift is cut at the top).  The four-sphere family acts on
H_q (x) l^2(Z), with the Z-leg truncated to the window -M..M:

    alpha = cos(phi) rho(a) (x) diag(exp(-2 pi i n theta))
    beta  = cos(phi) rho(b) (x) 1
    U     = sin(phi) 1 (x) S,        S|n> = |n+1>  (zero past the window)

Truncation breaks the relations only near the cut, so every check is done
on the interior: basis vectors at distance >= margin from each truncation
boundary.  The bottom of the Podles ladder is a genuine boundary, not a cut.

Operators are stored as scipy sparse matrices; spectra and norms are taken
block by block over the connected components of the sparsity pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import norm as sparse_norm
from scipy.sparse.linalg import svds

from .algebra import NCPoly, Presentation, Word
from .errors import DomainError, UsageError

DENSE_BLOCK_LIMIT = 4000
DENSE_SVD_LIMIT = 400


@dataclass
class TruncatedOp:
    """Sparse complex matrix with its truncation metadata."""

    matrix: sp.csr_matrix
    N: int
    M: int | None = None
    boundary: str = "zero-pad"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def adjoint(self) -> "TruncatedOp":
        return TruncatedOp(self.matrix.conj().T.tocsr(), self.N, self.M, self.boundary)

    def _wrap(self, m) -> "TruncatedOp":
        return TruncatedOp(sp.csr_matrix(m), self.N, self.M, self.boundary)

    def __matmul__(self, other: "TruncatedOp") -> "TruncatedOp":
        return self._wrap(self.matrix @ other.matrix)

    def __add__(self, other: "TruncatedOp") -> "TruncatedOp":
        return self._wrap(self.matrix + other.matrix)

    def __sub__(self, other: "TruncatedOp") -> "TruncatedOp":
        return self._wrap(self.matrix - other.matrix)

    def __mul__(self, c: complex) -> "TruncatedOp":
        return self._wrap(self.matrix * c)

    __rmul__ = __mul__

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass
class RepFamily:
    ops: dict[str, TruncatedOp]
    q: float
    theta: float
    phi: float | None
    N: int
    M: int | None
    interior_mask: Callable[[int], np.ndarray] = field(repr=False)

    @property
    def dim(self) -> int:
        return next(iter(self.ops.values())).dim

    def identity(self) -> TruncatedOp:
        return TruncatedOp(sp.identity(self.dim, dtype=complex, format="csr"), self.N, self.M)

    def interior(self, margin: int) -> sp.csr_matrix:
        """Orthogonal projector onto the interior basis vectors."""
        return sp.diags(self.interior_mask(margin).astype(complex), format="csr")


def _check_q(q: float) -> None:
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")


def _podles_matrices(q: float, sign: int, N: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    n = np.arange(N)
    b = sp.diags(sign * q ** (n + 1.0), format="csr").astype(complex)
    w = np.sqrt(1.0 - q ** (2.0 * (n[:-1] + 1)))
    a = sp.diags(w, -1, shape=(N, N), format="csr").astype(complex)
    return a, b


def podles_rep(q: float, sign: int = 1, N: int = 40) -> RepFamily:
    _check_q(q)
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if N < 2:
        raise DomainError("cutoff N must be >= 2")
    a, b = _podles_matrices(q, sign, N)
    ops = {
        "a": TruncatedOp(a, N),
        "astar": TruncatedOp(a.conj().T.tocsr(), N),
        "b": TruncatedOp(b, N),
    }

    def mask(margin: int) -> np.ndarray:
        return np.arange(N) <= N - 1 - margin

    return RepFamily(ops, q, 0.0, None, N, None, mask)


def rho_phi(q: float, theta: float, phi: float, N: int = 40, M: int = 40, sign: int = 1) -> RepFamily:
    _check_q(q)
    if not 0 <= phi < 2 * math.pi:
        raise DomainError(f"phi must lie in [0, 2 pi), got {phi}")
    if N < 2 or M < 2:
        raise DomainError("cutoffs N and M must be >= 2")
    a, b = _podles_matrices(q, sign, N)
    L = 2 * M + 1
    zs = np.arange(-M, M + 1)
    phase = sp.diags(np.exp(-2j * math.pi * theta * zs), format="csr")
    shift = sp.diags(np.ones(L - 1), -1, shape=(L, L), format="csr").astype(complex)
    eye_z = sp.identity(L, dtype=complex, format="csr")
    eye_p = sp.identity(N, dtype=complex, format="csr")
    c, s = math.cos(phi), math.sin(phi)
    alpha = (c * sp.kron(a, phase)).tocsr()
    beta = (c * sp.kron(b, eye_z)).tocsr()
    U = (s * sp.kron(eye_p, shift)).tocsr()
    dim = N * L
    # x = sqrt(Ustar U) = |sin phi| away from the window edge
    x = (abs(s) * sp.identity(dim, dtype=complex)).tocsr()
    mats = {
        "alpha": alpha,
        "alphastar": alpha.conj().T.tocsr(),
        "beta": beta,
        "U": U,
        "Ustar": U.conj().T.tocsr(),
        "x": x,
    }
    ops = {k: TruncatedOp(v, N, M) for k, v in mats.items()}
    p_idx = np.repeat(np.arange(N), L)
    z_idx = np.tile(zs, N)

    def mask(margin: int) -> np.ndarray:
        return (p_idx <= N - 1 - margin) & (np.abs(z_idx) <= M - margin)

    return RepFamily(ops, q, theta, phi, N, M, mask)


def character_rep(values: Mapping[str, complex], q: float, theta: float) -> RepFamily:
    """A one-dimensional *-representation (a character) as a RepFamily."""
    ops = {k: TruncatedOp(sp.csr_matrix(np.array([[complex(v)]])), 1) for k, v in values.items()}
    return RepFamily(ops, q, theta, None, 1, None, lambda margin: np.ones(1, dtype=bool))


# evaluation ---------------------------------------------------------------


def represent_word(w: Word, pres: Presentation, rep: RepFamily, cache: dict | None = None) -> sp.csr_matrix:
    if cache is None:
        cache = {}
    if w in cache:
        return cache[w]
    if not w:
        m = sp.identity(rep.dim, dtype=complex, format="csr")
    else:
        g = pres.generators[w[-1]]
        if g.name not in rep.ops:
            raise UsageError(f"representation has no operator for {g.name!r}")
        m = (represent_word(w[:-1], pres, rep, cache) @ rep.ops[g.name].matrix).tocsr()
    cache[w] = m
    return m


def represent(p: NCPoly, rep: RepFamily, cache: dict | None = None) -> TruncatedOp:
    """Evaluate ``p`` as an operator: words become products, coefficients are
    specialized at the family's (q, theta)."""
    pres = p.pres
    for w in p.terms:
        for i in w:
            if pres.generators[i].name not in rep.ops:
                raise UsageError(f"representation has no operator for {pres.generators[i].name!r}")
    if cache is None:
        cache = {}
    total = sp.csr_matrix((rep.dim, rep.dim), dtype=complex)
    for w, c in p.terms.items():
        total = total + c.specialize(rep.q, rep.theta) * represent_word(w, pres, rep, cache)
    return TruncatedOp(total.tocsr(), rep.N, rep.M)


def _components(pattern: sp.spmatrix) -> tuple[int, np.ndarray]:
    g = abs(pattern)
    g = (g + g.T).tocsr()
    return connected_components(g, directed=False)


def operator_norm(m: sp.spmatrix) -> float:
    """Exact spectral norm, computed blockwise over independent column groups."""
    m = sp.csc_matrix(m)
    m.eliminate_zeros()
    if m.nnz == 0:
        return 0.0
    gram = abs(m).T @ abs(m)
    _, labels = connected_components(gram, directed=False)
    sizes = np.bincount(labels)
    # a column that meets no other column is its own block: its norm is the column norm
    single = sizes[labels] == 1
    colnorm = np.sqrt(np.asarray(abs(m).power(2).sum(axis=0)).ravel())
    best = float(colnorm[single].max(initial=0.0))
    multi = np.flatnonzero(~single)
    if multi.size:
        order = multi[np.argsort(labels[multi], kind="stable")]
        splits = np.flatnonzero(np.diff(labels[order])) + 1
        groups = np.split(order, splits)
        # ||B||_2 <= ||B||_F: visit blocks by decreasing Frobenius norm and stop
        # once no remaining block can beat the current maximum
        fro = np.array([np.sqrt(np.sum(colnorm[g] ** 2)) for g in groups])
        for k in np.argsort(-fro, kind="stable"):
            if fro[k] <= best:
                break
            cols = groups[k]
            sub = m[:, cols]
            rows = np.unique(sub.nonzero()[0])
            block = sub[rows]
            if min(block.shape) > DENSE_SVD_LIMIT:
                val = float(svds(block, k=1, return_singular_vectors=False, tol=0)[0])
            else:
                val = float(np.linalg.norm(block.toarray(), 2))
            best = max(best, val)
    return best


def interior_residual(op: TruncatedOp | sp.spmatrix, rep: RepFamily, margin: int, norm: str = "op") -> float:
    """Norm of ``op`` restricted to the interior subspace (op @ P)."""
    m = op.matrix if isinstance(op, TruncatedOp) else op
    restricted = (m @ rep.interior(margin)).tocsr()
    if norm == "op":
        return operator_norm(restricted)
    if norm == "fro":
        return float(sparse_norm(restricted, "fro"))
    raise UsageError(f"unknown norm {norm!r}")


@dataclass
class ResidualReport:
    relation: str
    margin: int
    residual_norm: float

    def to_dict(self) -> dict:
        return {"relation": self.relation, "margin": self.margin, "residual_norm": self.residual_norm}


def relation_residuals(pres: Presentation, rep: RepFamily, margin: int) -> list[ResidualReport]:
    cache: dict = {}
    out = []
    for r in pres.relations:
        op = represent(r, rep, cache)
        out.append(ResidualReport(r.to_text(), margin, interior_residual(op, rep, margin)))
    return out


def represent_matrix(E, rep: RepFamily) -> sp.csr_matrix:
    """Block operator of a MatrixPoly acting on C^n (x) H."""
    cache: dict = {}
    blocks = [[represent(E.entries[i][j], rep, cache).matrix for j in range(E.n)] for i in range(E.n)]
    return sp.bmat(blocks, format="csr")


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    dimension: int
    max_distance_to_01: float
    selfadjoint_defect: float

    def histogram(self, bins: int = 10) -> dict:
        re = np.real(self.eigenvalues)
        counts, edges = np.histogram(re, bins=bins, range=(-0.25, 1.25))
        return {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "eigenvalue_histogram": self.histogram(),
            "max_distance_to_01": self.max_distance_to_01,
            "selfadjoint_defect": self.selfadjoint_defect,
        }


def projector_spectrum(E, rep: RepFamily, margin: int) -> SpectrumReport:
    """Eigenvalues of the interior compression of the represented matrix.

    The compression is onto the span of those invariant coordinate blocks
    (connected components of the operator's sparsity pattern) that lie
    entirely in the interior of every copy of the truncated space; there the
    truncated operator coincides with the untruncated one.
    """
    if margin < E.degree():
        raise UsageError(f"margin {margin} is below the entry degree {E.degree()}")
    X = represent_matrix(E, rep)
    mask = np.tile(rep.interior_mask(margin), E.n)
    ncomp, labels = _components(X)
    outside = np.zeros(ncomp, dtype=bool)
    np.logical_or.at(outside, labels, ~mask)
    keep = ~outside[labels]
    eigs = []
    defect = 0.0
    Xc = X.tocsr()
    order = np.argsort(labels[keep], kind="stable")
    idx_all = np.flatnonzero(keep)[order]
    lab_sorted = labels[idx_all]
    splits = np.flatnonzero(np.diff(lab_sorted)) + 1
    for idx in np.split(idx_all, splits):
        if idx.size == 0:
            continue
        if idx.size > DENSE_BLOCK_LIMIT:
            raise UsageError("spectral block too large for a dense solve")
        block = Xc[idx][:, idx].toarray()
        defect = max(defect, float(np.abs(block - block.conj().T).max(initial=0.0)))
        eigs.append(np.linalg.eigvals(block))
    ev = np.concatenate(eigs) if eigs else np.zeros(0, dtype=complex)
    dist = np.minimum(np.abs(ev), np.abs(ev - 1.0))
    return SpectrumReport(ev, int(ev.size), float(dist.max(initial=0.0)), defect)


def contract_chain(chain, rep: RepFamily) -> sp.csr_matrix:
    """Sum of coeff * rep(w0) rep(w1) ... rep(wk) over the chain's terms."""
    pres = chain.pres
    cache: dict = {}
    total = sp.csr_matrix((rep.dim, rep.dim), dtype=complex)
    for tw, c in chain.terms.items():
        m = sp.identity(rep.dim, dtype=complex, format="csr")
        for w in tw:
            m = m @ represent_word(w, pres, rep, cache)
        total = total + c.specialize(rep.q, rep.theta) * m
    return total.tocsr()


def contract_dennis(factors, rep: RepFamily, raw_entries=None) -> sp.csr_matrix:
    """Block trace of the product of the represented factor matrices.

    This equals contracting the un-normalized Dennis trace of ``factors``.
    ``raw_entries`` optionally replaces each factor's entries by free
    (un-normalized) polynomials.
    """
    cache: dict = {}
    n = factors[0].n
    mats = []
    for k, E in enumerate(factors):
        ents = raw_entries[k] if raw_entries is not None else E.entries
        mats.append(sp.bmat([[represent(ents[i][j], rep, cache).matrix for j in range(n)] for i in range(n)], format="csr"))
    prod = mats[0]
    for m in mats[1:]:
        prod = prod @ m
    d = rep.dim
    total = sp.csr_matrix((d, d), dtype=complex)
    for i in range(n):
        total = total + prod[i * d:(i + 1) * d, i * d:(i + 1) * d]
    return total.tocsr()
