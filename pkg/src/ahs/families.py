"""Concrete families of triples: the solvable tridiagonal family, constant
curvature spaces, and seeded random generators for property suites."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .linalg import Subspace, distinct_eigenvalue_count, identity, to_rat, wedge_to_endo, zeros
from .skew import LiePair, triple_from_lie_pair
from .tensor import Tensor
from .triples import Triple, pullback, ricci


@dataclass(frozen=True)
class MeusersParams:
    """Dimension ``m`` and parameters ``f_1..f_m`` of the tridiagonal family."""

    m: int
    f: tuple[Fraction, ...]

    def __post_init__(self):
        f = tuple(to_rat(x) for x in self.f)
        object.__setattr__(self, "f", f)
        if self.m < 4:
            raise ValueError(f"dimension must be at least 4, got {self.m}")
        if len(f) != self.m:
            raise ValueError(f"expected {self.m} parameters, got {len(f)}")
        if f[0] == f[1]:
            raise ValueError("f1 must differ from f2")
        for j in range(2, self.m):
            if f[j] == 0:
                raise ValueError(f"f{j + 1} must be nonzero")

    @classmethod
    def default(cls, m: int) -> "MeusersParams":
        return cls(m, (1, 0) + (1,) * (m - 2))


def special_endomorphism(p: MeusersParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``F`` on the (m-1)-dimensional complement and its symmetric and skew parts."""
    k = p.m - 1
    F = zeros((k, k))
    F[0, 0] = p.f[0]
    for i in range(1, k):
        F[i, i] = p.f[1]
        F[i - 1, i] = -p.f[i + 1]
        F[i, i - 1] = p.f[i + 1]
    Fp = (F + F.T) / 2
    Fm = (F - F.T) / 2
    return F, Fp, Fm


def _embed(M: np.ndarray) -> np.ndarray:
    k = M.shape[0]
    out = zeros((k + 1, k + 1))
    out[1:, 1:] = M
    return out


def _unit(m: int, i: int) -> np.ndarray:
    return identity(m)[i]


def meusers_connection(p: MeusersParams) -> np.ndarray:
    """``A_{x (+) X} = (F_+ X) wedge 1 + x F_-`` as an array ``A[a][i][j]``."""
    m = p.m
    _, Fp, Fm = special_endomorphism(p)
    Fp_e, Fm_e = _embed(Fp), _embed(Fm)
    g = identity(m)
    one = _unit(m, 0)
    A = zeros((m, m, m))
    A[0] = Fm_e
    for a in range(1, m):
        A[a] = wedge_to_endo(Fp_e.dot(_unit(m, a)), one, g)
    return A


def meusers_curvature(p: MeusersParams) -> np.ndarray:
    """Curvature from its closed form in terms of ``F_+`` and ``F_-``."""
    m = p.m
    _, Fp, Fm = special_endomorphism(p)
    Fp_e = _embed(Fp)
    P = _embed(Fp.dot(Fp) + Fp.dot(Fm) - Fm.dot(Fp))
    g = identity(m)
    one = _unit(m, 0)
    R = zeros((m, m, m, m))
    for a in range(m):
        for b in range(m):
            xa, xb = (a == 0), (b == 0)
            Xa = zeros(m) if xa else _unit(m, a)
            Xb = zeros(m) if xb else _unit(m, b)
            val = wedge_to_endo(Fp_e.dot(Xa), Fp_e.dot(Xb), g)
            if xa:
                val = val - wedge_to_endo(P.dot(Xb), one, g)
            if xb:
                val = val + wedge_to_endo(P.dot(Xa), one, g)
            R[a, b] = val
    return R


def meusers_lie_pair(p: MeusersParams) -> LiePair:
    """The solvable algebra ``[x (+) X, y (+) Y] = 0 (+) (x F Y - y F X)`` with trivial isotropy."""
    m = p.m
    F, _, _ = special_endomorphism(p)
    F_e = _embed(F)
    c = zeros((m, m, m))
    for b in range(1, m):
        c[0, b] = F_e.dot(_unit(m, b))
        c[b, 0] = -c[0, b]
    return LiePair(c, Subspace.zero(m), identity(m), meusers_connection(p))


def meusers_triple(p: MeusersParams) -> tuple[Triple, LiePair]:
    """Build the triple directly and through its Lie algebra; both must agree."""
    m = p.m
    direct = Triple(
        Tensor.from_rats(m, 1, "endo", meusers_connection(p)),
        Tensor.from_rats(m, 2, "endo", meusers_curvature(p), ((0, 1),)),
        Tensor.zeros(m, 2, "vector", ((0, 1),)),
    )
    pair = meusers_lie_pair(p)
    via_pair = triple_from_lie_pair(pair)
    if via_pair != direct:
        raise RuntimeError("closed-form triple disagrees with the Lie algebra construction")
    return direct, pair


def meusers_ricci_closed_form(p: MeusersParams) -> np.ndarray:
    """``-(tr(F_+^2) y (+) ([F_+, F_-] + tr(F_+) F_+) Y)`` as a matrix."""
    _, Fp, Fm = special_endomorphism(p)
    k = p.m - 1
    out = zeros((p.m, p.m))
    out[0, 0] = -np.trace(Fp.dot(Fp))
    out[1:, 1:] = -(Fp.dot(Fm) - Fm.dot(Fp) + np.trace(Fp) * Fp)
    assert out.shape == (k + 1, k + 1)
    return out


def so_span(indices, m: int) -> Subspace:
    """Span of ``e_i wedge e_j`` for ``i < j`` in ``indices`` (0-based) inside End Q^m."""
    g = identity(m)
    idx = sorted(indices)
    vecs = [wedge_to_endo(g[i], g[j], g).ravel() for a, i in enumerate(idx) for j in idx[a + 1 :]]
    return Subspace.span(vecs, m * m) if vecs else Subspace.zero(m * m)


def so_metric(metric) -> Subspace:
    """The Lie algebra of endomorphisms skew with respect to ``metric``."""
    from .linalg import as_matrix, kernel

    G = as_matrix(metric)
    n = G.shape[0]
    if not np.all(G == G.T):
        raise ValueError("metric is not symmetric")
    rows = []
    for i in range(n):
        for j in range(n):
            # entry (i, j) of X^T G + G X as a linear form in X
            row = zeros(n * n)
            for k in range(n):
                row[k * n + i] += G[k, j]
                row[j + k * n] += G[i, k]
            rows.append(row)
    return kernel(np.array(rows, dtype=object))


def meusers_filtration_prediction(p: MeusersParams) -> list[Subspace]:
    """``h_r = so{e_{r+4}, ..., e_m}`` for ``r = 0..m-4`` (basis labels from 1)."""
    return [so_span(range(r + 3, p.m), p.m) for r in range(p.m - 3)]


def meusers_predictions(p: MeusersParams) -> dict:
    """Closed-form filtration dimensions, Singer invariant and Spencer column."""
    triple, _ = meusers_triple(p)
    distinct = distinct_eigenvalue_count(ricci(triple))
    if distinct != 4:
        raise ValueError(f"non-generic parameters: Ricci has {distinct} distinct eigenvalues, need 4")
    m = p.m
    return {
        "filtration_dims": [comb(m - 3 - r, 2) for r in range(m - 3)],
        "singer": m - 4,
        "spencer_k1_dims": {r: 1 for r in range(1, m - 3)},
        "ricci_charpoly_distinct_count": distinct,
    }


def constant_curvature_triple(n: int, kappa=1) -> Triple:
    """``A = 0``, ``T = 0``, ``R_{x,y} = kappa x wedge y`` for the standard metric."""
    if n < 2:
        raise ValueError("dimension must be at least 2")
    kappa = to_rat(kappa)
    g = identity(n)
    R = zeros((n, n, n, n))
    for a in range(n):
        for b in range(n):
            R[a, b] = kappa * wedge_to_endo(g[a], g[b], g)
    return Triple(Tensor.zeros(n, 1, "endo"), Tensor.from_rats(n, 2, "endo", R, ((0, 1),)), Tensor.zeros(n, 2, "vector"))


# --- random generators --------------------------------------------------------------


def _rand_rat(rng: np.random.Generator, lo: int = -3, hi: int = 3, dens=(1, 1, 1, 2)) -> Fraction:
    return Fraction(int(rng.integers(lo, hi + 1)), int(rng.choice(dens)))


def random_matrix(rng: np.random.Generator, n: int, density: float = 1.0) -> np.ndarray:
    out = zeros((n, n))
    for i in range(n):
        for j in range(n):
            if rng.random() < density:
                out[i, j] = _rand_rat(rng)
    return out


def random_invertible(rng: np.random.Generator, n: int) -> np.ndarray:
    """Unipotent-times-permutation-times-diagonal, so always invertible."""
    L = identity(n)
    U = identity(n)
    for i in range(n):
        for j in range(n):
            if i > j:
                L[i, j] = _rand_rat(rng, -2, 2)
            elif i < j:
                U[i, j] = _rand_rat(rng, -2, 2)
    D = identity(n)
    for i in range(n):
        D[i, i] = Fraction(int(rng.choice([-2, -1, 1, 2])), int(rng.choice([1, 2])))
    P = identity(n)[rng.permutation(n)]
    return L.dot(P).dot(D).dot(U)


def random_unimodular(rng: np.random.Generator, n: int) -> np.ndarray:
    """Integer matrix of determinant +-1 with small entries; keeps pullbacks in machine integers."""
    L = identity(n)
    U = identity(n)
    for i in range(n):
        for j in range(n):
            if i > j:
                L[i, j] = Fraction(int(rng.integers(-1, 2)))
            elif i < j:
                U[i, j] = Fraction(int(rng.integers(-1, 2)))
    P = identity(n)[rng.permutation(n)]
    return L.dot(P).dot(U)


def random_triple(rng: np.random.Generator, n: int, density: float = 0.5) -> Triple:
    """Arbitrary triple with sparse random entries; generally not a member."""
    A = zeros((n, n, n))
    R = zeros((n, n, n, n))
    T = zeros((n, n, n))
    for a in range(n):
        A[a] = random_matrix(rng, n, density)
    for a in range(n):
        for b in range(a + 1, n):
            R[a, b] = random_matrix(rng, n, density / 2)
            R[b, a] = -R[a, b]
            for i in range(n):
                if rng.random() < density / 2:
                    T[a, b, i] = _rand_rat(rng)
                    T[b, a, i] = -T[a, b, i]
    return Triple.from_rats(A, R, T)


def random_lie_algebra_triple(rng: np.random.Generator, n: int) -> Triple:
    """Triple of a Lie algebra with trivial isotropy and a random connection map.

    Only the Lie algebras whose Jacobi identity holds by construction are
    used: abelian, ``[e_0, e_i] = M e_i`` for a random matrix M on the rest,
    and the Heisenberg algebra when ``n == 3``.
    """
    kind = int(rng.integers(0, 3 if n == 3 else 2))
    c = zeros((n, n, n))
    if kind == 1:
        M = random_matrix(rng, n - 1, 0.6)
        for b in range(1, n):
            c[0, b, 1:] = M[:, b - 1]
            c[b, 0] = -c[0, b]
    elif kind == 2:
        c[1, 2, 0] = Fraction(1)
        c[2, 1, 0] = Fraction(-1)
    A = np.stack([random_matrix(rng, n, 0.4) for _ in range(n)])
    return triple_from_lie_pair(LiePair(c, Subspace.zero(n), identity(n), A))


def resplit_constant_curvature(rng: np.random.Generator, n: int, kappa=1) -> Triple:
    """Constant-curvature space seen through a shifted split.

    Choosing the complement ``e_i + H_i`` with ``H_i`` in the isotropy
    algebra so(n) keeps R and T but moves the connection to ``A_x = H_x``.
    The result is a member whose ``Q - R`` is nonzero yet lies in so(n).
    """
    base = constant_curvature_triple(n, kappa)
    g = identity(n)
    shift = zeros((n, n, n))
    for a in range(n):
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.5:
                    shift[a] = shift[a] + _rand_rat(rng) * wedge_to_endo(g[i], g[j], g)
    return Triple(Tensor.from_rats(n, 1, "endo", shift), base.R, base.T)


def random_member(rng: np.random.Generator, n: int) -> Triple:
    """A member drawn from one of the exactly solvable constructions, in a random frame."""
    choice = int(rng.integers(0, 3))
    if choice == 0:
        t = random_lie_algebra_triple(rng, n)
    elif choice == 1:
        t = constant_curvature_triple(n, _rand_rat(rng, 1, 3))
    else:
        t = resplit_constant_curvature(rng, n, _rand_rat(rng, 1, 3))
    return pullback(random_invertible(rng, n), t)
