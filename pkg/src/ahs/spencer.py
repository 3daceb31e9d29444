"""Filtration comodule, Spencer cohomology and contact order."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import gmpy2
import numpy as np

from .filtration import Filtration, membership, stabilizer_filtration
from .kernels import as_object, matmul_exact, shrink, star_batch
from .linalg import Subspace, _Echelon, common_denominator, inverse, rank
from .triples import Triple, iter_nabla, pullback, pullback_tensor


@dataclass(frozen=True, eq=False)
class Piece:
    """The quotient ``upper / lower`` with chosen complement representatives."""

    degree: int
    upper: Subspace
    lower: Subspace
    reps: np.ndarray  # integer rows in ``upper`` whose classes form the basis
    _pivots: np.ndarray = field(repr=False)
    _solve: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.reps.shape[0]

    def coords(self, v: np.ndarray, den: int = 1) -> np.ndarray:
        """Quotient coordinates (Fractions) of integer vectors ``v[..., N]``, scaled by ``1/den``."""
        q, _ = self.lower.quotient_coords(v)
        q = as_object(np.asarray(q))[..., self._pivots]
        out = q.dot(self._solve) if self.dim else np.zeros(q.shape[:-1] + (0,), dtype=object)
        return out / den if den != 1 else out


def _make_piece(degree: int, upper: Subspace, lower: Subspace) -> Piece:
    N = upper.ambient_dim
    if upper.dim == 0:
        empty = np.zeros((0, N), dtype=np.int64)
        return Piece(degree, upper, lower, empty, np.zeros(0, dtype=np.intp), np.zeros((0, 0), dtype=object))
    ub = upper.int_basis()
    images, _ = lower.quotient_coords(ub)
    ech = _Echelon(images.shape[1])
    keep = []
    for i, row in enumerate(images):
        if ech.insert({j: gmpy2.mpq(int(x)) for j, x in enumerate(row) if x}):
            keep.append(i)
    reps = ub[keep]
    piv = np.array(sorted(ech.pivots), dtype=np.intp)
    sub = images[keep][:, piv]
    solve = inverse(np.array([[int(x) for x in row] for row in sub], dtype=object))
    return Piece(degree, upper, lower, reps, piv, solve)


@dataclass(frozen=True, eq=False)
class Comodule:
    """Graded pieces ``h^r = h_{r-1}/h_r`` and the directional derivatives between them.

    ``derivatives[r][a]`` is the matrix of the derivative in direction ``e_a``
    from ``h^r`` to ``h^{r-1}`` (defined for ``r >= 1``).
    """

    n: int
    pieces: tuple[Piece, ...]
    derivatives: dict
    commutes: bool

    @property
    def dims(self) -> list[int]:
        return [p.dim for p in self.pieces]

    @property
    def top(self) -> int:
        return len(self.pieces) - 1


class CommutationError(ValueError):
    pass


def build_comodule(t: Triple, f: Filtration, strict: bool = True) -> Comodule:
    """Assemble the quotient pieces and directional derivatives of ``f``.

    With ``strict`` a failure of the derivatives to commute raises
    :class:`CommutationError`; otherwise it is only recorded.
    """
    n = t.n
    chain = [f.ambient] + [f.step(r) for r in range(0, f.singer + 1)]
    pieces = [_make_piece(r, chain[r], chain[r + 1]) for r in range(len(chain) - 1)]
    derivs: dict[int, np.ndarray] = {}
    for r in range(1, len(pieces)):
        src, dst = pieces[r], pieces[r - 1]
        out = np.empty((n, dst.dim, src.dim), dtype=object)
        if src.dim:
            reps = src.reps.reshape(src.dim, n, n)
            moved = star_batch(reps, t.A.num, 1, 2).reshape(src.dim, n, n * n)
            flat = moved.reshape(src.dim * n, n * n)
            q, _ = dst.upper.quotient_coords(flat)
            if np.any(q != 0):
                raise ValueError("ambient mismatch: a directional derivative leaves the ambient algebra")
            coords = dst.coords(flat, t.A.den).reshape(src.dim, n, dst.dim)
            out[:] = np.transpose(coords, (1, 2, 0))
        derivs[r] = out
    commutes = True
    for r in range(2, len(pieces)):
        hi, lo = derivs[r], derivs[r - 1]
        for a in range(n):
            for b in range(a + 1, n):
                if np.any(lo[a].dot(hi[b]) != lo[b].dot(hi[a])):
                    commutes = False
    if strict and not commutes:
        raise CommutationError("directional derivatives do not commute; the triple is not a member")
    return Comodule(n, tuple(pieces), derivs, commutes)


def _cochain_dim(c: Comodule, r: int, k: int) -> int:
    if r < 0 or r > c.top or k < 0 or k > c.n:
        return 0
    return comb(c.n, k) * c.pieces[r].dim


def _coboundary_int(c: Comodule, r: int, k: int) -> tuple[np.ndarray, int]:
    n = c.n
    rows = _cochain_dim(c, r - 1, k + 1)
    cols = _cochain_dim(c, r, k)
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.int64), 1
    D, den = common_denominator(c.derivatives[r])
    D = as_object(D)
    src, dst = c.pieces[r].dim, c.pieces[r - 1].dim
    out_index = {J: i for i, J in enumerate(itertools.combinations(range(n), k + 1))}
    B = np.zeros((rows, cols), dtype=object)
    for ci, I in enumerate(itertools.combinations(range(n), k)):
        for a in range(n):
            if a in I:
                continue
            J = tuple(sorted(I + (a,)))
            sign = -1 if J.index(a) % 2 else 1
            ri = out_index[J]
            B[ri * dst : (ri + 1) * dst, ci * src : (ci + 1) * src] += sign * D[a]
    return shrink(B), den


def spencer_coboundary(c: Comodule, r: int, k: int) -> np.ndarray:
    """Matrix of ``B : Lambda^k V* (x) h^r -> Lambda^{k+1} V* (x) h^{r-1}``."""
    B, den = _coboundary_int(c, r, k)
    out = np.empty(B.shape, dtype=object)
    out.flat[:] = [Fraction(int(x), den) for x in B.flat]
    return out


@dataclass(frozen=True)
class SpencerTable:
    dims: dict
    cochain_dims: dict
    ranks: dict
    top: int
    k_max: int

    def column(self, k: int) -> list[int]:
        return [self.dims[(r, k)] for r in range(self.top + 1)]


def spencer_cohomology(c: Comodule, k_max: int | None = None) -> SpencerTable:
    """Dimensions of ``H^{r,k}`` for ``0 <= r <= top`` and ``0 <= k <= k_max``."""
    n = c.n
    k_max = n if k_max is None else min(k_max, n)
    ranks = {}
    for r in range(c.top + 1):
        for k in range(0, k_max + 1):
            B, _ = _coboundary_int(c, r, k)
            ranks[(r, k)] = rank(B) if B.size else 0
    dims, cdims = {}, {}
    for r in range(c.top + 1):
        for k in range(k_max + 1):
            dim_c = _cochain_dim(c, r, k)
            incoming = ranks.get((r + 1, k - 1), 0) if k >= 1 else 0
            cdims[(r, k)] = dim_c
            dims[(r, k)] = dim_c - ranks[(r, k)] - incoming
    return SpencerTable(dims, cdims, ranks, c.top, k_max)


def coboundary_squares_vanish(c: Comodule) -> bool:
    for r in range(2, c.top + 1):
        for k in range(0, c.n):
            B1, _ = _coboundary_int(c, r, k)
            B2, _ = _coboundary_int(c, r - 1, k + 1)
            if B1.size and B2.size and np.any(matmul_exact(B2, B1) != 0):
                return False
    return True


def euler_characteristics_match(c: Comodule, table: SpencerTable) -> bool:
    """Alternating sums of cochain and cohomology dimensions agree on each anti-diagonal."""
    if table.k_max != c.n:
        raise ValueError("Euler check needs the full range of form degrees")
    for p in range(c.top + c.n + 1):
        chi_c = chi_h = 0
        for k in range(c.n + 1):
            r = p - k
            if 0 <= r <= c.top:
                chi_c += (-1) ** k * table.cochain_dims[(r, k)]
                chi_h += (-1) ** k * table.dims[(r, k)]
        if chi_c != chi_h:
            return False
    return True


def formal_tangent_dims(t: Triple, ambient: Subspace | None = None) -> list[int]:
    """``dim H^{r,1}`` for ``r = 0..singer``; empty when the filtration is trivial."""
    report = membership(t, ambient)
    if not report.verdict:
        raise ValueError(f"triple is not a member (failing: {', '.join(report.failing)})")
    c = build_comodule(t, report.filtration)
    return spencer_cohomology(c, k_max=1).column(1) if c.pieces else []


# --- contact ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContactReport:
    torsion_matches: bool
    curvature_matches: bool
    max_order: int | None  # None means every order; -1 means not even order 0
    order: int
    holds: bool
    singer: int

    @property
    def all_orders(self) -> bool:
        return self.torsion_matches and self.curvature_matches and self.max_order is None


def verify_contact(t1: Triple, t2: Triple, F, d: int) -> ContactReport:
    """Contact of ``t2`` with ``t1`` to order ``d`` through the frame change ``F``.

    R and T must pull back exactly; the connections may differ by a form
    valued in ``h_{d-1}`` of ``t1``'s filtration.
    """
    pulled = pullback(F, t2)
    t_ok = pulled.T == t1.T
    r_ok = pulled.R == t1.R
    f = stabilizer_filtration(t1)
    n = t1.n
    if not (t_ok and r_ok):
        max_order = -1
    else:
        diff = (pulled.A - t1.A).num.reshape(n, n * n)
        max_order = None
        for j, h in enumerate(f.steps):
            q, _ = h.quotient_coords(diff)
            if np.any(q != 0):
                max_order = j
                break
    holds = max_order is None or d <= max_order
    return ContactReport(t_ok, r_ok, max_order, d, holds, f.singer)


def verify_contact_defn(t1: Triple, t2: Triple, F, d: int) -> bool:
    """Pull back the covariant derivatives of R and T order by order up to ``d``."""
    for which in ("T", "R"):
        for r, (s1, s2) in enumerate(zip(iter_nabla(t1, which), iter_nabla(t2, which))):
            if r > d:
                break
            if pullback_tensor(F, s2) != s1:
                return False
    return True
