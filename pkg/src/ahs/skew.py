"""The skew algebra End V + V twisted by curvature and torsion, and Lie pairs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .kernels import einsum_exact
from .linalg import Subspace, as_matrix, common_denominator, identity, inverse, rat_array, zeros
from .report import Check
from .tensor import Tensor
from .triples import Triple, approximate_curvature, bianchi_residuals, star_action, twisted_d, wedge_id


@dataclass(frozen=True, eq=False)
class SkewElement:
    """``endo (+) vec`` with ``endo`` in End V and ``vec`` in V."""

    endo: np.ndarray
    vec: np.ndarray

    def __post_init__(self):
        endo = as_matrix(self.endo)
        vec = rat_array(self.vec)
        n = len(vec)
        if endo.shape != (n, n):
            raise ValueError(f"endomorphism part {endo.shape} does not match vector part of length {n}")
        object.__setattr__(self, "endo", endo)
        object.__setattr__(self, "vec", vec)

    @classmethod
    def zero(cls, n: int) -> "SkewElement":
        return cls(zeros((n, n)), zeros(n))

    def __add__(self, other: "SkewElement") -> "SkewElement":
        return SkewElement(self.endo + other.endo, self.vec + other.vec)

    def __sub__(self, other: "SkewElement") -> "SkewElement":
        return SkewElement(self.endo - other.endo, self.vec - other.vec)

    def __neg__(self) -> "SkewElement":
        return SkewElement(-self.endo, -self.vec)

    def __mul__(self, c) -> "SkewElement":
        c = Fraction(c)
        return SkewElement(self.endo * c, self.vec * c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewElement):
            return NotImplemented
        return bool(np.all(self.endo == other.endo) and np.all(self.vec == other.vec))

    __hash__ = None

    def is_zero(self) -> bool:
        return not (np.any(self.endo != 0) or np.any(self.vec != 0))


def _evaluate(t: Tensor, *vectors) -> np.ndarray:
    """Insert vectors into the leading slots of ``t``."""
    out = t.to_rats()
    for v in vectors:
        out = np.tensordot(rat_array(v), out, axes=([0], [0]))
    return out


def bracket(a: SkewElement, b: SkewElement, t: Triple) -> SkewElement:
    """``([X, Y] - R_{x,y}) (+) (X y - Y x - T(x, y))``."""
    X, x, Y, y = a.endo, a.vec, b.endo, b.vec
    endo = X.dot(Y) - Y.dot(X) - _evaluate(t.R, x, y)
    vec = X.dot(y) - Y.dot(x) - _evaluate(t.T, x, y)
    return SkewElement(endo, vec)


def jacobiator(a: SkewElement, b: SkewElement, c: SkewElement, t: Triple) -> SkewElement:
    return bracket(a, bracket(b, c, t), t) + bracket(b, bracket(c, a, t), t) + bracket(c, bracket(a, b, t), t)


# --- Lie subalgebras of End V ---------------------------------------------------------


def matrices(h: Subspace, n: int) -> list[np.ndarray]:
    return [row.reshape(n, n) for row in h.basis]


def commutator_violation(h: Subspace, n: int) -> tuple[int, int] | None:
    """First basis pair whose commutator leaves ``h``, or None if closed."""
    mats = matrices(h, n)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = mats[i].dot(mats[j]) - mats[j].dot(mats[i])
            if not h.contains(c.ravel()):
                return (i, j)
    return None


@dataclass(frozen=True)
class SubalgebraReport:
    stabilizes_R: bool
    stabilizes_T: bool
    preserves_A_class: bool
    Q_minus_R_in_h: bool

    @property
    def all_true(self) -> bool:
        return self.stabilizes_R and self.stabilizes_T and self.preserves_A_class and self.Q_minus_R_in_h

    def checks(self) -> list[Check]:
        return [
            Check("stabilizes_R", self.stabilizes_R, "every element of h annihilates R"),
            Check("stabilizes_T", self.stabilizes_T, "every element of h annihilates T"),
            Check("preserves_A_class", self.preserves_A_class, "h acting on A lands in V* (x) h"),
            Check("Q_minus_R_in_h", self.Q_minus_R_in_h, "Q(A,T) - R takes values in h"),
        ]


def verify_subalgebra_conditions(h: Subspace, t: Triple) -> SubalgebraReport:
    n = t.n
    if h.ambient_dim != n * n:
        raise ValueError("subspace does not live in End V")
    if commutator_violation(h, n) is not None:
        raise ValueError("subspace is not closed under the commutator")
    mats = matrices(h, n)
    stab_r = all(star_action(X, t.R).is_zero() for X in mats)
    stab_t = all(star_action(X, t.T).is_zero() for X in mats)
    moved = [star_action(X, t.A).to_rats() for X in mats]
    pres_a = all(h.contains(m[x].ravel()) for m in moved for x in range(n))
    D = (approximate_curvature(t) - t.R).to_rats()
    q_in = all(h.contains(D[x, y].ravel()) for x in range(n) for y in range(x + 1, n))
    return SubalgebraReport(stab_r, stab_t, pres_a, q_in)


# --- Lie pairs ------------------------------------------------------------------------


class LiePairError(ValueError):
    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


@dataclass(frozen=True, eq=False)
class LiePair:
    """A Lie algebra ``g`` with subalgebra ``h``, a complement and a connection map.

    ``c[a][b][k]`` are structure constants in the basis ``E_a``; the rows of
    ``split`` are the elements of ``g`` whose classes form the frame of
    ``g/h``; ``A[a]`` is the connection map on ``E_a`` in that frame.
    """

    c: np.ndarray
    h: Subspace
    split: np.ndarray
    A: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        c = rat_array(self.c)
        N = c.shape[0]
        if c.shape != (N, N, N):
            raise LiePairError("shape", f"structure constants must be N x N x N, got {c.shape}")
        split = as_matrix(self.split)
        n = split.shape[0]
        A = rat_array(self.A)
        if split.shape != (n, N):
            raise LiePairError("shape", f"split must be n x N, got {split.shape}")
        if A.shape != (N, n, n):
            raise LiePairError("shape", f"connection map must be N x n x n, got {A.shape}")
        if self.h.ambient_dim != N:
            raise LiePairError("shape", "h does not live in g")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "split", split)
        object.__setattr__(self, "A", A)

    @property
    def dim_g(self) -> int:
        return self.c.shape[0]

    @property
    def n(self) -> int:
        return self.split.shape[0]

    def br(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        out = zeros(self.dim_g)
        vs = [(b, v[b]) for b in np.flatnonzero(v != 0)]
        for a in np.flatnonzero(u != 0):
            for b, vb in vs:
                out = out + (u[a] * vb) * self.c[a, b]
        return out

    def conn(self, u: np.ndarray) -> np.ndarray:
        return np.tensordot(u, self.A, axes=([0], [0]))

    def project(self, u: np.ndarray) -> np.ndarray:
        """Frame coordinates of the class of ``u`` in ``g/h``."""
        if "proj" not in self._cache:
            basis = np.concatenate([self.h.basis, self.split], axis=0) if self.h.dim else self.split
            try:
                self._cache["proj"] = inverse(basis)[:, self.h.dim :]
            except ValueError:
                raise LiePairError("split_complement", "split rows do not project to a basis of g/h") from None
        return u.dot(self._cache["proj"])

    def validate(self) -> None:
        """Raise :class:`LiePairError` naming the first violated invariant."""
        N, n, c = self.dim_g, self.n, self.c
        if np.any(c + np.swapaxes(c, 0, 1) != 0):
            raise LiePairError("alternating", "structure constants are not alternating")
        cn, _ = common_denominator(c)
        jac = einsum_exact("abk,kcm->abcm", cn, cn)
        jac = jac + np.einsum("bcam->abcm", jac) + np.einsum("cabm->abcm", jac)
        if np.any(jac != 0):
            bad = tuple(int(i) for i in np.argwhere(jac != 0)[0][:3])
            raise LiePairError("jacobi", f"Jacobi identity fails on basis triple {bad}")
        hb = list(self.h.basis)
        for i in range(len(hb)):
            for j in range(i + 1, len(hb)):
                if not self.h.contains(self.br(hb[i], hb[j])):
                    raise LiePairError("h_subalgebra", f"bracket of h basis elements {i}, {j} leaves h")
        if N != n + self.h.dim:
            raise LiePairError("split_complement", f"dim g = {N} but dim h + n = {self.h.dim + n}")
        self.project(np.zeros(N, dtype=object))
        for i, H in enumerate(hb):
            iso = np.stack([self.project(self.br(H, s)) for s in self.split], axis=1)
            if np.any(self.conn(H) != iso):
                raise LiePairError("isotropy", f"connection map on h basis element {i} is not the isotropy action")
            if not np.any(iso != 0):
                raise LiePairError("faithful", f"h basis element {i} acts trivially on g/h")
        if hb:
            iso_span = Subspace.span([self.conn(H).ravel() for H in hb], n * n)
            if iso_span.dim < len(hb):
                raise LiePairError("faithful", "isotropy representation is not injective")
        eye = identity(N)
        for i, H in enumerate(hb):
            AH = self.conn(H)
            for a in range(N):
                lhs = self.conn(self.br(H, eye[a]))
                Aa = self.A[a]
                if np.any(lhs != AH.dot(Aa) - Aa.dot(AH)):
                    raise LiePairError("equivariant", f"connection map is not h-equivariant at h[{i}], E_{a}")


def triple_from_lie_pair(p: LiePair) -> Triple:
    """Connection, curvature and torsion of the pair in the frame given by ``split``."""
    p.validate()
    n = p.n
    s = p.split
    Ax = np.stack([p.conn(s[i]) for i in range(n)])
    R = zeros((n, n, n, n))
    T = zeros((n, n, n))
    for x in range(n):
        for y in range(x + 1, n):
            b = p.br(s[x], s[y])
            R[x, y] = Ax[x].dot(Ax[y]) - Ax[y].dot(Ax[x]) - p.conn(b)
            R[y, x] = -R[x, y]
            T[x, y] = Ax[x][:, y] - Ax[y][:, x] - p.project(b)
            T[y, x] = -T[x, y]
    return Triple.from_rats(Ax, R, T)


def _coordinates(el: SkewElement, h: Subspace, t: Triple) -> np.ndarray:
    """Coordinates of ``el`` in the basis (h basis, A_{e_i} (+) e_i)."""
    n = t.n
    A = t.A.to_rats()
    rest = el.endo - np.tensordot(el.vec, A, axes=([0], [0]))
    flat = rest.ravel()
    coeffs = np.array([flat[p] for p in h.pivots], dtype=object)
    if h.dim:
        recon = coeffs.dot(h.basis)
    else:
        recon = zeros(n * n)
    if np.any(recon != flat):
        raise ValueError("closure failure: bracket leaves h + span{A_x (+) x}")
    return np.concatenate([coeffs, el.vec])


def assemble_g(h: Subspace, t: Triple) -> LiePair:
    """The Lie algebra spanned by ``h`` and the elements ``A_x (+) x``."""
    n = t.n
    A = t.A.to_rats()
    basis = [SkewElement(M, zeros(n)) for M in matrices(h, n)]
    basis += [SkewElement(A[i], identity(n)[i]) for i in range(n)]
    N = len(basis)
    c = zeros((N, N, N))
    for a in range(N):
        for b in range(a + 1, N):
            coords = _coordinates(bracket(basis[a], basis[b], t), h, t)
            c[a, b] = coords
            c[b, a] = -coords
    hsub = Subspace.span(identity(N)[: h.dim], N) if h.dim else Subspace.zero(N)
    split = identity(N)[h.dim :]
    conn = np.stack([el.endo for el in basis]) if N else zeros((0, n, n))
    pair = LiePair(c, hsub, split, conn)
    pair.validate()
    return pair


def jacobiator_closed_endo_vec_vec(X, y, z, t: Triple) -> SkewElement:
    """Closed form of ``Jac(X (+) 0, 0 (+) y, 0 (+) z)``."""
    endo = -_evaluate(star_action(X, t.R), y, z)
    vec = -_evaluate(star_action(X, t.T), y, z)
    return SkewElement(endo, vec)


def jacobiator_closed_vec3(x, y, z, t: Triple) -> SkewElement:
    """Closed form of ``Jac(0 (+) x, 0 (+) y, 0 (+) z)`` via the A = 0 derivative."""
    flat = Triple(Tensor.zeros(t.n, 1, "endo"), t.R, t.T)
    endo = -_evaluate(twisted_d(flat, t.R), x, y, z)
    vec = _evaluate(wedge_id(t.R) - twisted_d(flat, t.T), x, y, z)
    return SkewElement(endo, vec)


def bianchi_ok(t: Triple) -> bool:
    first, second = bianchi_residuals(t)
    return first.is_zero() and second.is_zero()
