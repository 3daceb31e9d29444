"""Connection, curvature and torsion data and the operations built on them.

Index conventions: ``A[a][i][j]`` is component ``i`` of ``A_{e_a}(e_j)``;
``R[a][b][i][j]`` likewise for ``R_{e_a, e_b}``; ``T[a][b][i]`` is component
``i`` of ``T(e_a, e_b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .kernels import einsum_exact, max_abs, promote, star_batch
from .linalg import as_matrix, common_denominator, inverse, to_rat
from .tensor import Tensor


@dataclass(frozen=True, eq=False)
class Triple:
    A: Tensor
    R: Tensor
    T: Tensor

    def __post_init__(self):
        n = self.A.n
        for name, t, arity, kind in (("A", self.A, 1, "endo"), ("R", self.R, 2, "endo"), ("T", self.T, 2, "vector")):
            if (t.n, t.arity, t.kind) != (n, arity, kind):
                raise ValueError(f"{name} has signature {(t.n, t.arity, t.kind)}, expected {(n, arity, kind)}")
        for name, t in (("R", self.R), ("T", self.T)):
            bad = t.alternation_violation((0, 1))
            if bad is not None:
                raise ValueError(f"{name} is not alternating in its two slots at index {bad}")
        if self.R.alternating != ((0, 1),):
            object.__setattr__(self, "R", self.R.like(self.R.num, self.R.den, ((0, 1),)))
        if self.T.alternating != ((0, 1),):
            object.__setattr__(self, "T", self.T.like(self.T.num, self.T.den, ((0, 1),)))

    @property
    def n(self) -> int:
        return self.A.n

    @classmethod
    def zero(cls, n: int) -> "Triple":
        return cls(Tensor.zeros(n, 1, "endo"), Tensor.zeros(n, 2, "endo"), Tensor.zeros(n, 2, "vector"))

    @classmethod
    def from_rats(cls, A, R, T) -> "Triple":
        n = len(A)
        return cls(
            Tensor.from_rats(n, 1, "endo", A),
            Tensor.from_rats(n, 2, "endo", R, ((0, 1),)),
            Tensor.from_rats(n, 2, "vector", T, ((0, 1),)),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Triple):
            return NotImplemented
        return self.A == other.A and self.R == other.R and self.T == other.T

    __hash__ = None

    def connection_matrix(self, a: int) -> np.ndarray:
        return self.A.to_rats()[a]

    def is_torsion_free(self) -> bool:
        return self.T.is_zero()

    def is_reductive(self) -> bool:
        return self.A.is_zero()


def _endo(X) -> tuple[np.ndarray, int]:
    if isinstance(X, Tensor):
        return X.num, X.den
    return common_denominator(as_matrix(X))


def star_action(X, t: Tensor) -> Tensor:
    """Action of the endomorphism ``X`` on the tensor ``t``."""
    xn, xd = _endo(X)
    out = star_batch(xn[None], t.num, t.arity, t.value_rank)[0]
    return t.like(out, xd * t.den)


def circledast(Q: Tensor, s: Tensor) -> Tensor:
    """Feed the endomorphism values of ``Q`` through the action on ``s``.

    The result has the slots of ``Q`` followed by the slots of ``s``.
    """
    if Q.kind != "endo":
        raise ValueError("circledast needs an endomorphism-valued left operand")
    n, d = Q.n, Q.arity
    batch = Q.num.reshape(n**d, n, n)
    out = star_batch(batch, s.num, s.arity, s.value_rank).reshape((n,) * d + s.shape)
    alt = Q.alternating + tuple(tuple(i + d for i in g) for g in s.alternating)
    return Tensor(n, d + s.arity, s.kind, out, Q.den * s.den, alt)


def _base(t: Triple, which: str) -> Tensor:
    if which not in ("R", "T"):
        raise ValueError(f"which must be 'R' or 'T', got {which!r}")
    return t.R if which == "R" else t.T


def iter_nabla(t: Triple, which: str) -> Iterator[Tensor]:
    """Yield the iterated covariant derivatives of R or T, starting at order 0."""
    s = _base(t, which)
    while True:
        yield s
        s = circledast(t.A, s)


def nabla_r(t: Triple, which: str, r: int) -> Tensor:
    if r < 0:
        raise ValueError("order must be non-negative")
    for k, s in enumerate(iter_nabla(t, which)):
        if k == r:
            return s


def _signed_sum(terms: list[tuple[int, np.ndarray]]) -> np.ndarray:
    bound = sum(max_abs(a) for _, a in terms)
    arrays = promote(bound, *(a for _, a in terms))
    out = arrays[0] * terms[0][0]
    for (sign, _), a in zip(terms[1:], arrays[1:]):
        out = out + a if sign > 0 else out - a
    return out


def twisted_d(t: Triple, omega: Tensor) -> Tensor:
    """Exterior derivative of an alternating form, twisted by A and T."""
    bad = omega.alternation_violation()
    if bad is not None:
        raise ValueError(f"form is not alternating at index {bad}")
    r = omega.arity
    full = (tuple(range(r + 1)),)
    S = circledast(t.A, omega)
    first = _signed_sum([((-1) ** mu, np.moveaxis(S.num, 0, mu)) for mu in range(r + 1)])
    out = Tensor(t.n, r + 1, omega.kind, first, S.den, full)
    if r >= 1:
        tn, on = promote(max_abs(t.T.num) * max_abs(omega.num) * t.n, t.T.num, omega.num)
        U = np.tensordot(tn, on, axes=([2], [0]))
        terms = []
        for mu in range(r + 1):
            for nu in range(mu + 1, r + 1):
                terms.append(((-1) ** (mu + nu - 1), np.moveaxis(U, [0, 1], [mu, nu])))
        out = out + Tensor(t.n, r + 1, omega.kind, _signed_sum(terms), t.T.den * omega.den, full)
    return out


def wedge_id(R: Tensor) -> Tensor:
    """The vector-valued 3-form ``R_{x,y} z + R_{y,z} x + R_{z,x} y``."""
    W = np.einsum("abij->abji", R.num)
    total = _signed_sum([(1, W), (1, np.einsum("bcai->abci", W)), (1, np.einsum("cabi->abci", W))])
    return Tensor(R.n, 3, "vector", total, R.den, ((0, 1, 2),))


def approximate_curvature(t: Triple) -> Tensor:
    """``[A_x, A_y] - A_{A_x y - A_y x - T(x, y)}``."""
    A, T = t.A, t.T
    prod = einsum_exact("xik,ykj->xyij", A.num, A.num)
    comm = Tensor(t.n, 2, "endo", _signed_sum([(1, prod), (-1, np.swapaxes(prod, 0, 1))]), A.den**2)
    ev = np.einsum("xiy->xyi", A.num)
    an, tn = promote((2 * max_abs(A.num) + 1) * (max_abs(T.num) + 1) * T.den * A.den, ev, T.num)
    C = (an - np.swapaxes(an, 0, 1)) * T.den - tn * A.den
    AC = einsum_exact("xyk,kij->xyij", C, A.num)
    Q = comm - Tensor(t.n, 2, "endo", AC, A.den**2 * T.den)
    return Q.like(Q.num, Q.den, ((0, 1),))


def bianchi_residuals(t: Triple) -> tuple[Tensor, Tensor]:
    """Residuals of the first and second Bianchi identities."""
    first = twisted_d(t, t.T) - wedge_id(t.R)
    second = twisted_d(t, t.R)
    return first, second


def ricci(t: Triple) -> np.ndarray:
    """Bilinear form ``Ric[j][i] = sum_a (R_{e_a, e_j} e_i)_a``."""
    tr = np.einsum("ajai->ji", t.R.num)
    out = np.empty(tr.shape, dtype=object)
    out.flat[:] = [Fraction(int(x), t.R.den) for x in tr.flat]
    return out


def scale_by(t: Triple, c) -> Triple:
    """``(c A, c^2 R, c T)`` for a nonzero rational ``c``."""
    c = to_rat(c)
    if c == 0:
        raise ValueError("scale factor must be nonzero")
    return Triple(t.A * c, t.R * (c * c), t.T * c)


def scale(t: Triple, lambda_exp: int) -> Triple:
    """Scale by the factor ``2**lambda_exp``."""
    return scale_by(t, Fraction(2) ** int(lambda_exp))


def _contract(arr: np.ndarray, M: np.ndarray, axis: int) -> np.ndarray:
    """``out[.., a, ..] = sum_b M[b, a] arr[.., b, ..]`` on ``axis``."""
    arr, M = promote(max_abs(arr) * max_abs(M) * M.shape[0], arr, M)
    return np.moveaxis(np.tensordot(arr, M, axes=([axis], [0])), -1, axis)


def pullback_tensor(F, s: Tensor) -> Tensor:
    """Pull ``s`` back along the linear isomorphism ``F``."""
    F = as_matrix(F)
    fn, fd = common_denominator(F)
    gn, gd = common_denominator(inverse(F))
    num, den = s.num, s.den
    for mu in range(s.arity):
        num = _contract(num, fn, mu)
        den *= fd
    if s.kind == "vector":
        num = _contract(num, gn.T, num.ndim - 1)
        den *= gd
    elif s.kind == "endo":
        num = _contract(num, gn.T, num.ndim - 2)
        num = _contract(num, fn, num.ndim - 1)
        den *= gd * fd
    return s.like(num, den)


def pullback(F, t: Triple) -> Triple:
    """``(F^-1 A_{Fx} F, F^-1 R_{Fx,Fy} F, F^-1 T(Fx, Fy))``."""
    return Triple(pullback_tensor(F, t.A), pullback_tensor(F, t.R), pullback_tensor(F, t.T))


def torsion_free_projection(t: Triple) -> Triple:
    """Drop the torsion by shifting the connection by half of it."""
    T, A = t.T, t.A
    n = t.n
    t_end = Tensor(n, 1, "endo", np.einsum("xyi->xiy", T.num), T.den)
    new_a = A - t_end * Fraction(1, 2)
    S = circledast(A, T)
    E = np.einsum("xyzi->xyiz", S.num)
    dA_T = Tensor(n, 2, "endo", _signed_sum([(1, E), (-1, np.swapaxes(E, 0, 1))]), S.den)
    prod = einsum_exact("xik,ykj->xyij", t_end.num, t_end.num)
    comm = Tensor(n, 2, "endo", _signed_sum([(1, prod), (-1, np.swapaxes(prod, 0, 1))]), T.den**2)
    ins = Tensor(n, 2, "endo", einsum_exact("xyk,kij->xyij", T.num, t_end.num), T.den**2)
    new_r = t.R - dA_T * Fraction(1, 2) + (comm - ins * 2) * Fraction(1, 4)
    return Triple(new_a, new_r, Tensor.zeros(n, 2, "vector", ((0, 1),)))
