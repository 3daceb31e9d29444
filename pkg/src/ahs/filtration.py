"""Stabilizer filtrations, the Singer invariant and variety membership."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import star_batch
from .linalg import Subspace, kernel
from .report import Check, all_pass
from .tensor import Tensor
from .triples import (
    Triple,
    approximate_curvature,
    bianchi_residuals,
    circledast,
    iter_nabla,
    twisted_d,
    wedge_id,
)


@dataclass(frozen=True)
class Filtration:
    """Descending chain ``h_0 > h_1 > ... > h_s = h_inf`` inside ``ambient``.

    ``h_{-1}`` is the full endomorphism algebra, so ``singer == -1`` exactly
    when ``h_0`` is everything.
    """

    ambient: Subspace
    steps: tuple[Subspace, ...]
    singer: int

    @property
    def h_infinity(self) -> Subspace:
        return self.steps[-1]

    @property
    def dims(self) -> list[int]:
        return [h.dim for h in self.steps]

    def step(self, r: int) -> Subspace:
        if r < -1:
            raise ValueError("filtration starts at degree -1")
        if r == -1:
            return Subspace.full(self.ambient.ambient_dim)
        return self.steps[min(r, len(self.steps) - 1)]


def _singer(steps: list[Subspace], n: int) -> int:
    chain = [Subspace.full(n * n)] + steps
    for s in range(len(chain) - 1):
        if chain[s] == chain[s + 1]:
            return s - 1
    return len(steps) - 1


def _combine(coeffs: Subspace, basis: np.ndarray) -> Subspace:
    if coeffs.dim == 0:
        return Subspace.zero(basis.shape[1])
    return Subspace.span(coeffs.basis.dot(basis), basis.shape[1])


def _solve_in(sub: Subspace, images: np.ndarray) -> Subspace:
    """Elements of ``sub`` whose images (one row per basis vector) vanish."""
    basis = sub.int_basis()
    coeffs = kernel(images.reshape(sub.dim, -1).T)
    return _combine(coeffs, basis)


def stabilizer(t_tensor: Tensor, ambient: Subspace) -> Subspace:
    """``{X in ambient : X * t = 0}``."""
    if ambient.dim == 0 or t_tensor.is_zero():
        return ambient
    n = t_tensor.n
    basis = ambient.int_basis().reshape(ambient.dim, n, n)
    images = star_batch(basis, t_tensor.num, t_tensor.arity, t_tensor.value_rank)
    return _solve_in(ambient, images)


def gl(n: int) -> Subspace:
    return Subspace.full(n * n)


def h_zero(t: Triple, ambient: Subspace | None = None) -> Subspace:
    ambient = gl(t.n) if ambient is None else ambient
    return stabilizer(t.T, stabilizer(t.R, ambient))


def derived_subalgebra(h: Subspace, t: Triple, ambient: Subspace | None = None) -> Subspace:
    """``{X in h : [X, A_x] - A_{Xx} lies in h for every x}``."""
    if ambient is not None and not h.is_subspace_of(ambient):
        raise ValueError("subspace is not contained in the ambient algebra")
    if h.dim == 0 or t.A.is_zero():
        return h
    n = t.n
    basis = h.int_basis().reshape(h.dim, n, n)
    moved = star_batch(basis, t.A.num, 1, 2).reshape(h.dim, n, n * n)
    coords, _ = h.quotient_coords(moved)
    return _solve_in(h, coords)


def stabilizer_filtration(t: Triple, ambient: Subspace | None = None) -> Filtration:
    ambient = gl(t.n) if ambient is None else ambient
    steps = [h_zero(t, ambient)]
    while True:
        nxt = derived_subalgebra(steps[-1], t)
        if nxt == steps[-1]:
            break
        steps.append(nxt)
    return Filtration(ambient, tuple(steps), _singer(steps, t.n))


def joint_stabilizer_filtration(t: Triple, ambient: Subspace | None = None, r_max: int | None = None) -> Filtration:
    """Each step as the joint stabilizer of R, T and their derivatives up to order r.

    Stops before ``r_max`` (default ``n**2``) only when the chain provably
    stays constant: the stabilizer is already zero, or every further
    derivative vanishes.
    """
    ambient = gl(t.n) if ambient is None else ambient
    r_max = t.n**2 if r_max is None else r_max
    steps: list[Subspace] = []
    current = ambient
    for r, (dr, dt) in enumerate(zip(iter_nabla(t, "R"), iter_nabla(t, "T"))):
        current = stabilizer(dt, stabilizer(dr, current))
        steps.append(current)
        if r >= r_max or current.dim == 0 or (dr.is_zero() and dt.is_zero()):
            break
    while len(steps) > 1 and steps[-1] == steps[-2]:
        steps.pop()
    return Filtration(ambient, tuple(steps), _singer(steps, t.n))


# --- membership --------------------------------------------------------------------


@dataclass(frozen=True)
class MembershipReport:
    checks: tuple[Check, ...]
    filtration: Filtration | None
    verdict: bool
    ambient_name: str = "gl"
    extra: dict = field(default_factory=dict)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def failing(self) -> list[str]:
        return [c.name for c in self.checks if not c.verdict]


def _zero_check(name: str, residual: Tensor, basis: str) -> Check:
    nz = residual.nonzero_count()
    detail = "" if nz == 0 else f"first nonzero entry at {residual.first_nonzero()}"
    return Check(name, nz == 0, basis, nz, detail)


def bianchi_checks(t: Triple) -> list[Check]:
    first, second = bianchi_residuals(t)
    return [
        _zero_check("bianchi_first", first, "first Bianchi identity: d^(A,T) T = R wedge id"),
        _zero_check("bianchi_second", second, "second Bianchi identity: d^(A,T) R = 0"),
    ]


def congruence_residual(t: Triple, h: Subspace) -> tuple[int, tuple | None]:
    """Count the pairs (x, y) with (Q - R)_{x,y} outside ``h``."""
    n = t.n
    D = approximate_curvature(t) - t.R
    coords, _ = h.quotient_coords(D.num.reshape(n, n, n * n))
    bad = np.any(coords != 0, axis=2)
    idx = np.argwhere(bad)
    return int(bad.sum()), (tuple(int(i) for i in idx[0]) if len(idx) else None)


def membership(t: Triple, ambient: Subspace | None = None, ambient_name: str = "gl") -> MembershipReport:
    """Bianchi identities plus ``Q(A,T) = R`` modulo the stationary stabilizer."""
    checks = bianchi_checks(t)
    filt = stabilizer_filtration(t, ambient)
    nz, where = congruence_residual(t, filt.h_infinity)
    checks.append(
        Check(
            "q_congruence",
            nz == 0,
            "approximate curvature Q(A,T) agrees with R modulo the stationary stabilizer h_inf",
            nz,
            "" if where is None else f"(Q-R) at slot pair {where} not in h_inf",
        )
    )
    return MembershipReport(tuple(checks), filt, all_pass(checks), ambient_name)


# --- direct equations ------------------------------------------------------------------


def direct_equations(t: Triple, r_max: int | None = None) -> list[tuple[str, int, Tensor]]:
    """Residuals ``(Q - R) (*) nabla^r T`` and ``(Q - R) (*) nabla^r R`` for r <= r_max.

    Every residual is materialized; use :func:`direct_equations_verdict`
    for large orders.
    """
    r_max = t.n**2 if r_max is None else r_max
    D = approximate_curvature(t) - t.R
    out = []
    for r, (dt, dr) in enumerate(zip(iter_nabla(t, "T"), iter_nabla(t, "R"))):
        if r > r_max:
            break
        out.append(("T", r, circledast(D, dt)))
        out.append(("R", r, circledast(D, dr)))
    return out


@dataclass(frozen=True)
class DirectVerdict:
    verdict: bool
    failure: tuple[str, int] | None
    orders_checked: int
    reason: str


def _value_basis(D: Tensor) -> np.ndarray:
    """Integer basis of the span of the endomorphism values of ``D``."""
    n = D.n
    span = Subspace.span(D.num.reshape(-1, n * n), n * n)
    return span.int_basis().reshape(span.dim, n, n)


def direct_equations_verdict(t: Triple, r_max: int | None = None, include_T: bool = True) -> DirectVerdict:
    """Evaluate the direct equation families order by order, stopping early.

    ``(Q - R) (*) s = 0`` exactly when every element of the span of the
    values of ``Q - R`` kills ``s``, so only a basis of that span is applied.
    The scan ends at the first nonzero residual, or once all further
    derivatives vanish.
    """
    r_max = t.n**2 if r_max is None else r_max
    D = approximate_curvature(t) - t.R
    if D.is_zero():
        return DirectVerdict(True, None, 0, "Q - R vanishes identically")
    W = _value_basis(D)
    for r, (dt, dr) in enumerate(zip(iter_nabla(t, "T"), iter_nabla(t, "R"))):
        if r > r_max:
            return DirectVerdict(True, None, r_max + 1, f"all orders up to {r_max} vanish")
        if dt.is_zero() and dr.is_zero():
            return DirectVerdict(True, None, r, f"derivatives of order {r} and above vanish")
        pairs = (("T", dt), ("R", dr)) if include_T else (("R", dr),)
        for which, s in pairs:
            if s.is_zero():
                continue
            if np.any(star_batch(W, s.num, s.arity, s.value_rank)):
                return DirectVerdict(False, (which, r), r + 1, f"(Q-R) (*) nabla^{r} {which} is nonzero")
    raise AssertionError("unreachable")


def membership_direct(t: Triple, r_max: int | None = None) -> MembershipReport:
    """Bianchi identities plus the direct equation families; no filtration needed."""
    checks = bianchi_checks(t)
    dv = direct_equations_verdict(t, r_max)
    checks.append(
        Check(
            "direct_equations",
            dv.verdict,
            "(Q(A,T) - R) (*) nabla^r T = 0 and (Q(A,T) - R) (*) nabla^r R = 0 for every order r",
            0 if dv.verdict else 1,
            dv.reason,
        )
    )
    return MembershipReport(tuple(checks), None, all_pass(checks), "gl", {"orders_checked": dv.orders_checked})


# --- variants ---------------------------------------------------------------------------


def membership_variant(t: Triple, variant: str, ambient: Subspace | None = None, r_max: int | None = None) -> MembershipReport:
    """The specialised systems for torsion-free (T = 0) or reductive (A = 0) triples."""
    if variant in ("tf", "torsion_free"):
        if not t.T.is_zero():
            raise ValueError("torsion-free variant requires T = 0")
        checks = [
            _zero_check("wedge_id_vanishes", wedge_id(t.R), "torsion-free first Bianchi identity: R wedge id = 0"),
            _zero_check("bianchi_second", twisted_d(t, t.R), "torsion-free second Bianchi identity: d^(A,0) R = 0"),
        ]
        dv = direct_equations_verdict(t, r_max, include_T=False)
        checks.append(
            Check(
                "direct_equations_R",
                dv.verdict,
                "(Q(A,0) - R) (*) nabla^r R = 0 for every order r",
                0 if dv.verdict else 1,
                dv.reason,
            )
        )
    elif variant in ("red", "reductive"):
        if not t.A.is_zero():
            raise ValueError("reductive variant requires A = 0")
        first, second = bianchi_residuals(t)
        checks = [
            _zero_check("bianchi_first", first, "reductive first Bianchi identity: d^(0,T) T = R wedge id"),
            _zero_check("bianchi_second", second, "reductive second Bianchi identity: d^(0,T) R = 0"),
            _zero_check("r_on_t", circledast(t.R, t.T), "curvature acting on torsion: R (*) T = 0"),
            _zero_check("r_on_r", circledast(t.R, t.R), "curvature acting on itself: R (*) R = 0"),
        ]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return MembershipReport(tuple(checks), None, all_pass(checks), "gl", {"variant": variant})
