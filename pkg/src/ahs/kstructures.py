"""Triples with values in a matrix Lie algebra, and the SU(n) model structure."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .families import so_metric
from .filtration import MembershipReport, membership
from .kernels import as_object
from .linalg import Subspace, as_matrix, common_denominator, identity, inverse
from .report import Check, all_pass
from .skew import commutator_violation
from .tensor import Tensor, permutation_sign
from .triples import Triple, _contract


@dataclass(frozen=True, eq=False)
class KAlgebra:
    name: str
    subspace: Subspace
    n: int
    metric: np.ndarray | None = None

    @classmethod
    def gl(cls, n: int) -> "KAlgebra":
        return cls("gl", Subspace.full(n * n), n)

    @classmethod
    def so(cls, metric) -> "KAlgebra":
        G = as_matrix(metric)
        return cls("so", so_metric(G), G.shape[0], G)

    @classmethod
    def custom(cls, mats, n: int | None = None) -> "KAlgebra":
        mats = [as_matrix(M) for M in mats]
        if n is None:
            if not mats:
                raise ValueError("an empty custom algebra needs an explicit dimension")
            n = mats[0].shape[0]
        sub = Subspace.span([M.ravel() for M in mats], n * n) if mats else Subspace.zero(n * n)
        bad = commutator_violation(sub, n)
        if bad is not None:
            raise ValueError(f"custom algebra is not closed under the commutator (basis pair {bad})")
        return cls("custom", sub, n)

    def contains(self, M) -> bool:
        return self.subspace.contains(np.asarray(M).ravel())


def _valued_in(t_values: Tensor, k: KAlgebra) -> tuple[int, tuple | None]:
    n = t_values.n
    coords, _ = k.subspace.quotient_coords(t_values.num.reshape(-1, n * n))
    bad = np.any(coords != 0, axis=-1)
    idx = np.argwhere(bad.reshape(t_values.shape[:-2]))
    return int(bad.sum()), (tuple(int(i) for i in idx[0]) if len(idx) else None)


def membership_k(t: Triple, k: KAlgebra, filtration_ambient: str = "k") -> MembershipReport:
    """Member whose connection and curvature take values in ``k``.

    ``filtration_ambient`` selects where stabilizers are computed: inside
    ``k`` (default) or inside all of End V (``"gl"``); the report records it.
    """
    if filtration_ambient not in ("k", "gl"):
        raise ValueError("filtration_ambient must be 'k' or 'gl'")
    a_bad, a_at = _valued_in(t.A, k)
    r_bad, r_at = _valued_in(t.R, k)
    checks = [
        Check("A_valued_in_k", a_bad == 0, f"every A_x lies in the {k.name} algebra", a_bad,
              "" if a_at is None else f"A at slot {a_at} leaves the algebra"),
        Check("R_valued_in_k", r_bad == 0, f"every R_(x,y) lies in the {k.name} algebra", r_bad,
              "" if r_at is None else f"R at slots {r_at} leaves the algebra"),
    ]
    ambient = k.subspace if filtration_ambient == "k" else None
    base = membership(t, ambient, k.name if filtration_ambient == "k" else "gl")
    checks.extend(base.checks)
    return MembershipReport(tuple(checks), base.filtration, all_pass(checks), base.ambient_name,
                            {"filtration_ambient": filtration_ambient, "algebra": k.name})


# --- SU(n) ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SUStructure:
    """Metric ``g``, complex structure ``I`` and real volume form ``psi`` on Q^{2n}."""

    g: np.ndarray
    I: np.ndarray
    psi: Tensor

    @property
    def n_complex(self) -> int:
        return self.psi.arity


def model_su(n_complex: int) -> SUStructure:
    """Standard structure on ``C^n = Q^{2n}`` with basis ``x_1, y_1, x_2, y_2, ...``.

    ``I`` multiplies by i and ``psi`` is the real part of the complex
    determinant.
    """
    n = n_complex
    if n < 1:
        raise ValueError("complex dimension must be at least 1")
    dim = 2 * n
    I = np.zeros((dim, dim), dtype=object)
    I.fill(Fraction(0))
    for j in range(n):
        I[2 * j + 1, 2 * j] = Fraction(1)
        I[2 * j, 2 * j + 1] = Fraction(-1)
    psi = np.zeros((dim,) * n, dtype=np.int64)
    for idx in itertools.product(range(dim), repeat=n):
        slots = [a // 2 for a in idx]
        if sorted(slots) != list(range(n)):
            continue
        imag = sum(a % 2 for a in idx)
        if imag % 2:
            continue
        psi[idx] = permutation_sign(slots) * (1 if imag % 4 == 0 else -1)
    return SUStructure(identity(dim), I, Tensor(dim, n, "scalar", psi, 1, (tuple(range(n)),)))


def _der(psi: Tensor, In: np.ndarray, idn: int) -> Tensor:
    num = psi.num
    total = None
    for mu in range(psi.arity):
        term = _contract(num, In, mu)
        total = term if total is None else total + term
    return psi.like(total, psi.den * idn)


def verify_su_structure(s: SUStructure, n_complex: int) -> dict:
    n = n_complex
    g = as_matrix(s.g)
    I = as_matrix(s.I)
    dim = g.shape[0]
    if dim != 2 * n or I.shape != (dim, dim) or s.psi.n != dim or s.psi.arity != n:
        raise ValueError(f"dimension mismatch: expected V of dimension {2 * n} and a {n}-form")
    In, idn = common_denominator(I)
    checks = [
        Check("I_squared", bool(np.all(I.dot(I) == -identity(dim))), "I^2 = -id"),
        Check("g_hermitian", bool(np.all(I.T.dot(g).dot(I) == g)), "g(I., I.) = g"),
    ]
    der2 = _der(_der(s.psi, In, idn), In, idn)
    residual = der2 + s.psi * (n * n)
    checks.append(Check("der_squared", residual.is_zero(), "Der_I^2 psi = -n^2 psi", residual.nonzero_count()))
    gi_n, gi_d = common_denominator(inverse(g))
    raised = s.psi.num
    for mu in range(n):
        raised = _contract(raised, gi_n, mu)
    total = Fraction(int(np.sum(as_object(raised) * as_object(s.psi.num))), s.psi.den**2 * gi_d**n)
    norm = total / math.factorial(n)
    checks.append(Check("psi_norm", norm == 2 ** (n - 1), "g^-1(psi, psi) = 2^(n-1)", 0, f"norm = {norm}"))
    alt = s.psi.alternation_violation()
    checks.append(Check("psi_alternating", alt is None, "psi is an alternating n-form", 0 if alt is None else 1))
    return {"checks": checks, "norm": norm, "verdict": all_pass(checks)}

