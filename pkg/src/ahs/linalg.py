"""Exact linear algebra over the rationals.

Public scalars are :class:`fractions.Fraction`; matrices are 2-d numpy object
arrays of Fractions. Elimination runs on sparse dict rows of ``gmpy2.mpq``,
which is an order of magnitude faster than Fraction for the same exact
arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Sequence

import gmpy2
import numpy as np

from .kernels import matmul_exact, shrink

Rat = Fraction


# --- scalars -----------------------------------------------------------------


def to_rat(x) -> Fraction:
    """Convert an int, Fraction, mpq or ``"p/q"`` string to a Fraction.

    Floats are refused: every input must already be exact.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, Rational) or type(x).__name__ == "mpq":
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"not an exact rational: {x!r}")


def rat_to_json(x: Fraction) -> int | str:
    x = to_rat(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _mpq(x) -> gmpy2.mpq:
    x = to_rat(x)
    return gmpy2.mpq(x.numerator, x.denominator)


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


# --- arrays --------------------------------------------------------------------


def rat_array(data, shape: tuple[int, ...] | None = None) -> np.ndarray:
    """Build an object array of Fractions from nested lists or an array."""
    arr = np.asarray(data, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    out.flat[:] = [to_rat(x) for x in arr.flat]
    if shape is not None and out.shape != tuple(shape):
        raise ValueError(f"expected shape {tuple(shape)}, got {out.shape}")
    return out


def as_matrix(data) -> np.ndarray:
    m = rat_array(data)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got an array of rank {m.ndim}")
    return m


def identity(n: int) -> np.ndarray:
    m = zeros((n, n))
    for i in range(n):
        m[i, i] = Fraction(1)
    return m


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def common_denominator(arr: np.ndarray) -> tuple[np.ndarray, int]:
    """Split a Fraction array into integer numerators and one denominator."""
    den = 1
    for x in arr.flat:
        d = to_rat(x).denominator
        if den % d:
            den = den * d // math.gcd(den, d)
    num = np.empty(arr.shape, dtype=object)
    num.flat[:] = [int(to_rat(x) * den) for x in arr.flat]
    return shrink(num), den


def _primitive_rows(arr: np.ndarray) -> np.ndarray:
    """Scale each row of a Fraction matrix to integers (kernel-preserving)."""
    out = np.empty(arr.shape, dtype=object)
    for i, row in enumerate(arr):
        _, den = common_denominator(row)
        out[i] = [int(to_rat(x) * den) for x in row]
    return shrink(out)


# --- elimination -------------------------------------------------------------


class _Echelon:
    """Incrementally maintained reduced row echelon form."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, gmpy2.mpq]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict) -> dict:
        row = dict(row)
        for c in [c for c in row if c in self.pivots]:
            f = row.pop(c)
            for k, v in self.pivots[c].items():
                if k == c:
                    continue
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return row

    def insert(self, row: dict) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        p = min(row)
        inv = 1 / row[p]
        row = {k: v * inv for k, v in row.items()}
        for prow in self.pivots.values():
            f = prow.get(p)
            if f:
                for k, v in row.items():
                    nv = prow.get(k, 0) - f * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        self.pivots[p] = row
        return True

    def rows(self) -> list[dict]:
        return [self.pivots[p] for p in sorted(self.pivots)]

    def kernel_vectors(self) -> list[dict]:
        free = [c for c in range(self.ncols) if c not in self.pivots]
        vecs = []
        for f in free:
            v = {f: gmpy2.mpq(1)}
            for p, row in self.pivots.items():
                x = row.get(f)
                if x:
                    v[p] = -x
            vecs.append(v)
        return vecs


def _sparse_rows(m: np.ndarray) -> list[dict]:
    rows = []
    for row in m:
        d = {j: _mpq(x) for j, x in enumerate(row) if x != 0}
        rows.append(d)
    return rows


def _dense(rows: Sequence[dict], ncols: int) -> np.ndarray:
    out = zeros((len(rows), ncols))
    for i, row in enumerate(rows):
        for j, v in row.items():
            out[i, j] = _frac(v)
    return out


def rref(m) -> tuple[np.ndarray, int]:
    """Reduced row echelon form and rank, padded with zero rows to m's shape."""
    m = as_matrix(m) if not isinstance(m, np.ndarray) or m.dtype != object else m
    nrows, ncols = m.shape
    ech = _Echelon(ncols)
    for row in _sparse_rows(m):
        ech.insert(row)
    out = zeros((nrows, ncols))
    red = _dense(ech.rows(), ncols)
    out[: red.shape[0]] = red
    return out, ech.rank


def _unique_nonzero_rows(m: np.ndarray) -> np.ndarray:
    if m.size == 0:
        return m.reshape(0, m.shape[1] if m.ndim == 2 else 0)
    m = m[np.any(m != 0, axis=1)]
    if len(m) == 0:
        return m
    if len(m) > 200_000:
        return m
    if m.dtype == object:
        seen = dict.fromkeys(tuple(int(x) for x in row) for row in m)
        out = np.empty((len(seen), m.shape[1]), dtype=object)
        for i, key in enumerate(seen):
            out[i] = key
        return out
    return np.unique(m, axis=0)


def _kernel_dicts(m: np.ndarray) -> list[dict]:
    """Kernel of an integer matrix ``m`` (rows are equations).

    Only a subset of the equations is eliminated at first; the candidate
    kernel is then checked against every equation with one integer matmul,
    and violated equations are folded in until the check passes.
    """
    ncols = m.shape[1]
    rows = _unique_nonzero_rows(m)
    ech = _Echelon(ncols)
    if len(rows) == 0:
        return ech.kernel_vectors()
    first = min(len(rows), 2 * ncols + 8)
    for row in rows[:first]:
        ech.insert({j: gmpy2.mpq(int(x)) for j, x in enumerate(row) if x})
    if first == len(rows):
        return ech.kernel_vectors()
    while True:
        vecs = ech.kernel_vectors()
        if not vecs:
            return vecs
        kint = np.empty((len(vecs), ncols), dtype=object)
        kint.fill(0)
        for i, v in enumerate(vecs):
            den = 1
            for x in v.values():
                den = math.lcm(den, int(x.denominator))
            for j, x in v.items():
                kint[i, j] = int(x * den)
        res = matmul_exact(rows, shrink(kint).T)
        bad = np.nonzero(np.any(res != 0, axis=1))[0]
        if len(bad) == 0:
            return vecs
        for i in bad[: 2 * len(vecs)]:
            ech.insert({j: gmpy2.mpq(int(x)) for j, x in enumerate(rows[i]) if x})


def _as_equations(m) -> np.ndarray:
    if isinstance(m, np.ndarray) and m.dtype != object:
        return m
    m = m if isinstance(m, np.ndarray) else as_matrix(m)
    if m.size and isinstance(next(iter(m.flat)), Fraction):
        return _primitive_rows(m)
    return shrink(m)


def kernel(m) -> "Subspace":
    """Null space ``{v : m v = 0}``; accepts Fraction or integer matrices."""
    eq = _as_equations(m)
    ncols = eq.shape[1]
    return Subspace._from_dicts(_kernel_dicts(eq), ncols)


def rank(m) -> int:
    eq = _as_equations(m)
    return eq.shape[1] - len(_kernel_dicts(eq))


def inverse(m) -> np.ndarray:
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    aug = np.concatenate([m, identity(n)], axis=1)
    red, _ = rref(aug)
    if any(red[i, i] != 1 for i in range(n)):
        raise ValueError("matrix is singular")
    return red[:, n:]


# --- subspaces -------------------------------------------------------------------


class Subspace:
    """A linear subspace of Q^N held by its reduced row echelon basis."""

    __slots__ = ("ambient_dim", "basis", "pivots", "_quot")

    def __init__(self, ambient_dim: int, basis: np.ndarray):
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = tuple(int(np.nonzero(row != 0)[0][0]) for row in basis)
        self._quot = None

    @classmethod
    def _from_dicts(cls, rows: Iterable[dict], ambient_dim: int) -> "Subspace":
        ech = _Echelon(ambient_dim)
        for row in rows:
            ech.insert(row)
        return cls(ambient_dim, _dense(ech.rows(), ambient_dim))

    @classmethod
    def span(cls, vectors, ambient_dim: int) -> "Subspace":
        vectors = list(vectors)
        rows = []
        for v in vectors:
            v = np.asarray(v, dtype=object).ravel()
            if len(v) != ambient_dim:
                raise ValueError(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
            rows.append({j: _mpq(x) for j, x in enumerate(v) if x != 0})
        return cls._from_dicts(rows, ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, identity(ambient_dim))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, zeros((0, ambient_dim)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.basis.shape == other.basis.shape
            and bool(np.all(self.basis == other.basis))
        )

    def __hash__(self):
        return hash((self.ambient_dim, tuple(self.basis.flat)))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"

    def int_basis(self) -> np.ndarray:
        """Basis rows scaled to primitive integer vectors."""
        if self.dim == 0:
            return np.zeros((0, self.ambient_dim), dtype=np.int64)
        return _primitive_rows(self.basis)

    def _quotient_data(self):
        if self._quot is None:
            free = [j for j in range(self.ambient_dim) if j not in set(self.pivots)]
            w = self.basis[:, free] if self.dim else zeros((0, len(free)))
            wn, wd = common_denominator(w)
            self._quot = (np.array(self.pivots, dtype=np.intp), np.array(free, dtype=np.intp), wn, wd)
        return self._quot

    def quotient_coords(self, v: np.ndarray) -> tuple[np.ndarray, int]:
        """Coordinates of integer vectors ``v[..., N]`` modulo this subspace.

        Returns ``(num, den)``; the class of ``v`` is zero iff ``num`` is.
        The coordinates are the free (non-pivot) entries of the normal form.
        """
        piv, free, wn, wd = self._quotient_data()
        out = v[..., free] * wd if wd != 1 else v[..., free]
        if self.dim:
            out = out - matmul_exact(v[..., piv], wn)
        return out, wd

    @property
    def free_columns(self) -> np.ndarray:
        return self._quotient_data()[1]

    def contains(self, v) -> bool:
        return contains(self, v)

    def __contains__(self, v) -> bool:
        return contains(self, v)

    def is_subspace_of(self, other: "Subspace") -> bool:
        if self.dim == 0:
            return True
        coords, _ = other.quotient_coords(self.int_basis())
        return not np.any(coords != 0)

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_same_ambient(self, other)
        return Subspace.span(list(self.basis) + list(other.basis), self.ambient_dim)

    def annihilator(self) -> "Subspace":
        if self.dim == 0:
            return Subspace.full(self.ambient_dim)
        return kernel(self.basis)


def _check_same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient mismatch: {a.ambient_dim} vs {b.ambient_dim}")


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_same_ambient(a, b)
    if a.dim == a.ambient_dim:
        return b
    if b.dim == b.ambient_dim:
        return a
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim)
    eq = np.concatenate([a.annihilator().basis, b.annihilator().basis], axis=0)
    return kernel(eq)


def contains(a: Subspace, v) -> bool:
    v = np.asarray(v, dtype=object).ravel()
    if len(v) != a.ambient_dim:
        raise ValueError(f"vector of length {len(v)} in ambient dimension {a.ambient_dim}")
    num, _ = common_denominator(rat_array(v))
    coords, _ = a.quotient_coords(num)
    return not np.any(coords != 0)


# --- polynomials -------------------------------------------------------------------
# Coefficient lists run from the leading coefficient down to the constant term.


def char_poly(m) -> list[Fraction]:
    """Monic characteristic polynomial det(t I - m), by Faddeev-LeVerrier."""
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("characteristic polynomial of a non-square matrix")
    coeffs = [Fraction(1)]
    acc = zeros((n, n))
    eye = identity(n)
    for k in range(1, n + 1):
        acc = m.dot(acc) + coeffs[-1] * eye
        coeffs.append(-np.trace(m.dot(acc)) / k)
    return [to_rat(c) for c in coeffs]


def _trim(p: list[Fraction]) -> list[Fraction]:
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def _poly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and any(a):
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = a[1:]
    return _trim(a) if a else [Fraction(0)]


def poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _trim(list(a)), _trim(list(b))
    while any(b):
        a, b = b, _poly_rem(a, b)
    return [c / a[0] for c in a]


def poly_derivative(p: list[Fraction]) -> list[Fraction]:
    deg = len(p) - 1
    return [c * (deg - i) for i, c in enumerate(p[:-1])] or [Fraction(0)]


def distinct_eigenvalue_count(m) -> int:
    """Number of distinct complex roots of the characteristic polynomial."""
    p = char_poly(m)
    g = poly_gcd(p, poly_derivative(p))
    return (len(p) - 1) - (len(g) - 1)


def wedge_to_endo(x, y, metric) -> np.ndarray:
    """The skew endomorphism ``z -> g(x, z) y - g(y, z) x``."""
    g = as_matrix(metric)
    if not np.all(g == g.T):
        raise ValueError("metric is not symmetric")
    x = rat_array(x)
    y = rat_array(y)
    return np.outer(y, g.dot(x)) - np.outer(x, g.dot(y))
