"""Integer tensor kernels.

Tensors are stored as integer numerators over a shared denominator, so the
hot loops only ever see integers. Arrays stay ``int64`` while a worst-case
bound fits in 62 bits and are promoted to Python-int ``object`` arrays
otherwise; the numba kernels only handle the ``int64`` case.
"""

from __future__ import annotations

import math

import numpy as np

from ._jit import JIT_ENABLED, njit

INT_LIMIT = 1 << 62


def max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(np.abs(a).max())


def as_object(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return a
    out = np.empty(a.shape, dtype=object)
    out.flat[:] = [int(x) for x in a.flat]
    return out


def shrink(a: np.ndarray) -> np.ndarray:
    """Return ``a`` as int64 when every entry fits, else unchanged."""
    if a.dtype == object and max_abs(a) < INT_LIMIT:
        return a.astype(np.int64)
    return a


def promote(bound: int, *arrays: np.ndarray) -> list[np.ndarray]:
    """Cast all arrays to object dtype if ``bound`` could overflow int64."""
    if bound >= INT_LIMIT or any(a.dtype == object for a in arrays):
        return [as_object(a) for a in arrays]
    return list(arrays)


def einsum_exact(spec: str, *arrays: np.ndarray) -> np.ndarray:
    """Overflow-safe ``np.einsum`` over integer arrays."""
    inputs, output = spec.split("->")
    sizes: dict[str, int] = {}
    for letters, arr in zip(inputs.split(","), arrays):
        sizes.update(zip(letters, arr.shape))
    summed = math.prod(sizes[c] for c in set(sizes) - set(output))
    bound = summed * math.prod(max_abs(a) for a in arrays)
    arrays = promote(bound, *arrays)
    out = np.einsum(spec, *arrays)
    return shrink(out) if out.dtype == object else out


def matmul_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    bound = a.shape[-1] * max_abs(a) * max_abs(b)
    a, b = promote(bound, a, b)
    return a @ b


# --- star action -----------------------------------------------------------
#
# For a batch of endomorphisms X[b] and a tensor t with p covariant slots,
#   (X * t)(y_1..y_p) = X . t(y_1..y_p) - sum_mu t(.., X y_mu, ..)
# The slot term touches only the nonzero entries of X, which keeps the very
# sparse connection matrices of the structured families cheap.


@njit(cache=True)
def _slot_term_jit(X, t3, out4):
    nb, n, _ = X.shape
    L, _, rr = t3.shape
    for b in range(nb):
        for c in range(n):
            for a in range(n):
                x = X[b, c, a]
                if x == 0:
                    continue
                for l in range(L):
                    for r in range(rr):
                        out4[b, l, a, r] -= x * t3[l, c, r]


@njit(cache=True)
def _vector_value_jit(X, t2, out3):
    nb, n, _ = X.shape
    P = t2.shape[0]
    for b in range(nb):
        for i in range(n):
            for k in range(n):
                x = X[b, i, k]
                if x == 0:
                    continue
                for p in range(P):
                    out3[b, p, i] += x * t2[p, k]


@njit(cache=True)
def _endo_value_jit(X, t3, out4):
    nb, n, _ = X.shape
    P = t3.shape[0]
    for b in range(nb):
        for i in range(n):
            for k in range(n):
                x = X[b, i, k]
                if x == 0:
                    continue
                for p in range(P):
                    for j in range(n):
                        out4[b, p, i, j] += x * t3[p, k, j]
                    for j in range(n):
                        out4[b, p, j, k] -= t3[p, j, i] * x


def _star_jit(X, t, arity, value_rank):
    n = X.shape[1]
    nb = X.shape[0]
    out = np.zeros((nb,) + t.shape, dtype=np.int64)
    flat = np.ascontiguousarray(t)
    for mu in range(arity):
        L = n**mu
        rr = t.size // (L * n)
        _slot_term_jit(X, flat.reshape(L, n, rr), out.reshape(nb, L, n, rr))
    P = t.size // n**value_rank if value_rank else t.size
    if value_rank == 1:
        _vector_value_jit(X, flat.reshape(P, n), out.reshape(nb, P, n))
    elif value_rank == 2:
        _endo_value_jit(X, flat.reshape(P, n, n), out.reshape(nb, P, n, n))
    return out


def _star_numpy(X, t, arity, value_rank):
    nb = X.shape[0]
    out = np.zeros((nb,) + t.shape, dtype=t.dtype)
    if out.dtype == object:
        out.fill(0)
    for b in range(nb):
        nz = list(zip(*np.nonzero(X[b])))
        if not nz:
            continue
        ob = out[b]
        for mu in range(arity):
            tm = np.moveaxis(t, mu, 0)
            om = np.moveaxis(ob, mu, 0)
            for c, a in nz:
                om[a] -= X[b, c, a] * tm[c]
        if value_rank == 1:
            for i, k in nz:
                ob[..., i] += X[b, i, k] * t[..., k]
        elif value_rank == 2:
            for i, k in nz:
                x = X[b, i, k]
                ob[..., i, :] += x * t[..., k, :]
                ob[..., :, k] -= x * t[..., :, i]
    return out


def star_batch(X: np.ndarray, t: np.ndarray, arity: int, value_rank: int) -> np.ndarray:
    """Apply each ``X[b]`` to ``t``; returns an array of shape ``(B,) + t.shape``.

    ``value_rank`` is 0, 1 or 2 for scalar, vector or endomorphism values.
    """
    n = X.shape[1]
    bound = max_abs(X) * max_abs(t) * n * (arity + 2)
    X, t = promote(bound, X, t)
    if X.dtype == object:
        return shrink(_star_numpy(X, t, arity, value_rank))
    X = np.ascontiguousarray(X, dtype=np.int64)
    t = t.astype(np.int64, copy=False)
    if JIT_ENABLED:
        return _star_jit(X, t, arity, value_rank)
    return _star_numpy(X, t, arity, value_rank)
