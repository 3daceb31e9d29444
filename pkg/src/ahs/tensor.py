"""Multilinear forms on Q^n with scalar, vector or endomorphism values.

A tensor with ``p`` covariant slots stores its entries as an integer array of
shape ``(n,)*p + value_shape`` together with one positive denominator. The
pair is kept reduced, so equal tensors have identical storage.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import reduce

import numpy as np

from .kernels import as_object, max_abs, promote, shrink
from .linalg import common_denominator, rat_array, to_rat

VALUE_RANK = {"scalar": 0, "vector": 1, "endo": 2}


def permutation_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _gcd_all(num: np.ndarray, den: int) -> int:
    if num.size == 0:
        return den
    if num.dtype == object:
        return reduce(math.gcd, (int(x) for x in num.flat), den)
    return math.gcd(int(np.gcd.reduce(num.ravel())), den)


class Tensor:
    __slots__ = ("n", "arity", "kind", "num", "den", "alternating")

    def __init__(self, n: int, arity: int, kind: str, num: np.ndarray, den: int = 1, alternating=()):
        if kind not in VALUE_RANK:
            raise ValueError(f"unknown value kind {kind!r}")
        shape = (n,) * (arity + VALUE_RANK[kind])
        num = np.asarray(num)
        if num.shape != shape:
            raise ValueError(f"expected entries of shape {shape}, got {num.shape}")
        if num.dtype != object and num.dtype != np.int64:
            num = num.astype(np.int64)
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("tensor denominator is zero")
        if den < 0:
            num, den = -num, -den
        g = _gcd_all(num, den)
        if g > 1:
            num = num // g
            den //= g
        if not num.any():
            den = 1
        self.n = n
        self.arity = arity
        self.kind = kind
        self.num = shrink(num)
        self.den = den
        self.alternating = tuple(tuple(g) for g in alternating)

    # construction --------------------------------------------------------------

    @classmethod
    def zeros(cls, n: int, arity: int, kind: str, alternating=()) -> "Tensor":
        shape = (n,) * (arity + VALUE_RANK[kind])
        return cls(n, arity, kind, np.zeros(shape, dtype=np.int64), 1, alternating)

    @classmethod
    def from_rats(cls, n: int, arity: int, kind: str, data, alternating=()) -> "Tensor":
        shape = (n,) * (arity + VALUE_RANK[kind])
        num, den = common_denominator(rat_array(data, shape))
        return cls(n, arity, kind, num, den, alternating)

    def like(self, num: np.ndarray, den: int = 1, alternating=None) -> "Tensor":
        alt = self.alternating if alternating is None else alternating
        return Tensor(self.n, self.arity, self.kind, num, den, alt)

    # access --------------------------------------------------------------------

    @property
    def value_rank(self) -> int:
        return VALUE_RANK[self.kind]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.num.shape

    def to_rats(self) -> np.ndarray:
        out = np.empty(self.shape, dtype=object)
        out.flat[:] = [Fraction(int(x), self.den) for x in self.num.flat]
        return out

    def tolist(self):
        return self.to_rats().tolist()

    def __getitem__(self, idx) -> Fraction:
        return Fraction(int(self.num[idx]), self.den)

    def is_zero(self) -> bool:
        return not self.num.any()

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.num))

    def first_nonzero(self) -> tuple[int, ...] | None:
        idx = np.argwhere(self.num != 0)
        return tuple(int(i) for i in idx[0]) if len(idx) else None

    # arithmetic ------------------------------------------------------------------

    def _check_compatible(self, other: "Tensor") -> None:
        if (self.n, self.arity, self.kind) != (other.n, other.arity, other.kind):
            raise ValueError(
                f"incompatible tensors: {(self.n, self.arity, self.kind)} vs {(other.n, other.arity, other.kind)}"
            )

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        den = math.lcm(self.den, other.den)
        fa, fb = den // self.den, den // other.den
        bound = max_abs(self.num) * fa + max_abs(other.num) * fb
        a, b = promote(bound, self.num, other.num)
        alt = tuple(g for g in self.alternating if g in other.alternating)
        return self.like(a * fa + b * fb, den, alt)

    def __neg__(self) -> "Tensor":
        return self.like(-self.num, self.den)

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-other)

    def __mul__(self, c) -> "Tensor":
        c = to_rat(c)
        (num,) = promote(max_abs(self.num) * abs(c.numerator), self.num)
        return self.like(num * c.numerator, self.den * c.denominator)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return (
            (self.n, self.arity, self.kind, self.den) == (other.n, other.arity, other.kind, other.den)
            and bool(np.array_equal(as_object(self.num) if other.num.dtype == object else self.num, other.num))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Tensor(n={self.n}, arity={self.arity}, kind={self.kind!r}, nonzero={self.nonzero_count()})"

    # symmetry ------------------------------------------------------------------------

    def alternation_violation(self, group=None) -> tuple[int, ...] | None:
        """First index tuple breaking the sign rule for ``group``, or None.

        ``group`` defaults to all covariant slots.
        """
        group = tuple(range(self.arity)) if group is None else tuple(group)
        nd = self.num.ndim
        for perm in itertools.permutations(range(len(group))):
            if list(perm) == sorted(perm):
                continue
            axes = list(range(nd))
            for i, p in enumerate(perm):
                axes[group[i]] = group[p]
            sign = permutation_sign(perm)
            bad = np.argwhere(self.num != sign * np.transpose(self.num, axes))
            if len(bad):
                return tuple(int(i) for i in bad[0])
        return None

    def is_alternating(self, group=None) -> bool:
        return self.alternation_violation(group) is None
