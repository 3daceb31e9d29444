from fractions import Fraction

import numpy as np
import pytest

from ahs.families import constant_curvature_triple, random_matrix, random_member, random_triple, resplit_constant_curvature
from ahs.filtration import membership
from ahs.linalg import Subspace, rat_array
from ahs.skew import (
    LiePair,
    LiePairError,
    SkewElement,
    assemble_g,
    bracket,
    jacobiator,
    jacobiator_closed_endo_vec_vec,
    jacobiator_closed_vec3,
    triple_from_lie_pair,
    verify_subalgebra_conditions,
)


def _vec(rng, n):
    return rat_array([Fraction(int(x)) for x in rng.integers(-3, 4, size=n)])


def _element(rng, n):
    return SkewElement(random_matrix(rng, n), _vec(rng, n))


def test_bracket_is_antisymmetric(rng):
    t = random_triple(rng, 3)
    for _ in range(5):
        a, b = _element(rng, 3), _element(rng, 3)
        assert bracket(a, b, t) == -bracket(b, a, t)


def test_jacobiator_closed_forms_on_random_triples(rng):
    for n in (2, 3):
        t = random_triple(rng, n)
        zero = np.zeros((n, n), dtype=object) * Fraction(0)
        X, x, y, z = random_matrix(rng, n), _vec(rng, n), _vec(rng, n), _vec(rng, n)
        zv = np.zeros(n, dtype=object) * Fraction(0)
        brute = jacobiator(SkewElement(X, zv), SkewElement(zero, y), SkewElement(zero, z), t)
        assert brute == jacobiator_closed_endo_vec_vec(X, y, z, t)
        brute = jacobiator(SkewElement(zero, x), SkewElement(zero, y), SkewElement(zero, z), t)
        assert brute == jacobiator_closed_vec3(x, y, z, t)


def test_h_infinity_satisfies_subalgebra_conditions(rng):
    for _ in range(4):
        t = random_member(rng, 3)
        rep = membership(t)
        assert verify_subalgebra_conditions(rep.filtration.h_infinity, t).all_true


def test_assemble_round_trip_with_nontrivial_isotropy(rng):
    t = resplit_constant_curvature(rng, 3)
    h = membership(t).filtration.h_infinity
    pair = assemble_g(h, t)
    assert pair.dim_g == 3 + h.dim
    pair.validate()
    assert triple_from_lie_pair(pair) == t


@pytest.fixture(scope="module")
def so3_pair():
    t = constant_curvature_triple(3, 1)
    return assemble_g(membership(t).filtration.h_infinity, t)


def _rebuild(p, **kw):
    d = dict(c=p.c.copy(), h=p.h, split=p.split.copy(), A=p.A.copy())
    d.update(kw)
    return LiePair(**d)


def _expect(invariant, pair):
    with pytest.raises(LiePairError) as info:
        pair.validate()
    assert info.value.invariant == invariant


def test_lie_pair_invariants_are_named(so3_pair):
    p = so3_pair
    c = p.c.copy()
    c[0, 1, 2] += 1
    _expect("alternating", _rebuild(p, c=c))
    c = p.c.copy()
    c[3, 4, 5] += 1
    c[4, 3, 5] -= 1
    _expect("jacobi", _rebuild(p, c=c))
    skewed = Subspace.span(rat_array([[1, 0, 0, 1, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]]), 6)
    _expect("h_subalgebra", _rebuild(p, h=skewed))
    A = p.A.copy()
    A[0] = A[0] * 2
    _expect("isotropy", _rebuild(p, A=A))
    A = p.A.copy()
    A[3][0, 0] += 1
    _expect("equivariant", _rebuild(p, A=A))


def test_trivially_acting_isotropy_is_rejected():
    c = np.zeros((3, 3, 3), dtype=object) * Fraction(0)
    pair = LiePair(c, Subspace.span(rat_array([[1, 0, 0]]), 3), rat_array([[0, 1, 0], [0, 0, 1]]),
                   np.zeros((3, 2, 2), dtype=object) * Fraction(0))
    _expect("faithful", pair)


def test_shape_errors():
    c = np.zeros((3, 3, 2), dtype=object)
    with pytest.raises(LiePairError):
        LiePair(c, Subspace.zero(3), rat_array([[1, 0, 0]]), np.zeros((3, 1, 1), dtype=object))
