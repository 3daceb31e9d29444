from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ahs.linalg import (
    Subspace,
    char_poly,
    distinct_eigenvalue_count,
    intersect,
    inverse,
    kernel,
    rank,
    rat_array,
    rref,
    to_rat,
    wedge_to_endo,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def matrices(rows=st.integers(1, 5), cols=st.integers(1, 5)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(small, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0])
    )


def square(n=st.integers(1, 5)):
    return n.flatmap(lambda k: st.lists(st.lists(small, min_size=k, max_size=k), min_size=k, max_size=k))


def test_rref_small_cases():
    m, r = rref([[1, 2], [2, 4]])
    assert r == 1
    assert m.tolist() == [[1, 2], [0, 0]]
    k = kernel([[1, 1]])
    assert k.dim == 1 and Subspace.span(rat_array([[1, -1]]), 2) == k


def test_to_rat_rejects_floats():
    with pytest.raises(TypeError):
        to_rat(0.5)
    assert to_rat("3/6") == Fraction(1, 2)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rref_matches_sympy(rows):
    ours, r = rref(rows)
    ref, pivots = sympy.Matrix(rows).rref()
    assert r == len(pivots)
    assert [[Fraction(int(x.p), int(x.q)) for x in ref.row(i)] for i in range(ref.rows)] == ours.tolist()


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity_and_kernel(rows):
    m = rat_array(rows)
    k = kernel(m)
    assert rank(m) + k.dim == m.shape[1]
    for v in k.basis:
        assert not any(m.dot(v))


@settings(max_examples=40, deadline=None)
@given(matrices(cols=st.just(4)), matrices(cols=st.just(4)))
def test_intersection_dimension_formula(a, b):
    A, B = Subspace.span(rat_array(a), 4), Subspace.span(rat_array(b), 4)
    meet = intersect(A, B)
    assert meet.dim == A.dim + B.dim - (A + B).dim
    assert meet.is_subspace_of(A) and meet.is_subspace_of(B)


@settings(max_examples=40, deadline=None)
@given(matrices(cols=st.just(5)))
def test_quotient_coordinates_vanish_exactly_on_subspace(rows):
    S = Subspace.span(rat_array(rows), 5)
    if S.dim:
        q, _ = S.quotient_coords(S.int_basis())
        assert not q.any()
    outside = [v for v in np.eye(5, dtype=np.int64) if v.astype(object) not in S]
    for v in outside:
        q, _ = S.quotient_coords(v.reshape(1, -1))
        assert q.any()


def test_annihilator_is_orthogonal_complement():
    S = Subspace.span(rat_array([[1, 2, 0], [0, 1, 1]]), 3)
    ann = S.annihilator()
    assert ann.dim == 1
    assert not any(S.basis.dot(ann.basis[0]))


@settings(max_examples=40, deadline=None)
@given(square())
def test_char_poly_matches_sympy(rows):
    ours = char_poly(rows)
    lam = sympy.Symbol("lam")
    ref = sympy.Poly(sympy.Matrix(rows).charpoly(lam).as_expr(), lam).all_coeffs()
    assert ours == [Fraction(int(c.p), int(c.q)) for c in ref]


@settings(max_examples=40, deadline=None)
@given(square())
def test_distinct_eigenvalue_count_matches_sympy(rows):
    lam = sympy.Symbol("lam")
    p = sympy.Matrix(rows).charpoly(lam).as_expr()
    squarefree = sympy.sqf_part(p)
    assert distinct_eigenvalue_count(rows) == sympy.degree(squarefree, lam)


@settings(max_examples=40, deadline=None)
@given(square(st.integers(1, 4)))
def test_inverse(rows):
    m = rat_array(rows)
    if rank(m) < m.shape[0]:
        with pytest.raises(ValueError):
            inverse(m)
    else:
        assert (m.dot(inverse(m)) == np.eye(m.shape[0], dtype=int)).all()


def test_wedge_to_endo_is_skew_for_identity_metric():
    g = rat_array(np.eye(3, dtype=int))
    w = wedge_to_endo(g[0], g[1], g)
    assert (w == -w.T).all()
    assert w.dot(g[0]).tolist() == [0, 1, 0]
    assert w.dot(g[1]).tolist() == [-1, 0, 0]
