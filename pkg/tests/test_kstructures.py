import itertools
from fractions import Fraction

import pytest
import sympy

from ahs.families import MeusersParams, constant_curvature_triple, meusers_triple, random_triple
from ahs.kstructures import KAlgebra, SUStructure, membership_k, model_su, verify_su_structure
from ahs.linalg import identity
from ahs.triples import Triple


def test_meusers_connection_is_metric():
    t, _ = meusers_triple(MeusersParams.default(6))
    rep = membership_k(t, KAlgebra.so(identity(6)))
    assert rep.verdict
    assert rep.extra == {"filtration_ambient": "k", "algebra": "so"}
    assert rep.filtration.dims == [3, 1, 0]
    gl_rep = membership_k(t, KAlgebra.so(identity(6)), filtration_ambient="gl")
    assert gl_rep.verdict and gl_rep.filtration.ambient.dim == 36


def test_non_metric_connection_is_flagged():
    t = constant_curvature_triple(3, 1)
    A = t.A.to_rats()
    A[0, 0, 0] = Fraction(1)
    bad = Triple.from_rats(A, t.R.to_rats(), t.T.to_rats())
    rep = membership_k(bad, KAlgebra.so(identity(3)))
    assert "A_valued_in_k" in rep.failing
    assert rep.check("A_valued_in_k").residual_nonzero == 1


def test_gl_algebra_accepts_everything(rng):
    t = random_triple(rng, 2)
    assert membership_k(t, KAlgebra.gl(2)).check("A_valued_in_k").verdict


def test_custom_algebra_must_close():
    E12 = [[0, 1], [0, 0]]
    E21 = [[0, 0], [1, 0]]
    with pytest.raises(ValueError, match="closed"):
        KAlgebra.custom([E12, E21])
    k = KAlgebra.custom([E12])
    assert k.contains(E12) and not k.contains(E21)
    with pytest.raises(ValueError):
        KAlgebra.custom([])


@pytest.mark.parametrize("n,norm", [(1, 1), (2, 2), (3, 4)])
def test_model_su_structure(n, norm):
    rep = verify_su_structure(model_su(n), n)
    assert rep["verdict"]
    assert rep["norm"] == norm == 2 ** (n - 1)
    assert {c.name for c in rep["checks"]} >= {"I_squared", "g_hermitian", "der_squared", "psi_norm"}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_psi_is_real_part_of_complex_determinant(n, rng):
    s = model_su(n)
    psi = s.psi.to_rats()
    for _ in range(3):
        vecs = rng.integers(-3, 4, size=(n, 2 * n))
        Z = sympy.Matrix(n, n, lambda i, j: int(vecs[i][2 * j]) + sympy.I * int(vecs[i][2 * j + 1]))
        expected = sympy.re(sympy.expand(Z.det()))
        value = Fraction(0)
        for idx in itertools.product(range(2 * n), repeat=n):
            coeff = psi[idx]
            if coeff:
                term = coeff
                for i, k in enumerate(idx):
                    term *= int(vecs[i][k])
                value += term
        assert value == Fraction(int(expected))


def test_broken_structures_name_the_failing_equation():
    s = model_su(2)
    I2 = s.I.copy()
    I2[0, 1] = 0
    rep = verify_su_structure(SUStructure(s.g, I2, s.psi), 2)
    assert not rep["verdict"]
    assert "I_squared" in [c.name for c in rep["checks"] if not c.verdict]
    rep = verify_su_structure(SUStructure(s.g, s.I, s.psi * 2), 2)
    assert [c.name for c in rep["checks"] if not c.verdict] == ["psi_norm"]
    g2 = s.g.copy()
    g2[0, 0] = Fraction(2)
    rep = verify_su_structure(SUStructure(g2, s.I, s.psi), 2)
    assert "g_hermitian" in [c.name for c in rep["checks"] if not c.verdict]
