import pytest

from ahs.families import (
    constant_curvature_triple,
    random_lie_algebra_triple,
    random_member,
    random_triple,
    resplit_constant_curvature,
    so_metric,
)
from ahs.filtration import (
    derived_subalgebra,
    direct_equations,
    direct_equations_verdict,
    gl,
    h_zero,
    joint_stabilizer_filtration,
    membership,
    membership_direct,
    membership_variant,
    stabilizer_filtration,
)
from ahs.linalg import identity
from ahs.skew import commutator_violation
from ahs.triples import Triple, scale_by


def test_zero_triple_has_full_stabilizer():
    f = stabilizer_filtration(Triple.zero(2))
    assert f.singer == -1
    assert f.dims == [4]
    assert membership(Triple.zero(2)).verdict


def test_constant_curvature_in_so_is_stationary_immediately():
    t = constant_curvature_triple(3, 1)
    so3 = so_metric(identity(3))
    f = stabilizer_filtration(t, so3)
    assert f.steps[0] == so3
    assert f.singer == 0
    assert membership_variant(t, "red").verdict


def test_filtration_steps_descend_and_are_subalgebras(rng):
    for _ in range(8):
        t = random_member(rng, 3)
        f = stabilizer_filtration(t)
        for r, h in enumerate(f.steps):
            assert commutator_violation(h, 3) is None
            if r:
                assert h.is_subspace_of(f.steps[r - 1])
        assert f.step(f.singer + 5) == f.h_infinity
        assert f.step(-1) == gl(3)


def test_derived_subalgebra_of_h0_is_h1(rng):
    t = resplit_constant_curvature(rng, 3)
    f = stabilizer_filtration(t)
    h0 = h_zero(t)
    assert derived_subalgebra(h0, t) == f.step(1)


def test_lie_algebra_triples_are_members(rng):
    for n in (2, 3, 4):
        for _ in range(3):
            assert membership(random_lie_algebra_triple(rng, n)).verdict


def test_resplit_member_has_nonzero_congruence_residual(rng):
    from ahs.triples import approximate_curvature

    t = resplit_constant_curvature(rng, 3)
    assert not (approximate_curvature(t) - t.R).is_zero() or t.A.is_zero()
    assert membership(t).verdict


def test_failing_check_is_named():
    t = constant_curvature_triple(2, 1)
    A = t.A.to_rats()
    A[0, 0, 1] += 1
    bad = Triple.from_rats(A, t.R.to_rats(), t.T.to_rats())
    rep = membership(bad)
    assert not rep.verdict
    assert "q_congruence" in rep.failing
    assert rep.check("q_congruence").residual_nonzero > 0


def test_direct_equations_listing_orders():
    t = constant_curvature_triple(2, 1)
    eqs = direct_equations(t, 2)
    assert {(w, r) for w, r, _ in eqs} == {(w, r) for w in ("T", "R") for r in range(3)}
    assert all(s.is_zero() for _, _, s in eqs)


def test_direct_verdict_agrees_with_congruence_on_random_inputs(rng):
    for n in (2, 3):
        for i in range(12):
            t = random_member(rng, n) if i % 2 else random_triple(rng, n)
            rep = membership(t)
            assert membership_direct(t).verdict == rep.verdict
            if not rep.check("bianchi_first").residual_nonzero and not rep.check("bianchi_second").residual_nonzero:
                assert direct_equations_verdict(t).verdict == rep.check("q_congruence").verdict


def test_direct_route_needs_the_bianchi_identities():
    # this torsion pair breaks both Bianchi identities while Q - R stays congruent
    from ahs.families import MeusersParams, meusers_triple

    t, _ = meusers_triple(MeusersParams.default(6))
    T = t.T.to_rats()
    T[1, 2, 2] += 1
    T[2, 1, 2] -= 1
    p = Triple.from_rats(t.A.to_rats(), t.R.to_rats(), T)
    assert direct_equations_verdict(p).verdict and membership(p).check("q_congruence").verdict
    assert membership(p).failing == membership_direct(p).failing == ["bianchi_first", "bianchi_second"]


def test_joint_filtration_agrees_on_random_inputs(rng):
    for n in (2, 3):
        for i in range(12):
            t = random_member(rng, n) if i % 2 else random_triple(rng, n)
            f = stabilizer_filtration(t)
            r_max = max(f.singer, 0) + 2
            j = joint_stabilizer_filtration(t, None, r_max)
            assert all(f.step(r) == j.step(r) for r in range(r_max + 1))


def test_variants_check_preconditions(rng):
    t = random_triple(rng, 2)
    with pytest.raises(ValueError):
        membership_variant(t, "unknown")
    if not t.T.is_zero():
        with pytest.raises(ValueError):
            membership_variant(t, "tf")
    if not t.A.is_zero():
        with pytest.raises(ValueError):
            membership_variant(t, "red")


def test_torsion_free_variant_matches_general_membership(rng):
    for _ in range(6):
        t = resplit_constant_curvature(rng, 3)
        assert membership_variant(t, "tf").verdict == membership(t).verdict


def test_reductive_variant_rejects_non_invariant_curvature():
    t = constant_curvature_triple(3, 1)
    R = t.R.to_rats()
    R[0, 1, 2, 2] += 1
    R[1, 0, 2, 2] -= 1
    bad = Triple.from_rats(t.A.to_rats(), R, t.T.to_rats())
    rep = membership_variant(bad, "red")
    assert not rep.verdict
    assert rep.failing


def test_membership_is_invariant_under_scaling(rng):
    for _ in range(4):
        t = random_member(rng, 3)
        for c in (2, 3, "1/2"):
            s = scale_by(t, c)
            assert membership(s).verdict == membership(t).verdict
            assert stabilizer_filtration(s).steps == stabilizer_filtration(t).steps
