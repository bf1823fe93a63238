"""Tests for the matrix layer: substitution matrices in both bases, the
triangular right inverse, the twisted fixed-point solver, and the
unit-action matrices with their structure and commutation sweeps."""

import pytest

from modpcheck import phigamma as pg
from modpcheck.arith import Fq
from modpcheck.base_combinatorics import IntVec, SubsetJ
from modpcheck.constants import mu_gamma
from modpcheck.errors import HypothesisViolation, NonConvergence, NotInvertible
from modpcheck.iwasawa import (
    INF,
    AElement,
    chart_context,
    fdeg,
    frobenius,
    invert_unit,
    principal_units,
)
from modpcheck.weights import RhoParams

P1 = RhoParams.make(11, 1, (4,))
P1S = RhoParams.make(11, 1, (5,), (0,))
P2 = RhoParams.make(13, 2, (5, 6), (0,))
P2G = RhoParams.make(13, 2, (5, 6))
P2S = RhoParams.make(13, 2, (6, 5), (0, 1))
MU1 = mu_gamma(P1, seed=5)
MU1S = mu_gamma(P1S, seed=5)
MU2 = mu_gamma(P2, seed=5)
MU2G = mu_gamma(P2G, seed=5)
MU2S = mu_gamma(P2S, seed=5)
F1 = Fq(11, 1)
F2 = Fq(13, 2)

E1 = SubsetJ(1, 0)
T1 = SubsetJ.full(1)
E2 = SubsetJ(2, 0)
T2 = SubsetJ.full(2)


def one(fld, f):
    return AElement.const(fld, f, 1)


# --- substitution matrices -------------------------------------------------


def test_phi_support_counts():
    # each column J+1 carries the rows between J cap Jrho and J
    assert len(pg.phi_support(P1)) == 3
    assert len(pg.phi_support(P1S)) == 2
    assert len(pg.phi_support(P2)) == 6
    assert len(pg.phi_support(P2G)) == 9
    assert len(pg.phi_support(P2S)) == 4


def test_untwisted_special_column_is_constant():
    # with every embedding special the matrix is diagonal and the column
    # at the full set has a plain scalar entry (its pole vector vanishes)
    M = pg.mat_phi_untwisted(MU1S)
    assert set(M.entries) == {(E1, E1), (T1, T1)}
    x = M.entries[(T1, T1)]
    assert x.terms == {(0,): MU1S.gamma(T1, T1).e}


def test_untwisted_entry_hand_exponent_f2():
    # p=13, r=(5,6), J={0}: pole vector (6,5), column difference r-vector
    # for J minus J'={0} is (-1,7), so the (empty,{1}) entry is Y^(-5,-12);
    # the row below the column needs the unconstrained table
    M = pg.mat_phi_untwisted(MU2G)
    J = SubsetJ.of(2, (0,))
    x = M.entries[(E2, J.shift(1))]
    assert list(x.terms) == [(-5, -12)]
    assert x.terms[(-5, -12)] == MU2G.gamma(J.shift(1), E2).e


def test_twisted_pole_depths_f2():
    M = pg.mat_phi_twisted(MU2G)
    # column from J=empty: all of r+1 contributes, depth -(p-1)*(6+7)
    assert fdeg(M.entries[(E2, E2.shift(1))]) == -156
    assert M.entries[(E2, E2.shift(1))].terms == {
        (-85, -71): MU2G.gamma(E2, E2).e
    }
    # column from the full set is scalar
    assert fdeg(M.entries[(T2, T2.shift(1))]) == 0
    assert pg.check_phi_matrix_shapes(MU2G).passed
    assert pg.check_phi_matrix_shapes(MU1).passed


def test_twist_change_of_basis():
    for mu in (MU1, MU1S, MU2, MU2G, MU2S):
        r = pg.check_twist_change_of_basis(mu)
        assert r.passed, r.as_dict()


def test_flip_changes_exactly_one_entry():
    slot = pg.default_flip(P2)
    M0 = pg.mat_phi_twisted(MU2)
    M1 = pg.mat_phi_twisted(MU2, flip=slot)
    changed = [k for k in M0.entries if not (M0.entries[k] - M1.entries[k]).is_zero()]
    assert changed == [slot]
    assert (M0.entries[slot] + M1.entries[slot]).is_zero()


# --- right inverse ---------------------------------------------------------


def test_right_inverse_f1_closed_form():
    # 2x2 system: rows (empty, full), columns likewise; eliminating from
    # the full row gives the inverse entries below in closed form
    M = pg.mat_phi_twisted(MU1)
    X = pg.solve_right_inverse(M)
    ga = MU1.gamma(E1, E1)
    gb = MU1.gamma(T1, E1)
    gc = MU1.gamma(T1, T1)
    assert X.entries[(E1, E1)].terms == {(50,): (ga ** -1).e}
    assert X.entries[(T1, T1)].terms == {(0,): (gc ** -1).e}
    assert X.entries[(E1, T1)].terms == {(50,): (-(ga ** -1) * gb * gc ** -1).e}
    assert (T1, E1) not in X.entries
    # diagonal variant: inverse is entrywise reciprocal
    Md = pg.mat_phi_twisted(MU1S)
    Xd = pg.solve_right_inverse(Md)
    assert set(Xd.entries) == {(E1, E1), (T1, T1)}
    assert Xd.entries[(E1, E1)].terms == {
        (60,): (MU1S.gamma(E1, E1) ** -1).e
    }


def test_right_inverse_residual_exact():
    for mu in (MU2, MU2G, MU2S):
        r = pg.check_right_inverse(mu)
        assert r.passed, r.as_dict()


def test_right_inverse_not_invertible():
    M = pg.mat_phi_twisted(MU2)
    del M.entries[(T2, T2.shift(1))]
    with pytest.raises(NotInvertible):
        pg.solve_right_inverse(M)
    M = pg.mat_phi_twisted(MU2)
    M.entries[(E2, E2.shift(1))] = AElement(MU2.field, 2, INF, {})
    with pytest.raises(NotInvertible):
        pg.solve_right_inverse(M)


# --- twisted fixed-point systems -------------------------------------------


def test_theta_basics():
    for params in (P1, P2):
        r = pg.check_theta_basics(params)
        assert r.passed, r.as_dict()


def test_theta_problem_validation():
    zeros = tuple(AElement(F2, 2, INF, {}) for _ in range(2))
    ones = (F2.elem(1), F2.elem(1))
    J = SubsetJ.of(2, (0,))
    with pytest.raises(HypothesisViolation):
        pg.ThetaProblem(13, J, E2, ones, IntVec.const(2, 0), zeros)
    with pytest.raises(HypothesisViolation):
        pg.ThetaProblem(13, J, E2, ones, IntVec.const(2, 12), zeros)
    with pytest.raises(HypothesisViolation):
        pg.ThetaProblem(13, J, E2, (F2.elem(0), F2.elem(1)), IntVec.const(2, 2), zeros)
    bad_b = (AElement.monomial(F2, 2, (1, 0)), AElement(F2, 2, INF, {}))
    with pytest.raises(HypothesisViolation):
        pg.ThetaProblem(13, J, E2, ones, IntVec.const(2, 2), bad_b)


def test_theta_solver_validation():
    ones = (F2.elem(1), F2.elem(1))
    J = SubsetJ.of(2, (0,))
    zeros = tuple(AElement(F2, 2, INF, {}) for _ in range(2))
    # square pair: no solver branch
    prob = pg.ThetaProblem(13, J, J, ones, IntVec.const(2, 2), zeros)
    with pytest.raises(HypothesisViolation):
        pg.theta_solve(prob)
    # h admissible for the operator but not for the solver (p-1-f = 10)
    prob = pg.ThetaProblem(13, J, E2, ones, IntVec.const(2, 11), zeros)
    with pytest.raises(HypothesisViolation):
        pg.theta_solve(prob)
    # right-hand side too shallow: constants have depth 0 < p-1
    const_b = tuple(one(F2, 2) for _ in range(2))
    prob = pg.ThetaProblem(13, J, E2, ones, IntVec.const(2, 2), const_b)
    with pytest.raises(HypothesisViolation):
        pg.theta_solve(prob)


def test_theta_solver_zero_rhs_exact():
    ones = (F2.elem(1), F2.elem(1))
    J = SubsetJ.of(2, (0,))
    zeros = tuple(AElement(F2, 2, INF, {}) for _ in range(2))
    prob = pg.ThetaProblem(13, J, E2, ones, IntVec.const(2, 2), zeros)
    out = pg.theta_solve(prob, depth=30)
    assert all(x.is_zero() and x.cutoff == INF for x in out)


def test_theta_solver_random_sweeps():
    assert pg.check_theta_solver(P1, count=25, seed=1, depth=40).passed
    assert pg.check_theta_solver(P2, count=25, seed=1, depth=30).passed
    assert pg.check_theta_solver(P2G, count=15, seed=2, depth=30).passed


def test_theta_solver_deterministic():
    prob1 = pg.random_theta_problem(P2, F2, seed=11)
    prob2 = pg.random_theta_problem(P2, F2, seed=11)
    a1 = pg.theta_solve(prob1, depth=30)
    a2 = pg.theta_solve(prob2, depth=30)
    assert all(x.terms == y.terms and x.cutoff == y.cutoff for x, y in zip(a1, a2))


def test_theta_solver_stall_guard():
    # sabotaged twist data loses depth every round; the solver must refuse
    # to pretend it converged
    prob = pg.random_theta_problem(P2, F2, seed=7)
    deep = AElement.monomial(F2, 2, (-500, -500), 1)
    prob.twist_monomials = lambda: (deep, deep)
    with pytest.raises(NonConvergence):
        pg.theta_solve(prob, depth=30)


# --- eigenline classifier ---------------------------------------------------


def test_classifier_literals():
    kind, t = pg.classify_phi_q_eigen(P2, 1, IntVec.zero(2))
    assert kind == "line" and tuple(t) == (0, 0)
    q1 = P2.q - 1
    kind, t = pg.classify_phi_q_eigen(P2, 1, IntVec(2, (2 * q1, -q1)))
    assert kind == "line" and tuple(t) == (2, -1)
    kind, t = pg.classify_phi_q_eigen(P2, 2, IntVec(2, (2 * q1, -q1)))
    assert kind == "zero" and t is None
    kind, t = pg.classify_phi_q_eigen(P2, 1, IntVec(2, (1, 0)))
    assert kind == "zero"


def test_classifier_against_substitution_oracle():
    assert pg.check_eigen_classifier(P1, samples=12, seed=3).passed
    assert pg.check_eigen_classifier(P2, samples=8, seed=3).passed


# --- unit-action matrices ---------------------------------------------------


def test_teichmuller_unit_gives_identity():
    ctx = chart_context(11, 1)
    M = pg.build_mat_a(ctx, MU1, ctx.ring.teichmuller(2))
    assert set(M.entries) == {(E1, E1), (T1, T1)}
    for x in M.entries.values():
        assert (x - 1).is_zero() and x.cutoff == INF


def test_unit_matrix_f1_entries():
    ctx = chart_context(11, 1)
    u = principal_units(ctx, 1, seed=3)[0]
    qa, pj = pg.build_q_a(ctx, MU1, u)
    assert (qa.entry(E1, E1) - 1).is_zero()
    assert (qa.entry(T1, T1) - 1).is_zero()
    assert fdeg(pj[0] - 1) == 10 and pj[0].cutoff == 39
    x = qa.entry(E1, T1)
    assert fdeg(x) == 10 and x.cutoff == 39
    # leading window: gamma ratio times (1 - correction); with one
    # embedding the first solver correction already sits at depth
    # p(p-1) - (p-1)(r+1) = 60, beyond the knowledge cutoff, so the
    # window identity is exact as far as the entry is known
    g = MU1.gamma_star(E1) / MU1.gamma_star(T1)
    target = (one(F1, 1) - pj[0]).scale(g.e)
    assert (x - target).copy_truncated(20).is_zero()
    assert (x - target).copy_truncated(39).is_zero()
    Pa = pg.assemble_unit_matrix(P1, qa, pj)
    assert (Pa.entry(T1, T1) - 1).is_zero()
    assert fdeg(Pa.entry(E1, E1) - 1) == 10
    r = pg.check_commutation(ctx, pg.mat_phi_twisted(MU1), Pa, u)
    assert r.passed and r.info["nonvacuous_entries"] == 3
    assert r.info["formula_floor"] <= r.info["lowest_entry_floor"]


def test_unit_matrix_f1_special_is_diagonal():
    ctx = chart_context(11, 1)
    u = principal_units(ctx, 1, seed=3)[0]
    M = pg.build_mat_a(ctx, MU1S, u)
    assert set(M.entries) == {(E1, E1), (T1, T1)}
    assert fdeg(M.entry(E1, E1) - 1) == 10
    assert (M.entry(T1, T1) - 1).is_zero()
    r = pg.check_commutation(ctx, pg.mat_phi_twisted(MU1S), M, u)
    assert r.passed


def test_unit_matrix_sweeps_f1():
    ctx = chart_context(11, 1)
    for mu in (MU1, MU1S):
        rs = pg.check_unit_action_matrices(ctx, mu, units=3, pairs=1, seed=0)
        for r in rs:
            assert r.passed, r.as_dict()


def test_unit_matrix_sweeps_f2():
    ctx = chart_context(13, 2)
    for mu in (MU2, MU2G, MU2S):
        rs = pg.check_unit_action_matrices(ctx, mu, units=2, pairs=1, seed=0)
        for r in rs:
            assert r.passed, r.as_dict()
    rs = pg.check_unit_action_matrices(ctx, MU2S, units=1, pairs=0, seed=1)
    assert rs[0].info == {"diagonal_normalization": "identity"}


def test_unit_matrix_f2_deep_entry_window():
    # the row-empty, column-full entry sits at depth 2(p-1) with the
    # two-factor correction product as its leading window
    ctx = chart_context(13, 2)
    u = principal_units(ctx, 1, seed=3)[0]
    qa, pj = pg.build_q_a(ctx, MU2G, u)
    x = qa.entry(E2, T2)
    assert fdeg(x) == 24
    g = MU2G.gamma_star(E2) / MU2G.gamma_star(T2)
    target = ((one(F2, 2) - pj[0]) * (one(F2, 2) - pj[1])).scale(g.e)
    floor = min(36, x.cutoff, target.cutoff)
    assert (x - target).copy_truncated(floor).is_zero()
    # same entry under a constraint set that excludes it from the leading
    # branch: empty below the knowledge cutoff
    qa2, _ = pg.build_q_a(ctx, MU2, u)
    x2 = qa2.entry(E2, T2)
    assert x2.copy_truncated(x2.cutoff).is_zero()


def test_flip_breaks_commutation_detectably():
    ctx = chart_context(11, 1)
    u = principal_units(ctx, 1, seed=0)[0]
    Pa = pg.build_mat_a(ctx, MU1, u)
    bad = pg.mat_phi_twisted(MU1, flip=pg.default_flip(P1))
    r = pg.check_commutation(ctx, bad, Pa, u)
    assert not r.passed
    assert r.counterexample["leading"] == 10


def test_f3_chart_free_smoke():
    P3 = RhoParams.make(17, 3, (7, 8, 7), (0,))
    MU3 = mu_gamma(P3, seed=5)
    assert pg.check_phi_matrix_shapes(MU3).passed
    assert pg.check_twist_change_of_basis(MU3).passed
    assert pg.check_right_inverse(MU3).passed
    assert pg.check_theta_solver(P3, count=3, seed=2).passed
    assert pg.check_eigen_classifier(P3, samples=3, seed=1).passed


def test_matmul_with_identity():
    M = pg.mat_phi_twisted(MU2)
    I = pg.PhiGammaMatrix.identity(P2, MU2.field)
    for prod in (M @ I, I @ M):
        assert set(prod.entries) == set(M.entries)
        for k in M.entries:
            assert (prod.entries[k] - M.entries[k]).is_zero()
