import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_instance
from stlsq import fixtures as fx
from stlsq.numkernel import RankDeficientError, spectral_norm
from stlsq.solver import (
    CONVERGED,
    EMPTY_INITIAL_SUPPORT,
    ZERO_SOLUTION,
    SolverError,
    SolverParams,
    brute_force_global_min,
    check_global_min_conditions,
    check_one_step_condition,
    is_fixed_point,
    objective_value,
    ridge_augment,
    sindy_solve,
    stridge_solve,
    support_masks,
    surrogate_value,
    threshold_support,
)

A1, b1 = fx.EXAMPLE1_A, fx.EXAMPLE1_B
A2, b2 = fx.EXAMPLE2_A, fx.EXAMPLE2_B


def one_based(S):
    return [int(j) + 1 for j in S]


def normalized(A, b):
    s = np.linalg.norm(A, 2)
    return A / s, b / s


def direct_objective(A, b, x, lam):
    # reference: dense SVD for the norm, literal formula
    s = np.linalg.svd(A, compute_uv=False)[0]
    r = (A @ x - b) / s
    return float(np.sum(r**2)) + lam**2 * int(np.sum(np.abs(x) > 1e-12))


# ---- parameters and thresholding -------------------------------------------


@pytest.mark.parametrize("kw", [dict(lam=0.0), dict(lam=-1.0), dict(lam=1.0, gamma=-0.1),
                                dict(lam=1.0, max_iter=0), dict(lam=float("nan"))])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        SolverParams(**kw)


def test_threshold_support_cases():
    assert threshold_support(np.zeros(3), 1.0).size == 0
    assert one_based(threshold_support(fx.EXAMPLE1_X, 0.802)) == [1, 2, 3, 4]
    assert one_based(threshold_support(fx.EXAMPLE1_X, 8.0)) == [1]
    # boundary values are kept
    assert threshold_support(np.array([1.0, -1.0, 0.999]), 1.0).tolist() == [0, 1]


# ---- worked examples --------------------------------------------------------


def test_example1_lambda8_one_step():
    sol, tr = sindy_solve(A1, b1, SolverParams(8.0))
    assert tr.refinements == 1 and tr.status == CONVERGED and tr.converged
    np.testing.assert_allclose(sol.x, fx.EXAMPLE1_ONESTEP[1], atol=1e-4)
    assert one_based(sol.support) == [1]


def test_example1_lambda10_boundary_empties_support():
    # x1[0] = 9.7981 < 10, so the next support is empty and the run ends at zero
    sol, tr = sindy_solve(A1, b1, SolverParams(10.0))
    assert tr.iterates[1][0] == pytest.approx(9.7981, abs=1e-4)
    assert tr.status == ZERO_SOLUTION
    assert not np.any(sol.x)


def test_example1_full_path():
    sol, tr = sindy_solve(A1, b1, SolverParams(0.802))
    assert tr.refinements == 4
    for got, exp in zip(tr.iterates, fx.EXAMPLE1_FULLPATH):
        np.testing.assert_allclose(got, exp, atol=1e-3)
    np.testing.assert_allclose(tr.iterates[2], [9.8869, 0.8117, 0.7271, 0, 0], atol=1e-3)
    assert [one_based(S) for S in tr.supports] == fx.EXAMPLE1_FULLPATH_SUPPORTS
    assert [len(S) for S in tr.supports] == [4, 3, 2, 1, 1]


def test_example2():
    sol, tr = sindy_solve(A2, b2, SolverParams(0.7))
    assert tr.refinements == 2
    np.testing.assert_allclose(sol.x, fx.EXAMPLE2_ITERATES[2], atol=1e-2)
    np.testing.assert_allclose(tr.iterates[1], fx.EXAMPLE2_ITERATES[1], atol=1e-2)
    assert one_based(sol.support) == [1, 2, 3]
    ordered = []
    for x, S in zip(tr.iterates, tr.supports):
        ordered.append([int(j) + 1 for j in S[np.argsort(-np.abs(x[S]), kind="stable")]])
    assert ordered == fx.EXAMPLE2_ORDERED_SUPPORTS


def test_empty_initial_support_is_flagged():
    sol, tr = sindy_solve(A1, b1, SolverParams(100.0))
    assert tr.status == EMPTY_INITIAL_SUPPORT and not tr.converged
    assert not np.any(sol.x) and sol.support.size == 0
    assert sol.residual_norm == pytest.approx(np.linalg.norm(b1))


def test_rank_deficient_raises():
    A = np.column_stack([A1[:, 0], A1[:, 0], A1[:, 1]])
    with pytest.raises(RankDeficientError):
        sindy_solve(A, b1, SolverParams(1.0))


def test_wide_matrix_raises():
    with pytest.raises(RankDeficientError):
        sindy_solve(np.ones((2, 3)), np.ones(2), SolverParams(1.0))


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        sindy_solve(A1, b1[:4], SolverParams(1.0))


def test_max_iter_safety_valve():
    with pytest.raises(SolverError):
        sindy_solve(A1, b1, SolverParams(0.802, max_iter=2))


def test_trace_to_dict_roundtrip_types():
    _, tr = sindy_solve(A1, b1, SolverParams(0.802))
    d = tr.to_dict()
    assert d["refinements"] == 4 and d["iterations_used"] == 4
    assert d["supports"][0] == [0, 1, 2, 3]
    assert len(d["objective_values"]) == 5


# ---- objective and surrogate ------------------------------------------------


def test_objective_zero():
    assert objective_value(np.eye(3), np.zeros(3), np.zeros(3), 1.0) == 0.0


@pytest.mark.parametrize("key", list(fx.TABLE1))
def test_table1_objectives(key):
    lam, expected = fx.TABLE1[key]
    A, b = (A2, b2) if key.startswith("example2") else (A1, b1)
    _, tr = sindy_solve(A, b, SolverParams(lam))
    np.testing.assert_allclose(tr.objective_values, expected, atol=1e-3)
    for x, F in zip(tr.iterates, tr.objective_values):
        assert objective_value(A, b, x, lam) == pytest.approx(direct_objective(A, b, x, lam), rel=1e-12)
        assert F == pytest.approx(direct_objective(A, b, x, lam), rel=1e-12)


def test_surrogate_example1_against_direct_formula():
    An, bn = normalized(A1, b1)
    x2, x1 = fx.EXAMPLE1_FULLPATH[2], fx.EXAMPLE1_FULLPATH[1]
    lam = 0.802
    # literal expansion, written independently of the implementation
    r = An @ x2 - bn
    d = x2 - x1
    ref = r @ r - (An @ d) @ (An @ d) + d @ d + lam**2 * 3
    assert surrogate_value(An, bn, x2, x1, lam) == pytest.approx(ref, rel=1e-12)


def test_surrogate_rejects_unnormalized():
    with pytest.raises(ValueError):
        surrogate_value(A2, b2, np.zeros(10), np.zeros(10), 1.0)


@settings(max_examples=1000, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(1e-3, 10.0))
def test_surrogate_majorizes(seed, lam):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 8))
    A = rng.standard_normal((int(rng.integers(n, 15)), n))
    A /= np.linalg.norm(A, 2)
    b = rng.standard_normal(A.shape[0])
    x = rng.standard_normal(n) * (rng.random(n) < 0.6)
    y = rng.standard_normal(n) * 3
    F = objective_value(A, b, x, lam)
    assert surrogate_value(A, b, x, y, lam) >= F - 1e-10 * max(1.0, F)
    assert surrogate_value(A, b, x, x, lam) == pytest.approx(F, rel=1e-12, abs=1e-12)


# ---- certificates -----------------------------------------------------------


def test_fixed_point_cases():
    sol, _ = sindy_solve(A1, b1, SolverParams(8.0))
    assert is_fixed_point(A1, b1, sol.x, 8.0)
    assert not is_fixed_point(A1, b1, fx.EXAMPLE1_X, 0.802)


def one_sweep(A, b, x, lam):
    S = np.flatnonzero(np.abs(x) >= lam)
    out = np.zeros(A.shape[1])
    if S.size:
        out[S] = np.linalg.lstsq(A[:, S], b, rcond=None)[0]
    return out


def test_fixed_point_agrees_with_one_sweep(rng):
    A = rng.standard_normal((8, 4))
    b = rng.standard_normal(8)
    candidates = [np.zeros(4)]
    for lam in (0.1, 0.5, 1.0, 10.0):
        candidates.extend(sindy_solve(A, b, SolverParams(lam))[1].iterates)
    for lam in (0.1, 0.5, 1.0, 10.0):
        for x in candidates:
            fixed = np.allclose(one_sweep(A, b, x, lam), x, rtol=0, atol=1e-8)
            assert is_fixed_point(A, b, x, lam) == fixed


def test_one_step_condition_cases():
    assert check_one_step_condition(A1, b1, [0], 5.0)
    assert not check_one_step_condition(A1, b1, [0], 0.802)
    for lam in np.linspace(0.01, 5.0, 60):
        assert not check_one_step_condition(A2, b2, [0, 1, 2], lam)


def test_global_min_conditions_trivial():
    assert check_global_min_conditions(np.eye(2), np.zeros(2), np.zeros(2), 1.0)


def test_global_min_conditions_reject_non_fixed_iterates():
    rng = np.random.default_rng(7)
    rejected = total = 0
    for _ in range(200):
        A = rng.standard_normal((6, 4))
        A /= np.linalg.norm(A, 2)
        b = rng.standard_normal(6)
        x0 = np.linalg.lstsq(A, b, rcond=None)[0]
        lam = float(np.median(np.abs(x0)))
        _, tr = sindy_solve(A, b, SolverParams(lam))
        for x in tr.iterates[:-1]:
            if not is_fixed_point(A, b, x, lam):
                total += 1
                # direct evaluation of the inequalities
                corr = np.abs(A.T @ (A @ x - b))
                nz = np.abs(x) > 1e-12
                ok = (np.all(corr[~nz] <= lam + 1e-8) and np.all(np.abs(x[nz]) >= lam - 1e-8)
                      and np.all(corr[nz] <= 1e-8))
                assert check_global_min_conditions(A, b, x, lam) == ok
                rejected += not ok
    assert total > 0 and rejected == total


def test_brute_force_identity_example():
    sol = brute_force_global_min(np.eye(2), np.array([2.0, 0.1]), 1.0)
    np.testing.assert_allclose(sol.x, [2.0, 0.0])
    assert sol.objective == pytest.approx(1.01)


def test_brute_force_example1_bounded_by_path():
    sol = brute_force_global_min(A1, b1, 0.802)
    assert sol.objective <= 1.8551 + 1e-4


def test_brute_force_guard():
    with pytest.raises(ValueError):
        brute_force_global_min(np.eye(21), np.ones(21), 1.0)


def test_support_masks_order():
    masks = support_masks(3).tolist()
    assert masks == [0, 1, 2, 4, 3, 5, 6, 7]


def test_brute_force_tie_prefers_smaller_then_lexicographic():
    # two symmetric columns: {0} and {1} tie exactly; the empty set loses
    A = np.eye(2)
    b = np.array([3.0, 3.0])
    sol = brute_force_global_min(A, b, 3.0)
    # F(empty)=18, F({0})=9+9=18, F({0,1})=18: all tie, smallest wins
    assert sol.support.size == 0
    sol = brute_force_global_min(A, b, 2.0)
    # F({0})=9+4=13 = F({1}) < F(empty)=18, F(full)=8 wins
    np.testing.assert_allclose(sol.x, [3.0, 3.0])
    sol = brute_force_global_min(np.eye(2), np.array([2.0, 2.0]), 1.9)
    # F({0}) = F({1}) = 4 + 3.61 = 7.61; F(full) = 7.22 < both
    assert sol.support.tolist() == [0, 1]
    sol = brute_force_global_min(np.eye(2), np.array([2.0, 2.0]), 2.0)
    # F(empty)=8, singletons 8, full 8: empty wins the tie
    assert sol.support.size == 0


def brute_force_reference(A, b, lam):
    # exhaustive oracle written with lstsq, no shared code
    n = A.shape[1]
    s = np.linalg.svd(A, compute_uv=False)[0]
    best = (np.inf, None)
    for k in range(n + 1):
        for S in itertools.combinations(range(n), k):
            x = np.zeros(n)
            if S:
                x[list(S)] = np.linalg.lstsq(A[:, S], b, rcond=None)[0]
            F = float(np.sum(((A @ x - b) / s) ** 2)) + lam**2 * k
            if best[1] is None or F < best[0] - 1e-12 * max(1, best[0]):
                best = (F, x)
    return best


def test_brute_force_matches_reference_oracle():
    rng = np.random.default_rng(3)
    for _ in range(40):
        A, b, lam = random_instance(rng, (6, 12), (2, 6))
        sol = brute_force_global_min(A, b, lam)
        F, x = brute_force_reference(A, b, lam)
        assert sol.objective == pytest.approx(F, rel=1e-9, abs=1e-12)
        np.testing.assert_allclose(sol.x, x, rtol=1e-7, atol=1e-9)


# ---- STRidge ----------------------------------------------------------------


def test_stridge_requires_gamma():
    with pytest.raises(ValueError):
        stridge_solve(A1, b1, SolverParams(1.0))


def test_stridge_vanishing_ridge():
    ref, _ = sindy_solve(A1, b1, SolverParams(8.0))
    sol, tr = stridge_solve(A1, b1, SolverParams(8.0, gamma=1e-12))
    np.testing.assert_allclose(sol.x, ref.x, atol=1e-6)


def test_sindy_dispatches_to_stridge():
    a, ta = sindy_solve(A1, b1, SolverParams(1.0, gamma=0.3))
    b_, tb = stridge_solve(A1, b1, SolverParams(1.0, gamma=0.3))
    assert ta.to_dict() == tb.to_dict()


def test_stridge_equals_augmented_sindy():
    rng = np.random.default_rng(11)
    A = rng.standard_normal((10, 6))
    b = rng.standard_normal(10)
    At, bt = ridge_augment(A, b, 0.5)
    assert At.shape == (16, 6) and np.array_equal(At[10:], 0.5 * np.eye(6))
    s1, t1 = stridge_solve(A, b, SolverParams(0.3, gamma=0.5))
    s2, t2 = sindy_solve(At, bt, SolverParams(0.3))
    for x, y in zip(t1.iterates, t2.iterates):
        assert np.array_equal(x, y)


def test_stridge_duplicated_column_fixed_point():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((12, 4))
    A = np.column_stack([A, A[:, 1]])
    b = A[:, :3] @ np.array([2.0, -1.5, 1.0])
    sol, tr = stridge_solve(A, b, SolverParams(0.2, gamma=0.1))
    assert tr.converged
    At, bt = ridge_augment(A, b, 0.1)
    assert is_fixed_point(At, bt, sol.x, 0.2)


# ---- invariants on random instances -------------------------------------------


def check_trace_invariants(A, b, lam, sol, tr):
    n = A.shape[1]
    assert tr.iterations_used <= n
    for k in range(len(tr.iterates) - 1):
        nxt = set(np.flatnonzero(tr.iterates[k + 1]).tolist())
        assert set(tr.supports[k + 1].tolist()) <= nxt <= set(tr.supports[k].tolist())
    # objective drops strictly until the support stops changing
    prev = np.arange(n)
    for k in range(len(tr.iterates) - 1):
        if np.array_equal(tr.supports[k], prev):
            assert tr.objective_values[k + 1] == pytest.approx(tr.objective_values[k], rel=1e-12, abs=1e-14)
        else:
            assert tr.objective_values[k + 1] < tr.objective_values[k]
        prev = tr.supports[k]
    bn = np.linalg.norm(b)
    r = tr.residual_norms
    assert all(r[k + 1] >= r[k] - 1e-12 * bn for k in range(len(r) - 1))
    assert all(v <= bn * (1 + 1e-12) for v in r)
    if tr.converged:
        assert is_fixed_point(A, b, sol.x, lam)
        s = len(tr.supports[-1])
        if s:
            assert tr.iterations_used <= len(tr.supports[0]) - s + 1


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_trace_invariants(seed):
    rng = np.random.default_rng(seed)
    A, b, lam = random_instance(rng)
    sol, tr = sindy_solve(A, b, SolverParams(lam))
    check_trace_invariants(A, b, lam, sol, tr)
    # solution invariants
    assert np.array_equal(sol.support, np.flatnonzero(sol.x))
    assert np.all(np.abs(sol.x[sol.support]) >= lam)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_one_step_recovery_on_consistent_systems(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    A = rng.standard_normal((int(rng.integers(n, 20)), n))
    x_star = np.zeros(n)
    S = np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
    x_star[S] = rng.choice([-1, 1], S.size) * rng.uniform(1.0, 5.0, S.size)
    b = A @ x_star
    lam = float(rng.uniform(0.05, np.abs(x_star[S]).min()))
    if check_one_step_condition(A, b, S, lam):
        sol, tr = sindy_solve(A, b, SolverParams(lam))
        assert tr.refinements == 1
        np.testing.assert_allclose(sol.x, x_star, atol=1e-8 * max(1.0, np.abs(x_star).max()))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_oracle_dominates_and_is_fixed(seed):
    rng = np.random.default_rng(seed)
    A, b, lam = random_instance(rng, (5, 12), (2, 6))
    sol, _ = sindy_solve(A, b, SolverParams(lam))
    oracle = brute_force_global_min(A, b, lam)
    assert sol.objective >= oracle.objective - 1e-10 * max(1.0, oracle.objective)
    s = spectral_norm(A)
    assert check_global_min_conditions(A / s, b / s, oracle.x, lam)
    S = threshold_support(oracle.x, lam)
    assert np.array_equal(S, oracle.support)
    assert is_fixed_point(A, b, oracle.x, lam)
