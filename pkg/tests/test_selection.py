import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import grid_reduction, random_context
from womp.selection import RULES, SelectionContext, score_all, univariate_lad_argmin

ALL_RULES = sorted(RULES)


def ctx_of(A, y, w, lam, x=None, S=()):
    return SelectionContext.build(np.asarray(A, float), np.asarray(y, float), np.asarray(w, float), lam, x, S)


def lad_objective(y, a, t):
    return np.abs(y - t * a).sum()


# univariate LAD ---------------------------------------------------------------

def test_lad_median_of_three():
    t, i = univariate_lad_argmin([1.0, 2.0, 3.0], [1.0, 1.0, 1.0])
    assert t == 2.0 and i == 1


def test_lad_dominant_weight():
    t, i = univariate_lad_argmin([1.0, 2.0, 3.0], [10.0, 1.0, 1.0])
    assert t == pytest.approx(0.1) and i == 0


def test_lad_zero_direction():
    with pytest.raises(ValueError):
        univariate_lad_argmin([1.0, 2.0], [0.0, 0.0])


def test_lad_skips_zero_entries():
    t, _ = univariate_lad_argmin([5.0, 2.0, 3.0], [0.0, 1.0, 1.0])
    assert lad_objective(np.array([5.0, 2.0, 3.0]), np.array([0.0, 1.0, 1.0]), t) == pytest.approx(6.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 9))
def test_lad_beats_breakpoints(seed, m):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(m)
    a = rng.standard_normal(m)
    t, i = univariate_lad_argmin(y, a)
    best = min(lad_objective(y, a, b) for b in y / a)
    assert lad_objective(y, a, t) <= best + 1e-12
    # the minimizer is the breakpoint of row i
    assert t == pytest.approx(y[i] / a[i])


# closed-form examples ---------------------------------------------------------

E2 = np.eye(2)


def test_lasso_l1_identity_example():
    assert RULES["lasso-l1"](ctx_of(E2, [1, 0], [1, 1], 0.5), 0) == pytest.approx(0.5625)


def test_srlasso_l1_identity_example():
    assert RULES["srlasso-l1"](ctx_of(E2, [1, 0], [1, 1], 0.5), 0) == pytest.approx(0.5)


def test_srlasso_l1_guard():
    assert RULES["srlasso-l1"](ctx_of(E2, [1, 0.3], [2, 2], 1.0), 0) == 0


def test_srlasso_l1_weak_correlation_is_zero():
    # t = 0 is optimal when |<r, a_j>| <= lam w_j ||r||
    ctx = ctx_of(E2, [0.1, 1.0], [1, 1], 0.5)
    assert RULES["srlasso-l1"](ctx, 0) == 0


def test_ladlasso_l1_exact_fit():
    assert RULES["ladlasso-l1"](ctx_of(E2, [1, 0], [1, 1], 0.0), 0) == pytest.approx(1.0)


def test_srlasso_l0_example():
    assert RULES["srlasso-l0"](ctx_of(E2, [1, 0], [1, 1], 0.3), 0) == pytest.approx(0.7)


@pytest.mark.parametrize("rule", ["lasso-l1", "lasso-l0"])
def test_lambda_zero_is_squared_correlation(rule):
    rng = np.random.default_rng(7)
    A = rng.standard_normal((6, 9))
    A /= np.linalg.norm(A, axis=0)
    y = rng.standard_normal(6)
    ctx = ctx_of(A, y, np.ones(9), 0.0)
    np.testing.assert_allclose(score_all(ctx, rule), (A.T @ y) ** 2, rtol=1e-12)


def test_lasso_l0_zero_coordinate_in_support():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((5, 4))
    A /= np.linalg.norm(A, axis=0)
    y = A[:, 0] * 2.0
    x = np.array([2.0, 0.0, 0.0, 0.0])
    ctx = ctx_of(A, y, np.ones(4), 0.1, x, [0, 1])
    assert RULES["lasso-l0"](ctx, 1) == 0


def test_ladlasso_l0_zero_residual_in_support():
    A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    x = np.array([2.0, 0.0])
    y = A @ x
    w = np.array([1.5, 1.0])
    lam = 2.0
    ctx = ctx_of(A, y, w, lam, x, [0])
    expected = max(-np.abs(x[0] * A[:, 0]).sum() + lam * w[0] ** 2, 0.0)
    assert RULES["ladlasso-l0"](ctx, 0) == pytest.approx(expected)


def test_lad_l0_matches_l1_at_zero():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((6, 10))
    y = rng.standard_normal(6)
    ctx = ctx_of(A, y, np.ones(10), 0.0)
    np.testing.assert_allclose(score_all(ctx, "ladlasso-l0"), score_all(ctx, "ladlasso-l1"), rtol=1e-12)


def test_lad_at_optimum_in_support_is_zero():
    from oracles import lad_vertex_solution

    rng = np.random.default_rng(8)
    A = rng.standard_normal((6, 10))
    y = rng.standard_normal(6)
    S = [2, 7]
    x = np.zeros(10)
    x[S] = lad_vertex_solution(A[:, S], y)
    ctx = ctx_of(A, y, np.ones(10), 0.0, x, S)
    for j in S:
        assert RULES["ladlasso-l1"](ctx, j) == pytest.approx(0, abs=1e-10)


@pytest.mark.parametrize("rule", ALL_RULES)
def test_zero_residual(rule):
    ctx = ctx_of(np.eye(3), np.zeros(3), np.ones(3), 0.0)
    np.testing.assert_array_equal(score_all(ctx, rule), 0)


@pytest.mark.parametrize("rule", ALL_RULES)
def test_single_column(rule):
    ctx = ctx_of([[0.6], [0.8]], [1.0, 2.0], [1.3], 0.2)
    out = score_all(ctx, rule)
    assert out.shape == (1,) and out[0] == pytest.approx(RULES[rule](ctx, 0), abs=1e-14)


# oracles ----------------------------------------------------------------------

@pytest.mark.parametrize("rule", ALL_RULES)
@pytest.mark.parametrize("lam", [0.0, 0.3, 1.5])
def test_grid_oracle(rule, lam):
    rng = np.random.default_rng(hash((rule, lam)) % 2**32)
    for _ in range(3):
        A, y, w, lam_, x, S = random_context(rng, rule, m=6, n=10, lam=lam)
        ctx = ctx_of(A, y, w, lam_, x, S)
        got = score_all(ctx, rule)
        for j in range(10):
            ref = grid_reduction(rule, A, y, w, lam_, x, j)
            assert got[j] == pytest.approx(ref, abs=1e-6), (rule, lam, j)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(ALL_RULES), st.floats(0, 3))
def test_vectorized_matches_scalar(seed, rule, lam):
    rng = np.random.default_rng(seed)
    A, y, w, lam, x, S = random_context(rng, rule, lam=lam)
    ctx = ctx_of(A, y, w, lam, x, S)
    vec = score_all(ctx, rule)
    ref = np.array([RULES[rule](ctx, j) for j in range(A.shape[1])])
    np.testing.assert_allclose(vec, ref, rtol=1e-12, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(ALL_RULES), st.floats(0, 3))
def test_reduction_bounds(seed, rule, lam):
    """0 <= Delta <= G(x), since the loss is nonnegative."""
    from oracles import loss_value

    rng = np.random.default_rng(seed)
    A, y, w, lam, x, S = random_context(rng, rule, lam=lam)
    ctx = ctx_of(A, y, w, lam, x, S)
    d = score_all(ctx, rule)
    assert np.all(d >= 0)
    assert np.all(d <= loss_value(rule, A, y, w, lam, x) * (1 + 1e-12) + 1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(ALL_RULES))
def test_column_permutation_equivariance(seed, rule):
    rng = np.random.default_rng(seed)
    A, y, w, lam, x, S = random_context(rng, rule)
    perm = rng.permutation(A.shape[1])
    inv = np.argsort(perm)
    d = score_all(ctx_of(A, y, w, lam, x, S), rule)
    d_perm = score_all(ctx_of(A[:, perm], y, w[perm], lam, x[perm], inv[S]), rule)
    np.testing.assert_allclose(d_perm, d[perm], rtol=1e-10, atol=1e-12)


def test_context_rejects_off_support_iterate():
    with pytest.raises(ValueError):
        ctx_of(np.eye(2), [1, 1], [1, 1], 0.1, [1.0, 0.0], [1])


def test_context_ls_check():
    A = np.array([[2.0, 0.0], [0.0, 1.0]])
    with pytest.raises(Exception):
        SelectionContext.build(A, np.ones(2), np.ones(2), 0.0, check="ls")
