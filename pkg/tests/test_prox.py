import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsidenoise import prox
from hsidenoise.oracles import log_norm_normal_bound, jacobi_eigvalsh, log_prox_oracle, scan_minimize


def column_objective(y, w, alpha):
    return 0.5 * np.sum((y - w) ** 2) + alpha * math.log1p(np.linalg.norm(w))


class TestNorms:
    def test_l2log_values(self):
        assert prox.l2log_norm(np.zeros((3, 2))) == 0.0
        assert prox.l2log_norm(np.array([[1.0], [0.0]])) == pytest.approx(math.log(2))
        A = np.array([[3.0, 0.0], [0.0, 4.0]])
        assert prox.l2log_norm(A) == pytest.approx(math.log(4) + math.log(5))
        assert prox.l2log_norm(A) < prox.l21_norm(A) == 7.0

    def test_logdet_values(self):
        assert prox.logdet_norm(np.zeros((2, 3))) == 0.0
        assert prox.logdet_norm(np.eye(2)) == pytest.approx(2 * math.log(2))
        rng = np.random.default_rng(0)
        A = rng.normal(size=(4, 3))
        sig = np.sqrt(jacobi_eigvalsh(A.T @ A))
        assert prox.logdet_norm(A) == pytest.approx(np.log1p(sig).sum(), abs=1e-10)

    def test_logdet_orthogonal_invariance(self):
        rng = np.random.default_rng(1)
        A = rng.normal(size=(5, 3))
        Q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
        assert prox.logdet_norm(Q @ A) == pytest.approx(prox.logdet_norm(A), abs=1e-10)


class TestL2LogShrink:
    def test_alpha_zero_identity(self):
        Y = np.random.default_rng(2).normal(size=(4, 6))
        np.testing.assert_array_equal(prox.l2log_shrink(Y, 0.0), Y)

    def test_small_column_killed(self):
        y = np.array([[0.1], [0.0]])
        np.testing.assert_array_equal(prox.l2log_shrink(y, 1.0), 0.0)

    def test_against_scan_r3_alpha_half(self):
        y = np.array([[3.0], [0.0]])
        x_ref, f_ref = log_prox_oracle(3.0, 0.5)
        w = prox.l2log_shrink(y, 0.5)
        assert w[0, 0] == pytest.approx(x_ref, abs=1e-6)
        assert column_objective(y, w, 0.5) == pytest.approx(f_ref, abs=1e-10)
        assert w[0, 0] == pytest.approx(1 + math.sqrt(3.5), abs=1e-12)

    def test_zero_columns_and_direction(self):
        Y = np.array([[0.0, 3.0], [0.0, 4.0]])
        W = prox.l2log_shrink(Y, 0.5)
        np.testing.assert_array_equal(W[:, 0], 0.0)
        assert W[0, 1] / W[1, 1] == pytest.approx(0.75)

    def test_tie_breaks_to_zero(self):
        # (1+r)^2/4 == alpha exactly -> zero column
        r = 1.0
        y = np.array([[r]])
        assert prox.l2log_shrink(y, (1 + r) ** 2 / 4)[0, 0] == 0.0

    def test_oracle_optimality_bulk(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            r = float(rng.uniform(0, 6))
            alpha = float(rng.uniform(0, 4))
            s = prox.log_scalar_shrink(np.array([r]), alpha)[0]
            f = 0.5 * (s - r) ** 2 + alpha * math.log1p(s)
            assert f <= log_prox_oracle(r, alpha)[1] + 1e-8

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0, 20), st.floats(0, 5), st.floats(0, 5))
    def test_monotone_in_alpha(self, r, a1, a2):
        lo, hi = sorted((a1, a2))
        s_lo = prox.log_scalar_shrink(np.array([r]), lo)[0]
        s_hi = prox.log_scalar_shrink(np.array([r]), hi)[0]
        assert s_hi <= s_lo + 1e-12
        assert s_lo <= r + 1e-12

    def test_stacked_input(self):
        rng = np.random.default_rng(4)
        Y = rng.normal(size=(3, 5, 4))
        W = prox.l2log_shrink(Y, 1.2)
        for k in range(3):
            np.testing.assert_allclose(W[k], prox.l2log_shrink(Y[k], 1.2))


class TestLogdetSvt:
    def test_delta_zero(self):
        X = np.random.default_rng(5).normal(size=(5, 3))
        np.testing.assert_allclose(prox.logdet_svt(X, 0.0), X, atol=1e-12)

    def test_threshold_forces_zero(self):
        np.testing.assert_array_equal(prox.logdet_svt(np.diag([0.1, 0.1]), 1.0), 0.0)

    def test_per_singular_value_scan(self):
        out = prox.logdet_svt(np.diag([5.0, 2.0, 0.01]), 0.3)
        sig = np.diag(out)
        for s_in, s_out in zip([5.0, 2.0, 0.01], sig):
            assert s_out == pytest.approx(log_prox_oracle(s_in, 0.3)[0], abs=1e-6)

    def test_no_negative_singular_values(self):
        # sigma < delta < 1: stationary point is negative, must map to zero
        np.testing.assert_array_equal(prox.logdet_svt(np.diag([0.1]), 0.2), 0.0)


class TestConvex:
    def test_soft_threshold(self):
        assert prox.soft_threshold(0.5, 0.2) == pytest.approx(0.3)
        assert prox.soft_threshold(-0.5, 0.2) == pytest.approx(-0.3)
        assert prox.soft_threshold(0.1, 0.2) == 0.0

    def test_nuclear(self):
        X = np.random.default_rng(6).normal(size=(4, 3))
        np.testing.assert_allclose(prox.nuclear_svt(X, 0.0), X, atol=1e-12)
        np.testing.assert_allclose(prox.nuclear_svt(np.diag([3.0, 1.0]), 2.0), np.diag([1.0, 0.0]),
                                   atol=1e-12)

    def test_nuclear_local_optimality(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(5, 4))
        theta = 0.8
        L = prox.nuclear_svt(X, theta)

        def obj(Lm):
            return 0.5 * np.sum((X - Lm) ** 2) + theta * np.linalg.svd(Lm, compute_uv=False).sum()

        base = obj(L)
        for _ in range(200):
            assert base <= obj(L + 1e-3 * rng.normal(size=L.shape)) + 1e-12

    def test_l21(self):
        y = np.array([[3.0, 0.3], [0.0, 0.4]])
        W = prox.l21_shrink(y, 1.0)
        np.testing.assert_allclose(W[:, 0], [2.0, 0.0])
        np.testing.assert_array_equal(W[:, 1], 0.0)

    def test_l21_scan(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            y = rng.normal(size=3)
            theta = float(rng.uniform(0, 2))
            r = np.linalg.norm(y)
            _, f_ref = scan_minimize(lambda s: 0.5 * (s - r) ** 2 + theta * s, 0.0, r)
            w = prox.l21_shrink(y[:, None], theta)[:, 0]
            f = 0.5 * np.sum((y - w) ** 2) + theta * np.linalg.norm(w)
            assert f <= f_ref + 1e-8


@pytest.mark.parametrize("op", [prox.l2log_shrink, prox.logdet_svt, prox.nuclear_svt,
                                prox.l21_shrink, prox.soft_threshold])
@pytest.mark.parametrize("t", [0.0, 0.5, 10.0])
def test_zero_maps_to_zero(op, t):
    np.testing.assert_array_equal(op(np.zeros((4, 3)), t), 0.0)


def test_negative_threshold_rejected():
    with pytest.raises(ValueError):
        prox.l2log_shrink(np.ones((2, 2)), -1.0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_triangle_inequality(seed):
    rng = np.random.default_rng(seed)
    shape = tuple(rng.integers(1, 6, size=2))
    A = rng.normal(size=shape) * rng.uniform(0, 5)
    B = rng.normal(size=shape) * rng.uniform(0, 5)
    assert prox.l2log_norm(A + B) <= prox.l2log_norm(A) + prox.l2log_norm(B) + 1e-12


def test_log_norm_expectation_bounds():
    rng = np.random.default_rng(9)
    d = 5
    x = rng.standard_normal((20_000, d))
    vals = np.log1p(np.linalg.norm(x, axis=1))
    assert vals.mean() + 3 * vals.std() / math.sqrt(len(vals)) < log_norm_normal_bound(d)
    u = rng.uniform(size=(20_000, d))
    vals = np.log1p(np.linalg.norm(u, axis=1))
    assert vals.mean() + 3 * vals.std() / math.sqrt(len(vals)) < d / 2
    assert log_norm_normal_bound(d) == pytest.approx(2 ** 0.25 * math.gamma(2.75) / math.gamma(2.5))
