import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from wavewell import (
    Domain,
    Rectangle,
    analyze,
    eigenpair,
    grad_norm_sq,
    inner,
    integrate,
    l2_norm_sq,
    lp_norm,
    synthesize,
)

from conftest import decayed_field


class TestDomain:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            Domain(-1.0, 8)
        with pytest.raises(ValueError):
            Domain(1.0, 0)
        with pytest.raises(ValueError):
            Domain(1.0, 8, n_quad=16)  # below the 4K margin

    def test_default_quadrature_size(self):
        assert Domain(2.0, 10).n_quad == 40


class TestEigenpair:
    @pytest.mark.parametrize("L, j, expected", [
        (np.pi, 1, 1.0),
        (np.pi, 3, 9.0),
        (2.0, 2, np.pi ** 2),
    ])
    def test_eigenvalues(self, L, j, expected):
        lam, _ = eigenpair(Domain(L, 8), j)
        assert lam == pytest.approx(expected, rel=1e-15)

    def test_modes_normalized(self, dom):
        for j in (1, 5, dom.n_modes):
            _, mode = eigenpair(dom, j)
            assert integrate(dom, mode ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_out_of_range(self, dom):
        with pytest.raises(ValueError):
            eigenpair(dom, 0)
        with pytest.raises(ValueError):
            eigenpair(dom, dom.n_modes + 1)


class TestSynthesizeAnalyze:
    def test_zero_field(self, dom):
        assert np.all(synthesize(dom, np.zeros(dom.n_modes)) == 0.0)

    def test_single_mode(self, dom):
        e1 = np.zeros(dom.n_modes)
        e1[0] = 1.0
        expected = np.sqrt(2.0 / np.pi) * np.sin(dom.nodes)
        np.testing.assert_allclose(synthesize(dom, e1), expected, atol=1e-14)

    def test_two_modes(self, dom):
        gamma = np.zeros(dom.n_modes)
        gamma[:2] = 1.0
        expected = np.sqrt(2.0 / np.pi) * (np.sin(dom.nodes) + np.sin(2 * dom.nodes))
        np.testing.assert_allclose(synthesize(dom, gamma), expected, atol=1e-13)

    def test_analyze_sin(self, dom):
        gamma = analyze(dom, np.sin(dom.nodes))
        assert gamma[0] == pytest.approx(np.sqrt(np.pi / 2.0), rel=1e-13)
        assert np.abs(gamma[1:]).max() < 1e-12

    def test_length_mismatch(self, dom):
        with pytest.raises(ValueError):
            synthesize(dom, np.zeros(dom.n_modes + 1))
        with pytest.raises(ValueError):
            analyze(dom, np.zeros(dom.n_quad - 1))

    def test_round_trip_on_e2(self, dom):
        e2 = np.zeros(dom.n_modes)
        e2[1] = 1.0
        np.testing.assert_allclose(analyze(dom, synthesize(dom, e2)), e2, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_round_trip_random(self, dom, seed):
        f = np.random.default_rng(seed).standard_normal(dom.n_modes)
        np.testing.assert_allclose(analyze(dom, synthesize(dom, f)), f, atol=1e-12)


class TestNormsAndQuadrature:
    def test_orthonormality_gram(self, dom64):
        gram = (dom64.modes * dom64.weights) @ dom64.modes.T
        assert np.abs(gram - np.eye(dom64.n_modes)).max() < 1e-10

    def test_parseval(self, dom):
        rng = np.random.default_rng(7)
        for _ in range(50):
            f = rng.standard_normal(dom.n_modes)
            quad_sq = integrate(dom, synthesize(dom, f) ** 2)
            assert quad_sq == pytest.approx(l2_norm_sq(dom, f), abs=1e-10)

    def test_grad_norm_examples(self, dom, sin_field):
        assert grad_norm_sq(dom, np.zeros(dom.n_modes)) == 0.0
        e1 = np.zeros(dom.n_modes)
        e1[0] = 1.0
        assert grad_norm_sq(dom, e1) == pytest.approx(1.0, rel=1e-14)
        # int cos^2 over (0, pi)
        assert grad_norm_sq(dom, sin_field) == pytest.approx(np.pi / 2.0, rel=1e-13)

    def test_poincare_lower_bound(self, dom):
        rng = np.random.default_rng(11)
        lam1 = dom.eigenvalues[0]
        for _ in range(200):
            f = rng.standard_normal(dom.n_modes)
            assert grad_norm_sq(dom, f) >= lam1 * l2_norm_sq(dom, f) - 1e-12

    def test_l2_norm_sin(self, dom, sin_field):
        assert l2_norm_sq(dom, sin_field) == pytest.approx(np.pi / 2.0, rel=1e-13)

    def test_lp_norm_against_quadrature_oracle(self, dom):
        s = np.sin(dom.nodes)
        # independent oracle: adaptive quadrature of sin^4 on (0, pi)
        ref, _ = quad(lambda x: np.sin(x) ** 4, 0.0, np.pi)
        assert ref == pytest.approx(3.0 * np.pi / 8.0, rel=1e-12)
        assert lp_norm(dom, s, 4.0) ** 4 == pytest.approx(ref, rel=1e-12)

    def test_lp_norm_zero_and_inf(self, dom):
        zero = np.zeros(dom.n_quad)
        assert lp_norm(dom, zero, 3.0) == 0.0
        vals = synthesize(dom, decayed_field(dom, np.random.default_rng(0)))
        assert lp_norm(dom, vals, np.inf) == np.abs(vals).max()

    def test_lp_norm_rejects_p_below_one(self, dom):
        with pytest.raises(ValueError):
            lp_norm(dom, np.zeros(dom.n_quad), 0.5)

    def test_inner_is_coefficient_dot(self, dom):
        rng = np.random.default_rng(5)
        f, g = rng.standard_normal((2, dom.n_modes))
        assert inner(dom, f, g) == pytest.approx(float(f @ g), rel=1e-14)

    def test_nonsmooth_integrand_accuracy(self, dom64):
        # |u|^4 with interior sign changes against adaptive quadrature
        u = lambda x: np.sin(3 * x) + 0.3 * np.cos(x)
        ref, _ = quad(lambda x: np.abs(u(x)) ** 4, 0.0, np.pi, limit=200)
        val = integrate(dom64, np.abs(u(dom64.nodes)) ** 4)
        assert val == pytest.approx(ref, rel=1e-12)


class TestRectangle:
    def test_contracts(self):
        r = Rectangle((np.pi, 2.0), (5, 4))
        gram = (r.modes * r.weights) @ r.modes.T
        assert np.abs(gram - np.eye(r.n_modes)).max() < 1e-10
        rng = np.random.default_rng(1)
        f = rng.standard_normal(r.n_modes)
        np.testing.assert_allclose(analyze(r, synthesize(r, f)), f, atol=1e-11)
        assert integrate(r, synthesize(r, f) ** 2) == pytest.approx(
            l2_norm_sq(r, f), abs=1e-10)

    def test_eigenvalues_sorted_tensor(self):
        r = Rectangle((np.pi, np.pi), (3, 3))
        assert np.all(np.diff(r.eigenvalues) >= 0)
        assert r.eigenvalues[0] == pytest.approx(2.0, rel=1e-14)

    def test_poincare(self):
        r = Rectangle((1.0, 2.0), (4, 4))
        rng = np.random.default_rng(2)
        lam1 = r.eigenvalues[0]
        for _ in range(50):
            f = rng.standard_normal(r.n_modes)
            assert grad_norm_sq(r, f) >= lam1 * l2_norm_sq(r, f) - 1e-12
