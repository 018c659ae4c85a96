import numpy as np
import pytest

from wavewell import (
    Domain,
    classify,
    depth_estimate,
    grad_norm_sq,
    lambda_star,
    lp_norm,
    nehari_I,
    poincare_constant,
    potential_J,
    project_to_nehari,
    sobolev_constant,
    synthesize,
    xi0,
)
from wavewell.nonlinearity import Nonlinearity, PowerTerm
from wavewell.well import (
    AmbiguousCaseError,
    DegenerateNonlinearityError,
    NoScalingRootError,
    rayleigh_quotient_max,
)

from conftest import decayed_field


class TestSobolevConstants:
    def test_sharp_poincare(self):
        assert sobolev_constant(Domain(np.pi, 8), 2.0) == pytest.approx(1.0, rel=1e-14)
        assert sobolev_constant(Domain(2.0, 8), 2.0) == pytest.approx(2.0 / np.pi)

    def test_sup_norm_constant(self):
        assert sobolev_constant(Domain(np.pi, 8), np.inf) == pytest.approx(
            np.sqrt(np.pi) / 2.0, rel=1e-14)

    def test_interpolation_q4(self):
        c4 = sobolev_constant(Domain(np.pi, 8), 4.0)
        assert c4 == pytest.approx((np.pi / 4.0) ** 0.25, rel=1e-14)

    def test_rejects_q_below_one(self, dom):
        with pytest.raises(ValueError):
            sobolev_constant(dom, 0.5)

    @pytest.mark.parametrize("q", [2.0, 3.0, 4.0, 7.5, np.inf])
    def test_validity_on_random_fields(self, dom, q):
        c_q = sobolev_constant(dom, q)
        rng = np.random.default_rng(17)
        for _ in range(200):
            f = rng.standard_normal(dom.n_modes) / np.arange(1, dom.n_modes + 1)
            ratio = lp_norm(dom, synthesize(dom, f), q) / np.sqrt(grad_norm_sq(dom, f))
            assert ratio <= c_q * (1.0 + 1e-12)

    def test_ascent_oracle_respects_bounds(self, dom64):
        # q = 2: the certified constant is sharp, the ascent should reach it
        found = rayleigh_quotient_max(dom64, 2.0, n_steps=300, seed=0)
        assert found <= 1.0 + 1e-10
        assert found > 0.999
        # q = inf: sharp over H^1_0, slightly unreachable in a truncated span
        c_inf = sobolev_constant(dom64, np.inf)
        found = rayleigh_quotient_max(dom64, np.inf, n_steps=300, seed=0)
        assert found <= c_inf * (1.0 + 1e-10)
        assert found > 0.97 * c_inf
        # q = 4: interpolation bound is valid but not sharp
        found = rayleigh_quotient_max(dom64, 4.0, n_steps=300, seed=0)
        assert found <= sobolev_constant(dom64, 4.0)


class TestXi0:
    def test_single_term_closed_form(self, dom, nl_cubic_const):
        # A1 C4^4 xi^2 = 1 with A1 = 1 on (0, pi)
        c4 = sobolev_constant(dom, 4.0)
        assert xi0(dom, nl_cubic_const) == pytest.approx(c4 ** -2.0, rel=1e-12)
        assert c4 ** -2.0 == pytest.approx(np.sqrt(4.0 / np.pi), rel=1e-12)

    def test_two_equal_terms_shrink_by_sqrt2(self, dom, nl_cubic_const):
        nl2 = Nonlinearity((
            PowerTerm(np.ones(dom.n_quad), 3.0),
            PowerTerm(np.ones(dom.n_quad), 3.0 + 1e-9),  # strict chain
        ))
        ratio = xi0(dom, nl2) / xi0(dom, nl_cubic_const)
        assert ratio == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-6)

    def test_monotone_in_bounds(self, dom):
        nl_small = Nonlinearity((PowerTerm(np.cos(dom.nodes), 3.0),))
        nl_big = Nonlinearity((PowerTerm(2.0 * np.cos(dom.nodes), 3.0),))
        assert xi0(dom, nl_big) < xi0(dom, nl_small)

    def test_residual_tolerance(self, dom, nl_combined):
        root = xi0(dom, nl_combined)
        phi = sum(
            t.bound * sobolev_constant(dom, t.exponent + 1.0) ** (t.exponent + 1.0)
            * root ** (t.exponent - 1.0)
            for t in nl_combined.a_terms
        )
        assert abs(phi - 1.0) <= 1e-12

    def test_degenerate(self, dom):
        nl = Nonlinearity((PowerTerm(np.zeros(dom.n_quad), 3.0),))
        with pytest.raises(DegenerateNonlinearityError):
            xi0(dom, nl)


class TestLambdaStar:
    def test_closed_form_sin(self, dom, sin_field, nl_cubic_const):
        roots = sorted(lambda_star(dom, nl_cubic_const, sin_field))
        assert roots[1] == pytest.approx(2.0 / np.sqrt(3.0), abs=1e-8)
        assert roots[0] == pytest.approx(-2.0 / np.sqrt(3.0), abs=1e-8)

    def test_roots_symmetric_for_odd_form(self, dom, nl_cubic_cos):
        rng = np.random.default_rng(2)
        found = 0
        for _ in range(50):
            z = decayed_field(dom, rng)
            try:
                roots = lambda_star(dom, nl_cubic_cos, z)
            except NoScalingRootError:
                continue
            found += 1
            assert sorted(roots) == sorted(-r for r in roots)
        assert found > 10

    def test_on_manifold_gives_unity(self, dom, sin_field, nl_cubic_const):
        z = project_to_nehari(dom, nl_cubic_const, sin_field)
        roots = lambda_star(dom, nl_cubic_const, z)
        assert max(roots) == pytest.approx(1.0, abs=1e-9)

    def test_zero_direction_rejected(self, dom, nl_cubic_const):
        with pytest.raises(ValueError):
            lambda_star(dom, nl_cubic_const, np.zeros(dom.n_modes))

    def test_no_root_when_leading_integral_negative(self, dom, nl_cubic_cos):
        # field supported where cos x < 0: no scaling reaches the manifold
        x = dom.nodes
        bump = np.where(x > np.pi / 2 + 0.2,
                        np.sin(np.pi * (x - np.pi / 2 - 0.2) / (np.pi / 2 - 0.2)) ** 2,
                        0.0)
        from wavewell import analyze
        z = analyze(dom, bump)
        with pytest.raises(NoScalingRootError):
            lambda_star(dom, nl_cubic_cos, z)

    def test_f2_signed_uniqueness(self, dom):
        from wavewell import analyze
        from wavewell.nonlinearity import ABS
        nl = Nonlinearity((PowerTerm(np.cos(dom.nodes), 3.0, ABS),), form="F2")
        bump = np.where(dom.nodes < np.pi / 2,
                        np.sin(2.0 * dom.nodes) ** 2, 0.0)
        z = analyze(dom, bump)  # leading signed integral > 0
        roots = lambda_star(dom, nl, z)
        assert len(roots) == 1 and roots[0] > 0
        roots_neg = lambda_star(dom, nl, -z)  # flips the signed integral
        assert len(roots_neg) == 1 and roots_neg[0] < 0


class TestProjection:
    def test_contracting_case(self, dom, sin_field, nl_cubic_const):
        z = 2.0 * sin_field
        assert nehari_I(dom, nl_cubic_const, z) == pytest.approx(-4 * np.pi, rel=1e-12)
        proj = project_to_nehari(dom, nl_cubic_const, z)
        np.testing.assert_allclose(
            proj, (2.0 / np.sqrt(3.0)) * sin_field, rtol=1e-10)

    def test_expanding_case(self, dom, sin_field, nl_cubic_const):
        proj = project_to_nehari(dom, nl_cubic_const, 0.5 * sin_field)
        np.testing.assert_allclose(
            proj / (0.5 * sin_field), 4.0 / np.sqrt(3.0), rtol=1e-10)

    def test_manifold_point_unchanged(self, dom, sin_field, nl_cubic_const):
        z = (2.0 / np.sqrt(3.0)) * sin_field
        np.testing.assert_allclose(
            project_to_nehari(dom, nl_cubic_const, z), z, rtol=1e-9)

    def test_negative_I_contracts_on_random_fields(self, dom, nl_cubic_const):
        rng = np.random.default_rng(31)
        checked = 0
        while checked < 1000:
            z = decayed_field(dom, rng, scale=rng.uniform(1.0, 6.0))
            if nehari_I(dom, nl_cubic_const, z) >= 0:
                continue
            proj = project_to_nehari(dom, nl_cubic_const, z)
            lam = proj[np.argmax(np.abs(z))] / z[np.argmax(np.abs(z))]
            assert 0.0 < lam < 1.0
            assert abs(nehari_I(dom, nl_cubic_const, proj)) <= 1e-9 * max(
                1.0, grad_norm_sq(dom, proj))
            checked += 1


class TestClassify:
    def test_zero_field(self, dom, nl_cubic_const):
        assert classify(dom, nl_cubic_const, np.zeros(dom.n_modes)).region == "zero"

    def test_half_sin_in_well(self, dom, sin_field, nl_cubic_const):
        cls = classify(dom, nl_cubic_const, 0.5 * sin_field)
        assert cls.region == "W_interior"
        assert cls.I_value == pytest.approx(np.pi / 8 - 3 * np.pi / 128, rel=1e-12)

    def test_two_sin_outside(self, dom, sin_field, nl_cubic_const):
        cls = classify(dom, nl_cubic_const, 2.0 * sin_field)
        assert cls.region == "V"
        assert cls.grad_norm == pytest.approx(np.sqrt(2 * np.pi), rel=1e-12)
        assert cls.grad_norm > xi0(dom, nl_cubic_const)

    def test_inside_certified_radius_is_W(self, dom, nl_cubic_const):
        # 1000 random directions scaled to |grad z| = 0.9 xi0
        rng = np.random.default_rng(5)
        xi = xi0(dom, nl_cubic_const)
        for _ in range(1000):
            z = decayed_field(dom, rng, decay=1.0)
            z *= 0.9 * xi / np.sqrt(grad_norm_sq(dom, z))
            assert nehari_I(dom, nl_cubic_const, z) > 0.0

    def test_V_fields_outside_radius(self, dom, nl_cubic_const):
        rng = np.random.default_rng(6)
        xi = xi0(dom, nl_cubic_const)
        seen_v = 0
        for _ in range(500):
            z = decayed_field(dom, rng, scale=rng.uniform(0.5, 6.0))
            cls = classify(dom, nl_cubic_const, z, xi0_value=xi)
            if cls.region == "V":
                seen_v += 1
                assert cls.grad_norm > xi
        assert seen_v > 50


class TestDepthEstimate:
    def test_report_consistency(self, dom, nl_cubic_const):
        report = depth_estimate(dom, nl_cubic_const, n_directions=64, seed=0)
        p1 = 3.0
        expected_lower = (p1 - 1) / (2 * (p1 + 1)) * report.xi0 ** 2
        assert report.d_lower == pytest.approx(expected_lower, rel=1e-12)
        assert report.d_lower == pytest.approx(xi0(dom, nl_cubic_const) ** 2 / 4.0)
        assert report.d_upper >= report.d_lower
        assert report.seed == 0

    def test_single_direction_value(self, dom, sin_field, nl_cubic_const):
        # restricted to the sin-x ray the manifold minimum is J((2/sqrt3) sin x)
        report = depth_estimate(dom, nl_cubic_const, n_directions=0, seed=0,
                                candidates=[sin_field])
        proj = project_to_nehari(dom, nl_cubic_const, sin_field)
        j_star = potential_J(dom, nl_cubic_const, proj)
        assert j_star == pytest.approx(np.pi / 6.0, rel=1e-10)
        # the pure low modes are always scanned; the sin-x candidate is mode 1
        assert report.per_direction[0] == pytest.approx(j_star, rel=1e-10)

    def test_enlarging_sample_never_raises_upper(self, dom, nl_cubic_cos):
        uppers = [
            depth_estimate(dom, nl_cubic_cos, n_directions=n, seed=3).d_upper
            for n in (16, 64, 128)
        ]
        assert uppers[0] >= uppers[1] >= uppers[2]

    def test_refine_only_improves(self, dom, nl_cubic_cos):
        base = depth_estimate(dom, nl_cubic_cos, n_directions=16, seed=1)
        refined = depth_estimate(dom, nl_cubic_cos, n_directions=16, seed=1, refine=True)
        assert refined.d_upper <= base.d_upper
        assert refined.refined

    def test_degenerate_raises(self, dom):
        nl = Nonlinearity((PowerTerm(np.zeros(dom.n_quad), 3.0),))
        with pytest.raises(DegenerateNonlinearityError):
            depth_estimate(dom, nl, n_directions=4, seed=0)

    def test_poincare_constant(self, dom):
        assert poincare_constant(dom) == pytest.approx(1.0, rel=1e-14)
