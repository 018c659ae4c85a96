import numpy as np
import pytest
from scipy.integrate import quad

from wavewell import (
    State,
    energy,
    nehari_I,
    potential_J,
    psi_ddot,
    remainder_B,
    snapshot,
)
from wavewell.nonlinearity import Nonlinearity, PowerTerm

from conftest import decayed_field, random_admissible_nonlinearity

SIN4 = 3.0 * np.pi / 8.0    # int_0^pi sin^4
SIN6 = 5.0 * np.pi / 16.0   # int_0^pi sin^6


@pytest.fixture(scope="module")
def quartic_oracle():
    # independent quadrature oracle for the frozen constants above
    val4, _ = quad(lambda x: np.sin(x) ** 4, 0, np.pi)
    val6, _ = quad(lambda x: np.sin(x) ** 6, 0, np.pi)
    assert val4 == pytest.approx(SIN4, rel=1e-12)
    assert val6 == pytest.approx(SIN6, rel=1e-12)
    return val4, val6


class TestEnergy:
    def test_zero_state(self, dom, nl_cubic_const):
        z = np.zeros(dom.n_modes)
        assert energy(dom, nl_cubic_const, State(z, z)) == 0.0

    def test_linear_part_only(self, dom, sin_field):
        st = State(sin_field, np.zeros_like(sin_field))
        assert energy(dom, None, st) == pytest.approx(np.pi / 4.0, rel=1e-12)

    def test_cubic_energy(self, dom, sin_field, nl_cubic_const, quartic_oracle):
        st = State(sin_field, np.zeros_like(sin_field))
        expected = np.pi / 4.0 - quartic_oracle[0] / 4.0
        assert expected == pytest.approx(5 * np.pi / 32.0, rel=1e-12)
        assert energy(dom, nl_cubic_const, st) == pytest.approx(expected, rel=1e-12)

    def test_even_in_velocity(self, dom, nl_combined):
        rng = np.random.default_rng(0)
        u, v = (decayed_field(dom, rng) for _ in range(2))
        assert energy(dom, nl_combined, State(u, v)) == pytest.approx(
            energy(dom, nl_combined, State(u, -v)), rel=1e-14)


class TestNehariI:
    def test_zero(self, dom, nl_cubic_const):
        assert nehari_I(dom, nl_cubic_const, np.zeros(dom.n_modes)) == 0.0

    def test_sin(self, dom, sin_field, nl_cubic_const):
        assert nehari_I(dom, nl_cubic_const, sin_field) == pytest.approx(
            np.pi / 2.0 - SIN4, rel=1e-12)
        assert np.pi / 2.0 - SIN4 == pytest.approx(np.pi / 8.0, rel=1e-12)

    def test_scaled_sin(self, dom, sin_field, nl_cubic_const):
        assert nehari_I(dom, nl_cubic_const, 2.0 * sin_field) == pytest.approx(
            4.0 * np.pi / 2.0 - 16.0 * SIN4, rel=1e-12)


class TestPotentialAndRemainder:
    def test_zero(self, dom, nl_cubic_const):
        z = np.zeros(dom.n_modes)
        assert potential_J(dom, nl_cubic_const, z) == 0.0
        assert remainder_B(dom, nl_cubic_const, z) == 0.0

    def test_single_term_B_vanishes(self, dom, sin_field, nl_cubic_const):
        assert remainder_B(dom, nl_cubic_const, 1.7 * sin_field) == 0.0

    def test_two_term_B(self, dom, sin_field, quartic_oracle):
        nl = Nonlinearity((
            PowerTerm(np.ones(dom.n_quad), 3.0),
            PowerTerm(np.ones(dom.n_quad), 5.0),
        ))
        expected = (5.0 - 3.0) / (4.0 * 6.0) * quartic_oracle[1]
        assert remainder_B(dom, nl, sin_field) == pytest.approx(expected, rel=1e-12)

    def test_J_sin(self, dom, sin_field, nl_cubic_const):
        assert potential_J(dom, nl_cubic_const, sin_field) == pytest.approx(
            np.pi / 4.0 - SIN4 / 4.0, rel=1e-12)


class TestSnapshot:
    def test_zero_state(self, dom, nl_combined):
        z = np.zeros(dom.n_modes)
        s = snapshot(dom, nl_combined, State(z, z))
        assert (s.E, s.J, s.I, s.B, s.psi, s.psi_dot, s.grad_sq) == (0,) * 7

    def test_sin_inner_products(self, dom, sin_field, nl_cubic_const):
        s = snapshot(dom, nl_cubic_const, State(sin_field, sin_field))
        assert s.psi == pytest.approx(np.pi / 2.0, rel=1e-12)
        assert s.psi_dot == pytest.approx(np.pi, rel=1e-12)

    def test_identity_on_random_fields(self, dom):
        rng = np.random.default_rng(123)
        for _ in range(5):
            nl = random_admissible_nonlinearity(dom, rng)
            p1 = nl.p1
            for _ in range(200):
                st = State(decayed_field(dom, rng, scale=rng.uniform(0.1, 3.0)),
                           decayed_field(dom, rng))
                s = snapshot(dom, nl, st)
                resid = s.J - s.I / (p1 + 1) - (p1 - 1) / (2 * (p1 + 1)) * s.grad_sq - s.B
                assert abs(resid) <= 1e-10
                assert s.B >= 0.0

    def test_mismatched_state_rejected(self, dom):
        with pytest.raises(ValueError):
            State(np.zeros(dom.n_modes), np.zeros(dom.n_modes + 1))
        with pytest.raises(ValueError):
            State(np.full(dom.n_modes, np.nan), np.zeros(dom.n_modes))


class TestPsiDdot:
    def test_zero_state(self, dom, nl_cubic_const):
        z = np.zeros(dom.n_modes)
        assert psi_ddot(dom, nl_cubic_const, State(z, z), 0.0) == 0.0

    def test_conservation_form_equivalence(self, dom, nl_combined):
        # the two expressions agree whenever E0 is the state's energy
        rng = np.random.default_rng(21)
        for _ in range(100):
            st = State(decayed_field(dom, rng), decayed_field(dom, rng))
            s = snapshot(dom, nl_combined, st)
            lhs = psi_ddot(dom, nl_combined, st, s.E)
            rhs = 2.0 * 2.0 * (s.E - s.J) - 2.0 * s.I
            assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-10)

    def test_sin_value(self, dom, sin_field, nl_cubic_const):
        st = State(sin_field, np.zeros_like(sin_field))
        e0 = energy(dom, nl_cubic_const, st)
        assert psi_ddot(dom, nl_cubic_const, st, e0) == pytest.approx(
            -np.pi / 4.0, rel=1e-11)
