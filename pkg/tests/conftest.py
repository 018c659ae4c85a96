import numpy as np
import pytest

from wavewell import Domain, analyze
from wavewell.nonlinearity import Nonlinearity, PowerTerm


@pytest.fixture(scope="session")
def dom():
    return Domain(np.pi, 32)


@pytest.fixture(scope="session")
def dom64():
    return Domain(np.pi, 64)


@pytest.fixture(scope="session")
def nl_cubic_const(dom):
    """Constant-coefficient cubic a1 = 1, p1 = 3: the closed-form workhorse.

    Fails the sign-change admissibility condition on purpose; the functional
    and scaling operations do not gate on it.
    """
    return Nonlinearity((PowerTerm(np.ones(dom.n_quad), 3.0),))


@pytest.fixture(scope="session")
def nl_cubic_cos(dom):
    """Admissible single-term cubic with the sign-changing coefficient cos x."""
    return Nonlinearity((PowerTerm(np.cos(dom.nodes), 3.0),))


@pytest.fixture(scope="session")
def nl_combined(dom):
    """Admissible three-term nonlinearity exercising the B-remainder sums."""
    a1 = PowerTerm(np.cos(dom.nodes), 3.0)
    a2 = PowerTerm(0.5 * (1.0 + np.sin(dom.nodes)), 5.0)
    b1 = PowerTerm(-0.3 * np.ones(dom.n_quad), 2.0)
    return Nonlinearity((a1, a2), (b1,))


@pytest.fixture(scope="session")
def sin_field(dom):
    """Spectral coefficients of sin x on (0, pi): sqrt(pi/2) e_1."""
    return analyze(dom, np.sin(dom.nodes))


def random_admissible_nonlinearity(domain, rng):
    """Random exponent chain and coefficients satisfying every condition."""
    n_a = rng.integers(1, 3)
    n_b = rng.integers(0, 3)
    exponents = np.sort(rng.uniform(1.1, 6.0, size=n_a + n_b))
    q_exps, p_exps = exponents[:n_b], exponents[n_b:]
    x = domain.nodes

    # sign-changing leading coefficient: random low-frequency combination,
    # recentred so both signs are attained
    a1 = rng.normal() * np.cos(x) + rng.normal() * np.sin(2 * x) + 0.3 * rng.normal()
    a1 = a1 - 0.5 * (a1.min() + a1.max())
    a_terms = [PowerTerm(a1, float(p_exps[0]))]
    for p in p_exps[1:]:
        a_terms.append(PowerTerm(np.abs(rng.normal()) * (1.0 + np.sin(rng.integers(1, 4) * x)),
                                 float(p)))
    b_terms = [PowerTerm(-np.abs(rng.normal()) * (1.0 + np.cos(rng.integers(1, 4) * x) ** 2),
                         float(q)) for q in q_exps]
    return Nonlinearity(tuple(a_terms), tuple(b_terms))


def decayed_field(domain, rng, decay=2.0, scale=1.0):
    j = np.arange(1, domain.n_modes + 1)
    return scale * rng.standard_normal(domain.n_modes) / j ** decay
