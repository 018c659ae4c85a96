"""Energy, potential, Nehari and remainder functionals on phase-space states.

For a state (u, u_t) the conserved energy is

    E = 1/2 (|u_t|^2 + |grad u|^2) - int F(x, u),

with F the potential of the nonlinearity.  The potential functional
J(z) = 1/2 |grad z|^2 - int F and the Nehari functional
I(z) = |grad z|^2 - int z f(x, z) are tied together by

    J = I/(p1+1) + (p1-1)/(2(p1+1)) |grad z|^2 + B(z),       B(z) >= 0,

where p1 is the leading a-exponent and B collects the higher a-terms and all
b-terms.  All integrals in one snapshot come from a single synthesize onto
the nodal grid, which makes the relation above hold to rounding error
independently of quadrature resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import grad_norm_sq, inner, integrate, l2_norm_sq, synthesize
from .nonlinearity import Nonlinearity, eval_f, eval_primitive, eval_term

__all__ = [
    "State",
    "FunctionalSnapshot",
    "ResolutionError",
    "energy",
    "potential_J",
    "nehari_I",
    "remainder_B",
    "term_integrals",
    "snapshot",
    "psi_ddot",
]


@dataclass(frozen=True)
class State:
    """Phase point (u, u_t) as spectral coefficient vectors of equal length."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != v.shape:
            raise ValueError(f"u and v shapes differ: {u.shape} vs {v.shape}")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise ValueError("state contains non-finite entries")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class FunctionalSnapshot:
    E: float
    J: float
    I: float
    B: float
    psi: float       # |u|^2
    psi_dot: float   # 2 (u, u_t)
    grad_sq: float   # |grad u|^2


class ResolutionError(RuntimeError):
    """The J/I/B identity residual exceeded tolerance: under-resolved grid."""


def term_integrals(domain, nl: Nonlinearity, values: np.ndarray) -> list[float]:
    """Per-term integrals int c(x) g(z) dx with g = |z|^{p+1} or |z|^p z.

    These are the building blocks of I, J and B; evaluating them once per
    nodal synthesis keeps every functional aliased consistently.
    """
    return [float(integrate(domain, eval_term(t, values) * values)) for t in nl.terms()]


def _potential_integral(domain, nl, values) -> float:
    return float(integrate(domain, eval_primitive(nl, values)))


def energy(domain, nl: Nonlinearity | None, state: State) -> float:
    """Total energy 1/2(|u_t|^2 + |grad u|^2) - int F(x, u)."""
    values = synthesize(domain, state.u)
    return (
        0.5 * (l2_norm_sq(domain, state.v) + grad_norm_sq(domain, state.u))
        - _potential_integral(domain, nl, values)
    )


def potential_J(domain, nl: Nonlinearity | None, field) -> float:
    """Potential functional J(z) = 1/2 |grad z|^2 - int F(x, z)."""
    values = synthesize(domain, field)
    return 0.5 * grad_norm_sq(domain, field) - _potential_integral(domain, nl, values)


def nehari_I(domain, nl: Nonlinearity | None, field) -> float:
    """Nehari functional I(z) = |grad z|^2 - int z f(x, z)."""
    values = synthesize(domain, field)
    return grad_norm_sq(domain, field) - float(integrate(domain, values * eval_f(nl, values)))


def remainder_B(domain, nl: Nonlinearity | None, field) -> float:
    """Remainder B(z) from its double-sum definition; >= 0 for admissible terms."""
    if nl is None:
        return 0.0
    values = synthesize(domain, field)
    return _remainder_from_integrals(nl, term_integrals(domain, nl, values))


def _remainder_from_integrals(nl: Nonlinearity, integrals: list[float]) -> float:
    p1 = nl.p1
    out = 0.0
    # integrals follow nl.terms() order: a-terms then b-terms; the leading
    # a-term cancels between J and I/(p1+1) and does not enter B.
    for k, term in enumerate(nl.terms()):
        if k == 0:
            continue
        p = term.exponent
        out += (p - p1) / ((p1 + 1.0) * (p + 1.0)) * integrals[k]
    return out


def snapshot(domain, nl: Nonlinearity | None, state: State,
             tol_abs: float = 1e-8, tol_rel: float = 1e-8) -> FunctionalSnapshot:
    """All functionals of a state from one nodal synthesis.

    Raises :class:`ResolutionError` if the J/I/B identity residual exceeds
    tol_abs + tol_rel * scale; an exceeded residual means the functionals are
    no longer mutually consistent and must not be silently accepted.
    """
    values = synthesize(domain, state.u)
    grad_sq = grad_norm_sq(domain, state.u)
    vv = l2_norm_sq(domain, state.v)
    pot = _potential_integral(domain, nl, values)
    e = 0.5 * (vv + grad_sq) - pot
    j = 0.5 * grad_sq - pot
    if nl is None:
        i, b = grad_sq, 0.0
    else:
        integrals = term_integrals(domain, nl, values)
        i = grad_sq - sum(integrals)
        b = _remainder_from_integrals(nl, integrals)
        p1 = nl.p1
        residual = abs(j - i / (p1 + 1.0) - (p1 - 1.0) / (2.0 * (p1 + 1.0)) * grad_sq - b)
        scale = max(abs(j), abs(i), grad_sq, abs(b), 1.0)
        if residual > tol_abs + tol_rel * scale:
            raise ResolutionError(
                f"functional identity residual {residual:.3e} exceeds tolerance "
                f"(grid under-resolved for the exponents in play)"
            )
    return FunctionalSnapshot(
        E=float(e),
        J=float(j),
        I=float(i),
        B=float(b),
        psi=l2_norm_sq(domain, state.u),
        psi_dot=2.0 * inner(domain, state.u, state.v),
        grad_sq=float(grad_sq),
    )


def psi_ddot(domain, nl: Nonlinearity, state: State, E0: float) -> float:
    """Second derivative of psi(t) = |u(t)|^2 along the flow, given E(0).

    Uses the conservation form
    (p1+3)|u_t|^2 - 2(p1+1)E0 + (p1-1)|grad u|^2 + 2(p1+1)B(u); when E0
    equals the state's energy this coincides with 2|u_t|^2 - 2 I(u).
    """
    p1 = nl.p1
    return (
        (p1 + 3.0) * l2_norm_sq(domain, state.v)
        - 2.0 * (p1 + 1.0) * E0
        + (p1 - 1.0) * grad_norm_sq(domain, state.u)
        + 2.0 * (p1 + 1.0) * remainder_B(domain, nl, state.u)
    )
