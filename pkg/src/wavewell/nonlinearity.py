"""Combined power-type nonlinearities f(x, u) with variable coefficients.

A nonlinearity is an ordered list of power terms

    f(x, u) = sum_i a_i(x) |u|^{p_i - 1} u  +  sum_j b_j(x) |u|^{q_j - 1} u

("F1" form), or with the leading a-term replaced by a_1(x) |u|^{p_1}
("F2" form).  Admissibility asks for a strictly increasing exponent chain
q_1 < ... < q_s < p_1 < ... < p_r, nonnegative a_i for i >= 2, nonpositive
b_j, and a sign-changing leading coefficient a_1.  ``validate`` reports
these conditions instead of raising: several operations are well defined
(and useful, e.g. constant-coefficient smoke cases) on inadmissible data,
while the theorem checkers gate on the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["PowerTerm", "Nonlinearity", "ConditionCheck", "ValidationReport", "validate",
           "eval_f", "eval_term", "eval_primitive"]

ODD = "odd_power"   # c(x) |u|^{p-1} u
ABS = "abs_power"   # c(x) |u|^p

# Grid minima/maxima within this band count as "vanishing" for the
# sign-change test; sampling cannot certify sign changes between nodes.
SIGN_EPS = 1e-12


@dataclass(frozen=True)
class PowerTerm:
    """One term c(x)|u|^{p-1}u (odd_power) or c(x)|u|^p (abs_power).

    ``bound`` is an upper bound for |c(x)|; by default the grid max, but a
    certified analytic bound may be passed since the threshold computations
    only need any valid upper bound.
    """

    coeff: np.ndarray
    exponent: float
    kind: str = ODD
    bound: float | None = None

    def __post_init__(self):
        coeff = np.asarray(self.coeff, dtype=float)
        coeff.setflags(write=False)
        object.__setattr__(self, "coeff", coeff)
        if not self.exponent > 1:
            raise ValueError(f"exponent must be > 1, got {self.exponent}")
        if self.kind not in (ODD, ABS):
            raise ValueError(f"kind must be {ODD!r} or {ABS!r}, got {self.kind!r}")
        grid_max = float(np.abs(coeff).max()) if coeff.size else 0.0
        if self.bound is None:
            object.__setattr__(self, "bound", grid_max)
        elif self.bound < grid_max - 1e-14 * max(1.0, grid_max):
            raise ValueError(
                f"declared bound {self.bound} is below the grid max {grid_max}"
            )


@dataclass(frozen=True)
class Nonlinearity:
    """Ordered a-terms (exponents p_1 < ... < p_r) and b-terms (q_1 < ... < q_s)."""

    a_terms: tuple[PowerTerm, ...]
    b_terms: tuple[PowerTerm, ...] = ()
    form: str = "F1"

    def __post_init__(self):
        object.__setattr__(self, "a_terms", tuple(self.a_terms))
        object.__setattr__(self, "b_terms", tuple(self.b_terms))
        if self.form not in ("F1", "F2"):
            raise ValueError(f"form must be 'F1' or 'F2', got {self.form!r}")
        if not self.a_terms:
            raise ValueError("at least one a-term is required")

    @property
    def p1(self) -> float:
        return self.a_terms[0].exponent

    def terms(self):
        return self.a_terms + self.b_terms


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ConditionCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[ConditionCheck]:
        return [c for c in self.checks if not c.passed]

    def __str__(self):
        lines = [f"{'pass' if c.passed else 'FAIL'}  {c.name}"
                 + (f": {c.detail}" if c.detail else "")
                 for c in self.checks]
        return "\n".join(lines)


def validate(nl: Nonlinearity) -> ValidationReport:
    """Check the admissibility conditions, reporting pass/fail per condition."""
    checks = []

    exps = [t.exponent for t in nl.b_terms] + [t.exponent for t in nl.a_terms]
    chain_ok = all(e2 > e1 for e1, e2 in zip(exps, exps[1:]))
    bad = next(
        (i for i, (e1, e2) in enumerate(zip(exps, exps[1:])) if e2 <= e1), None
    )
    checks.append(ConditionCheck(
        "exponent_chain", chain_ok,
        "" if chain_ok else f"chain not strictly increasing at position {bad}: {exps}",
    ))

    growth_ok = all(np.isfinite(t.exponent) for t in nl.terms())
    checks.append(ConditionCheck(
        "growth_cap", growth_ok, "" if growth_ok else "non-finite exponent"))

    bad_a = [
        (i + 2, int(np.argmin(t.coeff)))
        for i, t in enumerate(nl.a_terms[1:])
        if t.coeff.min() < 0
    ]
    checks.append(ConditionCheck(
        "a_terms_nonnegative", not bad_a,
        "" if not bad_a else f"a-term {bad_a[0][0]} negative at node {bad_a[0][1]}",
    ))

    bad_b = [
        (j + 1, int(np.argmax(t.coeff)))
        for j, t in enumerate(nl.b_terms)
        if t.coeff.max() > 0
    ]
    checks.append(ConditionCheck(
        "b_terms_nonpositive", not bad_b,
        "" if not bad_b else f"b-term {bad_b[0][0]} positive at node {bad_b[0][1]}",
    ))

    a1 = nl.a_terms[0].coeff
    sign_ok = a1.min() < -SIGN_EPS and a1.max() > SIGN_EPS
    checks.append(ConditionCheck(
        "a1_sign_changing", bool(sign_ok),
        "" if sign_ok else f"grid range [{a1.min():.3e}, {a1.max():.3e}] does not straddle 0",
    ))

    if nl.form == "F2":
        kinds_ok = nl.a_terms[0].kind == ABS and all(
            t.kind == ODD for t in nl.a_terms[1:] + nl.b_terms)
        detail = "form F2 requires abs_power leading a-term, odd_power elsewhere"
    else:
        kinds_ok = all(t.kind == ODD for t in nl.terms())
        detail = "form F1 requires odd_power terms"
    checks.append(ConditionCheck("term_kinds", kinds_ok, "" if kinds_ok else detail))

    return ValidationReport(tuple(checks))


def eval_term(term: PowerTerm, u: np.ndarray) -> np.ndarray:
    """Pointwise value of one term at u."""
    if term.kind == ABS:
        return term.coeff * np.abs(u) ** term.exponent
    return term.coeff * np.abs(u) ** (term.exponent - 1.0) * u


def eval_f(nl: Nonlinearity | None, u) -> np.ndarray:
    """Pointwise f(x, u) on the grid; nl=None means the linear equation f = 0."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    if nl is None:
        return out
    for term in nl.terms():
        out += eval_term(term, u)
    return out


def eval_primitive(nl: Nonlinearity | None, u) -> np.ndarray:
    """Pointwise potential F(x, u) = integral of f(x, .) from 0 to u."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    if nl is None:
        return out
    for term in nl.terms():
        if term.kind == ABS:
            out += term.coeff * np.abs(u) ** term.exponent * u / (term.exponent + 1.0)
        else:
            out += term.coeff * np.abs(u) ** (term.exponent + 1.0) / (term.exponent + 1.0)
    return out
