"""Constructed initial data families and the blow-up sufficient conditions.

All constructions share a scaffold: fix w with grad w != 0 supported where
the sign-changing leading coefficient is positive (so the leading integral
int a_1 |w|^{p1+1} is positive) and v orthogonal to w, then set

    u0 = mu w,      u1 = mu sigma w + eta v,

choosing mu large enough that the quartic-in-mu energy R(mu) turns negative
and eta to close the energy budget E(0) = R(mu) + eta^2/2 |v|^2 = K exactly.
The three recipes differ in the threshold mu must clear and deliver pairs of
arbitrary prescribed positive energy that satisfy, respectively: the
any-sign blow-up condition, the nonnegative-product blow-up condition, or
the latter while failing every one of the three single-threshold conditions
from earlier literature.

Super-critical sufficient conditions evaluated by ``check_conditions``
(C is the sharp constant in |grad z|^2 >= C |z|^2, p1 the leading exponent):

    projection_only        E0 < (u0,u1)^2 / (2 |u0|^2),          (u0,u1) > 0
    norm_only              E0 < C(p1-1)/(2(p1+1)) |u0|^2,        (u0,u1) >= 0, I(u0) < 0
    product_only           E0 < C(p1-1)/((1+C)(p1+1)) (u0,u1),   (u0,u1) > 0, I(u0) < 0
    norm_plus_product      0 < E0 < norm_only rhs + sqrt(C(p1-1))/(p1+1) (u0,u1)
    norm_plus_projection   |u0| != 0, (u0,u1) >= 0, 0 < E0 < norm_only rhs + projection_only rhs
    above_all_single       E0 > max of the three single-threshold right sides
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import analyze, grad_norm_sq, inner, integrate, l2_norm_sq, synthesize
from .functionals import State, energy, nehari_I, snapshot
from .nonlinearity import Nonlinearity
from .ode import linear_comparison_solution
from .solver import SolverConfig, TrajectoryRecord, monitor_theorems, simulate
from .well import WellReport, poincare_constant

__all__ = [
    "ConstructionError",
    "DataPair",
    "Condition",
    "ConditionReport",
    "ScenarioReport",
    "build_base_pair",
    "build_prop2",
    "build_prop1",
    "build_example",
    "check_conditions",
    "run_scenario",
]

# A strict-inequality threshold is realized as 1.01x the required maximum.
STRICT_FACTOR = 1.01
# Margins tighter than this are reported as inconclusive rather than pass/fail.
MARGIN_FLOOR = 1e-6


class ConstructionError(RuntimeError):
    """The requested initial-data construction is infeasible for this setup."""


@dataclass(frozen=True)
class DataPair:
    u0: np.ndarray
    u1: np.ndarray
    provenance: str                    # "prop1" | "prop2" | "example" | "manual"
    constants: dict = field(default_factory=dict)

    def state(self) -> State:
        return State(self.u0, self.u1)


@dataclass(frozen=True)
class Condition:
    holds: bool
    margin: float          # right side - left side of the energy inequality
    inconclusive: bool     # |margin| below the reporting floor
    detail: str = ""


@dataclass(frozen=True)
class ConditionReport:
    conditions: dict[str, Condition]
    E0: float
    psi0: float            # |u0|^2
    product0: float        # (u0, u1)
    I0: float
    energy_class: str      # "non_positive" | "sub_critical" | "super_critical" | "between_bounds"

    def __getitem__(self, name: str) -> Condition:
        return self.conditions[name]


def _leading_integral(domain, nl: Nonlinearity, values: np.ndarray) -> float:
    a1 = nl.a_terms[0]
    return float(integrate(domain, a1.coeff * np.abs(values) ** (a1.exponent + 1.0)))


def build_base_pair(domain, nl: Nonlinearity, ortho_tol: float = 1e-12):
    """Fixed directions (w, v): w a smooth bump inside {a_1 > 0}, v orthogonal.

    Returns spectral fields with grad w != 0, |v| != 0, (w, v) = 0 and
    int a_1 |w|^{p1+1} > 0, all verified numerically.
    """
    a1 = nl.a_terms[0].coeff
    positive = a1 > 0.0
    if not positive.any():
        raise ConstructionError("leading coefficient is nowhere positive on the grid")
    # longest contiguous run of positive nodes
    best_start = best_len = start = 0
    run = 0
    for m, flag in enumerate(positive):
        if flag:
            if run == 0:
                start = m
            run += 1
            if run > best_len:
                best_start, best_len = start, run
        else:
            run = 0
    if best_len < 4:
        raise ConstructionError("positive region of the leading coefficient is too thin")
    nodes = domain.nodes
    x_lo = nodes[best_start]
    x_hi = nodes[best_start + best_len - 1]
    bump = np.zeros(domain.n_quad)
    inside = (nodes >= x_lo) & (nodes <= x_hi)
    bump[inside] = np.sin(np.pi * (nodes[inside] - x_lo) / (x_hi - x_lo)) ** 2
    w = analyze(domain, bump)

    # first mode with a healthy component orthogonal to w
    w_nsq = l2_norm_sq(domain, w)
    v = None
    for j in range(domain.n_modes):
        e = np.zeros(domain.n_modes)
        e[j] = 1.0
        cand = e - (inner(domain, e, w) / w_nsq) * w
        if l2_norm_sq(domain, cand) > 1e-6:
            v = cand
            break
    if v is None:
        raise ConstructionError("no direction orthogonal to w found")

    lead = _leading_integral(domain, nl, synthesize(domain, w))
    if lead <= 0:
        raise ConstructionError(
            f"projected bump has nonpositive leading integral {lead:.3e}"
        )
    checks = (
        grad_norm_sq(domain, w) > 0,
        l2_norm_sq(domain, v) > 0,
        abs(inner(domain, w, v)) <= ortho_tol * max(1.0, np.sqrt(w_nsq * l2_norm_sq(domain, v))),
    )
    if not all(checks):
        raise ConstructionError(f"base-pair conditions failed: {checks}")
    return w, v


@dataclass(frozen=True)
class _Scaffold:
    w_nsq: float
    w_grad_sq: float
    v_nsq: float
    lead: float      # int a_1 |w|^{p1+1}
    p1: float
    C: float

    def R(self, mu: float, sigma: float) -> float:
        p1 = self.p1
        return (
            0.5 * mu * mu * (sigma * sigma * self.w_nsq + self.w_grad_sq)
            - mu ** (p1 + 1.0) / (p1 + 1.0) * self.lead
        )

    def mu0(self, sigma: float) -> float:
        p1 = self.p1
        return (
            (p1 + 1.0) * (sigma * sigma * self.w_nsq + self.w_grad_sq)
            / (2.0 * self.lead)
        ) ** (1.0 / (p1 - 1.0))


def _scaffold(domain, nl, w, v) -> _Scaffold:
    lead = _leading_integral(domain, nl, synthesize(domain, w))
    if lead <= 0:
        raise ConstructionError("int a_1 |w|^{p1+1} must be positive")
    return _Scaffold(
        w_nsq=l2_norm_sq(domain, w),
        w_grad_sq=grad_norm_sq(domain, w),
        v_nsq=l2_norm_sq(domain, v),
        lead=lead,
        p1=nl.p1,
        C=poincare_constant(domain),
    )


def _assemble(domain, nl, w, v, mu, eta, sigma, K_target, provenance, constants,
              rel_tol=1e-8) -> DataPair:
    u0 = mu * np.asarray(w, dtype=float)
    u1 = mu * sigma * np.asarray(w, dtype=float) + eta * np.asarray(v, dtype=float)
    pair = DataPair(u0, u1, provenance, constants)
    e0 = energy(domain, nl, pair.state())
    if abs(e0 - K_target) > rel_tol * max(1.0, abs(K_target)):
        raise ConstructionError(
            f"energy budget not closed: E0 = {e0!r}, target {K_target!r}"
        )
    return pair


def build_prop2(domain, nl: Nonlinearity, w, v, sigma: float, K_target: float) -> DataPair:
    """Pair of prescribed energy satisfying the any-sign condition.

    sigma ranges over (-sqrt(C(p1-1))/2, inf) \\ {0}; the sign of (u0, u1)
    equals the sign of sigma.
    """
    sc = _scaffold(domain, nl, w, v)
    root = np.sqrt(sc.C * (sc.p1 - 1.0))
    if sigma == 0.0 or sigma <= -0.5 * root:
        raise ConstructionError(
            f"sigma must lie in (-{0.5 * root}, inf) excluding 0, got {sigma}"
        )
    if K_target <= 0:
        raise ConstructionError("target energy must be positive")
    mu0 = sc.mu0(sigma)
    mu_threshold = np.sqrt(K_target) / (
        np.sqrt(root / (sc.p1 + 1.0) * (0.5 * root + sigma)) * np.sqrt(sc.w_nsq)
    )
    mu1 = STRICT_FACTOR * max(mu0, mu_threshold)
    R1 = sc.R(mu1, sigma)
    if R1 >= K_target:
        raise RuntimeError(
            f"internal error: R(mu1) = {R1} >= K = {K_target} despite mu1 > mu0"
        )
    eta1 = np.sqrt(2.0 * (K_target - R1)) / np.sqrt(sc.v_nsq)
    constants = {"mu": mu1, "eta": eta1, "sigma": sigma, "R_mu": R1, "mu0": mu0,
                 "K_target": K_target, "strict_factor": STRICT_FACTOR}
    pair = _assemble(domain, nl, w, v, mu1, eta1, sigma, K_target, "prop2", constants)
    report = check_conditions(domain, nl, pair)
    if not report["norm_plus_product"].holds:
        raise RuntimeError("internal error: constructed pair fails its target condition")
    return pair


def build_prop1(domain, nl: Nonlinearity, w, v, K_target: float) -> DataPair:
    """Pair of prescribed energy satisfying the nonnegative-product condition
    with (u0, u1) > 0 (the sigma = 1 instance of the scaffold)."""
    sc = _scaffold(domain, nl, w, v)
    if K_target <= 0:
        raise ConstructionError("target energy must be positive")
    sigma = 1.0
    mu0 = sc.mu0(sigma)
    mu_threshold = np.sqrt(2.0 * K_target) / (
        np.sqrt(sc.C * (sc.p1 - 1.0) / (sc.p1 + 1.0) + 1.0) * np.sqrt(sc.w_nsq)
    )
    mu2 = STRICT_FACTOR * max(mu0, mu_threshold)
    R2 = sc.R(mu2, sigma)
    if R2 >= K_target:
        raise RuntimeError("internal error: R(mu2) >= K despite mu2 > mu0")
    eta2 = np.sqrt(2.0 * (K_target - R2)) / np.sqrt(sc.v_nsq)
    constants = {"mu": mu2, "eta": eta2, "sigma": sigma, "R_mu": R2, "mu0": mu0,
                 "K_target": K_target, "strict_factor": STRICT_FACTOR}
    pair = _assemble(domain, nl, w, v, mu2, eta2, sigma, K_target, "prop1", constants)
    report = check_conditions(domain, nl, pair)
    if not report["norm_plus_projection"].holds or not report.product0 > 0:
        raise RuntimeError("internal error: constructed pair fails its target condition")
    return pair


def build_example(domain, nl: Nonlinearity, w, v, K_target: float) -> DataPair:
    """Pair in the gap: passes the nonnegative-product condition while all
    three single-threshold conditions fail.

    Feasible for K above K0 = mu0^2/2 * (M + L)/2 * |w|^2 where M is the max
    of the three single-threshold coefficients and L the combined one; M < L
    always, which is what opens the gap.
    """
    sc = _scaffold(domain, nl, w, v)
    sigma = 1.0
    C, p1 = sc.C, sc.p1
    M_const = max(C * (p1 - 1.0) / (p1 + 1.0), 1.0,
                  2.0 * C * (p1 - 1.0) / ((1.0 + C) * (p1 + 1.0)))
    L_const = C * (p1 - 1.0) / (p1 + 1.0) + 1.0
    if not M_const < L_const:
        raise RuntimeError(f"internal error: M = {M_const} >= L = {L_const}")
    mu0 = sc.mu0(sigma)
    K0 = 0.5 * mu0 * mu0 * 0.5 * (M_const + L_const) * sc.w_nsq
    if K_target <= K0:
        raise ConstructionError(
            f"target energy {K_target} must exceed K0 = {K0} for this construction"
        )
    mu3 = np.sqrt(2.0 * K_target) * np.sqrt(2.0 / (M_const + L_const)) / np.sqrt(sc.w_nsq)
    R3 = sc.R(mu3, sigma)
    if R3 >= K_target:
        raise RuntimeError("internal error: R(mu3) >= K despite K > K0")
    eta3 = np.sqrt(2.0 * (K_target - R3)) / np.sqrt(sc.v_nsq)
    constants = {"mu": mu3, "eta": eta3, "sigma": sigma, "R_mu": R3, "mu0": mu0,
                 "K_target": K_target, "K0": K0, "M_const": M_const, "L_const": L_const}
    pair = _assemble(domain, nl, w, v, mu3, eta3, sigma, K_target, "example", constants)
    report = check_conditions(domain, nl, pair)
    wanted = (not report["projection_only"].holds
              and not report["norm_only"].holds
              and not report["product_only"].holds
              and report["norm_plus_projection"].holds
              and report["above_all_single"].holds)
    if not wanted:
        raise RuntimeError("internal error: gap pair does not exhibit the target pattern")
    return pair


def _condition(lhs: float, rhs: float, extra_ok: bool = True, detail: str = "") -> Condition:
    margin = rhs - lhs
    return Condition(
        holds=bool(extra_ok and lhs < rhs),
        margin=float(margin),
        inconclusive=bool(abs(margin) < MARGIN_FLOOR),
        detail=detail,
    )


def check_conditions(domain, nl: Nonlinearity, pair: DataPair,
                     well: WellReport | None = None) -> ConditionReport:
    """Evaluate every super-critical sufficient condition with its margin."""
    state = pair.state()
    E0 = energy(domain, nl, state)
    psi0 = l2_norm_sq(domain, state.u)
    product0 = inner(domain, state.u, state.v)
    I0 = nehari_I(domain, nl, state.u)
    C = poincare_constant(domain)
    p1 = nl.p1

    norm_rhs = C * (p1 - 1.0) / (2.0 * (p1 + 1.0)) * psi0
    projection_rhs = 0.5 * product0 * product0 / psi0 if psi0 > 0 else 0.0
    product_rhs = C * (p1 - 1.0) / ((1.0 + C) * (p1 + 1.0)) * product0
    mixed_rhs = norm_rhs + np.sqrt(C * (p1 - 1.0)) / (p1 + 1.0) * product0

    conditions = {
        "projection_only": _condition(E0, projection_rhs, extra_ok=product0 > 0,
                                      detail="(u0,u1) > 0 required"),
        "norm_only": _condition(E0, norm_rhs, extra_ok=product0 >= 0 and I0 < 0,
                                detail="(u0,u1) >= 0 and I(u0) < 0 required"),
        "product_only": _condition(E0, product_rhs, extra_ok=product0 > 0 and I0 < 0,
                                   detail="(u0,u1) > 0 and I(u0) < 0 required"),
        "norm_plus_product": _condition(E0, mixed_rhs, extra_ok=E0 > 0,
                                        detail="0 < E0 required"),
        "norm_plus_projection": _condition(
            E0, norm_rhs + projection_rhs,
            extra_ok=psi0 > 0 and product0 >= 0 and E0 > 0,
            detail="|u0| != 0, (u0,u1) >= 0, 0 < E0 required"),
    }
    single_max = max(norm_rhs, projection_rhs, product_rhs)
    margin_above = E0 - single_max
    conditions["above_all_single"] = Condition(
        holds=bool(product0 > 0 and margin_above > 0),
        margin=float(margin_above),
        inconclusive=bool(abs(margin_above) < MARGIN_FLOOR),
        detail="E0 above every single-threshold right side; (u0,u1) > 0 required",
    )

    if E0 <= 0:
        energy_class = "non_positive"
    elif well is not None and E0 < well.d_lower:
        energy_class = "sub_critical"
    elif well is not None and E0 > well.d_upper:
        energy_class = "super_critical"
    elif well is not None:
        energy_class = "between_bounds"
    else:
        energy_class = "unclassified"

    return ConditionReport(
        conditions=conditions,
        E0=float(E0),
        psi0=float(psi0),
        product0=float(product0),
        I0=float(I0),
        energy_class=energy_class,
    )


@dataclass
class ScenarioReport:
    record: TrajectoryRecord
    conditions: ConditionReport
    verdicts: list
    predicted_by: list[str]
    comparison_ok: bool | None      # psi(t) >= closed-form bound at trusted times
    comparison_max_deficit: float | None


def run_scenario(domain, nl: Nonlinearity, pair: DataPair, config: SolverConfig,
                 well: WellReport | None = None) -> ScenarioReport:
    """Simulate a data pair and cross-reference the observed behavior against
    every blow-up predictor that applies to it."""
    record = simulate(domain, nl, pair.state(), config)
    conditions = check_conditions(domain, nl, pair, well)
    verdicts = monitor_theorems(record, well, conditions.E0, nl)

    predicted_by = []
    if conditions.E0 <= 0 and grad_norm_sq(domain, pair.u0) > 0:
        predicted_by.append("nonpositive_energy")
    if well is not None and 0 < conditions.E0 < well.d_lower and conditions.I0 < 0:
        predicted_by.append("subcritical_negative_I")
    for name in ("norm_plus_product", "norm_plus_projection",
                 "projection_only", "norm_only", "product_only"):
        if conditions[name].holds:
            predicted_by.append(name)

    comparison_ok = None
    deficit = None
    if conditions["norm_plus_product"].holds:
        C = poincare_constant(domain)
        p1 = nl.p1
        bound = linear_comparison_solution(
            alpha=C * (p1 - 1.0),
            beta=2.0 * (p1 + 1.0) * conditions.E0,
            psi0=conditions.psi0,
            dpsi0=2.0 * conditions.product0,
        )
        trusted = record.times <= record.last_trusted_time + 1e-14
        psi_traj = record.column("psi")[trusted]
        psi_bound = bound(record.times[trusted])
        gap = psi_traj - psi_bound
        tol = 1e-6 * np.maximum(1.0, np.abs(psi_bound))
        comparison_ok = bool(np.all(gap >= -tol))
        deficit = float(np.min(gap)) if gap.size else None

    return ScenarioReport(
        record=record,
        conditions=conditions,
        verdicts=verdicts,
        predicted_by=predicted_by,
        comparison_ok=comparison_ok,
        comparison_max_deficit=deficit,
    )
