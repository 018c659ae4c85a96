"""Numerical laboratory for semilinear wave equations with combined
power-type nonlinearities and variable coefficients.

The pieces, bottom to top: a Dirichlet sine eigenbasis with quadrature
(:mod:`~wavewell.basis`), validated power nonlinearities
(:mod:`~wavewell.nonlinearity`), the energy/potential/Nehari functionals
(:mod:`~wavewell.functionals`), potential-well thresholds and depth bounds
(:mod:`~wavewell.well`), a time-reversible Galerkin solver with blow-up
detection (:mod:`~wavewell.solver`), scalar blow-up ODE oracles
(:mod:`~wavewell.ode`), constructed super-critical initial data
(:mod:`~wavewell.scenarios`), and a config-driven CLI (:mod:`~wavewell.cli`).
"""

from .basis import (
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
from .functionals import (
    FunctionalSnapshot,
    State,
    energy,
    nehari_I,
    potential_J,
    psi_ddot,
    remainder_B,
    snapshot,
)
from .nonlinearity import Nonlinearity, PowerTerm, eval_f, eval_primitive, validate
from .ode import (
    OdeProblem,
    concavity_check,
    integrate_lemma1,
    integrate_lemma2,
    linear_comparison_solution,
)
from .scenarios import (
    DataPair,
    build_base_pair,
    build_example,
    build_prop1,
    build_prop2,
    check_conditions,
    run_scenario,
)
from .solver import SolverConfig, TrajectoryRecord, monitor_theorems, rhs, simulate, step_verlet
from .well import (
    Classification,
    WellReport,
    classify,
    depth_estimate,
    lambda_star,
    poincare_constant,
    project_to_nehari,
    sobolev_constant,
    xi0,
)

__version__ = "0.1.0"
