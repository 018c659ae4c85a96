"""Configuration-driven experiment runner.

Subcommands: simulate | depth | classify | verify-ode | sweep, each taking
--config <path> and writing delimited output, a JSON summary and rendered
figures into --out <dir>.  Exit codes: 0 success (a detected blow-up is a
result, not an error), 2 config parse error, 3 validation failure
(inadmissible nonlinearity, degenerate thresholds, infeasible construction).

Outputs are deterministic: identical config and seed produce byte-identical
CSV and JSON (keys sorted, floats at 17 significant digits, LF endings).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import plots
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .functionals import snapshot
from .nonlinearity import validate
from .ode import concavity_check, integrate_lemma1, integrate_lemma2
from .scenarios import ConstructionError, check_conditions, run_scenario
from .solver import simulate
from .well import (
    DegenerateNonlinearityError,
    NoScalingRootError,
    classify,
    depth_estimate,
)

# Conditions whose failure makes the configured problem structurally
# inadmissible (exit 3).  A missing sign change in the leading coefficient is
# reported but not fatal: constant-coefficient runs are legitimate
# simulations, only the theorem checkers gate on it.
HARD_CONDITIONS = (
    "exponent_chain",
    "growth_cap",
    "a_terms_nonnegative",
    "b_terms_nonpositive",
    "term_kinds",
)

CSV_COLUMNS = ("t", "E", "J", "I", "B", "psi", "psi_dot", "grad_sq", "dt")


class ValidationFailure(RuntimeError):
    pass


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(path: Path, payload: dict):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _gate_nonlinearity(cfg: ExperimentConfig):
    """Exit-3 gate on the structural admissibility conditions."""
    if cfg.nonlinearity is None:
        return None
    report = validate(cfg.nonlinearity)
    hard = [c for c in report.failures() if c.name in HARD_CONDITIONS]
    if hard:
        lines = "; ".join(f"{c.name}: {c.detail}" for c in hard)
        raise ValidationFailure(f"inadmissible nonlinearity ({lines})")
    return report


def _nl_summary(cfg: ExperimentConfig, report) -> dict | None:
    nl = cfg.nonlinearity
    if nl is None:
        return None
    return {
        "form": nl.form,
        "p1": nl.p1,
        "a_terms": [
            {"exponent": t.exponent, "bound": t.bound, "kind": t.kind}
            for t in nl.a_terms
        ],
        "b_terms": [
            {"exponent": t.exponent, "bound": t.bound, "kind": t.kind}
            for t in nl.b_terms
        ],
        "admissible": report.ok,
        "conditions": {c.name: c.passed for c in report.checks},
    }


def _config_echo(cfg: ExperimentConfig, seed: int) -> dict:
    dom = cfg.domain
    domain_echo = {
        "n_modes": dom.n_modes,
        "n_quad": dom.n_quad,
        "ndim": getattr(dom, "ndim", 1),
    }
    if getattr(dom, "ndim", 1) == 2:
        domain_echo["lengths"] = list(dom.lengths)
    else:
        domain_echo["length"] = dom.length
    return {
        "domain": domain_echo,
        "solver": asdict(cfg.solver),
        "well": {
            "n_directions": cfg.well_n_directions,
            "seed": seed,
            "refine": cfg.well_refine,
        },
    }


def _estimate_well(cfg: ExperimentConfig, seed: int):
    if cfg.nonlinearity is None:
        return None, "no nonlinearity"
    try:
        return depth_estimate(
            cfg.domain, cfg.nonlinearity,
            n_directions=cfg.well_n_directions, seed=seed, refine=cfg.well_refine,
        ), None
    except (DegenerateNonlinearityError, NoScalingRootError) as exc:
        return None, str(exc)


def _well_payload(well) -> dict | None:
    if well is None:
        return None
    return {
        "xi0": well.xi0,
        "d_lower": well.d_lower,
        "d_upper": well.d_upper,
        "n_directions": well.n_directions,
        "n_skipped": well.n_skipped,
        "seed": well.seed,
        "refined": well.refined,
        "p1": well.p1,
        "sobolev_constants": {f"{q:g}": c for q, c in well.sobolev_constants.items()},
        "per_direction_minima": list(well.per_direction),
    }


def _conditions_payload(report) -> dict:
    return {
        "E0": report.E0,
        "psi0": report.psi0,
        "product0": report.product0,
        "I0": report.I0,
        "energy_class": report.energy_class,
        "conditions": {
            name: {"holds": c.holds, "margin": c.margin, "inconclusive": c.inconclusive}
            for name, c in report.conditions.items()
        },
    }


def _record_rows(record):
    for k in range(len(record.times)):
        s = record.snapshots[k]
        yield (record.times[k], s.E, s.J, s.I, s.B, s.psi, s.psi_dot, s.grad_sq,
               record.dts[k])


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    report = _gate_nonlinearity(cfg)
    seed = args.seed if args.seed is not None else cfg.well_seed
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    pair = cfg.initial_data()
    well, well_note = _estimate_well(cfg, seed)

    summary = {
        "command": "simulate",
        "config": _config_echo(cfg, seed),
        "nonlinearity": _nl_summary(cfg, report),
        "initial_data": {"provenance": pair.provenance, "constants": pair.constants},
    }

    if cfg.nonlinearity is not None:
        scenario = run_scenario(cfg.domain, cfg.nonlinearity, pair, cfg.solver, well)
        record = scenario.record
        summary["conditions"] = _conditions_payload(scenario.conditions)
        summary["theorem_checks"] = [asdict(v) for v in scenario.verdicts]
        summary["predicted_by"] = scenario.predicted_by
        summary["comparison_ok"] = scenario.comparison_ok
        summary["comparison_max_deficit"] = scenario.comparison_max_deficit
    else:
        record = simulate(cfg.domain, None, pair.state(), cfg.solver)
        summary["conditions"] = None
        summary["theorem_checks"] = []
        summary["predicted_by"] = []
        summary["comparison_ok"] = None
        summary["comparison_max_deficit"] = None

    summary.update({
        "verdict": record.verdict,
        "T_blowup_est": record.T_blowup_est,
        "last_trusted_time": record.last_trusted_time,
        "drift_check_suspended": record.drift_check_suspended,
        "I_sign_changes": record.I_sign_changes,
        "n_steps": record.n_steps,
        "E0": record.snapshots[0].E,
        "well": _well_payload(well),
        "well_note": well_note,
        "outputs": {"timeseries": "timeseries.csv", "figure": "trajectory.png"},
    })

    _write_csv(out / "timeseries.csv", CSV_COLUMNS, _record_rows(record))
    _write_json(out / "summary.json", summary)
    plots.trajectory_figure(record, out / "trajectory.png")
    print(f"{record.verdict}: {len(record.times)} records -> {out}")
    return 0


def cmd_depth(args) -> int:
    cfg = load_config(args.config)
    _gate_nonlinearity(cfg)
    if cfg.nonlinearity is None:
        raise ValidationFailure("depth estimation needs a nonlinearity section")
    seed = args.seed if args.seed is not None else cfg.well_seed
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        well = depth_estimate(
            cfg.domain, cfg.nonlinearity,
            n_directions=cfg.well_n_directions, seed=seed, refine=cfg.well_refine,
        )
    except (DegenerateNonlinearityError, NoScalingRootError) as exc:
        raise ValidationFailure(str(exc)) from None

    payload = {
        "command": "depth",
        "config": _config_echo(cfg, seed),
        "well": _well_payload(well),
    }
    _write_json(out / "well_report.json", payload)
    _write_csv(out / "directions.csv", ("direction", "J_min"),
               ((i, v) for i, v in enumerate(well.per_direction)))
    plots.depth_figure(well, out / "depth.png")
    print(f"xi0 = {well.xi0:.12g}, d in [{well.d_lower:.12g}, {well.d_upper:.12g}] -> {out}")
    return 0


def cmd_classify(args) -> int:
    cfg = load_config(args.config)
    _gate_nonlinearity(cfg)
    if cfg.nonlinearity is None:
        raise ValidationFailure("classification needs a nonlinearity section")
    seed = args.seed if args.seed is not None else cfg.well_seed
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    pair = cfg.initial_data()
    well, well_note = _estimate_well(cfg, seed)
    try:
        cls = classify(cfg.domain, cfg.nonlinearity, pair.u0,
                       xi0_value=None if well is None else well.xi0)
    except DegenerateNonlinearityError as exc:
        raise ValidationFailure(str(exc)) from None
    report = check_conditions(cfg.domain, cfg.nonlinearity, pair, well)

    payload = {
        "command": "classify",
        "config": _config_echo(cfg, seed),
        "initial_data": {"provenance": pair.provenance, "constants": pair.constants},
        "classification": asdict(cls),
        "conditions": _conditions_payload(report),
        "well": _well_payload(well),
        "well_note": well_note,
    }
    _write_json(out / "classification.json", payload)
    _write_csv(out / "conditions.csv", ("condition", "holds", "margin", "inconclusive"),
               ((name, c.holds, c.margin, c.inconclusive)
                for name, c in report.conditions.items()))
    plots.conditions_figure(report, out / "conditions.png")
    print(f"region = {cls.region}, energy class = {report.energy_class} -> {out}")
    return 0


def cmd_verify_ode(args) -> int:
    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    problem, t_max, dt = cfg.ode_problem()
    if problem.alpha > 0 and problem.beta > 0:
        result = integrate_lemma2(problem, t_max, dt)
        form = "quadratic"
    else:
        result = integrate_lemma1(problem, t_max, dt)
        form = "forced"
    concavity = None
    if form == "forced":
        # the transform z = psi^{1-gamma} is concave for this form; check it
        # on the contiguous finite-positive prefix of the sample grid
        good = np.isfinite(result.psi) & (result.psi > 0)
        n_good = int(good.size if good.all() else np.argmin(good))
        if n_good >= 3:
            rep = concavity_check(result.times[:n_good], result.psi[:n_good],
                                  problem.gamma)
            concavity = {
                "max_second_difference": rep.max_second_difference,
                "threshold": rep.threshold,
                "n_violations": rep.n_violations,
                "n_interior": rep.n_interior,
                "concave": rep.concave,
            }
    payload = {
        "command": "verify-ode",
        "problem": {
            "gamma": problem.gamma, "alpha": problem.alpha, "beta": problem.beta,
            "psi0": problem.psi0, "dpsi0": problem.dpsi0, "t_max": t_max, "dt": dt,
            "form": form,
        },
        "blowup_time": result.blowup_time,
        "degenerate_time": result.degenerate_time,
        "concavity": concavity,
    }
    _write_json(out / "ode_report.json", payload)
    _write_csv(out / "ode_trajectory.csv", ("t", "psi", "dpsi"),
               zip(result.times, result.psi, result.dpsi))
    plots.ode_figure(result, problem.gamma, out / "ode.png")
    verdict = ("blow-up at %.6g" % result.blowup_time
               if result.blowup_time is not None else "no blow-up in window")
    print(f"{verdict} -> {out}")
    return 0


def _sweep_point(raw: dict, assignments: dict, seed: int) -> dict:
    cfg = parse_config(raw).override(assignments)
    _gate_nonlinearity(cfg)
    pair = cfg.initial_data()
    well, _ = _estimate_well(cfg, seed)
    if cfg.nonlinearity is not None:
        scenario = run_scenario(cfg.domain, cfg.nonlinearity, pair, cfg.solver, well)
        record = scenario.record
        conditions = scenario.conditions
    else:
        record = simulate(cfg.domain, None, pair.state(), cfg.solver)
        conditions = None
    s0 = record.snapshots[0]
    row = dict(assignments)
    row.update({
        "verdict": record.verdict,
        "T_blowup_est": record.T_blowup_est,
        "last_trusted_time": record.last_trusted_time,
        "I_sign_changes": record.I_sign_changes,
        "E0": s0.E, "I0": s0.I, "psi0": s0.psi, "product0": 0.5 * s0.psi_dot,
    })
    if conditions is not None:
        for name, c in conditions.conditions.items():
            row[f"margin_{name}"] = c.margin
            row[f"holds_{name}"] = c.holds
    return row


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    _gate_nonlinearity(cfg)
    seed = args.seed if args.seed is not None else cfg.well_seed
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    param_names, grid = cfg.sweep_grid()

    if grid and args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            futures = [pool.submit(_sweep_point, cfg.raw, point, seed) for point in grid]
            rows = [f.result() for f in futures]
    else:
        rows = [_sweep_point(cfg.raw, point, seed) for point in grid]

    columns = list(param_names) + [
        "verdict", "T_blowup_est", "last_trusted_time", "I_sign_changes",
        "E0", "I0", "psi0", "product0",
    ]
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    _write_csv(out / "sweep.csv", columns,
               ((row.get(c) for c in columns) for row in rows))
    _write_json(out / "sweep_summary.json", {
        "command": "sweep",
        "config": _config_echo(cfg, seed),
        "n_points": len(rows),
        "parameters": param_names,
        "verdicts": [row["verdict"] for row in rows],
    })
    plots.sweep_figure(rows, param_names, out / "sweep.png")
    print(f"{len(rows)} grid points -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavewell",
        description="Experiment runner for the semilinear wave equation laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, doc in (
        ("simulate", cmd_simulate, "integrate the configured initial data"),
        ("depth", cmd_depth, "estimate the potential-well depth bracket"),
        ("classify", cmd_classify, "classify the configured data without simulating"),
        ("verify-ode", cmd_verify_ode, "integrate the scalar blow-up ODE"),
        ("sweep", cmd_sweep, "run simulate over a parameter grid"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="path to the YAML config")
        p.add_argument("--out", default="wavewell_out", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the well-estimation seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker processes for sweeps")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValidationFailure, ConstructionError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
