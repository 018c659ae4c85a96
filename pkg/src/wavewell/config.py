"""YAML experiment configuration: parsing, validation and object assembly.

A config file has up to six sections (all shown with defaults where any):

    domain:         length, n_modes, n_quad = 4*n_modes
                    (or kind: rectangle with lengths/n_modes per axis)
    nonlinearity:   form (F1|F2), a_terms, b_terms; each term has coeff
                    (expression in x), exponent, optional bound; omit the
                    whole section for the linear equation f = 0
    initial_data:   kind manual|prop1|prop2|example; manual takes u0/u1
                    (expressions or coefficient lists) and optional scale;
                    the constructed kinds take energy (and sigma for prop2)
    solver:         dt, t_end, dt_min, psi_cap, energy_drift_tol, record_every
    well:           n_directions, seed, refine
    ode:            gamma, alpha, beta, forcing, psi0, dpsi0, t_max, dt
    sweep:          parameters: [{path, values}, ...] (cartesian grid)

Coefficient expressions follow the grammar documented in
:mod:`wavewell.expressions`.  Malformed structure raises
:class:`ConfigError` with the offending section/field.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np
import yaml

from .basis import Domain, Rectangle, analyze
from .expressions import ExpressionError, compile_expression
from .nonlinearity import ABS, ODD, Nonlinearity, PowerTerm
from .ode import OdeProblem
from .scenarios import DataPair, build_base_pair, build_example, build_prop1, build_prop2
from .solver import SolverConfig

__all__ = ["ConfigError", "ExperimentConfig", "load_config"]


class ConfigError(ValueError):
    """Config file cannot be parsed into valid experiment inputs."""


def _section(raw: dict, name: str, required: bool = True) -> dict:
    value = raw.get(name)
    if value is None:
        if required:
            raise ConfigError(f"missing config section {name!r}")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    return value


def _number(section: dict, name: str, where: str, default=None, allow_expr: bool = False):
    value = section.get(name, default)
    if value is None:
        raise ConfigError(f"{where}: missing field {name!r}")
    if isinstance(value, str):
        # YAML 1.1 reads "1.0e4" (no sign) as a string; accept plain numeric
        # strings, then constant expressions like "pi" where allowed
        try:
            return float(value)
        except ValueError:
            pass
        if not allow_expr:
            raise ConfigError(f"{where}.{name}: expected a number, got {value!r}")
        try:
            return float(compile_expression(value, variables=())())
        except ExpressionError as exc:
            raise ConfigError(f"{where}.{name}: {exc}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{name}: expected a number, got {value!r}")
    return value


def _grid_coefficient(domain, spec, where: str) -> np.ndarray:
    """Constant, expression string, or list of nodal values onto the grid."""
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return np.full(domain.n_quad, float(spec))
    if isinstance(spec, str):
        try:
            func = compile_expression(spec, variables=_grid_vars(domain))
        except ExpressionError as exc:
            raise ConfigError(f"{where}: {exc}") from None
        return np.broadcast_to(
            np.asarray(func(*_grid_args(domain)), dtype=float), (domain.n_quad,)
        ).copy()
    if isinstance(spec, list):
        arr = np.asarray(spec, dtype=float)
        if arr.shape != (domain.n_quad,):
            raise ConfigError(f"{where}: nodal list must have length {domain.n_quad}")
        return arr
    raise ConfigError(f"{where}: expected number, expression or list, got {type(spec).__name__}")


def _grid_vars(domain) -> tuple[str, ...]:
    return ("x", "y") if getattr(domain, "ndim", 1) == 2 else ("x",)


def _grid_args(domain):
    if getattr(domain, "ndim", 1) == 2:
        return (domain.nodes[:, 0], domain.nodes[:, 1])
    return (domain.nodes,)


def _build_domain(raw: dict) -> Domain | Rectangle:
    sec = _section(raw, "domain")
    kind = sec.get("kind", "interval")
    if kind == "rectangle":
        lengths = sec.get("lengths")
        n_modes = sec.get("n_modes")
        if not (isinstance(lengths, list) and len(lengths) == 2):
            raise ConfigError("domain.lengths: rectangle needs [Lx, Ly]")
        if not (isinstance(n_modes, list) and len(n_modes) == 2):
            raise ConfigError("domain.n_modes: rectangle needs [Kx, Ky]")
        n_quad = sec.get("n_quad")
        try:
            return Rectangle(lengths, n_modes, n_quad)
        except ValueError as exc:
            raise ConfigError(f"domain: {exc}") from None
    if kind != "interval":
        raise ConfigError(f"domain.kind: expected 'interval' or 'rectangle', got {kind!r}")
    length = _number(sec, "length", "domain", allow_expr=True)
    n_modes = _number(sec, "n_modes", "domain", default=64)
    n_quad = sec.get("n_quad")
    try:
        return Domain(length, int(n_modes), None if n_quad is None else int(n_quad))
    except ValueError as exc:
        raise ConfigError(f"domain: {exc}") from None


def _build_nonlinearity(raw: dict, domain) -> Nonlinearity | None:
    sec = raw.get("nonlinearity")
    if sec is None:
        return None
    if not isinstance(sec, dict):
        raise ConfigError("section 'nonlinearity' must be a mapping")
    form = sec.get("form", "F1")
    if form not in ("F1", "F2"):
        raise ConfigError(f"nonlinearity.form: expected F1 or F2, got {form!r}")

    def build_terms(key: str, default_kind_first: str) -> tuple[PowerTerm, ...]:
        entries = sec.get(key, [])
        if not isinstance(entries, list):
            raise ConfigError(f"nonlinearity.{key} must be a list of terms")
        terms = []
        for idx, entry in enumerate(entries):
            where = f"nonlinearity.{key}[{idx}]"
            if not isinstance(entry, dict):
                raise ConfigError(f"{where}: each term must be a mapping")
            coeff = _grid_coefficient(domain, entry.get("coeff"), f"{where}.coeff") \
                if entry.get("coeff") is not None else None
            if coeff is None:
                raise ConfigError(f"{where}: missing field 'coeff'")
            exponent = _number(entry, "exponent", where)
            kind = entry.get("kind")
            if kind is None:
                kind = default_kind_first if (key == "a_terms" and idx == 0) else ODD
            if kind not in (ODD, ABS):
                raise ConfigError(f"{where}.kind: expected {ODD!r} or {ABS!r}, got {kind!r}")
            bound = entry.get("bound")
            try:
                terms.append(PowerTerm(coeff, float(exponent), kind,
                                       None if bound is None else float(bound)))
            except ValueError as exc:
                raise ConfigError(f"{where}: {exc}") from None
        return tuple(terms)

    a_terms = build_terms("a_terms", ABS if form == "F2" else ODD)
    b_terms = build_terms("b_terms", ODD)
    if not a_terms:
        raise ConfigError("nonlinearity.a_terms: at least one term is required")
    try:
        return Nonlinearity(a_terms, b_terms, form)
    except ValueError as exc:
        raise ConfigError(f"nonlinearity: {exc}") from None


def _build_solver(raw: dict) -> SolverConfig:
    sec = _section(raw, "solver", required=False)
    try:
        return SolverConfig(
            dt=float(_number(sec, "dt", "solver", default=1e-4)),
            t_end=float(_number(sec, "t_end", "solver", default=5.0)),
            dt_min=float(_number(sec, "dt_min", "solver", default=1e-10)),
            psi_cap=float(_number(sec, "psi_cap", "solver", default=1e6)),
            energy_drift_tol=float(_number(sec, "energy_drift_tol", "solver", default=1e-5)),
            record_every=int(_number(sec, "record_every", "solver", default=20)),
        )
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from None


def _build_ode(raw: dict) -> tuple[OdeProblem, float, float]:
    sec = _section(raw, "ode")
    forcing_spec = sec.get("forcing", 0.0)
    if isinstance(forcing_spec, str):
        try:
            forcing = compile_expression(forcing_spec, variables=("t",))
        except ExpressionError as exc:
            raise ConfigError(f"ode.forcing: {exc}") from None
    elif isinstance(forcing_spec, (int, float)) and not isinstance(forcing_spec, bool):
        const = float(forcing_spec)
        forcing = lambda t: const
    else:
        raise ConfigError("ode.forcing: expected number or expression")
    try:
        problem = OdeProblem(
            gamma=float(_number(sec, "gamma", "ode")),
            psi0=float(_number(sec, "psi0", "ode")),
            dpsi0=float(_number(sec, "dpsi0", "ode")),
            alpha=float(_number(sec, "alpha", "ode", default=0.0)),
            beta=float(_number(sec, "beta", "ode", default=0.0)),
            forcing=forcing,
        )
    except ValueError as exc:
        raise ConfigError(f"ode: {exc}") from None
    t_max = float(_number(sec, "t_max", "ode", default=2.0))
    dt = float(_number(sec, "dt", "ode", default=1e-3))
    return problem, t_max, dt


@dataclass
class ExperimentConfig:
    raw: dict
    domain: Domain | Rectangle
    nonlinearity: Nonlinearity | None
    solver: SolverConfig
    well_n_directions: int
    well_seed: int
    well_refine: bool

    def initial_data(self) -> DataPair:
        sec = _section(self.raw, "initial_data")
        kind = sec.get("kind", "manual")
        if kind == "manual":
            scale = float(_number(sec, "scale", "initial_data", default=1.0))
            u0 = self._field(sec.get("u0", 0.0), "initial_data.u0")
            u1 = self._field(sec.get("u1", 0.0), "initial_data.u1")
            return DataPair(scale * u0, scale * u1, "manual", {"scale": scale})
        if kind in ("prop1", "prop2", "example"):
            if self.nonlinearity is None:
                raise ConfigError(f"initial_data.kind {kind!r} needs a nonlinearity")
            energy = float(_number(sec, "energy", "initial_data"))
            w, v = build_base_pair(self.domain, self.nonlinearity)
            if kind == "prop2":
                sigma = float(_number(sec, "sigma", "initial_data", default=1.0))
                return build_prop2(self.domain, self.nonlinearity, w, v, sigma, energy)
            if kind == "prop1":
                return build_prop1(self.domain, self.nonlinearity, w, v, energy)
            return build_example(self.domain, self.nonlinearity, w, v, energy)
        raise ConfigError(
            f"initial_data.kind: expected manual|prop1|prop2|example, got {kind!r}"
        )

    def _field(self, spec, where: str) -> np.ndarray:
        if isinstance(spec, list) and all(
            isinstance(v, (int, float)) for v in spec
        ) and len(spec) == self.domain.n_modes:
            return np.asarray(spec, dtype=float)
        values = _grid_coefficient(self.domain, spec, where)
        return analyze(self.domain, values)

    def ode_problem(self) -> tuple[OdeProblem, float, float]:
        return _build_ode(self.raw)

    def sweep_grid(self) -> tuple[list[str], list[dict[str, object]]]:
        """Declared parameter names and their cartesian product, in config order."""
        sec = _section(self.raw, "sweep")
        params = sec.get("parameters", [])
        if not isinstance(params, list):
            raise ConfigError("sweep.parameters must be a list")
        names, values = [], []
        for idx, p in enumerate(params):
            if not isinstance(p, dict) or "path" not in p or "values" not in p:
                raise ConfigError(f"sweep.parameters[{idx}] needs 'path' and 'values'")
            if not isinstance(p["values"], list):
                raise ConfigError(f"sweep.parameters[{idx}].values must be a list")
            names.append(str(p["path"]))
            values.append(list(p["values"]))
        grid = [{}] if names else []
        for name, vals in zip(names, values):
            grid = [dict(point, **{name: v}) for point in grid for v in vals]
        # a parameter with an empty values list empties the whole grid
        return names, (grid if all(values) else [])

    def override(self, assignments: dict[str, object]) -> "ExperimentConfig":
        """New config with dotted-path values replaced (used by sweeps)."""
        raw = copy.deepcopy(self.raw)
        for path, value in assignments.items():
            keys = path.split(".")
            target = raw
            for key in keys[:-1]:
                if not isinstance(target.get(key), dict):
                    target[key] = {}
                target = target[key]
            target[keys[-1]] = value
        return parse_config(raw)


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top-level config must be a mapping")
    domain = _build_domain(raw)
    nl = _build_nonlinearity(raw, domain)
    solver = _build_solver(raw)
    well = _section(raw, "well", required=False)
    return ExperimentConfig(
        raw=raw,
        domain=domain,
        nonlinearity=nl,
        solver=solver,
        well_n_directions=int(_number(well, "n_directions", "well", default=64)),
        well_seed=int(_number(well, "seed", "well", default=0)),
        well_refine=bool(well.get("refine", False)),
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    if raw is None:
        raise ConfigError(f"config file {path} is empty")
    return parse_config(raw)
