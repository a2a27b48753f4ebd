"""Scenario documents, the built-in examples, and CSV/report output."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Any, Mapping

import jsonschema
import numpy as np

from . import disturbance as dist
from .disturbance import DisturbanceSpec
from .graph import Graph, GraphError, build_graph, is_connected, min_positive_weight, six_agent_graph
from .integrator import IntegratorSettings, Trajectory, integrate
from .metrics import (
    DEFAULT_EPSILON,
    ConsensusReport,
    conservation_error,
    consensus_time,
    disagreement,
    max_control,
    reaching_time,
)
from .protocols import (
    ProtocolConfig,
    Variant,
    bound_consensus_time,
    build_rhs,
    check_config,
    reaching_bound,
)
from .scalar import ConditionError
from .state import SwarmState

SCHEMA_VERSION = 1
DEFAULT_GAMMA = 0.01
DEFAULT_DT = 1e-4
DEFAULT_T_END = 3.0
DEFAULT_T_END_SLIDING = 4.0


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario document."""


class ConditionWarning(UserWarning):
    """The configured gains do not meet the sufficient condition for the time bound."""


class ScenarioWarning(UserWarning):
    """Scenario is runnable but outside the setting the protocol was designed for."""


_NUMBER = {"type": "number"}
_TERM = {
    "type": "object",
    "required": ["waveform", "amplitude", "frequency"],
    "properties": {
        "waveform": {"enum": list(dist.WAVEFORMS)},
        "amplitude": _NUMBER,
        "frequency": _NUMBER,
        "phase": _NUMBER,
    },
    "additionalProperties": False,
}
SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["graph", "protocol", "x0"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string", "minLength": 1},
        "graph": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["n", "edges"],
                    "additionalProperties": False,
                    "properties": {
                        "n": {"type": "integer", "minimum": 1},
                        "edges": {
                            "type": "array",
                            "items": {"type": "array", "minItems": 3, "maxItems": 3, "items": _NUMBER},
                        },
                    },
                },
                {
                    "type": "object",
                    "required": ["matrix"],
                    "additionalProperties": False,
                    "properties": {
                        "matrix": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _NUMBER}}
                    },
                },
            ]
        },
        "protocol": {
            "type": "object",
            "required": ["variant", "lambda", "rho"],
            "additionalProperties": False,
            "properties": {
                "variant": {"enum": [v.value for v in Variant]},
                "lambda": _NUMBER,
                "rho": _NUMBER,
                "gamma": _NUMBER,
                "p": {"type": "array", "items": _NUMBER},
                "omega_s": _NUMBER,
                "mu": _NUMBER,
                "d": _NUMBER,
                "xbar": {"type": "array", "items": _NUMBER},
            },
        },
        "x0": {"type": "array", "minItems": 1, "items": _NUMBER},
        "disturbance": {
            "oneOf": [{"type": "null"}, {"type": "array", "items": {"type": "array", "items": _TERM}}]
        },
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "method": {"enum": ["euler", "rk4"]},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "t_end": {"type": "number", "exclusiveMinimum": 0},
                "record_every": {"type": "integer", "minimum": 1},
            },
        },
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
    },
}


@dataclass(frozen=True)
class Scenario:
    name: str
    graph: Graph
    protocol: ProtocolConfig
    x0: tuple[float, ...]
    disturbance: DisturbanceSpec | None = None
    integrator: IntegratorSettings = IntegratorSettings()
    epsilon: float = DEFAULT_EPSILON

    @property
    def n(self) -> int:
        return self.graph.n


def _path(error: jsonschema.ValidationError) -> str:
    return "/".join(str(p) for p in error.absolute_path) or "<root>"


def parse_scenario(document: str | bytes | Mapping[str, Any]) -> Scenario:
    """Validate a scenario document (JSON text or an already-decoded mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"<root>: invalid JSON: {exc}") from None
    else:
        data = document

    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        # oneOf failures are vague; report the closest branch instead
        if err.context:
            err = min(err.context, key=lambda e: len(list(e.schema_path)))
        raise ScenarioError(f"{_path(err)}: {err.message}")

    try:
        g = data["graph"]
        graph = build_graph(g["n"], g["edges"]) if "edges" in g else Graph(g["matrix"])
    except GraphError as exc:
        raise ScenarioError(f"graph: {exc}") from None
    n = graph.n

    x0 = tuple(float(v) for v in data["x0"])
    if len(x0) != n:
        raise ScenarioError(f"x0: has {len(x0)} entries, graph has {n} agents")

    proto = dict(data["protocol"])
    variant = Variant(proto["variant"])
    kwargs: dict[str, Any] = {
        "variant": variant,
        "lam": float(proto["lambda"]),
        "rho": float(proto["rho"]),
        "gamma": float(proto.get("gamma", DEFAULT_GAMMA)),
    }
    for key in ("p", "xbar"):
        if key in proto:
            kwargs[key] = tuple(float(v) for v in proto[key])
    for key in ("omega_s", "mu", "d"):
        if key in proto:
            kwargs[key] = float(proto[key])
    try:
        protocol = ProtocolConfig(**kwargs)
        protocol.check_size(n)
    except ValueError as exc:
        raise ScenarioError(f"protocol: {exc}") from None

    disturbance = None
    if data.get("disturbance") is not None:
        disturbance = dist.from_lists(data["disturbance"])
        if disturbance.agents and len(disturbance.agents) != n:
            raise ScenarioError(
                f"disturbance: has {len(disturbance.agents)} agent entries, graph has {n} agents"
            )

    integ = data.get("integrator", {})
    default_t_end = DEFAULT_T_END_SLIDING if variant is Variant.SLIDING_MODE else DEFAULT_T_END
    try:
        settings = IntegratorSettings(
            method=integ.get("method", "rk4"),
            dt=float(integ.get("dt", DEFAULT_DT)),
            t_end=float(integ.get("t_end", default_t_end)),
            record_every=integ.get("record_every"),
        )
    except ValueError as exc:
        raise ScenarioError(f"integrator: {exc}") from None

    sc = Scenario(
        name=data.get("name", "scenario"),
        graph=graph,
        protocol=protocol,
        x0=x0,
        disturbance=disturbance,
        integrator=settings,
        epsilon=float(data.get("epsilon", DEFAULT_EPSILON)),
    )
    _soft_checks(sc)
    return sc


def _soft_checks(sc: Scenario) -> None:
    if not is_connected(sc.graph):
        warnings.warn(f"{sc.name}: graph is not connected; consensus is not expected", ScenarioWarning, stacklevel=3)
    if (
        sc.disturbance is not None
        and not sc.disturbance.is_zero
        and sc.protocol.variant is not Variant.SLIDING_MODE
    ):
        warnings.warn(
            f"{sc.name}: nonzero disturbance with the {sc.protocol.variant.value} protocol, "
            "which has no disturbance rejection",
            ScenarioWarning,
            stacklevel=3,
        )


def scenario_to_dict(sc: Scenario) -> dict[str, Any]:
    c = sc.protocol
    proto: dict[str, Any] = {"variant": c.variant.value, "lambda": c.lam, "rho": c.rho, "gamma": c.gamma}
    if c.p is not None:
        proto["p"] = list(c.p)
    if c.omega_s is not None:
        proto["omega_s"] = c.omega_s
    if c.mu is not None:
        proto["mu"] = c.mu
    if c.variant is Variant.SLIDING_MODE or c.d != 0.0:
        proto["d"] = c.d
    if c.xbar is not None:
        proto["xbar"] = list(c.xbar)
    integ: dict[str, Any] = {"method": sc.integrator.method, "dt": sc.integrator.dt, "t_end": sc.integrator.t_end}
    if sc.integrator.record_every is not None:
        integ["record_every"] = sc.integrator.record_every
    return {
        "schema_version": SCHEMA_VERSION,
        "name": sc.name,
        "graph": {"n": sc.n, "edges": [list(e) for e in sc.graph.edges()]},
        "protocol": proto,
        "x0": list(sc.x0),
        "disturbance": None if sc.disturbance is None else dist.to_lists(sc.disturbance),
        "integrator": integ,
        "epsilon": sc.epsilon,
    }


def serialize_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"


def load_scenario(path: str | os.PathLike) -> Scenario:
    return parse_scenario(Path(path).read_text())


# -- built-in examples --------------------------------------------------------

CASE1 = (-5.0, 2.0, 4.0, -2.0, -4.0, 5.0)
CASE2 = (10.0, -20.0, -3.0, 9.0, 4.0, -30.0)
EX3_X0 = (12.0, -12.0, 6.0, 6.0, 4.0, 4.0)
EX3_P = (1 / 12, 1 / 12, 1 / 6, 1 / 6, 1 / 4, 1 / 4)
EX4_X0 = (1.0, -2.0, 3.0, -4.0, 5.0, -6.0)
EX4_SHIFT = (-2.0, 0.0, -2.0, -2.0, -2.0, 2.0)

# Near consensus the regularized protocols act as linear laws with gain
# ~ theta / gamma, which is stiff for RK4. 5e-6 is the coarsest step at which
# every non-sliding example gives step-independent consensus times.
STIFF_DT = 5e-6


def builtin_scenarios() -> dict[str, Scenario]:
    g = six_agent_graph()
    stiff = IntegratorSettings(dt=STIFF_DT, t_end=DEFAULT_T_END)
    sliding = IntegratorSettings(dt=DEFAULT_DT, t_end=DEFAULT_T_END_SLIDING)

    def make(name, protocol, x0, settings, disturbance=None):
        return Scenario(name, g, protocol, tuple(x0), disturbance, settings, DEFAULT_EPSILON)

    fixed = ProtocolConfig(Variant.FIXED_TIME, lam=2.0, rho=2.0, gamma=DEFAULT_GAMMA)
    average = ProtocolConfig(Variant.AVERAGE, lam=2.0, rho=8.0, gamma=DEFAULT_GAMMA)
    weighted = ProtocolConfig(Variant.WEIGHTED, lam=2.0, rho=1.0, gamma=DEFAULT_GAMMA, p=EX3_P)
    smc = ProtocolConfig(
        Variant.SLIDING_MODE, lam=2.0, rho=0.4, gamma=DEFAULT_GAMMA,
        omega_s=4.0, mu=10.0, d=1.0, xbar=(0.0,) * 6,
    )
    scenarios = [
        make("ex1-case1", fixed, CASE1, stiff),
        make("ex1-case2", fixed, CASE2, stiff),
        make("ex2-case1", average, CASE1, stiff),
        make("ex2-case2", average, CASE2, stiff),
        make("ex2-lowrho", replace(average, rho=2.0), CASE1, stiff),
        make("ex3", weighted, EX3_X0, stiff),
        make("ex4", smc, EX4_X0, sliding, dist.example4_disturbance()),
        make("ex4-shifted", replace(smc, xbar=EX4_SHIFT), EX4_X0, sliding, dist.example4_disturbance()),
    ]
    return {sc.name: sc for sc in scenarios}


# -- running ------------------------------------------------------------------


def run_scenario(sc: Scenario) -> tuple[Trajectory, ConsensusReport]:
    c, g = sc.protocol, sc.graph
    sliding = c.variant is Variant.SLIDING_MODE
    rhs = build_rhs(g, c, sc.disturbance)
    traj = integrate(rhs, SwarmState.initial(sc.x0, sliding=sliding), sc.integrator)
    traj.disagreement = disagreement(g, traj.x)
    if sliding:
        xbar = np.zeros(sc.n) if c.xbar is None else np.asarray(c.xbar)
        traj.surface = traj.x - xbar - traj.integral

    check = check_config(g, c)
    if not check.satisfied:
        warnings.warn(
            f"{sc.name}: gains violate the sufficient condition "
            f"(rho={c.rho!r}, threshold={check.threshold!r}"
            + ("" if check.reaching_threshold is None else f", mu={c.mu!r}, threshold={check.reaching_threshold!r}")
            + "); the time bound is not guaranteed",
            ConditionWarning,
            stacklevel=2,
        )
    if sliding and sc.disturbance is not None and not sc.disturbance.is_zero:
        peak = max(np.abs(dist.evaluate(sc.disturbance, float(t), sc.n)).max() for t in traj.times)
        if peak > c.d:
            warnings.warn(
                f"{sc.name}: disturbance reaches {peak!r}, above the configured bound d={c.d!r}",
                ScenarioWarning,
                stacklevel=2,
            )

    try:
        bound = bound_consensus_time(
            c.variant, c.lam, c.rho, c.mu, c.omega_s, g.n, min_positive_weight(g), c.K
        ).total
    except ConditionError:
        bound = None
    r_bound = None
    if sliding:
        try:
            r_bound = reaching_bound(c.mu, c.omega_s)
        except ConditionError:
            pass

    found = consensus_time(traj, sc.epsilon)
    t_star, value = found if found is not None else (None, None)
    report = ConsensusReport(
        scenario=sc.name,
        variant=c.variant.value,
        consensus_time=t_star,
        consensus_value=value,
        bound=bound,
        within_bound=None if (t_star is None or bound is None) else t_star <= bound,
        condition_satisfied=check.satisfied,
        max_spread_final=float(traj.spread[-1]),
        max_control=max_control(traj),
        conservation_error=conservation_error(traj, c.p if c.variant is Variant.WEIGHTED else None),
        reaching_time=reaching_time(traj, sc.epsilon) if sliding else None,
        reaching_bound=r_bound,
    )
    return traj, report


# -- output -------------------------------------------------------------------


def _fmt(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_fields(report: ConsensusReport) -> dict[str, str]:
    fields = {
        "scenario": report.scenario,
        "variant": report.variant,
        "consensus_time": report.consensus_time,
        "consensus_value": report.consensus_value,
        "bound": report.bound,
        "within_bound": report.within_bound,
        "condition_satisfied": report.condition_satisfied,
        "max_control": report.max_control,
        "max_spread_final": report.max_spread_final,
        "conservation_error": report.conservation_error,
    }
    if report.variant == Variant.SLIDING_MODE.value:
        fields["reaching_time"] = report.reaching_time
        fields["reaching_bound"] = report.reaching_bound
    return {k: _fmt(v) for k, v in fields.items()}


def csv_header(n: int, sliding: bool) -> list[str]:
    cols = ["t"]
    for prefix in ("x", "u", "theta"):
        cols += [f"{prefix}{i}" for i in range(1, n + 1)]
    cols += ["V", "spread"]
    if sliding:
        for prefix in ("s", "eta"):
            cols += [f"{prefix}{i}" for i in range(1, n + 1)]
    return cols


def _write_atomic(destination: str | os.PathLike, text: str) -> None:
    dest = Path(destination)
    fd, tmp = tempfile.mkstemp(dir=dest.parent, prefix=f".{dest.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, dest)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, destination: str | os.PathLike | IO[str]) -> None:
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        _write_atomic(destination, text)


def emit_csv(traj: Trajectory, destination: str | os.PathLike | IO[str]) -> None:
    """One header row, then one row per recorded sample at full ``repr`` precision."""
    if traj.disagreement is None:
        raise ValueError("trajectory has no disagreement trace; run it through run_scenario")
    sliding = traj.surface is not None
    blocks = [traj.times[:, None], traj.x, traj.controls, traj.theta, traj.disagreement[:, None], traj.spread[:, None]]
    if sliding:
        blocks += [traj.surface, traj.eta]
    table = np.hstack(blocks)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header(traj.n, sliding))
    writer.writerows([repr(v) for v in row] for row in table.tolist())
    _emit(buf.getvalue(), destination)


def emit_report(report: ConsensusReport, destination: str | os.PathLike | IO[str]) -> None:
    text = "".join(f"{k}={v}\n" for k, v in report_fields(report).items())
    _emit(text, destination)


def emit_summary(reports: list[ConsensusReport], destination: str | os.PathLike | IO[str]) -> None:
    """One CSV row per report; columns are the union of report keys."""
    rows = [report_fields(r) for r in reports]
    columns: list[str] = []
    for row in rows:
        columns += [k for k in row if k not in columns]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, restval="", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), destination)
