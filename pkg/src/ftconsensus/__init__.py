"""Fixed-time consensus protocols for single-integrator multi-agent systems."""
from .graph import Graph, GraphError, build_graph, is_connected, min_positive_weight, neighbors, six_agent_graph
from .integrator import IntegrationError, IntegratorSettings, Trajectory, integrate
from .protocols import (
    ConditionCheck,
    ProtocolConfig,
    SingularityError,
    TimeBound,
    Variant,
    bound_consensus_time,
    check_condition,
)
from .scalar import ConditionError, ScalarGains, ScalarState, analytic_abs_x, bound_scalar, simulate_scalar
from .scenario import Scenario, ScenarioError, builtin_scenarios, parse_scenario, run_scenario
from .state import SwarmState

__version__ = "0.1.0"

__all__ = [
    "ConditionCheck",
    "ConditionError",
    "Graph",
    "GraphError",
    "IntegrationError",
    "IntegratorSettings",
    "ProtocolConfig",
    "ScalarGains",
    "ScalarState",
    "Scenario",
    "ScenarioError",
    "SingularityError",
    "SwarmState",
    "TimeBound",
    "Trajectory",
    "Variant",
    "analytic_abs_x",
    "bound_consensus_time",
    "bound_scalar",
    "build_graph",
    "builtin_scenarios",
    "check_condition",
    "integrate",
    "is_connected",
    "min_positive_weight",
    "neighbors",
    "parse_scenario",
    "run_scenario",
    "simulate_scalar",
    "six_agent_graph",
]
