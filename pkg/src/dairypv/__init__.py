"""Agent-based simulator of solar PV adoption on dairy farms.

Pipeline: per-farmer economic utility (discounted energy savings minus net
installation cost) feeds a logistic adoption probability, iterated year by
year over a historical price and subsidy schedule. A calibration module
recovers the curve parameters (alpha, beta) from observed adoption counts.
"""

from .calibration import (
    CalibrationResult,
    CalibrationTarget,
    calibrate,
    evaluate_loss,
)
from .domain import (
    AgentState,
    MoneyEur,
    ScenarioParams,
    SimulationResult,
    YearRecord,
    YearSeries,
    round_half_up,
)
from .economics import (
    agent_utility,
    annual_savings,
    constant_savings,
    economic_utility,
    net_present_value,
)
from .engine import (
    AgentPopulation,
    MonteCarloSummary,
    SimulationState,
    YearStats,
    adoption_probability,
    initialize_state,
    run_monte_carlo,
    run_simulation,
    step_year,
)
from .io import (
    LoadedScenario,
    load_default_scenario,
    load_scenario,
    parse_year_series,
    render_result,
    write_result,
)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "AgentPopulation",
    "AgentState",
    "CalibrationResult",
    "CalibrationTarget",
    "LoadedScenario",
    "MoneyEur",
    "MonteCarloSummary",
    "ScenarioParams",
    "SimulationResult",
    "SimulationState",
    "YearRecord",
    "YearSeries",
    "YearStats",
    "adoption_probability",
    "agent_utility",
    "annual_savings",
    "calibrate",
    "constant_savings",
    "economic_utility",
    "errors",
    "evaluate_loss",
    "initialize_state",
    "load_default_scenario",
    "load_scenario",
    "net_present_value",
    "parse_year_series",
    "render_result",
    "round_half_up",
    "run_monte_carlo",
    "run_simulation",
    "step_year",
    "write_result",
]
