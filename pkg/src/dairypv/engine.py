"""Adoption engine: logistic probability, yearly step, simulation, replication.

Deterministic mode tracks the expected cumulative adopter count driven by a
single representative farmer (PV cost at the midpoint of the sampled range).
Stochastic mode simulates every farmer with an individually sampled cost and
independent Bernoulli adoption draws.

Random generator identity is part of the external contract: numpy PCG64,
seeded directly with the scenario seed; Monte Carlo replication r uses
(base_seed + r) mod 2**64.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .domain import (
    AgentState,
    SimulationResult,
    YearRecord,
    require_finite,
)
from .economics import agent_utility, constant_savings, net_present_value
from .errors import CoverageGapError, ValidationError

# Smallest positive float; floor for probabilities when the exponential
# saturates, keeping the open-interval (0, beta) contract.
_TINY = 5e-324


def adoption_probability(economic_utility, alpha, beta, total_farmers):
    """Likelihood that a farmer with the given utility installs PV this year.

    Logistic in utility per farmer, scaled by the ceiling beta. The result
    stays strictly inside (0, beta) even for extreme utilities: the
    exponential is evaluated only on non-positive arguments, so it can
    underflow but never overflow.
    """
    economic_utility = require_finite("economic_utility", economic_utility)
    require_finite("alpha", alpha)
    if alpha <= 0:
        raise ValidationError(f"alpha must be > 0, got {alpha}")
    require_finite("beta", beta)
    if not 0 < beta <= 1:
        raise ValidationError(f"beta must be in (0, 1], got {beta}")
    if total_farmers < 1:
        raise ValidationError(f"total_farmers must be >= 1, got {total_farmers}")
    x = alpha * economic_utility / total_farmers
    if x >= 0:
        p = beta / (1.0 + math.exp(-x))
    else:
        e = math.exp(x)
        p = beta * e / (1.0 + e)
    return min(max(p, _TINY), math.nextafter(beta, 0.0))


def _probability_array(utilities, alpha, beta, total_farmers):
    """Vectorized adoption_probability over an array of utilities."""
    x = alpha * utilities / total_farmers
    p = np.empty_like(x)
    pos = x >= 0
    p[pos] = beta / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    p[~pos] = beta * e / (1.0 + e)
    return np.clip(p, _TINY, math.nextafter(beta, 0.0))


@dataclass(frozen=True)
class AgentPopulation:
    """Vectorized farmer population; the array index is the agent id."""

    pv_costs: np.ndarray
    adopted: np.ndarray
    adoption_years: np.ndarray

    @property
    def size(self):
        return len(self.pv_costs)

    @property
    def adopted_count(self):
        return int(np.count_nonzero(self.adopted))

    def as_agent_states(self):
        """Materialize the population as a list of AgentState values."""
        return [
            AgentState(
                id=i,
                pv_cost=float(self.pv_costs[i]),
                adopted=bool(self.adopted[i]),
                adoption_year=int(self.adoption_years[i]) if self.adopted[i] else None,
            )
            for i in range(self.size)
        ]


@dataclass
class SimulationState:
    """Loop state for one simulation run.

    Deterministic mode uses the real-valued cumulative accumulator;
    stochastic mode carries the agent population and its generator (the
    generator advances in place as draws are consumed).
    """

    year: int
    cumulative_adopters: float = 0.0
    agents: AgentPopulation | None = None
    rng: np.random.Generator | None = None


def initialize_state(params, seed=None):
    """Build the starting state for a run.

    In stochastic mode agent PV costs are sampled Uniform[pv_cost_min,
    pv_cost_max] in id order before the first step; `seed` overrides
    params.seed (used by Monte Carlo replication).
    """
    if params.mode == "deterministic":
        return SimulationState(year=params.start_year)
    if seed is None:
        seed = params.seed
    rng = np.random.Generator(np.random.PCG64(seed))
    costs = rng.uniform(params.pv_cost_min, params.pv_cost_max, size=params.total_farmers)
    population = AgentPopulation(
        pv_costs=costs,
        adopted=np.zeros(params.total_farmers, dtype=bool),
        adoption_years=np.full(params.total_farmers, -1, dtype=np.int64),
    )
    return SimulationState(year=params.start_year, agents=population, rng=rng)


def _representative_utility(params, energy_price, subsidy):
    rep = AgentState(id=0, pv_cost=params.midpoint_cost)
    return agent_utility(rep, params, energy_price, subsidy)


def _utilities_for_costs(costs, params, energy_price, subsidy):
    """Vectorized agent utilities; affine in PV cost.

    Matches economics.agent_utility term by term: the utility of cost c is
    (generation*price)*A - (1 + maintenance*A)*c + subsidy where A is the
    discount-factor sum over t = 0..horizon.
    """
    annuity = net_present_value(
        constant_savings(1.0, params.horizon_years), params.discount_rate
    )
    revenue = params.annual_generation_kwh * energy_price
    return revenue * annuity - (1.0 + params.maintenance_rate * annuity) * costs + subsidy


def step_year(state, params, energy_price, subsidy):
    """Advance the simulation by one year; returns (next_state, YearRecord).

    Deterministic hazard semantics draw new adopters from the not-yet-adopted
    pool; literal semantics recompute the cumulative level as p * N each year
    (new adopters reported as the non-negative difference). Stochastic mode
    gives every non-adopted agent an independent Bernoulli adoption draw in
    id order; adoption_semantics has no effect there. Stochastic records
    carry the mean utility and mean probability of the agents evaluated.
    """
    if not params.start_year <= state.year <= params.end_year:
        raise ValidationError(
            f"state.year {state.year} outside scenario range "
            f"{params.start_year}-{params.end_year}"
        )
    energy_price = require_finite("energy_price", energy_price)
    subsidy = require_finite("subsidy", subsidy)
    total = params.total_farmers

    if params.mode == "deterministic":
        utility = _representative_utility(params, energy_price, subsidy)
        probability = adoption_probability(utility, params.alpha, params.beta, total)
        prior = state.cumulative_adopters
        if params.adoption_semantics == "hazard":
            new = probability * (total - prior)
            cumulative = prior + new
        else:
            cumulative = probability * total
            new = max(0.0, cumulative - prior)
        next_state = SimulationState(year=state.year + 1, cumulative_adopters=cumulative)
    else:
        population = state.agents
        remaining = ~population.adopted
        n_remaining = int(np.count_nonzero(remaining))
        adopted = population.adopted.copy()
        adoption_years = population.adoption_years.copy()
        if n_remaining > 0:
            utilities = _utilities_for_costs(
                population.pv_costs[remaining], params, energy_price, subsidy
            )
            probabilities = _probability_array(utilities, params.alpha, params.beta, total)
            draws = state.rng.random(n_remaining)
            adopts = draws < probabilities
            indices = np.nonzero(remaining)[0][adopts]
            adopted[indices] = True
            adoption_years[indices] = state.year
            utility = float(np.mean(utilities))
            probability = float(np.mean(probabilities))
            new = float(len(indices))
        else:
            # Everyone already adopted: report the representative agent's
            # view so the record stays finite.
            utility = _representative_utility(params, energy_price, subsidy)
            probability = adoption_probability(utility, params.alpha, params.beta, total)
            new = 0.0
        next_population = AgentPopulation(
            pv_costs=population.pv_costs, adopted=adopted, adoption_years=adoption_years
        )
        cumulative = float(np.count_nonzero(adopted))
        next_state = SimulationState(
            year=state.year + 1,
            cumulative_adopters=cumulative,
            agents=next_population,
            rng=state.rng,
        )

    record = YearRecord(
        year=state.year,
        energy_price=energy_price,
        subsidy=subsidy,
        economic_utility=utility,
        probability=probability,
        new_adopters=new,
        cumulative_adopters=cumulative,
    )
    return next_state, record


def check_series_coverage(series, name, params):
    """Fail fast if a series does not cover every simulated year."""
    missing = [y for y in range(params.start_year, params.end_year + 1) if y not in series]
    if missing:
        raise CoverageGapError(
            f"{name} series covers {series.first_year}-{series.last_year} but the "
            f"scenario needs {params.start_year}-{params.end_year}; missing years: "
            + ", ".join(str(y) for y in missing),
            missing_years=missing,
        )


def run_simulation(params, prices, subsidies, seed=None):
    """Run the full multi-year simulation; one YearRecord per year.

    Both series must cover [start_year, end_year]; coverage is checked
    before any stepping so failures never produce partial results.
    """
    check_series_coverage(prices, "price", params)
    check_series_coverage(subsidies, "subsidy", params)
    state = initialize_state(params, seed=seed)
    records = []
    for year in range(params.start_year, params.end_year + 1):
        state, record = step_year(
            state, params, prices.value_for(year), subsidies.value_for(year)
        )
        records.append(record)
    return SimulationResult(params_digest=params.digest, records=tuple(records))


@dataclass(frozen=True)
class YearStats:
    """Per-year spread of cumulative adopters across replications."""

    year: int
    mean: float
    std: float
    min: float
    max: float

    def __post_init__(self):
        for name in ("mean", "std", "min", "max"):
            object.__setattr__(self, name, require_finite(name, getattr(self, name)))
        if self.std < 0:
            raise ValidationError(f"std must be >= 0, got {self.std}")
        if not self.min <= self.mean <= self.max:
            raise ValidationError(
                f"expected min <= mean <= max, got {self.min}, {self.mean}, {self.max}"
            )


@dataclass(frozen=True)
class MonteCarloSummary:
    """Per-year statistics over stochastic replications."""

    replications: int
    base_seed: int
    rows: tuple

    def __post_init__(self):
        if self.replications < 1:
            raise ValidationError(f"replications must be >= 1, got {self.replications}")
        object.__setattr__(self, "rows", tuple(self.rows))


def run_monte_carlo(params, prices, subsidies, replications, base_seed):
    """Replicate the stochastic simulation and aggregate per-year statistics.

    Replication r runs with seed (base_seed + r) mod 2**64. Statistics are
    reduced from a replication-by-year matrix in index order, so the result
    does not depend on any execution schedule. std is the population
    standard deviation (zero for a single replication).
    """
    if replications < 1:
        raise ValidationError(f"replications must be >= 1, got {replications}")
    if params.mode != "stochastic":
        raise ValidationError(f"run_monte_carlo requires mode 'stochastic', got {params.mode!r}")
    if not 0 <= base_seed <= 2**64 - 1:
        raise ValidationError(f"base_seed must fit in an unsigned 64-bit integer, got {base_seed}")
    check_series_coverage(prices, "price", params)
    check_series_coverage(subsidies, "subsidy", params)

    curves = np.empty((replications, params.n_years), dtype=float)
    for r in range(replications):
        seed = (base_seed + r) % 2**64
        try:
            result = run_simulation(replace(params, seed=seed), prices, subsidies)
        except Exception as exc:
            raise RuntimeError(f"replication {r} (seed {seed}) failed: {exc}") from exc
        curves[r, :] = [rec.cumulative_adopters for rec in result.records]

    years = range(params.start_year, params.end_year + 1)
    rows = tuple(
        YearStats(
            year=year,
            mean=float(np.mean(curves[:, i])),
            std=float(np.std(curves[:, i])),
            min=float(np.min(curves[:, i])),
            max=float(np.max(curves[:, i])),
        )
        for i, year in enumerate(years)
    )
    return MonteCarloSummary(replications=replications, base_seed=base_seed, rows=rows)
