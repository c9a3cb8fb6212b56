"""Recovers the adoption-curve parameters (alpha, beta) from observed data.

Coarse log-spaced grid search followed by derivative-free pattern search
(Hooke-Jeeves: coordinate polls plus accelerating pattern moves) in log10
space. Refinement restarts from successive grid points in loss order until
the evaluation budget runs out: the objective can form separate basins
(scale/sensitivity trade-offs between beta and alpha), so polishing only
the single best cell can land in a local minimum.

The whole procedure is deterministic: fixed grid, fixed poll order, and the
tie-break (lowest loss, then smallest alpha, then smallest beta) is applied
through explicit key comparison so the outcome would not depend on
evaluation order even if grid points were evaluated concurrently.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .domain import require_finite
from .engine import run_simulation
from .errors import CalibrationFailedError, ValidationError

ALPHA_BOUNDS = (1e-3, 100.0)
BETA_BOUNDS = (1e-5, 1.0)
GRID_POINTS_PER_AXIS = 20
GRID_SIZE = GRID_POINTS_PER_AXIS**2
# Pattern search stops once its log10 step drops below this (relative
# parameter changes of about 2.3e-6).
REFINE_TOLERANCE = 1e-6

LOSS_KINDS = ("squared_error", "absolute_error")

_LOG_ALPHA = (math.log10(ALPHA_BOUNDS[0]), math.log10(ALPHA_BOUNDS[1]))
_LOG_BETA = (math.log10(BETA_BOUNDS[0]), math.log10(BETA_BOUNDS[1]))


@dataclass(frozen=True)
class CalibrationTarget:
    """Observed (year, cumulative adopters) pairs and the loss to minimize."""

    observations: tuple
    loss: str = "squared_error"

    def __post_init__(self):
        observations = tuple((int(y), require_finite(f"observation[{y}]", v))
                             for y, v in self.observations)
        object.__setattr__(self, "observations", observations)
        if not observations:
            raise ValidationError("target must contain at least one observation")
        years = [y for y, _ in observations]
        if len(set(years)) != len(years):
            raise ValidationError("target observation years must be unique")
        if self.loss not in LOSS_KINDS:
            raise ValidationError(f"loss must be one of {LOSS_KINDS}, got {self.loss!r}")

    def validate_against(self, params):
        """Check observations fit the scenario's year range and population."""
        for year, value in self.observations:
            if not params.start_year <= year <= params.end_year:
                raise ValidationError(
                    f"target year {year} outside scenario range "
                    f"{params.start_year}-{params.end_year}"
                )
            if not 0 <= value <= params.total_farmers:
                raise ValidationError(
                    f"target value {value} for year {year} outside "
                    f"[0, {params.total_farmers}]"
                )


@dataclass(frozen=True)
class CalibrationResult:
    """Fitted parameters plus search diagnostics."""

    alpha: float
    beta: float
    achieved_loss: float
    evaluations: int
    converged: bool

    def __post_init__(self):
        require_finite("alpha", self.alpha)
        require_finite("beta", self.beta)
        require_finite("achieved_loss", self.achieved_loss)
        if self.achieved_loss < 0:
            raise ValidationError(f"achieved_loss must be >= 0, got {self.achieved_loss}")


def _check_bounds(alpha, beta):
    if not ALPHA_BOUNDS[0] <= alpha <= ALPHA_BOUNDS[1]:
        raise ValidationError(
            f"alpha candidate {alpha} outside bounds [{ALPHA_BOUNDS[0]}, {ALPHA_BOUNDS[1]}]"
        )
    if not BETA_BOUNDS[0] <= beta <= BETA_BOUNDS[1]:
        raise ValidationError(
            f"beta candidate {beta} outside bounds [{BETA_BOUNDS[0]}, {BETA_BOUNDS[1]}]"
        )


def evaluate_loss(candidate, params, prices, subsidies, target):
    """Loss of one (alpha, beta) candidate against the target observations.

    Always runs the deterministic hazard simulation so the objective is a
    pure function of the candidate (a stochastic objective would make the
    fit seed-dependent).
    """
    alpha, beta = candidate
    _check_bounds(alpha, beta)
    run_params = replace(
        params, alpha=alpha, beta=beta, mode="deterministic",
        adoption_semantics="hazard", seed=None,
    )
    result = run_simulation(run_params, prices, subsidies)
    simulated = result.cumulative_by_year()
    total = 0.0
    for year, observed in target.observations:
        diff = simulated[year] - observed
        total += diff * diff if target.loss == "squared_error" else abs(diff)
    return total


def _clamp(value, lo, hi):
    return min(max(value, lo), hi)


class _Objective:
    """Budget-counting wrapper around evaluate_loss in log10 coordinates."""

    def __init__(self, params, prices, subsidies, target, budget):
        self._args = (params, prices, subsidies, target)
        self.budget = budget
        self.evaluations = 0

    @property
    def exhausted(self):
        return self.evaluations >= self.budget

    def __call__(self, log_alpha, log_beta):
        alpha = _clamp(10.0**log_alpha, *ALPHA_BOUNDS)
        beta = _clamp(10.0**log_beta, *BETA_BOUNDS)
        self.evaluations += 1
        loss = evaluate_loss((alpha, beta), *self._args)
        return loss, alpha, beta


def _explore(objective, point, value, step):
    """One Hooke-Jeeves exploratory sweep: poll +/-step on each coordinate."""
    point = list(point)
    candidate = value  # (loss, alpha, beta)
    for axis, bounds in enumerate((_LOG_ALPHA, _LOG_BETA)):
        for direction in (step, -step):
            if objective.exhausted:
                return tuple(point), candidate
            coord = _clamp(point[axis] + direction, *bounds)
            if coord == point[axis]:
                continue
            trial = list(point)
            trial[axis] = coord
            result = objective(trial[0], trial[1])
            if math.isfinite(result[0]) and result[0] < candidate[0]:
                point, candidate = trial, result
                break
    return tuple(point), candidate


def _pattern_search(objective, start_point, start_value, initial_step):
    """Hooke-Jeeves refinement from one start; returns (value, reached_tol).

    `value` tuples are (loss, alpha, beta) so comparisons apply the
    deterministic tie-break directly.
    """
    base, base_value = start_point, start_value
    step = initial_step
    while not objective.exhausted:
        if step < REFINE_TOLERANCE:
            return base_value, True
        new, new_value = _explore(objective, base, base_value, step)
        if new_value[0] < base_value[0]:
            # Pattern moves: keep doubling along the successful direction
            # while it pays off (accelerates through curved valleys).
            while not objective.exhausted:
                probe = (
                    _clamp(2.0 * new[0] - base[0], *_LOG_ALPHA),
                    _clamp(2.0 * new[1] - base[1], *_LOG_BETA),
                )
                base, base_value = new, new_value
                probe_value = objective(probe[0], probe[1])
                cand, cand_value = _explore(objective, probe, probe_value, step)
                if math.isfinite(cand_value[0]) and cand_value[0] < base_value[0]:
                    new, new_value = cand, cand_value
                else:
                    break
            base, base_value = new, new_value
        else:
            step /= 2.0
    return base_value, step < REFINE_TOLERANCE


def calibrate(params, prices, subsidies, target, budget=2000):
    """Fit (alpha, beta) so the deterministic simulation matches the target.

    A 20x20 log-spaced grid over the parameter bounds is evaluated first;
    pattern search then polishes grid points in loss order (best cell
    first, restarting from the next-best cells while budget remains).
    `budget` caps the total number of objective evaluations and must cover
    at least the grid; with budget equal to the grid size the result is
    exactly the best grid point.

    Returns a CalibrationResult; `converged` is True when the refinement
    that produced the returned candidate reached the step tolerance rather
    than being cut off by the budget.
    """
    target.validate_against(params)
    if budget < GRID_SIZE:
        raise ValidationError(
            f"budget must be >= the grid size {GRID_SIZE}, got {budget}"
        )

    # logspace endpoints can land one ulp outside the declared bounds
    alphas = np.clip(np.logspace(*_LOG_ALPHA, GRID_POINTS_PER_AXIS), *ALPHA_BOUNDS)
    betas = np.clip(np.logspace(*_LOG_BETA, GRID_POINTS_PER_AXIS), *BETA_BOUNDS)
    step_alpha = (_LOG_ALPHA[1] - _LOG_ALPHA[0]) / (GRID_POINTS_PER_AXIS - 1)
    step_beta = (_LOG_BETA[1] - _LOG_BETA[0]) / (GRID_POINTS_PER_AXIS - 1)
    initial_step = max(step_alpha, step_beta)

    objective = _Objective(params, prices, subsidies, target, budget)
    grid = []
    for alpha in alphas:
        for beta in betas:
            loss = evaluate_loss((float(alpha), float(beta)), params, prices, subsidies, target)
            objective.evaluations += 1
            if math.isfinite(loss):
                grid.append((loss, float(alpha), float(beta)))
    if not grid:
        raise CalibrationFailedError(
            "no grid point produced a finite loss; calibration cannot proceed"
        )
    grid.sort()

    best_value = grid[0]
    best_converged = False
    for start in grid:
        if objective.exhausted:
            break
        point = (math.log10(start[1]), math.log10(start[2]))
        value, reached_tol = _pattern_search(objective, point, start, initial_step)
        if value < best_value:  # (loss, alpha, beta) tuple tie-break
            best_value = value
            best_converged = reached_tol
        elif value == best_value and reached_tol:
            best_converged = True

    loss, alpha, beta = best_value
    return CalibrationResult(
        alpha=alpha,
        beta=beta,
        achieved_loss=loss,
        evaluations=objective.evaluations,
        converged=best_converged,
    )
