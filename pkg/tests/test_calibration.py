import math
from dataclasses import replace

import numpy as np
import pytest

from dairypv.calibration import (
    ALPHA_BOUNDS,
    BETA_BOUNDS,
    GRID_POINTS_PER_AXIS,
    GRID_SIZE,
    CalibrationTarget,
    calibrate,
    evaluate_loss,
)
from dairypv.domain import YearSeries
from dairypv.engine import run_simulation
from dairypv.errors import ValidationError


class TestCalibrationTarget:
    def test_requires_observations(self):
        with pytest.raises(ValidationError, match="observation"):
            CalibrationTarget(observations=())

    def test_duplicate_years_rejected(self):
        with pytest.raises(ValidationError, match="unique"):
            CalibrationTarget(observations=((2022, 441.0), (2022, 360.0)))

    def test_loss_kind_checked(self):
        with pytest.raises(ValidationError, match="loss"):
            CalibrationTarget(observations=((2022, 441.0),), loss="rmse")

    def test_validate_against_params(self, default_params):
        CalibrationTarget(observations=((2022, 441.0),)).validate_against(default_params)
        with pytest.raises(ValidationError, match="2030"):
            CalibrationTarget(observations=((2030, 10.0),)).validate_against(default_params)
        with pytest.raises(ValidationError, match="outside"):
            CalibrationTarget(observations=((2022, 99999.0),)).validate_against(default_params)


class TestEvaluateLoss:
    def test_self_consistency_gives_zero_loss(self, default_params, price_series, subsidy_series):
        params = replace(default_params, alpha=1.5, beta=0.02)
        result = run_simulation(params, price_series, subsidy_series)
        target = CalibrationTarget(
            observations=tuple((r.year, r.cumulative_adopters) for r in result.records)
        )
        loss = evaluate_loss((1.5, 0.02), default_params, price_series, subsidy_series, target)
        assert loss == 0.0

    def test_near_zero_beta_against_441(self, default_params, price_series, subsidy_series):
        target = CalibrationTarget(observations=((2022, 441.0),))
        loss = evaluate_loss((1.0, 1e-5), default_params, price_series, subsidy_series, target)
        assert loss == pytest.approx(441.0**2, rel=0.02)

    def test_absolute_error_loss(self, default_params, price_series, subsidy_series):
        target_sq = CalibrationTarget(observations=((2022, 441.0),), loss="squared_error")
        target_abs = CalibrationTarget(observations=((2022, 441.0),), loss="absolute_error")
        sq = evaluate_loss((1.0, 0.001), default_params, price_series, subsidy_series, target_sq)
        ab = evaluate_loss((1.0, 0.001), default_params, price_series, subsidy_series, target_abs)
        assert sq == pytest.approx(ab**2, rel=1e-12)

    def test_candidate_bounds_enforced(self, default_params, price_series, subsidy_series):
        target = CalibrationTarget(observations=((2022, 441.0),))
        with pytest.raises(ValidationError, match="alpha"):
            evaluate_loss((1e-4, 0.01), default_params, price_series, subsidy_series, target)
        with pytest.raises(ValidationError, match="beta"):
            evaluate_loss((1.0, 2.0), default_params, price_series, subsidy_series, target)

    def test_scale_property_with_power_of_two_rescaling(
        self, default_params, price_series, subsidy_series
    ):
        # scaling prices, subsidies and the cost range by k scales every
        # utility by k exactly (k a power of two), so alpha/k reproduces
        # the identical adoption curve and loss
        target = CalibrationTarget(observations=((2022, 441.0),))
        base = evaluate_loss((2.0, 0.004), default_params, price_series, subsidy_series, target)
        k = 4.0
        scaled_params = replace(
            default_params,
            pv_cost_min=default_params.pv_cost_min * k,
            pv_cost_max=default_params.pv_cost_max * k,
        )
        scaled_prices = YearSeries.from_pairs([(y, v * k) for y, v in price_series.items()])
        scaled_subsidies = YearSeries.from_pairs([(y, v * k) for y, v in subsidy_series.items()])
        scaled = evaluate_loss(
            (2.0 / k, 0.004), scaled_params, scaled_prices, scaled_subsidies, target
        )
        assert scaled == pytest.approx(base, rel=1e-12)


def brute_force_grid_best(params, prices, subsidies, target):
    """Independent oracle: argmin over the same published grid."""
    alphas = np.clip(
        np.logspace(math.log10(ALPHA_BOUNDS[0]), math.log10(ALPHA_BOUNDS[1]),
                    GRID_POINTS_PER_AXIS),
        *ALPHA_BOUNDS,
    )
    betas = np.clip(
        np.logspace(math.log10(BETA_BOUNDS[0]), math.log10(BETA_BOUNDS[1]),
                    GRID_POINTS_PER_AXIS),
        *BETA_BOUNDS,
    )
    best = None
    for a in alphas:
        for b in betas:
            loss = evaluate_loss((float(a), float(b)), params, prices, subsidies, target)
            key = (loss, float(a), float(b))
            if best is None or key < best:
                best = key
    return best


class TestCalibrate:
    def test_budget_below_grid_rejected(self, default_params, price_series, subsidy_series):
        target = CalibrationTarget(observations=((2022, 441.0),))
        with pytest.raises(ValidationError, match="budget"):
            calibrate(default_params, price_series, subsidy_series, target, budget=399)

    def test_grid_only_budget_returns_best_grid_point(
        self, default_params, price_series, subsidy_series
    ):
        target = CalibrationTarget(observations=((2022, 441.0),))
        result = calibrate(default_params, price_series, subsidy_series, target,
                           budget=GRID_SIZE)
        loss, alpha, beta = brute_force_grid_best(
            default_params, price_series, subsidy_series, target
        )
        assert result.evaluations == GRID_SIZE
        assert result.converged is False
        assert (result.achieved_loss, result.alpha, result.beta) == (loss, alpha, beta)

    def test_refinement_only_improves(self, default_params, price_series, subsidy_series):
        target = CalibrationTarget(observations=((2022, 441.0),))
        grid_best = brute_force_grid_best(default_params, price_series, subsidy_series, target)
        result = calibrate(default_params, price_series, subsidy_series, target, budget=1500)
        assert result.achieved_loss <= grid_best[0]

    def test_deterministic(self, default_params, price_series, subsidy_series):
        target = CalibrationTarget(observations=((2022, 441.0),))
        a = calibrate(default_params, price_series, subsidy_series, target, budget=900)
        b = calibrate(default_params, price_series, subsidy_series, target, budget=900)
        assert a == b

    def test_single_observation_hits_441(self, default_params, price_series, subsidy_series):
        target = CalibrationTarget(observations=((2022, 441.0),))
        result = calibrate(default_params, price_series, subsidy_series, target)
        fitted = replace(default_params, alpha=result.alpha, beta=result.beta)
        final = run_simulation(fitted, price_series, subsidy_series).final_cumulative
        assert abs(final - 441.0) <= 1.0

    def test_synthetic_round_trip_recovers_beta(
        self, default_params, price_series, subsidy_series
    ):
        true = replace(default_params, alpha=1.5, beta=0.02)
        result = run_simulation(true, price_series, subsidy_series)
        observations = tuple((r.year, r.cumulative_adopters) for r in result.records)
        target = CalibrationTarget(observations=observations)
        fit = calibrate(default_params, price_series, subsidy_series, target, budget=3000)
        scale = sum(v * v for _, v in observations)
        assert fit.achieved_loss < 1e-4 * scale
        assert fit.beta == pytest.approx(0.02, rel=0.05)

    def test_target_validated_against_scenario(
        self, default_params, price_series, subsidy_series
    ):
        bad = CalibrationTarget(observations=((1999, 10.0),))
        with pytest.raises(ValidationError, match="1999"):
            calibrate(default_params, price_series, subsidy_series, bad)
