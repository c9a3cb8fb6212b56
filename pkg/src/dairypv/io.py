"""Scenario configuration, CSV series ingestion and result serialization.

The scenario file is a flat YAML mapping of typed scalars; unknown keys are
rejected so typos cannot silently fall back to defaults. Series files are
plain CSV with a fixed two-column header. Results are written atomically
(temp file + rename) so failures never leave partial output.
"""

import csv
import json
import math
import os
import tempfile
import warnings
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import yaml

from .calibration import CalibrationResult, CalibrationTarget
from .domain import ScenarioParams, SimulationResult, YearSeries
from .engine import MonteCarloSummary, check_series_coverage
from .errors import (
    BadValueError,
    DuplicateYearError,
    MissingHeaderError,
    ValidationError,
    YearGapError,
)

PRICE_COLUMN = "price_eur_per_kwh"
SUBSIDY_COLUMN = "subsidy_eur"
TARGET_COLUMN = "cumulative_adopters"

# Table-style study range for subsidies; values outside it warn but load.
SUBSIDY_RANGE_EUR = (1000.0, 3500.0)


def _parse_rows(stream, value_column, require_contiguous):
    """Shared row machinery for series and target files.

    Yields (year, value) pairs; line numbers are 1-based and include the
    header, matching what editors display.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise MissingHeaderError(
            f"empty input: expected header 'year,{value_column}'"
        )
    header = [cell.strip() for cell in header]
    if header != ["year", value_column]:
        raise MissingHeaderError(
            f"expected header 'year,{value_column}', got '{','.join(header)}'"
        )

    pairs = []
    prev_year = None
    for line, row in enumerate(reader, start=2):
        if not row:
            continue  # ignore trailing blank lines
        if len(row) != 2:
            raise BadValueError(
                f"line {line}: expected 2 columns, got {len(row)}", line=line
            )
        year_text, value_text = row[0].strip(), row[1].strip()
        try:
            year = int(year_text)
        except ValueError:
            raise BadValueError(
                f"line {line}: year {year_text!r} is not an integer", line=line
            ) from None
        try:
            value = float(value_text)
        except ValueError:
            raise BadValueError(
                f"line {line}: {value_column} {value_text!r} is not a number", line=line
            ) from None
        if not math.isfinite(value):
            raise BadValueError(
                f"line {line}: {value_column} {value_text!r} is not finite", line=line
            )
        if prev_year is not None:
            if year == prev_year:
                raise DuplicateYearError(
                    f"line {line}: duplicate year {year}", year=year, line=line
                )
            if require_contiguous and year != prev_year + 1:
                if year > prev_year + 1:
                    missing = list(range(prev_year + 1, year))
                    raise YearGapError(
                        f"line {line}: year gap, missing "
                        + ", ".join(str(y) for y in missing),
                        missing_years=missing,
                        line=line,
                    )
                raise YearGapError(
                    f"line {line}: years must increase, got {year} after {prev_year}",
                    line=line,
                )
            if not require_contiguous and year < prev_year:
                raise YearGapError(
                    f"line {line}: years must increase, got {year} after {prev_year}",
                    line=line,
                )
        pairs.append((year, value))
        prev_year = year

    if not pairs:
        raise BadValueError("no data rows after the header", line=2)
    return pairs


def parse_year_series(stream, value_column):
    """Parse a contiguous year/value CSV into a YearSeries.

    Distinct errors for a missing/mismatched header, duplicate years, year
    gaps and non-numeric cells, each naming the offending line.
    """
    pairs = _parse_rows(stream, value_column, require_contiguous=True)
    return YearSeries.from_pairs(pairs)


def parse_target_observations(stream):
    """Parse a target CSV; years must increase but need not be contiguous."""
    return _parse_rows(stream, TARGET_COLUMN, require_contiguous=False)


def render_year_series(series, value_column):
    """Serialize a YearSeries back to CSV text (values at 6 significant digits)."""
    lines = [f"year,{value_column}"]
    for year, value in series.items():
        lines.append(f"{year},{_fmt(value)}")
    return "\n".join(lines) + "\n"


# Scenario file schema: key -> (python types accepted, required).
_INT = (int,)
_NUM = (int, float)
_STR = (str,)
_SCHEMA = {
    "pv_cost_min": (_NUM, True),
    "pv_cost_max": (_NUM, True),
    "maintenance_rate": (_NUM, True),
    "discount_rate": (_NUM, True),
    "total_farmers": (_INT, True),
    "start_year": (_INT, True),
    "end_year": (_INT, True),
    "horizon_years": (_INT, False),
    "annual_generation_kwh": (_NUM, False),
    "alpha": (_NUM, False),
    "beta": (_NUM, False),
    "adoption_semantics": (_STR, False),
    "mode": (_STR, False),
    "seed": (_INT, False),
    "price_series": (_STR, True),
    "subsidy_series": (_STR, True),
    "target_series": (_STR, False),
    "target_loss": (_STR, False),
}
_PATH_KEYS = ("price_series", "subsidy_series", "target_series", "target_loss")


class LoadedScenario(NamedTuple):
    """Validated bundle returned by load_scenario; unpacks as a 4-tuple."""

    params: ScenarioParams
    prices: YearSeries
    subsidies: YearSeries
    target: CalibrationTarget | None


def _check_config_types(data, path):
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: scenario file must be a flat key/value mapping")
    unknown = sorted(set(data) - set(_SCHEMA))
    if unknown:
        raise ValidationError(
            f"{path}: unknown keys: " + ", ".join(unknown)
        )
    missing = sorted(k for k, (_, required) in _SCHEMA.items() if required and k not in data)
    if missing:
        raise ValidationError(f"{path}: missing required keys: " + ", ".join(missing))
    for key, value in data.items():
        types, _ = _SCHEMA[key]
        # bool is an int subclass; never a valid scalar here
        if isinstance(value, bool) or not isinstance(value, types):
            expected = "/".join(t.__name__ for t in types)
            raise ValidationError(
                f"{path}: key {key!r} must be {expected}, got {value!r}"
            )


def _read_series_file(path, value_column):
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return parse_year_series(handle, value_column)


def load_scenario(config_path):
    """Load and fully validate a scenario bundle from a YAML config file.

    Series paths are resolved relative to the config file. Coverage against
    [start_year, end_year] is checked here so later runs cannot hit gaps.
    Subsidy values outside the study range warn but do not fail.
    """
    config_path = Path(config_path)
    if not config_path.is_file():
        raise FileNotFoundError(f"scenario file not found: {config_path}")
    with open(config_path, "r", encoding="utf-8") as handle:
        data = yaml.safe_load(handle)
    _check_config_types(data, config_path)

    param_kwargs = {k: v for k, v in data.items() if k not in _PATH_KEYS}
    for key in ("pv_cost_min", "pv_cost_max", "maintenance_rate", "discount_rate",
                "annual_generation_kwh", "alpha", "beta"):
        if key in param_kwargs:
            param_kwargs[key] = float(param_kwargs[key])
    try:
        params = ScenarioParams(**param_kwargs)
    except ValidationError as exc:
        raise ValidationError(f"{config_path}: {exc}") from None

    base = config_path.parent
    prices = _read_series_file(base / data["price_series"], PRICE_COLUMN)
    subsidies = _read_series_file(base / data["subsidy_series"], SUBSIDY_COLUMN)
    check_series_coverage(prices, "price", params)
    check_series_coverage(subsidies, "subsidy", params)

    out_of_range = [
        year for year, value in subsidies.items()
        if not SUBSIDY_RANGE_EUR[0] <= value <= SUBSIDY_RANGE_EUR[1]
    ]
    if out_of_range:
        warnings.warn(
            "subsidy outside the study range "
            f"{SUBSIDY_RANGE_EUR[0]:.0f}-{SUBSIDY_RANGE_EUR[1]:.0f} EUR in years: "
            + ", ".join(str(y) for y in out_of_range),
            UserWarning,
            stacklevel=2,
        )

    target = None
    if "target_series" in data:
        with open(base / data["target_series"], "r", encoding="utf-8", newline="") as handle:
            observations = parse_target_observations(handle)
        target = CalibrationTarget(
            observations=tuple(observations),
            loss=data.get("target_loss", "squared_error"),
        )
        target.validate_against(params)

    return LoadedScenario(params=params, prices=prices, subsidies=subsidies, target=target)


def default_scenario_path():
    """Path of the bundled baseline scenario (Irish dairy, 2005-2022)."""
    return Path(resources.files("dairypv.data") / "default_scenario.yaml")


def load_default_scenario():
    """Load the bundled baseline scenario."""
    return load_scenario(default_scenario_path())


def _fmt(value):
    """Real number at 6 significant digits."""
    return format(float(value), ".6g")


def _fmt_count(value):
    """Adopter counts: 6 significant digits, but never fewer than 2 decimals."""
    text = _fmt(value)
    decimals = len(text.partition(".")[2]) if "e" not in text and "E" not in text else 2
    if decimals < 2:
        return format(float(value), ".2f")
    return text


def _roundtrip(text):
    return float(text)


def render_result(result, format="csv"):
    """Serialize a result to a CSV or JSON string (byte-stable)."""
    if format not in ("csv", "json"):
        raise ValidationError(f"format must be 'csv' or 'json', got {format!r}")
    if isinstance(result, SimulationResult):
        return _render_simulation(result, format)
    if isinstance(result, MonteCarloSummary):
        return _render_monte_carlo(result, format)
    if isinstance(result, CalibrationResult):
        return _render_calibration(result, format)
    raise ValidationError(f"unsupported result type: {type(result).__name__}")


def _render_simulation(result, format):
    if format == "csv":
        lines = ["year,energy_price,subsidy,economic_utility,probability,"
                 "new_adopters,cumulative_adopters"]
        for r in result.records:
            lines.append(",".join([
                str(r.year), _fmt(r.energy_price), _fmt(r.subsidy),
                _fmt(r.economic_utility), _fmt(r.probability),
                _fmt_count(r.new_adopters), _fmt_count(r.cumulative_adopters),
            ]))
        return "\n".join(lines) + "\n"
    payload = {
        "params_digest": result.params_digest,
        "records": [
            {
                "year": r.year,
                "energy_price": _roundtrip(_fmt(r.energy_price)),
                "subsidy": _roundtrip(_fmt(r.subsidy)),
                "economic_utility": _roundtrip(_fmt(r.economic_utility)),
                "probability": _roundtrip(_fmt(r.probability)),
                "new_adopters": _roundtrip(_fmt_count(r.new_adopters)),
                "cumulative_adopters": _roundtrip(_fmt_count(r.cumulative_adopters)),
            }
            for r in result.records
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _render_monte_carlo(summary, format):
    if format == "csv":
        lines = ["year,mean_cumulative,std_cumulative,min_cumulative,max_cumulative"]
        for row in summary.rows:
            lines.append(",".join([
                str(row.year), _fmt_count(row.mean), _fmt(row.std),
                _fmt_count(row.min), _fmt_count(row.max),
            ]))
        return "\n".join(lines) + "\n"
    payload = {
        "replications": summary.replications,
        "base_seed": summary.base_seed,
        "years": [
            {
                "year": row.year,
                "mean_cumulative": _roundtrip(_fmt_count(row.mean)),
                "std_cumulative": _roundtrip(_fmt(row.std)),
                "min_cumulative": _roundtrip(_fmt_count(row.min)),
                "max_cumulative": _roundtrip(_fmt_count(row.max)),
            }
            for row in summary.rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _render_calibration(result, format):
    if format == "csv":
        header = "alpha,beta,achieved_loss,evaluations,converged"
        row = ",".join([
            _fmt(result.alpha), _fmt(result.beta), _fmt(result.achieved_loss),
            str(result.evaluations), "true" if result.converged else "false",
        ])
        return header + "\n" + row + "\n"
    payload = {
        "alpha": _roundtrip(_fmt(result.alpha)),
        "beta": _roundtrip(_fmt(result.beta)),
        "achieved_loss": _roundtrip(_fmt(result.achieved_loss)),
        "evaluations": result.evaluations,
        "converged": result.converged,
    }
    return json.dumps(payload, indent=2) + "\n"


def write_result(result, format, output_path):
    """Render a result and write it atomically (temp file, then rename)."""
    text = render_result(result, format)
    output_path = Path(output_path)
    handle = tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", newline="\n",
        dir=output_path.parent, prefix=output_path.name + ".", delete=False,
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, output_path)
    except BaseException:
        os.unlink(handle.name)
        raise
