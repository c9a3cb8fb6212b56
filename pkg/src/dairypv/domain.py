"""Shared domain types for the PV adoption simulator.

Money is plain floating-point EUR: the model is a projection, not
accounting, so comparisons in tests use tolerances rather than exact cents.
All types here are immutable after construction and validate their
invariants in __post_init__, raising ValidationError naming the bad field.
"""

import hashlib
import math
from dataclasses import dataclass, fields

from .errors import ValidationError

# Monetary amounts are floats in EUR; the alias documents intent.
MoneyEur = float

ADOPTION_SEMANTICS = ("hazard", "literal")
MODES = ("deterministic", "stochastic")

_UINT64_MAX = 2**64 - 1


def require_finite(name, value):
    """Return value as float, rejecting NaN and infinities."""
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


def round_half_up(value):
    """Round a non-negative count half-up to an integer (441.5 -> 442)."""
    if value < 0:
        raise ValidationError(f"round_half_up expects a non-negative value, got {value}")
    return int(math.floor(value + 0.5))


@dataclass(frozen=True)
class YearSeries:
    """Contiguous year-indexed series of EUR values.

    Contiguity is structural: the series stores its first year plus one
    value per consecutive year, so gaps and duplicates cannot exist.
    """

    first_year: int
    values: tuple

    def __post_init__(self):
        if not isinstance(self.first_year, int):
            raise ValidationError(f"first_year must be an integer, got {self.first_year!r}")
        if len(self.values) == 0:
            raise ValidationError("values must contain at least one entry")
        checked = tuple(require_finite(f"values[{i}]", v) for i, v in enumerate(self.values))
        object.__setattr__(self, "values", checked)

    @classmethod
    def from_pairs(cls, pairs):
        """Build a series from (year, value) pairs, enforcing contiguity.

        Raises ValidationError on duplicate, decreasing or gapped years.
        """
        pairs = list(pairs)
        if not pairs:
            raise ValidationError("year series must contain at least one entry")
        years = [int(y) for y, _ in pairs]
        for prev, nxt in zip(years, years[1:]):
            if nxt == prev:
                raise ValidationError(f"duplicate year {nxt} in series")
            if nxt != prev + 1:
                raise ValidationError(
                    f"years must be contiguous and increasing: got {nxt} after {prev}"
                )
        return cls(first_year=years[0], values=tuple(v for _, v in pairs))

    @property
    def last_year(self):
        return self.first_year + len(self.values) - 1

    @property
    def years(self):
        return range(self.first_year, self.last_year + 1)

    def __contains__(self, year):
        return self.first_year <= year <= self.last_year

    def value_for(self, year):
        """Look up the value for a year; KeyError outside the covered range."""
        if year not in self:
            raise KeyError(
                f"year {year} outside series range {self.first_year}-{self.last_year}"
            )
        return self.values[year - self.first_year]

    def items(self):
        for i, value in enumerate(self.values):
            yield self.first_year + i, value


@dataclass(frozen=True)
class ScenarioParams:
    """Complete input set for one simulation scenario."""

    pv_cost_min: MoneyEur
    pv_cost_max: MoneyEur
    maintenance_rate: float
    discount_rate: float
    total_farmers: int
    start_year: int
    end_year: int
    horizon_years: int = 20
    annual_generation_kwh: float = 6000.0
    alpha: float = 1.0
    beta: float = 0.01
    adoption_semantics: str = "hazard"
    mode: str = "deterministic"
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "pv_cost_min", require_finite("pv_cost_min", self.pv_cost_min))
        object.__setattr__(self, "pv_cost_max", require_finite("pv_cost_max", self.pv_cost_max))
        if not 0 <= self.pv_cost_min <= self.pv_cost_max:
            raise ValidationError(
                "pv_cost_min must satisfy 0 <= pv_cost_min <= pv_cost_max, got "
                f"[{self.pv_cost_min}, {self.pv_cost_max}]"
            )
        require_finite("maintenance_rate", self.maintenance_rate)
        if not 0 <= self.maintenance_rate < 1:
            raise ValidationError(
                f"maintenance_rate must be in [0, 1), got {self.maintenance_rate}"
            )
        require_finite("discount_rate", self.discount_rate)
        if self.discount_rate <= -1:
            raise ValidationError(f"discount_rate must be > -1, got {self.discount_rate}")
        if not isinstance(self.total_farmers, int) or isinstance(self.total_farmers, bool):
            raise ValidationError(f"total_farmers must be an integer, got {self.total_farmers!r}")
        if self.total_farmers < 1:
            raise ValidationError(f"total_farmers must be >= 1, got {self.total_farmers}")
        for name in ("start_year", "end_year", "horizon_years"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValidationError(f"{name} must be an integer, got {v!r}")
        if self.start_year > self.end_year:
            raise ValidationError(
                f"start_year must be <= end_year, got {self.start_year} > {self.end_year}"
            )
        if self.horizon_years < 0:
            raise ValidationError(f"horizon_years must be >= 0, got {self.horizon_years}")
        require_finite("annual_generation_kwh", self.annual_generation_kwh)
        if self.annual_generation_kwh < 0:
            raise ValidationError(
                f"annual_generation_kwh must be >= 0, got {self.annual_generation_kwh}"
            )
        require_finite("alpha", self.alpha)
        if self.alpha <= 0:
            raise ValidationError(f"alpha must be > 0, got {self.alpha}")
        require_finite("beta", self.beta)
        if not 0 < self.beta <= 1:
            raise ValidationError(f"beta must be in (0, 1], got {self.beta}")
        if self.adoption_semantics not in ADOPTION_SEMANTICS:
            raise ValidationError(
                f"adoption_semantics must be one of {ADOPTION_SEMANTICS}, "
                f"got {self.adoption_semantics!r}"
            )
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.seed is not None:
            if not isinstance(self.seed, int) or isinstance(self.seed, bool):
                raise ValidationError(f"seed must be an integer, got {self.seed!r}")
            if not 0 <= self.seed <= _UINT64_MAX:
                raise ValidationError(f"seed must fit in an unsigned 64-bit integer, got {self.seed}")
        if self.mode == "stochastic" and self.seed is None:
            raise ValidationError("seed is required when mode is 'stochastic'")

    @property
    def midpoint_cost(self):
        """Representative PV cost used by the deterministic mode."""
        return (self.pv_cost_min + self.pv_cost_max) / 2.0

    @property
    def n_years(self):
        return self.end_year - self.start_year + 1

    @property
    def digest(self):
        """Short stable identifier of this parameter set."""
        text = ";".join(f"{f.name}={getattr(self, f.name)!r}" for f in fields(self))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class AgentState:
    """One farmer: sampled PV cost, adoption status, adoption year."""

    id: int
    pv_cost: MoneyEur
    adopted: bool = False
    adoption_year: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "pv_cost", require_finite("pv_cost", self.pv_cost))
        if self.adopted and self.adoption_year is None:
            raise ValidationError("adoption_year is required when adopted is true")
        if not self.adopted and self.adoption_year is not None:
            raise ValidationError("adoption_year must be absent when adopted is false")


@dataclass(frozen=True)
class YearRecord:
    """Outputs of one simulated year."""

    year: int
    energy_price: MoneyEur
    subsidy: MoneyEur
    economic_utility: MoneyEur
    probability: float
    new_adopters: float
    cumulative_adopters: float

    def __post_init__(self):
        for name in ("energy_price", "subsidy", "economic_utility", "probability",
                     "new_adopters", "cumulative_adopters"):
            object.__setattr__(self, name, require_finite(name, getattr(self, name)))
        if not 0 <= self.probability <= 1:
            raise ValidationError(f"probability must be in [0, 1], got {self.probability}")
        if self.new_adopters < 0:
            raise ValidationError(f"new_adopters must be >= 0, got {self.new_adopters}")
        if self.cumulative_adopters < 0:
            raise ValidationError(
                f"cumulative_adopters must be >= 0, got {self.cumulative_adopters}"
            )


@dataclass(frozen=True)
class SimulationResult:
    """One record per simulated year, tagged with the scenario's digest."""

    params_digest: str
    records: tuple

    def __post_init__(self):
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        if not records:
            raise ValidationError("records must contain at least one YearRecord")
        for prev, nxt in zip(records, records[1:]):
            if nxt.year != prev.year + 1:
                raise ValidationError(
                    f"records must cover consecutive years: got {nxt.year} after {prev.year}"
                )

    @property
    def start_year(self):
        return self.records[0].year

    @property
    def end_year(self):
        return self.records[-1].year

    @property
    def final_cumulative(self):
        return self.records[-1].cumulative_adopters

    def cumulative_by_year(self):
        """Map of year -> cumulative adopters, for target comparisons."""
        return {r.year: r.cumulative_adopters for r in self.records}
