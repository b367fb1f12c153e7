"""Reference class forecasting.

Builds criteria-filtered classes of comparable past projects, turns their
outcome samples into empirical distributions, and derives the uplift a new
estimate needs so that the chance of overrunning the adjusted budget stays
within a chosen acceptable risk. The uplift at acceptable risk r is the
(1 - r) quantile of the class's inaccuracy distribution: accepting less
risk demands more uplift.

A delay rule is provided as well: each year of delay after the decision to
build adds a fixed number of percentage points of cost overrun, and that
extra overrun composes additively with the class uplift.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import EmptyClassError
from .records import (
    PROJECT_TYPES,
    Dataset,
    ProjectRecord,
    cost_inaccuracy,
    traffic_inaccuracy,
)

MEASURES = ("cost_inaccuracy", "traffic_inaccuracy")

# percentage points of extra construction cost overrun per year of delay
DELAY_OVERRUN_PCT_PER_YEAR = 4.64

# classes smaller than this trigger a warning: too thin to be statistically
# meaningful for forecasting (overridable per call)
DEFAULT_MIN_CLASS_SIZE = 10


class SmallClassWarning(UserWarning):
    """Reference class is small enough that its quantiles are unstable."""


@dataclass(frozen=True)
class ClassCriteria:
    """Filters defining which records count as comparable."""

    measure: str = "cost_inaccuracy"
    project_type: str | None = None
    regions: frozenset[str] | None = None
    year_range: tuple[int | None, int | None] = (None, None)

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise ValueError(f"measure must be one of {MEASURES}, got {self.measure!r}")
        if self.project_type is not None and self.project_type not in PROJECT_TYPES:
            raise ValueError(
                f"project_type must be one of {PROJECT_TYPES}, got {self.project_type!r}"
            )
        if self.regions is not None:
            object.__setattr__(self, "regions", frozenset(self.regions))
        lo, hi = self.year_range
        if lo is not None and hi is not None and lo > hi:
            raise ValueError(f"year_range reversed: {self.year_range}")

    def matches(self, record: ProjectRecord) -> bool:
        if self.project_type is not None and record.project_type != self.project_type:
            return False
        if self.regions is not None and record.region not in self.regions:
            return False
        lo, hi = self.year_range
        if lo is not None and record.decision_year < lo:
            return False
        if hi is not None and record.decision_year > hi:
            return False
        return True

    def describe(self) -> str:
        parts = [self.measure]
        if self.project_type is not None:
            parts.append(f"type={self.project_type}")
        if self.regions is not None:
            parts.append("region=" + "|".join(sorted(self.regions)))
        lo, hi = self.year_range
        if lo is not None or hi is not None:
            parts.append(f"years={lo or ''}..{hi or ''}")
        return ",".join(parts)


@dataclass(frozen=True)
class ReferenceClass:
    """A named set of comparable past projects with their measure sample."""

    name: str
    criteria: ClassCriteria
    member_ids: tuple[str, ...]
    sample: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.sample)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample with an interpolating quantile function."""

    values: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class UpliftCurve:
    """Required uplift as a function of acceptable overrun risk.

    Points are ordered by risk ascending; the uplift is non-increasing.
    """

    points: tuple[tuple[float, float], ...]

    def to_csv(self) -> str:
        lines = ["acceptable_risk,uplift_pct"]
        for risk, uplift in self.points:
            lines.append(f"{risk:.10g},{uplift:.10g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ForecastAdjustment:
    uplift_pct: float
    uplift_amount: float
    adjusted_estimate: float
    clamped: bool


@dataclass(frozen=True)
class ForecastReport:
    """A base estimate adjusted by a class uplift (plus optional delay cost)."""

    base_estimate: float
    class_name: str
    acceptable_risk: float
    uplift_pct: float
    uplift_amount: float
    adjusted_estimate: float
    clamped: bool

    def to_json_dict(self) -> dict:
        return {
            "base_estimate": self.base_estimate,
            "class_name": self.class_name,
            "acceptable_risk": self.acceptable_risk,
            "uplift_pct": self.uplift_pct,
            "uplift_amount": self.uplift_amount,
            "adjusted_estimate": self.adjusted_estimate,
            "clamped": self.clamped,
        }


def build_reference_class(
    dataset: Dataset, criteria: ClassCriteria, name: str | None = None
) -> ReferenceClass:
    """Collect the records matching ``criteria`` that have the outcome fields
    the measure needs, and evaluate the measure over them.

    Raises :class:`EmptyClassError` when nothing matches: forecasting from an
    empty class is refused.
    """
    if criteria.measure == "cost_inaccuracy":
        usable = ProjectRecord.has_cost_outcome
        measure = cost_inaccuracy
    else:
        usable = ProjectRecord.has_traffic_outcome
        measure = traffic_inaccuracy
    ids = []
    sample = []
    for record in dataset.records:
        if criteria.matches(record) and usable(record):
            ids.append(record.id)
            sample.append(measure(record))
    if not sample:
        raise EmptyClassError(f"empty reference class for criteria {criteria.describe()}")
    return ReferenceClass(
        name=name if name is not None else criteria.describe(),
        criteria=criteria,
        member_ids=tuple(ids),
        sample=tuple(sample),
    )


def empirical_distribution(ref_class: ReferenceClass) -> EmpiricalDistribution:
    """Sorted copy of the class sample."""
    if not ref_class.sample:
        raise EmptyClassError(f"class {ref_class.name!r} has no sample")
    return EmpiricalDistribution(values=tuple(sorted(ref_class.sample)))


def quantile(dist: EmpiricalDistribution, q: float) -> float:
    """Linearly interpolated order statistic at position (n - 1) * q."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    values = dist.values
    h = (len(values) - 1) * q
    j = int(h)
    if j + 1 >= len(values):
        return values[j]
    return values[j] + (h - j) * (values[j + 1] - values[j])


def required_uplift(dist: EmpiricalDistribution, acceptable_risk: float) -> float:
    """Uplift u with empirical P(inaccuracy > u) at most ``acceptable_risk``."""
    if not 0.0 < acceptable_risk <= 1.0:
        raise ValueError(f"acceptable_risk must be in (0, 1], got {acceptable_risk}")
    return quantile(dist, 1.0 - acceptable_risk)


def uplift_curve(dist: EmpiricalDistribution, risk_grid) -> UpliftCurve:
    """Evaluate :func:`required_uplift` over a strictly increasing risk grid."""
    grid = [float(r) for r in risk_grid]
    if not grid:
        raise ValueError("empty risk grid")
    for prev, cur in zip(grid, grid[1:]):
        if cur <= prev:
            raise ValueError("risk grid must be strictly increasing")
    points = tuple((r, required_uplift(dist, r)) for r in grid)
    return UpliftCurve(points=points)


def adjust_forecast(
    base_estimate: float, uplift_pct: float, clamp_negative: bool = False
) -> ForecastAdjustment:
    """Apply a percent uplift to a base estimate.

    With ``clamp_negative``, a downward adjustment is forced to zero and
    flagged instead of reducing the estimate.
    """
    if not base_estimate > 0:
        raise ValueError(f"base_estimate must be > 0, got {base_estimate}")
    clamped = False
    if clamp_negative and uplift_pct < 0.0:
        uplift_pct = 0.0
        clamped = True
    amount = base_estimate * uplift_pct / 100.0
    return ForecastAdjustment(
        uplift_pct=uplift_pct,
        uplift_amount=amount,
        adjusted_estimate=base_estimate + amount,
        clamped=clamped,
    )


def delay_adjustment(base_estimate: float, delay_years: float) -> tuple[float, float]:
    """Extra overrun (percentage points) and extra cost from delay.

    Linear at :data:`DELAY_OVERRUN_PCT_PER_YEAR` points per year of delay
    after the decision to build.
    """
    if not base_estimate > 0:
        raise ValueError(f"base_estimate must be > 0, got {base_estimate}")
    if delay_years < 0:
        raise ValueError(f"delay_years must be >= 0, got {delay_years}")
    extra_overrun = DELAY_OVERRUN_PCT_PER_YEAR * delay_years
    return extra_overrun, base_estimate * extra_overrun / 100.0


def reference_forecast(
    base_estimate: float,
    ref_class: ReferenceClass,
    acceptable_risk: float,
    delay_years: float = 0.0,
    clamp_negative: bool = False,
    min_class_size: int = DEFAULT_MIN_CLASS_SIZE,
) -> ForecastReport:
    """Full class-based forecast: class uplift at the chosen risk, plus the
    delay overrun, applied to the base estimate."""
    if ref_class.n < min_class_size:
        warnings.warn(
            f"reference class {ref_class.name!r} has only {ref_class.n} members "
            f"(< {min_class_size}); quantiles may be unstable",
            SmallClassWarning,
            stacklevel=2,
        )
    dist = empirical_distribution(ref_class)
    class_uplift = required_uplift(dist, acceptable_risk)
    extra_overrun, _ = delay_adjustment(base_estimate, delay_years)
    adj = adjust_forecast(base_estimate, class_uplift + extra_overrun, clamp_negative)
    return ForecastReport(
        base_estimate=base_estimate,
        class_name=ref_class.name,
        acceptable_risk=acceptable_risk,
        uplift_pct=adj.uplift_pct,
        uplift_amount=adj.uplift_amount,
        adjusted_estimate=adj.adjusted_estimate,
        clamped=adj.clamped,
    )
