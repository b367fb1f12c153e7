"""refcast: reference class forecasting toolkit.

Computes cost-overrun and traffic-inaccuracy statistics from historical
project outcomes, derives required-uplift curves at chosen acceptable-risk
levels, and simulates how biased forecasts distort project selection.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .engine import (
    ClassCriteria,
    EmpiricalDistribution,
    ForecastReport,
    ReferenceClass,
    UpliftCurve,
    adjust_forecast,
    build_reference_class,
    delay_adjustment,
    empirical_distribution,
    quantile,
    reference_forecast,
    required_uplift,
    uplift_curve,
)
from .errors import DataError, EmptyClassError, IncompleteRecordError, RefcastError
from .records import (
    Dataset,
    ProjectRecord,
    cost_inaccuracy,
    load_dataset,
    parse_dataset,
    serialize_dataset,
    traffic_inaccuracy,
    validate_record,
)
from .sampledata import make_sample_dataset, sample_dataset_csv
from .sim import (
    BiasSource,
    Candidate,
    Selection,
    SimConfig,
    SimResult,
    brute_force_optimal,
    generate_portfolio,
    load_sim_config,
    parse_sim_config,
    run_simulation,
    select_projects,
)
from .stats import (
    Interval,
    SummaryStats,
    TestResult,
    bootstrap_ci,
    separation_test,
    share_outside_band,
    share_overrun,
    shortfall_to_overestimate,
    summarize,
)

__version__ = "0.1.0"
