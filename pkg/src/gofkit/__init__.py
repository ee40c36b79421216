"""gofkit: goodness-of-fit statistics with Monte Carlo calibration."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    GaussianHypothesis,
    MultivariateHypothesis,
    RandomStream,
    Sample,
    TestOutcome,
    UnivariateHypothesis,
    exponential,
    from_reference,
    gauss1d,
    gauss2d,
    gauss_mv,
    order_statistic,
    pit,
    uniform01,
)
from .edf import EdfStatistics, edf_statistics, quadratic_stats, supremum_stats  # noqa: F401
from .binned import Histogram, bin_count_rule, bin_uniform, chi2_statistic  # noqa: F401
from .smooth import SmoothConfig, legendre_pi, neyman_statistic  # noqa: F401
from .region3 import RegionSplit, three_region_statistic  # noqa: F401
from .energy import EnergyValue, Kernel, energy_null_distribution, energy_statistic, kernel_eval  # noqa: F401
from .multinormal import MardiaStats, mardia_statistics, neyman_multivariate  # noqa: F401
from .calibrate import (  # noqa: F401
    NullDistribution,
    Statistic,
    build_null,
    critical_value,
    load_null,
    p_value,
    save_null,
)
from .catalog import available_statistics, make_statistic, parse_hypothesis, run_test  # noqa: F401
