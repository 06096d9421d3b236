"""Discrete generalized beta rank-order fits and entropy-based uncertainty percentages."""

__version__ = "0.1.0"

from .analysis import CorrelationReport, correlate_fits, pearson, spearman
from .data import (
    StratumDataset,
    UnitRecord,
    build_series,
    derive_indicator,
    group_strata,
    load_csv,
)
from .dgb_core import DgbParams, cdf, entropy, log_normalizer, pmf, probabilities, sample
from .estimation import (
    FitConfig,
    FitResult,
    fit_mle,
    grad_log_likelihood,
    log_likelihood,
)
from .gof import ks_measure
from .series import RankSizeSeries
from .synth import exact_series, sampled_series
from .uncertainty import UncertaintyRecord, uncertainty_percentage, up_delta

__all__ = [
    "CorrelationReport", "correlate_fits", "pearson", "spearman",
    "StratumDataset", "UnitRecord", "build_series", "derive_indicator", "group_strata",
    "load_csv", "DgbParams", "cdf", "entropy", "log_normalizer", "pmf", "probabilities",
    "sample", "FitConfig", "FitResult", "fit_mle", "grad_log_likelihood", "log_likelihood",
    "ks_measure", "RankSizeSeries", "exact_series", "sampled_series", "UncertaintyRecord",
    "uncertainty_percentage", "up_delta",
]
