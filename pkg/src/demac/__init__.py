"""Spectral compressed sensing with single and double Hankel low-rank models."""

from .bench import ExperimentConfig, nmse, parse_config, run_experiment
from .diag import IncoherenceReport, incoherence, numeric_rank, sample_bound_estimate, shape_factor
from .hankel import (
    DoubleHankelMatrix,
    LevelShape,
    antidiag_weights,
    conj_backward,
    default_split,
    double_hankel,
    double_hankel_pinv,
    level_hankel,
    level_hankel_pinv,
)
from .model import (
    GaussianNoise,
    GenerationError,
    SampleSet,
    SparseNoise,
    SpectralParams,
    Subsample,
    corrupt,
    random_params,
    synthesize,
)
from .retrieve import (
    ConditioningWarning,
    DegenerateRankError,
    PoleEstimates,
    distance_to_torus,
    estimate_poles,
    fit_amplitudes,
    freq_error,
)
from .solve import Bounded, Exact, Robust, SolveOptions, SolveReport, demac, hard_threshold, iht

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "nmse",
    "parse_config",
    "run_experiment",
    "IncoherenceReport",
    "incoherence",
    "numeric_rank",
    "sample_bound_estimate",
    "shape_factor",
    "DoubleHankelMatrix",
    "LevelShape",
    "antidiag_weights",
    "conj_backward",
    "default_split",
    "double_hankel",
    "double_hankel_pinv",
    "level_hankel",
    "level_hankel_pinv",
    "GaussianNoise",
    "GenerationError",
    "SampleSet",
    "SparseNoise",
    "SpectralParams",
    "Subsample",
    "corrupt",
    "random_params",
    "synthesize",
    "ConditioningWarning",
    "DegenerateRankError",
    "PoleEstimates",
    "distance_to_torus",
    "estimate_poles",
    "fit_amplitudes",
    "freq_error",
    "Bounded",
    "Exact",
    "Robust",
    "SolveOptions",
    "SolveReport",
    "demac",
    "hard_threshold",
    "iht",
    "__version__",
]
