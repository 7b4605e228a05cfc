"""Collective edge-weight denoising for weighted networks."""

from .datagen import SyntheticInstance, add_gaussian_noise, planted_lowrank, two_community_network
from .evaluation import (
    BenchmarkPairs,
    EvaluationReport,
    FoldAssignment,
    auprc,
    cross_validate,
    fold_enrichment,
    kfold_mask,
    mean_impute_baseline,
    mse,
    paired_t_test,
    r_squared,
    threshold_counts,
)
from .filter import (
    DenoiseResult,
    FilterConfig,
    SignalCovarianceOperator,
    build_signal_covariance,
    demean,
    impute_missing,
    netwf,
    netwf_cg,
    netwf_direct,
    postprocess,
)
from .linalg import CgReport, ConvergenceWarning, LinearOperator, conjugate_gradient, sandwich_apply
from .network import WeightedNetwork
from .noise import (
    Diagonal,
    Ensemble,
    Homogeneous,
    NoiseModel,
    estimate_ensemble_noise,
    homogenize_noise,
    naive_noise_guess,
)
from .shrinker import ShrinkReport, optimal_shrink
from .similarity import (
    ProfileSimilarity,
    directed_edge_similarity,
    pearson,
    psn_threshold,
    source_profile_similarity,
    target_profile_similarity,
    undirected_edge_similarity,
    undirected_profile_similarity,
)

__version__ = "0.1.0"
