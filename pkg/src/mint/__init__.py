"""Mutual-information based nonparametric independence testing.

Entropy estimation from nearest-neighbour distances, independence tests
with exact finite-sample size control (simulation- and permutation-based
critical values), goodness-of-fit tests for linear models, scenario
generators and a Monte Carlo power-study harness.
"""

__version__ = "0.1.0"

from .datagen import (
    ScenarioSpec,
    gen_circular,
    gen_gaussian,
    gen_multiplicative,
    gen_sinusoidal,
    generate,
    make_multivariate,
    scenario_y_sampler,
)
from .entropy import (
    EntropyEstimate,
    WeightVector,
    digamma,
    kl_entropy,
    solve_weights,
    unit_ball_volume,
    unweighted,
)
from .errors import (
    DegenerateResidualsError,
    DomainError,
    DuplicatePointsError,
    IllConditionedError,
    InfeasibleSupportError,
    KTooLargeError,
    MintError,
    SamplerDimensionMismatchError,
    SingularDesignError,
)
from .independence import (
    BlockedSample,
    TestConfig,
    TestOutcome,
    default_k,
    mint_auto,
    mint_av,
    mint_known,
    mint_multi,
    mint_unknown,
    mutual_information,
    select_k,
)
from .knn import (
    KDIndex,
    brute_force_knn_distances,
    build_index,
    jitter_points,
    knn_distances,
)
from .regression import (
    OLSFit,
    RegressionProblem,
    mint_regression,
    mint_regression_partitioned,
    mint_regression_split,
    ols_fit,
)
from .samplers import (
    EmpiricalMarginal,
    NoiseModel,
    NormalMarginal,
    StreamMarginal,
    UniformMarginal,
    parse_marginal,
    parse_noise,
)

__all__ = [
    "__version__",
    "BlockedSample",
    "DegenerateResidualsError",
    "DomainError",
    "DuplicatePointsError",
    "EmpiricalMarginal",
    "EntropyEstimate",
    "IllConditionedError",
    "InfeasibleSupportError",
    "KDIndex",
    "KTooLargeError",
    "MintError",
    "NoiseModel",
    "NormalMarginal",
    "OLSFit",
    "RegressionProblem",
    "SamplerDimensionMismatchError",
    "ScenarioSpec",
    "SingularDesignError",
    "StreamMarginal",
    "TestConfig",
    "TestOutcome",
    "UniformMarginal",
    "brute_force_knn_distances",
    "build_index",
    "default_k",
    "digamma",
    "gen_circular",
    "gen_gaussian",
    "gen_multiplicative",
    "gen_sinusoidal",
    "generate",
    "jitter_points",
    "kl_entropy",
    "knn_distances",
    "make_multivariate",
    "mint_auto",
    "mint_av",
    "mint_known",
    "mint_multi",
    "mint_regression",
    "mint_regression_partitioned",
    "mint_regression_split",
    "mint_unknown",
    "mutual_information",
    "ols_fit",
    "parse_marginal",
    "parse_noise",
    "scenario_y_sampler",
    "select_k",
    "solve_weights",
    "unit_ball_volume",
    "unweighted",
]
