"""Frank-Wolfe solver for L2-SVM training with randomized working sets."""

from ._core import (
    ConfigError,
    Dataset,
    Error,
    IoError,
    Model,
    NumericalError,
    ParseError,
    SolveResult,
    evaluate,
    load_libsvm,
    make_census_like,
    make_two_clusters,
    min_rank_bound,
    min_rank_montecarlo,
    parse_libsvm,
    run_benchmark,
    solve,
    verify_sampling,
)

__all__ = [
    "ConfigError",
    "Dataset",
    "Error",
    "IoError",
    "Model",
    "NumericalError",
    "ParseError",
    "SolveResult",
    "evaluate",
    "load_libsvm",
    "make_census_like",
    "make_two_clusters",
    "min_rank_bound",
    "min_rank_montecarlo",
    "parse_libsvm",
    "run_benchmark",
    "solve",
    "verify_sampling",
]
