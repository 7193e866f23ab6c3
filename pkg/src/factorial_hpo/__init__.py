"""Model-free hyperparameter optimization with orthogonal factorial designs.

Pipeline: sample an orthogonal Latin hypercube over the active factors,
evaluate the batch in parallel, collapse the performance table into a
strength-2 orthogonal array, and use marginal performance / importance
analysis to shrink and freeze the search space iteratively.
"""
from .analysis import AnalysisOutcome, analyze, importance_analysis, performance_analysis
from .errors import (
    AnalysisError,
    BatchAbortError,
    BoundsError,
    ConfigError,
    ConstructionError,
    CorrelationError,
    FactorialHpoError,
    SchemaError,
    SelectionError,
    StateError,
)
from .evaluator import (
    ObjectiveSpec,
    TrialRecord,
    builtin_objective,
    evaluate_batch,
    external_objective,
)
from .metrics import (
    DiscrepancyReport,
    compare_samplers,
    max_column_correlation,
    projection_uniformity_check,
    star_discrepancy,
)
from .optimizer import (
    StudyConfig,
    StudyResult,
    default_hyper_hyperparams,
    run_study,
    select_final,
)
from .sampler import (
    DesignMatrix,
    OrthogonalArray,
    choose_olh_size,
    construct_oa,
    construct_olh,
    sample_lhs,
)
from .space import (
    FactorDef,
    SearchSpace,
    denormalize,
    freeze,
    normalize,
    shrink_to_range,
)
from .transform import CollapsedTable, collapse

__version__ = "0.1.0"

__all__ = [
    "AnalysisOutcome",
    "AnalysisError",
    "BatchAbortError",
    "BoundsError",
    "CollapsedTable",
    "ConfigError",
    "ConstructionError",
    "CorrelationError",
    "DesignMatrix",
    "DiscrepancyReport",
    "FactorDef",
    "FactorialHpoError",
    "ObjectiveSpec",
    "OrthogonalArray",
    "SchemaError",
    "SearchSpace",
    "SelectionError",
    "StateError",
    "StudyConfig",
    "StudyResult",
    "TrialRecord",
    "analyze",
    "builtin_objective",
    "choose_olh_size",
    "collapse",
    "compare_samplers",
    "construct_oa",
    "construct_olh",
    "default_hyper_hyperparams",
    "denormalize",
    "evaluate_batch",
    "external_objective",
    "freeze",
    "importance_analysis",
    "max_column_correlation",
    "normalize",
    "performance_analysis",
    "projection_uniformity_check",
    "run_study",
    "sample_lhs",
    "select_final",
    "shrink_to_range",
    "star_discrepancy",
]
