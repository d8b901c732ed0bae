"""Model selection for bivariate time series: information criteria versus
hypothesis-testing strategies, scored by Monte Carlo regret."""

__version__ = "0.1.0"

from .taxonomy import ModelId, ModelSpec, RelationType, TrendKnowledge, get_model, list_models, classify_params
from .dgp import DgpParams, SeriesPair, simulate, enumerate_permutations
from .regress import RankDeficiencyError, least_squares, fit_model
from .criteria import CriterionKind, information_criterion, cross_validation, evidence_weights, model_average
from .hyptest import AlphaProfile, strategy_run
from .evaluate import STRATEGIES, run_cell, regret_matrix
from .estimators import CriterionSelector, TestingSelector

__all__ = [
    "__version__",
    "ModelId", "ModelSpec", "RelationType", "TrendKnowledge", "get_model", "list_models", "classify_params",
    "DgpParams", "SeriesPair", "simulate", "enumerate_permutations",
    "RankDeficiencyError", "least_squares", "fit_model",
    "CriterionKind", "information_criterion", "cross_validation", "evidence_weights", "model_average",
    "AlphaProfile", "strategy_run",
    "STRATEGIES", "run_cell", "regret_matrix",
    "CriterionSelector", "TestingSelector",
]
