"""scikit-learn style selectors.

Both estimators take ``X`` of shape ``(n, 2)`` holding the levels of ``Y``
and ``Z``.  The first three rows serve only as lags, so ``predict`` returns
``n - 3`` fitted values of ``ΔY``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_pair_array
from .criteria import CriterionKind, CriterionDomainError, DegenerateLeverageError, criterion_of_fit, \
    evidence_weights
from .hyptest import LinearPredictor, strategy_run
from .regress import RankDeficiencyError, fit_model
from .taxonomy import ModelId, TrendKnowledge, choosable_set, relation_of

__all__ = ["CriterionSelector", "TestingSelector"]


class _PairScoreMixin(RegressorMixin):
    """``score`` is R² of fitted against observed ``ΔY``."""

    def score(self, X, y=None, sample_weight=None):
        data = check_pair_array(X)
        dy = np.diff(data.y)[data.presample_len - 1:]
        return super().score(X, dy, sample_weight)


class CriterionSelector(_PairScoreMixin, BaseEstimator):
    """Pick the candidate model minimising an information criterion.

    Parameters
    ----------
    criterion : {"AIC", "AICc", "AICu", "SIC", "CV"}, default "SIC"
    trend_knowledge : {"no_trend", "trend", "all"}, default "all"
        Restricts the candidate set.

    Attributes
    ----------
    model_ : ModelId
    criterion_values_ : dict
        ``ModelId -> value`` over every candidate that could be estimated.
    weights_ : WeightTable or None
        Evidence weights (not defined for CV).
    coef_ : ndarray
        Coefficients of the chosen model on its free regressors.
    skipped_ : dict
        Candidates left out as rank deficient, with the offending regressor.

    Examples
    --------
    >>> from tsselect.dgp import DgpParams, simulate
    >>> s = simulate(DgpParams(b1=1, b3=-1, b6=10, m1=1, m3=0.5), seed=1)
    >>> X = np.column_stack([s.y, s.z])[97:]
    >>> str(CriterionSelector("SIC", "no_trend").fit(X).model_)
    '11.00'
    """

    def __init__(self, criterion="SIC", trend_knowledge="all"):
        self.criterion = criterion
        self.trend_knowledge = trend_knowledge

    def fit(self, X, y=None):
        kind = CriterionKind.coerce(self.criterion)
        if kind is CriterionKind.FPEU:
            raise ValueError("FPEu is a lag-selection criterion only")
        data = check_pair_array(X)
        tk = TrendKnowledge.coerce(self.trend_knowledge)
        fits, values, skipped = {}, {}, {}
        for model in sorted(choosable_set(tk)):
            try:
                fit = fit_model(model, data)
            except RankDeficiencyError as exc:
                skipped[model] = exc.name
                continue
            fits[model] = fit
            try:
                values[model] = criterion_of_fit(kind, fit)
            except (CriterionDomainError, DegenerateLeverageError):
                values[model] = np.inf
        if not fits:
            raise RankDeficiencyError(-1, "all candidates")
        best = min(values.values())
        self.model_ = min(m for m, v in values.items() if v == best)
        self.criterion_values_ = values
        self.skipped_ = skipped
        self.weights_ = None if kind is CriterionKind.CV else evidence_weights(values.items())
        self.coef_ = fits[self.model_].coefficients
        coint = None
        if self.model_.family in (13, 14):
            c = fits.get(ModelId(11, 0)) or fit_model("11.00", data)
            coint = (float(c.coefficients[0]), float(c.coefficients[1]))
        self.predictor_ = LinearPredictor(self.model_, self.coef_, coint)
        self.relation_ = relation_of(self.model_.family)
        return self

    def predict(self, X):
        check_is_fitted(self, "predictor_")
        return self.predictor_(check_pair_array(X))


class TestingSelector(_PairScoreMixin, BaseEstimator):
    """Pick a model by a sequence of unit-root and cointegration tests.

    Parameters
    ----------
    variant : {"EG", "Jo"}, default "Jo"
        Engle-Granger or Johansen cointegration testing.
    profile : {"-10%", "-5%", "-10/5"}, default "-5%"
        Significance levels.
    trend_knowledge : {"no_trend", "trend", "all"}, default "all"

    Attributes
    ----------
    model_ : ModelId
    relation_ : RelationType
    trace_ : tuple of TraceEntry
        Tests run, in order, with statistics and decisions.
    """

    def __init__(self, variant="Jo", profile="-5%", trend_knowledge="all"):
        self.variant = variant
        self.profile = profile
        self.trend_knowledge = trend_knowledge

    def fit(self, X, y=None):
        data = check_pair_array(X)
        res = strategy_run(data, self.variant, self.profile, self.trend_knowledge)
        self.model_ = res.chosen
        self.relation_ = res.relation
        self.trace_ = res.trace
        self.predictor_ = res.predictor
        return self

    def predict(self, X):
        check_is_fitted(self, "predictor_")
        return self.predictor_(check_pair_array(X))
