"""Information criteria, leave-one-out cross-validation and evidence weights.

With ``RSS`` the residual sum of squares, ``T`` observations and ``C``
estimated parameters:

==========  ==================================================
criterion   value
==========  ==================================================
AIC         T ln(RSS/T) + 2(C + 1)
AICc        T ln(RSS/T) + 2T(C + 1)/(T - C - 2)
AICu        T ln(RSS/(T - C)) + 2T(C + 1)/(T - C - 2)
SIC         T ln(RSS/T) + C ln T
FPEu        [RSS/(T - C)] (T + C + 1)/(T - C - 1)
CV          (1/T) Σ (e_t / (1 - h_t))^2
==========  ==================================================
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .taxonomy import ROLES, ModelId, TrendKnowledge, choosable_set, get_model

__all__ = [
    "CriterionKind",
    "CriterionDomainError",
    "DegenerateLeverageError",
    "WeightTable",
    "information_criterion",
    "criterion_values",
    "cross_validation",
    "criterion_of_fit",
    "select_by_criterion",
    "evidence_weights",
    "criterion_weights",
    "model_average",
]


class CriterionKind(str, enum.Enum):
    AIC = "AIC"
    AICC = "AICc"
    AICU = "AICu"
    SIC = "SIC"
    CV = "CV"
    FPEU = "FPEu"

    @classmethod
    def coerce(cls, value) -> "CriterionKind":
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        for member in cls:
            if member.value.lower() == text.lower():
                return member
        if text.upper() in ("BIC", "SBC", "SC"):
            return cls.SIC
        raise ValueError(f"unknown criterion {value!r}")


class CriterionDomainError(ValueError):
    """Criterion undefined for this (RSS, T, C); the model is too large for the sample."""


class DegenerateLeverageError(ValueError):
    """An observation has leverage one, so its leave-one-out residual is undefined."""


def information_criterion(kind, rss: float, t: int, c: int) -> float:
    """Evaluate a scalar information criterion.

    Parameters
    ----------
    kind : CriterionKind or str
        One of AIC, AICc, AICu, SIC, FPEu.
    rss : float
        Residual sum of squares, positive.
    t : int
        Number of observations.
    c : int
        Number of estimated parameters.

    Returns
    -------
    float

    Raises
    ------
    CriterionDomainError
        If ``rss <= 0`` or the degrees-of-freedom corrections are undefined.

    Examples
    --------
    >>> information_criterion("AIC", 50.0, 50, 0)
    2.0
    """
    kind = CriterionKind.coerce(kind)
    if kind is CriterionKind.CV:
        raise ValueError("CV needs residuals and leverages; use cross_validation")
    if not rss > 0:
        raise CriterionDomainError(f"rss must be positive, got {rss}")
    if kind in (CriterionKind.AICC, CriterionKind.AICU) and not t > c + 2:
        raise CriterionDomainError(f"{kind.value} needs T > C + 2 (T={t}, C={c})")
    if kind is CriterionKind.FPEU and not t > c + 1:
        raise CriterionDomainError(f"FPEu needs T > C + 1 (T={t}, C={c})")
    if kind is CriterionKind.AIC:
        return t * math.log(rss / t) + 2 * (c + 1)
    if kind is CriterionKind.AICC:
        return t * math.log(rss / t) + 2 * t * (c + 1) / (t - c - 2)
    if kind is CriterionKind.AICU:
        return t * math.log(rss / (t - c)) + 2 * t * (c + 1) / (t - c - 2)
    if kind is CriterionKind.SIC:
        return t * math.log(rss / t) + math.log(t) * c
    return (rss / (t - c)) * (t + c + 1) / (t - c - 1)


def criterion_values(kind, rss, t: int, c: int) -> np.ndarray:
    """Vectorised :func:`information_criterion` over an array of RSS values.

    Non-positive or non-finite RSS gives ``inf`` instead of raising, so a
    degenerate replication never wins a minimisation.
    """
    kind = CriterionKind.coerce(kind)
    rss = np.asarray(rss, dtype=float)
    good = np.isfinite(rss) & (rss > 0)
    safe = np.where(good, rss, 1.0)
    if kind is CriterionKind.AIC:
        out = t * np.log(safe / t) + 2 * (c + 1)
    elif kind is CriterionKind.AICC:
        out = t * np.log(safe / t) + 2 * t * (c + 1) / (t - c - 2)
    elif kind is CriterionKind.AICU:
        out = t * np.log(safe / (t - c)) + 2 * t * (c + 1) / (t - c - 2)
    elif kind is CriterionKind.SIC:
        out = t * np.log(safe / t) + np.log(t) * c
    elif kind is CriterionKind.FPEU:
        out = (safe / (t - c)) * (t + c + 1) / (t - c - 1)
    else:
        raise ValueError("CV needs residuals and leverages")
    return np.where(good, out, np.inf)


def cross_validation(fit) -> float:
    """Leave-one-out cross-validation score from a single fit.

    Parameters
    ----------
    fit : RegressionFit

    Returns
    -------
    float
        ``(1/T) Σ (e_t / (1 - h_t))^2``.

    Raises
    ------
    DegenerateLeverageError
        If some ``h_t`` equals one.
    """
    h = np.asarray(fit.hat_diagonals, dtype=float)
    e = np.asarray(fit.residuals, dtype=float)
    if np.any(1.0 - h <= 1e-12):
        raise DegenerateLeverageError("observation with unit leverage")
    return float(np.mean((e / (1.0 - h)) ** 2))


def cv_values(resid: np.ndarray, hat: np.ndarray) -> np.ndarray:
    """Batched CV over the last axis; unit leverage or NaN gives ``inf``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.mean((resid / (1.0 - hat)) ** 2, axis=-1)
    bad = ~np.isfinite(out) | np.any(1.0 - hat <= 1e-12, axis=-1)
    return np.where(bad, np.inf, out)


def criterion_of_fit(kind, fit) -> float:
    """Criterion value for a :class:`~tsselect.regress.RegressionFit`."""
    kind = CriterionKind.coerce(kind)
    if kind is CriterionKind.CV:
        return cross_validation(fit)
    return information_criterion(kind, fit.rss, fit.t_obs, fit.c_count)


def _as_model_id(m) -> ModelId:
    if isinstance(m, ModelId):
        return m
    if isinstance(m, str):
        return ModelId.parse(m)
    if isinstance(m, tuple):
        return ModelId(*m)
    return m.id


def select_by_criterion(kind, fits, trend_knowledge=TrendKnowledge.UNKNOWN) -> ModelId:
    """Model minimising a criterion among the choosable candidates.

    Parameters
    ----------
    kind : CriterionKind or str
    fits : iterable of (ModelId, RegressionFit)
    trend_knowledge : TrendKnowledge or str
        Fits outside :func:`~tsselect.taxonomy.choosable_set` are ignored.

    Returns
    -------
    ModelId
        Ties go to the smallest ``(family, aug_lags)``.

    Raises
    ------
    ValueError
        If no candidate remains.
    """
    allowed = choosable_set(trend_knowledge)
    scored = []
    for model, fit in fits:
        mid = _as_model_id(model)
        if mid in allowed:
            scored.append((criterion_of_fit(kind, fit), mid))
    if not scored:
        raise ValueError("no candidate models to choose from")
    best = min(v for v, _ in scored)
    return min(m for v, m in scored if v == best)


@dataclass(frozen=True)
class WeightTable:
    """Evidence weights ``w_i = exp(-Δ_i/2) / Σ_r exp(-Δ_r/2)``.

    Attributes
    ----------
    entries : tuple of (ModelId, float, float, float)
        ``(model, ic_value, delta, weight)``, sorted by delta.
    """

    entries: tuple

    def weights(self) -> dict:
        return {m: w for m, _, _, w in self.entries}

    def best(self) -> ModelId:
        return self.entries[0][0]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def evidence_weights(ic_values) -> WeightTable:
    """Evidence weights from information-criterion values.

    Parameters
    ----------
    ic_values : iterable of (ModelId, float)
        Finite criterion values.  ``inf`` is allowed and gets zero weight.

    Returns
    -------
    WeightTable
        Entries sorted by increasing delta, ties by model order.

    Examples
    --------
    >>> wt = evidence_weights([("1.00", 0.0), ("2.00", 2.0)])
    >>> [round(w, 5) for *_, w in wt]
    [0.73106, 0.26894]
    """
    items = [(_as_model_id(m), float(v)) for m, v in ic_values]
    if not items:
        raise ValueError("at least one criterion value is required")
    vals = np.array([v for _, v in items])
    if np.isnan(vals).any() or not np.isfinite(vals).any():
        raise ValueError("criterion values must be finite")
    delta = vals - vals.min()
    raw = np.exp(-0.5 * delta)
    w = raw / math.fsum(raw)
    order = sorted(range(len(items)), key=lambda i: (delta[i], items[i][0]))
    return WeightTable(tuple((items[i][0], items[i][1], float(delta[i]), float(w[i])) for i in order))


def criterion_weights(kind, fits) -> WeightTable:
    """Evidence weights for fitted models under an information criterion.

    Raises
    ------
    ValueError
        For ``CV`` or ``FPEu``; the weights are defined for the AIC family
        and SIC only.
    """
    kind = CriterionKind.coerce(kind)
    if kind in (CriterionKind.CV, CriterionKind.FPEU):
        raise ValueError(f"evidence weights are not defined for {kind.value}")
    return evidence_weights([(m, criterion_of_fit(kind, f)) for m, f in fits])


def model_average(fits, weights: WeightTable) -> dict:
    """Evidence-weighted average coefficient per regressor role.

    A role absent from a model contributes zero.  Fixed coefficients (such
    as the -1 on ``Y_{t-1}`` in level relations) count at their fixed value.

    Parameters
    ----------
    fits : iterable of (ModelId or ModelSpec, RegressionFit)
    weights : WeightTable

    Returns
    -------
    dict
        ``{"coefficients": {role: value}, "inclusion": {role: Σ w}}`` over
        every role in :data:`~tsselect.taxonomy.ROLES`.
    """
    wmap = weights.weights()
    avg = {r: 0.0 for r in ROLES}
    incl = {r: 0.0 for r in ROLES}
    for model, fit in fits:
        spec = get_model(model if not isinstance(model, str) else ModelId.parse(model))
        w = wmap.get(spec.id)
        if w is None:
            raise ValueError(f"no weight for model {spec.id}")
        for role, coef in zip(spec.free_coeffs, fit.coefficients):
            avg[role] += w * float(coef)
            incl[role] += w
        for role, value in spec.fixed_terms:
            avg[role] += w * value
            incl[role] += w
    return {"coefficients": avg, "inclusion": incl}
