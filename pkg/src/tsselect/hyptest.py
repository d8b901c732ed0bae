"""Hypothesis-testing selection strategies.

A strategy classifies each series as a random walk (with or without drift)
or stationary (around a constant or a trend), then

* for two random walks with the same drift status, tests for cointegration
  (Engle-Granger or Johansen).  Cointegration gives an error-correction
  model; otherwise a contemporaneous-difference test, then a Granger test
  in differences, and finally Y's univariate model;
* for two stationary series with the same trend status, tests ``b6`` in the
  level regression of Y on Z, after a residual autocorrelation check that
  may call for a Cochrane-Orcutt correction;
* otherwise keeps Y's univariate model.

A stationary univariate model becomes white noise when ``b3 = -1`` is not
rejected.  Every test is recorded in an audit trace; entries from branches
that had to be reconstructed carry a ``branch`` tag starting with
``reconstructed:``.

All tests run vectorised over replications.  :func:`strategy_run` and the
other single-sample functions call the batched engine with one replication.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .critical_values import default_table
from .criteria import criterion_values
from .dgp import SeriesPair
from .regress import (
    BatchFit,
    Design,
    RankDeficiencyError,
    VecmFit,
    cochrane_orcutt_batch,
    cointegrating_regression,
    fit_spec_batch,
    ols_batch,
    vecm_batch,
)
from .taxonomy import ModelId, RelationType, TrendKnowledge, get_model, relation_of

__all__ = [
    "AlphaProfile",
    "PROFILES",
    "UnivariateKind",
    "UnivariateStatus",
    "TraceEntry",
    "StrategyResult",
    "LinearPredictor",
    "VecmPredictor",
    "adf_test",
    "select_aug_lag",
    "univariate_status",
    "eg_cointegration_test",
    "johansen_cointegration_test",
    "autocorrelation_check",
    "strategy_run",
    "TestingEngine",
]


@dataclass(frozen=True)
class AlphaProfile:
    """Significance levels used by a testing strategy.

    Parameters
    ----------
    general_alpha : float
        Level for every test except unit-root tests.
    unit_root_alpha : float
        Level for the Dickey-Fuller tests.
    """

    general_alpha: float
    unit_root_alpha: float
    name: str = ""

    def __post_init__(self):
        for a in (self.general_alpha, self.unit_root_alpha):
            if not 0.0 < a < 1.0:
                raise ValueError("significance levels must lie in (0, 1)")

    @classmethod
    def named(cls, name: str) -> "AlphaProfile":
        key = name.strip()
        if key not in PROFILES:
            raise ValueError(f"unknown alpha profile {name!r}; expected one of {sorted(PROFILES)}")
        return PROFILES[key]


PROFILES = {
    "-10%": AlphaProfile(0.10, 0.10, "-10%"),
    "-5%": AlphaProfile(0.05, 0.05, "-5%"),
    "-10/5": AlphaProfile(0.05, 0.10, "-10/5"),
}


class UnivariateKind(str, enum.Enum):
    RANDOM_WALK = "RandomWalk"
    RANDOM_WALK_DRIFT = "RandomWalkDrift"
    STATIONARY_CONSTANT = "StationaryConstant"
    TREND_STATIONARY = "TrendStationary"
    WHITE_NOISE = "WhiteNoise"
    WHITE_NOISE_TREND = "WhiteNoiseTrend"


_KIND_CODES = [UnivariateKind.RANDOM_WALK, UnivariateKind.RANDOM_WALK_DRIFT,
               UnivariateKind.STATIONARY_CONSTANT, UnivariateKind.TREND_STATIONARY]
RW, RWD, SC, TS = range(4)
_KIND_FAMILY = {UnivariateKind.RANDOM_WALK: 1, UnivariateKind.RANDOM_WALK_DRIFT: 2,
                UnivariateKind.STATIONARY_CONSTANT: 3, UnivariateKind.TREND_STATIONARY: 4,
                UnivariateKind.WHITE_NOISE: 5, UnivariateKind.WHITE_NOISE_TREND: 6}


@dataclass(frozen=True)
class UnivariateStatus:
    kind: UnivariateKind
    aug_lags: int

    def __post_init__(self):
        if self.aug_lags not in (0, 1, 2):
            raise ValueError("aug_lags must be 0, 1 or 2")

    @property
    def family(self) -> int:
        return _KIND_FAMILY[self.kind]

    @property
    def model(self) -> ModelId:
        return ModelId(self.family, self.aug_lags)


@dataclass(frozen=True)
class TraceEntry:
    test: str
    statistic: float
    decision: str
    branch: str = ""


class LinearPredictor:
    """Fitted ``ΔY_t`` from a single-equation model.

    Parameters
    ----------
    model : ModelId
    coefficients : array_like
        One per free regressor of the model.
    coint : tuple of float, optional
        ``(c1, c2)`` for error-correction models.
    """

    def __init__(self, model, coefficients, coint=None):
        self.model = get_model(model)
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.coint = coint

    def __call__(self, data) -> np.ndarray:
        design = Design(data)
        ec = None
        if self.model.has_cointegration:
            ec = design.ec_from(self.coint[0], self.coint[1])
        X = design.matrix(self.model.free_coeffs, ec)[0]
        out = X @ self.coefficients if self.coefficients.size else np.zeros(design.T)
        for role, value in self.model.fixed_terms:
            out = out + value * design.column(role)[0]
        return out

    @classmethod
    def from_params(cls, model, theta) -> "LinearPredictor":
        """Predictor carrying the true coefficients of ``theta``."""
        from .taxonomy import ROLE_PARAMS

        spec = get_model(model)
        coefs = [getattr(theta, ROLE_PARAMS[r]) for r in spec.free_coeffs]
        coint = (theta.c1, theta.c2) if spec.has_cointegration else None
        return cls(spec, coefs, coint)

    def __repr__(self):
        return f"LinearPredictor({self.model.id}, {self.coefficients.round(4).tolist()})"


class VecmPredictor:
    """Fitted ``ΔY_t`` from the Y row of a VECM, ``Π r_Ω + Λ Ω``."""

    def __init__(self, fit: VecmFit):
        self.fit = fit

    def __call__(self, data) -> np.ndarray:
        return self.fit.predict(data)[:, 0]

    def __repr__(self):
        return f"VecmPredictor(k={self.fit.k_star}, drift={self.fit.drift})"


@dataclass(frozen=True)
class StrategyResult:
    """Outcome of a testing strategy on one sample."""

    chosen: ModelId
    relation: RelationType
    predictor: object
    trace: tuple = field(default_factory=tuple)


# ---------------------------------------------------------------------------
# batched building blocks

def _tcrit(alpha: float, dof) -> np.ndarray:
    return stats.t.ppf(1.0 - alpha / 2.0, dof)


def _lagged(x, p, T, k):
    """Columns of ``x`` lagged by ``k`` over the sample rows."""
    return x[:, p - k:p - k + T]


def _adf_design(x, p, T, det: str, k: int):
    dx = np.diff(x, axis=1, prepend=0.0)
    cols = []
    names = []
    if det in ("c", "ct"):
        cols.append(np.ones((x.shape[0], T)))
        names.append("intercept")
    if det == "ct":
        cols.append(np.broadcast_to(np.arange(p + 1, p + T + 1, dtype=float), (x.shape[0], T)))
        names.append("trend")
    cols.append(_lagged(x, p, T, 1))
    names.append("level")
    for j in range(1, k + 1):
        cols.append(_lagged(dx, p, T, j))
        names.append(f"diff{j}")
    return np.stack(cols, axis=-1), _lagged(dx, p, T, 0), tuple(names)


@dataclass
class _AdfSet:
    fits: dict          # k -> BatchFit
    k_star: np.ndarray  # (R,)
    fpe: np.ndarray     # (R, 3)

    def at_k(self, attr_fn):
        """Per-replication value from the fit at ``k_star``."""
        vals = np.stack([attr_fn(self.fits[k]) for k in range(3)], axis=-1)
        return np.take_along_axis(vals, self.k_star[:, None], axis=-1)[:, 0]


def _adf_set(x, p, T, det) -> _AdfSet:
    fits = {}
    fpe = []
    for k in range(3):
        X, y, names = _adf_design(x, p, T, det, k)
        fit = ols_batch(X, y, roles=names)
        fits[k] = fit
        fpe.append(criterion_values("FPEu", fit.rss, T, fit.k))
    fpe = np.stack(fpe, axis=-1)
    k_star = np.argmin(fpe, axis=-1)
    return _AdfSet(fits, k_star, fpe)


def _level_t(fit: BatchFit):
    return fit.t_values()[:, fit.column("level")]


def _wn_t(fit: BatchFit):
    return fit.t_values(null=_null_vector(fit, "level", -1.0))[:, fit.column("level")]


def _trend_t(fit: BatchFit):
    return fit.t_values()[:, fit.column("trend")]


def _null_vector(fit, role, value):
    null = np.zeros(fit.k)
    null[fit.column(role)] = value
    return null


@dataclass
class _Univariate:
    """Unit-root and trend classification for one variable over replications."""

    kind: np.ndarray        # (R,) codes RW, RWD, SC, TS
    k: np.ndarray           # (R,) augmentation lags
    adf_stat: np.ndarray
    adf_crit: float
    det: str
    trend_stat: np.ndarray
    drift_stat: np.ndarray
    wn_stat: np.ndarray     # b3 = -1 t-ratio in the stationary end model
    ok: np.ndarray


def _univariate_batch(x, p, T, tk: TrendKnowledge, profile: AlphaProfile) -> _Univariate:
    R = x.shape[0]
    table = default_table()
    det = "c" if tk is TrendKnowledge.NONE_KNOWN_ABSENT else "ct"
    main = _adf_set(x, p, T, det)
    k = main.k_star
    tau = main.at_k(_level_t)
    crit = table.lookup("adf", det, profile.unit_root_alpha, T)
    stationary = tau < crit
    ok = np.isfinite(tau)
    nan = np.full(R, np.nan)
    trend_stat = drift_stat = nan
    if tk is TrendKnowledge.NONE_KNOWN_ABSENT:
        kind = np.where(stationary, SC, RW)
    elif tk is TrendKnowledge.KNOWN_PRESENT:
        kind = np.where(stationary, TS, RWD)
    else:
        trend_stat = main.at_k(_trend_t)
        dof = T - (k + 3)
        trend_sig = np.abs(trend_stat) > _tcrit(profile.general_alpha, dof)
        dx = np.diff(x, axis=1, prepend=0.0)[:, p:p + T]
        with np.errstate(divide="ignore", invalid="ignore"):
            drift_stat = dx.mean(axis=1) / (dx.std(axis=1, ddof=1) / math.sqrt(T))
        drift_sig = np.abs(drift_stat) > _tcrit(profile.general_alpha, T - 1)
        kind = np.where(stationary, np.where(trend_sig, TS, SC), np.where(drift_sig, RWD, RW))
        ok &= np.isfinite(trend_stat)
    # b3 = -1 t-ratio in the stationary end model (constant, or constant and trend)
    wn_c = _adf_set(x, p, T, "c") if det != "c" else main
    wn_stat = np.where(kind == TS, _pick(main, k, _wn_t), _pick(wn_c, k, _wn_t))
    return _Univariate(kind.astype(int), k.astype(int), tau, crit, det, trend_stat, drift_stat, wn_stat, ok)


def _pick(adf: _AdfSet, k, fn):
    vals = np.stack([fn(adf.fits[j]) for j in range(3)], axis=-1)
    return np.take_along_axis(vals, k[:, None], axis=-1)[:, 0]


def _fitted(design: Design, fit: BatchFit) -> np.ndarray:
    """Fitted ``ΔY_t``: the response minus residuals, fixed terms restored."""
    return design.dy - fit.resid


class _Cache:
    """Memoised model fits on one design."""

    def __init__(self, design: Design):
        self.design = design
        self._fits = {}
        self._ec11 = None

    def ec_model11(self):
        if self._ec11 is None:
            c = self.model("11.00")
            self._ec11 = self.design.ec_from(c.coef[:, 0], c.coef[:, 1])
        return self._ec11

    def model(self, model, ec=None, ec_key="model_11_00") -> BatchFit:
        spec = get_model(model)
        key = (spec.id, ec_key if spec.has_cointegration else None)
        if key not in self._fits:
            if spec.has_cointegration and ec is None:
                ec = self.ec_model11()
            self._fits[key] = fit_spec_batch(spec, self.design, ec)
        return self._fits[key]


def _family_code(family, lags):
    return family * 10 + lags


def _code_to_model(code: int) -> ModelId:
    return ModelId(int(code) // 10, int(code) % 10)


class TestingEngine:
    """Statistics for the testing strategies on a batch of replications.

    Statistics that do not depend on the strategy variant or the alpha
    profile are computed lazily once and reused.

    Parameters
    ----------
    data : SeriesBatch or SeriesPair
    trend_knowledge : TrendKnowledge or str
    cache : optional
        Shared fit cache (used by the evaluation harness).
    """

    def __init__(self, data, trend_knowledge, cache=None):
        if isinstance(data, SeriesPair):
            data = data.as_batch()
        self.data = data
        self.tk = TrendKnowledge.coerce(trend_knowledge)
        self.cache = cache if cache is not None else _Cache(Design(data))
        self.design = self.cache.design
        self.p, self.T, self.R = data.presample_len, data.sample_len, data.reps
        self._memo = {}

    def _once(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    # -- univariate -----------------------------------------------------------
    def univariate(self, which: str, profile: AlphaProfile) -> _Univariate:
        x = self.data.y if which == "y" else self.data.z
        return self._once(("uni", which, profile.general_alpha, profile.unit_root_alpha),
                          lambda: _univariate_batch(x, self.p, self.T, self.tk, profile))

    # -- Engle-Granger ------------------------------------------------------------
    def eg_stage(self):
        def run():
            stage1 = cointegrating_regression(self.data, 3)
            p, T = self.p, self.T
            rows = slice(p - 3, p + T)
            eps = self.data.y[:, rows] - stage1.coef[:, :1] - stage1.coef[:, 1:2] * self.data.z[:, rows]
            # eps index 3 is the first sample row
            lagged = eps[:, 2:2 + T]
            d_eps = eps[:, 3:3 + T] - lagged
            X = np.stack([np.ones_like(lagged), lagged], axis=-1)
            stage2 = ols_batch(X, d_eps, roles=("intercept", "level"))
            tstat = stage2.t_values()[:, 1]
            trivial = stage1.ok & ~stage2.ok
            ec = self.design.ec_from(stage1.coef[:, 0], stage1.coef[:, 1])
            return dict(stage1=stage1, tstat=tstat, trivial=trivial, ec=ec, ok=stage1.ok)
        return self._once("eg", run)

    def eg_ecm(self, drift: bool):
        def run():
            eg = self.eg_stage()
            fam = 14 if drift else 13
            fits = [self.cache.model(ModelId(fam, k), ec=eg["ec"], ec_key="eg") for k in (1, 2)]
            sic = np.stack([criterion_values("SIC", f.rss, self.T, f.c_count) for f in fits], axis=-1)
            kstar = np.argmin(sic, axis=-1) + 1
            fitted = np.where((kstar == 1)[:, None], _fitted(self.design, fits[0]), _fitted(self.design, fits[1]))
            return dict(k=kstar, fitted=fitted, fits=fits)
        return self._once(("eg_ecm", drift), run)

    # -- Johansen -------------------------------------------------------------------
    def jo_lag(self):
        def run():
            d = self.design
            sic = []
            for k in (1, 2):
                roles = ["intercept", "y_lag", "z_lag"] + ["dy1", "dz1", "dy2", "dz2"][:2 * k]
                X = d.matrix(roles)
                ry = ols_batch(X, d.dy).resid
                rz = ols_batch(X, d.column("dz")).resid
                e = np.stack([ry, rz], axis=-1)
                cov = np.swapaxes(e, 1, 2) @ e / self.T
                sign, logdet = np.linalg.slogdet(cov)
                logdet = np.where(sign > 0, logdet, np.inf)
                n_par = 2 * len(roles)
                sic.append(self.T * logdet + math.log(self.T) * n_par)
            sic = np.stack(sic, axis=-1)
            sic = np.where(np.isfinite(sic), sic, np.inf)
            return np.argmin(sic, axis=-1) + 1
        return self._once("jo_lag", run)

    def jo_vecm(self, k: int, drift: bool):
        return self._once(("jo_vecm", k, drift), lambda: vecm_batch(self.data, k, drift))

    def jo_select(self, drift_mask: np.ndarray):
        """Per-replication trace statistic and fitted ΔY for the chosen lag and case."""
        kstar = self.jo_lag()
        trace = np.full(self.R, np.nan)
        fitted = np.full((self.R, self.T), np.nan)
        for k in (1, 2):
            for drift in (False, True):
                sel = (kstar == k) & (drift_mask == drift)
                if sel.any():
                    fit = self.jo_vecm(k, drift)
                    trace[sel] = fit.trace[sel]
                    fitted[sel] = fit.fitted[sel, :, 0]
        return kstar, trace, fitted

    # -- level relation ---------------------------------------------------------------
    def level(self, trend: bool):
        def run():
            d = self.design
            model = "12.00" if trend else "11.00"
            spec = get_model(model)
            fit = self.cache.model(model)
            e = fit.resid
            ylev = d.level_y
            tss = np.sum((ylev - ylev.mean(axis=1, keepdims=True)) ** 2, axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                r2 = 1.0 - fit.rss / tss
                dw = np.sum(np.diff(e, axis=1) ** 2, axis=1) / fit.rss
            e_lag = np.concatenate([np.zeros((self.R, 1)), e[:, :-1]], axis=1)
            X = np.concatenate([d.matrix(spec.free_coeffs), e_lag[..., None]], axis=-1)
            aux = ols_batch(X, np.nan_to_num(e), roles=spec.free_coeffs + ("e_lag",))
            bg_coef = aux.coef[:, -1]
            ess = np.sum(e**2, axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                bg_lm = self.T * (1.0 - aux.rss / ess)
            bg_p = stats.chi2.sf(bg_lm, 1)
            ols_t = fit.t_values()[:, fit.column("z")]
            co = cochrane_orcutt_batch(spec, d, ols=fit)
            co_t = co.fit.t_values()[:, co.fit.column("z")]
            X_full = d.matrix(spec.free_coeffs)
            co_fitted = np.einsum("rtk,rk->rt", X_full, co.fit.coef) - d.column("y_lag")
            return dict(fit=fit, r2=r2, dw=dw, bg_coef=bg_coef, bg_lm=bg_lm, bg_p=bg_p, ols_t=ols_t,
                        ols_dof=self.T - fit.k, co=co, co_t=co_t, co_dof=self.T - 1 - fit.k,
                        co_fitted=co_fitted, ok=fit.ok & np.isfinite(bg_coef))
        return self._once(("level", trend), run)

    # -- decision tree --------------------------------------------------------------------
    def decide(self, variant: str, profile: AlphaProfile):
        """Run one strategy; returns a :class:`_Decision` over all replications."""
        variant = _check_variant(variant)
        return self._once(("decide", variant, profile), lambda: _decide(self, variant, profile))


def _check_variant(variant: str) -> str:
    v = str(variant).strip()
    if v.upper() == "EG":
        return "EG"
    if v.lower() == "jo":
        return "Jo"
    raise ValueError(f"variant must be 'EG' or 'Jo', got {variant!r}")


@dataclass
class _Decision:
    code: np.ndarray            # (R,) family*10 + lags
    fitted: np.ndarray          # (R, T)
    route: np.ndarray           # (R,) object labels of the fitted-value source
    trace: list                 # (name, stat, decision labels, applicable, branch)
    fallback: np.ndarray        # (R,) bool

    def model(self, i) -> ModelId:
        return _code_to_model(self.code[i])

    def trace_for(self, i) -> tuple:
        out = []
        for name, stat, decision, applicable, branch in self.trace:
            if applicable[i]:
                out.append(TraceEntry(name, float(stat[i]), str(decision[i]), branch))
        return tuple(out)


def _decide(eng: TestingEngine, variant: str, profile: AlphaProfile) -> _Decision:
    R, T, d = eng.R, eng.T, eng.design
    table = default_table()
    ga = profile.general_alpha
    tk = eng.tk
    uy = eng.univariate("y", profile)
    uz = eng.univariate("z", profile)
    trace = []
    kind_names = np.array([k.value for k in _KIND_CODES])
    all_rows = np.ones(R, bool)
    trace.append(("ADF Y (" + uy.det + ")", uy.adf_stat, np.where(uy.adf_stat < uy.adf_crit, "reject unit root", "unit root"), all_rows, "univariate"))
    trace.append(("ADF Z (" + uz.det + ")", uz.adf_stat, np.where(uz.adf_stat < uz.adf_crit, "reject unit root", "unit root"), all_rows, "univariate"))
    if tk is TrendKnowledge.UNKNOWN:
        for nm, u in (("Y", uy), ("Z", uz)):
            st = np.isin(u.kind, (SC, TS))
            trace.append((f"trend t {nm}", u.trend_stat, np.where(u.kind == TS, "trend", "no trend"), st, "univariate: unknown trend"))
            trace.append((f"drift t {nm}", u.drift_stat, np.where(u.kind == RWD, "drift", "no drift"), ~st, "univariate: unknown trend"))
    trace.append(("status Y", uy.k.astype(float), kind_names[uy.kind], all_rows, "univariate"))
    trace.append(("status Z", uz.k.astype(float), kind_names[uz.kind], all_rows, "univariate"))

    code = np.zeros(R, int)
    fitted = np.full((R, T), np.nan)
    route = np.empty(R, object)
    done = np.zeros(R, bool)

    def assign(mask, model_code, fit_vals, label):
        m = mask & ~done
        if not m.any():
            return
        code[m] = model_code if np.isscalar(model_code) else model_code[m]
        fitted[m] = fit_vals[m]
        route[m] = label
        done[m] = True

    def assign_model(mask, model_codes):
        """Assign OLS-fitted models given per-replication codes."""
        m = mask & ~done
        for c in np.unique(model_codes[m]):
            sel = m & (model_codes == c)
            mid = _code_to_model(c)
            fit = eng.cache.model(mid)
            assign(sel, int(c), _fitted(d, fit), str(mid))

    ok = uy.ok & uz.ok
    both_rw = ok & np.isin(uy.kind, (RW, RWD)) & (uy.kind == uz.kind)
    both_st = ok & np.isin(uy.kind, (SC, TS)) & (uy.kind == uz.kind)
    drift = uy.kind == RWD
    trend = uy.kind == TS
    branch_c = "reconstructed: cointegration branch"

    # -- random-walk pair: cointegration ------------------------------------
    if both_rw.any():
        if variant == "EG":
            eg = eng.eg_stage()
            crit = table.lookup("eg", "c", ga, T)
            coint = (eg["tstat"] < crit) | eg["trivial"]
            trace.append(("EG residual t", eg["tstat"], np.where(coint, "cointegrated", "not cointegrated"), both_rw, branch_c))
            for dr in (False, True):
                sel = both_rw & coint & (drift == dr) & eg["ok"]
                if sel.any():
                    ecm = eng.eg_ecm(dr)
                    fam = 14 if dr else 13
                    assign(sel, fam * 10 + ecm["k"], ecm["fitted"], "EG-ECM")
            granger_k = None
        else:
            kstar, trace_stat, jo_fitted = eng.jo_select(drift)
            crit = np.where(drift, table.lookup("johansen_trace", "uc", ga), table.lookup("johansen_trace", "rc", ga))
            coint = trace_stat > crit
            trace.append(("Johansen lag (multivariate SIC)", kstar.astype(float), kstar.astype(str), both_rw, branch_c))
            trace.append(("Johansen trace", trace_stat, np.where(coint, "cointegrated", "not cointegrated"), both_rw, branch_c))
            sel = both_rw & coint & np.isfinite(jo_fitted).all(axis=1)
            assign(sel, np.where(drift, 140, 130) + kstar, jo_fitted, "Jo-VECM")
            granger_k = kstar

        # contemporaneous difference relation
        rest = both_rw & ~done
        if rest.any():
            b7_t = np.where(drift, eng.cache.model("8.00").t_values()[:, 1], eng.cache.model("7.00").t_values()[:, 0])
            b7_dof = np.where(drift, T - 2, T - 1)
            b7_sig = np.abs(b7_t) > _tcrit(ga, b7_dof)
            trace.append(("b7 t", b7_t, np.where(b7_sig, "reject b7=0", "accept b7=0"), rest, "reconstructed: difference relation"))
            assign_model(rest & b7_sig & np.isfinite(b7_t), np.where(drift, 80, 70))

        # Granger causality in differences
        rest = both_rw & ~done
        if rest.any():
            fits = {(fam, k): eng.cache.model(ModelId(fam, k)) for fam in (9, 10, 1, 2) for k in (1, 2)}
            if granger_k is None:
                fpe = np.stack([np.where(drift, criterion_values("FPEu", fits[(10, k)].rss, T, fits[(10, k)].c_count),
                                         criterion_values("FPEu", fits[(9, k)].rss, T, fits[(9, k)].c_count))
                                for k in (1, 2)], axis=-1)
                granger_k = np.argmin(fpe, axis=-1) + 1
            stat = np.full(R, np.nan)
            sig = np.zeros(R, bool)
            for dr, fam, base in ((False, 9, 1), (True, 10, 2)):
                for k in (1, 2):
                    sel = rest & (drift == dr) & (granger_k == k)
                    if not sel.any():
                        continue
                    fu = fits[(fam, k)]
                    if k == 1:
                        t_b8 = fu.t_values()[:, fu.column("dz1")]
                        stat[sel] = t_b8[sel]
                        sig[sel] = (np.abs(t_b8) > _tcrit(ga, T - fu.k))[sel]
                    else:
                        fr = fits[(base, k)]
                        with np.errstate(divide="ignore", invalid="ignore"):
                            F = ((fr.rss - fu.rss) / 2.0) / (fu.rss / (T - fu.k))
                        stat[sel] = F[sel]
                        sig[sel] = (stats.f.sf(F, 2, T - fu.k) < ga)[sel]
            trace.append(("Granger", stat, np.where(sig, "Granger-causal", "not Granger-causal"), rest, "reconstructed: Granger test (t if one lag, F if two)"))
            assign_model(rest & sig, np.where(drift, 100, 90) + granger_k)

    # -- stationary pair: level relation ------------------------------------
    if both_st.any():
        for tr in (False, True):
            sel_pair = both_st & (trend == tr)
            if not sel_pair.any():
                continue
            lv = eng.level(tr)
            branch_l = "reconstructed: level relation"
            explosive = lv["bg_coef"] >= 1.0
            strong = (lv["dw"] < lv["r2"]) & ~explosive
            bg_sig = lv["bg_p"] < ga
            use_co = strong & bg_sig
            ac_label = np.where(explosive, "explosive", np.where(strong, "strong", "weak"))
            trace.append(("Durbin-Watson", lv["dw"], ac_label, sel_pair, branch_l))
            trace.append(("Breusch-Godfrey LM", lv["bg_lm"], np.where(bg_sig, "autocorrelated", "no autocorrelation"), sel_pair, branch_l))
            co_bad = use_co & ~lv["co"].ok
            b6_t = np.where(use_co, lv["co_t"], lv["ols_t"])
            dof = np.where(use_co, lv["co_dof"], lv["ols_dof"])
            b6_sig = (np.abs(b6_t) > _tcrit(ga, dof)) & ~explosive & ~co_bad
            name_mask = sel_pair & ~explosive
            trace.append(("b6 t (Cochrane-Orcutt)", b6_t, np.where(b6_sig, "reject b6=0", "accept b6=0"), name_mask & use_co, branch_l))
            trace.append(("b6 t", b6_t, np.where(b6_sig, "reject b6=0", "accept b6=0"), name_mask & ~use_co, branch_l))
            fam = 120 if tr else 110
            ok_rows = sel_pair & b6_sig & lv["ok"]
            assign(ok_rows & use_co, fam, lv["co_fitted"], f"{fam // 10}.00 Cochrane-Orcutt")
            assign(ok_rows & ~use_co, fam, _fitted(d, lv["fit"]), f"{fam // 10}.00")

    # -- univariate model for Y ------------------------------------------------
    rest = ok & ~done
    if rest.any():
        fam = np.select([uy.kind == RW, uy.kind == RWD, uy.kind == SC], [1, 2, 3], 4)
        stationary = np.isin(uy.kind, (SC, TS))
        dof = T - (uy.k + np.where(uy.kind == TS, 3, 2))
        wn = stationary & (np.abs(uy.wn_stat) <= _tcrit(ga, dof))
        trace.append(("b3=-1 t", uy.wn_stat, np.where(wn, "white noise", "stationary"), rest & stationary, "reconstructed: white-noise test"))
        fam = np.where(wn, fam + 2, fam)
        assign_model(rest, fam * 10 + uy.k)

    # -- fallback -----------------------------------------------------------------
    bad = ~done | ~np.isfinite(fitted).all(axis=1)
    if bad.any():
        if tk is TrendKnowledge.NONE_KNOWN_ABSENT:
            fb = np.full(R, 10)
        elif tk is TrendKnowledge.KNOWN_PRESENT:
            fb = np.full(R, 20)
        else:
            fb = np.where(np.isin(uy.kind, (RWD, TS)), 20, 10)
        done[bad] = False
        assign_model(bad, fb)
        trace.append(("fallback", np.full(R, np.nan), np.full(R, "regression failure"), bad, "fallback"))
    return _Decision(code, fitted, route, trace, bad)


# ---------------------------------------------------------------------------
# single-sample API

def _as_2d(x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    return x[None, :]


def adf_test(x, det_case: str = "constant", k: int = 0, alpha: float = 0.05):
    """Augmented Dickey-Fuller test.

    Parameters
    ----------
    x : array_like
        Series; its first three values serve only as lags so every ``k`` uses
        the same ``len(x) - 3`` observations.
    det_case : {"constant", "constant_trend"}
    k : {0, 1, 2}
        Lagged differences.
    alpha : float
        Significance level (0.01, 0.05 or 0.10).

    Returns
    -------
    t_statistic : float
    reject_unit_root : bool

    Raises
    ------
    RankDeficiencyError
        For degenerate series (e.g. an exact linear trend).
    """
    det = {"constant": "c", "c": "c", "constant_trend": "ct", "ct": "ct"}[det_case]
    if k not in (0, 1, 2):
        raise ValueError("k must be 0, 1 or 2")
    x2 = _as_2d(x)
    T = x2.shape[1] - 3
    X, y, names = _adf_design(x2, 3, T, det, k)
    fit = ols_batch(X, y, roles=names)
    if not fit.ok[0]:
        col = int(fit.bad_column[0])
        raise RankDeficiencyError(col, names[col])
    stat = float(_level_t(fit)[0])
    crit = default_table().lookup("adf", det, alpha, T)
    return stat, bool(stat < crit)


def select_aug_lag(x, mode: str = "fpe_u_univariate", det_case: str = "constant") -> int:
    """Choose 0, 1 or 2 augmentation lags on a common estimation window.

    Parameters
    ----------
    x : array_like, shape (n,) or (n, 2)
        A series for ``fpe_u_univariate``; a pair of columns for
        ``multivariate_sic``.
    mode : {"fpe_u_univariate", "multivariate_sic"}
        Univariate FPEu over ADF regressions, or
        ``T ln det Σ + ln T * (free parameters)`` over VECM regressions with an
        unrestricted constant.
    det_case : {"constant", "constant_trend"}
        Deterministic terms of the univariate regressions.

    Returns
    -------
    int
        Ties go to the smaller lag.
    """
    x = np.asarray(x, dtype=float)
    if mode == "fpe_u_univariate":
        det = {"constant": "c", "constant_trend": "ct"}[det_case]
        x2 = _as_2d(x)
        return int(_adf_set(x2, 3, x2.shape[1] - 3, det).k_star[0])
    if mode == "multivariate_sic":
        if x.ndim != 2 or x.shape[1] != 2:
            raise ValueError("multivariate_sic needs an (n, 2) array")
        T = x.shape[0] - 3
        crit = []
        for k in (0, 1, 2):
            X, ys = _var_design(x, k, T)
            res = np.stack([ols_batch(X[None], y[None]).resid[0] for y in ys], axis=-1)
            cov = res.T @ res / T
            sign, logdet = np.linalg.slogdet(cov)
            crit.append(T * logdet + math.log(T) * 2 * X.shape[1] if sign > 0 else np.inf)
        return int(np.argmin(crit))
    raise ValueError(f"unknown mode {mode!r}")


def _var_design(x, k, T):
    dx = np.diff(x, axis=0, prepend=0.0)
    p = 3
    rows = slice(p, p + T)
    cols = [np.ones(T), x[p - 1:p - 1 + T, 0], x[p - 1:p - 1 + T, 1]]
    for j in range(1, k + 1):
        cols += [dx[p - j:p - j + T, 0], dx[p - j:p - j + T, 1]]
    return np.column_stack(cols), (dx[rows, 0], dx[rows, 1])


def univariate_status(x, trend_knowledge, profile: AlphaProfile) -> UnivariateStatus:
    """Unit-root and trend status of a series.

    Known absence of trends uses the constant-only ADF test, known presence
    the constant-and-trend test.  With unknown trends the unit root is
    tested with a trend; a stationary series is then classified by a t-test
    on the trend, a unit-root series by a t-test on the mean of its
    differences (drift).

    Parameters
    ----------
    x : array_like
        Series whose first three values are used only as lags.
    trend_knowledge : TrendKnowledge or str
    profile : AlphaProfile

    Returns
    -------
    UnivariateStatus
        Never a white-noise kind.
    """
    x2 = _as_2d(x)
    u = _univariate_batch(x2, 3, x2.shape[1] - 3, TrendKnowledge.coerce(trend_knowledge), profile)
    if not u.ok[0]:
        raise RankDeficiencyError(-1, "level")
    return UnivariateStatus(_KIND_CODES[int(u.kind[0])], int(u.k[0]))


def eg_cointegration_test(data: SeriesPair, drift: bool = False, alpha: float = 0.05):
    """Engle-Granger residual test.

    Stage one regresses Y on (1, Z) over the sample and the three preceding
    rows; stage two regresses ``Δε̂_t`` on ``(1, ε̂_{t-1})`` without
    augmentation and compares the slope t-ratio to the two-variable
    residual-based critical value.  All-zero residuals are reported as
    cointegrated.

    Parameters
    ----------
    data : SeriesPair
    drift : bool
        Recorded for symmetry with the Johansen test; the residual test
        always includes an intercept.
    alpha : float

    Returns
    -------
    cointegrated : bool
    stage1_residuals : ndarray, shape (T + 3,)
    """
    eng = TestingEngine(data, TrendKnowledge.UNKNOWN)
    eg = eng.eg_stage()
    if not eg["ok"][0]:
        raise RankDeficiencyError(1, "z")
    p, T = data.presample_len, data.sample_len
    c = eg["stage1"].coef[0]
    resid = data.y[p - 3:p + T] - c[0] - c[1] * data.z[p - 3:p + T]
    if eg["trivial"][0]:
        return True, resid
    crit = default_table().lookup("eg", "c", alpha, T)
    return bool(eg["tstat"][0] < crit), resid


def johansen_cointegration_test(data: SeriesPair, drift: bool = False, alpha: float = 0.05, k_star=None):
    """Johansen trace test of rank zero against rank at least one.

    Parameters
    ----------
    data : SeriesPair
    drift : bool
        Unrestricted constant if True, constant restricted to the
        cointegrating relation otherwise.
    alpha : float
    k_star : {1, 2}, optional
        Lagged differences; chosen by multivariate SIC when omitted.

    Returns
    -------
    cointegrated : bool
    fit : VecmFit
    """
    eng = TestingEngine(data, TrendKnowledge.UNKNOWN)
    k = int(eng.jo_lag()[0]) if k_star is None else int(k_star)
    fit = eng.jo_vecm(k, bool(drift)).take(0)
    crit = default_table().lookup("johansen_trace", "uc" if drift else "rc", alpha)
    return bool(fit.trace_statistic > crit), fit


def autocorrelation_check(fit) -> str:
    """Classify residual autocorrelation of a level regression.

    ``weak`` when the Durbin-Watson statistic is at least R² and the
    Breusch-Godfrey lagged-residual coefficient is below one, ``strong`` when
    DW < R² with that coefficient below one, ``explosive`` when it is one or
    more.  The Breusch-Godfrey regression is of ``e_t`` on the original
    regressors and ``e_{t-1}`` (with ``e_0 = 0``).

    Parameters
    ----------
    fit : RegressionFit
        Must carry its design and response.

    Returns
    -------
    {"weak", "strong", "explosive"}
    """
    e = np.asarray(fit.residuals, dtype=float)
    T = e.size
    if T < 3:
        raise ValueError("need at least three residuals")
    if fit.design is None or fit.response is None:
        raise ValueError("fit must carry its design and response")
    dw = float(np.sum(np.diff(e) ** 2) / np.sum(e**2))
    yv = np.asarray(fit.response, dtype=float)
    r2 = 1.0 - fit.rss / float(np.sum((yv - yv.mean()) ** 2))
    e_lag = np.concatenate([[0.0], e[:-1]])
    aux = ols_batch(np.column_stack([fit.design, e_lag])[None], e[None])
    coef = float(aux.coef[0, -1])
    if coef >= 1.0:
        return "explosive"
    return "strong" if dw < r2 else "weak"


def strategy_run(data: SeriesPair, variant: str, profile, trend_knowledge) -> StrategyResult:
    """Run a testing strategy on one sample.

    Parameters
    ----------
    data : SeriesPair
    variant : {"EG", "Jo"}
    profile : AlphaProfile or str
        A profile or one of the names ``-10%``, ``-5%``, ``-10/5``.
    trend_knowledge : TrendKnowledge or str

    Returns
    -------
    StrategyResult
    """
    if isinstance(profile, str):
        profile = AlphaProfile.named(profile)
    eng = TestingEngine(data, trend_knowledge)
    dec = eng.decide(variant, profile)
    chosen = dec.model(0)
    return StrategyResult(chosen, relation_of(chosen.family), _predictor_for(eng, dec, variant, 0),
                          dec.trace_for(0))


def _predictor_for(eng: TestingEngine, dec: _Decision, variant: str, i: int):
    route = dec.route[i]
    model = dec.model(i)
    if route == "Jo-VECM":
        return VecmPredictor(eng.jo_vecm(model.aug_lags, model.family == 14).take(i))
    if route == "EG-ECM":
        fit = eng.cache.model(model, ec=eng.eg_stage()["ec"], ec_key="eg")
        c = eng.eg_stage()["stage1"].coef[i]
        return LinearPredictor(model, fit.coef[i], coint=(c[0], c[1]))
    if isinstance(route, str) and route.endswith("Cochrane-Orcutt"):
        lv = eng.level(model.family == 12)
        return LinearPredictor(model, lv["co"].fit.coef[i])
    fit = eng.cache.model(model)
    coint = None
    if model.family in (13, 14):
        c = eng.cache.model("11.00").coef[i]
        coint = (c[0], c[1])
    return LinearPredictor(model, fit.coef[i], coint=coint)
