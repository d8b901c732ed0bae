"""Least squares estimation for the candidate models.

Every model is estimated on the same ``T`` sample rows with ``ΔY_t`` minus any
fixed-coefficient terms as the response, so residual sums of squares compare
across models.  Estimation is vectorised over replications: arrays carry a
leading replication axis ``R`` and single-sample helpers use ``R = 1``.

Least squares uses a Householder QR factorisation.  A design is rank
deficient when some ``|R_jj| <= max(T, k) * eps * max_i |R_ii|``; the first such
column is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dgp import SeriesBatch, SeriesPair
from .taxonomy import ModelSpec, get_model

__all__ = [
    "RankDeficiencyError",
    "ExplosiveResidualError",
    "RegressionFit",
    "BatchFit",
    "VecmFit",
    "Design",
    "least_squares",
    "ols_batch",
    "fit_model",
    "fit_spec_batch",
    "cointegrating_regression",
    "reduced_rank_vecm",
    "vecm_batch",
    "cochrane_orcutt",
    "cochrane_orcutt_batch",
]

_EPS = np.finfo(float).eps


class RankDeficiencyError(np.linalg.LinAlgError):
    """Design matrix is numerically rank deficient.

    Attributes
    ----------
    column : int
        Index of the first column found to be collinear with earlier ones.
    name : str or None
        Regressor role of that column, when known.
    """

    def __init__(self, column, name=None):
        self.column = column
        self.name = name
        label = f"column {column}" + (f" ({name})" if name else "")
        super().__init__(f"rank-deficient design: {label} is collinear with earlier columns")


class ExplosiveResidualError(ArithmeticError):
    """Residual autocorrelation estimate of absolute value one or more."""

    def __init__(self, rho):
        self.rho = rho
        super().__init__(f"residual AR(1) coefficient {rho:.4f} is explosive")


@dataclass(frozen=True)
class RegressionFit:
    """Result of one least-squares fit.

    Attributes
    ----------
    coefficients : ndarray, shape (k,)
    residuals : ndarray, shape (T,)
    rss : float
    t_obs : int
    c_count : int
        Estimated parameters counted by the information criteria.
    hat_diagonals : ndarray, shape (T,)
    coeff_covariance_scale : ndarray, shape (k, k)
        ``(X'X)^{-1}``.
    sigma2_unbiased : float
        ``rss / (t_obs - c_count)``.
    regressors : tuple of str
        Role names of the columns, when known.
    design : ndarray, shape (T, k), optional
    response : ndarray, shape (T,), optional
    """

    coefficients: np.ndarray
    residuals: np.ndarray
    rss: float
    t_obs: int
    c_count: int
    hat_diagonals: np.ndarray
    coeff_covariance_scale: np.ndarray
    sigma2_unbiased: float
    regressors: tuple = ()
    design: np.ndarray = None
    response: np.ndarray = None

    @property
    def n_regressors(self) -> int:
        return self.coefficients.size

    @property
    def std_errors(self) -> np.ndarray:
        """OLS standard errors using ``rss / (T - k)``."""
        dof = self.t_obs - self.n_regressors
        s2 = self.rss / dof if dof > 0 else np.nan
        return np.sqrt(s2 * np.diag(self.coeff_covariance_scale))

    @property
    def t_values(self) -> np.ndarray:
        return self.coefficients / self.std_errors

    def coefficient(self, role: str) -> float:
        return float(self.coefficients[self.regressors.index(role)])


@dataclass
class BatchFit:
    """Least-squares results for ``R`` replications of the same design.

    Replications whose design was rank deficient have ``ok`` False and NaN
    entries everywhere else.
    """

    coef: np.ndarray
    resid: np.ndarray
    rss: np.ndarray
    hat: np.ndarray
    xtx_inv: np.ndarray
    ok: np.ndarray
    t_obs: int
    c_count: int
    roles: tuple = ()
    bad_column: np.ndarray = None
    X: np.ndarray = None
    y: np.ndarray = None

    @property
    def k(self) -> int:
        return self.coef.shape[1]

    def std_errors(self) -> np.ndarray:
        dof = self.t_obs - self.k
        s2 = self.rss / dof
        return np.sqrt(s2[:, None] * np.diagonal(self.xtx_inv, axis1=1, axis2=2))

    def t_values(self, null=None) -> np.ndarray:
        coef = self.coef if null is None else self.coef - null
        with np.errstate(invalid="ignore", divide="ignore"):
            return coef / self.std_errors()

    def column(self, role: str) -> int:
        return self.roles.index(role)

    def take(self, i: int) -> RegressionFit:
        if not self.ok[i]:
            col = int(self.bad_column[i]) if self.bad_column is not None else -1
            name = self.roles[col] if 0 <= col < len(self.roles) else None
            raise RankDeficiencyError(col, name)
        return RegressionFit(
            coefficients=self.coef[i].copy(),
            residuals=self.resid[i].copy(),
            rss=float(self.rss[i]),
            t_obs=self.t_obs,
            c_count=self.c_count,
            hat_diagonals=self.hat[i].copy(),
            coeff_covariance_scale=self.xtx_inv[i].copy(),
            sigma2_unbiased=float(self.rss[i]) / (self.t_obs - self.c_count),
            regressors=tuple(self.roles),
            design=None if self.X is None else np.array(self.X[i]),
            response=None if self.y is None else np.array(self.y[i]),
        )


def ols_batch(X, y, c_count=None, roles=()) -> BatchFit:
    """Least squares for a stack of designs.

    Parameters
    ----------
    X : array_like, shape (R, T, k) or (T, k)
    y : array_like, shape (R, T)
    c_count : int, optional
        Defaults to ``k``.
    roles : sequence of str, optional

    Returns
    -------
    BatchFit
    """
    y = np.asarray(y, dtype=float)
    R, T = y.shape
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = np.broadcast_to(X, (R,) + X.shape)
    k = X.shape[2]
    if T <= k:
        raise ValueError(f"need more observations ({T}) than regressors ({k})")
    c_count = k if c_count is None else c_count
    if k == 0:
        rss = np.einsum("rt,rt->r", y, y)
        return BatchFit(np.zeros((R, 0)), y.copy(), rss, np.zeros((R, T)), np.zeros((R, 0, 0)),
                        np.ones(R, bool), T, c_count, tuple(roles), np.full(R, -1), X, y)
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
    tol = max(T, k) * _EPS * diag.max(axis=1, keepdims=True)
    small = diag <= tol
    ok = ~small.any(axis=1) & np.isfinite(diag).all(axis=1)
    bad_column = np.where(ok, -1, np.argmax(small, axis=1))
    # keep the solve well posed for failed rows, then blank them
    r_safe = np.where(ok[:, None, None], r, np.eye(k))
    qty = np.einsum("rtk,rt->rk", q, y)
    coef = np.linalg.solve(r_safe, qty[..., None])[..., 0]
    r_inv = np.linalg.solve(r_safe, np.broadcast_to(np.eye(k), r_safe.shape))
    xtx_inv = r_inv @ np.swapaxes(r_inv, 1, 2)
    fitted = np.einsum("rtk,rk->rt", X, coef)
    resid = y - fitted
    rss = np.einsum("rt,rt->r", resid, resid)
    hat = np.einsum("rtk,rtk->rt", q, q)
    if not ok.all():
        bad = ~ok
        coef[bad] = np.nan
        resid[bad] = np.nan
        rss[bad] = np.nan
        hat[bad] = np.nan
        xtx_inv[bad] = np.nan
    return BatchFit(coef, resid, rss, hat, xtx_inv, ok, T, c_count, tuple(roles), bad_column, X, y)


def least_squares(regressors, response, c_count=None, names=()) -> RegressionFit:
    """Ordinary least squares for a single sample.

    Parameters
    ----------
    regressors : array_like, shape (T, k)
        ``k = 0`` is allowed and leaves the response as the residual.
    response : array_like, shape (T,)
    c_count : int, optional
        Parameter count for information criteria, default ``k``.
    names : sequence of str, optional
        Column labels, used in error messages.

    Returns
    -------
    RegressionFit

    Raises
    ------
    RankDeficiencyError
        If the regressors are numerically collinear.

    Examples
    --------
    >>> fit = least_squares(np.ones((3, 1)), [1.0, 2.0, 3.0])
    >>> float(fit.coefficients[0]), float(fit.rss)
    (2.0, 2.0)
    """
    y = np.asarray(response, dtype=float)
    X = np.asarray(regressors, dtype=float).reshape(y.size, -1)
    return ols_batch(X[None], y[None], c_count=c_count, roles=tuple(names)).take(0)


class Design:
    """Regressor columns for the sample rows of a batch.

    Parameters
    ----------
    data : SeriesBatch or SeriesPair

    Attributes
    ----------
    dy : ndarray, shape (R, T)
        The response ``ΔY_t``.
    level_y : ndarray, shape (R, T)
        ``Y_t``.
    """

    def __init__(self, data):
        if isinstance(data, SeriesPair):
            data = data.as_batch()
        self.data = data
        p, T = data.presample_len, data.sample_len
        self.T = T
        self.R = data.reps
        y, z = data.y, data.z
        dy = np.diff(y, axis=1)
        dz = np.diff(z, axis=1)
        # dy[:, i] = y[:, i+1] - y[:, i]

        def d_lag(d, k):
            return d[:, p - 1 - k:p - 1 - k + T]

        def lvl(a, k):
            return a[:, p - k:p - k + T]

        self.dy = d_lag(dy, 0)
        self.level_y = lvl(y, 0)
        self._cols = {
            "intercept": np.ones(T),
            "trend": data.trend,
            "y_lag": lvl(y, 1),
            "dy1": d_lag(dy, 1),
            "dy2": d_lag(dy, 2),
            "z": lvl(z, 0),
            "z_lag": lvl(z, 1),
            "dz": d_lag(dz, 0),
            "dz1": d_lag(dz, 1),
            "dz2": d_lag(dz, 2),
        }

    def column(self, role: str, ec=None) -> np.ndarray:
        if role == "ec":
            if ec is None:
                raise ValueError("an error-correction regressor is required")
            return np.asarray(ec, dtype=float)
        return self._cols[role]

    def matrix(self, roles, ec=None) -> np.ndarray:
        """Stack columns into shape (R, T, k)."""
        if not roles:
            return np.zeros((self.R, self.T, 0))
        cols = [np.broadcast_to(self.column(r, ec), (self.R, self.T)) for r in roles]
        return np.stack(cols, axis=-1)

    def response(self, spec: ModelSpec) -> np.ndarray:
        """``ΔY_t`` minus the model's fixed-coefficient terms."""
        out = self.dy
        for role, value in spec.fixed_terms:
            out = out - value * self.column(role)
        return out

    def ec_from(self, c1, c2) -> np.ndarray:
        """``Y_{t-1} - c1 - c2 Z_{t-1}`` for per-replication constants."""
        c1 = np.asarray(c1, dtype=float).reshape(-1, 1)
        c2 = np.asarray(c2, dtype=float).reshape(-1, 1)
        return self._cols["y_lag"] - c1 - c2 * self._cols["z_lag"]


def cointegrating_regression(data, extra_presample: int = 0) -> BatchFit:
    """Regress ``Y_t`` on ``(1, Z_t)``.

    Parameters
    ----------
    data : SeriesBatch or SeriesPair
    extra_presample : int, default 0
        Number of presample rows added in front of the ``T`` sample rows.

    Returns
    -------
    BatchFit
        Coefficients ``(c1, c2)`` per replication.
    """
    if isinstance(data, SeriesPair):
        data = data.as_batch()
    p, T = data.presample_len, data.sample_len
    if extra_presample > p:
        raise ValueError("not enough presample rows")
    rows = slice(p - extra_presample, p + T)
    z = data.z[:, rows]
    X = np.stack([np.ones_like(z), z], axis=-1)
    return ols_batch(X, data.y[:, rows], roles=("intercept", "z"))


def _coint_source_ec(design: Design, source: str) -> np.ndarray:
    if source == "model_11_00":
        fit = cointegrating_regression(design.data, 0)
    elif source == "engle_granger_stage1":
        fit = cointegrating_regression(design.data, 3)
    else:
        raise ValueError(f"unknown cointegration source {source!r}")
    return design.ec_from(fit.coef[:, 0], fit.coef[:, 1]), fit.ok


def fit_spec_batch(spec: ModelSpec, design: Design, ec=None) -> BatchFit:
    """Estimate one model on every replication of a design."""
    X = design.matrix(spec.free_coeffs, ec)
    return ols_batch(X, design.response(spec), c_count=spec.c_count, roles=spec.free_coeffs)


def fit_model(model, data, coint_source: str = "model_11_00") -> RegressionFit:
    """Estimate a candidate model on one sample.

    Parameters
    ----------
    model : ModelSpec, ModelId or str
    data : SeriesPair
    coint_source : {"model_11_00", "engle_granger_stage1"}
        Source of the cointegrating vector for families 13/14.  The first uses
        the sample-only regression of Y on (1, Z); the second adds the three
        preceding presample rows.

    Returns
    -------
    RegressionFit
        Response is ``ΔY_t`` minus fixed terms; ``c_count`` includes c1, c2
        for error-correction models.
    """
    spec = get_model(model)
    design = Design(data)
    ec = None
    if spec.has_cointegration:
        ec, ok = _coint_source_ec(design, coint_source)
        if not ok[0]:
            raise RankDeficiencyError(1, "z")
    return fit_spec_batch(spec, design, ec).take(0)


@dataclass(frozen=True)
class VecmFit:
    """Rank-one error correction model from reduced-rank regression.

    Attributes
    ----------
    alpha : ndarray, shape (2,)
        Loadings.
    beta_rho : ndarray, shape (2,) or (3,)
        Cointegrating vector on ``(Y_{t-1}, Z_{t-1})``, followed by the
        restricted constant ``ρ`` when there is no drift.  The Y entry is 1.
    gammas : list of ndarray, shape (2, 2)
        Short-run matrices on ``ΔX_{t-1}, ..., ΔX_{t-k}``.
    phi : ndarray, shape (2,) or None
        Unrestricted constant when there is drift.
    k_star : int
    trace_statistic : float
        ``-T Σ ln(1 - λ_i)`` over both nonzero eigenvalues.
    eigenvalues : ndarray
        Descending, in [0, 1).
    """

    alpha: np.ndarray
    beta_rho: np.ndarray
    gammas: list
    phi: np.ndarray
    k_star: int
    trace_statistic: float
    eigenvalues: np.ndarray

    @property
    def drift(self) -> bool:
        return self.phi is not None

    def predict(self, data) -> np.ndarray:
        """Fitted ``E[ΔX_t]`` over the sample rows, shape (T, 2)."""
        blocks = _vecm_blocks(data if isinstance(data, SeriesBatch) else data.as_batch(),
                              self.k_star, self.drift)
        z1, z2 = blocks[1][0], blocks[2][0]
        out = z1 @ (np.outer(self.alpha, self.beta_rho)).T
        short = [] if self.phi is None else [self.phi[:, None]]
        short += list(self.gammas)
        if short:
            out = out + z2 @ np.concatenate(short, axis=1).T
        return out


def _vecm_blocks(data: SeriesBatch, k: int, drift: bool):
    p, T = data.presample_len, data.sample_len
    x = np.stack([data.y, data.z], axis=-1)
    dx = np.diff(x, axis=1)
    z0 = dx[:, p - 1:p - 1 + T]
    xlag = x[:, p - 1:p - 1 + T]
    lags = [dx[:, p - 1 - j:p - 1 - j + T] for j in range(1, k + 1)]
    ones = np.ones((data.reps, T, 1))
    if drift:
        z1 = xlag
        z2 = np.concatenate([ones] + lags, axis=-1)
    else:
        z1 = np.concatenate([xlag, ones], axis=-1)
        z2 = np.concatenate(lags, axis=-1) if lags else np.zeros((data.reps, T, 0))
    return z0, z1, z2


def _partial_out(a, omega):
    """Residuals and coefficients of regressing ``a`` on ``omega`` (batched)."""
    if omega.shape[-1] == 0:
        return a, np.zeros(a.shape[:1] + (0, a.shape[-1]))
    gram = np.swapaxes(omega, 1, 2) @ omega
    cross = np.swapaxes(omega, 1, 2) @ a
    try:
        coef = np.linalg.solve(gram, cross)
    except np.linalg.LinAlgError:
        coef = np.linalg.pinv(gram) @ cross
    return a - omega @ coef, coef


@dataclass
class VecmBatch:
    """Reduced-rank regression results for ``R`` replications."""

    alpha: np.ndarray
    beta_rho: np.ndarray
    short_run: np.ndarray
    trace: np.ndarray
    eigenvalues: np.ndarray
    fitted: np.ndarray
    ok: np.ndarray
    k_star: int
    drift: bool

    def take(self, i: int) -> VecmFit:
        if not self.ok[i]:
            raise np.linalg.LinAlgError("singular moment matrices in reduced-rank regression")
        sr = self.short_run[i]
        phi = None
        if self.drift:
            phi, sr = sr[:, 0].copy(), sr[:, 1:]
        gammas = [sr[:, 2 * j:2 * j + 2].copy() for j in range(self.k_star)]
        return VecmFit(self.alpha[i].copy(), self.beta_rho[i].copy(), gammas, phi, self.k_star,
                       float(self.trace[i]), self.eigenvalues[i].copy())


def vecm_batch(data: SeriesBatch, k_star: int, drift: bool) -> VecmBatch:
    """Johansen reduced-rank regression, vectorised over replications.

    See :func:`reduced_rank_vecm` for the model.  Replications whose moment
    matrices are singular get ``ok`` False.
    """
    if k_star not in (0, 1, 2):
        raise ValueError("k_star must be 0, 1 or 2")
    z0, z1, z2 = _vecm_blocks(data, k_star, drift)
    R, T = z0.shape[:2]
    ok = np.ones(R, bool)
    r0, _ = _partial_out(z0, z2)
    r1, _ = _partial_out(z1, z2)
    s00 = np.swapaxes(r0, 1, 2) @ r0 / T
    s11 = np.swapaxes(r1, 1, 2) @ r1 / T
    s01 = np.swapaxes(r0, 1, 2) @ r1 / T
    m = s11.shape[-1]
    # whiten with Cholesky factors; failures flag the replication
    eye = np.eye(m)
    good = np.all(np.isfinite(s11), axis=(1, 2)) & np.all(np.isfinite(s00), axis=(1, 2))
    eig00 = np.linalg.eigvalsh(np.where(good[:, None, None], s00, np.eye(2)))
    eig11 = np.linalg.eigvalsh(np.where(good[:, None, None], s11, eye))
    good &= (eig00[:, 0] > 1e-12 * np.maximum(eig00[:, -1], 1e-300))
    good &= (eig11[:, 0] > 1e-12 * np.maximum(eig11[:, -1], 1e-300))
    ok &= good
    s00 = np.where(ok[:, None, None], s00, np.eye(2))
    s11 = np.where(ok[:, None, None], s11, eye)
    s01 = np.where(ok[:, None, None], s01, 0.0)
    chol = np.linalg.cholesky(s11)
    linv = np.linalg.inv(chol)
    mat = linv @ np.swapaxes(s01, 1, 2) @ np.linalg.solve(s00, s01) @ np.swapaxes(linv, 1, 2)
    mat = 0.5 * (mat + np.swapaxes(mat, 1, 2))
    lam, w = np.linalg.eigh(mat)
    lam = lam[:, ::-1]
    w = w[:, :, ::-1]
    lam = np.clip(lam, 0.0, None)
    ok &= lam[:, 0] < 1.0
    v = np.swapaxes(linv, 1, 2) @ w[:, :, :1]
    v = v[:, :, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = v / v[:, :1]
    ok &= np.isfinite(beta).all(axis=1)
    beta = np.where(ok[:, None], beta, 0.0)
    # alpha = S01 β (β' S11 β)^{-1}
    denom = np.einsum("ri,rij,rj->r", beta, s11, beta)
    denom = np.where(ok, denom, 1.0)
    alpha = np.einsum("rij,rj->ri", s01, beta) / denom[:, None]
    lam2 = np.where(ok[:, None], lam[:, :2], 0.0)
    trace = -T * np.log1p(-lam2).sum(axis=1)
    # short-run coefficients from ΔX_t - αβ'Z1_t on the Ω block
    pi_z1 = np.einsum("ri,rtj,rj->rti", alpha, z1, beta)
    if z2.shape[-1]:
        gram = np.swapaxes(z2, 1, 2) @ z2
        cross = np.swapaxes(z2, 1, 2) @ (z0 - pi_z1)
        try:
            short = np.swapaxes(np.linalg.solve(gram, cross), 1, 2)
        except np.linalg.LinAlgError:
            short = np.swapaxes(np.linalg.pinv(gram) @ cross, 1, 2)
        fitted = pi_z1 + z2 @ np.swapaxes(short, 1, 2)
    else:
        short = np.zeros((R, 2, 0))
        fitted = pi_z1
    trace = np.where(ok, trace, np.nan)
    fitted = np.where(ok[:, None, None], fitted, np.nan)
    return VecmBatch(alpha, beta, short, trace, lam, fitted, ok, k_star, drift)


def reduced_rank_vecm(data, k_star: int, drift: bool) -> VecmFit:
    """Estimate a rank-one VECM by reduced-rank regression.

    Model: ``ΔX_t = α β' Z1_t + Σ_j Γ_j ΔX_{t-j} (+ Φ) + e_t``.  Without
    drift ``Z1_t = (Y_{t-1}, Z_{t-1}, 1)`` so the constant sits inside the
    cointegrating relation; with drift ``Z1_t = (Y_{t-1}, Z_{t-1})`` and an
    unrestricted constant ``Φ`` enters the short-run block.

    Parameters
    ----------
    data : SeriesPair or SeriesBatch with one replication
    k_star : {0, 1, 2}
        Lagged differences.
    drift : bool

    Returns
    -------
    VecmFit

    Raises
    ------
    numpy.linalg.LinAlgError
        If the moment matrices are singular.
    """
    batch = data.as_batch() if isinstance(data, SeriesPair) else data
    return vecm_batch(batch, k_star, drift).take(0)


@dataclass
class CochraneOrcuttBatch:
    """Two-step Cochrane-Orcutt results; ``fit`` is on ``T - 1`` transformed rows."""

    rho: np.ndarray
    fit: BatchFit
    ok: np.ndarray


def cochrane_orcutt_batch(spec: ModelSpec, design: Design, ols: BatchFit = None, ec=None):
    """Vectorised two-step Cochrane-Orcutt; explosive ``ρ̂`` marks ``ok`` False."""
    y = design.response(spec)
    X = design.matrix(spec.free_coeffs, ec)
    if ols is None:
        ols = ols_batch(X, y, c_count=spec.c_count, roles=spec.free_coeffs)
    e = ols.resid
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.einsum("rt,rt->r", e[:, 1:], e[:, :-1]) / np.einsum("rt,rt->r", e[:, :-1], e[:, :-1])
    ok = ols.ok & np.isfinite(rho) & (np.abs(rho) < 1.0)
    rho_safe = np.where(ok, rho, 0.0)
    ys = y[:, 1:] - rho_safe[:, None] * y[:, :-1]
    Xb = np.broadcast_to(X, (design.R,) + X.shape[1:])
    Xs = Xb[:, 1:] - rho_safe[:, None, None] * Xb[:, :-1]
    fit = ols_batch(Xs, ys, c_count=spec.c_count, roles=spec.free_coeffs)
    ok &= fit.ok
    return CochraneOrcuttBatch(rho, fit, ok)


def cochrane_orcutt(model, data) -> RegressionFit:
    """Two-step Cochrane-Orcutt re-estimation of a model.

    The OLS residuals give ``ρ̂ = Σ e_t e_{t-1} / Σ e_{t-1}^2``.  Response and
    regressors are quasi-differenced, ``w_t - ρ̂ w_{t-1}``, the first row is
    dropped and least squares is applied once more.

    Parameters
    ----------
    model : ModelSpec, ModelId or str
    data : SeriesPair

    Returns
    -------
    RegressionFit
        Fit of the transformed regression on ``T - 1`` rows.

    Raises
    ------
    ExplosiveResidualError
        If ``|ρ̂| >= 1``.
    """
    spec = get_model(model)
    design = Design(data)
    ec = None
    if spec.has_cointegration:
        ec, _ = _coint_source_ec(design, "model_11_00")
    ols = fit_spec_batch(spec, design, ec)
    ols.take(0)  # raises on a rank-deficient design
    res = cochrane_orcutt_batch(spec, design, ols=ols, ec=ec)
    rho = float(res.rho[0])
    if not (np.isfinite(rho) and abs(rho) < 1.0):
        raise ExplosiveResidualError(rho)
    return res.fit.take(0)
