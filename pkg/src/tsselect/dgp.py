"""Data generating processes for (Y, Z) pairs.

``Y`` follows

    ΔY_t = b1 + b2 t + b3 Y_{t-1} + b4 ΔY_{t-1} + b5 ΔY_{t-2} + b6 Z_t + b7 ΔZ_t
           + b8 ΔZ_{t-1} + b9 ΔZ_{t-2} + b10 (Y_{t-1} - c1 - c2 Z_{t-1}) + u_t

and ``Z_t = m1 + m2 t + m3 Z_{t-1} + e_t``.  Both are simulated jointly as a
bivariate VAR(3) in levels, ``X_t = ψ D_t + M1 X_{t-1} + M2 X_{t-2} + M3 X_{t-3}
+ S (u_t, e_t)'`` with ``D_t = (1, t)'``.

Random numbers
--------------
Replication ``r`` of cell ``c`` under master seed ``s`` draws from a Philox4x64
counter generator keyed by ``SeedSequence(s, spawn_key=(c,)).generate_state(2,
uint64)`` with its counter set to ``(0, 0, r, 0)``.  Raw 64-bit words ``w`` map to
uniforms ``((w >> 11) + 0.5) / 2**53`` and then to standard normals through the
inverse normal CDF.  The first ``n`` normals are ``u_1..u_n`` and the next ``n``
are ``e_1..e_n`` where ``n = presample + T``.  A replication's shocks therefore
depend only on ``(s, c, r)``, never on how replications are scheduled.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtri

from .taxonomy import (
    TrendKnowledge,
    ZProcessKind,
    list_models,
    z_process_kind,
)

__all__ = [
    "DgpParams",
    "InvalidParamsError",
    "VarCoefficients",
    "SeriesPair",
    "SeriesBatch",
    "to_var",
    "replication_normals",
    "simulate",
    "simulate_batch",
    "conditional_mean_dy",
    "enumerate_permutations",
    "permutation_counts",
    "PARAM_GRID",
    "Z_PROCESSES",
]

PARAM_NAMES = ("b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8", "b9", "b10", "c1", "c2", "m1", "m2", "m3")
SENTINEL_SMALL = 0.00001
SENTINEL_UNIT = -0.99999
_SENTINEL_NOMINAL = {"b1": 0.0, "c1": 0.0, "b10": -1.0}


class InvalidParamsError(ValueError):
    """Raised for parameter vectors outside the supported region."""


@dataclass(frozen=True)
class DgpParams:
    """True-process parameters ``θ``.

    Parameters
    ----------
    b1, ..., b10 : float
        Coefficients of the ΔY equation.
    c1, c2 : float
        Cointegrating-vector constants.
    m1, m2, m3 : float
        Coefficients of the Z equation.
    sentinels : frozenset of str
        Names among ``b1``, ``c1``, ``b10`` whose stored value is a numerical
        stand-in.  ``b1`` and ``c1`` then count as zero and ``b10`` as -1 when
        the vector is classified.

    Raises
    ------
    InvalidParamsError
        If ``b3`` or ``b10`` lie outside [-1, 0], ``m3`` outside (0, 1],
        ``b4 + b5 >= 1`` or the cointegration constants are inconsistent with
        ``b10``.
    """

    b1: float = 0.0
    b2: float = 0.0
    b3: float = 0.0
    b4: float = 0.0
    b5: float = 0.0
    b6: float = 0.0
    b7: float = 0.0
    b8: float = 0.0
    b9: float = 0.0
    b10: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    m1: float = 0.0
    m2: float = 0.0
    m3: float = 1.0
    sentinels: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "sentinels", frozenset(self.sentinels))
        for name in PARAM_NAMES:
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise InvalidParamsError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        bad = self.sentinels - set(_SENTINEL_NOMINAL)
        if bad:
            raise InvalidParamsError(f"unsupported sentinel flags {sorted(bad)}")
        if not -1.0 <= self.b3 <= 0.0:
            raise InvalidParamsError(f"b3={self.b3} outside [-1, 0]")
        if not -1.0 <= self.b10 <= 0.0:
            raise InvalidParamsError(f"b10={self.b10} outside [-1, 0]")
        if not 0.0 < self.m3 <= 1.0:
            raise InvalidParamsError(f"m3={self.m3} outside (0, 1]")
        if self.b4 + self.b5 >= 1.0:
            raise InvalidParamsError("b4 + b5 must be below 1")
        if self.b10 == 0.0 and (self.c1 != 0.0 or self.c2 != 0.0):
            raise InvalidParamsError("c1 and c2 must be zero when b10 is zero")
        if self.b10 != 0.0 and self.c2 == 0.0:
            raise InvalidParamsError("c2 must be nonzero when b10 is nonzero")

    def nominal(self, name: str) -> float:
        """Value used for classification, honouring sentinel flags."""
        if name in self.sentinels:
            return _SENTINEL_NOMINAL[name]
        return getattr(self, name)

    @property
    def b(self) -> np.ndarray:
        """``(b1, ..., b10)`` as an array."""
        return np.array([getattr(self, f"b{i}") for i in range(1, 11)])

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def with_values(self, **changes) -> "DgpParams":
        """Copy with some values replaced; sentinel flags on replaced names are dropped."""
        keep = self.sentinels - set(changes)
        return replace(self, sentinels=keep, **changes)

    @property
    def z_kind(self):
        return z_process_kind(self.m1, self.m2, self.m3)


@dataclass(frozen=True)
class VarCoefficients:
    """Coefficients of the levels VAR(3) for ``X_t = (Y_t, Z_t)'``."""

    psi: np.ndarray
    M1: np.ndarray
    M2: np.ndarray
    M3: np.ndarray
    shock_transform: np.ndarray

    @property
    def lags(self):
        return (self.M1, self.M2, self.M3)


def _var_from_structural(theta: DgpParams) -> VarCoefficients:
    # contemporaneous Z_t enters the Y row through N0
    b = theta
    nd = np.array([[b.b1 - b.b10 * b.c1, b.b2], [b.m1, b.m2]])
    n0 = np.array([[0.0, b.b6 + b.b7], [0.0, 0.0]])
    n1 = np.array([[1.0 + b.b3 + b.b4 + b.b10, -b.b7 + b.b8 - b.b10 * b.c2], [0.0, b.m3]])
    n2 = np.array([[b.b5 - b.b4, b.b9 - b.b8], [0.0, 0.0]])
    n3 = np.array([[-b.b5, -b.b9], [0.0, 0.0]])
    inv = np.linalg.inv(np.eye(2) - n0)
    return VarCoefficients(psi=inv @ nd, M1=inv @ n1, M2=inv @ n2, M3=inv @ n3, shock_transform=inv)


def _var_from_vecm(theta: DgpParams) -> VarCoefficients:
    b = theta
    phi = np.array([[b.b1, b.b2], [b.m1, b.m2]])
    alpha = np.array([[b.b10, 0.0], [0.0, 1.0]])
    # rows of beta' act on X_{t-1}; rho' on D_t. The Z row loads on (m3 - 1).
    beta_t = np.array([[1.0, -b.c2], [0.0, b.m3 - 1.0]])
    rho_t = np.array([[-b.c1, 0.0], [0.0, 0.0]])
    gamma1 = np.array([[b.b4, b.b8], [0.0, 0.0]])
    gamma2 = np.array([[b.b5, b.b9], [0.0, 0.0]])
    eye = np.eye(2)
    return VarCoefficients(
        psi=phi + alpha @ rho_t,
        M1=eye + alpha @ beta_t + gamma1,
        M2=gamma2 - gamma1,
        M3=-gamma2,
        shock_transform=eye,
    )


def to_var(theta: DgpParams) -> VarCoefficients:
    """Convert ``θ`` to levels-VAR form.

    Error-correction processes without level or contemporaneous terms
    (``b10 != 0`` and ``b3 = b6 = b7 = 0``) use the VECM construction
    ``ψ = Φ + αρ'``, ``M1 = I + αβ' + Γ1``, ``M2 = Γ2 - Γ1``, ``M3 = -Γ2``.
    Everything else solves out the contemporaneous ``Z_t`` term:
    ``ψ = (I - N0)^{-1} N_D`` and ``M_i = (I - N0)^{-1} N_i``.
    """
    if not isinstance(theta, DgpParams):
        raise InvalidParamsError("theta must be a DgpParams instance")
    if theta.b10 != 0.0 and theta.b3 == theta.b6 == theta.b7 == 0.0:
        return _var_from_vecm(theta)
    return _var_from_structural(theta)


def _philox_key(seed: int, cell: int) -> np.ndarray:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(cell),))
    return ss.generate_state(2, dtype=np.uint64)


def replication_normals(seed: int, cell: int, replications, n: int) -> np.ndarray:
    """Standard normal draws for a set of replications.

    Parameters
    ----------
    seed : int
        Master seed.
    cell : int
        Index of the parameter cell (e.g. permutation index).
    replications : int or iterable of int
        Replication indices, or a count meaning ``range(count)``.
    n : int
        Observations per series.

    Returns
    -------
    ndarray, shape (len(replications), 2, n)
        ``[:, 0]`` holds ``u`` and ``[:, 1]`` holds ``e``.
    """
    if np.isscalar(replications):
        replications = range(int(replications))
    reps = list(replications)
    key = _philox_key(seed, cell)
    raw = np.empty((len(reps), 2 * n), dtype=np.uint64)
    for i, r in enumerate(reps):
        gen = np.random.Philox(key=key, counter=np.array([0, 0, r, 0], dtype=np.uint64))
        raw[i] = gen.random_raw(2 * n)
    uniform = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(uniform).reshape(len(reps), 2, n)


@dataclass(frozen=True)
class SeriesPair:
    """One simulated or loaded sample.

    Attributes
    ----------
    y, z : ndarray, shape (presample_len + sample_len,)
    presample_len : int
    sample_len : int
        Estimation sample size ``T``.
    shocks : tuple of ndarray or None
        ``(u, e)`` draws used to build the series.
    seed : int or None
    cell, replication : int
        Substream indices used with ``seed``.
    """

    y: np.ndarray
    z: np.ndarray
    presample_len: int
    sample_len: int
    shocks: tuple = None
    seed: int = None
    cell: int = 0
    replication: int = 0

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        z = np.asarray(self.z, dtype=float)
        if y.shape != z.shape or y.ndim != 1:
            raise ValueError("y and z must be 1-d arrays of equal length")
        if self.presample_len < 3:
            raise ValueError("at least three presample observations are needed for lags")
        if y.size != self.presample_len + self.sample_len:
            raise ValueError("series length must equal presample_len + sample_len")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    def as_batch(self) -> "SeriesBatch":
        return SeriesBatch(self.y[None, :], self.z[None, :], self.presample_len, self.sample_len)

    def to_csv(self, path) -> None:
        """Write ``y,z,presample`` rows, presample rows flagged with 1."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["y", "z", "presample"])
            for i, (yv, zv) in enumerate(zip(self.y, self.z)):
                writer.writerow([repr(float(yv)), repr(float(zv)), int(i < self.presample_len)])

    @classmethod
    def from_csv(cls, path, presample_len: int = 3) -> "SeriesPair":
        """Read a ``y,z`` CSV; an optional ``presample`` column overrides ``presample_len``."""
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
        # keep physical line numbers for error messages
        rows = [(i, r) for i, line in enumerate(lines, start=1)
                if line.strip() and not line.startswith("#")
                for r in csv.reader([line])]
        if not rows:
            raise ValueError(f"{path}: empty file")
        header = [h.strip().lower() for h in rows[0][1]]
        if header[:2] != ["y", "z"]:
            raise ValueError(f"{path}:{rows[0][0]}: header must start with y,z")
        y, z, flags = [], [], []
        for lineno, row in rows[1:]:
            try:
                y.append(float(row[0]))
                z.append(float(row[1]))
                flags.append(int(row[2]) if len(header) > 2 and len(row) > 2 else 0)
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from exc
        if not np.all(np.isfinite(y + z)):
            raise ValueError(f"{path}: non-finite values")
        if "presample" in header:
            presample_len = int(sum(flags))
        n = len(y)
        return cls(np.array(y), np.array(z), presample_len, n - presample_len)


@dataclass(frozen=True)
class SeriesBatch:
    """Many replications of a sample stacked along the first axis.

    Attributes
    ----------
    y, z : ndarray, shape (R, presample_len + sample_len)
    presample_len, sample_len : int
    """

    y: np.ndarray
    z: np.ndarray
    presample_len: int
    sample_len: int

    @property
    def reps(self) -> int:
        return self.y.shape[0]

    @property
    def trend(self) -> np.ndarray:
        """Time index ``t`` of the sample rows (first array element has t = 1)."""
        return np.arange(self.presample_len + 1, self.presample_len + self.sample_len + 1, dtype=float)

    def pair(self, i: int) -> SeriesPair:
        return SeriesPair(self.y[i], self.z[i], self.presample_len, self.sample_len)

    def subset(self, idx) -> "SeriesBatch":
        return SeriesBatch(self.y[idx], self.z[idx], self.presample_len, self.sample_len)


def _recurse(var: VarCoefficients, u: np.ndarray, e: np.ndarray) -> tuple:
    reps, n = u.shape
    shocks = np.stack([u, e], axis=-1) @ var.shock_transform.T
    x = np.zeros((reps, n + 3, 2))
    psi0, psi1 = var.psi[:, 0], var.psi[:, 1]
    m1t, m2t, m3t = var.M1.T, var.M2.T, var.M3.T
    for i in range(n):
        j = i + 3
        x[:, j] = (psi0 + psi1 * (i + 1)) + x[:, j - 1] @ m1t + x[:, j - 2] @ m2t + x[:, j - 3] @ m3t + shocks[:, i]
    return x[:, 3:, 0], x[:, 3:, 1]


def _check_lengths(T: int, presample: int) -> None:
    if T < 10:
        raise ValueError("T must be at least 10")
    if presample < 3:
        raise ValueError("presample must be at least 3")


def simulate(theta: DgpParams, seed: int, T: int = 50, presample: int = 100, *,
             cell: int = 0, replication: int = 0, shocks=None) -> SeriesPair:
    """Generate one (Y, Z) sample.

    Parameters
    ----------
    theta : DgpParams
    seed : int
        Master seed.
    T : int, default 50
        Estimation sample size.
    presample : int, default 100
        Burn-in observations; start values before them are zero.
    cell, replication : int
        Substream indices (see module notes).
    shocks : tuple of array_like, optional
        Explicit ``(u, e)`` draws of length ``presample + T``; overrides the
        generator.

    Returns
    -------
    SeriesPair
    """
    _check_lengths(T, presample)
    n = T + presample
    if shocks is None:
        draws = replication_normals(seed, cell, [replication], n)[0]
        u, e = draws[0], draws[1]
    else:
        u, e = (np.asarray(s, dtype=float) for s in shocks)
        if u.shape != (n,) or e.shape != (n,):
            raise ValueError(f"shocks must have length {n}")
    y, z = _recurse(to_var(theta), u[None, :], e[None, :])
    return SeriesPair(y[0], z[0], presample, T, shocks=(u, e), seed=seed, cell=cell, replication=replication)


def simulate_batch(theta: DgpParams, seed: int, replications, T: int = 50, presample: int = 100,
                   cell: int = 0) -> SeriesBatch:
    """Generate several replications at once.

    ``simulate_batch(...).pair(i)`` equals ``simulate(..., replication=r_i)``
    element for element.
    """
    _check_lengths(T, presample)
    draws = replication_normals(seed, cell, replications, T + presample)
    y, z = _recurse(to_var(theta), draws[:, 0], draws[:, 1])
    return SeriesBatch(y, z, presample, T)


def conditional_mean_dy(theta: DgpParams, batch: SeriesBatch) -> np.ndarray:
    """``E[ΔY_t]`` given the realised regressors, over the sample rows.

    Returns
    -------
    ndarray, shape (R, T)
    """
    p, T = batch.presample_len, batch.sample_len
    y, z = batch.y, batch.z
    s = slice(p, p + T)

    def lag(a, k):
        return a[:, p - k:p - k + T]

    dy = np.diff(y, axis=1, prepend=0.0)
    dz = np.diff(z, axis=1, prepend=0.0)
    t = batch.trend
    th = theta
    mean = (th.b1 + th.b2 * t + th.b3 * lag(y, 1) + th.b4 * lag(dy, 1) + th.b5 * lag(dy, 2)
            + th.b6 * z[:, s] + th.b7 * dz[:, s] + th.b8 * lag(dz, 1) + th.b9 * lag(dz, 2))
    if th.b10 != 0.0:
        mean = mean + th.b10 * (lag(y, 1) - th.c1 - th.c2 * lag(z, 1))
    return mean


# grid of values for the permutation experiment
PARAM_GRID = {
    "b1": (0.0, 1.0),
    "b2": (0.0, 0.5, 1.0),
    "b3": (-1.0, -0.9, -0.5, -0.1, 0.0),
    "b4": (0.0, 0.5),
    "b5": (0.0, 0.3),
    "b6": (0.0, 0.1, 1.0, 10.0),
    "b7": (0.0, 0.1, 1.0, 10.0),
    "b8": (-0.5, 0.0, 0.1, 0.5, 1.0, 10.0),
    "b9": (0.0, 0.1, 1.0, 10.0),
    "b10": (0.0, -0.1, -0.5, -0.8, -1.0),
    "c1": (0.0, 1.0),
    "c2": (0.0, 0.1, 1.0, 10.0),
}

# (m1, m2, m3) for the four Z processes
Z_PROCESSES = {
    ZProcessKind.RANDOM_WALK: (0.0, 0.0, 1.0),
    ZProcessKind.RANDOM_WALK_DRIFT: (1.0, 0.0, 1.0),
    ZProcessKind.STATIONARY_CONSTANT: (1.0, 0.0, 0.5),
    ZProcessKind.TREND_STATIONARY: (1.0, 1.0, 0.5),
}

_SCENARIO_Z = {
    TrendKnowledge.NONE_KNOWN_ABSENT: (ZProcessKind.RANDOM_WALK, ZProcessKind.STATIONARY_CONSTANT),
    TrendKnowledge.KNOWN_PRESENT: (ZProcessKind.RANDOM_WALK_DRIFT, ZProcessKind.TREND_STATIONARY),
}


def _required_params(spec) -> dict:
    """Nonzero parameters a model needs, mapped to their allowed grid values."""
    fam = spec.family
    req = {}
    roles = set(spec.free_coeffs) | {r for r, _ in spec.fixed_terms}
    role_param = {"intercept": "b1", "trend": "b2", "dy1": "b4", "dy2": "b5", "z": "b6",
                  "dz": "b7", "dz1": "b8", "dz2": "b9", "ec": "b10"}
    for role, param in role_param.items():
        if role in roles:
            req[param] = tuple(v for v in PARAM_GRID[param] if v != 0.0)
    if fam in (3, 4, 15, 16):
        req["b3"] = tuple(v for v in PARAM_GRID["b3"] if v not in (0.0, -1.0))
    elif "y_lag" in roles:
        req["b3"] = (-1.0,)
    if spec.has_cointegration:
        req["c1"] = tuple(v for v in PARAM_GRID["c1"] if v != 0.0)
        req["c2"] = tuple(v for v in PARAM_GRID["c2"] if v != 0.0)
    return req


def _allowed_z(family: int) -> tuple:
    if family in (11, 12):
        return (ZProcessKind.STATIONARY_CONSTANT, ZProcessKind.TREND_STATIONARY)
    if family in (13, 14):
        return (ZProcessKind.RANDOM_WALK, ZProcessKind.RANDOM_WALK_DRIFT)
    return tuple(Z_PROCESSES)


def _apply_sentinels(values: dict, family: int) -> tuple:
    flags = set()
    if values.get("b10") == -1.0:
        values["b10"] = SENTINEL_UNIT
        flags.add("b10")
    if family == 13:
        for name in ("b1", "c1"):
            if values.get(name, 0.0) == 0.0:
                values[name] = SENTINEL_SMALL
                flags.add(name)
    return values, frozenset(flags)


def enumerate_permutations(scenario="all") -> list:
    """Grid of true processes used in the regret experiments.

    Each grid point is a product of the tabulated parameter value sets that
    matches exactly one candidate model.  Permutations landing on families
    15/16 are dropped, as are Z processes outside the four listed ones, random-
    walk Z with level relations (11/12) and stationary Z with error
    correction (13/14).  For family 13, ``b1`` and a zero ``c1`` are replaced
    by ``0.00001``; ``b10 = -1`` is replaced by ``-0.99999`` everywhere.  The
    replacements are flagged as sentinels.

    Parameters
    ----------
    scenario : {"all", "no_trend", "trend"}
        ``no_trend`` keeps odd families with a trendless Z (random walk or
        stationary around a constant); ``trend`` keeps even families with a
        trending Z (random walk with drift or trend stationary).

    Returns
    -------
    list of (DgpParams, ModelId)
        In ascending model order, then grid order.
    """
    tk = TrendKnowledge.coerce(scenario)
    out = []
    for spec in list_models():
        fam = spec.family
        if fam in (15, 16):
            continue
        if tk is not TrendKnowledge.UNKNOWN and (fam % 2 == 1) != (tk is TrendKnowledge.NONE_KNOWN_ABSENT):
            continue
        zs = _allowed_z(fam)
        if tk is not TrendKnowledge.UNKNOWN:
            zs = tuple(k for k in zs if k in _SCENARIO_Z[tk])
        req = _required_params(spec)
        names = list(req)
        for combo in itertools.product(*(req[n] for n in names)):
            base = dict(zip(names, combo))
            if base.get("b4", 0.0) + base.get("b5", 0.0) >= 1.0:
                continue
            for zk in zs:
                m1, m2, m3 = Z_PROCESSES[zk]
                values, flags = _apply_sentinels(dict(base), fam)
                theta = DgpParams(m1=m1, m2=m2, m3=m3, sentinels=flags, **values)
                out.append((theta, spec.id))
    return out


def permutation_counts(scenario="all") -> dict:
    """Number of enumerated permutations per true model, as ``{"13.01": n}``."""
    counts = {}
    for _, model in enumerate_permutations(scenario):
        key = str(model)
        counts[key] = counts.get(key, 0) + 1
    return counts
