"""Candidate model taxonomy for the bivariate (Y, Z) selection problem.

Thirty-four single-equation models explain the first difference of ``Y``.
Each is identified by a *family* (1-16) and a number of augmentation lags
(0-2), written ``"family.0lags"`` so that ``ModelId(13, 2)`` prints as
``13.02``.  Four processes generate ``Z``.

The regressor *roles* used throughout the package are

=============  ===========================================
role           regressor
=============  ===========================================
``intercept``  1
``trend``      t
``y_lag``      Y_{t-1}
``dy1``        ΔY_{t-1}
``dy2``        ΔY_{t-2}
``z``          Z_t
``dz``         ΔZ_t
``dz1``        ΔZ_{t-1}
``dz2``        ΔZ_{t-2}
``ec``         Y_{t-1} - c1 - c2 Z_{t-1}
=============  ===========================================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

__all__ = [
    "ROLES",
    "ROLE_PARAMS",
    "ModelId",
    "RelationType",
    "ModelSpec",
    "ZProcessKind",
    "TrendKnowledge",
    "list_models",
    "get_model",
    "relation_of",
    "classify_params",
    "choosable_set",
    "z_process_kind",
]

ROLES = ("intercept", "trend", "y_lag", "dy1", "dy2", "z", "dz", "dz1", "dz2", "ec")

# b-parameter attached to each role in the generating equation
ROLE_PARAMS = {
    "intercept": "b1",
    "trend": "b2",
    "y_lag": "b3",
    "dy1": "b4",
    "dy2": "b5",
    "z": "b6",
    "dz": "b7",
    "dz1": "b8",
    "dz2": "b9",
    "ec": "b10",
}

ZERO_TOL = 1e-7


@dataclass(frozen=True, order=True)
class ModelId:
    """Model identifier ``(family, aug_lags)``.

    Parameters
    ----------
    family : int
        Digits before the decimal point, 1-16.
    aug_lags : int
        Digits after the decimal point, 0-2.

    Raises
    ------
    ValueError
        If the pair is not one of the 34 tabulated models.
    """

    family: int
    aug_lags: int

    def __post_init__(self):
        if (self.family, self.aug_lags) not in _VALID_IDS:
            raise ValueError(f"no model {self.family}.{self.aug_lags:02d} in the taxonomy")

    def __str__(self):
        return f"{self.family}.{self.aug_lags:02d}"

    @classmethod
    def parse(cls, text: str) -> "ModelId":
        """Parse ``"13.02"`` style identifiers."""
        fam, _, lag = str(text).strip().partition(".")
        try:
            return cls(int(fam), int(lag or 0))
        except ValueError as exc:
            raise ValueError(f"cannot parse model id {text!r}") from exc


class RelationType(str, enum.Enum):
    """Kind of relation between Y and Z implied by a model.

    A is a relation in levels, B in first differences only, C mixed and
    D no relation.
    """

    A = "A"
    B = "B"
    C = "C"
    D = "D"


class ZProcessKind(str, enum.Enum):
    RANDOM_WALK = "RandomWalk"
    RANDOM_WALK_DRIFT = "RandomWalkDrift"
    STATIONARY_CONSTANT = "StationaryConstant"
    TREND_STATIONARY = "TrendStationary"


class TrendKnowledge(str, enum.Enum):
    """What the analyst knows about deterministic trends."""

    NONE_KNOWN_ABSENT = "none_known_absent"
    KNOWN_PRESENT = "known_present"
    UNKNOWN = "unknown"

    @classmethod
    def coerce(cls, value) -> "TrendKnowledge":
        """Accept enum members, their values, or the scenario aliases."""
        if isinstance(value, cls):
            return value
        aliases = {"no_trend": cls.NONE_KNOWN_ABSENT, "trend": cls.KNOWN_PRESENT, "all": cls.UNKNOWN}
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class ModelSpec:
    """One candidate model.

    Attributes
    ----------
    id : ModelId
    free_coeffs : tuple of str
        Estimated regressor roles in design-matrix order.
    fixed_terms : tuple of (str, float)
        Roles whose coefficient is known; they are moved to the left-hand
        side before estimation.
    relation : RelationType
    has_cointegration : bool
        True for families 13-14, whose ``ec`` regressor needs an
        estimated cointegrating vector.
    max_lag_needed : int
        Deepest lag of Y or Z referenced by the response and regressors.
    """

    id: ModelId
    free_coeffs: tuple
    fixed_terms: tuple
    relation: RelationType
    has_cointegration: bool
    max_lag_needed: int

    @property
    def c_count(self) -> int:
        """Number of estimated parameters, including c1, c2 when present."""
        return len(self.free_coeffs) + (2 if self.has_cointegration else 0)

    @property
    def family(self) -> int:
        return self.id.family

    @property
    def aug_lags(self) -> int:
        return self.id.aug_lags

    def __str__(self):
        return str(self.id)


_LAG_FAMILIES = {
    1: ((), ()),
    2: (("intercept",), ()),
    3: (("intercept", "y_lag"), ()),
    4: (("intercept", "trend", "y_lag"), ()),
    5: (("intercept",), (("y_lag", -1.0),)),
    6: (("intercept", "trend"), (("y_lag", -1.0),)),
}
_FIXED_FAMILIES = {
    (7, 0): (("dz",), ()),
    (8, 0): (("intercept", "dz"), ()),
    (11, 0): (("intercept", "z"), (("y_lag", -1.0),)),
    (12, 0): (("intercept", "trend", "z"), (("y_lag", -1.0),)),
}
_DY = ("dy1", "dy2")
_DZ = ("dz1", "dz2")

_VALID_IDS = frozenset(
    [(f, a) for f in range(1, 7) for a in range(3)]
    + [(7, 0), (8, 0), (11, 0), (12, 0)]
    + [(f, a) for f in (9, 10, 13, 14, 15, 16) for a in (1, 2)]
)


def relation_of(family: int) -> RelationType:
    """Relation type of a model family."""
    if 1 <= family <= 6:
        return RelationType.D
    if 7 <= family <= 10:
        return RelationType.B
    if 11 <= family <= 14:
        return RelationType.A
    if family in (15, 16):
        return RelationType.C
    raise ValueError(f"unknown family {family}")


def _build_spec(family: int, lags: int) -> ModelSpec:
    dy, dz = _DY[:lags], _DZ[:lags]
    if family <= 6:
        base, fixed = _LAG_FAMILIES[family]
        free = base + dy
    elif (family, lags) in _FIXED_FAMILIES:
        free, fixed = _FIXED_FAMILIES[(family, lags)]
    else:
        lead = ("intercept",) if family % 2 == 0 else ()
        fixed = ()
        if family in (9, 10):
            free = lead + dy + dz
        elif family in (13, 14):
            free = lead + dy + dz + ("ec",)
        else:
            free = lead + ("y_lag",) + dy + dz
    return ModelSpec(
        id=ModelId(family, lags),
        free_coeffs=tuple(free),
        fixed_terms=tuple(fixed),
        relation=relation_of(family),
        has_cointegration=family in (13, 14),
        # the response ΔY_t already reaches back one period
        max_lag_needed=lags + 1,
    )


@lru_cache(maxsize=None)
def _models() -> tuple:
    return tuple(_build_spec(f, a) for f, a in sorted(_VALID_IDS))


def list_models() -> list:
    """All 34 model specifications in ascending ``(family, aug_lags)`` order."""
    return list(_models())


@lru_cache(maxsize=None)
def _index() -> Mapping:
    return {spec.id: spec for spec in _models()}


def get_model(model) -> ModelSpec:
    """Look up a spec from a :class:`ModelId`, a ``(family, lags)`` tuple or ``"11.00"``."""
    if isinstance(model, ModelSpec):
        return model
    if isinstance(model, str):
        model = ModelId.parse(model)
    elif isinstance(model, tuple):
        model = ModelId(*model)
    return _index()[model]


def choosable_set(trend_knowledge) -> frozenset:
    """Models a selection strategy may return.

    Parameters
    ----------
    trend_knowledge : TrendKnowledge or str
        ``none_known_absent`` keeps odd families, ``known_present`` even
        families and ``unknown`` all of them.

    Returns
    -------
    frozenset of ModelId
    """
    tk = TrendKnowledge.coerce(trend_knowledge)
    ids = [spec.id for spec in _models()]
    if tk is TrendKnowledge.NONE_KNOWN_ABSENT:
        return frozenset(m for m in ids if m.family % 2 == 1)
    if tk is TrendKnowledge.KNOWN_PRESENT:
        return frozenset(m for m in ids if m.family % 2 == 0)
    return frozenset(ids)


def z_process_kind(m1: float, m2: float, m3: float):
    """Classify the Z process ``Z_t = m1 + m2 t + m3 Z_{t-1} + e_t``.

    Returns
    -------
    ZProcessKind or None
        None when the combination is not one of the four listed processes.
    """
    nz1, nz2, unit = abs(m1) > ZERO_TOL, abs(m2) > ZERO_TOL, abs(m3 - 1.0) <= ZERO_TOL
    if unit:
        if nz2:
            return None
        return ZProcessKind.RANDOM_WALK_DRIFT if nz1 else ZProcessKind.RANDOM_WALK
    if not 0.0 < m3 < 1.0 or not nz1:
        return None
    return ZProcessKind.TREND_STATIONARY if nz2 else ZProcessKind.STATIONARY_CONSTANT


# nonzero b-pattern (excluding b3) and b3 kind -> family, for aug_lags = 0
_PATTERNS = {
    (frozenset(), "zero"): 1,
    (frozenset({"b1"}), "zero"): 2,
    (frozenset({"b1"}), "stat"): 3,
    (frozenset({"b1", "b2"}), "stat"): 4,
    (frozenset({"b1"}), "wn"): 5,
    (frozenset({"b1", "b2"}), "wn"): 6,
    (frozenset({"b7"}), "zero"): 7,
    (frozenset({"b1", "b7"}), "zero"): 8,
    (frozenset({"b8"}), "zero"): 9,
    (frozenset({"b1", "b8"}), "zero"): 10,
    (frozenset({"b1", "b6"}), "wn"): 11,
    (frozenset({"b1", "b2", "b6"}), "wn"): 12,
    (frozenset({"b8", "b10"}), "zero"): 13,
    (frozenset({"b1", "b8", "b10"}), "zero"): 14,
    (frozenset({"b8"}), "stat"): 15,
    (frozenset({"b8"}), "wn"): 15,
    (frozenset({"b1", "b8"}), "stat"): 16,
    (frozenset({"b1", "b8"}), "wn"): 16,
}


def classify_params(theta):
    """Map a parameter vector to the model whose nonzero pattern it matches.

    Parameters
    ----------
    theta : DgpParams
        Only nominal values are inspected, so flagged sentinels count as
        zero (``b1``, ``c1``) or as -1 (``b10``).

    Returns
    -------
    ModelId or None
        None when no tabulated model has this pattern.
    """
    val = {name: theta.nominal(name) for name in
           ("b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8", "b9", "b10", "c1", "c2")}
    nz = {k for k, v in val.items() if abs(v) > ZERO_TOL}

    b3 = val["b3"]
    if "b3" not in nz:
        b3_kind = "zero"
    elif abs(b3 + 1.0) <= ZERO_TOL:
        b3_kind = "wn"
    elif -2.0 < b3 < 0.0:
        b3_kind = "stat"
    else:
        return None

    # the error-correction term needs both c1 and c2; without it neither may appear
    has_ec = "b10" in nz
    if has_ec != ("c2" in nz) or has_ec != ("c1" in nz):
        return None

    # augmentation lags: b4 alone gives one, b5 needs b4 as well
    if "b5" in nz:
        lags = 2
        if "b4" not in nz:
            return None
    else:
        lags = 1 if "b4" in nz else 0
    if "b9" in nz:
        if "b8" not in nz or lags != 2:
            return None

    core = frozenset(nz - {"b3", "b4", "b5", "b9", "c1", "c2"})
    family = _PATTERNS.get((core, b3_kind))
    if family is None:
        return None
    if family in (9, 10, 13, 14, 15, 16):
        if lags == 0:
            return None
        if (lags == 2) != ("b9" in nz):
            return None
    elif "b8" in nz or "b9" in nz:
        return None
    if family in (7, 8, 11, 12) and lags:
        return None
    return ModelId(family, lags)
