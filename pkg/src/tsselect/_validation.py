"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .dgp import SeriesPair

LAG_ROWS = 3


def check_pair_array(X, min_obs: int = 10) -> SeriesPair:
    """Turn an ``(n, 2)`` array of ``[Y, Z]`` levels into a :class:`SeriesPair`.

    The first three rows only provide lags.

    Raises
    ------
    ValueError
        For a wrong shape, non-finite values or fewer than ``min_obs``
        observations after the lag rows.
    """
    X = check_array(X, dtype=np.float64, ensure_min_samples=LAG_ROWS + min_obs)
    if X.shape[1] != 2:
        raise ValueError(f"expected two columns (Y, Z), got {X.shape[1]}")
    return SeriesPair(X[:, 0].copy(), X[:, 1].copy(), LAG_ROWS, X.shape[0] - LAG_ROWS)
