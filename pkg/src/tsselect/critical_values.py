"""Critical values for unit-root and cointegration tests.

Tables are CSV resources with columns ``test, det_case, T_bracket, alpha,
value, source``.  ``test`` is one of

``adf``
    Dickey-Fuller t-ratio; ``det_case`` ``nc``, ``c`` or ``ct``.
``eg``
    Engle-Granger residual t-ratio for two variables with intercept
    (``det_case`` ``c``).
``johansen_trace``
    Rank-zero trace statistic for two variables, ``rc`` (constant restricted
    to the cointegrating relation) or ``uc`` (unrestricted constant).

``T_bracket`` is a sample size or ``inf``.  Lookups interpolate linearly in
``1/T`` between brackets, so finite-sample response surfaces of the form
``β∞ + β1/T + β2/T²`` are reproduced exactly at the brackets.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

__all__ = [
    "ALPHAS",
    "CriticalValueEntry",
    "CriticalValueTable",
    "RESPONSE_SURFACES",
    "response_surface_value",
    "default_table",
    "build_default_entries",
]

ALPHAS = (0.01, 0.05, 0.10)
T_BRACKETS = (25, 50, 100, 250, 500, math.inf)

_MACKINNON = "MacKinnon (1991) response surface"

# (test, det_case) -> {alpha: (b_inf, b1, b2)}
RESPONSE_SURFACES = {
    ("adf", "nc"): {
        0.01: (-2.5658, -1.960, -10.04),
        0.05: (-1.9393, -0.398, 0.0),
        0.10: (-1.6156, -0.181, 0.0),
    },
    ("adf", "c"): {
        0.01: (-3.4336, -5.999, -29.25),
        0.05: (-2.8621, -2.738, -8.36),
        0.10: (-2.5671, -1.438, -4.48),
    },
    ("adf", "ct"): {
        0.01: (-3.9638, -8.353, -47.44),
        0.05: (-3.4126, -4.039, -17.83),
        0.10: (-3.1279, -2.418, -7.58),
    },
    ("eg", "c"): {
        0.01: (-3.9001, -10.534, -30.03),
        0.05: (-3.3377, -5.967, -8.98),
        0.10: (-3.0462, -4.069, -5.73),
    },
}

# asymptotic trace values, rank 0, two variables
JOHANSEN_ASYMPTOTIC = {
    "uc": {
        0.10: (13.4294, "MacKinnon, Haug and Michelis (1999)"),
        0.05: (15.4943, "MacKinnon, Haug and Michelis (1999)"),
        0.01: (19.9349, "MacKinnon, Haug and Michelis (1999)"),
    },
    "rc": {
        0.10: (18.0270, "simulated: 200,000 reps, T=1000, seed 20240611"),
        0.05: (20.2618, "MacKinnon, Haug and Michelis (1999)"),
        0.01: (25.1390, "simulated: 200,000 reps, T=1000, seed 20240611"),
    },
}


def response_surface_value(test: str, det_case: str, alpha: float, t: float) -> float:
    """Evaluate ``β∞ + β1/T + β2/T²`` for a tabulated surface."""
    b_inf, b1, b2 = RESPONSE_SURFACES[(test, det_case)][alpha]
    if math.isinf(t):
        return b_inf
    return b_inf + b1 / t + b2 / t**2


@dataclass(frozen=True)
class CriticalValueEntry:
    test: str
    det_case: str
    t_bracket: float
    alpha: float
    value: float
    source: str


def build_default_entries() -> list:
    """Entries of the shipped table, generated from the coefficients above."""
    out = []
    for (test, det), by_alpha in RESPONSE_SURFACES.items():
        for t in T_BRACKETS:
            for alpha in ALPHAS:
                value = round(response_surface_value(test, det, alpha, t), 4)
                out.append(CriticalValueEntry(test, det, t, alpha, value, _MACKINNON))
    for det, by_alpha in JOHANSEN_ASYMPTOTIC.items():
        for alpha in ALPHAS:
            value, source = by_alpha[alpha]
            out.append(CriticalValueEntry("johansen_trace", det, math.inf, alpha, value, source))
    return out


def _fmt_bracket(t) -> str:
    return "inf" if math.isinf(t) else str(int(t))


class CriticalValueTable:
    """Lookup table of critical values.

    Parameters
    ----------
    entries : iterable of CriticalValueEntry

    Raises
    ------
    ValueError
        If values for some (test, case, T) are not monotone in alpha.
    """

    def __init__(self, entries):
        self.entries = tuple(entries)
        self._grid = {}
        for e in self.entries:
            self._grid.setdefault((e.test, e.det_case, e.alpha), {})[e.t_bracket] = e.value
        self._check_monotone()

    def _check_monotone(self) -> None:
        cells = {}
        for e in self.entries:
            cells.setdefault((e.test, e.det_case, e.t_bracket), {})[e.alpha] = e.value
        for key, by_alpha in cells.items():
            alphas = sorted(by_alpha)
            vals = [by_alpha[a] for a in alphas]
            # left-tail tests get less negative as alpha grows, trace tests smaller
            if key[0] == "johansen_trace":
                ok = all(a > b for a, b in zip(vals, vals[1:]))
            else:
                ok = all(a < b for a, b in zip(vals, vals[1:]))
            if not ok:
                raise ValueError(f"critical values for {key} are not monotone in alpha")

    def lookup(self, test: str, det_case: str, alpha: float, t: float = math.inf) -> float:
        """Critical value at sample size ``t``, interpolated in ``1/t``.

        Raises
        ------
        KeyError
            If the table has no values for ``(test, det_case, alpha)``.
        """
        alpha = _match_alpha(alpha)
        grid = self._grid.get((test, det_case, alpha))
        if grid is None:
            raise KeyError(f"no critical values for {test}/{det_case} at alpha={alpha}")
        brackets = sorted(grid)
        inv = np.array([0.0 if math.isinf(b) else 1.0 / b for b in brackets])
        vals = np.array([grid[b] for b in brackets])
        if len(brackets) == 1:
            return float(vals[0])
        x = 0.0 if math.isinf(t) else 1.0 / t
        order = np.argsort(inv)
        inv, vals = inv[order], vals[order]
        if x > inv[-1]:
            # extrapolate from the two smallest samples
            slope = (vals[-1] - vals[-2]) / (inv[-1] - inv[-2])
            return float(vals[-1] + slope * (x - inv[-1]))
        return float(np.interp(x, inv, vals))

    def to_csv(self, path_or_buf=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["test", "det_case", "T_bracket", "alpha", "value", "source"])
        for e in self.entries:
            writer.writerow([e.test, e.det_case, _fmt_bracket(e.t_bracket), f"{e.alpha:.2f}",
                             f"{e.value:.4f}", e.source])
        text = buf.getvalue()
        if path_or_buf is not None:
            with open(path_or_buf, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path_or_text) -> "CriticalValueTable":
        if isinstance(path_or_text, str) and "\n" in path_or_text:
            text = path_or_text
        else:
            with open(path_or_text, newline="") as fh:
                text = fh.read()
        rows = csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#"))
        entries = []
        for row in rows:
            bracket = row["T_bracket"].strip()
            entries.append(CriticalValueEntry(
                row["test"].strip(),
                row["det_case"].strip(),
                math.inf if bracket == "inf" else float(bracket),
                float(row["alpha"]),
                float(row["value"]),
                row["source"].strip(),
            ))
        return cls(entries)


def _match_alpha(alpha: float) -> float:
    for a in ALPHAS:
        if abs(alpha - a) < 1e-9:
            return a
    raise KeyError(f"alpha must be one of {ALPHAS}, got {alpha}")


@lru_cache(maxsize=None)
def default_table() -> CriticalValueTable:
    """The shipped table from ``tsselect/data/critical_values.csv``."""
    text = resources.files("tsselect").joinpath("data/critical_values.csv").read_text()
    return CriticalValueTable.from_csv(text)
