"""Monte Carlo scoring of selection strategies and minimax-regret tables.

A *cell* is one true parameter vector simulated ``reps`` times.  Every
strategy sees the same replications and is scored on three things: whether
it picks the true model (including augmentation lags), whether it picks a
model of the true relation type, and the L2 distance

    L2 = (1/T) Σ_t (E[ΔY_t | θ] - fitted ΔY_t)^2

between the true conditional mean and the chosen model's fitted values.

Regret tables compare strategies across cells.  With ``G[θ, k]`` the metric
of strategy ``k`` in cell ``θ`` (for L2 the metric is ``-ln mean L2``),
``max_regret[k, k'] = max(0, max_θ (G[θ, k'] - G[θ, k]))``.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .criteria import CriterionKind, criterion_values, cv_values
from .dgp import DgpParams, SeriesBatch, conditional_mean_dy, simulate_batch
from .hyptest import AlphaProfile, TestingEngine, _Cache, _code_to_model, _fitted
from .regress import Design
from .taxonomy import ModelId, TrendKnowledge, choosable_set, classify_params, relation_of

log = logging.getLogger(__name__)

__all__ = [
    "STRATEGIES",
    "IC_STRATEGIES",
    "TEST_STRATEGIES",
    "METRICS",
    "parse_strategy",
    "StrategyScore",
    "CellResult",
    "RegretTable",
    "l2_distance",
    "score_batch",
    "run_cell",
    "run_cells",
    "regret_matrix",
    "write_cells_csv",
    "write_regret_csv",
]

IC_STRATEGIES = ("AIC", "AICc", "AICu", "SIC", "CV")
TEST_STRATEGIES = ("EG-10%", "EG-5%", "EG-10/5", "Jo-10%", "Jo-5%", "Jo-10/5")
STRATEGIES = IC_STRATEGIES + TEST_STRATEGIES
METRICS = ("model_freq", "relation_freq", "neg_ln_l2")


def parse_strategy(name: str):
    """Split a strategy name.

    Returns
    -------
    tuple
        ``("ic", CriterionKind)`` or ``("test", variant, AlphaProfile)``.

    Examples
    --------
    >>> parse_strategy("EG-10/5")[1:]
    ('EG', AlphaProfile(general_alpha=0.05, unit_root_alpha=0.1, name='-10/5'))
    """
    text = str(name).strip()
    for variant in ("EG", "Jo"):
        if text.startswith(variant + "-"):
            return ("test", variant, AlphaProfile.named(text[len(variant):]))
    kind = CriterionKind.coerce(text)
    if kind is CriterionKind.FPEU:
        raise ValueError("FPEu is used for lag selection only, not as a strategy")
    return ("ic", kind)


def l2_distance(theta: DgpParams, result, data) -> float:
    """L2 distance between the true conditional mean of ``ΔY`` and a prediction.

    Parameters
    ----------
    theta : DgpParams
    result : StrategyResult or callable
        Anything with a ``predictor`` attribute, or a predictor itself,
        returning fitted ``ΔY_t`` over the sample rows.
    data : SeriesPair

    Returns
    -------
    float

    Raises
    ------
    FloatingPointError
        If the prediction is not finite.
    """
    predictor = getattr(result, "predictor", result)
    pred = np.asarray(predictor(data), dtype=float)
    truth = conditional_mean_dy(theta, data.as_batch())[0]
    if not np.all(np.isfinite(pred)):
        raise FloatingPointError("non-finite prediction")
    return float(np.mean((truth - pred) ** 2))


def score_batch(batch: SeriesBatch, strategies, trend_knowledge) -> dict:
    """Choices and fitted values of each strategy on every replication.

    Returns
    -------
    dict
        ``name -> (codes, fitted)`` with ``codes`` of shape (R,) holding
        ``10 * family + aug_lags`` (0 when no model could be fitted) and
        ``fitted`` of shape (R, T).
    """
    tk = TrendKnowledge.coerce(trend_knowledge)
    cache = _Cache(Design(batch))
    out = {}
    parsed = [(s, parse_strategy(s)) for s in strategies]
    ic = [(s, p[1]) for s, p in parsed if p[0] == "ic"]
    if ic:
        models = sorted(choosable_set(tk))
        fits = [cache.model(m) for m in models]
        codes = np.array([m.family * 10 + m.aug_lags for m in models])
        T = batch.sample_len
        for name, kind in ic:
            if kind is CriterionKind.CV:
                vals = np.stack([cv_values(f.resid, f.hat) for f in fits], axis=-1)
            else:
                vals = np.stack([criterion_values(kind, f.rss, T, f.c_count) for f in fits], axis=-1)
            best = np.argmin(vals, axis=-1)
            valid = np.isfinite(np.take_along_axis(vals, best[:, None], axis=-1)[:, 0])
            fitted = np.full((batch.reps, T), np.nan)
            for j in np.unique(best):
                sel = best == j
                fitted[sel] = _fitted(cache.design, fits[j])[sel]
            out[name] = (np.where(valid, codes[best], 0), fitted)
    tests = [(s, p[1], p[2]) for s, p in parsed if p[0] == "test"]
    if tests:
        engine = TestingEngine(batch, tk, cache=cache)
        for name, variant, profile in tests:
            dec = engine.decide(variant, profile)
            out[name] = (dec.code.copy(), dec.fitted)
    return out


@dataclass(frozen=True)
class StrategyScore:
    """Aggregated performance of one strategy in one cell."""

    freq_correct_model: float
    freq_correct_relation: float
    mean_l2: float
    n_degenerate: int
    chosen_counts: tuple = ()

    def as_dict(self) -> dict:
        return {
            "freq_correct_model": self.freq_correct_model,
            "freq_correct_relation": self.freq_correct_relation,
            "mean_l2": self.mean_l2,
            "n_degenerate": self.n_degenerate,
        }


@dataclass(frozen=True)
class CellResult:
    """Scores of all strategies for one true parameter vector.

    Attributes
    ----------
    theta : DgpParams
    true_model : ModelId
    strategies : tuple of str
    scores : dict
        ``strategy -> StrategyScore``.
    replications : int
    """

    theta: DgpParams
    true_model: ModelId
    strategies: tuple
    scores: dict
    replications: int
    cell_index: int = 0
    seed: int = 0

    def metric(self, strategy: str, metric: str) -> float:
        s = self.scores[strategy]
        if metric == "model_freq":
            return s.freq_correct_model
        if metric == "relation_freq":
            return s.freq_correct_relation
        if metric == "neg_ln_l2":
            if not s.mean_l2 > 0 or not math.isfinite(s.mean_l2):
                return math.inf if s.mean_l2 == 0 else math.nan
            return -math.log(s.mean_l2)
        raise ValueError(f"unknown metric {metric!r}")


def run_cell(theta: DgpParams, strategies, reps: int, seed: int, trend_knowledge, cell_index: int = 0,
             T: int = 50, presample: int = 100, block: int = 1000) -> CellResult:
    """Simulate one cell and score every strategy on the same replications.

    Parameters
    ----------
    theta : DgpParams
        Must classify to a candidate model.
    strategies : sequence of str
        Names from :data:`STRATEGIES`.
    reps : int
        Replications, at least one.
    seed : int
        Master seed; replication ``r`` uses substream ``(seed, cell_index, r)``.
    trend_knowledge : TrendKnowledge or str
    cell_index : int
    T, presample : int
    block : int
        Replications simulated and scored together; affects memory only.

    Returns
    -------
    CellResult
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    strategies = tuple(strategies)
    if not strategies:
        raise ValueError("at least one strategy is required")
    true_model = classify_params(theta)
    if true_model is None:
        raise ValueError("theta does not match any candidate model")
    true_code = true_model.family * 10 + true_model.aug_lags
    true_rel = relation_of(true_model.family)
    n_model = dict.fromkeys(strategies, 0)
    n_rel = dict.fromkeys(strategies, 0)
    l2_sum = dict.fromkeys(strategies, 0.0)
    n_bad = dict.fromkeys(strategies, 0)
    counts = {s: {} for s in strategies}
    for start in range(0, reps, block):
        rep_idx = range(start, min(reps, start + block))
        batch = simulate_batch(theta, seed, rep_idx, T=T, presample=presample, cell=cell_index)
        truth = conditional_mean_dy(theta, batch)
        scored = score_batch(batch, strategies, trend_knowledge)
        for name in strategies:
            codes, fitted = scored[name]
            n_model[name] += int(np.sum(codes == true_code))
            rel = np.array([relation_of(c // 10) == true_rel if c else False for c in codes])
            n_rel[name] += int(rel.sum())
            l2 = np.mean((truth - fitted) ** 2, axis=1)
            good = np.isfinite(l2)
            n_bad[name] += int((~good).sum())
            l2_sum[name] += float(np.sum(l2[good]))
            uniq, cnt = np.unique(codes, return_counts=True)
            for u, c in zip(uniq, cnt):
                key = str(_code_to_model(u)) if u else "none"
                counts[name][key] = counts[name].get(key, 0) + int(c)
    scores = {}
    for name in strategies:
        used = reps - n_bad[name]
        scores[name] = StrategyScore(
            freq_correct_model=n_model[name] / reps,
            freq_correct_relation=n_rel[name] / reps,
            mean_l2=l2_sum[name] / used if used else math.nan,
            n_degenerate=n_bad[name],
            chosen_counts=tuple(sorted(counts[name].items())),
        )
    return CellResult(theta, true_model, strategies, scores, reps, cell_index, seed)


def _run_cell_args(args):
    theta, strategies, reps, seed, tk, idx, T, presample = args
    return run_cell(theta, strategies, reps, seed, tk, cell_index=idx, T=T, presample=presample)


def run_cells(thetas, strategies, reps: int, seed: int, trend_knowledge, workers: int = 1,
              T: int = 50, presample: int = 100, progress=None, cell_indices=None) -> list:
    """Run many cells, optionally in worker processes.

    Results come back in input order and each cell's random numbers depend
    only on ``(seed, cell index, replication)``, so the output does not
    depend on ``workers``.

    Parameters
    ----------
    thetas : sequence of DgpParams
    progress : callable, optional
        Called as ``progress(done, total, cell)`` after each cell.
    cell_indices : sequence of int, optional
        Substream indices; defaults to ``0..len(thetas)-1``.
    """
    thetas = list(thetas)
    idx = list(range(len(thetas))) if cell_indices is None else list(cell_indices)
    tk = TrendKnowledge.coerce(trend_knowledge)
    jobs = [(th, tuple(strategies), reps, seed, tk, i, T, presample) for th, i in zip(thetas, idx)]
    results = []
    if workers <= 1:
        for n, job in enumerate(jobs, start=1):
            cell = _run_cell_args(job)
            results.append(cell)
            if progress:
                progress(n, len(jobs), cell)
        return results
    with ProcessPoolExecutor(max_workers=workers) as pool:
        try:
            for n, cell in enumerate(pool.map(_run_cell_args, jobs), start=1):
                results.append(cell)
                if progress:
                    progress(n, len(jobs), cell)
        except KeyboardInterrupt:
            pool.shutdown(wait=False, cancel_futures=True)
            raise
    return results


@dataclass
class RegretTable:
    """Metric grid and pairwise maximum regrets.

    Attributes
    ----------
    metric : str
    strategies : tuple of str
    G : ndarray, shape (cells, strategies)
    max_regret : ndarray, shape (strategies, strategies)
        Row strategy against column strategy.
    exclusions : list of (int, str, str)
        Cells left out of a pair's comparison because the metric was not
        finite (``-ln 0``) for one of the two strategies.
    """

    metric: str
    strategies: tuple
    G: np.ndarray
    max_regret: np.ndarray
    exclusions: list = field(default_factory=list)

    def regret(self, row: str, col: str) -> float:
        return float(self.max_regret[self.strategies.index(row), self.strategies.index(col)])

    def beats(self, k: str, other: str) -> bool:
        """Whether ``k``'s worst regret against ``other`` is below the reverse."""
        return self.regret(k, other) < self.regret(other, k)

    def pairwise_minimax(self, k: str) -> bool:
        return all(self.beats(k, o) for o in self.strategies if o != k)

    def minimax_winner(self):
        """Strategy beating every other pairwise, or None."""
        winners = [k for k in self.strategies if self.pairwise_minimax(k)]
        return winners[0] if winners else None


def regret_matrix(cells, metric: str) -> RegretTable:
    """Maximum-regret matrix over a set of cells.

    Parameters
    ----------
    cells : sequence of CellResult
        All with the same strategy list.
    metric : {"model_freq", "relation_freq", "neg_ln_l2"}

    Returns
    -------
    RegretTable

    Examples
    --------
    Two cells and two strategies with ``G = [[0.9, 0.5], [0.4, 0.7]]`` give
    ``max_regret = [[0, 0.3], [0.4, 0]]``.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    cells = list(cells)
    if not cells:
        raise ValueError("no cells")
    strategies = cells[0].strategies
    for c in cells:
        if c.strategies != strategies:
            raise ValueError("cells cover different strategies")
    G = np.array([[c.metric(s, metric) for s in strategies] for c in cells], dtype=float)
    return regret_from_grid(G, strategies, metric)


def regret_from_grid(G, strategies, metric: str = "custom") -> RegretTable:
    """Maximum-regret matrix from a metric grid (cells by strategies)."""
    G = np.asarray(G, dtype=float)
    strategies = tuple(strategies)
    S = len(strategies)
    mr = np.zeros((S, S))
    exclusions = []
    finite = np.isfinite(G)
    for i in range(S):
        for j in range(S):
            if i == j:
                continue
            valid = finite[:, i] & finite[:, j]
            if i < j:
                for cell in np.flatnonzero(~valid):
                    exclusions.append((int(cell), strategies[i], strategies[j]))
            if not valid.any():
                mr[i, j] = math.nan
                continue
            mr[i, j] = max(0.0, float(np.max(G[valid, j] - G[valid, i])))
    if exclusions:
        log.info("%s: %d (cell, strategy pair) comparisons excluded for non-finite metric",
                 metric, len(exclusions))
    return RegretTable(metric, strategies, G, mr, exclusions)


def _header(seed) -> str:
    return f"# tsselect {__version__} seed={seed}\n"


def write_cells_csv(cells, path, seed) -> None:
    """One row per (cell, strategy) with scores and the true parameters."""
    with open(path, "w", newline="") as fh:
        fh.write(_header(seed))
        writer = csv.writer(fh, lineterminator="\n")
        pnames = list(cells[0].theta.as_dict()) if cells else []
        writer.writerow(["cell", "true_model", *pnames, "strategy", "freq_model", "freq_relation",
                         "mean_l2", "ln_mean_l2", "n_degenerate", "replications"])
        for c in cells:
            pvals = [repr(v) for v in c.theta.as_dict().values()]
            for s in c.strategies:
                sc = c.scores[s]
                ln = math.log(sc.mean_l2) if sc.mean_l2 > 0 else float("-inf")
                writer.writerow([c.cell_index, str(c.true_model), *pvals, s,
                                 f"{sc.freq_correct_model:.6f}", f"{sc.freq_correct_relation:.6f}",
                                 f"{sc.mean_l2:.10g}", f"{ln:.10g}", sc.n_degenerate, c.replications])


def write_regret_csv(table: RegretTable, path, seed) -> None:
    """Row strategy versus column strategy, one file per metric."""
    with open(path, "w", newline="") as fh:
        fh.write(_header(seed))
        fh.write(f"# metric={table.metric} winner={table.minimax_winner()}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["strategy", *table.strategies])
        for i, s in enumerate(table.strategies):
            writer.writerow([s, *(f"{v:.4f}" for v in table.max_regret[i])])
