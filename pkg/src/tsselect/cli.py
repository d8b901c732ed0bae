"""Command-line front end.

Subcommands::

    tsselect sweep       --config fig3a.toml --out fig3a.csv
    tsselect regret      --config table3.toml --out results/
    tsselect select      --config select.toml --out report.json
    tsselect weights     --config select.toml --out weights.csv
    tsselect recalibrate --reps 500000 --out critical_values.csv

Common flags ``--seed``, ``--reps`` and ``--workers`` override the config.
Exit status is 0 on success, 2 for configuration or input errors and 3 for
numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .criteria import CriterionDomainError, CriterionKind, DegenerateLeverageError, criterion_of_fit, \
    evidence_weights, model_average
from .dgp import PARAM_NAMES, DgpParams, InvalidParamsError, SeriesPair, enumerate_permutations
from .evaluate import IC_STRATEGIES, METRICS, STRATEGIES, TEST_STRATEGIES, parse_strategy, regret_matrix, \
    run_cells, write_cells_csv, write_regret_csv
from .regress import RankDeficiencyError, fit_model
from .taxonomy import TrendKnowledge, choosable_set, classify_params

log = logging.getLogger("tsselect")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
MODES = ("sweep", "regret", "select", "weights", "recalibrate")
MIN_OBSERVATIONS = 20


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


class NumericalError(RuntimeError):
    """A computation could not be completed."""


_RUN_KEYS = {"scenario", "strategies", "reps", "seed", "workers", "T", "presample"}
_SECTION_KEYS = {
    "sweep": {"vary", "grid", "base"},
    "regret": {"metrics"},
    "select": {"input", "criteria", "criterion"},
    "recalibrate": {"T"},
}


@dataclass
class RunConfig:
    """Validated settings for one invocation.

    ``scenario`` doubles as the trend knowledge given to the strategies:
    ``no_trend``, ``trend`` or ``all`` (unknown).
    """

    mode: str
    scenario: str = "no_trend"
    strategies: tuple = STRATEGIES
    reps: int = 1000
    seed: int = 0
    workers: int = 1
    T: int = 50
    presample: int = 100
    sweep_base: dict = field(default_factory=dict)
    sweep_vary: str = ""
    sweep_grid: tuple = ()
    metrics: tuple = METRICS
    input: str = ""
    criteria: tuple = IC_STRATEGIES
    criterion: str = "SIC"
    recal_T: int = 1000
    out: str = ""

    @property
    def trend_knowledge(self) -> TrendKnowledge:
        return TrendKnowledge.coerce(self.scenario)

    @classmethod
    def from_mapping(cls, mode: str, data: dict, base_dir: str = ".") -> "RunConfig":
        if mode not in MODES:
            raise ConfigError(f"mode: must be one of {MODES}, got {mode!r}")
        unknown = set(data) - {"run", *_SECTION_KEYS}
        if unknown:
            raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
        run = _section(data, "run", _RUN_KEYS)
        cfg = cls(mode=mode)
        if "scenario" in run:
            try:
                TrendKnowledge.coerce(run["scenario"])
            except ValueError:
                raise ConfigError(f"run.scenario: expected no_trend, trend or all, got {run['scenario']!r}") from None
            cfg.scenario = str(run["scenario"])
        if "strategies" in run:
            cfg.strategies = _strategies(run["strategies"], "run.strategies")
        for key in ("reps", "seed", "workers", "T", "presample"):
            if key in run:
                setattr(cfg, key, _int(run[key], f"run.{key}"))
        sweep = _section(data, "sweep", _SECTION_KEYS["sweep"])
        if mode == "sweep":
            cfg.sweep_vary = sweep.get("vary", "")
            if cfg.sweep_vary not in PARAM_NAMES:
                raise ConfigError(f"sweep.vary: expected a parameter name, got {cfg.sweep_vary!r}")
            grid = sweep.get("grid")
            if not isinstance(grid, list) or not grid:
                raise ConfigError("sweep.grid: must be a nonempty list of numbers")
            cfg.sweep_grid = tuple(_float(v, f"sweep.grid[{i}]") for i, v in enumerate(grid))
            base = sweep.get("base", {})
            if not isinstance(base, dict):
                raise ConfigError("sweep.base: must be a table of parameter values")
            for k, v in base.items():
                if k not in PARAM_NAMES:
                    raise ConfigError(f"sweep.base.{k}: unknown parameter")
                _float(v, f"sweep.base.{k}")
            cfg.sweep_base = {k: float(v) for k, v in base.items()}
        regret = _section(data, "regret", _SECTION_KEYS["regret"])
        if "metrics" in regret:
            bad = [m for m in regret["metrics"] if m not in METRICS]
            if bad or not regret["metrics"]:
                raise ConfigError(f"regret.metrics: expected a nonempty subset of {METRICS}")
            cfg.metrics = tuple(regret["metrics"])
        sel = _section(data, "select", _SECTION_KEYS["select"])
        if "input" in sel:
            path = str(sel["input"])
            cfg.input = path if os.path.isabs(path) else os.path.join(base_dir, path)
        if "criteria" in sel:
            cfg.criteria = _strategies(sel["criteria"], "select.criteria")
            if any(parse_strategy(c)[0] != "ic" for c in cfg.criteria):
                raise ConfigError("select.criteria: only information criteria and CV are allowed")
        if "criterion" in sel:
            cfg.criterion = str(sel["criterion"])
        recal = _section(data, "recalibrate", _SECTION_KEYS["recalibrate"])
        if "T" in recal:
            cfg.recal_T = _int(recal["T"], "recalibrate.T")
        return cfg

    def apply_overrides(self, args) -> "RunConfig":
        for key in ("seed", "reps", "workers"):
            val = getattr(args, key, None)
            if val is not None:
                setattr(self, key, val)
        if getattr(args, "input", None):
            self.input = args.input
        if getattr(args, "scenario", None):
            self.scenario = args.scenario
        if getattr(args, "out", None):
            self.out = args.out
        return self

    def validate(self) -> "RunConfig":
        if self.reps < 1:
            raise ConfigError(f"reps: must be at least 1, got {self.reps}")
        if self.workers < 1:
            raise ConfigError(f"workers: must be at least 1, got {self.workers}")
        if self.seed < 0:
            raise ConfigError(f"seed: must be nonnegative, got {self.seed}")
        if self.T < 10:
            raise ConfigError(f"T: must be at least 10, got {self.T}")
        if self.presample < 3:
            raise ConfigError(f"presample: must be at least 3, got {self.presample}")
        if not self.strategies:
            raise ConfigError("strategies: at least one strategy is required")
        if self.mode == "sweep":
            for i, value in enumerate(self.sweep_grid):
                try:
                    theta = self.sweep_theta(value)
                except InvalidParamsError as exc:
                    raise ConfigError(f"sweep.grid[{i}]: {exc}") from None
                if classify_params(theta) is None:
                    raise ConfigError(f"sweep.grid[{i}]: parameters do not match any candidate model")
        if self.mode in ("select", "weights") and not self.input:
            raise ConfigError("select.input: an input CSV is required (or pass --input)")
        if self.mode == "weights":
            kind = CriterionKind.coerce(self.criterion)
            if kind in (CriterionKind.CV, CriterionKind.FPEU):
                raise ConfigError(f"select.criterion: weights are not defined for {kind.value}")
        if self.mode == "recalibrate" and self.recal_T < 10:
            raise ConfigError("recalibrate.T: must be at least 10")
        return self

    def sweep_theta(self, value: float) -> DgpParams:
        params = dict(self.sweep_base)
        params[self.sweep_vary] = value
        return DgpParams(**params)


def _section(data, name, allowed) -> dict:
    sec = data.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}]: must be a table")
    extra = set(sec) - allowed
    if extra:
        raise ConfigError(f"[{name}]: unknown key(s) {', '.join(sorted(extra))}")
    return sec


def _int(value, where) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    return value


def _float(value, where) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _strategies(value, where) -> tuple:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where}: must be a nonempty list")
    for i, s in enumerate(value):
        try:
            parse_strategy(s)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{where}[{i}]: {exc}") from None
    return tuple(str(s) for s in value)


def load_config(path, mode: str) -> RunConfig:
    """Read a TOML config file.

    Raises
    ------
    ConfigError
        On syntax errors (with line and column) or invalid fields.
    """
    if path is None:
        return RunConfig(mode=mode)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        return RunConfig.from_mapping(mode, data, os.path.dirname(os.path.abspath(path)))
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# commands

def _progress(done, total, cell):
    log.info("cell %d/%d (%s) done", done, total, cell.true_model)


def cmd_sweep(cfg: RunConfig) -> str:
    """Run every grid point and return the CSV text."""
    thetas = [cfg.sweep_theta(v) for v in cfg.sweep_grid]
    cells = run_cells(thetas, cfg.strategies, cfg.reps, cfg.seed, cfg.trend_knowledge,
                      workers=cfg.workers, T=cfg.T, presample=cfg.presample, progress=_progress)
    buf = io.StringIO()
    buf.write(f"# tsselect {__version__} seed={cfg.seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([cfg.sweep_vary, "true_model", "strategy", "freq_model", "freq_relation",
                     "ln_mean_l2", "n_degenerate", "replications"])
    for value, cell in zip(cfg.sweep_grid, cells):
        for s in cell.strategies:
            sc = cell.scores[s]
            ln = math.log(sc.mean_l2) if sc.mean_l2 > 0 else float("-inf")
            writer.writerow([repr(value), str(cell.true_model), s, f"{sc.freq_correct_model:.6f}",
                             f"{sc.freq_correct_relation:.6f}", f"{ln:.10g}", sc.n_degenerate,
                             cell.replications])
    return buf.getvalue()


def cmd_regret(cfg: RunConfig, out_dir: str) -> dict:
    """Run the permutation grid of the scenario and write the regret tables.

    Writes ``cells.csv`` and ``regret_<metric>.csv`` under ``out_dir``.

    Returns
    -------
    dict
        ``metric -> RegretTable``.
    """
    perms = enumerate_permutations(cfg.scenario)
    log.info("%s: %d permutations, %d reps each", cfg.scenario, len(perms), cfg.reps)
    os.makedirs(out_dir, exist_ok=True)
    done = []

    def progress(n, total, cell):
        done.append(cell)
        _progress(n, total, cell)

    try:
        cells = run_cells([p[0] for p in perms], cfg.strategies, cfg.reps, cfg.seed, cfg.trend_knowledge,
                          workers=cfg.workers, T=cfg.T, presample=cfg.presample, progress=progress)
    except KeyboardInterrupt:
        if done:
            write_cells_csv(done, os.path.join(out_dir, "cells.partial.csv"), cfg.seed)
        raise
    write_cells_csv(cells, os.path.join(out_dir, "cells.csv"), cfg.seed)
    tables = {}
    for metric in cfg.metrics:
        table = regret_matrix(cells, metric)
        write_regret_csv(table, os.path.join(out_dir, f"regret_{metric}.csv"), cfg.seed)
        tables[metric] = table
        log.info("%s: minimax winner %s", metric, table.minimax_winner())
    return tables


def _read_input(path) -> SeriesPair:
    try:
        data = SeriesPair.from_csv(path, presample_len=3)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if data.sample_len < MIN_OBSERVATIONS:
        raise ConfigError(f"{path}: {data.sample_len} usable observations after 3 lag rows; "
                          f"at least {MIN_OBSERVATIONS} needed")
    return data


def _fit_all(data: SeriesPair, trend_knowledge):
    fits, diagnostics = [], []
    for model in sorted(choosable_set(trend_knowledge)):
        try:
            fits.append((model, fit_model(model, data)))
        except RankDeficiencyError as exc:
            diagnostics.append({"model": str(model), "error": "rank_deficient",
                                "regressor": exc.name, "message": str(exc)})
    if not fits:
        raise NumericalError("no candidate model could be estimated")
    return fits, diagnostics


def cmd_select(cfg: RunConfig) -> dict:
    """Fit every choosable model to the input and build the selection report.

    The report holds per-criterion rankings, evidence weights with the
    weighted coefficients, each testing strategy's choice with its trace and
    rank-deficiency diagnostics naming the offending regressor.
    """
    data = _read_input(cfg.input)
    tk = cfg.trend_knowledge
    fits, diagnostics = _fit_all(data, tk)
    report = {"version": __version__, "input": cfg.input, "observations": data.sample_len,
              "trend_knowledge": tk.value, "rankings": {}, "weights": {}, "model_average": {},
              "strategies": {}, "diagnostics": diagnostics}
    for crit in cfg.criteria:
        kind = CriterionKind.coerce(crit)
        values = [(m, _criterion_or_inf(kind, f)) for m, f in fits]
        scored = sorted(values, key=lambda t: (t[1], t[0]))
        report["rankings"][kind.value] = [{"model": str(m), "value": _json_float(v)} for m, v in scored]
        if kind in (CriterionKind.CV, CriterionKind.FPEU):
            continue
        wt = evidence_weights(values)
        report["weights"][kind.value] = [{"model": str(m), "ic": ic, "delta": d, "weight": w}
                                         for m, ic, d, w in wt]
        avg = model_average(fits, wt)
        report["model_average"][kind.value] = avg
    from .hyptest import strategy_run

    for name in TEST_STRATEGIES:
        variant, profile = parse_strategy(name)[1:]
        try:
            res = strategy_run(data, variant, profile, tk)
        except (RankDeficiencyError, np.linalg.LinAlgError, FloatingPointError) as exc:
            report["strategies"][name] = {"error": str(exc)}
            continue
        report["strategies"][name] = {
            "model": str(res.chosen),
            "relation": res.relation.value,
            "trace": [{"test": e.test, "statistic": _json_float(e.statistic), "decision": e.decision,
                       "branch": e.branch} for e in res.trace],
        }
    return report


def cmd_weights(cfg: RunConfig) -> str:
    """Evidence weights and model-averaged coefficients as CSV text."""
    data = _read_input(cfg.input)
    fits, diagnostics = _fit_all(data, cfg.trend_knowledge)
    for d in diagnostics:
        log.warning("%s skipped: rank deficient in %s", d["model"], d["regressor"])
    kind = CriterionKind.coerce(cfg.criterion)
    wt = evidence_weights([(m, _criterion_or_inf(kind, f)) for m, f in fits])
    avg = model_average(fits, wt)
    buf = io.StringIO()
    buf.write(f"# tsselect {__version__} criterion={kind.value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "ic", "delta", "weight"])
    for m, ic, d, w in wt:
        writer.writerow([str(m), f"{ic:.10g}", f"{d:.10g}", f"{w:.12g}"])
    writer.writerow([])
    writer.writerow(["role", "average_coefficient", "inclusion_weight"])
    for role, value in avg["coefficients"].items():
        writer.writerow([role, f"{value:.10g}", f"{avg['inclusion'][role]:.12g}"])
    return buf.getvalue()


def cmd_recalibrate(cfg: RunConfig) -> str:
    """Simulated critical values at ``recalibrate.T`` as table CSV text."""
    from .calibrate import simulate_critical_values

    table = simulate_critical_values(cfg.recal_T, cfg.reps, cfg.seed,
                                     progress=lambda n, tot, name: log.info("%s done (%d/%d)", name, n, tot))
    return table.to_csv()


def _criterion_or_inf(kind, fit) -> float:
    try:
        return criterion_of_fit(kind, fit)
    except (CriterionDomainError, DegenerateLeverageError):
        return math.inf


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else None


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsselect", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"tsselect {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="TOML configuration file")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--reps", type=int, help="replications per cell")
        p.add_argument("--workers", type=int, help="worker processes")
        p.add_argument("--out", help="output file (directory for regret); stdout if omitted")
        p.add_argument("--scenario", choices=("no_trend", "trend", "all"), help="trend scenario")
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
        if mode in ("select", "weights"):
            p.add_argument("--input", help="CSV with y,z columns")
    return parser


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config, args.mode).apply_overrides(args)
        if args.mode == "recalibrate" and args.reps is None and args.config is None:
            cfg.reps = 500_000
        cfg.validate()
        if cfg.mode == "sweep":
            _emit(cmd_sweep(cfg), cfg.out)
        elif cfg.mode == "regret":
            tables = cmd_regret(cfg, cfg.out or "regret_out")
            for metric, table in tables.items():
                print(f"{metric}: minimax winner {table.minimax_winner()}")
        elif cfg.mode == "select":
            _emit(json.dumps(cmd_select(cfg), indent=2) + "\n", cfg.out)
        elif cfg.mode == "weights":
            _emit(cmd_weights(cfg), cfg.out)
        else:
            _emit(cmd_recalibrate(cfg), cfg.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, RankDeficiencyError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
