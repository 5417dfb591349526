"""Experiment harness: parameter sweeps, oracle selection, reports.

A sweep is a pure function of its configuration and seed list: datasets,
dictionaries, and any per-method randomness all derive from the master
seed through fixed counters, so reruns are reproducible byte for byte
(timing can be suppressed for exact comparisons).  One k-capped greedy
fit yields every prefix model, so k-sweeps cost a single fit; threshold
and regularization sweeps rerun the fit per grid point.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import algorithms, baselines
from .core import FIXED_K, DesignMatrix, FitReport
from .data import gen_sinc, load_csv, split_half, zscore_fit_apply
from .dictionary import (
    RbfSpec,
    build_rbf_from_samples,
    build_rbf_uniform,
    evaluate_atoms,
    evaluate_design,
    normalize_columns,
)
from .greedy import Criterion
from .linalg import empirical_norm, rmse, truncate_values

GREEDY_ALGORITHMS = ("ogl", "togl", "dtogl", "pgl")
DENSE_ALGORITHMS = ("ridge", "fista")

_K_SWEEP_CAP = 300
DEFAULT_DELTA_GRID = (1e-6, 0.5, 50)
DEFAULT_LAMBDA_GRID = (1e-8, 1e2, 30)

REPORT_COLUMNS = (
    "method",
    "param",
    "sigma",
    "seed",
    "test_rmse",
    "train_rmse",
    "sparsity",
    "iterations",
    "termination",
    "seconds",
)

_CRITERIA_BY_ALGO = {
    "ogl": ("max", "max2", "max3", "rand"),
    "togl": ("max", "max2", "max3", "rand", "first"),
    "dtogl": ("max", "max2", "max3", "rand", "first"),
}


class EmptyTable(ValueError):
    """Oracle selection over zero rows."""


class IoError(OSError):
    """Report emission failed at the filesystem level."""


def time_fit(thunk):
    """Run a fit thunk under a monotonic clock; returns (result, seconds)."""
    start = time.perf_counter()
    result = thunk()
    return result, time.perf_counter() - start


@dataclass(frozen=True)
class MethodSpec:
    """One benchmark method: algorithm, optional criterion, optional pinned parameter."""

    algorithm: str
    criterion: str | None = None
    param: float | None = None

    def __post_init__(self):
        if self.algorithm in _CRITERIA_BY_ALGO:
            crit = self.criterion or ("first" if self.algorithm == "dtogl" else "max")
            if crit not in _CRITERIA_BY_ALGO[self.algorithm]:
                raise ValueError(
                    f"{self.algorithm} does not support criterion {crit!r}"
                )
            object.__setattr__(self, "criterion", crit)
        elif self.algorithm in ("pgl",) + DENSE_ALGORITHMS:
            if self.criterion is not None:
                raise ValueError(f"{self.algorithm} takes no criterion")
        else:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")

    @property
    def label(self) -> str:
        if self.criterion is None:
            return self.algorithm
        return f"{self.algorithm}:{self.criterion}"


def parse_method(text: str) -> MethodSpec:
    """Parse encodings like 'ogl:max', 'dtogl:first@1e-4', 'ridge@0.01'."""
    text = text.strip()
    param = None
    if "@" in text:
        text, param_text = text.rsplit("@", 1)
        param = float(param_text)
    if ":" in text:
        algorithm, criterion = text.split(":", 1)
        return MethodSpec(algorithm, criterion, param)
    return MethodSpec(text, None, param)


@dataclass
class ExperimentConfig:
    """Everything a sweep needs; grids of None take task-sized defaults."""

    task: str = "sinc"
    methods: list = field(default_factory=list)
    seeds: list = field(default_factory=lambda: [0])
    # sinc task
    m_train: int = 1000
    m_test: int = 1000
    n: int = 300
    sigmas: list = field(default_factory=lambda: [0.1, 0.5, 1.0, 2.0])
    eta: float = 1.0
    # csv task
    csv_path: str | None = None
    target_column: object = "last"
    header: bool = True
    # shared
    normalize_atoms: bool = True
    k_grid: list | None = None
    delta_grid: list | None = None
    lambda_grid: list | None = None
    pgl_cap: int = 10000
    include_materialization: bool = False
    timing: bool = True

    def validate(self) -> "ExperimentConfig":
        if self.task not in ("sinc", "csv"):
            raise ValueError(f"unknown task {self.task!r}")
        if not self.methods:
            raise ValueError("at least one method required")
        if not self.seeds:
            raise ValueError("at least one seed required")
        if self.task == "sinc" and not self.sigmas:
            raise ValueError("at least one noise level required")
        if self.task == "csv" and not self.csv_path:
            raise ValueError("csv task requires a path")
        for grid_name in ("k_grid", "delta_grid", "lambda_grid"):
            grid = getattr(self, grid_name)
            if grid is not None and len(grid) == 0:
                raise ValueError(f"{grid_name} must be nonempty")
        return self


def _resolve_grids(config: ExperimentConfig, n_dict: int) -> dict:
    if config.k_grid is not None:
        k_grid = [int(k) for k in config.k_grid]
    else:
        k_grid = list(range(0, min(n_dict, _K_SWEEP_CAP) + 1))
    if config.delta_grid is not None:
        delta_grid = [float(d) for d in config.delta_grid]
    else:
        delta_grid = list(np.geomspace(*DEFAULT_DELTA_GRID))
    if config.lambda_grid is not None:
        lam_grid = [float(lam) for lam in config.lambda_grid]
    else:
        lam_grid = list(np.geomspace(*DEFAULT_LAMBDA_GRID))
    return {
        "ogl": k_grid,
        "pgl": k_grid,
        "togl": delta_grid,
        "dtogl": delta_grid,
        "ridge": lam_grid,
        "fista": lam_grid,
    }


@dataclass
class _Cell:
    """Shared per-(sigma, seed) state: data, dictionary, designs."""

    dm_fit: DesignMatrix
    test_columns: np.ndarray
    spec: RbfSpec
    y: np.ndarray
    y_norm: float
    y_test: np.ndarray
    bound: float
    rmse_scale: float
    materialize_seconds: float


def _prepare_cell(config, full_dataset, sigma_idx, seed) -> _Cell:
    if config.task == "sinc":
        sigma = config.sigmas[sigma_idx]
        data_rng = np.random.default_rng([seed, 11, sigma_idx])
        train, test = gen_sinc(config.m_train, config.m_test, sigma, data_rng)
        dict_rng = np.random.default_rng([seed, 13, sigma_idx])
        spec = build_rbf_uniform(config.n, -np.pi, np.pi, config.eta, dict_rng)
        rmse_scale = 1.0
    else:
        split_rng = np.random.default_rng([seed, 17])
        train_raw, test_raw = split_half(full_dataset, split_rng)
        train, test, zparams = zscore_fit_apply(train_raw, test_raw)
        spec = build_rbf_from_samples(train.inputs)
        rmse_scale = zparams.target_std
    start = time.perf_counter()
    dm = evaluate_design(spec, train.inputs)
    dm_fit = normalize_columns(dm) if config.normalize_atoms else dm
    test_columns = evaluate_atoms(spec, test.inputs)
    materialize_seconds = time.perf_counter() - start
    y = train.targets
    return _Cell(
        dm_fit=dm_fit,
        test_columns=test_columns,
        spec=spec,
        y=y,
        y_norm=empirical_norm(y),
        y_test=test.targets,
        bound=float(np.max(np.abs(y))),
        rmse_scale=rmse_scale,
        materialize_seconds=materialize_seconds,
    )


def _test_rmse(cell: _Cell, predictions) -> float:
    clipped = truncate_values(predictions, cell.bound)
    return rmse(clipped, cell.y_test) * cell.rmse_scale


def _prefix_rows(method, grid, cell, trace, seconds, sigma, seed):
    """One row per requested k, all derived from a single capped fit."""
    preds = algorithms.prefix_predictions(trace, cell.test_columns, grid)
    rows = []
    for k in grid:
        k_eff = min(int(k), trace.k_fitted)
        model = trace.prefix_model(k_eff)
        train_res = cell.y_norm if k_eff == 0 else trace.residual_norms[k_eff - 1]
        termination = FIXED_K if k_eff < trace.k_fitted else trace.termination_reason
        rows.append(
            FitReport(
                method=method.label,
                parameter=int(k),
                sigma=sigma,
                seed=seed,
                test_rmse=_test_rmse(cell, preds[int(k)]),
                train_rmse=train_res * cell.rmse_scale,
                sparsity=model.sparsity,
                iterations=k_eff,
                termination=termination,
                seconds=seconds,
            )
        )
    return rows


def _model_row(method, param, cell, trace, seconds, sigma, seed):
    model = trace.final_model()
    pred = (
        cell.test_columns[:, list(model.selected)] @ model.coefficients
        if model.sparsity
        else np.zeros(cell.y_test.shape[0])
    )
    train_res = trace.residual_norms[-1] if trace.residual_norms else cell.y_norm
    return FitReport(
        method=method.label,
        parameter=param,
        sigma=sigma,
        seed=seed,
        test_rmse=_test_rmse(cell, pred),
        train_rmse=train_res * cell.rmse_scale,
        sparsity=model.sparsity,
        iterations=trace.iterations,
        termination=trace.termination_reason,
        seconds=seconds,
    )


def _dense_row(method, param, cell, model, seconds, sigma, seed):
    coef_raw = cell.dm_fit.to_raw_coefficients(model.coefficients)
    pred = cell.test_columns @ coef_raw
    train_pred = cell.dm_fit.columns @ model.coefficients
    iterations = model.iterations_used if method.algorithm == "fista" else cell.dm_fit.n
    return FitReport(
        method=method.label,
        parameter=param,
        sigma=sigma,
        seed=seed,
        test_rmse=_test_rmse(cell, pred),
        train_rmse=rmse(train_pred, cell.y) * cell.rmse_scale,
        sparsity=model.sparsity(),
        iterations=iterations,
        termination=FIXED_K,
        seconds=seconds,
    )


def _failed_row(method, param, sigma, seed, exc) -> FitReport:
    return FitReport(
        method=method.label,
        parameter=param,
        sigma=sigma,
        seed=seed,
        test_rmse=float("inf"),
        train_rmse=float("inf"),
        sparsity=0,
        iterations=0,
        termination=f"error:{type(exc).__name__}",
        seconds=0.0,
    )


def _run_method(method, grid, cell, config, sigma, sigma_idx, seed, method_idx):
    extra = cell.materialize_seconds if config.include_materialization else 0.0
    dm, y = cell.dm_fit, cell.y
    algo = method.algorithm

    if algo in ("ogl", "pgl"):
        k_cap = max([1] + [int(k) for k in grid])
        try:
            if algo == "ogl":
                rng = np.random.default_rng([seed, 19, sigma_idx, method_idx])
                criterion = Criterion(method.criterion)
                trace, seconds = time_fit(
                    lambda: algorithms.fit_ogl(dm, y, criterion, min(k_cap, dm.n), rng)
                )
            else:
                trace, seconds = time_fit(
                    lambda: algorithms.fit_pgl(dm, y, min(k_cap, config.pgl_cap))
                )
        except Exception as exc:  # flagged rows, sweep continues
            return [_failed_row(method, int(k), sigma, seed, exc) for k in grid]
        return _prefix_rows(method, grid, cell, trace, seconds + extra, sigma, seed)

    rows = []
    for param in grid:
        param = float(param)
        try:
            if algo == "togl":
                rng = np.random.default_rng([seed, 19, sigma_idx, method_idx])
                criterion = Criterion(method.criterion, param)
                k_cap = min(dm.n, _K_SWEEP_CAP)
                trace, seconds = time_fit(
                    lambda: algorithms.fit_togl(dm, y, criterion, k_cap, rng)
                )
                rows.append(
                    _model_row(method, param, cell, trace, seconds + extra, sigma, seed)
                )
            elif algo == "dtogl":
                rng = np.random.default_rng([seed, 19, sigma_idx, method_idx])
                trace, seconds = time_fit(
                    lambda: algorithms.fit_delta_togl(dm, y, param, method.criterion, rng)
                )
                rows.append(
                    _model_row(method, param, cell, trace, seconds + extra, sigma, seed)
                )
            elif algo == "ridge":
                model, seconds = time_fit(lambda: baselines.fit_ridge(dm, y, param))
                rows.append(
                    _dense_row(method, param, cell, model, seconds + extra, sigma, seed)
                )
            else:
                model, seconds = time_fit(lambda: baselines.fit_fista(dm, y, param))
                rows.append(
                    _dense_row(method, param, cell, model, seconds + extra, sigma, seed)
                )
        except Exception as exc:
            rows.append(_failed_row(method, param, sigma, seed, exc))
    return rows


def sweep(config: ExperimentConfig) -> list:
    """Run every (method, parameter, seed, sigma) combination.

    Row count is sum over methods of grid size x seeds x sigmas;
    failures become flagged rows rather than aborting.  Output order is
    method, then sigma, then parameter, then seed.
    """
    config.validate()
    full_dataset = None
    if config.task == "csv":
        full_dataset = load_csv(config.csv_path, config.target_column, config.header)
        n_dict = (full_dataset.m + 1) // 2
        sigma_values = [None]
    else:
        n_dict = config.n
        sigma_values = list(config.sigmas)
    grids = _resolve_grids(config, n_dict)

    keyed = []
    for sigma_idx, sigma in enumerate(sigma_values):
        for seed in config.seeds:
            cell = _prepare_cell(config, full_dataset, sigma_idx, seed)
            for method_idx, method in enumerate(config.methods):
                grid = grids[method.algorithm]
                rows = _run_method(
                    method, grid, cell, config, sigma, sigma_idx, seed, method_idx
                )
                for grid_pos, row in enumerate(rows):
                    keyed.append(((method_idx, sigma_idx, grid_pos, seed), row))
    keyed.sort(key=lambda pair: pair[0])
    return [row for _, row in keyed]


@dataclass(frozen=True)
class OracleRow:
    """Grid point with the best mean test RMSE for one (method, sigma)."""

    method: str
    sigma: float | None
    parameter: float
    mean_test_rmse: float
    se_test_rmse: float
    mean_train_rmse: float
    mean_sparsity: float
    mean_iterations: float
    mean_seconds: float
    n_seeds: int


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / np.sqrt(values.size))


def oracle_select(rows, metric: str = "test_rmse") -> list:
    """Best grid point per (method, sigma) by mean of ``metric`` over seeds.

    Ties prefer the smaller parameter, then the smaller mean sparsity.
    """
    if not rows:
        raise EmptyTable("no rows to select from")
    grouped = {}
    for row in rows:
        grouped.setdefault((row.method, row.sigma, row.parameter), []).append(row)

    candidates = {}
    for (method, sigma, param), cell_rows in grouped.items():
        mean_metric, se_metric = _mean_se([getattr(r, metric) for r in cell_rows])
        summary = OracleRow(
            method=method,
            sigma=sigma,
            parameter=param,
            mean_test_rmse=_mean_se([r.test_rmse for r in cell_rows])[0],
            se_test_rmse=_mean_se([r.test_rmse for r in cell_rows])[1],
            mean_train_rmse=_mean_se([r.train_rmse for r in cell_rows])[0],
            mean_sparsity=float(np.mean([r.sparsity for r in cell_rows])),
            mean_iterations=float(np.mean([r.iterations for r in cell_rows])),
            mean_seconds=float(np.mean([r.seconds for r in cell_rows])),
            n_seeds=len(cell_rows),
        )
        key = (method, sigma)
        order = (mean_metric, param, summary.mean_sparsity)
        if key not in candidates or order < candidates[key][0]:
            candidates[key] = (order, summary)

    ordered = sorted(
        candidates.values(),
        key=lambda pair: (pair[1].method, _sigma_sort(pair[1].sigma)),
    )
    return [summary for _, summary in ordered]


def _sigma_sort(sigma):
    return -1.0 if sigma is None else float(sigma)


def total_fit_seconds(rows, method_label: str) -> float:
    """Total fitting time a method spent across its sweep.

    k-sweep methods (ogl, pgl) derive all their grid rows from one fit
    per (sigma, seed), so their per-row seconds are shared; per-parameter
    methods pay one fit per row.
    """
    mine = [r for r in rows if r.method == method_label]
    algorithm = method_label.split(":", 1)[0]
    if algorithm in ("ogl", "pgl"):
        per_cell = {}
        for r in mine:
            per_cell[(r.sigma, r.seed)] = r.seconds
        return float(sum(per_cell.values()))
    return float(sum(r.seconds for r in mine))


# --- report emission / loading ---


def _format_field(value, timing=True):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _row_record(row: FitReport, timing: bool) -> list:
    seconds = row.seconds if timing else 0.0
    return [
        row.method,
        _format_field(row.parameter),
        _format_field(row.sigma),
        str(row.seed),
        repr(float(row.test_rmse)),
        repr(float(row.train_rmse)),
        str(row.sparsity),
        str(row.iterations),
        row.termination,
        repr(float(seconds)),
    ]


def report_row_to_line(row: FitReport, timing: bool = True) -> str:
    return ",".join(_row_record(row, timing))


def report_row_from_line(line: str) -> FitReport:
    parts = line.rstrip("\n").split(",")
    if len(parts) != len(REPORT_COLUMNS):
        raise ValueError(f"expected {len(REPORT_COLUMNS)} fields, got {len(parts)}")
    param_text = parts[1]
    try:
        parameter = int(param_text)
    except ValueError:
        parameter = float(param_text)
    return FitReport(
        method=parts[0],
        parameter=parameter,
        sigma=None if parts[2] == "" else float(parts[2]),
        seed=int(parts[3]),
        test_rmse=float(parts[4]),
        train_rmse=float(parts[5]),
        sparsity=int(parts[6]),
        iterations=int(parts[7]),
        termination=parts[8],
        seconds=float(parts[9]),
    )


def _aggregate_lines(rows, timing: bool) -> list:
    lines = [
        "#aggregate,method,sigma,param,test_rmse(se),train_rmse,sparsity,seconds"
    ]
    for summary in oracle_select(rows):
        sigma_text = "" if summary.sigma is None else f"{summary.sigma:g}"
        seconds = summary.mean_seconds if timing else 0.0
        lines.append(
            "#aggregate,{},{},{:g},{:.4f}({:.4f}),{:.4f},{:.1f},{:.4f}".format(
                summary.method,
                sigma_text,
                summary.parameter,
                summary.mean_test_rmse,
                summary.se_test_rmse,
                summary.mean_train_rmse,
                summary.mean_sparsity,
                seconds,
            )
        )
    return lines


def render_report(rows, fmt: str = "csv", timing: bool = True) -> str:
    """Render rows plus the oracle aggregate block as csv or markdown."""
    if not rows:
        raise EmptyTable("no rows to report")
    if fmt == "csv":
        lines = [",".join(REPORT_COLUMNS)]
        lines += [report_row_to_line(row, timing) for row in rows]
        lines += _aggregate_lines(rows, timing)
    elif fmt == "markdown":
        lines = ["| " + " | ".join(REPORT_COLUMNS) + " |"]
        lines.append("|" + "---|" * len(REPORT_COLUMNS))
        for row in rows:
            lines.append("| " + " | ".join(_row_record(row, timing)) + " |")
        lines.append("")
        for agg in _aggregate_lines(rows, timing):
            lines.append("| " + " | ".join(agg.split(",")[1:]) + " |")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return "\n".join(lines) + "\n"


def emit_report(rows, path, fmt: str = "csv", timing: bool = True) -> None:
    text = render_report(rows, fmt, timing)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_report(path) -> list:
    """Read back the data rows of a CSV report (aggregate block skipped)."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if i == 0 and line == ",".join(REPORT_COLUMNS):
                continue
            rows.append(report_row_from_line(line))
    return rows
