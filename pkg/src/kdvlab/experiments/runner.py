"""Single runs and parameter sweeps."""
from __future__ import annotations

import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..exact import (
    SolitonParams,
    TsutsumiParams,
    miura_transform,
    soliton,
    tsutsumi_data,
)
from ..grid import GridFunction
from ..interp import l2_distance, l2_error, l2_norm, p1
from ..stepper import RunResult, run
from . import output
from .config import ConfigError, RunConfig, dump_config

log = logging.getLogger(__name__)

__all__ = [
    "SweepRow",
    "SweepReport",
    "MiuraReport",
    "SolveResult",
    "initial_data",
    "cmd_solve",
    "cmd_convergence",
    "cmd_viscosity_sweep",
    "cmd_miura",
]


def initial_data(config: RunConfig) -> GridFunction:
    grid = config.grid()
    if config.initial == "soliton":
        p = SolitonParams(config.k, config.c)
        return grid.sample(lambda x: soliton(x, 0.0, p))
    if config.initial == "tsutsumi":
        try:
            return tsutsumi_data(grid, TsutsumiParams(config.c, config.eps))
        except ValueError as exc:
            raise ConfigError(f"[initial] c: {exc}") from None
    if config.initial == "zero":
        return grid.zeros()
    try:
        _, records = output.read_table(config.path)
        data = np.array([[float(r[0]), float(r[1])] for r in records if r]).reshape(-1, 2)
        if len(data) == 0:
            raise ValueError("no data rows")
    except (OSError, ValueError, IndexError) as exc:
        raise ConfigError(f"[initial] path: cannot read {config.path}: {exc}") from None
    order = np.argsort(data[:, 0])
    return GridFunction(grid, np.interp(grid.x, data[order, 0], data[order, 1], left=0.0, right=0.0))


def exact_solution(config: RunConfig):
    """Reference solution ``f(x, t)`` when one is known, else None."""
    if config.initial == "soliton":
        p = SolitonParams(config.k, config.c)
        return lambda x, t: soliton(x, t, p)
    if config.initial == "zero":
        return lambda x, t: np.zeros_like(x)
    return None


def error_window(config: RunConfig, t: float) -> tuple[float, float]:
    a, b = config.error_window()
    if config.window_mode == "moving" and config.initial == "soliton":
        shift = config.c**2 * t
        return a + shift, b + shift
    return a, b


def relative_error(config: RunConfig, result: RunResult) -> float:
    f = exact_solution(config)
    if f is None or config.initial == "zero":
        return math.nan
    t = result.times[-1]
    return l2_error(result.final, lambda x: f(x, t), error_window(config, t), relative=True)


def simulate(config: RunConfig, snapshot_times=()) -> RunResult:
    u0 = initial_data(config)
    return run(u0, config.model(), config.stepper(), config.T, snapshot_times=snapshot_times)


# ---------------------------------------------------------------- solve


@dataclass
class SolveResult:
    config: RunConfig
    result: RunResult
    status: str
    error: float
    paths: dict[str, Path] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def snapshot_name(index: int, t: float) -> str:
    return f"snapshot_{index:03d}_t{t:.6g}.csv"


def cmd_solve(config: RunConfig, out_dir=None) -> SolveResult:
    """Run one simulation and write snapshots, diagnostics and a manifest."""
    out = Path(out_dir or config.output_dir)
    times = config.snapshot_times or (0.0, config.T)
    result = simulate(config, snapshot_times=times)
    status = "ok" if result.completed else "failed"
    err = relative_error(config, result) if result.completed else math.nan
    paths = {}
    out.mkdir(parents=True, exist_ok=True)
    for i, (t, state) in enumerate(sorted(result.snapshots.items())):
        paths[f"snapshot_{i}"] = output.write_table(
            out / snapshot_name(i, t),
            ["x", "u"],
            zip(state.grid.x, state.values),
            comments=[f"t = {t!r}"],
        )
    iters = [0] + result.newton_iters
    defects = [0.0] + result.energy_defects
    paths["diagnostics"] = output.write_table(
        out / "diagnostics.csv",
        ["t", "l2_norm", "newton_iters", "energy_defect", "smoothing_accumulator"],
        zip(result.times, result.l2_norms, iters, defects, result.smoothing),
        comments=[f"T = {config.T!r}", f"window = {error_window(config, result.times[-1])!r}"],
    )
    summary = {
        "status": status,
        "steps": str(result.steps),
        "final_time": repr(result.times[-1]),
        "relative_l2_error": repr(err),
    }
    if result.failure is not None:
        summary["message"] = str(result.failure).replace("\n", " ")
    manifest = out / "manifest.ini"
    manifest.write_text(dump_config(config.replace(output_dir=str(out)), summary))
    paths["manifest"] = manifest
    return SolveResult(config, result, status, err, paths)


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class SweepRow:
    value: float
    h: float
    error: float
    runtime: float
    newton_mean: float
    newton_max: int
    status: str


@dataclass
class SweepReport:
    """Rows of a sweep over ``key`` (``n_points`` or ``eta``), in sweep order."""

    key: str
    rows: list[SweepRow]
    meta: dict[str, str] = field(default_factory=dict)

    @property
    def orders(self) -> list[float]:
        """Observed orders ``log(e_i/e_{i+1}) / log(h_i/h_{i+1})`` for grid sweeps."""
        out = []
        for a, b in zip(self.rows, self.rows[1:]):
            ok = a.status == b.status == "ok" and a.error > 0 and b.error > 0 and a.h != b.h
            out.append(math.log(a.error / b.error) / math.log(a.h / b.h) if ok else math.nan)
        return out

    def errors(self) -> list[float]:
        return [r.error for r in self.rows]


def _evaluate(config: RunConfig, allow_failure: bool = False) -> SweepRow:
    start = time.perf_counter()
    result = simulate(config)
    runtime = time.perf_counter() - start
    iters = result.newton_iters or [0]
    if result.completed:
        status, err = "ok", relative_error(config, result)
    else:
        status, err = ("failed-permitted" if allow_failure else "failed"), math.nan
        log.warning("run failed (n=%d, eta=%g): %s", config.n_points, config.eta, result.failure)
    return SweepRow(
        value=math.nan,
        h=config.grid().h,
        error=err,
        runtime=runtime,
        newton_mean=float(np.mean(iters)),
        newton_max=int(max(iters)),
        status=status,
    )


def _fan_out(configs, allow_failure, workers):
    flags = [allow_failure(c) for c in configs]
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_evaluate, configs, flags))
    return [_evaluate(c, f) for c, f in zip(configs, flags)]


def _sweep_meta(config: RunConfig, **extra) -> dict[str, str]:
    meta = {
        "k": str(config.k),
        "T": repr(config.T),
        "window": repr(config.error_window()),
        "window_mode": config.window_mode,
        "boundary": config.boundary,
        "domain": repr((config.x_min, config.x_max)),
    }
    meta.update({k: str(v) for k, v in extra.items()})
    return meta


def cmd_convergence(base: RunConfig, grid_list, tau_list, out_dir=None, workers: int = 1) -> list[SweepReport]:
    """Error against the exact soliton for every ``(n, tau)``; one report per tau."""
    grid_list = [int(n) for n in grid_list]
    if any(b <= a for a, b in zip(grid_list, grid_list[1:])):
        raise ConfigError("grid list must be strictly increasing")
    if base.initial != "soliton":
        raise ConfigError("[initial] kind: convergence studies need soliton data")
    tau_list = sorted({float(t) for t in tau_list}, reverse=True)
    configs = [base.replace(n_points=n, tau=tau) for tau, n in itertools.product(tau_list, grid_list)]
    rows = _fan_out(configs, lambda c: False, workers)
    reports = []
    for i, tau in enumerate(tau_list):
        chunk = rows[i * len(grid_list) : (i + 1) * len(grid_list)]
        chunk = [_with_value(r, n) for r, n in zip(chunk, grid_list)]
        reports.append(SweepReport("n_points", chunk, _sweep_meta(base, tau=repr(tau), eta=repr(base.eta))))
    if out_dir is not None:
        out = Path(out_dir)
        for rep in reports:
            output.write_sweep_csv(out / f"convergence_k{base.k}_tau{rep.meta['tau']}.csv", rep)
        output.write_sweep_svg(out / f"convergence_k{base.k}.svg", reports, xlabel="number of points")
    return reports


def cmd_viscosity_sweep(base: RunConfig, eta_list, out_dir=None, workers: int = 1) -> SweepReport:
    """Error against the exact soliton for each eta, sorted descending; eta = 0 may fail."""
    etas = sorted({float(e) for e in eta_list}, reverse=True)
    if any(e < 0 for e in etas):
        raise ConfigError("[model] eta: sweep values must be >= 0")
    if base.initial != "soliton":
        raise ConfigError("[initial] kind: viscosity sweeps need soliton data")
    configs = [base.replace(eta=e) for e in etas]
    rows = _fan_out(configs, lambda c: c.eta == 0, workers)
    rows = [_with_value(r, e) for r, e in zip(rows, etas)]
    report = SweepReport("eta", rows, _sweep_meta(base, tau=repr(base.tau), n_points=base.n_points))
    if out_dir is not None:
        out = Path(out_dir)
        output.write_sweep_csv(out / f"viscosity_k{base.k}.csv", report)
        output.write_sweep_svg(out / f"viscosity_k{base.k}.svg", [report], xlabel="eta")
    return report


def _with_value(row: SweepRow, value) -> SweepRow:
    return SweepRow(float(value), row.h, row.error, row.runtime, row.newton_mean, row.newton_max, row.status)


# ---------------------------------------------------------------- Miura


@dataclass
class MiuraReport:
    """Miura images of mKdV solutions for several ``(c, eps)`` pairs and resolutions.

    ``pairwise`` holds the relative distance between every two pairs at the
    finest level; ``self_distance`` holds, per pair, the relative distance
    between its two finest levels.  Distances are
    ``||P - Q|| / max(||P||, ||Q||)`` in L2 over ``window``.
    """

    window: tuple[float, float]
    levels: list[int]
    profiles: dict[tuple[tuple[float, float], int], GridFunction]
    status: dict[tuple[tuple[float, float], int], str]
    pairwise: dict[tuple[tuple[float, float], tuple[float, float]], float]
    self_distance: dict[tuple[float, float], float]

    def separation(self, a, b) -> float:
        """Pairwise distance over the larger of the two self-distances."""
        a, b = _pair(a), _pair(b)
        d = self.pairwise.get((a, b), self.pairwise.get((b, a)))
        return d / max(self.self_distance[a], self.self_distance[b])


def _pair(p) -> tuple[float, float]:
    return (float(p[0]), float(p[1]))


def relative_distance(first: GridFunction, second: GridFunction, window) -> float:
    d = l2_distance(p1(first), p1(second), window)
    scale = max(l2_norm(p1(first), window), l2_norm(p1(second), window))
    return d / scale if scale > 0 else 0.0


def _miura_profile(config: RunConfig):
    result = simulate(config)
    status = "ok" if result.completed else "failed"
    return miura_transform(result.final), status


def cmd_miura(
    base: RunConfig,
    param_pairs,
    refinement_levels,
    window=(-10.0, 10.0),
    out_dir=None,
    workers: int = 1,
) -> MiuraReport:
    """Solve mKdV from the discontinuous data for each pair and level and compare Miura images."""
    pairs = [_pair(p) for p in param_pairs]
    for p in pairs:
        try:
            TsutsumiParams(*p)
        except ValueError as exc:
            raise ConfigError(f"[initial] c: {exc}") from None
    levels = sorted({int(n) for n in refinement_levels})
    base = base.replace(k=2, initial="tsutsumi")
    jobs = [(p, n) for p in dict.fromkeys(pairs) for n in levels]
    configs = [base.replace(c=p[0], eps=p[1], n_points=n) for p, n in jobs]
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_miura_profile, configs))
    else:
        outcomes = [_miura_profile(c) for c in configs]
    profiles = {job: prof for job, (prof, _) in zip(jobs, outcomes)}
    status = {job: st for job, (_, st) in zip(jobs, outcomes)}

    window = tuple(float(v) for v in window)
    finest = levels[-1]
    unique = list(dict.fromkeys(pairs))
    pairwise = {
        (a, b): relative_distance(profiles[a, finest], profiles[b, finest], window)
        for a, b in itertools.combinations(pairs, 2)
    }
    self_distance = {}
    for p in unique:
        if len(levels) > 1:
            self_distance[p] = relative_distance(profiles[p, levels[-2]], profiles[p, finest], window)
        else:
            self_distance[p] = math.nan
    report = MiuraReport(window, levels, profiles, status, pairwise, self_distance)
    if out_dir is not None:
        output.write_miura(Path(out_dir), report, base)
    return report
