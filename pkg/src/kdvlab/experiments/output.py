"""CSV and SVG writers.  Both are byte-for-byte deterministic for equal input."""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

__all__ = ["write_table", "write_sweep_csv", "write_sweep_svg", "write_miura", "format_value"]

SWEEP_COLUMNS = ["value", "h", "relative_l2_error", "order", "runtime_s", "newton_mean", "newton_max", "status"]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else repr(float(v))
    try:
        return repr(float(v))
    except (TypeError, ValueError):
        return str(v)


def _prepare(path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {path.parent}: {exc}") from exc
    return path


def write_table(path, header, rows, comments=()) -> Path:
    """Comment lines (``# ...``), a header row, then one record per row."""
    path = _prepare(path)
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def read_table(path):
    """Header and records of a file written by :func:`write_table`."""
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    records = list(csv.reader(lines))
    return records[0], records[1:]


def write_sweep_csv(path, report) -> Path:
    orders = [math.nan] + report.orders
    rows = (
        (r.value, r.h, r.error, o, r.runtime, r.newton_mean, r.newton_max, r.status)
        for r, o in zip(report.rows, orders)
    )
    comments = [f"sweep over {report.key}"] + [f"{k} = {v}" for k, v in sorted(report.meta.items())]
    return write_table(path, SWEEP_COLUMNS, rows, comments)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "kdvlab"
    plt.rcParams["svg.fonttype"] = "none"
    return plt


def _save_svg(fig, path):
    fig.savefig(_prepare(path), format="svg", metadata={"Date": None, "Creator": None})


def write_sweep_svg(path, reports, xlabel: str) -> Path:
    """Log-log plot of error against the swept value, one line per report."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for rep in reports:
        pts = [(r.value, r.error) for r in rep.rows if r.value > 0 and r.error > 0]
        if pts:
            xs, ys = zip(*pts)
            label = ", ".join(f"{k}={rep.meta[k]}" for k in ("tau", "eta") if k in rep.meta)
            ax.loglog(xs, ys, "o-", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("relative L2 error")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    _save_svg(fig, path)
    plt.close(fig)
    return Path(path)


def write_profile_svg(path, curves, xlabel="x", ylabel="M(u)") -> Path:
    """Linear-axis plot of ``(label, x, y)`` curves."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, x, y in curves:
        ax.plot(x, y, lw=1, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize="small")
    _save_svg(fig, path)
    plt.close(fig)
    return Path(path)


def _tag(pair) -> str:
    return f"c{pair[0]:g}_eps{pair[1]:g}"


def write_miura(out: Path, report, config) -> dict[str, Path]:
    """Profile CSVs per (pair, level), distance tables and a profile plot."""
    meta = [f"T = {config.T!r}", f"tau = {config.tau!r}", f"eta = {config.eta!r}",
            f"window = {report.window!r}", f"domain = {(config.x_min, config.x_max)!r}"]
    paths = {}
    for (pair, n), prof in sorted(report.profiles.items()):
        name = f"miura_{_tag(pair)}_n{n}.csv"
        paths[name] = write_table(
            out / name,
            ["x", "miura"],
            zip(prof.grid.x, prof.values),
            meta + [f"c = {pair[0]!r}", f"eps = {pair[1]!r}", f"status = {report.status[pair, n]}"],
        )
    paths["pairwise"] = write_table(
        out / "miura_pairwise.csv",
        ["c_a", "eps_a", "c_b", "eps_b", "relative_distance"],
        ((a[0], a[1], b[0], b[1], d) for (a, b), d in report.pairwise.items()),
        meta + [f"level = {report.levels[-1]}"],
    )
    paths["self"] = write_table(
        out / "miura_self_distance.csv",
        ["c", "eps", "relative_distance"],
        ((p[0], p[1], d) for p, d in report.self_distance.items()),
        meta + [f"levels = {report.levels[-2:]!r}"],
    )
    a, b = report.window
    curves = []
    for (pair, n), prof in sorted(report.profiles.items()):
        x = prof.grid.x
        keep = (x >= a) & (x <= b)
        curves.append((f"(c, eps) = ({pair[0]:g}, {pair[1]:g}), n = {n}", x[keep], prof.values[keep]))
    paths["svg"] = write_profile_svg(out / "miura_profiles.svg", curves)
    return paths
