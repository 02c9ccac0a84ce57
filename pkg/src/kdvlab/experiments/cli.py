"""Command line entry point: ``kdvlab {solve,convergence,viscosity-sweep,miura}``.

Settings are resolved in order: subcommand defaults, ``--config`` file,
``--set key=value`` overrides, then dedicated flags.  Exit status is 0 on
success, 2 for configuration errors and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, apply_overrides, load_config
from .runner import cmd_convergence, cmd_miura, cmd_solve, cmd_viscosity_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

DESK = {
    "solve": RunConfig(),
    "convergence": RunConfig(eta=0.01, tau=2.5e-4, T=1.0, n_points=256),
    "viscosity-sweep": RunConfig(eta=0.01, tau=2.5e-4, T=1.0, n_points=1024),
    "miura": RunConfig(
        k=2, eta=0.001, tau=1e-3, T=1.0, x_min=-100.0, x_max=100.0,
        n_points=4000, boundary="zero-extension", initial="tsutsumi", c=-1.0, eps=1.0,
    ),
}
DESK_LISTS = {
    "grids": [256, 512, 1024, 2048],
    "taus": [1e-3, 2.5e-4],
    "etas": [0.1, 0.03, 0.01, 0.003, 0.001, 0.0],
    "pairs": [(-1.0, 1.0), (-2.0, 1.0), (-0.25, 0.25), (-1.0, -2.0)],
    "levels": [2000, 4000],
    "window": (-10.0, 10.0),
}

# Long runs on the large domain; opt-in only.
FULL = {
    "convergence": (
        dict(x_min=-500.0, x_max=500.0, boundary="zero-extension", T=10.0, window=(10.0, 50.0)),
        {"grids": [5000, 10000, 20000, 40000], "taus": [1e-2, 1e-3]},
    ),
    "viscosity-sweep": (
        dict(x_min=-500.0, x_max=500.0, boundary="zero-extension", T=10.0, window=(10.0, 50.0),
             n_points=30000, tau=1e-3),
        {},
    ),
    "miura": (
        dict(x_min=-500.0, x_max=500.0, T=5.0, tau=1e-3, eta=0.001),
        {"levels": [5000, 30000], "pairs": [(-1.0, 1.0), (-2.0, 1.0), (-3.0, 1.0), (-4.0, 1.0)],
         "window": (-50.0, 50.0)},
    ),
}


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _pairs(text: str) -> list[tuple[float, float]]:
    out = []
    for item in text.split(","):
        c, _, eps = item.partition(":")
        out.append((_number(c), _number(eps) if eps else 1.0))
    return out


def _number(text: str) -> float:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        return float(num) / float(den)
    return float(text)


def _window(text: str) -> tuple[float, float]:
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("window needs 'a,b'")
    return vals[0], vals[1]


FLAG_FIELDS = {
    "k": "k", "beta": "beta", "eta": "eta", "x_min": "x_min", "x_max": "x_max",
    "n_points": "n_points", "boundary": "boundary", "tau": "tau", "T": "T",
    "newton_tol": "newton_tol", "newton_max_iters": "newton_max_iters",
    "initial": "initial", "c": "c", "eps": "eps", "initial_path": "path",
    "smoothing_radius": "smoothing_radius", "window_mode": "window_mode",
}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value config file (sections: model, grid, time, newton, initial, output)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    p.add_argument("-o", "--output", help="output directory")
    p.add_argument("--k", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--x-min", dest="x_min", type=float)
    p.add_argument("--x-max", dest="x_max", type=float)
    p.add_argument("--n-points", dest="n_points", type=int)
    p.add_argument("--boundary", choices=["periodic", "zero-extension"])
    p.add_argument("--tau", type=float)
    p.add_argument("--T", dest="T", type=float)
    p.add_argument("--newton-tol", dest="newton_tol", type=float)
    p.add_argument("--newton-max-iters", dest="newton_max_iters", type=int)
    p.add_argument("--freeze-jacobian", action="store_true", default=None)
    p.add_argument("--initial", choices=["soliton", "tsutsumi", "file", "zero"])
    p.add_argument("--c", type=_number)
    p.add_argument("--eps", type=_number)
    p.add_argument("--initial-path", dest="initial_path")
    p.add_argument("--window", type=_window, help="error window 'a,b'")
    p.add_argument("--window-mode", dest="window_mode", choices=["fixed", "moving"])
    p.add_argument("--smoothing-radius", dest="smoothing_radius", type=float)
    p.add_argument("--full-scale", action="store_true", help="use the large-domain, long-running sizes")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kdvlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one simulation")
    _common(p)
    p.add_argument("--snapshot-times", dest="snapshot_times", type=_float_list)

    p = sub.add_parser("convergence", help="error against the exact soliton versus grid size")
    _common(p)
    p.add_argument("--grids", type=_int_list)
    p.add_argument("--taus", type=_float_list)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("viscosity-sweep", help="error against the exact soliton versus eta")
    _common(p)
    p.add_argument("--etas", type=_float_list)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("miura", help="compare Miura images of solutions from discontinuous data")
    _common(p)
    p.add_argument("--pairs", type=_pairs, help="c:eps list, e.g. --pairs=-1:1,-2:1,-1/4:1/4")
    p.add_argument("--levels", type=_int_list, help="grid sizes, coarse to fine")
    p.add_argument("--compare-window", dest="compare_window", type=_window)
    p.add_argument("--workers", type=int, default=1)
    return parser


def resolve(args) -> tuple[RunConfig, dict]:
    config = DESK[args.command]
    lists = dict(DESK_LISTS)
    if args.full_scale and args.command in FULL:
        changes, extra = FULL[args.command]
        config = config.replace(**changes)
        lists.update(extra)
    if args.config:
        config = load_config(args.config, base=config)
    config = apply_overrides(config, args.set)
    changes = {field: getattr(args, flag) for flag, field in FLAG_FIELDS.items() if getattr(args, flag) is not None}
    if args.freeze_jacobian:
        changes["freeze_jacobian"] = True
    if args.window is not None:
        changes["window"] = args.window
    if getattr(args, "snapshot_times", None) is not None:
        changes["snapshot_times"] = tuple(args.snapshot_times)
    if args.output:
        changes["output_dir"] = args.output
    config = config.replace(**changes)
    for key in ("grids", "taus", "etas", "pairs", "levels"):
        if getattr(args, key, None) is not None:
            lists[key] = getattr(args, key)
    if getattr(args, "compare_window", None) is not None:
        lists["window"] = args.compare_window
    return config, lists


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else f"{v:.4e}"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config, lists = resolve(args)
        out = Path(config.output_dir)
        if args.command == "solve":
            res = cmd_solve(config, out)
            print(f"status={res.status} steps={res.result.steps} relative_l2_error={_fmt(res.error)}")
            print(f"manifest: {res.paths['manifest']}")
            if not res.ok:
                print(f"failure: {res.result.failure}", file=sys.stderr)
                return EXIT_NUMERICAL
            return EXIT_OK
        if args.command == "convergence":
            reports = cmd_convergence(config, lists["grids"], lists["taus"], out, workers=args.workers)
            failed = False
            for rep in reports:
                print(f"tau = {rep.meta['tau']}")
                orders = [math.nan] + rep.orders
                for row, order in zip(rep.rows, orders):
                    print(f"  n={int(row.value):7d}  error={_fmt(row.error)}  order={_fmt(order)}  {row.status}")
                    failed |= row.status == "failed"
            return EXIT_NUMERICAL if failed else EXIT_OK
        if args.command == "viscosity-sweep":
            rep = cmd_viscosity_sweep(config, lists["etas"], out, workers=args.workers)
            for row in rep.rows:
                print(f"  eta={row.value:<8g} error={_fmt(row.error)}  {row.status}")
            return EXIT_NUMERICAL if any(r.status == "failed" for r in rep.rows) else EXIT_OK
        rep = cmd_miura(config, lists["pairs"], lists["levels"], lists["window"], out, workers=args.workers)
        for p, d in rep.self_distance.items():
            print(f"  self  (c, eps)=({p[0]:g}, {p[1]:g})  {_fmt(d)}")
        for (a, b), d in rep.pairwise.items():
            ratio = d / max(rep.self_distance[a], rep.self_distance[b])
            print(f"  pair  ({a[0]:g}, {a[1]:g}) vs ({b[0]:g}, {b[1]:g})  {_fmt(d)}  ratio={ratio:.2f}")
        return EXIT_NUMERICAL if any(s != "ok" for s in rep.status.values()) else EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
