"""Run configuration and its line-based ``key = value`` file format.

Files are INI-style with fixed sections; unknown sections or keys are errors.
Floats are written with ``repr`` so a manifest reloads to identical values.
"""
from __future__ import annotations

import configparser
import dataclasses
import io
import math
from dataclasses import dataclass
from pathlib import Path

from ..exact import SolitonParams, TsutsumiParams
from ..grid import Boundary, Grid
from ..rhs import ModelParams
from ..stepper import StepperConfig

__all__ = ["ConfigError", "RunConfig", "load_config", "dump_config", "parse_config", "apply_overrides"]

INITIAL_KINDS = ("soliton", "tsutsumi", "file", "zero")
WINDOW_MODES = ("fixed", "moving")
RESULT_SECTION = "result"


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(v) for v in text.replace(";", ",").split(","))


def _fmt_floats(values) -> str:
    return ", ".join(repr(float(v)) for v in values)


def _bool(text: str) -> bool:
    key = text.strip().lower()
    if key in ("1", "true", "yes", "on"):
        return True
    if key in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _window(text: str):
    vals = _floats(text)
    if not vals:
        return None
    if len(vals) != 2:
        raise ValueError("window needs two numbers 'a, b'")
    return vals


def _fmt_window(w) -> str:
    return "" if w is None else _fmt_floats(w)


def _str(text: str) -> str:
    return text.strip()


# (section, key) -> (attribute, parser, formatter)
_FIELDS = {
    ("model", "k"): ("k", int, str),
    ("model", "beta"): ("beta", float, repr),
    ("model", "eta"): ("eta", float, repr),
    ("grid", "x_min"): ("x_min", float, repr),
    ("grid", "x_max"): ("x_max", float, repr),
    ("grid", "n_points"): ("n_points", int, str),
    ("grid", "boundary"): ("boundary", _str, str),
    ("time", "tau"): ("tau", float, repr),
    ("time", "T"): ("T", float, repr),
    ("newton", "tol"): ("newton_tol", float, repr),
    ("newton", "max_iters"): ("newton_max_iters", int, str),
    ("newton", "freeze_jacobian"): ("freeze_jacobian", _bool, lambda b: "true" if b else "false"),
    ("initial", "kind"): ("initial", _str, str),
    ("initial", "c"): ("c", float, repr),
    ("initial", "eps"): ("eps", float, repr),
    ("initial", "path"): ("path", _str, str),
    ("output", "directory"): ("output_dir", _str, str),
    ("output", "snapshot_times"): ("snapshot_times", _floats, _fmt_floats),
    ("output", "window"): ("window", _window, _fmt_window),
    ("output", "window_mode"): ("window_mode", _str, str),
    ("output", "smoothing_radius"): ("smoothing_radius", float, repr),
}
_BY_ATTR = {attr: key for key, (attr, _, _) in _FIELDS.items()}


@dataclass(frozen=True)
class RunConfig:
    k: int = 1
    beta: float = 1.0
    eta: float = 0.01
    x_min: float = -20.0
    x_max: float = 20.0
    n_points: int = 1024
    boundary: str = "periodic"
    tau: float = 1e-3
    T: float = 1.0
    newton_tol: float = 1e-6
    newton_max_iters: int = 25
    freeze_jacobian: bool = False
    initial: str = "soliton"
    c: float = 1.0
    eps: float = 1.0
    path: str = ""
    output_dir: str = "out"
    snapshot_times: tuple[float, ...] = ()
    window: tuple[float, float] | None = None
    window_mode: str = "fixed"
    smoothing_radius: float = 10.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        def bad(attr, msg):
            section, key = _BY_ATTR[attr]
            raise ConfigError(f"[{section}] {key}: {msg}")

        if not self.x_min < self.x_max:
            bad("x_max", f"must exceed x_min ({self.x_min} >= {self.x_max})")
        if self.n_points < 5:
            bad("n_points", "need at least 5 points")
        try:
            Boundary.parse(self.boundary)
        except ValueError as exc:
            bad("boundary", str(exc))
        if not (math.isfinite(self.T) and self.T > 0):
            bad("T", "must be positive")
        checks = (
            ("k", lambda: ModelParams(self.k, self.beta, self.eta)),
            ("tau", lambda: StepperConfig(self.tau, self.newton_tol, self.newton_max_iters,
                                          self.freeze_jacobian, self.smoothing_radius)),
        )
        for attr, build in checks:
            try:
                build()
            except ValueError as exc:
                bad(attr, str(exc))
        if self.initial not in INITIAL_KINDS:
            bad("initial", f"unknown initial data {self.initial!r}; choose from {', '.join(INITIAL_KINDS)}")
        if self.initial == "soliton":
            try:
                SolitonParams(self.k, self.c)
            except ValueError as exc:
                bad("c", str(exc))
        elif self.initial == "tsutsumi":
            try:
                TsutsumiParams(self.c, self.eps)
            except ValueError as exc:
                bad("c", str(exc))
        elif self.initial == "file" and not self.path:
            bad("path", "file initial data needs a path")
        if self.window is not None and not self.window[0] < self.window[1]:
            bad("window", "need a < b")
        if self.window_mode not in WINDOW_MODES:
            bad("window_mode", f"must be one of {', '.join(WINDOW_MODES)}")
        if any(t < 0 for t in self.snapshot_times):
            bad("snapshot_times", "times must be non-negative")

    # Derived objects

    def grid(self) -> Grid:
        return Grid.from_domain(self.x_min, self.x_max, self.n_points, self.boundary)

    def model(self) -> ModelParams:
        return ModelParams(self.k, self.beta, self.eta)

    def stepper(self) -> StepperConfig:
        return StepperConfig(
            self.tau, self.newton_tol, self.newton_max_iters, self.freeze_jacobian, self.smoothing_radius
        )

    def error_window(self) -> tuple[float, float]:
        return self.window if self.window is not None else (self.x_min, self.x_max)

    def replace(self, **changes) -> "RunConfig":
        try:
            return dataclasses.replace(self, **changes)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case sensitive (T vs tau)
    return cp


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    changes = {}
    sections = {s for s, _ in _FIELDS}
    for section in cp.sections():
        if section == RESULT_SECTION:
            continue
        if section not in sections:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            spec = _FIELDS.get((section, key))
            if spec is None:
                raise ConfigError(f"[{section}] {key}: unknown key")
            attr, parse, _ = spec
            try:
                changes[attr] = parse(raw)
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} ({exc})") from None
    return base.replace(**changes) if base is not None else RunConfig(**changes)


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, base)


def apply_overrides(config: RunConfig, assignments) -> RunConfig:
    """Apply ``key=value`` strings; ``key`` is ``section.key`` or a bare key."""
    changes = {}
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        name, raw = (s.strip() for s in item.split("=", 1))
        if "." in name:
            section, key = name.split(".", 1)
            matches = [(section, key)] if (section, key) in _FIELDS else []
        else:
            matches = [sk for sk in _FIELDS if sk[1] == name or _FIELDS[sk][0] == name]
        if len(matches) != 1:
            raise ConfigError(f"unknown or ambiguous config key {name!r}")
        attr, parse, _ = _FIELDS[matches[0]]
        try:
            changes[attr] = parse(raw)
        except ValueError as exc:
            raise ConfigError(f"[{matches[0][0]}] {matches[0][1]}: cannot parse {raw!r} ({exc})") from None
    return config.replace(**changes)


def dump_config(config: RunConfig, result: dict | None = None) -> str:
    """Serialize every field, optionally followed by a ``[result]`` section."""
    out = io.StringIO()
    current = None
    for (section, key), (attr, _, fmt) in _FIELDS.items():
        if section != current:
            if current is not None:
                out.write("\n")
            out.write(f"[{section}]\n")
            current = section
        value = fmt(getattr(config, attr))
        out.write(f"{key} = {value}\n" if value != "" else f"{key} =\n")
    if result:
        out.write(f"\n[{RESULT_SECTION}]\n")
        for key, value in result.items():
            out.write(f"{key} = {value}\n")
    return out.getvalue()
