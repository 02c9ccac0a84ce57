"""Implicit Euler time stepping with a full Newton iteration per step."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grid import GridFunction, compensated_sum, norm_lp
from .linalg import BandedMatrix, lu_factor, solve
from .rhs import ModelParams, _check_finite, _jacobian_bands, _residual

__all__ = [
    "StepperConfig",
    "StepDiagnostics",
    "StepFailure",
    "RunResult",
    "step",
    "energy_balance",
    "smoothing_quantity",
    "run",
]


@dataclass(frozen=True)
class StepperConfig:
    tau: float
    newton_tol: float = 1e-6
    newton_max_iters: int = 25
    freeze_jacobian: bool = False
    smoothing_radius: float = 10.0

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.newton_tol > 0:
            raise ValueError(f"newton_tol must be positive, got {self.newton_tol}")
        if self.newton_max_iters < 1:
            raise ValueError("newton_max_iters must be at least 1")
        if not self.smoothing_radius > 0:
            raise ValueError("smoothing_radius must be positive")


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-step bookkeeping.

    ``newton_iters`` counts residual evaluations, so a step whose initial
    guess already satisfies the tolerance reports 1.
    """

    newton_iters: int
    final_residual: float
    l2_norm: float
    energy_defect: float
    smoothing_increment: float


class StepFailure(RuntimeError):
    """Newton did not converge; ``history`` holds the residual sup-norms."""

    def __init__(self, message: str, history: Sequence[float], step_index: int | None = None):
        super().__init__(message)
        self.history = list(history)
        self.step_index = step_index


def _sq_norm(h: float, v: np.ndarray) -> float:
    return h * compensated_sum(v * v)


def smoothing_quantity(u: GridFunction, radius: float) -> float:
    """``sum_{|x_j| <= R} h |D+ u_j|^2``."""
    grid = u.grid
    v = u.values
    if grid.periodic:
        dp = (np.roll(v, -1) - v) / grid.h
    else:
        dp = (np.append(v[1:], 0.0) - v) / grid.h
    mask = np.abs(grid.x) <= radius
    return _sq_norm(grid.h, dp[mask])


def energy_balance(u_prev: GridFunction, u_next: GridFunction, tau: float, params: ModelParams) -> float:
    """Defect of the discrete energy law of one implicit Euler step.

    ``|u1|^2 - |u0|^2 + |u1 - u0|^2 + 2 tau eta h |Lap_h u1|^2``, which equals
    ``2 tau (F(u1), u1)_h`` and vanishes for an exact solve on a periodic grid.
    """
    if u_prev.grid != u_next.grid:
        raise ValueError("states live on different grids")
    grid = u_next.grid
    h = grid.h
    a, b = u_next.values, u_prev.values
    v = np.concatenate((a[-1:], a, a[:1])) if grid.periodic else np.pad(a, 1)
    lap = np.diff(v, 2) / h**2
    # |a|^2 - |b|^2 = (a - b, a + b): one compensated sum, no O(|u|^2) cancellation
    da = a - b
    terms = np.concatenate((da * (a + b), da * da, (2.0 * tau * params.eta * h) * lap * lap))
    return h * compensated_sum(terms)


def step(
    u_prev: GridFunction,
    params: ModelParams,
    config: StepperConfig,
) -> tuple[GridFunction, StepDiagnostics]:
    """One implicit Euler step solved by Newton's method from ``u_prev``."""
    grid = u_prev.grid
    tau = config.tau
    prev = u_prev.values
    if not np.all(np.isfinite(prev)):
        raise ValueError("initial state has non-finite values")
    u = prev.copy()
    cyclic = grid.periodic
    lu = None
    history = []
    for it in range(1, config.newton_max_iters + 1):
        f = _residual(u, prev, tau, grid, params)
        _check_finite(f, "Newton residual")
        res = float(np.max(np.abs(f)))
        history.append(res)
        if res <= config.newton_tol:
            break
        if lu is None or not config.freeze_jacobian:
            lu = lu_factor(BandedMatrix(_jacobian_bands(u, tau, grid, params), cyclic=cyclic))
        u = u - solve(lu, f)
    else:
        raise StepFailure(
            f"Newton did not reach {config.newton_tol:g} in {config.newton_max_iters} iterations "
            f"(last residual {history[-1]:.3e})",
            history,
        )
    u_next = GridFunction(grid, u)
    diag = StepDiagnostics(
        newton_iters=it,
        final_residual=res,
        l2_norm=norm_lp(u_next, 2),
        energy_defect=energy_balance(u_prev, u_next, tau, params),
        smoothing_increment=tau * smoothing_quantity(u_next, config.smoothing_radius),
    )
    return u_next, diag


Observer = Callable[[int, float, GridFunction, "StepDiagnostics | None"], None]


@dataclass
class RunResult:
    """Final state and per-step series of a run (index 0 is the initial state)."""

    final: GridFunction
    times: list[float]
    l2_norms: list[float]
    newton_iters: list[int] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    energy_defects: list[float] = field(default_factory=list)
    smoothing: list[float] = field(default_factory=list)
    snapshots: dict[float, GridFunction] = field(default_factory=dict)
    failure: StepFailure | None = None

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    @property
    def completed(self) -> bool:
        return self.failure is None

    @property
    def smoothing_accumulator(self) -> float:
        return self.smoothing[-1] if self.smoothing else 0.0


def step_count(T: float, tau: float) -> int:
    # round first so that T = m*tau in decimal does not give m+1 steps
    return max(1, math.ceil(round(T / tau, 9)))


def run(
    u0: GridFunction,
    params: ModelParams,
    config: StepperConfig,
    T: float,
    observers: Sequence[Observer] = (),
    snapshot_times: Sequence[float] = (),
    max_steps: int = 10_000_000,
) -> RunResult:
    """Advance ``ceil(T/tau)`` steps.

    Snapshots are taken at the first step whose time is within ``tau/2`` of a
    requested time.  The smoothing accumulator integrates
    ``sum_{|x|<=R} h |D+ u|^2`` in time with the trapezoid rule.  A failed
    step (no Newton convergence, singular Jacobian, non-finite state) stops
    the run; the partial trajectory is returned with ``failure`` set.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    nsteps = step_count(T, config.tau)
    if nsteps > max_steps:
        raise ValueError(f"T/tau needs {nsteps} steps, above the budget of {max_steps}")
    tau = config.tau
    pending = sorted(set(float(t) for t in snapshot_times))
    radius = config.smoothing_radius

    u = u0
    s_prev = smoothing_quantity(u0, radius)
    result = RunResult(final=u0, times=[0.0], l2_norms=[norm_lp(u0, 2)], smoothing=[0.0])

    def capture(t, state):
        while pending and abs(pending[0] - t) <= 0.5 * tau + 1e-12 * max(1.0, abs(t)):
            result.snapshots[pending.pop(0)] = state
        while pending and pending[0] < t - 0.5 * tau:
            pending.pop(0)

    capture(0.0, u0)
    for obs in observers:
        obs(0, 0.0, u0, None)
    for n in range(1, nsteps + 1):
        try:
            u_next, diag = step(u, params, config)
        except StepFailure as exc:
            exc.step_index = n
            result.failure = exc
            break
        except (np.linalg.LinAlgError, FloatingPointError) as exc:
            failure = StepFailure(f"step {n}: {exc}", [], n)
            failure.__cause__ = exc
            result.failure = failure
            break
        t = n * tau
        s_next = diag.smoothing_increment / tau
        result.times.append(t)
        result.l2_norms.append(diag.l2_norm)
        result.newton_iters.append(diag.newton_iters)
        result.residuals.append(diag.final_residual)
        result.energy_defects.append(diag.energy_defect)
        result.smoothing.append(result.smoothing[-1] + 0.5 * tau * (s_prev + s_next))
        s_prev = s_next
        u = u_next
        capture(t, u)
        for obs in observers:
            obs(n, t, u, diag)
    result.final = u
    return result
