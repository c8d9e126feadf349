"""The explicit nonstandard Runge-Kutta stepper.

An ENRK step is an ordinary explicit RK step in which every occurrence of the
step size is replaced by ``phi = phi(h)``::

    K_i     = f(y + phi * sum_{j<i} a_ij K_j)
    y_next  = y + phi * sum_i b_i K_i
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .denominator import DenominatorSpec, Standard
from .errors import DivergenceError, PreconditionError
from .tableau import ButcherTableau

__all__ = ["Trajectory", "enrk_step", "integrate", "DIVERGENCE_BOUND"]

DIVERGENCE_BOUND = 1e12

RHS = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States ``y_k`` on the uniform grid ``t_k = t0 + k h``.

    ``states`` has shape ``(steps + 1, n)`` or, for batched runs,
    ``(steps + 1, n, batch)``.
    """

    t0: float
    h: float
    states: np.ndarray
    phi: float | None = None

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def steps(self) -> int:
        return self.states.shape[0] - 1

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.states.shape[0])

    @property
    def t_end(self) -> float:
        return self.t0 + self.h * self.steps

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path) -> None:
        """Write ``t,y1,...,yn`` rows with 17 significant digits."""
        if self.states.ndim != 2:
            raise ValueError("CSV export supports unbatched trajectories only")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"y{i + 1}" for i in range(self.n)])
            for t, y in zip(self.times, self.states):
                writer.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in y])


def _stage_plan(t: ButcherTableau):
    # nonzero (j, a_ij) pairs per stage, as Python floats
    return [
        [(j, float(a)) for j, a in enumerate(row[:i]) if a != 0.0] for i, row in enumerate(t.A)
    ], [(i, float(b)) for i, b in enumerate(t.b) if b != 0.0]


def _step(plan, weights, phi: float, f: RHS, y: np.ndarray) -> np.ndarray:
    K = []
    for row in plan:
        yi = y
        for j, a in row:
            yi = yi + (phi * a) * K[j]
        K.append(f(yi))
    incr = 0.0
    for i, b in weights:
        incr = incr + b * K[i]
    return y + phi * incr


def _failing_stage(plan, phi: float, f: RHS, y: np.ndarray) -> int | None:
    # slow re-run of a failed step that checks every stage derivative
    K = []
    for i, row in enumerate(plan):
        yi = y
        for j, a in row:
            yi = yi + (phi * a) * K[j]
        k = np.asarray(f(yi), dtype=float)
        if not np.all(np.isfinite(k)):
            return i + 1
        K.append(k)
    return None


def _bounded(y: np.ndarray) -> bool:
    # NaN compares false, so this also rejects non-finite states
    return bool(np.max(np.abs(y)) <= DIVERGENCE_BOUND)


def enrk_step(t: ButcherTableau, phi: float, f: RHS, y) -> np.ndarray:
    """One ENRK step of scale ``phi`` from state ``y``."""
    if not phi > 0:
        raise PreconditionError(f"phi must be positive, got {phi}")
    plan, weights = _stage_plan(t)
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.asarray(_step(plan, weights, float(phi), f, y), dtype=float)
        if not np.all(np.isfinite(out)):
            stage = _failing_stage(plan, float(phi), f, y)
            raise DivergenceError(f"non-finite values in stage {stage}", stage=stage)
    return out


def integrate(
    t: ButcherTableau,
    spec: DenominatorSpec | None,
    f: RHS,
    y0,
    h: float,
    steps: int,
    t0: float = 0.0,
) -> Trajectory:
    """Run ``steps`` ENRK steps of size ``h``; ``phi(h)`` is evaluated once.

    Raises :class:`DivergenceError` (carrying the 1-based step index) as soon
    as a state component is non-finite or exceeds ``DIVERGENCE_BOUND``.
    """
    steps = int(steps)
    if steps < 1:
        raise PreconditionError(f"steps must be >= 1, got {steps}")
    spec = Standard() if spec is None else spec
    phi = float(spec(h))
    if not phi > 0:
        raise PreconditionError(f"denominator {spec} evaluates to {phi} at h={h}")
    y = np.array(y0, dtype=float)
    states = np.empty((steps + 1,) + y.shape)
    states[0] = y
    plan, weights = _stage_plan(t)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, steps + 1):
            y_next = _step(plan, weights, phi, f, y)
            if not _bounded(y_next):
                stage = _failing_stage(plan, phi, f, y)
                where = f" in stage {stage}" if stage else ""
                raise DivergenceError(
                    f"state left the bounded region at step {k}{where}", step=k, stage=stage
                )
            states[k] = y = y_next
    return Trajectory(float(t0), float(h), states, phi)
