"""Reference solutions, error/rate metrics, convergence tables and threshold reports."""

from __future__ import annotations

import csv
import math
import threading
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import denominator as den
from .errors import DivergenceError, PreconditionError
from .integrator import Trajectory, integrate
from .models import ModelDescriptor
from .positivity import Undefined, pes_threshold, positivity_step_threshold
from .stability import elementary_stability_threshold
from .tableau import ButcherTableau, positivity_radius, registry_get

__all__ = [
    "REFERENCE_METHOD",
    "REFERENCE_STEP",
    "METHOD_LABELS",
    "PREDATOR_PREY_DENOMINATORS",
    "VACCINATION_PHI3",
    "ThresholdReport",
    "ConvergenceRow",
    "reference_solution",
    "clear_reference_cache",
    "error_metric",
    "convergence_table",
    "write_convergence_csv",
    "threshold_report",
    "default_m",
    "default_k",
]

REFERENCE_METHOD = "rk54"
REFERENCE_STEP = 1e-4
_GRID_TOL = 1e-9

METHOD_LABELS = {
    "euler": "ENRK1",
    "rk2": "ENRK2",
    "rk43": "ENRK43",
    "rk54": "ENRK54",
    "rk4classic": "ENRK4",
}

# (phi1, phi2, phi3) used for the predator-prey convergence and large-step runs
PREDATOR_PREY_DENOMINATORS = {
    "euler": (den.Phi1(1.0005), den.Phi2(0.095, 4), den.Phi3(1.0005, 0.095, 4, 2, c=0.01)),
    "rk2": (den.Phi1(1.0), den.Phi2(0.095, 4), den.Phi3(1.0, 0.095, 4, 4, c=0.01)),
    "rk43": (den.Phi1(0.55), den.Phi2(0.001, 6), den.Phi3(0.55, 0.001, 6, 6)),
    "rk54": (den.Phi1(0.68), den.Phi2(0.002, 8), den.Phi3(0.68, 0.002, 8, 8)),
    "rk4classic": (den.Phi1(0.25), den.Phi2(0.0001, 6), den.Phi3(0.25, 0.0001, 6, 6, c=0.01)),
}
VACCINATION_PHI3 = den.Phi3(1.6, 0.5, 4, 6)


# -- reference solutions -----------------------------------------------------

_cache: dict[tuple, Trajectory] = {}
_cache_lock = threading.Lock()
_key_locks: dict[tuple, threading.Lock] = {}


def _steps_for(T: float, h: float) -> int:
    n = T / h
    steps = int(round(n))
    if steps < 1 or abs(n - steps) > _GRID_TOL * max(1.0, n):
        raise PreconditionError(f"T={T} is not an integer multiple of h={h}")
    return steps


def reference_solution(
    m: ModelDescriptor,
    y0: Sequence[float] | None = None,
    T: float = 10.0,
    h_ref: float = REFERENCE_STEP,
    method: str = REFERENCE_METHOD,
) -> Trajectory:
    """Fine-step standard run used as the benchmark; cached per (model, y0, T, h_ref)."""
    y0 = tuple(float(v) for v in (m.default_y0 if y0 is None else y0))
    key = (m.key, y0, float(T), float(h_ref), method)
    with _cache_lock:
        hit = _cache.get(key)
        if hit is not None:
            return hit
        lock = _key_locks.setdefault(key, threading.Lock())
    with lock:
        with _cache_lock:
            hit = _cache.get(key)
        if hit is not None:
            return hit
        traj = integrate(registry_get(method), den.Standard(), m.f, y0, h_ref, _steps_for(T, h_ref))
        traj.states.flags.writeable = False
        with _cache_lock:
            _cache[key] = traj
        return traj


def clear_reference_cache() -> None:
    with _cache_lock:
        _cache.clear()
        _key_locks.clear()


def error_metric(traj: Trajectory, ref: Trajectory) -> float:
    """``max_k sum_i |y_k,i - Y_k,i|`` over the nodes of the coarse grid."""
    if abs(traj.t0 - ref.t0) > _GRID_TOL * max(1.0, abs(ref.t0)):
        raise PreconditionError("trajectories start at different times")
    ratio = traj.h / ref.h
    stride = int(round(ratio))
    if stride < 1 or abs(ratio - stride) > _GRID_TOL * ratio:
        raise PreconditionError(f"h={traj.h} is not an integer multiple of h_ref={ref.h}")
    if traj.steps * stride != ref.steps:
        raise PreconditionError(f"spans differ: {traj.t_end} vs reference {ref.t_end}")
    coarse = ref.states[::stride]
    diff = np.abs(traj.states - coarse)
    return float(np.max(diff.reshape(diff.shape[0], -1).sum(axis=1)))


# -- convergence studies -----------------------------------------------------


@dataclass
class ConvergenceRow:
    """Errors per denominator spec at one step size; ``None`` marks divergence."""

    h: float
    errors: dict[str, float | None]
    rates: dict[str, float | None] = field(default_factory=dict)

    def diverged(self, spec: str) -> bool:
        return self.errors.get(spec) is None


def _rate(e1, e2, h1, h2):
    if e1 is None or e2 is None or e1 <= 0 or e2 <= 0:
        return None
    return math.log(e1 / e2) / math.log(h1 / h2)


def convergence_table(
    t: ButcherTableau,
    m: ModelDescriptor,
    specs: Iterable[den.DenominatorSpec],
    hs: Sequence[float],
    T: float = 10.0,
    y0: Sequence[float] | None = None,
    h_ref: float = REFERENCE_STEP,
) -> list[ConvergenceRow]:
    """Errors against the reference and observed rates between consecutive step sizes."""
    specs = list(specs)
    hs = [float(h) for h in hs]
    if any(a <= b for a, b in zip(hs, hs[1:])):
        raise PreconditionError("hs must be strictly decreasing")
    ref = reference_solution(m, y0, T, h_ref)
    y_start = ref.states[0]
    rows = []
    for h in hs:
        steps = _steps_for(T, h)
        errors = {}
        for spec in specs:
            try:
                traj = integrate(t, spec, m.f, y_start, h, steps)
            except DivergenceError:
                errors[str(spec)] = None
            else:
                errors[str(spec)] = error_metric(traj, ref)
        rows.append(ConvergenceRow(h, errors))
    for prev, row in zip(rows, rows[1:]):
        row.rates = {
            key: _rate(prev.errors[key], row.errors[key], prev.h, row.h) for key in row.errors
        }
    return rows


def write_convergence_csv(rows: Sequence[ConvergenceRow], path) -> None:
    keys = list(rows[0].errors) if rows else []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["h"]
        for key in keys:
            header += [f"error[{key}]", f"rate[{key}]"]
        writer.writerow(header)
        for row in rows:
            line = [f"{row.h:.17g}"]
            for key in keys:
                err = row.errors[key]
                rate = row.rates.get(key)
                line.append("diverged" if err is None else f"{err:.17g}")
                line.append("" if rate is None else f"{rate:.17g}")
            writer.writerow(line)


# -- threshold reports -------------------------------------------------------


def default_m(p: int, tau_star: float) -> int:
    # large m shrinks tau2_opt only when tau* >= 1
    return p if tau_star < 1 else 2 * p


def default_k(p: int) -> int:
    return 2 * p


@dataclass(frozen=True)
class ThresholdReport:
    method: str
    label: str
    model: str
    s: int
    p: int
    phi_star: float
    radius: float
    alpha: float
    H: float | Undefined
    tau_star: float
    stability_only: bool
    tau1_opt: float | None
    m: int | None
    tau2_opt: float | None
    k: int | None
    recommended: tuple[str, ...]
    conditional: bool

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, value in out.items():
            if isinstance(value, Undefined):
                out[key] = str(value)
            elif isinstance(value, float) and math.isinf(value):
                out[key] = "inf"
        out["recommended"] = list(self.recommended)
        return out


def threshold_report(
    t: ButcherTableau,
    m: ModelDescriptor,
    m_choice: int | None = None,
    k_choice: int | None = None,
) -> ThresholdReport:
    """Stability, positivity and PES thresholds plus auto-selected denominators."""
    cls = m.spectrum_classification()
    if cls.is_empty():
        raise PreconditionError(f"model {m.name!r} has no classified equilibria")
    phi_star = elementary_stability_threshold(t, cls)
    radius = positivity_radius(t)
    H = positivity_step_threshold(radius, m.positivity)
    tau_star, stability_only = pes_threshold(phi_star, H)
    if math.isfinite(tau_star):
        m_val = m_choice if m_choice is not None else default_m(t.p, tau_star)
        k_val = k_choice if k_choice is not None else default_k(t.p)
        recommended = den.recommend(tau_star, m_val, k_val)
        tau1 = den.tau1_opt(tau_star)
        tau2 = den.tau2_opt(tau_star, m_val)
        rec = tuple(str(spec) for spec in recommended)
    else:
        m_val = k_val = None
        tau1 = tau2 = None
        rec = (str(den.Standard()),)
    return ThresholdReport(
        method=t.name,
        label=METHOD_LABELS.get(t.name, t.name),
        model=m.name,
        s=t.s,
        p=t.p,
        phi_star=phi_star,
        radius=radius,
        alpha=m.alpha,
        H=H,
        tau_star=tau_star,
        stability_only=stability_only,
        tau1_opt=tau1,
        m=m_val,
        tau2_opt=tau2,
        k=k_val,
        recommended=rec,
        conditional=m.located_numerically,
    )

