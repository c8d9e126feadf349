"""Explicit Butcher tableaus, classical order checks and positivity radii."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ButcherTableau",
    "REGISTRY",
    "registry_get",
    "verify_order",
    "order_residuals",
    "positivity_radius",
]

# Feasibility slack for the sign conditions; radii of interest sit exactly on
# a boundary (r = 1, r = 2).
_FEAS_EPS = 1e-12
_SCAN_STEP = 0.25
_SCAN_MAX = 64.0


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    """Explicit Runge-Kutta coefficient scheme ``(A, b)`` of claimed order ``p``.

    The nodes ``c`` are always the row sums of ``A``.
    """

    name: str
    A: np.ndarray
    b: np.ndarray
    p: int
    c: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if b.shape != (A.shape[0],):
            raise ValueError(f"b must have length {A.shape[0]}, got {b.shape}")
        if np.any(np.triu(A) != 0.0):
            raise ValueError("A must be strictly lower triangular (explicit scheme)")
        if not 1 <= int(self.p) <= 4:
            raise ValueError(f"claimed order must be in 1..4, got {self.p}")
        A.flags.writeable = False
        b.flags.writeable = False
        c = A.sum(axis=1)
        c.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "c", c)

    @property
    def s(self) -> int:
        return self.b.shape[0]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "s": self.s,
            "p": self.p,
            "A": self.A.tolist(),
            "b": self.b.tolist(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ButcherTableau":
        tab = cls(data["name"], data["A"], data["b"], data["p"])
        if "s" in data and int(data["s"]) != tab.s:
            raise ValueError(f"stage count {data['s']} does not match b (length {tab.s})")
        return tab

    @classmethod
    def from_json(cls, text: str) -> "ButcherTableau":
        return cls.from_dict(json.loads(text))


def _ssp54_tableau() -> ButcherTableau:
    # Optimal 5-stage, order-4 scheme (radius ~1.50818), assembled from its
    # Shu-Osher form so the Butcher coefficients carry full double precision.
    a10 = 0.391752226571890
    a20, a23 = 0.444370493651235, 0.368410593050371
    a30, a33 = 0.620101851488403, 0.251891774271694
    a40, a43 = 0.178079954393132, 0.544974750228521
    w2, w3 = 0.517231671970585, 0.096059710526147
    w4f, w5f = 0.063692468666290, 0.226007483236906
    s = 5
    rows = [np.zeros(s)]
    rows.append(np.array([a10, 0, 0, 0, 0]))
    for keep, coef, stage in ((1 - a20, a23, 1), (1 - a30, a33, 2), (1 - a40, a43, 3)):
        row = keep * rows[-1]
        row[stage] += coef
        rows.append(row)
    A = np.array(rows)
    w5 = 1.0 - w2 - w3
    b = w2 * rows[2] + w3 * rows[3] + w5 * rows[4]
    b[3] += w4f
    b[4] += w5f
    return ButcherTableau("rk54", A, b, 4)


REGISTRY: dict[str, ButcherTableau] = {
    "euler": ButcherTableau("euler", [[0.0]], [1.0], 1),
    "rk2": ButcherTableau("rk2", [[0.0, 0.0], [1.0, 0.0]], [0.5, 0.5], 2),
    "rk43": ButcherTableau(
        "rk43",
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0, 0.0],
            [0.5, 0.5, 0.0, 0.0],
            [1 / 6, 1 / 6, 1 / 6, 0.0],
        ],
        [1 / 6, 1 / 6, 1 / 6, 1 / 2],
        3,
    ),
    "rk54": _ssp54_tableau(),
    "rk4classic": ButcherTableau(
        "rk4classic",
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ],
        [1 / 6, 1 / 3, 1 / 3, 1 / 6],
        4,
    ),
}


def registry_get(name: str) -> ButcherTableau:
    """Return the bundled tableau called ``name``."""
    try:
        return REGISTRY[name]
    except KeyError:
        valid = ", ".join(sorted(REGISTRY))
        raise KeyError(f"unknown method {name!r}; valid names: {valid}") from None


def order_residuals(t: ButcherTableau, p: int) -> list[float]:
    """Residuals of the classical order conditions up to order ``p`` (p <= 4)."""
    if not 1 <= p <= 4:
        raise ValueError(f"order conditions are only implemented for p in 1..4, got {p}")
    A, b, c = t.A, t.b, t.c
    res = [b.sum() - 1.0]
    if p >= 2:
        res.append(b @ c - 1 / 2)
    if p >= 3:
        res += [b @ c**2 - 1 / 3, b @ A @ c - 1 / 6]
    if p >= 4:
        res += [
            b @ c**3 - 1 / 4,
            b @ (c * (A @ c)) - 1 / 8,
            b @ A @ c**2 - 1 / 12,
            b @ A @ A @ c - 1 / 24,
        ]
    return [float(r) for r in res]


def verify_order(t: ButcherTableau, p: int, atol: float = 1e-12) -> bool:
    """True iff ``t`` satisfies every classical order condition up to ``p``."""
    return all(abs(r) <= atol for r in order_residuals(t, p))


def _unit_lower_inverse(M: np.ndarray) -> np.ndarray:
    # forward substitution; M is unit lower triangular
    n = M.shape[0]
    inv = np.eye(n)
    for i in range(1, n):
        inv[i] -= M[i, :i] @ inv[:i]
    return inv


def _feasible(t: ButcherTableau, r: float) -> bool:
    if r == 0.0:
        return bool(np.all(t.A >= -_FEAS_EPS) and np.all(t.b >= -_FEAS_EPS))
    A, b = t.A, t.b
    inv = _unit_lower_inverse(np.eye(t.s) + r * A)
    AM = A @ inv
    bM = b @ inv
    return bool(
        np.all(AM >= -_FEAS_EPS)
        and np.all(bM >= -_FEAS_EPS)
        and np.all(r * AM.sum(axis=1) <= 1.0 + _FEAS_EPS)
        and r * bM.sum() <= 1.0 + _FEAS_EPS
    )


def positivity_radius(t: ButcherTableau, tol: float = 1e-10) -> float:
    """Radius of absolute monotonicity ``R(A, b)`` of an explicit tableau.

    The feasible set is scanned on a grid of width 0.25 up to 64; the first
    infeasible grid point is then bisected down to ``tol``.  Returns 0 when
    no ``r > 0`` is feasible and ``inf`` when the whole scan is feasible.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not _feasible(t, 0.0):
        return 0.0
    lo = 0.0
    while lo < _SCAN_MAX and _feasible(t, lo + _SCAN_STEP):
        lo += _SCAN_STEP
    if lo >= _SCAN_MAX:
        return math.inf
    hi = lo + _SCAN_STEP
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _feasible(t, mid):
            lo = mid
        else:
            hi = mid
    return lo
