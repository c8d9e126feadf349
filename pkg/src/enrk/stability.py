"""Stability functions of explicit tableaus and elementary-stability thresholds.

For an eigenvalue ``lam`` of an equilibrium Jacobian the ENRK step acts as
multiplication by ``R(phi * lam)``.  The sign of ``|R(phi lam)|^2 - 1`` decides
whether the discrete equilibrium keeps the stability type of the continuous
one; dividing out the trivial root at ``phi = 0`` leaves a polynomial of
degree ``2s - 1`` whose smallest positive root is the per-eigenvalue threshold.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
from numpy.polynomial import Polynomial

from .errors import PreconditionError
from .tableau import ButcherTableau

__all__ = [
    "StabilityPolynomial",
    "SpectrumClassification",
    "stability_coeffs",
    "p_polynomial",
    "smallest_positive_root",
    "stability_threshold_for_eigen",
    "elementary_stability_threshold",
]

DEFAULT_TOL = 1e-6
DEFAULT_SCAN_LIMIT = 64.0
_CHUNK = 4096


@dataclass(frozen=True)
class StabilityPolynomial:
    """``R(z) = sum_j coeffs[j] z**j`` with ``coeffs[0] == 1``."""

    coeffs: tuple[float, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        # complex Horner, works elementwise on arrays
        acc = np.zeros_like(np.asarray(z, dtype=complex)) + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + c
        return acc if np.ndim(acc) else complex(acc)


def stability_coeffs(t: ButcherTableau) -> StabilityPolynomial:
    """Coefficients ``c_0 = 1``, ``c_j = b^T A^(j-1) 1`` of the stability function."""
    coeffs = [1.0]
    v = np.ones(t.s)
    for _ in range(t.s):
        coeffs.append(float(t.b @ v))
        v = t.A @ v
    return StabilityPolynomial(tuple(coeffs))


def _polar(lam: complex) -> tuple[float, float]:
    r, theta = cmath.polar(complex(lam))
    if r == 0.0:
        raise PreconditionError("eigenvalue of zero magnitude has no stability threshold")
    return r, theta


def _unit_coefficients(sp: StabilityPolynomial, theta: float) -> np.ndarray:
    # coefficient of u**(m-1) in (|R(u e^{i theta})|^2 - 1) / u
    c = sp.coeffs
    s = len(c) - 1
    out = np.zeros(2 * s)
    for m in range(1, 2 * s + 1):
        acc = 0.0
        for j in range(max(0, m - s), min(m, s) + 1):
            acc += c[j] * c[m - j] * math.cos((2 * j - m) * theta)
        out[m - 1] = acc
    return out


def p_polynomial(sp: StabilityPolynomial, lam: complex) -> Polynomial:
    """Polynomial ``P`` in ``phi`` with ``phi * P(phi) = |R(phi lam)|^2 - 1``.

    Its constant term is ``2 Re(lam)``; the sign of ``P`` on ``phi > 0`` tells
    whether ``R`` maps ``lam`` inside (negative) or outside (positive) the unit
    disk.
    """
    r, theta = _polar(lam)
    unit = _unit_coefficients(sp, theta)
    scale = r ** np.arange(1, unit.size + 1)
    return Polynomial(unit * scale)


def _as_coefficients(poly) -> np.ndarray:
    if isinstance(poly, Polynomial):
        return np.asarray(poly.coef, dtype=float)
    return np.asarray(poly, dtype=float)


def _horner(coef: np.ndarray, x):
    acc = np.full_like(np.asarray(x, dtype=float), coef[-1])
    for c in coef[-2::-1]:
        acc = acc * x + c
    return acc


def smallest_positive_root(
    poly,
    scan_limit: float = DEFAULT_SCAN_LIMIT,
    tol: float = DEFAULT_TOL,
) -> float | None:
    """Smallest root of a real polynomial in ``(0, scan_limit]``, or ``None``.

    ``poly`` is a :class:`numpy.polynomial.Polynomial` or a sequence of
    coefficients in ascending order.  Sign changes are bracketed on a grid of
    spacing ``100 * tol`` and refined by bisection; a grid node where
    ``|P| <= tol * max|coef|`` counts as a (possibly tangential) root.
    """
    coef = np.trim_zeros(_as_coefficients(poly), "b")
    if coef.size == 0:
        raise PreconditionError("the zero polynomial has no isolated roots")
    if scan_limit <= 0 or tol <= 0:
        raise PreconditionError("scan_limit and tol must be positive")
    if coef.size == 1:
        return None
    touch = tol * np.max(np.abs(coef))
    step = 100.0 * tol
    n_nodes = int(math.ceil(scan_limit / step))
    prev_x, prev_v = 0.0, float(coef[0])
    start = 1
    while start <= n_nodes:
        idx = np.arange(start, min(start + _CHUNK, n_nodes + 1))
        xs = np.minimum(idx * step, scan_limit)
        vs = _horner(coef, xs)
        xs_all = np.concatenate(([prev_x], xs))
        vs_all = np.concatenate(([prev_v], vs))
        crossing = np.sign(vs_all[1:]) * np.sign(vs_all[:-1]) < 0
        near = np.abs(vs) <= touch
        if prev_v == 0.0:
            crossing[0] = False
        hits = np.flatnonzero(crossing | near)
        if hits.size:
            i = int(hits[0])
            if crossing[i]:
                return _bisect(coef, xs_all[i], xs_all[i + 1], tol)
            return float(xs[i])
        prev_x, prev_v = float(xs[-1]), float(vs[-1])
        start = int(idx[-1]) + 1
    return None


def _bisect(coef: np.ndarray, lo: float, hi: float, tol: float) -> float:
    f_lo = _horner(coef, lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = _horner(coef, mid)
        if f_mid == 0.0:
            return float(mid)
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def stability_threshold_for_eigen(
    sp: StabilityPolynomial,
    lam: complex,
    mode: Literal["stable", "unstable"],
    tol: float = DEFAULT_TOL,
    scan_limit: float = DEFAULT_SCAN_LIMIT,
) -> float:
    """Supremum of the initial ``phi``-interval on which ``lam`` keeps its type.

    ``mode="stable"``: ``|R(phi lam)| < 1`` on the interval (``Re lam < 0``).
    ``mode="unstable"``: ``|R(phi lam)| > 1`` on the interval (``Re lam > 0``).
    Returns ``math.inf`` when no sign change is found.

    The root search runs in the scaled variable ``u = phi |lam|`` and
    ``scan_limit`` bounds ``u``, which makes the threshold scale exactly as
    ``1/|lam|``.
    """
    lam = complex(lam)
    if mode == "unstable":
        if lam.real <= 0:
            raise PreconditionError(f"unstable mode needs Re(lam) > 0, got {lam}")
    elif mode == "stable":
        if lam.real >= 0:
            raise PreconditionError(f"stable mode needs Re(lam) < 0, got {lam}")
    else:
        raise ValueError(f"mode must be 'stable' or 'unstable', got {mode!r}")
    r, theta = _polar(lam)
    u = smallest_positive_root(_unit_coefficients(sp, theta), scan_limit, tol)
    return math.inf if u is None else u / r


def _dedupe_conjugates(eigs: Iterable[complex], digits: int = 12) -> tuple[complex, ...]:
    seen = {}
    for lam in eigs:
        lam = complex(lam)
        rep = complex(lam.real, abs(lam.imag))
        key = (round(rep.real, digits), round(rep.imag, digits))
        seen.setdefault(key, rep)
    return tuple(seen.values())


@dataclass(frozen=True)
class SpectrumClassification:
    """Eigenvalues of stable equilibria and unstable eigenvalues of unstable ones.

    Conjugate pairs are stored once (non-negative imaginary part); they share
    a threshold.
    """

    stable_eigs: tuple[complex, ...] = ()
    unstable_eigs: tuple[complex, ...] = ()

    def __post_init__(self):
        stable = _dedupe_conjugates(self.stable_eigs)
        unstable = _dedupe_conjugates(self.unstable_eigs)
        for lam in stable:
            if lam.real >= 0:
                raise PreconditionError(f"stable equilibria cannot carry eigenvalue {lam}")
        for lam in unstable:
            if lam.real <= 0:
                raise PreconditionError(f"unstable set needs Re > 0, got {lam}")
        object.__setattr__(self, "stable_eigs", stable)
        object.__setattr__(self, "unstable_eigs", unstable)

    @classmethod
    def from_spectra(cls, stable_spectra=(), unstable_spectra=()):
        """Build from whole spectra; unstable spectra keep only ``Re > 0`` entries."""
        stable = [lam for spec in stable_spectra for lam in spec]
        unstable = [lam for spec in unstable_spectra for lam in spec if complex(lam).real > 0]
        return cls(tuple(stable), tuple(unstable))

    def is_empty(self) -> bool:
        return not self.stable_eigs and not self.unstable_eigs


def elementary_stability_threshold(
    t: ButcherTableau | StabilityPolynomial,
    cls: SpectrumClassification,
    tol: float = DEFAULT_TOL,
    scan_limit: float = DEFAULT_SCAN_LIMIT,
) -> float:
    """``phi*``: minimum of the per-eigenvalue thresholds over both sets."""
    if cls.is_empty():
        raise PreconditionError("no equilibrium spectra supplied")
    sp = t if isinstance(t, StabilityPolynomial) else stability_coeffs(t)
    values = [
        stability_threshold_for_eigen(sp, lam, "stable", tol, scan_limit) for lam in cls.stable_eigs
    ]
    values += [
        stability_threshold_for_eigen(sp, lam, "unstable", tol, scan_limit)
        for lam in cls.unstable_eigs
    ]
    return min(values)
