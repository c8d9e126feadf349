"""Benchmark autonomous systems with Jacobians, equilibria and positivity data.

Every right-hand side accepts a state of shape ``(n,)`` or a batch of shape
``(n, batch)``; Jacobians are evaluated at a single state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import PreconditionError
from .positivity import PositivityClass
from .stability import SpectrumClassification

__all__ = [
    "Equilibrium",
    "LinearInvariant",
    "ModelDescriptor",
    "MODELS",
    "get_model",
    "predator_prey",
    "vaccination",
    "keymer",
    "amarasekare",
    "linear",
    "characteristic_polynomial",
    "polynomial_roots",
    "jacobian_eigenvalues",
    "locate_equilibrium",
]

_ZERO_EIG = 1e-9
_HYPERBOLIC = 1e-12


@dataclass(frozen=True, eq=False)
class Equilibrium:
    state: np.ndarray
    stable: bool
    eigenvalues: tuple[complex, ...]
    hyperbolic: bool = True


@dataclass(frozen=True)
class LinearInvariant:
    """``weights . y == constant`` along trajectories started on the plane.

    ``exact`` invariants satisfy ``weights . f(y) == 0`` everywhere; the others
    only on the plane itself.
    """

    weights: tuple[float, ...]
    constant: float
    exact: bool = True

    def value(self, y) -> np.ndarray:
        return np.tensordot(np.asarray(self.weights), np.asarray(y, dtype=float), axes=(0, 0))


@dataclass(frozen=True, eq=False)
class ModelDescriptor:
    name: str
    dim: int
    params: Mapping[str, float]
    f: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    equilibria: tuple[Equilibrium, ...]
    positivity: PositivityClass
    linear_invariants: tuple[LinearInvariant, ...] = ()
    default_y0: tuple[float, ...] = ()
    located_numerically: bool = False
    notes: tuple[str, ...] = field(default=())

    @property
    def alpha(self) -> float:
        return self.positivity.alpha

    @property
    def key(self) -> tuple:
        return (self.name, tuple(sorted(self.params.items())))

    def spectrum_classification(self) -> SpectrumClassification:
        """Eigenvalue sets of the hyperbolic equilibria, split by stability."""
        stable = [eq.eigenvalues for eq in self.equilibria if eq.hyperbolic and eq.stable]
        unstable = [eq.eigenvalues for eq in self.equilibria if eq.hyperbolic and not eq.stable]
        return SpectrumClassification.from_spectra(stable, unstable)


# -- eigenvalues -------------------------------------------------------------


def characteristic_polynomial(J) -> np.ndarray:
    """Monic coefficients (descending) of ``det(z I - J)`` by Faddeev-LeVerrier."""
    J = np.asarray(J, dtype=float)
    n = J.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    M = np.zeros_like(J)
    eye = np.eye(n)
    for k in range(1, n + 1):
        M = J @ M + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(J @ M) / k
    return coeffs


def _horner(coeffs, z):
    acc = 0j
    for c in coeffs:
        acc = acc * z + c
    return acc


def _polish(coeffs, z, iters=4):
    deriv = np.polyder(coeffs)
    for _ in range(iters):
        d = _horner(deriv, z)
        if d == 0:
            break
        step = _horner(coeffs, z) / d
        z = z - step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def polynomial_roots(coeffs) -> list[complex]:
    """Roots of a monic real polynomial (descending coefficients), degree <= 4.

    Closed forms for degree <= 2; Weierstrass (Durand-Kerner) iteration with
    Newton polishing otherwise.  Real roots come back as real-valued complex
    numbers and complex roots as exact conjugate pairs.
    """
    a = np.asarray(coeffs, dtype=float)
    a = a / a[0]
    n = a.size - 1
    if n == 0:
        return []
    if n == 1:
        return [complex(-a[1])]
    if n == 2:
        b, c = a[1], a[2]
        disc = b * b - 4 * c
        if disc >= 0:
            q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
            r1 = q if q != 0 else 0.0
            r2 = c / q if q != 0 else 0.0
            return sorted([complex(r1), complex(r2)], key=lambda z: z.real)
        re, im = -b / 2, math.sqrt(-disc) / 2
        return [complex(re, im), complex(re, -im)]
    bound = 1.0 + float(np.max(np.abs(a[1:])))
    z = np.array([bound * np.exp(1j * (2 * np.pi * k / n + 0.4)) for k in range(n)])
    for _ in range(1000):
        new = z.copy()
        for i in range(n):
            denom = np.prod([new[i] - new[j] for j in range(n) if j != i])
            if denom == 0:
                denom = 1e-300
            new[i] = new[i] - _horner(a, new[i]) / denom
        done = np.max(np.abs(new - z)) <= 1e-15 * bound
        z = new
        if done:
            break
    roots = [_polish(a, complex(r)) for r in z]
    return _tidy_roots(a, roots)


def _tidy_roots(a, roots):
    real, upper, lower = [], [], []
    for r in roots:
        tol = 1e-9 * max(1.0, abs(r))
        if abs(r.imag) <= tol:
            real.append(complex(_polish(a, r.real).real))
        elif r.imag > 0:
            upper.append(r)
        else:
            lower.append(r)
    pairs = []
    if len(upper) == len(lower):
        remaining = list(lower)
        for u in upper:
            j = min(range(len(remaining)), key=lambda i: abs(remaining[i].conjugate() - u))
            v = remaining.pop(j).conjugate()
            mid = complex(0.5 * (u.real + v.real), 0.5 * (u.imag + v.imag))
            pairs += [mid, mid.conjugate()]
    else:
        pairs = upper + lower
    return sorted(real, key=lambda z: z.real) + pairs


def jacobian_eigenvalues(m: ModelDescriptor, y) -> list[complex]:
    """Eigenvalues of ``m.jacobian(y)`` from its characteristic polynomial."""
    if m.dim > 4:
        raise PreconditionError(f"eigenvalues supported for n <= 4, model has n = {m.dim}")
    return polynomial_roots(characteristic_polynomial(m.jacobian(np.asarray(y, dtype=float))))


def _reduced_spectrum(eigs, n_exact):
    # an exact linear invariant pins one eigenvalue at zero; drop it
    eigs = list(eigs)
    for _ in range(n_exact):
        if not eigs:
            break
        i = min(range(len(eigs)), key=lambda k: abs(eigs[k]))
        if abs(eigs[i]) > _ZERO_EIG:
            break
        eigs.pop(i)
    return tuple(eigs)


def _classify(jacobian, state, invariants) -> Equilibrium:
    J = jacobian(state)
    scale = max(1.0, float(np.max(np.abs(J))))
    eigs = polynomial_roots(characteristic_polynomial(J))
    n_exact = sum(1 for inv in invariants if inv.exact)
    eigs = _reduced_spectrum(eigs, n_exact)
    hyperbolic = all(abs(z.real) > _HYPERBOLIC * scale for z in eigs)
    stable = hyperbolic and all(z.real < 0 for z in eigs)
    return Equilibrium(np.asarray(state, dtype=float), stable, eigs, hyperbolic)


# -- equilibrium search ------------------------------------------------------


def locate_equilibrium(f, jacobian, seed, invariants=(), tol=1e-13, max_iter=100):
    """Damped Newton for ``f(y) = 0`` with linear invariants appended as equations.

    Returns the refined state or ``None`` when the iteration stalls.
    """
    y = np.array(seed, dtype=float)
    W = np.array([inv.weights for inv in invariants], dtype=float).reshape(-1, y.size)
    c = np.array([inv.constant for inv in invariants], dtype=float)

    def residual(v):
        return np.concatenate([np.asarray(f(v), dtype=float), W @ v - c])

    def polish(v, r):
        # a few full Newton steps drive the residual down to round-off
        best, best_norm = v, np.linalg.norm(r)
        for _ in range(3):
            v = v + np.linalg.lstsq(np.vstack([jacobian(v), W]), -r, rcond=None)[0]
            r = residual(v)
            norm = np.linalg.norm(r)
            if not norm < best_norm:
                break
            best, best_norm = v, norm
        return best

    g = residual(y)
    for _ in range(max_iter):
        norm = np.linalg.norm(g)
        if norm <= tol * max(1.0, np.linalg.norm(y)):
            return polish(y, g)
        JG = np.vstack([jacobian(y), W])
        dy = np.linalg.lstsq(JG, -g, rcond=None)[0]
        lam = 1.0
        while lam > 1e-8:
            trial = y + lam * dy
            g_trial = residual(trial)
            if np.all(np.isfinite(g_trial)) and np.linalg.norm(g_trial) < norm:
                break
            lam *= 0.5
        else:
            return None
        y, g = trial, g_trial
    return y if np.linalg.norm(g) <= 1e3 * tol * max(1.0, np.linalg.norm(y)) else None


def _numeric_equilibria(f, jacobian, seeds, invariants, label):
    found, notes = [], []
    for seed in seeds:
        y = locate_equilibrium(f, jacobian, seed, invariants)
        if y is None:
            msg = f"{label}: Newton did not converge from seed {tuple(seed)}"
            warnings.warn(msg, RuntimeWarning, stacklevel=3)
            notes.append(msg)
            continue
        if np.any(y < -1e-10):
            notes.append(f"{label}: discarded equilibrium {tuple(y)} outside the orthant")
            continue
        y = np.where(np.abs(y) < 1e-14, 0.0, y)
        if any(np.allclose(y, other, atol=1e-9) for other in found):
            continue
        found.append(y)
    return found, notes


def _build(name, params, f, jac, states, alpha, invariants=(), y0=(), numeric=False, notes=()):
    invariants = tuple(invariants)
    equilibria = tuple(_classify(jac, s, invariants) for s in states)
    return ModelDescriptor(
        name=name,
        dim=len(y0),
        params=MappingProxyType(dict(params)),
        f=f,
        jacobian=jac,
        equilibria=equilibria,
        positivity=PositivityClass(alpha),
        linear_invariants=invariants,
        default_y0=tuple(float(v) for v in y0),
        located_numerically=numeric,
        notes=tuple(notes),
    )


# -- models ------------------------------------------------------------------


def predator_prey(A: float = 2.0, D: float = 1.0, E: float = 10.0) -> ModelDescriptor:
    """Predator-prey system with Beddington-DeAngelis functional response."""

    def f(y):
        x, v = y[0], y[1]
        r = x * v / (1.0 + x + v)
        return np.array([x - A * r, E * r - D * v])

    def jac(y):
        x, v = float(y[0]), float(y[1])
        d2 = (1.0 + x + v) ** 2
        rx = v * (1.0 + v) / d2
        rv = x * (1.0 + x) / d2
        return np.array([[1.0 - A * rx, -A * rv], [E * rx, E * rv - D]])

    states = [np.zeros(2)]
    notes = []
    denom = A * E - E - A * D
    if denom > 0:
        states.append(np.array([A * D / denom, E / denom]))
    else:
        notes.append("no interior equilibrium: A*E - E - A*D <= 0")
    return _build(
        "predator_prey",
        {"A": A, "D": D, "E": E},
        f,
        jac,
        states,
        alpha=max(A - 1.0, D),
        y0=(1.0, 1.6),
        notes=notes,
    )


def vaccination(
    beta: float = 0.7,
    c: float = 0.1,
    mu: float = 0.8,
    delta: float = 0.8,
    phi: float = 0.8,
    N: float = 100.0,
    alpha: float | None = 2.5,
) -> ModelDescriptor:
    """S, I, V vaccination model; only the disease-free equilibrium is exposed.

    Any ``alpha >= max(beta + mu + phi, mu + c, mu + delta)`` is a valid
    positivity constant.  The default 2.5 is a conservative
    value for the default rates, whose tight bound is 2.3; ``alpha=None``
    selects the tight bound.
    """
    alpha_min = max(beta + mu + phi, mu + c, mu + delta)
    if alpha is None:
        alpha = alpha_min
    elif alpha < alpha_min:
        raise PreconditionError(f"alpha={alpha} is below the positivity bound {alpha_min}")

    def f(y):
        S, I, V = y[0], y[1], y[2]
        inc = beta * S * I / N
        return np.array(
            [
                mu * N - inc - (mu + phi) * S + c * I + delta * V,
                inc - (mu + c) * I,
                phi * S - (mu + delta) * V,
            ]
        )

    def jac(y):
        S, I = float(y[0]), float(y[1])
        return np.array(
            [
                [-beta * I / N - (mu + phi), -beta * S / N + c, delta],
                [beta * I / N, beta * S / N - (mu + c), 0.0],
                [phi, 0.0, -(mu + delta)],
            ]
        )

    total = mu + delta + phi
    dfe = np.array([(mu + delta) * N / total, 0.0, phi * N / total])
    return _build(
        "vaccination",
        {"beta": beta, "c": c, "mu": mu, "delta": delta, "phi": phi, "N": N},
        f,
        jac,
        [dfe],
        alpha=alpha,
        invariants=[LinearInvariant((1.0, 1.0, 1.0), N, exact=False)],
        y0=(90.0, 10.0, 0.0),
    )


def keymer(
    lam: float = 1.0,
    e: float = 0.1,
    delta: float = 0.2,
    beta: float = 1.0,
    seeds: Sequence[Sequence[float]] | None = None,
) -> ModelDescriptor:
    """Three-class patch-occupancy metapopulation model on the unit simplex.

    States are ``(p0, p1, p2)``: uninhabitable, empty habitable and occupied
    patches.  Equilibria are located numerically from ``seeds`` (default: the
    extinction state and the simplex barycentre).
    """
    for name, value in (("lam", lam), ("e", e), ("delta", delta), ("beta", beta)):
        if not value > 0:
            raise PreconditionError(f"{name} must be positive, got {value}")

    def f(y):
        p0, p1, p2 = y[0], y[1], y[2]
        return np.array(
            [
                e * (p1 + p2) - lam * p0,
                lam * p0 - beta * p1 * p2 + delta * p2 - e * p1,
                beta * p1 * p2 - (delta + e) * p2,
            ]
        )

    def jac(y):
        p1, p2 = float(y[1]), float(y[2])
        return np.array(
            [
                [-lam, e, e],
                [lam, -beta * p2 - e, -beta * p1 + delta],
                [0.0, beta * p2, beta * p1 - (delta + e)],
            ]
        )

    invariants = [LinearInvariant((1.0, 1.0, 1.0), 1.0)]
    if seeds is None:
        seeds = [(e / (lam + e), lam / (lam + e), 0.0), (1 / 3, 1 / 3, 1 / 3)]
    states, notes = _numeric_equilibria(f, jac, seeds, invariants, "keymer")
    return _build(
        "keymer",
        {"lam": lam, "e": e, "delta": delta, "beta": beta},
        f,
        jac,
        states,
        alpha=max(lam, beta + e, delta + e),
        invariants=invariants,
        y0=(0.2, 0.5, 0.3),
        numeric=True,
        notes=notes,
    )


def amarasekare(
    beta_I: float = 2.0,
    e_I: float = 0.5,
    f: float = 0.2,
    g: float = 0.1,
    e_L: float = 0.3,
    beta_L: float = 1.0,
    P: float = 1.0,
    seeds: Sequence[Sequence[float]] | None = None,
) -> ModelDescriptor:
    """Four-class (I, S, L, R) metapopulation model with habitat disturbance.

    ``f`` is the disturbance frequency and ``g`` the succession rate; the
    total ``I + S + L + R = P`` is conserved.  Default parameters are
    illustrative.
    """
    params = {"beta_I": beta_I, "e_I": e_I, "f": f, "g": g, "e_L": e_L, "beta_L": beta_L, "P": P}
    for name, value in params.items():
        if not value > 0:
            raise PreconditionError(f"{name} must be positive, got {value}")
    dist = f

    def rhs(y):
        I, S, L, R = y[0], y[1], y[2], y[3]
        col_I = beta_I * S * I
        col_L = beta_L * R * I
        return np.array(
            [
                col_I - e_I * I + dist * L - g * I,
                e_I * I - col_I + dist * R - g * S,
                g * I - dist * L - e_L * L + col_L,
                g * S - dist * R + e_L * L - col_L,
            ]
        )

    def jac(y):
        I, S, R = float(y[0]), float(y[1]), float(y[3])
        return np.array(
            [
                [beta_I * S - e_I - g, beta_I * I, dist, 0.0],
                [e_I - beta_I * S, -beta_I * I - g, 0.0, dist],
                [g + beta_L * R, 0.0, -dist - e_L, beta_L * I],
                [-beta_L * R, g, e_L, -dist - beta_L * I],
            ]
        )

    invariants = [LinearInvariant((1.0, 1.0, 1.0, 1.0), P)]
    if seeds is None:
        w = P / (dist + g)
        seeds = [(0.0, dist * w, 0.0, g * w), (P / 4,) * 4]
    states, notes = _numeric_equilibria(rhs, jac, seeds, invariants, "amarasekare")
    return _build(
        "amarasekare",
        params,
        rhs,
        jac,
        states,
        alpha=max(e_I + g, beta_I * P + g, dist + e_L, dist + beta_L * P),
        invariants=invariants,
        y0=(0.1 * P, 0.4 * P, 0.1 * P, 0.4 * P),
        numeric=True,
        notes=notes,
    )


def linear(rate: float = -1.0) -> ModelDescriptor:
    """Scalar test equation ``dy/dt = rate * y``."""
    if rate == 0:
        raise PreconditionError("rate must be nonzero")

    def f(y):
        return rate * np.asarray(y, dtype=float)

    def jac(y):
        return np.array([[rate]])

    return _build(
        "linear", {"rate": rate}, f, jac, [np.zeros(1)], alpha=max(0.0, -rate), y0=(1.0,)
    )


MODELS: dict[str, Callable[..., ModelDescriptor]] = {
    "predator_prey": predator_prey,
    "vaccination": vaccination,
    "keymer": keymer,
    "amarasekare": amarasekare,
    "linear": linear,
}


def get_model(name: str, **params) -> ModelDescriptor:
    try:
        factory = MODELS[name]
    except KeyError:
        valid = ", ".join(sorted(MODELS))
        raise KeyError(f"unknown model {name!r}; valid names: {valid}") from None
    return factory(**params)
