"""Denominator functions ``phi(h)`` and their parameter-selection rules.

Four families are supported:

* ``h``                                  standard step
* ``phi1(tau1=..)``   ``(1 - exp(-tau1 h)) / tau1``
* ``phi2(tau2=..,m=..)``  ``h exp(-tau2 h^m)``
* ``phi3(tau1=..,tau2=..,m=..,k=..[,c=..])``  ``theta phi2 + (1 - theta) phi1``
  with ``theta(h) = exp(-c h^k)``; ``c`` defaults to 1.

The textual form round-trips through :func:`parse` and ``str``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

from .errors import PreconditionError

__all__ = [
    "Standard",
    "Phi1",
    "Phi2",
    "Phi3",
    "DenominatorSpec",
    "ValidationReport",
    "evaluate",
    "parse",
    "tau1_opt",
    "tau2_opt",
    "validate",
    "recommend",
    "AUTO_MARGIN",
]

# tau > tau_opt is strict; auto-selection moves this far past the bound
AUTO_MARGIN = 1e-3


def _check_h(h: float) -> float:
    h = float(h)
    if not h > 0:
        raise PreconditionError(f"step size must be positive, got {h}")
    return h


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def _order_param(name, value):
    if isinstance(value, float) and not value.is_integer():
        raise ValueError(f"{name} must be a positive integer, got {value}")
    value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return value


def _pow(h: float, n: int) -> float:
    try:
        return h**n
    except OverflowError:
        return math.inf


def _fmt(value) -> str:
    return str(value) if isinstance(value, int) else repr(float(value))


@dataclass(frozen=True)
class Standard:
    def __call__(self, h):
        return _check_h(h)

    def sup(self) -> float:
        return math.inf

    def order_preserving(self, p: int) -> bool:
        return True

    def __str__(self):
        return "h"


@dataclass(frozen=True)
class Phi1:
    tau1: float

    def __post_init__(self):
        object.__setattr__(self, "tau1", _positive("tau1", self.tau1))

    def __call__(self, h):
        h = _check_h(h)
        return -math.expm1(-self.tau1 * h) / self.tau1

    def sup(self) -> float:
        return 1.0 / self.tau1

    def order_preserving(self, p: int) -> bool:
        # h - tau1 h^2 / 2 + ...
        return p <= 1

    def __str__(self):
        return f"phi1(tau1={_fmt(self.tau1)})"


@dataclass(frozen=True)
class Phi2:
    tau2: float
    m: int

    def __post_init__(self):
        object.__setattr__(self, "tau2", _positive("tau2", self.tau2))
        object.__setattr__(self, "m", _order_param("m", self.m))

    def __call__(self, h):
        h = _check_h(h)
        return h * math.exp(-self.tau2 * _pow(h, self.m))

    def argmax(self) -> float:
        return (1.0 / (self.m * self.tau2)) ** (1.0 / self.m)

    def sup(self) -> float:
        return math.exp(-1.0 / self.m) * self.argmax()

    def order_preserving(self, p: int) -> bool:
        return self.m >= p

    def __str__(self):
        return f"phi2(tau2={_fmt(self.tau2)},m={self.m})"


@dataclass(frozen=True)
class Phi3:
    tau1: float
    tau2: float
    m: int
    k: int
    c: float = 1.0
    _phi1: Phi1 = field(init=False, repr=False, compare=False)
    _phi2: Phi2 = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("c", self.c))
        object.__setattr__(self, "k", _order_param("k", self.k))
        object.__setattr__(self, "_phi1", Phi1(self.tau1))
        object.__setattr__(self, "_phi2", Phi2(self.tau2, self.m))
        object.__setattr__(self, "tau1", self._phi1.tau1)
        object.__setattr__(self, "tau2", self._phi2.tau2)
        object.__setattr__(self, "m", self._phi2.m)

    def theta(self, h: float) -> float:
        return math.exp(-self.c * _pow(h, self.k))

    def __call__(self, h):
        h = _check_h(h)
        x = self.c * _pow(h, self.k)
        theta = math.exp(-x)
        return theta * self._phi2(h) - math.expm1(-x) * self._phi1(h)

    def sup(self) -> float:
        # convex combination, so bounded by the larger component supremum
        return max(self._phi1.sup(), self._phi2.sup())

    def order_preserving(self, p: int) -> bool:
        return self.m >= p and self.k >= p

    def __str__(self):
        core = f"tau1={_fmt(self.tau1)},tau2={_fmt(self.tau2)},m={self.m},k={self.k}"
        if self.c != 1.0:
            core += f",c={_fmt(self.c)}"
        return f"phi3({core})"


DenominatorSpec = Union[Standard, Phi1, Phi2, Phi3]


def evaluate(spec: DenominatorSpec, h: float) -> float:
    return spec(h)


_FAMILIES = {
    "phi1": (Phi1, {"tau1"}, set()),
    "phi2": (Phi2, {"tau2", "m"}, set()),
    "phi3": (Phi3, {"tau1", "tau2", "m", "k"}, {"c"}),
}
_INT_PARAMS = {"m", "k"}
_CALL_RE = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")


def parse(text: str) -> DenominatorSpec:
    """Parse ``"h"``, ``"phi1(tau1=1.0005)"``, ``"phi2(tau2=0.095,m=4)"``, ..."""
    stripped = text.strip()
    if stripped.lower() in ("h", "standard"):
        return Standard()
    match = _CALL_RE.match(stripped)
    if not match or match.group(1).lower() not in _FAMILIES:
        raise ValueError(f"cannot parse denominator spec {text!r}")
    cls, required, optional = _FAMILIES[match.group(1).lower()]
    kwargs = {}
    for part in filter(None, (p.strip() for p in match.group(2).split(","))):
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or key not in required | optional:
            raise ValueError(f"bad parameter {part!r} in {text!r}")
        if key in kwargs:
            raise ValueError(f"duplicate parameter {key!r} in {text!r}")
        try:
            kwargs[key] = int(value) if key in _INT_PARAMS else float(value)
        except ValueError:
            raise ValueError(f"bad value for {key!r} in {text!r}") from None
    missing = required - kwargs.keys()
    if missing:
        raise ValueError(f"missing parameters {sorted(missing)} in {text!r}")
    return cls(**kwargs)


def tau1_opt(tau_star: float) -> float:
    """Lower bound on ``tau1`` keeping ``phi1`` below ``tau_star``."""
    if not (tau_star > 0 and math.isfinite(tau_star)):
        raise PreconditionError(f"tau_star must be positive and finite, got {tau_star}")
    return 1.0 / tau_star


def tau2_opt(tau_star: float, m: int) -> float:
    """Lower bound on ``tau2`` keeping ``phi2`` below ``tau_star``: ``1/(m e tau*^m)``."""
    if not (tau_star > 0 and math.isfinite(tau_star)):
        raise PreconditionError(f"tau_star must be positive and finite, got {tau_star}")
    m = _order_param("m", m)
    return 1.0 / (m * math.e * tau_star**m)


@dataclass(frozen=True)
class ValidationReport:
    spec: str
    sup: float
    tau_star: float
    bounded: bool
    order_preserving: bool
    p: int

    @property
    def ok(self) -> bool:
        return self.bounded and self.order_preserving


def validate(spec: DenominatorSpec, tau_star: float, p: int) -> ValidationReport:
    """Check ``sup phi < tau_star`` and ``phi(h) = h + O(h^(p+1))``."""
    if not tau_star > 0:
        raise PreconditionError(f"tau_star must be positive, got {tau_star}")
    sup = spec.sup()
    return ValidationReport(
        spec=str(spec),
        sup=sup,
        tau_star=tau_star,
        bounded=sup < tau_star,
        order_preserving=spec.order_preserving(p),
        p=p,
    )


def recommend(
    tau_star: float, m: int, k: int, margin: float = AUTO_MARGIN
) -> tuple[Phi1, Phi2, Phi3]:
    """Auto-selected ``phi1``, ``phi2``, ``phi3`` just past the optimal parameters."""
    t1 = tau1_opt(tau_star) * (1.0 + margin)
    t2 = tau2_opt(tau_star, m) * (1.0 + margin)
    return Phi1(t1), Phi2(t2, m), Phi3(t1, t2, m, k)
