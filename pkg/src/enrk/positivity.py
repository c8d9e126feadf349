"""Positivity step-size threshold ``H`` and the combined PES threshold ``tau*``."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Union

__all__ = [
    "Undefined",
    "UNDEFINED",
    "PositivityClass",
    "PESThreshold",
    "positivity_step_threshold",
    "pes_threshold",
    "format_threshold",
]


class Undefined(enum.Enum):
    """Threshold that cannot be determined from a zero positivity radius.

    Kept distinct from ``math.inf``: "unknown" is not "unbounded".
    """

    STAR = "*"

    def __str__(self):
        return self.value


UNDEFINED = Undefined.STAR

Threshold = Union[float, Undefined]


@dataclass(frozen=True)
class PositivityClass:
    """Right-hand sides with ``f(y) + alpha * y >= 0`` on the nonnegative orthant."""

    alpha: float

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")


class PESThreshold(NamedTuple):
    value: float
    stability_only: bool


def positivity_step_threshold(radius: float, cls: PositivityClass | float) -> Threshold:
    """``H = R(A, b) / alpha``; ``inf`` for ``alpha = 0``, undefined for ``R = 0``."""
    alpha = cls.alpha if isinstance(cls, PositivityClass) else float(cls)
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    if radius == 0:
        return UNDEFINED
    if alpha == 0:
        return math.inf
    return radius / alpha


def pes_threshold(phi_star: float, H: Threshold) -> PESThreshold:
    """``tau* = min(phi*, H)``.

    With an undefined ``H`` the stability threshold alone is returned and the
    result is flagged ``stability_only``.
    """
    if not phi_star > 0:
        raise ValueError(f"phi_star must be positive, got {phi_star}")
    if isinstance(H, Undefined):
        return PESThreshold(phi_star, True)
    return PESThreshold(min(phi_star, H), False)


def format_threshold(value: Threshold, digits: int = 4) -> str:
    if isinstance(value, Undefined):
        return str(value)
    if math.isinf(value):
        return "inf"
    return f"{value:.{digits}f}"
