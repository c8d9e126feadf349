"""Explicit nonstandard Runge-Kutta (ENRK) integrators.

ENRK schemes replace the step size ``h`` of an explicit Runge-Kutta method by a
bounded denominator function ``phi(h)``; choosing ``phi`` below the stability
and positivity thresholds of a model keeps the scheme positive and
elementarily stable for every ``h`` while retaining the classical order.
"""

from .denominator import Phi1, Phi2, Phi3, Standard, parse, recommend, tau1_opt, tau2_opt, validate
from .errors import DivergenceError, PreconditionError
from .harness import convergence_table, error_metric, reference_solution, threshold_report
from .integrator import Trajectory, enrk_step, integrate
from .models import MODELS, get_model, jacobian_eigenvalues
from .positivity import UNDEFINED, pes_threshold, positivity_step_threshold
from .stability import (
    SpectrumClassification,
    elementary_stability_threshold,
    p_polynomial,
    smallest_positive_root,
    stability_coeffs,
    stability_threshold_for_eigen,
)
from .tableau import REGISTRY, ButcherTableau, positivity_radius, registry_get, verify_order

__version__ = "0.1.0"

__all__ = [
    "ButcherTableau",
    "REGISTRY",
    "registry_get",
    "verify_order",
    "positivity_radius",
    "stability_coeffs",
    "p_polynomial",
    "smallest_positive_root",
    "stability_threshold_for_eigen",
    "SpectrumClassification",
    "elementary_stability_threshold",
    "UNDEFINED",
    "positivity_step_threshold",
    "pes_threshold",
    "Standard",
    "Phi1",
    "Phi2",
    "Phi3",
    "parse",
    "tau1_opt",
    "tau2_opt",
    "validate",
    "recommend",
    "Trajectory",
    "enrk_step",
    "integrate",
    "MODELS",
    "get_model",
    "jacobian_eigenvalues",
    "reference_solution",
    "error_metric",
    "convergence_table",
    "threshold_report",
    "PreconditionError",
    "DivergenceError",
]
