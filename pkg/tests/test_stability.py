import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enrk.errors import PreconditionError
from enrk.stability import (
    SpectrumClassification,
    elementary_stability_threshold,
    p_polynomial,
    smallest_positive_root,
    stability_coeffs,
    stability_threshold_for_eigen,
)
from enrk.tableau import registry_get

from conftest import ALL_METHODS

LAM_STABLE = complex(-0.2, 0.6)


def _R_brute(t, z):
    # R(z) = 1 + z b^T (I - zA)^{-1} 1, straight from the tableau
    s = t.s
    return 1 + z * t.b @ np.linalg.solve(np.eye(s) - z * t.A, np.ones(s))


@pytest.mark.parametrize(
    "name, expected",
    [
        ("euler", (1, 1)),
        ("rk2", (1, 1, 0.5)),
        ("rk43", (1, 1, 1 / 2, 1 / 6, 1 / 48)),
        ("rk4classic", (1, 1, 1 / 2, 1 / 6, 1 / 24)),
    ],
)
def test_stability_coeffs(name, expected):
    np.testing.assert_allclose(stability_coeffs(registry_get(name)).coeffs, expected, rtol=1e-15)


@pytest.mark.parametrize("name", ALL_METHODS)
def test_coefficients_factorial_up_to_order(name):
    t = registry_get(name)
    c = stability_coeffs(t).coeffs
    for j in range(t.p + 1):
        assert c[j] == pytest.approx(1 / math.factorial(j), rel=1e-13)


@pytest.mark.parametrize("name", ALL_METHODS)
def test_stability_function_matches_resolvent(name, rng):
    t = registry_get(name)
    sp = stability_coeffs(t)
    for z in rng.normal(size=10) + 1j * rng.normal(size=10):
        assert sp(z) == pytest.approx(_R_brute(t, z), rel=1e-12)


def test_euler_p_polynomial():
    P = p_polynomial(stability_coeffs(registry_get("euler")), -1.0)
    np.testing.assert_allclose(P.coef, [-2.0, 1.0], atol=1e-15)


def test_rk2_p_polynomial():
    P = p_polynomial(stability_coeffs(registry_get("rk2")), LAM_STABLE)
    np.testing.assert_allclose(P.coef, [-0.4, 0.08, -0.08, 0.04], atol=1e-15)


@pytest.mark.parametrize("name", ALL_METHODS)
@pytest.mark.parametrize("lam", [LAM_STABLE, -1.0, 1.0, complex(0.3, -2.0), complex(-5, 1)])
def test_free_term(name, lam):
    # P(0) = 2 Re(lam) = 2 |lam| cos(theta)
    P = p_polynomial(stability_coeffs(registry_get(name)), lam)
    r, theta = cmath.polar(lam)
    assert P.coef[0] / r == pytest.approx(2 * math.cos(theta), abs=1e-14)


def test_zero_eigenvalue_rejected():
    with pytest.raises(PreconditionError):
        p_polynomial(stability_coeffs(registry_get("rk2")), 0.0)


@settings(max_examples=100, deadline=None)
@given(
    name=st.sampled_from(ALL_METHODS),
    r=st.floats(0.1, 10.0),
    theta=st.floats(-math.pi, math.pi),
    phi=st.floats(1e-3, 5.0),
)
def test_identity_phi_P_equals_modulus(name, r, theta, phi):
    sp = stability_coeffs(registry_get(name))
    lam = cmath.rect(r, theta)
    lhs = phi * p_polynomial(sp, lam)(phi)
    rhs = abs(sp(phi * lam)) ** 2 - 1
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_root_linear():
    assert smallest_positive_root([-2.0, 1.0]) == pytest.approx(2.0, abs=1e-6)


def test_root_none_for_positive_definite():
    assert smallest_positive_root([1.0, 0.0, 1.0]) is None


def test_root_rk2_table_value():
    # cubic 0.04 x^3 - 0.08 x^2 + 0.08 x - 0.4; oracle: numpy companion roots
    coef = [-0.4, 0.08, -0.08, 0.04]
    oracle = min(z.real for z in np.roots(coef[::-1]) if abs(z.imag) < 1e-12 and z.real > 0)
    got = smallest_positive_root(coef)
    assert got == pytest.approx(oracle, abs=1e-6)
    assert got == pytest.approx(2.6604, abs=1e-3)


def test_root_tangential():
    # (x - 1)^2 touches zero without a sign change
    got = smallest_positive_root([1.0, -2.0, 1.0])
    assert got == pytest.approx(1.0, abs=1e-2)


def test_root_beyond_scan_limit_is_absent():
    assert smallest_positive_root([-100.0, 1.0], scan_limit=64) is None


def test_root_rejects_zero_polynomial():
    with pytest.raises(PreconditionError):
        smallest_positive_root([0.0, 0.0])


@settings(max_examples=60, deadline=None)
@given(roots=st.lists(st.floats(0.05, 30.0), min_size=1, max_size=5).map(sorted))
def test_root_matches_companion_oracle(roots):
    if any(b - a < 1e-3 for a, b in zip(roots, roots[1:])):
        return
    poly = np.polynomial.Polynomial.fromroots(roots)
    got = smallest_positive_root(poly)
    if abs(got - roots[0]) > 1e-6:
        # the tangency rule may accept a flat scan node just before the root
        assert got < roots[0]
        assert abs(poly(got)) <= 1e-6 * np.max(np.abs(poly.coef))


def test_threshold_euler_examples():
    sp = stability_coeffs(registry_get("euler"))
    assert stability_threshold_for_eigen(sp, -1.0, "stable") == pytest.approx(2.0, abs=1e-6)
    assert stability_threshold_for_eigen(sp, LAM_STABLE, "stable") == pytest.approx(1.0, abs=1e-6)
    assert stability_threshold_for_eigen(sp, 1.0, "unstable") == math.inf


def test_threshold_mode_preconditions():
    sp = stability_coeffs(registry_get("rk2"))
    with pytest.raises(PreconditionError):
        stability_threshold_for_eigen(sp, -1.0, "unstable")
    with pytest.raises(PreconditionError):
        stability_threshold_for_eigen(sp, 1.0, "stable")
    with pytest.raises(ValueError):
        stability_threshold_for_eigen(sp, -1.0, "neutral")


@settings(max_examples=80, deadline=None)
@given(
    name=st.sampled_from(ALL_METHODS),
    re=st.floats(-5.0, -0.05),
    im=st.floats(-5.0, 5.0),
    c=st.floats(0.1, 10.0),
)
def test_scaling_law(name, re, im, c):
    sp = stability_coeffs(registry_get(name))
    lam = complex(re, im)
    base = stability_threshold_for_eigen(sp, lam, "stable")
    scaled = stability_threshold_for_eigen(sp, c * lam, "stable")
    if math.isinf(base):
        assert math.isinf(scaled)
    else:
        assert scaled == pytest.approx(base / c, rel=1e-6)


@pytest.mark.parametrize("name", ALL_METHODS)
def test_disk_check_below_threshold(name, rng):
    sp = stability_coeffs(registry_get(name))
    stable = [LAM_STABLE, complex(-0.2, -0.6)]
    unstable = [1.0]
    phi_star = elementary_stability_threshold(
        sp, SpectrumClassification.from_spectra([stable], [[1.0, -1.0]])
    )
    for phi in rng.uniform(0, phi_star, 20):
        assert all(abs(sp(phi * lam)) < 1 for lam in stable)
        assert any(abs(sp(phi * lam)) > 1 for lam in unstable)


def test_threshold_limits_stable_interval():
    sp = stability_coeffs(registry_get("rk2"))
    phi = stability_threshold_for_eigen(sp, LAM_STABLE, "stable")
    assert abs(sp((phi - 1e-3) * LAM_STABLE)) < 1
    assert abs(sp((phi + 1e-3) * LAM_STABLE)) > 1


def test_classification_dedupes_conjugates():
    cls = SpectrumClassification.from_spectra([[LAM_STABLE, LAM_STABLE.conjugate()]], [[1.0, -1.0]])
    assert cls.stable_eigs == (LAM_STABLE,)
    assert cls.unstable_eigs == (1.0,)


def test_classification_rejects_wrong_signs():
    with pytest.raises(PreconditionError):
        SpectrumClassification(stable_eigs=(0.5,))
    with pytest.raises(PreconditionError):
        SpectrumClassification(unstable_eigs=(-0.5,))


def test_empty_classification_is_domain_error():
    with pytest.raises(PreconditionError):
        elementary_stability_threshold(registry_get("euler"), SpectrumClassification())


def test_vaccination_euler_threshold():
    cls = SpectrumClassification.from_spectra([[-0.8, -2.4, -13 / 30]])
    assert elementary_stability_threshold(registry_get("euler"), cls) == pytest.approx(
        2 / 2.4, abs=1e-6
    )


def test_rk2_cubic_oracle():
    # analytic oracle: smallest positive root of x^3 - 2x^2 + 2x - 10
    oracle = min(z.real for z in np.roots([1, -2, 2, -10]) if abs(z.imag) < 1e-12)
    cls = SpectrumClassification.from_spectra([[LAM_STABLE]], [[1.0, -1.0]])
    assert elementary_stability_threshold(registry_get("rk2"), cls) == pytest.approx(oracle, abs=1e-5)
