import math
import warnings

import numpy as np
import pytest

from nonloc import kernels as kl
from nonloc.asymptotics import NonMonotoneResidualWarning, compare_to_prediction, extract_limit
from nonloc.energy import bbm_energy
from nonloc.errors import DomainError, FitError

T = np.array([2.0**-k for k in range(4, 10)])


def test_richardson_exact_on_linear_data():
    est = extract_limit(list(zip(T, 3.0 - 5.0 * T)), model="richardson")
    assert est.a0 == pytest.approx(3.0, abs=1e-12)
    assert est.a1 == pytest.approx(-5.0, rel=1e-10)
    assert est.error_bar < 1e-12


def test_power_model_recovers_exponent():
    est = extract_limit(list(zip(T, 2.0 + 0.7 * T**0.5)))
    assert est.a0 == pytest.approx(2.0, abs=1e-9)
    assert est.gamma == 0.5
    est = extract_limit(list(zip(T, 2.0 + 0.7 * T**1.3)))
    assert est.gamma == pytest.approx(1.3, abs=1e-4)
    assert est.a0 == pytest.approx(2.0, abs=1e-6)


def test_normalizer_is_applied():
    est = extract_limit(list(zip(T, T * (4.0 + T))), normalizer=lambda t: t)
    assert est.a0 == pytest.approx(4.0, abs=1e-10)
    np.testing.assert_allclose(est.normalized, 4.0 + T)


def test_log_data_prefers_log_model():
    t = np.array([2.0**-k for k in range(4, 14)])
    data = list(zip(t, 1.27 + 0.8 / np.abs(np.log(t))))
    log = extract_limit(data, model="log")
    power = extract_limit(data, model="power")
    assert log.a0 == pytest.approx(1.27, abs=1e-12)
    assert log.max_residual < 1e-12
    assert power.max_residual > 1e3 * max(log.max_residual, 1e-15)
    assert abs(power.a0 - 1.27) > abs(log.a0 - 1.27)


def test_heat_p2_gaussian_limit(gauss1d):
    fn, u = gauss1d
    fam = kl.make_heat_derived(1, 2.0)
    samples = [bbm_energy(u, fam, t, 2.0) for t in T]
    est = extract_limit(samples)
    target = 2 * fn.grad_norm_pow(2.0)
    assert target == pytest.approx(2 * math.sqrt(math.pi / 2))
    assert est.a0 == pytest.approx(target, rel=0.01)
    assert compare_to_prediction(est, target, 0.01).passed


@pytest.mark.parametrize("c", [0.5, 3.0, -2.0])
def test_affine_equivariance(c):
    y = 1.5 + 0.3 * T**0.8 + 0.01 * np.sin(1 / T)
    a = extract_limit(list(zip(T, y)))
    b = extract_limit(list(zip(T, c * y)))
    assert b.a0 == pytest.approx(c * a.a0, rel=1e-6)
    assert b.error_bar == pytest.approx(abs(c) * a.error_bar, rel=1e-5, abs=1e-12)


@pytest.mark.parametrize("model", ["power", "log", "richardson"])
def test_drop_largest_within_error_bar(model):
    y = 2.0 + 0.4 * T**0.7 + 0.05 * T**2
    est = extract_limit(list(zip(T, y)), model=model)
    dropped = extract_limit(list(zip(T[1:], y[1:])), model=model)
    assert abs(est.a0 - dropped.a0) <= est.error_bar * (1 + 1e-12)
    assert len(est.residuals) == len(T)


def test_fit_errors():
    with pytest.raises(FitError):
        extract_limit(list(zip(T[:3], [1.0, 1.0, 1.0])))
    with pytest.raises(FitError):
        extract_limit(list(zip(T[::-1], np.ones(6))))
    with pytest.raises(FitError):
        extract_limit(list(zip(T, 1.0 / T)))
    with pytest.raises(FitError):
        extract_limit(list(zip(T, [1.0, 1.0, 1.0, 1.0, 1.0, math.nan])))
    with pytest.raises(DomainError):
        extract_limit(list(zip(T, np.ones(6))), model="spline")


def test_irregular_residuals_warn():
    y = 2.0 + 0.3 * T + 0.05 * (-1.0) ** np.arange(T.size)
    with pytest.warns(NonMonotoneResidualWarning):
        extract_limit(list(zip(T, y)), model="log")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        extract_limit(list(zip(T, 2.0 + 0.3 / np.abs(np.log(T)))), model="log")


def _est(a0, err):
    z = np.zeros(1)
    from nonloc.asymptotics import LimitEstimate
    return LimitEstimate(a0, 0.0, 1.0, "power", 0.0, err, z, z, z)


def test_compare_cases():
    v = compare_to_prediction(_est(2.003, 0.01), 2.0, 0.01)
    assert v.passed and not v.warning
    v = compare_to_prediction(_est(1.0, 0.0), 2.0, 0.01)
    assert not v.passed
    assert v.rel_error == pytest.approx(0.5)
    v = compare_to_prediction(_est(3.0, 5.0), 2.0, 0.01)
    assert v.passed and v.warning
    with pytest.raises(DomainError):
        compare_to_prediction(_est(1.0, 0.0), math.inf, 0.01)
