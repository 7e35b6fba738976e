import math

import numpy as np
import pytest
from scipy import special as ssp

from nonloc import special as sp
from nonloc.errors import DomainError, PoleError


@pytest.mark.parametrize("x", np.linspace(0.1, 20.0, 60))
def test_gamma_recurrence(x):
    assert sp.gamma_fn(x + 1) == pytest.approx(x * sp.gamma_fn(x), rel=1e-10)


@pytest.mark.parametrize("x", np.geomspace(0.05, 50.0, 80))
def test_gamma_matches_scipy(x):
    assert sp.gamma_fn(x) == pytest.approx(ssp.gamma(x), rel=1e-12)


@pytest.mark.parametrize("x", [-2.5, -0.3, 0.5, 1.5])
def test_gamma_half_integers_and_negatives(x):
    assert sp.gamma_fn(x) == pytest.approx(ssp.gamma(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
def test_gamma_poles(x):
    with pytest.raises(PoleError):
        sp.gamma_fn(x)


def test_bbm_heat_constant_values():
    assert sp.bbm_heat_constant(2) == pytest.approx(2.0, abs=1e-14)
    assert sp.bbm_heat_constant(1) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-13)
    for p in (1.3, 2.7, 4.0):
        assert sp.bbm_heat_constant(p) == pytest.approx(2 * ssp.gamma(p) / ssp.gamma(p / 2), rel=1e-12)


def test_bbm_heat_constant_rejects_small_p():
    with pytest.raises(DomainError):
        sp.bbm_heat_constant(0.5)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_tail_constant_at_half(N):
    ref = ssp.gamma((N + 1) / 2) / math.pi ** ((N + 1) / 2)
    assert sp.frac_tail_constant(N, 0.5) == pytest.approx(ref, rel=1e-12)


def test_tail_constant_matches_inverted_kernel():
    from nonloc.fracheat import fit_tail_constant

    for s in (0.25, 0.75):
        fitted, _ = fit_tail_constant(1, s)
        assert fitted == pytest.approx(sp.frac_tail_constant(1, s), rel=1e-2)


def test_local_constant_three_quarters():
    ref = ssp.gamma(1 / 3) / ssp.gamma(1 / 2) * 2 / math.sqrt(math.pi)
    assert sp.frac_heat_local_constant(0.75, 1) == pytest.approx(ref, rel=1e-12)


def test_local_constant_refuses_critical_and_subcritical():
    with pytest.raises(DomainError):
        sp.frac_heat_local_constant(0.5, 1)
    with pytest.raises(DomainError):
        sp.frac_heat_local_constant(0.25, 1)


def test_local_constant_reduces_to_heat_at_s_one():
    assert sp.frac_heat_local_constant(1.0, 1.5) == sp.bbm_heat_constant(1.5)


@pytest.mark.parametrize("s,p,label,probe", [
    (0.75, 1, sp.RegimeLabel.SUPERCRITICAL, lambda t: t ** (2 / 3)),
    (0.5, 1, sp.RegimeLabel.CRITICAL, lambda t: t * abs(math.log(t))),
    (0.25, 1, sp.RegimeLabel.SUBCRITICAL, lambda t: t),
])
def test_regime_labels_and_normalizers(s, p, label, probe):
    got, psi = sp.regime(s, p)
    assert got is label
    for t in (1e-1, 1e-3, 1e-6):
        assert psi(t) == pytest.approx(probe(t), rel=1e-14)


def test_regime_depends_only_on_sign():
    for s, p in [(0.6, 1.1), (0.9, 1.7), (0.55, 1.05)]:
        assert sp.regime(s, p)[0] is sp.RegimeLabel.SUPERCRITICAL
    for s, p in [(0.4, 1.0), (0.2, 3.0)]:
        assert sp.regime(s, p)[0] is sp.RegimeLabel.SUBCRITICAL


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_sphere_and_ball(N):
    assert sp.sphere_area(N) == pytest.approx(N * sp.ball_volume(N), rel=1e-13)
    assert sp.ball_volume(2) == pytest.approx(math.pi)
    assert sp.sphere_area(1) == pytest.approx(2.0)


@pytest.mark.parametrize("N,p", [(2, 1.0), (2, 2.0), (3, 1.5), (3, 2.0)])
def test_directional_average_by_quadrature(N, p):
    from scipy import integrate

    if N == 2:
        ref = integrate.quad(lambda a: abs(math.cos(a)) ** p, 0, 2 * math.pi)[0] / (2 * math.pi)
    else:
        # uniform on S^2: cos(polar) is uniform on [-1, 1]
        ref = integrate.quad(lambda c: abs(c) ** p, -1, 1)[0] / 2
    assert sp.directional_average_closed(N, p) == pytest.approx(ref, rel=1e-10)
    assert sp.directional_average_closed(1, p) == pytest.approx(1.0)
