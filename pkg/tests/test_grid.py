import math

import numpy as np
import pytest
from scipy import integrate

from nonloc import grid
from nonloc.errors import BVRequestError, DomainError


def test_zero_shift(gauss1d, unit_interval):
    for _, u in (gauss1d, unit_interval):
        assert grid.shift_diff_norm(u, [0.0], 2.0) == 0.0


def test_far_shift_is_disjoint(gauss1d, gauss2d):
    for _, u in (gauss1d, gauss2d):
        z = np.zeros(u.N)
        z[0] = 2.5 * u.disjoint_radius
        for p in (1.0, 2.0):
            assert grid.shift_diff_norm(u, z, p) == pytest.approx((2 * u.lp_norm_pow(p)) ** (1 / p), rel=1e-12)


def test_interval_symmetric_difference(unit_interval):
    _, u = unit_interval
    assert grid.shift_diff_norm(u, [0.25], 1.0) == pytest.approx(0.5, rel=1e-12)
    # the same shift on the raw samples, no geometric shortcut
    raw = grid.GridFunction(u.values, u.h, u.origin)
    assert grid.shift_diff_norm(raw, [0.25], 1.0) == pytest.approx(0.5, abs=2 * u.h[0])


def test_shift_matches_direct_quadrature(gauss1d):
    _, u = gauss1d
    for z in (0.013, 0.3, 1.7):
        ref = integrate.quad(lambda x: (math.exp(-(x + z) ** 2) - math.exp(-x * x)) ** 2, -12, 12, limit=200)[0]
        assert u.shift_diff_pow([z], 2.0) == pytest.approx(ref, rel=1e-3)


def test_sampling_is_exact_at_nodes(gauss2d):
    fn, u = gauss2d
    np.testing.assert_array_equal(u.values, fn(u.nodes()))


def test_gradient_norm_gaussian(gauss1d):
    fn, u = gauss1d
    ref = integrate.quad(lambda x: 4 * x * x * math.exp(-2 * x * x), -np.inf, np.inf)[0]
    assert ref == pytest.approx(math.sqrt(math.pi / 2), rel=1e-12)
    assert fn.grad_norm_pow(2.0) == pytest.approx(ref, rel=1e-12)
    assert grid.gradient_norm(u, 2.0) ** 2 == pytest.approx(ref, rel=1e-3)


@pytest.mark.parametrize("p", [1.0, 1.5, 3.0])
def test_gaussian_closed_forms_by_quadrature(p):
    fn = grid.gaussian([0.0, 0.0], [1.0, 1.0], 2)
    g = lambda r: (2 * r * math.exp(-r * r)) ** p * 2 * math.pi * r
    assert fn.grad_norm_pow(p) == pytest.approx(integrate.quad(g, 0, np.inf)[0], rel=1e-10)
    d = lambda y, x: abs(2 * x * math.exp(-x * x - y * y)) ** p
    ref = integrate.dblquad(d, -9, 9, -9, 9, epsabs=1e-12)[0]
    assert fn.directional_pow([1.0, 0.0], p) == pytest.approx(ref, rel=1e-7)


def test_square_directional_perimeter():
    fn = grid.box_indicator([0.0, 0.0], [1.0, 1.0])
    u = grid.sample(fn, 0.05)
    assert grid.directional_seminorm(u, [1.0, 0.0], 1.0) == pytest.approx(2.0)
    assert grid.gradient_norm(u, 1.0) == pytest.approx(4.0)
    d = np.array([1.0, 1.0]) / math.sqrt(2)
    assert grid.directional_seminorm(u, d, 1.0) == pytest.approx(2 * math.sqrt(2))


def test_disk_perimeter():
    fn = grid.ball_indicator([0.0, 0.0], 0.5)
    assert fn.perimeter == pytest.approx(math.pi)
    # int |sigma . n| over a circle of radius r is 4 r
    assert fn.directional_perimeter(np.array([0.0, 1.0])) == pytest.approx(2.0)


def test_indicator_rejects_sobolev_norm(unit_interval):
    _, u = unit_interval
    with pytest.raises(BVRequestError):
        grid.gradient_norm(u, 2.0)


@pytest.mark.parametrize("angle", np.linspace(0, np.pi, 7))
def test_directional_below_full(gauss2d, angle):
    _, u = gauss2d
    s = np.array([math.cos(angle), math.sin(angle)])
    assert grid.directional_seminorm(u, s, 1.5) <= grid.gradient_norm(u, 1.5) * (1 + 1e-12)


def test_tent_closed_form():
    fn = grid.tent(0.0, 1.0, 1)
    u = grid.sample(fn, 0.01)
    assert fn.grad_norm_pow(2.0) == pytest.approx(2.0)
    assert grid.gradient_norm(u, 2.0) ** 2 == pytest.approx(2.0, rel=2e-2)


def test_parseval_random(rng):
    v = np.zeros((40, 30))
    v[5:35, 5:25] = rng.normal(size=(30, 20))
    u = grid.GridFunction(v, [0.1, 0.07])
    tab = grid.dft(u)
    assert tab.total() == pytest.approx(u.lp_norm_pow(2.0), rel=1e-8)


def test_self_dual_gaussian():
    fn = grid.gaussian(0.0, 1 / math.sqrt(math.pi), 1)
    u = grid.sample(fn, 0.01)
    tab = grid.dft(u, pad_factor=4.0)
    xi = tab.freqs[0]
    sel = np.abs(xi) < 3.0
    # a shifted origin only changes the phase
    np.testing.assert_allclose(tab.power[sel], np.exp(-2 * np.pi * xi[sel] ** 2), atol=1e-6)


def test_conjugate_symmetry(rng):
    v = np.zeros(64)
    v[8:56] = rng.normal(size=48)
    tab = grid.dft(grid.GridFunction(v, 0.1), pad_factor=2.0)
    P = tab.power
    np.testing.assert_allclose(P[1:], P[1:][::-1], rtol=1e-10, atol=1e-14 * P.max())


def test_gridfunction_validation():
    with pytest.raises(DomainError):
        grid.GridFunction([0.0, np.nan, 0.0], 0.1)
    with pytest.raises(DomainError):
        grid.GridFunction([1.0, 1.0, 0.0], 0.1)
    with pytest.raises(DomainError):
        grid.GridFunction([0.0, 1.0, 0.0], 0.0)
    with pytest.raises(DomainError):
        grid.box_indicator([1.0], [0.0])
