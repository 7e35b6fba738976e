import math

import numpy as np
import pytest
from scipy import integrate

from nonloc import grid
from nonloc import heat_content as hc
from nonloc.errors import DomainError, FitError, ResolutionError


def _q_interval_quad(t):
    # int_0^1 int_0^1 h_t(x - y) dy dx, inner integral by erf
    from scipy.special import erf
    a = 2 * math.sqrt(t)
    return integrate.quad(lambda x: 0.5 * (erf((1 - x) / a) + erf(x / a)), 0, 1, epsabs=1e-13)[0]


@pytest.mark.parametrize("t", [1e-4, 1e-3, 1e-2, 0.1, 1.0])
def test_interval_closed_form_matches_quadrature(t):
    assert hc.interval_heat_content(t) == pytest.approx(_q_interval_quad(t), abs=1e-10)


@pytest.mark.parametrize("t", [1e-3, 1e-2, 0.1])
def test_raster_interval_matches_closed_form(t):
    E = hc.raster_interval(0.0, 1.0, 1 / 512, 6 * math.sqrt(t) + 0.1)
    assert hc.heat_content(E, t) == pytest.approx(hc.interval_heat_content(t), abs=1e-6)


def test_square_tensorizes():
    t = 4e-3
    E = hc.raster_box([0, 0], [1, 1], 1 / 256, 0.5)
    assert hc.heat_content(E, t) == pytest.approx(hc.interval_heat_content(t) ** 2, abs=1e-6)


def test_heat_escapes():
    E = hc.raster_interval(0.0, 1.0, 0.01, 30.0)
    assert hc.heat_content(E, 10.0) < 0.1
    assert hc.interval_heat_content(1e6) < 1e-3


def test_heat_content_below_volume():
    E = hc.raster_ball([0.0, 0.0], 0.5, 1 / 128, 0.5)
    for t in (1e-4, 1e-3, 1e-2):
        assert 0.0 <= hc.heat_content(E, t) <= E.mask_volume


def test_resolution_error():
    E = hc.raster_interval(0.0, 1.0, 0.01, 1.0)
    with pytest.raises(ResolutionError):
        hc.heat_content(E, 1e-6)
    with pytest.raises(DomainError):
        hc.heat_content(E, 0.0)


def test_raster_metadata():
    E = hc.raster_ball([0.0, 0.0], 0.5, 1 / 256, 0.2)
    assert E.volume == pytest.approx(math.pi / 4)
    assert E.perimeter == pytest.approx(math.pi)
    assert abs(E.mask_volume - E.volume) <= E.h * E.perimeter


# ---------------------------------------------------------------- energies

def test_zero_function():
    u = grid.GridFunction(np.zeros(64), 0.05)
    assert hc.heat_content_energy(u, 2.0, 1e-2) == 0.0
    assert hc.frac_heat_content_energy(u, 2.0, 0.5, 1e-2) == 0.0


def test_indicator_energy_is_twice_the_deficit(unit_interval):
    _, u = unit_interval
    for t in (1e-3, 1e-2):
        assert hc.heat_content_energy(u, 1.0, t) == pytest.approx(2 * (1 - hc.interval_heat_content(t)), rel=5e-3)


@pytest.mark.parametrize("t", [1e-3, 1e-2])
def test_direct_and_fourier_routes_agree(gauss1d, t):
    _, u = gauss1d
    direct = hc.heat_content_energy(u, 2.0, t)
    assert direct == pytest.approx(2 * hc.fourier_deficit(u, t), rel=5e-3)


def test_fourier_content_closed_form(gauss1d):
    # (H_t u, u) for u = e^{-x^2} is sqrt(pi/2) / sqrt(1 + 2t)
    _, u = gauss1d
    for t in (0.01, 0.1, 1.0):
        assert hc.fourier_content(u, t) == pytest.approx(math.sqrt(math.pi / 2) / math.sqrt(1 + 2 * t), rel=1e-6)


def test_deficit_endpoints(gauss1d):
    _, u = gauss1d
    assert hc.fourier_deficit(u, 0.0) == 0.0
    norm2 = u.lp_norm_pow(2.0)
    T = grid.dft(u)
    # only the zero mode survives; it never decays
    dc = T.total((T.xi_norm2() == 0).astype(float))
    assert hc.fourier_deficit(u, 1e6) == pytest.approx(norm2 - dc, rel=1e-9)
    assert dc == pytest.approx((u.values.sum() * u.h[0]) ** 2 * T.dual_volume, rel=1e-9)


def test_small_t_slope_is_gradient_energy(gauss1d):
    _, u = gauss1d
    t = 1e-6
    assert hc.fourier_deficit(u, t) / t == pytest.approx(math.sqrt(math.pi / 2), rel=1e-4)
    assert hc.dirichlet_form(u) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-6)
    assert hc.dirichlet_form(u, lambda xi2: 0.0 * xi2) == 0.0


def test_deficit_monotone_and_bounded(gauss2d):
    _, u = gauss2d
    ts = np.geomspace(1e-4, 1.0, 12)
    d = np.array([hc.fourier_deficit(u, t) for t in ts])
    assert np.all(np.diff(d) >= 0)
    form = hc.dirichlet_form(u)
    assert np.all(d / ts <= form * (1 + 1e-9))


def test_dirichlet_monotone_in_s():
    # spectrum concentrated where 2 pi |xi| > 1: the symbol grows with s
    x = np.arange(-2048, 2048) * 0.01
    u = grid.GridFunction(np.exp(-x**2) * np.cos(4 * 2 * math.pi * x), 0.01, origin=[x[0]])
    vals = [hc.dirichlet_form(u, hc.frac_symbol(s)) for s in (0.25, 0.5, 0.75)]
    assert vals[0] < vals[1] < vals[2]


def test_fractional_fourier_route(gauss1d):
    _, u = gauss1d
    t = 1e-2
    direct = hc.heat_content_energy(u, 2.0, t, "frac-heat", 0.5)
    # the symbol has a kink at xi = 0, so the dual grid must be fine there
    table = grid.dft(u, pad_factor=32)
    assert direct == pytest.approx(2 * hc.fourier_deficit(table, t, hc.frac_symbol(0.5)), rel=5e-3)
    coarse = 2 * hc.fourier_deficit(u, t, hc.frac_symbol(0.5))
    assert abs(coarse - direct) > abs(2 * hc.fourier_deficit(table, t, hc.frac_symbol(0.5)) - direct)


def test_frac_kernel_needs_s(gauss1d):
    _, u = gauss1d
    with pytest.raises(DomainError):
        hc.heat_content_energy(u, 2.0, 0.01, "frac-heat")
    with pytest.raises(DomainError):
        hc.heat_content_energy(u, 2.0, 0.01, "poisson")


# ---------------------------------------------------------------- perimeter fits

def test_interval_perimeter_closed_form():
    ts = [2.0**-k for k in range(6, 15)]
    curve = hc.heat_content_curve(None, ts, method="closed-form")
    assert hc.perimeter_from_heat(curve, 1.0).perimeter == pytest.approx(2.0, rel=5e-3)


@pytest.mark.slow
def test_square_and_disk_perimeters():
    ts = [2.0**-k for k in range(6, 15)]
    sq = hc.raster_box([0, 0], [1, 1], 1 / 512, 0.75)
    fit = hc.perimeter_from_heat(hc.heat_content_curve(sq, ts), sq.volume)
    assert fit.perimeter == pytest.approx(4.0, rel=0.02)
    disk = hc.raster_ball([0.0, 0.0], 0.5, 1 / 512, 0.75)
    fit = hc.perimeter_from_heat(hc.heat_content_curve(disk, ts), disk.mask_volume)
    assert fit.perimeter == pytest.approx(math.pi, rel=0.02)


def test_fit_errors():
    c = hc.heat_content_curve(None, [1e-3, 2e-3, 3e-3, 4e-3, 5e-3], method="closed-form")
    with pytest.raises(FitError):
        hc.perimeter_from_heat(c, 1.0)
    c = hc.heat_content_curve(None, np.linspace(1e-3, 5e-3, 8), method="closed-form")
    with pytest.raises(FitError):
        hc.perimeter_from_heat(c, 1.0)


def test_pgm_round_trip(tmp_path):
    img = np.zeros((40, 30), dtype=np.uint8)
    img[10:30, 5:25] = 255
    path = tmp_path / "sq.pgm"
    hc.write_pgm(path, img)
    assert np.array_equal(hc.read_pgm(path), img)
    E = hc.raster_from_pgm(path, 0.05)
    assert E.mask.sum() == 400
    assert E.mask_volume == pytest.approx(1.0)


def test_pgm_rejects_ascii(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
    with pytest.raises(DomainError):
        hc.read_pgm(path)
