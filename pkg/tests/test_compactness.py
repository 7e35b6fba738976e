import math

import numpy as np
import pytest

from nonloc import compactness as cp
from nonloc import grid, kernels as kl
from nonloc.errors import NoCertifyingDeltaError
from nonloc.special import ball_volume


def test_truncated_profile():
    G = cp.truncated_profile(kl.algebraic_profile(1, 1.0, c=4.0))
    r = np.array([0.0, 0.5, 1.0, 3.0])
    np.testing.assert_allclose(G.radial(r), np.minimum(4.0 / (1 + r) ** 2, 1.0))


def test_ball_self_convolution_is_triangle():
    axes, gg, l1 = cp.self_convolution(kl.ball_indicator_profile(1), extent=3.0, n=6000)
    y = axes[0]
    tri = np.maximum(2.0 - np.abs(y), 0.0)
    assert l1 == pytest.approx(2.0, abs=2e-3)
    assert np.max(np.abs(gg - tri)) < 2e-3


@pytest.mark.parametrize("K", [kl.gaussian_profile(1), kl.ball_indicator_profile(1), kl.gaussian_profile(2)])
def test_mollifier_inequalities(K):
    pair = cp.build_mollifier(K)
    # recheck on points between the table nodes
    N = K.N
    m = 801 if N == 1 else 61
    x = np.linspace(-2.0 * pair.radius, 2.0 * pair.radius, m)
    pts = np.stack(np.meshgrid(*([x] * N), indexing="ij"), axis=-1).reshape(-1, N) + pair.center
    phi = pair.phi(pts)
    bound = pair.gg_at(pts if N > 1 else pts[:, 0])
    assert np.all(phi >= 0)
    assert np.all(phi <= bound + 1e-9)
    assert np.all(pair.grad_phi_norm(pts) <= bound + 1e-9)
    assert pair.margin >= 0


def test_ball_bump_sits_under_triangle():
    pair = cp.build_mollifier(kl.ball_indicator_profile(1))
    assert pair.center[0] == pytest.approx(0.0, abs=1e-3)
    # half-max radius of the triangle 2 - |z| is 1
    assert pair.radius == pytest.approx(1.0, abs=1e-2)
    # phi peaks at c * bump(0) = c and must stay below the triangle minimum on its support
    assert pair.c <= 1.0


def test_phi_t_has_unit_mass():
    pair = cp.build_mollifier(kl.gaussian_profile(1))
    for beta in (1.0, 4.0):
        x = np.linspace(-5, 5, 20001)
        mass = np.trapezoid(pair.phi_t(x, beta), x)
        assert mass == pytest.approx(1.0, rel=1e-4)


@pytest.mark.slow
def test_supcomp_gaussian_bounded(gauss1d):
    _, u = gauss1d
    ts = [2.0**-k for k in range(3, 9)]
    rep = cp.verify_supcomp_bounds(u, kl.gaussian_profile(1), lambda t: t**-0.5, 2.0, ts)
    assert rep.verdict == "pass"
    assert np.all(np.isfinite(rep.r1)) and np.all(np.isfinite(rep.r2))
    assert np.max(rep.r1) <= 10 * rep.r1[0]


def test_supcomp_smooth_distance_shrinks():
    fn = grid.gaussian(0.0, 4.0, 1)
    u = grid.sample(fn, 0.05)
    ts = [2.0**-k for k in range(3, 8)]
    rep = cp.verify_supcomp_bounds(u, kl.gaussian_profile(1), lambda t: t**-0.5, 2.0, ts)
    # for smooth u the mollified distance decays like beta^-4, faster than beta^-p
    slope = np.polyfit(np.log(rep.beta), np.log(rep.dist_pow), 1)[0]
    assert slope < -2.0 - 1.0


def test_supcomp_zero_is_vacuous():
    u = grid.GridFunction(np.zeros(100), 0.05)
    rep = cp.verify_supcomp_bounds(u, kl.gaussian_profile(1), lambda t: t**-0.5, 2.0, [0.1, 0.05])
    assert rep.verdict == "vacuous pass"


def test_starlone_interval_ball():
    u = grid.sample(grid.box_indicator([0.0], [1.0]), 0.01)
    res = cp.verify_starlone(u, kl.ball_indicator_profile(1), 1.0)
    # Delta_1(z) = 2 min(|z|, 1); G*G = (2 - |z|)_+ ; ||G||_1 = 2
    assert res.lhs == pytest.approx(14 / 3, rel=2e-3)
    assert res.rhs == pytest.approx(8.0, rel=2e-3)
    assert res.passed


def test_starlone_zero():
    u = grid.GridFunction(np.zeros(10), 0.1)
    assert cp.verify_starlone(u, kl.ball_indicator_profile(1), 1.0) == cp.StarloneResult(0.0, 0.0, True)


def test_starlone_homogeneous():
    u = grid.sample(grid.box_indicator([0.0], [1.0]), 0.01)
    a = cp.verify_starlone(u, kl.ball_indicator_profile(1), 1.0)
    prof = kl.Profile(1, func=None, radial=lambda r: 3.0 * (np.asarray(r) <= 1.0), breaks=(1.0,))
    b = cp.verify_starlone(u, prof, 1.0)
    assert b.lhs == pytest.approx(9 * a.lhs, rel=1e-3)
    assert b.rhs == pytest.approx(9 * a.rhs, rel=1e-3)
    assert b.passed


def test_distance_fractional_quarter():
    fam = kl.make_frac_heat_derived(1, 1.0, 0.25)
    u = grid.sample(grid.box_indicator([0.0], [1.0]), 0.01)
    rows = cp.verify_mollifier_distance(u, fam, [0.1, 0.01], 1.0)
    assert len(rows) == 4
    assert all(r.passed for r in rows)
    for r in rows:
        assert r.lhs == pytest.approx(r.delta, rel=1e-12)


def test_certified_delta_shrinks_with_eps():
    fam = kl.make_frac_heat_derived(1, 1.0, 0.25)
    d1 = cp.certify_delta(fam, 0.1)
    d2 = cp.certify_delta(fam, 0.01)
    assert d2 <= d1


def test_distance_zero_function():
    fam = kl.make_frac_heat_derived(1, 1.0, 0.25)
    u = grid.GridFunction(np.zeros(10), 0.1)
    assert all(r.passed and r.lhs == 0.0 for r in cp.verify_mollifier_distance(u, fam, [0.1], 1.0))


def test_heat_derived_has_no_certifying_delta():
    with pytest.raises(NoCertifyingDeltaError):
        cp.certify_delta(kl.make_heat_derived(1, 1.0), 0.01)
