import math

import numpy as np
import pytest
from scipy import integrate

from nonloc import diagnostics as dg
from nonloc import kernels as kl
from nonloc.errors import ConeOverlapError, DomainError, NormalizationError
from nonloc.quadrature import SphericalDensity, sphere_rule

T5 = tuple(2.0**-k for k in range(2, 7))


# ---------------------------------------------------------------- sequence helpers

def test_bounded_verdict_cases():
    assert dg.bounded_verdict([1.0, 1.0, 1.0, 1.0])[0] == "satisfied"
    assert dg.bounded_verdict([1.0, 4.0, 16.0, 64.0])[0] == "violated"
    assert dg.bounded_verdict([1.0, 1.5, 1.6, 1.7])[0] == "inconclusive"
    assert dg.bounded_verdict([1.0, 2.0, math.inf])[0] == "violated"
    v, est, trend = dg.bounded_verdict([1.0, 1.5, 1.75, 1.875, 1.9375])
    assert trend == "increasing"
    assert est == pytest.approx(2.0)


def test_vanishes_power_and_log_rates():
    t = np.array([2.0**-k for k in range(2, 11)])
    assert dg.vanishes(t**0.5, t, 1e-12)
    assert dg.vanishes(1.0 / np.abs(np.log(t)), t, 1e-12)
    assert not dg.vanishes(np.ones_like(t), t, 1e-12)
    assert not dg.vanishes(1.0 + t, t, 1e-12)


def test_grid_validation():
    fam = kl.make_fractional_bbm(1, 1.0)
    with pytest.raises(DomainError):
        dg.condition_i(fam, t_grid=(0.5, 0.25, 0.1))
    with pytest.raises(DomainError):
        dg.condition_i(fam, R_grid=(1.0, 10.0), t_grid=T5)


# ---------------------------------------------------------------- condition (i) and its split forms

@pytest.fixture(scope="module")
def frac_reports():
    fam = kl.make_fractional_bbm(1, 1.0)
    return dg.condition_i(fam), dg.condition_split(fam)


def test_fractional_condition_i(frac_reports):
    ci, _ = frac_reports
    assert ci.verdict == "satisfied"
    assert ci.sup_estimate == pytest.approx(2.0, rel=0.1)


def test_fractional_split_items_agree(frac_reports):
    _, cs = frac_reports
    assert cs.items == {"ii": "satisfied", "iv": "satisfied", "v": "satisfied"}
    assert cs.consistent


def test_fractional_ball_mass_rows():
    fam = kl.make_fractional_bbm(1, 1.0)
    vals = [fam.ball_integral(t, 0.0, 1.0) for t in (0.2, 0.1, 0.05)]
    assert vals == pytest.approx([2.0, 2.0, 2.0], rel=1e-12)


def test_weighted_integral_by_quadrature():
    # R^p int rho_t/(R^p + |z|^p) for the power family, against scipy quad
    fam = kl.make_fractional_bbm(1, 1.0)
    rep = dg.condition_i(fam, R_grid=(0.1, 1.0, 10.0, 100.0), t_grid=T5)
    t, R = T5[-1], 10.0
    ref = 2 * integrate.quad(lambda r: R * t * r ** (t - 1) / (R + r), 0, np.inf, limit=400)[0]
    assert rep.tables["weighted"][2, -1] == pytest.approx(ref, rel=1e-6)


def test_heat_derived_satisfied():
    fam = kl.make_heat_derived(1, 2.0)
    assert dg.condition_i(fam).verdict == "satisfied"
    cs = dg.condition_split(fam)
    assert cs.verdict == "satisfied" and cs.consistent
    # the raw tail is a Gaussian tail: it dies out along R
    assert cs.limsup["raw_tail"][-1] < 1e-12


def test_blowup_violated():
    fam = kl.make_blowup_ball(1, 1.0)
    assert dg.condition_i(fam).verdict == "violated"
    cs = dg.condition_split(fam)
    assert cs.items["iv"] == "violated"
    np.testing.assert_allclose(cs.tables["ball_mass"][4], [2 / t for t in dg.DEFAULT_T_GRID], rtol=1e-12)


def test_subcritical_items_disagree():
    fam = kl.make_frac_heat_derived(1, 1.0, 0.25)
    cs = dg.condition_split(fam)
    assert cs.items["ii"] == "violated"
    assert cs.items["v"] == "satisfied"
    assert not cs.consistent


# ---------------------------------------------------------------- concentration

def test_annulus_not_concentrated():
    rep = dg.nu_concentration(kl.make_annulus_escape(1, 1.0))
    assert rep.verdict == "nu not concentrated"
    np.testing.assert_allclose(rep.inner, 0.0, atol=1e-15)
    np.testing.assert_allclose(rep.outer, 1.0, rtol=1e-12)


def test_heat_derived_concentrates():
    rep = dg.nu_concentration(kl.make_heat_derived(1, 2.0))
    assert rep.concentrated
    # total mass of |z|^2 h_t / t is int z^2 h_1 = 2
    assert rep.alpha == pytest.approx(2.0, rel=1e-3)


def test_box_concentrates_with_unit_atom():
    rep = dg.nu_concentration(kl.make_anisotropic_box(2, 1, 1, 2.0), t_grid=T5)
    assert rep.concentrated
    assert rep.alpha == pytest.approx(1.0, rel=1e-3)


def test_bad_deltas():
    with pytest.raises(DomainError):
        dg.nu_concentration(kl.make_heat(1), deltas=(0.1, 0.5))


# ---------------------------------------------------------------- angular measures

def test_radial_spherical_density_constant():
    dens = dg.spherical_density(kl.make_heat_derived(2, 1.0), 0.01, 0.5)
    assert np.ptp(dens.values) <= 1e-8 * dens.values.mean()


@pytest.mark.parametrize("t", [0.2, 0.05])
def test_fractional_spherical_density(t):
    d = 0.5
    dens = dg.spherical_density(kl.make_fractional_bbm(1, 1.0), t, d)
    np.testing.assert_allclose(dens.values, d**t, rtol=1e-12)


def test_box_density_misses_short_axis():
    dens = dg.spherical_density(kl.make_anisotropic_box(2, 1, 1, 2.0), 0.1, 0.5)
    i1 = int(np.argmax(dens.nodes @ np.array([1.0, 0.0])))
    i2 = int(np.argmax(dens.nodes @ np.array([0.0, 1.0])))
    assert dens.values[i2] <= 0.02 * dens.values[i1]


def test_theta_radial_profile():
    for N in (1, 2):
        th = dg.theta_density(kl.gaussian_profile(N), 2.0)
        np.testing.assert_allclose(th.values, 1 / (N * math.pi ** (N / 2) * 2 / math.gamma(N / 2) / N), rtol=1e-6)
        assert th.total_mass() == pytest.approx(1.0, abs=1e-6)


def test_theta_stretched_ratio():
    p = 1.0
    th = dg.theta_density(kl.stretched_gaussian_profile(2, 2.0), p)
    i1 = int(np.argmax(th.nodes @ np.array([1.0, 0.0])))
    i2 = int(np.argmax(th.nodes @ np.array([0.0, 1.0])))
    # ray moments int r^(N+p-1) exp(-(r/a)^2) dr scale as a^(N+p)
    m1 = integrate.quad(lambda r: r**2 * math.exp(-(r / 2) ** 2), 0, np.inf)[0]
    m2 = integrate.quad(lambda r: r**2 * math.exp(-(r**2)), 0, np.inf)[0]
    assert th.values[i1] / th.values[i2] == pytest.approx(m1 / m2, rel=1e-8)
    assert th.total_mass() == pytest.approx(1.0, abs=1e-6)


def test_theta_divergent_profile():
    with pytest.raises(NormalizationError):
        dg.theta_density(kl.algebraic_profile(1, 1.0), 1.0)


def test_theta_mu_uniform_circle():
    th = SphericalDensity.uniform(2, n_angle=1024)
    ref = integrate.quad(lambda a: abs(math.cos(a)), 0, 2 * math.pi)[0] / (2 * math.pi)
    assert ref == pytest.approx(2 / math.pi)
    assert dg.theta_mu_min(th) == pytest.approx(ref, rel=1e-5)
    assert dg.theta_mu_min(th.scaled(2.0)) == pytest.approx(2 * ref, rel=1e-5)


def test_theta_mu_axis_atoms():
    th = SphericalDensity(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.ones(2), np.ones(2))
    assert dg.theta_mu(th, [[0.0, 1.0]])[0] == 0.0
    assert dg.theta_mu_min(th) == pytest.approx(0.0, abs=1e-12)


def test_theta_mu_spanning_supports():
    rule = sphere_rule(3, n_angle=64, n_polar=32)
    upper = rule.nodes[:, 2] > 0
    hemi = SphericalDensity(rule.nodes, rule.weights, upper.astype(float))
    assert dg.theta_mu_min(hemi, n_angle=120) > 0.1
    equator = np.abs(rule.nodes[:, 2]) < 0.05
    flat = SphericalDensity(rule.nodes, rule.weights, equator.astype(float))
    assert dg.theta_mu(flat, [[0.0, 0.0, 1.0]])[0] < 0.1 * dg.theta_mu(flat, [[1.0, 0.0, 0.0]])[0]


# ---------------------------------------------------------------- maximal rank

def test_cones_disjoint_geometry():
    assert dg.cones_disjoint(np.eye(2), 0.25)
    assert not dg.cones_disjoint(np.eye(2), 0.3)


def test_maxrank_heat_positive():
    rep = dg.maximal_rank_probe(kl.make_heat_derived(2, 2.0), t_grid=T5)
    assert rep.positive


def test_maxrank_overlap_raises():
    with pytest.raises(ConeOverlapError):
        dg.maximal_rank_probe(kl.make_heat_derived(2, 2.0), tau=0.3, t_grid=T5)


def test_maxrank_box_negative():
    rep = dg.maximal_rank_probe(kl.make_anisotropic_box(2, 1, 1, 2.0), t_grid=T5)
    assert not rep.positive
    assert rep.vanishing[1].all()


def test_maxrank_single_cone_support():
    def rho(t, z):
        r = np.linalg.norm(z, axis=-1)
        inside = (r <= t) & (z[..., 0] >= 0.95 * r)
        return inside / (t * t)

    fam = kl.KernelFamily(2, 1.0, "cone-e1", rho=rho, breaks=lambda t, s: (t,), scale=lambda t: t)
    rep = dg.maximal_rank_probe(fam, t_grid=T5)
    assert not rep.positive
    assert rep.floor == 0.0


def test_rescaled_density_converges_to_theta():
    K = kl.stretched_gaussian_profile(2, 2.0)
    fam = kl.make_rescaled(K, lambda t: t**-0.5, 2.0)
    th = dg.theta_density(K, 2.0)
    ref = th.values / th.total_mass()
    for t in (1e-2, 1e-4):
        d = dg.spherical_density(fam, t, 1.0)
        np.testing.assert_allclose(d.values / d.total_mass(), ref, rtol=1e-8)


@pytest.mark.parametrize("make", [lambda: kl.make_fractional_bbm(1, 1.0), lambda: kl.make_heat_derived(1, 1.0),
                                  lambda: kl.make_blowup_ball(1, 1.0), lambda: kl.make_annulus_escape(1, 1.0)])
def test_condition_forms_agree(make):
    fam = make()
    ci = dg.condition_i(fam)
    cs = dg.condition_split(fam)
    assert cs.consistent
    assert (ci.verdict == "satisfied") == (cs.verdict == "satisfied")
