"""Quadrature engine for shift-difference energies and the limit energies.

Every energy here has the form

    int_{region} ||u(. + z) - u||_p^p * w(z) |z|^q dz

for a kernel w and a power q (q = -p for the normalized families, q = 0 for
heat-type weights and seminorm kernels). The integral runs over rays:
below ``r_min`` the shift difference is replaced by its small-|z| power law,
between ``r_min`` and the disjoint-support radius log-radius Gauss panels are
used, and beyond that radius the shift difference is the constant
2 ||u||_p^p so only a kernel moment is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NonConvergenceError
from .kernels import KernelFamily, make_weight
from .parallel import ordered_map
from .quadrature import SphericalDensity, log_panel_nodes, sphere_rule
from .special import sphere_area

__all__ = [
    "EnergySample",
    "AtomicPlusDiffuseMeasure",
    "shift_energy",
    "bbm_energy",
    "local_energy_weighted",
    "mixed_energy",
    "nonlocal_seminorm",
    "isotropic_average",
]


@dataclass(frozen=True)
class EnergySample:
    t: float
    value: float
    err_quad: float = 0.0
    err_grid: float = 0.0

    def __post_init__(self):
        if self.value < 0 or self.err_quad < 0 or self.err_grid < 0:
            raise DomainError("energy samples and their error estimates are non-negative")


@dataclass(frozen=True)
class AtomicPlusDiffuseMeasure:
    """alpha * delta_0 plus sum_i w_i delta_{z_i}."""

    alpha: float = 0.0
    points: np.ndarray = np.zeros((0, 1))
    weights: np.ndarray = np.zeros(0)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        if self.alpha < 0 or np.any(w < 0):
            raise DomainError("measure weights must be non-negative")
        if len(w) != len(pts) and len(w) > 0:
            raise DomainError("one weight per point")
        if len(w) and np.any(np.linalg.norm(pts, axis=1) == 0):
            raise DomainError("diffuse points must differ from the origin")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def diffuse_mass(self) -> float:
        return float(self.weights.sum())


def _ray_value(u, family: KernelFamily, t: float, p: float, q: float, sigma: np.ndarray,
               lo: float, hi: float, per_decade: int, order: int) -> tuple[float, float, float]:
    """(inner cap, panel part, tail) along the ray sigma, restricted to [lo, hi]."""
    N = len(sigma)
    r_min, r_max = u.r_min, u.disjoint_radius
    inner = tail = 0.0
    if lo < min(hi, r_min):
        a = u.small_shift_exponent(p)
        cap = u.shift_diff_pow(r_min * sigma, p) / r_min**a
        if cap > 0:
            inner = cap * family.ray_moment(t, sigma, lo, min(hi, r_min), q + a)
    if max(lo, r_max) < hi:
        tail = 2.0 * u.lp_norm_pow(p) * family.ray_moment(t, sigma, max(lo, r_max), hi, q)
    a, b = max(lo, r_min), min(hi, r_max)
    mid = 0.0
    if a < b:
        breaks = family.ray_breaks(t, sigma) + list(u.shift_breaks(sigma))
        r, w = log_panel_nodes(a, b, per_decade, order, breaks)
        k = family.on_ray(t, sigma, r)
        keep = k > 0
        if np.any(keep):
            d = np.array([u.shift_diff_pow(rr * sigma, p) for rr in r[keep]])
            mid = float(np.sum(w[keep] * d * k[keep] * r[keep] ** (q + N - 1)))
    return inner, mid, tail


def shift_energy(u, family: KernelFamily, t: float, p: float, q: float, *,
                 region: tuple[float, float] = (0.0, math.inf), tol: float = 1e-4,
                 per_decade: int = 8, order: int = 6, max_levels: int = 5,
                 n_angle: int = 64, n_polar: int = 32) -> tuple[float, float]:
    """Integral of Delta_p(z)^p rho_t(z) |z|^q over ``region`` with an error estimate.

    Panel density doubles until two successive values agree to ``tol``.

    Raises:
        NonConvergenceError: if ``max_levels`` doublings do not reach ``tol``.
        DivergenceError: if a kernel moment near 0 or infinity diverges.
    """
    if u.N != family.N:
        raise DomainError("function and kernel dimensions differ")
    lo, hi = region
    if not 0.0 <= lo < hi:
        raise DomainError("region must satisfy 0 <= r < R")
    if u.lp_norm_pow(p) == 0.0:
        return 0.0, 0.0
    if family.cubature is not None and family.N > 1:
        return _cubature_energy(u, family, t, p, q, lo, hi, tol, max_levels)
    N = family.N
    ang = family.angular_breaks(t) if family.angular_breaks is not None else None
    rule = sphere_rule(N, n_angle=n_angle, n_polar=n_polar, breaks=ang or None)

    def level(ppd: int) -> tuple[float, float]:
        parts = ordered_map(lambda sw: _ray_value(u, family, t, p, q, sw, lo, hi, ppd, order),
                            list(rule.nodes))
        fixed = sum(w * (pi[0] + pi[2]) for w, pi in zip(rule.weights, parts))
        mid = sum(w * pi[1] for w, pi in zip(rule.weights, parts))
        return float(fixed), float(mid)

    fixed, prev = level(per_decade)
    ppd = per_decade
    for _ in range(max_levels):
        ppd *= 2
        _, cur = level(ppd)
        err = abs(cur - prev)
        total = fixed + cur
        if err <= tol * abs(total) or err <= 1e-15 * max(1.0, abs(total)):
            return total, err
        prev = cur
    raise NonConvergenceError(f"panel refinement stalled at relative change {err / abs(total):.3g}")


def _cubature_energy(u, family, t, p, q, lo, hi, tol, max_levels):
    def level(L):
        z, w = family.cubature(t, L)
        r = np.linalg.norm(z, axis=1)
        keep = (r > 0) & (r >= lo) & (r <= hi) & (w != 0)
        d = np.array([u.shift_diff_pow(zz, p) for zz in z[keep]])
        return float(np.sum(w[keep] * d * r[keep] ** q))

    prev = level(1)
    for L in range(2, max_levels + 2):
        cur = level(L)
        err = abs(cur - prev)
        if err <= tol * abs(cur) or err <= 1e-15:
            return cur, err
        prev = cur
    raise NonConvergenceError("cubature refinement did not converge")


def bbm_energy(u, family: KernelFamily, t: float, p: float, *,
               region: tuple[float, float] | None = None, tol: float = 1e-4,
               grid_check: bool = False, **kw) -> EnergySample:
    """F_{t,p}(u) = int Delta_p(z)^p rho_t(z) / |z|^p dz, optionally on an annulus.

    With ``grid_check`` the energy is recomputed on a grid twice as fine and
    the difference is stored as ``err_grid``.
    """
    reg = (0.0, math.inf) if region is None else region
    val, err = shift_energy(u, family, t, p, -p, region=reg, tol=tol, **kw)
    eg = 0.0
    if grid_check and getattr(u, "source", None) is not None and hasattr(u, "refined"):
        fine, _ = shift_energy(u.refined(), family, t, p, -p, region=reg, tol=tol, **kw)
        eg = abs(fine - val)
    return EnergySample(t, max(val, 0.0), err, eg)


def _directional_pow(u, sigma, p):
    from .grid import directional_seminorm
    return directional_seminorm(u, sigma, p) ** p


def local_energy_weighted(u, theta: SphericalDensity, p: float) -> float:
    """D_p^mu(u) for mu = theta dH^{N-1} (weights times node values)."""
    if theta.N != u.N:
        raise DomainError("density and function dimensions differ")
    tot = 0.0
    for s, w, v in zip(theta.nodes, theta.weights, theta.values):
        if w * v > 0:
            tot += w * v * _directional_pow(u, s, p)
    return float(tot)


def isotropic_average(u, p: float, **rule_kw) -> float:
    """(1 / (N omega_N)) int_S ||sigma . Du||_p^p dH, by angular quadrature."""
    return local_energy_weighted(u, SphericalDensity.uniform(u.N, **rule_kw), p)


def mixed_energy(u, theta: SphericalDensity | None, nu: AtomicPlusDiffuseMeasure, p: float, *,
                 include_atom: bool = False) -> float:
    """G_p^{mu,nu}(u): local part plus sum_i w_i Delta_p(z_i)^p / |z_i|^p.

    The atom at the origin is invisible unless ``include_atom`` is set, in
    which case it adds alpha times the isotropic directional average.
    """
    tot = 0.0 if theta is None else local_energy_weighted(u, theta, p)
    for z, w in zip(nu.points, nu.weights):
        if w > 0:
            tot += w * u.shift_diff_pow(z, p) / float(np.linalg.norm(z)) ** p
    if include_atom and nu.alpha > 0:
        tot += nu.alpha * isotropic_average(u, p)
    return float(tot)


def nonlocal_seminorm(u, kappa: Callable[[np.ndarray], np.ndarray] | KernelFamily, p: float, *,
                      radial: bool = True, breaks: Sequence[float] = (), tol: float = 1e-4,
                      **kw) -> float:
    """[u]^p = int Delta_p(z)^p kappa(z) dz.

    Raises:
        DivergenceError: if the kernel moments near 0 or infinity diverge,
            i.e. u is not in the space.
    """
    fam = kappa if isinstance(kappa, KernelFamily) else make_weight(kappa, u.N, radial=radial, breaks=breaks)
    if not isinstance(kappa, KernelFamily):
        e = np.zeros(u.N)
        e[0] = 1.0
        if not np.any(np.asarray(kappa(np.outer(np.geomspace(1e-3, 1e3, 13), e))) > 0):
            return 0.0
    val, _ = shift_energy(u, fam, 1.0, p, 0.0, tol=tol, **kw)
    return val
