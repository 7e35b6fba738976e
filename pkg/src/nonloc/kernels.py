"""Kernel families, time-independent profiles, moments and rescaling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special as sps

from .errors import DivergenceError, DomainError, NormalizationError
from .fracheat import frac_heat_table, poisson_kernel
from .quadrature import ray_integral, sphere_rule
from .special import ball_volume, regime, sphere_area

__all__ = [
    "Profile",
    "KernelFamily",
    "RescaledFamily",
    "MomentFunction",
    "HeatTypeClass",
    "gaussian_profile",
    "stretched_gaussian_profile",
    "ball_indicator_profile",
    "algebraic_profile",
    "frac_heat_profile",
    "make_heat",
    "make_frac_heat",
    "make_fractional_bbm",
    "make_rescaled",
    "make_anisotropic_box",
    "make_general_heat_type",
    "classify_heat_type",
    "make_annulus_escape",
    "make_blowup_ball",
    "make_heat_derived",
    "make_frac_heat_derived",
    "make_weight",
    "moment",
]


def _norm(z: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(z * z, axis=-1))


def _as_points(z, N: int) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if N == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    if z.shape[-1] != N:
        raise DomainError(f"points must have trailing dimension {N}")
    return z


def _gamma_ray(t: float, a: float, b: float, m: float) -> float:
    # int_a^b exp(-r^2/(4t)) r^m dr for m > -1, via regularized incomplete gammas
    k = 0.5 * (m + 1.0)
    pref = 2.0**m * t**k * math.gamma(k)
    xa, xb = a * a / (4.0 * t), (b * b / (4.0 * t) if math.isfinite(b) else math.inf)
    if xa > k:
        hi = 0.0 if math.isinf(xb) else sps.gammaincc(k, xb)
        return pref * (sps.gammaincc(k, xa) - hi)
    top = 1.0 if math.isinf(xb) else sps.gammainc(k, xb)
    return pref * (top - sps.gammainc(k, xa))


def _power_ray(c: float, e: float, a: float, b: float) -> float:
    # int_a^b c r^(e-1) dr
    if e == 0.0:
        if a == 0.0 or not math.isfinite(b):
            raise DivergenceError("logarithmically divergent ray integral")
        return c * math.log(b / a)
    if (a == 0.0 and e < 0) or (not math.isfinite(b) and e > 0):
        raise DivergenceError("power-law ray integral diverges")
    hi = 0.0 if not math.isfinite(b) else b**e
    lo = 0.0 if a == 0.0 else a**e
    return c * (hi - lo) / e


@dataclass(frozen=True, eq=False)
class Profile:
    """A fixed non-negative kernel shape K on R^N.

    ``radial`` gives K as a function of |x| when the profile is radial.
    ``breaks`` lists radii where K is not smooth, and ``ray_breaks`` does the
    same per direction for non-radial shapes.
    """

    N: int
    func: Callable[[np.ndarray], np.ndarray]
    radial: Callable[[np.ndarray], np.ndarray] | None = None
    breaks: tuple[float, ...] = ()
    scale: float = 1.0
    label: str = "profile"
    ray_breaks: Callable[[np.ndarray], Sequence[float]] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def is_radial(self) -> bool:
        return self.radial is not None

    def __call__(self, z) -> np.ndarray:
        z = _as_points(z, self.N)
        if self.radial is not None:
            return self.radial(_norm(z))
        return self.func(z)

    def on_ray(self, sigma: np.ndarray, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.radial is not None:
            return self.radial(r)
        return self.func(r[..., None] * np.asarray(sigma, dtype=float))

    def ray_moment(self, sigma, a: float, b: float, q: float) -> float:
        """int_a^b K(sigma r) r^(N-1+q) dr."""
        sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
        key = (a, b, q) if self.is_radial else (a, b, q, tuple(np.round(sigma, 15)))
        if key not in self._cache:
            brk = list(self.breaks)
            if self.ray_breaks is not None:
                brk += list(self.ray_breaks(sigma))
            m = self.N - 1 + q
            self._cache[key] = ray_integral(lambda r: self.on_ray(sigma, r) * r**m, a, b,
                                            breaks=brk, scale=self.scale)
        return self._cache[key]


def gaussian_profile(N: int) -> Profile:
    """The heat kernel at time 1, exp(-|x|^2/4)/(4 pi)^(N/2)."""
    c = (4.0 * math.pi) ** (-N / 2.0)
    return Profile(N, func=None, radial=lambda r: c * np.exp(-np.asarray(r) ** 2 / 4.0),
                   scale=2.0, label="gaussian")


def stretched_gaussian_profile(N: int, stretch: float = 2.0) -> Profile:
    """exp(-(x_1/stretch)^2 - |x'|^2), a non-radial Gaussian elongated along e_1."""
    if N < 2:
        raise DomainError("stretched profile needs N >= 2")

    def f(z):
        q = (z[..., 0] / stretch) ** 2 + np.sum(z[..., 1:] ** 2, axis=-1)
        return np.exp(-q)

    return Profile(N, func=f, scale=stretch, label=f"stretched-gaussian-{stretch:g}")


def ball_indicator_profile(N: int, normalized: bool = False) -> Profile:
    c = 1.0 / ball_volume(N) if normalized else 1.0
    return Profile(N, func=None, radial=lambda r: c * (np.asarray(r) <= 1.0).astype(float),
                   breaks=(1.0,), label="ball-indicator")


def algebraic_profile(N: int, p: float, c: float = 1.0) -> Profile:
    """c / (1 + |x|)^(N+p)."""
    return Profile(N, func=None, radial=lambda r: c / (1.0 + np.asarray(r)) ** (N + p),
                   label="algebraic")


def frac_heat_profile(N: int, s: float) -> Profile:
    if s == 0.5:
        return Profile(N, func=None, radial=lambda r: poisson_kernel(1.0, r, N),
                       label="frac-heat-0.5")
    table = frac_heat_table(N, s)
    return Profile(N, func=None, radial=table, label=f"frac-heat-{s:g}")


@dataclass(frozen=True, eq=False)
class KernelFamily:
    """A family t -> rho_t of non-negative kernels on R^N.

    Only ``rho`` is mandatory. The optional hooks let quadrature routines
    exploit structure: a radial profile, radii where rho_t is not smooth, an
    exact formula for ray moments, a dedicated cubature for kernels whose
    support is not star-shaped in a useful way, and angular break points.
    """

    N: int
    p: float | None
    family_id: str
    rho: Callable[[float, np.ndarray], np.ndarray]
    is_radial: bool = False
    has_closed_form: bool = True
    radial: Callable[[float, np.ndarray], np.ndarray] | None = None
    breaks: Callable[[float, np.ndarray], Sequence[float]] | None = None
    exact_moment: Callable[[float, np.ndarray, float, float, float], float] | None = None
    cubature: Callable[[float, int], tuple[np.ndarray, np.ndarray]] | None = None
    scale: Callable[[float], float] = lambda t: 1.0
    angular_breaks: Callable[[float], Sequence[float]] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def evaluate(self, t: float, z) -> np.ndarray:
        """rho_t at the points ``z`` (shape (..., N), or scalars when N = 1)."""
        z = _as_points(z, self.N)
        if self.radial is not None:
            return self.radial(t, _norm(z))
        return self.rho(t, z)

    def on_ray(self, t: float, sigma, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.radial is not None:
            return self.radial(t, r)
        return self.rho(t, r[..., None] * np.asarray(sigma, dtype=float))

    def ray_breaks(self, t: float, sigma) -> list[float]:
        return list(self.breaks(t, np.asarray(sigma, dtype=float))) if self.breaks else []

    def ray_moment(self, t: float, sigma, a: float, b: float, q: float = 0.0) -> float:
        """int_a^b rho_t(sigma r) r^(N-1+q) dr, exact when the family knows how."""
        sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
        if a >= b:
            return 0.0
        key = (t, a, b, q) if self.is_radial else (t, a, b, q, tuple(np.round(sigma, 15)))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.exact_moment is not None:
            val = self.exact_moment(t, sigma, a, b, q)
        else:
            m = self.N - 1 + q
            val = ray_integral(lambda r: self.on_ray(t, sigma, r) * r**m, a, b,
                               breaks=self.ray_breaks(t, sigma), scale=self.scale(t))
        if len(self._cache) > 200_000:
            self._cache.clear()
        self._cache[key] = val
        return val

    def ball_integral(self, t: float, a: float, b: float, q: float = 0.0, n_angle: int = 256) -> float:
        """int over {a <= |z| <= b} of rho_t(z) |z|^q dz."""
        if self.is_radial:
            e = np.zeros(self.N)
            e[0] = 1.0
            return sphere_area(self.N) * self.ray_moment(t, e, a, b, q)
        rule = sphere_rule(self.N, n_angle=n_angle, breaks=self.angular_breaks(t) if self.angular_breaks else None)
        return float(sum(w * self.ray_moment(t, s, a, b, q) for s, w in zip(rule.nodes, rule.weights)))


@dataclass(frozen=True, eq=False)
class RescaledFamily(KernelFamily):
    """rho_t(x) = |x|^p beta(t)^N K(beta(t) x) / phi(t), phi = m_{K,p}(beta)/beta^p."""

    profile: Profile | None = None
    beta: Callable[[float], float] | None = None

    def normalizer(self, t: float) -> float:
        b = self.beta(t)
        return moment(MomentFunction(self.profile, self.p), b) / b**self.p


def make_weight(kappa: Callable[[np.ndarray], np.ndarray], N: int, *, radial: bool = False,
                breaks: Sequence[float] = (), label: str = "kappa") -> KernelFamily:
    """Wrap a time-independent weight z -> kappa(z) as a family (t is ignored)."""
    if radial:
        e = np.zeros(N)
        e[0] = 1.0

        def rad(t, r):
            r = np.asarray(r, dtype=float)
            return kappa(r[..., None] * e)

        return KernelFamily(N, None, label, rho=lambda t, z: kappa(z), is_radial=True,
                            radial=rad, breaks=(lambda t, s: breaks) if breaks else None)
    return KernelFamily(N, None, label, rho=lambda t, z: kappa(z),
                        breaks=(lambda t, s: breaks) if breaks else None)


def make_heat(N: int) -> KernelFamily:
    """Gaussian heat kernel exp(-|z|^2/(4t)) / (4 pi t)^(N/2)."""
    if N < 1:
        raise DomainError("N must be >= 1")

    def rad(t, r):
        return np.exp(-np.asarray(r) ** 2 / (4.0 * t)) / (4.0 * math.pi * t) ** (N / 2.0)

    def mom(t, sigma, a, b, q):
        m = N - 1 + q
        if m <= -1:
            if a == 0.0:
                raise DivergenceError("heat kernel moment diverges at the origin")
            return ray_integral(lambda r: rad(t, r) * r**m, a, b, scale=math.sqrt(t))
        return _gamma_ray(t, a, b, m) / (4.0 * math.pi * t) ** (N / 2.0)

    return KernelFamily(N, None, "heat", rho=None, is_radial=True, radial=rad,
                        exact_moment=mom, scale=lambda t: math.sqrt(t))


def make_heat_derived(N: int, p: float) -> KernelFamily:
    """rho_t = |z|^p h_t(z) / t^(p/2), the family whose energy is the heat-content energy."""
    heat = make_heat(N)

    def rad(t, r):
        r = np.asarray(r, dtype=float)
        return r**p * heat.radial(t, r) / t ** (p / 2.0)

    def mom(t, sigma, a, b, q):
        return heat.ray_moment(t, sigma, a, b, q + p) / t ** (p / 2.0)

    return KernelFamily(N, p, "heat-derived", rho=None, is_radial=True, radial=rad,
                        exact_moment=mom, scale=lambda t: math.sqrt(t))


def make_frac_heat(N: int, s: float) -> KernelFamily:
    """Fractional heat kernel h_t^s; closed form at s = 1/2, tabulated otherwise."""
    if N not in (1, 2, 3):
        raise DomainError("N must be 1, 2 or 3")
    if not 0.0 < s < 1.0:
        raise DomainError("s must lie in (0, 1)")
    if s == 0.5:
        def rad(t, r):
            return poisson_kernel(t, r, N)
        closed = True
    else:
        table = frac_heat_table(N, s)

        def rad(t, r):
            return table.scaled(t, r)
        closed = False
    return KernelFamily(N, None, f"frac-heat-{s:g}", rho=None, is_radial=True, radial=rad,
                        has_closed_form=closed, scale=lambda t: t ** (1.0 / (2.0 * s)))


def make_frac_heat_derived(N: int, p: float, s: float) -> KernelFamily:
    """rho_t = |z|^p h_t^s(z) / psi_{s,p}(t)."""
    base = make_frac_heat(N, s)
    _, psi = regime(s, p)

    def rad(t, r):
        r = np.asarray(r, dtype=float)
        return r**p * base.radial(t, r) / psi(t)

    def mom(t, sigma, a, b, q):
        return base.ray_moment(t, sigma, a, b, q + p) / psi(t)

    return KernelFamily(N, p, f"frac-heat-derived-{s:g}", rho=None, is_radial=True, radial=rad,
                        has_closed_form=base.has_closed_form, exact_moment=mom, scale=base.scale)


def make_fractional_bbm(N: int, p: float) -> KernelFamily:
    """Power family rho_t(z) = t |z|^(tp - N)."""
    if N < 1 or p < 1:
        raise DomainError("need N >= 1 and p >= 1")

    def rad(t, r):
        r = np.asarray(r, dtype=float)
        # singular at the origin: inf is the right value there
        with np.errstate(divide="ignore", over="ignore"):
            return t * r ** (t * p - N)

    def mom(t, sigma, a, b, q):
        return _power_ray(t, t * p + q, a, b)

    return KernelFamily(N, p, "fractional-bbm", rho=None, is_radial=True, radial=rad,
                        exact_moment=mom)


def make_annulus_escape(N: int, p: float) -> KernelFamily:
    """t-independent normalized indicator of the annulus 1 < |z| < 2."""
    vol = ball_volume(N) * (2.0**N - 1.0)

    def rad(t, r):
        r = np.asarray(r, dtype=float)
        return ((r > 1.0) & (r < 2.0)) / vol

    def mom(t, sigma, a, b, q):
        lo, hi = max(a, 1.0), min(b, 2.0)
        return _power_ray(1.0 / vol, N + q, lo, hi) if lo < hi else 0.0

    return KernelFamily(N, p, "annulus-escape", rho=None, is_radial=True, radial=rad,
                        exact_moment=mom, breaks=lambda t, s: (1.0, 2.0))


def make_blowup_ball(N: int, p: float) -> KernelFamily:
    """rho_t = t^-1 chi_{B_1}: total mass 1/t |B_1| blows up."""

    def rad(t, r):
        return (np.asarray(r, dtype=float) <= 1.0) / t

    def mom(t, sigma, a, b, q):
        hi = min(b, 1.0)
        return _power_ray(1.0 / t, N + q, a, hi) if a < hi else 0.0

    return KernelFamily(N, p, "blowup-ball", rho=None, is_radial=True, radial=rad,
                        exact_moment=mom, breaks=lambda t, s: (1.0,))


def _box_halfwidths(N: int, m: int, variant: int, t: float) -> np.ndarray:
    big, small = (t, t * t) if variant == 1 else (t * t, t)
    return np.array([big] * m + [small] * (N - m))


def _graded(a: float, finest: float, n_gauss: int) -> tuple[np.ndarray, np.ndarray]:
    # Gauss nodes on [0, a], panels halving toward 0 down to ``finest``
    edges = [a]
    while edges[-1] > finest:
        edges.append(edges[-1] / 2.0)
    edges.append(0.0)
    edges = np.array(edges[::-1])
    from .quadrature import gauss_legendre
    x, w = gauss_legendre(n_gauss)
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + h[:, None] * x).ravel(), (h[:, None] * w).ravel()


def make_anisotropic_box(N: int, m: int, variant: int, p: float) -> KernelFamily:
    """Normalized indicator of B_t^m x B_{t^2}^{N-m} (variant 2 swaps the two scales).

    Balls in each factor are taken as cubes [-r, r]^k, the convention that
    makes the N = 2, m = 1 support a rectangle.
    """
    if not 1 <= m <= N:
        raise DomainError("need 1 <= m <= N")
    if variant not in (1, 2):
        raise DomainError("variant must be 1 or 2")

    def rho(t, z):
        a = _box_halfwidths(N, m, variant, t)
        inside = np.all(np.abs(z) <= a, axis=-1)
        return inside / np.prod(2.0 * a)

    def edge(t, sigma):
        a = _box_halfwidths(N, m, variant, t)
        with np.errstate(divide="ignore"):
            return float(np.min(np.where(np.abs(sigma) > 0, a / np.abs(sigma), np.inf)))

    def mom(t, sigma, a, b, q):
        hi = min(b, edge(t, sigma))
        if a >= hi:
            return 0.0
        return _power_ray(1.0 / np.prod(2.0 * _box_halfwidths(N, m, variant, t)), N + q, a, hi)

    def cubature(t, level):
        # tensor Gauss rule on the half box z_long >= 0 (rho and the shift
        # integrands are even), graded toward 0 along the long axes
        a = _box_halfwidths(N, m, variant, t)
        n = 4 * level
        small = float(a.min())
        axes = []
        long_axes = np.flatnonzero(a > small)
        first = int(long_axes[0]) if long_axes.size else 0
        for i in range(N):
            if i == first:
                x, w = _graded(a[i], small / 8.0, n)
                w = 2.0 * w
            elif a[i] > small:
                x, w = _graded(a[i], small / 8.0, n)
                x, w = np.concatenate((-x[::-1], x)), np.concatenate((w[::-1], w))
            else:
                from .quadrature import gauss_legendre
                g, gw = gauss_legendre(n)
                x = np.concatenate((-0.5 * a[i] * (1 + g[::-1]), 0.5 * a[i] * (1 + g)))
                w = np.concatenate((0.5 * a[i] * gw[::-1], 0.5 * a[i] * gw))
            axes.append((x, w))
        grids = np.meshgrid(*[x for x, _ in axes], indexing="ij")
        wgrid = np.ones_like(grids[0])
        for k, (_, w) in enumerate(axes):
            shape = [1] * N
            shape[k] = -1
            wgrid = wgrid * w.reshape(shape)
        z = np.stack([g.ravel() for g in grids], axis=1)
        return z, wgrid.ravel() / np.prod(2.0 * a)

    def ang(t):
        if N != 2:
            return ()
        a = _box_halfwidths(N, m, variant, t)
        c = math.atan2(a[1], a[0])
        return (c, math.pi - c, math.pi + c, 2 * math.pi - c)

    return KernelFamily(N, p, f"box-m{m}-v{variant}", rho=rho, is_radial=False,
                        breaks=lambda t, s: (edge(t, s),), exact_moment=mom, cubature=cubature,
                        scale=lambda t: t, angular_breaks=ang)


def make_general_heat_type(h1: Profile, beta_exp: float, *, check_mass: bool = True) -> KernelFamily:
    """Scaled family t^(-beta N) h1(t^(-beta) x) of a unit-mass profile.

    Raises:
        NormalizationError: if h1 does not have unit mass to 1%.
    """
    N = h1.N
    if check_mass:
        mass = moment(MomentFunction(h1, 0.0), math.inf)
        if abs(mass - 1.0) > 1e-2:
            raise NormalizationError(f"profile mass {mass:.6g} is not 1")

    def rho(t, z):
        a = t ** (-beta_exp)
        return a**N * h1(z * a)

    rad = None
    if h1.is_radial:
        def rad(t, r):
            a = t ** (-beta_exp)
            return a**N * h1.radial(np.asarray(r, dtype=float) * a)

    def mom(t, sigma, a, b, q):
        c = t ** (-beta_exp)
        return c ** (-q) * h1.ray_moment(sigma, a * c, b * c, q)

    return KernelFamily(N, None, f"heat-type-{h1.label}", rho=rho, is_radial=h1.is_radial,
                        radial=rad, exact_moment=mom, has_closed_form=False,
                        scale=lambda t: h1.scale * t**beta_exp)


@dataclass(frozen=True)
class HeatTypeClass:
    label: str            # "A_p" (finite p-moment) or "B_p" (zeta |x|^-(N+p) tail)
    p_moment: float | None
    zeta: float | None


def classify_heat_type(h1: Profile, p: float, radii=(1e2, 3e2, 1e3, 3e3, 1e4)) -> HeatTypeClass:
    """Decide whether |x|^p h1 is integrable or h1 has a zeta |x|^-(N+p) tail."""
    try:
        mom_val = moment(MomentFunction(h1, p), math.inf)
        return HeatTypeClass("A_p", mom_val, None)
    except DivergenceError:
        pass
    e = np.zeros(h1.N)
    e[0] = 1.0
    r = np.asarray(radii, dtype=float)
    y = h1.on_ray(e, r) * r ** (h1.N + p)
    # y = zeta (1 + c/r + d/r^2) absorbs the usual algebraic correction terms
    A = np.stack([np.ones_like(r), 1 / r, 1 / r**2], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    if coef[0] <= 0 or np.ptp(y) > 0.5 * abs(y[-1]):
        raise DivergenceError("profile has neither a finite p-moment nor a |x|^-(N+p) tail")
    return HeatTypeClass("B_p", None, float(coef[0]))


@dataclass(frozen=True)
class MomentFunction:
    """R -> m_{K,p}(R) = int_{B_R} |x|^p K(x) dx."""

    profile: Profile
    p: float

    def __call__(self, R: float) -> float:
        return moment(self, R)


def moment(mf: MomentFunction, R: float, n_angle: int = 256) -> float:
    """Radial-angular quadrature of m_{K,p}(R); R may be inf."""
    K = mf.profile
    if R < 0:
        raise DomainError("R must be non-negative")
    if R == 0:
        return 0.0
    N = K.N
    if K.is_radial:
        e = np.zeros(N)
        e[0] = 1.0
        return sphere_area(N) * K.ray_moment(e, 0.0, R, mf.p)
    rule = sphere_rule(N, n_angle=n_angle)
    return float(sum(w * K.ray_moment(s, 0.0, R, mf.p) for s, w in zip(rule.nodes, rule.weights)))


def make_rescaled(K: Profile, beta: Callable[[float], float], p: float) -> RescaledFamily:
    """Family rho_t(x) = |x|^p beta^N K(beta x) / phi(t) with phi = m_{K,p}(beta)/beta^p.

    Raises:
        DivergenceError: if |x|^p K is not integrable on B_1.
        DomainError: if beta does not grow as t decreases on sample times.
        NormalizationError: ``normalizer`` is zero at a requested t.
    """
    N = K.N
    mf = MomentFunction(K, p)
    moment(mf, 1.0)  # local integrability check
    samples = [beta(t) for t in (1e-1, 1e-2, 1e-3, 1e-4)]
    if not all(b2 > b1 for b1, b2 in zip(samples, samples[1:])) or samples[-1] < 10.0 * samples[0]:
        raise DomainError("beta(t) must increase to infinity as t -> 0")
    phis: dict[float, float] = {}

    def phi(t):
        if t not in phis:
            b = beta(t)
            m = moment(mf, b)
            if m <= 0.0:
                raise NormalizationError(f"m_K,p(beta(t)) = 0 at t={t}")
            phis[t] = m / b**p
        return phis[t]

    def rho(t, z):
        b = beta(t)
        r = _norm(z)
        return r**p * b**N * K(z * b) / phi(t)

    rad = None
    if K.is_radial:
        def rad(t, r):
            b = beta(t)
            r = np.asarray(r, dtype=float)
            return r**p * b**N * K.radial(r * b) / phi(t)

    def mom(t, sigma, a, b_, q):
        b = beta(t)
        return b ** (-p - q) * K.ray_moment(sigma, a * b, b_ * b, p + q) / phi(t)

    def brk(t, sigma):
        b = beta(t)
        out = [x / b for x in K.breaks]
        if K.ray_breaks is not None:
            out += [x / b for x in K.ray_breaks(sigma)]
        return out

    return RescaledFamily(N, p, f"rescaled-{K.label}", rho=rho, is_radial=K.is_radial,
                          radial=rad, breaks=brk, exact_moment=mom, has_closed_form=False,
                          scale=lambda t: K.scale / beta(t), profile=K, beta=beta)
