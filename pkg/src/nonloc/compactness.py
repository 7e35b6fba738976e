"""Quantitative mollifier bounds used to prove compactness of sublevel sets.

Three checks are offered. ``verify_supcomp_bounds`` mollifies u at the
kernel scale and measures how the L^p distance and the gradient of the
mollified function compare with the energy. ``verify_starlone`` checks the
self-convolution inequality for shift energies. ``verify_mollifier_distance``
certifies a pointwise kernel lower bound on a small ball and then compares the
distance to a ball average with the energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import signal
from scipy.interpolate import RegularGridInterpolator

from .energy import bbm_energy, nonlocal_seminorm
from .errors import ConstructionError, DomainError, NoCertifyingDeltaError, ResolutionError
from .grid import AnalyticFunction, GridFunction
from .kernels import KernelFamily, MomentFunction, Profile, make_rescaled, make_weight, moment
from .parallel import ordered_map
from .special import ball_volume

__all__ = [
    "MollifierPair",
    "SupCompReport",
    "StarloneResult",
    "DistanceRow",
    "truncated_profile",
    "self_convolution",
    "build_mollifier",
    "verify_supcomp_bounds",
    "verify_starlone",
    "certify_delta",
    "verify_mollifier_distance",
]


def _bump(y2: np.ndarray) -> np.ndarray:
    # exp(1 - 1/(1 - y^2)) on |y| < 1, peak 1 at the origin
    out = np.zeros_like(y2)
    inside = y2 < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - y2[inside]))
    return out


def _bump_slope(y2: np.ndarray) -> np.ndarray:
    # |d/dy bump| as a function of y^2, in units of 1/radius
    out = np.zeros_like(y2)
    inside = y2 < 1.0
    yi = y2[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - yi)) * 2.0 * np.sqrt(yi) / (1.0 - yi) ** 2
    return out


def truncated_profile(K: Profile) -> Profile:
    """G = min{K, 1}."""
    rad = None
    if K.is_radial:
        rad = lambda r: np.minimum(K.radial(np.asarray(r, dtype=float)), 1.0)  # noqa: E731
    func = None if K.is_radial else (lambda z: np.minimum(K(z), 1.0))
    return Profile(K.N, func=func, radial=rad, breaks=K.breaks, scale=K.scale,
                   label=f"min({K.label},1)", ray_breaks=K.ray_breaks)


def _default_extent(G: Profile) -> float:
    return max([6.0 * G.scale, *[1.5 * b for b in G.breaks]])


def self_convolution(G: Profile, extent: float | None = None, n: int | None = None
                     ) -> tuple[list[np.ndarray], np.ndarray, float]:
    """G*G on the grid [-2L, 2L]^N by FFT.

    Returns the grid axes, the table, and the grid L^1 norm of G. G is
    sampled at cell centres of [-L, L]^N.
    """
    N = G.N
    if N not in (1, 2):
        raise DomainError("self-convolution tables are provided for N in {1, 2}")
    L = _default_extent(G) if extent is None else float(extent)
    n = (16384 if N == 1 else 256) if n is None else int(n)
    h = 2.0 * L / n
    x = -L + h * (np.arange(n) + 0.5)
    pts = np.stack(np.meshgrid(*([x] * N), indexing="ij"), axis=-1)
    g = np.asarray(G(pts), dtype=float)
    gg = signal.fftconvolve(g, g, mode="full") * h**N
    # full convolution of two cell-centred grids lives on nodes -2L + h (k + 1)
    y = -2.0 * L + h * (np.arange(2 * n - 1) + 1.0)
    return [y] * N, np.maximum(gg, 0.0), float(g.sum() * h**N)


@dataclass
class MollifierPair:
    """G = min{K, 1}, its self-convolution and a bump phi under it.

    phi(x) = c * bump(|x - x0| / r) with r the half-max radius of G*G around
    its peak x0. Both phi and |grad phi| lie below G*G at every node.
    """

    profile: Profile
    G: Profile
    axes: list[np.ndarray]
    gg: np.ndarray
    G_l1: float
    center: np.ndarray
    radius: float
    c: float
    phi_l1: float
    grad_phi_l1: float
    margin: float

    @property
    def N(self) -> int:
        return self.profile.N

    def _y2(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.N == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        return np.sum((x - self.center) ** 2, axis=-1) / self.radius**2

    def phi(self, x) -> np.ndarray:
        return self.c * _bump(self._y2(x))

    def grad_phi_norm(self, x) -> np.ndarray:
        return self.c * _bump_slope(self._y2(x)) / self.radius

    def gg_at(self, x) -> np.ndarray:
        """Linear interpolation of the G*G table (0 outside it)."""
        x = np.asarray(x, dtype=float)
        if self.N == 1:
            return np.interp(x, self.axes[0], self.gg, left=0.0, right=0.0)
        f = RegularGridInterpolator(self.axes, self.gg, bounds_error=False, fill_value=0.0)
        return f(x)

    def phi_t(self, x, beta: float) -> np.ndarray:
        """beta^N phi(beta x) / ||phi||_1."""
        return beta**self.N * self.phi(np.asarray(x, dtype=float) * beta) / self.phi_l1


def _grid_points(axes):
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def _check_pair(pair: MollifierPair, axes, gg) -> float:
    """Smallest slack of both inequalities on the nodes of (axes, gg), relative to max G*G.

    The gradient is checked twice: analytically and by central differences.
    """
    pts = _grid_points(axes)
    phi = pair.phi(pts)
    gphi = pair.grad_phi_norm(pts)
    fd = np.gradient(phi, *[a[1] - a[0] for a in axes])
    if pair.N == 1:
        fd = [fd]
    fd_norm = np.sqrt(sum(f * f for f in fd))
    peak = float(gg.max())
    support = phi > 0
    if not np.any(support):
        raise ConstructionError("bump has no nodes on the grid")
    slack = np.minimum(gg - phi, np.minimum(gg - gphi, gg - fd_norm))
    return float(np.min(slack[support])) / peak


def build_mollifier(K: Profile, *, extent: float | None = None, n: int | None = None,
                    margin: float = 1e-6, safety: float = 0.98) -> MollifierPair:
    """Construct phi <= G*G and |grad phi| <= G*G for G = min{K, 1}.

    Raises:
        ConstructionError: if G*G vanishes on the grid or the inequalities
            fail with the requested margin, including at double resolution.
    """
    G = truncated_profile(K)
    axes, gg, g_l1 = self_convolution(G, extent, n)
    peak = float(gg.max())
    if not peak > 0:
        raise ConstructionError("G*G vanishes on the grid")
    pts = _grid_points(axes)
    i0 = np.unravel_index(int(np.argmax(gg)), gg.shape)
    x0 = pts[i0]
    below = gg < 0.5 * peak
    d = np.sqrt(np.sum((pts - x0) ** 2, axis=-1))
    if not np.any(below):
        raise ConstructionError("G*G stays above half its maximum on the whole grid")
    r = float(d[below].min())
    h = float(axes[0][1] - axes[0][0])
    if r < 4.0 * h:
        raise ConstructionError("half-max region of G*G is not resolved by the grid")
    y2 = d**2 / r**2
    b = _bump(y2)
    s = _bump_slope(y2) / r
    inside = b > 0
    c = safety * float(min(np.min(gg[inside] / b[inside]),
                           np.min(np.where(s[inside] > 0, gg[inside] / np.where(s[inside] > 0, s[inside], 1.0), np.inf))))
    cell = h**K.N
    pair = MollifierPair(K, G, axes, gg, g_l1, x0, r, c,
                         float(np.sum(c * b) * cell), float(np.sum(c * s) * cell), 0.0)
    slack = _check_pair(pair, axes, gg)
    if slack < margin:
        raise ConstructionError(f"inequalities hold only with slack {slack:.3g}")
    # recheck on a grid twice as fine
    n_fine = 2 * ((16384 if K.N == 1 else 256) if n is None else int(n))
    axes2, gg2, _ = self_convolution(G, extent, n_fine)
    slack2 = _check_pair(pair, axes2, gg2)
    if slack2 < margin:
        raise ConstructionError(f"inequalities fail at double resolution (slack {slack2:.3g})")
    pair.margin = min(slack, slack2)
    return pair


# ---------------------------------------------------------------- supercritical bounds

@dataclass
class SupCompReport:
    t: np.ndarray
    beta: np.ndarray
    energy: np.ndarray
    dist_pow: np.ndarray       # ||v_t - u||_p^p
    grad_pow: np.ndarray       # ||grad v_t||_p^p
    r1: np.ndarray             # dist_pow * beta^p / energy
    r2: np.ndarray             # grad_pow / energy
    verdict: str
    constants: dict

    def to_dict(self) -> dict:
        def clean(a):
            return [None if not math.isfinite(x) else float(x) for x in np.ravel(a)]

        return {"t": clean(self.t), "beta": clean(self.beta), "energy": clean(self.energy),
                "dist_pow": clean(self.dist_pow), "grad_pow": clean(self.grad_pow),
                "r1": clean(self.r1), "r2": clean(self.r2), "verdict": self.verdict,
                "constants": self.constants}


def _stencil(pair: MollifierPair, beta: float, h: np.ndarray):
    """phi_t and grad phi_t on a centred stencil with the grid spacing of u."""
    reach = (np.linalg.norm(pair.center) + pair.radius) / beta
    m = np.ceil(reach / h).astype(int) + 1
    if np.any(pair.radius / beta < 2.0 * h):
        raise ResolutionError("mollifier support is below two grid cells; refine u")
    axes = [h[i] * np.arange(-m[i], m[i] + 1) for i in range(pair.N)]
    pts = _grid_points(axes)
    y = pts * beta - pair.center
    y2 = np.sum(y * y, axis=-1) / pair.radius**2
    phi = pair.c * _bump(y2)
    cell = float(np.prod(h))
    mass = float(phi.sum() * cell)
    if mass <= 0:
        raise ResolutionError("mollifier stencil has no mass")
    phi_t = phi / mass
    # grad of c*bump(|y|^2/r^2) at y is bump'(y2) * 2 y / r^2, times beta
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(y2 > 0, _bump_slope(y2) / np.sqrt(np.where(y2 > 0, y2, 1.0)), 0.0)
    grads = [pair.c * slope * y[..., k] / pair.radius**2 * beta / mass for k in range(pair.N)]
    return phi_t, grads, cell


def _mollify(u: GridFunction, kern: np.ndarray) -> np.ndarray:
    pad = [(k // 2, k // 2) for k in kern.shape]
    up = np.pad(u.values, pad)
    return signal.fftconvolve(up, kern, mode="same"), up


def verify_supcomp_bounds(u: GridFunction, K: Profile, beta: Callable[[float], float], p: float,
                          t_list: Sequence[float], *, pair: MollifierPair | None = None,
                          spread: float = 10.0, tol: float = 1e-4) -> SupCompReport:
    """Ratios of the mollified distance and gradient to the rescaled energy.

    v_t = u * phi_t with phi_t = beta^N phi(beta x)/||phi||_1. Reported are
    r1 = ||v_t - u||_p^p beta^p / F and r2 = ||grad v_t||_p^p / F, with F the
    normalized energy of the rescaled family. The verdict is "pass" when both
    ratios are finite and never exceed ``spread`` times their value at the
    largest t, "vacuous pass" when u = 0.
    """
    t = np.asarray(t_list, dtype=float)
    pair = build_mollifier(K) if pair is None else pair
    fam = make_rescaled(K, beta, p)
    b = np.array([beta(float(tt)) for tt in t])
    if u.lp_norm_pow(p) == 0.0:
        z = np.zeros_like(t)
        return SupCompReport(t, b, z, z, z, z, z, "vacuous pass", {"r1_max": 0.0, "r2_max": 0.0})

    def one(k):
        tt, bb = float(t[k]), float(b[k])
        F = bbm_energy(u, fam, tt, p, tol=tol).value
        phi_t, grads, cell = _stencil(pair, bb, u.h)
        v, up = _mollify(u, phi_t * cell)
        dist = float(np.sum(np.abs(v - up) ** p) * cell)
        g2 = sum(_mollify(u, g * cell)[0] ** 2 for g in grads)
        grad = float(np.sum(np.sqrt(g2) ** p) * cell)
        return F, dist, grad

    rows = ordered_map(one, range(len(t)))
    F = np.array([r[0] for r in rows])
    dist = np.array([r[1] for r in rows])
    grad = np.array([r[2] for r in rows])
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(F > 0, dist * b**p / F, np.inf)
        r2 = np.where(F > 0, grad / F, np.inf)
    i_big = int(np.argmax(t))
    ok = True
    for r in (r1, r2):
        if not np.all(np.isfinite(r)) or np.max(r) > spread * max(r[i_big], 1e-300):
            ok = False
    return SupCompReport(t, b, F, dist, grad, r1, r2, "pass" if ok else "fail",
                         {"r1_max": float(np.max(r1)), "r2_max": float(np.max(r2))})


# ---------------------------------------------------------------- self-convolution inequality

@dataclass(frozen=True)
class StarloneResult:
    lhs: float
    rhs: float
    passed: bool


def verify_starlone(u, G: Profile, p: float, *, extent: float | None = None, n: int | None = None,
                    tol: float = 1e-6) -> StarloneResult:
    """int Delta_p^p (G*G) <= 2^p ||G||_1 int Delta_p^p G, both sides by quadrature.

    G*G is tabulated by FFT and interpolated; the right side uses G itself.
    Passes when lhs <= rhs * (1 + 1e-3).
    """
    if u.lp_norm_pow(p) == 0.0:
        return StarloneResult(0.0, 0.0, True)
    N = G.N
    axes, gg, _ = self_convolution(G, extent, n)
    if N == 1:
        y = axes[0]

        def kappa(z):
            z = np.asarray(z, dtype=float)
            return np.interp(z[..., 0], y, gg, left=0.0, right=0.0)
    else:
        # nonlocal_seminorm calls kappa with points of shape (..., N)
        interp = RegularGridInterpolator(axes, gg, bounds_error=False, fill_value=0.0)

        def kappa(z):
            z = np.asarray(z, dtype=float)
            return interp(z.reshape(-1, N)).reshape(z.shape[:-1])

    l1 = moment(MomentFunction(G, 0.0), math.inf)
    brk = tuple(sorted({*G.breaks, *[2.0 * b for b in G.breaks]}))
    lhs = nonlocal_seminorm(u, kappa, p, radial=G.is_radial, breaks=brk, tol=tol)
    fam = make_weight(lambda z: G(z), N, radial=G.is_radial, breaks=G.breaks)
    rhs = 2.0**p * l1 * nonlocal_seminorm(u, fam, p, tol=tol)
    return StarloneResult(float(lhs), float(rhs), bool(lhs <= rhs * (1.0 + 1e-3)))


# ---------------------------------------------------------------- ball-average distance

@dataclass(frozen=True)
class DistanceRow:
    eps: float
    delta: float
    t: float
    lhs: float
    rhs: float
    passed: bool


def _lower_ratio(family: KernelFamily, p: float, delta: float, n_t: int, n_r: int) -> float:
    """min over t in (0, delta), 0 < |z| <= delta of rho_t(z) / |z|^p (sampled)."""
    ts = delta * 2.0 ** -np.arange(1, n_t + 1, dtype=float)
    rs = delta * np.geomspace(1e-8, 1.0, n_r)
    N = family.N
    if family.is_radial:
        sig = [np.eye(N)[0]]
    else:
        from .quadrature import sphere_rule
        sig = list(sphere_rule(N, n_angle=32, n_polar=16).nodes)
    best = math.inf
    for tt in ts:
        for s in sig:
            vals = family.on_ray(float(tt), s, rs) / rs**p
            best = min(best, float(np.min(vals)))
    return best


def certify_delta(family: KernelFamily, eps: float, p: float | None = None, *, k_max: int = 60,
                  n_t: int = 60, n_r: int = 33) -> float:
    """Largest delta = 2^-k with rho_t(z)/|z|^p >= 1/(eps delta^N) on B_delta for all t < delta.

    Raises:
        NoCertifyingDeltaError: if no k <= k_max works.
    """
    p = family.p if p is None else p
    N = family.N
    for k in range(0, k_max + 1):
        d = 2.0**-k
        if _lower_ratio(family, p, d, n_t, n_r) >= 1.0 / (eps * d**N):
            return d
    raise NoCertifyingDeltaError(f"no delta down to 2^-{k_max} certifies the lower bound for eps={eps}")


def _ball_average_distance(u, delta: float, p: float) -> float:
    """|| eta_delta * u - u ||_p^p with eta_delta the normalized ball indicator."""
    src = u.source if isinstance(u, GridFunction) else u
    if isinstance(src, AnalyticFunction) and src.N == 1 and src.tag == "box-indicator":
        lo, hi = float(src.params["lo"][0]), float(src.params["hi"][0])
        if hi - lo >= 2.0 * delta:
            # each endpoint contributes 2 int_0^delta ((delta - x)/(2 delta))^p dx
            return 2.0 * 2.0 * delta / (2.0**p * (p + 1.0))
    if not isinstance(u, GridFunction):
        raise DomainError("need a grid function or a 1D interval indicator")
    h = u.h
    if np.any(delta < 4.0 * h):
        raise ResolutionError("ball radius below four grid cells")
    m = np.ceil(delta / h).astype(int)
    axes = [h[i] * np.arange(-m[i], m[i] + 1) for i in range(u.N)]
    pts = _grid_points(axes)
    ker = (np.sum(pts**2, axis=-1) <= delta**2).astype(float)
    ker /= ker.sum()
    v, up = _mollify(u, ker)
    return float(np.sum(np.abs(v - up) ** p) * u.cell_volume)


def verify_mollifier_distance(u, family: KernelFamily, eps_list: Sequence[float], p: float | None = None,
                              *, t_fracs: Sequence[float] = (0.5, 0.01), tol: float = 1e-4) -> list[DistanceRow]:
    """Certify the kernel lower bound for each eps, then compare both sides of the distance bound.

    For each eps the certifying delta is found first; then for t = f * delta
    (f in ``t_fracs``) the rows hold ||eta_delta*u - u||_p^p and
    eps/|B_1| * F_t(u).

    Raises:
        NoCertifyingDeltaError: when the family never satisfies the lower bound.
    """
    p = family.p if p is None else p
    rows = []
    zero = u.lp_norm_pow(p) == 0.0 if hasattr(u, "lp_norm_pow") else False
    for eps in eps_list:
        d = certify_delta(family, eps, p)
        for f in t_fracs:
            t = f * d
            if zero:
                rows.append(DistanceRow(eps, d, t, 0.0, 0.0, True))
                continue
            lhs = _ball_average_distance(u, d, p)
            F = bbm_energy(u, family, t, p, tol=tol).value
            rhs = eps / ball_volume(family.N) * F
            rows.append(DistanceRow(eps, d, t, lhs, rhs, bool(lhs <= rhs * (1.0 + 1e-9))))
    return rows
