"""Sampled and analytic test functions, shift differences, norms and the DFT."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import fft as sfft, ndimage

from .errors import BVRequestError, DomainError
from .quadrature import gauss_legendre, sphere_rule
from .special import ball_volume, gamma_fn, sphere_area

__all__ = [
    "AnalyticFunction",
    "GridFunction",
    "FourierTable",
    "gaussian",
    "box_indicator",
    "ball_indicator",
    "tent",
    "sample",
    "shift_diff_pow",
    "shift_diff_norm",
    "lp_norm",
    "gradient_norm",
    "directional_seminorm",
    "dft",
]


def _lens_area(r: float, d: float) -> float:
    # overlap area of two disks of radius r with centres d apart
    if d >= 2 * r:
        return 0.0
    return 2 * r * r * math.acos(d / (2 * r)) - 0.5 * d * math.sqrt(4 * r * r - d * d)


def _ball_overlap(N: int, r: float, d: float) -> float:
    if d >= 2 * r:
        return 0.0
    if N == 1:
        return 2 * r - d
    if N == 2:
        return _lens_area(r, d)
    if N == 3:
        return math.pi * (4 * r + d) * (2 * r - d) ** 2 / 12.0
    raise DomainError("ball geometry is provided for N <= 3")


@dataclass(frozen=True, eq=False)
class AnalyticFunction:
    """A test function with closed-form values, gradient and norms.

    Indicator tags (``box-indicator``, ``ball-indicator``) also carry exact
    geometry: volume, perimeter, directional perimeter and the measure of
    the symmetric difference E vs E - z.
    """

    N: int
    tag: str
    func: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray] | None
    box: tuple[np.ndarray, np.ndarray]
    params: dict = field(default_factory=dict)
    hessian: Callable[[np.ndarray], np.ndarray] | None = None

    @property
    def is_indicator(self) -> bool:
        return self.tag.endswith("indicator")

    def __call__(self, x) -> np.ndarray:
        return self.func(np.asarray(x, dtype=float))

    # -- geometry of indicators ------------------------------------------------
    @property
    def volume(self) -> float:
        if self.tag == "box-indicator":
            return float(np.prod(self.params["hi"] - self.params["lo"]))
        if self.tag == "ball-indicator":
            return ball_volume(self.N) * self.params["radius"] ** self.N
        raise DomainError("volume is defined for indicators only")

    @property
    def perimeter(self) -> float:
        return self.directional_perimeter(None)

    def directional_perimeter(self, sigma: np.ndarray | None) -> float:
        """int_{dE} |sigma . n| dH^{N-1}, or the perimeter when sigma is None."""
        if self.tag == "box-indicator":
            L = self.params["hi"] - self.params["lo"]
            faces = np.array([2.0 * np.prod(np.delete(L, i)) for i in range(self.N)])
            if sigma is None:
                return float(faces.sum())
            return float(np.sum(np.abs(np.asarray(sigma, dtype=float)) * faces))
        if self.tag == "ball-indicator":
            r = self.params["radius"]
            if sigma is None:
                return sphere_area(self.N) * r ** (self.N - 1)
            # twice the projected area of the ball onto sigma-perp
            s = float(np.linalg.norm(sigma))
            return 2.0 * ball_volume(self.N - 1) * r ** (self.N - 1) * s if self.N > 1 else 2.0 * s
        raise DomainError("directional perimeter is defined for indicators only")

    @property
    def diameter(self) -> float:
        lo, hi = self.box
        return float(np.linalg.norm(hi - lo))

    # engine interface, shared with GridFunction (indicators only)
    @property
    def disjoint_radius(self) -> float:
        return self.diameter

    @property
    def r_min(self) -> float:
        return 1e-9 * self.diameter

    def small_shift_exponent(self, p: float) -> float:
        return 1.0

    def lp_norm_pow(self, p: float) -> float:
        return self.volume

    def shift_diff_pow(self, z, p: float) -> float:
        """|E vs E - z|, which equals ||u(. + z) - u||_p^p for every p."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if self.tag == "box-indicator":
            L = self.params["hi"] - self.params["lo"]
            inter = float(np.prod(np.maximum(0.0, L - np.abs(z))))
            return 2.0 * (self.volume - inter)
        if self.tag == "ball-indicator":
            d = float(np.linalg.norm(z))
            return 2.0 * (self.volume - _ball_overlap(self.N, self.params["radius"], d))
        raise DomainError("exact shift differences are available for indicators only")

    def shift_breaks(self, sigma: np.ndarray) -> list[float]:
        """Radii along sigma where the shift difference is not smooth."""
        if self.tag == "box-indicator":
            L = self.params["hi"] - self.params["lo"]
            s = np.abs(np.asarray(sigma, dtype=float))
            return sorted(float(l / c) for l, c in zip(L, s) if c > 1e-14)
        if self.tag == "ball-indicator":
            return [2.0 * self.params["radius"]]
        return []

    # -- Sobolev norms ---------------------------------------------------------
    def grad_norm_pow(self, p: float) -> float | None:
        """Closed-form ||Du||_p^p when known (|Du|(R^N) at p = 1 for indicators)."""
        if self.is_indicator:
            if p != 1:
                raise BVRequestError("indicators are not in W^{1,p} for p > 1")
            return self.perimeter
        if self.tag == "gaussian":
            w = self.params["widths"]
            if np.allclose(w, w[0]):
                w0, N = float(w[0]), self.N
                return ((2 / w0**2) ** p * sphere_area(N) * gamma_fn((p + N) / 2)
                        / (2 * (p / w0**2) ** ((p + N) / 2)))
            if p == 2:
                return float(sum(self.directional_pow(np.eye(self.N)[i], 2) for i in range(self.N)))
            return None
        if self.tag == "lipschitz-tent" and self.N == 1:
            w = self.params["width"]
            return 2 * w * w ** (-p)
        return None

    def directional_pow(self, sigma, p: float) -> float | None:
        """Closed-form ||sigma . Du||_p^p when known."""
        sigma = np.asarray(sigma, dtype=float)
        if self.is_indicator:
            if p != 1:
                raise BVRequestError("indicators are not in W^{1,p} for p > 1")
            return self.directional_perimeter(sigma)
        if self.tag == "gaussian":
            w = self.params["widths"]
            gauss = [math.sqrt(math.pi / 2) * wi for wi in w]  # int exp(-2 x^2/w^2)
            if p == 2:
                return float(sum(sigma[i] ** 2 * np.prod(gauss) / w[i] ** 2 for i in range(self.N)))
            if np.allclose(w, w[0]):
                w0 = float(w[0])
                one = (2 / w0**2) ** p * gamma_fn((p + 1) / 2) * (w0**2 / p) ** ((p + 1) / 2)
                rest = (math.pi * w0**2 / p) ** ((self.N - 1) / 2)
                return float(np.linalg.norm(sigma)) ** p * one * rest
            return None
        if self.tag == "lipschitz-tent":
            w = self.params["width"]
            if self.N == 1:
                return abs(float(sigma[0])) ** p * 2 * w ** (1 - p)
            if p == 2:
                per_axis = (2.0 / w) * (2.0 * w / 3.0) ** (self.N - 1)
                return float(np.sum(sigma**2) * per_axis)
        return None


def gaussian(center: Sequence[float] | float = 0.0, width: Sequence[float] | float = 1.0,
             N: int = 1, cutoff: float = 1e-13) -> AnalyticFunction:
    """exp(-sum (x_i - c_i)^2 / w_i^2), boxed where it drops below ``cutoff``."""
    c = np.broadcast_to(np.asarray(center, dtype=float), (N,)).copy()
    w = np.broadcast_to(np.asarray(width, dtype=float), (N,)).copy()
    ext = w * math.sqrt(math.log(1.0 / cutoff))

    def f(x):
        x = np.asarray(x, dtype=float)
        x = x[..., None] if N == 1 and (x.ndim == 0 or x.shape[-1] != 1) else x
        return np.exp(-np.sum(((x - c) / w) ** 2, axis=-1))

    def g(x):
        x = np.asarray(x, dtype=float)
        return (-2.0 * (x - c) / w**2) * f(x)[..., None]

    def hess(x):
        x = np.asarray(x, dtype=float)
        y = -2.0 * (x - c) / w**2
        H = y[..., :, None] * y[..., None, :]
        H = H - np.diag(2.0 / w**2)
        return H * f(x)[..., None, None]

    return AnalyticFunction(N, "gaussian", f, g, (c - ext, c + ext),
                            {"center": c, "widths": w}, hessian=hess)


def box_indicator(lo: Sequence[float], hi: Sequence[float]) -> AnalyticFunction:
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if lo.shape != hi.shape or np.any(hi <= lo):
        raise DomainError("box needs lo < hi componentwise")
    N = lo.size

    def f(x):
        x = np.asarray(x, dtype=float)
        x = x[..., None] if N == 1 and (x.ndim == 0 or x.shape[-1] != 1) else x
        return np.all((x >= lo) & (x <= hi), axis=-1).astype(float)

    return AnalyticFunction(N, "box-indicator", f, None, (lo, hi), {"lo": lo, "hi": hi})


def ball_indicator(center: Sequence[float], radius: float) -> AnalyticFunction:
    c = np.atleast_1d(np.asarray(center, dtype=float))
    N = c.size
    if radius <= 0:
        raise DomainError("radius must be positive")

    def f(x):
        x = np.asarray(x, dtype=float)
        x = x[..., None] if N == 1 and (x.ndim == 0 or x.shape[-1] != 1) else x
        return (np.sum((x - c) ** 2, axis=-1) <= radius**2).astype(float)

    return AnalyticFunction(N, "ball-indicator", f, None, (c - radius, c + radius),
                            {"center": c, "radius": float(radius)})


def tent(center: Sequence[float] | float = 0.0, width: float = 1.0, N: int = 1) -> AnalyticFunction:
    """Product tent prod_i (1 - |x_i - c_i| / w)_+, Lipschitz with kinks."""
    c = np.broadcast_to(np.asarray(center, dtype=float), (N,)).copy()

    def f(x):
        x = np.asarray(x, dtype=float)
        x = x[..., None] if N == 1 and (x.ndim == 0 or x.shape[-1] != 1) else x
        return np.prod(np.clip(1.0 - np.abs(x - c) / width, 0.0, None), axis=-1)

    def g(x):
        x = np.asarray(x, dtype=float)
        fac = np.clip(1.0 - np.abs(x - c) / width, 0.0, None)
        d = np.where(fac > 0, -np.sign(x - c) / width, 0.0)
        out = np.empty_like(x)
        for i in range(N):
            out[..., i] = d[..., i] * np.prod(np.delete(fac, i, axis=-1), axis=-1)
        return out

    return AnalyticFunction(N, "lipschitz-tent", f, g, (c - width, c + width),
                            {"center": c, "width": float(width)})


class GridFunction:
    """Samples of u on a uniform grid, extended by zero outside the box.

    Node i sits at ``origin + i * h``. Integrals use the midpoint rule (each
    node owns a cell of volume prod(h)) and off-grid shifts use multilinear
    interpolation. Shift differences are cached per (p, z).
    """

    def __init__(self, values, h, origin=None, source: AnalyticFunction | None = None,
                 check_support: bool = True):
        v = np.array(values, dtype=float)
        if v.ndim < 1:
            raise DomainError("values must be at least one-dimensional")
        if not np.all(np.isfinite(v)):
            raise DomainError("values must be finite")
        self.values = v
        self.values.setflags(write=False)
        self.N = v.ndim
        self.h = np.broadcast_to(np.asarray(h, dtype=float), (self.N,)).copy()
        if np.any(self.h <= 0):
            raise DomainError("spacing must be positive")
        self.origin = (np.zeros(self.N) if origin is None
                       else np.broadcast_to(np.asarray(origin, dtype=float), (self.N,)).copy())
        self.source = source
        peak = float(np.max(np.abs(v))) if v.size else 0.0
        if check_support and peak > 0:
            for ax in range(self.N):
                edge = max(float(np.max(np.abs(np.take(v, 0, axis=ax)))),
                           float(np.max(np.abs(np.take(v, -1, axis=ax)))))
                if edge > 1e-12 * peak:
                    raise DomainError("grid box does not contain the numerical support "
                                      f"(boundary value {edge:.3g} on axis {ax})")
        self._cache: dict = {}

    # -- basic geometry --------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    def axes(self) -> list[np.ndarray]:
        return [self.origin[i] + self.h[i] * np.arange(n) for i, n in enumerate(self.shape)]

    def nodes(self) -> np.ndarray:
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    @property
    def is_exact_indicator(self) -> bool:
        return self.source is not None and self.source.is_indicator

    @property
    def disjoint_radius(self) -> float:
        """Shifts at least this long make u(. + z) and u disjointly supported."""
        r = getattr(self, "_disjoint", None)
        if r is None:
            if self.is_exact_indicator:
                r = self.source.diameter
            else:
                nz = np.nonzero(self.values)
                if len(nz[0]) == 0:
                    r = 0.0
                else:
                    ext = np.array([(idx.max() - idx.min() + 2) * hh for idx, hh in zip(nz, self.h)])
                    r = float(np.linalg.norm(ext))
            self._disjoint = r
        return r

    @property
    def r_min(self) -> float:
        if self.is_exact_indicator:
            return 1e-9 * self.source.diameter
        return float(self.h.min()) / 4.0

    def small_shift_exponent(self, p: float) -> float:
        """a with Delta_p(z)^p ~ |z|^a as z -> 0 (1 for indicators, p otherwise)."""
        return 1.0 if self.is_exact_indicator else p

    def shift_breaks(self, sigma) -> list[float]:
        return self.source.shift_breaks(sigma) if self.is_exact_indicator else []

    def lp_norm_pow(self, p: float) -> float:
        key = ("norm", p)
        if key not in self._cache:
            if self.is_exact_indicator:
                self._cache[key] = float(self.source.volume)
            else:
                self._cache[key] = float(np.sum(np.abs(self.values) ** p) * self.cell_volume)
        return self._cache[key]

    def refined(self, factor: int = 2) -> "GridFunction":
        """Resample the analytic source on a grid ``factor`` times finer."""
        if self.source is None:
            raise DomainError("refinement needs an analytic source")
        return sample(self.source, self.h / factor, box=(self.origin, self.origin + self.h * (np.array(self.shape) - 1)))

    # -- shift differences -----------------------------------------------------
    def shift_diff_pow(self, z, p: float) -> float:
        """||u(. + z) - u||_p^p (cached)."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        # Delta(-z) = Delta(z): canonicalize the sign
        nzs = np.flatnonzero(z)
        if nzs.size and z[nzs[0]] < 0:
            z = -z
        key = (p, tuple(z.tolist()))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not np.any(z):
            val = 0.0
        elif self.is_exact_indicator:
            val = self.source.shift_diff_pow(z, p)
        elif float(np.linalg.norm(z)) >= self.disjoint_radius:
            val = 2.0 * self.lp_norm_pow(p)
        elif p == 2:
            val = self._autocorr_shift_diff(z / self.h) * self.cell_volume
        else:
            val = _lattice_shift_diff_pow(self.values, z / self.h, p) * self.cell_volume
        if len(self._cache) > 500_000:
            self._cache.clear()
        self._cache[key] = val
        return val

    def _autocorr_spline(self) -> np.ndarray:
        # lattice autocorrelation A(m) = sum_i u_{i+m} u_i with zero lag at the
        # centre, pre-filtered for cubic B-spline evaluation
        c = getattr(self, "_acorr_coef", None)
        if c is None:
            shape = [sfft.next_fast_len(2 * n) for n in self.shape]
            F = sfft.rfftn(self.values, s=shape)
            A = sfft.fftshift(sfft.irfftn(np.abs(F) ** 2, s=shape))
            c = self._acorr_coef = ndimage.spline_filter(A, order=3, mode="constant")
        return c

    def _autocorr_shift_diff(self, zs: np.ndarray) -> float:
        # p = 2: sum_i |u(x_i + z) - u_i|^2 = 2 (A(0) - A(z)); off-lattice lags
        # use the cubic spline through the lattice values of A, which is
        # O(h^4) where interpolating u itself would leave an O(h^2) bias.
        # The difference cancels in floating point: absolute floor ~ 1e-16 A(0).
        c = self._autocorr_spline()
        centre = np.array([n // 2 for n in c.shape], dtype=float)
        pts = np.stack([centre, centre + zs], axis=1)
        a0, az = ndimage.map_coordinates(c, pts, order=3, mode="constant", prefilter=False)
        return max(2.0 * (a0 - az), 0.0)


def _lattice_shift_diff_pow(u: np.ndarray, zs: np.ndarray, p: float) -> float:
    # zs is the shift in grid units; returns sum_i |u~(x_i + z) - u_i|^p
    N = u.ndim
    n = np.array(u.shape)
    k = np.floor(zs).astype(int)
    f = zs - k
    up = np.pad(u, 1)
    w = np.zeros(tuple(n + 1))
    for corner in itertools.product((0, 1), repeat=N):
        wt = 1.0
        for ax, c in enumerate(corner):
            wt *= f[ax] if c else 1.0 - f[ax]
        if wt == 0.0:
            continue
        sl = tuple(slice(c, c + m + 1) for c, m in zip(corner, n))
        w += wt * up[sl]
    # u~(x_i + z) = w[i + k + 1]
    lo = np.maximum(0, -k - 1)
    hi = np.minimum(n, n - k)
    if np.any(hi <= lo):
        return float(np.sum(np.abs(u) ** p) + np.sum(np.abs(w) ** p))
    su = tuple(slice(a, b) for a, b in zip(lo, hi))
    sw = tuple(slice(a + kk + 1, b + kk + 1) for a, b, kk in zip(lo, hi, k))
    # sum the overlap directly; subtracting from the full sums would cancel
    # catastrophically for small shifts
    tot = np.sum(np.abs(w[sw] - u[su]) ** p)
    out_u = np.ones(u.shape, dtype=bool)
    out_u[su] = False
    out_w = np.ones(w.shape, dtype=bool)
    out_w[sw] = False
    return float(tot + np.sum(np.abs(u[out_u]) ** p) + np.sum(np.abs(w[out_w]) ** p))


def sample(fn: AnalyticFunction, h, box=None, pad: float | None = None) -> GridFunction:
    """Sample an analytic function on a grid with spacing ``h``.

    The default box is the function's support box, widened by ``pad`` (two
    cells by default) so the boundary layer is zero.
    """
    N = fn.N
    h = np.broadcast_to(np.asarray(h, dtype=float), (N,)).copy()
    if box is None:
        lo, hi = fn.box
        pad = 2.0 * h if pad is None else pad
        lo, hi = lo - pad, hi + pad
    else:
        lo, hi = (np.broadcast_to(np.asarray(b, dtype=float), (N,)) for b in box)
    counts = np.floor((hi - lo) / h + 1e-9).astype(int) + 1
    axes = [lo[i] + h[i] * np.arange(counts[i]) for i in range(N)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return GridFunction(fn(pts), h, lo, source=fn)


def shift_diff_pow(u: GridFunction, z, p: float) -> float:
    return u.shift_diff_pow(z, p)


def shift_diff_norm(u: GridFunction, z, p: float) -> float:
    """Delta_p(z) = ||u(. + z) - u||_{L^p}."""
    return u.shift_diff_pow(z, p) ** (1.0 / p)


def lp_norm(u: GridFunction, p: float) -> float:
    return u.lp_norm_pow(p) ** (1.0 / p)


def _grad(u: GridFunction) -> np.ndarray:
    v = np.pad(u.values, 1)
    g = np.gradient(v, *u.h, edge_order=2)
    if u.N == 1:
        g = [g]
    inner = tuple(slice(1, -1) for _ in range(u.N))
    return np.stack([gi[inner] for gi in g], axis=-1)


def gradient_norm(u: GridFunction, p: float) -> float:
    """||Du||_{L^p} (total variation for indicators at p = 1)."""
    if u.is_exact_indicator:
        return u.source.grad_norm_pow(p) ** (1.0 / p)
    g = _grad(u)
    return float(np.sum(np.sqrt(np.sum(g * g, axis=-1)) ** p) * u.cell_volume) ** (1.0 / p)


def directional_seminorm(u: GridFunction, sigma, p: float) -> float:
    """||sigma . Du||_{L^p}; geometric for indicators (p = 1 only)."""
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    if u.is_exact_indicator:
        return u.source.directional_pow(sigma, p) ** (1.0 / p)
    g = _grad(u)
    return float(np.sum(np.abs(g @ sigma) ** p) * u.cell_volume) ** (1.0 / p)


@dataclass(frozen=True)
class FourierTable:
    """|u^(xi)|^2 on the dual grid of a zero-padded DFT."""

    freqs: list[np.ndarray]
    power: np.ndarray
    dual_volume: float

    def xi_norm2(self) -> np.ndarray:
        g = np.meshgrid(*self.freqs, indexing="ij")
        return sum(gi * gi for gi in g)

    def total(self, weight: np.ndarray | None = None) -> float:
        w = self.power if weight is None else weight * self.power
        return float(np.sum(w) * self.dual_volume)


def dft(u: GridFunction, pad_factor: float = 2.0) -> FourierTable:
    """Zero-padded DFT normalized so that Parseval holds exactly."""
    shape = [sfft.next_fast_len(int(math.ceil(pad_factor * n))) for n in u.shape]
    F = sfft.fftn(u.values, s=shape)
    power = np.abs(F) ** 2 * u.cell_volume**2
    freqs = [sfft.fftfreq(m, d=hh) for m, hh in zip(shape, u.h)]
    dual = float(np.prod([1.0 / (m * hh) for m, hh in zip(shape, u.h)]))
    return FourierTable(freqs, power, dual)
