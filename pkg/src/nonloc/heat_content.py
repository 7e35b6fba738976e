"""Heat content of sets, heat-content energies of functions, Fourier oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import signal
from scipy.special import erf

from .errors import DomainError, FitError, ResolutionError
from .grid import GridFunction, dft
from .kernels import make_frac_heat, make_heat
from .energy import shift_energy
from .special import ball_volume, regime, sphere_area

__all__ = [
    "RasterSet",
    "HeatContentCurve",
    "PerimeterFit",
    "raster_interval",
    "raster_box",
    "raster_ball",
    "read_pgm",
    "write_pgm",
    "raster_from_pgm",
    "heat_content",
    "heat_content_curve",
    "interval_heat_content",
    "heat_content_energy",
    "frac_heat_content_energy",
    "heat_symbol",
    "frac_symbol",
    "fourier_content",
    "fourier_deficit",
    "dirichlet_form",
    "perimeter_from_heat",
]


@dataclass(frozen=True, eq=False)
class RasterSet:
    """Binary mask on a uniform grid (cell i covers origin + h*[i, i+1))."""

    mask: np.ndarray
    h: float
    origin: np.ndarray
    volume: float | None = None
    perimeter: float | None = None

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        if m.ndim not in (1, 2):
            raise DomainError("rasters are 1D or 2D")
        object.__setattr__(self, "mask", m)
        object.__setattr__(self, "origin", np.broadcast_to(np.asarray(self.origin, dtype=float), (m.ndim,)).copy())

    @property
    def N(self) -> int:
        return self.mask.ndim

    @property
    def mask_volume(self) -> float:
        return float(self.mask.sum()) * self.h**self.N

    def margin(self) -> float:
        """Smallest distance from the set to the edge of the raster box."""
        idx = np.nonzero(self.mask)
        if len(idx[0]) == 0:
            return math.inf
        gaps = []
        for ax, ii in enumerate(idx):
            gaps += [ii.min(), self.mask.shape[ax] - 1 - ii.max()]
        return float(min(gaps)) * self.h


def _cells(lo, hi, h):
    n = int(round((hi - lo) / h))
    return n


def raster_interval(a: float, b: float, h: float, pad: float) -> RasterSet:
    """[a, b] on cells of size h, with ``pad`` empty length on both sides."""
    origin = a - pad
    n = int(round((b - a + 2 * pad) / h))
    centres = origin + h * (np.arange(n) + 0.5)
    mask = (centres > a) & (centres < b)
    return RasterSet(mask, h, np.array([origin]), volume=b - a, perimeter=2.0)


def raster_box(lo: Sequence[float], hi: Sequence[float], h: float, pad: float) -> RasterSet:
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    origin = lo - pad
    n = np.round((hi - lo + 2 * pad) / h).astype(int)
    axes = [origin[i] + h * (np.arange(n[i]) + 0.5) for i in range(lo.size)]
    g = np.meshgrid(*axes, indexing="ij")
    mask = np.ones(tuple(n), dtype=bool)
    for i, gi in enumerate(g):
        mask &= (gi > lo[i]) & (gi < hi[i])
    L = hi - lo
    per = float(sum(2.0 * np.prod(np.delete(L, i)) for i in range(lo.size)))
    return RasterSet(mask, h, origin, volume=float(np.prod(L)), perimeter=per)


def raster_ball(center: Sequence[float], radius: float, h: float, pad: float) -> RasterSet:
    """Pixelated ball: cells whose centre lies inside the ball."""
    c = np.atleast_1d(np.asarray(center, dtype=float))
    N = c.size
    origin = c - radius - pad
    n = int(round((2 * radius + 2 * pad) / h))
    axes = [origin[i] + h * (np.arange(n) + 0.5) for i in range(N)]
    g = np.meshgrid(*axes, indexing="ij")
    d2 = sum((gi - ci) ** 2 for gi, ci in zip(g, c))
    return RasterSet(d2 < radius**2, h, origin, volume=ball_volume(N) * radius**N,
                     perimeter=sphere_area(N) * radius ** (N - 1))


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a binary (P5, maxval <= 255) portable grey map."""
    data = Path(path).read_bytes()
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise DomainError("only binary PGM (P5) is supported")
    w, hgt, maxval = (int(x) for x in tokens[1:])
    if maxval > 255:
        raise DomainError("maxval must be <= 255")
    pos += 1
    pix = np.frombuffer(data[pos:pos + w * hgt], dtype=np.uint8)
    if pix.size != w * hgt:
        raise DomainError("truncated PGM data")
    return pix.reshape(hgt, w)


def write_pgm(path: str | Path, image: np.ndarray) -> None:
    img = np.asarray(image, dtype=np.uint8)
    hgt, w = img.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (w, hgt) + img.tobytes())


def raster_from_pgm(path: str | Path, h: float, threshold: int = 128) -> RasterSet:
    """Mask of pixels >= threshold; row 0 of the file is the top (largest y)."""
    img = read_pgm(path)
    mask = (img >= threshold)[::-1].T
    return RasterSet(mask, h, np.zeros(2))


def _cell_weights(t: float, h: float) -> np.ndarray:
    # D_k = int_{cell 0} int_{cell k} g(x - y) for the 1D heat kernel g at time t,
    # the second difference of Psi(z) = z Phi(z) + 2t g(z)
    sig = math.sqrt(2.0 * t)
    K = int(math.ceil(10.0 * sig / h)) + 2
    z = h * np.arange(-K - 1, K + 2)
    Phi = 0.5 * (1.0 + erf(z / (sig * math.sqrt(2.0))))
    g = np.exp(-z * z / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
    Psi = z * Phi + 2.0 * t * g
    D = Psi[2:] - 2.0 * Psi[1:-1] + Psi[:-2]
    return D  # indices k = -K..K


def heat_content(E: RasterSet, t: float) -> float:
    """Q_E(t) = int_E (H_t chi_E), exact for the pixelated set.

    Raises:
        ResolutionError: if sqrt(4t) < h.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    if math.sqrt(4.0 * t) < E.h:
        raise ResolutionError(f"sqrt(4t) = {math.sqrt(4 * t):.3g} below grid spacing {E.h:.3g}")
    D = _cell_weights(t, E.h)
    conv = E.mask.astype(float)
    for ax in range(E.N):
        shape = [1] * E.N
        shape[ax] = -1
        conv = signal.fftconvolve(conv, D.reshape(shape), mode="same", axes=ax)
    return float(np.sum(conv[E.mask]))


def interval_heat_content(t: float, length: float = 1.0) -> float:
    """Closed-form heat content of an interval of the given length."""
    a = length / (2.0 * math.sqrt(t))
    return length * erf(a) - 2.0 * math.sqrt(t / math.pi) * (1.0 - math.exp(-a * a))


@dataclass(frozen=True)
class HeatContentCurve:
    t: np.ndarray
    Q: np.ndarray
    method: str = "fft-convolution"


def heat_content_curve(E: RasterSet | None, t_list: Sequence[float], *, method: str = "fft-convolution",
                       length: float = 1.0) -> HeatContentCurve:
    t = np.asarray(t_list, dtype=float)
    if method == "closed-form":
        Q = np.array([interval_heat_content(x, length) for x in t])
    else:
        Q = np.array([heat_content(E, x) for x in t])
    return HeatContentCurve(t, Q, method)


def _kernel(N: int, kernel: str, s: float | None):
    if kernel == "heat":
        return make_heat(N)
    if kernel == "frac-heat":
        if s is None:
            raise DomainError("frac-heat needs s")
        return make_frac_heat(N, s)
    raise DomainError(f"unknown kernel {kernel!r}")


def heat_content_energy(u, p: float, t: float, kernel: str = "heat", s: float | None = None,
                        *, tol: float = 1e-4, **kw) -> float:
    """int H_t(|u - u(x)|^p)(x) dx = int Delta_p(z)^p k_t(z) dz."""
    val, _ = shift_energy(u, _kernel(u.N, kernel, s), t, p, 0.0, tol=tol, **kw)
    return val


def frac_heat_content_energy(u, p: float, s: float, t: float, *, normalized: bool = True, **kw) -> float:
    """Fractional heat-content energy, divided by psi_{s,p}(t) when ``normalized``."""
    val = heat_content_energy(u, p, t, "frac-heat", s, **kw)
    if not normalized:
        return val
    _, psi = regime(s, p)
    return val / psi(t)


def heat_symbol(xi2: np.ndarray) -> np.ndarray:
    return 4.0 * math.pi**2 * xi2


def frac_symbol(s: float) -> Callable[[np.ndarray], np.ndarray]:
    def lam(xi2):
        return (4.0 * math.pi**2 * xi2) ** s
    return lam


def _table(u):
    return u if hasattr(u, "power") else dft(u)


def fourier_content(u, t: float, symbol=heat_symbol) -> float:
    """(H_t u, u) = sum exp(-lambda t) |u^|^2 over the dual grid."""
    T = _table(u)
    return T.total(np.exp(-symbol(T.xi_norm2()) * t))


def fourier_deficit(u, t: float, symbol=heat_symbol) -> float:
    """||u||^2 - (H_t u, u) = sum (1 - exp(-lambda t)) |u^|^2.

    The zero frequency has lambda = 0 and never decays. Symbols that are
    not smooth at xi = 0, such as the fractional one, need a table built
    with a larger ``pad_factor`` for the dual-grid sum to converge.
    """
    T = _table(u)
    return T.total(-np.expm1(-symbol(T.xi_norm2()) * t))


def dirichlet_form(u, symbol=heat_symbol) -> float:
    """(-L u, u) = sum lambda |u^|^2."""
    T = _table(u)
    return T.total(symbol(T.xi_norm2()))


@dataclass(frozen=True)
class PerimeterFit:
    perimeter: float
    coefficients: np.ndarray
    model: str
    residuals: np.ndarray
    condition: float


def perimeter_from_heat(curve: HeatContentCurve, volume: float, *, cond_max: float = 1e10) -> PerimeterFit:
    """Least-squares fit |E| - Q = b sqrt(t) + c t (+ d t^1.5); P = b sqrt(pi).

    Raises:
        FitError: with fewer than 6 samples, a t range under two decades, or
            a collinear design.
    """
    t = np.asarray(curve.t, dtype=float)
    if t.size < 6:
        raise FitError("need at least 6 samples")
    if t.max() / t.min() < 100.0 * (1 - 1e-9):
        raise FitError("t samples must span at least two decades")
    y = volume - np.asarray(curve.Q, dtype=float)
    cols = [np.sqrt(t), t]
    model = "b*sqrt(t) + c*t"
    if t.size >= 8:
        cols.append(t**1.5)
        model += " + d*t^1.5"
    A = np.stack(cols, axis=1)
    # scale columns so the condition number reflects collinearity only
    sc = np.linalg.norm(A, axis=0)
    cond = float(np.linalg.cond(A / sc))
    if not math.isfinite(cond) or cond > cond_max:
        raise FitError(f"design matrix is ill-conditioned (cond={cond:.3g})")
    coef, *_ = np.linalg.lstsq(A / sc, y, rcond=None)
    coef = coef / sc
    res = y - A @ coef
    return PerimeterFit(float(coef[0] * math.sqrt(math.pi)), coef, model, res, cond)
