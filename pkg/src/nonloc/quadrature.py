"""Quadrature building blocks: log-radius Gauss panels, sphere rules, ray integrals."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import DivergenceError, DomainError, NonConvergenceError

__all__ = [
    "gauss_legendre",
    "log_panel_nodes",
    "SphereRule",
    "sphere_rule",
    "cap_rule",
    "ray_integral",
    "SphericalDensity",
]


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def log_panel_nodes(a: float, b: float, per_decade: int, order: int,
                    breaks: Sequence[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for integrating over [a, b] in the variable log r.

    Panels are equal in log r, ``per_decade`` per factor of ten, and are
    additionally split at every break point strictly inside (a, b). The
    returned weights already include the Jacobian ``r``, so
    ``sum(w * f(r))`` approximates ``int_a^b f(r) dr``.
    """
    if not 0.0 < a < b:
        return np.empty(0), np.empty(0)
    la, lb = math.log(a), math.log(b)
    n_pan = max(1, math.ceil(per_decade * (lb - la) / math.log(10.0)))
    edges = list(np.linspace(la, lb, n_pan + 1))
    for r in breaks:
        if a < r < b:
            edges.append(math.log(r))
    edges = np.unique(np.asarray(edges))
    x, w = gauss_legendre(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    v = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wv = (half[:, None] * w[None, :]).ravel()
    r = np.exp(v)
    return r, wv * r


@dataclass(frozen=True)
class SphereRule:
    """Quadrature on S^{N-1}: unit vectors ``nodes`` (M, N) and ``weights`` (M,)."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def N(self) -> int:
        return self.nodes.shape[1]

    def __len__(self) -> int:
        return len(self.weights)


def _circle_panels(breaks: Sequence[float], n_per_panel: int) -> tuple[np.ndarray, np.ndarray]:
    cuts = sorted({float(b) % (2 * math.pi) for b in breaks})
    cuts = cuts + [cuts[0] + 2 * math.pi]
    x, w = gauss_legendre(n_per_panel)
    widths = [hi - lo for lo, hi in zip(cuts[:-1], cuts[1:]) if hi - lo >= 1e-15]
    finest = min(widths)
    phis, ws = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo < 1e-15:
            continue
        # grade toward both ends, where corner-type features sit, down to a
        # fraction of the narrowest panel
        levels = max(6, math.ceil(math.log2((hi - lo) / finest)) + 4)
        sub = _graded_edges(lo, hi, levels)
        for a, b in zip(sub[:-1], sub[1:]):
            phis.append(0.5 * (a + b) + 0.5 * (b - a) * x)
            ws.append(0.5 * (b - a) * w)
    return np.concatenate(phis), np.concatenate(ws)


def _graded_edges(lo: float, hi: float, levels: int = 6) -> np.ndarray:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fr = 0.5 ** np.arange(levels, 0, -1)
    left = lo + half * fr
    right = hi - half * fr
    return np.concatenate(([lo], left, [mid], right[::-1], [hi]))


def sphere_rule(N: int, n_angle: int = 64, n_polar: int = 32,
                breaks: Sequence[float] | None = None, n_per_panel: int = 8) -> SphereRule:
    """Tensor quadrature on the unit sphere.

    N = 1 uses the two points {-1, +1}; N = 2 the uniform trapezoid rule with
    ``n_angle`` nodes, or Gauss panels between the given break angles; N = 3 a
    Gauss-Legendre (in cos) times trapezoid (in azimuth) product.
    """
    if N == 1:
        return SphereRule(np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]))
    if N == 2:
        if breaks:
            phi, w = _circle_panels(breaks, n_per_panel)
        else:
            phi = 2 * math.pi * np.arange(n_angle) / n_angle
            w = np.full(n_angle, 2 * math.pi / n_angle)
        return SphereRule(np.stack([np.cos(phi), np.sin(phi)], axis=1), w)
    if N == 3:
        x, wx = gauss_legendre(n_polar)
        phi = 2 * math.pi * np.arange(n_angle) / n_angle
        c = np.repeat(x, n_angle)
        sn = np.sqrt(1.0 - c**2)
        ph = np.tile(phi, n_polar)
        nodes = np.stack([sn * np.cos(ph), sn * np.sin(ph), c], axis=1)
        w = np.repeat(wx, n_angle) * (2 * math.pi / n_angle)
        return SphereRule(nodes, w)
    raise DomainError("sphere rules are provided for N in {1, 2, 3}")


def cap_rule(v: np.ndarray, half_angle: float, n: int = 24) -> SphereRule:
    """Quadrature on the spherical cap {sigma : angle(sigma, v) <= half_angle}."""
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    N = v.size
    if N == 1:
        return SphereRule(v.reshape(1, 1), np.array([1.0]))
    x, w = gauss_legendre(n)
    if N == 2:
        phi0 = math.atan2(v[1], v[0])
        phi = phi0 + half_angle * x
        return SphereRule(np.stack([np.cos(phi), np.sin(phi)], axis=1), half_angle * w)
    if N == 3:
        cmin = math.cos(half_angle)
        c = 0.5 * (1 + cmin) + 0.5 * (1 - cmin) * x
        wc = 0.5 * (1 - cmin) * w
        m = 2 * n
        ph = 2 * math.pi * np.arange(m) / m
        cc = np.repeat(c, m)
        sn = np.sqrt(1 - cc**2)
        pp = np.tile(ph, n)
        local = np.stack([sn * np.cos(pp), sn * np.sin(pp), cc], axis=1)
        # rotate e3 onto v
        e3 = np.array([0.0, 0.0, 1.0])
        a = np.cross(e3, v)
        s, cth = np.linalg.norm(a), float(e3 @ v)
        if s < 1e-14:
            R = np.eye(3) if cth > 0 else np.diag([1.0, -1.0, -1.0])
        else:
            k = a / s
            K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
            R = np.eye(3) + s * K + (1 - cth) * (K @ K)
        return SphereRule(local @ R.T, np.repeat(wc, m) * (2 * math.pi / m))
    raise DomainError("cap rules are provided for N in {1, 2, 3}")


def _quad(f: Callable[[float], float], a: float, b: float, rtol: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=rtol, limit=200)
    return val


def ray_integral(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, *,
                 breaks: Sequence[float] = (), scale: float = 1.0,
                 rtol: float = 1e-10, max_decades: int = 400) -> float:
    """Integral of ``f(r) dr`` over [a, b] with 0 <= a < b <= inf.

    The finite core between ``scale * 1e-3`` and ``scale * 1e3`` (clipped to
    [a, b]) is split at the break points and integrated adaptively in log r.
    Open ends are then extended one decade at a time. When the decade
    contributions stop shrinking the integral is declared divergent.

    Raises:
        DivergenceError: if the end contributions do not decay.
    """
    if not 0.0 <= a < b:
        if a == b:
            return 0.0
        raise DomainError("need 0 <= a < b")

    def g(v: float) -> float:
        r = math.exp(v)
        return float(f(np.array([r]))[0]) * r

    lo = a if a > 0 else scale * 1e-3
    hi = b if math.isfinite(b) else scale * 1e3
    if a > 0 and not math.isfinite(b):
        hi = max(hi, a * 1e3)
    if math.isfinite(b) and a == 0:
        lo = min(lo, b * 1e-3)
    lo, hi = max(lo, a), min(hi, b)
    total = 0.0
    if lo < hi:
        cuts = sorted({lo, hi, *[x for x in breaks if lo < x < hi]})
        lv = [math.log(c) for c in cuts]
        for u, w in zip(lv[:-1], lv[1:]):
            # decade sub-panels keep quad well-conditioned over long ranges
            n = max(1, math.ceil((w - u) / math.log(10.0)))
            e = np.linspace(u, w, n + 1)
            for x0, x1 in zip(e[:-1], e[1:]):
                total += _quad(g, x0, x1, rtol)
    for direction, end, limit in ((-1, lo, a), (1, hi, b)):
        if (direction < 0 and end <= limit) or (direction > 0 and end >= limit):
            continue
        contribs: list[float] = []
        cur = math.log(end)
        step = math.log(10.0)
        for _ in range(max_decades):
            nxt = cur + direction * step
            if direction > 0 and math.isfinite(limit):
                nxt = min(nxt, math.log(limit))
            x0, x1 = (nxt, cur) if direction < 0 else (cur, nxt)
            c = _quad(g, x0, x1, rtol)
            contribs.append(c)
            total += c
            cur = nxt
            if direction > 0 and math.isfinite(limit) and cur >= math.log(limit):
                break
            if abs(c) <= rtol * abs(total) * 1e-2 or (c == 0.0 and len(contribs) > 2):
                break
            if len(contribs) >= 5:
                last = np.abs(contribs[-5:])
                if np.all(last[1:] >= 0.95 * last[:-1]) and last[-1] > rtol * abs(total):
                    raise DivergenceError("ray integral does not converge at the "
                                          + ("origin" if direction < 0 else "tail"))
                ratio = last[-1] / last[-2] if last[-2] > 0 else 0.0
                if 0 < ratio < 0.95:
                    remaining = last[-1] * ratio / (1 - ratio)
                    if remaining <= rtol * abs(total):
                        total += math.copysign(remaining, c)
                        break
        else:
            raise NonConvergenceError("ray integral end region needs more than "
                                      f"{max_decades} decades")
    return total


@dataclass(frozen=True)
class SphericalDensity:
    """A density on S^{N-1} stored on quadrature nodes.

    The measure it represents is sum_j weights[j] * values[j] * delta_{nodes[j]},
    so point masses are nodes with unit weight.
    """

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.values) < 0):
            raise DomainError("spherical densities must be non-negative")

    @property
    def N(self) -> int:
        return self.nodes.shape[1]

    def total_mass(self) -> float:
        return float(np.sum(self.weights * self.values))

    def scaled(self, c: float) -> "SphericalDensity":
        return SphericalDensity(self.nodes, self.weights, c * self.values)

    @classmethod
    def uniform(cls, N: int, mass: float = 1.0, **rule_kw) -> "SphericalDensity":
        rule = sphere_rule(N, **rule_kw)
        area = float(rule.weights.sum())
        return cls(rule.nodes, rule.weights, np.full(len(rule), mass / area))

    @classmethod
    def atoms(cls, nodes, masses) -> "SphericalDensity":
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        nodes = nodes / np.linalg.norm(nodes, axis=1, keepdims=True)
        return cls(nodes, np.ones(len(nodes)), np.asarray(masses, dtype=float))
