"""Gamma function and the closed-form constants of the heat-type limits."""

from __future__ import annotations

import enum
import math
from typing import Callable

from .errors import DomainError, PoleError

__all__ = [
    "RegimeLabel",
    "gamma_fn",
    "bbm_heat_constant",
    "frac_tail_constant",
    "frac_heat_local_constant",
    "regime",
    "sphere_area",
    "ball_volume",
    "directional_average_closed",
]

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _lanczos_log_gamma(x: float) -> float:
    # valid for x >= 0.5
    x -= 1.0
    a = _LANCZOS[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    return math.log(_SQRT_2PI) + (x + 0.5) * math.log(t) - t + math.log(a)


def gamma_fn(x: float) -> float:
    """Euler Gamma function for real ``x``.

    Uses the Lanczos approximation on ``x >= 0.5`` and the reflection
    formula below it. Relative accuracy is better than 1e-12 on [0.05, 50].

    Raises:
        PoleError: if ``x`` is a non-positive integer.
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    if x < 8.0:
        # shift up where the series is most accurate, then recurse down
        shift = 1.0
        while x < 8.0:
            shift *= x
            x += 1.0
        return math.exp(_lanczos_log_gamma(x)) / shift
    return math.exp(_lanczos_log_gamma(x))


def bbm_heat_constant(p: float) -> float:
    """Limit constant ``2 Gamma(p) / Gamma(p/2)`` of the heat-content energy."""
    if p < 1:
        raise DomainError("p must be >= 1")
    return 2.0 * gamma_fn(p) / gamma_fn(p / 2.0)


def frac_tail_constant(N: int, s: float) -> float:
    """Tail coefficient ``lim |x|^(N+2s) h_1^s(x)`` of the fractional heat kernel."""
    if not 0.0 < s < 1.0:
        raise DomainError("s must lie in (0, 1)")
    if N < 1:
        raise DomainError("N must be >= 1")
    return s * 4.0**s * gamma_fn(N / 2.0 + s) / (math.pi ** (N / 2.0) * gamma_fn(1.0 - s))


def frac_heat_local_constant(s: float, p: float) -> float:
    """Local limit constant of the fractional heat-content energy when 2s > p.

    Equals ``Gamma(1 - p/(2s)) / Gamma(1 - p/2) * 2 Gamma(p) / Gamma(p/2)``.
    The critical case ``2s == p`` sits on a pole of ``Gamma(1 - p/(2s))`` and
    is rejected; its limit is measured, not predicted.
    """
    if not 0.0 < s <= 1.0:
        raise DomainError("s must lie in (0, 1]")
    if p < 1:
        raise DomainError("p must be >= 1")
    if not 2.0 * s > p:
        raise DomainError(f"local constant needs 2s > p (got s={s}, p={p})")
    if s == 1.0:
        return bbm_heat_constant(p)
    return gamma_fn(1.0 - p / (2.0 * s)) / gamma_fn(1.0 - p / 2.0) * bbm_heat_constant(p)


class RegimeLabel(str, enum.Enum):
    SUPERCRITICAL = "supercritical-2s>p"
    CRITICAL = "critical-2s=p"
    SUBCRITICAL = "subcritical-2s<p"


def regime(s: float, p: float, *, rtol: float = 1e-12) -> tuple[RegimeLabel, Callable[[float], float]]:
    """Regime label and time normalizer ``psi_{s,p}`` for the fractional energies."""
    if not 0.0 < s < 1.0:
        raise DomainError("s must lie in (0, 1)")
    if p < 1:
        raise DomainError("p must be >= 1")
    gap = 2.0 * s - p
    if abs(gap) <= rtol * max(1.0, p):
        return RegimeLabel.CRITICAL, lambda t: t * abs(math.log(t))
    if gap > 0:
        expo = p / (2.0 * s)
        return RegimeLabel.SUPERCRITICAL, lambda t: t**expo
    return RegimeLabel.SUBCRITICAL, lambda t: t


def sphere_area(N: int) -> float:
    """``N omega_N``, the (N-1)-measure of the unit sphere (2 for N = 1)."""
    return 2.0 * math.pi ** (N / 2.0) / gamma_fn(N / 2.0)


def ball_volume(N: int) -> float:
    """``omega_N``, the volume of the unit ball."""
    return math.pi ** (N / 2.0) / gamma_fn(N / 2.0 + 1.0)


def directional_average_closed(N: int, p: float) -> float:
    """Spherical mean of ``|sigma . e|^p`` over the uniform probability on S^{N-1}."""
    return gamma_fn(N / 2.0) * gamma_fn((p + 1.0) / 2.0) / (math.sqrt(math.pi) * gamma_fn((N + p) / 2.0))
