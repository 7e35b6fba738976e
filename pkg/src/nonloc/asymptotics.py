"""Extrapolation of small-t limits from finitely many energy samples."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .energy import EnergySample
from .errors import DomainError, FitError

__all__ = ["LimitEstimate", "Verdict", "extract_limit", "compare_to_prediction", "NonMonotoneResidualWarning"]


class NonMonotoneResidualWarning(UserWarning):
    """Fit residuals change sign irregularly; the correction model may be wrong."""


@dataclass(frozen=True)
class LimitEstimate:
    a0: float
    a1: float
    gamma: float | str
    model: str
    max_residual: float
    error_bar: float
    residuals: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    normalized: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "a0": self.a0,
            "a1": self.a1,
            "gamma": self.gamma,
            "model": self.model,
            "max_residual": self.max_residual,
            "error_bar": self.error_bar,
            "t": [float(x) for x in self.t],
            "normalized": [float(x) for x in self.normalized],
            "residuals": [float(x) for x in self.residuals],
        }


def _linfit(r: np.ndarray, y: np.ndarray) -> tuple[float, float, np.ndarray]:
    A = np.stack([np.ones_like(r), r], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), float(coef[1]), y - A @ coef


def _power_fit(t, y):
    # candidate exponents 1/2, 1 and the least-squares optimum
    best = None
    for g in (0.5, 1.0):
        a0, a1, res = _linfit(t**g, y)
        rms = float(np.sqrt(np.mean(res**2)))
        if best is None or rms < best[0]:
            best = (rms, a0, a1, g, res)
    if t.size >= 4:
        def obj(g):
            return float(np.sum(_linfit(t**g, y)[2] ** 2))
        opt = minimize_scalar(obj, bounds=(0.05, 3.0), method="bounded", options={"xatol": 1e-10})
        a0, a1, res = _linfit(t**opt.x, y)
        rms = float(np.sqrt(np.mean(res**2)))
        if rms < best[0]:
            best = (rms, a0, a1, float(opt.x), res)
    return best


def _neville_at_zero(t: np.ndarray, y: np.ndarray) -> float:
    # polynomial extrapolation in t to t = 0 (repeated pairwise elimination)
    p = list(y)
    n = len(t)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (t[i + k] * p[i] - t[i] * p[i + 1]) / (t[i + k] - t[i])
    return float(p[0])


def _fit(t: np.ndarray, y: np.ndarray, model: str):
    if model == "power":
        rms, a0, a1, g, res = _power_fit(t, y)
        return a0, a1, g, res
    if model == "log":
        a0, a1, res = _linfit(1.0 / np.abs(np.log(t)), y)
        return a0, a1, "1/|log t|", res
    if model == "richardson":
        # repeated pairwise elimination of the powers t, t^2, ...
        a0 = _neville_at_zero(t, y)
        _, a1, _ = _linfit(t, y - a0)
        res = y - (a0 + a1 * t)
        return a0, a1, 1.0, res
    raise DomainError(f"unknown model {model!r}")


def extract_limit(samples: Sequence[EnergySample] | Sequence[tuple[float, float]],
                  normalizer: Callable[[float], float] = lambda t: 1.0,
                  model: str = "power") -> LimitEstimate:
    """Fit F(t)/psi(t) = a0 + a1 r(t) and report the limit a0 with an error bar.

    ``model`` is ``power`` (r = t^gamma, gamma chosen from 1/2, 1 or fitted),
    ``log`` (r = 1/|log t|) or ``richardson`` (polynomial elimination in t).
    The error bar is |a0(all samples) - a0(largest t dropped)|.

    Raises:
        FitError: with fewer than 4 samples, non-decreasing t, non-finite
            values, or when the two smallest-t normalized values differ by
            more than 20%.
    """
    pts = [(s.t, s.value) if isinstance(s, EnergySample) else (float(s[0]), float(s[1])) for s in samples]
    if len(pts) < 4:
        raise FitError("need at least 4 samples")
    t = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    if np.any(np.diff(t) >= 0):
        raise FitError("t must be strictly decreasing")
    y = v / np.array([normalizer(x) for x in t])
    if not np.all(np.isfinite(y)):
        raise FitError("non-finite normalized values")
    last, prev = y[-1], y[-2]
    if abs(last - prev) > 0.2 * max(abs(last), abs(prev)):
        raise FitError("normalized values are not settling (last two differ by >20%)")
    a0, a1, g, res = _fit(t, y, model)
    a0_drop, *_ = _fit(t[1:], y[1:], model)
    signs = np.sign(res[np.abs(res) > 1e-12 * max(1.0, abs(a0))])
    if signs.size >= 4 and np.count_nonzero(np.diff(signs)) > signs.size // 2 + 1:
        warnings.warn("residual signs alternate irregularly", NonMonotoneResidualWarning, stacklevel=2)
    return LimitEstimate(a0, a1, g, model, float(np.max(np.abs(res))), abs(a0 - a0_drop),
                         res, t, y)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    warning: bool
    estimate: float
    predicted: float
    rel_error: float
    error_bar: float
    rel_tol: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compare_to_prediction(est: LimitEstimate, predicted: float, rel_tol: float) -> Verdict:
    """Pass iff |a0 - predicted| <= rel_tol |predicted| + error bar.

    The warning flag is raised when the error bar alone exceeds the
    tolerance, so a pass would be uninformative.
    """
    if not math.isfinite(predicted):
        raise DomainError("predicted value must be finite")
    dev = abs(est.a0 - predicted)
    allowed = rel_tol * abs(predicted)
    passed = dev <= allowed + est.error_bar
    warn = est.error_bar > allowed
    rel = dev / abs(predicted) if predicted != 0 else math.inf
    return Verdict(bool(passed), bool(warn), est.a0, predicted, rel, est.error_bar, rel_tol)
