"""Finite-t verdicts on kernel-family conditions, concentration, angular measures and rank.

No finite computation certifies a limsup as t -> 0. Every routine here
evaluates along a user-supplied decreasing t-grid and states explicitly how
the tail of the sequence was read: the estimate of a limsup is the maximum
over the three smallest t, and a monotone-trend flag accompanies it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConeOverlapError, DivergenceError, DomainError, NonConvergenceError, NormalizationError
from .kernels import KernelFamily, MomentFunction, Profile, moment
from .parallel import ordered_map
from .quadrature import _graded_edges, SphereRule, SphericalDensity, cap_rule, gauss_legendre, log_panel_nodes, sphere_rule
from .special import sphere_area

__all__ = [
    "DEFAULT_T_GRID",
    "DEFAULT_R_GRID",
    "DEFAULT_DELTAS",
    "ConditionReport",
    "ConcentrationReport",
    "MaxRankReport",
    "sequence_trend",
    "bounded_verdict",
    "vanishes",
    "condition_i",
    "condition_split",
    "nu_concentration",
    "spherical_density",
    "theta_density",
    "cones_disjoint",
    "maximal_rank_probe",
    "theta_mu",
    "theta_mu_min",
]

DEFAULT_T_GRID = tuple(2.0**-k for k in range(2, 11))
DEFAULT_R_GRID = tuple(float(r) for r in np.logspace(-2, 3, 11))
DEFAULT_DELTAS = (0.5, 0.25, 0.1, 0.05)

SATISFIED, VIOLATED, INCONCLUSIVE = "satisfied", "violated", "inconclusive"
_RANK = {SATISFIED: 0, INCONCLUSIVE: 1, VIOLATED: 2}


def _check_grids(t_grid, R_grid=None):
    t = np.asarray(t_grid, dtype=float)
    if t.size < 5 or np.any(t <= 0) or np.any(np.diff(t) >= 0):
        raise DomainError("t_grid must be positive, strictly decreasing, with at least 5 points")
    if R_grid is None:
        return t, None
    R = np.asarray(R_grid, dtype=float)
    if np.any(R <= 0) or R.max() / R.min() < 1e3 * (1 - 1e-12):
        raise DomainError("R_grid must be positive and span at least 3 decades")
    return t, R


# ---------------------------------------------------------------- sequences

def sequence_trend(values: Sequence[float]) -> str:
    """'increasing', 'decreasing', 'flat' or 'mixed' over the last three entries."""
    v = np.asarray(values, dtype=float)[-3:]
    if not np.all(np.isfinite(v)):
        return "divergent"
    d = np.diff(v)
    scale = max(np.max(np.abs(v)), 1e-300)
    if np.all(np.abs(d) <= 1e-12 * scale):
        return "flat"
    if np.all(d >= 0):
        return "increasing"
    if np.all(d <= 0):
        return "decreasing"
    return "mixed"


def bounded_verdict(values: Sequence[float], blowup: float = 10.0, creep: float = 0.05) -> tuple[str, float, str]:
    """Read boundedness off a sequence ordered by decreasing t.

    Returns (verdict, limsup estimate, trend). The estimate is the maximum
    over the three smallest t; when the sequence is still increasing with a
    geometric decay of increments, the remaining increments are added.
    """
    v = np.asarray(values, dtype=float)
    trend = sequence_trend(v)
    if trend == "divergent":
        return VIOLATED, math.inf, trend
    last3 = v[-3:]
    est = float(np.max(last3))
    if trend == "increasing":
        d1, d2 = last3[1] - last3[0], last3[2] - last3[1]
        if 0 < d2 < d1:
            est = float(last3[2] + d2 * (d2 / d1) / (1 - d2 / d1))
        if last3[-1] > blowup * max(abs(v[0]), 1e-300):
            return VIOLATED, est, trend
        if d2 > creep * max(abs(last3[1]), 1e-300):
            return INCONCLUSIVE, est, trend
    return SATISFIED, est, trend


def vanishes(values: Sequence[float], t: Sequence[float], tol: float, min_slope: float = 0.25,
             min_log_slope: float = 0.5) -> bool:
    """True when a non-negative sequence (decreasing t) visibly tends to 0.

    Either the last value is below ``tol``, or the three smallest-t values
    decrease monotonically with a log-log slope against t of at least
    ``min_slope`` or a slope against |log t| of at least ``min_log_slope``
    (the second catches 1/|log t| decay, which looks flat against t).
    """
    v = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(v[-3:])):
        return False
    if v[-1] <= tol:
        return True
    last, tt = v[-3:], t[-3:]
    if np.any(last <= 0) or np.any(np.diff(last) >= 0):
        return False
    drop = math.log(last[0] / last[-1])
    if drop >= min_slope * math.log(tt[0] / tt[-1]):
        return True
    lt = np.abs(np.log(tt))
    if np.all(tt < 1.0) and lt[-1] > lt[0]:
        return drop >= min_log_slope * math.log(lt[-1] / lt[0])
    return False


def _worst(verdicts) -> str:
    return max(verdicts, key=lambda v: _RANK[v])


# ---------------------------------------------------------------- radial integrals

def _directions(family: KernelFamily, t: float, n_angle: int) -> SphereRule:
    if family.is_radial:
        e = np.zeros(family.N)
        e[0] = 1.0
        return SphereRule(e[None, :], np.array([sphere_area(family.N)]))
    brk = family.angular_breaks(t) if family.angular_breaks else None
    return sphere_rule(family.N, n_angle=n_angle, breaks=brk or None)


def _sphere_sum(family, t, n_angle, per_ray) -> float:
    rule = _directions(family, t, n_angle)
    return float(sum(w * per_ray(s) for s, w in zip(rule.nodes, rule.weights)))


def _safe(fn):
    try:
        val = fn()
    except (DivergenceError, NonConvergenceError):
        return math.inf
    return val if math.isfinite(val) else math.inf


def _weighted_ray(family: KernelFamily, t: float, sigma, R: float, p: float) -> float:
    """int_0^inf rho_t(sigma r) R^p/(R^p + r^p) r^(N-1) dr.

    Far from r = R the weight is replaced by two terms of its expansion, so
    only kernel moments are needed there; the band [R/1e3, R*1e3] is
    integrated directly.
    """
    r0, r1 = R * 1e-3, R * 1e3
    Rp = R**p
    inner = family.ray_moment(t, sigma, 0.0, r0, 0.0) - family.ray_moment(t, sigma, 0.0, r0, p) / Rp
    outer = Rp * family.ray_moment(t, sigma, r1, math.inf, -p) \
        - Rp * Rp * family.ray_moment(t, sigma, r1, math.inf, -2 * p)
    m = family.N - 1

    def f(r):
        return family.on_ray(t, sigma, r) * Rp / (Rp + r**p) * r**m

    r, w = log_panel_nodes(r0, r1, 16, 8, breaks=[*family.ray_breaks(t, sigma), R])
    return inner + float(np.sum(w * f(r))) + outer


# ---------------------------------------------------------------- condition reports

@dataclass
class ConditionReport:
    """Per-(R, t) tables, per-R limsup estimates and a verdict."""

    check: str
    R_grid: np.ndarray
    t_grid: np.ndarray
    tables: dict[str, np.ndarray]
    limsup: dict[str, np.ndarray]
    trends: dict[str, list[str]]
    sup_estimate: float
    verdict: str
    items: dict[str, str] = field(default_factory=dict)
    consistent: bool | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def clean(a):
            return [None if not math.isfinite(x) else float(x) for x in np.ravel(a)]

        return {
            "check": self.check,
            "R_grid": clean(self.R_grid),
            "t_grid": clean(self.t_grid),
            "tables": {k: [clean(row) for row in v] for k, v in self.tables.items()},
            "limsup": {k: clean(v) for k, v in self.limsup.items()},
            "trends": self.trends,
            "sup_estimate": self.sup_estimate if math.isfinite(self.sup_estimate) else None,
            "verdict": self.verdict,
            "items": self.items,
            "consistent": self.consistent,
            "notes": self.notes,
        }


def _table(R, t, fn):
    cells = [(i, j) for i in range(len(R)) for j in range(len(t))]
    vals = ordered_map(lambda c: _safe(lambda: fn(float(R[c[0]]), float(t[c[1]]))), cells)
    return np.array(vals, dtype=float).reshape(len(R), len(t))


def _r_growth(lim: np.ndarray, R: np.ndarray, min_slope: float = 0.1) -> bool:
    """Per-R limsup estimates still growing like a power of R at the top of the grid."""
    v, r = lim[-3:], R[-3:]
    if not np.all(np.isfinite(v)):
        return True
    if np.any(v <= 0) or np.any(np.diff(v) <= 0):
        return False
    return math.log(v[-1] / v[0]) / math.log(r[-1] / r[0]) >= min_slope


def _grid_verdict(table: np.ndarray, R: np.ndarray, notes: list[str], label: str):
    """Verdict on sup over R of limsup over t for a (R, t) table.

    The t-trend is read on the column-wise maximum over R, since rows at
    small R only saturate once the kernel scale falls below R. Unbounded
    growth in R is flagged from the per-R estimates at the largest R.
    """
    rows = [bounded_verdict(row) for row in table]
    lim = np.array([r[1] for r in rows])
    trends = [r[2] for r in rows]
    verdict, _, _ = bounded_verdict(np.max(table, axis=0))
    if len(R) >= 3 and _r_growth(lim, R):
        notes.append(f"{label}: limsup grows with R at the top of the R-grid")
        verdict = VIOLATED
    return verdict, lim, trends


def condition_i(family: KernelFamily, R_grid=DEFAULT_R_GRID, t_grid=DEFAULT_T_GRID,
                p: float | None = None, n_angle: int = 64) -> ConditionReport:
    """sup over R of limsup_t of R^p int rho_t(z) / (R^p + |z|^p) dz."""
    p = family.p if p is None else p
    t, R = _check_grids(t_grid, R_grid)
    tab = _table(R, t, lambda r, tt: _sphere_sum(family, tt, n_angle,
                                                  lambda s: _weighted_ray(family, tt, s, r, p)))
    notes: list[str] = []
    verdict, lim, trends = _grid_verdict(tab, R, notes, "weighted")
    return ConditionReport("condition-i", R, t, {"weighted": tab}, {"weighted": lim},
                           {"weighted": trends}, float(np.max(lim)), verdict,
                           items={"i": verdict}, notes=notes)


def condition_split(family: KernelFamily, R_grid=DEFAULT_R_GRID, t_grid=DEFAULT_T_GRID,
                    p: float | None = None, n_angle: int = 64,
                    vanish_tol: float = 1e-6) -> ConditionReport:
    """Split forms of the same condition: ball mass, scaled tail, raw tail and the 1 ^ |z|^-p mass.

    Item (ii) asks that ball mass plus scaled tail stay bounded uniformly in
    R. Item (iv) asks for bounded ball mass and a raw tail
    int_{|z|>R} rho_t/|z|^p whose limsup dies out as R grows; item (v) asks
    the same of the 1 ^ |z|^-p mass and its tail. "Dies out" is read as
    vanishing along the R-grid rather than vanishing for every fixed R,
    which no t-independent family with mass away from 0 could meet.
    """
    p = family.p if p is None else p
    t, R = _check_grids(t_grid, R_grid)
    mass = _table(R, t, lambda r, tt: _sphere_sum(family, tt, n_angle,
                                                   lambda s: family.ray_moment(tt, s, 0.0, r, 0.0)))
    raw = _table(R, t, lambda r, tt: _sphere_sum(family, tt, n_angle,
                                                  lambda s: family.ray_moment(tt, s, r, math.inf, -p)))
    scaled = raw * (R[:, None] ** p)
    one = np.array([1.0])
    fog = _table(one, t, lambda r, tt: _sphere_sum(
        family, tt, n_angle,
        lambda s: family.ray_moment(tt, s, 0.0, 1.0, 0.0) + family.ray_moment(tt, s, 1.0, math.inf, -p)))

    notes: list[str] = []
    item_ii, lim_ii, tr_ii = _grid_verdict(mass + scaled, R, notes, "ii")
    item_iv, lim_mass, tr_mass = _grid_verdict(mass, R, notes, "ball mass")
    item_v, lim_fog, tr_fog = bounded_verdict(fog[0])
    # for R >= 1 the 1 ^ |z|^-p tail is the raw tail itself
    raw_lim = np.array([bounded_verdict(row)[1] for row in raw])
    scale = max(float(np.max(np.where(np.isfinite(lim_mass), lim_mass, 0.0))), 1.0)
    tol = vanish_tol * scale
    tail_dies = bool(np.isfinite(raw_lim[-1]) and (raw_lim[-1] <= tol or vanishes(raw_lim, 1.0 / R, tol)))
    if not tail_dies:
        notes.append("raw tail limsup does not vanish along the R-grid")
        item_iv = VIOLATED if item_iv == SATISFIED else item_iv
        item_v = VIOLATED if item_v == SATISFIED else item_v
    items = {"ii": item_ii, "iv": item_iv, "v": item_v}
    verdict = _worst(items.values())
    consistent = len(set(items.values())) == 1
    if not consistent:
        notes.append("items disagree: " + ", ".join(f"{k}={v}" for k, v in items.items()))
    return ConditionReport(
        "condition-split", R, t,
        {"ball_mass": mass, "scaled_tail": scaled, "raw_tail": raw, "one_wedge": fog},
        {"ii": lim_ii, "ball_mass": lim_mass, "raw_tail": raw_lim, "one_wedge": np.array([lim_fog])},
        {"ii": tr_ii, "ball_mass": tr_mass, "one_wedge": [tr_fog]},
        float(np.max(lim_ii)), verdict, items=items, consistent=consistent, notes=notes)


# ---------------------------------------------------------------- concentration

@dataclass
class ConcentrationReport:
    t_grid: np.ndarray
    deltas: np.ndarray
    inner: np.ndarray          # (len(deltas), len(t))
    outer: np.ndarray
    vanishing: list[bool]
    concentrated: bool
    alpha: float
    alpha_uncertainty: float
    delta_used: float | None
    verdict: str

    def to_dict(self) -> dict:
        def clean(a):
            return [None if not math.isfinite(x) else float(x) for x in np.ravel(a)]

        return {
            "t_grid": clean(self.t_grid),
            "deltas": clean(self.deltas),
            "inner": [clean(r) for r in self.inner],
            "outer": [clean(r) for r in self.outer],
            "vanishing": self.vanishing,
            "concentrated": self.concentrated,
            "alpha": self.alpha if math.isfinite(self.alpha) else None,
            "alpha_uncertainty": self.alpha_uncertainty if math.isfinite(self.alpha_uncertainty) else None,
            "delta_used": self.delta_used,
            "verdict": self.verdict,
        }


def nu_concentration(family: KernelFamily, t_grid=DEFAULT_T_GRID, deltas=DEFAULT_DELTAS,
                     R_max: float = 10.0, n_angle: int = 64, rel_tol: float = 1e-3) -> ConcentrationReport:
    """Mass of rho_t in B_delta and in B_Rmax minus B_delta along the t-grid.

    The family concentrates at the origin when the outer mass vanishes for
    every delta. The atom is read at the smallest delta whose outer mass at
    the smallest t is below ``rel_tol`` of the total, falling back to the
    delta with the least outer mass.
    """
    t, _ = _check_grids(t_grid)
    d = np.asarray(deltas, dtype=float)
    if np.any(np.diff(d) >= 0) or np.any(d <= 0) or d[0] >= R_max:
        raise DomainError("deltas must be positive, strictly decreasing and below R_max")
    inner = _table(d, t, lambda r, tt: _sphere_sum(family, tt, n_angle,
                                                    lambda s: family.ray_moment(tt, s, 0.0, r, 0.0)))
    outer = _table(d, t, lambda r, tt: _sphere_sum(family, tt, n_angle,
                                                    lambda s: family.ray_moment(tt, s, r, R_max, 0.0)))
    total = inner + outer
    vanishing = [vanishes(outer[k], t, rel_tol * max(float(total[k, -1]), 1e-300) if math.isfinite(total[k, -1]) else 0.0)
                 for k in range(len(d))]
    concentrated = all(vanishing)
    frac = np.where(np.isfinite(total[:, -1]) & (total[:, -1] > 0),
                    outer[:, -1] / np.where(total[:, -1] > 0, total[:, -1], 1.0), np.inf)
    ok = [k for k in range(len(d)) if frac[k] <= rel_tol]
    k_use = ok[-1] if ok else int(np.argmin(frac)) if np.any(np.isfinite(frac)) else None
    if k_use is None:
        alpha, unc, d_used = math.inf, math.inf, None
    else:
        alpha = float(inner[k_use, -1])
        unc = float(abs(inner[k_use, -1] - inner[k_use, -2]))
        d_used = float(d[k_use])
    verdict = "concentrated" if concentrated else "nu not concentrated"
    return ConcentrationReport(t, d, inner, outer, vanishing, concentrated, alpha, unc, d_used, verdict)


# ---------------------------------------------------------------- angular measures

def spherical_density(family: KernelFamily, t: float, delta: float, n_angle: int = 64,
                      n_polar: int = 32) -> SphericalDensity:
    """Density of the angular measure sigma -> int_0^delta rho_t(sigma r) r^(N-1) dr."""
    if not 0.0 < delta <= 1.0:
        raise DomainError("delta must lie in (0, 1]")
    brk = family.angular_breaks(t) if family.angular_breaks else None
    rule = sphere_rule(family.N, n_angle=n_angle, n_polar=n_polar, breaks=brk or None)
    vals = ordered_map(lambda s: family.ray_moment(t, s, 0.0, delta, 0.0), list(rule.nodes))
    return SphericalDensity(rule.nodes, rule.weights, np.maximum(np.array(vals), 0.0))


def theta_density(K: Profile, p: float, n_angle: int = 64, n_polar: int = 32,
                  tol: float = 1e-6) -> SphericalDensity:
    """Normalized ray moments sigma -> int r^(N+p-1) K(sigma r) dr / || |x|^p K ||_1.

    Raises:
        NormalizationError: if the p-moment diverges or the result does not
            integrate to 1 within ``tol``.
    """
    rule = sphere_rule(K.N, n_angle=n_angle, n_polar=n_polar)
    try:
        total = moment(MomentFunction(K, p), math.inf)
        vals = np.array(ordered_map(lambda s: K.ray_moment(s, 0.0, math.inf, p), list(rule.nodes)))
    except (DivergenceError, NonConvergenceError) as exc:
        raise NormalizationError(f"|x|^p K is not integrable: {exc}") from exc
    if not total > 0:
        raise NormalizationError("profile has zero p-moment")
    dens = SphericalDensity(rule.nodes, rule.weights, vals / total)
    if abs(dens.total_mass() - 1.0) > tol:
        raise NormalizationError(f"theta mass {dens.total_mass():.10g} differs from 1")
    return dens


def theta_mu(theta: SphericalDensity, v) -> np.ndarray:
    """sum_j w_j theta_j |v . sigma_j| for each row of v."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    return np.abs(v @ theta.nodes.T) @ (theta.weights * theta.values)


def theta_mu_min(theta: SphericalDensity, v_grid=None, n_angle: int = 720) -> float:
    """Minimum of theta_mu over a fine grid of unit vectors."""
    if v_grid is None:
        v_grid = sphere_rule(theta.N, n_angle=n_angle, n_polar=n_angle // 4).nodes
    return float(np.min(theta_mu(theta, v_grid)))


# ---------------------------------------------------------------- maximal rank

def _half_angle(tau: float) -> float:
    if not 0.0 < tau < 1.0:
        raise DomainError("tau must lie in (0, 1)")
    return math.acos(1.0 - tau)


def cones_disjoint(basis, tau: float, n_samples: int = 20000, seed: int = 0) -> bool:
    """Cones {x : x.v >= (1 - tau)|x|} around the basis meet only at 0.

    Two such cones share a ray exactly when the angle between their axes is
    at most twice the half-angle; the answer is cross-checked on random
    sphere samples.
    """
    V = np.atleast_2d(np.asarray(basis, dtype=float))
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    alpha = _half_angle(tau)
    exact = True
    for i in range(len(V)):
        for j in range(i + 1, len(V)):
            ang = math.acos(max(-1.0, min(1.0, float(V[i] @ V[j]))))
            if ang <= 2.0 * alpha:
                exact = False
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n_samples, V.shape[1]))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    inside = (x @ V.T) >= (1.0 - tau)
    sampled = not np.any(inside.sum(axis=1) > 1)
    if exact and not sampled:
        raise AssertionError("cone disjointness check disagrees with sampling")
    return exact


def _cap(family: KernelFamily, t: float, v: np.ndarray, alpha: float, n: int) -> SphereRule:
    if family.N != 2 or not family.angular_breaks:
        return cap_rule(v, alpha, n)
    phi0 = math.atan2(v[1], v[0])
    cuts = [phi0 - alpha, phi0 + alpha]
    for b in family.angular_breaks(t):
        for k in (-1, 0, 1):
            c = b + 2 * math.pi * k
            if cuts[0] < c < cuts[-1]:
                cuts.append(c)
    cuts = sorted(cuts)
    finest = min(b - a for a, b in zip(cuts[:-1], cuts[1:]))
    x, w = gauss_legendre(n)
    phis, ws = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        levels = max(4, math.ceil(math.log2((hi - lo) / finest)) + 4)
        edges = _graded_edges(lo, hi, levels)
        for a, b in zip(edges[:-1], edges[1:]):
            phis.append(0.5 * (a + b) + 0.5 * (b - a) * x)
            ws.append(0.5 * (b - a) * w)
    phi = np.concatenate(phis)
    return SphereRule(np.stack([np.cos(phi), np.sin(phi)], axis=1), np.concatenate(ws))


@dataclass
class MaxRankReport:
    basis: np.ndarray
    tau: float
    deltas: np.ndarray
    t_grid: np.ndarray
    masses: np.ndarray        # (n_basis, n_delta, n_t)
    vanishing: np.ndarray     # (n_basis, n_delta)
    floor: float
    positive: bool

    def to_dict(self) -> dict:
        return {
            "basis": self.basis.tolist(),
            "tau": self.tau,
            "deltas": self.deltas.tolist(),
            "t_grid": self.t_grid.tolist(),
            "masses": self.masses.tolist(),
            "vanishing": self.vanishing.tolist(),
            "floor": self.floor,
            "verdict": "positive" if self.positive else "negative",
        }


def maximal_rank_probe(family: KernelFamily, basis=None, tau: float = 0.25, deltas=DEFAULT_DELTAS,
                       t_grid=DEFAULT_T_GRID, n_cap: int = 16, rel_tol: float = 1e-8) -> MaxRankReport:
    """Mass of rho_t in B_delta intersected with the cone around each basis vector.

    The verdict is positive when no (direction, delta) sequence vanishes as t
    decreases and every smallest-t mass is strictly positive.

    Raises:
        ConeOverlapError: if two cones share a ray.
    """
    N = family.N
    V = np.eye(N) if basis is None else np.atleast_2d(np.asarray(basis, dtype=float))
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    if V.shape != (N, N) or abs(np.linalg.det(V)) < 1e-12:
        raise DomainError("basis must consist of N independent vectors")
    if not cones_disjoint(V, tau):
        raise ConeOverlapError(f"cones of aperture tau={tau} around the basis overlap")
    t, _ = _check_grids(t_grid)
    d = np.asarray(deltas, dtype=float)
    alpha = _half_angle(tau)

    def cell(c):
        i, k, j = c
        rule = _cap(family, float(t[j]), V[i], alpha, n_cap)
        return _safe(lambda: float(sum(w * family.ray_moment(float(t[j]), s, 0.0, float(d[k]), 0.0)
                                       for s, w in zip(rule.nodes, rule.weights))))

    cells = [(i, k, j) for i in range(N) for k in range(len(d)) for j in range(len(t))]
    m = np.array(ordered_map(cell, cells)).reshape(N, len(d), len(t))
    scale = float(np.max(np.where(np.isfinite(m), m, 0.0))) or 1.0
    tol = rel_tol * scale
    van = np.array([[vanishes(m[i, k], t, tol) for k in range(len(d))] for i in range(N)])
    floor = float(np.min(m[:, :, -1]))
    positive = bool(not van.any() and floor > tol)
    return MaxRankReport(V, tau, d, t, m, van, floor, positive)
