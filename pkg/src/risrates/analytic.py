"""Closed-form reassignment/handover rates, marginals over mobility laws,
signaling totals, and server dimensioning."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

from .geometry import (CircularSector, GeometryDomainError, MoveGeometry,
                       displaced_distance, displaced_position,
                       numeric_blocked_area, visible_excess_area_A1,
                       visible_region_predicate)
from .scenarios import (Deterministic, Law, MobilitySpec, ScenarioKnown,
                        ScenarioUnknown, SignalingConfig, law_bounds)
from .stochastic import p_not_blocked_Z

logger = logging.getLogger(__name__)

# Fixed-grid node count for marginals whose integrand carries Monte Carlo
# noise (adaptive bisection would chase the noise instead of converging).
_GRID_NODES = 13


@dataclass(frozen=True)
class RateReport:
    """Signaling-rate summary. e_gamma is the canonical total
    e_sb + p_a * e_so; e_gamma_expanded reports the alternative composed
    form (1 + p_event per class, times 1 + p_a) for comparison."""

    p_rr: float
    p_ho: float
    e_rr: float
    e_ho: float
    e_sb: float
    e_so: float
    e_gamma: float
    e_gamma_expanded: float

    def __post_init__(self) -> None:
        for name in ("p_rr", "p_ho", "e_rr", "e_ho", "e_sb", "e_so",
                     "e_gamma", "e_gamma_expanded"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")


# ---------------------------------------------------------------------------
# Quadrature


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-6, max_depth: int = 50) -> float:
    """Adaptive Simpson integral of f on [a, b] to absolute tolerance tol."""
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


def _composite_simpson_mean(values: list[float], a: float, b: float) -> float:
    """Mean of a function from equally spaced samples (odd count) on [a, b]."""
    n = len(values) - 1
    if n % 2 != 0 or n < 2:
        raise ValueError("composite Simpson needs an odd number of nodes >= 3")
    s = values[0] + values[-1]
    s += 4.0 * sum(values[1:-1:2])
    s += 2.0 * sum(values[2:-1:2])
    h = (b - a) / n
    return s * h / 3.0 / (b - a)


class _NearestValid:
    """Integrand wrapper that replaces domain-failing nodes with the value at
    the nearest valid abscissa, counting the substitutions."""

    def __init__(self, f: Callable[[float], float], a: float, b: float,
                 probes: int = 9):
        self._f = f
        self._cache: list[tuple[float, float]] = []
        self.failures = 0
        first_error: GeometryDomainError | None = None
        for i in range(probes):
            t = a + (b - a) * i / (probes - 1)
            try:
                self._cache.append((t, f(t)))
            except GeometryDomainError as exc:
                first_error = exc
        if not self._cache:
            raise first_error  # nothing valid anywhere on the interval

    def __call__(self, t: float) -> float:
        for tc, vc in self._cache:
            if tc == t:
                return vc
        try:
            v = self._f(t)
        except GeometryDomainError:
            self.failures += 1
            _, v = min(self._cache, key=lambda kv: abs(kv[0] - t))
            return v
        self._cache.append((t, v))
        return v


def _mean_over_interval(f, lo, hi, tol):
    """Mean of f over [lo, hi] with nearest-valid clamping of bad nodes."""
    wrapped = _NearestValid(f, lo, hi)
    value = adaptive_simpson(wrapped, lo, hi, tol=0.5 * tol * (hi - lo)) / (hi - lo)
    if wrapped.failures:
        logger.warning("quadrature clamped %d node(s) to the nearest valid value",
                       wrapped.failures)
    return value


def _marginal_mean(point_fn: Callable[[float, float, tuple], float],
                   mobility: MobilitySpec, *, smooth: bool,
                   tol: float = 1e-6) -> float:
    """Mean of point_fn(speed, angle, node_tag) under the mobility laws.

    Smooth integrands get adaptive Simpson (absolute error <= tol); noisy
    ones (Monte Carlo bites inside) use a fixed composite-Simpson grid with
    a deterministic node tag so per-node seeds are reproducible.
    """
    s_lo, s_hi = law_bounds(mobility.speed_law)
    a_lo, a_hi = law_bounds(mobility.angle_law)
    speed_fixed = s_lo == s_hi
    angle_fixed = a_lo == a_hi

    if speed_fixed and angle_fixed:
        return point_fn(s_lo, a_lo, ())

    if smooth:
        if angle_fixed:
            return _mean_over_interval(lambda d: point_fn(d, a_lo, ()),
                                       s_lo, s_hi, tol)
        if speed_fixed:
            return _mean_over_interval(lambda x: point_fn(s_lo, x, ()),
                                       a_lo, a_hi, tol)

        def angle_slice(x: float) -> float:
            return _mean_over_interval(lambda d: point_fn(d, x, ()),
                                       s_lo, s_hi, 0.5 * tol)

        return _mean_over_interval(angle_slice, a_lo, a_hi, 0.5 * tol)

    # Fixed-grid path.
    if angle_fixed:
        nodes = [s_lo + (s_hi - s_lo) * i / (_GRID_NODES - 1)
                 for i in range(_GRID_NODES)]
        vals = [point_fn(d, a_lo, (i,)) for i, d in enumerate(nodes)]
        return _composite_simpson_mean(vals, s_lo, s_hi)
    if speed_fixed:
        nodes = [a_lo + (a_hi - a_lo) * i / (_GRID_NODES - 1)
                 for i in range(_GRID_NODES)]
        vals = [point_fn(s_lo, x, (i,)) for i, x in enumerate(nodes)]
        return _composite_simpson_mean(vals, a_lo, a_hi)
    a_nodes = [a_lo + (a_hi - a_lo) * j / (_GRID_NODES - 1)
               for j in range(_GRID_NODES)]
    outer = []
    for j, x in enumerate(a_nodes):
        s_nodes = [s_lo + (s_hi - s_lo) * i / (_GRID_NODES - 1)
                   for i in range(_GRID_NODES)]
        inner = [point_fn(d, x, (j, i)) for i, d in enumerate(s_nodes)]
        outer.append(_composite_simpson_mean(inner, s_lo, s_hi))
    return _composite_simpson_mean(outer, a_lo, a_hi)


# ---------------------------------------------------------------------------
# Known-room probabilities


def p_rr_known(A: float, lambda_RIS: float) -> float:
    """Probability that at least one candidate lands in an area A."""
    if A < 0.0:
        raise ValueError("area must be nonnegative")
    if lambda_RIS < 0.0:
        raise ValueError("lambda_RIS must be nonnegative")
    return -math.expm1(-A * lambda_RIS)


def p_rr_with_areas(A1: float, A_extra: float, lambda_RIS: float) -> float:
    """Reassignment probability with an extra blocked bite removed from A1."""
    if A_extra < 0.0:
        raise ValueError("A_extra must be nonnegative")
    if A_extra > A1:
        raise ValueError(
            f"A_extra ({A_extra!r}) exceeds A1 ({A1!r}): inconsistent geometry")
    return p_rr_known(A1 - A_extra, lambda_RIS)


def _derived_seed(seed, *extra: int) -> tuple[int, ...]:
    base = tuple(seed) if isinstance(seed, tuple) else (seed,)
    return tuple(int(s) for s in base) + tuple(int(e) for e in extra)


def blocked_bite_area(scene: ScenarioKnown, d_U: float, xi: float, *,
                      samples: int = 2_000_000, seed=0) -> float:
    """Monte Carlo area of the visible excess region hidden by the scene's
    extra obstacles and self-blockage sector, at one displacement point."""
    g = MoveGeometry(r=scene.serving_ris_distance, d_U=d_U, xi=xi)
    R = displaced_distance(g)
    if R == 0.0:
        return 0.0
    l2, heading = displaced_position(scene.ue, scene.ris_direction,
                                     scene.orientation, d_U, xi)
    pred, bbox = visible_region_predicate(scene.enb, scene.walls, scene.ue,
                                          l2, g.r, R)
    bite = 0.0
    for i, obs in enumerate(scene.extra_obstacles):
        est = numeric_blocked_area(pred, obs, samples, bbox=bbox, origin=l2,
                                   seed=_derived_seed(seed, 1, i))
        bite += est.area
    if scene.self_block is not None and scene.self_block.theta > 0.0:
        direction = (heading if scene.self_block_direction is None
                     else scene.self_block_direction)
        sector = CircularSector(origin=l2, radius=math.inf,
                                start_angle=direction - 0.5 * scene.self_block.theta,
                                sweep=scene.self_block.theta)
        est = numeric_blocked_area(pred, sector, samples, bbox=bbox,
                                   seed=_derived_seed(seed, 2, 0))
        bite += est.area
    return bite


def _scene_has_bites(scene: ScenarioKnown) -> bool:
    return bool(scene.extra_obstacles) or (
        scene.self_block is not None and scene.self_block.theta > 0.0)


def rr_probability_known(scene: ScenarioKnown, d_U: float, xi: float, *,
                         bite_samples: int = 2_000_000, seed=0) -> float:
    """Reassignment probability at one displacement point of a known room.

    The wall shadow enters through the closed-form visible area; extra
    obstacles and the body shadow are removed as numerically estimated
    bites (the estimates are clamped into [0, A1] so sampling noise cannot
    produce an inconsistent subtraction).
    """
    if d_U == 0.0:
        return 0.0
    g = MoveGeometry(r=scene.serving_ris_distance, d_U=d_U, xi=xi)
    a1 = visible_excess_area_A1(scene, g)
    if a1 > 0.0 and _scene_has_bites(scene):
        bite = min(blocked_bite_area(scene, d_U, xi, samples=bite_samples,
                                     seed=seed), a1)
        return p_rr_with_areas(a1, bite, scene.lambda_RIS)
    return p_rr_known(a1, scene.lambda_RIS)


def p_rr_marginal(scene: ScenarioKnown, mobility: MobilitySpec, *,
                  tol: float = 1e-6, bite_samples: int = 2_000_000,
                  seed=0) -> float:
    """Reassignment probability averaged over the mobility laws.

    Point-mass laws collapse to the closed form; smooth scenes integrate
    adaptively, scenes with Monte Carlo bites use the fixed grid.
    """
    noisy = _scene_has_bites(scene)

    def point(d: float, x: float, tag: tuple) -> float:
        return rr_probability_known(scene, d, x, bite_samples=bite_samples,
                                    seed=_derived_seed(seed, *tag))

    return _marginal_mean(point, mobility, smooth=not noisy, tol=tol)


# ---------------------------------------------------------------------------
# Unknown-obstacle probabilities and rates


def p_ho(s: ScenarioUnknown, d_U: float, xi: float) -> float:
    """Handover probability: at least one unblocked base station inside the
    displaced coverage disk. Zero displacement means no new candidates at
    all, so the probability is exactly zero there."""
    if d_U == 0.0:
        return 0.0
    R = displaced_distance(MoveGeometry(r=s.r_eNB, d_U=d_U, xi=xi))
    pz = p_not_blocked_Z(s.obstacle_model, s.self_block, s.R_LoS)
    return -math.expm1(-pz * s.lambda_eNB * math.pi * R * R)


def p_rr_unknown(s: ScenarioUnknown, d_U: float, xi: float) -> float:
    """Reassignment probability in the unknown-obstacle model; same shape as
    p_ho with the reflective-node density and radius."""
    if d_U == 0.0:
        return 0.0
    R = displaced_distance(MoveGeometry(r=s.r_RIS, d_U=d_U, xi=xi))
    pz = p_not_blocked_Z(s.obstacle_model, s.self_block, s.R_LoS)
    return -math.expm1(-pz * s.lambda_RIS * math.pi * R * R)


def marginal_p_ho(s: ScenarioUnknown, tol: float = 1e-6) -> float:
    return _marginal_mean(lambda d, x, tag: p_ho(s, d, x), s.mobility,
                          smooth=True, tol=tol)


def marginal_p_rr_unknown(s: ScenarioUnknown, tol: float = 1e-6) -> float:
    return _marginal_mean(lambda d, x, tag: p_rr_unknown(s, d, x), s.mobility,
                          smooth=True, tol=tol)


def ho_rate(s: ScenarioUnknown, sig: SignalingConfig) -> float:
    """Expected handover initiations per unit time, summed over SGWs."""
    return sum(sig.sgw_rates) * marginal_p_ho(s)


def rr_rate(s: ScenarioUnknown, sig: SignalingConfig) -> float:
    """Expected reassignment initiations per unit time, over RIS managers."""
    return sum(sig.rism_rates) * marginal_p_rr_unknown(s)


def signaling_rate(s: ScenarioUnknown, sig: SignalingConfig) -> RateReport:
    """Total signaling rate: basic per-session signaling plus success-gated
    mobility overhead."""
    ph = marginal_p_ho(s)
    pr = marginal_p_rr_unknown(s)
    e_ho = sum(sig.sgw_rates) * ph
    e_rr = sum(sig.rism_rates) * pr
    e_sb = sum(sig.sgw_rates) + sum(sig.rism_rates)
    e_so = e_ho + e_rr
    e_gamma = e_sb + sig.p_a * e_so
    expanded = ((1.0 + ph) * sum(sig.sgw_rates)
                + (1.0 + pr) * sum(sig.rism_rates)) * (1.0 + sig.p_a)
    return RateReport(p_rr=pr, p_ho=ph, e_rr=e_rr, e_ho=e_ho, e_sb=e_sb,
                      e_so=e_so, e_gamma=e_gamma, e_gamma_expanded=expanded)


def _normalize_kind(kind: str) -> str:
    k = kind.strip().lower().replace("_", "-")
    if k in ("ris-m", "rism"):
        return "rism"
    if k == "sgw":
        return "sgw"
    raise ValueError(f"unknown server kind {kind!r}; expected RIS-M or SGW")


def class_load(s: ScenarioUnknown, sig: SignalingConfig, kind: str) -> float:
    """Total signaling load attributed to one server class: basic sessions
    plus the success-gated overhead of the event kind the class owns
    (handover for SGW, reassignment for RIS-M)."""
    k = _normalize_kind(kind)
    if k == "rism":
        return sum(sig.rism_rates) * (1.0 + sig.p_a * marginal_p_rr_unknown(s))
    return sum(sig.sgw_rates) * (1.0 + sig.p_a * marginal_p_ho(s))


def dimension_servers(target_capacity: float, s: ScenarioUnknown,
                      sig: SignalingConfig, kind: str) -> int:
    """Smallest server count keeping the per-server load share under the
    capacity, with the class total split uniformly."""
    if target_capacity <= 0.0:
        raise ValueError("target_capacity must be positive")
    total = class_load(s, sig, kind)
    if not math.isfinite(total):
        raise ValueError("class load is not finite; no server count suffices")
    if total == 0.0:
        return 1
    return max(1, math.ceil(total / target_capacity - 1e-12))
