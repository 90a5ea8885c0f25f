"""Parameter search over the key-rate surface.

Best source intensity at a fixed distance (deterministic grid plus
golden-section refinement by default, with a pure golden-section mode
and a seeded genetic algorithm for cross-checking), maximum reachable
distance at a fixed intensity, and grid sweeps for curve generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .detectors import SystemParams
from .rates import RatePoint, at_distance, at_intensity, key_rate

__all__ = [
    "SweepVariable",
    "SweepSpec",
    "OptResult",
    "sweep",
    "optimize_mu",
    "max_distance",
]

METHODS = ("grid", "golden", "genetic")

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_GRID_POINTS = 61
_GOLDEN_TOL = 1e-6
_GA_POPULATION = 32
_GA_GENERATIONS = 60
_GA_TOURNAMENT = 3
_GA_ELITE = 2
_GA_SIGMA = 0.05
_SCAN_STEP_KM = 20.0


class SweepVariable(Enum):
    DISTANCE = "L"
    MU = "mu"


@dataclass(frozen=True)
class SweepSpec:
    """Grid description: sweep ``variable`` from lo to hi in steps of
    ``step``, holding the other parameters of ``fixed``."""

    variable: SweepVariable
    lo: float
    hi: float
    step: float
    fixed: SystemParams

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step!r}")
        if self.hi < self.lo:
            raise ValueError(f"hi must be >= lo, got [{self.lo!r}, {self.hi!r}]")

    def values(self) -> list[float]:
        # Relative epsilon so that e.g. (0.3 - 0.0) / 0.1 lands on 3 points.
        n = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return [self.lo + k * self.step for k in range(n)]


@dataclass(frozen=True)
class OptResult:
    best_mu: float
    best_rate: float
    evaluations: int
    method: str


def sweep(spec: SweepSpec) -> list[RatePoint]:
    """Evaluate the rate at every grid value, in grid order."""
    points = []
    for value in spec.values():
        if spec.variable is SweepVariable.DISTANCE:
            sp = at_distance(spec.fixed, value)
        else:
            sp = at_intensity(spec.fixed, value)
        points.append(key_rate(sp))
    return points


def _golden_section(rate, lo: float, hi: float, tol: float) -> tuple[float, float, int]:
    """Golden-section maximization of a unimodal function on [lo, hi]."""
    evaluations = 0
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = rate(x1), rate(x2)
    evaluations += 2
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = rate(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = rate(x1)
        evaluations += 1
    best = x1 if f1 >= f2 else x2
    return best, max(f1, f2), evaluations


def optimize_mu(
    l_km: float,
    sp: SystemParams,
    bounds: tuple[float, float] = (0.1, 2.0),
    method: str = "grid",
    seed: int = 7,
) -> OptResult:
    """Source intensity maximizing the key rate at ``l_km``.

    Ties break toward the lower intensity (the ascending grid keeps the
    first maximum, and a refinement result is adopted only when it is
    strictly better).
    """
    mu_lo, mu_hi = bounds
    if not 0.0 < mu_lo < mu_hi:
        raise ValueError(f"bounds must satisfy 0 < lo < hi, got {bounds!r}")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")

    base = at_distance(sp, l_km)

    def rate(mu: float) -> float:
        return key_rate(at_intensity(base, mu)).r

    if method == "golden":
        best_mu, best_rate, evaluations = _golden_section(rate, mu_lo, mu_hi, _GOLDEN_TOL)
        return OptResult(best_mu=best_mu, best_rate=best_rate, evaluations=evaluations, method=method)

    if method == "genetic":
        rng = np.random.default_rng(seed)
        evaluations = 0

        def fitness(pop: np.ndarray) -> np.ndarray:
            nonlocal evaluations
            evaluations += len(pop)
            return np.array([rate(mu) for mu in pop])

        pop = mu_lo + (mu_hi - mu_lo) * rng.random(_GA_POPULATION)
        fit = fitness(pop)
        for _ in range(_GA_GENERATIONS):
            order = np.argsort(-fit, kind="stable")
            pop, fit = pop[order], fit[order]
            children = list(pop[:_GA_ELITE])
            while len(children) < _GA_POPULATION:
                picks = rng.integers(0, _GA_POPULATION, size=_GA_TOURNAMENT)
                p1 = pop[picks.min()]
                picks = rng.integers(0, _GA_POPULATION, size=_GA_TOURNAMENT)
                p2 = pop[picks.min()]
                blend = rng.random()
                child = blend * p1 + (1.0 - blend) * p2 + rng.normal(0.0, _GA_SIGMA)
                children.append(min(mu_hi, max(mu_lo, child)))
            pop = np.array(children)
            fit = fitness(pop)
        best = int(np.argmax(fit))
        return OptResult(
            best_mu=float(pop[best]),
            best_rate=float(fit[best]),
            evaluations=evaluations,
            method=method,
        )

    # Default: ascending coarse grid, then golden-section refinement in
    # the bracketing interval.
    step = (mu_hi - mu_lo) / (_GRID_POINTS - 1)
    best_mu, best_rate = mu_lo, rate(mu_lo)
    evaluations = 1
    for k in range(1, _GRID_POINTS):
        mu = mu_lo + k * step
        r = rate(mu)
        evaluations += 1
        if r > best_rate:
            best_mu, best_rate = mu, r
    lo = max(mu_lo, best_mu - step)
    hi = min(mu_hi, best_mu + step)
    refined_mu, refined_rate, extra = _golden_section(rate, lo, hi, _GOLDEN_TOL)
    evaluations += extra
    if refined_rate > best_rate:
        best_mu, best_rate = refined_mu, refined_rate
    return OptResult(best_mu=best_mu, best_rate=best_rate, evaluations=evaluations, method="grid")


def max_distance(
    mu: float,
    sp: SystemParams,
    l_hi: float = 1000.0,
    event: int | None = None,
    tol_km: float = 0.1,
) -> float:
    """Largest distance with a positive (per-event) key rate.

    The positive-rate region can be an interior window of [0, l_hi]
    (at high intensity the even-parity phase error kills the rate at
    short distance too), so a coarse scan first locates any positive
    point, then bisection sharpens the upper edge. The clamped rates
    are exact zeros beyond the edge, so the predicate is exact
    positivity. Raises when no positive point exists on the scan grid
    or the rate is still positive at ``l_hi``.
    """
    if event not in (None, 1, 2, 3):
        raise ValueError(f"event must be None, 1, 2, or 3, got {event!r}")
    if l_hi <= 0:
        raise ValueError(f"l_hi must be positive, got {l_hi!r}")
    base = at_intensity(sp, mu)

    def rate(l_km: float) -> float:
        point = key_rate(at_distance(base, l_km))
        return point.r if event is None else point.r_events[event - 1]

    if rate(l_hi) > 0.0:
        raise ValueError(f"rate still positive at l_hi={l_hi!r} km; raise l_hi")

    n_scan = int(math.ceil(l_hi / _SCAN_STEP_KM))
    grid = [k * l_hi / n_scan for k in range(n_scan + 1)]
    lo = None
    for g in grid:
        if rate(g) > 0.0:
            lo = g
        elif lo is not None:
            hi = g
            break
    if lo is None:
        raise ValueError(f"key rate is zero everywhere on [0, {l_hi!r}] km")

    while hi - lo > tol_km:
        mid = 0.5 * (lo + hi)
        if rate(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    # the positive end of the bracket: rate(result) > 0 >= rate(result + tol)
    return lo
