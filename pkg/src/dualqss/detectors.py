"""Threshold-detector response model for the middle node's four detectors.

Each detector sees an independent Poisson photon count with mean equal
to its mode intensity, plus an independent dark count with probability
p_d per gate. A clicked detector is classified Even when its photon
count is even (a dark-count click on vacuum counts as Even, since zero
is even) and Odd otherwise; the Even class is the one that corrupts the
interference-based inference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterable

from .optics import ModeIntensities, poisson_even_mass, poisson_odd_mass

__all__ = [
    "Detector",
    "ClickParity",
    "SystemParams",
    "click_prob",
    "exclusive_single_click",
    "exclusive_double_click",
    "exclusive_pattern_prob",
]


class Detector(IntEnum):
    """Detector indices in the fixed order used by ModeIntensities."""

    D1H = 0
    D2H = 1
    D1V = 2
    D2V = 3


class ClickParity(Enum):
    ODD = "odd"
    EVEN = "even"


@dataclass(frozen=True)
class SystemParams:
    """Physical and protocol parameters of one configuration.

    mu      source mean photon number per pulse
    alpha   fiber attenuation in dB/km
    l_km    total distance between the two senders
    eta_d   detector efficiency
    p_d     dark count probability per detector per gate
    f       error-correction inefficiency (>= 1)
    """

    mu: float = 0.84
    alpha: float = 0.2
    l_km: float = 100.0
    eta_d: float = 0.145
    p_d: float = 8e-8
    f: float = 1.15

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ValueError(f"mu must be non-negative, got {self.mu!r}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha!r}")
        if self.l_km < 0:
            raise ValueError(f"l_km must be non-negative, got {self.l_km!r}")
        if not 0.0 <= self.eta_d <= 1.0:
            raise ValueError(f"eta_d must be in [0, 1], got {self.eta_d!r}")
        if not 0.0 <= self.p_d <= 1.0:
            raise ValueError(f"p_d must be in [0, 1], got {self.p_d!r}")
        if self.f < 1.0:
            raise ValueError(f"f must be >= 1, got {self.f!r}")

    @property
    def eta_t(self) -> float:
        """End-to-end per-arm efficiency eta_d * 10^(-alpha l / 20).

        Each sender's pulse travels half the total distance, hence the
        20 in the exponent; detector efficiency is merged in.
        """
        return self.eta_d * 10.0 ** (-self.alpha * self.l_km / 20.0)

    @property
    def mu_arm(self) -> float:
        """Mean photon number of one sender's pulse at the beam splitter."""
        return self.eta_t * self.mu


def click_prob(i: float, p_d: float) -> float:
    """Probability that a threshold detector clicks: 1 - (1 - p_d) e^-i."""
    if i < 0:
        raise ValueError(f"intensity must be non-negative, got {i!r}")
    return -math.expm1(-i) + p_d * math.exp(-i)


def _no_click_prob(i: float, p_d: float) -> float:
    return (1.0 - p_d) * math.exp(-i)


def _classified_click_mass(i: float, parity: ClickParity | None, p_d: float) -> float:
    """Click probability of one detector restricted to a parity class.

    Even collects even photon numbers >= 2 plus the vacuum-with-dark
    term; Odd collects odd photon numbers; None means any click.
    """
    if parity is ClickParity.EVEN:
        return poisson_even_mass(i) + p_d * math.exp(-i)
    if parity is ClickParity.ODD:
        return poisson_odd_mass(i)
    return click_prob(i, p_d)


def exclusive_single_click(
    target: Detector,
    parity: ClickParity | None,
    ints: ModeIntensities,
    p_d: float,
) -> float:
    """Probability that exactly ``target`` clicks, in the given parity class.

    ``parity=None`` accepts any click. The three other detectors must
    register neither photons nor dark counts.
    """
    vec = ints.as_tuple()
    others = 1.0
    for d in range(4):
        if d != target:
            others *= _no_click_prob(vec[d], p_d)
    return others * _classified_click_mass(vec[target], parity, p_d)


def exclusive_double_click(
    targets: tuple[Detector, Detector],
    parities: tuple[ClickParity | None, ClickParity | None],
    ints: ModeIntensities,
    p_d: float,
) -> float:
    """Probability that exactly the two target detectors click with the
    given parity classes."""
    t1, t2 = targets
    if t1 == t2:
        raise ValueError("double-click targets must be distinct detectors")
    vec = ints.as_tuple()
    others = 1.0
    for d in range(4):
        if d not in (t1, t2):
            others *= _no_click_prob(vec[d], p_d)
    return (
        others
        * _classified_click_mass(vec[t1], parities[0], p_d)
        * _classified_click_mass(vec[t2], parities[1], p_d)
    )


def exclusive_pattern_prob(
    clicked: Iterable[Detector],
    ints: ModeIntensities,
    p_d: float,
) -> float:
    """Probability that exactly the given detector subset clicks (any parity).

    Detectors are independent, so the pattern probability factorizes
    into per-detector click / no-click terms.
    """
    clicked_set = set()
    for d in clicked:
        if isinstance(d, bool) or not 0 <= int(d) <= 3:
            raise ValueError(f"clicked must contain detector indices, got {d!r}")
        clicked_set.add(int(d))
    vec = ints.as_tuple()
    prob = 1.0
    for d in range(4):
        if d in clicked_set:
            prob *= click_prob(vec[d], p_d)
        else:
            prob *= _no_click_prob(vec[d], p_d)
    return prob
