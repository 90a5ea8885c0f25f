"""Round-by-round stochastic simulation of the full protocol.

This is the oracle for the analytic gains and error rates. Coherent
states remain coherent through the beam splitter network, so each
detector sees an independent Poisson photon count with mean equal to
its mode intensity, plus an independent dark count. Rounds are
processed in fixed-size blocks, each drawing from a stream seeded by
(seed, block index), so reports are bit-identical for any worker count.
Attack randomness lives on a separate per-block stream: paired runs
with the same seed see identical protocol randomness whether or not an
attack is active.

Basis handling follows the protocol: both senders choose the X basis
with probability ``basis_policy``; rounds with differing bases are
discarded, Z rounds are sifted out of the key and contribute only to
checking statistics, and a configurable fraction of X key events is
sacrificed for checking.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .attack import TapParams, ie_dual
from .detectors import (
    ClickParity,
    Detector,
    SystemParams,
    exclusive_double_click,
    exclusive_single_click,
)
from .optics import PolPairing, detector_amplitudes, intensities
from .rates import event1_rates, event2_rates, event3_rates

__all__ = [
    "SimConfig",
    "SimReport",
    "simulate",
    "simulate_beam_split",
    "simulate_dishonest_bob",
    "compare_to_analytic",
    "max_abs_sigma",
]

ATTACKS = ("none", "beam_split", "dishonest_bob")

_BLOCK = 500_000
_SQRT2 = math.sqrt(2.0)

# Double-click patterns as (name, H detector, V detector, event class).
_DOUBLE_PATTERNS = (
    ("h1v1", Detector.D1H, Detector.D1V, 2),
    ("h2v2", Detector.D2H, Detector.D2V, 2),
    ("h1v2", Detector.D1H, Detector.D2V, 3),
    ("h2v1", Detector.D2H, Detector.D1V, 3),
)

# Representative encodings tallied for parity statistics, keyed by the
# 4-bit id (ka_ph, ka_pol, kb_ph, kb_pol).
_REPS = (("plus_plus", 0b0000), ("plus_minus", 0b0001))

_SINGLE_CELLS = ("odd", "even")
_DOUBLE_CELLS = ("oo", "oe", "eo", "ee")


@dataclass(frozen=True)
class SimConfig:
    """One simulation request.

    basis_policy is the probability that a sender picks the X basis;
    check_fraction the fraction of X key events sacrificed for
    checking; flip_fraction the dishonest receiver's announcement flip
    probability (used only when attack="dishonest_bob").
    """

    sp: SystemParams
    rounds: int
    seed: int
    basis_policy: float = 0.5
    check_fraction: float = 0.0
    attack: str = "none"
    flip_fraction: float = 0.0

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds!r}")
        if not 0.0 <= self.basis_policy <= 1.0:
            raise ValueError(f"basis_policy must be in [0, 1], got {self.basis_policy!r}")
        if not 0.0 <= self.check_fraction <= 1.0:
            raise ValueError(f"check_fraction must be in [0, 1], got {self.check_fraction!r}")
        if self.attack not in ATTACKS:
            raise ValueError(f"attack must be one of {ATTACKS}, got {self.attack!r}")
        if not 0.0 <= self.flip_fraction <= 1.0:
            raise ValueError(f"flip_fraction must be in [0, 1], got {self.flip_fraction!r}")


@dataclass(frozen=True)
class SimReport:
    """Tally counts of one simulation, plus the configuration echo.

    All fields are integer counts except the echoed configuration;
    derived frequencies live in ``to_dict()`` so that merging and
    comparisons stay exact.
    """

    rounds: int
    seed: int
    basis_policy: float
    check_fraction: float
    attack: str
    flip_fraction: float
    mu: float
    alpha: float
    l_km: float
    eta_d: float
    p_d: float
    f: float
    n_xx: int
    n_zz: int
    n_mixed: int
    n_event1: int
    n_event2: int
    n_event3: int
    n_fail_xx: int
    n_err1_ph: int
    n_err2_ph: int
    n_err2_pol: int
    n_err3_ph: int
    n_err3_pol: int
    n_check_x_bits: int
    n_check_x_err: int
    n_check_z_bits: int
    n_check_z_err: int
    n_key_events: int
    n_eve_success: int
    parity: dict

    def system_params(self) -> SystemParams:
        return SystemParams(
            mu=self.mu,
            alpha=self.alpha,
            l_km=self.l_km,
            eta_d=self.eta_d,
            p_d=self.p_d,
            f=self.f,
        )

    def to_dict(self) -> dict:
        """JSON-ready view with stable key order and derived frequencies."""

        def ratio(k: int, n: int) -> float | None:
            return k / n if n > 0 else None

        def se(k: int, n: int) -> float | None:
            if n <= 0:
                return None
            p = k / n
            return math.sqrt(p * (1.0 - p) / n)

        counts = {
            "n_xx": self.n_xx,
            "n_zz": self.n_zz,
            "n_mixed": self.n_mixed,
            "n_event1": self.n_event1,
            "n_event2": self.n_event2,
            "n_event3": self.n_event3,
            "n_fail_xx": self.n_fail_xx,
            "n_err1_ph": self.n_err1_ph,
            "n_err2_ph": self.n_err2_ph,
            "n_err2_pol": self.n_err2_pol,
            "n_err3_ph": self.n_err3_ph,
            "n_err3_pol": self.n_err3_pol,
            "n_check_x_bits": self.n_check_x_bits,
            "n_check_x_err": self.n_check_x_err,
            "n_check_z_bits": self.n_check_z_bits,
            "n_check_z_err": self.n_check_z_err,
            "n_key_events": self.n_key_events,
            "n_eve_success": self.n_eve_success,
        }
        rates = {
            "q_event1": ratio(self.n_event1, self.n_xx),
            "q_event1_se": se(self.n_event1, self.n_xx),
            "q_event2": ratio(self.n_event2, self.n_xx),
            "q_event2_se": se(self.n_event2, self.n_xx),
            "q_event3": ratio(self.n_event3, self.n_xx),
            "q_event3_se": se(self.n_event3, self.n_xx),
            "qber_event1_ph": ratio(self.n_err1_ph, self.n_event1),
            "qber_event2_ph": ratio(self.n_err2_ph, self.n_event2),
            "qber_event2_pol": ratio(self.n_err2_pol, self.n_event2),
            "qber_event2_bit": ratio(self.n_err2_ph + self.n_err2_pol, 2 * self.n_event2),
            "qber_event3_ph": ratio(self.n_err3_ph, self.n_event3),
            "qber_event3_pol": ratio(self.n_err3_pol, self.n_event3),
            "qber_event3_bit": ratio(self.n_err3_ph + self.n_err3_pol, 2 * self.n_event3),
            "qber_check_x": ratio(self.n_check_x_err, self.n_check_x_bits),
            "qber_check_z": ratio(self.n_check_z_err, self.n_check_z_bits),
            "eve_leak_fraction": ratio(self.n_eve_success, self.n_key_events),
        }
        return {
            "config": {
                "rounds": self.rounds,
                "seed": self.seed,
                "basis_policy": self.basis_policy,
                "check_fraction": self.check_fraction,
                "attack": self.attack,
                "flip_fraction": self.flip_fraction,
                "mu": self.mu,
                "alpha": self.alpha,
                "l_km": self.l_km,
                "eta_d": self.eta_d,
                "p_d": self.p_d,
                "f": self.f,
            },
            "counts": counts,
            "rates": rates,
            "parity": self.parity,
        }


def _block_tallies(cfg: SimConfig, block: int, size: int) -> dict[str, int]:
    """Simulate one block of rounds and return flat integer tallies.

    The draw order from the protocol stream is fixed (bases, bits,
    photons, darks, check lottery) so that tallies depend only on
    (seed, block, size), never on the attack setting.
    """
    sp = cfg.sp
    rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(0, block)))
    attack_rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(1, block)))

    basis_a = rng.random(size) < cfg.basis_policy
    basis_b = rng.random(size) < cfg.basis_policy
    ka_ph = rng.integers(0, 2, size=size, dtype=np.int8)
    ka_pol = rng.integers(0, 2, size=size, dtype=np.int8)
    kb_ph = rng.integers(0, 2, size=size, dtype=np.int8)
    kb_pol = rng.integers(0, 2, size=size, dtype=np.int8)

    root_x = math.sqrt(sp.mu_arm / 2.0)
    root_z = math.sqrt(sp.mu_arm)
    s_a = 1.0 - 2.0 * ka_ph
    p_a = 1.0 - 2.0 * ka_pol
    s_b = 1.0 - 2.0 * kb_ph
    p_b = 1.0 - 2.0 * kb_pol
    a_h = np.where(basis_a, s_a * root_x, np.where(ka_pol == 0, s_a * root_z, 0.0))
    a_v = np.where(basis_a, s_a * p_a * root_x, np.where(ka_pol == 1, s_a * root_z, 0.0))
    b_h = np.where(basis_b, s_b * root_x, np.where(kb_pol == 0, s_b * root_z, 0.0))
    b_v = np.where(basis_b, s_b * p_b * root_x, np.where(kb_pol == 1, s_b * root_z, 0.0))

    h1 = (a_h + b_h) / _SQRT2
    h2 = (a_h - b_h) / _SQRT2
    v1 = (a_v + b_v) / _SQRT2
    v2 = (a_v - b_v) / _SQRT2
    lam = np.stack((h1 * h1, h2 * h2, v1 * v1, v2 * v2), axis=1)

    photons = rng.poisson(lam)
    dark = rng.random((size, 4)) < sp.p_d
    check_draw = rng.random(size)

    flip_ph = flip_pol = eve_draw = None
    if cfg.attack == "dishonest_bob":
        flip_ph = attack_rng.random(size) < cfg.flip_fraction
        flip_pol = attack_rng.random(size) < cfg.flip_fraction
    elif cfg.attack == "beam_split":
        leak = ie_dual(TapParams(mu=sp.mu, eta_t=sp.eta_t))
        eve_draw = attack_rng.random(size) < leak

    clicks = (photons > 0) | dark
    n_click = clicks.sum(axis=1)
    c_h1, c_h2 = clicks[:, 0], clicks[:, 1]
    c_v1, c_v2 = clicks[:, 2], clicks[:, 3]
    ev1 = (n_click == 1) & (c_h1 | c_h2)
    ev2 = (n_click == 2) & ((c_h1 & c_v1) | (c_h2 & c_v2))
    ev3 = (n_click == 2) & ((c_h1 & c_v2) | (c_h2 & c_v1))
    any_event = ev1 | ev2 | ev3

    xx = basis_a & basis_b
    zz = ~basis_a & ~basis_b

    # Charlie announces the phase relation from the H-detector index and
    # the polarization relation from the pattern class.
    kc_ph = c_h2
    t_ph = (ka_ph ^ kb_ph).astype(bool)
    t_pol = (ka_pol ^ kb_pol).astype(bool)
    err_ph = kc_ph ^ t_ph
    err_pol2 = t_pol
    err_pol3 = ~t_pol

    x1, x2, x3 = xx & ev1, xx & ev2, xx & ev3
    t: dict[str, int] = {}
    t["n_xx"] = int(xx.sum())
    t["n_zz"] = int(zz.sum())
    t["n_mixed"] = size - t["n_xx"] - t["n_zz"]
    t["n_event1"] = int(x1.sum())
    t["n_event2"] = int(x2.sum())
    t["n_event3"] = int(x3.sum())
    t["n_fail_xx"] = t["n_xx"] - t["n_event1"] - t["n_event2"] - t["n_event3"]
    t["n_err1_ph"] = int((x1 & err_ph).sum())
    t["n_err2_ph"] = int((x2 & err_ph).sum())
    t["n_err2_pol"] = int((x2 & err_pol2).sum())
    t["n_err3_ph"] = int((x3 & err_ph).sum())
    t["n_err3_pol"] = int((x3 & err_pol3).sum())

    # Announced-bit comparisons: a dishonest receiver flips the bits he
    # announces, which shows up only in the checking tallies.
    if flip_ph is None:
        obs_ph, obs_pol2, obs_pol3 = err_ph, err_pol2, err_pol3
    else:
        obs_ph = err_ph ^ flip_ph
        obs_pol2 = err_pol2 ^ flip_pol
        obs_pol3 = err_pol3 ^ flip_pol

    checked = xx & any_event & (check_draw < cfg.check_fraction)
    chk1, chk2, chk3 = checked & ev1, checked & ev2, checked & ev3
    t["n_check_x_bits"] = int(chk1.sum()) + 2 * int(chk2.sum()) + 2 * int(chk3.sum())
    t["n_check_x_err"] = (
        int((chk1 & obs_ph).sum())
        + int((chk2 & obs_ph).sum())
        + int((chk2 & obs_pol2).sum())
        + int((chk3 & obs_ph).sum())
        + int((chk3 & obs_pol3).sum())
    )

    # Z-basis checking where the inference is well defined: both senders
    # sent the H polarization mode, so a lone H click carries the phase
    # relation exactly as in the X basis.
    zc = zz & ev1 & (ka_pol == 0) & (kb_pol == 0)
    t["n_check_z_bits"] = int(zc.sum())
    t["n_check_z_err"] = int((zc & obs_ph).sum())

    key = xx & any_event & ~checked
    t["n_key_events"] = int(key.sum())
    t["n_eve_success"] = int((key & eve_draw).sum()) if eve_draw is not None else 0

    even = (photons % 2) == 0
    enc = (
        (ka_ph.astype(np.int16) << 3)
        | (ka_pol.astype(np.int16) << 2)
        | (kb_ph.astype(np.int16) << 1)
        | kb_pol.astype(np.int16)
    )
    for rep_name, rep_id in _REPS:
        sel = xx & (enc == rep_id)
        t[f"par_{rep_name}_n"] = int(sel.sum())
        for det_name, det in (("h1", Detector.D1H), ("h2", Detector.D2H)):
            mask = sel & ev1 & clicks[:, det]
            n_even = int((mask & even[:, det]).sum())
            t[f"par_{rep_name}_{det_name}_even"] = n_even
            t[f"par_{rep_name}_{det_name}_odd"] = int(mask.sum()) - n_even
        for pat_name, det_h, det_v, event_class in _DOUBLE_PATTERNS:
            ev = ev2 if event_class == 2 else ev3
            mask = sel & ev & clicks[:, det_h]
            idx = even[mask, det_h].astype(np.int8) * 2 + even[mask, det_v].astype(np.int8)
            cells = np.bincount(idx, minlength=4)
            for cell_idx, cell in enumerate(_DOUBLE_CELLS):
                t[f"par_{rep_name}_{pat_name}_{cell}"] = int(cells[cell_idx])
    return t


def _merge(tallies: list[dict[str, int]]) -> dict[str, int]:
    total: dict[str, int] = dict(tallies[0])
    for t in tallies[1:]:
        for k, v in t.items():
            total[k] += v
    return total


def simulate(config: SimConfig, threads: int = 1) -> SimReport:
    """Run the simulation and return aggregated tallies.

    ``threads`` only controls execution; the report is bit-identical
    for any value because blocks are seeded by index and merged with
    integer sums.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads!r}")
    sizes = []
    remaining = config.rounds
    while remaining > 0:
        sizes.append(min(_BLOCK, remaining))
        remaining -= _BLOCK
    blocks = list(enumerate(sizes))
    if threads == 1 or len(blocks) == 1:
        tallies = [_block_tallies(config, b, s) for b, s in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tallies = list(pool.map(lambda bs: _block_tallies(config, bs[0], bs[1]), blocks))
    total = _merge(tallies)

    parity: dict[str, dict] = {}
    for rep_name, _ in _REPS:
        rep: dict[str, object] = {"n": total[f"par_{rep_name}_n"]}
        for det_name in ("h1", "h2"):
            rep[det_name] = {
                cell: total[f"par_{rep_name}_{det_name}_{cell}"] for cell in _SINGLE_CELLS
            }
        for pat_name, _, _, _ in _DOUBLE_PATTERNS:
            rep[pat_name] = {
                cell: total[f"par_{rep_name}_{pat_name}_{cell}"] for cell in _DOUBLE_CELLS
            }
        parity[rep_name] = rep

    sp = config.sp
    return SimReport(
        rounds=config.rounds,
        seed=config.seed,
        basis_policy=config.basis_policy,
        check_fraction=config.check_fraction,
        attack=config.attack,
        flip_fraction=config.flip_fraction,
        mu=sp.mu,
        alpha=sp.alpha,
        l_km=sp.l_km,
        eta_d=sp.eta_d,
        p_d=sp.p_d,
        f=sp.f,
        n_xx=total["n_xx"],
        n_zz=total["n_zz"],
        n_mixed=total["n_mixed"],
        n_event1=total["n_event1"],
        n_event2=total["n_event2"],
        n_event3=total["n_event3"],
        n_fail_xx=total["n_fail_xx"],
        n_err1_ph=total["n_err1_ph"],
        n_err2_ph=total["n_err2_ph"],
        n_err2_pol=total["n_err2_pol"],
        n_err3_ph=total["n_err3_ph"],
        n_err3_pol=total["n_err3_pol"],
        n_check_x_bits=total["n_check_x_bits"],
        n_check_x_err=total["n_check_x_err"],
        n_check_z_bits=total["n_check_z_bits"],
        n_check_z_err=total["n_check_z_err"],
        n_key_events=total["n_key_events"],
        n_eve_success=total["n_eve_success"],
        parity=parity,
    )


def simulate_beam_split(config: SimConfig, threads: int = 1) -> SimReport:
    """Run with the beam-splitting eavesdropper sampling enabled."""
    return simulate(replace(config, attack="beam_split"), threads=threads)


def simulate_dishonest_bob(config: SimConfig, threads: int = 1) -> SimReport:
    """Run with the dishonest receiver flipping announced bits."""
    return simulate(replace(config, attack="dishonest_bob"), threads=threads)


def _sigma(count: int, n: int, p: float) -> float:
    """Binomial sigma-delta of an observed count against expectation n*p."""
    expected = n * p
    variance = n * p * (1.0 - p)
    if variance <= 0.0:
        return 0.0 if count == round(expected) else math.inf
    return (count - expected) / math.sqrt(variance)


def compare_to_analytic(report: SimReport) -> list[dict]:
    """Count-space comparison rows between the report and the closed forms.

    Each row holds the observed count, the trial count, the analytic
    probability, and the deviation in binomial standard errors. Gains
    and QBERs test the rate formulas; parity cells test the exclusive
    click probabilities at the two representative encodings; the Eve
    row (beam-split runs only) tests the leakage bound.
    """
    sp = report.system_params()
    rows: list[dict] = []

    def add(name: str, count: int, n: int, p: float) -> None:
        rows.append(
            {
                "name": name,
                "count": count,
                "n": n,
                "p_analytic": p,
                "expected": n * p,
                "sigma": _sigma(count, n, p),
            }
        )

    e1, e2, e3 = event1_rates(sp), event2_rates(sp), event3_rates(sp)
    add("q_event1", report.n_event1, report.n_xx, e1.q)
    add("q_event2", report.n_event2, report.n_xx, e2.q)
    add("q_event3", report.n_event3, report.n_xx, e3.q)

    # Per-DOF QBER closed forms in the shorthand of the rates module:
    # a wrong H index is dark-driven (v / (u+v)); a wrong pattern class
    # swaps lit and unlit detectors (2uv / (u+v)^2). Their per-event
    # average reproduces e_bit of the double-click events.
    i = sp.mu_arm
    u = math.expm1(i) + sp.p_d
    v = sp.p_d
    s = u + v
    p_wrong_h = v / s if s > 0 else 0.0
    p_wrong_pat = 2.0 * u * v / s ** 2 if s > 0 else 0.0
    add("qber_event1_ph", report.n_err1_ph, report.n_event1, p_wrong_h)
    add("qber_event2_ph", report.n_err2_ph, report.n_event2, p_wrong_h)
    add("qber_event2_pol", report.n_err2_pol, report.n_event2, p_wrong_pat)
    add("qber_event3_ph", report.n_err3_ph, report.n_event3, p_wrong_h)
    add("qber_event3_pol", report.n_err3_pol, report.n_event3, p_wrong_pat)

    pairings = {
        "plus_plus": PolPairing.PLUS_PLUS,
        "plus_minus": PolPairing.PLUS_MINUS,
    }
    for rep_name, pairing in pairings.items():
        ints = intensities(detector_amplitudes(pairing.representative(), sp.mu_arm))
        cells = report.parity[rep_name]
        n_enc = cells["n"]
        for det_name, det in (("h1", Detector.D1H), ("h2", Detector.D2H)):
            for cell, parity in (("odd", ClickParity.ODD), ("even", ClickParity.EVEN)):
                p = exclusive_single_click(det, parity, ints, sp.p_d)
                add(f"parity_{rep_name}_{det_name}_{cell}", cells[det_name][cell], n_enc, p)
        for pat_name, det_h, det_v, _ in _DOUBLE_PATTERNS:
            for cell in _DOUBLE_CELLS:
                par_h = ClickParity.ODD if cell[0] == "o" else ClickParity.EVEN
                par_v = ClickParity.ODD if cell[1] == "o" else ClickParity.EVEN
                p = exclusive_double_click((det_h, det_v), (par_h, par_v), ints, sp.p_d)
                add(f"parity_{rep_name}_{pat_name}_{cell}", cells[pat_name][cell], n_enc, p)

    if report.attack == "beam_split":
        leak = ie_dual(TapParams(mu=sp.mu, eta_t=sp.eta_t))
        add("eve_leak", report.n_eve_success, report.n_key_events, leak)
    return rows


def max_abs_sigma(rows: list[dict]) -> float:
    """Largest absolute sigma-delta across comparison rows."""
    return max(abs(row["sigma"]) for row in rows)
