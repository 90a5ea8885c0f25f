"""Command-line interface emitting reproducible CSV and JSON outputs.

Commands: sweep (rate curves as CSV), ie-compare (sweep with the four
leakage columns), optimize (best intensity), max-distance, thresholds,
and simulate (Monte-Carlo run with analytic comparison). A flat
key=value config file can preload any flag; explicit flags win. Output
files are written atomically. The DUALQSS_THREADS environment variable
sets the simulation worker count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from .attack import TapParams, ie_dps_tf, ie_dual, ie_wcp_ph, ie_wcp_pol
from .detectors import SystemParams
from .montecarlo import SimConfig, compare_to_analytic, max_abs_sigma, simulate
from .optimize import SweepSpec, SweepVariable, max_distance, optimize_mu, sweep
from .rates import (
    QBER_THRESHOLD_EVENT23_REPORTED,
    plob_bound,
    qber_threshold_event1,
)

__all__ = ["main"]

_FLOAT_FMT = "%.10g"
_THREADS_ENV = "DUALQSS_THREADS"

_CSV_HEADER = "L_km,mu,R,R_event1,R_event2,R_event3,I_E,PLOB"
_CSV_IE_EXTRA = ",IE_dual,IE_ph,IE_pol,IE_dps"

# Config-file keys, mapped to a coercion function per argparse dest.
_CONFIG_TYPES = {
    "mu": float,
    "L": float,
    "alpha": float,
    "eta_d": float,
    "p_d": float,
    "f": float,
    "var": str,
    "lo": float,
    "hi": float,
    "step": float,
    "ie_compare": None,  # bool, handled separately
    "method": str,
    "seed": int,
    "l_hi": float,
    "event": int,
    "rounds": int,
    "basis_policy": float,
    "check_fraction": float,
    "attack": str,
    "flip": float,
    "output": str,
}


def _fmt(x: float) -> str:
    return _FLOAT_FMT % x


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot parse boolean config value {raw!r}")


def _load_config(path: str) -> dict[str, str]:
    """Parse a flat key=value config file; # starts a comment."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def _apply_config(args: argparse.Namespace, argv: list[str]) -> None:
    """Overlay config-file values under explicitly given flags."""
    if not getattr(args, "config", None):
        return
    values = _load_config(args.config)
    valid = vars(args)
    for key, raw in values.items():
        if key not in valid or key == "config":
            raise ValueError(f"unknown config key {key!r}")
        flag = "--" + key.replace("_", "-")
        explicit = any(tok == flag or tok.startswith(flag + "=") for tok in argv)
        if explicit:
            continue
        coerce = _CONFIG_TYPES.get(key)
        if coerce is None and key == "ie_compare":
            setattr(args, key, _parse_bool(raw))
        elif coerce is None:
            setattr(args, key, raw)
        else:
            try:
                setattr(args, key, coerce(raw))
            except ValueError as exc:
                raise ValueError(f"config key {key!r}: {exc}") from exc


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".dualqss-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_safe(obj):
    """Replace non-finite floats so the emitted JSON stays standard."""
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return None
        return obj
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _emit_json(args: argparse.Namespace, payload: dict) -> None:
    _write_text(args.output, json.dumps(_json_safe(payload), indent=2) + "\n")


def _system_params(args: argparse.Namespace, l_km: float | None = None) -> SystemParams:
    return SystemParams(
        mu=args.mu,
        alpha=args.alpha,
        l_km=args.L if l_km is None else l_km,
        eta_d=args.eta_d,
        p_d=args.p_d,
        f=args.f,
    )


def _params_dict(sp: SystemParams) -> dict:
    return {
        "mu": sp.mu,
        "alpha": sp.alpha,
        "l_km": sp.l_km,
        "eta_d": sp.eta_d,
        "p_d": sp.p_d,
        "f": sp.f,
    }


def _add_physics_args(parser: argparse.ArgumentParser, l_default: float = 100.0) -> None:
    parser.add_argument("--mu", type=float, default=0.84, help="source mean photon number")
    parser.add_argument("--L", type=float, default=l_default, help="total distance in km")
    parser.add_argument("--alpha", type=float, default=0.2, help="fiber attenuation dB/km")
    parser.add_argument("--eta-d", type=float, default=0.145, help="detector efficiency")
    parser.add_argument("--p-d", type=float, default=8e-8, help="dark count probability")
    parser.add_argument("--f", type=float, default=1.15, help="error-correction inefficiency")
    parser.add_argument("--config", type=str, default=None, help="key=value config file")
    parser.add_argument("--output", "-o", type=str, default=None, help="output file (default stdout)")


def _add_sweep_args(parser: argparse.ArgumentParser) -> None:
    _add_physics_args(parser)
    parser.add_argument("--var", choices=("L", "mu"), default="L", help="swept variable")
    parser.add_argument("--lo", type=float, default=0.0, help="sweep start")
    parser.add_argument("--hi", type=float, default=500.0, help="sweep end")
    parser.add_argument("--step", type=float, default=1.0, help="sweep step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualqss",
        description="Key rates of the dual-degree-of-freedom quantum secret sharing protocol.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="rate curve as CSV")
    _add_sweep_args(p_sweep)
    p_sweep.add_argument("--ie-compare", action="store_true", help="add leakage columns")

    p_ie = sub.add_parser("ie-compare", help="sweep with the four leakage columns")
    _add_sweep_args(p_ie)

    p_opt = sub.add_parser("optimize", help="best source intensity at a distance")
    _add_physics_args(p_opt, l_default=400.0)
    p_opt.add_argument("--lo", type=float, default=0.1, help="intensity lower bound")
    p_opt.add_argument("--hi", type=float, default=2.0, help="intensity upper bound")
    p_opt.add_argument("--method", choices=("grid", "golden", "genetic"), default="grid")
    p_opt.add_argument("--seed", type=int, default=7, help="genetic algorithm seed")

    p_max = sub.add_parser("max-distance", help="largest distance with positive rate")
    _add_physics_args(p_max)
    p_max.add_argument("--l-hi", type=float, default=1000.0, help="search upper bound in km")
    p_max.add_argument("--event", type=int, choices=(1, 2, 3), default=None,
                       help="restrict to one event class")

    p_sim = sub.add_parser("simulate", help="Monte-Carlo run with analytic comparison")
    _add_physics_args(p_sim)
    p_sim.add_argument("--rounds", type=int, default=1_000_000)
    p_sim.add_argument("--seed", type=int, default=1)
    p_sim.add_argument("--basis-policy", type=float, default=0.5,
                       help="probability of choosing the X basis per sender")
    p_sim.add_argument("--check-fraction", type=float, default=0.0,
                       help="fraction of X key events sacrificed for checking")
    p_sim.add_argument("--attack", choices=("none", "beam-split", "dishonest-bob"),
                       default="none")
    p_sim.add_argument("--flip", type=float, default=0.0,
                       help="dishonest receiver's announcement flip probability")

    p_thr = sub.add_parser("thresholds", help="tolerable QBER thresholds")
    _add_physics_args(p_thr)
    return parser


def _echo_params(args: argparse.Namespace, extra: dict) -> str:
    items = {
        "mu": _fmt(args.mu),
        "L": _fmt(args.L),
        "alpha": _fmt(args.alpha),
        "eta_d": _fmt(args.eta_d),
        "p_d": _fmt(args.p_d),
        "f": _fmt(args.f),
    }
    items.update(extra)
    joined = " ".join(f"{k}={v}" for k, v in items.items())
    return f"# params: {joined}\n"


def cmd_sweep(args: argparse.Namespace) -> int:
    ie_compare = getattr(args, "ie_compare", False)
    fixed = _system_params(args)
    variable = SweepVariable.MU if args.var == "mu" else SweepVariable.DISTANCE
    spec = SweepSpec(variable=variable, lo=args.lo, hi=args.hi, step=args.step, fixed=fixed)
    points = sweep(spec)

    lines = [
        _echo_params(
            args,
            {
                "var": args.var,
                "lo": _fmt(args.lo),
                "hi": _fmt(args.hi),
                "step": _fmt(args.step),
                "ie_compare": str(ie_compare).lower(),
            },
        ),
        _CSV_HEADER + (_CSV_IE_EXTRA if ie_compare else "") + "\n",
    ]
    for point in points:
        fields = [
            _fmt(point.l_km),
            _fmt(point.mu),
            _fmt(point.r),
            _fmt(point.r_events[0]),
            _fmt(point.r_events[1]),
            _fmt(point.r_events[2]),
            _fmt(point.i_e),
            _fmt(plob_bound(point.l_km, args.alpha)),
        ]
        if ie_compare:
            eta_t = args.eta_d * 10.0 ** (-args.alpha * point.l_km / 20.0)
            tap = TapParams(mu=point.mu, eta_t=eta_t)
            fields += [
                _fmt(ie_dual(tap)),
                _fmt(ie_wcp_ph(tap)),
                _fmt(ie_wcp_pol(tap)),
                _fmt(ie_dps_tf(tap)),
            ]
        lines.append(",".join(fields) + "\n")
    _write_text(args.output, "".join(lines))
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    sp = _system_params(args)
    result = optimize_mu(args.L, sp, bounds=(args.lo, args.hi), method=args.method, seed=args.seed)
    _emit_json(
        args,
        {
            "best_mu": result.best_mu,
            "best_rate": result.best_rate,
            "evaluations": result.evaluations,
            "method": result.method,
            "seed": args.seed,
            "l_km": args.L,
            "params": _params_dict(sp),
        },
    )
    return 0


def cmd_max_distance(args: argparse.Namespace) -> int:
    sp = _system_params(args)
    value = max_distance(args.mu, sp, l_hi=args.l_hi, event=args.event)
    _emit_json(
        args,
        {
            "max_distance_km": value,
            "event": args.event,
            "params": _params_dict(sp),
        },
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    sp = _system_params(args)
    config = SimConfig(
        sp=sp,
        rounds=args.rounds,
        seed=args.seed,
        basis_policy=args.basis_policy,
        check_fraction=args.check_fraction,
        attack=args.attack.replace("-", "_"),
        flip_fraction=args.flip,
    )
    threads = int(os.environ.get(_THREADS_ENV, "1"))
    report = simulate(config, threads=max(1, threads))
    comparison = compare_to_analytic(report)
    _emit_json(
        args,
        {
            "report": report.to_dict(),
            "comparison": comparison,
            "max_abs_sigma": max_abs_sigma(comparison),
        },
    )
    return 0


def cmd_thresholds(args: argparse.Namespace) -> int:
    sp = _system_params(args)
    _emit_json(
        args,
        {
            "event1": qber_threshold_event1(sp),
            "event23_reported": QBER_THRESHOLD_EVENT23_REPORTED,
            "event23_status": "unverified",
            "params": _params_dict(sp),
        },
    )
    return 0


_COMMANDS = {
    "sweep": cmd_sweep,
    "ie-compare": cmd_sweep,
    "optimize": cmd_optimize,
    "max-distance": cmd_max_distance,
    "simulate": cmd_simulate,
    "thresholds": cmd_thresholds,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "ie-compare":
        args.ie_compare = True
    try:
        _apply_config(args, argv)
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
