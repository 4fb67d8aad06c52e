"""Command line front end.

    spinrotor spectrum --m-min -10 --m-max 10
    spinrotor dynamics --m 4 --t-max 10 --steps 2001 --format json
    spinrotor sweep --m-list 2,4,8
    spinrotor verify --scenario all

Exit status: 0 on success, 1 when verification fails, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .entanglement import (
    SuperposedState,
    branch_overlap,
    entanglement_entropy,
    entanglement_report,
    evolve,
    locate_purity_extrema,
    min_purity_over_period,
    rotor_coherence,
    single_sector_state,
    two_sector_state,
)
from .io import read_amplitudes, to_csv, to_json, write_output
from .model import SPIN_UP, ModelParams, sector_spectrum
from .oracle import verify_against_analytic
from .scenarios import SCENARIOS, build_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "inertia": 1.0,
    "delta": 2.0,
    "coupling": 0.5,
    "format": "csv",
    "output": None,
    "seed": 42,
    "m_min": -10,
    "m_max": 10,
    "m": 4,
    "amplitudes": None,
    "t_max": 10.0,
    "steps": 2001,
    "m_list": [2, 4, 8],
    "scenario": ["all"],
    "threshold": 1e-9,
}

SPECTRUM_COLUMNS = ["m", "eps_minus", "eps_plus", "omega", "theta", "lambda"]
DYNAMICS_COLUMNS = ["t", "K_re", "K_im", "K_abs", "purity", "entropy", "rotor_coherence"]
SWEEP_COLUMNS = ["eta", "m", "omega", "t_first_min", "purity_min", "entropy_max"]
VERIFY_COLUMNS = [
    "scenario",
    "state",
    "purity",
    "entropy",
    "schmidt",
    "rotor_density",
    "overlap",
    "spectrum",
    "max_deviation",
    "passed",
]


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--inertia", type=float, help="moment of inertia I (default 1)")
    common.add_argument("--delta", type=float, help="transverse splitting (default 2)")
    common.add_argument("--coupling", type=float, help="spin-rotation coupling g (default 0.5)")
    common.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    common.add_argument("--output", help="output path (default stdout)")
    common.add_argument("--seed", type=int, help="seed for randomized scenarios (default 42)")
    common.add_argument("--config", help="JSON file of option defaults; flags take precedence")

    parser = argparse.ArgumentParser(prog="spinrotor", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="sector energies over a range of m")
    p.add_argument("--m-min", type=int)
    p.add_argument("--m-max", type=int)

    p = sub.add_parser("dynamics", parents=[common], help="purity / entropy time series")
    p.add_argument("--m", type=int, help="use the (|m> + |-m>)/sqrt2 x |up> state (default 4)")
    p.add_argument("--amplitudes", help="file of 'm re im [up_re up_im down_re down_im]' lines")
    p.add_argument("--t-max", type=float)
    p.add_argument("--steps", type=int)

    p = sub.add_parser("sweep", parents=[common], help="closed-form purity minima per m")
    p.add_argument("--m-list", type=_int_list, help="comma or space separated m values")

    p = sub.add_parser("verify", parents=[common], help="oracle vs closed-form comparison")
    p.add_argument(
        "--scenario",
        action="append",
        help=f"one of {', '.join(SCENARIOS)} or 'all' (repeatable; default all)",
    )
    p.add_argument("--t-max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--threshold", type=float)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge built-in defaults, an optional config file and explicit flags."""
    config = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        config.update(loaded)
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            config[key] = value
    if isinstance(config["m_list"], str):
        config["m_list"] = _int_list(config["m_list"])
    if isinstance(config["scenario"], str):
        config["scenario"] = [config["scenario"]]
    config["command"] = args.command
    return config


def _params(config: dict) -> ModelParams:
    try:
        return ModelParams(
            inertia=float(config["inertia"]),
            delta=float(config["delta"]),
            coupling=float(config["coupling"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def time_grid(t_max: float, steps: int) -> np.ndarray:
    """Endpoint-inclusive grid ``t_k = k t_max / (steps - 1)``."""
    if steps < 2:
        raise UsageError(f"steps must be at least 2, got {steps}")
    if not (t_max > 0 and math.isfinite(t_max)):
        raise UsageError(f"t_max must be positive and finite, got {t_max}")
    return np.array([k * t_max / (steps - 1) for k in range(steps)])


def cmd_spectrum(config: dict):
    params = _params(config)
    m_min, m_max = int(config["m_min"]), int(config["m_max"])
    if m_min > m_max:
        raise UsageError(f"--m-min ({m_min}) must not exceed --m-max ({m_max})")
    rows = []
    for m in range(m_min, m_max + 1):
        spec = sector_spectrum(params, m)
        rows.append(
            {
                "m": m,
                "eps_minus": spec.eps_minus,
                "eps_plus": spec.eps_plus,
                "omega": spec.omega,
                "theta": spec.theta,
                "lambda": spec.lam,
            }
        )
    return SPECTRUM_COLUMNS, rows, {}


def _dynamics_state(config: dict) -> SuperposedState:
    if config["amplitudes"]:
        try:
            return read_amplitudes(config["amplitudes"])
        except OSError as exc:
            raise UsageError(f"cannot read amplitudes: {exc}") from None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    m = int(config["m"])
    return single_sector_state(0) if m == 0 else two_sector_state(m)


def _qubit_entropy(p_spin: float) -> float:
    root = math.sqrt(max(0.0, 2 * p_spin - 1))
    return entanglement_entropy(((1 + root) / 2, (1 - root) / 2))


def cmd_dynamics(config: dict):
    params = _params(config)
    state0 = _dynamics_state(config)
    times = time_grid(float(config["t_max"]), int(config["steps"]))
    trajectory = evolve(params, state0)

    with_k = len(state0) == 2 and all(np.array_equal(s, SPIN_UP) for s in state0.spinors)
    paired = with_k and state0.sectors[0] == -state0.sectors[1]
    m_upper = max(state0.sectors)

    rows = []
    for t in times:
        state = trajectory(t)
        report = entanglement_report(state)
        row = {"t": float(t)}
        if with_k:
            k = branch_overlap(params, m_upper, t).value if paired else report.overlap.value
            row.update(K_re=k.real, K_im=k.imag, K_abs=abs(k))
        row.update(
            purity=report.purity,
            entropy=report.entropy,
            rotor_coherence=rotor_coherence(state),
        )
        rows.append(row)
    columns = DYNAMICS_COLUMNS if with_k else [c for c in DYNAMICS_COLUMNS if not c.startswith("K_")]

    purities = [r["purity"] for r in rows]
    minima = locate_purity_extrema(params, state0, times, purities, kind="min")
    maxima = locate_purity_extrema(params, state0, times, purities, kind="max")
    entropy_max = max([r["entropy"] for r in rows] + [_qubit_entropy(p) for _, p in minima])
    entropy_min = min([r["entropy"] for r in rows] + [_qubit_entropy(p) for _, p in maxima])
    summary = {
        "purity_min": min(purities + [p for _, p in minima]),
        "t_first_min": minima[0][0] if minima else None,
        "entropy_max": entropy_max,
        "entropy_min": entropy_min,
        "purity_minima": [[t, p] for t, p in minima],
        "entropy_maxima": [[t, _qubit_entropy(p)] for t, p in minima],
    }
    if paired:
        t_min, p_min = min_purity_over_period(params, m_upper)
        summary["closed_form"] = {"t_first_min": t_min, "purity_min": p_min}
    meta = {
        "sectors": list(state0.sectors),
        "amplitudes": [[c.real, c.imag] for c in state0.amplitudes],
        "summary": summary,
    }
    return columns, rows, meta


def cmd_sweep(config: dict):
    params = _params(config)
    m_list = config["m_list"]
    if not m_list:
        raise UsageError("--m-list must name at least one m")
    rows = []
    for m in m_list:
        m = int(m)
        lam = params.barnett_field(m)
        if params.delta > 0:
            eta = lam / params.delta
        else:
            eta = math.copysign(math.inf, lam) if lam else math.nan
        t_min, p_min = min_purity_over_period(params, m)
        rows.append(
            {
                "eta": eta,
                "m": m,
                "omega": params.precession_frequency(m),
                "t_first_min": t_min,
                "purity_min": p_min,
                "entropy_max": _qubit_entropy(p_min),
            }
        )
    return SWEEP_COLUMNS, rows, {}


def cmd_verify(config: dict):
    params = _params(config)
    names = list(config["scenario"])
    if "all" in names:
        names = list(SCENARIOS)
    for name in names:
        if name not in SCENARIOS:
            raise UsageError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}, all")
    times = time_grid(float(config["t_max"]), int(config["steps"]))
    threshold = float(config["threshold"])
    rows = []
    for name in names:
        scenario = build_scenario(name, params, int(config["seed"]))
        report = verify_against_analytic(scenario.params, scenario.state, times)
        row = {"scenario": name, **{c: report.deviations.get(c) for c in VERIFY_COLUMNS[1:8]}}
        row["max_deviation"] = report.max_deviation
        row["passed"] = report.passed(threshold)
        rows.append(row)
    return VERIFY_COLUMNS, rows, {"all_passed": all(r["passed"] for r in rows)}


COMMANDS = {
    "spectrum": cmd_spectrum,
    "dynamics": cmd_dynamics,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv=None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        config = resolve_config(args)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            columns, rows, extra = COMMANDS[args.command](config)
    except UsageError as exc:
        print(f"spinrotor {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    meta = {"tool": "spinrotor", "version": __version__, "config": config, **extra}
    if config["format"] == "json":
        text = to_json(meta, columns, rows)
    else:
        text = to_csv(columns, rows)
    try:
        write_output(text, config["output"], stdout)
    except OSError as exc:
        print(f"spinrotor {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "verify" and not extra["all_passed"]:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
