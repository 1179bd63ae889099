"""Command-line front end.

Subcommands ``simulate``, ``attractor``, ``sweep``, ``potential`` and
``classify`` write CSV/JSON outputs plus one JSON run manifest.  Exit status is
0 on success, 2 on invalid input and 3 when a numerical procedure fails.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .attractor import (
    default_axes,
    find_fixed_point,
    potential,
    sweep_section,
    sweep_xa,
)
from .device import Activation, MemristorModel
from .drive import PulseTrain, Sinusoid, Triangle, drive_from_dict
from .errors import ConfigError, NumericalError, ValidationError
from .sim import SimConfig, integrate_many, write_trajectory_csv
from .windows import WindowSpec, classify_window

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _fmt(v) -> str:
    return "" if v is None or v != v else format(float(v), ".17g")


def _float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# --- option groups --------------------------------------------------------------


def _add_model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--model", metavar="JSON", help="model definition file (overrides the flags below)")
    g.add_argument("--window", choices=["biolek", "joglekar"], default="biolek")
    g.add_argument("--p", type=int, default=1, help="window exponent")
    g.add_argument("--activation", choices=["linear", "threshold", "quadratic"], default="linear")
    g.add_argument("--gamma", type=float, default=1.0, help="rate constant")
    g.add_argument("--i-t", type=float, default=0.0, help="threshold current (threshold activation)")
    g.add_argument("--r-on", type=float, default=None)
    g.add_argument("--r-off", type=float, default=None)


def _add_drive_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("drive")
    g.add_argument("--drive-file", metavar="JSON", help="drive definition file (overrides the flags below)")
    g.add_argument("--drive", choices=["rect", "sin", "tri"], default="rect")
    g.add_argument("--period", type=float, default=1.0)
    g.add_argument("--tau-plus", type=float, default=0.2)
    g.add_argument("--tau-minus", type=float, default=0.2)
    g.add_argument("--i-plus", type=float, default=None)
    g.add_argument("--i-minus", type=float, default=None)
    g.add_argument("--gamma-i-plus-tau-plus", type=float, default=None,
                   help="set I+ through the product gamma*I+*tau+ (default 0.01 when I+ is not given)")
    g.add_argument("--gamma-i-minus-tau-minus", type=float, default=None,
                   help="set I- through |gamma*I-*tau-| (sign ignored; default 0.01 when I- is not given)")
    g.add_argument("--layout", choices=["plus_then_minus", "minus_then_plus"], default="plus_then_minus")
    g.add_argument("--i0", type=float, default=None, help="sin/tri amplitude")
    g.add_argument("--gamma-i0-T", dest="gamma_i0_T", type=float, default=None,
                   help="set the sin/tri amplitude through gamma*I0*T (default 0.05)")


def _load_json(path, inputs: dict) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from None
    inputs[str(path)] = _sha256(path)
    return data


def _resolve_model(args, inputs: dict) -> MemristorModel:
    if args.model:
        return MemristorModel.from_dict(_load_json(args.model, inputs))
    return MemristorModel(
        WindowSpec.from_dict({"kind": args.window, "p": args.p}),
        Activation(args.activation, args.gamma, args.i_t),
        args.r_on,
        args.r_off,
    )


def _resolve_drive(args, model: MemristorModel, inputs: dict):
    if args.drive_file:
        return drive_from_dict(_load_json(args.drive_file, inputs))
    gamma = model.activation.gamma
    if args.drive == "rect":
        if args.tau_plus is None or args.tau_plus <= 0:
            raise ConfigError(f"tau_plus: must be positive, got {args.tau_plus!r}")
        if args.tau_minus is None or args.tau_minus <= 0:
            raise ConfigError(f"tau_minus: must be positive, got {args.tau_minus!r}")
        if args.i_plus is not None and args.gamma_i_plus_tau_plus is not None:
            raise ConfigError("i_plus: give --i-plus or --gamma-i-plus-tau-plus, not both")
        if args.i_minus is not None and args.gamma_i_minus_tau_minus is not None:
            raise ConfigError("i_minus: give --i-minus or --gamma-i-minus-tau-minus, not both")
        i_plus = args.i_plus
        if i_plus is None:
            prod = 0.01 if args.gamma_i_plus_tau_plus is None else args.gamma_i_plus_tau_plus
            i_plus = prod / (gamma * args.tau_plus)
        i_minus = args.i_minus
        if i_minus is None:
            prod = 0.01 if args.gamma_i_minus_tau_minus is None else abs(args.gamma_i_minus_tau_minus)
            i_minus = -prod / (gamma * args.tau_minus)
        return PulseTrain(i_plus, args.tau_plus, i_minus, args.tau_minus, args.period, args.layout)
    if args.i0 is not None and args.gamma_i0_T is not None:
        raise ConfigError("i0: give --i0 or --gamma-i0-T, not both")
    i0 = args.i0
    if i0 is None:
        prod = 0.05 if args.gamma_i0_T is None else args.gamma_i0_T
        i0 = prod / (gamma * args.period)
    return (Sinusoid if args.drive == "sin" else Triangle)(i0, args.period)


# --- manifest ------------------------------------------------------------------------


class Run:
    def __init__(self, command: str, args):
        self.command = command
        self.manifest_path = getattr(args, "manifest", None)
        self.parameters = {}
        self.inputs = {}
        self.outputs = []
        self._start = time.perf_counter()

    def write_manifest(self, default_path=None) -> None:
        manifest = {
            "command": self.command,
            "version": __version__,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "duration_s": time.perf_counter() - self._start,
        }
        text = json.dumps(manifest, indent=2, sort_keys=True)
        path = self.manifest_path or default_path
        if path is None:
            print(json.dumps(manifest, sort_keys=True), file=sys.stderr)
            return
        Path(path).write_text(text + "\n")


def _prepare_out(path) -> Path:
    out = Path(path)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    return out


# --- commands ------------------------------------------------------------------------


def cmd_simulate(args, run: Run) -> int:
    model = _resolve_model(args, run.inputs)
    drive = _resolve_drive(args, model, run.inputs)
    for x0 in args.x0:
        if not 0.0 <= x0 <= 1.0:
            raise ConfigError(f"x0: initial state must lie in [0, 1], got {x0!r}")
    dt = args.dt
    if not isinstance(drive, PulseTrain) and dt is None:
        dt = drive.period / args.steps_per_period
    config = SimConfig(args.x0[0], args.periods, args.steps_per_segment, dt, args.record_stride)
    run.parameters = {
        "model": model.to_dict(),
        "drive": drive.to_dict(),
        "x0": args.x0,
        "periods": config.periods,
        "steps_per_segment": config.steps_per_segment,
        "dt": config.dt,
        "record_stride": config.record_stride,
        "seed": args.seed,
    }
    trajectories = integrate_many(model, drive, config, args.x0, args.workers)
    prefix = _prepare_out(args.out)
    for x0, tr in zip(args.x0, trajectories):
        path = prefix.with_name(f"{prefix.name}_x0_{x0!r}.csv")
        write_trajectory_csv(tr, path)
        run.outputs.append(str(path))
    run.write_manifest(prefix.with_name(f"{prefix.name}_manifest.json"))
    return 0


def cmd_attractor(args, run: Run) -> int:
    model = _resolve_model(args, run.inputs)
    drive = _resolve_drive(args, model, run.inputs)
    run.parameters = {"model": model.to_dict(), "drive": drive.to_dict(), "tol": args.tol, "seed": args.seed}
    report = find_fixed_point(model, drive, args.tol)
    print(json.dumps(report.to_dict()))
    run.outputs.append("<stdout>")
    run.write_manifest()
    return 0


def _sweep_path(out: Path, p: int, many: bool) -> Path:
    return out.with_name(f"{out.stem}_p{p}{out.suffix or '.csv'}") if many else out


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_sweep(args, run: Run) -> int:
    out = _prepare_out(args.out)
    many = len(args.p) > 1
    if args.section:
        if not args.offset < 0:
            raise ConfigError(f"offset: section offset must be negative, got {args.offset!r}")
        a_plus = np.linspace(0.0, -args.offset, args.n + 2)[1:-1]
        run.parameters = {"section": True, "offset": args.offset, "n": args.n, "p": args.p}
        for p in args.p:
            xa = sweep_section(a_plus, p, args.offset, args.tol)
            path = _sweep_path(out, p, many)
            _write_rows(path, ["a_plus", "a_minus", "x_a"],
                        ([_fmt(a), _fmt(a + args.offset), _fmt(x)] for a, x in zip(a_plus, xa)))
            run.outputs.append(str(path))
    else:
        ap_default, am_default = default_axes(args.n)
        lo_p = ap_default[0] if args.a_plus_min is None else args.a_plus_min
        hi_p = ap_default[-1] if args.a_plus_max is None else args.a_plus_max
        lo_m = am_default[0] if args.a_minus_min is None else args.a_minus_min
        hi_m = am_default[-1] if args.a_minus_max is None else args.a_minus_max
        if not lo_p <= hi_p:
            raise ConfigError(f"a_plus_min: range is inverted ({lo_p} > {hi_p})")
        if not lo_m <= hi_m:
            raise ConfigError(f"a_minus_min: range is inverted ({lo_m} > {hi_m})")
        if args.n < 1:
            raise ConfigError(f"n: grid size must be positive, got {args.n}")
        a_plus = np.linspace(lo_p, hi_p, args.n)
        a_minus = np.linspace(lo_m, hi_m, args.n)
        run.parameters = {"section": False, "n": args.n, "p": args.p, "tol": args.tol,
                          "a_plus": [lo_p, hi_p], "a_minus": [lo_m, hi_m]}
        for p in args.p:
            grid = sweep_xa(a_plus, a_minus, p, args.tol)
            path = _sweep_path(out, p, many)
            _write_rows(path, ["a_plus", "a_minus", "x_a"],
                        ([_fmt(a), _fmt(b), _fmt(grid[i, j])]
                         for i, a in enumerate(a_plus) for j, b in enumerate(a_minus)))
            run.outputs.append(str(path))
    run.parameters["seed"] = args.seed
    run.write_manifest(out.with_name(f"{out.stem}_manifest.json"))
    return 0


def cmd_potential(args, run: Run) -> int:
    model = _resolve_model(args, run.inputs)
    drive = _resolve_drive(args, model, run.inputs)
    if args.grid < 2:
        raise ConfigError(f"grid: need at least 2 points, got {args.grid}")
    run.parameters = {"model": model.to_dict(), "drive": drive.to_dict(), "grid": args.grid, "seed": args.seed}
    curve = potential(model, drive, args.grid)
    out = _prepare_out(args.out)
    closed = curve.closed_form if curve.closed_form is not None else [None] * len(curve.x)
    _write_rows(out, ["x", "U_numeric", "U_closed_form"],
                ([_fmt(x), _fmt(u), _fmt(c)] for x, u, c in zip(curve.x, curve.numeric, closed)))
    run.outputs.append(str(out))
    run.write_manifest(out.with_name(f"{out.stem}_manifest.json"))
    return 0


def cmd_classify(args, run: Run) -> int:
    window = WindowSpec.from_dict({"kind": args.window, "p": args.p})
    run.parameters = {"window": window.to_dict(), "grid_n": args.grid_n, "tol": args.tol, "seed": args.seed}
    print(json.dumps(classify_window(window, args.grid_n, args.tol).to_dict()))
    run.outputs.append("<stdout>")
    run.write_manifest()
    return 0


# --- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memwindow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, manifest_default):
        p.add_argument("--seed", type=int, default=None, help="accepted for scripting; all algorithms are deterministic")
        p.add_argument("--manifest", default=None, help=f"manifest path (default: {manifest_default})")

    p = sub.add_parser("simulate", help="integrate trajectories and write t,x,xbar CSVs")
    _add_model_args(p)
    _add_drive_args(p)
    p.add_argument("--x0", type=_float_list, default=[0.1, 0.3, 0.5, 0.7, 0.9], help="comma-separated initial states")
    p.add_argument("--periods", type=int, default=600)
    p.add_argument("--steps-per-segment", type=int, default=16)
    p.add_argument("--dt", type=float, default=None, help="time step for sin/tri drives")
    p.add_argument("--steps-per-period", type=int, default=200, help="sets dt = period/N when --dt is absent")
    p.add_argument("--record-stride", type=int, default=1)
    p.add_argument("--workers", type=int, default=None, help="integrate initial states in parallel processes")
    p.add_argument("--out", required=True, help="output prefix; files are <prefix>_x0_<value>.csv")
    common(p, "<prefix>_manifest.json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attractor", help="locate and classify the fixed point (JSON on stdout)")
    _add_model_args(p)
    _add_drive_args(p)
    p.add_argument("--tol", type=float, default=1e-12)
    common(p, "stderr")
    p.set_defaults(func=cmd_attractor)

    p = sub.add_parser("sweep", help="Biolek attractor location over pulse strengths")
    p.add_argument("--p", type=_int_list, default=None, help="comma-separated exponents")
    p.add_argument("--n", type=int, default=51, help="points per axis (or along the section)")
    p.add_argument("--a-plus-min", type=float, default=None)
    p.add_argument("--a-plus-max", type=float, default=None)
    p.add_argument("--a-minus-min", type=float, default=None)
    p.add_argument("--a-minus-max", type=float, default=None)
    p.add_argument("--section", action="store_true", help="1-D line a_minus = a_plus + offset instead of a grid")
    p.add_argument("--offset", type=float, default=-10.0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", required=True)
    common(p, "<out stem>_manifest.json")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("potential", help="sampled potential U(x) as CSV")
    _add_model_args(p)
    _add_drive_args(p)
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--out", required=True)
    common(p, "<out stem>_manifest.json")
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("classify", help="class 1 / class 2 test of a window (JSON on stdout)")
    p.add_argument("--window", choices=["biolek", "joglekar"], default="biolek")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--grid-n", type=int, default=1001)
    p.add_argument("--tol", type=float, default=1e-9)
    common(p, "stderr")
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sweep" and args.p is None:
        args.p = [1, 2, 5, 10] if args.section else [1]
    run = Run(args.command, args)
    try:
        return args.func(args, run)
    except ValidationError as exc:
        print(f"memwindow {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"memwindow {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
