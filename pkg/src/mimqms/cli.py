"""Command-line interface: design, optimize, simulate, memory, decode.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
inconsistent inputs).
"""

import argparse
import dataclasses
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .codes import joint_degree_distribution
from .decoders import BACKEND, bp_decode, nms_decode, qms_decode
from .harness import (
    ExperimentConfig,
    emit_csv,
    load_code,
    memory_report,
    read_config,
    run_fer,
)
from .lutopt import optimize
from .mimde import design_schedule, select_design_sigma
from .schedule_io import read_schedule, write_schedule

__all__ = ["cli_main", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _read_schedule_file(path):
    return read_schedule(Path(path).read_text())


def _write_text(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cmd_design(args):
    codes = [load_code(p) for p in args.code]
    ensemble = joint_degree_distribution(codes)
    if args.sigma is not None:
        sigma = args.sigma
    else:
        lo, hi, step = args.tau_grid
        taus = []
        t = lo
        while t <= hi + 1e-9:
            taus.append(t)
            t += step
        sigma = select_design_sigma(
            ensemble, args.q_m, args.q_v, args.i_max, taus, Fraction(args.rate)
        )
    sched = design_schedule(ensemble, sigma, args.q_m, args.q_v, args.i_max)
    _write_text(args.output, write_schedule(sched))
    print(
        f"designed i_max={sched.i_max} at sigma={sigma:.6g}; "
        f"final MI {sched.mi_trajectory[-1]:.6f}"
    )


def _cmd_optimize(args):
    sched = _read_schedule_file(args.schedule)
    result = optimize(sched, sched.ensemble, sched.design_sigma, q_star=args.q_star)
    _write_text(args.output, write_schedule(result.schedule))
    sizes = ", ".join(f"{k}: {p.m}" for k, p in result.partitions.items())
    print(
        f"merged={result.merged} ({sizes}); final MI {result.final_mi:.6f}"
    )


def _cmd_simulate(args):
    if args.config is not None:
        cfg = read_config(Path(args.config).read_text())
    else:
        for name in ("code", "schedule", "snr"):
            if getattr(args, name) is None:
                raise _UsageError(f"simulate needs --config or --{name}")
        cfg = ExperimentConfig(
            code_ref=args.code,
            schedule_ref=args.schedule,
            snr_points=tuple(args.snr),
            min_frame_errors=args.min_frame_errors,
            max_frames=args.max_frames,
        )
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    _write_text(args.output, emit_csv(run_fer(cfg)))


def _cmd_memory(args):
    codes = [load_code(p) for p in args.code]
    schedules = [
        (Path(p).stem, _read_schedule_file(p)) for p in args.schedule
    ]
    rep = memory_report(schedules, codes, q_l=args.q_l, policy=args.policy)
    sys.stdout.write(rep.table())


def _cmd_decode(args):
    code = load_code(args.code)
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    values = text.split()
    if args.decoder == "schedule":
        sched = _read_schedule_file(args.schedule)
        frame = np.array([int(v) for v in values])
        res = qms_decode(code, frame, sched)
    elif args.decoder == "nms":
        res = nms_decode(code, np.array([float(v) for v in values]))
    else:
        res = bp_decode(code, np.array([float(v) for v in values]))
    print(
        json.dumps(
            {
                "backend": BACKEND,
                "iterations_used": res.iterations_used,
                "converged": res.converged,
                "weight": int(res.bits.sum()),
                "bits_hex": np.packbits(res.bits).tobytes().hex(),
            }
        )
    )


def _build_parser():
    parser = _Parser(prog="mimqms", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="design a LUT schedule for a code family")
    p.add_argument("code", nargs="+", help="code files (base matrix or alist)")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--sigma", type=float, help="design noise level")
    grp.add_argument(
        "--tau-grid", type=float, nargs=3, metavar=("LO", "HI", "STEP"),
        help="design-SNR grid to search (dB)",
    )
    p.add_argument("--rate", help="code rate for --tau-grid, e.g. 2/3")
    p.add_argument("--i-max", type=int, default=30)
    p.add_argument("--q-m", type=int, default=4)
    p.add_argument("--q-v", type=int, default=8)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("optimize", help="merge LUTs under a final-MI floor")
    p.add_argument("schedule")
    p.add_argument("--q-star", type=float, default=0.9999)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("simulate", help="run a FER/I_avg campaign, emit CSV")
    p.add_argument("--config", help="experiment config file")
    p.add_argument("--code")
    p.add_argument("--schedule", help="schedule file, or nms / bp")
    p.add_argument("--snr", type=float, nargs="+", help="E_b/N_0 points (dB)")
    p.add_argument("--min-frame-errors", type=int, default=100)
    p.add_argument("--max-frames", type=int, default=100000)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--output", default="-")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("memory", help="print the memory comparison table")
    p.add_argument("schedule", nargs="+")
    p.add_argument("--code", nargs="+", required=True)
    p.add_argument("--q-l", type=int, default=4)
    p.add_argument("--policy", choices=("dedup", "unmerged"), default="dedup")
    p.set_defaults(func=_cmd_memory)

    p = sub.add_parser("decode", help="decode one frame and print a summary")
    p.add_argument("--code", required=True)
    p.add_argument("--schedule", help="schedule file for the LUT decoder")
    p.add_argument(
        "--decoder", choices=("schedule", "nms", "bp"), default="schedule"
    )
    p.add_argument("--input", default="-", help="frame values file, - for stdin")
    p.set_defaults(func=_cmd_decode)

    return parser


def cli_main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        parser.print_usage(sys.stderr)
        print(f"error: {err}", file=sys.stderr)
        return 1
    except SystemExit as ex:  # --help
        return 0 if not ex.code else 1
    try:
        if args.command == "design" and args.sigma is None and args.rate is None:
            raise _UsageError("--tau-grid needs --rate")
        if args.command == "decode" and args.decoder == "schedule" \
                and args.schedule is None:
            raise _UsageError("--decoder schedule needs --schedule")
        args.func(args)
        return 0
    except _UsageError as err:
        parser.print_usage(sys.stderr)
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def main():
    raise SystemExit(cli_main())
