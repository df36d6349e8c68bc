"""Command-line entry point: ``telecloner {fidelity,simulate,sweep,optimize,verify}``.

Exit codes: 0 success, 1 invalid input or I/O failure, 2 property failure.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from math import sqrt

import numpy as np

from . import __version__, analysis, cloning, verify
from .telecloning import (
    ChannelAmplitudes,
    channel_entropy,
    fidelity_analytic,
    optimal_amplitudes,
    optimal_x0_y,
    run_protocol,
)

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2


class UsageError(ValueError):
    pass


def fmt(v) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(v), ".17g")


def parse_int_list(text: str) -> list:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}")
    if not values:
        raise UsageError("empty dimension list")
    for d in values:
        if d < 2:
            raise UsageError(f"qudit dimension must be >= 2, got {d}")
    return values


def parse_channel(spec: str, d: int, auto_normalize: bool = False) -> ChannelAmplitudes:
    """``uniform``, ``optimal`` or ``custom:x0,x1,...``."""
    if spec == "uniform":
        return ChannelAmplitudes.uniform(d)
    if spec == "optimal":
        return optimal_amplitudes(d)
    if spec.startswith("custom:"):
        try:
            values = [float(t) for t in spec[len("custom:"):].split(",")]
        except ValueError:
            raise UsageError(f"malformed channel list {spec!r}")
        if len(values) != d:
            raise UsageError(f"channel list has {len(values)} entries, expected d={d}")
        try:
            if auto_normalize:
                return ChannelAmplitudes.normalize(values)
            return ChannelAmplitudes(values)
        except ValueError as exc:
            hint = "" if auto_normalize else " (use --normalize to rescale)"
            raise UsageError(f"invalid channel {spec!r}: {exc}{hint}")
    raise UsageError(f"unknown channel {spec!r}; use uniform, optimal or custom:<list>")


def parse_theta(spec: str, d: int) -> np.ndarray:
    """Literal radians ``a,b,...`` or ``random:<seed>``."""
    if spec.startswith("random:"):
        try:
            seed = int(spec[len("random:"):])
        except ValueError:
            raise UsageError(f"malformed random seed in {spec!r}")
        return cloning.random_phases(d, np.random.default_rng(seed))
    try:
        values = [float(t) for t in spec.split(",")]
    except ValueError:
        raise UsageError(f"malformed phase list {spec!r}")
    if len(values) != d:
        raise UsageError(f"phase list has {len(values)} entries, expected d={d}")
    return cloning.phase_vector(values, d)


def _dim(text: str) -> int:
    d = parse_int_list(text)
    if len(d) != 1:
        raise UsageError("this command takes a single dimension")
    return d[0]


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}")


def _csv(meta: list, header: list, rows: list) -> str:
    buf = io.StringIO()
    for key, value in meta:
        buf.write(f"# {key}: {value}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(str(v) for v in row) + "\n")
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ----------------------------------------------------------------- commands


def cmd_fidelity(args) -> int:
    d = _dim(args.d)
    x = parse_channel(args.channel, d, args.normalize)
    report = {
        "d": d,
        "channel": args.channel,
        "x": [float(v) for v in x.x],
        "F_econ": cloning.econ_fidelity_analytic(d),
        "F_opt": cloning.opt_fidelity_analytic(d),
        "F_tele": fidelity_analytic(x),
        "entropy_bits": channel_entropy(x),
    }
    if args.format == "json":
        _emit(_json(report), args.out)
    else:
        rows = [(k, fmt(report[k])) for k in ("F_econ", "F_opt", "F_tele", "entropy_bits")]
        meta = [("tool", f"telecloner {__version__}"), ("d", d), ("channel", args.channel),
                ("x", " ".join(fmt(v) for v in x.x))]
        _emit(_csv(meta, ["quantity", "value"], rows), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    d = _dim(args.d)
    x = parse_channel(args.channel, d, args.normalize)
    theta = parse_theta(args.theta, d)
    run = run_protocol(theta, x)
    expect = fidelity_analytic(x)
    deviation = float(np.max(np.abs(run.fidelities() - expect)))
    rows = [
        (r.outcome.l, r.outcome.k, r.probability, r.fidelity_B, r.fidelity_C)
        for r in run.records
    ]
    if args.format == "json":
        report = {
            "d": d,
            "theta_spec": args.theta,
            "theta": [float(v) for v in theta],
            "x": [float(v) for v in x.x],
            "outcomes": [
                dict(zip(("l", "k", "probability", "fidelity_B", "fidelity_C"), r)) for r in rows
            ],
            "mean_fidelity": run.mean_fidelity,
            "fidelity_analytic": expect,
            "max_deviation": deviation,
        }
        _emit(_json(report), args.out)
        return EXIT_OK
    meta = [
        ("tool", f"telecloner {__version__}"),
        ("d", d),
        ("theta_spec", args.theta),
        ("theta", " ".join(fmt(v) for v in theta)),
        ("x", " ".join(fmt(v) for v in x.x)),
    ]
    body = [(l, k, fmt(p), fmt(fb), fmt(fc)) for l, k, p, fb, fc in rows]
    text = _csv(meta, ["l", "k", "probability", "fidelity_B", "fidelity_C"], body)
    text += f"# mean_fidelity: {fmt(run.mean_fidelity)}\n"
    text += f"# fidelity_analytic: {fmt(expect)}\n"
    text += f"# max_deviation: {fmt(deviation)}\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    dims = parse_int_list(args.d)
    if args.points < 3:
        raise UsageError("--points must be >= 3")
    curves = {d: analysis.sweep_x0(d, args.points) for d in dims}
    if args.format == "json":
        report = {
            "n_points": args.points,
            "version": __version__,
            "curves": {
                str(d): {
                    "x0_max_entropy": 1 / sqrt(d),
                    "x0_max_fidelity": optimal_x0_y(d)[0],
                    "points": [[p.x0, p.entropy, p.fidelity] for p in pts],
                }
                for d, pts in curves.items()
            },
        }
        _emit(_json(report), args.out)
        return EXIT_OK
    meta = [("tool", f"telecloner {__version__}"), ("n_points", args.points)]
    for d in dims:
        meta.append((f"d={d} x0_max_entropy", fmt(1 / sqrt(d))))
        meta.append((f"d={d} x0_max_fidelity", fmt(optimal_x0_y(d)[0])))
    rows = [(d, fmt(p.x0), fmt(p.entropy), fmt(p.fidelity)) for d in dims for p in curves[d]]
    _emit(_csv(meta, ["d", "x0", "entropy_bits", "fidelity"], rows), args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    dims = parse_int_list(args.d)
    if args.restarts < 1:
        raise UsageError("--restarts must be >= 1")
    results = []
    for d in dims:
        res = analysis.maximize_fidelity(d, restarts=args.restarts, seed=args.seed)
        results.append((d, res, cloning.opt_fidelity_analytic(d)))
    if args.format == "json":
        report = {
            "seed": args.seed,
            "restarts": args.restarts,
            "results": [
                {
                    "d": d,
                    "f_star": r.f_star,
                    "f_opt": f_opt,
                    "x_star": [float(v) for v in r.x_star.x],
                    "iterations": r.iterations,
                    "converged": r.converged,
                }
                for d, r, f_opt in results
            ],
        }
        _emit(_json(report), args.out)
        return EXIT_OK
    meta = [("tool", f"telecloner {__version__}"), ("seed", args.seed), ("restarts", args.restarts)]
    rows = [
        (d, fmt(r.f_star), fmt(f_opt), " ".join(fmt(v) for v in r.x_star.x), r.iterations, int(r.converged))
        for d, r, f_opt in results
    ]
    _emit(_csv(meta, ["d", "f_star", "f_opt", "x_star", "iterations", "converged"], rows), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.max_d < 2:
        raise UsageError("--max-d must be >= 2")
    results = verify.run_checks(args.max_d, args.seed)
    failed = [r for r in results if not r.passed]
    lines = [f"# telecloner {__version__} verify max_d={args.max_d} seed={args.seed}"]
    lines += [r.line() for r in results]
    lines.append(f"# {len(results) - len(failed)} passed, {len(failed)} failed")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_FAILED if failed else EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telecloner",
        description="Ancilla-free phase-covariant telecloning of qudits.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, channel=True):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        if channel:
            p.add_argument("--d", required=True, help="qudit dimension")
            p.add_argument("--channel", default="optimal",
                           help="uniform | optimal | custom:x0,x1,... (default: optimal)")
            p.add_argument("--normalize", action="store_true",
                           help="rescale a custom channel to unit norm")

    p = sub.add_parser("fidelity", help="closed-form fidelities and channel entropy")
    common(p)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("simulate", help="simulate every Bell outcome of the protocol")
    common(p)
    p.add_argument("--theta", default="random:0",
                   help="phases in radians a,b,... or random:<seed> (default: random:0)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="entropy and fidelity versus x0")
    common(p, channel=False)
    p.add_argument("--d", default="2,3,5,9", help="comma-separated dimensions")
    p.add_argument("--points", type=int, default=analysis.DEFAULT_POINTS)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="numerically maximize the clone fidelity")
    common(p, channel=False)
    p.add_argument("--d", default="2,3,4,5,6,7,8,9", help="comma-separated dimensions")
    p.add_argument("--restarts", type=int, default=analysis.DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=analysis.DEFAULT_SEED)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="run the property suite")
    p.add_argument("--max-d", type=int, default=6)
    p.add_argument("--seed", type=int, default=analysis.DEFAULT_SEED)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags; 2 is reserved for property failures
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"telecloner: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
