"""Command line: ``orbitfib {analyze,transport,verify,plot}``.

Exit codes: 0 all checks pass, 1 input error, 2 check failure.  Options may
also come from a flat ``key = value`` file given with ``--config``; flags win
over the file, and the seed falls back to ``ORBITFIB_SEED`` and then 0.
"""

from __future__ import annotations

import argparse
import cmath
import configparser
import json
import os
import sys

from .checks import SUITES, run_suites
from .errors import FlowAborted, InputError, OrbitfibError
from .plot import render_svg, trajectories_from_records
from .report import AnalysisRequest, analyze, build_report, dumps_report
from .transport import (
    FlowConfig,
    check_segment,
    fibre_samples,
    read_jsonl,
    transport_trajectories,
    write_jsonl,
)

EXIT_OK, EXIT_INPUT, EXIT_FAILED = 0, 1, 2
CONFIG_KEYS = ("n", "h0", "h", "c", "seed", "step", "epsilon", "format", "suite", "tol",
               "from", "to", "samples", "out", "trajectory")


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage().rstrip()}\n{self.prog}: error: {message}")

    def set_defaults(self, **kwargs):
        super().set_defaults(parser=self, **kwargs)


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "").replace("i", "j")
    if not s:
        raise InputError("empty number")
    try:
        z = complex(s)
    except ValueError:
        raise InputError(f"cannot parse {text!r} as a complex number a+bi") from None
    if not (cmath.isfinite(z)):
        raise InputError(f"{text!r} is not finite")
    return z


def parse_complex_list(text: str) -> tuple:
    return tuple(parse_complex(part) for part in str(text).split(","))


def parse_real_list(text: str) -> tuple:
    values = parse_complex_list(text)
    if any(v.imag != 0 for v in values):
        raise InputError("H must have real entries")
    return tuple(v.real for v in values)


def _number(kind, key, text):
    try:
        return kind(text)
    except (TypeError, ValueError):
        raise InputError(f"{key}: cannot parse {text!r}") from None


def read_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string("[orbitfib]\n" + text)
    except configparser.Error as exc:
        raise InputError(f"malformed config {path}: {exc.message}") from None
    values = dict(cp["orbitfib"])
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(unknown)}")
    return values


class Options:
    """Flag values merged with the config file."""

    def __init__(self, args):
        self.args = args
        self.config = read_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key, default=None):
        value = getattr(self.args, key, None)
        if value is None:
            value = self.config.get(key)
        return default if value is None else value

    def seed(self) -> int:
        value = self.get("seed")
        if value is None:
            value = os.environ.get("ORBITFIB_SEED")
        if value is None:
            return 0
        seed = _number(int, "seed", value)
        if seed < 0:
            raise InputError("seed must be non-negative")
        return seed

    def flow(self) -> FlowConfig:
        step = _number(float, "step", self.get("step", 1e-3))
        eps = self.get("epsilon")
        return FlowConfig(step=step, epsilon=None if eps is None else _number(float, "epsilon", eps))

    def request(self) -> AnalysisRequest:
        if self.get("h0") is None:
            self.args.parser.error("missing --h0 (diagonal of H0, e.g. --h0 1,-1)")
        if self.get("h") is None:
            self.args.parser.error("missing --h (real regular diagonal, e.g. --h 1,-1)")
        h0 = parse_complex_list(self.get("h0"))
        h = parse_real_list(self.get("h"))
        n = self.get("n")
        n = len(h0) if n is None else _number(int, "n", n)
        return AnalysisRequest(
            n=n, H0_diag=h0, H_diag=h,
            form_constant=_number(float, "c", self.get("c", 1.0)),
            seed=self.seed(), flow=self.flow(),
        )


def _emit(text: str, opts: Options) -> None:
    out = opts.get("out")
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror}") from None


def _critical_values(req: AnalysisRequest) -> list:
    return list(analyze(req).gp.critical_values.values())


def cmd_analyze(opts: Options) -> int:
    req = opts.request()
    fmt = opts.get("format", "json")
    if fmt == "svg":
        _emit(render_svg(_critical_values(req)), opts)
        return EXIT_OK
    if fmt != "json":
        raise InputError(f"unknown format {fmt!r}; use json or svg")
    report = build_report(req)
    _emit(dumps_report(report), opts)
    for failure in report["failures"]:
        print(f"FAILED: {failure}", file=sys.stderr)
    return EXIT_FAILED if report["failures"] else EXIT_OK


def cmd_transport(opts: Options) -> int:
    req = opts.request()
    c = parse_complex(str(opts.get("from", "0")))
    d = parse_complex(str(opts.get("to", "1")))
    count = _number(int, "samples", opts.get("samples", 10))
    if count < 1:
        raise InputError("samples must be >= 1")
    cfg = req.flow.resolved(req.H0)
    check_segment(c, d, req.H0, req.H, req.cfg, cfg.epsilon)
    samples = fibre_samples(req.H0, req.H, c, count, req.seed, req.cfg, cfg)
    summary = {"from": {"re": c.real, "im": c.imag}, "to": {"re": d.real, "im": d.imag},
               "samples": count, "epsilon": cfg.epsilon, "step": cfg.step}
    try:
        trajectories = transport_trajectories(samples, c, d, cfg, req.cfg, req.H)
        aborted = None
    except FlowAborted as exc:
        trajectories = [exc.trajectory]
        aborted = {"reason": exc.reason, "message": str(exc)}
    ends = [t[-1] for t in trajectories if t]
    f_err = max((abs(s.f_value - d) for s in ends), default=0.0) if not aborted else None
    drift = max((s.charpoly_drift for t in trajectories for s in t), default=0.0)
    passed = aborted is None and f_err < cfg.max_f_drift and drift < cfg.max_charpoly_drift
    summary.update(max_f_error=f_err, max_charpoly_drift=drift, aborted=aborted, passed=passed)
    out = opts.get("out")
    if out is not None:
        try:
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                for k, t in enumerate(trajectories):
                    write_jsonl(t, fh, sample=k)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc.strerror}") from None
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK if passed else EXIT_FAILED


def cmd_verify(opts: Options) -> int:
    suites = opts.get("suite")
    names = [s.strip() for s in suites.split(",") if s.strip()] if suites else None
    tol = opts.get("tol")
    tol = None if tol is None else _number(float, "tol", tol)
    results = run_suites(names, seed=opts.seed(), tol=tol)
    if opts.get("format", "text") == "json":
        text = json.dumps([
            {"suite": r.suite, "check": r.name, "value": r.value, "op": r.op,
             "threshold": r.threshold, "passed": r.passed} for r in results
        ], indent=2) + "\n"
    else:
        text = "".join(r.line() + "\n" for r in results)
    _emit(text, opts)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def cmd_plot(opts: Options) -> int:
    req = opts.request()
    trajectories = []
    path = opts.get("trajectory")
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                trajectories = trajectories_from_records(read_jsonl(fh))
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        except (ValueError, KeyError, TypeError):
            raise InputError(f"{path} is not a trajectory JSON-lines file") from None
    _emit(render_svg(_critical_values(req), trajectories), opts)
    return EXIT_OK


def build_parser() -> Parser:
    parser = Parser(prog="orbitfib", description="Lefschetz fibrations on adjoint orbits of sl(n, C)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    def common(p, pair=True):
        p.add_argument("--config", help="flat key = value file with default options")
        p.add_argument("--seed", help="random seed (default: config, $ORBITFIB_SEED, 0)")
        p.add_argument("--out", help="output path (default stdout)")
        if pair:
            p.add_argument("--n", help="matrix size, 2..8 (default: length of --h0)")
            p.add_argument("--h0", help="diagonal of H0, comma-separated a+bi")
            p.add_argument("--h", help="diagonal of H, comma-separated reals, pairwise distinct")
            p.add_argument("--c", help="form constant c in <X, Y> = c tr(XY) (default 1)")
            p.add_argument("--step", help="RK4 step (default 1e-3)")
            p.add_argument("--epsilon", help="safety radius around singularities")

    p = sub.add_parser("analyze", help="singularities, Hessians, symplectic checks; JSON report")
    common(p)
    p.add_argument("--format", choices=("json", "svg"))
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("transport", help="carry a fibre along a straight segment of values")
    common(p)
    p.add_argument("--from", dest="from", help="source value a+bi (default 0)")
    p.add_argument("--to", dest="to", help="target value a+bi (default 1)")
    p.add_argument("--samples", help="number of fibre points (default 10)")
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("verify", help="run invariant suites")
    common(p, pair=False)
    p.add_argument("--suite", help=f"comma-separated subset of: {', '.join(SUITES)}")
    p.add_argument("--tol", help="override the threshold of every residual check")
    p.add_argument("--format", choices=("text", "json"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="SVG of critical values and matching paths")
    common(p)
    p.add_argument("--format", choices=("svg",))
    p.add_argument("--trajectory", help="JSON-lines file from 'transport --out' to overlay")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(Options(args))
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError, OverflowError) as exc:
        print(f"orbitfib: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OrbitfibError as exc:
        print(f"orbitfib: check failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
