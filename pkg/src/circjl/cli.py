"""``cjl`` command-line harness.

Every subcommand writes JSON-lines records (one per grid point) to stdout or
``--report``. Exit codes: 0 all checks passed, 1 usage error, 2 data error,
3 subgaussian regime violation, 4 an experiment's check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import bounds, montecarlo
from .circulant import PartialCirculant, apply_fft, apply_naive
from .embedder import EmbeddingSpec, build_embedder, choose_k, embed_point
from .errors import InvalidArgument, PointSetParseError, RegimeViolation
from .pointset import FORMATS, detect_format, read_points, write_points
from .prng import AUX_STREAM, DistributionTag, SeedSpec, random_unit_vector, seed_from_env

log = logging.getLogger("circjl")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_REGIME, EXIT_CHECK = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(eval_fraction(tok)) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def eval_fraction(tok: str) -> float:
    tok = tok.strip()
    if "/" in tok:
        num, den = tok.split("/", 1)
        return float(num) / float(den)
    return float(tok)


def _fraction(text):
    try:
        return eval_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a number or fraction, got {text!r}")


def _ints(text):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


class Reporter:
    def __init__(self, stream, command, seed):
        self.stream = stream
        self.command = command
        self.seed = seed
        self.records = []

    def emit(self, params, result, passed, started):
        rec = {
            "command": self.command,
            "params": params,
            "seed": self.seed,
            "result": result,
            "passed": bool(passed),
            "wall_time_seconds": time.perf_counter() - started,
        }
        self.records.append(rec)
        self.stream.write(json.dumps(rec, default=_jsonable) + "\n")
        self.stream.flush()

    def summary(self):
        rec = {
            "command": self.command,
            "summary": True,
            "seed": self.seed,
            "records": len(self.records),
            "all_passed": all(r["passed"] for r in self.records),
        }
        self.stream.write(json.dumps(rec) + "\n")

    @property
    def all_passed(self):
        return all(r["passed"] for r in self.records)


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _dist(args):
    dist = DistributionTag.parse(args.dist)
    if getattr(args, "eta", None) is not None:
        dist = DistributionTag(dist.kind, args.eta)
    return dist


def _probe_vector(kind, d, seed):
    if kind == "basis":
        x = np.zeros(d)
        x[0] = 1.0
        return x
    return random_unit_vector(SeedSpec(seed, AUX_STREAM), d)


def cmd_embed(args, rep):
    started = time.perf_counter()
    fmt = args.format or detect_format(args.input)
    points = read_points(args.input, fmt)
    n, d = points.shape
    k_chosen = args.k if args.k is not None else choose_k(
        max(n, 2), args.epsilon, args.delta, args.tau, args.budget)
    clamped = False
    if k_chosen > d:
        if args.k is not None:
            raise InvalidArgument(f"--k {args.k} exceeds data dimension d={d}")
        log.warning("choose_k gave k=%d > d=%d; clamping to k=d", k_chosen, d)
        clamped = True
    k = min(k_chosen, d)
    spec = EmbeddingSpec(d=d, k=k, n=max(n, 2), epsilon=args.epsilon, delta=args.delta, tau=args.tau)
    E = build_embedder(spec, _dist(args), SeedSpec(args.seed, 0))
    out = embed_point(E, points)
    write_points(args.output, out, fmt)
    params = {"input": args.input, "output": args.output, "format": fmt, "epsilon": args.epsilon,
              "delta": args.delta, "tau": args.tau, "budget": args.budget, "dist": args.dist,
              "k_override": args.k}
    rep.emit(params, {"n": n, "d": d, "k": k, "k_chosen": k_chosen, "clamped": clamped}, True, started)


def _load_or_generate_points(args):
    if args.input:
        return read_points(args.input, args.format)
    gen = SeedSpec(args.seed, AUX_STREAM).generator()
    pts = gen.standard_normal((args.n, args.d))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def cmd_distort(args, rep):
    points = _load_or_generate_points(args)
    n, d = points.shape
    k_chosen = args.k if args.k is not None else choose_k(n, args.epsilon, args.delta, args.tau, args.budget)
    if args.k is not None and args.k > d:
        raise InvalidArgument(f"--k {args.k} exceeds d={d}")
    k = min(k_chosen, d)
    if k < k_chosen:
        log.warning("choose_k gave k=%d > d=%d; clamping to k=d", k_chosen, d)
    spec = EmbeddingSpec(d=d, k=k, n=n, epsilon=args.epsilon, delta=args.delta, tau=args.tau)
    for name in args.dist.split(","):
        started = time.perf_counter()
        dist = DistributionTag.parse(name)
        exp = montecarlo.estimate_distortion_success(
            spec, dist, points, args.repeats, SeedSpec(args.seed, 0), threads=args.threads)
        params = {"d": d, "n": n, "k": k, "k_chosen": k_chosen, "epsilon": args.epsilon,
                  "delta": args.delta, "tau": args.tau, "budget": args.budget, "dist": dist.name,
                  "repeats": args.repeats}
        result = {
            "success_fraction": exp.success_fraction,
            "target": exp.target,
            "failures_per_embedder": [r.failures for r in exp.reports],
            "max_relative_error": [r.max_relative_error for r in exp.reports],
        }
        rep.emit(params, result, exp.passed, started)


def cmd_tail(args, rep):
    dist = _dist(args)
    x = _probe_vector(args.x, args.d, args.seed)
    sides = ("upper", "lower") if args.side == "both" else (args.side,)
    for eps in args.epsilon:
        spec = EmbeddingSpec(d=args.d, k=args.k, n=args.n, epsilon=eps, delta=args.delta, tau=args.tau)
        for side in sides:
            started = time.perf_counter()
            c = montecarlo.estimate_norm_tail(spec, dist, x, side, args.trials, SeedSpec(args.seed, 0),
                                              theta=args.theta, threads=args.threads)
            params = {"d": args.d, "k": args.k, "n": args.n, "epsilon": eps, "delta": args.delta,
                      "tau": args.tau, "dist": dist.name, "eta": dist.eta, "theta": args.theta,
                      "side": side, "x": args.x, "trials": args.trials}
            rep.emit(params, c.to_dict(), c.dominated, started)


def cmd_spectral(args, rep):
    started = time.perf_counter()
    x = _probe_vector(args.x, args.d, args.seed)
    report = montecarlo.estimate_spectral_tail(args.d, args.k, x, args.t_grid, args.trials,
                                               SeedSpec(args.seed, 0), threads=args.threads)
    for c in report:
        params = {"d": args.d, "k": args.k, "x": args.x, "t": c.threshold, "trials": args.trials}
        result = {**c.to_dict(), "mu_inf_quantiles": report.mu_inf_quantiles,
                  "norm_bracket_holds": report.bracket_holds}
        rep.emit(params, result, c.dominated and report.bracket_holds, started)
        started = time.perf_counter()


def cmd_mgf(args, rep):
    dist = _dist(args)
    weights = random_unit_vector(SeedSpec(args.seed, AUX_STREAM), args.length)
    variants = montecarlo.CENTERINGS if args.centered == "all" else (args.centered,)
    for lam in args.lam:
        for centered in variants:
            started = time.perf_counter()
            m = montecarlo.estimate_mgf(dist, weights, lam, centered, args.trials,
                                        SeedSpec(args.seed, 0), threads=args.threads)
            params = {"dist": dist.name, "eta": dist.eta, "lambda": lam, "centered": centered,
                      "length": args.length, "trials": args.trials}
            rep.emit(params, m.to_dict(), m.dominated, started)


def bench_one(d, k, trials, seed):
    """Median and p95 seconds per apply for both paths at one ``d``."""
    gen = SeedSpec(seed, AUX_STREAM).generator()
    a = gen.standard_normal(d)
    v = gen.standard_normal(d)
    M = PartialCirculant(a, k)
    M.spectrum()
    times = {"naive": [], "fft": []}
    out = {}
    for path, fn in (("naive", apply_naive), ("fft", apply_fft)):
        for _ in range(trials):
            t0 = time.perf_counter()
            out[path] = fn(M, v)
            times[path].append(time.perf_counter() - t0)
    ref = np.abs(out["naive"]).max()
    rel_diff = float(np.abs(out["fft"] - out["naive"]).max() / ref) if ref > 0 else 0.0
    stats = {}
    for path, ts in times.items():
        stats[path] = {"median": float(np.median(ts)), "p95": float(np.percentile(ts, 95))}
    return stats, rel_diff


def cmd_bench(args, rep):
    for d in args.d_grid:
        started = time.perf_counter()
        if d < args.k:
            raise InvalidArgument(f"every d in --d-grid must be >= k={args.k}, got {d}")
        stats, rel_diff = bench_one(d, args.k, args.trials, args.seed)
        passed = rel_diff <= 1e-9
        if d >= 4096:
            passed = passed and stats["fft"]["median"] < stats["naive"]["median"]
        params = {"d": d, "k": args.k, "trials": args.trials}
        rep.emit(params, {"timing": stats, "max_rel_diff": rel_diff,
                          "fft_faster": stats["fft"]["median"] < stats["naive"]["median"]},
                 passed, started)


def build_parser():
    p = _Parser(prog="cjl", description="Circulant Johnson-Lindenstrauss embeddings and bound checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (default: $CJL_SEED or 0)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--report", default=None, help="write JSON lines here instead of stdout")
    common.add_argument("--summary", action="store_true", help="append an aggregate record")
    common.add_argument("-v", "--verbose", action="store_true")

    emb = argparse.ArgumentParser(add_help=False)
    emb.add_argument("--epsilon", type=float, default=0.25)
    emb.add_argument("--delta", type=float, default=1.0)
    emb.add_argument("--tau", type=float, default=2.0)
    emb.add_argument("--budget", type=_fraction, default=1 / 3)
    emb.add_argument("--k", type=int, default=None)

    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("embed", parents=[common, emb], help="embed a point-set file")
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--format", choices=FORMATS, default=None,
                   help="force the format of both files (default: detect from the input)")
    s.add_argument("--dist", default="gaussian")
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("distort", parents=[common, emb], help="pairwise distortion over repeated embedders")
    s.add_argument("--input", default=None)
    s.add_argument("--format", choices=FORMATS, default=None)
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--d", type=int, default=512)
    s.add_argument("--dist", default="gaussian", help="comma-separated list allowed")
    s.add_argument("--repeats", type=int, default=100)
    s.set_defaults(func=cmd_distort)

    s = sub.add_parser("tail", parents=[common], help="norm tails against the analytic bound")
    s.add_argument("--d", type=int, default=256)
    s.add_argument("--k", type=int, default=64)
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--epsilon", type=_floats, default=[0.3, 0.4])
    s.add_argument("--delta", type=float, default=1.0)
    s.add_argument("--tau", type=float, default=2.0)
    s.add_argument("--theta", type=float, default=None)
    s.add_argument("--eta", type=float, default=None)
    s.add_argument("--dist", default="gaussian")
    s.add_argument("--side", choices=("upper", "lower", "both"), default="both")
    s.add_argument("--x", choices=("random", "basis"), default="random")
    s.add_argument("--trials", type=int, default=10_000)
    s.set_defaults(func=cmd_tail)

    s = sub.add_parser("spectral", parents=[common], help="spectral-norm tail of the decoupled matrix")
    s.add_argument("--d", type=int, default=256)
    s.add_argument("--k", type=int, default=64)
    s.add_argument("--x", choices=("random", "basis"), default="random")
    s.add_argument("--t-grid", dest="t_grid", type=_floats, default=[1.0, 1.5, 2.0, 2.5, 3.0])
    s.add_argument("--trials", type=int, default=10_000)
    s.set_defaults(func=cmd_spectral)

    s = sub.add_parser("mgf", parents=[common], help="moment generating function bounds")
    s.add_argument("--dist", default="rademacher")
    s.add_argument("--eta", type=float, default=None)
    s.add_argument("--lambda", dest="lam", type=_floats, default=[0.05, 0.1, 0.2, 0.3, 0.45])
    s.add_argument("--centered", choices=montecarlo.CENTERINGS + ("all",), default="all")
    s.add_argument("--length", type=int, default=16)
    s.add_argument("--trials", type=int, default=100_000)
    s.set_defaults(func=cmd_mgf)

    s = sub.add_parser("bench", parents=[common], help="naive vs FFT apply timing")
    s.add_argument("--d-grid", dest="d_grid", type=_ints, default=[1024, 4096, 16384, 65536])
    s.add_argument("--k", type=int, default=1024)
    s.add_argument("--trials", type=int, default=7)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.seed is None:
            args.seed = seed_from_env()
        stream = open(args.report, "w", encoding="utf-8") if args.report else sys.stdout
    except (InvalidArgument, OSError) as exc:
        print(f"cjl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep = Reporter(stream, args.command, args.seed)
    try:
        args.func(args, rep)
        if args.summary:
            rep.summary()
    except RegimeViolation as exc:
        print(f"cjl: regime violation: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (PointSetParseError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"cjl: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvalidArgument as exc:
        print(f"cjl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    finally:
        if stream is not sys.stdout:
            stream.close()
    return EXIT_OK if rep.all_passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
