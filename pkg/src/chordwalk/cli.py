"""``chordwalk`` command line.

Subcommands::

    chordwalk sample  BODY [--algorithm A] [--steps N] [--burn-in B] [--thin T]
                           [--seed S] [--chains C] [--format csv|jsonl] [--out PATH]
                           [--ambient] [--assume-quasi-concave]
    chordwalk bound   BODY --algorithm A [--variant as_stated|conservative] [--eps E]
    chordwalk compare BODY [--algorithm A] [--steps N] [--burn-in B] [--seed S]
                           [--oracle-samples N] [--sigma K] [--tv-band T] [--json]
    chordwalk info    BODY

Exit codes: 0 success, 1 comparison failed, 2 bad arguments, 3 body
construction failed, 4 sampling failed at run time, 5 no oracle for the body.
"""
from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .bounds import VARIANTS, AccessibilityError, body_bound, steps_to_tolerance
from .diagnostics import compare_samples
from .geometry import BodyDescriptor, BodyError, LiftedBody, make_body
from .oracle import RejectionError, oracle_for
from .records import digest, flatten_ambient, header_fields, write_csv, write_jsonl
from .sampler import ALGORITHMS, MAX_SEED, ChainConfig, make_rng, sample_chain

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BODY, EXIT_RUNTIME, EXIT_NO_ORACLE = 0, 1, 2, 3, 4, 5

# stream index for oracle draws; disjoint from chain indices in practice
ORACLE_STREAM = 2 ** 63 - 1


class UsageError(Exception):
    pass


def _count(text: str) -> int:
    """Non-negative integer, also accepting integral float notation such as ``1e6``."""
    try:
        v = int(text)
    except ValueError:
        try:
            f = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not (math.isfinite(f) and f == int(f)):
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        v = int(f)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return v


def _seed(text: str) -> int:
    v = _count(text)
    if v >= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be below 2**64")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chordwalk", description="Chord-walk samplers for convex bodies.")
    p.add_argument("--version", action="version", version=f"chordwalk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def body_arg(sp):
        sp.add_argument("body", help="body descriptor, e.g. ball:d=3, birkhoff:n=3, lifted:density=tent@ball:d=1")

    def chain_args(sp, steps):
        sp.add_argument("--algorithm", choices=ALGORITHMS, default="random_direction")
        sp.add_argument("--steps", type=_count, default=steps)
        sp.add_argument("--burn-in", type=_count, default=0)
        sp.add_argument("--thin", type=_count, default=1)
        sp.add_argument("--seed", type=_seed, default=0)
        sp.add_argument("--assume-quasi-concave", action="store_true",
                        help="assert that a lifted body's density is quasi-concave (required for lifted bodies)")

    s = sub.add_parser("sample", help="run chains and write samples")
    body_arg(s)
    chain_args(s, 1000)
    s.add_argument("--chains", type=_count, default=1)
    s.add_argument("--jobs", type=_count, default=0, help="worker processes (0: one per CPU, capped by --chains)")
    s.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    s.add_argument("--out", help="output path (default: standard output, no manifest)")
    s.add_argument("--ambient", action="store_true", help="also emit the ambient vector or matrix")

    b = sub.add_parser("bound", help="print convergence-bound constants")
    body_arg(b)
    b.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    b.add_argument("--variant", choices=VARIANTS, default="conservative")
    b.add_argument("--eps", type=float)
    b.add_argument("--json", action="store_true")

    c = sub.add_parser("compare", help="compare a chain with the body's oracle sampler")
    body_arg(c)
    chain_args(c, 100000)
    c.add_argument("--oracle-samples", type=_count, default=None, help="default: number of emitted chain points")
    c.add_argument("--sigma", type=float, default=4.0)
    c.add_argument("--tv-band", type=float, default=0.03)
    c.add_argument("--bins", type=_count, default=20)
    c.add_argument("--json", action="store_true")

    i = sub.add_parser("info", help="print body metadata")
    body_arg(i)
    return p


# --------------------------------------------------------------------------
# helpers

def _parse_descriptor(text: str) -> BodyDescriptor:
    try:
        return BodyDescriptor.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config(args) -> ChainConfig:
    try:
        return ChainConfig(algorithm=args.algorithm, steps=args.steps, burn_in=args.burn_in,
                           thin=args.thin, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_chain_args(body, config: ChainConfig, assume_qc: bool) -> None:
    if config.algorithm == "fixed_basis" and body.meta.basis is None:
        raise UsageError(f"{body.descriptor}: no accessibility constant or move basis is known; "
                         "only the random_direction algorithm applies")
    if isinstance(body, LiftedBody):
        if not assume_qc:
            raise UsageError("lifted bodies are sampled correctly only for quasi-concave densities; "
                             "pass --assume-quasi-concave to assert this")
        if config.algorithm == "random_direction" and body.shape != "concave":
            raise UsageError(f"{body.descriptor}: the density is not known to be concave, so lines in "
                             "general directions may cut the lifted body in several pieces; "
                             "use --algorithm fixed_basis")


def _run_one(descriptor_text: str, config: ChainConfig, chain: int, ambient: bool):
    body = make_body(descriptor_text)
    X = sample_chain(body, config, chain)
    amb = flatten_ambient(body.to_ambient(X)) if ambient else None
    return chain, X, amb


def _run_chains(descriptor_text: str, config: ChainConfig, chains: int, ambient: bool, jobs: int):
    workers = min(chains, jobs or os.cpu_count() or 1)
    if workers <= 1:
        for j in range(chains):
            yield _run_one(descriptor_text, config, j, ambient)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_one, descriptor_text, config, j, ambient) for j in range(chains)]
        for fut in futures:
            yield fut.result()


# --------------------------------------------------------------------------
# commands

def cmd_sample(args) -> int:
    desc = _parse_descriptor(args.body)
    config = _config(args)
    if args.chains < 1:
        raise UsageError("--chains must be >= 1")
    try:
        body = make_body(desc)
    except BodyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BODY
    _check_chain_args(body, config, args.assume_quasi_concave)
    header = header_fields(str(desc), config, args.chains)
    writer = write_csv if args.format == "csv" else write_jsonl
    blocks = _run_chains(str(desc), config, args.chains, args.ambient, args.jobs)
    try:
        if args.out is None:
            writer(sys.stdout, header, blocks)
            return EXIT_OK
        with open(args.out, "w", newline="\n") as fh:
            writer(fh, header, blocks)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"error: sampling failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    manifest = {
        "descriptor": str(desc),
        "config": {k: header[k] for k in ("algorithm", "steps", "burn_in", "thin", "seed", "chains")},
        "format": args.format,
        "ambient": bool(args.ambient),
        "version": __version__,
        "grammar": BodyDescriptor.GRAMMAR_VERSION,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "sha256": digest(args.out),
    }
    with open(args.out + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_bound(args) -> int:
    desc = _parse_descriptor(args.body)
    try:
        body = make_body(desc)
    except BodyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BODY
    try:
        bound = body_bound(body, args.algorithm, args.variant)
    except AccessibilityError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BODY
    out = {
        "body": str(desc),
        "algorithm": args.algorithm,
        "variant": bound.variant,
        "M": bound.M,
        "theta": bound.theta,
        "log10_theta": bound.log10_theta,
        "alpha": bound.alpha,
        "one_minus_alpha": -math.expm1(bound.log_alpha),
        "C": bound.C,
    }
    if args.eps is not None:
        if not args.eps > 0:
            raise UsageError("--eps must be positive")
        n = steps_to_tolerance(bound, args.eps)
        out["eps"] = args.eps
        out["n_for_eps"] = None if n == math.inf else n
    if args.json:
        print(json.dumps(out, indent=2))
        return EXIT_OK
    for key, v in out.items():
        if isinstance(v, float):
            v = f"{v:.17g}"
        elif v is None:
            v = "inf (alpha rounds to 1 in double precision)"
        print(f"{key:<16}{v}")
    return EXIT_OK


def cmd_compare(args) -> int:
    desc = _parse_descriptor(args.body)
    config = _config(args)
    try:
        body = make_body(desc)
    except BodyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BODY
    oracle = oracle_for(body)
    if oracle is None:
        print(f"error: no oracle sampler available for {desc}", file=sys.stderr)
        return EXIT_NO_ORACLE
    _check_chain_args(body, config, args.assume_quasi_concave)
    try:
        chain = sample_chain(body, config)
        n_oracle = args.oracle_samples or len(chain)
        ref = oracle.sample(n_oracle, make_rng(args.seed, ORACLE_STREAM))
    except RejectionError as exc:
        print(f"error: oracle failed: {exc}", file=sys.stderr)
        return EXIT_NO_ORACLE
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"error: sampling failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    report = compare_samples(chain, ref, sigma=args.sigma, tv_band=args.tv_band, bins=args.bins)
    if args.json:
        print(report.to_json())
    else:
        print(f"body {desc}  algorithm {config.algorithm}  chain points {len(chain)}  "
              f"oracle points {len(ref)} ({oracle.name}{', ' + str(oracle.stats) if oracle.stats else ''})")
        print(report.text())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_info(args) -> int:
    desc = _parse_descriptor(args.body)
    try:
        body = make_body(desc)
    except BodyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BODY
    m = body.meta
    print(f"body      {desc}")
    print(f"d         {m.d}")
    print(f"r         {m.r:.17g}")
    print(f"R         {m.R:.17g}")
    print(f"mu        {m.mu:.17g}")
    print(f"k         {m.k if m.k is not None else 'unknown'}")
    print(f"l         {m.l if m.l is not None else 'none (random_direction only)'}")
    print(f"x*        {np.array2string(m.x_star, precision=6)}")
    print(f"oracle    {'yes' if oracle_for(body) is not None else 'no'}")
    return EXIT_OK


COMMANDS = {"sample": cmd_sample, "bound": cmd_bound, "compare": cmd_compare, "info": cmd_info}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
