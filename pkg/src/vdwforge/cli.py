"""Command-line entry point: ``vdwforge <subcommand> ...``.

Exit codes: 0 ok, 1 witness found by verify, 2 infeasible, 3 retries
exhausted, 4 indeterminate search, 64 usage error, 65 malformed certificate.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from fractions import Fraction

import numpy as np

from . import certificate
from .constructions import ConstructionFailed, erdos_turan_set
from .oracle import kappa_cyclic, vdw
from .pipeline import Infeasible, PipelineError, build_pipeline, plan_pipeline
from .planner import bound_table, decompose, parse_window
from .progressions import Coloring, default_workers, find_mono_ap
from .groups import cyclic

EXIT_OK = 0
EXIT_WITNESS = 1
EXIT_INFEASIBLE = 2
EXIT_RETRIES = 3
EXIT_INDETERMINATE = 4
EXIT_USAGE = 64
EXIT_DATAERR = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _window(text: str):
    try:
        return parse_window(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _krange(text: str) -> range:
    lo, sep, hi = text.partition(":")
    try:
        return range(int(lo), int(hi if sep else lo) + 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}") from None


def _threads(args) -> int:
    return max(1, args.threads) if args.threads is not None else default_workers()


# -- subcommands --------------------------------------------------------


def cmd_construct(args) -> int:
    if args.mode == "strict" and args.window is not None:
        raise UsageError("--window needs --mode forced (strict mode keeps the (1-eps)k window)")
    if not 0 < args.epsilon < Fraction(1, 10):
        raise UsageError("--epsilon must lie in (0, 1/10)")
    if args.k < 3 or args.r < 2:
        raise UsageError("need --k >= 3 and --r >= 2")
    if args.seed < 0 or args.seed >= 2**64:
        raise UsageError("--seed must be a uint64")
    try:
        res = build_pipeline(
            args.k,
            args.r,
            args.epsilon,
            seed=args.seed,
            mode=args.mode,
            window=args.window,
            retry_cap=args.retry_cap,
            resample_cap=args.resample_cap,
            repair_sweeps=args.repair_sweeps,
        )
    except Infeasible as e:
        print(f"infeasible: {e}", file=sys.stderr)
        for i, rep in enumerate(e.reports, 1):
            print(f"[stage {i}]\n{rep.to_text()}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PipelineError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConstructionFailed as e:
        print(f"retries exhausted: {e} (attempts={e.attempts})", file=sys.stderr)
        if e.witness is not None:
            print(f"last witness: {e.witness}", file=sys.stderr)
        return EXIT_RETRIES
    witness = find_mono_ap(res.coloring, args.k, workers=_threads(args))
    cert = certificate.Certificate(
        N=res.N,
        k=args.k,
        r=args.r,
        seed=args.seed,
        params=res.params_text(),
        attempts=res.attempts,
        colors=res.coloring.colors,
        verdict="VERIFIED" if witness is None else "UNVERIFIED",
    )
    if args.out:
        cert.write(args.out)
    else:
        sys.stdout.write(cert.dumps())
    print(f"N={res.N} k={args.k} r={args.r} seed={args.seed} attempts={res.attempts} {cert.verdict}",
          file=sys.stderr)
    return EXIT_OK if witness is None else EXIT_RETRIES


def cmd_verify(args) -> int:
    try:
        cert = certificate.load(args.path)
    except certificate.CertificateError as e:
        print(f"{args.path}: malformed certificate: {e}", file=sys.stderr)
        return EXIT_DATAERR
    except OSError as e:
        print(f"{args.path}: {e.strerror}", file=sys.stderr)
        return EXIT_DATAERR
    witness = cert.verify(workers=_threads(args))
    if witness is None:
        print(f"VERIFIED N={cert.N} k={cert.k} r={cert.r}: no monochromatic non-trivial {cert.k}-AP")
        return EXIT_OK
    print(f"FAILED N={cert.N} k={cert.k} r={cert.r}: monochromatic {cert.k}-AP {witness}")
    return EXIT_WITNESS


def cmd_vdw(args) -> int:
    res = vdw(args.k, args.r, args.limit, args.budget)
    print(res)
    if res.exact and args.witness:
        print("witness " + "".join(map(str, res.witness)))
    return EXIT_OK if res.exact else EXIT_INDETERMINATE


def cmd_kappa(args) -> int:
    res = kappa_cyclic(args.n, args.r, args.k_limit, args.budget)
    print(res)
    if res.exact and args.witness:
        print("witness " + " ".join(map(str, res.witness)))
    return EXIT_OK if res.exact else EXIT_INDETERMINATE


def cmd_params(args) -> int:
    a, b = decompose(args.r)
    base = a * 3**b
    verdict = f"beats {args.r}" if base > args.r else f"no gain over {args.r}"
    print(f"a={a} b={b} base={base} ({verdict})")
    if args.k is not None:
        for row in bound_table(args.r, args.k):
            print(f"k={row.k} erdos_lovasz={float(row.erdos_lovasz):.6g} blowup_base^k={row.blowup_bound}")
        k = args.k[-1]
        try:
            plan = plan_pipeline(k, args.r, args.epsilon, args.window)
        except PipelineError as e:
            print(f"plan k={k}: {e}")
            return EXIT_OK
        print(f"plan k={k}: primes={','.join(map(str, plan.primes))} t0={plan.t0} t'={plan.t_prime} N={plan.N}")
        for i, rep in enumerate(plan.reports, 1):
            print(f"[stage {i}]\n{rep.to_text()}")
    return EXIT_OK


def cmd_etset(args) -> int:
    try:
        S = erdos_turan_set(args.p, args.t)
    except ValueError as e:
        raise UsageError(str(e)) from None
    print(" ".join(map(str, sorted(S))))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.n < 1 or args.k < 2 or args.r < 1:
        raise UsageError("need --n >= 1, --k >= 2, --r >= 1")
    rng = np.random.default_rng(args.seed)
    c = Coloring(cyclic(args.n), args.r, rng.integers(1, args.r + 1, size=args.n))
    t = time.perf_counter()
    w = find_mono_ap(c, args.k, mode=args.mode, workers=_threads(args))
    dt = time.perf_counter() - t
    rate = args.n / dt if dt > 0 else float("inf")
    verdict = "none" if w is None else f"witness {w}"
    print(f"N={args.n} k={args.k} r={args.r} seed={args.seed} mode={args.mode} {verdict}")
    print(f"wall={dt:.3f}s rate={rate:.0f} elements/s")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vdwforge", description="AP-free colorings of Z/N: construct, verify, explore.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="run the blow-up pipeline and write a certificate")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--epsilon", type=_fraction, default=Fraction(1, 20))
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--mode", choices=["strict", "forced"], default="forced")
    c.add_argument("--window", type=_window, help="prime window lo:hi, meaning (lo, hi]")
    c.add_argument("--out", help="certificate path (default: stdout)")
    c.add_argument("--retry-cap", type=int, default=100)
    c.add_argument("--resample-cap", type=int, default=100_000)
    c.add_argument("--repair-sweeps", type=int, default=50, help="0 disables shift repair")
    c.add_argument("--threads", type=int)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="re-verify a certificate from the file alone")
    v.add_argument("path")
    v.add_argument("--threads", type=int)
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("vdw", help="exact w(k;r) by backtracking")
    w.add_argument("--k", type=int, required=True)
    w.add_argument("--r", type=int, required=True)
    w.add_argument("--limit", type=int, default=200)
    w.add_argument("--budget", type=int, default=50_000_000)
    w.add_argument("--witness", action="store_true")
    w.set_defaults(func=cmd_vdw)

    kp = sub.add_parser("kappa", help="exact kappa(Z/N; r) by backtracking")
    kp.add_argument("--n", type=int, required=True)
    kp.add_argument("--r", type=int, required=True)
    kp.add_argument("--k-limit", type=int, default=12)
    kp.add_argument("--budget", type=int, default=50_000_000)
    kp.add_argument("--witness", action="store_true")
    kp.set_defaults(func=cmd_kappa)

    pa = sub.add_parser("params", help="decomposition, bound table and feasibility report")
    pa.add_argument("--r", type=int, required=True)
    pa.add_argument("--k", type=_krange, help="k or kmin:kmax")
    pa.add_argument("--epsilon", type=_fraction, default=Fraction(1, 20))
    pa.add_argument("--window", type=_window)
    pa.set_defaults(func=cmd_params)

    e = sub.add_parser("etset", help="digit set of Z/p^t avoiding the digit 0")
    e.add_argument("--p", type=int, required=True)
    e.add_argument("--t", type=int, required=True)
    e.set_defaults(func=cmd_etset)

    b = sub.add_parser("bench", help="verifier throughput on a seeded random coloring")
    b.add_argument("--n", type=int, default=100_000)
    b.add_argument("--k", type=int, default=10)
    b.add_argument("--r", type=int, default=4)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--mode", choices=["fast", "naive"], default="fast")
    b.add_argument("--threads", type=int)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"vdwforge: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"vdwforge: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
