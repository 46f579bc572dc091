"""``diextract`` command line: extract, getbits, verify, bench, info."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from . import bench, oracle
from .coins import EXTRACTORS, entropy, get_extractor
from .dice import DieDistribution, generalized_extract
from .fixed_k import InsufficientEntropyError, RunawayIterationError, generate_k_bits
from .formats import IN_FORMATS, OUT_FORMATS, InputFormat, SymbolParseError, encode_bits, read_symbols

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY_FAILED = 3
EXIT_INSUFFICIENT = 4

# default exact distributions for the dice suite, one per alphabet size
DEFAULT_RHO = {
    2: ("1/3", "2/3"),
    3: ("1/5", "3/10", "1/2"),
    4: ("1/10", "1/5", "3/10", "2/5"),
    5: ("1/15", "2/15", "1/5", "4/15", "1/3"),
}


class UsageError(Exception):
    pass


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def parse_rho(text: str) -> DieDistribution:
    try:
        return DieDistribution(tuple(parse_rational(v) for v in text.split(",")))
    except ValueError as err:
        raise UsageError(str(err)) from None


def resolve_scheme(name: str, m: int):
    """Return ``(extractor, is_generalized)``; mutants are reachable as ``mutant:NAME``."""
    generalized = name.startswith("generalized:")
    base = name.split(":", 1)[1] if generalized else name
    if base.startswith("mutant:") or name.startswith("mutant:"):
        key = base.split(":", 1)[1]
        if key not in oracle.MUTANTS:
            raise UsageError(f"unknown mutant {key!r}; choose from {sorted(oracle.MUTANTS)}")
        psi = oracle.MUTANTS[key]
    else:
        try:
            psi = get_extractor(base)
        except ValueError as err:
            raise UsageError(str(err)) from None
    if m > 2 and not generalized:
        raise UsageError(f"scheme {name!r} takes coin input; use generalized:{base} for m={m}")
    return psi, generalized


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write_output(data: bytes, path: str | None) -> None:
    if path:
        with open(path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _emit_report(report: dict, path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, default=str)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=sys.stderr)


def cmd_extract(args) -> int:
    psi, generalized = resolve_scheme(args.scheme, args.m)
    in_format = args.in_format or ("ascii-die" if args.m > 2 else "ascii-coin")
    fmt = InputFormat(in_format, args.m, args.count)
    symbols = read_symbols(_read_input(args.input), fmt)
    if isinstance(symbols, str) and generalized:
        symbols = [1 if s == "H" else 0 for s in symbols]
    if not isinstance(symbols, str) and not generalized:
        symbols = "".join("H" if v else "T" for v in symbols)

    block = args.n or len(symbols)
    pieces = []
    used = 0
    if block:
        for start in range(0, len(symbols) - block + 1, block):
            chunk = symbols[start : start + block]
            pieces.append(generalized_extract(chunk, psi, args.m) if generalized else psi(chunk))
            used += block
    bits = "".join(pieces)
    _write_output(encode_bits(bits, args.out_format), args.output)
    _emit_report(
        {
            "command": "extract",
            "scheme": args.scheme,
            "m": args.m,
            "block": block,
            "blocks": len(pieces),
            "symbols_in": len(symbols),
            "symbols_unused": len(symbols) - used,
            "bits_out": len(bits),
            "bit_length": len(bits),
            "efficiency": len(bits) / used if used else 0.0,
            "out_format": args.out_format,
        },
        args.report,
    )
    return EXIT_OK


def cmd_getbits(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    if args.p is not None:
        spec = bench.SourceSpec("coin", float(parse_rational(args.p)), args.seed)
        stream = bench.simulate_source(spec)
        source = f"simulated coin p={args.p} seed={args.seed}"
    else:
        fmt = InputFormat(args.in_format or "ascii-coin", 2, args.count)
        stream = read_symbols(_read_input(args.input), fmt)
        source = args.input
    report = {"command": "getbits", "k": args.k, "source": source}
    try:
        rep = generate_k_bits(stream, args.k, args.max_iterations)
    except InsufficientEntropyError as err:
        report.update(status="insufficient-entropy", error=str(err), bits_before_failure=len(err.bits))
        _emit_report(report, args.report)
        print(f"diextract: {err}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except RunawayIterationError as err:
        report.update(status="runaway", error=str(err))
        _emit_report(report, args.report)
        print(f"diextract: {err}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    _write_output(encode_bits(rep.bits, args.out_format), args.output)
    report.update(
        status="ok",
        bits_out=len(rep.bits),
        bit_length=len(rep.bits),
        tosses=rep.total_consumed,
        iterations=rep.iterations,
        out_format=args.out_format,
    )
    _emit_report(report, args.report)
    return EXIT_OK


def _verify_uniformity_suite(args) -> dict:
    psi, _ = resolve_scheme(args.scheme, 2)
    biases = [parse_rational(v) for v in (args.p or "1/3,1/2,7/10").split(",")]
    checks = []
    for p in biases:
        for n in range(args.n + 1):
            rep = oracle.verify_uniformity(oracle.enumerate_coin(psi, n, p, cap=args.cap))
            checks.append({"n": n, "p": str(p), **rep.to_dict()})
    return {"checks": checks, "ok": all(c["ok"] for c in checks)}


def _verify_lemma1_suite(args) -> dict:
    psi, _ = resolve_scheme(args.scheme, 2)
    checks = []
    for n in range(args.n + 1):
        ok, witness = oracle.verify_lemma1_counts(psi, n, cap=args.cap)
        entry = {"n": n, "ok": ok}
        if witness:
            k1, k2, y, y2, c1, c2 = witness
            entry["witness"] = {"k1": k1, "k2": k2, "y": y, "y_prime": y2, "count_y": c1, "count_y_prime": c2}
        checks.append(entry)
    return {"checks": checks, "ok": all(c["ok"] for c in checks)}


def _verify_dice_suite(args) -> dict:
    base = args.scheme.split(":", 1)[1] if args.scheme.startswith("generalized:") else args.scheme
    psi, _ = resolve_scheme(base, 2)
    if args.rho:
        rho = parse_rho(args.rho)
    elif args.m in DEFAULT_RHO:
        rho = DieDistribution.parse(DEFAULT_RHO[args.m])
    else:
        raise UsageError(f"--rho is required for m={args.m}")
    if rho.m != args.m:
        raise UsageError(f"--rho has {rho.m} faces but --m is {args.m}")
    cap = args.cap if args.cap is not None else oracle.env_cap(oracle.DEFAULT_DIE_CAP)
    checks = []
    for n in range(args.n + 1):
        rep = oracle.verify_uniformity(oracle.enumerate_die(psi, args.m, n, rho, cap=cap, workers=args.workers))
        checks.append({"n": n, "m": args.m, **rep.to_dict()})
    return {"rho": [str(q) for q in rho.probs], "checks": checks, "ok": all(c["ok"] for c in checks)}


def _verify_phik_suite(args) -> dict:
    residual = parse_rational(args.residual)
    checks = []
    for p in [parse_rational(v) for v in (args.p or "1/3,1/2").split(",")]:
        dist, stats = oracle.enumerate_phi(args.k, p, residual)
        rep = oracle.verify_uniformity(dist)
        small = [s for s in stats if s.size < 1 << args.k]
        weak = [s for s in stats if s.full_length_share < Fraction(1, 2)]
        ok = rep.ok and not small and not weak
        checks.append({
            "k": args.k,
            "p": str(p),
            "residual": str(dist.residual),
            "prefix_sets": len(stats),
            "min_set_size": min(s.size for s in stats),
            "min_full_length_share": str(min(s.full_length_share for s in stats)),
            **rep.to_dict(),
            "ok": ok,
        })
    return {"checks": checks, "ok": all(c["ok"] for c in checks)}


SUITES = {
    "uniformity": _verify_uniformity_suite,
    "lemma1": _verify_lemma1_suite,
    "dice": _verify_dice_suite,
    "phik": _verify_phik_suite,
}


def cmd_verify(args) -> int:
    try:
        result = SUITES[args.suite](args)
    except oracle.CapExceededError as err:
        raise UsageError(str(err)) from None
    result = {"command": "verify", "suite": args.suite, "scheme": args.scheme, **result}
    text = json.dumps(result, indent=1, sort_keys=True)
    print(text)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    if not result["ok"]:
        for check in result["checks"]:
            if not check["ok"]:
                witness = check.get("witness") or (check.get("violations") or [None])[0]
                print(f"diextract: verification failed: {witness}", file=sys.stderr)
                break
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.rho:
        rho = parse_rho(args.rho)
        spec = bench.SourceSpec("die", tuple(float(q) for q in rho.probs), args.seed)
    else:
        p = float(parse_rational(args.p or "1/2"))
        try:
            spec = bench.SourceSpec("coin", p, args.seed)
        except ValueError as err:
            raise UsageError(str(err)) from None
    if args.scheme == "fixed-k":
        if spec.kind != "coin":
            raise UsageError("fixed-k takes a coin source (--p)")
        report = bench.bench_fixed_k(args.k, spec, args.trials, args.workers)
    else:
        base = args.scheme.split(":", 1)[1] if args.scheme.startswith("generalized:") else args.scheme
        if base not in EXTRACTORS:
            raise UsageError(f"unknown scheme {args.scheme!r}")
        if spec.kind == "coin" and args.scheme.startswith("generalized:"):
            raise UsageError("generalized schemes take a die source (--rho)")
        report = bench.bench_fixed_n(base, spec, args.n, args.trials, args.workers)
        if spec.kind == "die":
            report.scheme = f"generalized:{base}"
    print(report.to_text())
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            csv.writer(fh).writerows(report.csv_rows())
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report.summary(), fh, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_info(args) -> int:
    info = {
        "schemes": sorted(EXTRACTORS) + [f"generalized:{s}" for s in sorted(EXTRACTORS)] + ["fixed-k"],
        "mutants": [f"mutant:{s}" for s in sorted(oracle.MUTANTS)],
        "suites": sorted(SUITES),
        "in_formats": list(IN_FORMATS),
        "out_formats": list(OUT_FORMATS),
        "prng": bench.PRNG_ID,
        "caps": {
            "coin_n": oracle.env_cap(oracle.DEFAULT_COIN_CAP),
            "die_m_pow_n": oracle.env_cap(oracle.DEFAULT_DIE_CAP),
            "phi_k": oracle.MAX_PHI_K,
        },
        "exit_codes": {"ok": EXIT_OK, "usage": EXIT_USAGE, "verify_failed": EXIT_VERIFY_FAILED,
                       "insufficient_entropy": EXIT_INSUFFICIENT},
    }
    if args.scheme:
        psi, generalized = resolve_scheme(args.scheme, args.m)
        info["scheme"] = {"name": args.scheme, "m": args.m, "generalized": generalized}
        if args.p:
            h = entropy([float(parse_rational(args.p)), 1 - float(parse_rational(args.p))])
            info["scheme"]["entropy"] = h
    print(json.dumps(info, indent=1))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diextract", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def outputs(p):
        p.add_argument("--out-format", choices=OUT_FORMATS, default="ascii-bits")
        p.add_argument("--output", "-o", help="bit output file (default stdout)")
        p.add_argument("--report", help="JSON summary file (default stderr)")

    p = sub.add_parser("extract", help="extract unbiased bits from a symbol file")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--scheme", default="vn")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=0, help="block length (default: whole input)")
    p.add_argument("--in-format", choices=IN_FORMATS)
    p.add_argument("--count", type=int, help="symbol count for packed-binary input")
    outputs(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("getbits", help="produce exactly k unbiased bits from a coin stream")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", help="simulate a coin with this bias instead of reading input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in-format", choices=("ascii-coin", "packed-binary"))
    p.add_argument("--count", type=int)
    p.add_argument("--max-iterations", type=int, default=64)
    outputs(p)
    p.set_defaults(func=cmd_getbits)

    p = sub.add_parser("verify", help="run exact oracle checks")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--scheme", default="elias")
    p.add_argument("--n", type=int, default=8, help="check every length up to n")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--p", help="comma-separated rational biases")
    p.add_argument("--rho", help="comma-separated rational face probabilities")
    p.add_argument("--residual", default="1/1073741824")
    p.add_argument("--cap", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="Monte Carlo efficiency report")
    p.add_argument("--scheme", default="vn")
    p.add_argument("--p")
    p.add_argument("--rho")
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--k", type=int, default=1024)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv")
    p.add_argument("--report")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("info", help="list schemes, formats and limits")
    p.add_argument("--scheme")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--p")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SymbolParseError, ValueError) as err:
        print(f"diextract: {err}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as err:
        print(f"diextract: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
