"""Command-line front end.

Exit codes: 0 success, 2 parse or usage error, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .classify import classify
from .intlinalg import IntMatrix, determinantal_divisors, factors_from_divisors, smith_normal_form
from .presentation import PresentationParseError, load_presentation
from .randgen import ExperimentConfig, estimate_full_rank_probability, exact_full_rank_probability
from .tietze import DEFAULT_MAX_LENGTH, WordLengthExceeded, normalize_to_snf
from .words import WordParseError

EXIT_OK, EXIT_PARSE, EXIT_LIMIT = 0, 2, 3
FORMATS = {
    "analyze": ("text", "json"),
    "normalize": ("text", "json"),
    "snf": ("text", "json"),
    "experiment": ("text", "json", "csv"),
    "exact-prob": ("text", "json", "csv"),
}


class LimitExceeded(Exception):
    pass


def _lengths(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _read_matrix(source: str) -> IntMatrix:
    text = source
    if not source.lstrip().startswith(("[", "{")):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    obj = json.loads(text)
    if isinstance(obj, dict):
        return IntMatrix.from_json(obj)
    return IntMatrix.from_rows(([int(x) for x in row] for row in obj), cols=len(obj[0]) if obj else 0)


def run_analyze(args) -> str:
    p = load_presentation(args.input)
    report = classify(p, max_length=args.limit_word_length)
    return _dump(report.to_json()) if args.format == "json" else report.summary()


def run_normalize(args) -> str:
    p = load_presentation(args.input)
    result = normalize_to_snf(p, max_length=args.limit_word_length)
    if args.format == "json":
        return _dump(result.to_json())
    q = result.presentation
    lines = [q.to_text().rstrip("\n"), "", "forward (old -> new):"]
    lines += [f"  {p.generator_names[j]} -> {q.render_word(w)}" for j, w in enumerate(result.iso.forward)]
    lines.append("backward (new -> old):")
    lines += [f"  {q.generator_names[j]} -> {p.render_word(w)}" for j, w in enumerate(result.iso.backward)]
    lines.append("invariant factors: " + " ".join(map(str, result.snf.invariant_factors)))
    lines.append(f"operations: {len(result.snf.op_log)}")
    return "\n".join(lines)


def run_snf(args) -> str:
    try:
        M = _read_matrix(args.input)
    except (json.JSONDecodeError, ValueError, TypeError, KeyError) as e:
        raise PresentationParseError(f"bad matrix: {e}") from None
    s = smith_normal_form(M)
    divisors = None
    if args.oracle:
        try:
            divisors = determinantal_divisors(M, max_dim=args.limit_minor_dim)
        except ValueError as e:
            raise LimitExceeded(str(e)) from None
    if args.format == "json":
        out = s.to_json()
        if divisors is not None:
            out["determinantal_divisors"] = divisors
        return _dump(out)
    lines = ["invariant factors: " + " ".join(map(str, s.invariant_factors)), f"rank: {s.rank}"]
    for label, mat in (("U", s.U), ("D", s.D), ("V", s.V)):
        lines.append(f"{label} =")
        lines += ["  " + " ".join(f"{x:>4}" for x in row) for row in mat.entries]
    if divisors is not None:
        agree = factors_from_divisors(divisors) == s.invariant_factors
        lines.append("determinantal divisors: " + " ".join(map(str, divisors)) + ("  (agree)" if agree else "  (MISMATCH)"))
    return "\n".join(lines)


def run_experiment(args) -> str:
    cfg = ExperimentConfig(
        n=args.n,
        m=args.m,
        lengths=args.lengths,
        trials=args.trials,
        master_seed=args.seed,
        confidence=args.confidence,
    )
    result = estimate_full_rank_probability(cfg, workers=args.workers)
    if args.format == "csv":
        return result.to_csv().rstrip("\n")
    if args.format == "json":
        return result.dumps()
    lines = [f"n={cfg.n} m={cfg.m} trials={cfg.trials} seed={cfg.master_seed} confidence={cfg.confidence}"]
    for r in result.rows:
        lines.append(f"  ell={r.ell:>5}  p_hat={r.p_hat:.4f}  [{r.ci_low:.4f}, {r.ci_high:.4f}]  ({r.successes}/{r.trials})")
    return "\n".join(lines)


def run_exact_prob(args) -> str:
    try:
        p = exact_full_rank_probability(args.n, args.m, args.ell, max_n=args.max_n, max_m=args.max_m, max_ell=args.max_ell)
    except ValueError as e:
        raise LimitExceeded(str(e)) from None
    if args.format == "json":
        return _dump({"n": args.n, "m": args.m, "ell": args.ell, "probability": str(p), "float": float(p)})
    if args.format == "csv":
        return f"n,m,ell,probability,float\n{args.n},{args.m},{args.ell},{p},{float(p)!r}"
    return str(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metapres", description="Full-rank presentations of metabelian groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(sp, name):
        sp.add_argument("--format", default="text", help="one of: " + ", ".join(FORMATS[name]))

    for name, func, help_ in (
        ("analyze", run_analyze, "structure report for a presentation"),
        ("normalize", run_normalize, "isomorphic presentation in Smith normal form"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("input", help="presentation file, or inline '< a, b | ... >'")
        sp.add_argument("--limit-word-length", type=int, default=DEFAULT_MAX_LENGTH)
        fmt(sp, name)
        sp.set_defaults(func=func)

    sp = sub.add_parser("snf", help="Smith normal form of an integer matrix")
    sp.add_argument("input", help="matrix JSON file, or inline JSON such as '[[2,4],[4,4]]'")
    sp.add_argument("--oracle", action="store_true", help="also compute determinantal divisors")
    sp.add_argument("--limit-minor-dim", type=int, default=6)
    fmt(sp, "snf")
    sp.set_defaults(func=run_snf)

    sp = sub.add_parser("experiment", help="Monte Carlo full-rank frequency in the few-relators model")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--lengths", type=_lengths, required=True)
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--confidence", type=float, default=0.99)
    sp.add_argument("--workers", type=int, default=1)
    fmt(sp, "experiment")
    sp.set_defaults(func=run_experiment)

    sp = sub.add_parser("exact-prob", help="exact full-rank probability (small parameters)")
    sp.add_argument("n", type=int)
    sp.add_argument("m", type=int)
    sp.add_argument("ell", type=int)
    sp.add_argument("--max-n", type=int, default=3)
    sp.add_argument("--max-m", type=int, default=3)
    sp.add_argument("--max-ell", type=int, default=10)
    fmt(sp, "exact-prob")
    sp.set_defaults(func=run_exact_prob)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format not in FORMATS[args.command]:
        print(f"error: format {args.format!r} is not available for {args.command}", file=sys.stderr)
        return EXIT_PARSE
    try:
        out = args.func(args)
    except (PresentationParseError, WordParseError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (WordLengthExceeded, LimitExceeded) as e:
        print(f"limit exceeded: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
