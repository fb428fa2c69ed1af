"""Command-line entry point.

Exit codes: 0 success, 1 certification or acceptance failure, 2 invalid
input, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from netbell import serialization
from netbell.classical import (
    MAX_ETA_M,
    brute_force_delta,
    classical_bound,
    eta_brute_force,
    eta_closed_form,
)
from netbell.errors import CapacityError, InvalidParameter, NetbellError
from netbell.realization import optimal_realization
from netbell.sampling import delta_with_error, estimate_from_counts, sample_counts
from netbell.scenarios import BILOCAL, STAR, bilocal_quantum_optimum, build_scenario
from netbell.seesaw import SeesawConfig, seesaw_optimize
from netbell.verifier import ALGEBRA_TOL, VALUE_TOL, certify

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_CAPACITY = 0, 1, 2, 3
SIG_DIGITS = 12


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def round_sig(x: float) -> float:
    """Round to 12 significant digits, ties to even on the decimal value."""
    return float(f"{x:.{SIG_DIGITS}g}")


def _rounded(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


def _text_lines(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _text_lines(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], dict):
        for i, v in enumerate(obj):
            yield from _text_lines(v, f"{prefix}{i}.")
    else:
        key = prefix[:-1]
        if isinstance(obj, list):
            yield f"{key}: " + ", ".join(repr(v) if isinstance(v, float) else str(v) for v in obj)
        elif isinstance(obj, float):
            yield f"{key}: {obj!r}"
        else:
            yield f"{key}: {obj}"


def emit(result: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    result = _rounded(result)
    if fmt == "json":
        out.write(json.dumps(result, indent=2) + "\n")
    else:
        for line in _text_lines(result):
            out.write(line + "\n")


def _scenario_from_args(args):
    if args.scenario == STAR:
        return build_scenario(STAR, n=args.n if args.n is not None else 2)
    return build_scenario("bilocal", m=args.m if args.m is not None else 3, policy=args.policy)


def _add_scenario(p):
    p.add_argument("--scenario", choices=["star", "bilocal"], required=True)
    p.add_argument("--n", type=int, help="edge parties of the star network (default 2)")
    p.add_argument("--m", type=int, help="central inputs of the bilocal network (default 3)")
    p.add_argument("--policy", choices=["lex-first-zero", "minority-weight"], default="lex-first-zero")


def _add_format(p):
    p.add_argument("--format", choices=["text", "json"], default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netbell", description="Network Bell inequalities and self-testing checks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="classical bound and quantum optimum")
    _add_scenario(p)
    p.add_argument("--brute-force", action="store_true", help="also enumerate deterministic strategies")
    _add_format(p)

    p = sub.add_parser("realize", help="write the optimal realization file")
    _add_scenario(p)
    p.add_argument("--out", required=True, type=Path)
    _add_format(p)

    p = sub.add_parser("certify", help="certify the relations of a realization file")
    p.add_argument("--in", dest="infile", required=True, type=Path)
    p.add_argument("--tol", type=float, default=VALUE_TOL, help="value tolerance (default 1e-9)")
    p.add_argument("--algebra-tol", type=float, default=ALGEBRA_TOL,
                   help="tolerance for commutator/anticommutator identities (default 1e-12)")
    _add_format(p)

    p = sub.add_parser("optimize", help="see-saw maximization")
    _add_scenario(p)
    p.add_argument("--dims", required=True, help="comma-separated subsystem dimensions")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-sweeps", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", type=Path, help="write the best realization here")
    _add_format(p)

    p = sub.add_parser("sample", help="finite-shot estimate of the correlators")
    p.add_argument("--in", dest="infile", required=True, type=Path)
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--counts-out", type=Path, help="CSV of (input tuple, outcome tuple, count)")
    _add_format(p)

    p = sub.add_parser("selftest", help="run the built-in acceptance suite")
    _add_format(p)
    return parser


def cmd_bound(args) -> int:
    if args.scenario == STAR:
        sc = _scenario_from_args(args)
        result = {"scenario": sc.describe(), "classical": classical_bound(sc), "quantum": sc.quantum_optimum}
        if args.brute_force:
            result["brute_force"] = brute_force_delta(sc)
        emit(result, args.format)
        return EXIT_OK
    # closed forms need no encoding, so any m is fine until enumeration is asked for
    m = args.m if args.m is not None else 3
    if not isinstance(m, int) or m < 2:
        raise InvalidParameter(f"bilocal scenario needs integer m >= 2, got {m!r}")
    result = {
        "scenario": {"kind": BILOCAL, "m": m, "policy": args.policy},
        "classical": float(eta_closed_form(m)),
        "quantum": bilocal_quantum_optimum(m),
    }
    if args.brute_force:
        if m > MAX_ETA_M:
            raise CapacityError(f"brute-force enumeration supports m <= {MAX_ETA_M}, got {m}")
        sc = _scenario_from_args(args)
        result["brute_force"] = brute_force_delta(sc)
        result["eta_brute_force"] = eta_brute_force(sc.scheme)[0]
    emit(result, args.format)
    return EXIT_OK


def cmd_realize(args) -> int:
    r = optimal_realization(_scenario_from_args(args))
    serialization.save(r, args.out)
    emit({"scenario": r.scenario.describe(), "dims": list(r.dims), "written": str(args.out)}, args.format)
    return EXIT_OK


def cmd_certify(args) -> int:
    r = serialization.load(args.infile)
    report = certify(r, tol=args.tol, algebra_tol=args.algebra_tol)
    emit(report.as_dict(), args.format)
    return EXIT_OK if report.overall else EXIT_FAIL


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise _UsageError(f"--dims must be comma-separated integers, got {text!r}") from None


def cmd_optimize(args) -> int:
    sc = _scenario_from_args(args)
    config = SeesawConfig(dims=_parse_dims(args.dims), restarts=args.restarts,
                          max_sweeps=args.max_sweeps, tol=args.tol, seed=args.seed)
    res = seesaw_optimize(sc, config)
    result = {
        "scenario": sc.describe(),
        "best": res.value,
        "quantum": sc.quantum_optimum,
        "gap": sc.quantum_optimum - res.value,
        "best_restart": res.best_restart,
        "restart_values": res.restart_values,
    }
    if args.out is not None:
        serialization.save(res.realization, args.out)
        result["written"] = str(args.out)
    emit(result, args.format)
    return EXIT_OK


def cmd_sample(args) -> int:
    r = serialization.load(args.infile)
    counts = sample_counts(r, args.shots, args.seed)
    table = estimate_from_counts(r, counts)
    delta, delta_se = delta_with_error(r, table)
    if args.counts_out is not None:
        with open(args.counts_out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["inputs", "outcomes", "count"])
            for inp, out, n in counts.rows():
                w.writerow([" ".join(str(x + 1) for x in inp), " ".join(f"{o:+d}" for o in out), n])
    emit({
        "scenario": r.scenario.describe(),
        "shots": args.shots,
        "seed": args.seed,
        "correlators": list(table.values),
        "std_errors": list(table.std_errors),
        "delta": delta,
        "delta_std_error": delta_se,
        "classical": r.scenario.classical_bound,
        "violation_in_std_errors": (delta - r.scenario.classical_bound) / delta_se if delta_se > 0 else None,
    }, args.format)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from netbell.acceptance import run_all

    echo = (lambda line: print(line)) if args.format == "text" else None
    results = run_all(echo=echo)
    if args.format == "json":
        emit({"criteria": [{"number": r.number, "title": r.title, "pass": r.passed,
                            "seconds": r.seconds,
                            "failed_checks": [n for n, ok in r.checks if not ok]} for r in results],
              "overall": all(r.passed for r in results)}, "json")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {
    "bound": cmd_bound,
    "realize": cmd_realize,
    "certify": cmd_certify,
    "optimize": cmd_optimize,
    "sample": cmd_sample,
    "selftest": cmd_selftest,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (NetbellError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
