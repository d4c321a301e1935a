"""Command-line interface.

Exit codes: 0 pass, 1 structural or parse error, 2 certified failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import io
from .classical import MAX_N_DEFAULT, build_lp, solve_exact
from .errors import PomError
from .optimal import optimal_strategy, scramble
from .protocol import check_parity_oblivious, classical_bound, quantum_bound, success_probability
from .selftest import Tolerances, certify

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2
TOL_NAMES = ("structural", "certification", "eigen")


def tolerances(args) -> Tolerances:
    values = {}
    profile = os.environ.get("POM_TOL_PROFILE")
    if profile:
        data = io.read_json(profile)
        if not isinstance(data, dict):
            raise PomError(f"POM_TOL_PROFILE {profile}: expected a JSON object")
        unknown = set(data) - set(TOL_NAMES)
        if unknown:
            raise PomError(f"POM_TOL_PROFILE {profile}: unknown tolerances {sorted(unknown)}")
        values.update({k: float(v) for k, v in data.items()})
    for name in TOL_NAMES:
        v = getattr(args, f"tol_{name}", None)
        if v is not None:
            values[name] = v
    try:
        return Tolerances(**values)
    except ValueError as exc:
        raise PomError(str(exc)) from None


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _bounds_line(n: int) -> str:
    return f"classical {io.fraction_str(classical_bound(n))}, quantum {quantum_bound(n):.6f}"


# -- commands ------------------------------------------------------------------


def cmd_generate(args) -> int:
    strategy = optimal_strategy(args.n)
    io.save_strategy(args.out, strategy, seed=args.seed)
    p = success_probability(strategy)
    print(f"wrote {args.out}: n={strategy.n} d={strategy.d}")
    print(f"success probability {p:.10f}; {_bounds_line(args.n)}")
    return EXIT_PASS


def cmd_bounds(args) -> int:
    n = args.n
    classical = classical_bound(n)
    text = f"classical {io.fraction_str(classical)}"
    out = {"n": n, "classical_bound": io.fraction_str(classical), "quantum_bound": quantum_bound(n)}
    code = EXIT_PASS
    if args.lp:
        if n > MAX_N_DEFAULT and not args.force:
            raise PomError(f"n={n} exceeds the LP oracle cap n <= {MAX_N_DEFAULT}; use --force")
        sol = solve_exact(build_lp(n, allow_large=args.force))
        match = sol.value == classical
        text += f" (LP: {io.fraction_str(sol.value)}, {'match' if match else 'MISMATCH'})"
        out["lp"] = {
            "n": n,
            "value_numerator": sol.value.numerator,
            "value_denominator": sol.value.denominator,
            "iterations": sol.iterations,
            "match": match,
            "witness_model": [[io.fraction_str(w) for w in row] for row in sol.model.weights],
        }
        code = EXIT_PASS if match else EXIT_FAIL
    text += f", quantum {quantum_bound(n):.6f}"
    print(text)
    if args.out:
        io.write_json(args.out, out)
    return code


def cmd_verify(args) -> int:
    tol = tolerances(args)
    strategy = io.load_strategy(args.input, tol.structural)
    n = strategy.n
    p = success_probability(strategy)
    parity = check_parity_oblivious(strategy.preparations, tol.certification)
    flags = {
        "parity_oblivious": parity.passed,
        "optimal_success": p >= quantum_bound(n) - tol.certification,
    }
    report = {
        "n": n,
        "d": strategy.d,
        "label": strategy.label,
        "success_probability": p,
        "classical_bound": float(classical_bound(n)),
        "classical_bound_exact": io.fraction_str(classical_bound(n)),
        "quantum_bound": quantum_bound(n),
        "parity_residual": parity.max_residual,
        "parity_residuals": parity.per_s_residuals,
        "exceeds_classical": p > float(classical_bound(n)),
        "pass_flags": flags,
        "passed": all(flags.values()),
    }
    print(f"n={n} d={strategy.d} success probability {p:.10f}; {_bounds_line(n)}")
    print(f"parity residual {parity.max_residual:.3e}; {'PASS' if report['passed'] else 'FAIL'}")
    if args.out:
        io.write_json(args.out, report)
    return EXIT_PASS if report["passed"] else EXIT_FAIL


def cmd_scramble(args) -> int:
    tol = tolerances(args)
    strategy = io.load_strategy(args.input, tol.structural)
    scrambled, v = scramble(strategy, args.J, args.seed)
    io.save_strategy(args.out, scrambled, seed=args.seed)
    sidecar = sidecar_path(args.out)
    io.write_json(sidecar, {"seed": args.seed, "J": args.J, "unitary": io.encode_matrix(v)})
    print(f"wrote {args.out} (d={scrambled.d}) and {sidecar}")
    print(f"success probability {success_probability(scrambled):.10f}")
    return EXIT_PASS


def sidecar_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".unitary.json")


def cmd_extract(args) -> int:
    tol = tolerances(args)
    strategy = io.load_strategy(args.input, tol.structural)
    report = certify(strategy, tol)
    print(f"n={report.n} d={report.d} success probability {report.success_probability:.10f}; "
          f"{_bounds_line(report.n)}")
    print(f"parity residual {report.parity_residual:.3e}")
    if report.extraction is not None:
        f = report.extraction
        print(f"extraction: m={f.m} J={f.J} sectors (J+, J-) = {f.sectors}; "
              f"max residual {f.residuals.max():.3e}; "
              f"max state residual {report.state_map_residuals.max():.3e}")
    else:
        print(f"extraction failed: {report.failure_reason}")
    for name, ok in report.checks.items():
        print(f"  {name:<16} {'ok' if ok else 'FAIL'}")
    print("PASS" if report.passed else "FAIL")
    if args.out:
        io.write_json(args.out, io.report_to_json(report, seed=args.seed))
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_geometry(args) -> int:
    if not 2 <= args.n <= 10:
        raise PomError("geometry supports 2 <= n <= 10")
    vpath, ppath = io.write_geometry(args.n, args.out_dir)
    print(f"wrote {vpath} and {ppath}")
    return EXIT_PASS


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    for name in TOL_NAMES:
        common.add_argument(f"--tol-{name}", type=_positive_float, default=None, metavar="TOL")

    parser = argparse.ArgumentParser(
        prog="pomcert",
        description="Parity-oblivious multiplexing: optimal strategies, bounds and self-testing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write the optimal strategy for n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bounds", parents=[common], help="classical and quantum bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lp", action="store_true", help="run the exact classical LP oracle")
    p.add_argument("--force", action="store_true", help=f"allow the LP for n > {MAX_N_DEFAULT}")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", parents=[common], help="score a strategy file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scramble", parents=[common], help="hide a strategy behind a random unitary")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--J", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scramble)

    p = sub.add_parser("extract", parents=[common], help="certify a strategy (self-test)")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("geometry", parents=[common], help="Clifford-Bloch hypercube CSVs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_geometry)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PomError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
