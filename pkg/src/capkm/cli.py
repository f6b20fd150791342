"""Command-line interface: ``capkm solve | gen | bench``.

Exit codes: 0 success, 1 usage, 2 invalid instance, 3 infeasible,
4 verifier failure, 5 numerical-margin abort.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from pathlib import Path

import numpy as np

from . import io
from .ckl import CklInstance, solve_ckl
from .generate import GEOMETRIES, gen_ckl_instance, gen_instance
from .lp import solve_ckm_relaxation
from .model import InfeasibleError, InvalidInstanceError, InvariantError, NumericalMarginError
from .oracle import exact_opt
from .pipeline import EASY, solve
from .stars import refine
from .trace import build_trace, render_trace
from .verify import verify_guarantees

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_VERIFY, EXIT_MARGIN = range(6)
BENCH_HEADER = [
    "seed", "n", "alpha", "C_LP", "OPT?", "rounded cost", "ratio-vs-LP",
    "centers", "max-load-ratio", "easy-case?",
]
OPT_MAX_N = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _alpha(text: str) -> float:
    try:
        a = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not a >= 4:
        raise argparse.ArgumentTypeError("alpha must be ≥ 4")
    return a


def _n_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError(f"empty or invalid range {text!r}")
    return lo, hi


def _alpha_list(text: str) -> list[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("alpha list is empty")
    return [_alpha(p) for p in parts]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="capkm", description="Capacitated k-median LP rounding")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="round an instance file")
    s.add_argument("instance", type=Path)
    s.add_argument("--alpha", type=_alpha, default=4.0)
    s.add_argument("--model", choices=("ckm", "ckl"), default=None,
                   help="default: ckl if the file has a 'facilities' field")
    s.add_argument("--out", type=Path, default=None,
                   help="solution file (default: <instance>.solution.json)")
    s.add_argument("--trace", action="store_true", help="also write <solution>.trace.txt")
    s.add_argument("--check", action="store_true", help="assert every step's invariants")
    s.add_argument("--refine", action="store_true",
                   help="report the optimal reassignment cost for the chosen centers")

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--n", type=int, required=True, help="locations (clients with --facilities)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--demand-max", type=int, default=10)
    g.add_argument("--capacity", type=float, default=None)
    g.add_argument("--k", type=int, default=None)
    g.add_argument("--geometry", choices=GEOMETRIES, default="plane")
    g.add_argument("--facilities", type=int, default=None,
                   help="emit a facility/client instance with this many facilities")
    g.add_argument("--out", type=Path, default=None, help="default: stdout")

    b = sub.add_parser("bench", help="run pipeline + verifier over generated instances")
    b.add_argument("--count", type=int, default=20)
    b.add_argument("--n-range", type=_n_range, default=(6, 12))
    b.add_argument("--alpha-list", type=_alpha_list, default=[4.0])
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", type=Path, default=None, help="CSV file (default: stdout)")
    return p


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_solve(args) -> int:
    inst = io.read_instance(args.instance)
    model = args.model or ("ckl" if isinstance(inst, CklInstance) else "ckm")
    if model == "ckl" and not isinstance(inst, CklInstance):
        raise UsageError("--model ckl needs an instance with a 'facilities' field")
    if model == "ckm" and isinstance(inst, CklInstance):
        raise UsageError("facility/client instance given with --model ckm")
    out = args.out or args.instance.with_suffix(".solution.json")

    if model == "ckl":
        res = solve_ckl(inst, args.alpha, check=args.check)
        sol, inner, lp_cost, k = res.solution, res.inner, res.lp_cost, inst.k
        failed = [c.name for c in res.checks if not c.ok]
        extra = {
            "reduction": {
                "values": {"facility/client C_LP": res.lp_cost, "induced demand d1": [float(v) for v in inner.instance.demand]},
                "checks": [{"name": c.name, "value": float(c.value), "bound": float(c.bound), "ok": bool(c.ok)}
                           for c in res.checks],
            },
            "result": {"centers": sol.centers, "cost": sol.cost, "max_load_ratio": sol.max_load_ratio},
        }
    else:
        inner = solve(inst, args.alpha, check=args.check)
        sol, lp_cost, k = inner.solution, inner.lp_cost, inst.k
        report = verify_guarantees(inst, inner.frac, sol, args.alpha)
        failed = report.failures()
        extra = None

    io.write_solution(sol, args.alpha, inner.path, out)
    ratio = sol.cost / lp_cost if lp_cost > 0 else 0.0
    print(f"k: {k}")
    print(f"centers opened: {int(sol.open.sum())} {sol.centers}")
    print(f"max load ratio: {sol.max_load_ratio!r}")
    print(f"cost: {sol.cost!r}")
    print(f"C_LP: {lp_cost!r}")
    print(f"cost/C_LP: {ratio!r}")
    print(f"path: {inner.path}")
    if args.refine and model == "ckm":
        print(f"refined cost (same centers, optimal reassignment): {refine(inst, sol, args.alpha)!r}")
    print(f"solution: {out}")
    if args.trace:
        trace_path = out.with_name(out.name.removesuffix(".json") + ".trace.txt")
        trace_path.write_text(render_trace(build_trace(inner, extra)))
        print(f"trace: {trace_path}")
    if failed:
        print(f"verifier failure: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.facilities is not None:
        inst = gen_ckl_instance(args.facilities, args.n, args.seed, args.demand_max, args.capacity, args.k)
    else:
        inst = gen_instance(args.n, args.seed, args.demand_max, args.capacity, args.k, args.geometry)
    text = io.dumps(io.instance_to_dict(inst))
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return EXIT_OK


def bench_rows(count: int, n_range: tuple[int, int], alphas, seed: int):
    """Yield one CSV row per (instance, alpha); raises ``BenchFailure`` on the
    first verifier failure."""
    lo, hi = n_range
    for t in range(count):
        s = seed + t
        n = int(np.random.default_rng(s).integers(lo, hi + 1))
        inst = gen_instance(n, s)
        frac = solve_ckm_relaxation(inst)
        opt = exact_opt(inst).cost if n <= OPT_MAX_N else None
        for a in alphas:
            res = solve(inst, a, frac=frac)
            rep = verify_guarantees(inst, frac, res.solution, a)
            if not rep.ok:
                raise BenchFailure(s, a, rep.failures())
            sol = res.solution
            yield [
                str(s), str(n), _fmt(a), _fmt(frac.objective),
                "" if opt is None else _fmt(opt),
                _fmt(sol.cost), _fmt(rep.numbers["cost_ratio"]),
                str(int(sol.open.sum())), _fmt(sol.max_load_ratio),
                "yes" if res.path == EASY else "no",
            ]


class BenchFailure(Exception):
    def __init__(self, seed, alpha, failures):
        super().__init__(f"verifier failure at seed {seed}, alpha {alpha!r}: {', '.join(failures)}")
        self.seed = seed


def cmd_bench(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be positive")
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    try:
        for row in bench_rows(args.count, args.n_range, args.alpha_list, args.seed):
            w.writerow(row)
    except BenchFailure as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VERIFY
    if args.out is None:
        sys.stdout.write(buf.getvalue())
    else:
        args.out.write_text(buf.getvalue())
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    handler = {"solve": cmd_solve, "gen": cmd_gen, "bench": cmd_bench}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"capkm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidInstanceError as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalMarginError as exc:
        print(f"numerical margin: {exc}", file=sys.stderr)
        return EXIT_MARGIN
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"capkm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
