"""Command-line front end: ``slogenergy <command> [flags]``.

Exit codes: 0 ok, 1 invalid input, 2 a check failed (or ``minimize`` did not
converge), 3 the solver did not converge inside ``probe`` or ``sweep``.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    HypothesisNotCovered,
    SolverFailure,
    cluster_probe,
    derivative_probe,
    infinity_limit_probe,
    sweep_g,
)
from .kernels import DomainError, KernelParams
from .oracle import BudgetExceeded, GridBudget, compare_with_grid, grid_minimize, grid_pack
from .optimizer import SolveOptions, best_packing, default_seed, minimize_energy
from .spaces import SpaceError, discretize, load_distance_csv, make_circle, make_segment, make_sphere
from .verify import SUITES, run_suite

EXIT_OK, EXIT_INVALID, EXIT_CHECK, EXIT_SOLVER = 0, 1, 2, 3
SPACE_KINDS = ("segment", "circle-geo", "circle-chord", "sphere", "finite")


class UsageError(ValueError):
    pass


# -- formatting ----------------------------------------------------------------


def fmt(x) -> str:
    """Shortest repr that round-trips the double (at most 17 significant digits)."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _json_num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _header(args) -> str | None:
    if args.no_header:
        return None
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return f"slogenergy {__version__} {stamp}"


def write_csv(rows: list, args, stream=None) -> None:
    buf = io.StringIO()
    head = _header(args)
    if head:
        buf.write(f"# {head}\n")
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(rows[0]))
        for row in rows:
            w.writerow([fmt(v) for v in row.values()])
    _emit(buf.getvalue(), args, stream)


def write_json(doc: dict, args, stream=None) -> None:
    head = _header(args)
    if head:
        doc = {"generated": head, **doc}
    _emit(json.dumps(doc, indent=2) + "\n", args, stream)


def _emit(text, args, stream):
    if args.out:
        Path(args.out).write_text(text)
    else:
        (stream or sys.stdout).write(text)


# -- parsing helpers -------------------------------------------------------------


def parse_grid(text: str) -> list:
    """``a:b:step`` (inclusive, float-safe) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"--s-grid/--schedule: expected a:b:step, got {text!r}")
        a, b, step = map(float, parts)
        if step <= 0 or b < a:
            raise UsageError(f"--s-grid/--schedule: need step > 0 and b >= a, got {text!r}")
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        return [round(a + k * step, 12) for k in range(count)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--s-grid/--schedule: {exc}") from None


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def build_space(args):
    kind = args.space
    if kind is None:
        raise UsageError("--space is required")
    if kind == "segment":
        if args.a is None or args.b is None:
            raise UsageError("--space segment needs --a and --b")
        return make_segment(args.a, args.b)
    if kind in ("circle-geo", "circle-chord", "sphere"):
        if args.alpha is None:
            raise UsageError(f"--space {kind} needs --alpha")
        if kind == "sphere":
            return make_sphere(args.alpha)
        return make_circle(args.alpha, "geodesic" if kind == "circle-geo" else "chord")
    if kind == "finite":
        if args.matrix is None:
            raise UsageError("--space finite needs --matrix FILE.csv")
        return load_distance_csv(args.matrix)
    raise UsageError(f"--space: unknown kind {kind!r}")


def solve_options(args) -> SolveOptions:
    return SolveOptions(
        starts=args.starts,
        max_iters=args.max_iters,
        grad_tol=args.grad_tol,
        seed=args.seed if args.seed is not None else default_seed(),
        anneal=args.anneal,
        threads=args.threads,
    )


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for {args.command}")


def _params(args) -> KernelParams:
    _require(args, "s", "t")
    return KernelParams(args.s, args.t)


def _budget(args):
    return GridBudget(args.budget) if args.budget else None


# -- commands -------------------------------------------------------------------------


def result_document(result, params, opts=None) -> dict:
    cfg = result.config
    doc = cfg.to_dict()
    doc.update(
        s=params.s,
        t=params.t,
        energy=_json_num(result.energy.linear),
        energy_unordered=_json_num(result.energy.linear / 2),
        log_energy=_json_num(result.energy.log),
        converged=bool(result.converged),
        starts_agreeing=int(result.starts_agreeing),
    )
    if opts is not None:
        doc.update(starts=opts.starts, seed=opts.seed)
    return doc


def cmd_minimize(args) -> int:
    space = build_space(args)
    _require(args, "n")
    params = _params(args)
    if args.exact:
        result = grid_minimize(space, args.n, params, _budget(args))
        write_json(result_document(result, params), args)
        return EXIT_OK
    opts = solve_options(args)
    result = minimize_energy(space, args.n, params, opts)
    write_json(result_document(result, params, opts), args)
    return EXIT_OK if result.converged else EXIT_CHECK


def cmd_sweep(args) -> int:
    space = build_space(args)
    _require(args, "n", "t", "s_grid")
    records = sweep_g(space, args.n, args.t, parse_grid(args.s_grid), solve_options(args), args.restarts)
    write_csv([r.row() for r in records], args)
    return EXIT_OK if all(r.converged for r in records) else EXIT_SOLVER


def cmd_pack(args) -> int:
    space = build_space(args)
    _require(args, "n")
    if args.exact:
        result = grid_pack(space, args.n, _budget(args))
    else:
        result = best_packing(space, args.n, solve_options(args))
    doc = result.config.to_dict()
    doc.update(delta=result.delta, converged=bool(result.converged))
    write_json(doc, args)
    return EXIT_OK


def cmd_probe(args) -> int:
    space = build_space(args)
    _require(args, "n", "t")
    opts = solve_options(args)
    if args.kind == "derivative":
        _require(args, "s0")
        report = derivative_probe(space, args.n, args.t, args.s0, opts, h=args.h)
        doc = report.to_dict()
        doc["ordered"] = report.ordered()
        write_json({k: _clean(v) for k, v in doc.items()}, args)
        return EXIT_OK
    _require(args, "schedule")
    rows = infinity_limit_probe(space, args.n, args.t, parse_grid(args.schedule), opts)
    out = [{**r.row(), "chain_holds": r.chain_holds()} for r in rows]
    write_csv(out, args)
    return EXIT_OK


def _clean(v):
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, float):
        return _json_num(v)
    return v


def cmd_cluster(args) -> int:
    space = build_space(args)
    _require(args, "n", "t", "s0")
    s0 = args.s0
    if args.schedule:
        schedule = parse_grid(args.schedule)
    elif math.isinf(s0):
        schedule = [2.0**k for k in range(1, 11)]
    else:
        halves = [2.0**-k for k in range(1, args.halving + 1)]
        schedule = []
        if args.side in ("above", "both"):
            schedule += [s0 + h for h in halves]
        if args.side in ("below", "both"):
            schedule += [s0 - h for h in halves if s0 - h >= 0]
    trace = cluster_probe(space, args.n, args.t, s0, schedule, solve_options(args))
    write_csv([trace.row(k) for k in range(len(schedule))], args)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suite(args.suite)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.criterion}  {c.name:<{width}}  {c.detail}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK


def cmd_oracle(args) -> int:
    space = build_space(args)
    _require(args, "n")
    params = _params(args)
    if space.continuous:
        _require(args, "m")
        if args.compare:
            cmp = compare_with_grid(space, args.n, params, args.m, solve_options(args), _budget(args))
            doc = {k: getattr(cmp, k) for k in ("continuous", "grid", "eps_grid", "mesh", "lipschitz", "m")}
            doc.update(gap=cmp.gap, passes=cmp.passes, space_id=space.id, n=args.n, s=params.s, t=params.t)
            write_json(doc, args)
            return EXIT_OK if cmp.passes else EXIT_CHECK
        grid = discretize(space, args.m)
    else:
        grid = space
    result = grid_minimize(grid, args.n, params, _budget(args))
    doc = result_document(result, params)
    doc["indices"] = [int(i) for i in result.config.points]
    if grid.coords is not None:
        doc["coords"] = np.asarray(grid.lift(result.config.points)).tolist()
    write_json(doc, args)
    return EXIT_OK


COMMANDS = {
    "minimize": cmd_minimize,
    "sweep": cmd_sweep,
    "pack": cmd_pack,
    "probe": cmd_probe,
    "cluster": cmd_cluster,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def _float_or_inf(text: str) -> float:
    if text.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return float(text)


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with every other validation failure
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("space")
    g.add_argument("--space", choices=SPACE_KINDS)
    g.add_argument("--a", type=float, help="segment left end")
    g.add_argument("--b", type=float, help="segment right end")
    g.add_argument("--alpha", type=float, help="circle/sphere radius")
    g.add_argument("--matrix", help="CSV distance matrix for --space finite")
    p = common.add_argument_group("problem")
    p.add_argument("--n", type=int, help="number of points")
    p.add_argument("--s", type=float)
    p.add_argument("--t", type=float)
    o = common.add_argument_group("solver")
    o.add_argument("--starts", type=int, default=16)
    o.add_argument("--max-iters", type=int, default=10_000)
    o.add_argument("--grad-tol", type=float, default=1e-10)
    o.add_argument("--seed", type=lambda v: int(v, 0), default=None, help="default: $SLOG_ENERGY_SEED or 0xC0FFEE")
    o.add_argument("--threads", type=int, default=1)
    o.add_argument("--anneal", action="store_true")
    o.add_argument("--budget", type=int, default=None, help="max subsets for the exhaustive oracle")
    io_ = common.add_argument_group("output")
    io_.add_argument("--out", help="output file (default stdout)")
    io_.add_argument("--no-header", action="store_true", help="omit the timestamp line")
    io_.add_argument("--config", help="key=value file; flags on the command line win")

    parser = _Parser(prog="slogenergy", description="Minimal s,log^t-energy experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("minimize", parents=[common], help="minimize the energy of N points")
    m.add_argument("--exact", action="store_true", help="exhaustive search (finite spaces)")

    s = sub.add_parser("sweep", parents=[common], help="g(s) over a grid of s")
    s.add_argument("--s-grid", help="a:b:step or comma list")
    s.add_argument("--restarts", type=int, default=3, help="fresh starts next to each warm start")

    pk = sub.add_parser("pack", parents=[common], help="best-packing configuration")
    pk.add_argument("--exact", action="store_true", help="exhaustive search (finite spaces)")

    pr = sub.add_parser("probe", parents=[common], help="one-sided derivatives or the s -> inf limit")
    pr.add_argument("--kind", choices=("derivative", "limit"), default="derivative")
    pr.add_argument("--s0", type=float)
    pr.add_argument("--h", type=float, default=1e-4)
    pr.add_argument("--schedule", help="increasing s values for --kind limit")

    cl = sub.add_parser("cluster", parents=[common], help="minimizers along s_k -> s0")
    cl.add_argument("--s0", type=_float_or_inf, help="target exponent, or inf")
    cl.add_argument("--schedule", help="explicit schedule (a:b:step or comma list)")
    cl.add_argument("--halving", type=int, default=10, help="use s0 +- 2^-k for k = 1..K")
    cl.add_argument("--side", choices=("above", "below", "both"), default="both")

    v = sub.add_parser("verify", parents=[common], help="run an acceptance suite")
    v.add_argument("--suite", choices=sorted(SUITES), default="all")

    orc = sub.add_parser("oracle", parents=[common], help="exhaustive minimum on a grid or finite space")
    orc.add_argument("--m", type=int, help="grid size for continuous spaces")
    orc.add_argument("--compare", action="store_true", help="compare with the continuous optimizer")
    return parser


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        values = read_config_file(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(values) - known)
        if unknown:
            raise UsageError(f"{args.config}: unknown key(s) {', '.join(unknown)}")
        for action in sub._actions:
            if action.dest in values and action.nargs == 0:
                values[action.dest] = values[action.dest].lower() in ("1", "true", "yes", "on")
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, SpaceError, DomainError, BudgetExceeded, HypothesisNotCovered, ValueError, OSError) as exc:
        print(f"slogenergy: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverFailure as exc:
        print(f"slogenergy: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
