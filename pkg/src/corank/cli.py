"""Command-line interface: ``corank {test,simulate,are,grid,codf}``.

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure.
Results go to ``--output`` or stdout; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from .codf import fit_codf
from .efficiency import gaussian_are
from .estimators import make_method
from .exceptions import ConfigurationError, InvalidInputError, NumericalError, ScenarioError
from .grids import SYMMETRIC_KINDS, canonical_kind, grid_for_size, make_grid, make_symmetric_grid
from .harness import load_scenario_file, write_power_svgs
from .statdist import RngState

DEFAULT_SEED = 42
GRID_CHOICES = ("r1", "r2", "h", "r2s", "hs")
METHOD_CHOICES = ("ran", "sym-sign", "sym-wilcoxon", "sym-vdw", "hotelling", "marginal")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; 2 is reserved for numerical failures here.
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def read_sample_csv(path) -> np.ndarray:
    """Numeric CSV, one observation per row; a non-numeric first row is a header."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise InvalidInputError(f"{path} holds no observations")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InvalidInputError(f"{path}: rows have different numbers of columns")
    try:
        data = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: non-numeric value ({exc})") from None
    if not np.all(np.isfinite(data)):
        raise InvalidInputError(f"{path} contains non-finite values")
    return data


def _write(text: str, output) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands

def cmd_test(args) -> None:
    X = read_sample_csv(args.input)
    grid = args.grid
    if grid is not None:
        kind = canonical_kind(grid)
        symmetric_method = args.method.startswith("sym-")
        if symmetric_method != (kind in SYMMETRIC_KINDS) and args.method not in ("hotelling", "marginal"):
            raise ConfigurationError(f"--grid {grid} does not fit --method {args.method}")
    est = make_method(args.method, grid, args.nr, args.alpha, RngState(args.seed, 0))
    out = est.test(X)
    _write(_csv([("test_id", "statistic", "df", "p_value", "reject"),
                 (out.test_id, _fmt(out.statistic), out.df, _fmt(out.p_value), int(out.rejects(args.alpha)))]),
           args.output)


def cmd_simulate(args) -> None:
    plan = load_scenario_file(args.scenario, args.reps, args.seed)
    table = plan.run(args.parallelism)
    print(f"simulated {len(plan.scenarios)} scenarios in {table.wall_time:.1f} s", file=sys.stderr)
    if args.format == "svg":
        if not args.output:
            raise ConfigurationError("--format svg needs --output <directory>")
        for p in write_power_svgs(table, args.output):
            print(f"wrote {p}", file=sys.stderr)
    else:
        _write(plan.render(table), args.output)


def cmd_are(args) -> None:
    rows = [("d", "score", "are", "are_5dp", "are_3dp")]
    for d in args.d:
        if d < 1:
            raise InvalidInputError(f"dimension must be positive, got {d}")
        res = gaussian_are(args.score, d)
        rows.append((d, args.score, _fmt(res.are), f"{res.are:.5f}", f"{res.are:.3f}"))
    _write(_csv(rows), args.output)


def cmd_grid(args) -> None:
    kind = canonical_kind(args.kind)
    rng = RngState(args.seed, 0).generator()
    if kind in SYMMETRIC_KINDS:
        g = make_symmetric_grid(kind, args.d, args.nr, args.ns, rng, n_0=args.n0)
    else:
        g = make_grid(kind, args.d, args.nr, args.ns, args.n0, rng)
    rows = [[f"x{j + 1}" for j in range(g.d)]] + [[_fmt(v) for v in p] for p in g.points]
    _write(_csv(rows), args.output)


def cmd_codf(args) -> None:
    X = read_sample_csv(args.input)
    n, d = X.shape
    grid = grid_for_size(args.grid, n, d, args.nr, n_0=args.n0, rng=RngState(args.seed, 0).generator())
    res = fit_codf(X, grid)
    header = ([f"x{j + 1}" for j in range(d)] + [f"image{j + 1}" for j in range(d)] + ["rank"]
              + [f"sign{j + 1}" for j in range(d)])
    rows = [header]
    for i in range(n):
        rows.append([_fmt(v) for v in X[i]] + [_fmt(v) for v in res.images[i]] + [int(res.ranks[i])]
                    + [_fmt(v) for v in res.signs[i]])
    _write(_csv(rows), args.output)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="corank", description="Center-outward rank location tests.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="run a one-sample location test on a CSV sample")
    t.add_argument("--input", required=True)
    t.add_argument("--method", required=True, choices=METHOD_CHOICES)
    t.add_argument("--grid", choices=GRID_CHOICES)
    t.add_argument("--nr", type=int, default=6)
    t.add_argument("--seed", type=int, default=DEFAULT_SEED)
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--output")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", help="run a Monte Carlo scenario file")
    s.add_argument("--scenario", required=True)
    s.add_argument("--reps", type=int)
    s.add_argument("--seed", type=int, help=f"overrides the file's seed (default {DEFAULT_SEED})")
    s.add_argument("--parallelism", type=int, default=1)
    s.add_argument("--format", choices=("csv", "svg"), default="csv")
    s.add_argument("--output")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("are", help="Gaussian ARE against Hotelling's T^2")
    a.add_argument("--d", type=_int_list, default=[1, 2, 10])
    a.add_argument("--score", choices=("wilcoxon", "vdw", "sign"), default="wilcoxon")
    a.add_argument("--output")
    a.set_defaults(func=cmd_are)

    g = sub.add_parser("grid", help="print a transportation grid")
    g.add_argument("--kind", default="h", choices=GRID_CHOICES + ("regular2d",))
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--nr", type=int, default=6)
    g.add_argument("--ns", type=int, default=10, help="directions per sphere (per half for r2s/hs)")
    g.add_argument("--n0", type=int, default=0)
    g.add_argument("--seed", type=int, default=DEFAULT_SEED)
    g.add_argument("--output")
    g.set_defaults(func=cmd_grid)

    c = sub.add_parser("codf", help="empirical center-outward df of a CSV sample")
    c.add_argument("--input", required=True)
    c.add_argument("--grid", default="h", choices=("r1", "r2", "h", "regular2d"))
    c.add_argument("--nr", type=int, default=6)
    c.add_argument("--n0", type=int, default=0)
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    c.add_argument("--output")
    c.set_defaults(func=cmd_codf)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "reps", None) is not None and args.reps < 1:
            raise InvalidInputError("--reps must be at least 1")
        if getattr(args, "parallelism", 1) < 1:
            raise InvalidInputError("--parallelism must be at least 1")
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    except (InvalidInputError, ConfigurationError, OSError) as exc:
        print(f"corank: error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, ScenarioError, ArithmeticError) as exc:
        print(f"corank: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
