"""Command line interface: ``hdconf grid|quantile|volume|check-bounds|slope``."""
import argparse
import csv
import logging
import math
import sys

from . import checks
from .covariance import one_norm_eigen_bound
from .exceptions import ConfigurationError, HDConfError
from .experiment import (
    PRESETS, GridConfig, emit_csv, group_slopes, grid_cells, preset_config, read_csv, run_cell,
    run_grid, write_permutations,
)
from .regions import log_volume_block_lp, log_volume_cube, log_volume_ratio
from .sampling import mix_seed

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PROPERTY = 0, 1, 2, 3

logger = logging.getLogger("hdconf")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(f"{self.prog}: {message}")


def _int_list(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _float_list(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _norm(text):
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def _cmd_grid(args):
    overrides = dict(
        d_values=args.d, s_values=args.s, p_values=args.p, c_values=args.c,
        alpha=args.alpha, n=args.n, master_seed=args.seed,
        permute=True if args.permute else None, coverage_n=args.coverage_n,
    )
    if args.preset:
        config = preset_config(args.preset, **overrides)
    else:
        if args.d is None or args.s is None:
            raise ConfigurationError("grid needs --d and --s (or --preset)")
        defaults = dict(p_values=(2.0,), c_values=(0.0,), alpha=0.05, n=100_000,
                        master_seed=42, permute=False, coverage_n=100_000)
        defaults.update({k: v for k, v in overrides.items() if v is not None})
        config = GridConfig(**defaults)
    _, skipped = grid_cells(config)
    for cell in skipped:
        print(f"skipped: d={cell.d} s={cell.s} (s does not divide d)", file=sys.stderr)
    records = run_grid(config, n_jobs=args.jobs)
    emit_csv(records, args.out)
    if args.perm_log:
        write_permutations(records, args.perm_log)
    return EXIT_OK


def _cmd_quantile(args):
    rec = run_cell(args.d, args.s, args.p, args.c, alpha=args.alpha, n=args.n,
                   cell_seed=mix_seed(args.seed, 0), permute=args.permute,
                   coverage_n=args.coverage_n, n_jobs=args.jobs)
    xbar = "" if rec.xbar_p is None else f"{rec.xbar_p:.10g}"
    print(f"c_p={rec.c_p:.10g}")
    print(f"c_p_se={rec.c_p_se:.4g}")
    print(f"c_inf={rec.c_inf:.10g}")
    print(f"c_inf_se={rec.c_inf_se:.4g}")
    print(f"xbar_p={xbar}")
    print(f"lambda_max_bound={one_norm_eigen_bound(args.c):.10g}")
    print(f"log_vol_ratio={rec.log_vol_ratio:.10g}")
    print(f"log_vol_ratio_se={rec.log_vol_ratio_se:.4g}")
    if rec.coverage_p is not None:
        print(f"coverage_p={rec.coverage_p:.6f}")
        print(f"coverage_inf={rec.coverage_inf:.6f}")
    if math.log(args.d) <= args.s:
        print(f"note: log(d) = {math.log(args.d):.3f} <= s = {args.s}; "
              "the s-free constant regime of the decay argument does not apply")
    return EXIT_OK


def _cmd_volume(args):
    if math.isinf(args.p):
        log_vol = log_volume_cube(args.d, args.radius)
    else:
        log_vol = log_volume_block_lp(args.d, args.s, args.p, args.radius)
    print(f"log_volume={log_vol:.17g}")
    print(f"log_volume_per_dim={log_vol / args.d:.17g}")
    if args.radius_inf is not None:
        total, per_dim = log_volume_ratio(args.d, args.s, args.p, args.radius, args.radius_inf)
        print(f"log_vol_ratio={total:.17g}")
        print(f"log_vol_ratio_per_dim={per_dim:.17g}")
    return EXIT_OK


def _cmd_check_bounds(args):
    growth_d = tuple(d for d in checks.GROWTH_D if d <= args.max_d)
    results = checks.run_all(n=args.n, seed=args.seed, growth_d=growth_d, n_jobs=args.jobs)
    report = checks.format_report(results)
    sys.stdout.write(report)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report)
    return EXIT_OK if all(r.passed for r in results) else EXIT_PROPERTY


def _cmd_slope(args):
    records = read_csv(args.csv)
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["s", "p", "c", "permuted", "points", "slope", "r_squared", "slope_se"])
        for (s, p, c, perm), count, fit in group_slopes(records):
            writer.writerow([s, format(p, ".17g"), format(c, ".17g"),
                             "true" if perm else "false", count,
                             format(fit.slope, ".17g"), format(fit.r_squared, ".17g"),
                             format(fit.slope_se, ".17g")])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="hdconf", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("grid", help="run a grid experiment and write CSV")
    g.add_argument("--d", type=_int_list)
    g.add_argument("--s", type=_int_list)
    g.add_argument("--p", type=_float_list)
    g.add_argument("--c", type=_float_list)
    g.add_argument("--alpha", type=float)
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--permute", action="store_true")
    g.add_argument("--coverage-n", type=int)
    g.add_argument("--out", default="-")
    g.add_argument("--preset", choices=sorted(PRESETS))
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--perm-log", help="write permutations of permuted cells as JSON lines")
    g.set_defaults(func=_cmd_grid)

    q = sub.add_parser("quantile", help="estimate the radii of a single cell")
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--p", type=_norm, default=2.0)
    q.add_argument("--c", type=float, default=0.0)
    q.add_argument("--alpha", type=float, default=0.05)
    q.add_argument("--n", type=int, default=100_000)
    q.add_argument("--seed", type=int, default=42)
    q.add_argument("--permute", action="store_true")
    q.add_argument("--coverage-n", type=int, default=0)
    q.add_argument("--jobs", type=int, default=1)
    q.set_defaults(func=_cmd_quantile)

    v = sub.add_parser("volume", help="closed-form log-volumes")
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--s", type=int, default=1)
    v.add_argument("--p", type=_norm, default=2.0)
    v.add_argument("--radius", type=float, required=True)
    v.add_argument("--radius-inf", type=float)
    v.set_defaults(func=_cmd_volume)

    b = sub.add_parser("check-bounds", help="run the bound property suites")
    b.add_argument("--n", type=int, default=100_000)
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--max-d", type=int, default=8192)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--report")
    b.set_defaults(func=_cmd_check_bounds)

    sl = sub.add_parser("slope", help="per-(s, p, c) slopes of a grid CSV")
    sl.add_argument("csv")
    sl.add_argument("--out", default="-")
    sl.set_defaults(func=_cmd_slope)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HDConfError, ValueError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
