"""Command-line front end.

    wintilt bound --h 1 --w 1 --sigma 0.5
    wintilt ratio-curve --format csv --output fig1.csv
    wintilt verify --seed 7
    wintilt bayes --theta-max 1 --mean 0 --sigma 0.1 --t 1

Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import bayes, bounds, oracle
from .core import Params

log = logging.getLogger("wintilt")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3
CSV_FIELDS = ("w", "h", "sigma", "S", "K", "ratio")

DEFAULT_W = (-1.0, 0.0, 1.0)
DEFAULT_H = (0.2, 1.0, 5.0)
VERIFY_SIGMAS = (0.05, 0.2, 0.5, 1.0, 2.0)


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    h_values: tuple[float, ...] = DEFAULT_H
    w_values: tuple[float, ...] = DEFAULT_W
    sigma_range: tuple[float, float, int] = (0.005, 1.0, 200)
    spacing: str = "linear"
    output_format: str = "csv"
    sigma_list: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.h_values or not self.w_values:
            raise InputError("h and w lists must be non-empty")
        if any(not h > 0 for h in self.h_values):
            raise InputError("all h values must be positive")
        lo, hi, n = self.sigma_range
        if not (lo > 0 and hi >= lo and n >= 2):
            raise InputError("sigma range needs lo > 0, hi >= lo, n >= 2")
        if self.spacing not in ("linear", "log"):
            raise InputError("spacing must be 'linear' or 'log'")
        if self.output_format not in ("csv", "json"):
            raise InputError("format must be csv or json")
        if self.sigma_list is not None and any(not s > 0 for s in self.sigma_list):
            raise InputError("sigma values must be positive")

    def sigmas(self) -> list[float]:
        if self.sigma_list is not None:
            return sorted(self.sigma_list)
        lo, hi, n = self.sigma_range
        pts = np.geomspace(lo, hi, n) if self.spacing == "log" else np.linspace(lo, hi, n)
        return [float(s) for s in pts]

    def params(self):
        for w in sorted(self.w_values):
            for h in sorted(self.h_values):
                for s in self.sigmas():
                    yield Params(h, w, s)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def emit_rows(rows: list[dict], fmt: str, fields) -> str:
    if fmt == "json":
        return json.dumps([{k: r[k] for k in fields} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in rows:
        writer.writerow([_fmt(r[k]) for k in fields])
    return buf.getvalue()


def _write(text: str, output: str | None):
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_bound(h: float, w: float, sigma: float) -> dict:
    res = bounds.supremum(Params(h, w, sigma))
    tp = res.maximizer
    return {
        "h": h,
        "w": w,
        "sigma": sigma,
        "supremum": res.supremum,
        "u": tp.u,
        "v": tp.v,
        "mass_at_minus_u": tp.mass_left,
        "mass_at_v": tp.mass_right,
        "branch": res.branch.value,
        "k_factor": res.k_factor,
        "k_bound": res.k_bound,
        "ratio": res.ratio,
    }


def cmd_ratio_curve(spec: SweepSpec) -> list[dict]:
    rows = []
    for p in spec.params():
        res = bounds.supremum(p)
        rows.append({"w": p.w, "h": p.h, "sigma": p.sigma, "S": res.supremum, "K": res.k_factor, "ratio": res.ratio})
    for w in sorted(spec.w_values):
        for h in sorted(spec.h_values):
            curve = [r["ratio"] for r in rows if r["w"] == w and r["h"] == h]
            if any(b > a for a, b in zip(curve, curve[1:])):
                log.warning("ratio curve w=%g h=%g is not nonincreasing in sigma", w, h)
    return rows


def oracle_tolerance(eps_points: int) -> float:
    """Relative agreement required of the grid oracle: 1e-3 at 2000 points, shrinking quadratically."""
    return 1e-3 * (2000.0 / eps_points) ** 2


def cmd_verify(grid: oracle.GridSpec, sweep: SweepSpec) -> tuple[list[dict], list[oracle.CheckReport]]:
    """Run every oracle check over the sweep; returns per-cell rows and check reports."""
    tol = oracle_tolerance(grid.eps_points)
    rows = []
    bf = oracle.CheckReport(f"brute_force_supremum (rel tol {tol:.1e})")
    ls = oracle.CheckReport("linear_sup_consistency")
    rd = oracle.CheckReport("random_dist_check")
    cy = oracle.CheckReport("corollary_y_check")
    params = list(sweep.params())
    for p in params:
        s = bounds.supremum(p).supremum
        b = oracle.brute_force_supremum(p, grid)
        rel = abs(b.value - s) / s
        lin = oracle.linear_sup_consistency(p, grid)
        r = oracle.random_dist_check(p, grid)
        c = oracle.corollary_y_check(p, grid)
        ok_bf = rel <= tol and b.value <= s + oracle.SLACK
        ok_ls = lin.grid_max <= 1e-8 and abs(lin.at_maximizer) <= 1e-9
        for rep, ok in ((bf, ok_bf), (ls, ok_ls)):
            rep.cases += 1
            if not ok:
                rep.violations.append({"h": p.h, "w": p.w, "sigma": p.sigma})
        for total, part in ((rd, r), (cy, c)):
            total.cases += part.cases
            total.violations += part.violations
            total.max_ratio = max(part.max_ratio, total.max_ratio if not math.isnan(total.max_ratio) else -math.inf)
        rows.append(
            {
                "w": p.w,
                "h": p.h,
                "sigma": p.sigma,
                "S": s,
                "brute_force": b.value,
                "rel_err": rel,
                "linear_sup_max": lin.grid_max,
                "linear_sup_at_max": lin.at_maximizer,
                "random_max_ratio": r.max_ratio,
                "violations": len(r.violations) + len(c.violations) + (not ok_bf) + (not ok_ls),
            }
        )
    mono = oracle.monotonicity_suite(params, oracle.GridSpec(random_dists=min(100, grid.random_dists), seed=grid.seed))
    return rows, [bf, rd, ls, mono, cy]


VERIFY_FIELDS = (
    "w",
    "h",
    "sigma",
    "S",
    "brute_force",
    "rel_err",
    "linear_sup_max",
    "linear_sup_at_max",
    "random_max_ratio",
    "violations",
)


def cmd_bayes(theta_max: float, mean: float, sigma: float, t: float) -> dict:
    fam = bayes.BayesFamily(theta_max, mean, sigma)
    exact, simple = bayes.posterior_mean_bound(fam, t)
    prior, valid = bayes.extremal_prior(fam, t)
    return {
        "theta_max": theta_max,
        "prior_mean": mean,
        "prior_sd": sigma,
        "t": t,
        "exact_bound": exact,
        "simple_bound": simple,
        "trivial_bound": theta_max,
        "extremal_prior_atoms": [float(x) for x in prior.atoms],
        "extremal_prior_masses": [float(p) for p in prior.masses],
        "extremal_prior_within_theta_max": valid,
        "extremal_posterior_mean": bayes.posterior_mean(prior, t),
    }


# ---------------------------------------------------------------------------
# argument parsing


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wintilt", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "json"), default="text"):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--output", default=None, help="output path (default stdout)")

    p = sub.add_parser("bound", help="exact supremum, maximizer and K bound")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    common(p)

    p = sub.add_parser("ratio-curve", help="S/(K sigma^2) curves over sigma")
    p.add_argument("--h", type=_floats, default=DEFAULT_H, help="comma-separated")
    p.add_argument("--w", type=_floats, default=DEFAULT_W, help="comma-separated")
    p.add_argument("--sigma-lo", type=float, default=0.005)
    p.add_argument("--sigma-hi", type=float, default=1.0)
    p.add_argument("--sigma-n", type=int, default=200)
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")
    common(p, ("csv", "json"), "csv")

    p = sub.add_parser("verify", help="brute-force and property verification sweep")
    p.add_argument("--h", type=_floats, default=DEFAULT_H)
    p.add_argument("--w", type=_floats, default=DEFAULT_W)
    p.add_argument("--sigma", type=_floats, default=VERIFY_SIGMAS)
    p.add_argument("--eps-points", type=int, default=oracle.GridSpec.eps_points)
    p.add_argument("--random-dists", type=int, default=oracle.GridSpec.random_dists)
    p.add_argument("--support-sizes", type=_ints, default=oracle.GridSpec.support_sizes)
    p.add_argument("--seed", type=int, default=oracle.GridSpec.seed)
    common(p, ("text", "csv", "json"))

    p = sub.add_parser("bayes", help="posterior-mean bounds for an exponential family")
    p.add_argument("--theta-max", type=float, required=True)
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    common(p)
    return parser


def _render_record(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=1) + "\n"
    width = max(len(k) for k in record)
    return "".join(f"{k:<{width}}  {_fmt(v)}\n" for k, v in record.items())


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    status = EXIT_OK
    try:
        if args.command == "bound":
            text = _render_record(cmd_bound(args.h, args.w, args.sigma), args.format)
        elif args.command == "ratio-curve":
            spec = SweepSpec(
                h_values=args.h,
                w_values=args.w,
                sigma_range=(args.sigma_lo, args.sigma_hi, args.sigma_n),
                spacing=args.spacing,
                output_format=args.format,
            )
            text = emit_rows(cmd_ratio_curve(spec), spec.output_format, CSV_FIELDS)
        elif args.command == "verify":
            grid = oracle.GridSpec(args.eps_points, args.random_dists, tuple(args.support_sizes), args.seed)
            sweep = SweepSpec(h_values=args.h, w_values=args.w, sigma_list=args.sigma)
            rows, reports = cmd_verify(grid, sweep)
            if args.format == "text":
                lines = [r.summary() for r in reports]
                for r in reports:
                    lines += [f"  violation: {v}" for v in r.violations]
                text = "\n".join(lines) + "\n"
            else:
                text = emit_rows(rows, args.format, VERIFY_FIELDS)
            if not all(r.passed for r in reports):
                status = EXIT_FAIL
        else:
            text = _render_record(cmd_bayes(args.theta_max, args.mean, args.sigma, args.t), args.format)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        _write(text, args.output)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
