"""Brute-force verification of the closed-form suprema.

Nothing in here calls the root-finders: the grid search and the random
distribution sweeps only evaluate tilted means directly, and compare against
:func:`wintilt.bounds.supremum` from the outside.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import mpmath
import numpy as np

from .bounds import supremum
from .core import DiscreteDist, Params, TwoPointDist, tilted_expectation, tilted_mean, two_point_mean

SLACK = 1e-9
EPS_RANGE = (1e-6, 1e3)


@dataclass(frozen=True)
class GridSpec:
    eps_points: int = 2000
    random_dists: int = 500
    support_sizes: tuple[int, ...] = (2, 3, 4)
    seed: int = 20240917

    def __post_init__(self):
        if self.eps_points < 10:
            raise ValueError("eps_points must be at least 10")
        if self.random_dists < 0:
            raise ValueError("random_dists must be non-negative")
        if not self.support_sizes or min(self.support_sizes) < 1:
            raise ValueError("support_sizes must be non-empty positive integers")


@dataclass
class CheckReport:
    """Collect-all outcome of one verification check."""

    name: str
    cases: int = 0
    violations: list[dict] = field(default_factory=list)
    max_ratio: float = float("nan")
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{status} {self.name}: {self.cases} cases, {len(self.violations)} violations"
        if not math.isnan(self.max_ratio):
            line += f", max ratio {self.max_ratio:.12g}"
        return line


class BruteForce(NamedTuple):
    value: float
    argmax: TwoPointDist
    index: int
    grid: np.ndarray


class LinearSup(NamedTuple):
    k: float
    grid_max: float
    at_maximizer: float


def eps_grid(p: Params, n: int) -> np.ndarray:
    """Log-spaced candidate values of ``u`` (left atom at ``-u``) for the extremal family at ``p``.

    For ``w > 0`` the feasible set is ``(0, sigma^2/w]`` and the right endpoint
    is included; for ``w <= 0`` it is ``(-w, inf)``, covered as ``-w + t``.
    """
    lo, hi = EPS_RANGE
    if p.w > 0:
        top = p.sigma**2 / p.w
        return np.geomspace(min(lo, top / 10), min(top, hi), n)
    return -p.w + np.geomspace(lo, hi, n)


def _extremal(p: Params, u: float) -> TwoPointDist:
    v = p.sigma**2 / u
    if p.w > 0 and v < p.w:
        # right endpoint of the grid, where v = w up to rounding
        v = p.w
    return TwoPointDist(u, v)


def brute_force_supremum(p: Params, g: GridSpec = GridSpec()) -> BruteForce:
    grid = eps_grid(p, g.eps_points)
    best, best_i, best_tp = -math.inf, -1, None
    for i, u in enumerate(grid):
        tp = _extremal(p, float(u))
        if not (-tp.u < p.w <= tp.v):
            continue
        val = two_point_mean(tp, p.h, p.w)
        if val > best:
            best, best_i, best_tp = val, i, tp
    if best_tp is None:
        raise RuntimeError(f"empty feasible grid for {p}")
    return BruteForce(best, best_tp, best_i, grid)


def random_zero_mean_dist(
    rng: np.random.Generator, size: int, sigma: float, variance: float | None = None
) -> DiscreteDist:
    """Random zero-mean law on ``size`` atoms with the given variance (default: at most sigma^2).

    Atoms start uniform on [-5 sigma, 5 sigma], masses flat on the simplex;
    then the atoms are centred and rescaled. Degenerate draws are rejected.
    """
    if variance is None:
        variance = sigma**2 * (1.0 if rng.random() < 0.5 else rng.uniform(0.01, 1.0))
    if size == 1:
        raise ValueError("a zero-mean law with positive variance needs at least 2 atoms")
    while True:
        x = rng.uniform(-5 * sigma, 5 * sigma, size)
        p = rng.dirichlet(np.ones(size))
        x = x - math.fsum(p * x)
        var = math.fsum(p * x * x)
        if var < 1e-12 * sigma**2 or p.min() < 1e-12:
            continue
        x = x * math.sqrt(variance / var)
        try:
            return DiscreteDist(x, p / math.fsum(p))
        except ValueError:
            continue


def random_dists(g: GridSpec, sigma: float, variance: float | None = None, salt: int = 0) -> list[DiscreteDist]:
    rng = np.random.default_rng([g.seed, salt])
    sizes = itertools.cycle(g.support_sizes)
    return [random_zero_mean_dist(rng, max(2, next(sizes)), sigma, variance) for _ in range(g.random_dists)]


def _salt(p: Params) -> int:
    return hash((p.h, p.w, p.sigma)) & 0xFFFFFFFF


def random_dist_check(p: Params, g: GridSpec = GridSpec(), *, variance: float | None = None) -> CheckReport:
    """No zero-mean law with variance <= sigma^2 may exceed the closed-form supremum."""
    s = supremum(p).supremum
    report = CheckReport(f"random_dist_check h={p.h:g} w={p.w:g} sigma={p.sigma:g}")
    ratios = []
    for i, d in enumerate(random_dists(g, p.sigma, variance, salt=_salt(p))):
        val = tilted_mean(d, p.h, p.w)
        ratios.append(val / s)
        report.cases += 1
        if val > s + SLACK:
            report.violations.append({"case": i, "dist": repr(d), "value": val, "supremum": s})
    if ratios:
        report.max_ratio = max(ratios)
    return report


def linear_functional(dist: DiscreteDist, h: float, w: float, k: float) -> float:
    """E[(X - k) e^{h(X∧w)}], unnormalised."""
    a = h * np.minimum(dist.atoms, w)
    return math.fsum((dist.atoms - k) * np.exp(a) * dist.masses)


def linear_sup_consistency(p: Params, g: GridSpec = GridSpec(), *, k_offset: float = 0.0) -> LinearSup:
    """With k = S (+ ``k_offset``), the largest E[(X-k) e^{h(X∧w)}] over the extremal grid and random laws."""
    res = supremum(p)
    k = res.supremum + k_offset
    values = []
    for u in eps_grid(p, g.eps_points):
        tp = _extremal(p, float(u))
        if -tp.u < p.w <= tp.v:
            values.append(linear_functional(tp.as_discrete(), p.h, p.w, k))
    for d in random_dists(g, p.sigma, salt=_salt(p) ^ 0x5A5A):
        values.append(linear_functional(d, p.h, p.w, k))
    at_max = linear_functional(res.maximizer.as_discrete(), p.h, p.w, k)
    return LinearSup(k, max(values), at_max)


def _tilted_mean_mp(d: DiscreteDist, h: float, w: float, dps: int) -> mpmath.mpf:
    with mpmath.workdps(dps):
        xs = [mpmath.mpf(float(x)) for x in d.atoms]
        ps = [mpmath.mpf(float(p)) for p in d.masses]
        h, w = mpmath.mpf(float(h)), mpmath.mpf(float(w))
        es = [p * mpmath.exp(h * min(x, w)) for x, p in zip(xs, ps)]
        return mpmath.fsum(x * e for x, e in zip(xs, es)) / mpmath.fsum(es)


def _increase(d: DiscreteDist, a: tuple[float, float], b: tuple[float, float]) -> int:
    """Sign of ``E(b) - E(a)`` for (h, w) pairs ``a`` and ``b``, in extended precision.

    For widely spread laws the increment can sit far below double resolution;
    the working precision grows with ``h * (sup - inf)`` so it stays visible.
    Differences under the working-precision noise floor count as 0.
    """
    spread = max(a[0], b[0]) * (d.support_sup() - d.support_inf())
    dps = 40 + int(spread)
    with mpmath.workdps(dps):
        diff = _tilted_mean_mp(d, *b, dps) - _tilted_mean_mp(d, *a, dps)
        floor = mpmath.mpf(10) ** (10 - dps) * max(1.0, float(np.abs(d.atoms).max()))
        if abs(diff) <= floor:
            return 0
        return 1 if diff > 0 else -1


def _w_grid(d: DiscreteDist, n: int = 9) -> list[float]:
    lo, hi = d.support_inf(), d.support_sup()
    r = hi - lo
    inner = [lo + r * t for t in np.linspace(0.05, 0.95, n)]
    return [lo - r, lo - 0.5 * r, lo, *inner, hi, hi + 0.5 * r, hi + r]


def monotonicity_suite(
    params_grid: Iterable[Params],
    g: GridSpec = GridSpec(random_dists=100),
    h_grid: Sequence[float] = tuple(np.geomspace(0.1, 5.0, 12)),
) -> CheckReport:
    """Monotonicity of E_{h,w}X in h and w on random laws, and of S in h, w and sigma.

    Strict increase is required (difference > 0, no tolerance) wherever it is
    claimed: in h when w > inf supp X, in w on [inf supp X, sup supp X], and
    for the supremum along every axis. Elsewhere only nondecreasing, and for
    w >= sup supp X the value must not change at all.
    """
    report = CheckReport("monotonicity_suite")

    def flag(kind, **info):
        report.violations.append({"kind": kind, **info})

    for di, d in enumerate(random_dists(g, 1.0, salt=0x0110)):
        lo, hi = d.support_inf(), d.support_sup()
        ws = _w_grid(d)
        table = np.array([[tilted_mean(d, h, w) for w in ws] for h in h_grid])
        for j, w in enumerate(ws):
            strict = w > lo
            for i in range(len(h_grid) - 1):
                h0, h1 = float(h_grid[i]), float(h_grid[i + 1])
                diff = float(table[i + 1, j] - table[i, j])
                report.cases += 1
                if diff > 0 or (diff == 0 and not strict):
                    continue
                sign = _increase(d, (h0, w), (h1, w))
                if sign < 0:
                    flag("h-nondecreasing", dist=di, w=w, h=(h0, h1))
                elif strict and sign == 0:
                    flag("h-strict", dist=di, w=w, h=(h0, h1))
        for i, h in enumerate(h_grid):
            h = float(h)
            for j in range(len(ws) - 1):
                w0, w1 = float(ws[j]), float(ws[j + 1])
                diff = float(table[i, j + 1] - table[i, j])
                report.cases += 1
                if w0 >= hi:
                    if diff != 0:
                        flag("w-constant-above-support", dist=di, h=h, w=(w0, w1), diff=diff)
                    continue
                strict = lo <= w0 and w1 <= hi
                if diff > 0 or (diff == 0 and not strict):
                    continue
                sign = _increase(d, (h, w0), (h, w1))
                if sign < 0:
                    flag("w-nondecreasing", dist=di, h=h, w=(w0, w1))
                elif strict and sign == 0:
                    flag("w-strict", dist=di, h=h, w=(w0, w1))

    params_grid = list(params_grid)
    sup = {(p.h, p.w, p.sigma): supremum(p).supremum for p in params_grid}
    for axis, name in ((0, "h"), (1, "w"), (2, "sigma")):
        groups = defaultdict(list)
        for key, val in sup.items():
            rest = tuple(v for i, v in enumerate(key) if i != axis)
            groups[rest].append((key[axis], val))
        for rest, pts in groups.items():
            pts.sort()
            for (x0, s0), (x1, s1) in zip(pts, pts[1:]):
                report.cases += 1
                if not s1 > s0:
                    flag(f"S-strict-in-{name}", fixed=rest, at=(x0, x1), values=(s0, s1))
    return report


def corollary_y_check(p: Params, g: GridSpec = GridSpec()) -> CheckReport:
    """Replacing the factor X by Y <= X keeps the tilted ratio below S and the K bound.

    Y = X∧w always; Y = X 1{X <= w} only for w >= 0, where it is <= X.
    """
    res = supremum(p)
    s, kb = res.supremum, res.k_bound
    report = CheckReport(f"corollary_y_check h={p.h:g} w={p.w:g} sigma={p.sigma:g}")
    if p.w < 0:
        report.notes.append("Y = X 1{X<=w} skipped: not dominated by X for w < 0")
    ratios = []
    for i, d in enumerate(random_dists(g, p.sigma, salt=_salt(p) ^ 0xC0C0)):
        ys = {"min": np.minimum(d.atoms, p.w)}
        if p.w >= 0:
            ys["indicator"] = np.where(d.atoms <= p.w, d.atoms, 0.0)
        for label, y in ys.items():
            val = tilted_expectation(d, y, p.h, p.w)
            ratios.append(val / s)
            report.cases += 1
            if val > s + SLACK or not val < kb:
                report.violations.append({"case": i, "y": label, "value": val, "supremum": s, "k_bound": kb})
    if ratios:
        report.max_ratio = max(ratios)
    return report
