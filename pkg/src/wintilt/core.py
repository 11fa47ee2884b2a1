"""Finite discrete distributions and the Winsorized-tilted mean.

The Winsorized-tilted mean of X at tilt ``h > 0`` and Winsorization level ``w`` is

    E_{h,w} X = E[X exp(h min(X, w))] / E[exp(h min(X, w))].

Everything here is evaluated exactly (up to rounding) on finite discrete laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MASS_TOL = 1e-12
DEDUP_TOL = 1e-14


@dataclass(frozen=True)
class Params:
    """The triple ``(h, w, sigma)`` every bound is parameterized by."""

    h: float
    w: float
    sigma: float

    def __post_init__(self):
        for name in ("h", "w", "sigma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.h > 0:
            raise ValueError(f"h must be positive, got {self.h}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


class DiscreteDist:
    """Immutable finite probability distribution.

    Atoms are sorted on construction and atoms closer than
    ``1e-14 * max(1, |x|)`` are merged (their masses added).
    """

    __slots__ = ("_x", "_p")

    def __init__(self, atoms: Sequence[float] | np.ndarray, masses: Sequence[float] | np.ndarray):
        x = np.asarray(atoms, dtype=float).ravel()
        p = np.asarray(masses, dtype=float).ravel()
        if x.shape != p.shape or x.size == 0:
            raise ValueError("atoms and masses must be non-empty and of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            raise ValueError("atoms and masses must be finite")
        if np.any(p <= 0):
            raise ValueError("all masses must be positive")
        if abs(math.fsum(p) - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {math.fsum(p)!r}, not 1")

        order = np.argsort(x, kind="stable")
        x, p = x[order], p[order]
        xs, ps = [float(x[0])], [float(p[0])]
        for xi, pi in zip(x[1:], p[1:]):
            if xi - xs[-1] <= DEDUP_TOL * max(1.0, abs(xi)):
                ps[-1] += float(pi)
            else:
                xs.append(float(xi))
                ps.append(float(pi))

        self._x = np.array(xs)
        self._p = np.array(ps)
        self._x.flags.writeable = False
        self._p.flags.writeable = False

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "DiscreteDist":
        pairs = list(pairs)
        return cls([a for a, _ in pairs], [m for _, m in pairs])

    @classmethod
    def point_mass(cls, x: float) -> "DiscreteDist":
        return cls([x], [1.0])

    @property
    def atoms(self) -> np.ndarray:
        return self._x

    @property
    def masses(self) -> np.ndarray:
        return self._p

    def __len__(self):
        return self._x.size

    def __repr__(self):
        body = ", ".join(f"{x:.6g}: {p:.6g}" for x, p in zip(self._x, self._p))
        return f"DiscreteDist({{{body}}})"

    def __eq__(self, other):
        if not isinstance(other, DiscreteDist):
            return NotImplemented
        return np.array_equal(self._x, other._x) and np.array_equal(self._p, other._p)

    def __hash__(self):
        return hash((self._x.tobytes(), self._p.tobytes()))

    def mean(self) -> float:
        return math.fsum(self._x * self._p)

    def variance(self) -> float:
        m = self.mean()
        return math.fsum((self._x - m) ** 2 * self._p)

    def second_moment(self) -> float:
        return math.fsum(self._x**2 * self._p)

    def support_inf(self) -> float:
        return float(self._x[0])

    def support_sup(self) -> float:
        return float(self._x[-1])

    def shifted(self, m: float) -> "DiscreteDist":
        return DiscreteDist(self._x + m, self._p)

    def scaled(self, c: float) -> "DiscreteDist":
        if not c > 0:
            raise ValueError("scale factor must be positive")
        return DiscreteDist(self._x * c, self._p)


@dataclass(frozen=True)
class TwoPointDist:
    """The zero-mean law on ``{-u, v}``; mass ``v/(u+v)`` at ``-u`` and ``u/(u+v)`` at ``v``."""

    u: float
    v: float

    def __post_init__(self):
        if not (self.u > 0 and self.v > 0 and math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"u and v must be positive and finite, got u={self.u}, v={self.v}")

    @property
    def mass_left(self) -> float:
        return self.v / (self.u + self.v)

    @property
    def mass_right(self) -> float:
        return self.u / (self.u + self.v)

    def mean(self) -> float:
        return 0.0

    def variance(self) -> float:
        return self.u * self.v

    def as_discrete(self) -> DiscreteDist:
        return DiscreteDist([-self.u, self.v], [self.mass_left, self.mass_right])

    def scaled(self, c: float) -> "TwoPointDist":
        return TwoPointDist(self.u * c, self.v * c)


def tilted_expectation(dist: DiscreteDist, values: np.ndarray, h: float, w: float) -> float:
    """E[Y e^{h(X∧w)}] / E[e^{h(X∧w)}] for Y = ``values`` given atom-wise on ``dist``.

    The largest exponent is subtracted before exponentiating, so nothing
    overflows for any finite input.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    a = h * np.minimum(dist.atoms, w)
    weights = np.exp(a - a.max()) * dist.masses
    return math.fsum(np.asarray(values, dtype=float) * weights) / math.fsum(weights)


def tilted_mean(dist: DiscreteDist, h: float, w: float) -> float:
    """Winsorized-tilted mean E_{h,w}X of a finite discrete law."""
    return tilted_expectation(dist, dist.atoms, h, w)


def validate_extremal(tp: TwoPointDist, w: float) -> bool:
    """Membership of ``tp`` in the extremal family at level ``w``: ``-u < w <= v``."""
    return -tp.u < w <= tp.v


def two_point_mean(tp: TwoPointDist, h: float, w: float) -> float:
    """E_{h,w}X for X distributed as ``tp``.

    Inside the extremal family (``-u < w <= v``) this is

        u v (1 - e^{-h(u+w)}) / (u + v e^{-h(u+w)}),

    i.e. eps*s2*(e^{hw} - e^{-eps h}) / (eps^2 e^{hw} + s2 e^{-eps h}) with
    eps = u, s2 = u v, written with ``expm1`` so it stays accurate as
    ``u + w -> 0``. Outside that range the generic two-atom ratio is used.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    u, v = tp.u, tp.v
    if validate_extremal(tp, w):
        d = h * (u + w)
        return u * v * -math.expm1(-d) / (u + v * math.exp(-d))
    a_left = h * min(-u, w)
    a_right = h * min(v, w)
    top = max(a_left, a_right)
    e_left = math.exp(a_left - top)
    e_right = math.exp(a_right - top)
    return u * v * (e_right - e_left) / (v * e_left + u * e_right)
