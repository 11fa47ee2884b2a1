"""Exact suprema of the Winsorized-tilted mean over zero-mean laws with variance <= sigma^2.

The supremum is attained by a unique two-point law P_{eps, sigma^2/eps}. For
canonical Winsorization levels ``w in {-1, 0, 1}`` the optimal ``eps`` is a
root from :mod:`wintilt.roots`; any other ``w`` is handled by rescaling:

    S_{h,w,sigma} = |w| * S_{h|w|, w/|w|, sigma/|w|}.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

from .core import Params, TwoPointDist, two_point_mean
from .roots import (
    DEFAULT,
    H_MAX,
    H_MIN,
    DomainError,
    RootConfig,
    eps_opt_nonpos_w,
    eps_tilde,
    lambert_w_m1_offset,
    sigma_h,
)


class Branch(enum.Enum):
    SATURATED_VARIANCE = "SaturatedVariance"
    INTERIOR_ROOT = "InteriorRoot"
    NONPOS_W = "NonposW"


@dataclass(frozen=True)
class CanonicalParams:
    w_canon: int
    h_canon: float
    sigma_canon: float
    scale: float


@dataclass(frozen=True)
class BoundResult:
    """Supremum, its unique maximizer and the K-factor bound for one ``Params``.

    ``eps`` is the canonical optimizer (``u`` of the canonical maximizer).
    """

    params: Params
    supremum: float
    maximizer: TwoPointDist
    k_factor: float
    k_bound: float
    branch: Branch
    canonical: CanonicalParams
    eps: float

    @property
    def ratio(self) -> float:
        # divide in stages: k_bound itself may overflow for large h*w and sigma
        return self.supremum / self.k_factor / self.params.sigma**2


def _check_canonical(w):
    if w not in (-1, 0, 1):
        raise DomainError(f"canonical w must be -1, 0 or 1, got {w!r}")


@functools.lru_cache(maxsize=4096)
def _sigma_h_cached(h: float) -> float:
    return sigma_h(h)


def canonicalize(p: Params) -> CanonicalParams:
    if p.w == 0:
        return CanonicalParams(0, p.h, p.sigma, 1.0)
    c = abs(p.w)
    return CanonicalParams(1 if p.w > 0 else -1, p.h * c, p.sigma / c, c)


def shift_reduce(h: float, w: float, mean: float) -> float:
    """Winsorization level for the centred variable: E_{h,w}(X+m) = m + E_{h,w-m}X."""
    return w - mean


def extremal_mean(h: float, w: float, sigma: float, eps: float) -> float:
    """m_w(eps): tilted mean of P_{eps, sigma^2/eps}."""
    return two_point_mean(TwoPointDist(eps, sigma * sigma / eps), h, w)


def _eps_and_branch(h, w, sigma, cfg):
    _check_canonical(w)
    if w == 1:
        s_h = _sigma_h_cached(h) if cfg == DEFAULT else sigma_h(h, cfg)
        if sigma <= s_h:
            return sigma * sigma, Branch.SATURATED_VARIANCE
        return eps_tilde(h, sigma, cfg, s_h=s_h), Branch.INTERIOR_ROOT
    return eps_opt_nonpos_w(h, w, sigma, cfg), Branch.NONPOS_W


def eps_maximizer(h: float, w: int, sigma: float, cfg: RootConfig = DEFAULT) -> float:
    """The unique maximizer of m_w over (0, sigma^2] (w=1) or (-w, inf) (w<=0)."""
    return _eps_and_branch(h, w, sigma, cfg)[0]


def k_factor_canonical(h: float, w: int) -> float:
    """K_w(h): e^h - 1 for w = 1, h / (-W_{-1}(-e^{hw-1})) for w in {-1, 0}."""
    _check_canonical(w)
    if not h > 0:
        raise DomainError("h must be positive")
    if w == 1:
        return math.expm1(h)
    # -W_{-1}(-e^{hw-1}) = 1 + p with p the branch offset at x = -hw >= 0
    x = -h * w
    assert x >= 0
    return h / (1.0 + lambert_w_m1_offset(x))


def k_factor(h: float, w: float) -> float:
    """K factor for arbitrary real ``w``, obtained by rescaling the canonical one."""
    if w == 0:
        return k_factor_canonical(h, 0)
    # K_{sign w}(h|w|)/|w| written as h times a function of x = h|w|, so that
    # nothing is divided by a tiny |w|
    x = h * abs(w)
    if w > 0:
        return h if x < 1e-150 else h * (math.expm1(x) / x)
    return h / (1.0 + lambert_w_m1_offset(x))


def eps_star(h: float, w: int) -> float:
    """Point where rho_{h,w} peaks for w in {-1, 0}: -(1 + W_{-1}(-e^{hw-1})) / h."""
    if w not in (-1, 0):
        raise DomainError("eps_star is defined for w in {-1, 0}")
    return lambert_w_m1_offset(-h * w) / h


def rho(h: float, w: int, eps: float) -> float:
    """Supremum over sigma of m_{h,w,sigma}(eps) / sigma^2.

    w=1: (e^{(1+eps)h} - 1) / (1 + eps e^{(1+eps)h});
    w in {-1,0}: (1 - e^{-(w+eps)h}) / eps.
    """
    _check_canonical(w)
    if not eps > max(0.0, -w):
        raise DomainError(f"eps={eps!r} outside ({max(0, -w)}, inf)")
    if w == 1:
        a = (1.0 + eps) * h
        return -math.expm1(-a) / (math.exp(-a) + eps)
    return -math.expm1(-(w + eps) * h) / eps


#: supported range of the canonical sigma; beyond it sigma^2 * eps * h under- or overflows in the root targets
SIGMA_RANGE = (1e-100, 1e100)


def supremum_canonical(h: float, w: int, sigma: float, cfg: RootConfig = DEFAULT) -> BoundResult:
    if not H_MIN <= h <= H_MAX:
        raise DomainError(f"h={h!r} (after rescaling, h*|w|) is outside the supported range [{H_MIN:g}, {H_MAX:g}]")
    if not SIGMA_RANGE[0] <= sigma <= SIGMA_RANGE[1]:
        raise DomainError(f"sigma={sigma!r} (after rescaling) is outside the supported range {SIGMA_RANGE}")
    eps, branch = _eps_and_branch(h, w, sigma, cfg)
    tp = TwoPointDist(eps, sigma * sigma / eps)
    k = k_factor_canonical(h, w)
    return BoundResult(
        params=Params(h, float(w), sigma),
        supremum=two_point_mean(tp, h, w),
        maximizer=tp,
        k_factor=k,
        k_bound=k * sigma * sigma,
        branch=branch,
        canonical=CanonicalParams(w, h, sigma, 1.0),
        eps=eps,
    )


#: |w| below this fraction of min(1/h, sigma) is solved at w = 0 directly.
#: S moves by a relative O(h|w| + |w|/sigma) there, i.e. under one ulp, while
#: the rescaled problem (h|w| -> 0, sigma/|w| -> inf) leaves the root-finders' range.
TINY_W = 1e-17


def supremum(p: Params, cfg: RootConfig = DEFAULT) -> BoundResult:
    """S_{h,w,sigma} for any real ``w``, with its maximizer at the original scale."""
    if p.w != 0 and abs(p.w) <= TINY_W * min(1.0 / p.h, p.sigma):
        res = supremum_canonical(p.h, 0, p.sigma, cfg)
        kf = k_factor(p.h, p.w)
        cp = CanonicalParams(0, p.h, p.sigma, 1.0)
        return BoundResult(p, res.supremum, res.maximizer, kf, kf * p.sigma**2, res.branch, cp, res.eps)
    cp = canonicalize(p)
    res = supremum_canonical(cp.h_canon, cp.w_canon, cp.sigma_canon, cfg)
    if cp.scale == 1.0 and cp.w_canon == p.w:
        return BoundResult(p, res.supremum, res.maximizer, res.k_factor, res.k_bound, res.branch, cp, res.eps)
    c = cp.scale
    kf = res.k_factor / c
    return BoundResult(
        params=p,
        supremum=c * res.supremum,
        maximizer=res.maximizer.scaled(c),
        k_factor=kf,
        k_bound=kf * p.sigma * p.sigma,
        branch=res.branch,
        canonical=cp,
        eps=res.eps,
    )
