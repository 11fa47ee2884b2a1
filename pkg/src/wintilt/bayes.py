"""Prior-free upper bounds on the posterior mean of a natural exponential-family parameter.

With densities e^{theta T(x)} c(theta) q(x), a prior pi normalised so that
c(theta) pi(dtheta) is a probability law with mean m, variance <= sigma^2 and
support below theta_max, the posterior mean given t = T(x) satisfies

    theta_hat - m <= S_{t, theta_max - m, sigma} < (e^{(theta_max-m)t} - 1)/(theta_max - m) * sigma^2.

Callers supply ``t`` directly; computing T(x) belongs to the model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bounds import BoundResult, shift_reduce, supremum
from .core import DiscreteDist, Params, tilted_mean
from .oracle import random_zero_mean_dist
from .roots import DomainError


@dataclass(frozen=True)
class BayesFamily:
    theta_max: float
    prior_mean: float
    prior_sd: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.theta_max, self.prior_mean, self.prior_sd)):
            raise DomainError("theta_max, prior_mean and prior_sd must be finite")
        if not self.prior_sd > 0:
            raise DomainError("prior_sd must be positive")
        if not self.prior_mean < self.theta_max:
            raise DomainError("prior_mean must be strictly below theta_max")

    @property
    def headroom(self) -> float:
        return self.theta_max - self.prior_mean


@dataclass(frozen=True)
class DiscretePrior:
    """The c-renormalised prior c(theta) pi(dtheta) as a finite law on theta."""

    dist: DiscreteDist
    theta_max: float

    def __post_init__(self):
        if self.dist.support_sup() > self.theta_max:
            raise DomainError("prior puts mass above theta_max")

    def matches(self, fam: BayesFamily, tol: float = 1e-9) -> bool:
        return (
            abs(self.dist.mean() - fam.prior_mean) <= tol * max(1.0, abs(fam.prior_mean))
            and self.dist.variance() <= fam.prior_sd**2 * (1 + tol)
            and self.theta_max <= fam.theta_max
        )


class PosteriorBounds(NamedTuple):
    exact: float
    simple: float


def posterior_mean(prior: DiscretePrior | DiscreteDist, t: float) -> float:
    """∫θ e^{θt} c dπ / ∫e^{θt} c dπ for a finite prior.

    Any real ``t`` is accepted (``T`` is nonnegative in the usual setting).
    """
    d = prior.dist if isinstance(prior, DiscretePrior) else prior
    if t == 0:
        return d.mean()
    if t > 0:
        return tilted_mean(d, t, d.support_sup())
    # negative tilt: mirror the law so the tilt parameter is positive again
    return -tilted_mean(DiscreteDist(-d.atoms, d.masses), -t, -d.support_inf())


def exact_bound_result(fam: BayesFamily, t: float) -> BoundResult:
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    w = shift_reduce(t, fam.theta_max, fam.prior_mean)
    return supremum(Params(t, w, fam.prior_sd))


def posterior_mean_bound(fam: BayesFamily, t: float) -> PosteriorBounds:
    res = exact_bound_result(fam, t)
    w = fam.headroom
    simple = fam.prior_mean + math.expm1(w * t) / w * fam.prior_sd**2
    return PosteriorBounds(fam.prior_mean + res.supremum, simple)


def extremal_prior(fam: BayesFamily, t: float) -> tuple[DiscreteDist, bool]:
    """Two-point prior attaining the exact bound, shifted to mean ``m``.

    The flag says whether it respects ``theta_max``; that holds exactly when
    the maximizer saturates the variance, i.e. sigma <= (theta_max - m) * sigma_{t (theta_max - m)}.
    """
    res = exact_bound_result(fam, t)
    tp = res.maximizer
    ok = tp.v <= fam.headroom
    top = fam.prior_mean + tp.v
    if ok:
        # here v = theta_max - m exactly; keep the shift from rounding past theta_max
        top = min(top, fam.theta_max)
    d = DiscreteDist([fam.prior_mean - tp.u, top], [tp.mass_left, tp.mass_right])
    return d, ok


def random_prior(fam: BayesFamily, rng: np.random.Generator, size: int = 3) -> DiscretePrior:
    """Random finite prior with mean m, variance <= sigma^2 and support below theta_max."""
    x = random_zero_mean_dist(rng, size, fam.prior_sd)
    top = x.support_sup()
    c = min(1.0, fam.headroom / top) if top > 0 else 1.0
    d = DiscreteDist(x.atoms * c + fam.prior_mean, x.masses)
    # guard against the shift rounding the top atom past theta_max
    if d.support_sup() > fam.theta_max:
        d = DiscreteDist(np.minimum(d.atoms, fam.theta_max), d.masses)
    return DiscretePrior(d, fam.theta_max)
