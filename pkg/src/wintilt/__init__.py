"""Exact upper bounds on the Winsorized-tilted mean E[X e^{h(X∧w)}] / E[e^{h(X∧w)}]."""

from .bounds import BoundResult, Branch, k_factor, k_factor_canonical, supremum, supremum_canonical
from .core import DiscreteDist, Params, TwoPointDist, tilted_mean, two_point_mean, validate_extremal
from .roots import ConvergenceError, DomainError, RootConfig, lambert_w_m1, sigma_h

__all__ = [
    "BoundResult",
    "Branch",
    "ConvergenceError",
    "DiscreteDist",
    "DomainError",
    "Params",
    "RootConfig",
    "TwoPointDist",
    "k_factor",
    "k_factor_canonical",
    "lambert_w_m1",
    "sigma_h",
    "supremum",
    "supremum_canonical",
    "tilted_mean",
    "two_point_mean",
    "validate_extremal",
]
