"""Bracketed root-finders for the characteristic roots of the tilted-mean problem.

All target functions are evaluated in a rearranged form with the dominant
exponential factored out, so their sign is reliable for ``h * eps`` up to
several hundred. Bisection carries the convergence guarantee (each target
changes sign exactly once); a secant step polishes the final bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

_LOG_MAX = math.log(1.7976931348623157e308)
_INV_E = math.exp(-1.0)

#: supported range of the (canonical) tilt h; sigma_h^2 ~ e^{-h}/h stops being a
#: normal double past H_MAX, and roots for huge sigma leave the bracket range below H_MIN
H_MIN = 1e-20
H_MAX = 700.0


class DomainError(ValueError):
    """An argument lies outside the domain where the requested root exists."""


class ConvergenceError(RuntimeError):
    """A root-finder failed to bracket or to meet its residual contract."""


@dataclass(frozen=True)
class RootConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_iter: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


DEFAULT = RootConfig()


def expm1mx(x: float) -> float:
    """``e^x - 1 - x`` without cancellation near 0."""
    if abs(x) < 0.5:
        term = x * x / 2.0
        total = term
        k = 2
        while abs(term) > 1e-17 * abs(total):
            k += 1
            term *= x / k
            total += term
        return total
    if x > _LOG_MAX:
        return math.inf
    return math.expm1(x) - x


# ---------------------------------------------------------------------------
# generic bracketing machinery


def _bisect(f: Callable[[float], float], lo: float, hi: float, cfg: RootConfig) -> float:
    """Root of ``f`` in ``(lo, hi)`` given ``f(lo) > 0 > f(hi)`` or the reverse.

    Midpoints are geometric while the bracket spans more than a factor of two,
    arithmetic after that. Runs down to adjacent floats, then tries one secant
    step inside the final bracket.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ConvergenceError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(cfg.max_iter):
        if lo > 0 and hi > 2 * lo:
            mid = lo * math.sqrt(hi / lo)
        else:
            mid = lo + (hi - lo) / 2
        if not lo < mid < hi:
            break
        f_mid = f(mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    best, f_best = (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)
    if math.isfinite(f_lo) and math.isfinite(f_hi) and f_hi != f_lo:
        x = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        if lo < x < hi:
            f_x = f(x)
            if abs(f_x) < abs(f_best):
                best = x
    return best


def _expand_up(f: Callable[[float], float], lo: float, cfg: RootConfig) -> float:
    """Double ``hi`` from ``2*lo`` until ``f`` changes sign relative to ``f(lo)``; cap at ``2**60 * lo``."""
    positive = f(lo) > 0
    hi = 2 * lo
    cap = lo * 2.0**60
    for _ in range(cfg.max_iter):
        if (f(hi) > 0) != positive:
            return hi
        if hi >= cap:
            break
        hi *= 2
    raise ConvergenceError(f"bracket expansion from {lo!r} found no sign change")


def _climb(f: Callable[[float], float], lo: float, cfg: RootConfig) -> tuple[float, float]:
    """Bracket for a + to - sign change above ``lo`` (with ``f(lo) > 0``).

    Steps up by factors 2, 4, 16, 256, ... so that roots many decades above the
    seed (the nonpositive-w roots range from ~sigma^(2/3) to ~1/h) are reached
    in a handful of evaluations; the geometric bisection then narrows the
    possibly very wide bracket cheaply.
    """
    factor = 2.0
    for _ in range(cfg.max_iter):
        hi = lo * factor
        if not math.isfinite(hi):
            break
        if not f(hi) > 0:
            return lo, hi
        lo = hi
        factor = min(factor * factor, 1e100)
    raise ConvergenceError(f"no sign change found above {lo!r}")


def _shrink_down(f: Callable[[float], float], start: float, want_positive: bool, cfg: RootConfig) -> float:
    """Walk down from ``start`` until ``f`` has the wanted sign; the divisor squares each step (2, 4, 16, ...)."""
    x, factor = start, 2.0
    for _ in range(cfg.max_iter):
        if (f(x) > 0) == want_positive:
            return x
        if x / factor == 0:
            break
        x /= factor
        factor = min(factor * factor, 1e100)
    raise ConvergenceError(f"could not find a lower bracket below {start!r}")


# ---------------------------------------------------------------------------
# u_*(h, eps) and the roots built on it


def u_star(h: float, eps: float) -> float:
    """u_*(h, eps) = eps^2 (e^{(1+eps)h} - 1 - eps h) / (1 + eps h - e^{-(1+eps)h}).

    Returns ``inf`` when the value is not representable.
    """
    if not (h > 0 and eps > 0):
        raise DomainError("u_star needs h > 0 and eps > 0")
    a = (1.0 + eps) * h
    x = eps * h
    den = x - math.expm1(-a)
    if a < 700.0:
        # e^a - 1 - eps*h == (e^a - 1 - a) + h, both terms positive
        num = expm1mx(a) + h
        # for tiny eps, eps^2 alone would underflow while eps^2 e^a does not
        return eps * (eps * num) / den if eps < 1 else eps * eps * num / den
    log_val = 2 * math.log(eps) + a + math.log1p(-(1.0 + x) * math.exp(-a)) - math.log(den)
    if log_val >= _LOG_MAX:
        return math.inf
    return math.exp(log_val)


def sigma_h(h: float, cfg: RootConfig = DEFAULT) -> float:
    """Threshold sigma_h: the unique positive s with u_*(h, s^2) = s^2."""
    if not h > 0:
        raise DomainError("h must be positive")
    if h > H_MAX:
        # sigma_h^2 ~ e^{-h}/h is no longer a normal double
        raise DomainError(f"sigma_h is only supported for h <= {H_MAX:g}, got {h!r}")

    # u_*(h, eps)/eps - 1 has the sign of eps - sigma_h^2
    def f(eps):
        return u_star(h, eps) / eps - 1.0

    lo = _shrink_down(f, min(1.0, math.exp(-h)), False, cfg)
    hi = _expand_up(f, lo, cfg)
    eps = _bisect(f, lo, hi, cfg)
    if abs(f(eps)) > cfg.rel_tol:
        raise ConvergenceError(f"sigma_h({h}) residual {f(eps):.3e} exceeds tolerance")
    return math.sqrt(eps)


def eps_tilde(h: float, sigma: float, cfg: RootConfig = DEFAULT, *, s_h: float | None = None) -> float:
    """Root in ``(0, sigma^2)`` of u_*(h, eps) = sigma^2; exists only for sigma > sigma_h.

    ``s_h`` may be passed to reuse an already computed ``sigma_h(h)``.
    """
    if not (h > 0 and sigma > 0):
        raise DomainError("h and sigma must be positive")
    if s_h is None:
        s_h = sigma_h(h, cfg)
    if sigma <= s_h:
        raise DomainError(
            f"sigma={sigma!r} <= sigma_h={s_h!r}: root lies outside (0, sigma^2); use eps*=sigma^2 branch"
        )
    s2 = sigma * sigma

    def f(eps):
        return u_star(h, eps) / s2 - 1.0

    hi = s2
    lo = _shrink_down(f, s2 / 2, False, cfg)
    eps = _bisect(f, lo, hi, cfg)
    if abs(f(eps)) > cfg.rel_tol:
        raise ConvergenceError(f"eps_tilde({h}, {sigma}) residual {f(eps):.3e} exceeds tolerance")
    return eps


def r_w1(h: float, w: float, sigma: float, eps: float) -> float:
    """r_{w,1}(eps) = e^{(eps+w)h}(1+eps h)(eps^2+sigma^2) - eps^2 e^{2(eps+w)h} - sigma^2, evaluated literally."""
    e = math.exp((eps + w) * h)
    return e * (1 + eps * h) * (eps * eps + sigma * sigma) - eps * eps * e * e - sigma * sigma


def r_w1_scaled(h: float, w: float, sigma: float, eps: float) -> float:
    """``r_w1 * e^{-(eps+w)h}``, rearranged so that no term overflows or cancels spuriously."""
    a = (eps + w) * h
    s2 = sigma * sigma
    return s2 * (eps * h - math.expm1(-a)) - eps * eps * (w * h + expm1mx(a))


def eps_opt_nonpos_w(h: float, w: float, sigma: float, cfg: RootConfig = DEFAULT) -> float:
    """Unique root in ``(|w|, inf)`` of r_{w,1} for ``w`` in ``{-1, 0}``."""
    if w not in (-1, 0):
        raise DomainError(f"w must be -1 or 0, got {w!r}")
    if not (h > 0 and sigma > 0):
        raise DomainError("h and sigma must be positive")
    base = -float(w)

    def f(t):
        return r_w1_scaled(h, w, sigma, base + t)

    lo = _shrink_down(f, min(1.0, 1.0 / h, sigma), True, cfg)
    lo, hi = _climb(f, lo, cfg)
    t = _bisect(f, lo, hi, cfg)
    eps = base + t
    scale = (1 + eps * h) * (eps * eps + sigma * sigma)
    if abs(r_w1_scaled(h, w, sigma, eps)) > cfg.rel_tol * scale:
        raise ConvergenceError(f"eps_opt_nonpos_w({h}, {w}, {sigma}) failed residual check")
    return eps


# ---------------------------------------------------------------------------
# Lambert W, lower branch


def _lambert_residual(u: float, z: float) -> float:
    return abs(u * math.exp(u) - z)


def lambert_w_m1(z: float) -> float:
    """The root ``u <= -1`` of ``u e^u = z`` for ``z`` in ``[-1/e, 0)``.

    Series about the branch point or the asymptotic log expansion seeds a
    Halley iteration; the result is then compared against its two float
    neighbours and the one with the smallest residual is returned.
    """
    if not (-_INV_E <= z < 0):
        raise DomainError(f"lambert_w_m1 needs z in [-1/e, 0), got {z!r}")
    if z == -_INV_E:
        return -1.0

    q = 1.0 + math.e * z
    if q < 0.25:
        p = -math.sqrt(2.0 * max(q, 0.0))
        u = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3 - 43.0 / 540.0 * p**4
    else:
        l1 = math.log(-z)
        l2 = math.log(-l1)
        u = l1 - l2 + l2 / l1
    u = min(u, -1.0)

    log_mz = math.log(-z)
    for _ in range(100):
        if u == -1.0:
            break
        # t = (u e^u - z) e^{-u}, evaluated without forming e^{-u}
        t = u + math.exp(log_mz - u)
        up1 = u + 1.0
        du = t / (up1 - (u + 2.0) * t / (2.0 * up1))
        u_new = min(u - du, -1.0)
        if abs(u_new - u) <= 4e-16 * abs(u_new):
            u = u_new
            break
        u = u_new

    best = u
    for cand in (math.nextafter(u, -math.inf), math.nextafter(u, 0.0)):
        if cand <= -1.0 and _lambert_residual(cand, z) < _lambert_residual(best, z):
            best = cand
    return best


def _p_minus_log1p(p: float) -> float:
    if p < 0.1:
        # alternating series p^2/2 - p^3/3 + ...; 18 terms reach double precision at p = 0.1
        return math.fsum((-1) ** k * p**k / k for k in range(2, 20))
    return p - math.log1p(p)


def lambert_w_m1_offset(x: float) -> float:
    """``p = -1 - W_{-1}(-e^{-1-x})`` for ``x >= 0``, to full relative precision.

    Near the branch point W_{-1} amplifies the rounding of ``z`` by ~1/sqrt(x),
    and ``-1 - p`` cannot even hold a small ``p``; so callers that only need
    the offset pass ``x`` and get ``p`` back. ``p`` solves ``p - log1p(p) = x``.
    """
    if not (x >= 0 and math.isfinite(x)):
        raise DomainError(f"lambert_w_m1_offset needs finite x >= 0, got {x!r}")
    if x == 0:
        return 0.0
    if x < 1e-3:
        p = math.sqrt(2 * x) + 2 * x / 3
    elif x < 700:
        p = -1.0 - lambert_w_m1(-math.exp(-1.0 - x))
    else:
        p = x + math.log(x)
    for _ in range(50):
        step = (_p_minus_log1p(p) - x) * (1 + p) / p
        p -= step
        if abs(step) <= 2e-16 * p:
            break
    return p
