import mpmath
import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""

    def record(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} {label}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# --- independent high-precision oracles ------------------------------------

mpmath.mp.dps = 50


def mp_u_star(h, eps):
    """u_*(h, eps) from its literal definition, 50 digits."""
    h, eps = mpmath.mpf(h), mpmath.mpf(eps)
    a = (1 + eps) * h
    return eps**2 * (mpmath.exp(a) - 1 - eps * h) / (1 + eps * h - mpmath.exp(-a))


def mp_r_w1(h, w, sigma, eps):
    h, w, sigma, eps = (mpmath.mpf(x) for x in (h, w, sigma, eps))
    e = mpmath.exp((eps + w) * h)
    return e * (1 + eps * h) * (eps**2 + sigma**2) - eps**2 * e**2 - sigma**2


def mp_bisect(f, lo, hi, iters=200):
    """Plain bisection on mp numbers; f(lo) and f(hi) must differ in sign."""
    lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
    flo = f(lo)
    assert (flo > 0) != (f(hi) > 0)
    for _ in range(iters):
        mid = (lo + hi) / 2
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def mp_two_point_mean(u, v, h, w):
    """Tilted mean of the zero-mean law on {-u, v}, straight from the definition."""
    u, v, h, w = (mpmath.mpf(x) for x in (u, v, h, w))
    pl, pr = v / (u + v), u / (u + v)
    el, er = mpmath.exp(h * min(-u, w)), mpmath.exp(h * min(v, w))
    return (-u * pl * el + v * pr * er) / (pl * el + pr * er)
