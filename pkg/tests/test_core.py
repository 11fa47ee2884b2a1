import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import mp_two_point_mean
from wintilt.core import DiscreteDist, Params, TwoPointDist, tilted_mean, two_point_mean, validate_extremal

finite = st.floats(-10, 10, allow_nan=False)
pos = st.floats(0.05, 5)


@st.composite
def dists(draw, max_size=5):
    n = draw(st.integers(1, max_size))
    xs = draw(st.lists(st.floats(-5, 5), min_size=n, max_size=n, unique=True))
    ws = np.array(draw(st.lists(st.floats(0.05, 1), min_size=n, max_size=n)))
    return DiscreteDist(xs, ws / ws.sum())


def test_point_mass():
    assert tilted_mean(DiscreteDist.point_mass(0.0), 1.0, 1.0) == 0.0


@pytest.mark.parametrize("w", [1.0, 1.5, 10.0])
def test_symmetric_two_point_untruncated(w):
    d = DiscreteDist([-1, 1], [0.5, 0.5])
    assert tilted_mean(d, 1.0, w) == pytest.approx(math.tanh(1.0), rel=1e-15)


def test_symmetric_two_point_truncated_at_zero():
    d = DiscreteDist([-1, 1], [0.5, 0.5])
    assert tilted_mean(d, 1.0, 0.0) == pytest.approx(math.tanh(0.5), rel=1e-15)
    assert tilted_mean(d, 1.0, 0.0) == pytest.approx((1 - math.exp(-1)) / (1 + math.exp(-1)), rel=1e-15)


def test_two_point_mean_examples():
    assert two_point_mean(TwoPointDist(1, 1), 1, 1) == pytest.approx(math.tanh(1), rel=1e-15)
    assert two_point_mean(TwoPointDist(1, 1), 1, 0) == pytest.approx(math.tanh(0.5), rel=1e-15)


def test_two_point_mean_against_high_precision():
    tp = TwoPointDist(0.5, 2.0)
    expected = mp_two_point_mean(0.5, 2.0, 2.0, 1.0)
    # closed form eps s2 (e^{hw} - e^{-eps h}) / (eps^2 e^{hw} + s2 e^{-eps h}), eps=0.5, s2=1
    e, s2, h, w = mpmath.mpf("0.5"), 1, 2, 1
    closed = e * s2 * (mpmath.exp(h * w) - mpmath.exp(-e * h)) / (e**2 * mpmath.exp(h * w) + s2 * mpmath.exp(-e * h))
    assert abs(closed - expected) < mpmath.mpf(10) ** -40
    assert two_point_mean(tp, 2.0, 1.0) == pytest.approx(float(expected), rel=1e-15)
    d = DiscreteDist([-0.5, 2.0], [0.8, 0.2])
    assert tilted_mean(d, 2.0, 1.0) == pytest.approx(float(expected), rel=1e-14)


def test_validate_extremal():
    tp = TwoPointDist(1, 1)
    assert validate_extremal(tp, 1.0)
    assert not validate_extremal(tp, 1.0001)
    assert not validate_extremal(tp, -1.0)
    assert validate_extremal(tp, -0.999)


def test_two_point_moments():
    tp = TwoPointDist(0.3, 7.0)
    d = tp.as_discrete()
    assert abs(d.mean()) < 1e-15
    assert d.variance() == pytest.approx(2.1, rel=1e-14)
    assert tp.variance() == pytest.approx(2.1, rel=1e-15)


def test_no_overflow_for_large_exponents():
    d = DiscreteDist([-1.0, 700.0], [0.5, 0.5])
    val = tilted_mean(d, 1.0, 1000.0)
    assert math.isfinite(val)
    assert val == pytest.approx(700.0, rel=1e-12)
    assert math.isfinite(tilted_mean(d, 5.0, 1000.0))
    assert math.isfinite(two_point_mean(TwoPointDist(1.0, 700.0), 2.0, 700.0))


@pytest.mark.parametrize(
    "atoms, masses",
    [
        ([0, 1], [0.5, 0.6]),
        ([0, 1], [1.0, 0.0]),
        ([0, 1], [1.2, -0.2]),
        ([], []),
        ([0, math.nan], [0.5, 0.5]),
    ],
)
def test_invalid_dists_rejected(atoms, masses):
    with pytest.raises(ValueError):
        DiscreteDist(atoms, masses)


def test_dedup_and_sort():
    d = DiscreteDist([1.0, -2.0, 1.0 + 1e-16], [0.25, 0.5, 0.25])
    assert list(d.atoms) == [-2.0, 1.0]
    assert list(d.masses) == [0.5, 0.5]


def test_immutable():
    d = DiscreteDist([0.0, 1.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        d.atoms[0] = 3.0


def test_params_validation():
    Params(1, -3, 1)
    for bad in [(0, 1, 1), (1, 1, 0), (-1, 0, 1), (1, math.inf, 1)]:
        with pytest.raises(ValueError):
            Params(*bad)


# --- properties -------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(dists(), pos, finite, st.randoms(use_true_random=False))
def test_permutation_and_merge_invariance(d, h, w, rnd):
    xs, ps = list(d.atoms), list(d.masses)
    idx = list(range(len(xs)))
    rnd.shuffle(idx)
    perm = DiscreteDist([xs[i] for i in idx], [ps[i] for i in idx])
    # split the first atom into two equal pieces
    split = DiscreteDist(xs + [xs[0]], [ps[0] / 2] + ps[1:] + [ps[0] / 2])
    ref = tilted_mean(d, h, w)
    assert tilted_mean(perm, h, w) == pytest.approx(ref, rel=1e-13, abs=1e-14)
    assert tilted_mean(split, h, w) == pytest.approx(ref, rel=1e-13, abs=1e-14)


@settings(max_examples=300, deadline=None)
@given(dists(), pos, finite, finite)
def test_shift_identity(d, h, w, m):
    assert tilted_mean(d.shifted(m), h, w) == pytest.approx(m + tilted_mean(d, h, w - m), abs=1e-10)


@settings(max_examples=300, deadline=None)
@given(dists(), pos, finite)
def test_rescaling_identity(d, h, w):
    assume(abs(w) > 1e-3)
    c = abs(w)
    lhs = tilted_mean(d, h, w)
    rhs = c * tilted_mean(d.scaled(1 / c), h * c, w / c)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


@settings(max_examples=500, deadline=None)
@given(st.floats(0.05, 10), st.floats(0.05, 10), st.floats(0.05, 5), st.floats(-1, 1))
def test_two_point_matches_generic(u, v, h, frac):
    # w anywhere in [-2u, 2v]; keep h(u+w) away from 0 so the generic ratio is well conditioned
    w = frac * (2 * v if frac > 0 else 2 * u)
    assume(abs(h * (u + w)) > 1e-2)
    tp = TwoPointDist(u, v)
    assert two_point_mean(tp, h, w) == pytest.approx(tilted_mean(tp.as_discrete(), h, w), rel=1e-13, abs=1e-15)


@settings(max_examples=300, deadline=None)
@given(dists(), st.floats(0.01, 50), st.floats(-100, 100))
def test_bounded_by_largest_atom(d, h, w):
    assert abs(tilted_mean(d, h, w)) <= np.abs(d.atoms).max() * (1 + 1e-15)
