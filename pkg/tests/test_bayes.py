import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wintilt.bayes import (
    BayesFamily,
    DiscretePrior,
    extremal_prior,
    posterior_mean,
    posterior_mean_bound,
    random_prior,
)
from wintilt.core import DiscreteDist
from wintilt.roots import DomainError, sigma_h


def test_point_mass_prior():
    d = DiscreteDist.point_mass(0.3)
    for t in (0.0, 0.5, 7.0, -2.0):
        assert posterior_mean(d, t) == 0.3


@pytest.mark.parametrize("t", [0.1, 1.0, 4.0])
def test_symmetric_two_point_prior(t):
    m, s = 0.2, 0.5
    d = DiscreteDist([m - s, m + s], [0.5, 0.5])
    assert posterior_mean(d, t) == pytest.approx(m + s * math.tanh(s * t), rel=1e-14)
    assert posterior_mean(d, -t) == pytest.approx(m - s * math.tanh(s * t), rel=1e-14)


def test_zero_t_is_prior_mean():
    d = DiscreteDist([-1.0, 0.5, 2.0], [0.2, 0.5, 0.3])
    assert posterior_mean(d, 0.0) == pytest.approx(d.mean(), rel=1e-15)


def test_ordering_example():
    fam = BayesFamily(1.0, 0.0, 0.1)
    exact, simple = posterior_mean_bound(fam, 1.0)
    assert 0.0 < exact < simple < fam.theta_max
    assert simple == pytest.approx(math.expm1(1.0) * 0.01, rel=1e-15)


def test_vanishing_sigma():
    exact, _ = posterior_mean_bound(BayesFamily(1.0, 0.0, 1e-6), 1.0)
    assert 0 < exact < 1e-11


def test_small_t_simple_bound():
    t = 1e-9
    _, simple = posterior_mean_bound(BayesFamily(1.0, 0.0, 0.1), t)
    assert simple == pytest.approx(t * 0.01, rel=1e-8)


def test_domain_errors():
    with pytest.raises(DomainError):
        BayesFamily(1.0, 1.0, 0.1)
    with pytest.raises(DomainError):
        BayesFamily(1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        posterior_mean_bound(BayesFamily(1.0, 0.0, 0.1), 0.0)
    with pytest.raises(DomainError):
        DiscretePrior(DiscreteDist([0.0, 2.0], [0.5, 0.5]), theta_max=1.0)


def threshold(fam, t):
    w = fam.headroom
    return w * sigma_h(t * w)


@pytest.mark.parametrize("theta_max, m, t", [(1.0, 0.0, 1.0), (2.0, 0.5, 3.0), (0.3, -1.0, 0.5)])
def test_extremal_prior_attains_bound(theta_max, m, t):
    sc = threshold(BayesFamily(theta_max, m, 1.0), t)
    for f in (0.2, 0.5, 0.999):
        fam = BayesFamily(theta_max, m, f * sc)
        d, ok = extremal_prior(fam, t)
        assert ok
        prior = DiscretePrior(d, theta_max)
        assert prior.matches(fam)
        exact, _ = posterior_mean_bound(fam, t)
        assert posterior_mean(prior, t) == pytest.approx(exact, abs=1e-9)


def test_exact_bound_can_exceed_trivial_bound_beyond_threshold():
    fam = BayesFamily(0.6, -0.8, 0.35)
    assert fam.prior_sd > threshold(fam, 10.0)
    exact, _ = posterior_mean_bound(fam, 10.0)
    assert exact > fam.theta_max


def test_extremal_prior_beyond_threshold_leaves_support():
    fam = BayesFamily(1.0, 0.0, 1.5 * threshold(BayesFamily(1.0, 0.0, 1.0), 1.0))
    d, ok = extremal_prior(fam, 1.0)
    assert not ok
    assert d.support_sup() > fam.theta_max


def test_random_prior_matches_family():
    fam = BayesFamily(0.7, -0.2, 0.3)
    rng = np.random.default_rng(11)
    for size in (2, 3, 4):
        for _ in range(50):
            p = random_prior(fam, rng, size)
            assert p.matches(fam)
            assert p.dist.support_sup() <= fam.theta_max


def test_random_priors_never_exceed_exact_bound():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        fam = BayesFamily(rng.uniform(0.1, 2), rng.uniform(-1, 0), rng.uniform(0.05, 1))
        fam = BayesFamily(fam.prior_mean + fam.theta_max, fam.prior_mean, fam.prior_sd)
        for t in np.geomspace(0.1, 10, 5):
            exact, simple = posterior_mean_bound(fam, float(t))
            assert fam.prior_mean < exact < simple
            if fam.prior_sd <= threshold(fam, float(t)):
                # the maximizer then lives on [m - u, theta_max]; beyond the threshold
                # it puts mass above theta_max and the bound can exceed the trivial one
                assert exact <= fam.theta_max
            for _ in range(10):
                p = random_prior(fam, rng, int(rng.integers(2, 5)))
                assert posterior_mean(p, float(t)) <= exact + 1e-9


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 5), st.floats(-2, 2), st.floats(0.01, 2), st.floats(0.01, 10))
def test_bound_ordering(headroom, m, sd, t):
    fam = BayesFamily(m + headroom, m, sd)
    exact, simple = posterior_mean_bound(fam, t)
    assert m < exact < simple
