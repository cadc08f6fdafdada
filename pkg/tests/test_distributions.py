import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conelab.cones import PolyhedralCone
from conelab.distributions import (
    BoundedDensity,
    ExpGrowthDistribution,
    catalog,
    density_eval,
    density_sup_bound,
    distribution_from_literal,
    distribution_to_literal,
    pointwise_decay_bound,
)
from conelab.errors import ConfigError, DivergenceError

HALF_LINE = PolyhedralCone([[1.0]])
Q2 = PolyhedralCone.orthant(2)


def dist(g, k=0.0, C=HALF_LINE, gamma=None):
    return ExpGrowthDistribution(gamma or (0,) * C.dim, k, g, C)


def test_density_eval_examples():
    assert density_eval(dist(BoundedDensity.constant()), [2.0]) == 1
    assert density_eval(dist(BoundedDensity.gaussian(), 1.0, Q2), [1.0, 0.0]) == pytest.approx(1.0)
    assert density_eval(dist(BoundedDensity.constant(), 0.5, Q2), [-1.0, 1.0]) == 0


@pytest.mark.parametrize("g, M", [(BoundedDensity.constant(3), 3), (BoundedDensity.gaussian(), 1),
                                  (BoundedDensity.rational(), 1)])
def test_sup_bound_examples(g, M):
    assert density_sup_bound(dist(g)) == M
    t = np.linspace(-50, 50, 200001)[:, None]
    assert np.abs(g(t)).max() == pytest.approx(M)


def test_pointwise_examples():
    r = pointwise_decay_bound(dist(BoundedDensity.constant()), [1.0], 1.0, [3.0])
    assert r.lhs == pytest.approx(math.exp(-3)) and r.rhs == pytest.approx(math.exp(-3))
    assert r.ok
    # tight along the edge (2, 0): equality up to roundoff
    r = pointwise_decay_bound(dist(BoundedDensity.constant(), 0.2, Q2), [1.0, 1.0], 0.5, [2.0, 0.0])
    assert r.ok and r.margin >= -1e-12 * r.rhs
    with pytest.raises(DivergenceError):
        pointwise_decay_bound(dist(BoundedDensity.constant(), 1.0), [0.5], 1.0, [1.0])


def test_literal_roundtrip():
    for V in list(catalog(1).values()) + list(catalog(2).values()):
        W = distribution_from_literal(distribution_to_literal(V))
        xi = np.random.default_rng(0).uniform(0, 3, (20, V.dim))
        assert np.array_equal(density_eval(V, xi), density_eval(W, xi))
        assert W.gamma == V.gamma and W.k == V.k


def test_bad_literal():
    with pytest.raises(ConfigError):
        distribution_from_literal({"g": {"kind": "constant"}})
    with pytest.raises(ConfigError):
        distribution_from_literal({"g": {"kind": "nope"}, "support": {"generators": [[1]]}})


names = st.sampled_from(sorted(catalog(1)))
seeds = st.integers(0, 2**32 - 1)


@given(names, st.integers(1, 2), seeds)
def test_growth_envelope(name, n, seed):
    V = catalog(n)[name]
    xi = np.random.default_rng(seed).normal(0, 5, (500, n))
    lhs = np.abs(density_eval(V, xi))
    assert np.all(lhs <= density_sup_bound(V) * np.exp(V.k * np.abs(xi).sum(axis=1)) * (1 + 1e-12))


@given(names, seeds)
def test_vanishes_outside_support(name, seed):
    V = catalog(2)[name]
    xi = np.random.default_rng(seed).normal(0, 3, (10_000, 2))
    outside = ~V.support.contains(xi)
    assert np.all(density_eval(V, xi)[outside] == 0)


@given(names, seeds)
def test_pointwise_margin_random(name, seed):
    rng = np.random.default_rng(seed)
    V = catalog(2)[name]
    c = 0.5  # Vladimirov constant of the orthant against the ray (1,1)
    worst = math.inf
    for _ in range(200):
        y = rng.uniform(0.1, 3.0) * np.array([1.0, 1.0])
        if c * np.abs(y).sum() <= V.k:
            continue
        xi = rng.exponential(2.0, 2)
        worst = min(worst, pointwise_decay_bound(V, y, c, xi).margin)
    assert worst >= -1e-12
