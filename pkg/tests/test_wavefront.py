import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conelab.cones import PolyhedralCone
from conelab.distributions import catalog
from conelab.errors import GeometryError, UnsupportedDimensionError
from conelab.transform import FourierLaplace
from conelab.wavefront import (
    BoundarySignal,
    WaveFrontEstimate,
    boundary_value,
    boundary_value_of,
    cone_containment_check,
    direction_spacing,
    fbi_decay_profile,
    probe_directions,
    translated,
    wavefront_estimate,
)

X = np.linspace(-5, 5, 4001)
LAM = np.linspace(5, 40, 16)
HALF_LINE = PolyhedralCone([[1.0]])
# rungs must keep eps * c above k
LADDERS = {"heaviside_k": (1.0, 0.8, 0.65), "rational": (1.0, 0.5, 0.3)}


def ladder(name):
    return LADDERS.get(name, (0.1, 0.03, 0.01))


_signals = {}


def signal(name, shift=None) -> BoundarySignal:
    key = (name, shift)
    if key not in _signals:
        V = catalog(1)[name]
        lad = ladder(name)
        f = FourierLaplace(V, x_max=5 + abs(shift or 0), yc=np.array(lad)[:, None])
        ev = f if shift is None else translated(f, [shift])
        _signals[key] = boundary_value(ev, [1.0], X, lad, meta=V)
    return _signals[key]


def real_signal(values) -> BoundarySignal:
    return BoundarySignal((X,), (np.asarray(values, dtype=complex),), (0.0,), np.ones(1), ())


# --- boundary values -------------------------------------------------------


def test_heaviside_boundary_closed_form():
    u = signal("heaviside")
    for eps, rung in zip(u.eps_ladder, u.rungs):
        want = 1 / (2 * math.pi) / (eps + 1j * X)
        assert np.max(np.abs(rung - want)) < 1e-6 * np.max(np.abs(want))


def test_heaviside_rungs_agree_away_from_origin():
    lad = (0.1, 0.03, 0.01)
    u = boundary_value_of(catalog(1)["heaviside"], [1.0], X, lad, away_from=[[0.0]])
    far = np.abs(X) > 0.5
    exact = [1 / (2 * math.pi) / (e + 1j * X[far]) for e in lad]
    want = [np.abs(a - b).max() for a, b in zip(exact, exact[1:])]
    assert np.allclose(u.cauchy, want, rtol=1e-6)
    assert u.cauchy[-1] < u.cauchy[0]


def test_gaussian_rungs_converge_uniformly():
    u = signal("gaussian")
    assert u.cauchy[1] < u.cauchy[0] < 0.01


def test_zero_signal():
    u = boundary_value(lambda z: np.zeros(len(z), dtype=complex), [1.0], X, (0.1, 0.01))
    assert all(np.all(r == 0) for r in u.rungs) and u.cauchy == (0.0,)


def test_bad_ladder():
    with pytest.raises(ValueError):
        boundary_value(lambda z: z[:, 0], [1.0], X, (0.01, 0.1))


# --- FBI profile -----------------------------------------------------------


@pytest.mark.parametrize("d", [1.0, -1.0])
@pytest.mark.parametrize("x0", [-1.0, 0.0, 0.7])
def test_entire_signal_is_regular(x0, d):
    prof = fbi_decay_profile(real_signal(np.exp(-(X**2))), [x0], [d], LAM)
    assert prof.slope < -0.05


def test_heaviside_direction_dichotomy():
    u = signal("heaviside")
    plus = fbi_decay_profile(u, [0.0], [1.0], LAM).slope
    minus = fbi_decay_profile(u, [0.0], [-1.0], LAM).slope
    assert abs(plus) < 0.03
    assert minus < -0.05


def test_profile_rows():
    prof = fbi_decay_profile(signal("heaviside"), [0.0], [1.0], LAM)
    rows = prof.as_rows()
    assert len(rows) == len(LAM) and rows[0][0] == LAM[0]


def test_window_leak_rejected():
    with pytest.raises(GeometryError):
        fbi_decay_profile(signal("heaviside"), [4.8], [1.0], LAM)


def test_short_lambda_grid_rejected():
    with pytest.raises(ValueError):
        fbi_decay_profile(signal("heaviside"), [0.0], [1.0], LAM[:4])


# --- estimates -------------------------------------------------------------


def test_heaviside_singular_set():
    (est,) = wavefront_estimate(signal("heaviside"), [[0.0]], 2, LAM)
    assert est.singular_set.tolist() == [[1.0]]


def test_gaussian_is_regular_everywhere():
    ests = wavefront_estimate(signal("gaussian"), [[-1.0], [0.0], [1.0]], 2, LAM)
    assert all(len(e.singular_set) == 0 for e in ests)


def test_translation_moves_singular_point():
    ests = wavefront_estimate(signal("heaviside", 1.5), [[0.0], [1.5]], 2, LAM)
    assert len(ests[0].singular_set) == 0
    assert ests[1].singular_set.tolist() == [[1.0]]


def test_cosine_density_singular_at_its_frequency():
    # cos(2 xi) = (e^{2i xi} + e^{-2i xi}) / 2: two shifted Heavisides at x = +-2
    ests = wavefront_estimate(signal("cosine"), [[-2.0], [0.0], [2.0]], 2, LAM)
    assert [len(e.singular_set) for e in ests] == [1, 0, 1]


def test_probe_directions():
    assert probe_directions(1, 2).tolist() == [[1.0], [-1.0]]
    d = probe_directions(2, 8)
    assert np.allclose(np.linalg.norm(d, axis=1), 1)
    assert direction_spacing(probe_directions(1, 2)) == 0
    assert direction_spacing(d) > 0
    with pytest.raises(UnsupportedDimensionError):
        probe_directions(3, 8)


# --- containment -------------------------------------------------------------


def test_containment_heaviside_passes():
    ests = wavefront_estimate(signal("heaviside"), [[0.0]], 2, LAM)
    assert cone_containment_check(ests, HALF_LINE, 0.0).ok


def test_containment_flipped_fails():
    est = WaveFrontEstimate(np.zeros(1), np.array([[1.0], [-1.0]]), np.array([-1.0, 0.0]), 0.05, 40.0)
    r = cone_containment_check([est], HALF_LINE, 0.0)
    assert not r.ok and r.lhs == pytest.approx(2.0)


def test_containment_empty_passes():
    est = WaveFrontEstimate(np.zeros(1), np.array([[1.0], [-1.0]]), np.array([-1.0, -1.0]), 0.05, 40.0)
    assert cone_containment_check([est], HALF_LINE, 0.0).ok


def test_containment_2d_tolerance():
    # a direction just outside the orthant passes only within the angular tolerance
    d = np.array([[1.0, -0.01]])
    est = WaveFrontEstimate(np.zeros(2), d, np.array([0.0]), 0.05, 40.0)
    Q = PolyhedralCone.orthant(2)
    assert not cone_containment_check([est], Q, 0.0).ok
    assert cone_containment_check([est], Q, 0.03).ok


# --- properties --------------------------------------------------------------


@pytest.mark.parametrize("num", [8, 16, 31])
def test_dichotomy_under_lambda_refinement(num):
    lam = np.linspace(5, 40, num)
    u = signal("heaviside")
    plus = fbi_decay_profile(u, [0.0], [1.0], lam).slope
    minus = fbi_decay_profile(u, [0.0], [-1.0], lam).slope
    assert plus - minus > 0.05


@settings(max_examples=15)
@given(st.floats(1.0, 2.0), st.sampled_from([1.0, -1.0]))
def test_locality(x0, sign):
    (est,) = wavefront_estimate(signal("heaviside"), [[sign * x0]], 2, LAM)
    assert len(est.singular_set) == 0


@pytest.mark.parametrize("name", sorted(catalog(1)))
def test_containment_for_catalog(name):
    pts = [[x] for x in np.arange(-2.0, 2.01, 0.5)]
    ests = wavefront_estimate(signal(name), pts, 2, LAM)
    tol = 2 * direction_spacing(probe_directions(1, 2))
    assert cone_containment_check(ests, catalog(1)[name].support, tol).ok


@pytest.mark.parametrize("name", ["heaviside", "gaussian", "cosine", "exp_decay"])
def test_threshold_stability(name):
    pts = [[x] for x in np.arange(-2.0, 2.01, 0.5)]
    ests = wavefront_estimate(signal(name), pts, 2, LAM, 0.03)
    base = [e.singular_mask.tolist() for e in ests]
    for delta in np.linspace(0.03, 0.08, 6):
        assert [e.reclassified(delta).singular_mask.tolist() for e in ests] == base
