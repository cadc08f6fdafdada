import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conelab.cones import (
    PolyhedralCone,
    contains_point,
    cross_section,
    dual_cone,
    dual_oracle_mismatches,
    is_compact_subcone,
    separation_margins,
    vladimirov_constant,
)
from conelab.errors import PreconditionError, UnsupportedDimensionError

from conftest import random_cone


def same_cone(A: PolyhedralCone, B: PolyhedralCone, tol=1e-9) -> bool:
    return bool(np.all(A.contains(B.generators, tol=tol)) and np.all(B.contains(A.generators, tol=tol)))


# --- dual_cone ---------------------------------------------------------------


def test_orthant_is_self_dual():
    assert same_cone(dual_cone(PolyhedralCone.orthant(2)), PolyhedralCone.orthant(2))


def test_dual_of_wedge():
    D = dual_cone(PolyhedralCone([[1, 0], [1, 1]]))
    assert same_cone(D, PolyhedralCone([[0, 1], [1, -1]]))


def test_dual_of_wedge_sampling_oracle():
    C = PolyhedralCone([[1, 0], [1, 1]])
    assert dual_oracle_mismatches(C, dual_cone(C), 1000, np.random.default_rng(0)) == 0


def test_light_cone_roughly_self_dual():
    L = PolyhedralCone.light_cone(16, is_open=False)
    D = dual_cone(L)
    assert dual_oracle_mismatches(L, D, 1000, np.random.default_rng(1)) == 0
    # the dual of an inscribed 16-gon cone is circumscribed: same axis, slightly wider
    a = np.arctan2(np.linalg.norm(D.generators[:, 1:], axis=1), D.generators[:, 0])
    assert np.allclose(a, a[0])
    assert np.pi / 4 < a[0] < np.pi / 4 + 0.03


def test_dimension_limit():
    with pytest.raises(UnsupportedDimensionError):
        dual_cone(PolyhedralCone.orthant(5))


def test_whole_space_has_trivial_dual():
    with pytest.raises(PreconditionError):
        dual_cone(PolyhedralCone([[1.0], [-1.0]]))


# --- membership ---------------------------------------------------------------


def test_membership_examples():
    assert contains_point(PolyhedralCone.orthant(2), [1, 1])
    assert not contains_point(PolyhedralCone.orthant(2, is_open=True), [0, 1])
    assert contains_point(PolyhedralCone.orthant(2), [0, 1])
    assert not contains_point(PolyhedralCone([[1, 0], [1, 1]]), [1, 2])


def test_membership_matches_nnls_oracle():
    from scipy.optimize import nnls

    rng = np.random.default_rng(5)
    C = PolyhedralCone([[1, 0, 0], [1, 1, 0], [0, 1, 1], [0, 0, 1]])
    pts = rng.standard_normal((500, 3))
    for p in pts:
        _, res = nnls(C.generators.T, p)
        if abs(res) > 1e-6 or res < 1e-10:
            assert contains_point(C, p) == (res < 1e-10)


# --- compact subcones ------------------------------------------------------


def test_compact_subcone_examples():
    C = PolyhedralCone.orthant(2, is_open=True)
    assert is_compact_subcone(PolyhedralCone([[1, 1]]), C)
    assert not is_compact_subcone(C, C)
    assert is_compact_subcone(PolyhedralCone([[2, 1], [1, 2]]), C)


def test_compact_subcone_margin_oracle():
    # dense cross-section grid of C' keeps a positive margin from the orthant's faces
    Cp = PolyhedralCone([[2, 1], [1, 2]])
    pts = cross_section(Cp, 1001).points
    assert pts.min() > 0.3


# --- Vladimirov constant ---------------------------------------------------


@pytest.mark.parametrize(
    "Cstar, Cp, expected",
    [
        (PolyhedralCone([[1.0]]), PolyhedralCone([[1.0]]), 1.0),
        (PolyhedralCone.orthant(2), PolyhedralCone([[1, 1], [1, 2]]), 1 / 3),
        (PolyhedralCone.orthant(2), PolyhedralCone([[1, 1]]), 1 / 2),
    ],
)
def test_vladimirov_examples(Cstar, Cp, expected):
    assert vladimirov_constant(Cp, Cstar).value == pytest.approx(expected, abs=1e-12)


def test_vladimirov_attaining_pair():
    c = vladimirov_constant(PolyhedralCone([[1, 1], [1, 2]]), PolyhedralCone.orthant(2))
    xi, y = c.attaining_pair
    assert np.allclose(xi, [1, 0]) and np.allclose(y, [1 / 3, 2 / 3])


def test_vladimirov_rejects_non_compact():
    with pytest.raises(PreconditionError):
        vladimirov_constant(PolyhedralCone([[1, 0], [0, 1]]), PolyhedralCone.orthant(2))


# --- cross sections --------------------------------------------------------


def test_cross_section_examples():
    assert np.allclose(cross_section(PolyhedralCone.orthant(1), 1).points, [[1.0]])
    pts = cross_section(PolyhedralCone.orthant(2), 3).points
    assert np.allclose(pts, [[1, 0], [0.5, 0.5], [0, 1]]) or np.allclose(pts, [[0, 1], [0.5, 0.5], [1, 0]])


def test_cross_section_invariants():
    C = PolyhedralCone([[1, 0], [1, 1]])
    pts = cross_section(C, 101).points
    assert len(pts) == 101
    assert np.allclose(np.abs(pts).sum(axis=1), 1.0)
    assert np.all(C.contains(pts, tol=1e-12))


def test_cross_section_3d_reproducible():
    C = PolyhedralCone.light_cone(16, is_open=False)
    a = cross_section(C, 300, seed=4).points
    b = cross_section(C, 300, seed=4).points
    assert np.array_equal(a, b)
    assert np.all(C.contains(a, tol=1e-9))


# --- properties ------------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 3)


@given(seeds, dims)
def test_duality_involution(seed, n):
    C = random_cone(np.random.default_rng(seed), n)
    assert same_cone(dual_cone(dual_cone(C)), PolyhedralCone(C.generators))


@given(seeds, dims)
def test_dual_scale_invariance(seed, n):
    rng = np.random.default_rng(seed)
    C = random_cone(rng, n)
    Cs = C.scaled(rng.uniform(0.1, 10.0, len(C.generators)))
    assert same_cone(dual_cone(C), dual_cone(Cs))


@given(seeds)
def test_compact_subcone_scale_invariance(seed):
    rng = np.random.default_rng(seed)
    C = PolyhedralCone.orthant(3, is_open=True)
    Cp = PolyhedralCone(rng.uniform(0.05, 1.0, (4, 3)))
    f = rng.uniform(0.1, 10.0, 4)
    assert is_compact_subcone(Cp, C) == is_compact_subcone(Cp.scaled(f), C)


@given(seeds, st.integers(2, 3))
def test_dual_monotonicity(seed, n):
    rng = np.random.default_rng(seed)
    C2 = random_cone(rng, n)
    # C1 is spanned by points of C2, hence contained in it
    C1 = PolyhedralCone(rng.dirichlet(np.ones(len(C2.generators)), n) @ C2.generators)
    xi = rng.standard_normal((500, n))
    in2 = dual_cone(C2).contains(xi, tol=1e-9)
    in1 = PolyhedralCone(dual_cone(C1).generators).contains(xi, tol=1e-9)
    assert np.all(in1[in2])


@given(seeds, st.integers(2, 3))
def test_separation_inequality(seed, n):
    rng = np.random.default_rng(seed)
    Cstar = PolyhedralCone.orthant(n)
    Cp = PolyhedralCone(rng.uniform(0.1, 1.0, (n + 1, n)))
    c = vladimirov_constant(Cp, Cstar).value
    assert separation_margins(Cp, Cstar, c, 1000, rng).min() >= -1e-12
