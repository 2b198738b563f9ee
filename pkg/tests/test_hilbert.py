import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussradon.errors import InvariantError
from gaussradon.hilbert import (
    AffineSubspace,
    Ball,
    Frame,
    HVector,
    Hull,
    Hyperplane,
    closest_point,
    complement,
    distance,
    extend,
    in_span,
    lift_hyperplane,
    min_norm_point,
    orthonormalize,
    project,
)

e = HVector.basis
coeffs = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6)


def test_hvector_trims_and_compares():
    assert HVector([1.0, 0.0, 0.0]) == HVector([1.0])
    assert HVector([]).size == 0
    assert HVector.from_mapping({3: 2.0}).dense(5).tolist() == [0, 0, 0, 2.0, 0]
    assert hash(HVector([1.0, 0.0])) == hash(HVector([1.0]))


def test_hvector_rejects_nonfinite():
    with pytest.raises((InvariantError, ValueError)):
        HVector([1.0, math.nan])


def test_hvector_dense_beyond_truncation():
    with pytest.raises(InvariantError):
        HVector([1.0, 2.0, 3.0]).dense(2)


def test_arithmetic_and_inner_product():
    x = HVector([1.0, 2.0])
    y = HVector([0.0, 1.0, 3.0])
    assert (x + y) == HVector([1.0, 3.0, 3.0])
    assert x.dot(y) == 2.0
    assert (2 * x).norm() == pytest.approx(2 * math.sqrt(5))


def test_project_examples():
    F1 = Frame([e(0)])
    assert project(e(0), F1) == e(0)
    assert project(e(1), F1).norm() == 0
    u = HVector([1.0, 1.0]) / math.sqrt(2)
    assert np.allclose(project(HVector([1.0, 1.0]), Frame([u])).dense(2), [1.0, 1.0])


def test_frame_rejects_non_orthonormal():
    with pytest.raises(InvariantError):
        Frame([HVector([1.0]), HVector([1.0, 1.0])])


def test_orthonormalize_examples():
    assert orthonormalize([e(0), e(0)]).vectors == (e(0),)
    assert orthonormalize([2 * e(0)]).vectors == (e(0),)
    F = orthonormalize([HVector([1.0, 1.0]), e(1)])
    s = 1 / math.sqrt(2)
    # by hand: e2 minus its component along (e1+e2)/sqrt2, normalized
    assert np.allclose(F.matrix(2), [[s, s], [-s, s]])
    assert orthonormalize([]).dim == 0


@given(st.lists(coeffs, min_size=1, max_size=4), coeffs)
def test_pythagoras_and_idempotence(vs, x):
    F = orthonormalize([HVector(v) for v in vs])
    x = HVector(x)
    px = project(x, F)
    assert x.norm() ** 2 == pytest.approx(px.norm() ** 2 + (x - px).norm() ** 2, abs=1e-9)
    assert (project(px, F) - px).norm() <= 1e-9
    assert px.norm() <= x.norm() + 1e-12


@given(st.lists(coeffs, min_size=2, max_size=5), coeffs)
def test_tower_property(vs, x):
    Fk = orthonormalize([HVector(v) for v in vs[:1]])
    Fk1, inc = extend(Fk, [HVector(v) for v in vs[1:]])
    assert Fk1.vectors[: Fk.dim] == Fk.vectors
    x = HVector(x)
    a = project(project(x, Fk), Fk1)
    assert (a - project(x, Fk)).norm() <= 1e-9


def test_complement_spans_rest():
    F = orthonormalize([HVector([1.0, 1.0, 0.0, 1.0])])
    G = complement(F, 4)
    assert G.dim == 3
    M = np.vstack([F.matrix(4), G.matrix(4)])
    assert np.allclose(M @ M.T, np.eye(4), atol=1e-12)
    aligned = complement(Frame.coordinates([0, 2]), 5)
    assert sorted(np.flatnonzero(aligned.matrix(5).sum(0))) == [1, 3, 4]


def test_affine_subspace_invariants():
    with pytest.raises(InvariantError):
        AffineSubspace(e(0), directions=Frame([e(0)]))
    with pytest.raises(InvariantError):
        AffineSubspace(e(1), conormals=Frame([e(0)]))
    with pytest.raises(InvariantError):
        AffineSubspace(e(0))
    A = AffineSubspace(2 * e(0), conormals=Frame([e(0)]))
    assert A.direction_frame(3).dim == 2


def test_hyperplane_canonical_orientation():
    P = Hyperplane(-e(0), -2.0)
    assert P.normal == e(0) and P.offset == 2.0
    Q = Hyperplane(-e(1), 0.0)
    assert Q.normal == e(1)
    assert Hyperplane(e(0), 2.0) == P
    with pytest.raises(InvariantError):
        Hyperplane(HVector([1.0, 1.0]), 1.0)


def test_lift_hyperplane():
    F = Frame.coordinates([0, 1])
    assert lift_hyperplane(e(0), 1.0, F) == Hyperplane(e(0), 1.0)
    u = HVector([1.0, 1.0]) / math.sqrt(2)
    P = lift_hyperplane(u, 0.0, F)
    assert P.offset == 0.0
    y = P.anchor + 3.7 * e(2) - 1.1 * e(5)
    assert P.contains(y)
    with pytest.raises(InvariantError):
        lift_hyperplane(e(2), 1.0, F)


def test_lift_round_trip(rng):
    F = Frame.coordinates([0, 1, 2])
    u = HVector(rng.standard_normal(3))
    u = u / u.norm()
    P = lift_hyperplane(u, 0.8, F)
    for _ in range(20):
        y = P.anchor + HVector(np.r_[0, 0, 0, rng.standard_normal(3)])
        assert P.contains(y)
        assert P.contains(project(y, F))


def test_closest_point_examples():
    assert closest_point(Ball(HVector([]), 1.0), 3 * e(0)) == e(0)
    assert closest_point(Ball(HVector([]), 1.0), 0.5 * e(1)) == 0.5 * e(1)
    x = closest_point(Hull((e(0), e(1))), HVector([]))
    assert np.allclose(x.dense(2), [0.5, 0.5], atol=1e-8)
    assert distance(Hull((e(0), e(1))), 0.2 * e(0) + 0.8 * e(1)) <= 1e-8


def test_hull_closest_point_matches_grid(rng):
    for _ in range(10):
        pts = rng.standard_normal((2, 3))
        p = rng.standard_normal(3) * 2
        w = np.linspace(0, 1, 100_001)
        seg = np.outer(w, pts[0]) + np.outer(1 - w, pts[1])
        best = np.min(np.linalg.norm(seg - p, axis=1))
        assert distance(Hull(tuple(pts)), p) == pytest.approx(best, abs=1e-8)


def test_closest_point_obtuse_angle(rng):
    for _ in range(20):
        pts = rng.standard_normal((6, 4))
        p = HVector(rng.standard_normal(4) * 3)
        K = Hull(tuple(pts))
        p0 = closest_point(K, p)
        for k in pts:
            assert (p - p0).dot(HVector(k) - p0) <= 1e-8
        B = Ball(HVector(pts[0]), 0.7)
        b0 = closest_point(B, p)
        for k in B.sample(rng, 200, 4):
            assert (p - b0).dot(HVector(k) - b0) <= 1e-8


def test_min_norm_point_vertex_and_interior():
    x, w = min_norm_point(np.array([[1.0, 0.0], [2.0, 1.0]]))
    assert np.allclose(x, [1.0, 0.0])
    x, w = min_norm_point(np.array([[1.0, 1.0], [-1.0, 1.0], [0.0, -1.0]]))
    assert np.linalg.norm(x) < 1e-12
    assert w.sum() == pytest.approx(1.0)


def test_in_span_tolerance():
    F = Frame([e(0)])
    assert in_span(e(0) + 1e-12 * e(1), F)
    assert not in_span(e(0) + 1e-6 * e(1), F)
