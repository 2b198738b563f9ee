import math
from statistics import NormalDist

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussradon.errors import CertificateError, InvariantError, SeparationError
from gaussradon.hilbert import Ball, Frame, HVector, Hull, orthonormalize
from gaussradon.norms import (
    CertificateKind,
    HilbertNorm,
    MeasurableNormModel,
    RationalDenseSeed,
    WeightedL2Norm,
    build_adapted_sequence,
    certify_increment,
    estimate_tail,
    separating_sequence,
    tail_upper,
)

e = HVector.basis


class FirstCoordinate(MeasurableNormModel):
    name = "first-coordinate"

    def evaluate(self, X):
        return np.abs(np.atleast_2d(X)[:, 0])


vec = st.lists(st.floats(-3, 3, allow_nan=False), min_size=6, max_size=6)


@given(vec, vec, st.floats(-4, 4, allow_nan=False))
def test_weighted_norm_axioms(x, y, a):
    nrm = WeightedL2Norm(0.25)
    x, y = HVector(x), HVector(y)
    assert nrm(a * x) == pytest.approx(abs(a) * nrm(x), abs=1e-9)
    assert nrm(x + y) <= nrm(x) + nrm(y) + 1e-9


def test_estimate_tail_erfc_oracle():
    eps = 1.959964
    est = estimate_tail(Frame([e(0)]), FirstCoordinate(), eps, 100_000, seed=3, truncation=1)
    exact = 2 * (1 - NormalDist().cdf(eps))
    assert abs(est.estimate - exact) <= est.half_width


def test_estimate_tail_huge_eps_and_min_samples():
    assert estimate_tail(Frame.coordinates([0, 1]), WeightedL2Norm(), 1e6, 1000).estimate == 0.0
    with pytest.raises(ValueError):
        estimate_tail(Frame([e(0)]), WeightedL2Norm(), 1.0, 99)


def test_estimate_tail_markov_oracle():
    nrm = WeightedL2Norm(0.5)
    F = Frame([e(49)])
    eps = 1e-7
    est = estimate_tail(F, nrm, eps, 10_000, truncation=50)
    assert est.estimate <= 0.5**50 / eps**2
    assert nrm.markov_bound(F, eps) == pytest.approx(min(1.0, 0.5**50 / eps**2))


def test_tail_upper_positive_when_empty():
    assert tail_upper(0.0, 100_000) > 0
    assert tail_upper(0.5, 100) <= 1.0


def test_taming_subspace_weighted():
    nrm = WeightedL2Norm(0.25)
    for eps in (0.5, 0.1, 0.01):
        E = nrm.taming_subspace(eps)
        assert E.kind is CertificateKind.ANALYTIC
        assert E.bound < eps
        assert nrm.tail_weight(E.frame.dim) < eps**3


def test_adapted_sequence_weighted_depth3():
    nrm = WeightedL2Norm(0.25)
    con = Frame.coordinates([0, 1])
    seq = build_adapted_sequence(con, nrm, 3, seed=1)
    assert seq.check_invariants()
    assert all(c.kind is CertificateKind.ANALYTIC and c.passed for c in seq.certificates)
    for n, inc in enumerate(seq.increments, start=1):
        assert inc.dim >= 1
        assert np.all(np.abs(inc.matrix(seq.truncation)[:, :2]) < 1e-12)
        assert seq.certificates[n - 1].bound < 2.0**-n
    dims = seq.dims
    assert all(b > a for a, b in zip(dims, dims[1:]))


def test_adapted_sequence_depth1():
    seq = build_adapted_sequence(Frame.coordinates([0, 3]), WeightedL2Norm(), 1)
    assert seq.depth == 1
    assert seq.frame(1).dim >= 3
    assert seq.check_invariants()


def test_dense_seed_requirements():
    with pytest.raises(InvariantError):
        build_adapted_sequence(Frame([e(0)]), WeightedL2Norm(), 2, dense_seed=[e(0)], truncation=10)


def test_dense_seed_enumeration_covers_rationals():
    seed = RationalDenseSeed(Frame.coordinates(range(3)), 3)
    first = [seed.next() for _ in range(12)]
    assert all(v is not None and v.norm() > 0 for v in first)
    assert len(set(first)) == len(first)


def test_hilbert_norm_fails_certification():
    inc = Frame.coordinates(range(40))
    cert = certify_increment(inc, HilbertNorm(), 2, 10_000, seed=0, truncation=40)
    assert not cert.passed and cert.kind is CertificateKind.STATISTICAL
    assert cert.estimate > 0.99
    with pytest.raises(CertificateError):
        build_adapted_sequence(Frame([e(0)]), HilbertNorm(), 3, truncation=30, samples=2_000)


def test_certificates_reproduce_with_fresh_seeds():
    from gaussradon.wiener import WienerSupNorm
    nrm = WienerSupNorm(6)
    inc = Frame.coordinates(range(8, 64))
    ok = sum(certify_increment(inc, nrm, 1, 10_000, seed=s).passed for s in range(20))
    assert ok >= 19


def test_separating_sequence_ball():
    nrm = WeightedL2Norm()
    seq = separating_sequence(Ball(HVector([]), 1.0), 2 * e(0), nrm, 3, seed=0)
    assert seq.nearest == e(0) and seq.direction == e(0)
    for lv in seq.levels:
        assert not lv["p_in_projection"]
        assert lv["support_margin"] >= 1.0 - 1e-12


def test_separating_sequence_singleton_and_segment():
    nrm = WeightedL2Norm()
    s1 = separating_sequence(Hull((HVector([]),)), e(0), nrm, 2)
    assert s1.nearest.norm() < 1e-12 and s1.levels[0]["support_margin"] == pytest.approx(1.0)
    s2 = separating_sequence(Hull((e(1), -e(1))), e(0), nrm, 3)
    assert np.allclose(s2.direction.dense(2), [1.0, 0.0])
    assert all(lv["support_margin"] > 0 for lv in s2.levels)


def test_separating_sequence_rejects_inside():
    with pytest.raises(SeparationError, match="not separated"):
        separating_sequence(Ball(HVector([]), 1.0), 0.5 * e(0), WeightedL2Norm(), 2)
