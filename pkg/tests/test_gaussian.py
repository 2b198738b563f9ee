import math

import numpy as np
import pytest

from gaussradon import functionals as fx
from gaussradon.errors import BoundViolation
from gaussradon.gaussian import AffineGaussian, char_fn, empirical_char_fn, expect, sample, tail_decay
from gaussradon.hilbert import AffineSubspace, Frame, HVector, Hyperplane
from gaussradon.norms import WeightedL2Norm, build_adapted_sequence

e = HVector.basis


def test_point_mass():
    mu = AffineGaussian.point_mass(e(0))
    X = sample(mu, 0, 10)
    assert np.array_equal(X, np.tile([1.0], (10, 1)))
    assert char_fn(mu, HVector([0.7])) == pytest.approx(np.exp(0.7j))


def test_hyperplane_mean_and_covariance():
    count = 100_000
    mu = AffineGaussian.on_hyperplane(Hyperplane(e(0), 2.0), 10)
    X = sample(mu, 1, count)
    assert np.all(X[:, 0] == 2.0)
    mean = X.mean(axis=0)
    assert np.all(np.abs(mean - mu.anchor_dense) <= 3 / math.sqrt(count))
    cov = np.cov(X.T)
    target = np.eye(10)
    target[0, 0] = 0.0
    assert np.max(np.abs(cov - target)) <= 6 / math.sqrt(count)


def test_conormal_constraints_exact(rng):
    u = rng.standard_normal(6)
    P = Hyperplane.from_equation(u, 0.9)
    X = sample(AffineGaussian.on_hyperplane(P, 6), 2, 1000)
    assert np.max(np.abs(X @ P.normal.dense(6) - P.offset)) < 1e-12


def test_char_fn_cases():
    mu = AffineGaussian.standard(4)
    assert char_fn(mu, HVector([])) == 1
    x = HVector([0.3, -0.4])
    assert char_fn(mu, x) == pytest.approx(math.exp(-0.5 * 0.25))
    assert abs(char_fn(AffineGaussian.on_hyperplane(Hyperplane(e(1), 1.3), 4), x)) <= 1.0


def test_empirical_char_fn():
    s = np.array([[0.5, 1.0]])
    x = HVector([2.0, -1.0])
    assert empirical_char_fn(s, x) == pytest.approx(np.exp(0j))
    assert empirical_char_fn(np.random.default_rng(0).standard_normal((5, 3)), HVector([])) == 1
    with pytest.raises(ValueError):
        empirical_char_fn(np.zeros((0, 3)), x)
    X = sample(AffineGaussian.standard(3), 5, 100_000)
    emp = empirical_char_fn(X, e(0))
    tol = 4 / math.sqrt(1e5)
    assert abs(emp.real - math.exp(-0.5)) <= tol and abs(emp.imag) <= tol


def test_expect_examples():
    mu = AffineGaussian.on_hyperplane(Hyperplane(e(0), 1.5), 5)
    r = expect(mu, fx.constant(1.0), 1000, 0)
    assert (r.estimate, r.stderr) == (1.0, 0.0)
    r = expect(mu, fx.clamped_coordinate(0), 1000, 0)
    assert r.estimate == 1.5
    chi = fx.BoundedFunctional(lambda X: np.minimum(X[:, 0] ** 2 + X[:, 1] ** 2, 1e3), 1e3, "chi2", 2)
    r = expect(AffineGaussian.standard(2), chi, 100_000, 3)
    assert abs(r.estimate - 2.0) <= 3 * r.stderr


def test_expect_bound_violation():
    raw = fx.BoundedFunctional(lambda X: X[:, 0], 0.1, "raw", 1)
    with pytest.raises(BoundViolation):
        expect(AffineGaussian.standard(2), raw, 100, 0)


def test_translation_identity_bitwise(rng):
    u = rng.standard_normal(5)
    P = Hyperplane.from_equation(u, 1.2)
    mu = AffineGaussian.on_hyperplane(P, 5)
    X = sample(mu, 9, 25_000)
    Y = sample(mu.centered(), 9, 25_000)
    assert np.array_equal(X, P.anchor.dense(5) + Y)


def test_sampling_deterministic():
    mu = AffineGaussian(AffineSubspace(HVector([]), directions=Frame.coordinates([1, 3])), 5)
    assert np.array_equal(sample(mu, 4, 12_345), sample(mu, 4, 12_345))
    assert not np.array_equal(sample(mu, 4, 100), sample(mu, 5, 100))


def test_tail_decay_monotone_and_bounded():
    nrm = WeightedL2Norm(0.25)
    seq = build_adapted_sequence(Frame([e(0)]), nrm, 5, seed=2)
    rows = tail_decay(seq, nrm, 0.5, 20_000, seed=1)
    ests = [r["estimate"] for r in rows]
    for a, b, r in zip(ests, ests[1:], rows):
        assert b <= a + 2 * r["half_width"] + 1e-12
    for r in rows:
        if r["bound"] is not None:
            assert r["estimate"] <= r["bound"] + r["half_width"]
    zero = tail_decay(seq, nrm, 0.0, 1000, seed=1)
    assert all(r["estimate"] == 1.0 for r in zero)
    with pytest.raises(ValueError):
        tail_decay(build_adapted_sequence(Frame([e(0)]), nrm, 1), nrm, 0.5)
