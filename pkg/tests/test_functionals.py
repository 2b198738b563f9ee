import numpy as np
import pytest

from gaussradon import functionals as fx
from gaussradon.errors import BoundViolation, InvariantError
from gaussradon.hilbert import HVector
from gaussradon.norms import WeightedL2Norm


def test_bound_enforced():
    f = fx.BoundedFunctional(lambda X: X[:, 0], 1.0, "raw", 1)
    assert f(np.array([[0.5]])).tolist() == [0.5]
    with pytest.raises(BoundViolation):
        f(np.array([[2.0]]))
    with pytest.raises(BoundViolation):
        fx.BoundedFunctional(lambda X: np.full(X.shape[0], np.nan), 1.0)(np.zeros((1, 1)))


def test_min_dim_enforced():
    with pytest.raises(InvariantError):
        fx.gaussian_weight(3)(np.zeros((2, 2)))


def test_invalid_bound():
    with pytest.raises(InvariantError):
        fx.BoundedFunctional(lambda X: X, 0.0)


def test_bump_modulus_is_sound(rng):
    nrm = WeightedL2Norm(0.25)
    p = HVector([0.3, -0.2])
    bump = fx.CoordinateBump([0.5, 0.0], 1.0, 1.0, "tent", dim=3)
    table = bump.modulus(p, nrm, [0.01, 0.05, 0.2])
    f0 = bump(p.dense(3)[None, :])[0]
    for R, eps in table:
        V = rng.standard_normal((2000, 8))
        V *= (R * rng.random(2000) / nrm.evaluate(V))[:, None]
        vals = bump(p.dense(8) + V)
        assert np.max(np.abs(vals - f0)) <= eps + 1e-12


def test_smooth_profile_support():
    f = fx.coordinate_bump([0.0, 0.0], 1.0, profile="smooth")
    assert f.at(HVector([1.0])) == 0.0
    assert f.at(HVector([])) == pytest.approx(1.0)


def test_lipschitz_modulus_cap():
    tab = fx.lipschitz_modulus(2.0, 2, WeightedL2Norm(0.25), [0.1, 10.0], bound=1.0)
    assert tab[0][1] == pytest.approx(2.0 * 4.0 * 0.1)
    assert tab[1][1] == 2.0


def test_builtins_bounded(rng):
    X = rng.standard_normal((100, 5)) * 10
    for f in (fx.constant(-2.0), fx.gaussian_weight(3), fx.product_cos([1, 2]), fx.product_logistic([1, -1]),
              fx.exp_probe([0.2, 0.5], 3.0, "im"), fx.clamped_coordinate(2, -1, 1)):
        assert np.all(np.abs(f(X)) <= f.bound)
