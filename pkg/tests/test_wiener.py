import csv

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussradon import functionals as fx
from gaussradon.errors import InvariantError
from gaussradon.hilbert import Frame, HVector
from gaussradon.norms import CertificateKind, build_adapted_sequence
from gaussradon.wiener import (
    SchauderBasis,
    WienerSupNorm,
    brownian_sanity,
    condition_functional,
    path_clamp,
    path_from_coeffs,
    sup_norm,
    taming_level,
    write_paths_csv,
)


@pytest.mark.parametrize("levels", [1, 3, 6])
def test_cameron_martin_orthonormal(levels):
    B = SchauderBasis(levels)
    assert np.max(np.abs(B.gram() - np.eye(B.dimension))) <= 1e-12


def test_index_map():
    B = SchauderBasis(4)
    assert B.position(0) is None
    assert B.position(B.index(2, 3)) == (2, 3)
    with pytest.raises(IndexError):
        B.position(16)


def test_path_examples():
    B = SchauderBasis(3)
    assert sup_norm(path_from_coeffs(HVector([]), B)) == 0.0
    line = path_from_coeffs(HVector([1.5]), B)
    assert np.allclose(line.values, 1.5 * B.times)
    assert sup_norm(line) == 1.5
    hat = path_from_coeffs(HVector([0.0, 1.0]), B)
    assert hat.at(0.5) == 0.5 and hat.at(1.0) == 0.0
    with pytest.raises(IndexError):
        path_from_coeffs(HVector.basis(8), B)


@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=8, max_size=8),
       st.lists(st.floats(-3, 3, allow_nan=False), min_size=8, max_size=8),
       st.floats(-2, 2, allow_nan=False))
def test_path_linearity(a, b, s):
    B = SchauderBasis(3)
    pa, pb = path_from_coeffs(HVector(a), B), path_from_coeffs(HVector(b), B)
    pab = path_from_coeffs(HVector(a) + s * HVector(b), B)
    assert np.allclose(pab.values, pa.values + s * pb.values, atol=1e-12)


def test_path_point_invariants():
    B = SchauderBasis(2)
    from gaussradon.wiener import PathPoint
    with pytest.raises(InvariantError):
        PathPoint(np.ones(5), B.times)


def test_taming_levels():
    assert [taming_level(2.0**-k) for k in (1, 2, 3, 4)] == [3, 6, 9, 11]


def test_sup_tail_decreases_with_level():
    from gaussradon.norms import estimate_tail
    nrm = WienerSupNorm(8)
    ests = [estimate_tail(Frame.coordinates(range(1 << j, 256)), nrm, 0.25, 5000, 1).estimate for j in (2, 4, 6)]
    assert ests[0] > ests[1] > ests[2]


def test_brownian_sanity():
    rep = brownian_sanity(SchauderBasis(6), 100_000, 3)
    assert rep["passed"] and rep["start_max_abs"] == 0.0
    with pytest.raises(ValueError):
        brownian_sanity(SchauderBasis(6), 100)


def test_condition_functional():
    B = SchauderBasis(6)
    r = condition_functional(path_clamp(1.0, B), HVector([1.0]), 2.0, B, 10_000, 0)
    assert r.estimate == 2.0
    r = condition_functional(fx.constant(1.0), HVector([1.0]), 2.0, B, 1000, 0)
    assert r.estimate == 1.0
    r = condition_functional(path_clamp(0.5, B), HVector([1.0]), 0.0, B, 50_000, 0)
    assert abs(r.estimate) <= 3 * r.stderr
    with pytest.raises(InvariantError):
        condition_functional(fx.constant(1.0), HVector([2.0]), 0.0, B)


def test_condition_matches_radon():
    from gaussradon.hilbert import Hyperplane
    from gaussradon.radon import radon_transform
    B = SchauderBasis(5)
    f = path_clamp(0.75, B)
    a = condition_functional(f, HVector([0.6, 0.8]), 0.3, B, 20_000, 5)
    b = radon_transform(f, Hyperplane(HVector([0.6, 0.8]), 0.3), B.dimension, 20_000, 5)
    assert a.estimate == b.estimate


def test_wiener_adapted_sequence_statistical():
    nrm = WienerSupNorm(9)
    seq = build_adapted_sequence(Frame([HVector.basis(0)]), nrm, 3, seed=0, samples=20_000)
    assert all(c.kind is CertificateKind.STATISTICAL and c.passed for c in seq.certificates)
    assert seq.check_invariants()


def test_paths_csv(tmp_path):
    B = SchauderBasis(2)
    paths = path_from_coeffs(np.eye(4)[:2], B)
    write_paths_csv(tmp_path / "p.csv", paths)
    rows = list(csv.reader(open(tmp_path / "p.csv")))
    assert rows[0] == ["t", "path_0", "path_1"]
    assert len(rows) == 6
