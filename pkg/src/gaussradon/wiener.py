"""Classical Wiener space in the Schauder basis of the Cameron-Martin space.

Flat index 0 is the path ``t``; index ``2**j + k`` is the hat function of
level ``j`` and position ``k``, supported on ``[k 2^-j, (k+1) 2^-j]`` with
peak ``2**(-j/2 - 1)``. A basis of depth ``J`` has ``2**J`` functions, all
piecewise linear on the grid ``k / 2**J``.
"""

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _mc, kernels
from .errors import InvariantError
from .functionals import BoundedFunctional
from .gaussian import AffineGaussian
from .hilbert import Frame, Hyperplane, as_hvector
from .norms import CertificateKind, MeasurableNormModel, TamingSubspace
from .radon import radon_transform

_SANITY_STREAM = 21


class SchauderBasis:
    def __init__(self, levels):
        levels = int(levels)
        if levels < 1:
            raise ValueError("levels must be >= 1")
        self.levels = levels

    @property
    def dimension(self):
        return 1 << self.levels

    @cached_property
    def times(self):
        return np.arange(self.dimension + 1) / self.dimension

    @staticmethod
    def index(j, k):
        if not 0 <= k < (1 << j):
            raise IndexError(f"position {k} out of range at level {j}")
        return (1 << j) + k

    def position(self, i):
        """``(level, position)`` of flat index ``i``; ``None`` for index 0."""
        if not 0 <= i < self.dimension:
            raise IndexError(f"index {i} outside a depth-{self.levels} basis")
        if i == 0:
            return None
        j = int(i).bit_length() - 1
        return j, i - (1 << j)

    def functions(self):
        """Grid values of every basis function, one per row."""
        return kernels.schauder_synthesize(np.eye(self.dimension), self.levels)

    def gram(self):
        """Cameron-Martin Gram matrix, exact for piecewise-linear paths."""
        D = np.diff(self.functions(), axis=1) * self.dimension
        return D @ D.T / self.dimension

    def __eq__(self, other):
        return isinstance(other, SchauderBasis) and other.levels == self.levels

    def __hash__(self):
        return hash(("schauder", self.levels))


@dataclass(frozen=True)
class PathPoint:
    """Path values on the dyadic grid; ``values`` may hold one path per row."""

    values: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape[-1] != self.times.size or not np.all(np.isfinite(v)):
            raise InvariantError("path values must be finite and match the grid")
        if np.any(v[..., 0] != 0.0):
            raise InvariantError("paths start at 0")
        object.__setattr__(self, "values", v)

    def at(self, t):
        i = grid_index(self.times, t)
        return self.values[..., i]


def grid_index(times, t):
    i = int(round(float(t) * (times.size - 1)))
    if not 0 <= i < times.size or abs(times[i] - t) > 1e-12:
        raise InvariantError(f"time {t} is not a grid point")
    return i


def path_from_coeffs(coeffs, basis):
    """Grid path of a coefficient vector, or of each row of a 2-d array."""
    if isinstance(coeffs, np.ndarray) and coeffs.ndim == 2:
        C = coeffs
    else:
        c = as_hvector(coeffs)
        if c.size > basis.dimension:
            raise IndexError(f"coefficient index {c.size - 1} outside a depth-{basis.levels} basis")
        C = c.dense(basis.dimension)[None, :]
    if C.shape[1] != basis.dimension:
        raise IndexError(f"expected {basis.dimension} coefficients, got {C.shape[1]}")
    values = kernels.schauder_synthesize(C, basis.levels)
    if not (isinstance(coeffs, np.ndarray) and coeffs.ndim == 2):
        values = values[0]
    return PathPoint(values, basis.times)


def sup_norm(path):
    v = np.atleast_2d(path.values)
    out = kernels.row_sup_abs(v)
    return float(out[0]) if np.ndim(path.values) == 1 else out


def taming_level(eps):
    """Smallest ``j`` with ``2^(j+1) exp(-2 eps^2 2^j) < eps``.

    A path orthogonal to the first ``2^j`` basis functions is a Brownian
    bridge on each dyadic interval of length ``2^-j``; the bridge tail
    ``P[sup |b| > eps] <= 2 exp(-2 eps^2 / L)`` and a union bound give the rule.
    """
    j = 0
    while 2.0 ** (j + 1) * math.exp(-2.0 * eps * eps * 2.0**j) >= eps:
        j += 1
    return j


class WienerSupNorm(MeasurableNormModel):
    """Sup norm of the grid path; exact for the piecewise-linear paths here."""

    name = "wiener-sup"

    def __init__(self, levels=11):
        self.basis = SchauderBasis(levels)
        self.dimension = self.basis.dimension

    @property
    def levels(self):
        return self.basis.levels

    def evaluate(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] < self.dimension:
            X = np.pad(X, ((0, 0), (0, self.dimension - X.shape[1])))
        elif X.shape[1] > self.dimension:
            raise InvariantError("coefficients beyond the Schauder depth")
        return kernels.schauder_sup(X, self.levels)

    def taming_subspace(self, eps):
        j = taming_level(eps)
        bound = 2.0 ** (j + 1) * math.exp(-2.0 * eps * eps * 2.0**j)
        return TamingSubspace(eps, Frame.coordinates(range(1 << j)), CertificateKind.STATISTICAL, bound)

    def coordinate_factor(self, d):
        # |c_0| = |x(1)| <= |x| and a level-j coefficient is at most 2^(j/2+2) |x|.
        if d > self.dimension:
            return None
        total = 1.0
        for i in range(1, d):
            j = int(i).bit_length() - 1
            total += 2.0 ** (j + 4)
        return math.sqrt(total)

    def params(self):
        return {"levels": self.levels}


def path_functional(fn, bound, basis, name="path", params=None):
    """Wrap ``fn(PathPoint) -> values`` as a functional on Schauder coefficients."""

    def ev(X):
        return fn(path_from_coeffs(np.ascontiguousarray(X[:, : basis.dimension]), basis))

    return BoundedFunctional(ev, float(bound), name, basis.dimension, params=dict(params or {}))


def path_clamp(t, basis, lo=-10.0, hi=10.0):
    """``clip(x(t), lo, hi)`` for a grid time ``t``."""
    i = grid_index(basis.times, t)
    return path_functional(
        lambda path: np.clip(path.values[:, i], lo, hi), max(abs(lo), abs(hi)), basis,
        "path-clamp", {"t": float(t), "lo": lo, "hi": hi, "levels": basis.levels},
    )


def brownian_sanity(basis, count=100_000, seed=0, sigmas=4.0):
    """Variance and covariance of the sampled paths against Brownian motion.

    Checks ``Var x(t) = t`` at ``t = k/8`` with standard error ``t sqrt(2/count)``,
    ``Cov(x(1/2), x(1)) = 1/2`` and ``x(0) = 0``.
    """
    if count < 10_000:
        raise ValueError("brownian_sanity needs count >= 10^4")
    if basis.levels < 3:
        raise ValueError("brownian_sanity needs at least 3 levels")
    mu = AffineGaussian.standard(basis.dimension)
    stride = basis.dimension // 8
    cols = np.arange(0, basis.dimension + 1, stride)
    half, one = 4, 8

    def shard(rng, m):
        paths = kernels.schauder_synthesize(mu.draw(rng, m), basis.levels)[:, cols]
        return paths.sum(axis=0), (paths * paths).sum(axis=0), float(paths[:, half] @ paths[:, one]), float(np.max(np.abs(paths[:, 0])))

    parts = _mc.map_shards(shard, seed, count, _SANITY_STREAM)
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    s12 = sum(p[2] for p in parts)
    start = max(p[3] for p in parts)
    mean = s1 / count
    var = (s2 - count * mean * mean) / (count - 1)
    cov = (s12 - count * mean[half] * mean[one]) / (count - 1)
    times = cols / basis.dimension
    rows = []
    for t, v in zip(times, var):
        se = t * math.sqrt(2.0 / count)
        rows.append({"t": float(t), "variance": float(v), "stderr": se, "ok": bool(abs(v - t) <= sigmas * se)})
    cov_se = math.sqrt((0.5 + 0.25) / count)  # Var(XY) = st + min(s,t)^2 for centered Gaussians
    return {
        "levels": basis.levels,
        "count": count,
        "seed": seed,
        "variance": rows,
        "cov_half_one": float(cov),
        "cov_stderr": cov_se,
        "cov_ok": bool(abs(cov - 0.5) <= sigmas * cov_se),
        "start_max_abs": start,
        "passed": all(r["ok"] for r in rows) and abs(cov - 0.5) <= sigmas * cov_se and start == 0.0,
    }


def condition_functional(f, h, c, basis, samples=100_000, seed=0):
    """``Gf`` on ``{x : <x, h> = c}``, the law of ``f`` given a Paley-Wiener coordinate."""
    h = as_hvector(h)
    if h.size > basis.dimension:
        raise IndexError("h extends beyond the Schauder depth")
    if abs(h.norm() - 1.0) > 1e-10:
        raise InvariantError("h must have unit Cameron-Martin norm")
    return radon_transform(f, Hyperplane(h, c), basis.dimension, samples, seed)


def write_paths_csv(target, paths):
    """CSV with a ``t`` column followed by one column per path."""
    V = np.atleast_2d(paths.values)
    with open(target, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"path_{i}" for i in range(V.shape[0])])
        for k, t in enumerate(paths.times):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in V[:, k]])
