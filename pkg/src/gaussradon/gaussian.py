"""Gaussian measures concentrated on closed affine subspaces.

``AffineGaussian`` is the law of ``p + sum_n Z_n e_n`` with ``e_n`` an
orthonormal basis of the (truncated) direction space ``M_0`` and ``Z_n``
independent standard normals. Its characteristic function is
``exp(i<x*, p> - |x*_{M_0}|^2 / 2)``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _mc
from .errors import InvariantError
from .hilbert import AffineSubspace, Frame, Hyperplane, as_hvector
from .norms import estimate_tail

_SAMPLE_STREAM = 1


@dataclass(frozen=True, eq=False)
class AffineGaussian:
    """Measure ``mu_{M_p}`` on the first ``truncation`` coordinates."""

    subspace: AffineSubspace
    truncation: int

    def __post_init__(self):
        if self.truncation < 1:
            raise InvariantError("truncation must be >= 1")
        if self.subspace.anchor.size > self.truncation:
            raise InvariantError("anchor extends beyond the truncation")

    @classmethod
    def standard(cls, truncation):
        """Standard Gaussian on the whole truncated space (``p = 0``)."""
        return cls(AffineSubspace(as_hvector(()), conormals=Frame()), truncation)

    @classmethod
    def on_hyperplane(cls, P, truncation):
        return cls(P.affine(), truncation)

    @classmethod
    def point_mass(cls, p, truncation=None):
        p = as_hvector(p)
        return cls(AffineSubspace(p, directions=Frame()), truncation or max(p.size, 1))

    @property
    def anchor(self):
        return self.subspace.anchor

    @cached_property
    def directions(self):
        return self.subspace.direction_frame(self.truncation)

    @cached_property
    def anchor_dense(self):
        return self.anchor.dense(self.truncation)

    def centered(self):
        """``mu_{M_0}``: same direction space through the origin."""
        g = AffineGaussian(self.subspace.translate_to(as_hvector(())), self.truncation)
        g.__dict__["directions"] = self.directions
        return g

    def draw(self, rng, count):
        """``count`` samples from one generator (rows are coefficient vectors)."""
        D = self.directions
        if D.dim:
            base = D.embed(rng.standard_normal((count, D.dim)), self.truncation)
        else:
            base = np.zeros((count, self.truncation))
        return self.anchor_dense + base

    def describe(self):
        return {
            "anchor": self.anchor.to_dict(),
            "truncation": self.truncation,
            "direction_dim": self.directions.dim,
        }


def sample(mu, rng_seed, count):
    """``count`` samples of ``mu`` as a ``(count, truncation)`` array.

    Deterministic in ``rng_seed``; shards of 10^4 rows use independent
    derived streams.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    parts = _mc.map_shards(lambda rng, m: mu.draw(rng, m), rng_seed, count, _SAMPLE_STREAM)
    return np.concatenate(parts)


def _dual(xstar, n):
    x = as_hvector(xstar).coeffs
    out = np.zeros(n)
    k = min(n, x.size)
    out[:k] = x[:k]
    return out


def char_fn(mu, xstar):
    """Closed-form ``E exp(i <x*, X>)`` for ``X ~ mu``."""
    x = _dual(xstar, mu.truncation)
    D = mu.directions
    proj = D.coords(x[None, :])[0] if D.dim else np.zeros(0)
    return complex(np.exp(1j * float(x @ mu.anchor_dense) - 0.5 * float(proj @ proj)))


def empirical_char_fn(samples, xstar):
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise ValueError("empirical_char_fn needs at least one sample")
    x = _dual(xstar, samples.shape[1])
    phase = samples @ x
    return complex(np.mean(np.cos(phase)), np.mean(np.sin(phase)))


@dataclass(frozen=True)
class Estimate:
    estimate: float
    stderr: float
    samples: int
    seed: int

    def __float__(self):
        return self.estimate

    def as_dict(self):
        return {"estimate": self.estimate, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}


def evaluate_samples(mu, f, count, seed, *keys):
    """Values of ``f`` on ``count`` samples of ``mu``, in shard order."""
    keys = keys or (_SAMPLE_STREAM,)
    return np.concatenate(_mc.map_shards(lambda rng, m: f(mu.draw(rng, m)), seed, count, *keys))


def expect(mu, f, count, seed):
    """Sample mean and standard error of ``f`` under ``mu``.

    ``f`` is a :class:`~gaussradon.functionals.BoundedFunctional`; a value
    outside its bound raises :class:`~gaussradon.errors.BoundViolation`.
    With the same seed, ``expect(mu, f)`` and ``expect(mu.centered(),
    v -> f(v + p))`` see the same points.
    """
    values = evaluate_samples(mu, f, count, seed)
    mean, se = _mc.mean_stderr(values)
    return Estimate(mean, se, count, seed)


def tail_decay(seq, norm, R, count=100_000, seed=0):
    """``mu_{F_k^perp}[|v| > R]`` for every level ``k`` of an adapted sequence.

    The complement of ``F_k`` is sampled increment by increment followed by
    the rest of the truncation. ``bound`` is ``2^(1-k)`` once that is below
    ``R`` and ``None`` before; ``analytic`` is the norm model's closed-form
    bound on the same truncated measure, when it has one.
    """
    if seq.depth < 2:
        raise ValueError("tail_decay needs an adapted sequence of depth >= 2")
    out = []
    for k in range(1, seq.depth + 1):
        comp = seq.complement(k)
        est = estimate_tail(comp, norm, R, count, _mc.derive_seed(seed, k), seq.truncation)
        theory = 2.0 ** (1 - k)
        out.append({
            "k": k,
            "dim": comp.dim,
            "estimate": est.estimate,
            "half_width": est.half_width,
            "bound": theory if theory < R else None,
            "analytic": norm.markov_bound(comp, R),
        })
    return out
