"""Measurable norms, Gaussian tail certificates and adapted subspace sequences."""

import enum
import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from . import _mc, kernels
from .errors import CertificateError, InvariantError, ProofStepError, SeparationError
from .hilbert import (
    ORTHO_TOL,
    Frame,
    HVector,
    as_hvector,
    closest_point,
    complement,
    extend,
    in_span,
    orthonormalize,
    residual,
)

Z99 = NormalDist().inv_cdf(0.995)
DENSE_TOL = 1e-8
SEPARATION_TOL = 1e-6
DEFAULT_CERT_SAMPLES = 100_000

_TAIL_STREAM = 101


class CertificateKind(str, enum.Enum):
    ANALYTIC = "ANALYTIC"
    STATISTICAL = "STATISTICAL"


@dataclass(frozen=True)
class TamingSubspace:
    """Finite-dimensional ``E(eps)``: Gaussian mass of ``|v| > eps`` is below
    ``eps`` on subspaces orthogonal to it."""

    eps: float
    frame: Frame
    kind: CertificateKind
    bound: float = None


class MeasurableNormModel:
    """Base class for norms ``|.|`` on coefficient vectors.

    Subclasses implement :meth:`evaluate` on a batch of coefficient rows and
    :meth:`taming_subspace`. ``markov_bound`` returns an analytic upper bound
    on ``Gauss[v in span F : |v| > eps]`` when one is available.
    """

    name = "abstract"
    dimension = None  # fixed coefficient width, if the model has one

    def evaluate(self, X):
        raise NotImplementedError

    def __call__(self, x):
        x = as_hvector(x)
        n = self.dimension or max(x.size, 1)
        return float(self.evaluate(x.dense(n)[None, :])[0])

    def taming_subspace(self, eps):
        raise NotImplementedError

    def markov_bound(self, F, eps, beyond=None):
        return None

    def coordinate_factor(self, d):
        """Constant ``C`` with ``||v restricted to e_0..e_{d-1}|| <= C |v|``, or None."""
        return None

    def params(self):
        return {}

    def describe(self):
        return {"name": self.name, **self.params()}


class WeightedL2Norm(MeasurableNormModel):
    """``|v|^2 = sum_i ratio**(i+1) * v_i**2``.

    Geometric weights are summable, so the norm is measurable and every tail
    estimate has a closed-form Markov bound.
    """

    name = "weighted-l2"

    def __init__(self, ratio=0.25):
        if not 0 < ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        self.ratio = float(ratio)

    def weights(self, n):
        return self.ratio ** np.arange(1, n + 1, dtype=float)

    def evaluate(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.sqrt(kernels.weighted_sq_norm(X, self.weights(X.shape[1])))

    def tail_weight(self, n):
        """``sum_{i >= n} weight_i``."""
        return self.ratio ** (n + 1) / (1.0 - self.ratio)

    def taming_subspace(self, eps):
        m = 0
        while self.tail_weight(m) >= eps**3:
            m += 1
        bound = self.tail_weight(m) / eps**2
        return TamingSubspace(eps, Frame.coordinates(range(m)), CertificateKind.ANALYTIC, bound)

    def markov_bound(self, F, eps, beyond=None):
        """``E|v|^2 / eps^2`` for standard Gaussian ``v`` on ``span F``.

        With ``beyond=n`` the mass of all coordinates ``>= n`` is added, which
        bounds the untruncated complement when ``F`` spans the truncated one.
        """
        if eps <= 0:
            return 1.0
        second_moment = 0.0
        if F.dim:
            M = F.matrix()
            second_moment = float(np.sum((M * M) @ self.weights(M.shape[1])))
        if beyond is not None:
            second_moment += self.tail_weight(beyond)
        return min(1.0, second_moment / eps**2)

    def coordinate_factor(self, d):
        return self.ratio ** (-d / 2.0)

    def params(self):
        return {"ratio": self.ratio}


class HilbertNorm(MeasurableNormModel):
    """The Hilbert norm itself. Not measurable; shipped as a negative control."""

    name = "hilbert"

    def evaluate(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.sqrt(np.einsum("ij,ij->i", X, X))

    def taming_subspace(self, eps):
        # No finite-dimensional subspace works; the empty one is offered and
        # the certificates on the increments expose the failure.
        return TamingSubspace(eps, Frame(), CertificateKind.STATISTICAL)

    def coordinate_factor(self, d):
        return 1.0


@dataclass(frozen=True)
class TailEstimate:
    estimate: float
    half_width: float
    samples: int
    seed: int
    eps: float

    @property
    def upper(self):
        return tail_upper(self.estimate, self.samples)


def tail_upper(p, m, z=Z99):
    """Upper 99% limit for a proportion: the larger of the Wald and Wilson
    limits, so an empty tail still gets a positive bound."""
    wald = p + z * math.sqrt(p * (1.0 - p) / m)
    z2 = z * z / m
    wilson = (p + z2 / 2 + z * math.sqrt(p * (1.0 - p) / m + z2 / (4 * m))) / (1.0 + z2)
    return min(1.0, max(wald, wilson))


def _norm_width(norm, F, truncation):
    if norm.dimension is not None:
        if F.size > norm.dimension:
            raise InvariantError("frame extends beyond the norm model's coefficient range")
        return norm.dimension
    return max(F.size, truncation or 0, 1)


def sample_norms(F, norm, samples, seed, *keys, truncation=None):
    """``|v|`` for ``samples`` standard Gaussian draws ``v`` on ``span F``."""
    n = _norm_width(norm, F, truncation)
    if not F.dim:
        return np.zeros(samples)

    def shard(rng, m):
        Z = rng.standard_normal((m, F.dim))
        return norm.evaluate(F.embed(Z, n))

    return np.concatenate(_mc.map_shards(shard, seed, samples, *keys))


def estimate_tail(F, norm, eps, samples=DEFAULT_CERT_SAMPLES, seed=0, truncation=None):
    """Monte Carlo estimate of ``Gauss[v in span F : |v| > eps]`` with a 99%
    normal-approximation half-width."""
    if samples < 100:
        raise ValueError("estimate_tail needs at least 100 samples")
    values = sample_norms(F, norm, samples, seed, _TAIL_STREAM, truncation=truncation)
    p = float(np.count_nonzero(values > eps)) / samples
    hw = Z99 * math.sqrt(p * (1.0 - p) / samples)
    return TailEstimate(p, hw, samples, seed, float(eps))


@dataclass(frozen=True)
class TailCertificate:
    """Record for ``Gauss[v in F_{n+1} - F_n : |v| > 2^-n] < 2^-n``."""

    step: int
    threshold: float
    kind: CertificateKind
    bound: float
    dim: int
    passed: bool
    estimate: float = None
    half_width: float = None
    samples: int = None
    seed: int = None

    def as_dict(self):
        return {
            "step": self.step,
            "threshold": self.threshold,
            "kind": self.kind.value,
            "bound": self.bound,
            "dim": self.dim,
            "passed": self.passed,
            "estimate": self.estimate,
            "half_width": self.half_width,
            "samples": self.samples,
            "seed": self.seed,
        }


def certify_increment(increment, norm, step, samples=DEFAULT_CERT_SAMPLES, seed=0, truncation=None):
    """Certificate for one increment; analytic when the model provides a bound."""
    thr = 2.0**-step
    bound = norm.markov_bound(increment, thr)
    if bound is not None and bound < thr:
        return TailCertificate(step, thr, CertificateKind.ANALYTIC, bound, increment.dim, True)
    est = estimate_tail(increment, norm, thr, samples, seed, truncation)
    return TailCertificate(
        step, thr, CertificateKind.STATISTICAL, est.upper, increment.dim, est.upper < thr,
        est.estimate, est.half_width, samples, seed,
    )


# -- dense sequences --------------------------------------------------------


def _all_signed(total, length):
    """Integer vectors of the given length with ``sum |a_i| == total``."""
    if length == 0:
        if total == 0:
            yield ()
        return
    for a in range(total + 1):
        for rest in _all_signed(total - a, length - 1):
            if a == 0:
                yield (0,) + rest
            else:
                yield (a,) + rest
                yield (-a,) + rest


def _block(height, last):
    """Primitive vectors of one height with last nonzero entry at ``last``.

    Height is ``sum |a_i| + last``; vectors are normalized so the first
    nonzero entry is positive.
    """
    total = height - last
    for lead in range(1, total + 1):
        for head in _all_signed(total - lead, last):
            a = head + (lead,)
            nz = [x for x in a if x]
            if nz[0] > 0 and math.gcd(*map(abs, nz)) == 1:
                yield a
            b = head + (-lead,)
            nz = [x for x in b if x]
            if nz[0] > 0 and math.gcd(*map(abs, nz)) == 1:
                yield b


class RationalDenseSeed:
    """Rational combinations of the basis vectors ``b_0, b_1, ...`` of a
    subspace, enumerated by height.

    The sequence is split into blocks ``(height, last)``; every vector of a
    block lies in ``span(b_0..b_last)``. :meth:`next` can be told that the
    first ``covered`` basis vectors already lie in the current frame, in
    which case whole blocks inside that span are passed over without being
    materialized. Those vectors are members of the frame, so skipping them
    does not change which vector is selected.
    """

    def __init__(self, basis, truncation):
        self.basis = basis
        self._M = basis.matrix(truncation) if basis.dim else np.zeros((0, truncation))
        self._h, self._last = 1, 0
        self._it = None
        self.emitted = 0

    @property
    def position(self):
        return {"height": self._h, "last": self._last, "emitted": self.emitted}

    def next(self, covered=0):
        dim = self.basis.dim
        while True:
            if covered >= dim:
                return None
            if self._it is not None and self._last < covered:
                self._it = None
            if self._it is None:
                if self._last < covered:
                    self._last = covered
                if covered >= self._h:
                    self._h, self._last = covered + 1, covered
                if self._last >= self._h or self._last >= dim:
                    self._h, self._last = self._h + 1, covered
                    continue
                self._it = _block(self._h, self._last)
            for a in self._it:
                self.emitted += 1
                return HVector(np.asarray(a, dtype=float) @ self._M[: len(a)])
            self._it = None
            self._last += 1

    def __iter__(self):
        while (d := self.next()) is not None:
            yield d


class _ListSeed:
    def __init__(self, items):
        self._it = iter(items)
        self.emitted = 0

    @property
    def position(self):
        return {"emitted": self.emitted}

    def next(self, covered=0):
        for d in self._it:
            self.emitted += 1
            return as_hvector(d)
        return None


def default_dense_seed(conormals, truncation):
    """Rational combinations of the truncated basis of ``M_0 = conormals^perp``."""
    return RationalDenseSeed(complement(conormals, truncation), truncation)


def covered_prefix(basis, F, tol=DENSE_TOL):
    """Number of leading vectors of ``basis`` lying in ``span(F)``."""
    if not basis.dim:
        return 0
    ab, af = basis.aligned, F.aligned
    if ab is not None and af is not None:
        inside = np.isin(ab[0], af[0])
    else:
        n = max(basis.size, F.size)
        B, M = basis.matrix(n), F.matrix(n)
        R = B - (B @ M.T) @ M if F.dim else B
        inside = np.sqrt(np.einsum("ij,ij->i", R, R)) <= tol
    out = np.flatnonzero(~inside)
    return int(out[0]) if out.size else basis.dim


# -- adapted sequences ------------------------------------------------------


@dataclass
class AdaptedSequence:
    """Nested frames ``F_1 < F_2 < ...`` with certified increments.

    ``increments[i]`` spans ``F_{i+2}`` minus ``F_{i+1}`` and
    ``certificates[i]`` is the tail certificate at level ``i + 1``.
    ``coverage[i]`` is the dense-seed cursor after ``F_{i+1}`` was built:
    every dense vector before it lies in ``F_{i+1}``.
    """

    conormals: Frame
    frames: list
    increments: list
    certificates: list
    dense_seed: list
    coverage: list
    truncation: int
    norm: dict
    taming_dims: list = field(default_factory=list)

    @property
    def depth(self):
        return len(self.frames)

    def frame(self, n):
        """``F_n`` for 1-based ``n``."""
        return self.frames[n - 1]

    def complement(self, n):
        """Truncated ``F_n^perp``, grouped increment by increment then remainder."""
        parts = []
        for inc in self.increments[n - 1:]:
            parts.extend(inc.vectors)
        rest = complement(self.frames[-1], self.truncation)
        parts.extend(rest.vectors)
        return Frame(parts, check=False)

    @property
    def dims(self):
        return [F.dim for F in self.frames]

    def check_invariants(self):
        for n in range(1, self.depth):
            lo, hi, inc = self.frames[n - 1], self.frames[n], self.increments[n - 1]
            if hi.vectors[: lo.dim] != lo.vectors:
                raise InvariantError(f"F_{n} is not a prefix of F_{n + 1}")
            if inc.dim < 1 or hi.dim != lo.dim + inc.dim:
                raise InvariantError(f"increment {n} has wrong dimension")
            cross = inc.matrix(self.truncation) @ lo.matrix(self.truncation).T
            if cross.size and np.max(np.abs(cross)) > ORTHO_TOL:
                raise InvariantError(f"increment {n} is not orthogonal to F_{n}")
        for v in self.conormals:
            if not in_span(v, self.frames[0]):
                raise InvariantError("F_1 does not contain the conormals")
        return True

    def as_dict(self):
        return {
            "depth": self.depth,
            "truncation": self.truncation,
            "norm": self.norm,
            "dims": self.dims,
            "increment_dims": [inc.dim for inc in self.increments],
            "taming_dims": self.taming_dims,
            "coverage": self.coverage,
            "certificates": [c.as_dict() for c in self.certificates],
        }


def _default_truncation(conormals, norm, depth):
    if norm.dimension is not None:
        return norm.dimension
    tame = norm.taming_subspace(2.0**-depth).frame.dim
    return max(conormals.size, tame) + depth + 8


def build_adapted_sequence(
    conormals,
    norm,
    depth,
    dense_seed=None,
    seed=0,
    truncation=None,
    samples=DEFAULT_CERT_SAMPLES,
):
    """Measurably adapted sequence with ``F_1`` containing ``M_0^perp``.

    ``F_1 = span(conormals) + E_1 + R d_1`` and ``F_{n+1}`` adds ``E_{n+1}``
    together with dense-seed vectors up to and including the first one not
    already in ``F_n``. Each increment is certified at level ``2^-n``; a
    failed certificate raises :class:`CertificateError`.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    conormals = orthonormalize(list(conormals)) if not isinstance(conormals, Frame) else conormals
    if truncation is None:
        truncation = _default_truncation(conormals, norm, depth)
    if conormals.size > truncation:
        raise InvariantError("conormals extend beyond the truncation")

    if dense_seed is None:
        source = default_dense_seed(conormals, truncation)
    elif isinstance(dense_seed, RationalDenseSeed):
        source = dense_seed
    else:
        source = _ListSeed(dense_seed)
    consumed = []

    def next_dense(step, F):
        if F.dim >= truncation:
            raise ProofStepError(f"F_{step - 1} fills the truncation; no dense vector left", step=f"F_{step}")
        covered = covered_prefix(source.basis, F) if isinstance(source, RationalDenseSeed) else 0
        d = source.next(covered)
        if d is None:
            raise ProofStepError(f"dense seed exhausted while building F_{step}", step=f"F_{step}")
        if d.size > truncation:
            raise InvariantError("dense-seed vector extends beyond the truncation")
        if d.norm() == 0 or any(abs(d.dot(c)) > ORTHO_TOL for c in conormals):
            raise InvariantError("dense-seed vectors must be nonzero and lie in M_0")
        consumed.append(d)
        return d

    def taming(n):
        E = norm.taming_subspace(2.0**-n)
        if E.frame.size > truncation:
            raise ProofStepError(
                f"taming subspace for eps=2^-{n} needs {E.frame.size} coordinates, "
                f"truncation is {truncation}",
                step=f"E_{n}",
            )
        return E.frame

    E1 = taming(1)
    d1 = next_dense(1, conormals)
    F, _ = extend(conormals, list(E1) + [d1], tol=DENSE_TOL)
    frames, increments, certs = [F], [], []
    coverage = [dict(source.position)]
    taming_dims = [E1.dim]
    for n in range(1, depth):
        E = taming(n + 1)
        picks = []
        while True:
            d = next_dense(n + 1, F)
            picks.append(d)
            if residual(d, F).norm() > DENSE_TOL:
                break
        F_next, inc = extend(F, list(E) + picks, tol=DENSE_TOL)
        cert = certify_increment(inc, norm, n, samples, _mc.derive_seed(seed, n), truncation)
        if not cert.passed:
            raise CertificateError(
                f"tail certificate failed at step {n}: bound {cert.bound:.4g} >= {cert.threshold:.4g} "
                f"on a {inc.dim}-dimensional increment",
                step=f"condition (iv), n={n}",
            )
        frames.append(F_next)
        increments.append(inc)
        certs.append(cert)
        coverage.append(dict(source.position))
        taming_dims.append(E.dim)
        F = F_next
    return AdaptedSequence(
        conormals, frames, increments, certs, consumed, coverage, truncation, norm.describe(), taming_dims
    )


@dataclass
class SeparatingSequence(AdaptedSequence):
    """Adapted sequence with ``p in F_1`` whose shifted complements miss ``K``."""

    point: HVector = None
    nearest: HVector = None
    direction: HVector = None
    levels: list = field(default_factory=list)

    def as_dict(self):
        d = super().as_dict()
        d["point"] = self.point.to_dict()
        d["nearest"] = self.nearest.to_dict()
        d["direction"] = self.direction.to_dict()
        d["levels"] = self.levels
        return d


def separating_sequence(K, p, norm, depth, dense_seed=None, seed=0, truncation=None, samples=DEFAULT_CERT_SAMPLES):
    """Adapted sequence separating ``p`` from the closed convex body ``K``.

    ``F_1`` contains ``p``, the nearest point ``p0`` of ``K`` and the unit
    vector ``u1`` along ``p - p0``; at every level ``p`` stays outside the
    projection of ``K`` onto ``F_n``.
    """
    from .support import project_body

    p = as_hvector(p)
    p0 = closest_point(K, p)
    gap = (p - p0).norm()
    if gap <= SEPARATION_TOL:
        raise SeparationError(
            f"point not separated: distance to K is {gap:.3g}", step="nearest point (p in K)"
        )
    u1 = (p - p0) / gap
    conormals = orthonormalize([p0, u1, p])
    if truncation is None:
        truncation = max(_default_truncation(conormals, norm, depth), K.size, p.size)
    seq = build_adapted_sequence(conormals, norm, depth, dense_seed, seed, truncation, samples)
    pu = p.dot(u1)
    levels = []
    for n, F in enumerate(seq.frames, start=1):
        Kn = project_body(K, F)
        dist = (closest_point(Kn, p) - p).norm()
        margin = pu - Kn.support(u1)
        levels.append({
            "n": n,
            "p_in_projection": bool(dist <= SEPARATION_TOL),
            "distance": dist,
            "support_margin": margin,
        })
        if dist <= SEPARATION_TOL or margin <= 0:
            raise SeparationError(f"p lies in the projection of K onto F_{n}", step=f"separation, n={n}")
    return SeparatingSequence(
        seq.conormals, seq.frames, seq.increments, seq.certificates, seq.dense_seed, seq.coverage,
        seq.truncation, seq.norm, seq.taming_dims, point=p, nearest=p0, direction=u1, levels=levels,
    )
