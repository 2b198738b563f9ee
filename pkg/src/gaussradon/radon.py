"""The Gaussian Radon transform and its structural identities."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _mc
from .errors import InvariantError, ProofStepError
from .gaussian import AffineGaussian, evaluate_samples
from .hilbert import AffineSubspace, Frame, Hyperplane, as_hvector, complement, extend, in_span, project
from .norms import sample_norms, tail_upper

_LHS_STREAM = 11
_OUTER_STREAM = 12
_INNER_STREAM = 13
_TAIL_STREAM = 14


@dataclass(frozen=True)
class RadonResult:
    hyperplane: Hyperplane
    estimate: float
    stderr: float
    truncation: int
    samples: int
    seed: int

    def as_dict(self):
        return {
            "normal": self.hyperplane.normal.to_dict(),
            "offset": self.hyperplane.offset,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "truncation": self.truncation,
            "samples": self.samples,
            "seed": self.seed,
        }


def _check_width(f, truncation):
    if f.min_dim > truncation:
        raise InvariantError(f"functional {f.name!r} reads {f.min_dim} coordinates, truncation is {truncation}")


def radon_transform(f, P, truncation, samples=100_000, seed=0, norm=None):
    """Monte Carlo ``Gf(P)``: the mean of ``f`` under the Gaussian on ``P``.

    ``norm`` is accepted for provenance only; the measure on ``P`` does not
    depend on it.
    """
    if not isinstance(P, Hyperplane):
        raise TypeError("P must be a Hyperplane")
    _check_width(f, truncation)
    mu = AffineGaussian.on_hyperplane(P, truncation)
    mean, se = _mc.mean_stderr(evaluate_samples(mu, f, samples, seed))
    return RadonResult(P, mean, se, truncation, samples, seed)


def finite_dim_radon(f, normal, offset, samples=10_000, seed=0):
    """``Gf`` on the hyperplane ``<x, normal> = offset`` of ``R^k``, ``k = len(normal)``.

    ``normal`` need not be a unit vector; the equation is rescaled.
    """
    w = np.asarray(normal, dtype=float).reshape(-1)
    if w.size < 1:
        raise ValueError("need k >= 1")
    P = Hyperplane.from_equation(w, float(offset))
    return radon_transform(f, P, w.size, samples, seed)


def slice_measure(F, y, truncation):
    """``mu_{y + F^perp}`` on the truncation."""
    y = as_hvector(y)
    if not in_span(y, F):
        raise InvariantError("slice point is not in span(F)")
    return AffineGaussian(AffineSubspace(y, conormals=F), truncation)


def conditional_slice(f, F, y, truncation, samples=10_000, seed=0):
    """``f_F(y)``: mean of ``f`` under the Gaussian on ``y + F^perp``.

    Returns ``(estimate, stderr)``.
    """
    _check_width(f, truncation)
    mu = slice_measure(F, y, truncation)
    return _mc.mean_stderr(evaluate_samples(mu, f, samples, seed))


def _inplane_directions(u, F):
    """Orthonormal basis of ``span(F)`` minus ``u``."""
    _, inc = extend(Frame([u]), list(F))
    return inc


def _map_indexed(fn, count):
    workers = _mc.get_workers()
    if workers <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def disintegrate_check(f, P, F, truncation, lhs_samples=100_000, outer=1000, inner=1000, seed=0):
    """Compare ``Gf(P)`` with the nested estimate of ``G_F(f_F)(P cap F)``.

    The outer level samples ``y`` from the Gaussian on ``P cap span(F)``;
    the inner level estimates ``f_F(y)`` on ``y + F^perp``. Slices use
    independent streams and are reduced in index order.
    """
    if not isinstance(F, Frame):
        F = Frame(F)
    if not in_span(P.normal, F):
        raise ProofStepError("F not adapted to P: the normal does not lie in span(F)", step="hyperplane lift")
    if F.size > truncation:
        raise InvariantError("F extends beyond the truncation")
    _check_width(f, truncation)
    lhs = radon_transform(f, P, truncation, lhs_samples, _mc.derive_seed(seed, _LHS_STREAM))

    u = P.normal
    D = _inplane_directions(u, F)
    anchor = P.anchor.dense(truncation)
    outer_seed = _mc.derive_seed(seed, _OUTER_STREAM)
    Y = np.concatenate(_mc.map_shards(
        lambda rng, m: anchor + (D.embed(rng.standard_normal((m, D.dim)), truncation) if D.dim else 0.0),
        outer_seed, outer,
    ))
    G = complement(F, truncation)
    inner_seed = _mc.derive_seed(seed, _INNER_STREAM)

    def slice_stats(i):
        rng = _mc.shard_rng(inner_seed, i)
        X = Y[i] + (G.embed(rng.standard_normal((inner, G.dim)), truncation) if G.dim else np.zeros((inner, truncation)))
        v = f(X)
        return float(np.mean(v)), float(np.var(v, ddof=1)) if inner > 1 else 0.0

    stats = np.array(_map_indexed(slice_stats, outer))
    means, variances = stats[:, 0], stats[:, 1]
    rhs, rhs_se = _mc.mean_stderr(means)
    within = float(np.mean(variances) / inner)
    total = float(np.var(means, ddof=1)) if outer > 1 else 0.0
    combined = float(np.hypot(lhs.stderr, rhs_se))
    diff = abs(lhs.estimate - rhs)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "rhs_stderr": rhs_se,
        "variance_within": within,
        "variance_between": max(0.0, total - within),
        "combined_stderr": combined,
        "difference": diff,
        "agree": bool(diff <= 3.0 * combined),
        "outer": outer,
        "inner": inner,
        "dim_F": F.dim,
    }


def disintegrate_exponential(xstar, t, P, F, truncation):
    """Closed forms of both sides of the disintegration for ``exp(i t <x*, x>)``.

    The left side uses the Gaussian on ``P`` directly; the right side
    composes the slice transform on ``y + F^perp`` with the Gaussian on
    ``P cap span(F)``. Returns ``(lhs, rhs)`` as complex numbers.
    """
    if not in_span(P.normal, F):
        raise ProofStepError("F not adapted to P: the normal does not lie in span(F)", step="hyperplane lift")
    x = as_hvector(xstar).dense(truncation)
    u = P.normal.dense(truncation)
    c = P.offset
    t = float(t)
    # Gaussian on P: mean c u, covariance I - u u^T.
    xu = float(x @ u)
    v_p = float(x @ x) - xu * xu
    lhs = np.exp(1j * t * c * xu - 0.5 * t * t * v_p)
    # Slice on y + F^perp, then y on P cap F.
    G = complement(F, truncation)
    xg = G.coords(x[None, :])[0] if G.dim else np.zeros(0)
    D = _inplane_directions(P.normal, F)
    xd = D.coords(x[None, :])[0] if D.dim else np.zeros(0)
    xf = project(as_hvector(x), F).dense(truncation)
    rhs = np.exp(1j * t * c * float(xf @ u) - 0.5 * t * t * (float(xg @ xg) + float(xd @ xd)))
    return complex(lhs), complex(rhs)


def tail_profile(seq, n, norm, radii, samples, seed):
    """Upper bounds on ``mu_{F_n^perp}[|v| > R]`` for each ``R``.

    Combines the 99% upper confidence limit of a Monte Carlo estimate with
    the norm's analytic bound when one exists.
    """
    comp = seq.complement(n)
    values = sample_norms(comp, norm, samples, seed, _TAIL_STREAM, truncation=seq.truncation)
    out = []
    for R in radii:
        p = float(np.count_nonzero(values > R)) / samples
        upper = tail_upper(p, samples)
        analytic = norm.markov_bound(comp, R)
        out.append((float(R), p, upper if analytic is None else min(upper, analytic)))
    return out


def recover_point(f, p, seq, norm, samples=100_000, seed=0, tail_samples=100_000):
    """Estimates of ``int f dmu_{p + F_n^perp}`` along an adapted sequence.

    Each level reports the error envelope ``min_R 2 bound tail_n(R) + eps(R)``
    from the declared continuity modulus of ``f`` at ``p``.
    """
    p = as_hvector(p)
    if not f.continuity_modulus:
        raise ProofStepError(f"functional {f.name!r} declares no continuity modulus", step="continuity at p")
    if f.modulus_point is None or (f.modulus_point - p).norm() > 1e-12:
        raise ProofStepError("continuity modulus is declared at a different point", step="continuity at p")
    if not in_span(p, seq.frame(1)):
        raise ProofStepError("p does not lie in F_1", step="slice point")
    fp = f.at(p.dense(max(p.size, f.min_dim, 1)))
    radii = [r for r, _ in f.continuity_modulus]
    eps = dict(f.continuity_modulus)
    levels = []
    for n in range(1, seq.depth + 1):
        est, se = conditional_slice(f, seq.frame(n), p, seq.truncation, samples, _mc.derive_seed(seed, n))
        tails = tail_profile(seq, n, norm, radii, tail_samples, _mc.derive_seed(seed, 1000 + n))
        env = [(2.0 * f.bound * up + eps[R], R, up) for R, _, up in tails]
        envelope, R_best, tail_best = (float(v) for v in min(env))
        err = abs(est - fp)
        levels.append({
            "n": n,
            "estimate": est,
            "stderr": se,
            "f_p": fp,
            "error": err,
            "envelope": envelope,
            "R": R_best,
            "tail": tail_best,
            "eps": eps[R_best],
            "within": bool(err <= envelope),
        })
    return levels
