"""Support-theorem experiments: projected bodies, planar line grids and the
full separation pipeline."""

from dataclasses import dataclass, field

import numpy as np

from . import _mc
from .errors import ProofStepError
from .hilbert import Ball, Frame, Hull, Hyperplane, as_hvector, project
from .norms import DEFAULT_CERT_SAMPLES, separating_sequence
from .radon import finite_dim_radon, radon_transform, recover_point

WITNESS_SIGMAS = 3.0


def project_body(K, F):
    """Orthogonal projection of ``K`` onto ``span(F)``.

    A ball maps to the ball of the same radius about the projected center
    (read inside ``span(F)``); a hull maps to the hull of the projected
    points.
    """
    if isinstance(K, Ball):
        return Ball(project(K.center, F), K.radius)
    if isinstance(K, Hull):
        return Hull(tuple(project(q, F) for q in K.points))
    raise TypeError(f"not a convex body: {K!r}")


def _misses(K, u, s):
    """Whether the hyperplane ``<x, u> = s`` (``u`` a unit vector) misses ``K``."""
    return s > K.support(u) or -s > K.support(-u)


def helgason_check_2d(f2, K2, angles=64, offsets=None, samples=10_000, seed=0):
    """``Gf`` of a planar functional over a grid of lines.

    Lines are ``{x : x1 cos a + x2 sin a = s}`` with ``a`` on ``angles``
    equispaced values in ``[0, pi)`` (or the given array) and ``s`` on
    ``offsets`` (default 64 values in ``[-3, 3]``).
    """
    angles = np.linspace(0.0, np.pi, int(angles), endpoint=False) if np.isscalar(angles) else np.asarray(angles, float)
    offsets = np.linspace(-3.0, 3.0, 64) if offsets is None else np.asarray(offsets, float)
    lines = []
    idx = 0
    for a in angles:
        u = np.array([np.cos(a), np.sin(a)])
        for s in offsets:
            r = finite_dim_radon(f2, u, s, samples, _mc.derive_seed(seed, idx))
            lines.append({
                "angle": float(a),
                "offset": float(s),
                "estimate": r.estimate,
                "stderr": r.stderr,
                "misses_K": bool(_misses(K2, as_hvector(u), float(s))),
            })
            idx += 1
    missing = [ln for ln in lines if ln["misses_K"]]
    meeting = [ln for ln in lines if not ln["misses_K"]]
    return {
        "lines": lines,
        "max_abs_missing": max((abs(ln["estimate"]) for ln in missing), default=0.0),
        "max_abs_meeting": max((abs(ln["estimate"]) for ln in meeting), default=0.0),
        "missing_within_noise": all(abs(ln["estimate"]) <= WITNESS_SIGMAS * ln["stderr"] for ln in missing),
        "samples": samples,
        "seed": seed,
    }


@dataclass
class SupportReport:
    point: object
    body: object
    f_at_p: float
    levels: list
    sequence: dict
    mode: str
    tolerance: float
    limit_estimate: float
    converged: bool
    passed: bool
    witnesses: list = field(default_factory=list)

    def as_dict(self):
        return {
            "point": self.point.to_dict(),
            "body": describe_body(self.body),
            "f_at_p": self.f_at_p,
            "mode": self.mode,
            "levels": self.levels,
            "limit_estimate": self.limit_estimate,
            "tolerance": self.tolerance,
            "converged": self.converged,
            "passed": self.passed,
            "witnesses": self.witnesses,
            "sequence": self.sequence,
        }


def describe_body(K):
    if isinstance(K, Ball):
        return {"kind": "ball", "center": K.center.to_dict(), "radius": K.radius}
    return {"kind": "hull", "points": [q.to_dict() for q in K.points]}


def witness_search(f, K, seq, count=8, offsets=(0.25, 0.5, 1.0), samples=20_000, seed=0):
    """Hyperplanes missing ``K`` on which ``Gf`` is visibly nonzero.

    Normals are the separating direction and ``count - 1`` random unit
    vectors of ``F_1``; offsets sit beyond the support value of ``K``.
    """
    F1 = seq.frame(1)
    rng = np.random.Generator(np.random.PCG64(_mc.derive_seed(seed, 0)))
    normals = [seq.direction]
    for _ in range(count - 1):
        z = rng.standard_normal(F1.dim)
        normals.append(as_hvector(F1.embed(z[None, :], seq.truncation)[0] / np.linalg.norm(z)))
    found = []
    idx = 0
    for u in normals:
        u = u / u.norm()
        h = K.support(u)
        for d in offsets:
            P = Hyperplane(u, h + d)
            r = radon_transform(f, P, seq.truncation, samples, _mc.derive_seed(seed, 1, idx))
            idx += 1
            if abs(r.estimate) > WITNESS_SIGMAS * r.stderr:
                found.append(r.as_dict())
    return found


def support_experiment(
    f, K, p, norm, depth, samples=100_000, seed=0, truncation=None,
    cert_samples=DEFAULT_CERT_SAMPLES, mode="vanishing", witness_count=8,
):
    """Run the separation pipeline for ``p`` outside ``K``.

    ``mode="vanishing"`` is for functionals built so that ``Gf`` is zero on
    every hyperplane missing ``K``; the deepest ``|f_n(p)|`` must then sit
    inside the error envelope. ``mode="contrapositive"`` is for ``f(p) != 0``:
    it passes when ``f_n(p)`` tracks ``f(p)`` and some hyperplane missing
    ``K`` carries a nonzero transform.
    """
    if mode not in ("vanishing", "contrapositive"):
        raise ValueError(f"unknown mode {mode!r}")
    p = as_hvector(p)
    if not f.continuity_modulus:
        raise ProofStepError(f"functional {f.name!r} declares no continuity modulus", step="continuity at p")
    seq = separating_sequence(K, p, norm, depth, seed=_mc.derive_seed(seed, 1),
                              truncation=truncation, samples=cert_samples)
    rec = recover_point(f, p, seq, norm, samples, _mc.derive_seed(seed, 2), cert_samples)
    levels = []
    for sep, r in zip(seq.levels, rec):
        levels.append({
            "n": sep["n"],
            "dim_F": seq.frame(sep["n"]).dim,
            "p_in_projection": sep["p_in_projection"],
            "separation_margin": sep["support_margin"],
            "distance": sep["distance"],
            "f_n_at_p": r["estimate"],
            "stderr": r["stderr"],
            "envelope": r["envelope"],
            "within_envelope": r["within"],
        })
    deepest = rec[-1]
    fp = deepest["f_p"]
    tol = deepest["envelope"]
    converged = all(r["within"] for r in rec)
    witnesses = []
    if mode == "vanishing":
        passed = converged and abs(deepest["estimate"]) <= tol
    else:
        witnesses = witness_search(f, K, seq, witness_count, seed=_mc.derive_seed(seed, 3))
        passed = converged and abs(fp) > tol and bool(witnesses)
    return SupportReport(
        p, K, fp, levels, seq.as_dict(), mode, tol, deepest["estimate"], converged, passed, witnesses,
    )
