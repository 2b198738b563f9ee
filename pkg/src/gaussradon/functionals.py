"""Bounded functionals on coefficient vectors.

An evaluator takes an ``(m, n)`` array of coefficient rows and returns ``m``
values. ``min_dim`` is the number of leading coordinates it reads; the
Monte Carlo routines refuse truncations shorter than that.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BoundViolation, InvariantError
from .hilbert import HVector, as_hvector

BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class BoundedFunctional:
    evaluator: object
    bound: float
    name: str = "custom"
    min_dim: int = 0
    continuity_modulus: tuple = None  # ((R, eps), ...) valid at `modulus_point`
    modulus_point: HVector = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (np.isfinite(self.bound) and self.bound > 0):
            raise InvariantError("functional bound must be positive and finite")

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] < self.min_dim:
            raise InvariantError(
                f"functional {self.name!r} reads {self.min_dim} coordinates, truncation is {X.shape[1]}"
            )
        v = np.asarray(self.evaluator(X), dtype=float).reshape(-1)
        if v.shape[0] != X.shape[0]:
            raise InvariantError(f"functional {self.name!r} returned {v.shape[0]} values for {X.shape[0]} points")
        bad = ~np.isfinite(v) | (np.abs(v) > self.bound + BOUND_SLACK)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise BoundViolation(
                f"functional {self.name!r} returned {v[i]!r}, outside its declared bound {self.bound}",
                step="bounded Borel hypothesis",
            )
        return v

    def at(self, x):
        x = as_hvector(x)
        return float(self(x.dense(max(x.size, self.min_dim, 1)))[0])

    def with_modulus(self, table, point):
        table = tuple((float(r), float(e)) for r, e in table)
        return replace(self, continuity_modulus=table, modulus_point=as_hvector(point))

    def describe(self):
        return {"name": self.name, "bound": self.bound, **self.params}


def constant(value=1.0):
    value = float(value)

    def ev(X):
        return np.full(X.shape[0], value)

    return BoundedFunctional(ev, abs(value) or 1.0, "constant", 0, params={"value": value})


def _tent(s):
    return np.maximum(0.0, 1.0 - s)


def _smooth(s):
    out = np.zeros_like(s)
    inside = s < 1.0
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
    return out


PROFILES = {"tent": _tent, "smooth": _smooth}


class CoordinateBump:
    """``height * profile(||x_{<d} - center|| / radius)``.

    Both profiles are non-increasing on ``[0, inf)`` and vanish for
    arguments ``>= 1``, which makes the continuity modulus exact.
    """

    def __init__(self, center, radius, height=1.0, profile="tent", dim=None):
        if profile not in PROFILES:
            raise ValueError(f"unknown profile {profile!r}")
        if radius <= 0:
            raise ValueError("radius must be positive")
        given = 0 if isinstance(center, HVector) else len(center)  # trailing zeros count
        self.center = as_hvector(center)
        self.dim = max(self.center.size, given, int(dim or 0), 1)
        self.radius = float(radius)
        self.height = float(height)
        self.profile = profile
        self._c = self.center.dense(self.dim)

    def _s(self, X):
        D = X[:, : self.dim] - self._c
        return np.sqrt(np.einsum("ij,ij->i", D, D)) / self.radius

    def __call__(self, X):
        return self.height * PROFILES[self.profile](self._s(X))

    def modulus(self, point, norm, radii):
        """``(R, eps)`` pairs with ``|f(p+v) - f(p)| <= eps`` whenever ``|v| <= R``."""
        factor = norm.coordinate_factor(self.dim)
        if factor is None:
            raise InvariantError(f"norm {norm.name!r} gives no coordinate bound for a modulus")
        point = as_hvector(point)
        s0 = float(self._s(point.dense(max(point.size, self.dim))[None, :])[0])
        psi = PROFILES[self.profile]
        f0 = float(psi(np.array([s0]))[0])
        table = []
        for R in radii:
            ds = factor * R / self.radius
            hi = float(psi(np.array([max(0.0, s0 - ds)]))[0])
            lo = float(psi(np.array([s0 + ds]))[0])
            table.append((float(R), abs(self.height) * max(hi - f0, f0 - lo)))
        return table

    def functional(self):
        return BoundedFunctional(
            self, abs(self.height), "coordinate-bump", self.dim,
            params={
                "center": self.center.to_dict(), "radius": self.radius,
                "height": self.height, "profile": self.profile, "dim": self.dim,
            },
        )


def coordinate_bump(center, radius, height=1.0, profile="tent", dim=None, norm=None, radii=None, at=None):
    bump = CoordinateBump(center, radius, height, profile, dim)
    f = bump.functional()
    if norm is not None and at is not None:
        radii = radii if radii is not None else default_radii()
        f = f.with_modulus(bump.modulus(at, norm, radii), at)
    return f


def default_radii():
    return tuple(float(r) for r in np.geomspace(1e-4, 1.0, 25))


def gaussian_weight(dim):
    """``exp(-||x_{<dim}||^2 / 2)``."""
    dim = int(dim)

    def ev(X):
        Y = X[:, :dim]
        return np.exp(-0.5 * np.einsum("ij,ij->i", Y, Y))

    return BoundedFunctional(ev, 1.0, "gaussian-weight", dim, params={"dim": dim})


def product_cos(freqs, phases=None):
    """``prod_i cos(freqs[i] * x_i + phases[i])``."""
    a = np.asarray(freqs, dtype=float)
    b = np.zeros_like(a) if phases is None else np.asarray(phases, dtype=float)

    def ev(X):
        return np.prod(np.cos(X[:, : a.size] * a + b), axis=1)

    return BoundedFunctional(ev, 1.0, "product-cos", a.size, params={"freqs": a.tolist(), "phases": b.tolist()})


def product_logistic(scales, shifts=None):
    """``prod_i 1 / (1 + exp(-(scales[i] * x_i + shifts[i])))``."""
    a = np.asarray(scales, dtype=float)
    b = np.zeros_like(a) if shifts is None else np.asarray(shifts, dtype=float)

    def ev(X):
        z = X[:, : a.size] * a + b
        return np.prod(0.5 * (1.0 + np.tanh(0.5 * z)), axis=1)

    return BoundedFunctional(ev, 1.0, "product-logistic", a.size, params={"scales": a.tolist(), "shifts": b.tolist()})


def exp_probe(xstar, t=1.0, part="re"):
    """Real or imaginary part of ``exp(i t <x*, x>)``."""
    xs = as_hvector(xstar)
    w = xs.coeffs.copy()
    t = float(t)
    op = {"re": np.cos, "im": np.sin}[part]

    def ev(X):
        return op(t * (X[:, : w.size] @ w))

    return BoundedFunctional(ev, 1.0, "exp-probe", w.size, params={"xstar": xs.to_dict(), "t": t, "part": part})


def clamped_coordinate(index, lo=-10.0, hi=10.0):
    """``clip(x_index, lo, hi)``."""
    index = int(index)

    def ev(X):
        return np.clip(X[:, index], lo, hi)

    return BoundedFunctional(
        ev, max(abs(lo), abs(hi)), "clamped-coordinate", index + 1,
        params={"index": index, "lo": lo, "hi": hi},
    )


def lipschitz_modulus(lipschitz, dim, norm, radii, bound=None):
    """Modulus table for a functional that is ``lipschitz``-Lipschitz in the
    Hilbert norm of its first ``dim`` coordinates."""
    factor = norm.coordinate_factor(dim)
    if factor is None:
        raise InvariantError(f"norm {norm.name!r} gives no coordinate bound for a modulus")
    cap = np.inf if bound is None else 2.0 * bound
    return [(float(R), float(min(cap, lipschitz * factor * R))) for R in radii]
