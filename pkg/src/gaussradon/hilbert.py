"""Coordinate model of a separable Hilbert space.

Vectors are finite-support coefficient sequences over one fixed orthonormal
basis ``e_0, e_1, ...`` (0-based indices). Subspaces are carried as
orthonormal frames; affine subspaces as an anchor plus either a direction
frame or a conormal frame.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvariantError

ORTHO_TOL = 1e-10
QP_TOL = 1e-8


class HVector:
    """Finite-support element of H.

    Stored as a read-only dense array of the leading coefficients with
    trailing zeros removed, so equal vectors compare equal regardless of
    how they were built.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=()):
        a = np.array(coeffs, dtype=np.float64).ravel()
        if not np.all(np.isfinite(a)):
            raise InvariantError("HVector coefficients must be finite")
        nz = np.flatnonzero(a)
        a = a[: nz[-1] + 1] if nz.size else a[:0]
        a.flags.writeable = False
        self._c = a

    @classmethod
    def from_mapping(cls, mapping):
        if not mapping:
            return cls()
        idx = [int(i) for i in mapping]
        if min(idx) < 0:
            raise InvariantError("basis indices must be non-negative")
        a = np.zeros(max(idx) + 1)
        for i, v in mapping.items():
            a[int(i)] += float(v)
        return cls(a)

    @classmethod
    def basis(cls, i, scale=1.0):
        a = np.zeros(i + 1)
        a[i] = scale
        return cls(a)

    @property
    def coeffs(self):
        return self._c

    @property
    def size(self):
        """One past the largest index with a nonzero coefficient."""
        return self._c.size

    def dense(self, n):
        """Coefficients padded to length ``n``; fails if the support is longer."""
        if self._c.size > n:
            raise InvariantError(f"vector has support {self._c.size} beyond truncation {n}")
        out = np.zeros(n)
        out[: self._c.size] = self._c
        return out

    def dot(self, other):
        k = min(self._c.size, other._c.size)
        return float(self._c[:k] @ other._c[:k])

    def norm(self):
        return float(np.sqrt(self._c @ self._c))

    def to_dict(self):
        return {int(i): float(self._c[i]) for i in np.flatnonzero(self._c)}

    def _binop(self, other, op):
        n = max(self._c.size, other._c.size)
        return HVector(op(self.dense(n), other.dense(n)))

    def __add__(self, other):
        return self._binop(other, np.add)

    def __sub__(self, other):
        return self._binop(other, np.subtract)

    def __neg__(self):
        return HVector(-self._c)

    def __mul__(self, s):
        return HVector(self._c * float(s))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return HVector(self._c / float(s))

    def __eq__(self, other):
        return isinstance(other, HVector) and np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        items = ", ".join(f"{i}: {v:.6g}" for i, v in self.to_dict().items())
        return f"HVector({{{items}}})"


def as_hvector(x):
    if isinstance(x, HVector):
        return x
    if isinstance(x, dict):
        return HVector.from_mapping(x)
    return HVector(x)


class Frame:
    """Orthonormal list of vectors spanning a finite-dimensional subspace."""

    def __init__(self, vectors=(), check=True):
        self.vectors = tuple(as_hvector(v) for v in vectors)
        self._mats = {}
        if check and self.vectors:
            m = self.matrix()
            gram = m @ m.T
            err = float(np.max(np.abs(gram - np.eye(len(self.vectors)))))
            if err > ORTHO_TOL:
                raise InvariantError(f"frame is not orthonormal (max Gram error {err:.3g})")

    @classmethod
    def from_matrix(cls, rows, check=True):
        return cls([HVector(r) for r in np.atleast_2d(rows)], check=check)

    @classmethod
    def coordinates(cls, indices):
        return cls([HVector.basis(int(i)) for i in indices], check=False)

    @property
    def dim(self):
        return len(self.vectors)

    @property
    def size(self):
        return max((v.size for v in self.vectors), default=0)

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    def matrix(self, n=None):
        """Frame vectors as rows of a ``(dim, n)`` array (read-only, cached)."""
        n = self.size if n is None else n
        m = self._mats.get(n)
        if m is None:
            m = np.zeros((len(self.vectors), n))
            for i, v in enumerate(self.vectors):
                m[i] = v.dense(n)
            m.flags.writeable = False
            self._mats[n] = m
        return m

    @cached_property
    def aligned(self):
        """``(indices, signs)`` when every vector is a signed basis vector, else None."""
        idx, sgn = [], []
        for v in self.vectors:
            nz = np.flatnonzero(v.coeffs)
            if nz.size != 1 or abs(v.coeffs[nz[0]]) != 1.0:
                return None
            idx.append(int(nz[0]))
            sgn.append(float(v.coeffs[nz[0]]))
        return np.array(idx, dtype=np.intp), np.array(sgn)

    def coords(self, X):
        """Frame coordinates of the rows of ``X``."""
        X = np.atleast_2d(X)
        return X @ self.matrix(X.shape[1]).T

    def embed(self, Z, n):
        """Rows ``sum_j Z[:, j] * f_j`` as length-``n`` coefficient arrays."""
        Z = np.atleast_2d(Z)
        al = self.aligned
        if al is not None:
            out = np.zeros((Z.shape[0], n))
            out[:, al[0]] = Z * al[1]
            return out
        return Z @ self.matrix(n)

    def __eq__(self, other):
        return isinstance(other, Frame) and self.vectors == other.vectors

    def __hash__(self):
        return hash(self.vectors)

    def __repr__(self):
        return f"Frame(dim={self.dim}, size={self.size})"


def project(x, F):
    """Orthogonal projection of ``x`` onto ``span(F)``.

    >>> project(HVector.basis(1), Frame([HVector.basis(0)]))
    HVector({})
    """
    x = as_hvector(x)
    if not F.dim:
        return HVector()
    n = max(x.size, F.size)
    M = F.matrix(n)
    return HVector((M @ x.dense(n)) @ M)


def residual(x, F):
    return as_hvector(x) - project(x, F)


def in_span(x, F, tol=ORTHO_TOL):
    return residual(x, F).norm() <= tol


def _gram_schmidt(basis_rows, new_rows, tol):
    """Orthonormalize ``new_rows`` against ``basis_rows`` and each other (MGS, two passes)."""
    out = []
    q = [r for r in basis_rows]
    for v in new_rows:
        w = np.array(v, dtype=float)
        for _ in range(2):
            for b in q:
                w -= (b @ w) * b
        nrm = float(np.sqrt(w @ w))
        if nrm < tol:
            continue
        w = w / nrm
        q.append(w)
        out.append(w)
    return out


def orthonormalize(vs, tol=ORTHO_TOL):
    """Gram-Schmidt; vectors whose residual falls below ``tol`` are dropped."""
    vs = [as_hvector(v) for v in vs]
    n = max((v.size for v in vs), default=0)
    rows = _gram_schmidt([], [v.dense(n) for v in vs], tol)
    return Frame([HVector(r) for r in rows], check=False)


def extend(F, vs, tol=ORTHO_TOL):
    """Extend ``F`` by the part of ``vs`` orthogonal to it.

    Returns ``(F_new, increment)`` with ``F_new = F + increment`` and the
    vectors of ``F`` kept verbatim, so nesting is exact.
    """
    vs = [as_hvector(v) for v in vs]
    n = max([F.size] + [v.size for v in vs])
    rows = _gram_schmidt(list(F.matrix(n)), [v.dense(n) for v in vs], tol)
    inc = Frame([HVector(r) for r in rows], check=False)
    return Frame(F.vectors + inc.vectors, check=False), inc


def complement(F, n):
    """Orthonormal basis of ``span(F)``-perp inside ``span(e_0..e_{n-1})``.

    Built by pivoted Gram-Schmidt over the projected basis vectors, so basis
    vectors already orthogonal to ``F`` come out exactly.
    """
    if F.size > n:
        raise InvariantError(f"frame support {F.size} exceeds truncation {n}")
    al = F.aligned
    if al is not None:
        rest = np.setdiff1d(np.arange(n), al[0])
        return Frame.coordinates(rest)
    M = F.matrix(n)
    R = np.eye(n) - M.T @ (M @ np.eye(n))  # columns: residuals of e_i
    R = R.T.copy()  # rows
    out = []
    target = n - F.dim
    norms = np.einsum("ij,ij->i", R, R)
    for _ in range(target):
        i = int(np.argmax(norms))
        if norms[i] < 1e-12:
            break
        q = R[i] / np.sqrt(norms[i])
        q -= M.T @ (M @ q)
        for prev in out:
            q -= (prev @ q) * prev
        q /= np.sqrt(q @ q)
        out.append(q)
        R -= np.outer(R @ q, q)
        norms = np.einsum("ij,ij->i", R, R)
    # Cleanup for exactness: entries that are pure rounding noise.
    rows = []
    for q in out:
        q = np.where(np.abs(q) < 1e-15, 0.0, q)
        rows.append(q / np.sqrt(q @ q))
    return Frame.from_matrix(np.array(rows).reshape(-1, n), check=True) if rows else Frame()


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """``M_p = p + M_0`` with ``p`` orthogonal to ``M_0``.

    Exactly one of ``directions`` (basis of ``M_0``) or ``conormals`` (basis
    of the orthogonal complement of ``M_0``) is given.
    """

    anchor: HVector
    directions: Frame = None
    conormals: Frame = None

    def __post_init__(self):
        object.__setattr__(self, "anchor", as_hvector(self.anchor))
        if (self.directions is None) == (self.conormals is None):
            raise InvariantError("give exactly one of directions or conormals")
        if self.directions is not None:
            for d in self.directions:
                if abs(self.anchor.dot(d)) > ORTHO_TOL:
                    raise InvariantError("anchor is not orthogonal to the directions")
        elif not in_span(self.anchor, self.conormals):
            raise InvariantError("anchor is not in the span of the conormals")

    @property
    def conormal_form(self):
        return self.conormals is not None

    def direction_frame(self, truncation):
        """Orthonormal basis of ``M_0`` (truncated to the first ``truncation`` coordinates)."""
        if self.directions is not None:
            if self.directions.size > truncation:
                raise InvariantError("directions extend beyond the truncation")
            return self.directions
        return complement(self.conormals, truncation)

    def translate_to(self, p):
        """Same ``M_0`` through a new anchor."""
        return AffineSubspace(p, directions=self.directions, conormals=self.conormals)


def _first_nonzero_positive(c):
    nz = np.flatnonzero(c)
    return not nz.size or c[nz[0]] > 0


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """``{x : <x, normal> = offset}`` in canonical orientation (offset >= 0)."""

    normal: HVector
    offset: float

    def __post_init__(self):
        u = as_hvector(self.normal)
        c = float(self.offset)
        if abs(u.norm() - 1.0) > ORTHO_TOL:
            raise InvariantError(f"hyperplane normal must be a unit vector (norm {u.norm()!r})")
        if c < 0 or (c == 0 and not _first_nonzero_positive(u.coeffs)):
            u, c = -u, -c
        object.__setattr__(self, "normal", u)
        object.__setattr__(self, "offset", c + 0.0)

    @classmethod
    def from_equation(cls, w, b):
        """Hyperplane ``<x, w> = b`` for any nonzero ``w``."""
        w = as_hvector(w)
        nrm = w.norm()
        if nrm == 0:
            raise InvariantError("zero normal")
        return cls(w / nrm, b / nrm)

    @property
    def anchor(self):
        return self.normal * self.offset

    def affine(self):
        return AffineSubspace(self.anchor, conormals=Frame([self.normal]))

    def contains(self, x, tol=ORTHO_TOL):
        return abs(as_hvector(x).dot(self.normal) - self.offset) <= tol

    def __eq__(self, other):
        return isinstance(other, Hyperplane) and self.normal == other.normal and self.offset == other.offset

    def __hash__(self):
        return hash((self.normal, self.offset))


def lift_hyperplane(normal, offset, F):
    """The hyperplane ``P' + F^perp`` of H for a hyperplane ``P'`` of ``span(F)``."""
    u = as_hvector(normal)
    if not in_span(u, F):
        raise InvariantError("hyperplane normal does not lie in span(F)")
    return Hyperplane(u, offset)


# -- convex bodies ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Ball:
    center: HVector
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_hvector(self.center))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise InvariantError("ball radius must be positive")

    @property
    def size(self):
        return self.center.size

    def support(self, u):
        u = as_hvector(u)
        return self.center.dot(u) + self.radius * u.norm()

    def contains(self, x, tol=QP_TOL):
        return (as_hvector(x) - self.center).norm() <= self.radius + tol

    def sample(self, rng, count, n):
        """Points of the ball supported on the first ``n`` coordinates."""
        g = rng.standard_normal((count, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = self.radius * rng.random(count) ** (1.0 / n)
        return self.center.dense(n) + g * r[:, None]


@dataclass(frozen=True, eq=False)
class Hull:
    points: tuple

    def __post_init__(self):
        pts = tuple(as_hvector(p) for p in self.points)
        if not pts:
            raise InvariantError("hull needs at least one point")
        object.__setattr__(self, "points", pts)

    @property
    def size(self):
        return max(p.size for p in self.points)

    def matrix(self, n=None):
        n = self.size if n is None else n
        return np.array([p.dense(n) for p in self.points])

    def support(self, u):
        u = as_hvector(u)
        return max(p.dot(u) for p in self.points)

    def contains(self, x, tol=QP_TOL):
        return (closest_point(self, x) - as_hvector(x)).norm() <= tol

    def sample(self, rng, count, n):
        w = rng.dirichlet(np.ones(len(self.points)), size=count)
        return w @ self.matrix(n)


ConvexBody = (Ball, Hull)


def _affine_minimizer(V):
    """Weights ``a`` with ``sum(a) = 1`` minimizing ``|a @ V|``."""
    k = V.shape[0]
    G = V @ V.T
    A = np.zeros((k + 1, k + 1))
    A[:k, :k] = G
    A[:k, k] = 1.0
    A[k, :k] = 1.0
    b = np.zeros(k + 1)
    b[k] = 1.0
    sol = np.linalg.lstsq(A, b, rcond=None)[0]
    return sol[:k]


def min_norm_point(Q, tol=1e-12, max_iter=1000):
    """Point of ``conv(rows of Q)`` nearest the origin (Wolfe's algorithm).

    Returns ``(x, weights)`` with ``weights`` over all rows of ``Q``.
    """
    Q = np.asarray(Q, dtype=float)
    m = Q.shape[0]
    norms = np.einsum("ij,ij->i", Q, Q)
    scale = max(float(norms.max()), 1.0)
    S = [int(np.argmin(norms))]
    lam = np.array([1.0])
    x = Q[S[0]].copy()
    for _ in range(max_iter):
        dots = Q @ x
        j = int(np.argmin(dots))
        if x @ x - dots[j] <= tol * scale or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        for _ in range(max_iter):
            alpha = _affine_minimizer(Q[S])
            if np.all(alpha > tol):
                lam = alpha
                break
            neg = alpha <= tol
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg & (lam - alpha > 0), lam / (lam - alpha), np.inf)
            theta = min(float(np.min(ratios)), 1.0)
            lam = theta * alpha + (1 - theta) * lam
            keep = lam > tol
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep] / lam[keep].sum()
        x = lam @ Q[S]
    w = np.zeros(m)
    w[S] = lam
    return x, w


def closest_point(K, p):
    """Nearest point of the convex body ``K`` to ``p``."""
    p = as_hvector(p)
    if isinstance(K, Ball):
        d = p - K.center
        r = d.norm()
        if r <= K.radius:
            return p
        return K.center + d * (K.radius / r)
    if isinstance(K, Hull):
        n = max(K.size, p.size)
        pd = p.dense(n)
        x, _ = min_norm_point(K.matrix(n) - pd)
        if np.sqrt(x @ x) <= QP_TOL:
            return p
        return HVector(x + pd)
    raise TypeError(f"not a convex body: {K!r}")


def distance(K, p):
    return (closest_point(K, p) - as_hvector(p)).norm()
