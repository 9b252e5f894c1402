"""Convex bodies: polytopes and support/level oracles.

Every body exposes a vectorized support map ``support(U) -> (h, S)``, a
convex ``level`` function with ``K = {level <= 1}``, ray casting
(``radial``) and ``transformed`` for isometric images. Concrete oracle
families are :class:`LpBody` (ellipsoids when ``p == 2``) and
:class:`Revolution` (k-bodies of revolution built from a generating region).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.spatial import ConvexHull, HalfspaceIntersection, cKDTree

from .geometry import (
    DimensionError,
    Flat,
    Isometry,
    complement_basis,
    orthonormalize,
)
from .tolerance import DEFAULT_TOL, Tolerance, symmetric_directions


class BodyError(ValueError):
    """Invalid body data or generator parameters."""


def _as_dirs(U, d: int) -> tuple[np.ndarray, bool]:
    U = np.asarray(U, dtype=float)
    single = U.ndim == 1
    U = U.reshape(-1, d)
    if np.any(np.linalg.norm(U, axis=1) == 0):
        raise ValueError("support direction must be nonzero")
    return U, single


class ConvexBody:
    """Common interface of every convex body in E^d."""

    d: int
    label: str | None = None
    smooth: bool = False
    strictly_convex: bool = False

    # --- required by subclasses -------------------------------------------------
    def _support(self, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def level(self, X) -> np.ndarray:
        raise NotImplementedError

    def interior_point(self) -> np.ndarray:
        raise NotImplementedError

    def transformed(self, T: Isometry) -> "ConvexBody":
        raise NotImplementedError

    # --- shared behaviour -------------------------------------------------------
    def support(self, U):
        """Support value(s) and attaining point(s) for direction(s) ``U``."""
        U, single = _as_dirs(U, self.d)
        h, S = self._support(U)
        if single:
            return float(h[0]), S[0]
        return h, S

    def h(self, U) -> np.ndarray:
        U, single = _as_dirs(U, self.d)
        h = self._support(U)[0]
        return float(h[0]) if single else h

    def contains(self, X, tol: float = 1e-12) -> np.ndarray:
        return self.level(X) <= 1.0 + tol

    def normal(self, X) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no smooth normal map")

    @cached_property
    def _outer_radius(self) -> float:
        U = symmetric_directions(self.d, 256 if self.d > 1 else 2)
        c = self.interior_point()
        h = self.h(U) - U @ c
        return float(np.max(h)) * (2.0 if self.d > 1 else 1.0) + 1e-12

    def radial(self, c, V) -> np.ndarray:
        """Distance from interior point ``c`` to the boundary along unit rows of ``V``.

        ``c`` is one point or one point per row of ``V``.
        """
        c = np.asarray(c, dtype=float)
        V = np.atleast_2d(np.asarray(V, dtype=float))
        hi_len = self._outer_radius + np.linalg.norm(c - self.interior_point(), axis=-1)
        lo = np.zeros(V.shape[0])
        hi = np.broadcast_to(2.0 * hi_len + 1.0, lo.shape).copy()
        hi_len = np.max(hi_len)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            inside = self.level(c + mid[:, None] * V) <= 1.0
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
            if np.all(hi - lo <= 1e-16 * hi_len):
                break
        return 0.5 * (lo + hi)

    @cached_property
    def _meb(self) -> tuple[np.ndarray, float]:
        return minimum_enclosing_ball(self)

    @property
    def circumcenter(self) -> np.ndarray:
        return self._meb[0]

    @property
    def circumradius(self) -> float:
        return self._meb[1]

    @property
    def scale(self) -> float:
        return max(1.0, self.circumradius)

    def distance(self, X) -> np.ndarray:
        """Euclidean distance from points to the body (support-function identity)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return _distance_by_support(self, X)

    def to_dict(self) -> dict:
        raise BodyError(f"{type(self).__name__} has no JSON form")


def _distance_by_support(K: ConvexBody, X: np.ndarray, n_dirs: int | None = None) -> np.ndarray:
    """``d(x, K) = max(0, max_u <x,u> - h(u))`` with sampled ``u`` plus local refinement."""
    U = symmetric_directions(K.d, n_dirs or (4096 if K.d == 3 else 2048 if K.d == 2 else 8192))
    hU = K.h(U)
    out = np.empty(X.shape[0])
    inside = K.contains(X)
    for start in range(0, X.shape[0], 512):
        blk = X[start:start + 512]
        vals = blk @ U.T - hU
        best = np.argmax(vals, axis=1)
        for i, x in enumerate(blk):
            j = start + i
            if inside[j]:
                out[j] = 0.0
                continue

            def f(v, x=x):
                nv = np.linalg.norm(v)
                u = v / nv
                return -(x @ u - K.h(u))

            res = minimize(f, U[best[i]], method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
            out[j] = max(0.0, -res.fun, vals[i, best[i]])
    return out


# ---------------------------------------------------------------------------------
# polytopes
# ---------------------------------------------------------------------------------

def _unique_rows(E: np.ndarray, tol: float) -> np.ndarray:
    _, idx = np.unique(np.round(E / tol), axis=0, return_index=True)
    return E[np.sort(idx)]


@dataclass(frozen=True)
class Face:
    vertices: frozenset
    facets: frozenset
    dim: int


class Polytope(ConvexBody):
    """Convex hull of finitely many points, reduced to its extreme points."""

    def __init__(self, points, label: str | None = None, tol: float = 1e-10):
        P = np.asarray(points, dtype=float)
        if P.ndim != 2 or P.shape[0] == 0:
            raise BodyError("polytope needs a nonempty (n, d) point array")
        if not np.all(np.isfinite(P)):
            raise BodyError("vertex coordinates must be finite")
        self.d = P.shape[1]
        self.label = label
        scale = max(1.0, float(np.max(np.abs(P))))
        if self.d == 1:
            lo, hi = float(P.min()), float(P.max())
            if hi - lo <= tol * scale:
                raise BodyError("degenerate interval")
            self.vertices = np.array([[lo], [hi]])
            self.A = np.array([[1.0], [-1.0]])
            self.b = np.array([hi, -lo])
        else:
            try:
                hull = ConvexHull(P)
            except Exception as exc:  # qhull raises on flat input
                raise BodyError(f"points do not span a full-dimensional body: {exc}") from None
            V = P[hull.vertices]
            V = V[np.lexsort(V.T[::-1])]
            # drop near-duplicate vertices
            keep = np.ones(len(V), dtype=bool)
            tree = cKDTree(V)
            for i, j in sorted(tree.query_pairs(tol * scale)):
                if keep[i]:
                    keep[j] = False
            self.vertices = V[keep]
            E = _unique_rows(hull.equations, 1e-9)
            self.A = E[:, :-1] / np.linalg.norm(E[:, :-1], axis=1, keepdims=True)
            self.b = -E[:, -1] / np.linalg.norm(E[:, :-1], axis=1)
        self.vertices.setflags(write=False)
        self._tol = tol * scale

    # --- interface ---------------------------------------------------------------
    def _support(self, U):
        vals = U @ self.vertices.T
        idx = np.argmax(vals, axis=1)
        return vals[np.arange(len(U)), idx], self.vertices[idx]

    @cached_property
    def _center(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def interior_point(self) -> np.ndarray:
        return self._center

    def level(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        c = self._center
        slack = self.b - self.A @ c
        return np.max(((X - c) @ self.A.T) / slack, axis=-1)

    def radial(self, c, V) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        V = np.atleast_2d(np.asarray(V, dtype=float))
        AV = V @ self.A.T
        slack = self.b - c @ self.A.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(AV > 1e-300, slack / AV, np.inf)
        return np.min(t, axis=1)

    def transformed(self, T: Isometry) -> "Polytope":
        # an isometry maps extreme points to extreme points and facets to facets,
        # so the image needs no new hull computation
        V = T(self.vertices)
        V = V[np.lexsort(V.T[::-1])]
        V.setflags(write=False)
        out = object.__new__(Polytope)
        out.d, out.label, out._tol = self.d, self.label, self._tol
        out.vertices = V
        out.A = self.A @ T.linear.T
        out.b = self.b + out.A @ T.shift
        return out

    def to_dict(self) -> dict:
        return {"dim": self.d, "kind": "polytope", "vertices": self.vertices.tolist()}

    # --- combinatorics -----------------------------------------------------------
    @cached_property
    def facet_vertices(self) -> list[frozenset]:
        R = np.abs(self.vertices @ self.A.T - self.b)
        return [frozenset(np.nonzero(R[:, i] <= 1e-8 * max(1.0, abs(self.b[i])))[0].tolist())
                for i in range(self.A.shape[0])]

    def _face_dim(self, verts) -> int:
        idx = sorted(verts)
        if len(idx) <= 1:
            return 0
        P = self.vertices[idx]
        return int(np.linalg.matrix_rank(P[1:] - P[0], tol=1e-9 * self.scale))

    @cached_property
    def faces(self) -> list[Face]:
        """All nonempty proper faces, as vertex-index and facet-index sets."""
        fv = self.facet_vertices
        faces: dict[frozenset, frozenset] = {}
        frontier = []
        for i, vs in enumerate(fv):
            if vs not in faces:
                faces[vs] = frozenset()
                frontier.append(vs)
        while frontier:
            nxt = []
            for F in frontier:
                for G in fv:
                    I = F & G
                    if I and I != F and I not in faces:
                        faces[I] = frozenset()
                        nxt.append(I)
            frontier = nxt
        out = []
        for vs in faces:
            fac = frozenset(i for i, G in enumerate(fv) if vs <= G)
            out.append(Face(vs, fac, self._face_dim(vs)))
        out.sort(key=lambda f: (f.dim, sorted(f.vertices)))
        return out

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        return [tuple(sorted(f.vertices)) for f in self.faces if f.dim == 1 and len(f.vertices) == 2]

    @cached_property
    def _face_projectors(self):
        data = []
        for f in self.faces:
            idx = sorted(f.vertices)
            P = self.vertices[idx]
            o = P[0]
            B = orthonormalize(P[1:] - o) if len(idx) > 1 else np.zeros((0, self.d))
            data.append((o, B))
        return data

    def distance(self, X) -> np.ndarray:
        """Exact distance via projection onto the affine hull of every face."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        best = np.full(X.shape[0], np.inf)
        tol = 1e-10 * self.scale
        for o, B in self._face_projectors:
            Y = o + ((X - o) @ B.T) @ B if B.shape[0] else np.broadcast_to(o, X.shape)
            ok = np.all(Y @ self.A.T - self.b <= tol, axis=1)
            dist = np.linalg.norm(X - Y, axis=1)
            best = np.where(ok, np.minimum(best, dist), best)
        inside = np.all(X @ self.A.T - self.b <= 0.0, axis=1)
        return np.where(inside, 0.0, best)


# ---------------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------------

class Oracle(ConvexBody):
    """Body given by callables: support map, level function, optional normals."""

    def __init__(self, d: int, support_fn, level_fn, center, normal_fn=None,
                 smooth: bool = False, strictly_convex: bool = False, label: str | None = None):
        self.d = d
        self._support_fn = support_fn
        self._level_fn = level_fn
        self._normal_fn = normal_fn
        self._c = np.asarray(center, dtype=float)
        self.smooth = smooth and normal_fn is not None
        self.strictly_convex = strictly_convex
        self.label = label

    def _support(self, U):
        return self._support_fn(U)

    def level(self, X):
        return self._level_fn(np.asarray(X, dtype=float))

    def interior_point(self):
        return self._c

    def normal(self, X):
        if self._normal_fn is None:
            raise NotImplementedError("oracle has no normal map")
        return self._normal_fn(np.atleast_2d(np.asarray(X, dtype=float)))

    def transformed(self, T: Isometry) -> "Oracle":
        return TransformedBody(self, T)


class TransformedBody(ConvexBody):
    """Image of a body under an isometry: ``h'(u) = h(A^T u) + <b, u>``."""

    def __init__(self, base: ConvexBody, T: Isometry):
        if base.d != T.d:
            raise DimensionError("isometry and body dimensions differ")
        self.base, self.T = base, T
        self.d = base.d
        self.label = base.label
        self.smooth = base.smooth
        self.strictly_convex = base.strictly_convex
        self._inv = T.inverse()

    def _support(self, U):
        A, b = self.T.linear, self.T.shift
        h, S = self.base._support(U @ A)
        return h + U @ b, S @ A.T + b

    def level(self, X):
        return self.base.level(self._inv(X))

    def interior_point(self):
        return self.T(self.base.interior_point())

    def normal(self, X):
        return self.base.normal(self._inv(X)) @ self.T.linear.T

    def transformed(self, T: Isometry) -> ConvexBody:
        return TransformedBody(self.base, T @ self.T)


class LpBody(ConvexBody):
    """``{c + Q diag(a) y : ||y||_p <= 1}``; an ellipsoid when ``p == 2``.

    For ``1 < p < inf`` the body is smooth and strictly convex.
    """

    def __init__(self, center, semi_axes, rotation=None, p: float = 2.0, label: str | None = None):
        self.c = np.asarray(center, dtype=float).reshape(-1)
        self.a = np.asarray(semi_axes, dtype=float).reshape(-1)
        self.d = self.c.shape[0]
        if self.a.shape[0] != self.d:
            raise BodyError("semi_axes length must equal dim")
        if np.any(self.a <= 0) or not np.all(np.isfinite(self.a)):
            raise BodyError("semi-axes must be positive and finite")
        Q = np.eye(self.d) if rotation is None else np.asarray(rotation, dtype=float)
        if np.max(np.abs(Q.T @ Q - np.eye(self.d))) > 1e-10:
            raise BodyError("rotation must be orthogonal")
        self.Q = Q
        if not p > 1.0:
            raise BodyError("p must exceed 1")
        self.p = float(p)
        self.q = self.p / (self.p - 1.0)
        self.label = label
        self.smooth = True
        self.strictly_convex = True

    @property
    def is_ellipsoid(self) -> bool:
        return self.p == 2.0

    @property
    def shape_matrix(self) -> np.ndarray:
        """``M`` with ``h(u) = <c,u> + sqrt(u^T M u)`` (ellipsoids only)."""
        return self.Q @ np.diag(self.a ** 2) @ self.Q.T

    def _support(self, U):
        W = (U @ self.Q) * self.a
        if self.p == 2.0:
            nw = np.linalg.norm(W, axis=1)
            Y = W / nw[:, None]
        else:
            q = self.q
            nw = np.sum(np.abs(W) ** q, axis=1) ** (1.0 / q)
            Y = np.sign(W) * (np.abs(W) / nw[:, None]) ** (q - 1.0)
        S = self.c + (Y * self.a) @ self.Q.T
        return U @ self.c + nw, S

    def level(self, X):
        Y = ((np.asarray(X, dtype=float) - self.c) @ self.Q) / self.a
        if self.p == 2.0:
            return np.linalg.norm(Y, axis=-1)
        return np.sum(np.abs(Y) ** self.p, axis=-1) ** (1.0 / self.p)

    def normal(self, X):
        Y = ((np.atleast_2d(X) - self.c) @ self.Q) / self.a
        G = np.sign(Y) * np.abs(Y) ** (self.p - 1.0)
        N = (G / self.a) @ self.Q.T
        return N / np.linalg.norm(N, axis=1, keepdims=True)

    def interior_point(self):
        return self.c

    def radial(self, c, V):
        c = np.asarray(c, dtype=float)
        V = np.atleast_2d(np.asarray(V, dtype=float))
        if c.ndim == 1 and np.array_equal(c, self.c):
            return 1.0 / self.level(self.c + V)
        return super().radial(c, V)

    def transformed(self, T: Isometry) -> "LpBody":
        return LpBody(T(self.c), self.a, T.linear @ self.Q, self.p, label=self.label)

    def to_dict(self) -> dict:
        out = {"dim": self.d, "kind": "ellipsoid" if self.p == 2.0 else "lp_ball",
               "center": self.c.tolist(), "semi_axes": self.a.tolist(),
               "rotation": self.Q.tolist()}
        if self.p != 2.0:
            out["p"] = self.p
        return out


class Revolution(ConvexBody):
    """k-body of revolution ``{x : (z(x), |y(x)|) in G}``.

    ``z`` are coordinates along the (d-k)-dimensional core flat and ``y`` the
    coordinates in the k-dimensional fiber (its orthogonal complement).
    ``G`` is a convex body in E^{d-k+1} symmetric under ``rho -> -rho`` in its
    last coordinate; its upper boundary is the radius profile over the core.
    """

    def __init__(self, core: Flat, generator: ConvexBody, profile: dict | None = None,
                 label: str | None = None):
        self.core = core
        self.d = core.d
        self.k = core.d - core.dim
        if not 1 <= self.k < self.d:
            raise BodyError("fiber dimension k must satisfy 1 <= k < d")
        if generator.d != core.dim + 1:
            raise BodyError("generator must live in E^(d-k+1)")
        self.G = generator
        self.C = core.basis
        self.F = complement_basis(core.basis, core.d)
        self.o = core.base
        self.profile = profile
        self.label = label
        self.smooth = generator.smooth
        self.strictly_convex = generator.strictly_convex

    @property
    def fiber(self) -> np.ndarray:
        return self.F

    def _split(self, X):
        Y = np.asarray(X, dtype=float) - self.o
        return Y @ self.C.T, Y @ self.F.T

    def _support(self, U):
        uz, uy = U @ self.C.T, U @ self.F.T
        nu = np.linalg.norm(uy, axis=1)
        hg, Sg = self.G._support(np.column_stack([uz, nu]))
        rho = np.abs(Sg[:, -1])
        with np.errstate(invalid="ignore", divide="ignore"):
            ydir = np.where(nu[:, None] > 0, uy / nu[:, None], 0.0)
        S = self.o + Sg[:, :-1] @ self.C + (rho[:, None] * ydir) @ self.F
        return U @ self.o + hg, S

    def level(self, X):
        z, y = self._split(X)
        r = np.linalg.norm(y, axis=-1)
        return self.G.level(np.concatenate([z, r[..., None]], axis=-1))

    def normal(self, X):
        X = np.atleast_2d(X)
        z, y = self._split(X)
        r = np.linalg.norm(y, axis=1)
        Ng = self.G.normal(np.column_stack([z, r]))
        with np.errstate(invalid="ignore", divide="ignore"):
            ydir = np.where(r[:, None] > 0, y / r[:, None], 0.0)
        N = Ng[:, :-1] @ self.C + (Ng[:, -1:] * ydir) @ self.F
        return N / np.linalg.norm(N, axis=1, keepdims=True)

    def interior_point(self):
        g = self.G.interior_point()
        return self.o + g[:-1] @ self.C

    def transformed(self, T: Isometry) -> "Revolution":
        return Revolution(self.core.transformed(T), self.G, self.profile, label=self.label)

    def to_dict(self) -> dict:
        if self.profile is None:
            raise BodyError("revolution body without a serializable profile")
        return {"dim": self.d, "kind": "revolution", "k": self.k,
                "axis_frame": self.core.to_dict(), "profile": self.profile}


# ---------------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------------

def support(K: ConvexBody, u):
    """Support value and an attaining point."""
    return K.support(u)


def apply_isometry(K: ConvexBody, T: Isometry) -> ConvexBody:
    if K.d != T.d:
        raise DimensionError("isometry and body dimensions differ")
    return K.transformed(T)


def body_mismatch(K1: ConvexBody, K2: ConvexBody, tol: Tolerance = DEFAULT_TOL,
                  n_witness: int = 3):
    """Worst mismatch between two bodies and the witnesses where it occurs.

    Polytope pairs are compared by a two-sided nearest-vertex matching; all
    other pairs by the sup of the support difference over the direction sample.
    Returns ``(residual, witnesses)`` with witnesses ``[(vector, mismatch), ...]``.
    """
    if K1.d != K2.d:
        raise DimensionError("bodies live in different dimensions")
    if isinstance(K1, Polytope) and isinstance(K2, Polytope):
        V1, V2 = K1.vertices, K2.vertices
        d12, _ = cKDTree(V2).query(V1)
        d21, _ = cKDTree(V1).query(V2)
        res = float(max(d12.max(), d21.max()))
        order = np.argsort(-d12)[:n_witness]
        return res, [(V1[i].tolist(), float(d12[i])) for i in order]
    U = tol.directions(K1.d)
    diff = np.abs(K1.h(U) - K2.h(U))
    order = np.argsort(-diff)[:n_witness]
    return float(diff.max()), [(U[i].tolist(), float(diff[i])) for i in order]


def bodies_equal(K1: ConvexBody, K2: ConvexBody, tol: Tolerance = DEFAULT_TOL) -> bool:
    res, _ = body_mismatch(K1, K2, tol)
    return res <= tol.abs * max(1.0, K1.circumradius)


# ---------------------------------------------------------------------------------
# minimum enclosing ball
# ---------------------------------------------------------------------------------

def _circumsphere(P: np.ndarray):
    """Smallest sphere through all rows of ``P`` (center in their affine hull)."""
    p0 = P[0]
    if len(P) == 1:
        return p0.copy(), 0.0
    D = P[1:] - p0
    G = D @ D.T
    rhs = 0.5 * np.sum(D * D, axis=1)
    if np.linalg.matrix_rank(G, tol=1e-12 * max(1.0, np.max(np.abs(G)))) < len(D):
        return None
    lam = np.linalg.solve(G, rhs)
    c = p0 + lam @ D
    return c, float(np.max(np.linalg.norm(P - c, axis=1)))


def _small_meb(P: np.ndarray, must: int | None = None):
    """Exact MEB of at most d+2 points by enumeration of support subsets."""
    n, d = P.shape
    scale = max(1.0, float(np.max(np.abs(P))))
    best = None
    for size in range(1, min(n, d + 1) + 1):
        for sub in itertools.combinations(range(n), size):
            if must is not None and must not in sub:
                continue
            cs = _circumsphere(P[list(sub)])
            if cs is None:
                continue
            c, r = cs
            if np.all(np.linalg.norm(P - c, axis=1) <= r + 1e-12 * scale):
                if best is None or r < best[1] - 1e-15 * scale:
                    best = (c, r, list(sub))
    if best is None:
        raise RuntimeError("no enclosing ball found among support subsets")
    return best


def meb_points(P) -> tuple[np.ndarray, float]:
    """Minimum enclosing ball of a point cloud.

    Active-set iteration: keep at most d+1 support points, add the farthest
    outside point, re-solve exactly on the small set. The radius strictly
    increases, so the loop terminates.
    """
    P = np.asarray(P, dtype=float)
    if len(P) == 1:
        return P[0].copy(), 0.0
    scale = max(1.0, float(np.max(np.abs(P))))
    far = int(np.argmax(np.linalg.norm(P - P[0], axis=1)))
    S = [0, far] if far != 0 else [0]
    for _ in range(10_000):
        c, r, sub = _small_meb(P[S])
        S = [S[i] for i in sub]
        dist = np.linalg.norm(P - c, axis=1)
        j = int(np.argmax(dist))
        if dist[j] <= r + 1e-12 * scale or j in S:
            return c, r
        S = S + [j]
    raise RuntimeError("minimum enclosing ball did not converge")


def _farthest_direction(K: ConvexBody, c: np.ndarray, u0: np.ndarray) -> np.ndarray:
    """Local maximizer of ``h(u) - <c, u>`` on the sphere (farthest point of K from c)."""
    def neg(v):
        nv = np.linalg.norm(v)
        u = v / nv
        val, s = K.support(u)
        g = s - c
        g = (g - (g @ u) * u) / nv
        return -(val - u @ c), -g

    res = minimize(neg, u0, jac=True, method="L-BFGS-B", options={"maxiter": 100, "ftol": 1e-16, "gtol": 1e-14})
    return res.x / np.linalg.norm(res.x)


def minimum_enclosing_ball(K: ConvexBody, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Circumsphere (center, radius) of a body.

    Polytopes use their vertices. Oracles start from support points over the
    direction sample and add locally maximized farthest support points until
    the radius stabilizes.
    """
    if isinstance(K, Polytope):
        return meb_points(K.vertices)
    U = tol.directions(K.d)
    _, S = K.support(U)
    pts = S
    c, r = meb_points(pts)
    for _ in range(6):
        f = K.h(U) - U @ c
        extra = [K.support(_farthest_direction(K, c, U[i]))[1] for i in np.argsort(-f)[:3]]
        pts = np.vstack([pts, extra])
        c2, r2 = meb_points(pts)
        done = abs(r2 - r) <= 1e-13 * max(1.0, r)
        c, r = c2, r2
        if done:
            break
    return c, r


# ---------------------------------------------------------------------------------
# sections
# ---------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SectionBody:
    """A section ``carrier ∩ K`` expressed in the orthonormal chart of the carrier."""

    carrier: Flat
    body: ConvexBody

    @property
    def dim(self) -> int:
        return self.carrier.dim

    def to_chart(self, X) -> np.ndarray:
        return self.carrier.to_chart(X)

    def to_ambient(self, Y) -> np.ndarray:
        return self.carrier.from_chart(Y)


class SectionOracle(ConvexBody):
    """Section of an oracle body, in chart coordinates of the carrier flat.

    Support values come from ``h_{K∩Λ}(v) = min_w h_K(v + w) - <w, o>`` over
    ``w`` normal to the carrier, a smooth convex problem in at most d-1
    variables solved by BFGS.
    """

    def __init__(self, parent: ConvexBody, carrier: Flat, interior: np.ndarray):
        self.parent, self.carrier = parent, carrier
        self.d = carrier.dim
        self.label = None
        self.smooth = parent.smooth
        self.strictly_convex = parent.strictly_convex
        self._c = interior
        self._W = carrier.normals

    def level(self, Y):
        return self.parent.level(self.carrier.from_chart(Y))

    def interior_point(self):
        return self._c

    @cached_property
    def _outer_radius(self) -> float:
        p = self.carrier.from_chart(self._c)
        return self.parent._outer_radius + float(np.linalg.norm(p - self.parent.interior_point()))

    def _support(self, V):
        o = self.carrier.base
        W = self._W
        hs, S = [], []
        for v in V:
            u = v @ self.carrier.basis

            def f(w, u=u):
                x = u + w @ W
                val, s = self.parent.support(x)
                return val - (w @ W) @ o, W @ (s - o)

            res = minimize(f, np.zeros(W.shape[0]), jac=True, method="BFGS",
                           options={"gtol": 1e-12, "maxiter": 200})
            x = u + res.x @ W
            _, s = self.parent.support(x)
            hs.append(res.fun)
            S.append(self.carrier.to_chart(s))
        return np.array(hs), np.array(S)

    def normal(self, Y):
        X = self.carrier.from_chart(np.atleast_2d(Y))
        N = self.parent.normal(X) @ self.carrier.basis.T
        return N / np.linalg.norm(N, axis=1, keepdims=True)

    def transformed(self, T: Isometry) -> ConvexBody:
        return TransformedBody(self, T)


def _polytope_section(K: Polytope, flat: Flat, tol: float):
    B, o = flat.basis, flat.base
    Ac = K.A @ B.T
    rc = K.b - K.A @ o
    norms = np.linalg.norm(Ac, axis=1)
    flatrows = norms <= 1e-12
    if np.any(rc[flatrows] < -tol):
        return None
    Ac, rc, norms = Ac[~flatrows], rc[~flatrows], norms[~flatrows]
    k = flat.dim
    if k == 1:
        a = Ac[:, 0]
        hi = np.min(rc[a > 0] / a[a > 0])
        lo = np.max(rc[a < 0] / a[a < 0])
        if hi - lo <= tol:
            return None
        return Polytope(np.array([[lo], [hi]]))
    res = linprog(np.r_[np.zeros(k), -1.0], A_ub=np.column_stack([Ac, norms]), b_ub=rc,
                  bounds=[(None, None)] * k + [(0, None)], method="highs")
    if res.status != 0 or -res.fun <= tol:
        return None
    inner = res.x[:k]
    hs = HalfspaceIntersection(np.column_stack([Ac, -rc]), inner)
    return Polytope(hs.intersections)


def section(K: ConvexBody, flat: Flat, tol: Tolerance = DEFAULT_TOL) -> SectionBody | None:
    """The section ``flat ∩ K`` in the carrier's chart, or ``None`` when empty."""
    if not 1 <= flat.dim <= K.d - 1:
        raise DimensionError("section flat must have dimension between 1 and d-1")
    t = tol.abs * K.scale
    if isinstance(K, Polytope):
        body = _polytope_section(K, flat, t)
        return None if body is None else SectionBody(flat, body)
    start = flat.to_chart(K.interior_point())
    f = lambda y: float(K.level(flat.from_chart(y)))
    res = minimize(f, start, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    if res.fun >= 1.0 - 1e-9:
        return None
    return SectionBody(flat, SectionOracle(K, flat, res.x))


def boundary_points(S: ConvexBody, center, n: int | None = None, tol: Tolerance = DEFAULT_TOL):
    """Boundary points hit by rays from ``center`` along a quasi-uniform direction set."""
    V = symmetric_directions(S.d, n or tol.n_directions(S.d))
    t = S.radial(center, V)
    return np.asarray(center) + t[:, None] * V, V


# ---------------------------------------------------------------------------------
# shadow boundaries
# ---------------------------------------------------------------------------------

def _cone_meets_orthogonal(normals: np.ndarray, G: np.ndarray) -> bool:
    """Does ``cone(normals)`` contain a nonzero vector orthogonal to ``span(G)``?"""
    if normals.shape[0] == 0:
        return False
    M = G @ normals.T
    if normals.shape[0] == 1:
        return bool(np.max(np.abs(M)) <= 1e-9)
    A_eq = np.vstack([M, np.ones(normals.shape[0])])
    b_eq = np.r_[np.zeros(M.shape[0]), 1.0]
    res = linprog(np.zeros(normals.shape[0]), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * normals.shape[0], method="highs")
    return res.status == 0


class ShadowBoundary:
    """Membership predicate for the shadow boundary ``S∂(K, Γ)``.

    A boundary point belongs to it when some outward normal at the point is
    orthogonal to the direction space of ``Γ`` (a supporting flat parallel to
    ``Γ`` passes through it). ``contains`` returns ``True``, ``False`` or
    ``None`` (undecidable: a non-smooth point of a non-polytope oracle).
    """

    def __init__(self, K: ConvexBody, gamma: Flat, tol: Tolerance = DEFAULT_TOL):
        if not 1 <= gamma.dim <= K.d - 1:
            raise DimensionError("shadow boundary needs 1 <= dim Γ <= d-1")
        self.K, self.gamma, self.tol = K, gamma, tol

    @cached_property
    def faces(self) -> list[Face]:
        if not isinstance(self.K, Polytope):
            raise TypeError("face listing is available for polytopes only")
        G = self.gamma.basis
        return [f for f in self.K.faces if _cone_meets_orthogonal(self.K.A[sorted(f.facets)], G)]

    def contains(self, X) -> list:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        K, G = self.K, self.gamma.basis
        t = self.tol.abs * K.scale
        if isinstance(K, Polytope):
            R = X @ K.A.T - K.b
            out = []
            for r in R:
                if np.any(r > t) or not np.any(np.abs(r) <= t):
                    out.append(False)
                    continue
                out.append(_cone_meets_orthogonal(K.A[np.abs(r) <= t], G))
            return out
        on_bd = np.abs(K.level(X) - 1.0) <= 1e-7
        if not K.smooth:
            return [None if b else False for b in on_bd]
        N = K.normal(X)
        viol = np.max(np.abs(N @ G.T), axis=1)
        return [bool(b and v <= max(self.tol.abs, 1e-9)) for b, v in zip(on_bd, viol)]

    def violation(self, X) -> np.ndarray:
        """``max_g |<n(x), g>|`` over basis directions of Γ (smooth bodies)."""
        N = self.K.normal(np.atleast_2d(X))
        return np.max(np.abs(N @ self.gamma.basis.T), axis=1)


def shadow_boundary(K: ConvexBody, gamma: Flat, tol: Tolerance = DEFAULT_TOL) -> ShadowBoundary:
    return ShadowBoundary(K, gamma, tol)


def is_segment_free(K: ConvexBody, gamma: Flat, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True when ``S∂(K, Γ)`` contains no segment parallel to ``Γ``."""
    G = gamma.basis
    if isinstance(K, Polytope):
        for f in shadow_boundary(K, gamma, tol).faces:
            if f.dim == 0:
                continue
            idx = sorted(f.vertices)
            D = orthonormalize(K.vertices[idx[1:]] - K.vertices[idx[0]])
            if np.linalg.matrix_rank(np.vstack([D, G]), tol=1e-9) < D.shape[0] + G.shape[0]:
                return False
        return True
    if K.strictly_convex:
        return True
    # probe: directions orthogonal to Γ, test a short segment along Γ at the support point
    W = gamma.normals
    V = symmetric_directions(W.shape[0], 256 if W.shape[0] > 1 else 2)
    U = V @ W
    _, S = K.support(U)
    step = 1e-3 * K.scale
    for g in G:
        lv = np.minimum(K.level(S + step * g), K.level(S - step * g))
        if np.any(lv <= 1.0 + 1e-12):
            return False
    return True


def is_strictly_convex(K: ConvexBody, tol: Tolerance = DEFAULT_TOL, n: int = 512) -> bool:
    """Probe: no sampled support direction is attained along a boundary segment."""
    if isinstance(K, Polytope):
        return False
    if K.strictly_convex:
        return True
    rng = tol.rng(101)
    U = symmetric_directions(K.d, n)
    _, S = K.support(U)
    step = 1e-3 * K.scale
    for u, s in zip(U, S):
        w = rng.standard_normal(K.d)
        w -= (w @ u) * u
        w /= np.linalg.norm(w)
        if K.level(s + step * w) <= 1.0 + 1e-12 or K.level(s - step * w) <= 1.0 + 1e-12:
            return False
    return True


# ---------------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------------

def make_cube(d: int = 3, half: float = 1.0, center=None) -> Polytope:
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    V = np.array(list(itertools.product([-half, half], repeat=d))) + c
    return Polytope(V, label=f"cube{d}")


def make_regular_polygon(n: int, radius: float = 1.0, phase: float = 0.0) -> Polytope:
    t = phase + 2.0 * np.pi * np.arange(n) / n
    return Polytope(radius * np.column_stack([np.cos(t), np.sin(t)]), label=f"{n}-gon")


def make_ball(d: int = 3, radius: float = 1.0, center=None) -> LpBody:
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    return LpBody(c, np.full(d, float(radius)), label="ball")


def make_ellipsoid(center, semi_axes, rotation=None) -> LpBody:
    return LpBody(center, semi_axes, rotation, p=2.0, label="ellipsoid")


def make_lp_body(center, semi_axes, rotation=None, p: float = 4.0) -> LpBody:
    return LpBody(center, semi_axes, rotation, p=p, label=f"lp{p:g}")


def _profile_generator(profile: dict, m: int) -> ConvexBody:
    kind = profile.get("kind")
    if kind == "table":
        T = np.asarray(profile["samples"], dtype=float)
        if T.ndim != 2 or T.shape[1] != m + 1:
            raise BodyError(f"profile samples must have {m} core coordinates plus a radius")
        if np.any(T[:, -1] <= 0):
            raise BodyError("profile radius must be positive")
        pts = np.vstack([T, T * np.r_[np.ones(m), -1.0]])
        try:
            return Polytope(pts)
        except BodyError as exc:
            raise BodyError(f"profile table spans no body: {exc}") from None
    if kind == "lp":
        axes = np.asarray(profile["semi_axes"], dtype=float).reshape(-1)
        if axes.shape[0] != m:
            raise BodyError(f"lp profile needs {m} core semi-axes")
        r = float(profile["radius"])
        if r <= 0 or np.any(axes <= 0):
            raise BodyError("profile radius and semi-axes must be positive")
        return LpBody(np.zeros(m + 1), np.r_[axes, r], p=float(profile.get("p", 2.0)))
    raise BodyError(f"unknown profile kind {kind!r}")


def make_k_body_of_revolution(d: int, k: int, core: Flat, profile: dict,
                              label: str | None = None) -> Revolution:
    """Body whose sections by k-flats parallel to the fiber are (k-1)-spheres centred on ``core``.

    ``core`` is the (d-k)-flat carrying the centres. ``profile`` is either
    ``{"kind": "table", "samples": [[z_1..z_{d-k}, r], ...]}`` (the body is
    generated by the hull of ``(z, ±r)``, so the effective profile is the
    concave envelope of the table) or ``{"kind": "lp", "semi_axes": [...],
    "radius": r, "p": p}`` (``sum |z_i/a_i|^p + (|y|/r)^p <= 1``).
    """
    if not 1 <= k < d:
        raise BodyError("need 1 <= k < d")
    if core.d != d or core.dim != d - k:
        raise BodyError(f"core must be a {d - k}-flat in E^{d}")
    G = _profile_generator(profile, d - k)
    return Revolution(core, G, dict(profile), label=label or f"rev{k}")


def group_closure(generators, max_size: int = 20000, tol: float = 1e-9) -> list[Isometry]:
    """All products of the generators (finite groups only; capped at ``max_size``)."""
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    d = gens[0].d
    elems = [Isometry.identity(d)]
    keys = {_iso_key(elems[0], tol)}
    frontier = list(elems)
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = s @ g
                key = _iso_key(h, tol)
                if key not in keys:
                    keys.add(key)
                    elems.append(h)
                    nxt.append(h)
                    if len(elems) > max_size:
                        raise BodyError("group closure exceeded max_size (group infinite?)")
        frontier = nxt
    return elems


def _iso_key(T: Isometry, tol: float):
    return tuple(np.round(np.r_[T.linear.ravel(), T.shift] / tol).astype(np.int64) // 10)


def common_fixed_point(group, tol: float = 1e-8):
    A = np.vstack([T.linear - np.eye(T.d) for T in group])
    b = -np.concatenate([T.shift for T in group])
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    res = float(np.max(np.abs(A @ x - b))) if len(b) else 0.0
    return x, res


def orbit(points, group) -> np.ndarray:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    return np.vstack([T(P) for T in group])


def make_symmetric_polytope(seed_points, group, close: bool = True, tol: float = 1e-9,
                            label: str | None = None) -> Polytope:
    """Hull of the orbit of ``seed_points`` under ``group``.

    With ``close`` the group is first completed from the given elements.
    Raises :class:`BodyError` when the elements fix no common point.
    """
    group = list(group)
    _, res = common_fixed_point(group)
    if res > 1e-8:
        raise BodyError("group elements do not fix a common point")
    if close:
        group = group_closure(group)
    return Polytope(orbit(seed_points, group), label=label or "symmetric")


def make_random_polytope(seed: int, n: int = 12, d: int = 3, radius: float = 1.0) -> Polytope:
    rng = np.random.default_rng(seed)
    P = rng.standard_normal((n, d))
    P *= radius * rng.uniform(0.5, 1.0, size=(n, 1)) / np.linalg.norm(P, axis=1, keepdims=True)
    return Polytope(P, label=f"random{seed}")


# ---------------------------------------------------------------------------------
# JSON body format
# ---------------------------------------------------------------------------------

def body_to_dict(K: ConvexBody) -> dict:
    return K.to_dict()


def body_from_dict(data: dict) -> ConvexBody:
    try:
        kind = data["kind"]
        d = int(data["dim"])
        if kind == "polytope":
            V = np.asarray(data["vertices"], dtype=float)
            if V.ndim != 2 or V.shape[1] != d:
                raise BodyError("vertex rows must have length dim")
            return Polytope(V)
        if kind in ("ellipsoid", "lp_ball"):
            rot = data.get("rotation")
            K = LpBody(data["center"], data["semi_axes"], None if rot is None else np.asarray(rot, dtype=float),
                       p=2.0 if kind == "ellipsoid" else float(data["p"]))
            if K.d != d:
                raise BodyError("center length must equal dim")
            return K
        if kind == "revolution":
            core = Flat.from_dict(data["axis_frame"])
            if core.d != d:
                raise BodyError("axis_frame dimension mismatch")
            return make_k_body_of_revolution(d, int(data["k"]), core, data["profile"])
    except (KeyError, TypeError) as exc:
        raise BodyError(f"malformed body JSON: {exc}") from None
    raise BodyError(f"unknown body kind {data.get('kind')!r}")
