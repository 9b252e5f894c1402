"""Distances between closed sets: Hausdorff and the weighted Busemann metric.

``delta_p(M, N) = sup_x |d(x, M) - d(x, N)| * exp(-|x - p|)`` is defined for
unbounded closed sets (flats) as well; on bounded sets it is dominated by
the Hausdorff distance and induces the same convergence.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from .bodies import ConvexBody, LpBody, Polytope, _distance_by_support
from .geometry import DimensionError, Flat, orthonormalize, principal_angles
from .tolerance import DEFAULT_TOL, Tolerance, symmetric_directions


class UnboundedSetError(ValueError):
    """Hausdorff distance requested for an unbounded set."""


class ClosedSet:
    """A nonempty closed subset of E^d with an evaluable distance function."""

    d: int
    bounded: bool = True

    def distance(self, X) -> np.ndarray:
        raise NotImplementedError

    def samples(self, tol: Tolerance) -> np.ndarray:
        """Points of the set used as candidate maximizers of ``|d(x,M) - d(x,N)|``."""
        raise NotImplementedError

    def anchor(self) -> np.ndarray:
        raise NotImplementedError


class BodySet(ClosedSet):
    def __init__(self, body: ConvexBody):
        self.body = body
        self.d = body.d

    def distance(self, X, refine: bool = True) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        K = self.body
        if isinstance(K, Polytope):
            return K.distance(X)
        if isinstance(K, LpBody) and K.p == 2.0 and np.ptp(K.a) == 0.0:
            return np.maximum(np.linalg.norm(X - K.c, axis=1) - K.a[0], 0.0)
        if refine:
            return _distance_by_support(K, X)
        U = symmetric_directions(K.d, 2048)
        return np.maximum(np.max(X @ U.T - K.h(U), axis=1), 0.0)

    def samples(self, tol: Tolerance) -> np.ndarray:
        K = self.body
        if isinstance(K, Polytope):
            return K.vertices
        _, S = K.support(tol.directions(K.d))
        return S

    def anchor(self):
        return self.body.interior_point()


class FlatSet(ClosedSet):
    bounded = False

    def __init__(self, flat: Flat):
        self.flat = flat
        self.d = flat.d
        self.bounded = flat.dim == 0

    def distance(self, X, refine: bool = True) -> np.ndarray:
        return self.flat.distance(np.atleast_2d(np.asarray(X, dtype=float)))

    def samples(self, tol: Tolerance) -> np.ndarray:
        if not self.bounded:
            raise UnboundedSetError("flats of positive dimension are unbounded")
        return self.flat.base[None, :]

    def anchor(self):
        return self.flat.base


class PointSet(ClosedSet):
    def __init__(self, points):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.d = self.points.shape[1]
        self._tree = cKDTree(self.points)

    def distance(self, X, refine: bool = True) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self._tree.query(X)[0]

    def samples(self, tol: Tolerance) -> np.ndarray:
        return self.points

    def anchor(self):
        return self.points.mean(axis=0)


def as_closed_set(obj) -> ClosedSet:
    if isinstance(obj, ClosedSet):
        return obj
    if isinstance(obj, ConvexBody):
        return BodySet(obj)
    if isinstance(obj, Flat):
        return FlatSet(obj)
    return PointSet(obj)


def _support_hausdorff(K1: ConvexBody, K2: ConvexBody, tol: Tolerance) -> float:
    """``sup_u |h1(u) - h2(u)|`` over the sample, refined locally at the best directions."""
    U = tol.directions(K1.d)
    diff = np.abs(K1.h(U) - K2.h(U))
    best = float(diff.max())
    for i in np.argsort(-diff)[:4]:
        def neg(v):
            u = v / np.linalg.norm(v)
            return -abs(K1.h(u) - K2.h(u))
        res = minimize(neg, U[i], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
        best = max(best, -res.fun)
    return best


def hausdorff(M, N, tol: Tolerance = DEFAULT_TOL) -> float:
    """Hausdorff distance between two bounded closed sets.

    Convex bodies use the support-function identity; polytope pairs use the
    exact vertex-to-body distances (the farthest point of one polytope from
    the other is a vertex). Mixed inputs maximize ``|d(x,M) - d(x,N)|`` over
    sample points of both sets.
    """
    M, N = as_closed_set(M), as_closed_set(N)
    if M.d != N.d:
        raise DimensionError("sets live in different dimensions")
    if not (M.bounded and N.bounded):
        raise UnboundedSetError("Hausdorff distance needs bounded sets; use busemann_distance")
    if isinstance(M, BodySet) and isinstance(N, BodySet):
        K1, K2 = M.body, N.body
        if isinstance(K1, Polytope) and isinstance(K2, Polytope):
            return float(max(K2.distance(K1.vertices).max(), K1.distance(K2.vertices).max()))
        return _support_hausdorff(K1, K2, tol)
    X = np.vstack([M.samples(tol), N.samples(tol)])
    return float(np.max(np.abs(M.distance(X) - N.distance(X))))


@dataclass(frozen=True)
class BusemannResult:
    value: float
    error_bar: float
    argmax: np.ndarray
    cutoff: float

    def to_dict(self) -> dict:
        return {"value": self.value, "error_bar": self.error_bar,
                "argmax": self.argmax.tolist(), "cutoff": self.cutoff}


def _cube_grid(p: np.ndarray, R: float, n_points: int):
    """Centres and half-width of an odd cubic grid covering ``[p - R, p + R]^d``.

    The odd side count puts ``p`` itself on the grid.
    """
    d = p.shape[0]
    m = max(3, int(n_points ** (1.0 / d)))
    m += 1 - m % 2
    h = R / m
    ticks = (np.arange(m) - m // 2) * (2.0 * h)
    mesh = np.meshgrid(*([ticks] * d), indexing="ij")
    X = p + np.column_stack([g.ravel() for g in mesh])
    return X, h


_CHILD_OFFSETS: dict[int, np.ndarray] = {}


def _offsets(d: int) -> np.ndarray:
    if d not in _CHILD_OFFSETS:
        grid = np.meshgrid(*([[-1.0, 1.0]] * d), indexing="ij")
        _CHILD_OFFSETS[d] = np.column_stack([g.ravel() for g in grid])
    return _CHILD_OFFSETS[d]


def _split_many(X: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Centres of the ``2^d`` children of cubes with centres ``X`` and half-widths ``H``."""
    d = X.shape[1]
    return (X[:, None, :] + (H / 2.0)[:, None, None] * _offsets(d)[None, :, :]).reshape(-1, d)


def busemann_distance(p, M, N, cutoff: float = 30.0, n_grid: int = 100_000,
                      tol: Tolerance = DEFAULT_TOL, refine_starts: int = 8,
                      rel_target: float = 1e-3, budget: int | None = None) -> BusemannResult:
    """``delta_p(M, N)`` maximized over a grid in ``B(p, cutoff)`` with local refinement.

    The grid is a cubic lattice whose cells are refined branch-and-bound
    style: a cell of centre ``x``, distance ``t`` from ``p`` and covering
    radius ``rho`` cannot exceed ``(f(x) + 2 rho) exp(-(t - rho))`` because
    ``f = |d(., M) - d(., N)|`` is 2-Lipschitz. Cells whose bound beats the
    incumbent by more than the target are split until ``budget`` evaluations
    are spent.

    ``value`` is attained at ``argmax`` (a lower bound of the supremum) and
    ``error_bar`` bounds the gap to the true supremum: the largest surviving
    cell bound minus ``value`` plus the tail ``(C + 2R) e^{-R}`` of points
    beyond the cutoff, where ``C = |d(p,M) - d(p,N)|``.
    """
    p = np.asarray(p, dtype=float)
    M, N = as_closed_set(M), as_closed_set(N)
    if M.d != N.d or M.d != p.shape[0]:
        raise DimensionError("dimension mismatch")
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    d = p.shape[0]
    budget = 4 * n_grid if budget is None else budget

    def f(X, refine=False):
        X = np.atleast_2d(X)
        out = np.empty(len(X))
        for i in range(0, len(X), 8192):
            Y = X[i:i + 8192]
            out[i:i + 8192] = np.abs(M.distance(Y, refine=refine) - N.distance(Y, refine=refine))
        return out

    X, h0 = _cube_grid(p, cutoff, n_grid)
    X = X[np.linalg.norm(X - p, axis=1) - h0 * np.sqrt(d) <= cutoff]
    H = np.full(len(X), h0)
    C = float(f(p[None, :])[0])
    best_val, best_x = C, p.copy()
    spent = 0
    pool_X, pool_H, pool_B = np.empty((0, d)), np.empty(0), np.empty(0)
    while True:
        fx = f(X)
        t = np.linalg.norm(X - p, axis=1)
        vals = fx * np.exp(-t)
        spent += len(X)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_x = float(vals[j]), X[j].copy()
        rho = H * np.sqrt(d)
        B = (fx + 2.0 * rho) * np.exp(-np.maximum(t - rho, 0.0))
        pool_X, pool_H, pool_B = (np.vstack([pool_X, X]), np.concatenate([pool_H, H]),
                                  np.concatenate([pool_B, B]))
        target = best_val + max(rel_target * best_val, 1e-12)
        keep = pool_B > target
        pool_X, pool_H, pool_B = pool_X[keep], pool_H[keep], pool_B[keep]
        room = (budget - spent) // 2 ** d
        if len(pool_B) == 0 or room <= 0:
            break
        order = np.argsort(-pool_B)
        take, rest = order[:room], order[room:]
        X = _split_many(pool_X[take], pool_H[take])
        H = np.repeat(pool_H[take] / 2.0, 2 ** d)
        pool_X, pool_H, pool_B = pool_X[rest], pool_H[rest], pool_B[rest]
        inside = np.linalg.norm(X - p, axis=1) - H * np.sqrt(d) <= cutoff
        X, H = X[inside], H[inside]
    bound = pool_B if len(pool_B) else np.array([best_val])
    # local polish with exact distances from the best surviving cells
    g = lambda x: float(f(x, refine=True)[0] * np.exp(-np.linalg.norm(x - p)))
    starts = [best_x] + list(pool_X[np.argsort(-pool_B)[:refine_starts - 1]]) if len(pool_B) else [best_x]
    for x0 in starts:
        res = minimize(lambda x: -g(x), x0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 1000})
        if np.linalg.norm(res.x - p) <= cutoff and -res.fun > best_val:
            best_val, best_x = float(-res.fun), res.x
    disc = float(max(bound.max() - best_val, 0.0))
    tail = (C + 2.0 * cutoff) * np.exp(-cutoff) if cutoff >= 1.0 else C + 2.0
    return BusemannResult(best_val, disc + tail, best_x, float(cutoff))


def flat_gap(F1: Flat, F2: Flat, p) -> float:
    """Distance proxy between flats near ``p``: largest principal-angle sine plus base offset."""
    ang = principal_angles(F1.basis, F2.basis) if F1.dim else np.zeros(1)
    p = np.asarray(p, dtype=float)
    off = float(np.linalg.norm(F1.project(p) - F2.project(p)))
    return float(np.sin(ang.max()) if ang.size else 0.0) + off


def average_flat(flats, p) -> Flat:
    """Representative flat: top eigenvectors of the mean projector, through the mean foot of ``p``."""
    k = flats[0].dim
    p = np.asarray(p, dtype=float)
    base = np.mean([F.project(p) for F in flats], axis=0)
    if k == 0:
        return Flat.point(base)
    P = np.mean([F.basis.T @ F.basis for F in flats], axis=0)
    w, V = np.linalg.eigh(P)
    return Flat(base, orthonormalize(V[:, np.argsort(-w)[:k]].T))


def _sequence_limit(seq, tol: float, ratio: float):
    seq = list(seq)
    if not seq:
        raise ValueError("empty sequence")
    if len({F.dim for F in seq}) != 1 or len({F.d for F in seq}) != 1:
        raise DimensionError("all flats must share dimension and ambient space")
    if len(seq) == 1:
        return seq[0], True, [0]
    p = np.mean([F.base for F in seq[-max(2, len(seq) // 4):]], axis=0)
    steps = np.array([flat_gap(a, b, p) for a, b in zip(seq[:-1], seq[1:])])
    q = max(1, len(steps) // 4)
    head, tail = steps[:q], steps[-q:]
    converged = bool(np.all(tail <= tol) or tail.max() <= ratio * head.max())
    last = seq[-1]
    radius = max(steps[-1], tol)
    window = [i for i in range(len(seq) - q, len(seq)) if flat_gap(seq[i], last, p) <= radius]
    window = window or [len(seq) - 1]
    return average_flat([seq[i] for i in window], p), converged, window


def flat_sequence_limit(seq, tol: float = 1e-9, ratio: float = 0.25):
    """Detect convergence of a flat sequence and return ``(representative, converged)``.

    The sequence counts as converged when every step in its final quarter is
    below ``tol`` or at most ``ratio`` times the largest step of its first
    quarter (a contracting tail). The representative averages the final flats
    that lie within one final step of the last flat.
    """
    rep, converged, _ = _sequence_limit(seq, tol, ratio)
    return rep, converged


def flat_sequence_window(seq, tol: float = 1e-9, ratio: float = 0.25) -> list[int]:
    """Indices of the terminal flats that :func:`flat_sequence_limit` averages."""
    return _sequence_limit(seq, tol, ratio)[2]
