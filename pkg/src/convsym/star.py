"""Stars of lines: orbits of two concurrent lines under iterated half-turns.

Within the plane spanned by ``L1`` and ``L2`` the half-turn about a line at
angle ``beta`` sends a line at angle ``alpha`` to ``2 beta - alpha``, so the
orbit is ``alpha_k = (k - 1) theta (mod pi)``. Lines are unoriented and all
angles are taken mod ``pi``: an n-star here means n distinct coplanar lines
with consecutive spacing ``pi / n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .geometry import Flat, affine_hull

EPS_DENSE = np.pi / 1024
Q_MAX = 64
# 1/pi has the convergent 113/355, so the orbit of theta = 1 rad keeps a gap
# near pi/355 until roughly 3.3e4 steps; 1e5 steps bring it below pi/1024.
DENSE_ITER = 100_000
RATIONAL_TOL = 1e-9


class StarError(ValueError):
    """Lines that do not span a star (parallel, skew or identical)."""


@dataclass(frozen=True)
class StarClass:
    """``kind`` is ``"nstar"``, ``"dense"`` or ``"undecided"``; ``n`` is set for n-stars."""

    kind: str
    n: int | None = None
    max_gap: float | None = None

    def __str__(self) -> str:
        if self.kind == "nstar":
            return f"NStar({self.n})"
        return self.kind.capitalize()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "max_gap": self.max_gap}


@dataclass(frozen=True, eq=False)
class Star:
    apex: np.ndarray
    plane: Flat
    angles: np.ndarray
    classification: StarClass
    generator_angle: float
    iterations: int = 0

    def line(self, i: int) -> Flat:
        e1, f2 = self.plane.basis[0], self.plane.basis[1]
        a = self.angles[i]
        return Flat.line(self.apex, np.cos(a) * e1 + np.sin(a) * f2)

    @property
    def lines(self) -> list[Flat]:
        """The star's lines as flats (built on demand; dense stars are long)."""
        return [self.line(i) for i in range(len(self.angles))]

    def sorted_angles(self) -> np.ndarray:
        return np.sort(np.mod(self.angles, np.pi))

    def to_dict(self) -> dict:
        return {
            "apex": self.apex.tolist(),
            "plane": self.plane.to_dict(),
            "classification": self.classification.to_dict(),
            "generator_angle": self.generator_angle,
            "iterations": self.iterations,
            "angles": self.sorted_angles().tolist(),
        }


def circular_gaps(angles, period: float = np.pi) -> np.ndarray:
    """Consecutive gaps of a point set on the circle ``R / period Z``."""
    a = np.sort(np.mod(np.asarray(angles, dtype=float), period))
    if a.size == 0:
        return np.array([period])
    return np.diff(np.r_[a, a[0] + period])


def star_orbit(theta: float, max_iter: int, tol: float = RATIONAL_TOL):
    """Run the recurrence ``alpha -> 2 beta - alpha (mod pi)`` from ``(0, theta)``.

    Returns ``(angles, closed)``; ``closed`` is True when a line recurs, in
    which case ``angles`` holds exactly the distinct lines of the orbit.
    Since ``alpha_k = k theta (mod pi)``, the first revisit happens after the
    smallest ``m`` with ``m theta`` within ``tol`` of a multiple of ``pi``;
    that index is located in closed form and the recurrence is run up to it
    (``tol <= 0`` disables revisit detection).
    """
    theta = float(np.mod(theta, np.pi))
    n = max_iter + 2
    closed = False
    if tol > 0:
        m = np.arange(1, n + 1, dtype=float) * (theta / np.pi)
        hit = np.flatnonzero(np.abs(m - np.rint(m)) * np.pi <= tol)
        if hit.size:
            n, closed = int(hit[0]) + 1, True
    out = np.empty(n)
    out[0] = a0 = 0.0
    if n > 1:
        out[1] = a1 = theta
        for i in range(2, n):
            a0, a1 = a1, (2.0 * a1 - a0) % np.pi
            out[i] = a1
    return out, closed


def _convergents(x: float, q_max: int):
    """Continued-fraction convergents ``p/q`` of ``x`` with ``q <= q_max``."""
    h0, h1, k0, k1 = 0, 1, 1, 0
    y = x
    for _ in range(64):
        a = int(np.floor(y))
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > q_max:
            return
        yield h1, k1
        frac = y - a
        if frac < 1e-15:
            return
        y = 1.0 / frac


def classify_star(theta: float, tol: float = RATIONAL_TOL, q_max: int = Q_MAX,
                  eps_dense: float = EPS_DENSE, n_iter: int = DENSE_ITER) -> StarClass:
    """Classify the star generated by two lines at angle ``theta``.

    A convergent ``p/q`` of ``theta / pi`` within ``tol`` with ``q <= q_max``
    gives an n-star whose order is confirmed by simulating the orbit.
    Otherwise the orbit is run for ``n_iter`` steps and called dense when its
    largest angular gap falls below ``eps_dense``.
    """
    if not 0.0 < theta < np.pi:
        raise StarError("theta must lie in (0, pi)")
    x = theta / np.pi
    for p, q in _convergents(x, q_max):
        if abs(x - p / q) < tol:
            angles, closed = star_orbit(theta, 4 * q, tol=max(tol * np.pi * 4 * q, 1e-12))
            if closed:
                n = len(angles)
                return StarClass("nstar", n, float(circular_gaps(angles).max()))
            return StarClass("nstar", q // gcd(p, q), np.pi / q)
    angles, closed = star_orbit(theta, n_iter, tol=0.0)
    gap = float(circular_gaps(angles).max())
    if gap < eps_dense:
        return StarClass("dense", None, gap)
    return StarClass("undecided", None, gap)


def _star_frame(L1: Flat, L2: Flat, tol: float):
    if L1.dim != 1 or L2.dim != 1 or L1.d != L2.d:
        raise StarError("a star needs two lines in the same space")
    e1, e2 = L1.direction, L2.direction
    A = np.column_stack([e1, -e2])
    ts, *_ = np.linalg.lstsq(A, L2.base - L1.base, rcond=None)
    p1 = L1.base + ts[0] * e1
    p2 = L2.base + ts[1] * e2
    scale = max(1.0, float(np.linalg.norm(L1.base)), float(np.linalg.norm(L2.base)))
    s = float(np.linalg.norm(e2 - (e1 @ e2) * e1))
    if s <= tol:
        raise StarError("lines are parallel or identical")
    if np.linalg.norm(p1 - p2) > tol * scale * 1e3:
        raise StarError("lines are skew: no common point")
    apex = 0.5 * (p1 + p2)
    f2 = (e2 - (e1 @ e2) * e1) / s
    theta = float(np.mod(np.arctan2(e2 @ f2, e2 @ e1), np.pi))
    plane = Flat(apex, np.vstack([e1, f2]))
    return apex, plane, theta


def build_star(L1: Flat, L2: Flat, max_iter: int = DENSE_ITER, tol: float = RATIONAL_TOL) -> Star:
    """Star ``Sigma(L1, L2)`` by direct iteration of the half-turn recurrence.

    The iteration stops at the first revisited line (a finite star). If the
    orbit does not close within ``max_iter`` steps it is handed to
    :func:`classify_star`.
    """
    apex, plane, theta = _star_frame(L1, L2, tol)
    angles, closed = star_orbit(theta, max_iter, tol)
    if closed:
        gaps = circular_gaps(angles)
        n = len(angles)
        equal = np.allclose(gaps, np.pi / n, atol=max(tol, 1e-12) * n)
        cls = StarClass("nstar", n, float(gaps.max())) if equal else StarClass("undecided", None, float(gaps.max()))
    else:
        cls = classify_star(theta, tol=tol, n_iter=max_iter)
    return Star(apex, plane, angles, cls, theta, iterations=len(angles))


def star_from_angle(theta: float, max_iter: int = DENSE_ITER, tol: float = RATIONAL_TOL) -> Star:
    """Star of the lines at angles ``0`` and ``theta`` through the origin of E^2."""
    L1 = Flat.line([0.0, 0.0], [1.0, 0.0])
    L2 = Flat.line([0.0, 0.0], [np.cos(theta), np.sin(theta)])
    return build_star(L1, L2, max_iter, tol)


def star_from_lines(lines, apex, plane: Flat | None = None, tol: float = 1e-9) -> Star:
    """Wrap an explicit family of concurrent coplanar lines (e.g. mirror lines) as a Star."""
    lines = list(lines)
    apex = np.asarray(apex, dtype=float)
    if not lines:
        d = apex.shape[0]
        plane = plane or Flat(apex, np.eye(d)[:2])
        return Star(apex, plane, np.empty(0), StarClass("nstar", 0, np.pi), 0.0, 0)
    if plane is None:
        plane = affine_hull(*lines) if len(lines) > 1 else Flat(apex, np.vstack(
            [lines[0].direction, np.linalg.svd(lines[0].direction[None, :])[2][1]]))
    e1, f2 = plane.basis[0], plane.basis[1]
    angles = np.array([np.mod(np.arctan2(L.direction @ f2, L.direction @ e1), np.pi) for L in lines])
    gaps = circular_gaps(angles)
    n = len(lines)
    equal = bool(np.allclose(gaps, np.pi / n, atol=tol * 10 * n))
    cls = StarClass("nstar", n, float(gaps.max())) if equal else StarClass("undecided", None, float(gaps.max()))
    theta = float(np.min(gaps)) if n > 1 else 0.0
    return Star(apex, plane, np.sort(angles), cls, theta, 0)
