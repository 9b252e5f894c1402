"""Affine flats, isometries and the rotation/reflection constructors.

A :class:`Flat` is stored as a base point plus an orthonormal basis of its
direction space (``k = 0`` is a point, ``k = 1`` a line, ``k = d - 1`` a
hyperplane). An :class:`Isometry` is ``x -> A x + b`` with ``A`` orthogonal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tolerance import DEFAULT_TOL, Tolerance


class DimensionError(ValueError):
    """Raised when an object has the wrong dimension for an operation."""


class ContainmentError(ValueError):
    """Raised when a flat is required to lie inside another and does not."""


def orthonormalize(vectors, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of ``span(vectors)``.

    Modified Gram-Schmidt with one re-orthogonalization pass per vector.
    Vectors whose remainder falls below ``rtol`` times the largest input
    norm are dropped, so the result is rank revealing.
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    if V.size == 0:
        return np.zeros((0, V.shape[-1] if V.ndim == 2 else 0))
    scale = max(np.max(np.linalg.norm(V, axis=1)), 1e-300)
    out: list[np.ndarray] = []
    for v in V:
        w = v.copy()
        for _ in range(2):
            for q in out:
                w -= (q @ w) * q
        nw = np.linalg.norm(w)
        if nw > rtol * scale:
            out.append(w / nw)
    if not out:
        return np.zeros((0, V.shape[1]))
    return np.array(out)


def complement_basis(basis: np.ndarray, d: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(basis)``."""
    B = np.asarray(basis, dtype=float).reshape(-1, d)
    if B.shape[0] == 0:
        return np.eye(d)
    _, s, vt = np.linalg.svd(B, full_matrices=True)
    rank = int(np.sum(s > 1e-10 * max(s[0], 1e-300)))
    return vt[rank:].copy()


def principal_angles(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Principal angles (radians, ascending) between two row-basis subspaces.

    Computed from the sines of the projection residual so that tiny angles
    keep full relative precision.
    """
    Qu = orthonormalize(U)
    Qv = orthonormalize(V)
    if Qu.shape[0] > Qv.shape[0]:
        Qu, Qv = Qv, Qu
    if Qu.shape[0] == 0:
        return np.zeros(0)
    M = Qu @ Qv.T
    cos = np.linalg.svd(M, compute_uv=False)
    R = Qu - (Qu @ Qv.T) @ Qv
    sin = np.linalg.svd(R, compute_uv=False) if R.size else np.zeros(0)
    sin = np.sort(np.clip(sin, 0.0, 1.0))
    cos = np.sort(np.clip(cos, 0.0, 1.0))[::-1]
    ang = np.where(sin < 0.7, np.arcsin(sin), np.arccos(cos))
    return np.sort(ang)


@dataclass(frozen=True, eq=False)
class Flat:
    """Affine flat ``base + span(basis)`` with an orthonormal row basis."""

    base: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float).reshape(-1)
        d = base.shape[0]
        basis = np.asarray(self.basis, dtype=float).reshape(-1, d)
        if not np.all(np.isfinite(base)) or not np.all(np.isfinite(basis)):
            raise ValueError("flat coordinates must be finite")
        if basis.shape[0] > 0:
            G = basis @ basis.T
            if np.max(np.abs(G - np.eye(basis.shape[0]))) > 1e-14:
                basis = orthonormalize(basis)
        base.setflags(write=False)
        basis.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "basis", basis)

    # construction helpers
    @classmethod
    def point(cls, p) -> "Flat":
        p = np.asarray(p, dtype=float)
        return cls(p, np.zeros((0, p.shape[0])))

    @classmethod
    def line(cls, p, direction) -> "Flat":
        u = np.asarray(direction, dtype=float)
        n = np.linalg.norm(u)
        if n == 0:
            raise DimensionError("line direction must be nonzero")
        return cls(np.asarray(p, dtype=float), (u / n)[None, :])

    @classmethod
    def hyperplane(cls, p, normal) -> "Flat":
        p = np.asarray(p, dtype=float)
        n = np.asarray(normal, dtype=float)
        if np.linalg.norm(n) == 0:
            raise DimensionError("hyperplane normal must be nonzero")
        return cls(p, complement_basis(n[None, :], p.shape[0]))

    @classmethod
    def span(cls, p, directions) -> "Flat":
        p = np.asarray(p, dtype=float)
        return cls(p, orthonormalize(np.asarray(directions, dtype=float).reshape(-1, p.shape[0])))

    @classmethod
    def coordinate(cls, d: int, axes: Sequence[int], base=None) -> "Flat":
        """Flat through ``base`` (origin by default) spanned by coordinate axes."""
        base = np.zeros(d) if base is None else np.asarray(base, dtype=float)
        return cls(base, np.eye(d)[list(axes)])

    @property
    def d(self) -> int:
        return self.base.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def normals(self) -> np.ndarray:
        """Orthonormal basis of the orthogonal complement of the directions."""
        return complement_basis(self.basis, self.d)

    @property
    def direction(self) -> np.ndarray:
        if self.dim != 1:
            raise DimensionError("direction is defined for lines only")
        return self.basis[0]

    @property
    def normal(self) -> np.ndarray:
        if self.dim != self.d - 1:
            raise DimensionError("normal is defined for hyperplanes only")
        return self.normals[0]

    def project(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        Y = X - self.base
        return self.base + (Y @ self.basis.T) @ self.basis

    def distance(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.linalg.norm(X - self.project(X), axis=-1)

    def contains_point(self, X, tol: float = 1e-9) -> np.ndarray:
        return self.distance(X) <= tol

    def to_chart(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.base) @ self.basis.T

    def from_chart(self, Y) -> np.ndarray:
        return self.base + np.asarray(Y, dtype=float) @ self.basis

    def through(self, p) -> "Flat":
        """The parallel flat through ``p``."""
        return Flat(np.asarray(p, dtype=float), self.basis)

    def same_as(self, other: "Flat", tol: float = DEFAULT_TOL.flat) -> bool:
        if other.d != self.d or other.dim != self.dim:
            return False
        return contains(self, other, tol) and contains(other, self, tol)

    def transformed(self, T: "Isometry") -> "Flat":
        return Flat(T(self.base), self.basis @ T.linear.T)

    def __repr__(self) -> str:
        return f"Flat(dim={self.dim}, d={self.d}, base={np.round(self.base, 6).tolist()})"

    def to_dict(self) -> dict:
        return {"base": self.base.tolist(), "basis": self.basis.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Flat":
        base = np.asarray(data["base"], dtype=float)
        basis = np.asarray(data.get("basis", []), dtype=float).reshape(-1, base.shape[0])
        return cls(base, orthonormalize(basis) if basis.shape[0] else basis)


@dataclass(frozen=True, eq=False)
class Isometry:
    """``x -> linear @ x + shift`` with an orthogonal linear part."""

    linear: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        A = np.array(self.linear, dtype=float)
        b = np.array(self.shift, dtype=float).reshape(-1)
        if A.shape != (b.shape[0], b.shape[0]):
            raise DimensionError("linear part and shift disagree in dimension")
        if np.max(np.abs(A.T @ A - np.eye(A.shape[0]))) > 1e-12:
            raise ValueError("linear part is not orthogonal")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "linear", A)
        object.__setattr__(self, "shift", b)

    @classmethod
    def identity(cls, d: int) -> "Isometry":
        return cls(np.eye(d), np.zeros(d))

    @classmethod
    def fixing(cls, A, p) -> "Isometry":
        """Isometry with linear part ``A`` that fixes the point ``p``."""
        A = np.asarray(A, dtype=float)
        p = np.asarray(p, dtype=float)
        return cls(A, p - A @ p)

    @property
    def d(self) -> int:
        return self.shift.shape[0]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return X @ self.linear.T + self.shift

    def __matmul__(self, other: "Isometry") -> "Isometry":
        """Composition ``self o other``."""
        return Isometry(self.linear @ other.linear, self.linear @ other.shift + self.shift)

    def inverse(self) -> "Isometry":
        return Isometry(self.linear.T, -self.linear.T @ self.shift)

    def power(self, n: int) -> "Isometry":
        out = Isometry.identity(self.d)
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = base @ out
        return out

    def close_to(self, other: "Isometry", tol: float = 1e-10) -> bool:
        return (
            np.max(np.abs(self.linear - other.linear)) <= tol
            and np.max(np.abs(self.shift - other.shift)) <= tol
        )

    def to_dict(self) -> dict:
        return {"linear": self.linear.tolist(), "shift": self.shift.tolist()}


def translation(b) -> Isometry:
    b = np.asarray(b, dtype=float)
    return Isometry(np.eye(b.shape[0]), b)


def reflect_hyperplane(plane: Flat) -> Isometry:
    """Reflection across a hyperplane."""
    if plane.dim != plane.d - 1:
        raise DimensionError(f"expected a hyperplane, got a {plane.dim}-flat in E^{plane.d}")
    n = plane.normal
    A = np.eye(plane.d) - 2.0 * np.outer(n, n)
    return Isometry.fixing(A, plane.base)


def axis_involution(line: Flat) -> Isometry:
    """Identity on the line, ``x -> -x`` on its orthogonal complement."""
    if line.dim != 1:
        raise DimensionError(f"expected a line, got a {line.dim}-flat")
    e = line.direction
    A = 2.0 * np.outer(e, e) - np.eye(line.d)
    return Isometry.fixing(A, line.base)


def flat_involution(flat: Flat) -> Isometry:
    """Identity on ``flat``, negation on its orthogonal complement."""
    P = flat.basis.T @ flat.basis
    return Isometry.fixing(2.0 * P - np.eye(flat.d), flat.base)


def rotation_about_line(line: Flat, theta: float) -> Isometry:
    """Rotation of E^3 by ``theta`` about an oriented line (right-hand rule)."""
    if line.d != 3:
        raise DimensionError("rotation_about_line is defined in E^3 only")
    if line.dim != 1:
        raise DimensionError("rotation axis must be a line")
    k = line.direction
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    A = np.eye(3) + np.sin(theta) * K + (1.0 - np.cos(theta)) * (K @ K)
    # re-orthogonalize to keep A^T A = I at machine precision
    u, _, vt = np.linalg.svd(A)
    return Isometry.fixing(u @ vt, line.base)


def oriented_complement_plane(coaxis: Flat) -> np.ndarray:
    """Oriented orthonormal basis ``(c1, c2)`` of the plane orthogonal to a (d-2)-flat.

    Orientation is fixed by ``det[c1; c2; basis] = +1``.
    """
    if coaxis.dim != coaxis.d - 2:
        raise DimensionError("expected a (d-2)-flat")
    C = complement_basis(coaxis.basis, coaxis.d)
    if np.linalg.det(np.vstack([C, coaxis.basis])) < 0:
        C = C[[0, 1]].copy()
        C[1] = -C[1]
    return C


def rotation_about_coaxis(coaxis: Flat, k: int, start: Flat | None = None,
                          tol: float = DEFAULT_TOL.flat) -> Isometry:
    """``S_{P2} o S_{P1}``: rotation of order ``k`` about a (d-2)-flat.

    ``start`` is the first mirror ``P1`` (a hyperplane containing ``coaxis``);
    the second mirror is ``P1`` turned by ``pi/k`` about ``coaxis`` in the
    oriented complement plane, so the result is the rotation by ``2 pi / k``
    and does not depend on the choice of ``start``.
    """
    if k < 2:
        raise ValueError("order must be at least 2")
    d = coaxis.d
    if coaxis.dim != d - 2:
        raise DimensionError(f"expected a (d-2)-flat, got dim {coaxis.dim} in E^{d}")
    c1, c2 = oriented_complement_plane(coaxis)
    if start is None:
        start = Flat.hyperplane(coaxis.base, c2)
    if start.dim != d - 1:
        raise DimensionError("starting mirror must be a hyperplane")
    if not contains(start, coaxis, tol):
        raise ContainmentError("starting hyperplane does not contain the coaxis")
    n1 = start.normal
    a, b = n1 @ c1, n1 @ c2
    n1 = a * c1 + b * c2
    n1 /= np.linalg.norm(n1)
    a, b = n1 @ c1, n1 @ c2
    perp = -b * c1 + a * c2
    n2 = np.cos(np.pi / k) * n1 + np.sin(np.pi / k) * perp
    S1 = reflect_hyperplane(Flat.hyperplane(coaxis.base, n1))
    S2 = reflect_hyperplane(Flat.hyperplane(coaxis.base, n2))
    return S2 @ S1


def affine_hull(*objs) -> Flat:
    """Smallest flat containing the given flats and/or points."""
    if not objs:
        raise ValueError("affine_hull needs at least one flat or point")
    flats = [o if isinstance(o, Flat) else Flat.point(o) for o in objs]
    d = flats[0].d
    if any(f.d != d for f in flats):
        raise DimensionError("inconsistent ambient dimensions")
    base = flats[0].base
    dirs = [f.base - base for f in flats[1:]]
    for f in flats:
        dirs.extend(list(f.basis))
    if not dirs:
        return Flat.point(base)
    B = orthonormalize(np.array(dirs))
    return Flat(base, B)


def orth_complement(flat: Flat, p=None) -> Flat:
    """The (d-k)-flat orthogonal to ``flat`` through ``p`` (default: its base)."""
    p = flat.base if p is None else np.asarray(p, dtype=float)
    return Flat(p, flat.normals)


def angle_between_lines(l1: Flat, l2: Flat) -> float:
    """Angle between two unoriented lines, folded to ``[0, pi/2]``."""
    if l1.dim != 1 or l2.dim != 1:
        raise DimensionError("angle_between_lines expects lines")
    e1, e2 = l1.direction, l2.direction
    c = abs(float(e1 @ e2))
    s = float(np.linalg.norm(e2 - (e1 @ e2) * e1))
    return float(np.arctan2(s, c))


def is_perpendicular(l1: Flat, l2: Flat, tol: float = 1e-9) -> bool:
    return abs(float(l1.direction @ l2.direction)) <= tol


def contains(outer: Flat, inner: Flat, tol: float = DEFAULT_TOL.flat) -> bool:
    """True when ``inner`` lies in ``outer`` up to ``tol``."""
    if outer.d != inner.d:
        raise DimensionError("ambient dimensions differ")
    if inner.dim > outer.dim:
        return False
    if outer.distance(inner.base) > tol:
        return False
    if inner.dim == 0:
        return True
    R = inner.basis - (inner.basis @ outer.basis.T) @ outer.basis
    return bool(np.max(np.linalg.norm(R, axis=1)) <= tol)


def flat_distance_angle(f1: Flat, f2: Flat) -> tuple[float, float]:
    """(largest principal angle, distance from ``f2.base`` to ``f1``)."""
    ang = principal_angles(f1.basis, f2.basis)
    return (float(ang.max()) if ang.size else 0.0, float(f1.distance(f2.base)))


def random_rotation(d: int, rng: np.random.Generator, proper: bool = True) -> np.ndarray:
    """Haar-random orthogonal matrix (determinant +1 when ``proper``)."""
    Z = rng.standard_normal((d, d))
    Q, R = np.linalg.qr(Z)
    Q = Q * np.sign(np.diag(R))
    if proper and np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_unit(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def tolerance_scale(radius: float) -> float:
    return max(1.0, float(radius))


__all__ = [
    "ContainmentError",
    "DimensionError",
    "Flat",
    "Isometry",
    "Tolerance",
    "affine_hull",
    "angle_between_lines",
    "axis_involution",
    "complement_basis",
    "contains",
    "flat_involution",
    "is_perpendicular",
    "orth_complement",
    "orthonormalize",
    "principal_angles",
    "random_rotation",
    "reflect_hyperplane",
    "rotation_about_coaxis",
    "rotation_about_line",
    "translation",
]
