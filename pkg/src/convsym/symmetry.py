"""Symmetry predicates for convex bodies and axis search.

Every predicate returns a :class:`SymmetryClaim` whose verdict is the
comparison ``residual <= tol.abs * scale`` with ``scale = max(1, R)`` for the
circumradius ``R``. Isometry-type claims measure the mismatch between ``K``
and its image; k-axis claims measure radial asymmetry of sampled sections.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .bodies import ConvexBody, Polytope, SectionBody, _polytope_section, body_mismatch
from .geometry import (ContainmentError, DimensionError, Flat, axis_involution,
                       complement_basis, oriented_complement_plane, reflect_hyperplane,
                       principal_angles, rotation_about_coaxis, rotation_about_line)
from .star import Star, StarClass, star_from_lines
from .tolerance import DEFAULT_TOL, Tolerance, parallel_map, symmetric_directions


class ConsistencyError(RuntimeError):
    """Verdicts that should coincide disagree (usually a tolerance misconfiguration)."""


@dataclass(frozen=True, eq=False)
class SymmetryClaim:
    """Outcome of one symmetry test.

    ``kind`` is one of ``hyperplane``, ``axis``, ``n_axis``, ``k_axis`` or
    ``coaxis_order``; ``order`` carries ``n`` or ``k`` where relevant.
    ``witnesses`` lists ``(direction or point, mismatch)`` pairs, worst first.
    """

    kind: str
    flat: Flat
    verdict: bool
    residual: float
    threshold: float
    witnesses: list = field(default_factory=list)
    order: int | None = None
    mode: str | None = None
    samples: int = 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "order": self.order,
            "mode": self.mode,
            "flat": self.flat.to_dict(),
            "verdict": bool(self.verdict),
            "residual": float(self.residual),
            "threshold": float(self.threshold),
            "samples": int(self.samples),
            "witnesses": [{"at": list(map(float, w)), "mismatch": float(m)} for w, m in self.witnesses],
        }


def _threshold(K: ConvexBody, tol: Tolerance) -> float:
    return tol.abs * K.scale


def _isometry_claim(kind, K, flat, T, tol, order=None) -> SymmetryClaim:
    res, wit = body_mismatch(K, K.transformed(T), tol)
    thr = _threshold(K, tol)
    n = len(K.vertices) if isinstance(K, Polytope) else tol.n_directions(K.d)
    return SymmetryClaim(kind, flat, res <= thr, res, thr, wit, order=order, samples=n)


def is_hyperplane_of_symmetry(K: ConvexBody, plane: Flat, tol: Tolerance = DEFAULT_TOL) -> SymmetryClaim:
    """Is ``K`` invariant under the reflection in ``plane``?"""
    if plane.d != K.d or plane.dim != K.d - 1:
        raise DimensionError("need a hyperplane of the body's space")
    return _isometry_claim("hyperplane", K, plane, reflect_hyperplane(plane), tol)


def is_axis_of_symmetry(K: ConvexBody, line: Flat, tol: Tolerance = DEFAULT_TOL) -> SymmetryClaim:
    """Is ``K`` invariant under ``R_L`` (identity on L, negation across it)?"""
    if line.d != K.d or line.dim != 1:
        raise DimensionError("need a line of the body's space")
    return _isometry_claim("axis", K, line, axis_involution(line), tol)


def is_n_axis_of_symmetry(K: ConvexBody, line: Flat, n: int, tol: Tolerance = DEFAULT_TOL) -> SymmetryClaim:
    """Is ``K`` (in E^3) invariant under the rotation by ``2 pi / n`` about ``line``?"""
    if K.d != 3:
        raise DimensionError("n-axes are defined in E^3 only")
    if n < 2:
        raise ValueError("n must be at least 2")
    return _isometry_claim("n_axis", K, line, rotation_about_line(line, 2.0 * np.pi / n), tol, order=n)


def is_rotation_coaxis_of_order(K: ConvexBody, coaxis: Flat, k: int, tol: Tolerance = DEFAULT_TOL,
                                n_starts: int = 3) -> SymmetryClaim:
    """Is ``K`` invariant under ``S_{P2} o S_{P1}`` with mirrors through ``coaxis`` at angle ``pi/k``?

    The composition is built from ``n_starts`` random first mirrors; their
    verdicts must coincide, otherwise :class:`ConsistencyError` is raised.
    """
    if k < 2:
        raise ValueError("order must be at least 2")
    if coaxis.d != K.d or coaxis.dim != K.d - 2:
        raise DimensionError("need a (d-2)-flat of the body's space")
    c1, c2 = oriented_complement_plane(coaxis)
    rng = tol.rng(1009 + k)
    claims = []
    for phi in rng.uniform(0.0, np.pi, n_starts):
        start = Flat.hyperplane(coaxis.base, np.cos(phi) * c1 + np.sin(phi) * c2)
        T = rotation_about_coaxis(coaxis, k, start)
        claims.append(_isometry_claim("coaxis_order", K, coaxis, T, tol, order=k))
    verdicts = {c.verdict for c in claims}
    if len(verdicts) > 1:
        raise ConsistencyError(
            "coaxis verdict depends on the first mirror: residuals "
            + ", ".join(f"{c.residual:.3e}" for c in claims))
    return max(claims, key=lambda c: c.residual)


# ---------------------------------------------------------------------------------
# central symmetry and k-axes
# ---------------------------------------------------------------------------------

def central_asymmetry(S, c, tol: Tolerance = DEFAULT_TOL, n_dirs: int | None = None):
    """``sup_u |h(u) - h(-u) - 2 <c, u>|`` for a section (or body) and centre ``c``.

    For a :class:`SectionBody`, ``c`` is an ambient point that must lie on
    the carrier flat. Returns ``(residual, witness_direction, outer_radius)``
    where ``outer_radius = max_u h(u) - <c, u>`` bounds the circumradius.
    """
    c = np.asarray(c, dtype=float)
    if isinstance(S, SectionBody):
        if S.carrier.distance(c) > tol.flat * max(1.0, float(np.linalg.norm(c))):
            raise ContainmentError("centre does not lie on the section's carrier flat")
        body, cc = S.body, S.to_chart(c)
    else:
        body, cc = S, c
    m = body.d
    if n_dirs is None:
        n_dirs = tol.n_directions(m) if isinstance(body, Polytope) else min(tol.n_directions(m), 128)
    U = symmetric_directions(m, n_dirs)
    h = body.h(U)
    half = len(U) // 2
    # u and -u are stored at i and i + half: compare h(u) - <c,u> with h(-u) + <c,u>
    dev = np.abs((h[:half] - U[:half] @ cc) - (h[half:] - U[half:] @ cc))
    i = int(np.argmax(dev))
    outer = float(np.max(h - U @ cc))
    return float(dev[i]), U[i], outer


def is_centrally_symmetric(S, c, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> bool:
    """Is the section ``S`` symmetric about ``c``?  Compared against ``tol.abs * scale``.

    ``scale`` defaults to ``max(1, max_u h(u) - <c, u>)``, an upper bound of
    the section's circumradius up to a factor two.
    """
    res, _, outer = central_asymmetry(S, c, tol)
    return res <= tol.abs * (scale if scale is not None else max(1.0, outer))


_SECTION_DIRS = {1: 2, 2: 64, 3: 256}


def _section_dirs(m: int) -> np.ndarray:
    return symmetric_directions(m, _SECTION_DIRS.get(m, 512))


def _interior_point_on(K: ConvexBody, flat: Flat, tol: Tolerance):
    """A point of ``flat ∩ int K`` (or ``None`` when the flat misses the interior)."""
    if isinstance(K, Polytope):
        S = _polytope_section(K, flat, tol.abs * K.scale) if flat.dim >= 1 else None
        if S is None:
            return None
        return flat.from_chart(S.interior_point())
    y0 = flat.to_chart(K.interior_point())
    f = lambda y: float(K.level(flat.from_chart(y)))
    res = minimize(f, y0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    return flat.from_chart(res.x) if res.fun < 1.0 - 1e-9 else None


def _points_on_flat(K: ConvexBody, flat: Flat, c0: np.ndarray, n: int) -> np.ndarray:
    """``n`` deterministic interior points of ``flat ∩ K``, starting with ``c0``."""
    D = _section_dirs(flat.dim) @ flat.basis
    reach = K.radial(c0, D)
    j = np.arange(n)
    frac = 0.85 * np.mod(j * 0.6180339887498949, 1.0)
    pick = D[j % len(D)] * (frac * reach[j % len(D)])[:, None]
    pick[0] = 0.0
    return c0 + pick


def _k_axis_residual(K, gamma, c0, mode, n_flats):
    d, k = K.d, gamma.dim
    W = complement_basis(gamma.basis, d)
    Q = _points_on_flat(K, gamma, c0, n_flats)
    if mode == "definition":
        ws = symmetric_directions(d - k, 2 * n_flats)[:n_flats] @ W
        Vc = _section_dirs(k + 1)
        V = np.concatenate([Vc @ np.vstack([gamma.basis, w]) for w in ws])
        W2 = np.repeat(ws, len(Vc), axis=0)
        V2 = V - 2.0 * np.sum(V * W2, axis=1)[:, None] * W2
    else:
        Vc = _section_dirs(d - k) @ W
        V = np.tile(Vc, (len(Q), 1))
        V2 = -V
    QQ = np.repeat(Q, len(V) // len(Q), axis=0)
    diff = np.abs(K.radial(QQ, V) - K.radial(QQ, V2))
    i = int(np.argmax(diff))
    return float(diff[i]), (QQ[i], V[i])


def is_k_axis_of_symmetry(K: ConvexBody, gamma: Flat, tol: Tolerance = DEFAULT_TOL,
                          mode: str = "definition", n_flats: int | None = None) -> SymmetryClaim:
    """Is the k-flat ``gamma`` a k-axis of symmetry of ``K``?

    ``mode="definition"`` samples (k+1)-flats through ``gamma`` and checks
    that each section is mirror-symmetric across ``gamma``;
    ``mode="mundial"`` samples (d-k)-flats orthogonal to ``gamma`` and checks
    that each section is centrally symmetric about its point on ``gamma``.
    Both compare radial distances from a point of ``gamma`` in paired
    directions. The sample count doubles (up to 16x) while the residual is
    within a factor two of the threshold.
    """
    d = K.d
    if gamma.d != d or not 1 <= gamma.dim <= d - 2:
        raise DimensionError("need a k-flat with 1 <= k <= d-2")
    if mode not in ("definition", "mundial"):
        raise ValueError(f"unknown mode {mode!r}")
    thr = _threshold(K, tol)
    c0 = _interior_point_on(K, gamma, tol)
    if c0 is None:
        off = float(gamma.distance(K.circumcenter))
        res = max(off, 2.0 * thr)
        return SymmetryClaim("k_axis", gamma, False, res, thr, [(K.circumcenter.tolist(), res)],
                             order=gamma.dim, mode=mode, samples=0)
    n = n_flats or tol.k_axis_flats
    while True:
        res, (q, v) = _k_axis_residual(K, gamma, c0, mode, n)
        if not (thr / 2 <= res <= 2 * thr) or n >= 16 * (n_flats or tol.k_axis_flats):
            break
        n *= 2
    return SymmetryClaim("k_axis", gamma, res <= thr, res, thr, [(np.r_[q, v].tolist(), res)],
                         order=gamma.dim, mode=mode, samples=n)


# ---------------------------------------------------------------------------------
# axis search
# ---------------------------------------------------------------------------------

def circumsphere_prune(K: ConvexBody) -> np.ndarray:
    """Centre of the minimum enclosing ball; every symmetry of ``K`` fixes it."""
    return K.circumcenter


def _unoriented_unique(D: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    out: list[np.ndarray] = []
    for v in D:
        if all(abs(abs(v @ w) - 1.0) > tol for w in out):
            out.append(v)
    return np.array(out) if out else np.empty((0, D.shape[1]))


def _polytope_axis_candidates(P: Polytope, c: np.ndarray) -> np.ndarray:
    """Unit directions from ``c`` to the centroids of all faces (vertices included).

    A symmetry line meets the boundary at a point in the relative interior of
    a unique face; the symmetry maps that face to itself and therefore fixes
    its vertex centroid, which lies on the line. The set is complete.
    """
    D = np.array([P.vertices[sorted(f.vertices)].mean(axis=0) for f in P.faces]) - c
    nrm = np.linalg.norm(D, axis=1)
    keep = nrm > 1e-9 * P.scale
    return _unoriented_unique(D[keep] / nrm[keep, None])


def _residual_fn(K: ConvexBody, c: np.ndarray, kind: str, orders, n_dirs: int = 512):
    """Cheap mismatch ``e -> sup_u |h(u) - h_{T(K)}(u)|`` for lines through ``c``.

    ``kind="involution"`` uses ``R_L``; ``kind="rotation"`` (E^3) takes the
    smallest residual over rotations by ``2 pi / n`` for ``n`` in ``orders``.
    """
    U = symmetric_directions(K.d, n_dirs)
    h = K.h(U)

    def mismatch(A):
        # support of the image under x -> A (x - c) + c
        return float(np.max(np.abs(h - (K.h(U @ A) + U @ (c - A @ c)))))

    def rho(v):
        e = v / np.linalg.norm(v)
        if kind == "involution":
            return mismatch(2.0 * np.outer(e, e) - np.eye(K.d))
        L = Flat.line(c, e)
        return min(mismatch(rotation_about_line(L, 2.0 * np.pi / n).linear) for n in orders)

    return rho


def dedupe_flats(claims, scale: float, angle_tol: float = 1e-7):
    """Drop claims whose flats coincide (angle and base distance below the thresholds)."""
    out = []
    for cl in claims:
        F = cl.flat
        dup = False
        for o in out:
            G = o.flat
            if G.dim != F.dim:
                continue
            ang = principal_angles(F.basis, G.basis)
            if (ang.max() if ang.size else 0.0) < angle_tol and G.distance(F.base) < angle_tol * scale:
                dup = True
                break
        if not dup:
            out.append(cl)
    return out


def _line_claim(K: ConvexBody, line: Flat, kind: str, orders, tol: Tolerance) -> SymmetryClaim:
    if kind == "involution":
        return is_axis_of_symmetry(K, line, tol)
    best = None
    for n in sorted(orders, reverse=True):
        cl = is_n_axis_of_symmetry(K, line, n, tol)
        if cl.verdict:
            return cl
        best = cl if best is None or cl.residual < best.residual else best
    return best


def detect_axes(K: ConvexBody, budget: int = 4096, tol: Tolerance = DEFAULT_TOL,
                threads: int = 1, kind: str | None = None, max_order: int = 12) -> list[SymmetryClaim]:
    """Verified symmetry lines through the circumcentre.

    ``kind="involution"`` searches axes of symmetry (``R_L(K) = K``);
    ``kind="rotation"`` (E^3 only, the default there) searches n-axes of
    any order ``2 <= n <= max_order`` and reports each with its largest
    order. Polytopes use the complete candidate set of face centroids; other
    bodies use a quasi-uniform direction grid whose best candidates are
    refined by local minimization of the mismatch residual. Only verified
    claims are returned, deduplicated by flat equality.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    kind = kind or ("rotation" if K.d == 3 else "involution")
    if kind not in ("rotation", "involution"):
        raise ValueError(f"unknown axis kind {kind!r}")
    if kind == "rotation" and K.d != 3:
        raise DimensionError("rotation axes are searched in E^3 only")
    orders = range(2, max_order + 1)
    c = circumsphere_prune(K)
    check = lambda e: _line_claim(K, Flat.line(c, e), kind, orders, tol)
    if isinstance(K, Polytope):
        D = _polytope_axis_candidates(K, c)[:budget]
        claims = parallel_map(check, D, threads)
        return dedupe_flats([cl for cl in claims if cl.verdict], K.scale)
    rho = _residual_fn(K, c, kind, range(2, 7))
    n_grid = max(1, min(budget, 512))
    G = symmetric_directions(K.d, 2 * n_grid)[:n_grid]
    r = np.array([rho(g) for g in G])
    thr = _threshold(K, tol)
    order = np.argsort(r, kind="stable")
    cands = [G[i] for i in order if r[i] <= thr]
    for i in order[: min(8, len(order))]:
        if r[i] <= thr:
            continue
        res = minimize(rho, G[i], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 400 * K.d})
        cands.append(res.x / np.linalg.norm(res.x))
    claims = parallel_map(check, cands[:budget], threads)
    return dedupe_flats([cl for cl in claims if cl.verdict], K.scale)


def n_axis_order(K: ConvexBody, line: Flat, tol: Tolerance = DEFAULT_TOL, max_order: int = 12) -> int:
    """Largest ``n <= max_order`` with ``line`` an n-axis of ``K`` (1 when none)."""
    for n in range(max_order, 1, -1):
        if is_n_axis_of_symmetry(K, line, n, tol).verdict:
            return n
    return 1


# ---------------------------------------------------------------------------------
# planar mirror lines
# ---------------------------------------------------------------------------------

def _mirror_residual(B: ConvexBody, c: np.ndarray, U: np.ndarray, h: np.ndarray, phi: float) -> float:
    e = np.array([np.cos(phi), np.sin(phi)])
    RU = 2.0 * np.outer(U @ e, e) - U
    shift = c - (2.0 * np.outer(e, e) - np.eye(2)) @ c
    return float(np.max(np.abs(h - (B.h(RU) + U @ shift))))


def orthogonal_symmetry_lines(F, tol: Tolerance = DEFAULT_TOL) -> Star:
    """All mirror lines of a planar figure through its circumcentre, as a :class:`Star`.

    ``F`` is a 2-dimensional :class:`SectionBody` or a body in E^2. For a
    figure whose every sampled direction is a mirror (a disk) the grid lines
    are returned and the star is classified dense.
    """
    if isinstance(F, SectionBody):
        B, carrier = F.body, F.carrier
    else:
        B, carrier = F, None
    if B.d != 2:
        raise DimensionError("orthogonal_symmetry_lines needs a planar figure")
    c = B.circumcenter
    thr = _threshold(B, tol)
    phis: list[float] = []
    dense = False
    if isinstance(B, Polytope):
        D = _polytope_axis_candidates(B, c)
        for e in D:
            refl = reflect_hyperplane(Flat.hyperplane(c, np.array([-e[1], e[0]])))
            res, _ = body_mismatch(B, B.transformed(refl), tol)
            if res <= thr:
                phis.append(float(np.mod(np.arctan2(e[1], e[0]), np.pi)))
    else:
        U = symmetric_directions(2, 720)
        h = B.h(U)
        grid = np.pi * (np.arange(360) + 0.5) / 360
        r = np.array([_mirror_residual(B, c, U, h, p) for p in grid])
        if np.all(r <= thr):
            phis, dense = list(grid), True
        else:
            for i in np.flatnonzero((r <= np.roll(r, 1)) & (r <= np.roll(r, -1))):
                res = minimize(lambda x: _mirror_residual(B, c, U, h, x[0]), [grid[i]],
                               method="Nelder-Mead", options={"xatol": 1e-13, "fatol": 1e-16})
                if res.fun <= thr:
                    phis.append(float(np.mod(res.x[0], np.pi)))
    phis = sorted(phis)
    uniq: list[float] = []
    for p in phis:
        if not uniq or min(abs(p - uniq[-1]), np.pi - abs(p - uniq[-1])) > 1e-7:
            uniq.append(p)
    if len(uniq) > 1 and min(abs(uniq[0] - uniq[-1]), np.pi - abs(uniq[0] - uniq[-1])) <= 1e-7:
        uniq.pop()
    lines = [Flat.line(c, [np.cos(p), np.sin(p)]) for p in uniq]
    plane = Flat(c, np.eye(2))
    if carrier is not None:
        apex = carrier.from_chart(c)
        lines = [Flat.line(apex, L.direction @ carrier.basis) for L in lines]
        plane = carrier
    star = star_from_lines(lines, plane.base if carrier is None else carrier.from_chart(c), plane,
                           tol=max(tol.abs, 1e-9))
    if dense:
        star = Star(star.apex, star.plane, star.angles, StarClass("dense", None, float(np.pi / 360)), 0.0)
    return star
