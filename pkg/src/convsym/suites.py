"""Seeded property suites for every module (the ``verify`` command).

Each property takes ``(trials, rng, tol, out)`` and records into the
:class:`PropertyResult` ``out`` how many instances it checked and a
JSON-ready dump for each failure (trial index, the body when there is one
and the offending values). Output is a pure function of
``(suite, trials, seed)``: no timings or timestamps are recorded.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from math import gcd

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull

from . import star as st
from .bodies import (apply_isometry, make_ball, make_cube, make_ellipsoid,
                     make_lp_body, make_random_polytope, make_regular_polygon, minimum_enclosing_ball,
                     section, shadow_boundary)
from .classify import (common_flat, revolution_residual, sphere_fit, theorem_brasil_pipeline,
                       theorem_copaoro_pipeline, theorem_dream_pipeline, theorem_fantasia_pipeline,
                       theorem_grandota_pipeline)
from .families import equatorial_revolution, revolution_instance, symmetric_polytope_instance
from .geometry import (Flat, Isometry, affine_hull, axis_involution, contains, flat_involution,
                       random_rotation, random_unit, reflect_hyperplane, rotation_about_coaxis,
                       rotation_about_line)
from .metrics import (PointSet, busemann_distance, flat_sequence_limit, flat_sequence_window,
                      hausdorff)
from .symmetry import (ConsistencyError, central_asymmetry, detect_axes, is_axis_of_symmetry,
                       is_hyperplane_of_symmetry, is_k_axis_of_symmetry, is_rotation_coaxis_of_order,
                       orthogonal_symmetry_lines)
from .tolerance import DEFAULT_TOL, Tolerance, symmetric_directions

MAX_DUMPS = 3


@dataclass
class PropertyResult:
    module: str
    name: str
    checked: int = 0
    n_failed: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.n_failed == 0

    def fail(self, dump: dict) -> None:
        self.n_failed += 1
        if len(self.failures) < MAX_DUMPS:
            self.failures.append(dump)

    def to_dict(self) -> dict:
        return {"module": self.module, "name": self.name, "passed": self.passed,
                "checked": self.checked, "n_failed": self.n_failed, "failures": self.failures}


def _dump(trial, body=None, **extra) -> dict:
    out = {"trial": int(trial)}
    if body is not None:
        try:
            out["body"] = body.to_dict()
        except Exception:  # bodies without a JSON form are described by label only
            out["body"] = {"label": getattr(body, "label", None)}
    out.update(extra)
    return out


def _random_flat(d, k, rng, spread=1.0):
    return Flat(rng.uniform(-spread, spread, d), random_rotation(d, rng)[:k] if k else np.empty((0, d)))


def _random_isometry(d, rng):
    return Isometry(random_rotation(d, rng, proper=False), rng.uniform(-1.0, 1.0, d))


# ---------------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------------

def prop_isometries_preserve_distance(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([2, 3, 4]))
        isos = [reflect_hyperplane(_random_flat(d, d - 1, rng)),
                axis_involution(_random_flat(d, 1, rng)),
                flat_involution(_random_flat(d, int(rng.integers(0, d)), rng))]
        if d >= 3:
            isos.append(rotation_about_coaxis(_random_flat(d, d - 2, rng), int(rng.integers(2, 10))))
        if d == 3:
            isos.append(rotation_about_line(_random_flat(3, 1, rng), float(rng.uniform(0, 2 * np.pi))))
        X, Y = rng.normal(size=(100, d)), rng.normal(size=(100, d))
        for T in isos:
            out.checked += 1
            err = float(np.max(np.abs(np.linalg.norm(T(X) - T(Y), axis=1) - np.linalg.norm(X - Y, axis=1))))
            if err > 1e-10:
                out.fail(_dump(t, isometry=T.to_dict(), error=err))


def prop_coaxis_rotation_angle(trials, rng, tol, out):
    for t in range(trials):
        d, k = int(rng.choice([3, 4])), int(rng.integers(2, 10))
        G = _random_flat(d, d - 2, rng)
        T = rotation_about_coaxis(G, k)
        A = T.linear
        ang = np.arccos(np.clip(np.sum(G.normals * (G.normals @ A.T), axis=1), -1.0, 1.0))
        want = min(2 * np.pi / k, 2 * np.pi - 2 * np.pi / k)
        err = max(float(np.max(np.abs(ang - want))),
                  float(np.max(np.abs(G.basis @ A.T - G.basis))) if G.dim else 0.0,
                  float(np.linalg.norm(T(G.base) - G.base)))
        out.checked += 1
        if err > 1e-10:
            out.fail(_dump(t, coaxis=G.to_dict(), order=k, error=err))


def prop_involutions_commute(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([3, 4]))
        P = _random_flat(d, d - 1, rng)
        inside = Flat.line(P.base + rng.normal(size=d - 1) @ P.basis, rng.normal(size=d - 1) @ P.basis)
        perp = Flat.line(P.base + rng.normal(size=d - 1) @ P.basis, P.normal)
        R = reflect_hyperplane(P)
        for L in (inside, perp):
            A = axis_involution(L)
            out.checked += 1
            if not (A @ R).close_to(R @ A, 1e-10):
                out.fail(_dump(t, line=L.to_dict(), hyperplane=P.to_dict()))


def prop_affine_hull_idempotent_monotone(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([3, 4, 5]))
        k = int(rng.integers(1, d))
        F = _random_flat(d, k, rng)
        sub = Flat(F.base + rng.normal(size=k) @ F.basis,
                   (rng.normal(size=(int(rng.integers(0, k + 1)), k)) @ F.basis).reshape(-1, d))
        H = _random_flat(d, int(rng.integers(0, d)), rng)
        big = affine_hull(F, H)
        ok = (affine_hull(F).same_as(F) and affine_hull(F, sub).same_as(F)
              and contains(big, F) and contains(big, H) and affine_hull(big, F).same_as(big))
        out.checked += 1
        if not ok:
            out.fail(_dump(t, flat=F.to_dict(), other=H.to_dict()))


# ---------------------------------------------------------------------------------
# bodies
# ---------------------------------------------------------------------------------

def _random_body(rng, d=None, polytope=None):
    d = d or int(rng.choice([2, 3, 4]))
    kinds = ["cube", "random", "ellipsoid", "lp"] + (["revolution"] if d >= 3 else [])
    if polytope is True:
        kinds = ["cube", "random"]
    kind = kinds[int(rng.integers(len(kinds)))]
    Q = random_rotation(d, rng)
    c = rng.uniform(-1, 1, d)
    if kind == "cube":
        return apply_isometry(make_cube(d, float(rng.uniform(0.5, 2))), Isometry(Q, c))
    if kind == "random":
        return make_random_polytope(int(rng.integers(1 << 30)), n=4 * d + 4, d=d)
    if kind == "ellipsoid":
        return make_ellipsoid(c, rng.uniform(0.5, 2, d), Q)
    if kind == "lp":
        return make_lp_body(c, rng.uniform(0.5, 2, d), Q, p=float(rng.uniform(1.5, 5)))
    k = int(rng.integers(1, d))
    return revolution_instance(d, k, int(rng.integers(1 << 30))).body


def prop_support_sublinear(trials, rng, tol, out):
    for t in range(trials):
        K = _random_body(rng)
        U, V = rng.normal(size=(1000, K.d)), rng.normal(size=(1000, K.d))
        gap = K.h(U + V) - K.h(U) - K.h(V)
        bound = 1e-12 * K.scale * (np.linalg.norm(U, axis=1) + np.linalg.norm(V, axis=1))
        out.checked += 1
        if np.any(gap > bound):
            out.fail(_dump(t, K, worst=float(np.max(gap))))


def prop_meb_isometry(trials, rng, tol, out):
    for t in range(trials):
        K = _random_body(rng, polytope=bool(t % 2 == 0) or None)
        T = _random_isometry(K.d, rng)
        c0, r0 = minimum_enclosing_ball(K)
        c1, r1 = minimum_enclosing_ball(apply_isometry(K, T))
        err = max(abs(r1 - r0), float(np.linalg.norm(c1 - T(c0))))
        out.checked += 1
        if err > 1e-9 * K.scale:
            out.fail(_dump(t, K, radius_error=abs(r1 - r0), center_error=float(np.linalg.norm(c1 - T(c0)))))


def _ambient_section_support(S, U):
    return U @ S.carrier.base + S.body.h(U @ S.carrier.basis.T)


def prop_section_commutes_with_isometry(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([3, 4]))
        K = _random_body(rng, d=d, polytope=True)
        H = Flat.hyperplane(K.interior_point() + 0.2 * rng.normal(size=d), random_unit(d, rng))
        B = H.basis
        A = np.outer(H.normal, H.normal) + B.T @ random_rotation(d - 1, rng, proper=False) @ B
        T = Isometry.fixing(A, H.base)
        S0, S1 = section(K, H, tol), section(apply_isometry(K, T), H, tol)
        out.checked += 1
        if S0 is None or S1 is None:
            if (S0 is None) != (S1 is None):
                out.fail(_dump(t, K, hyperplane=H.to_dict(), note="only one section is empty"))
            continue
        U = symmetric_directions(d - 1, 256) @ B
        lhs = _ambient_section_support(S1, U)
        rhs = _ambient_section_support(S0, U @ A) + U @ T.shift
        err = float(np.max(np.abs(lhs - rhs)))
        if err > tol.abs * K.scale:
            out.fail(_dump(t, K, hyperplane=H.to_dict(), error=err))


def prop_revolution_sphere_sections(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([3, 4]))
        k = int(rng.integers(1, d))
        inst = revolution_instance(d, k, int(rng.integers(1 << 30)))
        res, n = revolution_residual(inst.body, inst.core, tol, n_flats=100)
        out.checked += 1
        if res > tol.abs * inst.body.scale:
            out.fail(_dump(t, inst.body, residual=res, sections=n))


def _sphere_mesh_edges(V):
    tri = ConvexHull(V).simplices
    e = np.vstack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [0, 2]]])
    return e


def prop_shadow_boundary_two_components(trials, rng, tol, out):
    V = symmetric_directions(3, 2048)
    edges = _sphere_mesh_edges(V)
    for t in range(trials):
        c = rng.uniform(-1, 1, 3)
        K = make_ball(3, 1.0, c) if t % 2 == 0 else make_ellipsoid(c, rng.uniform(0.7, 1.4, 3),
                                                                   random_rotation(3, rng))
        g = random_unit(3, rng)
        X = c + K.radial(c, V)[:, None] * V
        sb = shadow_boundary(K, Flat.line(c, g), tol)
        keep = sb.violation(X) > 0.1
        e = edges[keep[edges[:, 0]] & keep[edges[:, 1]]]
        idx = np.flatnonzero(keep)
        remap = -np.ones(len(V), dtype=int)
        remap[idx] = np.arange(len(idx))
        G = coo_matrix((np.ones(len(e)), (remap[e[:, 0]], remap[e[:, 1]])), shape=(len(idx), len(idx)))
        ncomp, _ = connected_components(G, directed=False)
        out.checked += 1
        if ncomp != 2:
            out.fail(_dump(t, K, direction=g.tolist(), components=int(ncomp)))


# ---------------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------------

def _point_set(rng, d, n=3, radius=1.0):
    return PointSet(rng.uniform(-radius, radius, (n, d)))


def prop_busemann_metric_axioms(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([2, 3]))
        A, B, C = (_point_set(rng, d) for _ in range(3))
        p = rng.uniform(-0.5, 0.5, d)
        kw = dict(cutoff=20.0, n_grid=20_000, tol=tol)
        ab, ba = busemann_distance(p, A, B, **kw), busemann_distance(p, B, A, **kw)
        bc, ac = busemann_distance(p, B, C, **kw), busemann_distance(p, A, C, **kw)
        out.checked += 1
        slack = 2.0 * (ab.error_bar + bc.error_bar + ac.error_bar)
        if ab.value != ba.value or ac.value > ab.value + bc.value + slack:
            out.fail(_dump(t, sets=[A.points.tolist(), B.points.tolist(), C.points.tolist()], p=p.tolist(),
                           ab=ab.value, ba=ba.value, bc=bc.value, ac=ac.value, slack=slack))


def prop_busemann_hausdorff_sandwich(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([2, 3]))
        if t % 2:
            M, N = _point_set(rng, d, 4), _point_set(rng, d, 4)
            pts = np.vstack([M.points, N.points])
        else:
            M = make_random_polytope(int(rng.integers(1 << 30)), n=3 * d + 2, d=d)
            N = make_random_polytope(int(rng.integers(1 << 30)), n=3 * d + 2, d=d)
            pts = np.vstack([M.vertices, N.vertices])
        R0 = float(np.max(np.linalg.norm(pts, axis=1)))
        p = rng.uniform(-0.5, 0.5, d)
        b = busemann_distance(p, M, N, cutoff=20.0, n_grid=20_000, tol=tol)
        H = hausdorff(M, N, tol)
        lower = np.exp(-(np.linalg.norm(p) + R0)) * H
        out.checked += 1
        if b.value > H + 1e-9 or b.value + b.error_bar < lower:
            out.fail(_dump(t, p=p.tolist(), busemann=b.value, bar=b.error_bar, hausdorff=H, lower=lower))


def prop_hausdorff_isometry_invariance(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([2, 3, 4]))
        T = _random_isometry(d, rng)
        if t % 2:
            M, N = _point_set(rng, d, 5), _point_set(rng, d, 5)
            TM, TN = PointSet(T(M.points)), PointSet(T(N.points))
        else:
            M = make_random_polytope(int(rng.integers(1 << 30)), n=3 * d + 2, d=d)
            N = make_random_polytope(int(rng.integers(1 << 30)), n=3 * d + 2, d=d)
            TM, TN = apply_isometry(M, T), apply_isometry(N, T)
        err = abs(hausdorff(TM, TN, tol) - hausdorff(M, N, tol))
        out.checked += 1
        if err > 1e-9:
            out.fail(_dump(t, error=err))


def prop_busemann_points_exact(trials, rng, tol, out):
    for t in range(max(1, trials // 5)):
        d = 2 + t % 3
        e1 = np.eye(d)[0]
        b = busemann_distance(np.zeros(d), PointSet(np.zeros((1, d))), PointSet(e1[None, :]),
                              cutoff=20.0, n_grid=20_000, tol=tol)
        out.checked += 1
        if abs(b.value - 1.0) > 1e-12:
            out.fail(_dump(t, d=d, value=b.value))


def prop_flat_sequence_limit(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([2, 3, 4]))
        k = int(rng.integers(1, d))
        F = _random_flat(d, k, rng)
        D = rng.normal(size=(40, k, d))
        seq = [Flat(F.base + rng.normal(size=d) / (i + 1) ** 2, F.basis + D[i] / (i + 1) ** 2)
               for i in range(40)]
        alt = [F if i % 2 else _random_flat(d, k, np.random.default_rng(t)) for i in range(40)]
        _, conv = flat_sequence_limit(seq)
        _, conv_alt = flat_sequence_limit(alt)
        out.checked += 1
        if not conv or conv_alt:
            out.fail(_dump(t, converging_detected=conv, alternating_detected=conv_alt))


# ---------------------------------------------------------------------------------
# symmetry
# ---------------------------------------------------------------------------------

def prop_circumsphere_concurrency(trials, rng, tol, out):
    for t in range(trials):
        inst = symmetric_polytope_instance(int(rng.integers(1 << 30)))
        K = inst.body
        c, _ = minimum_enclosing_ball(K)
        claims = [cl for cl in detect_axes(K, tol=tol) if cl.verdict]
        claims += [cl for cl in (is_hyperplane_of_symmetry(K, H, tol) for H in inst.mirrors) if cl.verdict]
        for cl in claims:
            out.checked += 1
            off = float(cl.flat.distance(c))
            if off > tol.abs * K.scale:
                out.fail(_dump(t, K, claim=cl.to_dict(), offset=off))


def _closure_schedule(t, rng, tol):
    """(body, true flat, checker) for one perturbation schedule."""
    kind = t % 3
    if kind == 0:
        inst = symmetric_polytope_instance(int(rng.integers(1 << 30)), group="cube")
        axes = [cl.flat for cl in detect_axes(inst.body, tol=tol, kind="involution") if cl.verdict]
        return inst.body, axes[int(rng.integers(len(axes)))], is_axis_of_symmetry
    if kind == 1:
        inst = symmetric_polytope_instance(int(rng.integers(1 << 30)))
        return inst.body, inst.mirrors[int(rng.integers(len(inst.mirrors)))], is_hyperplane_of_symmetry
    rev = equatorial_revolution(3, 2, int(rng.integers(1 << 30)))
    fib = rev.frame[1:]
    phi = rng.uniform(0, np.pi)
    return rev.body, Flat.line(rev.core.base, np.cos(phi) * fib[0] + np.sin(phi) * fib[1]), is_axis_of_symmetry


def perturbation_schedule(flat: Flat, rng, n: int = 33, a0: float = 0.1, ratio: float = 0.5) -> list[Flat]:
    """Flats ``flat`` tilted and shifted by random amounts ``a0 * ratio**i``."""
    d, k = flat.d, flat.dim
    out = []
    for i in range(n):
        a = a0 * ratio ** i
        out.append(Flat(flat.base + a * random_unit(d, rng), flat.basis + a * rng.normal(size=(k, d)) / np.sqrt(d)))
    return out


def prop_closure_of_axes(trials, rng, tol, out):
    """Limits of perturbation schedules of verified axes/hyperplanes are verified, with
    residual at most twice the largest residual among the averaged terminal flats."""
    for t in range(max(trials, 20)):
        K, F, check = _closure_schedule(t, rng, tol)
        seq = perturbation_schedule(F, rng)
        lim, conv = flat_sequence_limit(seq)
        window = flat_sequence_window(seq)
        term = max(check(K, seq[i], tol).residual for i in window)
        cl = check(K, lim, tol)
        out.checked += 1
        if not (conv and cl.verdict and cl.residual <= 2.0 * term):
            out.fail(_dump(t, K, limit=lim.to_dict(), converged=conv, residual=cl.residual, terminal=term))


def prop_central_section_limit(trials, rng, tol, out):
    for t in range(trials):
        inst = symmetric_polytope_instance(int(rng.integers(1 << 30)), group="box" if t % 2 else "cube")
        K, c = inst.body, inst.center
        n = random_unit(3, rng)
        seq = [Flat.hyperplane(c, n + 0.3 * 0.5 ** i * random_unit(3, rng)) for i in range(30)]
        H, _ = flat_sequence_limit(seq)
        p = H.project(c)
        S = section(K, H, tol)
        res = central_asymmetry(S, p, tol)[0] if S is not None else np.inf
        out.checked += 1
        if res > tol.abs * K.scale:
            out.fail(_dump(t, K, hyperplane=H.to_dict(), residual=res))


def _k_axis_instance(t, rng):
    """(body, flat, expected verdict or None)."""
    kind = t % 6
    if kind == 0:
        d = int(rng.choice([3, 4]))
        K = make_cube(d)
        k = int(rng.integers(1, d - 1))
        idx = rng.permutation(d)[:k]
        return K, Flat(np.zeros(d), np.eye(d)[idx]), True
    if kind == 1:
        d = int(rng.choice([3, 4]))
        K = make_ball(d, 1.0, rng.uniform(-1, 1, d))
        return K, Flat(K.c, random_rotation(d, rng)[:int(rng.integers(1, d - 1))]), True
    if kind == 2:
        K = make_ellipsoid(np.zeros(3), rng.uniform(0.6, 1.6, 3), random_rotation(3, rng))
        return K, Flat.line(K.c, K.Q[:, int(rng.integers(3))]), True
    if kind == 3:
        k = int(rng.choice([2, 3]))
        inst = revolution_instance(4, k, int(rng.integers(1 << 30)))
        return inst.body, inst.core, True
    if kind == 4:
        K = _random_body(rng, d=int(rng.choice([3, 4])))
        d = K.d
        return K, Flat(K.circumcenter, random_rotation(d, rng)[:int(rng.integers(1, d - 1))]), None
    inst = symmetric_polytope_instance(int(rng.integers(1 << 30)))
    return inst.body, Flat(inst.center, random_rotation(3, rng)[:1]), None


def _residual_ratio_ok(a, b, floor):
    a, b = max(a, floor), max(b, floor)
    return max(a, b) <= 10.0 * min(a, b)


def k_axis_mode_agreement(K, G, tol):
    """``(agree, definition claim, mundial claim)`` for one instance."""
    c1 = is_k_axis_of_symmetry(K, G, tol, mode="definition")
    c2 = is_k_axis_of_symmetry(K, G, tol, mode="mundial")
    ok = c1.verdict == c2.verdict and _residual_ratio_ok(c1.residual, c2.residual, 1e-12 * K.scale)
    return ok, c1, c2


def prop_k_axis_mode_agreement(trials, rng, tol, out):
    for t in range(10 * trials):
        K, G, expected = _k_axis_instance(t, rng)
        ok, c1, c2 = k_axis_mode_agreement(K, G, tol)
        if expected is not None:
            ok = ok and c1.verdict == expected
        out.checked += 1
        if not ok:
            out.fail(_dump(t, K, flat=G.to_dict(), definition=c1.to_dict(), mundial=c2.to_dict()))


def prop_coaxis_start_independence(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([3, 4]))
        choice = t % 3
        if choice == 0:
            K, G = make_cube(d), Flat(np.zeros(d), np.eye(d)[2:])
        elif choice == 1:
            K = make_ball(d)
            G = Flat(np.zeros(d), random_rotation(d, rng)[:d - 2])
        else:
            K = _random_body(rng, d=d)
            G = Flat(K.circumcenter, random_rotation(d, rng)[:d - 2])
        k = int(rng.integers(2, 6))
        out.checked += 1
        try:
            is_rotation_coaxis_of_order(K, G, k, tol, n_starts=3)
        except ConsistencyError as exc:
            out.fail(_dump(t, K, coaxis=G.to_dict(), order=k, error=str(exc)))


# ---------------------------------------------------------------------------------
# star
# ---------------------------------------------------------------------------------

def prop_star_lines_are_axes(trials, rng, tol, out):
    for t in range(trials):
        if t % 2:
            K = make_cube(3)
            L1, L2 = Flat.line(np.zeros(3), [1, 0, 0]), Flat.line(np.zeros(3), [1, 1, 0])
        else:
            rev = equatorial_revolution(3, 2, int(rng.integers(1 << 30)))
            K = rev.body
            q = int(rng.integers(2, 9))
            p = int(rng.integers(1, q))
            f0, f1 = rev.frame[1], rev.frame[2]
            th = np.pi * p / q
            L1 = Flat.line(rev.core.base, f0)
            L2 = Flat.line(rev.core.base, np.cos(th) * f0 + np.sin(th) * f1)
        S = st.build_star(L1, L2)
        bad = [i for i in range(len(S.angles)) if not is_axis_of_symmetry(K, S.line(i), tol).verdict]
        out.checked += 1
        if S.classification.kind != "nstar" or bad:
            out.fail(_dump(t, K, star=S.to_dict(), failing_lines=bad))


def _line_set(S):
    D = np.array([S.line(i).direction for i in range(len(S.angles))])
    D *= np.where(D[:, [int(np.argmax(np.abs(D[0])))]] < 0, -1.0, 1.0)
    return D


def _same_line_sets(D1, D2, atol=1e-8):
    if len(D1) != len(D2):
        return False
    G = np.abs(D1 @ D2.T)
    return bool(np.all(np.max(G, axis=1) >= 1 - atol) and np.all(np.max(G, axis=0) >= 1 - atol))


def prop_star_swap_invariance(trials, rng, tol, out):
    for t in range(trials):
        apex = rng.uniform(-1, 1, 3)
        plane = random_rotation(3, rng)[:2]
        if t % 2:
            q = int(rng.integers(2, 20))
            p = int(rng.choice([x for x in range(1, q) if gcd(x, q) == 1]))
            th = np.pi * p / q
        else:
            th = float(rng.uniform(0.1, 3.0))
        L1 = Flat.line(apex, plane[0])
        L2 = Flat.line(apex, np.cos(th) * plane[0] + np.sin(th) * plane[1])
        S12, S21 = st.build_star(L1, L2, max_iter=20_000), st.build_star(L2, L1, max_iter=20_000)
        out.checked += 1
        ok = S12.classification.kind == S21.classification.kind
        if ok and S12.classification.kind == "nstar":
            ok = _same_line_sets(_line_set(S12), _line_set(S21))
        if not ok:
            out.fail(_dump(t, angle=th, forward=str(S12.classification), backward=str(S21.classification)))


def _circle_member(x, A, period, atol):
    r = np.mod(np.asarray(A) - x, period)
    return bool(np.min(np.minimum(r, period - r)) <= atol)


def prop_nstar_dihedral_closure(trials, rng, tol, out):
    for t in range(trials):
        q = int(rng.integers(2, 25))
        p = int(rng.choice([x for x in range(1, q) if gcd(x, q) == 1]))
        S = st.star_from_angle(np.pi * p / q)
        A = S.sorted_angles()
        n = len(A)
        refl_ok = all(_circle_member(2 * b - a, A, np.pi, 1e-9) for a in A for b in A)
        rots = np.mod(2 * (A[:, None] - A[None, :]), 2 * np.pi).ravel()
        rots = np.sort(np.mod(np.round(rots / (2 * np.pi / n)), n))
        order = 2 * len(np.unique(rots))
        out.checked += 1
        if S.classification.kind != "nstar" or S.classification.n != q or not refl_ok or order != 2 * n:
            out.fail(_dump(t, angle=np.pi * p / q, star=str(S.classification), closed=refl_ok, order=order))


def prop_density_transfer(trials, rng, tol, out):
    for t in range(trials):
        rev = equatorial_revolution(3, 2, int(rng.integers(1 << 30)))
        f0, f1 = rev.frame[1], rev.frame[2]
        L1 = Flat.line(rev.core.base, f0)
        L2 = Flat.line(rev.core.base, np.cos(1.0) * f0 + np.sin(1.0) * f1)
        S = st.build_star(L1, L2)
        target = float(rng.uniform(0, np.pi))
        gaps = np.abs(np.mod(S.angles - target + np.pi / 2, np.pi) - np.pi / 2)
        i = int(np.argmin(gaps))
        cl = is_axis_of_symmetry(rev.body, S.line(i), tol)
        out.checked += 1
        if S.classification.kind != "dense" or gaps[i] > 1e-3 or not cl.verdict:
            out.fail(_dump(t, rev.body, target=target, miss=float(gaps[i]), residual=cl.residual,
                           star=str(S.classification)))


def prop_star_classification(trials, rng, tol, out):
    for t in range(trials):
        q = int(rng.integers(2, st.Q_MAX + 1))
        p = int(rng.integers(1, q))
        got = st.classify_star(np.pi * p / q)
        out.checked += 1
        want = q // gcd(p, q)
        if got.kind != "nstar" or got.n != want:
            out.fail(_dump(t, p=p, q=q, got=str(got), want=want))
    for t, th in enumerate([1.0, np.sqrt(2.0), np.e - 1.0, 2.0]):
        got = st.classify_star(th)
        out.checked += 1
        if got.kind != "dense":
            out.fail(_dump(t, angle=th, got=str(got)))


# ---------------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------------

def _planes_through_line(line: Flat, n: int = 6):
    W = line.normals
    return [Flat.hyperplane(line.base, np.cos(a) * W[0] + np.sin(a) * W[1]) for a in np.arange(n) * np.pi / n]


def prop_round_trip(trials, rng, tol, out):
    for t in range(trials):
        fam = t % 3
        if fam == 0:
            inst = revolution_instance(3, 2, int(rng.integers(1 << 30)))
            K = inst.body
            rep = theorem_fantasia_pipeline(K, _planes_through_line(inst.core), tol)
        elif fam == 1:
            K = make_ball(3, float(rng.uniform(0.5, 2)), rng.uniform(-1, 1, 3))
            axes = [Flat.line(K.c, random_unit(3, rng)) for _ in range(4)]
            rep = theorem_dream_pipeline(K, axes, tol)
        else:
            inst = symmetric_polytope_instance(int(rng.integers(1 << 30)), group="mirror")
            K = inst.body
            rep = theorem_fantasia_pipeline(K, inst.mirrors, tol)
        out.checked += 1
        if rep.status != "verified" or rep.conclusion.residual > tol.abs * K.scale:
            out.fail(_dump(t, K, report=rep.to_dict()))


def negative_reports(K, tol):
    """All pipelines run on a body that should support none of their conclusions."""
    d = K.d
    c = K.circumcenter
    R = random_rotation(d, np.random.default_rng(17))
    reps = [
        theorem_grandota_pipeline(K, c, Flat(c, R[:2]), tol),
        theorem_dream_pipeline(K, [Flat.line(c, R[i]) for i in range(3)], tol),
        theorem_dream_pipeline(K, [Flat.line(c, R[0]), Flat.line(c, R[0] + 0.5 * R[1])], tol),
        theorem_fantasia_pipeline(K, [Flat.hyperplane(c, r) for r in R], tol),
        theorem_brasil_pipeline(K, c, 3, tol),
    ]
    if d == 3:
        reps.append(theorem_copaoro_pipeline(K, c, Flat(c, R[:2]), 1, tol))
    return reps


def prop_negative_soundness(trials, rng, tol, out):
    for t in range(trials):
        if t % 2 == 0:
            K = apply_isometry(make_cube(3), Isometry(random_rotation(3, rng), rng.uniform(-1, 1, 3)))
        else:
            K = make_random_polytope(int(rng.integers(1 << 30)), n=12, d=3)
        for rep in negative_reports(K, tol):
            out.checked += 1
            if rep.conclusion.type != "inconclusive":
                out.fail(_dump(t, K, report=rep.to_dict()))


def prop_dream_perpendicular_gate(trials, rng, tol, out):
    for t in range(trials):
        if t % 2:
            K = make_ball(3, 1.0, rng.uniform(-1, 1, 3))
            c = K.c
            R = random_rotation(3, rng)
        else:
            rev = equatorial_revolution(3, 2, int(rng.integers(1 << 30)))
            K, c, R = rev.body, rev.core.base, rev.frame
        axes = [Flat.line(c, r) for r in R[int(t % 2 == 0):]]
        rep = theorem_dream_pipeline(K, axes, tol)
        out.checked += 1
        if rep.conclusion.type != "inconclusive" or rep.hypotheses[0].passed is False:
            out.fail(_dump(t, K, report=rep.to_dict()))


def prop_fantasia_branch_consistency(trials, rng, tol, out):
    for t in range(trials):
        d = int(rng.choice([3, 4]))
        K = make_ball(d)
        kk = int(rng.integers(0, d - 1))
        G = Flat(np.zeros(d), random_rotation(d, rng)[:kk] if kk else np.empty((0, d)))
        W = G.normals
        planes = [Flat.hyperplane(np.zeros(d), rng.normal(size=W.shape[0]) @ W) for _ in range(d + 1)]
        _, k_found = common_flat(planes, tol)
        rep = theorem_fantasia_pipeline(K, planes, tol)
        sphere_branch = any(s.startswith("branch: sphere") for s in rep.notes)
        out.checked += 1
        if k_found != kk or sphere_branch != (k_found <= 0):
            out.fail(_dump(t, K, expected_k=kk, found_k=k_found, notes=rep.notes))


def prop_mirror_limit_circle(trials, rng, tol, out):
    ns = list(range(3, 3 + max(trials, 3)))
    res = [sphere_fit(make_regular_polygon(n, 1.0, float(rng.uniform(0, 1))), tol)[2] for n in ns]
    stars = [orthogonal_symmetry_lines(make_regular_polygon(n), tol).classification for n in ns]
    out.checked += len(ns)
    if np.any(np.diff(res) >= 0):
        out.fail(_dump(0, n=ns, residuals=res))
    for n, sc in zip(ns, stars):
        if sc.kind != "nstar" or sc.n != n:
            out.fail(_dump(n, n=n, star=str(sc)))


SUITES = {
    "geometry": [prop_isometries_preserve_distance, prop_coaxis_rotation_angle, prop_involutions_commute,
                 prop_affine_hull_idempotent_monotone],
    "bodies": [prop_support_sublinear, prop_meb_isometry, prop_section_commutes_with_isometry,
               prop_revolution_sphere_sections, prop_shadow_boundary_two_components],
    "metrics": [prop_busemann_metric_axioms, prop_busemann_hausdorff_sandwich,
                prop_hausdorff_isometry_invariance, prop_busemann_points_exact, prop_flat_sequence_limit],
    "symmetry": [prop_circumsphere_concurrency, prop_closure_of_axes, prop_central_section_limit,
                 prop_k_axis_mode_agreement, prop_coaxis_start_independence],
    "star": [prop_star_lines_are_axes, prop_star_swap_invariance, prop_nstar_dihedral_closure,
             prop_density_transfer, prop_star_classification],
    "classify": [prop_round_trip, prop_negative_soundness, prop_dream_perpendicular_gate,
                 prop_fantasia_branch_consistency, prop_mirror_limit_circle],
}


def _prop_name(fn) -> str:
    return fn.__name__.removeprefix("prop_")


def run_suite(name: str, trials: int = 5, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Run one suite (or ``"all"``) and return the JSON-ready summary."""
    if name != "all" and name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    if trials < 1:
        raise ValueError("trials must be positive")
    modules = list(SUITES) if name == "all" else [name]
    results = []
    for mod in modules:
        for fn in SUITES[mod]:
            pname = _prop_name(fn)
            rng = np.random.default_rng([seed, zlib.crc32(f"{mod}/{pname}".encode())])
            res = PropertyResult(mod, pname)
            fn(trials, rng, tol.with_(seed=seed), res)
            results.append(res)
    return {"suite": name, "trials": int(trials), "seed": int(seed),
            "passed": all(r.passed for r in results), "properties": [r.to_dict() for r in results]}
