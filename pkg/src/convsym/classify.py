"""Sphere, ellipsoid and revolution detectors, theorem pipelines and the conjecture probe.

Each pipeline checks the hypotheses of a classification theorem on finite
samples (one failing sample fails the hypothesis) and then verifies the
conclusion independently with a fit. A conclusion is only asserted when its
own residual is below ``tol.abs * scale``; it is never inferred from the
hypotheses alone.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize

from .bodies import (ConvexBody, Polytope, SectionBody, is_strictly_convex, section)
from .geometry import (ContainmentError, DimensionError, Flat, affine_hull, complement_basis,
                       orth_complement, orthonormalize, random_rotation,
                       rotation_about_line)
from .symmetry import (_interior_point_on, _points_on_flat, detect_axes, is_axis_of_symmetry,
                       is_hyperplane_of_symmetry, is_k_axis_of_symmetry,
                       is_rotation_coaxis_of_order)
from .tolerance import DEFAULT_TOL, Tolerance, parallel_map, symmetric_directions


class UnsupportedBodyError(ValueError):
    """The body lacks a property the check requires (e.g. smoothness)."""


# ---------------------------------------------------------------------------------
# report types
# ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    note: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "pass": bool(self.passed), "residual": _finite(self.residual)}
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class Conclusion:
    """``type`` is ``sphere``, ``k_body_of_revolution``, ``ellipsoid`` or ``inconclusive``."""

    type: str
    residual: float
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"type": self.type, **self.data, "residual": _finite(self.residual)}


@dataclass(frozen=True)
class ClassificationReport:
    theorem: str
    hypotheses: list
    conclusion: Conclusion
    samples_used: int
    seed: int
    diagnostics: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def hypotheses_pass(self) -> bool:
        return all(c.passed for c in self.hypotheses)

    @property
    def status(self) -> str:
        if not self.hypotheses_pass:
            return "hypothesis_failed"
        return "inconclusive" if self.conclusion.type == "inconclusive" else "verified"

    @property
    def exit_code(self) -> int:
        return {"verified": 0, "hypothesis_failed": 1, "inconclusive": 3}[self.status]

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "status": self.status,
            "hypotheses": [c.to_dict() for c in self.hypotheses],
            "conclusion": self.conclusion.to_dict(),
            "diagnostics": [c.to_dict() for c in self.diagnostics],
            "notes": list(self.notes),
            "samples_used": int(self.samples_used),
            "seed": int(self.seed),
        }


def _finite(x: float):
    x = float(x)
    return x if np.isfinite(x) else None


INCONCLUSIVE = Conclusion("inconclusive", float("inf"))


@dataclass(frozen=True, eq=False)
class RevolutionStructure:
    """Splitting ``E^d = core (d-k) + fiber (k)`` of a k-body of revolution."""

    k: int
    core: Flat
    fiber_dirs: np.ndarray
    residual: float = float("inf")

    def to_dict(self) -> dict:
        return {"k": self.k, "core": self.core.to_dict(),
                "fiber_dirs": self.fiber_dirs.tolist(), "residual": _finite(self.residual)}


# ---------------------------------------------------------------------------------
# fits
# ---------------------------------------------------------------------------------

def _fit_target(obj, tol: Tolerance, n_dirs: int | None = None):
    """Body and direction sample for a body or a section (chart coordinates)."""
    if isinstance(obj, SectionBody):
        body = obj.body
        m = body.d
        n = n_dirs or (tol.n_directions(m) if isinstance(body, Polytope) else min(tol.n_directions(m), 128))
        return body, symmetric_directions(m, n), obj.to_ambient
    return obj, symmetric_directions(obj.d, n_dirs or tol.n_directions(obj.d)), (lambda y: y)


def sphere_fit(obj, tol: Tolerance = DEFAULT_TOL, n_dirs: int | None = None):
    """Least-squares ``h(u) = <c, u> + r``; returns ``(center, radius, sup residual)``.

    For a :class:`SectionBody` the fit runs in the carrier chart and the
    centre is returned in ambient coordinates.
    """
    body, U, to_ambient = _fit_target(obj, tol, n_dirs)
    h = body.h(U)
    A = np.column_stack([U, np.ones(len(U))])
    sol, *_ = np.linalg.lstsq(A, h, rcond=None)
    res = float(np.max(np.abs(A @ sol - h)))
    return np.asarray(to_ambient(sol[:-1])), float(sol[-1]), res


def _ellipsoid_residual(U, h, c, M):
    q = np.einsum("ij,jk,ik->i", U, M, U)
    if np.any(q <= 0):
        return float("inf")
    return float(np.max(np.abs(h - U @ c - np.sqrt(q))))


def ellipsoid_fit(obj, tol: Tolerance = DEFAULT_TOL, refine: bool = True):
    """Fit ``h(u) = <c, u> + sqrt(u^T M u)``; returns ``(center, M, sup residual)``.

    The centre solves ``(h(u) - h(-u)) / 2 = <c, u>`` and ``M`` solves
    ``((h(u) + h(-u)) / 2)^2 = u^T M u``, both linear and exact for
    ellipsoids. When that residual exceeds the threshold a nonlinear
    least-squares polish over ``(c, L)`` with ``M = L L^T`` follows. A fit
    matrix that is not positive definite gives an infinite residual.
    """
    body, U, to_ambient = _fit_target(obj, tol)
    m = body.d
    h = body.h(U)
    half = len(U) // 2
    Up, hp, hm = U[:half], h[:half], h[half:]
    c, *_ = np.linalg.lstsq(Up, 0.5 * (hp - hm), rcond=None)
    w = (0.5 * (hp + hm)) ** 2
    iu = np.triu_indices(m)
    feats = np.column_stack([Up[:, i] * Up[:, j] * (1.0 if i == j else 2.0) for i, j in zip(*iu)])
    coef, *_ = np.linalg.lstsq(feats, w, rcond=None)
    M = np.zeros((m, m))
    M[iu] = coef
    M = M + np.triu(M, 1).T
    res = _ellipsoid_residual(U, h, c, M)
    scale = max(1.0, float(np.max(np.abs(h))))
    if refine and res > tol.abs * scale and np.all(np.linalg.eigvalsh(M) > 0):
        L0 = np.linalg.cholesky(M)
        il = np.tril_indices(m)

        def resid(x):
            L = np.zeros((m, m))
            L[il] = x[m:]
            return h - U @ x[:m] - np.linalg.norm(U @ L, axis=1)

        sol = least_squares(resid, np.r_[c, L0[il]], method="lm")
        L = np.zeros((m, m))
        L[il] = sol.x[m:]
        c2, M2 = sol.x[:m], L @ L.T
        res2 = _ellipsoid_residual(U, h, c2, M2)
        if res2 < res:
            c, M, res = c2, M2, res2
    if not np.all(np.linalg.eigvalsh(M) > 0):
        res = float("inf")
    return np.asarray(to_ambient(c)), M, res


# ---------------------------------------------------------------------------------
# bodies of revolution
# ---------------------------------------------------------------------------------

_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def _fiber_moves(k: int) -> list[np.ndarray]:
    """Fiber-space maps whose joint invariance forces O(k)-invariance of the sections."""
    if k == 1:
        return [-np.eye(1)]
    out = []
    for i in range(k - 1):
        R = np.eye(k)
        c, s = np.cos(_GOLDEN_ANGLE), np.sin(_GOLDEN_ANGLE)
        R[[i, i, i + 1, i + 1], [i, i + 1, i, i + 1]] = [c, -s, s, c]
        out.append(R)
    return out


def _invariance_residuals(K: ConvexBody, F: np.ndarray, o: np.ndarray, U: np.ndarray, h: np.ndarray):
    """``h(u) - h_{T(K)}(u)`` for the fiber moves ``T`` about the frame ``(F, o)``."""
    d, k = K.d, F.shape[0]
    P = np.eye(d) - F.T @ F
    out = []
    for Q in _fiber_moves(k):
        A = P + F.T @ Q @ F
        out.append(h - (K.h(U @ A) + U @ (o - A @ o)))
    return np.concatenate(out)


def _frame_from_params(F0, C0, o0, x, k):
    X = x[: k * C0.shape[0]].reshape(k, C0.shape[0])
    F = orthonormalize(F0 + X @ C0)
    o = o0 + x[k * C0.shape[0]:] @ F0
    return F, o


def _refine_frame(K, F0, o0, U, h):
    d, k = K.d, F0.shape[0]
    C0 = complement_basis(F0, d)
    n = k * (d - k) + k
    fun = lambda x: _invariance_residuals(K, *_frame_from_params(F0, C0, o0, x, k), U, h)
    sol = least_squares(fun, np.zeros(n), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200 * n)
    F, o = _frame_from_params(F0, C0, o0, sol.x, k)
    return F, o, float(np.max(np.abs(fun(sol.x))))


def _frame_seeds(K: ConvexBody, k: int, o: np.ndarray, tol: Tolerance, n_random: int = 8):
    """Candidate fibers: eigenvector subsets of the boundary second moment, plus random ones.

    The quasi-uniform direction measure is nearly rotation invariant, so for
    a body of revolution the fiber is (nearly) an eigenspace of the second
    moment of the support points about the core.
    """
    d = K.d
    _, S = K.support(symmetric_directions(d, 2048))
    Y = S - o
    _, E = np.linalg.eigh(Y.T @ Y / len(Y))
    seeds = [E[:, list(idx)].T for idx in itertools.combinations(range(d), k)]
    if isinstance(K, Polytope) and k == 1:
        # a mirror swaps vertex pairs, so some difference of vertices is its normal
        V = K.vertices
        D = (V[:3, None, :] - V[None, :, :]).reshape(-1, d)
        D = D[np.linalg.norm(D, axis=1) > 1e-9 * K.scale]
        seeds += [x[None, :] / np.linalg.norm(x) for x in D]
    if isinstance(K, Polytope) and d - k == 1:
        seeds += [complement_basis(cl.flat.direction[None, :], d) for cl in detect_axes(K, tol=tol)[:8]]
    rng = tol.rng(7919 + k)
    seeds += [random_rotation(d, rng)[:k] for _ in range(n_random)]
    return seeds


def search_revolution_frame(K: ConvexBody, k: int, tol: Tolerance = DEFAULT_TOL, n_refine: int = 4):
    """Best fiber/core frame for a k-body of revolution by multi-start least squares."""
    o = K.circumcenter
    U = symmetric_directions(K.d, 512)
    h = K.h(U)
    seeds = _frame_seeds(K, k, o, tol)
    score = [float(np.max(np.abs(_invariance_residuals(K, F, o, U, h)))) for F in seeds]
    best = None
    for i in np.argsort(score, kind="stable")[:n_refine]:
        F, oo, r = _refine_frame(K, seeds[i], o, U, h)
        if best is None or r < best[2]:
            best = (F, oo, r)
        if r <= 1e-13 * K.scale:
            break
    return best


def _kasa_fit(Y: np.ndarray):
    """Algebraic sphere fit in R^m: returns (centre, radius)."""
    A = np.column_stack([2.0 * Y, np.ones(len(Y))])
    b = np.sum(Y * Y, axis=1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    c = sol[:-1]
    return c, float(np.sqrt(max(sol[-1] + c @ c, 0.0)))


def revolution_residual(K: ConvexBody, core: Flat, tol: Tolerance = DEFAULT_TOL, n_flats: int = 16):
    """Worst sphere-fit residual of sections by k-flats parallel to the fiber.

    Each section ``(z + fiber) ∩ K`` with ``z`` sampled on ``core ∩ int K`` is
    traced by rays from ``z``; the boundary points are fitted by a sphere
    whose centre must be ``z`` itself (i.e. on the core). The residual of one
    section is the larger of the radial deviation and the centre offset.
    """
    F = core.normals
    k = F.shape[0]
    c0 = _interior_point_on(K, core, tol) if core.dim >= 1 else None
    if c0 is None:
        return float("inf"), 0
    Z = _points_on_flat(K, core, c0, n_flats)
    V = symmetric_directions(k, 2 if k == 1 else (64 if k == 2 else 256))
    worst = 0.0
    for z in Z:
        rho = K.radial(z, V @ F)
        Y = rho[:, None] * V
        if k == 1:
            centre, dev = 0.5 * (rho[0] - rho[1]), 0.0
            worst = max(worst, abs(centre))
            continue
        cc, r = _kasa_fit(Y)
        dev = float(np.max(np.abs(np.linalg.norm(Y - cc, axis=1) - r)))
        worst = max(worst, dev, float(np.linalg.norm(cc)))
    return worst, len(Z)


def is_k_body_of_revolution(K: ConvexBody, k: int, tol: Tolerance = DEFAULT_TOL,
                            hint: RevolutionStructure | Flat | None = None, n_flats: int = 16):
    """Decide whether ``K`` is a k-body of revolution.

    ``hint`` (a structure or the core flat) fixes the frame; otherwise the
    frame is searched. Returns ``(verdict, RevolutionStructure, samples)``.
    """
    d = K.d
    if not 1 <= k < d:
        raise DimensionError("need 1 <= k < d")
    if hint is not None:
        core = hint.core if isinstance(hint, RevolutionStructure) else hint
        if core.dim != d - k:
            raise DimensionError(f"core must be a {d - k}-flat")
    else:
        F, o, _ = search_revolution_frame(K, k, tol)
        core = Flat(o, complement_basis(F, d))
    res, n = revolution_residual(K, core, tol, n_flats)
    st = RevolutionStructure(k, core, core.normals, res)
    return res <= tol.abs * K.scale, st, n


# ---------------------------------------------------------------------------------
# theorem pipelines
# ---------------------------------------------------------------------------------

def _gate(name, claims, note=""):
    worst = max(claims, key=lambda c: c.residual)
    bad = [i for i, c in enumerate(claims) if not c.verdict]
    if bad and not note:
        note = f"first failing sample {bad[0]}"
    return Check(name, not bad, worst.residual, note)


def _half_sphere(m: int, n: int) -> np.ndarray:
    return symmetric_directions(m, 2 * n)[:n]


def _revolution_conclusion(K, k, core, tol, n_flats=16):
    ok, st, n = is_k_body_of_revolution(K, k, tol, hint=core, n_flats=n_flats)
    if ok:
        return Conclusion("k_body_of_revolution", st.residual, {"structure": st.to_dict()}), n
    return Conclusion("inconclusive", st.residual, {"attempted": "k_body_of_revolution"}), n


def _sphere_conclusion(K, tol, centre=None):
    c, r, res = sphere_fit(K, tol)
    if centre is not None:
        res = max(res, float(np.linalg.norm(c - centre)))
    data = {"center": c.tolist(), "radius": r}
    if res <= tol.abs * K.scale:
        return Conclusion("sphere", res, data)
    return Conclusion("inconclusive", res, {"attempted": "sphere", **data})


def theorem_grandota_pipeline(K: ConvexBody, p, Lam: Flat, tol: Tolerance = DEFAULT_TOL,
                              n_lines: int = 8, threads: int = 1) -> ClassificationReport:
    """Lines of ``Lam`` through ``p`` are axes  =>  k-body of revolution with fiber ``Lam``."""
    p = np.asarray(p, dtype=float)
    k = Lam.dim
    if not 2 <= k <= K.d - 1:
        raise DimensionError("Lambda must have dimension between 2 and d-1")
    if Lam.distance(p) > tol.flat * max(1.0, float(np.linalg.norm(p))):
        raise ContainmentError("p must lie on Lambda")
    dirs = _half_sphere(k, n_lines) @ Lam.basis
    lines = [Flat.line(p, e) for e in dirs]
    claims = parallel_map(lambda L: is_axis_of_symmetry(K, L, tol), lines, threads)
    hyp = [_gate("lines_through_p_in_Lambda_are_axes", claims)]
    diag = []
    if getattr(K, "smooth", False) and not isinstance(K, Polytope):
        worst = 0.0
        for L in lines:
            W = complement_basis(L.basis, K.d)
            V = symmetric_directions(K.d - 1, 64) @ W
            X = p + K.radial(p, V)[:, None] * V
            worst = max(worst, float(np.max(np.abs(K.normal(X) @ L.direction))))
        diag.append(Check("orthogonal_boundary_in_shadow_boundary", worst <= tol.abs * 100, worst,
                          "normals along L-perp cap the shadow-boundary violation"))
    notes = ["finite sample stands in for 'every line through p in Lambda'"]
    if not hyp[0].passed:
        return ClassificationReport("grandota", hyp, INCONCLUSIVE, len(lines), tol.seed, diag, notes)
    concl, n = _revolution_conclusion(K, k, orth_complement(Lam, p), tol)
    return ClassificationReport("grandota", hyp, concl, len(lines) + n, tol.seed, diag, notes)


def _common_point(lines: list[Flat]):
    d = lines[0].d
    A = np.zeros((d, d))
    b = np.zeros(d)
    for L in lines:
        P = np.eye(d) - np.outer(L.direction, L.direction)
        A += P
        b += P @ L.base
    x = np.linalg.lstsq(A, b, rcond=None)[0]
    return x, float(max(L.distance(x) for L in lines))


def theorem_dream_pipeline(K: ConvexBody, axes: list, tol: Tolerance = DEFAULT_TOL,
                           threads: int = 1) -> ClassificationReport:
    """Concurrent, pairwise non-perpendicular axes spanning a k-flat  =>  k-body of revolution
    (a sphere when k = d)."""
    axes = list(axes)
    if len(axes) < 2:
        raise ValueError("need at least two axes")
    thr = tol.abs * K.scale
    claims = parallel_map(lambda L: is_axis_of_symmetry(K, L, tol), axes, threads)
    x, spread = _common_point(axes)
    cos = [abs(float(a.direction @ b.direction)) for a, b in itertools.combinations(axes, 2)]
    hyp = [
        _gate("lines_are_axes", claims),
        Check("axes_have_common_point", spread <= thr, spread),
        Check("axes_pairwise_not_perpendicular", min(cos) > tol.abs, min(cos),
              "residual is the smallest |cos| between two axes"),
    ]
    hull = affine_hull(*[Flat(x, L.basis) for L in axes])
    k = hull.dim
    diag = [Check("common_point_at_circumcenter", True, float(np.linalg.norm(x - K.circumcenter)))]
    notes = [f"affine hull dimension k = {k}"]
    if not all(c.passed for c in hyp):
        return ClassificationReport("dream", hyp, INCONCLUSIVE, len(axes), tol.seed, diag, notes)
    if k < K.d:
        concl, n = _revolution_conclusion(K, k, orth_complement(hull, x), tol)
    else:
        concl, n = _sphere_conclusion(K, tol, centre=x), 0
    return ClassificationReport("dream", hyp, concl, len(axes) + n, tol.seed, diag, notes)


def common_flat(hyperplanes: list, tol: Tolerance = DEFAULT_TOL):
    """Largest flat contained in every hyperplane: ``(flat or None, dimension)``; empty gives -1."""
    hyperplanes = list(hyperplanes)
    if len(hyperplanes) < 1:
        raise ValueError("need at least one hyperplane")
    d = hyperplanes[0].d
    N = np.array([H.normal for H in hyperplanes])
    b = np.array([H.normal @ H.base for H in hyperplanes])
    x, *_ = np.linalg.lstsq(N, b, rcond=None)
    scale = max(1.0, float(np.max(np.abs(b))))
    if np.max(np.abs(N @ x - b)) > 1e3 * tol.flat * scale:
        return None, -1
    _, s, Vt = np.linalg.svd(N)
    rank = int(np.sum(s > 1e-9 * s[0]))
    basis = Vt[rank:]
    return Flat(x, basis if basis.size else np.empty((0, d))), d - rank


def theorem_fantasia_pipeline(K: ConvexBody, hyperplanes: list, tol: Tolerance = DEFAULT_TOL,
                              threads: int = 1) -> ClassificationReport:
    """Symmetry hyperplanes sharing a maximal k-flat Gamma  =>  (d-k)-body of revolution about
    Gamma; with no common flat of positive dimension the body is checked for being a sphere."""
    hyperplanes = list(hyperplanes)
    d = K.d
    claims = parallel_map(lambda H: is_hyperplane_of_symmetry(K, H, tol), hyperplanes, threads)
    hyp = [_gate("hyperplanes_of_symmetry", claims)]
    gamma, kk = common_flat(hyperplanes, tol)
    notes = [
        "containment read as Gamma inside every hyperplane (all mirrors share Gamma)",
        "finite input stands in for the hypothesised infinite sequence of hyperplanes",
    ]
    if len(hyperplanes) < d:
        notes.append(f"only {len(hyperplanes)} hyperplanes for d = {d}: sampling may be inadequate")
    diag = [Check("common_flat_dimension", kk >= 0, float(kk))]
    if not hyp[0].passed:
        return ClassificationReport("fantasia", hyp, INCONCLUSIVE, len(hyperplanes), tol.seed, diag, notes)
    if kk <= 0:
        notes.append("branch: sphere (no common flat of positive dimension)")
        concl = _sphere_conclusion(K, tol, centre=gamma.base if kk == 0 else None)
        n = 0
        if concl.type == "inconclusive":
            notes.append("a finite symmetry group cannot supply the infinitely many mirrors the "
                         "sphere branch assumes")
    else:
        notes.append(f"branch: revolution about the common {kk}-flat")
        concl, n = _revolution_conclusion(K, d - kk, gamma, tol)
    return ClassificationReport("fantasia", hyp, concl, len(hyperplanes) + n, tol.seed, diag, notes)


def _width_signature(S: SectionBody, n: int = 64) -> np.ndarray:
    body = S.body
    U = symmetric_directions(body.d, n)
    h = body.h(U)
    half = len(U) // 2
    return np.sort(h[:half] + h[half:])


def theorem_brasil_pipeline(K: ConvexBody, p, k: int, tol: Tolerance = DEFAULT_TOL,
                            n_flats: int = 6, n_pairs: int = 2, threads: int = 1) -> ClassificationReport:
    """(d-2)-flats through ``p`` are rotation coaxes of order ``k >= 3``  =>  sphere centred at ``p``."""
    if k < 3:
        raise ValueError("order k must be at least 3")
    p = np.asarray(p, dtype=float)
    d = K.d
    rng = tol.rng(4242)
    flats = [Flat(p, random_rotation(d, rng)[2:]) for _ in range(n_flats)]
    claims = parallel_map(lambda G: is_rotation_coaxis_of_order(K, G, k, tol), flats, threads)
    hyp = [_gate(f"coaxes_through_p_of_order_{k}", claims)]
    diag = []
    sigs = []
    for _ in range(2 * n_pairs):
        S = section(K, Flat.hyperplane(p, random_rotation(d, rng)[0]), tol)
        if S is not None:
            sigs.append(_width_signature(S))
    if len(sigs) >= 2:
        worst = max(float(np.max(np.abs(a - b))) for a, b in zip(sigs[::2], sigs[1::2]))
        diag.append(Check("sections_through_p_congruence_signature", worst <= 1e-6 * K.scale, worst,
                          "sorted width profiles of hyperplane sections through p"))
    notes = ["finite sample stands in for 'every (d-2)-flat through p'"]
    if not hyp[0].passed:
        return ClassificationReport("brasil", hyp, INCONCLUSIVE, n_flats, tol.seed, diag, notes)
    concl = _sphere_conclusion(K, tol, centre=p)
    return ClassificationReport("brasil", hyp, concl, n_flats, tol.seed, diag, notes)


def theorem_copaoro_pipeline(K: ConvexBody, p, Lam: Flat, k: int, tol: Tolerance = DEFAULT_TOL,
                             n_flats: int = 6, threads: int = 1) -> ClassificationReport:
    """Strictly convex ``K`` whose k-flats of ``Lam`` through ``p`` are k-axes  =>
    (k+1)-body of revolution with fiber ``Lam``."""
    d = K.d
    p = np.asarray(p, dtype=float)
    if not 1 <= k <= d - 2:
        raise DimensionError("need 1 <= k <= d-2")
    if Lam.dim != k + 1:
        raise DimensionError("Lambda must be a (k+1)-flat")
    if Lam.distance(p) > tol.flat * max(1.0, float(np.linalg.norm(p))):
        raise ContainmentError("p must lie on Lambda")
    notes = ["finite sample stands in for 'every k-flat of Lambda through p'"]
    strict = is_strictly_convex(K, tol)
    hyp = [Check("strictly_convex", strict, 0.0 if strict else 1.0,
                 "" if strict else "boundary segment found by the strict-convexity probe")]
    if not strict:
        return ClassificationReport("copaoro", hyp, INCONCLUSIVE, 0, tol.seed, [], notes)
    W = _half_sphere(k + 1, n_flats) @ Lam.basis
    gammas = [Flat(p, complement_basis(np.vstack([w, Lam.normals]), d)) for w in W]
    claims = parallel_map(lambda G: is_k_axis_of_symmetry(K, G, tol, mode="mundial"), gammas, threads)
    hyp.append(_gate("k_flats_through_p_in_Lambda_are_k_axes", claims))
    if not hyp[-1].passed:
        return ClassificationReport("copaoro", hyp, INCONCLUSIVE, n_flats, tol.seed, [], notes)
    concl, n = _revolution_conclusion(K, k + 1, orth_complement(Lam, p), tol)
    return ClassificationReport("copaoro", hyp, concl, n_flats + n, tol.seed, [], notes)


def _min_violation(N: np.ndarray, rng: np.random.Generator, n_starts: int = 16, good: float = 0.0):
    """``min_{|l| = 1} max_i |<N_i, l>|`` by multi-start descent; returns (value, l).

    The first start is the least-squares direction (smallest right singular
    vector); the search stops early once a value below ``good`` is found.
    """
    obj = lambda v: float(np.max(np.abs(N @ v))) / float(np.linalg.norm(v))
    starts = [np.linalg.svd(N)[2][-1]] + [rng.standard_normal(N.shape[1]) for _ in range(n_starts - 1)]
    best = (np.inf, None)
    for s in starts:
        val = obj(s)
        if val > 1e-14:
            res = minimize(obj, s, method="Nelder-Mead",
                           options={"xatol": 1e-14, "fatol": 1e-16, "maxiter": 300 * N.shape[1]})
            s, val = res.x, float(res.fun)
        if val < best[0]:
            best = (val, s / np.linalg.norm(s))
        if best[0] <= good:
            break
    return best


def cabezon_condition_check(K: ConvexBody, n_hyperplanes: int = 12, tol: Tolerance = DEFAULT_TOL,
                            n_points: int = 64) -> ClassificationReport:
    """Shadow-boundary condition on central sections, then an ellipsoid fit.

    For each sampled hyperplane ``H`` through the origin a line direction
    ``l_H`` is sought so that every sampled boundary point of ``H ∩ K`` has
    its normal orthogonal to ``l_H`` (i.e. lies on the shadow boundary of
    ``K`` in direction ``l_H``).
    """
    d = K.d
    if d < 3:
        raise DimensionError("the check needs d >= 3")
    if isinstance(K, Polytope) or not getattr(K, "smooth", False):
        raise UnsupportedBodyError("the shadow-boundary check needs a smooth body")
    if K.level(np.zeros(d)) >= 1.0:
        raise ValueError("the origin must be an interior point")
    rng = tol.rng(2718)
    worst, dirs = 0.0, []
    normals = _half_sphere(d, n_hyperplanes)
    for n in normals:
        B = complement_basis(n[None, :], d)
        V = symmetric_directions(d - 1, n_points) @ B
        X = K.radial(np.zeros(d), V)[:, None] * V
        val, ell = _min_violation(K.normal(X), rng, good=1e-3 * tol.abs)
        worst = max(worst, val)
        dirs.append(ell)
    hyp = [Check("central_section_boundaries_in_shadow_boundaries", worst <= tol.abs, worst,
                 "residual is the worst minimized |<normal, l_H>|")]
    notes = ["finite sample stands in for 'every hyperplane through the origin'"]
    if not hyp[0].passed:
        return ClassificationReport("cabezon", hyp, INCONCLUSIVE, n_hyperplanes, tol.seed, [], notes)
    c, M, res = ellipsoid_fit(K, tol)
    if res <= tol.abs * K.scale:
        concl = Conclusion("ellipsoid", res, {"center": c.tolist(), "shape_matrix": M.tolist()})
    else:
        concl = Conclusion("inconclusive", res, {"attempted": "ellipsoid"})
    return ClassificationReport("cabezon", hyp, concl, n_hyperplanes, tol.seed, [], notes)


# ---------------------------------------------------------------------------------
# conjecture probe
# ---------------------------------------------------------------------------------

def bounded_orbit(points, generators, max_points: int = 600, decimals: int = 9) -> np.ndarray:
    """Breadth-first orbit of ``points`` under ``generators`` (isometries), capped at ``max_points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    seen = {tuple(np.round(x, decimals)) for x in P}
    out = list(P)
    frontier = list(P)
    while frontier and len(out) < max_points:
        nxt = []
        for x in frontier:
            for T in generators:
                y = T(x)
                key = tuple(np.round(y, decimals))
                if key not in seen:
                    seen.add(key)
                    out.append(y)
                    nxt.append(y)
                    if len(out) >= max_points:
                        return np.array(out)
        frontier = nxt
    return np.array(out)


@dataclass(frozen=True)
class ProbeRow:
    trial: int
    n_coaxes: int
    order: int
    n_points: int
    sphere_residual: float


def conjecture_probe(seed: int = 0, trials: int = 3, orders=(3, 4, 5), max_coaxes: int = 3,
                     tol: Tolerance = DEFAULT_TOL, body: ConvexBody | None = None,
                     n_seed_points: int = 4, max_points: int = 600) -> dict:
    """Sphere-fit residual of bodies invariant under finitely many rotation coaxes (E^3).

    Each trial draws seed points and coaxis lines through the origin; for
    ``n`` coaxes of order ``k`` the hull of the bounded orbit is fitted by a
    sphere. With ``body`` given, that body's own sphere residual fills every
    row. This is numerical evidence only and never a proof.
    """
    rows = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        pts = rng.standard_normal((n_seed_points, 3))
        pts *= rng.uniform(0.5, 1.0, (n_seed_points, 1)) / np.linalg.norm(pts, axis=1, keepdims=True)
        lines = [Flat.line(np.zeros(3), rng.standard_normal(3)) for _ in range(max_coaxes)]
        for order in orders:
            for n in range(1, max_coaxes + 1):
                if body is not None:
                    res, npts = sphere_fit(body, tol)[2], 0
                else:
                    gens = [rotation_about_line(L, 2.0 * np.pi / order) for L in lines[:n]]
                    P = bounded_orbit(pts, gens, max_points)
                    res, npts = sphere_fit(Polytope(P), tol)[2], len(P)
                rows.append(ProbeRow(t, n, int(order), npts, float(res)))
    summary = []
    for order in orders:
        med = [float(np.median([r.sphere_residual for r in rows if r.order == order and r.n_coaxes == n]))
               for n in range(1, max_coaxes + 1)]
        summary.append({"order": int(order), "median_residual_by_n_coaxes": med,
                        "non_increasing": bool(np.all(np.diff(med) <= 1e-12))})
    return {"rows": rows, "summary": summary,
            "label": "numerical evidence only; no counterexample or proof is claimed"}
