import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog, minimize

from convsym.bodies import (BodyError, LpBody, Polytope, apply_isometry, bodies_equal, body_from_dict,
                            is_segment_free, is_strictly_convex, make_ball, make_cube, make_ellipsoid,
                            make_k_body_of_revolution, make_lp_body, make_random_polytope,
                            make_regular_polygon, make_symmetric_polytope, meb_points,
                            minimum_enclosing_ball, section, shadow_boundary)
from convsym.families import reflection_group, revolution_instance
from convsym.geometry import Flat, Isometry, random_rotation, random_unit
from convsym.reports import validate

seeds = st.integers(0, 2**31 - 1)


# --- independent oracles --------------------------------------------------------------

def in_hull_lp(V, x):
    """x in conv(V) iff nonnegative weights summing to 1 reproduce x (LP feasibility)."""
    n = len(V)
    res = linprog(np.zeros(n), A_eq=np.vstack([V.T, np.ones(n)]), b_eq=np.r_[x, 1.0],
                  bounds=[(0, None)] * n, method="highs")
    return res.status == 0


def meb_brute_force(P):
    """Smallest enclosing ball by exhaustive search over support subsets of size <= d+1."""
    n, d = P.shape
    best = (None, np.inf)
    for size in range(1, d + 2):
        for sub in itertools.combinations(range(n), size):
            S = P[list(sub)]
            p0, D = S[0], S[1:] - S[0]
            if len(D):
                G = D @ D.T
                if abs(np.linalg.det(G)) < 1e-12:
                    continue
                c = p0 + np.linalg.solve(G, 0.5 * np.sum(D * D, axis=1)) @ D
            else:
                c = p0
            r = np.max(np.linalg.norm(P - c, axis=1))
            if r < best[1] - 1e-13:
                best = (c, r)
    return best


def meb_slsqp(P):
    """Minimize t subject to |x_i - c|^2 <= t (a convex program)."""
    d = P.shape[1]
    c0 = P.mean(axis=0)
    x0 = np.r_[c0, np.max(np.sum((P - c0) ** 2, axis=1))]
    cons = {"type": "ineq", "fun": lambda z: z[-1] - np.sum((P - z[:d]) ** 2, axis=1)}
    res = minimize(lambda z: z[-1], x0, constraints=[cons], method="SLSQP",
                   options={"ftol": 1e-15, "maxiter": 500})
    return res.x[:d], np.sqrt(res.x[-1])


# --- support functions ------------------------------------------------------------------

def test_cube_support_is_l1_norm(rng):
    K = make_cube(4, half=1.5)
    U = rng.normal(size=(50, 4))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    np.testing.assert_allclose(K.h(U), 1.5 * np.abs(U).sum(axis=1), atol=1e-14)
    assert len(K.vertices) == 16


def test_ellipsoid_support_closed_form(rng):
    Q = random_rotation(3, rng)
    a = np.array([0.5, 1.0, 2.0])
    c = rng.normal(size=3)
    K = make_ellipsoid(c, a, Q)
    U = rng.normal(size=(40, 3))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    M = Q @ np.diag(a ** 2) @ Q.T
    expected = U @ c + np.sqrt(np.einsum("ij,jk,ik->i", U, M, U))
    np.testing.assert_allclose(K.h(U), expected, atol=1e-12)
    # attaining points lie on the boundary and maximize <x, u>
    _, S = K.support(U)
    np.testing.assert_allclose(K.level(S), 1.0, atol=1e-10)


def test_lp_body_support_attains(rng):
    K = make_lp_body(np.zeros(3), [1.0, 0.7, 1.3], random_rotation(3, rng), p=3.5)
    U = rng.normal(size=(30, 3))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    h, S = K.support(U)
    np.testing.assert_allclose(np.einsum("ij,ij->i", U, S), h, atol=1e-12)
    np.testing.assert_allclose(K.level(S), 1.0, atol=1e-9)
    # no boundary sample beats the support value
    B = K.radial(np.zeros(3), U)[:, None] * U
    assert np.all(B @ U.T <= h[None, :] + 1e-9)


@given(seeds)
def test_support_is_sublinear(seed):
    rng = np.random.default_rng(seed)
    K = make_random_polytope(seed % 1000, n=10, d=3)
    u, v = rng.normal(size=(2, 3))
    t = rng.uniform(0.1, 3.0)
    support = lambda x: np.linalg.norm(x) * K.h(x / np.linalg.norm(x))
    assert support(u + v) <= support(u) + support(v) + 1e-12
    assert support(t * u) == pytest.approx(t * support(u), rel=1e-12)


@given(seeds)
def test_polytope_distance_matches_qp_oracle(seed):
    rng = np.random.default_rng(seed)
    K = make_random_polytope(seed % 1000, n=9, d=3)
    X = rng.normal(scale=2.0, size=(3, 3))
    V = K.vertices
    for x, dist in zip(X, K.distance(X)):
        n = len(V)
        res = minimize(lambda w: np.sum((w @ V - x) ** 2), np.full(n, 1.0 / n), method="SLSQP",
                       bounds=[(0, 1)] * n, constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1}],
                       options={"ftol": 1e-14, "maxiter": 400})
        assert dist == pytest.approx(np.sqrt(max(res.fun, 0.0)), abs=1e-6)


# --- minimum enclosing ball -----------------------------------------------------------

@given(seeds, st.integers(2, 4))
def test_meb_matches_brute_force(seed, d):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(9, d))
    c, r = meb_points(P)
    cb, rb = meb_brute_force(P)
    assert r == pytest.approx(rb, abs=1e-10)
    np.testing.assert_allclose(c, cb, atol=1e-7)


def test_meb_of_oracle_body_matches_slsqp(rng):
    K = make_ellipsoid(rng.normal(size=3), [0.6, 1.1, 1.7], random_rotation(3, rng))
    c, r = minimum_enclosing_ball(K)
    U = rng.normal(size=(4000, 3))
    _, S = K.support(U / np.linalg.norm(U, axis=1, keepdims=True))
    _, rs = meb_slsqp(S)
    assert r == pytest.approx(1.7, abs=1e-8)
    np.testing.assert_allclose(c, K.c, atol=1e-6)
    assert rs <= r + 1e-8


@given(seeds)
def test_meb_commutes_with_isometries(seed):
    rng = np.random.default_rng(seed)
    K = make_random_polytope(seed % 1000, n=12, d=3)
    T = Isometry(random_rotation(3, rng), rng.normal(size=3))
    c, r = minimum_enclosing_ball(K)
    c2, r2 = minimum_enclosing_ball(apply_isometry(K, T))
    assert r2 == pytest.approx(r, abs=1e-10)
    np.testing.assert_allclose(c2, T(c), atol=1e-9)


# --- sections ---------------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(6))
def test_polytope_section_agrees_with_lp_membership(seed):
    rng = np.random.default_rng(seed)
    K = make_random_polytope(seed, n=14, d=3)
    c = K.interior_point()
    H = Flat(c, rng.normal(size=(2, 3)))
    S = section(K, H)
    assert S is not None and S.dim == 2
    Y = rng.uniform(-1.2, 1.2, size=(40, 2))
    inside = S.body.contains(Y, tol=1e-9)
    for y, got in zip(Y, inside):
        x = H.from_chart(y)
        if abs(K.level(x) - 1.0) < 1e-6:
            continue  # too close to the boundary for a sharp comparison
        assert got == in_hull_lp(K.vertices, x)


def test_section_missing_body_is_none():
    K = make_cube(3)
    assert section(K, Flat.hyperplane([0, 0, 5.0], [0, 0, 1])) is None
    assert section(make_ball(3), Flat.line([0, 3.0, 0], [1, 0, 0])) is None


def test_oracle_section_of_ball_is_disk():
    K = make_ball(3, 2.0)
    S = section(K, Flat.hyperplane([0, 0, 1.0], [0, 0, 1]))
    U = np.array([[np.cos(a), np.sin(a)] for a in np.linspace(0, np.pi, 7)])
    np.testing.assert_allclose(S.body.h(U) - U @ S.to_chart([0, 0, 1.0]), np.sqrt(3.0), atol=1e-7)


@given(seeds)
def test_revolution_sections_are_spheres(seed):
    inst = revolution_instance(3, 2, seed % 500)
    K, core = inst.body, inst.core
    rng = np.random.default_rng(seed)
    z = K.interior_point()
    o = core.project(z)
    F = Flat(o, inst.frame[1:])
    U = rng.normal(size=(12, 2))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    r = K.radial(o, U @ F.basis)
    np.testing.assert_allclose(r, r[0], rtol=1e-9)


# --- shadow boundaries and convexity flags --------------------------------------------

def test_cube_shadow_boundary_contains_segments():
    K = make_cube(3)
    assert not is_segment_free(K, Flat.line([0, 0, 0], [0, 0, 1]))
    assert is_segment_free(make_ball(3), Flat.line([0, 0, 0], [0, 0, 1]))
    sb = shadow_boundary(make_ball(3), Flat.line([0, 0, 0], [0, 0, 1]))
    assert sb is not None


def test_strict_convexity_flags():
    assert is_strictly_convex(make_ellipsoid(np.zeros(3), [1, 2, 3]))
    assert not is_strictly_convex(make_cube(3))


# --- symmetric polytopes and JSON -----------------------------------------------------

def test_symmetric_polytope_is_invariant(rng):
    G = reflection_group(3, np.eye(3))
    P = make_symmetric_polytope(rng.uniform(-1, 1, (4, 3)), G)
    for T in G:
        assert bodies_equal(P, apply_isometry(P, T))
    np.testing.assert_allclose(P.circumcenter, 0.0, atol=1e-12)


def test_regular_polygon_vertices():
    P = make_regular_polygon(6, 2.0)
    np.testing.assert_allclose(np.linalg.norm(P.vertices, axis=1), 2.0)
    assert len(P.vertices) == 6


def test_degenerate_polytope_rejected():
    with pytest.raises(BodyError):
        Polytope(np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=float))
    with pytest.raises(BodyError):
        make_k_body_of_revolution(3, 3, Flat.point(np.zeros(3)), {"kind": "lp", "semi_axes": [],
                                                                 "radius": 1.0})


@pytest.mark.parametrize("make", [
    lambda: make_cube(3),
    lambda: make_ellipsoid([0.5, 0, 0], [1, 2, 3], random_rotation(3, np.random.default_rng(1))),
    lambda: make_lp_body(np.zeros(4), [1, 1, 2, 1], p=3.0),
    lambda: revolution_instance(4, 2, 7).body,
    lambda: revolution_instance(3, 1, 2).body,
])
def test_body_json_round_trip(make, rng):
    K = make()
    data = K.to_dict()
    validate(data, "body")
    K2 = body_from_dict(data)
    U = rng.normal(size=(64, K.d))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    np.testing.assert_allclose(K2.h(U), K.h(U), atol=1e-12)


def test_radial_accepts_one_origin_per_row(rng):
    K = make_ellipsoid(np.zeros(3), [1, 2, 3])
    C = rng.uniform(-0.3, 0.3, (5, 3))
    V = np.array([random_unit(3, rng) for _ in range(5)])
    batched = K.radial(C, V)
    single = np.array([K.radial(c, v[None])[0] for c, v in zip(C, V)])
    np.testing.assert_allclose(batched, single, atol=1e-12)
    assert isinstance(K, LpBody)
