"""Acceptance criteria, one test each.

Every test records a one-line PASS/FAIL verdict with its measured numbers;
``conftest.py`` prints the collected lines at the end of the pytest run, and
``python tests/test_acceptance.py`` prints them directly. Tolerances and time
budgets are pinned below and never loosened to make a criterion pass.
"""
from __future__ import annotations

import subprocess
import sys
import time
from collections import Counter

import numpy as np
import pytest

from convsym.bodies import make_cube, make_random_polytope, minimum_enclosing_ball
from convsym.classify import (cabezon_condition_check, ellipsoid_fit, is_k_body_of_revolution,
                              theorem_copaoro_pipeline, theorem_dream_pipeline,
                              theorem_fantasia_pipeline, theorem_grandota_pipeline)
from convsym.families import (equatorial_revolution, perturbed_ball, random_centered_ellipsoid,
                              revolution_instance, symmetric_polytope_instance)
from convsym.geometry import Flat, principal_angles
from convsym.metrics import PointSet, busemann_distance, flat_sequence_limit, flat_sequence_window, hausdorff
from convsym.star import circular_gaps, classify_star, star_orbit
from convsym.suites import (_closure_schedule, _k_axis_instance, _planes_through_line,
                            k_axis_mode_agreement, negative_reports, perturbation_schedule)
from convsym.symmetry import detect_axes, is_hyperplane_of_symmetry, n_axis_order
from convsym.tolerance import DEFAULT_TOL

TOL = DEFAULT_TOL  # 1e-8 relative to max(1, circumradius)
RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, title: str, detail: str) -> None:
    RESULTS[n] = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {title}: {detail}"
    print(RESULTS[n])


# ---------------------------------------------------------------------------------
# 1. cube inventory
# ---------------------------------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    K = make_cube(3)
    claims = detect_axes(K, tol=TOL)
    orders = Counter(n_axis_order(K, cl.flat, TOL) for cl in claims)
    through = all(float(cl.flat.distance(np.zeros(3))) <= 1e-8 for cl in claims)
    dt = time.perf_counter() - t0
    ok = len(claims) == 13 and dict(orders) == {4: 3, 3: 4, 2: 6} and through and dt < 5.0
    return ok, f"{len(claims)} axes, orders {dict(sorted(orders.items()))}, {dt:.2f} s (< 5 s)"


# ---------------------------------------------------------------------------------
# 2. star dichotomy
# ---------------------------------------------------------------------------------

def criterion_2():
    t0 = time.perf_counter()
    c5 = classify_star(np.pi / 5)
    ang, closed = star_orbit(np.pi / 5, 100)
    spacing = float(np.max(np.abs(circular_gaps(ang) - np.pi / 5)))
    t5 = time.perf_counter() - t0
    nstar_ok = c5.kind == "nstar" and c5.n == 5 and closed and len(ang) == 5 and spacing <= 1e-9 and t5 < 1.0

    t0 = time.perf_counter()
    c1 = classify_star(1.0)
    t1 = time.perf_counter() - t0
    # the required gap bound must hold within 10^4 iterations
    ang4, _ = star_orbit(1.0, 10_000, tol=0.0)
    gap4 = float(circular_gaps(ang4).max())
    dense_ok = c1.kind == "dense" and gap4 < 1e-3 and t1 < 1.0
    detail = (f"pi/5 -> {c5} spacing err {spacing:.1e}, {t5:.3f} s; "
              f"1.0 -> {c1.kind} (gap {c1.max_gap:.2e} at default budget, {t1:.3f} s), "
              f"gap after 1e4 iterations {gap4:.2e} (need < 1e-3)")
    return nstar_ok and dense_ok, detail


# ---------------------------------------------------------------------------------
# 3. circumsphere concurrency
# ---------------------------------------------------------------------------------

def criterion_3():
    t0 = time.perf_counter()
    n_claims, worst = 0, 0.0
    for seed in range(100):
        inst = symmetric_polytope_instance(seed)
        K = inst.body
        c, _ = minimum_enclosing_ball(K)
        claims = [cl for cl in detect_axes(K, tol=TOL) if cl.verdict]
        claims += [cl for cl in (is_hyperplane_of_symmetry(K, H, TOL) for H in inst.mirrors) if cl.verdict]
        for cl in claims:
            n_claims += 1
            worst = max(worst, float(cl.flat.distance(c)) / (TOL.abs * K.scale))
    dt = time.perf_counter() - t0
    ok = n_claims > 0 and worst <= 1.0 and dt < 60.0
    return ok, f"{n_claims} verified flats, worst offset {worst:.2e} x (1e-8 scale), {dt:.1f} s (< 60 s)"


# ---------------------------------------------------------------------------------
# 4. revolution recovery
# ---------------------------------------------------------------------------------

def criterion_4():
    t0 = time.perf_counter()
    cases = [(3, 2), (4, 1), (4, 2), (4, 3)]
    worst_angle = worst_res = 0.0
    failures = 0
    for i in range(50):
        d, k = cases[i % 4]
        inst = revolution_instance(d, k, i)
        found, st, _ = is_k_body_of_revolution(inst.body, k, TOL)
        angle = float(principal_angles(st.core.basis, inst.core.basis).max()) if st is not None else np.inf
        res = st.residual / inst.body.scale if st is not None else np.inf
        worst_angle, worst_res = max(worst_angle, angle), max(worst_res, res)
        failures += (not found) or angle > 1e-6 or res >= 1e-7
    dt = time.perf_counter() - t0
    ok = failures == 0 and dt < 120.0
    return ok, (f"{50 - failures}/50 recovered, worst angle {worst_angle:.1e} rad (<= 1e-6), "
                f"worst residual {worst_res:.1e} x scale (< 1e-7), {dt:.1f} s (< 120 s)")


# ---------------------------------------------------------------------------------
# 5. theorem pipelines round trip
# ---------------------------------------------------------------------------------

def _positive_reports(i: int):
    rng = np.random.default_rng([5, i])
    rev = equatorial_revolution(3, 2, i)
    o, fib = rev.core.base, rev.frame[1:]
    yield "grandota", rev.body, theorem_grandota_pipeline(rev.body, o, Flat(o, fib), TOL)
    axes = [Flat.line(o, np.cos(a) * fib[0] + np.sin(a) * fib[1]) for a in rng.uniform(0, np.pi, 3)]
    yield "dream", rev.body, theorem_dream_pipeline(rev.body, axes, TOL)
    inst = revolution_instance(3, 2, i)
    yield "fantasia", inst.body, theorem_fantasia_pipeline(inst.body, _planes_through_line(inst.core), TOL)
    rev4 = equatorial_revolution(4, 2, i)
    o4 = rev4.core.base
    yield "copaoro", rev4.body, theorem_copaoro_pipeline(rev4.body, o4, Flat(o4, rev4.frame[2:]), 1, TOL)


def criterion_5():
    t0 = time.perf_counter()
    good, total = Counter(), Counter()
    for i in range(20):
        for name, K, rep in _positive_reports(i):
            total[name] += 1
            good[name] += rep.status == "verified" and rep.conclusion.residual <= TOL.abs * K.scale
    neg_bad = neg_total = 0
    for K in (make_cube(3), make_random_polytope(3, n=12, d=3), make_random_polytope(11, n=16, d=3)):
        for rep in negative_reports(K, TOL):
            neg_total += 1
            neg_bad += rep.conclusion.type != "inconclusive"
    dt = time.perf_counter() - t0
    ok = all(good[n] == total[n] == 20 for n in ("grandota", "dream", "fantasia", "copaoro")) \
        and neg_bad == 0 and dt < 180.0
    per = ", ".join(f"{n} {good[n]}/{total[n]}" for n in ("grandota", "dream", "fantasia", "copaoro"))
    return ok, f"{per}; negatives with a conclusion {neg_bad}/{neg_total}; {dt:.1f} s (< 180 s)"


# ---------------------------------------------------------------------------------
# 6. definition and mundial k-axis modes agree
# ---------------------------------------------------------------------------------

def criterion_6():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    agree = 0
    worst_ratio = 1.0
    for t in range(200):
        K, G, _ = _k_axis_instance(t, rng)
        ok, c1, c2 = k_axis_mode_agreement(K, G, TOL)
        agree += ok
        floor = 1e-12 * K.scale
        a, b = max(c1.residual, floor), max(c2.residual, floor)
        worst_ratio = max(worst_ratio, max(a, b) / min(a, b))
    dt = time.perf_counter() - t0
    return agree == 200 and dt < 60.0, (f"{agree}/200 agree, worst residual ratio {worst_ratio:.2f} (<= 10), "
                                        f"{dt:.1f} s (< 60 s)")


# ---------------------------------------------------------------------------------
# 7. closure under limits
# ---------------------------------------------------------------------------------

def criterion_7():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    passed = 0
    worst = 0.0
    for t in range(20):
        K, F, check = _closure_schedule(t, rng, TOL)
        seq = perturbation_schedule(F, rng)
        lim, conv = flat_sequence_limit(seq)
        terminal = max(check(K, seq[i], TOL).residual for i in flat_sequence_window(seq))
        cl = check(K, lim, TOL)
        worst = max(worst, cl.residual / max(terminal, 1e-300))
        passed += conv and cl.verdict and cl.residual <= 2.0 * terminal
    dt = time.perf_counter() - t0
    return passed == 20 and dt < 30.0, (f"{passed}/20 limits verified, worst limit/terminal residual "
                                        f"{worst:.2e} (<= 2), {dt:.1f} s (< 30 s)")


# ---------------------------------------------------------------------------------
# 8. shadow-boundary condition on ellipsoids and perturbations
# ---------------------------------------------------------------------------------

def criterion_8():
    t0 = time.perf_counter()
    pos = 0
    worst_v = worst_fit = 0.0
    for s in range(20):
        K = random_centered_ellipsoid(3, s)
        rep = cabezon_condition_check(K, tol=TOL)
        viol = max(h.residual for h in rep.hypotheses)
        fit = ellipsoid_fit(K, TOL)[2]
        worst_v, worst_fit = max(worst_v, viol), max(worst_fit, fit)
        pos += rep.status == "verified" and viol < 1e-7 and fit < 1e-7
    neg = 0
    least_neg = np.inf
    for s in range(10):
        rep = cabezon_condition_check(perturbed_ball(3, s), tol=TOL)
        least_neg = min(least_neg, max(h.residual for h in rep.hypotheses))
        neg += rep.status == "hypothesis_failed"
    dt = time.perf_counter() - t0
    ok = pos == 20 and neg == 10 and dt < 120.0
    return ok, (f"ellipsoids {pos}/20 (worst violation {worst_v:.1e}, fit {worst_fit:.1e}); "
                f"perturbations failing {neg}/10 (smallest violation {least_neg:.1e}); {dt:.1f} s (< 120 s)")


# ---------------------------------------------------------------------------------
# 9. Busemann metric
# ---------------------------------------------------------------------------------

def criterion_9():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    p = np.zeros(2)
    axioms_bad = sandwich_bad = 0
    for _ in range(100):
        A, B, C = (PointSet(rng.uniform(-1.5, 1.5, (3, 2))) for _ in range(3))
        ab = busemann_distance(p, A, B, n_grid=2000, tol=TOL)
        bc = busemann_distance(p, B, C, n_grid=2000, tol=TOL)
        ac = busemann_distance(p, A, C, n_grid=2000, tol=TOL)
        ba = busemann_distance(p, B, A, n_grid=2000, tol=TOL)
        aa = busemann_distance(p, A, A, n_grid=2000, tol=TOL)
        bars = ab.error_bar + bc.error_bar + ac.error_bar
        axioms_bad += (aa.value > aa.error_bar or abs(ab.value - ba.value) > ab.error_bar + ba.error_bar
                       or ac.value > ab.value + bc.value + bars or ab.value <= 0.0)
        for r, (M, N) in ((ab, (A, B)), (bc, (B, C)), (ac, (A, C))):
            sandwich_bad += r.value > hausdorff(M, N, TOL) + r.error_bar
    e = busemann_distance(np.zeros(3), PointSet([[0, 0, 0]]), PointSet([[1, 0, 0]]), tol=TOL)
    dt = time.perf_counter() - t0
    exact = abs(e.value - 1.0) <= 1e-12
    ok = axioms_bad == 0 and sandwich_bad == 0 and exact and dt < 60.0
    return ok, (f"axiom violations {axioms_bad}/100 triples, Hausdorff bound violations {sandwich_bad}/300, "
                f"delta_0({{0}},{{e1}}) - 1 = {e.value - 1.0:.1e}; {dt:.1f} s (< 60 s)")


# ---------------------------------------------------------------------------------
# 10. determinism of the verification suites
# ---------------------------------------------------------------------------------

def criterion_10():
    t0 = time.perf_counter()
    cmd = [sys.executable, "-m", "convsym", "verify", "--suite", "all", "--trials", "5", "--seed", "42"]
    runs = [subprocess.run(cmd, capture_output=True, check=False) for _ in range(2)]
    dt = time.perf_counter() - t0
    same = runs[0].stdout == runs[1].stdout and len(runs[0].stdout) > 0
    codes = [r.returncode for r in runs]
    return same, f"{len(runs[0].stdout)} bytes, identical={same}, exit codes {codes}, {dt:.1f} s"


CRITERIA = {
    1: ("cube axis inventory", criterion_1),
    2: ("star dichotomy", criterion_2),
    3: ("circumsphere concurrency", criterion_3),
    4: ("revolution recovery", criterion_4),
    5: ("pipeline round trip", criterion_5),
    6: ("k-axis mode agreement", criterion_6),
    7: ("closure under limits", criterion_7),
    8: ("shadow-boundary check", criterion_8),
    9: ("Busemann metric", criterion_9),
    10: ("suite determinism", criterion_10),
}


@pytest.mark.acceptance
@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    title, fn = CRITERIA[n]
    ok, detail = fn()
    record(n, ok, title, detail)
    assert ok, RESULTS[n]


if __name__ == "__main__":
    failed = 0
    for n, (title, fn) in sorted(CRITERIA.items()):
        ok, detail = fn()
        record(n, ok, title, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
