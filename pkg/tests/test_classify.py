import numpy as np
import pytest

from convsym.bodies import make_ball, make_cube, make_ellipsoid, make_k_body_of_revolution, make_lp_body
from convsym.classify import (UnsupportedBodyError, cabezon_condition_check, common_flat, conjecture_probe,
                              ellipsoid_fit, is_k_body_of_revolution, sphere_fit,
                              theorem_brasil_pipeline, theorem_copaoro_pipeline, theorem_dream_pipeline,
                              theorem_fantasia_pipeline, theorem_grandota_pipeline)
from convsym.families import (equatorial_revolution, perturbed_ball, random_centered_ellipsoid,
                              revolution_instance)
from convsym.geometry import Flat, principal_angles, random_rotation
from convsym.reports import validate

O3 = np.zeros(3)


def cylinder():
    return make_k_body_of_revolution(3, 2, Flat.line(O3, [0, 0, 1]),
                                     {"kind": "table", "samples": [[-1.0, 1.0], [1.0, 1.0]]})


def planes_through_z(n=6):
    return [Flat.hyperplane(O3, [np.cos(a), np.sin(a), 0]) for a in np.arange(n) * np.pi / n]


# --- fits -----------------------------------------------------------------------------

def test_sphere_fit_exact_on_ball():
    c, r, res = sphere_fit(make_ball(3, 1.7, [0.2, -0.4, 1.0]))
    np.testing.assert_allclose(c, [0.2, -0.4, 1.0], atol=1e-12)
    assert r == pytest.approx(1.7, abs=1e-12) and res < 1e-12


def test_sphere_fit_rejects_cube():
    assert sphere_fit(make_cube(3))[2] > 0.1


def test_ellipsoid_fit_recovers_shape_matrix(rng):
    Q = random_rotation(3, rng)
    a = np.array([0.5, 1.2, 2.0])
    K = make_ellipsoid([0.3, 0.1, -0.2], a, Q)
    c, M, res = ellipsoid_fit(K)
    np.testing.assert_allclose(c, [0.3, 0.1, -0.2], atol=1e-10)
    np.testing.assert_allclose(M, Q @ np.diag(a ** 2) @ Q.T, atol=1e-9)
    assert res < 1e-10


def test_ellipsoid_fit_flags_lp_body():
    assert ellipsoid_fit(make_lp_body(O3, [1, 1, 1], p=3.0))[2] > 1e-3


# --- revolution recovery --------------------------------------------------------------

@pytest.mark.parametrize("d,k,seed", [(3, 2, 0), (4, 1, 1), (4, 2, 2), (4, 3, 3)])
def test_revolution_core_recovered(d, k, seed):
    inst = revolution_instance(d, k, seed)
    ok, st, _ = is_k_body_of_revolution(inst.body, k)
    assert ok
    assert principal_angles(st.core.basis, inst.core.basis).max() < 1e-6
    assert st.core.distance(inst.core.base) < 1e-6
    assert st.residual < 1e-7 * inst.body.scale


def test_cube_is_not_a_body_of_revolution():
    ok, _, _ = is_k_body_of_revolution(make_cube(3), 2)
    assert not ok


def test_revolution_with_hint():
    inst = revolution_instance(3, 2, 11)
    ok, st, _ = is_k_body_of_revolution(inst.body, 2, hint=inst.core)
    assert ok and st.core.same_as(inst.core, 1e-9)
    wrong = Flat(inst.core.base, inst.frame[1:2])
    assert not is_k_body_of_revolution(inst.body, 2, hint=wrong)[0]


# --- pipelines ------------------------------------------------------------------------

def test_fantasia_on_cylinder():
    rep = theorem_fantasia_pipeline(cylinder(), planes_through_z())
    assert rep.status == "verified" and rep.exit_code == 0
    assert rep.conclusion.type == "k_body_of_revolution"
    assert any("revolution about the common 1-flat" in n for n in rep.notes)
    validate(rep.to_dict(), "report")


def test_fantasia_without_common_flat_checks_sphere():
    rng = np.random.default_rng(1)
    planes = [Flat.hyperplane(O3, rng.normal(size=3)) for _ in range(5)]
    rep = theorem_fantasia_pipeline(make_ball(3), planes)
    assert rep.conclusion.type == "sphere" and any(n.startswith("branch: sphere") for n in rep.notes)


def test_common_flat():
    F, k = common_flat(planes_through_z())
    assert k == 1 and F.same_as(Flat.line(O3, [0, 0, 1]), 1e-9)
    _, k = common_flat([Flat.hyperplane(O3, [0, 0, 1]), Flat.hyperplane([0, 0, 1.0], [0, 0, 1])])
    assert k == -1


def test_brasil_on_cube_and_ball():
    rep = theorem_brasil_pipeline(make_cube(3), O3, 3)
    assert rep.status == "hypothesis_failed" and rep.exit_code == 1
    rep = theorem_brasil_pipeline(make_ball(3, 1.0, [1, 0, 0]), [1, 0, 0], 5)
    assert rep.status == "verified" and rep.conclusion.type == "sphere"


def test_dream_gates():
    axes = [Flat.line(O3, v) for v in ([1, 0, 0], [1, 1, 0], [1, 0, 1])]
    rep = theorem_dream_pipeline(make_ball(3), axes)
    assert rep.status == "verified" and rep.conclusion.type == "sphere"
    perp = [Flat.line(O3, v) for v in np.eye(3)]
    rep = theorem_dream_pipeline(make_ball(3), perp)
    assert rep.status == "hypothesis_failed" and rep.conclusion.type == "inconclusive"


def test_grandota_and_copaoro_round_trip():
    rev = equatorial_revolution(3, 2, 4)
    o = rev.core.base
    rep = theorem_grandota_pipeline(rev.body, o, Flat(o, rev.frame[1:]))
    assert rep.status == "verified"
    rev4 = equatorial_revolution(4, 2, 4)
    o4 = rev4.core.base
    rep = theorem_copaoro_pipeline(rev4.body, o4, Flat(o4, rev4.frame[2:]), 1)
    assert rep.status == "verified"
    # the cube is not strictly convex
    rep = theorem_copaoro_pipeline(make_cube(4), np.zeros(4), Flat(np.zeros(4), np.eye(4)[:2]), 1)
    assert rep.status == "hypothesis_failed"


def test_negative_pipelines_never_conclude():
    K = make_cube(3)
    R = random_rotation(3, np.random.default_rng(8))
    assert theorem_grandota_pipeline(K, O3, Flat(O3, R[:2])).conclusion.type == "inconclusive"
    assert theorem_fantasia_pipeline(K, [Flat.hyperplane(O3, r) for r in R]).conclusion.type == "inconclusive"


# --- shadow-boundary condition ---------------------------------------------------------

def test_cabezon_ellipsoid_and_perturbation():
    rep = cabezon_condition_check(random_centered_ellipsoid(3, 0))
    assert rep.status == "verified" and rep.conclusion.type == "ellipsoid"
    bad = cabezon_condition_check(perturbed_ball(3, 0))
    assert bad.status == "hypothesis_failed"


def test_cabezon_requires_smooth_body():
    with pytest.raises(UnsupportedBodyError):
        cabezon_condition_check(make_cube(3))


# --- conjecture probe -----------------------------------------------------------------

def test_probe_on_ball_is_flat_and_labelled():
    rep = conjecture_probe(0, trials=1, orders=(3,), max_coaxes=2, body=make_ball(3))
    assert all(r.sphere_residual < 1e-10 for r in rep["rows"])
    assert "no counterexample or proof" in rep["label"]


def test_probe_single_coaxis_leaves_large_residual():
    rep = conjecture_probe(1, trials=2, orders=(3,), max_coaxes=2)
    first = [r.sphere_residual for r in rep["rows"] if r.n_coaxes == 1]
    assert min(first) > 0.05
