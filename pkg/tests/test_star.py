from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from convsym.geometry import Flat, axis_involution, random_rotation
from convsym.star import (DENSE_ITER, StarError, build_star, circular_gaps, classify_star,
                          star_from_angle, star_from_lines, star_orbit)


def recurrence_oracle(theta, max_lines=200):
    """Unoriented line directions of the star, by literal half-turns T_k = R_{T_{k-1}}(T_{k-2}).

    Lines are kept as unit vectors in E^3 through the origin; each new line is
    the image of the older one under the half-turn about the newer one.
    """
    lines = [np.array([1.0, 0.0, 0.0]), np.array([np.cos(theta), np.sin(theta), 0.0])]
    angles = [np.mod(np.arctan2(v[1], v[0]), np.pi) for v in lines]
    for _ in range(max_lines):
        R = axis_involution(Flat.line(np.zeros(3), lines[-1]))
        new = R.linear @ lines[-2]
        a = np.mod(np.arctan2(new[1], new[0]), np.pi)
        lines.append(new)
        if min(abs(a - b) % np.pi for b in angles) < 1e-9 or \
                min(np.pi - abs(a - b) % np.pi for b in angles) < 1e-9:
            break
        angles.append(a)
    return np.sort(angles)


@pytest.mark.parametrize("p,q", [(1, 2), (1, 3), (1, 4), (1, 5), (2, 5), (3, 7), (5, 12), (1, 9)])
def test_rational_angles_give_nstars_matching_recurrence(p, q):
    theta = np.pi * p / q
    cls = classify_star(theta)
    oracle = recurrence_oracle(theta)
    assert cls.kind == "nstar"
    assert cls.n == len(oracle) == Fraction(p, q).denominator
    S = star_from_angle(theta)
    np.testing.assert_allclose(S.sorted_angles(), oracle, atol=1e-9)
    np.testing.assert_allclose(circular_gaps(S.sorted_angles()), np.pi / cls.n, atol=1e-9)


@pytest.mark.parametrize("theta", [1.0, np.sqrt(2.0), np.pi / np.e, 0.1])
def test_irrational_angles_are_dense(theta):
    cls = classify_star(theta)
    assert cls.kind == "dense"
    assert cls.max_gap < 1e-3


def test_dense_orbit_matches_recurrence_prefix():
    ang, closed = star_orbit(1.0, 60, tol=0.0)
    assert not closed
    oracle = recurrence_oracle(1.0, max_lines=60)
    np.testing.assert_allclose(np.sort(np.mod(ang, np.pi)), oracle, atol=1e-9)


def test_named_examples():
    assert str(star_from_angle(0.6283185307).classification) == "NStar(5)"
    assert str(star_from_angle(1.0).classification) == "Dense"
    assert str(star_from_angle(1.5707963268).classification) == "NStar(2)"


def test_dense_gap_shrinks_with_iterations():
    gaps = [circular_gaps(star_orbit(1.0, n, tol=0.0)[0]).max() for n in (100, 1000, DENSE_ITER)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_build_star_in_space_matches_planar():
    rng = np.random.default_rng(5)
    Q = random_rotation(3, rng)
    apex = rng.normal(size=3)
    theta = np.pi * 2 / 7
    L1 = Flat.line(apex, Q[0])
    L2 = Flat.line(apex, np.cos(theta) * Q[0] + np.sin(theta) * Q[1])
    S = build_star(L1, L2)
    assert S.classification.n == 7
    for L in S.lines:
        assert L.distance(apex) < 1e-12
        assert abs(L.direction @ Q[2]) < 1e-12


def _same_unoriented(a, b, atol=1e-8):
    """Every angle of ``a`` is within ``atol`` of one of ``b`` modulo pi, and vice versa."""
    gap = lambda x, y: np.abs((x[:, None] - y[None, :] + np.pi / 2) % np.pi - np.pi / 2)
    return len(a) == len(b) and gap(a, b).min(axis=1).max() <= atol and gap(b, a).min(axis=1).max() <= atol


@given(st.integers(2, 30), st.integers(1, 29), st.floats(0, np.pi))
def test_swap_invariance(q, p, phase):
    p = p % q or 1
    theta = np.pi * p / q
    n = Fraction(p, q).denominator
    e = lambda a: [np.cos(phase + a), np.sin(phase + a)]
    L1, L2 = Flat.line([0, 0], e(0.0)), Flat.line([0, 0], e(theta))
    a, b = build_star(L1, L2), build_star(L2, L1)
    assert str(a.classification) == str(b.classification)
    ambient = lambda S: np.array([np.arctan2(L.direction[1], L.direction[0]) for L in S.lines])
    assert _same_unoriented(ambient(a), ambient(b))
    assert _same_unoriented(ambient(a), phase + np.pi * np.arange(n) / n)


def test_star_requires_concurrent_distinct_lines():
    with pytest.raises(StarError):
        build_star(Flat.line([0, 0, 0], [1, 0, 0]), Flat.line([0, 0, 1], [0, 1, 0]))
    with pytest.raises(StarError):
        build_star(Flat.line([0, 0, 0], [1, 0, 0]), Flat.line([0, 0, 0], [-1, 0, 0]))
    with pytest.raises(StarError):
        classify_star(0.0)


def test_star_from_lines_wraps_mirrors():
    lines = [Flat.line([0, 0], [np.cos(a), np.sin(a)]) for a in np.arange(4) * np.pi / 4]
    S = star_from_lines(lines, [0, 0])
    assert str(S.classification) == "NStar(4)"
