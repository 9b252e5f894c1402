"""Seeded instance families with known ground truth, shared by suites, tests and scripts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import (ConvexBody, LpBody, make_ellipsoid, make_k_body_of_revolution,
                     make_symmetric_polytope)
from .geometry import Flat, Isometry, random_rotation


@dataclass(frozen=True, eq=False)
class RevolutionInstance:
    body: ConvexBody
    k: int
    core: Flat
    frame: np.ndarray  # rows: d-k core directions, then k fiber directions


def random_profile(m: int, rng: np.random.Generator, allow_lp: bool = True) -> dict:
    """Either an lp profile or a table profile over ``m`` core coordinates."""
    if allow_lp and rng.random() < 0.5:
        return {"kind": "lp", "semi_axes": rng.uniform(0.6, 1.5, m).tolist(),
                "radius": float(rng.uniform(0.5, 1.4)), "p": float(rng.uniform(1.5, 4.0))}
    n = 4 + m * 2
    z = rng.uniform(-1.0, 1.0, (n, m))
    r = rng.uniform(0.4, 1.2, (n, 1))
    return {"kind": "table", "samples": np.hstack([z, r]).tolist()}


def revolution_instance(d: int, k: int, seed: int, centered: bool = False,
                        profile: dict | None = None) -> RevolutionInstance:
    """k-body of revolution in a random frame; ``centered`` puts the core through the origin.

    For ``k = 1`` the default profile is a table: an lp profile is mirror
    symmetric in every core coordinate hyperplane, so its 1-revolution
    structure would not be unique.
    """
    rng = np.random.default_rng([d, k, seed])
    Q = random_rotation(d, rng)
    o = np.zeros(d) if centered else rng.uniform(-1.0, 1.0, d)
    core = Flat(o, Q[: d - k])
    K = make_k_body_of_revolution(d, k, core, profile or random_profile(d - k, rng, allow_lp=k > 1))
    return RevolutionInstance(K, k, core, Q)


def equatorial_revolution(d: int, k: int, seed: int) -> RevolutionInstance:
    """Centred k-body of revolution that is also symmetric in every core coordinate hyperplane.

    An lp profile has that extra symmetry, so every line through the centre in
    the fiber is an axis and every core hyperplane is a mirror.
    """
    rng = np.random.default_rng([d, k, seed, 1])
    prof = {"kind": "lp", "semi_axes": rng.uniform(0.6, 1.5, d - k).tolist(),
            "radius": float(rng.uniform(0.5, 1.4)), "p": float(rng.uniform(1.6, 4.0))}
    return revolution_instance(d, k, seed, centered=True, profile=prof)


def random_centered_ellipsoid(d: int, seed: int) -> LpBody:
    rng = np.random.default_rng([d, seed, 2])
    return make_ellipsoid(np.zeros(d), rng.uniform(0.5, 2.0, d), random_rotation(d, rng))


def perturbed_ball(d: int, seed: int, amplitude: float = 0.5) -> LpBody:
    """Smooth, strictly convex non-ellipsoid: an lp ball with ``p = 2 + a``, ``a`` in ``[amplitude/2, amplitude]``."""
    rng = np.random.default_rng([d, seed, 3])
    p = 2.0 + rng.uniform(0.5, 1.0) * amplitude
    return LpBody(np.zeros(d), rng.uniform(0.8, 1.2, d), random_rotation(d, rng), p=p)


def reflection_group(d: int, normals, center=None) -> list[Isometry]:
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    out = []
    for n in np.atleast_2d(np.asarray(normals, dtype=float)):
        n = n / np.linalg.norm(n)
        A = np.eye(d) - 2.0 * np.outer(n, n)
        out.append(Isometry(A, c - A @ c))
    return out


_GROUPS_3D = {
    "cube": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -1, 0], [0, 1, -1]],
    "prism5": [[0, 0, 1], [1, 0, 0], [np.cos(np.pi / 5), np.sin(np.pi / 5), 0]],
    "prism3": [[0, 0, 1], [1, 0, 0], [np.cos(np.pi / 3), np.sin(np.pi / 3), 0]],
    "box": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    "mirror": [[1, 0, 0]],
}


@dataclass(frozen=True, eq=False)
class SymmetricInstance:
    body: ConvexBody
    group: str
    center: np.ndarray
    normals: np.ndarray  # unit normals of the generating mirrors (all through ``center``)

    @property
    def mirrors(self) -> list[Flat]:
        return [Flat.hyperplane(self.center, n) for n in self.normals]


def symmetric_polytope_instance(seed: int, d: int = 3, group: str | None = None) -> SymmetricInstance:
    """Hull of a random orbit under a reflection group, randomly rotated and translated."""
    rng = np.random.default_rng([d, seed, 4])
    names = sorted(_GROUPS_3D) if d == 3 else ["box", "mirror"]
    name = group or names[int(rng.integers(len(names)))]
    if d == 3:
        normals = np.array(_GROUPS_3D[name], dtype=float)
    else:
        normals = np.eye(d) if name == "box" else np.eye(d)[:1]
    Q = random_rotation(d, rng)
    c = rng.uniform(-1.0, 1.0, d)
    normals = normals @ Q.T
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    G = reflection_group(d, normals, c)
    seeds = c + rng.uniform(-1.0, 1.0, (d + 1, d))
    P = make_symmetric_polytope(seeds, G, label=f"sym-{name}")
    return SymmetricInstance(P, name, c, normals)
