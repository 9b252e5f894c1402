"""Tolerance context and deterministic direction samples.

Every numerical decision in the package takes its thresholds from a
:class:`Tolerance` instance; there are no module-level tolerance globals.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0
# constants of the super-Fibonacci spiral on S^3
_SF_PHI = np.sqrt(2.0)
_SF_PSI = 1.533751168755204288118041


@dataclass(frozen=True)
class Tolerance:
    """Thresholds and sample sizes shared by one computation.

    Parameters
    ----------
    abs : float
        Verdict tolerance, relative to ``scale = max(1, circumradius)``.
    flat : float
        Flat-equality tolerance on basis projection residuals.
    ortho : float
        Orthonormality tolerance for bases and orthogonal matrices.
    dirs3, dirs4 : int
        Sizes of the quasi-uniform direction samples on S^2 and S^3.
    dirs2 : int
        Number of directions on the circle (planar charts).
    k_axis_flats : int
        Default number of sampled flats in k-axis tests.
    seed : int
        Seed for all sampling done under this context.
    """

    abs: float = 1e-8
    flat: float = 1e-9
    ortho: float = 1e-12
    dirs2: int = 720
    dirs3: int = 4096
    dirs4: int = 16384
    k_axis_flats: int = 64
    seed: int = 0

    def with_(self, **kw) -> "Tolerance":
        return replace(self, **kw)

    def n_directions(self, d: int) -> int:
        if d <= 1:
            return 2
        if d == 2:
            return self.dirs2
        if d == 3:
            return self.dirs3
        return self.dirs4

    def directions(self, d: int) -> np.ndarray:
        """Antipodally symmetric quasi-uniform unit directions in R^d."""
        return symmetric_directions(d, self.n_directions(d))

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


DEFAULT_TOL = Tolerance()


def fibonacci_sphere(n: int) -> np.ndarray:
    """Fibonacci lattice of ``n`` points on S^2."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = 2.0 * np.pi * i / GOLDEN
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def super_fibonacci(n: int) -> np.ndarray:
    """Super-Fibonacci spiral of ``n`` points on S^3 (Alexa, 2022)."""
    s = np.arange(n) + 0.5
    r = np.sqrt(s / n)
    R = np.sqrt(1.0 - s / n)
    alpha = 2.0 * np.pi * s / _SF_PHI
    beta = 2.0 * np.pi * s / _SF_PSI
    return np.column_stack(
        [r * np.sin(alpha), r * np.cos(alpha), R * np.sin(beta), R * np.cos(beta)]
    )


@lru_cache(maxsize=32)
def _symmetric_directions(d: int, n: int) -> np.ndarray:
    half = max(n // 2, 1)
    if d == 1:
        base = np.array([[1.0]])
    elif d == 2:
        t = np.pi * (np.arange(half) + 0.5) / half
        base = np.column_stack([np.cos(t), np.sin(t)])
    elif d == 3:
        base = fibonacci_sphere(half)
    elif d == 4:
        base = super_fibonacci(half)
    else:
        g = np.random.default_rng(d).standard_normal((half, d))
        base = g / np.linalg.norm(g, axis=1, keepdims=True)
    out = np.vstack([base, -base])
    out.setflags(write=False)
    return out


def symmetric_directions(d: int, n: int) -> np.ndarray:
    """Quasi-uniform sample closed under ``u -> -u`` (size ``2 * (n // 2)``).

    Circle samples are equally spaced; S^2 uses the Fibonacci lattice and
    S^3 the super-Fibonacci spiral. Higher dimensions fall back to seeded
    Gaussian directions.
    """
    return _symmetric_directions(int(d), int(n))


def parallel_map(fn, items, threads: int = 1) -> list:
    """``[fn(x) for x in items]``, on a thread pool when ``threads > 1``; order is preserved."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
