"""Symmetry-axis inventory of regular solids: axes found and their rotation orders."""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from _common import parse_config, write_rows
from convsym.bodies import Polytope, make_cube
from convsym.symmetry import detect_axes, n_axis_order


@dataclass(frozen=True)
class Config:
    budget: int = 4096
    max_order: int = 12


def solids() -> dict:
    tet = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    octa = np.vstack([np.eye(3), -np.eye(3)])
    return {"tetrahedron": Polytope(tet), "cube": make_cube(3), "octahedron": Polytope(octa)}


def main() -> None:
    cfg, out = parse_config(Config, __doc__)
    rows = []
    for name, K in solids().items():
        t0 = time.perf_counter()
        claims = detect_axes(K, budget=cfg.budget)
        orders = Counter(n_axis_order(K, c.flat, max_order=cfg.max_order) for c in claims)
        rows.append({"solid": name, "n_axes": len(claims),
                     "orders": " ".join(f"{o}:{orders[o]}" for o in sorted(orders, reverse=True)),
                     "worst_residual": max((c.residual for c in claims), default=0.0),
                     "seconds": round(time.perf_counter() - t0, 2)})
    write_rows(rows, out, cfg)


if __name__ == "__main__":
    main()
