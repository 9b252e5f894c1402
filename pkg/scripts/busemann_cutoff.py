"""Stability of the Busemann distance estimate as the search cutoff radius grows."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from _common import parse_config, write_rows
from convsym.bodies import make_cube
from convsym.geometry import Flat
from convsym.metrics import BodySet, FlatSet, PointSet, busemann_distance


@dataclass(frozen=True)
class Config:
    cutoffs: tuple = (10.0, 20.0, 30.0, 40.0)
    n_grid: int = 100_000


def pairs() -> dict:
    o = np.zeros(3)
    return {
        "points": (PointSet([[0, 0, 0]]), PointSet([[1, 0, 0]])),
        "parallel_lines": (FlatSet(Flat.line(o, [1, 0, 0])), FlatSet(Flat.line([0, 1, 0], [1, 0, 0]))),
        "crossing_lines": (FlatSet(Flat.line(o, [1, 0, 0])), FlatSet(Flat.line(o, [0, 1, 0]))),
        "cube_vs_plane": (BodySet(make_cube(3)), FlatSet(Flat.hyperplane([0, 0, 2.0], [0, 0, 1]))),
    }


def main() -> None:
    cfg, out = parse_config(Config, __doc__)
    rows = []
    for name, (M, N) in pairs().items():
        for R in cfg.cutoffs:
            r = busemann_distance(np.zeros(3), M, N, cutoff=R, n_grid=cfg.n_grid)
            rows.append({"pair": name, "cutoff": R, "value": r.value, "error_bar": r.error_bar})
    write_rows(rows, out, cfg)


if __name__ == "__main__":
    main()
