"""Largest circular gap of the star orbit against the iteration budget."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from _common import parse_config, write_rows
from convsym.star import circular_gaps, classify_star, star_orbit


@dataclass(frozen=True)
class Config:
    angles: tuple = (1.0, float(np.sqrt(2.0)), 0.1, float(np.pi / 5))
    budgets: tuple = (100, 1000, 10_000, 100_000)


def main() -> None:
    cfg, out = parse_config(Config, __doc__)
    rows = []
    for theta in cfg.angles:
        label = str(classify_star(theta))
        for n in cfg.budgets:
            ang, closed = star_orbit(theta, n)
            rows.append({"theta": theta, "iterations": n, "n_lines": len(ang), "closed": closed,
                         "max_gap": float(circular_gaps(ang).max()), "class": label})
    write_rows(rows, out, cfg)


if __name__ == "__main__":
    main()
