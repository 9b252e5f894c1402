"""Recovery of the core flat of random k-bodies of revolution, by dimension and k."""
from __future__ import annotations

import time
from dataclasses import dataclass

from _common import parse_config, write_rows
from convsym.classify import is_k_body_of_revolution
from convsym.families import revolution_instance
from convsym.geometry import principal_angles


@dataclass(frozen=True)
class Config:
    seeds: int = 5
    dims: tuple = (3, 4)


def main() -> None:
    cfg, out = parse_config(Config, __doc__)
    rows = []
    for d in cfg.dims:
        for k in range(1, d):
            for seed in range(cfg.seeds):
                inst = revolution_instance(d, k, seed)
                t0 = time.perf_counter()
                ok, st, _ = is_k_body_of_revolution(inst.body, k)
                rows.append({"d": d, "k": k, "seed": seed, "recovered": ok,
                             "angle": float(principal_angles(st.core.basis, inst.core.basis).max()),
                             "offset": float(st.core.distance(inst.core.base)),
                             "residual": float(st.residual),
                             "seconds": round(time.perf_counter() - t0, 2)})
    write_rows(rows, out, cfg)


if __name__ == "__main__":
    main()
