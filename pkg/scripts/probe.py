"""Sphere-fit residual of orbit hulls under growing numbers of rotation coaxes.

The output is numerical evidence only and claims neither a proof nor a counterexample.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

from _common import parse_config, write_rows
from convsym.classify import conjecture_probe


@dataclass(frozen=True)
class Config:
    seed: int = 0
    trials: int = 3
    orders: tuple = (3, 4, 5)
    max_coaxes: int = 3


def main() -> None:
    cfg, out = parse_config(Config, __doc__)
    rep = conjecture_probe(cfg.seed, cfg.trials, cfg.orders, cfg.max_coaxes)
    rows = [asdict(r) for r in rep["rows"]]
    write_rows(rows, out, cfg)
    for s in rep["summary"]:
        print(f"# order {s['order']}: medians {s['median_residual_by_n_coaxes']}, "
              f"non-increasing={s['non_increasing']}")
    print(f"# {rep['label']}")


if __name__ == "__main__":
    main()
