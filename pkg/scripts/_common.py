"""Shared helpers for the experiment scripts: config dataclass to CLI flags, CSV output."""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import asdict, fields


def parse_config(cls, description: str):
    """Build an instance of dataclass ``cls`` from command-line flags named after its fields."""
    ap = argparse.ArgumentParser(description=description)
    for f in fields(cls):
        default = f.default
        kind = type(default)
        if kind is tuple:
            ap.add_argument(f"--{f.name.replace('_', '-')}", type=type(default[0]), nargs="+", default=default)
        else:
            ap.add_argument(f"--{f.name.replace('_', '-')}", type=kind, default=default)
    ap.add_argument("--out", default=None, help="CSV path (default: stdout)")
    ns = vars(ap.parse_args())
    out = ns.pop("out")
    cfg = cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in ns.items()})
    return cfg, out


def write_rows(rows: list[dict], out: str | None, cfg=None) -> None:
    """Write ``rows`` as CSV, preceded by the config as ``#`` comment lines."""
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        if cfg is not None:
            for k, v in asdict(cfg).items():
                fh.write(f"# {k} = {v}\n")
        if rows:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    finally:
        if out:
            fh.close()
