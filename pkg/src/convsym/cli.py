"""Command-line front end.

Exit codes: 0 success or verdict true, 1 verdict false or hypothesis failed,
2 usage or input error, 3 inconclusive.

Config files hold one ``key = value`` pair per line (``#`` starts a comment);
keys are ``tol``, ``samples``, ``seed``, ``threads``, ``out`` and
``timestamps``. Command-line flags override the file.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import classify as cl
from . import star as st
from .bodies import (BodyError, body_from_dict, make_ball, make_cube, make_ellipsoid,
                     make_k_body_of_revolution, make_random_polytope, make_symmetric_polytope)
from .families import random_profile, reflection_group
from .geometry import ContainmentError, DimensionError, Flat, random_rotation
from .metrics import FlatSet, PointSet, UnboundedSetError, busemann_distance, hausdorff
from .reports import dumps, validate
from .suites import SUITES, run_suite
from .symmetry import (ConsistencyError, is_axis_of_symmetry, is_hyperplane_of_symmetry,
                       is_k_axis_of_symmetry, is_n_axis_of_symmetry, is_rotation_coaxis_of_order)
from .tolerance import DEFAULT_TOL, Tolerance

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
CONFIG_KEYS = ("tol", "samples", "seed", "threads", "out", "timestamps")


class UsageError(ValueError):
    """Bad command-line input (exit code 2)."""


# ---------------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------------

def parse_vector(text: str) -> np.ndarray:
    try:
        v = np.array([float(x) for x in text.split(",") if x.strip()], dtype=float)
    except ValueError:
        raise UsageError(f"bad vector {text!r}: expected comma-separated numbers") from None
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise UsageError(f"bad vector {text!r}")
    return v


def parse_vectors(text: str) -> np.ndarray:
    """``"1,0,0;0,1,0"`` -> 2x3 array."""
    rows = [parse_vector(r) for r in text.split(";") if r.strip()]
    if len({r.size for r in rows}) > 1:
        raise UsageError(f"vectors of unequal length in {text!r}")
    return np.array(rows)


def parse_claim(text: str) -> dict:
    """``"p=0,0,0 dir=0,0,1"`` -> ``{"p": "0,0,0", "dir": "0,0,1"}``."""
    out = {}
    for tok in text.split():
        key, sep, val = tok.partition("=")
        if not sep or not key or not val:
            raise UsageError(f"bad claim token {tok!r}: expected key=value")
        if key in out:
            raise UsageError(f"duplicate claim key {key!r}")
        out[key] = val
    return out


def _need(spec: dict, *keys: str, allowed: tuple = ()) -> None:
    missing = [k for k in keys if k not in spec]
    if missing:
        raise UsageError(f"claim is missing {', '.join(missing)}")
    extra = set(spec) - set(keys) - set(allowed)
    if extra:
        raise UsageError(f"unknown claim keys {sorted(extra)}")


def _flat_from_spec(spec: dict, d: int, dim: int | None = None) -> Flat:
    p = parse_vector(spec["p"])
    span = parse_vectors(spec["span"]) if "span" in spec else np.empty((0, d))
    if p.size != d or (span.size and span.shape[1] != d):
        raise UsageError(f"claim vectors must have length {d}")
    F = Flat(p, span)
    if dim is not None and F.dim != dim:
        raise UsageError(f"span must have {dim} independent vectors, got {F.dim}")
    return F


def parse_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not sep or key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{n}: expected one of {CONFIG_KEYS} as key = value")
            out[key] = val.strip("\"'")
    return out


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def load_body(path: str):
    data = _load_json(path)
    validate(data, "body")
    return body_from_dict(data)


def load_lines(path: str) -> list[Flat]:
    """JSON list of lines: ``{"base": [...], "direction": [...]}`` or ``{"base", "basis"}``."""
    data = _load_json(path)
    if not isinstance(data, list) or not data:
        raise UsageError(f"{path} must hold a non-empty JSON list of lines")
    out = []
    for item in data:
        if "direction" in item:
            out.append(Flat.line(item["base"], item["direction"]))
        else:
            out.append(Flat.from_dict(item))
    return out


def load_hyperplanes(path: str) -> list[Flat]:
    """JSON list of ``{"base": [...], "normal": [...]}`` (or ``{"base", "basis"}``)."""
    data = _load_json(path)
    if not isinstance(data, list) or not data:
        raise UsageError(f"{path} must hold a non-empty JSON list of hyperplanes")
    return [Flat.hyperplane(h["base"], h["normal"]) if "normal" in h else Flat.from_dict(h) for h in data]


def load_set(path: str):
    """A body JSON, ``{"kind": "points", "points": [...]}`` or ``{"kind": "flat", "base", "basis"}``."""
    data = _load_json(path)
    kind = data.get("kind") if isinstance(data, dict) else None
    if kind == "points":
        return PointSet(np.asarray(data["points"], dtype=float))
    if kind == "flat":
        return FlatSet(Flat.from_dict(data))
    validate(data, "body")
    return body_from_dict(data)


# ---------------------------------------------------------------------------------
# run configuration and output
# ---------------------------------------------------------------------------------

class Run:
    def __init__(self, args):
        path = getattr(args, "config", None)
        conf = parse_config(path) if path else {}
        get = lambda k, default: getattr(args, k, None) if getattr(args, k, None) is not None else conf.get(k, default)
        try:
            self.tol_value = float(get("tol", DEFAULT_TOL.abs))
            self.seed = int(get("seed", 0))
            samples = get("samples", None)
            self.samples = None if samples is None else int(samples)
            threads = str(get("threads", 1))
            self.threads = os.cpu_count() or 1 if threads == "auto" else int(threads)
        except ValueError as exc:
            raise UsageError(f"bad configuration value: {exc}") from None
        if not self.tol_value > 0:
            raise UsageError("--tol must be positive")
        if self.samples is not None and self.samples < 8:
            raise UsageError("--samples must be at least 8")
        if self.threads < 1:
            raise UsageError("--threads must be positive")
        self.out = get("out", None)
        ts = getattr(args, "timestamps", False) or str(conf.get("timestamps", "false")).lower() in ("1", "true", "yes")
        self.timestamps = bool(ts)

    @property
    def tol(self) -> Tolerance:
        kw = {"abs": self.tol_value, "seed": self.seed}
        if self.samples:
            kw.update(dirs2=self.samples, dirs3=self.samples, dirs4=self.samples)
        return DEFAULT_TOL.with_(**kw)

    def emit_json(self, obj: dict, schema: str | None) -> None:
        obj = dict(obj)
        if self.timestamps:
            obj["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        text = dumps(obj)
        if schema:
            validate(json.loads(text), schema)
        self.emit_text(text)

    def emit_text(self, text: str) -> None:
        if self.out and self.out != "-":
            with open(self.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


# ---------------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------------

def cmd_generate(args, run: Run) -> int:
    d = args.d
    rng = np.random.default_rng(run.seed)
    center = parse_vector(args.center) if args.center else None
    if center is not None and center.size != d:
        raise UsageError(f"--center needs {d} coordinates")
    if args.kind == "cube":
        K = make_cube(d, args.half, center)
    elif args.kind == "ellipsoid":
        axes = parse_vector(args.semi_axes) if args.semi_axes else np.ones(d)
        if args.semi_axes:
            d = axes.size
        if center is not None and center.size != d:
            raise UsageError("--center and --semi-axes disagree in length")
        rot = random_rotation(d, rng) if args.rotate else None
        K = make_ellipsoid(np.zeros(d) if center is None else center, axes, rot)
    elif args.kind == "ball":
        K = make_ball(d, args.half, center)
    elif args.kind == "cylinder":
        o = np.zeros(d) if center is None else center
        axis = Flat(o, np.eye(d)[-1:])
        K = make_k_body_of_revolution(d, d - 1, axis, {"kind": "table", "samples": [[-args.half, 1.0],
                                                                                  [args.half, 1.0]]})
    elif args.kind == "revolution":
        k = args.k
        if not 1 <= k < d:
            raise UsageError("--k must satisfy 1 <= k < d")
        Q = random_rotation(d, rng)
        o = np.zeros(d) if center is None else center
        K = make_k_body_of_revolution(d, k, Flat(o, Q[: d - k]), random_profile(d - k, rng))
    elif args.kind == "symmetric-polytope":
        normals = np.eye(d) if args.group == "box" else np.eye(d)[:1]
        c = np.zeros(d) if center is None else center
        G = reflection_group(d, normals @ random_rotation(d, rng).T, c)
        K = make_symmetric_polytope(c + rng.uniform(-1, 1, (d + 1, d)), G)
    else:
        K = make_random_polytope(run.seed, n=args.n, d=d)
    run.emit_json(K.to_dict(), "body")
    return EXIT_OK


def _claim_for(args, K, tol):
    d = K.d
    given = [(k, getattr(args, k.replace("-", "_"))) for k in ("axis", "hyperplane", "n-axis", "k-axis", "coaxis")]
    given = [(k, v) for k, v in given if v is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --axis, --hyperplane, --n-axis, --k-axis, --coaxis")
    kind, tokens = given[0]
    spec = parse_claim(" ".join(tokens))
    if kind in ("axis", "n-axis"):
        _need(spec, "p", "dir", *(("n",) if kind == "n-axis" else ()))
        p, v = parse_vector(spec["p"]), parse_vector(spec["dir"])
        if p.size != d or v.size != d:
            raise UsageError(f"claim vectors must have length {d}")
        L = Flat.line(p, v)
        if kind == "axis":
            return is_axis_of_symmetry(K, L, tol)
        return is_n_axis_of_symmetry(K, L, int(spec["n"]), tol)
    if kind == "hyperplane":
        _need(spec, "p", "normal")
        p, n = parse_vector(spec["p"]), parse_vector(spec["normal"])
        if p.size != d or n.size != d:
            raise UsageError(f"claim vectors must have length {d}")
        return is_hyperplane_of_symmetry(K, Flat.hyperplane(p, n), tol)
    if kind == "k-axis":
        _need(spec, "k", "p", "span", allowed=("mode",))
        k = int(spec["k"])
        return is_k_axis_of_symmetry(K, _flat_from_spec(spec, d, k), tol, mode=spec.get("mode", "definition"))
    _need(spec, "k", "p", allowed=("span",))
    return is_rotation_coaxis_of_order(K, _flat_from_spec(spec, d, d - 2), int(spec["k"]), tol)


def cmd_test(args, run: Run) -> int:
    K = load_body(args.body)
    claim = _claim_for(args, K, run.tol)
    run.emit_json({**claim.to_dict(), "seed": run.seed}, "claim")
    return EXIT_OK if claim.verdict else EXIT_FALSE


def cmd_star(args, run: Run) -> int:
    if (args.angle is None) == (args.lines is None):
        raise UsageError("give exactly one of --angle or --lines")
    if args.angle is not None:
        S = st.star_from_angle(args.angle, max_iter=args.max_iter)
    else:
        lines = load_lines(args.lines)
        if len(lines) != 2:
            raise UsageError("--lines needs exactly two lines")
        try:
            S = st.build_star(lines[0], lines[1], max_iter=args.max_iter)
        except st.StarError as exc:
            raise UsageError(str(exc)) from None
    angles = S.sorted_angles()
    out = {"classification": S.classification.to_dict(), "label": str(S.classification),
           "generator_angle": S.generator_angle, "iterations": S.iterations,
           "n_lines": len(angles), "angles": angles[: args.max_lines].tolist(),
           "apex": S.apex.tolist(), "plane": S.plane.to_dict(), "seed": run.seed}
    if args.emit_csv:
        with open(args.emit_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "angle"])
            for i, a in enumerate(S.angles):
                w.writerow([i, repr(float(a))])
    run.emit_json(out, "star")
    return EXIT_INCONCLUSIVE if S.classification.kind == "undecided" else EXIT_OK


def cmd_classify(args, run: Run) -> int:
    K = load_body(args.body)
    tol, th = run.tol, args.theorem
    d = K.d
    p = parse_vector(args.p) if args.p else K.circumcenter
    if p.size != d:
        raise UsageError(f"--p needs {d} coordinates")

    def lam(dim_hint: str):
        if not args.Lambda:
            raise UsageError(f"--lambda (span of the {dim_hint}) is required for {th}")
        span = parse_vectors(args.Lambda)
        if span.shape[1] != d:
            raise UsageError(f"--lambda vectors must have length {d}")
        return Flat(p, span)

    if th == "grandota":
        rep = cl.theorem_grandota_pipeline(K, p, lam("flat Lambda"), tol, n_lines=args.n_samples or 8,
                                           threads=run.threads)
    elif th == "dream":
        if not args.axes:
            raise UsageError("--axes file is required for dream")
        rep = cl.theorem_dream_pipeline(K, load_lines(args.axes), tol, threads=run.threads)
    elif th == "fantasia":
        if not args.hyperplanes:
            raise UsageError("--hyperplanes file is required for fantasia")
        rep = cl.theorem_fantasia_pipeline(K, load_hyperplanes(args.hyperplanes), tol, threads=run.threads)
    elif th == "brasil":
        if args.k is None:
            raise UsageError("--k is required for brasil")
        rep = cl.theorem_brasil_pipeline(K, p, args.k, tol, n_flats=args.n_samples or 6, threads=run.threads)
    elif th == "copaoro":
        if args.k is None:
            raise UsageError("--k is required for copaoro")
        rep = cl.theorem_copaoro_pipeline(K, p, lam("(k+1)-flat Lambda"), args.k, tol,
                                          n_flats=args.n_samples or 6, threads=run.threads)
    else:
        rep = cl.cabezon_condition_check(K, args.n_samples or 12, tol)
    run.emit_json(rep.to_dict(), "report")
    return rep.exit_code


def cmd_verify(args, run: Run) -> int:
    summary = run_suite(args.suite, args.trials, run.seed, run.tol)
    run.emit_json(summary, "suite")
    return EXIT_OK if summary["passed"] else EXIT_FALSE


def cmd_metric(args, run: Run) -> int:
    M, N = load_set(args.sets[0]), load_set(args.sets[1])
    if args.hausdorff:
        try:
            val = hausdorff(M, N, run.tol)
        except UnboundedSetError:
            raise UsageError("Hausdorff distance needs bounded sets; use --busemann for unbounded ones") from None
        out = {"metric": "hausdorff", "value": val, "error_bar": 0.0, "argmax": None, "cutoff": None}
    else:
        p = parse_vector(args.p) if args.p else np.zeros(M.d)
        if p.size != M.d:
            raise UsageError(f"--p needs {M.d} coordinates")
        res = busemann_distance(p, M, N, cutoff=args.cutoff, n_grid=args.grid, tol=run.tol)
        out = {"metric": "busemann", **res.to_dict()}
    run.emit_json({**out, "seed": run.seed}, "metric")
    return EXIT_OK


def cmd_conjecture_probe(args, run: Run) -> int:
    orders = [int(x) for x in args.orders.split(",") if x.strip()]
    if not orders or min(orders) < 3:
        raise UsageError("--orders must list integers >= 3")
    body = load_body(args.body) if args.body else None
    rep = cl.conjecture_probe(run.seed, args.trials, orders, args.max_coaxes, run.tol, body=body)
    buf = io.StringIO()
    buf.write(f"# {rep['label']}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trial", "n_coaxes", "order", "n_points", "sphere_residual"])
    for r in rep["rows"]:
        w.writerow([r.trial, r.n_coaxes, r.order, r.n_points, f"{r.sphere_residual:.6e}"])
    for s in rep["summary"]:
        meds = ";".join(f"{m:.6e}" for m in s["median_residual_by_n_coaxes"])
        buf.write(f"# order {s['order']}: median residual by coaxis count {meds}; "
                  f"non-increasing={s['non_increasing']}\n")
    run.emit_text(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand's unset globals from clobbering ones given before it
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("global options")
    g.add_argument("--tol", type=float, help="verdict tolerance (default 1e-8, times scale)")
    g.add_argument("--samples", type=int, help="direction sample size")
    g.add_argument("--seed", type=int, help="seed recorded in every report (default 0)")
    g.add_argument("--threads", help="worker threads or 'auto'")
    g.add_argument("--out", help="output path (default stdout)")
    g.add_argument("--config", help="key = value config file; flags override it")
    g.add_argument("--timestamps", action="store_true", help="add a generation timestamp to JSON output")

    ap = argparse.ArgumentParser(prog="convsym", description="Symmetry axes, stars and "
                                 "classification checks for convex bodies.", parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a body JSON")
    p.add_argument("--kind", required=True,
                   choices=["cube", "ball", "cylinder", "ellipsoid", "revolution", "symmetric-polytope", "random-polytope"])
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--k", type=int, default=2, help="fiber dimension for revolution bodies")
    p.add_argument("--semi-axes", default=None)
    p.add_argument("--center", default=None)
    p.add_argument("--half", type=float, default=1.0, help="cube half-width, ball radius or cylinder half-height")
    p.add_argument("--rotate", action="store_true", help="random orientation (ellipsoid)")
    p.add_argument("--group", choices=["box", "mirror"], default="box")
    p.add_argument("--n", type=int, default=12, help="point count for random polytopes")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("test", parents=[common], help="test one symmetry claim")
    p.add_argument("body")
    p.add_argument("--axis", nargs="+", help='"p=x,y,z dir=x,y,z"')
    p.add_argument("--hyperplane", nargs="+", help='"p=... normal=..."')
    p.add_argument("--n-axis", nargs="+", help='"n=4 p=... dir=..."')
    p.add_argument("--k-axis", nargs="+", help='"k=1 p=... span=v1;v2 [mode=mundial]"')
    p.add_argument("--coaxis", nargs="+", help='"k=3 p=... span=v1;... (d-2 vectors)"')
    p.set_defaults(fn=cmd_test)

    p = sub.add_parser("star", parents=[common], help="classify a star of lines")
    p.add_argument("--angle", type=float, default=None, help="angle between the two lines (radians)")
    p.add_argument("--lines", default=None, help="JSON file with two lines")
    p.add_argument("--max-iter", type=int, default=st.DENSE_ITER)
    p.add_argument("--max-lines", type=int, default=1000, help="cap on angles listed in the JSON")
    p.add_argument("--emit-csv", default=None, help="write (index, angle) rows to this path")
    p.set_defaults(fn=cmd_star)

    p = sub.add_parser("classify", parents=[common], help="run a theorem pipeline")
    p.add_argument("body")
    p.add_argument("--theorem", required=True,
                   choices=["grandota", "dream", "fantasia", "brasil", "copaoro", "cabezon"])
    p.add_argument("--p", default=None, help="distinguished point (default: circumcentre)")
    p.add_argument("--lambda", dest="Lambda", default=None, help="spanning vectors v1;v2;... of Lambda")
    p.add_argument("--axes", default=None, help="JSON list of lines (dream)")
    p.add_argument("--hyperplanes", default=None, help="JSON list of hyperplanes (fantasia)")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--n-samples", type=int, default=None, help="sampled lines/flats/hyperplanes")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    p.add_argument("--trials", type=int, default=5)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("metric", parents=[common], help="Busemann or Hausdorff distance")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--busemann", action="store_true")
    grp.add_argument("--hausdorff", action="store_true")
    p.add_argument("sets", nargs=2)
    p.add_argument("--p", default=None, help="base point of the Busemann metric (default origin)")
    p.add_argument("--cutoff", type=float, default=30.0)
    p.add_argument("--grid", type=int, default=100_000)
    p.set_defaults(fn=cmd_metric)

    p = sub.add_parser("conjecture-probe", parents=[common], help="sphere residual of coaxis-invariant hulls")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--orders", default="3,4,5")
    p.add_argument("--max-coaxes", type=int, default=3)
    p.add_argument("--body", default=None, help="probe this body instead of orbit hulls")
    p.set_defaults(fn=cmd_conjecture_probe)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        run = Run(args)
        return args.fn(args, run)
    except (UsageError, BodyError, DimensionError, ContainmentError, UnboundedSetError,
            st.StarError, cl.UnsupportedBodyError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"convsym {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"convsym {args.command}: inconsistent verdicts: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
