"""``gendyn`` command line: analyze, evolve, verify, fetch.

Exit codes: 0 all checks passed, 1 a check failed, 2 input/output error,
3 solver or numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .datasets import DATASETS
from .dynamics import (DynamicsError, mixing_bound_check, retention_check,
                       stationary_distribution, trajectory)
from .graph import Graph, GraphError, GraphFormatError, giant_component, read_edge_list, read_vertex_values
from .operators import SPECIAL_CASES, OperatorConfig, OperatorError, operator_from_config
from .partition import BRUTE_FORCE_MAX_N, brute_force_conductance, cheeger_check, sweep_partition
from .spectra import SpectralError, second_eigenpair

log = logging.getLogger("gendyn")

EXIT_OK, EXIT_CHECK, EXIT_IO, EXIT_SOLVER = 0, 1, 2, 3


class InputError(Exception):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class RunConfig:
    input: Path
    ops: list[OperatorConfig]
    out: Path
    labels: Path | None = None
    tol: float = 1e-8
    max_iter: int | None = None
    jobs: int = 1
    giant: bool = False
    oracle_max_n: int = BRUTE_FORCE_MAX_N
    clamp: float | None = None
    include_timings: bool = False
    base_dir: Path | None = field(default=None, repr=False)


def _read_graph(path, giant: bool = False) -> Graph:
    try:
        g = read_edge_list(path)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from None
    except GraphFormatError as e:
        raise InputError(f"{path}: {e}") from None
    if g.n == 0:
        raise InputError(f"{path}: no edges")
    if giant:
        g = giant_component(g)
    return g


def _read_values(path, cast=str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return read_vertex_values(fh, cast=cast)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from None
    except GraphFormatError as e:
        raise InputError(f"{path}: {e}") from None


def _load_ops(path: Path | None) -> list[OperatorConfig]:
    if path is None:
        return [OperatorConfig(kind=k) for k in SPECIAL_CASES]
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e})") from None
    items = raw if isinstance(raw, list) else [raw]
    try:
        ops = [OperatorConfig.from_dict(d) for d in items]
    except (OperatorError, AttributeError, TypeError) as e:
        raise InputError(f"{path}: {e}") from None
    if not ops:
        raise InputError(f"{path}: no operators")
    names = [o.label for o in ops]
    dup = sorted({x for x in names if names.count(x) > 1})
    if dup:
        raise InputError(f"{path}: duplicate operator names {dup}; set 'name' to disambiguate")
    return ops


def _parse_op(spec: str) -> OperatorConfig:
    """``--op`` accepts a special-case name, inline JSON or a JSON file."""
    if spec in SPECIAL_CASES:
        return OperatorConfig(kind=spec)
    text = spec
    if not spec.lstrip().startswith("{"):
        try:
            text = Path(spec).read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"cannot read operator config {spec}: {e.strerror or e}") from None
    try:
        return OperatorConfig.from_json(text)
    except (json.JSONDecodeError, OperatorError, AttributeError) as e:
        raise InputError(f"operator config {spec}: {e}") from None


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _centrality_rows(g: Graph, c: np.ndarray):
    order = np.lexsort((np.arange(g.n), g.degrees))
    lo, hi = c.min(), c.max()
    scaled = (c - lo) / (hi - lo) if hi > lo else np.ones_like(c)
    for r, i in enumerate(order):
        yield (r, g.labels[i], fmt(g.degrees[i]), fmt(c[i]), fmt(scaled[i]))


def _analyze_one(g: Graph, cfg: OperatorConfig, rc: RunConfig, labels: dict) -> dict:
    t0 = time.perf_counter()
    op = operator_from_config(g, cfg, clamp=rc.clamp, base_dir=rc.base_dir)
    t1 = time.perf_counter()
    eig = second_eigenpair(op, tol=rc.tol, max_iter=rc.max_iter)
    t2 = time.perf_counter()
    part, prof = sweep_partition(g, op, eig)
    t3 = time.perf_counter()
    phi = None
    if g.n <= rc.oracle_max_n:
        phi, _ = brute_force_conductance(op, n_max=rc.oracle_max_n)
    t4 = time.perf_counter()
    timings = {"build": t1 - t0, "eigen": t2 - t1, "sweep": t3 - t2, "oracle": t4 - t3}
    rep = cheeger_check(eig.eigenvalue, part.conductance, phi, eig.epsilon,
                        tau_min=float(op.tau.min()), timings=timings)
    name = cfg.label
    out = rc.out
    _write_csv(out / f"centrality_{name}.csv", ["rank", "vertex", "degree", "centrality", "rescaled"],
               _centrality_rows(g, op.centrality))
    _write_csv(out / f"sweep_{name}.csv", ["i", "vertex", "cut", "volS", "volSbar", "h"],
               ((i, v, fmt(a), fmt(b), fmt(c), fmt(h)) for i, v, a, b, c, h in prof.rows(g.labels)))
    side = part.side.mask
    _write_csv(out / f"partition_{name}.csv", ["vertex", "label", "side"],
               ((g.labels[i], labels.get(g.labels[i], ""), int(side[i])) for i in range(g.n)))
    doc = {
        "operator": cfg.to_dict(),
        "n": g.n,
        "edges": g.edge_count,
        "residual": eig.residual,
        "iterations": eig.iterations,
        "size_S": int(side.sum()),
        **rep.to_dict(include_timings=rc.include_timings),
    }
    (out / f"cheeger_{name}.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return doc


def cmd_analyze(rc: RunConfig) -> int:
    g = _read_graph(rc.input, rc.giant)
    labels = _read_values(rc.labels) if rc.labels else {}
    try:
        rc.out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputError(f"cannot create {rc.out}: {e.strerror or e}") from None
    with ThreadPoolExecutor(max_workers=max(1, rc.jobs)) as pool:
        futures = [pool.submit(_analyze_one, g, cfg, rc, labels) for cfg in rc.ops]
        docs = [f.result() for f in futures]
    ok = True
    for cfg, d in zip(rc.ops, docs):
        status = "pass" if d["passed"] else "FAIL"
        print(f"{cfg.label}: lambda2={fmt(d['lambda2'])} h={fmt(d['h_sweep'])} "
              f"|S|={d['size_S']} cheeger={status}")
        ok &= d["passed"]
    return EXIT_OK if ok else EXIT_CHECK


def _theta0(spec: str, g: Graph, op) -> np.ndarray:
    if spec.startswith("delta:"):
        v = spec[len("delta:"):]
        try:
            i = g.index(v)
        except KeyError:
            raise InputError(f"--theta0: unknown vertex {v!r}") from None
        x = np.zeros(g.n)
        x[i] = 1.0
        return x
    vals = _read_values(spec, cast=float)
    missing = [lab for lab in g.labels if lab not in vals]
    if missing:
        raise InputError(f"{spec}: no value for vertices {missing[:5]}")
    return np.array([vals[lab] for lab in g.labels])


def cmd_evolve(args) -> int:
    g = _read_graph(args.input, args.giant_component)
    cfg = _parse_op(args.op)
    op = operator_from_config(g, cfg, clamp=args.replicator_clamp)
    x0 = _theta0(args.theta0, g, op)
    if args.t < 0 or args.samples < 1:
        raise InputError("--t must be >= 0 and --samples >= 1")
    times = np.linspace(0.0, args.t, args.samples) if args.samples > 1 else np.array([args.t])
    states = trajectory(op, x0, times)
    rows = ((fmt(s.t), g.labels[i], fmt(s.values[i])) for s in states for i in range(g.n))
    if args.out:
        _write_csv(Path(args.out), ["t", "vertex", "value"], rows)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["t", "vertex", "value"])
        w.writerows(rows)
    if args.stationary:
        pi = stationary_distribution(op, x0).values
        err = float(np.abs(states[-1].values - pi).max())
        print(f"max |theta(t) - pi| = {fmt(err)}", file=sys.stderr)
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise InputError(f"grid {text!r}: expected start:stop:step")
        a, b, s = parts
        k = int(round((b - a) / s))
        return [a + j * s for j in range(k + 1)]
    return [float(p) for p in text.split(",") if p.strip()]


def cmd_verify(args) -> int:
    g = _read_graph(args.input, args.giant_component)
    cfg = _parse_op(args.op)
    op = operator_from_config(g, cfg, clamp=args.replicator_clamp)
    times = _parse_grid(args.grid)
    if args.set:
        try:
            names = [ln.split("#", 1)[0].strip() for ln in
                     Path(args.set).read_text(encoding="utf-8").splitlines()]
        except OSError as e:
            raise InputError(f"cannot read {args.set}: {e.strerror or e}") from None
        try:
            idx = [g.index(x) for x in names if x]
        except KeyError as e:
            raise InputError(f"{args.set}: {e.args[0]}") from None
        try:
            rows = retention_check(op, idx, times).rows()
        except ValueError as e:
            raise InputError(f"{args.set}: {e}") from None
    else:
        try:
            u, v = (g.index(x.strip()) for x in args.pair.split(","))
        except (KeyError, ValueError):
            raise InputError(f"--pair {args.pair!r}: expected two known vertices 'u,v'") from None
        rows = [mixing_bound_check(op, u, v, t).to_dict() for t in times]
    text = json.dumps(rows, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_CHECK


def cmd_fetch(args) -> int:
    print("Only karate is bundled.  Download the others by hand, convert them to")
    print("'u v' edge lists (and 'vertex label' files) and point GENDYN_DATA at them.\n")
    print(f"{'name':<10}{'vertices':>9}{'edges':>8}  source")
    for d in DATASETS:
        print(f"{d.name:<10}{d.vertices:>9}{d.edges:>8}  {d.source}")
        if d.note:
            print(f"{'':<29}{d.note}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gendyn", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp_, need_op=True):
        sp_.add_argument("--input", required=True, help="edge list 'u v [w]'")
        sp_.add_argument("--giant-component", action="store_true",
                         help="restrict to the largest connected component")
        sp_.add_argument("--replicator-clamp", type=float, default=None, metavar="EPS",
                         help="raise tiny Perron entries to EPS instead of failing")
        if need_op:
            sp_.add_argument("--op", required=True,
                             help="special-case name, inline JSON or JSON file")

    a = sub.add_parser("analyze", help="centrality, sweep, partition and Cheeger report per operator")
    common(a, need_op=False)
    a.add_argument("--labels", help="'vertex label' ground-truth file")
    a.add_argument("--ops", help="JSON list of operator configs (default: the four special cases)")
    a.add_argument("--out", required=True, help="output directory")
    a.add_argument("--tol", type=float, default=1e-8)
    a.add_argument("--max-iter", type=int, default=None, help="matvec budget (default 10n+1000)")
    a.add_argument("--jobs", type=int, default=1)
    a.add_argument("--oracle-max-n", type=int, default=BRUTE_FORCE_MAX_N)
    a.add_argument("--include-timings", action="store_true",
                   help="add wall-clock timings to the JSON (breaks byte-for-byte reproducibility)")

    e = sub.add_parser("evolve", help="trajectory CSV of the linear dynamics")
    common(e)
    e.add_argument("--theta0", required=True, help="'delta:VERTEX' or a 'vertex value' file")
    e.add_argument("--t", type=float, required=True)
    e.add_argument("--samples", type=int, default=1)
    e.add_argument("--out")
    e.add_argument("--stationary", action="store_true", help="report distance to the limit on stderr")

    v = sub.add_parser("verify", help="retention (--set) or mixing (--pair) bound checks")
    common(v)
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--set", help="file with one vertex per line")
    g.add_argument("--pair", help="'u,v' for the pointwise mixing bound")
    v.add_argument("--grid", default="0:10:0.5", help="'start:stop:step' or comma list of times")
    v.add_argument("--out")

    sub.add_parser("fetch", help="list external dataset sources and expected sizes")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "analyze":
            rc = RunConfig(
                input=Path(args.input), ops=_load_ops(args.ops), out=Path(args.out),
                labels=Path(args.labels) if args.labels else None, tol=args.tol,
                max_iter=args.max_iter, jobs=args.jobs,
                giant=args.giant_component, oracle_max_n=args.oracle_max_n,
                clamp=args.replicator_clamp, include_timings=args.include_timings,
                base_dir=Path(args.ops).parent if args.ops else None,
            )
            return cmd_analyze(rc)
        if args.command == "evolve":
            return cmd_evolve(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_fetch(args)
    except InputError as e:
        print(f"gendyn: error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"gendyn: error: {e}", file=sys.stderr)
        return EXIT_IO
    except (SpectralError, DynamicsError, GraphError, OperatorError) as e:
        print(f"gendyn: solver error: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
