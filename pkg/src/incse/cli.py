"""Command-line driver: dataset generation, measurement, baselines, comparison, convergence."""

from __future__ import annotations

import argparse
import csv
import gc
import json
import math
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .baselines import rfs_1d, rfs_2d
from .bounds import convergence_experiment
from .generators import GeneratorConfig, generate_dataset
from .graph import Graph, IncrementalSequence, load_edge_list, load_sequence, validate_sequence
from .measure import init_1d, init_2d, measure_1d, measure_2d
from .tree import build_two_dim_tree, load_tree

DEFAULT_REPETITIONS = 5
PBP_REL_TOL = 1e-6
ONE_DIM_REL_TOL = 1e-10


class DatasetError(RuntimeError):
    pass


@dataclass
class Dataset:
    root: Path
    g0: Graph
    assignment: dict[int, int]
    sequences: list[IncrementalSequence]  # index t-1
    manifest: dict = field(default_factory=dict)

    @property
    def process(self) -> str | None:
        return self.manifest.get("process")


def load_dataset(root: str | Path, check: bool = True) -> Dataset:
    """Read a generated dataset directory; the longest sequence is checked for legality once."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset directory {root} does not exist")
    for name in ("original.edges", "original.tree"):
        if not (root / name).is_file():
            raise DatasetError(f"missing {name} in {root}")
    g0 = load_edge_list(root / "original.edges")
    assignment = load_tree(root / "original.tree")
    seq_files = sorted(root.glob("seq_t*.edges"), key=lambda p: int(p.stem[5:]))
    if not seq_files:
        raise DatasetError(f"no seq_t*.edges files in {root}")
    sequences = [load_sequence(p) for p in seq_files]
    manifest = {}
    if (root / "manifest.json").is_file():
        manifest = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
    if check:
        full = sequences[-1]
        for p, xi in zip(seq_files, sequences):
            if full.edges[: xi.n] != xi.edges:
                raise DatasetError(f"{p.name} is not a prefix of the last sequence")
        violation = validate_sequence(g0, full)
        if violation is not None:
            raise DatasetError(f"illegal sequence in {seq_files[-1].name}: {violation}")
    return Dataset(root, g0, assignment, sequences, manifest)


def timed(fn: Callable[[], object], repetitions: int = DEFAULT_REPETITIONS) -> tuple[object, float]:
    """One discarded warm-up call, then the median wall time of `repetitions` calls.

    The cyclic garbage collector is paused while timing, as `timeit` does.
    """
    result = fn()
    times = []
    was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        for _ in range(max(1, repetitions)):
            t0 = time.perf_counter()
            result = fn()
            times.append(time.perf_counter() - t0)
    finally:
        if was_enabled:
            gc.enable()
    return result, statistics.median(times)


def timed_series(fns: Sequence[Callable[[], object]], repetitions: int = DEFAULT_REPETITIONS) -> list[tuple[object, float]]:
    """`timed` for each of `fns`, with repetitions taken round-robin across the series.

    Each function still gets a discarded warm-up and its own median, but slow
    drift in host speed is spread over every point instead of landing on a
    contiguous block of them.
    """
    results = [fn() for fn in fns]
    times: list[list[float]] = [[] for _ in fns]
    was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        for _ in range(max(1, repetitions)):
            for i, fn in enumerate(fns):
                t0 = time.perf_counter()
                results[i] = fn()
                times[i].append(time.perf_counter() - t0)
    finally:
        if was_enabled:
            gc.enable()
    return [(r, statistics.median(ts)) for r, ts in zip(results, times)]


@dataclass
class StepResult:
    t: int
    n: int
    H_bits: float
    wall_seconds: float


@dataclass
class TimingRecord:
    t: int
    n: int
    H_incre: float
    H_rfs: float
    C_M: float
    C_R: float

    @property
    def SP(self) -> float:
        return self.C_R / self.C_M if self.C_M > 0 else math.inf

    @property
    def rel_err(self) -> float:
        """Signed (incremental - baseline) / baseline."""
        return (self.H_incre - self.H_rfs) / self.H_rfs


def run_measure(ds: Dataset, dim: int, repetitions: int = DEFAULT_REPETITIONS) -> tuple[list[StepResult], float]:
    """Incremental entropy for t = 0..T; returns the rows and the one-off init time."""
    _check_dim(dim)
    if dim == 1:
        state, init_s = timed(lambda: init_1d(ds.g0), repetitions)
        step = measure_1d
    else:
        tree = build_two_dim_tree(ds.g0, ds.assignment)
        state, init_s = timed(lambda: init_2d(ds.g0, tree), repetitions)
        step = measure_2d
    seqs = [IncrementalSequence(())] + ds.sequences
    timings = timed_series([lambda xi=xi: step(state, xi) for xi in seqs], repetitions)
    return [StepResult(t, xi.n, h, secs) for t, (xi, (h, secs)) in enumerate(zip(seqs, timings))], init_s


def run_baseline(
    ds: Dataset, dim: int, seed: int = 0, repetitions: int = DEFAULT_REPETITIONS
) -> list[StepResult]:
    """Recompute-from-scratch entropy for t = 0..T (Louvain inside the timed region for dim 2)."""
    _check_dim(dim)
    if dim == 1:
        fn = lambda xi: rfs_1d(ds.g0, xi, check=False)  # noqa: E731
    else:
        fn = lambda xi: rfs_2d(ds.g0, xi, seed=seed, check=False)[0]  # noqa: E731
    seqs = [IncrementalSequence(())] + ds.sequences
    timings = timed_series([lambda xi=xi: fn(xi) for xi in seqs], repetitions)
    return [StepResult(t, xi.n, h, secs) for t, (xi, (h, secs)) in enumerate(zip(seqs, timings))]


def run_compare(
    ds: Dataset, dim: int, seed: int = 0, repetitions: int = DEFAULT_REPETITIONS
) -> tuple[list[TimingRecord], float]:
    measured, init_s = run_measure(ds, dim, repetitions)
    base = run_baseline(ds, dim, seed, repetitions)
    records = [
        TimingRecord(m.t, m.n, m.H_bits, b.H_bits, m.wall_seconds, b.wall_seconds)
        for m, b in zip(measured, base)
        if m.t > 0
    ]
    return records, init_s


def summarize(records: Sequence[TimingRecord]) -> dict:
    sp = [r.SP for r in records]
    return {
        "steps": len(records),
        "SP_min": min(sp),
        "SP_mean": statistics.fmean(sp),
        "SP_max": max(sp),
        "max_abs_rel_err": max(abs(r.rel_err) for r in records),
    }


def compare_failures(records: Sequence[TimingRecord], dim: int, process: str | None) -> list[dict]:
    """Invariant violations of a comparison run."""
    failures = []
    for r in records:
        if not (math.isfinite(r.H_incre) and r.H_incre > 0):
            failures.append({"t": r.t, "check": "finite_positive_entropy", "value": r.H_incre})
        if not r.SP > 0:
            failures.append({"t": r.t, "check": "positive_speedup", "value": r.SP})
        if dim == 1 and abs(r.rel_err) > ONE_DIM_REL_TOL:
            failures.append({"t": r.t, "check": "one_dim_equivalence", "value": r.rel_err})
        if dim == 2 and process == "pbp" and abs(r.rel_err) > PBP_REL_TOL:
            failures.append({"t": r.t, "check": "pbp_two_dim_error", "value": r.rel_err})
    return failures


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_csv(path: str | Path | None, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    fh = sys.stdout if path is None or str(path) == "-" else open(path, "w", newline="", encoding="utf-8")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def _check_dim(dim: int) -> None:
    if dim not in (1, 2):
        raise ValueError(f"dimension must be 1 or 2, got {dim}")


def _fail(summary: dict) -> int:
    print(json.dumps({"status": "fail", **summary}, default=_fmt), file=sys.stderr)
    return 1


# ---- subcommands -----------------------------------------------------------


def cmd_generate(opts: dict) -> int:
    cfg = {k: v for k, v in opts.get("generator", {}).items()}
    out = opts.get("out") or cfg.pop("out", None)
    cfg.pop("out", None)
    if not out:
        raise SystemExit("generate needs --out or an 'out' key in the config")
    manifest = generate_dataset(GeneratorConfig.from_dict(cfg), out)
    last = manifest["snapshots"][-1]
    print(
        f"wrote {manifest['T']} sequences to {out}: process={manifest['process']} "
        f"N={manifest['N']} communities={manifest['louvain_communities']} "
        f"final nodes={last['nodes']} edges={last['edges']}"
    )
    return 0


def cmd_measure(opts: dict) -> int:
    ds = load_dataset(opts["dataset"])
    rows, init_s = run_measure(ds, opts["dim"], opts["repetitions"])
    write_csv(opts.get("out"), ["t", "n", "H_bits", "wall_seconds"], [astuple_step(r) for r in rows])
    print(f"init_seconds={init_s:.12g}", file=sys.stderr)
    bad = [r.t for r in rows if not (math.isfinite(r.H_bits) and r.H_bits > 0)]
    return _fail({"check": "finite_positive_entropy", "t": bad}) if bad else 0


def cmd_baseline(opts: dict) -> int:
    ds = load_dataset(opts["dataset"])
    rows = run_baseline(ds, opts["dim"], opts["seed"], opts["repetitions"])
    write_csv(opts.get("out"), ["t", "n", "H_bits", "wall_seconds"], [astuple_step(r) for r in rows])
    bad = [r.t for r in rows if not (math.isfinite(r.H_bits) and r.H_bits > 0)]
    return _fail({"check": "finite_positive_entropy", "t": bad}) if bad else 0


def cmd_compare(opts: dict) -> int:
    ds = load_dataset(opts["dataset"])
    dim = opts["dim"]
    records, init_s = run_compare(ds, dim, opts["seed"], opts["repetitions"])
    write_csv(
        opts.get("out"),
        ["t", "n", "H_incre", "H_rfs", "rel_err_pct", "C_M", "C_R", "SP"],
        [(r.t, r.n, r.H_incre, r.H_rfs, 100 * r.rel_err, r.C_M, r.C_R, r.SP) for r in records],
    )
    summary = summarize(records)
    summary["init_seconds"] = init_s
    print(json.dumps({k: _fmt(v) for k, v in summary.items()}), file=sys.stderr)
    failures = compare_failures(records, dim, ds.process)
    return _fail({"failures": failures}) if failures else 0


def cmd_convergence(opts: dict) -> int:
    conv = opts.get("convergence", {})
    known = {"edge_counts", "trials_per_size", "n_mean", "n_std", "seed", "p_pin_max", "p_pac_max"}
    unknown = set(conv) - known - {"out"}
    if unknown:
        raise SystemExit(f"unknown convergence config keys: {sorted(unknown)}")
    out = opts.get("out") or conv.get("out")
    kwargs = {k: v for k, v in conv.items() if k in known}
    if opts.get("seed_given"):
        kwargs["seed"] = opts["seed"]
    result = convergence_experiment(**kwargs)
    if out:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        result.write_trials_csv(out / "trials.csv")
        result.write_table_csv(out / "table.csv")
    fields = list(asdict(result.rows[0]))
    write_csv(None, fields, [[getattr(r, f) for f in fields] for r in result.rows])
    print(f"decrease dL1={result.decrease(1):.4%} dL2={result.decrease(2):.4%}", file=sys.stderr)
    failures = []
    for tr in result.trials:
        for k, obs, lb, ub in ((1, tr.dL1, tr.lb1, tr.ub1), (2, tr.dL2, tr.lb2, tr.ub2)):
            if not (lb - 1e-12 <= obs <= ub):
                failures.append({"m": tr.m, "trial": tr.trial, "dim": k, "dL": obs, "lb": lb, "ub": ub})
    return _fail({"check": "bounds_containment", "failures": failures}) if failures else 0


def astuple_step(r: StepResult) -> tuple:
    return (r.t, r.n, r.H_bits, r.wall_seconds)


COMMANDS = {
    "generate": cmd_generate,
    "measure": cmd_measure,
    "baseline": cmd_baseline,
    "compare": cmd_compare,
    "convergence": cmd_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="incse", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON file; its keys mirror the long flags")
        sp.add_argument("--out", help="output file (directory for generate/convergence); '-' for stdout")
        if name in ("measure", "baseline", "compare"):
            sp.add_argument("--dataset")
            sp.add_argument("--dim", type=int, choices=(1, 2))
            sp.add_argument("--repetitions", type=int)
        if name in ("baseline", "compare", "convergence"):
            sp.add_argument("--seed", type=int)
    return p


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge config-file values with flags; flags win."""
    config = {}
    if args.config:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(config, dict):
            raise SystemExit("config file must hold a JSON object")
    opts: dict = {}
    if args.command == "generate":
        opts["generator"] = config
    elif args.command == "convergence":
        opts["convergence"] = config
    else:
        opts.update(config)
    for key in ("out", "dataset", "dim", "seed", "repetitions"):
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
            if key == "seed":
                opts["seed_given"] = True
    if args.command in ("measure", "baseline", "compare"):
        if "dataset" not in opts:
            raise SystemExit(f"{args.command} needs --dataset")
        opts["dim"] = int(opts.get("dim", 2))
        opts.setdefault("seed", 0)
        opts["repetitions"] = int(opts.get("repetitions", DEFAULT_REPETITIONS))
    return opts


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    opts = resolve_options(args)
    try:
        return COMMANDS[args.command](opts)
    except (DatasetError, OSError, ValueError) as exc:
        return _fail({"error": type(exc).__name__, "message": str(exc)})


if __name__ == "__main__":
    sys.exit(main())
