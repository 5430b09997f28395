"""Batch simulation, scoring against target structures, and per-file analysis."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import objective
from .align import rmsd
from .config import RunConfig
from .geometry import distance_matrix, helix_triplet_count, thickness, ThicknessInterval
from .objective import ObjectiveParams
from .optimizer import MonkeySearch
from .protein_problem import DihedralConformation, ProteinProblem
from .structio import ReportRow, parse_pdb_calpha, write_pdb, write_report

logger = logging.getLogger(__name__)

WORKERS_ENV = "MONKEYFOLD_WORKERS"

SUMMARY_FIELDS = [
    "id", "preset", "seed", "gamma1", "gamma2", "gamma3", "objective", "f1", "f2", "f3",
    "thickness", "helix_triplets", "clash_pairs", "trees", "evaluations", "converged",
]


def clash_pairs(X, th):
    """Pairs at least two residues apart with distance <= th."""
    D = distance_matrix(X)
    i, j = np.triu_indices(len(D), k=2)
    return int(np.count_nonzero(D[i, j] <= th))


# ---------------------------------------------------------------------------
# simulate


@dataclass
class SimulationRecord:
    id: str
    preset: str
    seed: int
    weights: tuple
    angles: np.ndarray
    calpha: np.ndarray
    value: float
    terms: tuple
    thickness: float
    helix_triplets: int
    clash_pairs: int
    trees: int
    evaluations: int
    converged: bool
    wall_time: float = 0.0

    def summary_row(self):
        f1, f2, f3 = self.terms
        return [
            self.id, self.preset, self.seed, *(f"{g:.4f}" for g in self.weights),
            f"{self.value:.4f}", f"{f1:.4f}", f"{f2:.4f}", f"{f3:.4f}",
            f"{self.thickness:.4f}", self.helix_triplets, self.clash_pairs,
            self.trees, self.evaluations, int(self.converged),
        ]


@dataclass(frozen=True)
class _Task:
    id: str
    preset: str
    weights: tuple
    seed: int


def _tasks(config: RunConfig):
    tasks = []
    for g, (name, weights) in enumerate(config.weight_sets):
        for k in range(config.count):
            index = g * config.count + k
            tasks.append(_Task(f"{name}_{k:04d}", name, tuple(weights), config.seed_for(index)))
    return tasks


def run_one(config: RunConfig, task: _Task) -> SimulationRecord:
    start = time.perf_counter()
    params = ObjectiveParams(*task.weights, th=config.th, c=config.c)
    problem = ProteinProblem(config.n, params, config.region, config.moves)
    result = MonkeySearch(problem, replace(config.ms, rng_seed=task.seed)).run()
    x = np.asarray(result.best.point)
    X = problem.backbone(x)
    return SimulationRecord(
        id=task.id,
        preset=task.preset,
        seed=task.seed,
        weights=task.weights,
        angles=x,
        calpha=X,
        value=result.best.value,
        terms=objective.terms(X, params),
        thickness=thickness(X),
        helix_triplets=helix_triplet_count(X),
        clash_pairs=clash_pairs(X, config.th),
        trees=result.trees,
        evaluations=result.evaluations,
        converged=result.converged,
        wall_time=time.perf_counter() - start,
    )


def _run_task(args):
    return run_one(*args)


def worker_count(config: RunConfig, jobs):
    n = config.workers or os.cpu_count() or 1
    cap = os.environ.get(WORKERS_ENV)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, min(n, jobs))


def simulate(config: RunConfig, out_dir=None, workers=None):
    """Run every simulation of ``config`` and write the results.

    For each conformation ``<id>.pdb`` and ``<id>.json`` (angles, seed and
    settings) are written; ``summary.csv`` lists objective and geometry
    statistics, ``timing.csv`` the wall times. Outputs other than
    ``timing.csv`` depend only on the config.
    """
    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = _tasks(config)
    nproc = workers if workers is not None else worker_count(config, len(tasks))
    if nproc > 1:
        with ProcessPoolExecutor(max_workers=nproc) as pool:
            records = list(pool.map(_run_task, [(config, t) for t in tasks]))
    else:
        records = [run_one(config, t) for t in tasks]

    for rec in records:
        write_pdb(rec.calpha, out / f"{rec.id}.pdb")
        with open(out / f"{rec.id}.json", "w") as fh:
            json.dump(_metadata(config, rec), fh, indent=1)
            fh.write("\n")
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for rec in records:
            w.writerow(rec.summary_row())
    with open(out / "timing.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "wall_time_s"])
        for rec in records:
            w.writerow([rec.id, f"{rec.wall_time:.3f}"])
    return records


def _metadata(config, rec):
    m = len(rec.angles) // 2
    return {
        "id": rec.id,
        "preset": rec.preset,
        "seed": rec.seed,
        "n": config.n,
        "weights": list(rec.weights),
        "th": config.th,
        "c": config.c,
        "objective": rec.value,
        "phi": rec.angles[:m].tolist(),
        "psi": rec.angles[m:].tolist(),
        "region": [list(b) for b in config.region.boxes],
        "ms": asdict(replace(config.ms, rng_seed=rec.seed)),
        "trees": rec.trees,
        "evaluations": rec.evaluations,
        "converged": rec.converged,
    }


def load_metadata(path):
    with open(path) as fh:
        meta = json.load(fh)
    meta["angles"] = DihedralConformation(meta["phi"], meta["psi"])
    return meta


# ---------------------------------------------------------------------------
# evaluate


class DataError(RuntimeError):
    pass


def read_chain_map(path):
    """Lines ``<target id> <chain>`` (whitespace or ``:`` separated)."""
    chains = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(":", " ").split()
            if len(parts) != 2 or len(parts[1]) != 1:
                raise DataError(f"{path}:{lineno}: expected '<id> <chain>', got {line!r}")
            chains[parts[0]] = parts[1]
    return chains


def _find_target(targets_dir, tid):
    d = Path(targets_dir)
    for name in (f"{tid}.pdb", f"{tid}.ent", f"pdb{tid}.ent", f"{tid.upper()}.pdb", f"{tid.lower()}.pdb"):
        if (d / name).exists():
            return d / name
    raise DataError(f"no structure file for target {tid!r} in {d}")


@dataclass
class EvaluationReport:
    rows: list
    targets: list
    errors: list = field(default_factory=list)

    def column(self, target):
        return [r.rmsd[target] for r in self.rows if r.rmsd.get(target) is not None]

    def aggregates(self):
        out = {}
        for t in self.targets:
            v = self.column(t)
            out[t] = (len(v), min(v), float(np.mean(v)), max(v)) if v else (0, None, None, None)
        return out

    def best_targets(self):
        best = {}
        for r in self.rows:
            vals = [(v, t) for t, v in r.rmsd.items() if v is not None]
            best[r.conformation] = min(vals) if vals else None
        return best


def evaluate(conf_dir, targets_dir, chain_map, out=None, th=4.30, c=5.50):
    """RMSD of every simulated conformation against every target.

    ``chain_map`` is a dict or a path to a chain map file. Pairs of unequal
    length are recorded in ``errors`` and left empty in the report. When
    ``out`` is given the report CSV is written there and the per-target
    count/min/mean/max table next to it as ``<stem>_summary.csv``.
    """
    if not isinstance(chain_map, dict):
        chain_map = read_chain_map(chain_map)
    targets = {}
    for tid, chain in chain_map.items():
        targets[tid] = parse_pdb_calpha(_find_target(targets_dir, tid), chain, id=tid)
    conf_files = sorted(Path(conf_dir).glob("*.pdb"))
    if not conf_files:
        raise DataError(f"no .pdb conformations in {conf_dir}")

    rows, errors = [], []
    for path in conf_files:
        conf = parse_pdb_calpha(path, id=path.stem)
        X = conf.calpha
        meta_path = path.with_suffix(".json")
        weights = objective.PRESETS["test2"]
        if meta_path.exists():
            with open(meta_path) as fh:
                weights = tuple(json.load(fh)["weights"])
        params = ObjectiveParams(*weights, th=th, c=c)
        f1, f2, f3 = objective.terms(X, params)
        row = ReportRow(
            path.stem, weights, params.gamma1 * f1 + params.gamma2 * f2 + params.gamma3 * f3,
            f1, f2, f3, thickness(X), helix_triplet_count(X),
        )
        for tid, target in targets.items():
            if len(target.calpha) != len(X):
                errors.append(f"{path.stem} vs {tid}: length {len(X)} != {len(target.calpha)}")
                row.rmsd[tid] = None
            else:
                row.rmsd[tid] = rmsd(X, target.calpha)
        rows.append(row)

    report = EvaluationReport(rows, list(targets), errors)
    if out is not None:
        write_report(rows, report.targets, out)
        summary = Path(out).with_name(Path(out).stem + "_summary.csv")
        with open(summary, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["target", "count", "min", "mean", "max"])
            for t, (cnt, lo, mean, hi) in report.aggregates().items():
                fmt = (lambda v: "" if v is None else f"{v:.4f}")
                w.writerow([t, cnt, fmt(lo), fmt(mean), fmt(hi)])
    return report


# ---------------------------------------------------------------------------
# analyze


def analyze(X, th=4.30, c=5.50, weights=objective.PRESETS["test2"],
            interval: ThicknessInterval = ThicknessInterval(), bin_width=0.25):
    """Objective terms and geometric statistics of one C-alpha trace.

    ``X`` may be an array or a PDB path.
    """
    if isinstance(X, (str, os.PathLike)):
        X = parse_pdb_calpha(X).calpha
    X = np.asarray(X, dtype=float)
    params = ObjectiveParams(*weights, th=th, c=c)
    f1, f2, f3 = objective.terms(X, params)
    D = distance_matrix(X)
    d1 = np.diagonal(D, offset=1)
    d2 = np.diagonal(D, offset=2)
    lo = math.floor(d2.min() / bin_width) * bin_width
    hi = math.ceil(d2.max() / bin_width) * bin_width
    if hi <= lo:
        hi = lo + bin_width
    edges = np.arange(lo, hi + bin_width / 2, bin_width)
    counts, edges = np.histogram(d2, bins=edges)
    return {
        "n": len(X),
        "f1": f1,
        "f2": f2,
        "f3": f3,
        "objective": params.gamma1 * f1 + params.gamma2 * f2 + params.gamma3 * f3,
        "weights": tuple(weights),
        "thickness": thickness(X),
        "helix_triplets": helix_triplet_count(X, interval),
        "clash_pairs": clash_pairs(X, th),
        "min_consecutive": float(d1.min()),
        "max_consecutive": float(d1.max()),
        "mean_i_i2": float(d2.mean()),
        "histogram_i_i2": list(zip(edges[:-1].tolist(), edges[1:].tolist(), counts.tolist())),
    }


def format_analysis(stats, th=4.30):
    lines = [
        f"residues              {stats['n']}",
        f"f1 (compactness)      {stats['f1']:.4f}",
        f"f2 (clash)            {stats['f2']:.4f}",
        f"f3 (helix)            {stats['f3']:.4f}",
        f"f  {'/'.join(f'{g:g}' for g in stats['weights']):18s} {stats['objective']:.4f}",
        f"thickness             {stats['thickness']:.4f}",
        f"helix triplets        {stats['helix_triplets']}",
        f"pairs with d <= {th:<5g} {stats['clash_pairs']}",
        f"consecutive CA dist   {stats['min_consecutive']:.3f} .. {stats['max_consecutive']:.3f}",
        f"mean d(i, i+2)        {stats['mean_i_i2']:.3f}",
        "histogram of d(i, i+2):",
    ]
    for lo, hi, cnt in stats["histogram_i_i2"]:
        lines.append(f"  [{lo:5.2f}, {hi:5.2f})  {cnt:4d}  {'#' * cnt}")
    return "\n".join(lines)
