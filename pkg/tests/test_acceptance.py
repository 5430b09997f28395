"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (collected again in the terminal
summary) and asserts at the stated tolerance.
"""

import math
import shutil
import time
from itertools import combinations
from pathlib import Path

import numpy as np

from monkeyfold import pipeline
from monkeyfold.align import rmsd, superpose
from monkeyfold.config import load_config, parse_config
from monkeyfold.geometry import build_backbone, circumradius, distance_matrix, helix_triplet_count
from monkeyfold.objective import ObjectiveParams, terms
from monkeyfold.optimizer import MonkeySearch, MSParams
from monkeyfold.structio import parse_pdb_calpha

ROOT = Path(__file__).resolve().parent.parent
DATA = Path(__file__).parent / "data"
K = 3.808986496899144


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def test_equilateral_radius_in_thickness_interval(criterion):
    rng = np.random.default_rng(100)
    start = time.perf_counter()
    worst_rel, outside = 0.0, 0
    for s in rng.uniform(4.33, 4.88, 50):
        r = circumradius((0, 0, 0), (s, 0, 0), (s / 2, s * math.sqrt(3) / 2, 0))
        worst_rel = max(worst_rel, abs(r - s / math.sqrt(3)) / (s / math.sqrt(3)))
        outside += not (2.50 <= round(r, 2) <= 2.82)
    elapsed = time.perf_counter() - start
    ok = worst_rel < 1e-9 and outside == 0 and elapsed < 1
    criterion(ok, f"max rel err {worst_rel:.1e}, outside {outside}, {elapsed:.3f}s")
    assert ok


def loop_terms(X, th, c):
    n = len(X)
    f1 = f2 = f3 = 0.0
    for i, j in combinations(range(n), 2):
        d = math.dist(X[i], X[j])
        if j >= i + 3:
            f1 += d
        if j >= i + 2 and th - d >= 0:
            f2 += math.exp(th - d)
        if j == i + 2:
            f3 += (d - c) ** 2
    return f1, f2, f3


def test_objective_matches_brute_force(criterion):
    rng = np.random.default_rng(200)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(5, 21))
        X = build_backbone(*rng.uniform(-math.pi, math.pi, (2, n - 2)))
        X = X * rng.uniform(0.4, 1.0)  # shrink some chains so the clash term is active
        g = tuple(rng.uniform(0, 2, 3))
        p = ObjectiveParams(*g)
        got = terms(X, p)
        want = loop_terms(X, p.th, p.c)
        f_got = sum(a * b for a, b in zip(g, got))
        f_want = sum(a * b for a, b in zip(g, want))
        for a, b in zip(got + (f_got,), want + (f_want,)):
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300) if b else abs(a))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 5
    criterion(ok, f"max rel err {worst:.1e}, {elapsed:.2f}s")
    assert ok


def test_consecutive_distance_constant(criterion):
    rng = np.random.default_rng(300)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        X = build_backbone(*rng.uniform(-math.pi, math.pi, (2, 18)))
        d = np.linalg.norm(np.diff(X, axis=0), axis=1)
        worst = max(worst, float(np.max(np.abs(d - K))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and elapsed < 1
    criterion(ok, f"max |d - {K:.4f}| = {worst:.1e}, {elapsed:.3f}s")
    assert ok


def test_kabsch_properties(criterion):
    rng = np.random.default_rng(400)
    start = time.perf_counter()
    worst_rmsd = worst_t = worst_orth = 0.0
    for _ in range(1000):
        P = rng.normal(scale=10, size=(int(rng.integers(4, 40)), 3))
        R, t = random_rotation(rng), rng.normal(scale=25, size=3)
        Q = P @ R.T + t
        worst_rmsd = max(worst_rmsd, rmsd(P, Q))
        T = superpose(P, Q)
        worst_t = max(worst_t, np.max(np.abs(T.rotation - R)), np.max(np.abs(T.translation - t)))
        worst_orth = max(
            worst_orth,
            np.max(np.abs(T.rotation @ T.rotation.T - np.eye(3))),
            abs(np.linalg.det(T.rotation) - 1),
        )
    elapsed = time.perf_counter() - start
    ok = worst_rmsd < 1e-9 and worst_t < 1e-9 and worst_orth < 1e-9 and elapsed < 5
    criterion(ok, f"rmsd {worst_rmsd:.1e}, transform {worst_t:.1e}, orthogonality {worst_orth:.1e}, {elapsed:.2f}s")
    assert ok


class Recording:
    """2-D quadratic that logs every evaluated point."""

    def __init__(self):
        self.calls = []

    def random_solution(self, rng):
        return rng.uniform(-5, 5, 2)

    def perturb(self, x, memory, rng):
        return x + rng.normal(0, 0.7, 2)

    def objective(self, x):
        self.calls.append(tuple(x))
        return float((x[0] - 1) ** 2 + 3 * (x[1] + 2) ** 2)

    def distance(self, a, b):
        return float(np.max(np.abs(a - b)))


def test_optimizer_marks_budget_and_determinism(criterion):
    rng = np.random.default_rng(500)
    bad_marks = over_budget = 0
    for k in range(100):
        h, c = int(rng.integers(1, 7)), int(rng.integers(0, 6))
        ms = MonkeySearch(Recording(), MSParams(height=h, climb_ups=c, rng_seed=k))
        tree = ms.run_tree(ms._evaluate(ms.problem.random_solution(ms.rng)))
        for b in tree.root.walk():
            if b.children and b.mark != min(x.value for x in b.walk()):
                bad_marks += 1
        over_budget += tree.evaluations + 1 > 2 * h * (1 + c) + 1
    traces = []
    for _ in range(2):
        prob = Recording()
        res = MonkeySearch(prob, MSParams(height=6, climb_ups=3, starting_trees=4, max_trees=15, rng_seed=7)).run()
        traces.append((prob.calls, res.best.value, tuple(res.best.point)))
    identical = traces[0] == traces[1]
    ok = bad_marks == 0 and over_budget == 0 and identical
    criterion(ok, f"wrong marks {bad_marks}, over budget {over_budget}, identical traces {identical}")
    assert ok


class Sphere:
    def random_solution(self, rng):
        return rng.uniform(-5, 5, 2)

    def perturb(self, x, memory, rng):
        # step lengths spread over three decades
        return x + rng.normal(0, 1, 2) * 10.0 ** rng.uniform(-3, 0)

    def objective(self, x):
        return float(x @ x)

    def distance(self, a, b):
        return float(np.max(np.abs(a - b)))


def test_sphere_convergence(criterion):
    start = time.perf_counter()
    hits, used = 0, []
    for seed in range(10):
        params = MSParams(max_trees=200, epsilon=1e-6, rng_seed=seed)
        res = MonkeySearch(Sphere(), params).run(lambda t, ms: ms.memory.best.value <= 1e-3)
        hits += res.best.value <= 1e-3
        used.append(res.trees)
    elapsed = time.perf_counter() - start
    ok = hits >= 9 and elapsed < 30
    criterion(ok, f"{hits}/10 seeds reach 1e-3, trees used {used}, {elapsed:.1f}s")
    assert ok


DESK = """\
n = 20
preset = test2
count = 20
height = 20
climb_ups = 10
starting_trees = 10
max_trees = 100
workers = 1
"""


def test_desk_scale_quality(criterion):
    cfg = parse_config(DESK)
    start = time.perf_counter()
    good = 0
    clash_free = spacing = helical = 0
    for task in pipeline._tasks(cfg):
        X = pipeline.run_one(cfg, task).calpha
        D = distance_matrix(X)
        i, j = np.triu_indices(len(X), k=2)
        a = bool(np.all(D[i, j] >= 4.0))
        b = abs(float(np.diagonal(D, 2).mean()) - 5.50) <= 0.60
        c = helix_triplet_count(X) >= 1
        clash_free += a
        spacing += b
        helical += c
        good += a and b and c
    elapsed = time.perf_counter() - start
    ok = good >= 0.8 * cfg.total and elapsed < 600
    criterion(
        ok,
        f"{good}/{cfg.total} pass all (no clash {clash_free}, i,i+2 spacing {spacing}, "
        f"helix triplet {helical}), {elapsed:.0f}s",
    )
    assert ok


SMOKE = """\
n = 65
preset = test2
count = 1
seed = 3
height = 8
climb_ups = 3
starting_trees = 3
max_trees = 6
workers = 1
"""


def test_full_pipeline_smoke(criterion, tmp_path):
    sim = tmp_path / "sim"
    records = pipeline.simulate(parse_config(SMOKE), sim)
    pdb = sim / f"{records[0].id}.pdb"
    back = parse_pdb_calpha(pdb).calpha
    round_trip = float(np.max(np.abs(back - records[0].calpha)))
    stats = pipeline.analyze(pdb)

    conf = tmp_path / "conf"
    conf.mkdir()
    shutil.copy(pdb, conf)
    shutil.copy(DATA / "helix65.pdb", conf / "helix65_copy.pdb")
    out = tmp_path / "report.csv"
    report = pipeline.evaluate(conf, DATA, DATA / "chains.txt", out)
    lines = out.read_text().splitlines()
    header = lines[0].split(",")
    well_formed = (
        len(lines) == 3
        and header[-1] == "rmsd_helix65"
        and all(len(l.split(",")) == len(header) for l in lines)
        and not report.errors
    )
    self_rmsd = report.rows[0].rmsd["helix65"]
    ok = well_formed and self_rmsd <= 1e-9 and round_trip <= 1e-3 and stats["n"] == 65
    criterion(ok, f"report ok {well_formed}, self RMSD {self_rmsd:.1e}, round trip {round_trip:.1e}")
    assert ok


def test_full_scale_config(criterion):
    cfg = load_config(ROOT / "configs" / "full_scale.cfg")
    want_ms = MSParams(height=40, climb_ups=20, memory_size=10, starting_trees=100, max_trees=3000)
    tasks = pipeline._tasks(cfg)
    ok = (
        cfg.n == 65
        and cfg.total == 1000
        and len({t.preset for t in tasks}) == 4
        and len({t.seed for t in tasks}) == 1000
        and cfg.ms == want_ms
    )
    criterion(ok, f"n={cfg.n}, {cfg.total} runs over {len(cfg.weight_sets)} presets (not executed here)")
    assert ok
