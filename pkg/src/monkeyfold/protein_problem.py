"""Protein conformation search over backbone dihedral angles.

The variable vector is ``[phi_1 .. phi_m, psi_1 .. psi_m]`` with
``m = n - 2`` interior residues, stored in radians in ``(-pi, pi]``. Each
(phi, psi) pair is kept inside an :class:`AllowedRegion` of rectangular
Ramachandran boxes. Scoring builds the C-alpha trace and applies the
weighted objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import objective
from .geometry import DEFAULT_GEOMETRY, BondGeometry, build_backbone
from .objective import ObjectiveParams

TWO_PI = 2.0 * math.pi


def wrap_angle(a):
    """Map angles into ``(-pi, pi]``; values already in range are untouched."""
    a = np.asarray(a, dtype=float)
    out = np.where((a > -math.pi) & (a <= math.pi), a, math.pi - np.mod(math.pi - a, TWO_PI))
    return out if out.ndim else float(out)


def angle_diff(a, b):
    """Absolute circular difference, in ``[0, pi]``."""
    d = np.abs(np.mod(np.asarray(a, dtype=float) - b, TWO_PI))
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True)
class DihedralConformation:
    phi: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        psi = np.asarray(self.psi, dtype=float)
        if phi.shape != psi.shape or phi.ndim != 1:
            raise ValueError("phi and psi must be 1-D arrays of equal length")
        if len(phi) < 1:
            raise ValueError("need at least one (phi, psi) pair (n >= 3)")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)

    @property
    def n(self):
        return len(self.phi) + 2

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=float)
        m = len(x) // 2
        if len(x) != 2 * m:
            raise ValueError("angle vector length must be even")
        return cls(x[:m], x[m:])

    def to_vector(self):
        return np.concatenate([self.phi, self.psi])

    def backbone(self, geom: BondGeometry = DEFAULT_GEOMETRY):
        return build_backbone(self.phi, self.psi, geom)


def _box(phi_lo, phi_hi, psi_lo, psi_hi):
    return tuple(math.radians(v) for v in (phi_lo, phi_hi, psi_lo, psi_hi))


@dataclass(frozen=True)
class AllowedRegion:
    """Union of rectangular (phi, psi) boxes in radians.

    Each box is ``(phi_lo, phi_hi, psi_lo, psi_hi)`` with ``lo < hi`` inside
    ``[-pi, pi]``. The default pair covers the alpha-helical and beta basins.
    """

    boxes: tuple = (_box(-160, -45, -70, -10), _box(-170, -50, 90, 180))

    def __post_init__(self):
        boxes = tuple(tuple(float(v) for v in b) for b in self.boxes)
        if not boxes:
            raise ValueError("allowed region needs at least one box")
        for b in boxes:
            if len(b) != 4:
                raise ValueError(f"box needs 4 bounds, got {b}")
            if not (-math.pi <= b[0] < b[1] <= math.pi and -math.pi <= b[2] < b[3] <= math.pi):
                raise ValueError(f"box bounds must satisfy -pi <= lo < hi <= pi, got {b}")
        object.__setattr__(self, "boxes", boxes)
        areas = np.array([(b[1] - b[0]) * (b[3] - b[2]) for b in boxes])
        object.__setattr__(self, "_weights", areas / areas.sum())

    @classmethod
    def from_degrees(cls, boxes):
        return cls(tuple(_box(*b) for b in boxes))

    def contains(self, phi, psi, tol=1e-12):
        phi = np.asarray(phi, dtype=float)
        psi = np.asarray(psi, dtype=float)
        inside = np.zeros(np.broadcast(phi, psi).shape, dtype=bool)
        for b in self.boxes:
            inside |= (
                (phi >= b[0] - tol) & (phi <= b[1] + tol) & (psi >= b[2] - tol) & (psi <= b[3] + tol)
            )
        return inside

    def sample(self, size, rng):
        """``size`` (phi, psi) pairs: box picked by area, then uniform in it."""
        which = rng.choice(len(self.boxes), size=size, p=self._weights)
        u = rng.random((size, 2))
        b = np.asarray(self.boxes)[which]
        phi = b[:, 0] + u[:, 0] * (b[:, 1] - b[:, 0])
        psi = b[:, 2] + u[:, 1] * (b[:, 3] - b[:, 2])
        return phi, psi

    def clamp(self, phi, psi):
        """Project a pair onto the nearest point of the nearest box, measuring
        on the circle. Pairs already inside are returned unchanged."""
        phi, psi = float(phi), float(psi)
        if self.contains(phi, psi, tol=0.0):
            return phi, psi
        best = None
        for b in self.boxes:
            p = _clamp_circular(phi, b[0], b[1])
            q = _clamp_circular(psi, b[2], b[3])
            d = float(angle_diff(phi, p)) ** 2 + float(angle_diff(psi, q)) ** 2
            if best is None or d < best[0]:
                best = (d, p, q)
        return best[1], best[2]

    def clamp_all(self, phi, psi):
        phi = np.array(phi, dtype=float)
        psi = np.array(psi, dtype=float)
        for k in np.flatnonzero(~self.contains(phi, psi, tol=0.0)):
            phi[k], psi[k] = self.clamp(phi[k], psi[k])
        return phi, psi


def _clamp_circular(a, lo, hi):
    if lo <= a <= hi:
        return a
    return lo if float(angle_diff(a, lo)) <= float(angle_diff(a, hi)) else hi


@dataclass(frozen=True)
class PerturbationSettings:
    """Knobs of the move catalog: single-angle nudge width, the largest
    window (in residues) for segment moves."""

    sigma: float = math.radians(15.0)
    window_max: int = 5

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.window_max < 1:
            raise ValueError("window_max must be >= 1")


MOVES = ("nudge", "segment", "memory")


def random_conformation(n, region: AllowedRegion, rng) -> DihedralConformation:
    if n < 3:
        raise ValueError("chain length must be >= 3")
    phi, psi = region.sample(n - 2, rng)
    return DihedralConformation(phi, psi)


@dataclass
class ProteinProblem:
    """Adapter exposing the protein model to :class:`~monkeyfold.optimizer.MonkeySearch`."""

    n: int = 65
    params: ObjectiveParams = field(default_factory=ObjectiveParams)
    region: AllowedRegion = field(default_factory=AllowedRegion)
    moves: PerturbationSettings = field(default_factory=PerturbationSettings)
    geom: BondGeometry = DEFAULT_GEOMETRY

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("chain length must be >= 3")

    @property
    def m(self):
        return self.n - 2

    # -- optimizer protocol -------------------------------------------------

    def random_solution(self, rng):
        return random_conformation(self.n, self.region, rng).to_vector()

    def backbone(self, x):
        m = self.m
        return build_backbone(x[:m], x[m:], self.geom)

    def objective(self, x):
        return objective.evaluate(self.backbone(x), self.params)

    evaluate = objective

    def distance(self, a, b):
        """Largest circular difference over all angle slots."""
        return float(np.max(angle_diff(a, b)))

    def perturb(self, x, memory_points, rng, move=None):
        """Apply one move drawn uniformly from the catalog.

        ``nudge`` adds Gaussian noise to one angle, ``segment`` resamples a
        window of residues from the allowed region and ``memory`` copies a
        window of residues from a random memory point (it falls back to a
        nudge while the memory is empty). Touched pairs are clamped back into
        the allowed region.
        """
        m = self.m
        if move is None:
            move = MOVES[rng.integers(len(MOVES))]
        if move == "memory" and not memory_points:
            move = "nudge"
        y = np.array(x, dtype=float)
        if move == "nudge":
            slot = int(rng.integers(2 * m))
            y[slot] = wrap_angle(y[slot] + rng.normal(0.0, self.moves.sigma))
            k = slot % m
            y[k], y[m + k] = self.region.clamp(y[k], y[m + k])
            return y
        width = int(rng.integers(1, min(self.moves.window_max, m) + 1))
        start = int(rng.integers(m - width + 1))
        window = slice(start, start + width)
        if move == "segment":
            y[:m][window], y[m:][window] = self.region.sample(width, rng)
        elif move == "memory":
            src = np.asarray(memory_points[int(rng.integers(len(memory_points)))])
            y[:m][window] = src[:m][window]
            y[m:][window] = src[m:][window]
            y[:m][window], y[m:][window] = self.region.clamp_all(y[:m][window], y[m:][window])
        else:
            raise ValueError(f"unknown move {move!r}")
        return y

    def blend(self, memory_points, rng):
        """New root built from the memory: the chain is cut at up to three
        random points and every segment is copied from a random memory point."""
        pts = [np.asarray(p, dtype=float) for p in memory_points]
        if len(pts) == 1:
            return pts[0].copy()
        m = self.m
        cuts = int(rng.integers(1, 4))
        bounds = np.unique(np.concatenate([[0, m], rng.integers(1, m, size=cuts)])) if m > 1 else np.array([0, m])
        y = np.empty(2 * m)
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            src = pts[int(rng.integers(len(pts)))]
            y[lo:hi] = src[lo:hi]
            y[m + lo : m + hi] = src[m + lo : m + hi]
        return y

    def in_region(self, x):
        m = self.m
        return bool(np.all(self.region.contains(x[:m], x[m:])))
