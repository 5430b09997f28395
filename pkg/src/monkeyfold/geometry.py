"""Geometric kernel for C-alpha traces.

A conformation is an ``(n, 3)`` float array of C-alpha positions in
angstroms. Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

INFINITE_RADIUS = math.inf


@dataclass(frozen=True)
class BondGeometry:
    """Ideal peptide backbone geometry (lengths in angstrom, angles in radians)."""

    len_n_ca: float = 1.458
    len_ca_c: float = 1.525
    len_c_n: float = 1.329
    ang_n_ca_c: float = math.radians(111.0)
    ang_ca_c_n: float = math.radians(116.6)
    ang_c_n_ca: float = math.radians(121.9)
    omega: float = math.pi

    def __post_init__(self):
        lengths = (self.len_n_ca, self.len_ca_c, self.len_c_n)
        angles = (self.ang_n_ca_c, self.ang_ca_c_n, self.ang_c_n_ca)
        values = lengths + angles + (self.omega,)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("bond geometry must be finite")
        if min(lengths) <= 0:
            raise ValueError("bond lengths must be positive")
        if not all(0 < a < math.pi for a in angles):
            raise ValueError("bond angles must lie in (0, pi)")


DEFAULT_GEOMETRY = BondGeometry()


@dataclass(frozen=True)
class ThicknessInterval:
    lo: float = 2.50
    hi: float = 2.80

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise ValueError(f"need 0 < lo < hi, got [{self.lo}, {self.hi}]")

    def __contains__(self, r):
        return self.lo <= r <= self.hi


def as_conformation(X) -> np.ndarray:
    """Validate and return ``X`` as an ``(n, 3)`` float array with n >= 3."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != 3:
        raise ValueError(f"conformation must have shape (n, 3), got {X.shape}")
    if X.shape[0] < 3:
        raise ValueError(f"conformation needs at least 3 points, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("conformation has non-finite coordinates")
    return X


def distance(a, b) -> float:
    return math.dist(a, b)


def distance_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


# ---------------------------------------------------------------------------
# Backbone construction


def _place(a, b, c, length, angle, torsion):
    """Place atom d so that |cd| = length, angle(b, c, d) = angle and
    dihedral(a, b, c, d) = torsion. Operates on plain 3-tuples."""
    bcx, bcy, bcz = c[0] - b[0], c[1] - b[1], c[2] - b[2]
    inv = 1.0 / math.sqrt(bcx * bcx + bcy * bcy + bcz * bcz)
    bcx, bcy, bcz = bcx * inv, bcy * inv, bcz * inv
    abx, aby, abz = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    # n = ab x bc, normalized
    nx = aby * bcz - abz * bcy
    ny = abz * bcx - abx * bcz
    nz = abx * bcy - aby * bcx
    inv = 1.0 / math.sqrt(nx * nx + ny * ny + nz * nz)
    nx, ny, nz = nx * inv, ny * inv, nz * inv
    # m = n x bc
    mx = ny * bcz - nz * bcy
    my = nz * bcx - nx * bcz
    mz = nx * bcy - ny * bcx
    d0 = -length * math.cos(angle)
    s = length * math.sin(angle)
    d1 = s * math.cos(torsion)
    d2 = s * math.sin(torsion)
    return (
        c[0] + bcx * d0 + mx * d1 + nx * d2,
        c[1] + bcy * d0 + my * d1 + ny * d2,
        c[2] + bcz * d0 + mz * d1 + nz * d2,
    )


# Torsion of the first residue's N-CA-C-N bond. It only rotates the rest of
# the chain about the CA1-C1 axis, which leaves the C-alpha trace rigidly
# equivalent, so any constant works.
FIRST_PSI = math.pi


def build_full_backbone(phi, psi, geom: BondGeometry = DEFAULT_GEOMETRY) -> np.ndarray:
    """Place N, CA, C atoms for every residue (the final C is omitted).

    ``phi[k]`` and ``psi[k]`` are the torsions of interior residue ``k + 2``
    (1-based), so a chain of ``n`` residues takes ``n - 2`` pairs. Returns an
    ``(3 n - 1, 3)`` array ordered N1, CA1, C1, N2, CA2, C2, ..., N_n, CA_n.
    """
    phi = [float(v) for v in np.ravel(phi)]
    psi = [float(v) for v in np.ravel(psi)]
    if len(phi) != len(psi):
        raise ValueError(f"phi and psi differ in length ({len(phi)} != {len(psi)})")
    if not all(math.isfinite(v) for v in phi + psi):
        raise ValueError("dihedral angles must be finite")
    n = len(phi) + 2

    a_nca, a_cac, a_ccn = geom.ang_c_n_ca, geom.ang_n_ca_c, geom.ang_ca_c_n
    l_nca, l_cac, l_cn = geom.len_n_ca, geom.len_ca_c, geom.len_c_n

    atoms = [
        (0.0, 0.0, 0.0),
        (l_nca, 0.0, 0.0),
        (l_nca - l_cac * math.cos(a_cac), l_cac * math.sin(a_cac), 0.0),
    ]
    psis = [FIRST_PSI] + psi
    for i in range(n - 1):
        atoms.append(_place(atoms[-3], atoms[-2], atoms[-1], l_cn, a_ccn, psis[i]))
        atoms.append(_place(atoms[-3], atoms[-2], atoms[-1], l_nca, a_nca, geom.omega))
        if i < n - 2:
            atoms.append(_place(atoms[-3], atoms[-2], atoms[-1], l_cac, a_cac, phi[i]))
    return np.array(atoms)


def build_backbone(phi, psi, geom: BondGeometry = DEFAULT_GEOMETRY) -> np.ndarray:
    """Build the C-alpha trace of a chain from its interior (phi, psi) pairs.

    The full N-CA-C backbone is laid down atom by atom (torsions cycle psi,
    omega, phi) starting from the frame N1 = origin, CA1 on +x, C1 in the
    xy-plane with y > 0; only the ``n = len(phi) + 2`` C-alpha positions are
    returned.
    """
    return build_full_backbone(phi, psi, geom)[1::3]


def consecutive_ca_distance(geom: BondGeometry = DEFAULT_GEOMETRY) -> float:
    """Distance between consecutive C-alpha atoms implied by ``geom``.

    It depends only on the CA-C-N-CA bond path, so it is the same for every
    residue pair and every choice of (phi, psi).
    """
    back = build_full_backbone([0.0], [0.0], geom)
    return distance(back[1], back[4])


# ---------------------------------------------------------------------------
# Circumradius and thickness


def _circumradii(A, B, C) -> np.ndarray:
    """Circumradii of triangles with vertex arrays ``A``, ``B``, ``C`` of
    shape ``(m, 3)``; degenerate triangles map to ``inf``."""
    ab = B - A
    bc = C - B
    ca = A - C
    lab = np.sqrt((ab[:, 0] * ab[:, 0] + ab[:, 1] * ab[:, 1]) + ab[:, 2] * ab[:, 2])
    lbc = np.sqrt((bc[:, 0] * bc[:, 0] + bc[:, 1] * bc[:, 1]) + bc[:, 2] * bc[:, 2])
    lca = np.sqrt((ca[:, 0] * ca[:, 0] + ca[:, 1] * ca[:, 1]) + ca[:, 2] * ca[:, 2])
    cx = ab[:, 1] * bc[:, 2] - ab[:, 2] * bc[:, 1]
    cy = ab[:, 2] * bc[:, 0] - ab[:, 0] * bc[:, 2]
    cz = ab[:, 0] * bc[:, 1] - ab[:, 1] * bc[:, 0]
    # |ab x bc| is twice the triangle area
    twice_area = np.sqrt((cx * cx + cy * cy) + cz * cz)
    num = (lab * lbc) * lca
    degenerate = twice_area <= 1e-12 * num
    with np.errstate(divide="ignore", invalid="ignore"):
        r = num / (2.0 * twice_area)
    r[degenerate] = INFINITE_RADIUS
    return r


def circumradius(a, b, c) -> float:
    """Radius of the circle through three points, ``inf`` if they are collinear
    or coincident."""
    pts = np.asarray([a, b, c], dtype=float)
    return float(_circumradii(pts[0:1], pts[1:2], pts[2:3])[0])


@lru_cache(maxsize=32)
def _triplets(n):
    idx = np.fromiter(
        (v for t in combinations(range(n), 3) for v in t), dtype=np.intp
    ).reshape(-1, 3)
    idx.setflags(write=False)
    return idx


def triplet_radii(X) -> np.ndarray:
    """Circumradius of every unordered triplet ``i < j < k``, in
    lexicographic triplet order."""
    X = as_conformation(X)
    t = _triplets(len(X))
    return _circumradii(X[t[:, 0]], X[t[:, 1]], X[t[:, 2]])


def thickness(X) -> float:
    """Minimum circumradius over all triplets of the conformation."""
    return float(triplet_radii(X).min())


def helix_triplet_count(X, interval: ThicknessInterval = ThicknessInterval()) -> int:
    """Number of triplets whose circumradius lies in the closed ``interval``."""
    r = triplet_radii(X)
    return int(np.count_nonzero((r >= interval.lo) & (r <= interval.hi)))
