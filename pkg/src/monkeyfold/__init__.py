"""Coarse-grained protein conformation simulation with Monkey Search.

C-alpha traces are built from backbone dihedral angles and scored by a
weighted sum of a compactness term, a clash penalty and a helix-spacing
term. Simulated traces can be compared with real structures by RMSD.
"""

from .align import RigidTransform, rmsd, superpose
from .geometry import (
    BondGeometry,
    ThicknessInterval,
    build_backbone,
    circumradius,
    consecutive_ca_distance,
    distance,
    helix_triplet_count,
    thickness,
)
from .objective import PRESETS, ObjectiveParams, evaluate
from .optimizer import MonkeySearch, MSParams, run
from .protein_problem import AllowedRegion, DihedralConformation, ProteinProblem

__version__ = "0.1.0"
