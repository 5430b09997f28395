"""
Scoring conformations by RMSD
=============================

Superpose a folded chain on the bundled 65 residue ideal helix.
"""

from pathlib import Path

import numpy as np

from monkeyfold import MonkeySearch, MSParams, ProteinProblem, rmsd, superpose
from monkeyfold.structio import parse_pdb_calpha

target = parse_pdb_calpha(Path(__file__).parent.parent / "tests" / "data" / "helix65.pdb", chain="A")
print("target residues:", target.n)

# any rigid motion of the target scores zero
rng = np.random.default_rng(0)
q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
moved = target.calpha @ q.T + [10.0, -4.0, 7.0]
print("RMSD to a moved copy: %.2e" % rmsd(moved, target.calpha))

problem = ProteinProblem(n=65)
params = MSParams(height=10, climb_ups=4, starting_trees=4, max_trees=10, rng_seed=2)
X = problem.backbone(MonkeySearch(problem, params).run().best.point)
T = superpose(X, target.calpha)
print("RMSD of a quick fold: %.2f A" % rmsd(X, target.calpha))
print("rotation determinant: %.6f" % np.linalg.det(T.rotation))
