"""
Folding a short chain
=====================

A 20 residue chain under the ``test2`` weights, with a reduced search budget
so it runs in about a second.
"""

from dataclasses import replace

from monkeyfold import MonkeySearch, MSParams, ObjectiveParams, ProteinProblem
from monkeyfold.pipeline import analyze, format_analysis
from monkeyfold.structio import write_pdb

problem = ProteinProblem(n=20, params=ObjectiveParams.preset("test2"))
params = MSParams(height=20, climb_ups=10, starting_trees=10, max_trees=100, rng_seed=1)

result = MonkeySearch(problem, params).run()
X = problem.backbone(result.best.point)
print(f"objective {result.best.value:.3f} after {result.trees} trees")
print(format_analysis(analyze(X)))

# the same search with a stronger helix term
helical = replace(problem, params=ObjectiveParams.preset("test4"))
Y = helical.backbone(MonkeySearch(helical, params).run().best.point)
print("\nwith test4 weights, mean d(i, i+2) = %.3f" % analyze(Y, weights=helical.params.weights)["mean_i_i2"])

write_pdb(X, "fold20.pdb")
print("wrote fold20.pdb")
