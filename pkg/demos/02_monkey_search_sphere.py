"""
Monkey Search on a toy function
===============================

Any object with ``random_solution``, ``perturb``, ``objective`` and
``distance`` can be optimized. Here: the 2-D sphere function.
"""

import numpy as np

from monkeyfold import MonkeySearch, MSParams


class Sphere:
    def random_solution(self, rng):
        return rng.uniform(-5, 5, 2)

    def perturb(self, x, memory, rng):
        # steps from 0.001 to 1, so the search can both roam and polish
        return x + rng.normal(0, 1, 2) * 10.0 ** rng.uniform(-3, 0)

    def objective(self, x):
        return float(x @ x)

    def distance(self, a, b):
        return float(np.max(np.abs(a - b)))


search = MonkeySearch(Sphere(), MSParams(max_trees=200, epsilon=1e-6, rng_seed=0))
result = search.run(lambda t, ms: ms.memory.best.value <= 1e-3)

print("trees:", result.trees, " evaluations:", result.evaluations)
print("best point:", result.best.point, " value: %.2e" % result.best.value)
print("incumbent after each of the first 10 trees:")
print(np.round(result.history[:10], 4))
