"""
Building a C-alpha trace and measuring its thickness
=====================================================

Dihedral angles go in, C-alpha coordinates come out. We compare an ideal
alpha helix with an extended strand.
"""

import math

import numpy as np

from monkeyfold import build_backbone, consecutive_ca_distance, helix_triplet_count, thickness

# fixed bond geometry means every neighbouring C-alpha pair sits at the same distance
print("consecutive C-alpha distance: %.4f A" % consecutive_ca_distance())

m = 18  # (phi, psi) pairs for a 20 residue chain
helix = build_backbone([math.radians(-57)] * m, [math.radians(-47)] * m)
strand = build_backbone([math.radians(-120)] * m, [math.radians(130)] * m)

for name, X in [("helix", helix), ("strand", strand)]:
    d2 = np.linalg.norm(X[2:] - X[:-2], axis=1)
    print(f"{name:7s} mean d(i, i+2) = {d2.mean():.3f}  thickness = {thickness(X):.3f}"
          f"  helix triplets = {helix_triplet_count(X)}")

# an equilateral triangle of side s has circumradius s / sqrt(3), so a clash
# threshold near 4.3-4.9 A maps onto thickness values near 2.5-2.8 A
for s in (4.33, 4.60, 4.88):
    print(f"side {s:.2f} -> radius {s / math.sqrt(3):.3f}")
