"""
Multi-start uniqueness probes
=============================

Iterate the discounted operator from several starting potentials and compare
where they land.
"""

import numpy as np

from weakkam.experiments import uniqueness_probe
from weakkam.model import SATURATING, make_model

rng = np.random.default_rng(0)

# Affine coupling is concave in u and v, so fixed points are unique for
# small discounts.
affine = make_model([[0.0, 2.0], [3.0, 0.0]], alpha=[1.0, 1.0])
rep = uniqueness_probe(affine, 0.25, [rng.normal(scale=5, size=2)])
print(rep.starts, "gap:", rep.max_pairwise_gap, "unique:", rep.unique)

# The saturating coupling is C1, the other case with a uniqueness guarantee.
sat = make_model([[0.0, -1.0], [2.0, 1.0]], alpha=[1.0, 1.0], variant=SATURATING)
rep = uniqueness_probe(sat, 0.1, [rng.normal(scale=5, size=2) for _ in range(3)])
for name, point in zip(rep.starts, rep.fixed_points):
    print(f"{name:>9s} -> {point}")
print("unique:", rep.unique)
