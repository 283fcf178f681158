"""
The vanishing-discount limit by two formulas
============================================

u0 is computed as the pointwise sup of constrained subsolutions (one LP per
state) and as a minimum of barrier ratios over Mather vertices.
"""

import numpy as np

from weakkam.limit import in_S0, vanishing_limit
from weakkam.model import make_model

# Two loops of zero cost and an expensive two-cycle: both states are in the
# Aubry set and there are two Mather vertices.
model = make_model([[0.0, 2.0], [3.0, 0.0]], alpha=[1.0, 0.5], beta=[0.2, 0.2])

res = vanishing_limit(model)
print("sup formula:   ", res.u_sup)
print("Mather formula:", res.u_mather)
print("gap:", res.gap)

# u0 itself satisfies the vertex constraints it was defined by.
print("u0 in S0:", in_S0(res.normalized, res.u0, res.vertices))

# A model with a nonzero critical constant: u0 solves T0 u + c0 = u.
model = make_model([[1.0, 2.0, 4.0], [3.0, -1.0, 0.0], [0.0, 5.0, 2.0]],
                   alpha=[0.3, 0.6, 0.9])
res = vanishing_limit(model)
print("c0 =", res.c0, " u0 =", res.u0)
