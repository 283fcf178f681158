"""
Critical constant, barrier and Aubry set
========================================

The classical objects of a small cost table, computed three ways and
checked against each other.
"""

import numpy as np

from weakkam.classical import (aubry_set, critical_constant, lax_oleinik, peierls_barrier,
                               weak_kam_solution)
from weakkam.mather import mather_value_lp, mather_vertices

# A three-state cost; row = source, column = target.
l0 = np.array([[1.0, 2.0, 4.0],
               [3.0, -1.0, 0.0],
               [0.0, 5.0, 2.0]])

# The critical constant is minus the minimal mean cycle weight (Karp) ...
c0 = critical_constant(l0)
print("c0 =", c0)

# ... and also minus the optimal value of the closed-measure LP.
value, witness = mather_value_lp(l0)
print("min integral of l0 over closed measures =", value)

# The Mather measures are uniform measures on minimal-mean cycles.
for mu in mather_vertices(l0).vertices:
    print("  Mather vertex:", mu.describe(["a", "b", "c"]))

# The barrier, the Aubry set, and a weak KAM solution from an Aubry point.
bt = peierls_barrier(l0, c0)
print("h =\n", bt.h)
aubry = aubry_set(bt)
print("Aubry set:", aubry)
u = weak_kam_solution(bt, aubry[0])
print("u =", u, " defect:", np.max(np.abs(lax_oleinik(l0, u) + c0 - u)))
