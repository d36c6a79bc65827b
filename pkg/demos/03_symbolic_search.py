"""Recovering the cone from one hyperbola.

Sampling sqrt(x^2 + 1) and searching for liftings into a new coordinate
finds sqrt(x^2 + y^2): the cone: as the simplest hypothesis.  Nothing in
the data orients the new axis, so the search returns the two mirror
calibrations y0 = +1 and y0 = -1 as an explicit tie.

Run with --ripple to reproduce the slower ripple example
cos(sqrt(x^2 + 400)) -> cos(sqrt(x^2 + y^2)) at y0 = +/-20.
"""

import sys

import numpy as np

from hyperpolate import Dataset, restrict, search_hyperpolation, serialize, tie_sets

if "--ripple" in sys.argv:
    x = np.arange(-40.0, 41.0)
    data = Dataset(x[:, None], np.cos(np.sqrt(x**2 + 400.0)))
else:
    x = np.arange(-20.0, 21.0)
    data = Dataset(x[:, None], np.sqrt(x**2 + 1.0))

candidates = search_hyperpolation(data)

print(f"{len(candidates)} candidates, ranked by (residual, simplicity):\n")
for rank, group in enumerate(tie_sets(candidates), start=1):
    for cand in group:
        print(
            f"  #{rank}  {serialize(cand.expr):<42} y0={cand.y0:+.4g}"
            f"  score={cand.score:g}  residual={cand.residual:.2e}"
        )

best = candidates[0]
print("\ntop candidate restricted back to the slice:")
print(" ", serialize(restrict(best)))
