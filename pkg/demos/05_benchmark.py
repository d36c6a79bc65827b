"""Error as a function of distance from the data.

The harness samples a built-in case, fits each method, and bins grid error
by distance from the data's affine hull.  Baselines degrade off the slice;
exact symbolic recovery does not.  Pass a case name (ripple, cone,
diagonal_xy) and optionally a comma-separated method list.
"""

import sys

from hyperpolate import evaluate_methods
from hyperpolate.io import write_grid_csv, write_json

case = sys.argv[1] if len(sys.argv) > 1 else "cone"
methods = (sys.argv[2] if len(sys.argv) > 2 else "extrusion,nn_ambient,symbolic").split(",")

report, predictions, truth, queries = evaluate_methods(methods, case)

print(f"case: {report.case}  (seed {report.seed})")
for m in report.methods:
    print(f"\n{m.name}  (fitted+evaluated in {m.runtime_s:.1f}s, misses={m.misses})")
    print(f"  {'band':<12}{'count':>7}{'rmse':>12}{'max_abs':>12}")
    for band in m.bands:
        hi = "inf" if band.hi is None else f"{band.hi:g}"
        print(f"  [{band.lo:g}, {hi}){'':<2}{band.count:>7}{band.rmse:>12.4f}{band.max_abs:>12.4f}")
    print("  regimes:", dict(m.regime_counts))

write_json(f"report_{report.case}.json", report.to_dict())
write_grid_csv(f"grid_{report.case}.csv", queries, truth, predictions)
print(f"\nwrote report_{report.case}.json and grid_{report.case}.csv")
