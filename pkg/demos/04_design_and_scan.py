"""
Designing resonances and mapping coupling space
===============================================

``design_couplings`` solves for couplings that put the sector
frequencies in prescribed integer ratios.  ``phase_matching`` then says
which of those resonances can carry equivariant motion, and a scan shows
where the resonant lines sit in the (kappa1, kappa2) plane.
"""

from collections import Counter

from dihedral import (
    Axis,
    FixedState,
    ResonanceProfile,
    ScanRequest,
    design_couplings,
    load_builtin,
    phase_matching,
    run_scan,
    stiffness_eigenvalues,
)
from dihedral.resonance import MergedGroup

for n, ratios in [(4, (1, 2)), (5, (1, 2)), (6, (1, 2, 3)), (6, (1, 2, 2)), (7, (1, 2, 3))]:
    fam = design_couplings(n, ratios)
    lam = stiffness_eigenvalues(fam.spec()).lambdas[1:]
    shown = ", ".join(str(k) if fam.exact else f"{k:.6f}" for k in fam.particular)
    print(f"n={n} {':'.join(map(str, ratios)):7s} kappa = t*({shown})  lambda = {[float(x) for x in lam]}")

# With kappa3 pinned to zero the six-body spectrum obeys lambda3 = 2(lambda2 - lambda1).
try:
    design_couplings(6, (1, 2, 3), exclude=[3])
except Exception as exc:
    print("\nexclude kappa3:", type(exc).__name__, "-", exc)
print("exclude kappa3, 1:3:4:", [str(k) for k in design_couplings(6, (1, 3, 4), exclude=[3]).particular])

# Four bodies: the 1:p resonance is equivariant only for p = 2 mod 4.
groups = [MergedGroup((1,), None), MergedGroup((2,), None)]
ok = [p for p in range(1, 25) if phase_matching(ResonanceProfile.from_ratios({1: 1, 2: p}), groups, 4).passed]
print("\nn=4 equivariant 1:p for p <=24:", ok)

# Six bodies: a degenerate pair recombines and passes with label 2.
merged = [MergedGroup((1,), None), MergedGroup((2, 3), None)]
pm = phase_matching(ResonanceProfile.from_ratios({1: 1, 2: 2, 3: 2}), merged, 6)
print("n=6 1:2:2 merged:", pm.passed, "labels used", pm.labels_used)

# A coarse map of the four-body plane with the limacon state as probe.
req = ScanRequest(4, (Axis(0.5, 2.0, 31), Axis(-1.0, 1.0, 21)), FixedState(load_builtin("limacon4").initial))
res = run_scan(req)
print("\ncategory counts:", dict(Counter(c.category for c in res.cells)))
symbol = {"Unbounded": "#", "Quasiperiodic": ".", "PeriodicNotEquivariant": "o",
          "EquivariantFragmented": "F", "EquivariantChoreography": "C"}
grid = res.category_grid()
print("rows: kappa2 from +1 (top) to -1; columns: kappa1 from 0.5 to 2")
for j in reversed(range(grid.shape[1])):
    print("  " + "".join(symbol[grid[i, j]] for i in range(grid.shape[0])))
