"""
When resonance is not enough
============================

Phase matching guarantees that relabeling the particles is the same as
shifting time, but it does not force a single trace.  The shipped data
for four, five and six bodies split into synchronized sub-choreographies
on distinct curves.  Counter-rotating pairs give the degenerate
"phase-split" case where two blocks share one curve.
"""

import math
from pathlib import Path

import numpy as np

from dihedral import PhaseState, SystemSpec, classify, load_builtin, partition, sample_period
from dihedral.resonance import Tolerances
from dihedral.svg import render_trajectories

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

for name in ("fragment4_22", "fragment5_221", "fragment6_222"):
    scn = load_builtin(name)
    c = classify(scn.spec, scn.initial, Tolerances(eps_rel=scn.eps_rel))
    rep = c.trace_report
    print(f"{name}: {c.category.value}, witness s={c.witness_shift}, blocks {rep.partition}")
    d = np.array(rep.distances)
    print("  inter-block Hausdorff / diameter:", np.round(d[np.triu_indices(len(d), 1)] / rep.diameter, 4))
    traj = sample_period(scn.spec, scn.initial, c.period, 600)
    svg = render_trajectories(traj.positions, [list(b.members) for b in rep.blocks], title=scn.label)
    (out / f"{name}.svg").write_text(svg)

# Two pairs on the unit circle, one turning each way.
spec = SystemSpec(4, (1, -0.5))
r = np.array([(1, 0), (0, 1), (-1, 0), (0, -1)], float)
p = np.array([(0, 1), (1, 0), (0, -1), (-1, 0)], float)
rep = partition(sample_period(spec, PhaseState(0.0, r, p), 2 * math.pi, 1008))
print("\ncounter-rotating pairs:", rep.partition, rep.structure, "distance", rep.distances[0][1])

# The six-body 1:2:2 data as shipped is also a clean 2+2+2 split.  Scaling
# its momenta by sqrt(3), the lowest frequency, turns it into a choreography.
scn = load_builtin("choreo6_122")
for factor in (1.0, math.sqrt(3)):
    st = PhaseState(0.0, scn.initial.positions, factor * scn.initial.momenta)
    c = classify(scn.spec, st, Tolerances(eps_rel=scn.eps_rel))
    print(f"1:2:2 data, momenta x {factor:.4f}: {c.category.value} {c.trace_report.partition}")
    if factor != 1.0:
        traj = sample_period(scn.spec, st, c.period, 600)
        (out / "choreo6_122_rescaled.svg").write_text(
            render_trajectories(traj.positions, [list(b.members) for b in c.trace_report.blocks]))
