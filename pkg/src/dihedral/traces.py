"""Geometric analysis of sampled periodic motion.

Particles ``i`` and ``j`` share a trace when ``r_j(t) = r_i(t + s)`` for
some delay ``s``.  Only delays that are whole multiples of ``T/b`` for a
block size ``b <= n`` are tried, and they must land on the sampling grid,
so the comparison never interpolates.  Particle labels are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist, directed_hausdorff

from .dynamics import Trajectory
from .errors import BadIndex, DegenerateDiameter
from .model import SystemSpec, canonical
from .modes import PhaseState, analytic_states

__all__ = [
    "Block",
    "TraceReport",
    "default_samples",
    "sample_period",
    "timeshift_residual",
    "partition",
    "curve_distance",
    "diameter",
]

DIAMETER_FLOOR = 1e-12
PHASE_SPLIT_FACTOR = 10.0
DENSE_HAUSDORFF_MAX = 1024 ** 2


def default_samples(n: int) -> int:
    """Grid size divisible by every block size up to ``n``."""
    base = 2520 * math.ceil(n / 7)
    if n <= 9:
        return base
    lcm = math.lcm(*range(1, n + 1))
    return lcm * max(1, math.ceil(2520 / lcm))


def sample_period(spec: SystemSpec, initial: PhaseState, T: float, samples: int | None = None) -> Trajectory:
    """Analytic states on ``samples`` uniform times in ``[0, T)``, centre of mass removed."""
    spec = canonical(spec)
    if not T > 0:
        raise ValueError(f"period must be positive, got {T}")
    samples = default_samples(spec.n) if samples is None else int(samples)
    if samples < 4:
        raise ValueError("need at least 4 samples")
    times = T * np.arange(samples) / samples
    r, p = analytic_states(spec, initial, times)
    r = r - r.mean(axis=1, keepdims=True)
    p = p - p.mean(axis=1, keepdims=True)
    meta = {"period": T, "samples": samples, "engine": "analytic"}
    return Trajectory(times + initial.t, r, p, meta)


def diameter(traj: Trajectory) -> float:
    """Twice the largest distance of any sample from the centre of mass."""
    com = traj.positions.mean(axis=1, keepdims=True)
    return 2.0 * float(np.sqrt(((traj.positions - com) ** 2).sum(axis=2)).max(initial=0.0))


def _check_label(traj, i):
    if not 1 <= i <= traj.n:
        raise BadIndex(f"particle label {i} outside 1..{traj.n}")


def timeshift_residual(traj: Trajectory, i: int, j: int, shift_index: int) -> float:
    """``max_k |r_j(t_k) - r_i(t_{k + shift})|`` over the periodic grid."""
    _check_label(traj, i)
    _check_label(traj, j)
    S = len(traj)
    if not 0 <= shift_index < S:
        raise BadIndex(f"shift index {shift_index} outside 0..{S - 1}")
    ri = np.roll(traj.positions[:, i - 1], -shift_index, axis=0)
    return float(np.sqrt(((traj.positions[:, j - 1] - ri) ** 2).sum(axis=1)).max())


def _candidate_shifts(S, n):
    # nonzero delays k*S/b that land on the grid
    shifts = set()
    for b in range(2, n + 1):
        if S % b == 0:
            shifts.update(k * S // b for k in range(1, b))
    return sorted(shifts)


def _residual_tensor(pos, shifts):
    """``R[a, i, j]`` = residual of ``j`` against ``i`` delayed by ``shifts[a]``."""
    out = np.empty((len(shifts), pos.shape[1], pos.shape[1]))
    for a, s in enumerate(shifts):
        rolled = np.roll(pos, -s, axis=0)
        diff = pos[:, None, :, :] - rolled[:, :, None, :]
        out[a] = np.sqrt((diff ** 2).sum(axis=3)).max(axis=0)
    return out


def _hausdorff(a, b):
    # dense distances are cheaper for short curves, early exit wins for long ones
    if len(a) * len(b) <= DENSE_HAUSDORFF_MAX:
        d = cdist(a, b, "sqeuclidean")
        return float(np.sqrt(max(d.min(axis=1).max(), d.min(axis=0).max())))
    return max(directed_hausdorff(a, b, seed=0)[0], directed_hausdorff(b, a, seed=0)[0])


def curve_distance(traj: Trajectory, block_a, block_b) -> float:
    """Symmetric discrete Hausdorff distance between two blocks' traces.

    Each block is represented by its first member.
    """
    a = min(block_a) if not isinstance(block_a, Block) else block_a.members[0]
    b = min(block_b) if not isinstance(block_b, Block) else block_b.members[0]
    _check_label(traj, a)
    _check_label(traj, b)
    if a == b:
        return 0.0
    return _hausdorff(traj.positions[:, a - 1], traj.positions[:, b - 1])


@dataclass(frozen=True)
class Block:
    """A set of particles sharing one trace.

    ``members`` is ordered along the curve; ``shifts[k]`` is the delay of
    ``members[k]`` relative to ``members[0]`` in units of the period.
    ``consistent`` is true when the delays are exactly ``0, 1/b, ...,
    (b-1)/b`` -- a sub-choreography.
    """

    members: tuple
    shifts: tuple
    max_residual: float
    consistent: bool

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class TraceReport:
    blocks: tuple
    distances: tuple
    diameter: float
    tolerance: float
    period: float
    samples: int
    single_trace: bool
    global_shift_consistent: bool
    structure: str

    @property
    def shape(self) -> tuple:
        """Block sizes, largest first, e.g. ``(2, 2, 1)``."""
        return tuple(sorted((b.size for b in self.blocks), reverse=True))

    @property
    def partition(self) -> list:
        return sorted(sorted(b.members) for b in self.blocks)

    def to_dict(self) -> dict:
        return {
            "blocks": [
                {"members": list(b.members), "shifts": [str(s) for s in b.shifts],
                 "max_residual": b.max_residual, "consistent": b.consistent}
                for b in self.blocks
            ],
            "distances": [list(row) for row in self.distances],
            "diameter": self.diameter,
            "tolerance": self.tolerance,
            "period": self.period,
            "samples": self.samples,
            "single_trace": self.single_trace,
            "global_shift_consistent": self.global_shift_consistent,
            "structure": self.structure,
        }


def _order_block(members, pos, S, tol):
    b = len(members)
    rep = members[0]
    if b == 1:
        return Block((rep,), (Fraction(0),), 0.0, True)
    if S % b == 0:
        shifts = [k * S // b for k in range(b)]
        cost = np.empty((b, b))
        for u, j in enumerate(members):
            for v, s in enumerate(shifts):
                ri = np.roll(pos[:, rep - 1], -s, axis=0)
                cost[u, v] = np.sqrt(((pos[:, j - 1] - ri) ** 2).sum(axis=1)).max()
        rows, cols = linear_sum_assignment(cost)
        worst = float(cost[rows, cols].max())
        if worst <= tol:
            order = sorted(zip(cols, rows))
            return Block(
                tuple(members[u] for _, u in order),
                tuple(Fraction(int(v), b) for v, _ in order),
                worst,
                True,
            )
    # no equally spaced arrangement: report each member's best delay
    cands = [0] + _candidate_shifts(S, pos.shape[1])
    found = []
    worst = 0.0
    for j in members:
        best = min(
            (np.sqrt(((pos[:, j - 1] - np.roll(pos[:, rep - 1], -s, axis=0)) ** 2).sum(axis=1)).max(), s)
            for s in cands
        )
        worst = max(worst, float(best[0]))
        found.append((Fraction(best[1], S), j))
    found.sort()
    return Block(tuple(j for _, j in found), tuple(s for s, _ in found), worst, False)


def partition(traj: Trajectory, T: float | None = None, n: int | None = None, eps_rel: float = 1e-6) -> TraceReport:
    """Group particles into blocks that share a trace.

    ``traj`` must sample exactly one period ``T`` on a uniform grid (as
    produced by :func:`sample_period`).
    """
    n = traj.n if n is None else n
    if traj.n != n:
        raise BadIndex(f"trajectory has {traj.n} particles, expected {n}")
    T = traj.meta.get("period") if T is None else T
    S = len(traj)
    pos = traj.positions - traj.positions.mean(axis=1, keepdims=True)
    D = diameter(traj)
    if D < DIAMETER_FLOOR:
        raise DegenerateDiameter(f"configuration diameter {D:g} below {DIAMETER_FLOOR:g}")
    tol = eps_rel * D

    shifts = _candidate_shifts(S, n)
    R = _residual_tensor(pos, shifts).min(axis=0) if shifts else np.full((n, n), np.inf)
    adj = (R <= tol) | (R.T <= tol)
    np.fill_diagonal(adj, True)
    ncomp, labels = connected_components(adj, directed=False)
    comps = [tuple(int(i) + 1 for i in np.nonzero(labels == c)[0]) for c in range(ncomp)]
    comps.sort()
    blocks = tuple(_order_block(list(c), pos, S, tol) for c in comps)

    nb = len(blocks)
    curves = [pos[:, blk.members[0] - 1] for blk in blocks]
    dist = np.zeros((nb, nb))
    for a in range(nb):
        for b in range(a + 1, nb):
            dist[a, b] = dist[b, a] = _hausdorff(curves[a], curves[b])

    single = nb == 1 and blocks[0].size == n and blocks[0].consistent
    if single:
        structure = "choreography"
    elif nb == n:
        structure = "multi-trace"
    elif not all(b.consistent for b in blocks):
        structure = "multi-trace"
    elif nb > 1 and dist[np.triu_indices(nb, 1)].min() <= PHASE_SPLIT_FACTOR * tol:
        structure = "phase-split"
    else:
        structure = "fragmentation"
    return TraceReport(
        blocks=blocks,
        distances=tuple(tuple(float(x) for x in row) for row in dist),
        diameter=D,
        tolerance=tol,
        period=float(T) if T is not None else float("nan"),
        samples=S,
        single_trace=single,
        global_shift_consistent=single,
        structure=structure,
    )
