"""Direct numerical integration, kept independent of the spectral code.

Forces and energies here are assembled from the bond list, never from
the Fourier transform, so agreement with :mod:`dihedral.modes` is a real
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Diverged, NonFinite
from .model import SystemSpec, canonical
from .modes import PhaseState

__all__ = ["Trajectory", "force", "potential_energy", "integrate_verlet", "conserved_quantities"]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled states on an increasing time grid.

    ``positions`` and ``momenta`` have shape ``(len(times), n, 2)``.
    """

    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or (t.size > 1 and not np.all(np.diff(t) > 0)):
            raise ValueError("times must be a strictly increasing 1-D sequence")
        if self.positions.shape[0] != t.size or self.momenta.shape != self.positions.shape:
            raise ValueError("one state per time is required")
        object.__setattr__(self, "times", t)

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    def __len__(self):
        return self.times.size

    def state(self, k: int) -> PhaseState:
        return PhaseState(self.times[k], self.positions[k], self.momenta[k])

    @property
    def states(self):
        return [self.state(k) for k in range(len(self))]


def _bond_terms(spec):
    # (offset k, weight) with the listed-once k = n/2 bond at half weight
    n = spec.n
    for k, kappa in enumerate(spec.couplings, start=1):
        w = float(kappa) * (0.5 if 2 * k == n else 1.0)
        yield k, w


def force(spec: SystemSpec, positions) -> np.ndarray:
    """Force on every particle, ``-grad V``."""
    spec = canonical(spec)
    r = np.asarray(positions, dtype=float)
    f = np.zeros_like(r)
    for k, w in _bond_terms(spec):
        f -= w * (2 * r - np.roll(r, -k, axis=0) - np.roll(r, k, axis=0))
    return spec.mass * spec.omega ** 2 * f


def potential_energy(spec: SystemSpec, positions) -> float:
    spec = canonical(spec)
    r = np.asarray(positions, dtype=float)
    v = 0.0
    for k, kappa in enumerate(spec.couplings, start=1):
        d = r - np.roll(r, -k, axis=0)
        sq = (d ** 2).sum(axis=1)
        if 2 * k == spec.n:
            sq = sq[: spec.n // 2]
        v += float(kappa) * sq.sum()
    return 0.5 * spec.mass * spec.omega ** 2 * v


def conserved_quantities(spec: SystemSpec, state: PhaseState) -> dict:
    """Energy, total momentum and angular momentum (z component)."""
    spec = canonical(spec)
    r, p = state.positions, state.momenta
    kinetic = (p ** 2).sum() / (2 * spec.mass)
    return {
        "energy": kinetic + potential_energy(spec, r),
        "momentum": p.sum(axis=0),
        "angular_momentum": float((r[:, 0] * p[:, 1] - r[:, 1] * p[:, 0]).sum()),
    }


def integrate_verlet(spec: SystemSpec, initial: PhaseState, dt: float, steps: int,
                     stride: int = 1, divergence_factor: float = 1e12) -> Trajectory:
    """Velocity-Verlet trajectory sampled every ``stride`` steps.

    The initial state is always the first sample; the final state is
    included when ``steps`` is a multiple of ``stride``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if steps < 1 or stride < 1:
        raise ValueError("steps and stride must be >= 1")
    spec = canonical(spec)
    n = spec.n
    m = spec.mass
    # the force is linear, so one Verlet step is a fixed linear map of
    # (r, p); tabulate it by stepping the unit vectors through force()
    G = force(spec, np.eye(n))
    h = 0.5 * dt
    basis = np.eye(2 * n)
    r_b, p_b = basis[:n], basis[n:]
    p_half = p_b + h * (G @ r_b)
    r_new = r_b + (dt / m) * p_half
    p_new = p_half + h * (G @ r_new)
    step = np.vstack([r_new, p_new])

    x = np.vstack([initial.positions, initial.momenta])
    scale = max(float(np.abs(x[:n]).max(initial=0.0)), float(np.abs(x[n:]).max(initial=0.0)) * dt / m, 1.0)
    limit = divergence_factor * scale

    nsamp = steps // stride + 1
    R = np.empty((nsamp, n, 2))
    P = np.empty_like(R)
    R[0], P[0] = x[:n], x[n:]
    for j in range(1, nsamp):
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(stride):
                x = step @ x
        if not np.isfinite(x).all():
            raise NonFinite(f"non-finite state at step {j * stride}")
        if np.abs(x[:n]).max() > limit:
            raise Diverged(f"|position| exceeded {limit:g} at step {j * stride}")
        R[j], P[j] = x[:n], x[n:]
    times = initial.t + dt * stride * np.arange(nsamp)
    meta = {"integrator": "velocity-verlet", "dt": dt, "steps": steps, "stride": stride,
            "n": spec.n, "couplings": [str(k) for k in spec.couplings],
            "mass": spec.mass, "omega": spec.omega}
    return Trajectory(times, R, P, meta)


def default_timestep(period: float | None, max_rate: float) -> float:
    """``T/10^4`` when a period is known, else ``2 pi / (10^4 max_rate)``."""
    if period is not None and math.isfinite(period) and period > 0:
        return period / 1e4
    return 2 * math.pi / (1e4 * max_rate)
