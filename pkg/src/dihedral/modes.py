"""Symmetry-adapted Fourier coordinates and exact evolution.

The real orthonormal transform ``F`` maps particle coordinates to normal
coordinates, row by row:

* row 0: centre of mass, ``1/sqrt(n)``;
* rows ``2l-1``, ``2l`` for ``l = 1..ceil(n/2)-1``: the cosine and sine
  components ``sqrt(2/n) cos(q_l (i-1))`` and ``sqrt(2/n) sin(q_l (i-1))``
  with ``q_l = 2 pi l / n``;
* last row for even ``n``: the Nyquist mode ``(-1)**(i-1) / sqrt(n)``.

Each planar coordinate is transformed independently, so positions and
momenta are ``(n, 2)`` arrays throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import WrongN
from .model import Branch, Spectrum, SystemSpec, canonical, stiffness_eigenvalues

__all__ = [
    "PhaseState",
    "ModeAmplitudes",
    "fourier_matrix",
    "sector_rows",
    "row_sectors",
    "fourier_decompose",
    "fourier_reconstruct",
    "evolve_modes",
    "analytic_state",
    "analytic_states",
    "closed_form_n4",
    "closed_form_n5",
    "sector_energies",
    "active_sectors",
    "remove_center_of_mass",
]


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PhaseState:
    """Positions and momenta of ``n`` planar particles at time ``t``."""

    t: float
    positions: np.ndarray
    momenta: np.ndarray

    def __post_init__(self):
        r = _frozen(self.positions)
        p = _frozen(self.momenta)
        if r.ndim != 2 or r.shape[1] != 2 or p.shape != r.shape:
            raise ValueError(
                f"positions and momenta must both be (n, 2), got {r.shape} and {p.shape}"
            )
        if not (np.isfinite(r).all() and np.isfinite(p).all()):
            raise ValueError("phase state contains non-finite values")
        object.__setattr__(self, "positions", r)
        object.__setattr__(self, "momenta", p)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def __add__(self, other):
        return PhaseState(self.t, self.positions + other.positions, self.momenta + other.momenta)

    def allclose(self, other, atol=1e-12) -> bool:
        return bool(
            np.allclose(self.positions, other.positions, rtol=0, atol=atol)
            and np.allclose(self.momenta, other.momenta, rtol=0, atol=atol)
        )


@lru_cache(maxsize=None)
def _fourier_matrix(n):
    F = np.empty((n, n))
    i = np.arange(n)
    F[0] = 1.0 / math.sqrt(n)
    for ell in range(1, (n + 1) // 2):
        q = 2.0 * math.pi * ell / n
        F[2 * ell - 1] = math.sqrt(2.0 / n) * np.cos(q * i)
        F[2 * ell] = math.sqrt(2.0 / n) * np.sin(q * i)
    if n % 2 == 0:
        F[n - 1] = (-1.0) ** i / math.sqrt(n)
    F.setflags(write=False)
    return F


def fourier_matrix(n: int) -> np.ndarray:
    """The orthogonal ``n x n`` real Fourier transform described above."""
    return _fourier_matrix(int(n))


def sector_rows(n: int, ell: int) -> list:
    """Rows of :func:`fourier_matrix` belonging to sector ``ell``."""
    if ell == 0:
        return [0]
    if 2 * ell == n:
        return [n - 1]
    if 0 < ell < (n + 1) / 2:
        return [2 * ell - 1, 2 * ell]
    raise ValueError(f"no sector {ell} for n={n}")


def row_sectors(n: int) -> np.ndarray:
    """Sector label of every row of :func:`fourier_matrix`."""
    lab = np.empty(n, dtype=int)
    for ell in range(n // 2 + 1):
        lab[sector_rows(n, ell)] = ell
    return lab


@dataclass(frozen=True, eq=False)
class ModeAmplitudes:
    """Position and momentum amplitudes in the Fourier basis.

    ``pos[row]`` and ``mom[row]`` are planar vectors; rows follow the
    layout of :func:`fourier_matrix`.
    """

    pos: np.ndarray
    mom: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pos", _frozen(self.pos))
        object.__setattr__(self, "mom", _frozen(self.mom))

    @property
    def n(self) -> int:
        return self.pos.shape[0]

    @property
    def com_pos(self):
        return self.pos[0]

    @property
    def com_mom(self):
        return self.mom[0]

    def cosine(self, ell):
        """``(A_c, B_c)`` for a doublet sector."""
        r = sector_rows(self.n, ell)
        if len(r) != 2:
            raise ValueError(f"sector {ell} is not a doublet")
        return self.pos[r[0]], self.mom[r[0]]

    def sine(self, ell):
        r = sector_rows(self.n, ell)
        if len(r) != 2:
            raise ValueError(f"sector {ell} is not a doublet")
        return self.pos[r[1]], self.mom[r[1]]

    def nyquist(self):
        if self.n % 2:
            raise ValueError("odd n has no Nyquist sector")
        return self.pos[-1], self.mom[-1]

    def complex_amplitude(self, ell):
        """``A_c + i A_s`` as a complex planar vector."""
        a_c, _ = self.cosine(ell)
        a_s, _ = self.sine(ell)
        return a_c + 1j * a_s


def fourier_decompose(state: PhaseState, n: int | None = None) -> ModeAmplitudes:
    n = state.n if n is None else n
    if state.n != n:
        raise WrongN(f"state has {state.n} particles, expected {n}")
    F = fourier_matrix(n)
    return ModeAmplitudes(F @ state.positions, F @ state.momenta)


def fourier_reconstruct(modes: ModeAmplitudes, n: int | None = None, t: float = 0.0) -> PhaseState:
    n = modes.n if n is None else n
    if modes.n != n:
        raise WrongN(f"modes describe {modes.n} particles, expected {n}")
    F = fourier_matrix(n)
    return PhaseState(t, F.T @ modes.pos, F.T @ modes.mom)


def _propagator(spectrum: Spectrum, mass: float, dt):
    """Per-row 2x2 flow coefficients for one or many time steps.

    Returns ``(a, b, c, d)`` so that ``A' = a A + b B`` and
    ``B' = c A + d B``; each has shape ``dt.shape + (n,)``.
    """
    n = spectrum.n
    lab = row_sectors(n)
    dt = np.asarray(dt, dtype=float)[..., None]
    shape = dt.shape[:-1] + (n,)
    a = np.empty(shape)
    b = np.empty(shape)
    c = np.empty(shape)
    d = np.empty(shape)
    for ell in range(n // 2 + 1):
        cols = lab == ell
        branch = spectrum.branches[ell]
        w = spectrum.rates[ell]
        tt = np.broadcast_to(dt, shape)[..., cols]
        if branch is Branch.OSCILLATORY:
            cs, sn = np.cos(w * tt), np.sin(w * tt)
            a[..., cols], b[..., cols] = cs, sn / (mass * w)
            c[..., cols], d[..., cols] = -mass * w * sn, cs
        elif branch is Branch.HYPERBOLIC:
            ch, sh = np.cosh(w * tt), np.sinh(w * tt)
            a[..., cols], b[..., cols] = ch, sh / (mass * w)
            c[..., cols], d[..., cols] = mass * w * sh, ch
        else:
            a[..., cols], b[..., cols] = 1.0, tt / mass
            c[..., cols], d[..., cols] = 0.0, 1.0
    return a, b, c, d


def evolve_modes(modes: ModeAmplitudes, spectrum: Spectrum, mass: float, dt: float) -> ModeAmplitudes:
    """Advance every normal coordinate by ``dt`` with its exact flow."""
    if modes.n != spectrum.n:
        raise WrongN(f"modes for n={modes.n} but spectrum for n={spectrum.n}")
    a, b, c, d = _propagator(spectrum, mass, dt)
    A, B = modes.pos, modes.mom
    return ModeAmplitudes(a[:, None] * A + b[:, None] * B, c[:, None] * A + d[:, None] * B)


def analytic_state(spec: SystemSpec, initial: PhaseState, t: float) -> PhaseState:
    """Exact state a time ``t`` after ``initial`` (stamped ``initial.t + t``)."""
    spec = canonical(spec)
    spectrum = stiffness_eigenvalues(spec)
    modes = fourier_decompose(initial, spec.n)
    out = fourier_reconstruct(evolve_modes(modes, spectrum, spec.mass, t), spec.n)
    return PhaseState(initial.t + t, out.positions, out.momenta)


def analytic_states(spec: SystemSpec, initial: PhaseState, times):
    """Vectorised :func:`analytic_state` on an array of elapsed times.

    Returns ``(positions, momenta)`` with shape ``(len(times), n, 2)``.
    """
    spec = canonical(spec)
    spectrum = stiffness_eigenvalues(spec)
    modes = fourier_decompose(initial, spec.n)
    times = np.asarray(times, dtype=float).reshape(-1)
    a, b, c, d = _propagator(spectrum, spec.mass, times)
    A, B = modes.pos, modes.mom
    U = a[..., None] * A + b[..., None] * B
    P = c[..., None] * A + d[..., None] * B
    F = fourier_matrix(spec.n)
    return np.einsum("ri,tra->tia", F, U), np.einsum("ri,tra->tia", F, P)


def remove_center_of_mass(state: PhaseState) -> PhaseState:
    return PhaseState(
        state.t,
        state.positions - state.positions.mean(axis=0),
        state.momenta - state.momenta.mean(axis=0),
    )


def closed_form_n4(initial: PhaseState, omega: float, mass: float, t: float, branch: int = +1) -> PhaseState:
    """Explicit four-body solution for couplings ``(1, -1/2)`` (listed once).

    Valid in the centre-of-mass frame.  Particles 3 and 4 are particles 1
    and 2 shifted by ``branch * 2 tau`` with ``tau = pi / (2 omega)``.
    """
    if initial.n != 4:
        raise WrongN(f"closed_form_n4 needs 4 particles, got {initial.n}")
    r, p = initial.positions, initial.momenta
    r13, r13p = r[0] - r[2], r[0] + r[2]
    r24, r24p = r[1] - r[3], r[1] + r[3]
    p13, p13p = p[0] - p[2], p[0] + p[2]
    p24, p24p = p[1] - p[3], p[1] + p[3]
    w = omega

    def pair(d, dp, q, qp, s):
        pos = 0.5 * (d * math.cos(w * s) + dp * math.cos(2 * w * s)) + (
            2 * q * math.sin(w * s) + qp * math.sin(2 * w * s)
        ) / (4 * mass * w)
        vel = 0.5 * (-d * w * math.sin(w * s) - dp * 2 * w * math.sin(2 * w * s)) + (
            2 * q * w * math.cos(w * s) + qp * 2 * w * math.cos(2 * w * s)
        ) / (4 * mass * w)
        return pos, mass * vel

    shift = branch * 2 * (math.pi / (2 * w))
    r1, p1 = pair(r13, r13p, p13, p13p, t)
    r2, p2 = pair(r24, r24p, p24, p24p, t)
    r3, p3 = pair(r13, r13p, p13, p13p, t + shift)
    r4, p4 = pair(r24, r24p, p24, p24p, t + shift)
    return PhaseState(initial.t + t, np.array([r1, r2, r3, r4]), np.array([p1, p2, p3, p4]))


_C_PLUS = (math.sqrt(5) + 1) / 4   # -cos(4 pi / 5)
_C_MINUS = (math.sqrt(5) - 1) / 4  # cos(2 pi / 5)


def closed_form_n5(initial: PhaseState, omega: float, mass: float, t: float) -> PhaseState:
    """Explicit five-body solution for the couplings with spectrum ``(1, 4)``.

    Valid in the centre-of-mass frame.  Mode ``omega`` uses the projector
    ``2/5 [r_i + c- (r_{i+1} + r_{i-1}) - c+ (r_{i+2} + r_{i-2})]`` and mode
    ``2 omega`` the complementary one.
    """
    if initial.n != 5:
        raise WrongN(f"closed_form_n5 needs 5 particles, got {initial.n}")
    w = omega
    cp, cm = _C_PLUS, _C_MINUS

    def near(x, i):
        return x[(i + 1) % 5] + x[(i - 1) % 5]

    def far(x, i):
        return x[(i + 2) % 5] + x[(i - 2) % 5]

    r0, p0 = initial.positions, initial.momenta
    c1, s1 = math.cos(w * t), math.sin(w * t)
    c2, s2 = math.cos(2 * w * t), math.sin(2 * w * t)
    pos = np.empty((5, 2))
    mom = np.empty((5, 2))
    for i in range(5):
        a1 = 0.4 * (r0[i] + cm * near(r0, i) - cp * far(r0, i))
        a2 = 0.4 * (r0[i] - cp * near(r0, i) + cm * far(r0, i))
        b1 = 0.4 * (p0[i] + cm * near(p0, i) - cp * far(p0, i))
        b2 = 0.4 * (p0[i] - cp * near(p0, i) + cm * far(p0, i))
        pos[i] = a1 * c1 + a2 * c2 + b1 * s1 / (mass * w) + b2 * s2 / (2 * mass * w)
        mom[i] = -mass * w * a1 * s1 - 2 * mass * w * a2 * s2 + b1 * c1 + b2 * c2
    return PhaseState(initial.t + t, pos, mom)


def sector_energies(modes: ModeAmplitudes, spectrum: Spectrum, mass: float) -> np.ndarray:
    """Energy held by each sector ``ell = 0..n//2``.

    Sector 0 gets the centre-of-mass kinetic energy.  On hyperbolic
    sectors the potential term is negative, so the sum can cancel.
    """
    n = modes.n
    lab = row_sectors(n)
    kin = (modes.mom ** 2).sum(axis=1) / (2 * mass)
    lam = np.array([float(spectrum.lambdas[ell]) for ell in lab])
    pot = 0.5 * mass * spectrum.omega ** 2 * lam * (modes.pos ** 2).sum(axis=1)
    out = np.zeros(n // 2 + 1)
    np.add.at(out, lab, kin + pot)
    return out


def _sector_weights(modes, spectrum, mass):
    # |kinetic| + |potential| per sector: positive whenever the sector moves
    n = modes.n
    lab = row_sectors(n)
    kin = (modes.mom ** 2).sum(axis=1) / (2 * mass)
    lam = np.array([abs(float(spectrum.lambdas[ell])) for ell in lab])
    pot = 0.5 * mass * spectrum.omega ** 2 * lam * (modes.pos ** 2).sum(axis=1)
    out = np.zeros(n // 2 + 1)
    np.add.at(out, lab, kin + pot)
    return out


def active_sectors(modes: ModeAmplitudes, spectrum: Spectrum, mass: float, rel_tol: float = 1e-8) -> frozenset:
    """Internal sectors carrying more than ``rel_tol`` of the internal energy.

    Uses ``|kinetic| + |potential|`` per sector so that neutral and
    hyperbolic sectors register as active whenever they move.  Returns
    the empty set when there is no internal motion.
    """
    w = _sector_weights(modes, spectrum, mass)[1:]
    total = w.sum()
    if total <= 0:
        return frozenset()
    return frozenset(int(ell) + 1 for ell in np.nonzero(w > rel_tol * total)[0])
