"""Resonance detection, phase matching, classification and coupling design.

The equivariance test is integer arithmetic.  With active frequencies
``Omega_l = m_l * Omega_0`` and a candidate period ``T = s * T_min``, the
sector ``l`` is compatible with the cyclic symmetry when

    m_l * s == l  (mod n).

Degenerate sectors are merged first; a merged group passes when any one
of its labels satisfies the congruence.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import null_space

from ._exact import exact_sqrt, nullspace
from .errors import Infeasible, NotCommensurate, ZeroEnergy
from .model import (
    Branch,
    Convention,
    Spectrum,
    SystemSpec,
    canonical,
    stiffness_coefficients,
    stiffness_eigenvalues,
)
from .modes import PhaseState, active_sectors, fourier_decompose, remove_center_of_mass
from .traces import TraceReport, partition, sample_period

__all__ = [
    "ResonanceProfile",
    "MergedGroup",
    "PhaseMatch",
    "Category",
    "Tolerances",
    "Classification",
    "CouplingFamily",
    "detect_commensurability",
    "profile_from_spectrum",
    "merge_degenerate",
    "phase_matching",
    "classify",
    "design_couplings",
]


@dataclass(frozen=True)
class ResonanceProfile:
    """Integer frequency ratios over a set of sectors.

    ``ratios[k]`` belongs to ``sectors[k]``.  When ``commensurate`` is false
    the ratio, base frequency and period fields are empty.  Exact spectra
    also record ``(Omega_0 / omega)**2`` as a Fraction.
    """

    commensurate: bool
    sectors: tuple
    ratios: tuple = ()
    base_frequency: float | None = None
    T_min: float | None = None
    exact: bool = False
    base_frequency_sq: Fraction | None = None  # (Omega_0 / omega)**2, exact spectra only

    @classmethod
    def from_ratios(cls, ratios: Mapping[int, int], base_frequency: float = 1.0) -> "ResonanceProfile":
        """Profile with prescribed integer ratios (reduced to be primitive)."""
        sectors = tuple(sorted(ratios))
        ms = [int(ratios[s]) for s in sectors]
        if any(m < 1 for m in ms):
            raise ValueError("ratios must be positive integers")
        g = math.gcd(*ms)
        return cls(True, sectors, tuple(m // g for m in ms), base_frequency * g,
                   2 * math.pi / (base_frequency * g))

    def ratio(self, ell: int) -> int:
        return self.ratios[self.sectors.index(ell)]

    @property
    def integer_ratios(self) -> dict:
        return dict(zip(self.sectors, self.ratios))


def _primitive(fracs):
    den = math.lcm(*(f.denominator for f in fracs))
    ints = [int(f * den) for f in fracs]
    g = math.gcd(*ints)
    return [i // g for i in ints], Fraction(den, g)


def detect_commensurability(frequencies, max_denominator: int = 64, rel_tol: float = 1e-9) -> ResonanceProfile:
    """Find a primitive integer vector proportional to ``frequencies``.

    ``frequencies`` is a mapping ``sector -> Omega`` or a plain sequence
    (sectors are then numbered from 1).  Each ratio to the smallest
    frequency is approximated by continued fractions with bounded
    denominator and accepted if its relative residual is within
    ``rel_tol``.
    """
    if not isinstance(frequencies, Mapping):
        frequencies = {k: f for k, f in enumerate(frequencies, start=1)}
    sectors = tuple(sorted(frequencies))
    freqs = [float(frequencies[s]) for s in sectors]
    if not freqs:
        raise ValueError("no frequencies given")
    if not all(f > 0 and math.isfinite(f) for f in freqs):
        raise ValueError("frequencies must be positive and finite")
    ref = min(freqs)
    fracs = []
    for f in freqs:
        q = Fraction(f / ref).limit_denominator(max_denominator)
        if abs(float(q) * ref - f) > rel_tol * f:
            return ResonanceProfile(False, sectors)
        fracs.append(q)
    ints, scale = _primitive(fracs)
    # ref = scale * Omega_0
    omega0 = ref / float(scale)
    return ResonanceProfile(True, sectors, tuple(ints), omega0, 2 * math.pi / omega0)


def profile_from_spectrum(spectrum: Spectrum, sectors, max_denominator: int = 64,
                          rel_tol: float = 1e-9) -> ResonanceProfile:
    """Commensurability of the given oscillatory sectors.

    Exact spectra are decided exactly: ``Omega_a / Omega_b`` is rational
    iff ``lambda_a / lambda_b`` is the square of a rational.
    """
    sectors = tuple(sorted(sectors))
    if not spectrum.exact:
        return detect_commensurability({s: spectrum.frequencies[s] for s in sectors},
                                       max_denominator, rel_tol)
    lams = {s: spectrum.lambdas[s] for s in sectors}
    ref = min(lams.values())
    fracs = []
    for s in sectors:
        q = exact_sqrt(lams[s] / ref)
        if q is None:
            return ResonanceProfile(False, sectors, exact=True)
        fracs.append(q)
    ints, scale = _primitive(fracs)
    omega0 = spectrum.omega * math.sqrt(ref) / float(scale)
    return ResonanceProfile(True, sectors, tuple(ints), omega0, 2 * math.pi / omega0, exact=True,
                            base_frequency_sq=ref / scale ** 2)


@dataclass(frozen=True)
class MergedGroup:
    """Active sectors sharing one frequency, with their admissible labels."""

    labels: tuple
    frequency: float | None

    def __contains__(self, ell):
        return ell in self.labels


def merge_degenerate(spectrum: Spectrum, active) -> tuple:
    """Restrict the spectrum's degeneracy groups to the active sectors."""
    active = set(active)
    if not active <= set(range(1, spectrum.n // 2 + 1)):
        raise ValueError(f"active sectors {sorted(active)} outside 1..{spectrum.n // 2}")
    groups = []
    for g in spectrum.degeneracy_groups:
        labels = tuple(ell for ell in g if ell in active)
        if labels:
            groups.append(MergedGroup(labels, spectrum.frequencies[labels[0]]))
    return tuple(groups)


@dataclass(frozen=True)
class PhaseMatch:
    passed: bool
    witness_shift: int | None
    period: float | None
    failing_sectors: frozenset
    labels_used: dict = field(default_factory=dict)


def _group_labels(g):
    return g.labels if isinstance(g, MergedGroup) else tuple(g)


def phase_matching(profile: ResonanceProfile, merged_groups, n: int) -> PhaseMatch:
    """Search ``s = 1..n`` for a common solution of the sector congruences.

    On failure the reported failing sectors are those left unsatisfied by
    the shift that satisfies the most groups (smallest such shift on ties).
    """
    if not profile.commensurate:
        raise NotCommensurate("phase matching needs a commensurate profile")
    groups = [_group_labels(g) for g in merged_groups]
    ratios = [profile.ratio(g[0]) for g in groups]
    best = None
    for s in range(1, n + 1):
        used = {}
        for g, m in zip(groups, ratios):
            hit = next((ell for ell in g if (m * s - ell) % n == 0), None)
            if hit is not None:
                used[g] = hit
        if len(used) == len(groups):
            T = s * profile.T_min if profile.T_min is not None else None
            return PhaseMatch(True, s, T, frozenset(), {g[0]: used[g] for g in groups})
        if best is None or len(used) > len(best[1]):
            best = (s, used)
    failing = frozenset(ell for g in groups if g not in best[1] for ell in g)
    return PhaseMatch(False, None, None, failing)


class Category(enum.Enum):
    UNBOUNDED = "Unbounded"
    QUASIPERIODIC = "Quasiperiodic"
    PERIODIC_NOT_EQUIVARIANT = "PeriodicNotEquivariant"
    EQUIVARIANT_FRAGMENTED = "EquivariantFragmented"
    EQUIVARIANT_CHOREOGRAPHY = "EquivariantChoreography"

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self]

    @property
    def equivariant(self) -> bool:
        return self in (Category.EQUIVARIANT_FRAGMENTED, Category.EQUIVARIANT_CHOREOGRAPHY)


_EXIT_CODES = {
    Category.EQUIVARIANT_CHOREOGRAPHY: 0,
    Category.EQUIVARIANT_FRAGMENTED: 10,
    Category.PERIODIC_NOT_EQUIVARIANT: 11,
    Category.QUASIPERIODIC: 12,
    Category.UNBOUNDED: 13,
}


@dataclass(frozen=True)
class Tolerances:
    activity_rel: float = 1e-8
    max_denominator: int = 64
    commensurability_rel: float = 1e-9
    eps_rel: float = 1e-6
    samples: int | None = None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class Classification:
    """Category of a motion plus the evidence behind it.

    ``period`` is the equivariance period ``s * T_min``; the trace report
    is computed over ``T_min``, the minimal period of the internal motion.
    ``advisory`` holds the symbolic single-effective-sector verdict, which
    is sufficient for a single trace but not necessary.
    """

    category: Category
    active: frozenset
    merged_groups: tuple = ()
    profile: ResonanceProfile | None = None
    period: float | None = None
    witness_shift: int | None = None
    failing_sectors: frozenset = frozenset()
    trace_report: TraceReport | None = None
    labels_used: dict = field(default_factory=dict)
    advisory: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        prof = self.profile
        return {
            "category": self.category.value,
            "active": sorted(self.active),
            "merged_groups": [list(g.labels) for g in self.merged_groups],
            "ratios": None if prof is None or not prof.commensurate
            else {str(k): v for k, v in prof.integer_ratios.items()},
            "base_frequency": None if prof is None else prof.base_frequency,
            "T_min": None if prof is None else prof.T_min,
            "period": self.period,
            "witness_shift": self.witness_shift,
            "failing_sectors": sorted(self.failing_sectors),
            "labels_used": {str(k): v for k, v in sorted(self.labels_used.items())},
            "advisory": self.advisory,
            "trace_report": None if self.trace_report is None else self.trace_report.to_dict(),
        }


def classify(spec: SystemSpec, initial: PhaseState, tolerances: Tolerances | None = None) -> Classification:
    """Place the motion from ``initial`` in the periodicity hierarchy.

    Raises :class:`ZeroEnergy` when the initial data carries no internal
    motion (every category would hold vacuously).
    """
    tol = tolerances or Tolerances()
    spec = canonical(spec)
    spectrum = stiffness_eigenvalues(spec)
    modes = fourier_decompose(remove_center_of_mass(initial), spec.n)
    active = active_sectors(modes, spectrum, spec.mass, tol.activity_rel)
    if not active:
        raise ZeroEnergy("no internal motion")
    if any(spectrum.branches[ell] is not Branch.OSCILLATORY for ell in active):
        return Classification(Category.UNBOUNDED, active)

    profile = profile_from_spectrum(spectrum, active, tol.max_denominator, tol.commensurability_rel)
    if not profile.commensurate:
        return Classification(Category.QUASIPERIODIC, active, profile=profile)

    groups = merge_degenerate(spectrum, active)
    advisory = {"effective_sectors": len(groups), "symbolic_single_trace": len(groups) == 1}
    pm = phase_matching(profile, groups, spec.n)
    if not pm.passed:
        return Classification(Category.PERIODIC_NOT_EQUIVARIANT, active, groups, profile,
                              period=profile.T_min, failing_sectors=pm.failing_sectors,
                              advisory=advisory)

    traj = sample_period(spec, initial, profile.T_min, tol.samples)
    report = partition(traj, profile.T_min, spec.n, tol.eps_rel)
    cat = Category.EQUIVARIANT_CHOREOGRAPHY if report.single_trace else Category.EQUIVARIANT_FRAGMENTED
    return Classification(cat, active, groups, profile, period=pm.period,
                          witness_shift=pm.witness_shift, trace_report=report,
                          labels_used=pm.labels_used, advisory=advisory)


@dataclass(frozen=True)
class CouplingFamily:
    """Couplings realizing prescribed frequency ratios.

    Every member is ``t * particular + sum_j b_j * homogeneous[j]`` with
    ``t > 0``; the homogeneous part leaves all eigenvalues at zero and is
    empty unless bonds are excluded in a degenerate way.  ``particular``
    is normalized so the lowest frequency equals ``omega``.
    """

    n: int
    ratios: tuple
    convention: Convention
    particular: tuple
    homogeneous: tuple
    scale: object
    exact: bool
    excluded: frozenset = frozenset()

    def sample(self, t=1) -> tuple:
        return tuple(t * k for k in self.particular)

    def spec(self, t=1, mass: float = 1.0, omega: float = 1.0) -> SystemSpec:
        return SystemSpec(self.n, self.sample(t), mass, omega, self.convention)

    def contains(self, couplings: Sequence, rel_tol: float = 1e-10) -> bool:
        """True if ``couplings`` produce exactly the target ratios.

        Decided exactly when both the couplings and the family are exact.
        """
        kappa = tuple(couplings)
        if len(kappa) != len(self.particular):
            return False
        if any(kappa[k - 1] != 0 for k in self.excluded):
            return False
        spec = SystemSpec(self.n, kappa, convention=self.convention)
        lams = stiffness_eigenvalues(spec).lambdas[1:]
        targets = [m * m for m in self.ratios]
        c = lams[0] / targets[0]
        if not c > 0:
            return False
        if spec.exact:
            return all(lam == c * t for lam, t in zip(lams, targets))
        scale = max(abs(float(x)) for x in lams)
        return all(abs(float(lam) - float(c) * t) <= rel_tol * scale for lam, t in zip(lams, targets))

    def relations(self) -> list:
        """Each coupling as a multiple of the first non-zero one (rank-one families)."""
        if self.homogeneous:
            return []
        lead = next((k for k, x in enumerate(self.particular) if x != 0), None)
        if lead is None:
            return []
        return [(k + 1, self.particular[k] / self.particular[lead], lead + 1)
                for k in range(len(self.particular)) if k != lead]


def design_couplings(n: int, ratios: Sequence[int], convention=Convention.LISTED_ONCE,
                     exclude=()) -> CouplingFamily:
    """Couplings whose sector frequencies are in the ratios ``m_1 : ... : m_K``.

    Solves ``lambda_l(kappa) = m_l**2 * c`` for ``(kappa, c)`` with ``c > 0``.
    ``exclude`` lists bond distances whose coupling is pinned to zero;
    without exclusions the system always has a solution.

    Raises
    ------
    Infeasible
        If every solution has ``c = 0``.
    """
    convention = Convention(convention)
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    K = n // 2
    ratios = tuple(int(m) for m in ratios)
    if len(ratios) != K:
        raise ValueError(f"n={n} needs {K} ratios, got {len(ratios)}")
    if any(m < 1 for m in ratios):
        raise ValueError("ratios must be positive integers")
    exclude = frozenset(int(k) for k in exclude)
    if not exclude <= set(range(1, K + 1)):
        raise ValueError(f"excluded bonds must lie in 1..{K}")
    exact = n in (3, 4, 6)
    A = stiffness_coefficients(n, convention, exact=exact)
    rows = [list(row) + [-(m * m)] for row, m in zip(A, ratios)]
    for k in sorted(exclude):
        rows.append([1 if j == k - 1 else 0 for j in range(K + 1)])
    c_target = Fraction(1, min(ratios) ** 2)

    if exact:
        basis = nullspace(rows)
        with_c = [v for v in basis if v[-1] != 0]
        if not with_c:
            raise Infeasible(f"ratios {ratios} unreachable for n={n} with bonds {sorted(exclude)} removed")
        v = with_c[0]
        particular = tuple(x * c_target / v[-1] for x in v[:-1])
        homog = tuple(tuple(u) for u in nullspace([r[:-1] for r in rows]))
        scale = c_target
    else:
        M = np.array(rows, dtype=float)
        N = null_space(M)
        cvals = N[-1]
        if N.shape[1] == 0 or np.abs(cvals).max() <= 1e-12 * max(1.0, np.abs(N).max()):
            raise Infeasible(f"ratios {ratios} unreachable for n={n} with bonds {sorted(exclude)} removed")
        # combination of basis vectors with unit c, minimal norm
        w = cvals / (cvals @ cvals)
        v = N @ w
        particular = tuple(float(x) * float(c_target) for x in v[:-1])
        for k in exclude:
            particular = particular[: k - 1] + (0.0,) + particular[k:]
        H = null_space(M[:, :-1])
        homog = tuple(tuple(float(x) for x in col) for col in H.T)
        scale = float(c_target)
    return CouplingFamily(n, ratios, convention, particular, homog, scale, exact, exclude)
