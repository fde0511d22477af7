"""Planar n-body systems with dihedral-invariant quadratic couplings.

The potential is

    V = 1/2 m omega^2 sum_k kappa_k sum_{bonds at distance k} |r_i - r_j|^2

where a bond at distance ``k`` joins labels ``i`` and ``i + k (mod n)``.
For even ``n`` the opposite-vertex bonds (``k = n/2``) can be counted two
ways; see :class:`Convention`.  Everything downstream works in the
``LISTED_ONCE`` convention.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from ._exact import cos_turns, is_exact, rational_cos
from .errors import BadDimension, NonPositiveParameter, NTooSmall

__all__ = [
    "Convention",
    "Branch",
    "SystemSpec",
    "Spectrum",
    "validate_spec",
    "convert_convention",
    "canonical",
    "stiffness_eigenvalues",
    "stiffness_matrix",
    "stiffness_coefficients",
    "sector_multiplicity",
]


class Convention(enum.Enum):
    """How opposite-vertex bonds enter the potential for even ``n``.

    ``LISTED_ONCE`` sums each opposite pair once (the explicit four- and
    six-body Hamiltonians).  ``DOUBLE_SUM`` is the uniform double sum over
    ``i`` and ``k``, which visits every opposite pair twice.
    """

    LISTED_ONCE = "listed-once"
    DOUBLE_SUM = "double-sum"


class Branch(enum.Enum):
    OSCILLATORY = "oscillatory"
    NEUTRAL = "neutral"
    HYPERBOLIC = "hyperbolic"


def _as_coupling(x):
    if isinstance(x, bool):
        raise TypeError("boolean coupling")
    if is_exact(x):
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class SystemSpec:
    """Particle count, mass, base frequency and coupling vector.

    Couplings given as ``int`` or :class:`~fractions.Fraction` are kept
    exact; anything else is stored as ``float``.
    """

    n: int
    couplings: tuple
    mass: float = 1.0
    omega: float = 1.0
    convention: Convention = Convention.LISTED_ONCE

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(_as_coupling(k) for k in self.couplings))
        object.__setattr__(self, "convention", Convention(self.convention))

    @property
    def n_couplings(self) -> int:
        return self.n // 2

    @property
    def exact(self) -> bool:
        """True when every coupling is rational and all needed cosines are too."""
        return all(isinstance(k, Fraction) for k in self.couplings) and self.n in (3, 4, 6)


def validate_spec(spec: SystemSpec) -> SystemSpec:
    """Return ``spec`` unchanged if it is well formed, otherwise raise."""
    if spec.n < 3:
        raise NTooSmall(f"need n >= 3, got n={spec.n}")
    if len(spec.couplings) != spec.n // 2:
        raise BadDimension(
            f"n={spec.n} needs {spec.n // 2} couplings, got {len(spec.couplings)}"
        )
    if not spec.mass > 0:
        raise NonPositiveParameter(f"mass must be positive, got {spec.mass}")
    if not spec.omega > 0:
        raise NonPositiveParameter(f"omega must be positive, got {spec.omega}")
    for k in spec.couplings:
        if not math.isfinite(float(k)):
            raise NonPositiveParameter(f"coupling {k} is not finite")
    return spec


def convert_convention(spec: SystemSpec, target: Convention) -> SystemSpec:
    """Re-express the same physical system in another bond convention."""
    target = Convention(target)
    if target is spec.convention or spec.n % 2:
        return replace(spec, convention=target)
    kappa = list(spec.couplings)
    if target is Convention.LISTED_ONCE:
        kappa[-1] = kappa[-1] * 2
    else:
        kappa[-1] = kappa[-1] / 2
    return replace(spec, couplings=tuple(kappa), convention=target)


def canonical(spec: SystemSpec) -> SystemSpec:
    """Validated copy of ``spec`` in the listed-once convention."""
    return convert_convention(validate_spec(spec), Convention.LISTED_ONCE)


def sector_multiplicity(n: int, ell: int) -> int:
    if ell == 0 or 2 * ell == n:
        return 1
    return 2


def stiffness_coefficients(n: int, convention=Convention.LISTED_ONCE, exact=False):
    """Matrix ``C`` with ``lambda_ell = sum_k C[ell-1][k-1] * kappa_k``.

    Rows run over the internal sectors ``ell = 1..n//2``.  Entries are
    Fractions when ``exact`` is true (only possible for n in {3, 4, 6}).
    """
    convention = Convention(convention)
    ncoup = n // 2
    rows = []
    for ell in range(1, ncoup + 1):
        row = []
        for k in range(1, ncoup + 1):
            if exact:
                c = rational_cos(k * ell, n)
                if c is None:
                    raise ValueError(f"cos(2 pi {k * ell}/{n}) is irrational")
            else:
                c = cos_turns(k * ell, n)
            coeff = 2 - 2 * c
            if 2 * k == n and convention is Convention.LISTED_ONCE:
                coeff = coeff / 2
            row.append(coeff)
        rows.append(row)
    return rows


@dataclass(frozen=True)
class Spectrum:
    """Normal-mode spectrum, one entry per sector ``ell = 0..n//2``.

    ``frequencies[ell]`` is ``omega * sqrt(lambda_ell)`` for non-negative
    eigenvalues and ``None`` on hyperbolic sectors; ``rates`` always holds
    ``omega * sqrt(|lambda_ell|)``.
    """

    n: int
    omega: float
    lambdas: tuple
    frequencies: tuple
    rates: tuple
    multiplicities: tuple
    branches: tuple
    degeneracy_groups: tuple
    exact: bool = False

    @property
    def sectors(self):
        return range(len(self.lambdas))

    def group_of(self, ell: int) -> tuple:
        for g in self.degeneracy_groups:
            if ell in g:
                return g
        raise KeyError(ell)


_NEUTRAL_ATOL = 1e-12
_DEGENERACY_RTOL = 1e-9


def _branch(lam, scale, exact):
    if exact:
        zero = lam == 0
    else:
        zero = abs(lam) <= _NEUTRAL_ATOL * max(1.0, scale)
    if zero:
        return Branch.NEUTRAL
    return Branch.OSCILLATORY if lam > 0 else Branch.HYPERBOLIC


def _group_degenerate(lams, omega, exact):
    internal = list(range(1, len(lams)))
    if exact:
        groups = {}
        for ell in internal:
            groups.setdefault(lams[ell], []).append(ell)
        return tuple(tuple(g) for g in groups.values())
    signed = [math.copysign(omega * math.sqrt(abs(float(lams[ell]))), float(lams[ell]))
              for ell in internal]
    tol = _DEGENERACY_RTOL * max([abs(s) for s in signed] + [0.0])
    groups = []
    for ell, s in zip(internal, signed):
        for g in groups:
            if abs(g[0] - s) <= tol:
                g[1].append(ell)
                break
        else:
            groups.append((s, [ell]))
    return tuple(tuple(g[1]) for g in groups)


def stiffness_eigenvalues(spec: SystemSpec) -> Spectrum:
    """Per-sector stiffness eigenvalues and frequencies of the coupling form."""
    spec = canonical(spec)
    exact = spec.exact
    coeffs = stiffness_coefficients(spec.n, Convention.LISTED_ONCE, exact=exact)
    zero = Fraction(0) if exact else 0.0
    lams = [zero]
    for row in coeffs:
        lams.append(sum((c * k for c, k in zip(row, spec.couplings)), zero))
    scale = max([abs(float(k)) for k in spec.couplings] + [0.0])
    branches = [Branch.NEUTRAL]
    freqs = [0.0]
    rates = [0.0]
    for lam in lams[1:]:
        b = _branch(lam, scale, exact)
        if b is Branch.NEUTRAL and not exact:
            lam_f = 0.0
        else:
            lam_f = float(lam)
        branches.append(b)
        rate = spec.omega * math.sqrt(abs(lam_f))
        rates.append(rate)
        freqs.append(None if b is Branch.HYPERBOLIC else rate)
    return Spectrum(
        n=spec.n,
        omega=spec.omega,
        lambdas=tuple(lams),
        frequencies=tuple(freqs),
        rates=tuple(rates),
        multiplicities=tuple(sector_multiplicity(spec.n, ell) for ell in range(len(lams))),
        branches=tuple(branches),
        degeneracy_groups=_group_degenerate(lams, spec.omega, exact),
        exact=exact,
    )


def stiffness_matrix(spec: SystemSpec) -> np.ndarray:
    """Dimensionless ``n x n`` circulant stiffness matrix built bond by bond.

    The potential equals ``1/2 m omega^2 sum_ab K[a, b] r_a . r_b``.  This
    is assembled directly from the bond list, not from the spectral
    formula, so it can serve as an independent check of it.
    """
    spec = canonical(spec)
    n = spec.n
    K = np.zeros((n, n))
    for k, kappa in enumerate(spec.couplings, start=1):
        starts = range(n // 2) if 2 * k == n else range(n)
        for i in starts:
            j = (i + k) % n
            K[i, i] += float(kappa)
            K[j, j] += float(kappa)
            K[i, j] -= float(kappa)
            K[j, i] -= float(kappa)
    return K
