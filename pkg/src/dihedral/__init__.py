"""Planar n-body systems with dihedral-invariant quadratic couplings.

Normal-mode spectra, exact and numerical evolution, resonance and
phase-matching analysis, choreography detection and coupling design.
"""

from .dynamics import Trajectory, conserved_quantities, force, integrate_verlet, potential_energy
from .errors import (
    BadDimension,
    BadIndex,
    CellCap,
    DegenerateDiameter,
    DihedralError,
    Diverged,
    Infeasible,
    NonFinite,
    NonPositiveParameter,
    NotCommensurate,
    NTooSmall,
    ScenarioParseError,
    SpecError,
    WrongN,
    ZeroEnergy,
)
from .io import Scenario, builtin_scenarios, load_builtin, load_scenario
from .model import (
    Branch,
    Convention,
    Spectrum,
    SystemSpec,
    convert_convention,
    stiffness_eigenvalues,
    stiffness_matrix,
    validate_spec,
)
from .modes import (
    ModeAmplitudes,
    PhaseState,
    active_sectors,
    analytic_state,
    closed_form_n4,
    closed_form_n5,
    evolve_modes,
    fourier_decompose,
    fourier_reconstruct,
)
from .resonance import (
    Category,
    Classification,
    CouplingFamily,
    ResonanceProfile,
    Tolerances,
    classify,
    design_couplings,
    detect_commensurability,
    merge_degenerate,
    phase_matching,
)
from .scan import Axis, FixedState, RandomSeeded, ScanRequest, ScanResult, run_scan
from .traces import TraceReport, curve_distance, partition, sample_period, timeshift_residual

import types as _types

__all__ = [
    name for name, obj in globals().items()
    if not name.startswith("_") and not isinstance(obj, _types.ModuleType)
]
