"""
Spectra and normal modes
========================

Couplings depend only on the cyclic distance between labels, so the
stiffness matrix is circulant and the real Fourier transform splits the
motion into independent sectors.  This script prints the spectra of the
resonant couplings shipped with the package and shows how the energy of
a state spreads over the sectors.
"""

from fractions import Fraction

import numpy as np

from dihedral import (
    PhaseState,
    SystemSpec,
    fourier_decompose,
    fourier_reconstruct,
    load_builtin,
    stiffness_eigenvalues,
)
from dihedral.modes import sector_energies

# Rational couplings give rational eigenvalues for n = 3, 4, 6.
for n, kappa in [(4, (1, Fraction(-1, 2))),
                 (6, (2, Fraction(-2, 3), Fraction(1, 2))),
                 (6, (Fraction(7, 2), Fraction(1, 2), -1))]:
    sp = stiffness_eigenvalues(SystemSpec(n, kappa))
    print(f"n={n} kappa={tuple(str(k) for k in kappa)}")
    print("  lambda      ", [str(x) for x in sp.lambdas])
    print("  multiplicity", list(sp.multiplicities))
    print("  groups      ", sp.degeneracy_groups)

# Five bodies need an irrational pair for the 1:2 spectrum.
pentagon = load_builtin("limacon5")
sp = stiffness_eigenvalues(pentagon.spec)
print("\npentagon couplings", [f"{k:.6f}" for k in pentagon.spec.couplings])
print("pentagon lambda   ", [f"{x:.12f}" for x in sp.lambdas])

# A hyperbolic sector shows up as a negative eigenvalue.
sp = stiffness_eigenvalues(SystemSpec(4, (1, -2)))
print("\nkappa=(1, -2):", [b.value for b in sp.branches])

# The transform is orthogonal: decomposing and reconstructing is exact.
rng = np.random.default_rng(0)
state = PhaseState(0.0, rng.standard_normal((7, 2)), rng.standard_normal((7, 2)))
back = fourier_reconstruct(fourier_decompose(state))
print("\nround trip error n=7:", np.abs(back.positions - state.positions).max())

# Relabeling i -> i+1 multiplies each complex amplitude by exp(2 pi i l / n).
rolled = PhaseState(0.0, np.roll(state.positions, 1, axis=0), np.roll(state.momenta, 1, axis=0))
a, b = fourier_decompose(state), fourier_decompose(rolled)
for ell in (1, 2, 3):
    ratio = b.complex_amplitude(ell)[0] / a.complex_amplitude(ell)[0]
    print(f"  sector {ell}: phase ratio {np.angle(ratio) / (2 * np.pi / 7):+.6f} x 2pi/7")

# Energy per sector for the six-body dimer data.
scn = load_builtin("fragment6_222")
sp = stiffness_eigenvalues(scn.spec)
e = sector_energies(fourier_decompose(scn.initial), sp, scn.spec.mass)
print("\nsector energies of the 2+2+2 data:", np.round(e, 6), "total", round(float(e.sum()), 6))
