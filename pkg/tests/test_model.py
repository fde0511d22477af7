from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dihedral.errors import BadDimension, NonPositiveParameter, NTooSmall
from dihedral.model import (
    Branch,
    Convention,
    SystemSpec,
    convert_convention,
    stiffness_eigenvalues,
    stiffness_matrix,
    validate_spec,
)
from oracles import KAPPA5, lam_n4, lam_n5, lam_n6, pair_stiffness

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)


class TestValidation:
    def test_six_body_spec_accepted(self):
        spec = SystemSpec(6, (2, F(-2, 3), F(1, 2)))
        assert validate_spec(spec) is spec

    def test_wrong_coupling_count(self):
        with pytest.raises(BadDimension):
            validate_spec(SystemSpec(4, (1,)))

    def test_n_too_small(self):
        with pytest.raises(NTooSmall):
            validate_spec(SystemSpec(2, (1,)))

    @pytest.mark.parametrize("field", ["mass", "omega"])
    @pytest.mark.parametrize("value", [0.0, -1.0, float("nan")])
    def test_non_positive(self, field, value):
        kw = {field: value}
        with pytest.raises(NonPositiveParameter):
            validate_spec(SystemSpec(4, (1, 1), **kw))

    def test_infinite_coupling(self):
        with pytest.raises(NonPositiveParameter):
            validate_spec(SystemSpec(4, (1, float("inf"))))

    def test_exact_couplings_kept_as_fractions(self):
        spec = SystemSpec(6, (2, F(-2, 3), 1))
        assert all(isinstance(k, F) for k in spec.couplings)
        assert spec.exact
        assert not SystemSpec(5, (1, 1)).exact
        assert not SystemSpec(6, (2.0, 1, 1)).exact


class TestConvention:
    def test_double_sum_to_listed_once(self):
        out = convert_convention(SystemSpec(4, (1, F(-1, 4)), convention="double-sum"), Convention.LISTED_ONCE)
        assert out.couplings == (1, F(-1, 2))
        assert out.convention is Convention.LISTED_ONCE

    def test_odd_n_unchanged(self):
        spec = SystemSpec(5, KAPPA5, convention="double-sum")
        out = convert_convention(spec, Convention.LISTED_ONCE)
        assert out.couplings == spec.couplings

    @given(st.sampled_from([4, 6, 8]), st.data())
    def test_round_trip(self, n, data):
        kappa = tuple(data.draw(rationals) for _ in range(n // 2))
        spec = SystemSpec(n, kappa, convention="double-sum")
        back = convert_convention(convert_convention(spec, "listed-once"), "double-sum")
        assert back == spec

    @given(st.sampled_from([4, 6]), st.data())
    def test_spectrum_preserved(self, n, data):
        kappa = tuple(data.draw(rationals) for _ in range(n // 2))
        spec = SystemSpec(n, kappa, convention="double-sum")
        a = stiffness_eigenvalues(spec)
        b = stiffness_eigenvalues(convert_convention(spec, "listed-once"))
        assert a == b

    def test_double_sum_counts_opposite_pairs_twice(self):
        kappa = (0.7, -0.2, 0.9)
        spec = SystemSpec(6, kappa, convention="double-sum")
        np.testing.assert_allclose(stiffness_matrix(spec), pair_stiffness(6, kappa, double_sum=True), atol=1e-15)


class TestSpectrum:
    def test_six_body_123(self):
        sp = stiffness_eigenvalues(SystemSpec(6, (2, F(-2, 3), F(1, 2))))
        assert sp.lambdas == (0, 1, 4, 9)
        assert sp.exact

    def test_six_body_122(self):
        sp = stiffness_eigenvalues(SystemSpec(6, (F(7, 2), F(1, 2), -1)))
        assert sp.lambdas == (0, 3, 12, 12)
        assert sp.degeneracy_groups == ((1,), (2, 3))

    def test_four_body(self):
        sp = stiffness_eigenvalues(SystemSpec(4, (1, F(-1, 2)), omega=1.5))
        assert sp.lambdas == (0, 1, 4)
        assert sp.frequencies == (0.0, 1.5, 3.0)

    def test_five_body(self):
        sp = stiffness_eigenvalues(SystemSpec(5, KAPPA5))
        np.testing.assert_allclose(sp.lambdas, (0, 1, 4), atol=1e-12)

    @pytest.mark.parametrize("n", range(3, 11))
    def test_free_particles(self, n):
        sp = stiffness_eigenvalues(SystemSpec(n, (0,) * (n // 2)))
        assert all(lam == 0 for lam in sp.lambdas)
        assert all(b is Branch.NEUTRAL for b in sp.branches)

    def test_hyperbolic_reported(self):
        sp = stiffness_eigenvalues(SystemSpec(4, (1, -2)))
        assert sp.lambdas[1] == -2
        assert sp.branches[1] is Branch.HYPERBOLIC
        assert sp.frequencies[1] is None
        assert sp.rates[1] == pytest.approx(2 ** 0.5)

    @given(rationals, rationals)
    def test_n4_closed_form(self, k1, k2):
        assert stiffness_eigenvalues(SystemSpec(4, (k1, k2))).lambdas[1:] == lam_n4(k1, k2)

    @settings(max_examples=100)
    @given(rationals, rationals, rationals)
    def test_n6_closed_form_exact(self, k1, k2, k3):
        assert stiffness_eigenvalues(SystemSpec(6, (k1, k2, k3))).lambdas[1:] == lam_n6(k1, k2, k3)

    def test_n5_closed_form(self, rng):
        for k1, k2 in rng.uniform(-3, 3, size=(100, 2)):
            lam = stiffness_eigenvalues(SystemSpec(5, (k1, k2))).lambdas[1:]
            ref = lam_n5(k1, k2)
            np.testing.assert_allclose(lam, ref, rtol=1e-12, atol=1e-12 * max(abs(k1), abs(k2)))

    @pytest.mark.parametrize("n", range(3, 17))
    def test_matches_pair_stiffness_eigenvalues(self, n, rng):
        kappa = rng.uniform(-1, 2, size=n // 2)
        lam = np.array(stiffness_eigenvalues(SystemSpec(n, tuple(kappa))).lambdas, float)
        mult = stiffness_eigenvalues(SystemSpec(n, tuple(kappa))).multiplicities
        full = np.sort(np.repeat(lam, mult))
        ref = np.sort(np.linalg.eigvalsh(pair_stiffness(n, kappa)))
        np.testing.assert_allclose(full, ref, atol=1e-12)

    @pytest.mark.parametrize("n", range(3, 17))
    def test_stiffness_matrix_is_pair_sum(self, n, rng):
        kappa = tuple(rng.uniform(-1, 2, size=n // 2))
        np.testing.assert_allclose(stiffness_matrix(SystemSpec(n, kappa)), pair_stiffness(n, kappa), atol=1e-15)

    @given(st.sampled_from([3, 4, 6]), rationals, rationals, st.data())
    def test_linearity_exact(self, n, a, b, data):
        k1 = tuple(data.draw(rationals) for _ in range(n // 2))
        k2 = tuple(data.draw(rationals) for _ in range(n // 2))
        mix = tuple(a * x + b * y for x, y in zip(k1, k2))
        l1 = stiffness_eigenvalues(SystemSpec(n, k1)).lambdas
        l2 = stiffness_eigenvalues(SystemSpec(n, k2)).lambdas
        lm = stiffness_eigenvalues(SystemSpec(n, mix)).lambdas
        assert lm == tuple(a * x + b * y for x, y in zip(l1, l2))

    @given(st.integers(3, 20), st.data())
    def test_structural_invariants(self, n, data):
        kappa = tuple(data.draw(st.floats(-3, 3)) for _ in range(n // 2))
        sp = stiffness_eigenvalues(SystemSpec(n, kappa))
        assert sp.lambdas[0] == 0
        assert sum(sp.multiplicities) == n
        covered = sorted(ell for g in sp.degeneracy_groups for ell in g)
        assert covered == list(range(1, n // 2 + 1))

    def test_degeneracy_tolerance(self):
        # float couplings on the 1:2:2 locus still merge
        sp = stiffness_eigenvalues(SystemSpec(6, (3.5, 0.5, -1.0 + 1e-14)))
        assert (2, 3) in sp.degeneracy_groups
        sp = stiffness_eigenvalues(SystemSpec(6, (3.5, 0.5, -1.0 + 1e-4)))
        assert (2, 3) not in sp.degeneracy_groups
