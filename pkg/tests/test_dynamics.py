import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dihedral.dynamics import (
    Trajectory,
    conserved_quantities,
    default_timestep,
    force,
    integrate_verlet,
    potential_energy,
)
from dihedral.errors import Diverged, NonFinite
from dihedral.model import SystemSpec
from dihedral.modes import PhaseState, analytic_state, analytic_states
from oracles import KAPPA5, pair_stiffness


def rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


class TestForce:
    def test_coincident_particles(self):
        spec = SystemSpec(5, KAPPA5)
        np.testing.assert_array_equal(force(spec, np.ones((5, 2))), 0)

    def test_square_against_stiffness(self):
        spec = SystemSpec(4, (1, F(-1, 2)), mass=2.0, omega=1.5)
        r = np.array([(1, 0), (0, 1), (-1, 0), (0, -1)], float)  # side sqrt(2)
        expect = -spec.mass * spec.omega ** 2 * pair_stiffness(4, spec.couplings) @ r
        np.testing.assert_allclose(force(spec, r), expect, atol=1e-15)

    def test_random_against_stiffness(self, rng):
        for _ in range(100):
            n = int(rng.integers(3, 11))
            kappa = tuple(rng.uniform(-2, 2, n // 2))
            spec = SystemSpec(n, kappa, mass=rng.uniform(0.5, 2), omega=rng.uniform(0.5, 2))
            r = rng.standard_normal((n, 2))
            expect = -spec.mass * spec.omega ** 2 * pair_stiffness(n, kappa) @ r
            np.testing.assert_allclose(force(spec, r), expect, atol=1e-12)

    def test_double_sum_convention(self, rng):
        kappa = (0.3, 1.1, -0.4)
        r = rng.standard_normal((6, 2))
        spec = SystemSpec(6, kappa, convention="double-sum")
        np.testing.assert_allclose(force(spec, r), -pair_stiffness(6, kappa, double_sum=True) @ r, atol=1e-14)

    @given(st.integers(3, 12), st.floats(-10, 10), st.floats(-10, 10))
    def test_translation_invariant(self, n, dx, dy):
        rng = np.random.default_rng(n)
        spec = SystemSpec(n, tuple(rng.uniform(-1, 1, n // 2)))
        r = rng.standard_normal((n, 2))
        f0 = force(spec, r)
        np.testing.assert_allclose(force(spec, r + [dx, dy]), f0, atol=1e-12)
        np.testing.assert_allclose(f0.sum(axis=0), 0, atol=1e-13)

    def test_force_is_energy_gradient(self, rng):
        spec = SystemSpec(7, (0.5, -0.3, 1.2), omega=1.3)
        r = rng.standard_normal((7, 2))
        h = 1e-6
        num = np.zeros_like(r)
        for i in range(7):
            for a in range(2):
                e = np.zeros_like(r)
                e[i, a] = h
                num[i, a] = -(potential_energy(spec, r + e) - potential_energy(spec, r - e)) / (2 * h)
        np.testing.assert_allclose(force(spec, r), num, atol=1e-7)


class TestConservedQuantities:
    def test_limacon_energy_constant(self, scenarios):
        s = scenarios["limacon4"]
        e0 = conserved_quantities(s.spec, s.initial)["energy"]
        for t in np.linspace(0, 2 * math.pi, 40):
            e = conserved_quantities(s.spec, analytic_state(s.spec, s.initial, t))["energy"]
            assert e == pytest.approx(e0, rel=1e-12)

    def test_zero_momenta(self, rng):
        spec = SystemSpec(6, (2, F(-2, 3), F(1, 2)))
        r = rng.standard_normal((6, 2))
        q = conserved_quantities(spec, PhaseState(0.0, r, np.zeros((6, 2))))
        assert q["energy"] == pytest.approx(potential_energy(spec, r), rel=1e-15)
        assert q["angular_momentum"] == 0

    @given(st.floats(-math.pi, math.pi))
    def test_rotation_invariant(self, theta):
        rng = np.random.default_rng(3)
        spec = SystemSpec(5, KAPPA5)
        r, p = rng.standard_normal((5, 2)), rng.standard_normal((5, 2))
        Q = rot(theta)
        a = conserved_quantities(spec, PhaseState(0.0, r, p))
        b = conserved_quantities(spec, PhaseState(0.0, r @ Q.T, p @ Q.T))
        assert b["energy"] == pytest.approx(a["energy"], rel=1e-12)
        assert b["angular_momentum"] == pytest.approx(a["angular_momentum"], rel=1e-12, abs=1e-12)

    def test_angular_momentum_sign(self):
        spec = SystemSpec(3, (1,))
        r = np.array([(1, 0), (0, 0), (-1, 0)], float)
        p = np.array([(0, 1), (0, 0), (0, -1)], float)
        assert conserved_quantities(spec, PhaseState(0.0, r, p))["angular_momentum"] == 2.0


class TestVerlet:
    def test_free_motion_is_straight(self, rng):
        spec = SystemSpec(5, (0, 0), mass=2.0)
        r, p = rng.standard_normal((5, 2)), rng.standard_normal((5, 2))
        traj = integrate_verlet(spec, PhaseState(0.0, r, p), 0.01, 1000, stride=100)
        for k, t in enumerate(traj.times):
            np.testing.assert_allclose(traj.positions[k], r + t * p / 2.0, atol=1e-12)
            np.testing.assert_array_equal(traj.momenta[k], p)

    def test_second_order_convergence(self, scenarios):
        s = scenarios["limacon5"]
        T = 2 * math.pi
        errs = []
        for steps in (500, 1000, 2000):
            traj = integrate_verlet(s.spec, s.initial, T / steps, steps, stride=steps)
            errs.append(np.abs(traj.positions[-1] - analytic_state(s.spec, s.initial, T).positions).max())
        for a, b in zip(errs, errs[1:]):
            assert 3.6 < a / b < 4.4

    def test_choreography_fine_step(self, scenarios):
        # dt = T/1e5 over ten periods
        s = scenarios["choreo6_122"]
        T = 2 * math.pi / math.sqrt(3)
        traj = integrate_verlet(s.spec, s.initial, T / 1e5, 10 ** 6, stride=10 ** 4)
        R, _ = analytic_states(s.spec, s.initial, traj.times - s.initial.t)
        assert np.abs(traj.positions - R).max() <= 1e-6

    def test_deterministic(self, scenarios):
        s = scenarios["fragment6_222"]
        a = integrate_verlet(s.spec, s.initial, 1e-3, 500, stride=50)
        b = integrate_verlet(s.spec, s.initial, 1e-3, 500, stride=50)
        np.testing.assert_array_equal(a.positions, b.positions)

    def test_sampling_layout(self, scenarios):
        s = scenarios["limacon4"]
        traj = integrate_verlet(s.spec, s.initial, 0.01, 100, stride=25)
        assert len(traj) == 5
        np.testing.assert_allclose(traj.times, s.initial.t + 0.25 * np.arange(5))
        np.testing.assert_array_equal(traj.positions[0], s.initial.positions)
        assert traj.state(3).t == traj.times[3]
        assert traj.meta["integrator"] == "velocity-verlet"

    def test_momentum_conserved(self, scenarios):
        s = scenarios["fragment5_221"]
        traj = integrate_verlet(s.spec, s.initial, 1e-3, 20000, stride=1000)
        drift = traj.momenta.sum(axis=1) - s.initial.momenta.sum(axis=0)
        assert np.abs(drift).max() <= 1e-12

    def test_hyperbolic_diverges(self):
        spec = SystemSpec(4, (1, -2))
        r = np.array([(1, 0), (0, 0), (-1, 0), (0, 0)], float)
        s = PhaseState(0.0, r, np.zeros((4, 2)))
        with pytest.raises(Diverged):
            integrate_verlet(spec, s, 0.01, 10 ** 5, stride=100)
        with pytest.raises(NonFinite):
            integrate_verlet(spec, s, 0.5, 10 ** 4, stride=10 ** 4)

    @pytest.mark.parametrize("dt,steps,stride", [(0.0, 10, 1), (-1.0, 10, 1), (0.1, 0, 1), (0.1, 10, 0)])
    def test_bad_arguments(self, dt, steps, stride):
        s = PhaseState(0.0, np.zeros((3, 2)), np.zeros((3, 2)))
        with pytest.raises(ValueError):
            integrate_verlet(SystemSpec(3, (1,)), s, dt, steps, stride)


class TestTrajectory:
    def test_times_must_increase(self):
        z = np.zeros((3, 4, 2))
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 1.0, 1.0]), z, z)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 1.0]), np.zeros((3, 4, 2)), np.zeros((3, 4, 2)))

    def test_states(self):
        z = np.zeros((2, 3, 2))
        traj = Trajectory(np.array([0.0, 1.0]), z, z)
        assert [s.t for s in traj.states] == [0.0, 1.0]
        assert traj.n == 3


def test_default_timestep():
    assert default_timestep(2 * math.pi, 5.0) == pytest.approx(2 * math.pi / 1e4)
    assert default_timestep(None, 2.0) == pytest.approx(math.pi / 1e4)
    assert default_timestep(float("inf"), 2.0) == pytest.approx(math.pi / 1e4)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 8), st.integers(0, 10 ** 6))
def test_verlet_tracks_exact_flow_short_horizon(n, seed):
    rng = np.random.default_rng(seed)
    spec = SystemSpec(n, tuple(rng.uniform(0.2, 1.0, n // 2)))
    s = PhaseState(0.0, rng.standard_normal((n, 2)), rng.standard_normal((n, 2)))
    traj = integrate_verlet(spec, s, 1e-3, 1000, stride=1000)
    exact = analytic_state(spec, s, 1.0)
    assert np.abs(traj.positions[-1] - exact.positions).max() < 1e-5
