import numpy as np
import pytest

from rdcontrol.dynamics import (
    ControlSchedule,
    PdeState,
    asymptotic_verdict,
    default_dt,
    simulate,
    step,
)
from rdcontrol.errors import InvalidInput, SolverFailure
from rdcontrol.model import DomainGeometry, DriftField, GridProfile
from rdcontrol.steady import find_barrier_one, find_barrier_zero


def make_state(geometry, values, drift):
    return PdeState(0.0, GridProfile(geometry, values), drift)


class TestStep:
    def test_theta_equilibrium(self, nl033, homog, interval_25):
        s = make_state(interval_25, np.full(201, 0.33), homog)
        for _ in range(20):
            s = step(s, nl033, 0.33, 0.33, 0.02)
        assert np.max(np.abs(s.profile.values - 0.33)) < 1e-13

    def test_zero_stays_zero(self, nl033, homog, interval_25):
        s = make_state(interval_25, np.zeros(201), homog)
        s = step(s, nl033, 0.0, 0.0, 0.02)
        assert np.max(np.abs(s.profile.values)) == 0.0

    def test_barrier_is_fixed_point(self, nl033):
        drift = DriftField.radial("gauss_out", 1.0)
        b = find_barrier_zero(nl033, drift, 1.0, 2.5, 1, n_grid=201)
        s = PdeState(0.0, b.profile, drift)
        for _ in range(50):
            s = step(s, nl033, 0.0, 0.0, 0.02)
        # sup-change per unit time far below 1e-6
        assert np.max(np.abs(s.profile.values - b.profile.values)) < 1e-9

    def test_dt_too_large(self, nl033, homog, interval_25):
        s = make_state(interval_25, np.zeros(201), homog)
        with pytest.raises(InvalidInput, match="dt-too-large"):
            step(s, nl033, 0.0, 0.0, 1.6)  # dt * 0.67 > 1

    def test_control_range_enforced(self, nl033, homog, interval_25):
        s = make_state(interval_25, np.zeros(201), homog)
        with pytest.raises(InvalidInput, match="invalid-control"):
            step(s, nl033, -0.1, 0.0, 0.02)

    def test_default_dt_formula(self, nl033):
        h = 0.025
        assert default_dt(nl033, h) == pytest.approx(0.4 * min(h * h / 2, 1 / 0.67))


class TestInvariants:
    def test_invariant_region(self, nl033, interval_25):
        rng = np.random.default_rng(5)
        drift = DriftField.radial("gauss_out", 2.0)
        vals = rng.uniform(0.0, 1.0, 201)
        vals[0] = vals[-1] = 0.5
        s = make_state(interval_25, vals, drift)
        for k in range(200):
            u = float(rng.uniform(0.0, 1.0))
            s = step(s, nl033, u, u, 0.02)
            assert np.min(s.profile.values) >= -1e-9
            assert np.max(s.profile.values) <= 1.0 + 1e-9

    def test_comparison_principle(self, nl033, interval_25):
        # 50 random ordered pairs under identical random controls
        rng = np.random.default_rng(12)
        drift = DriftField.radial("gauss_out", 2.0)
        for _ in range(50):
            lo = rng.uniform(0.0, 0.8, 101)
            hi = np.clip(lo + rng.uniform(0.0, 0.2, 101), 0.0, 1.0)
            g = DomainGeometry.interval(2.5)
            s1 = make_state(g, lo, drift)
            s2 = make_state(g, hi, drift)
            for _ in range(25):
                u = float(rng.uniform(0.0, 1.0))
                s1 = step(s1, nl033, u, u, 0.05)
                s2 = step(s2, nl033, u, u, 0.05)
            assert np.min(s2.profile.values - s1.profile.values) >= -1e-9

    def test_even_symmetry_preserved(self, nl033, interval_25):
        x = interval_25.grid(201)
        vals = 0.5 * (1.0 + np.cos(np.pi * x / 2.5)) * 0.8
        drift = DriftField.radial("gauss_out", 2.0)  # even coefficient profile
        s = make_state(interval_25, vals, drift)
        for _ in range(200):
            s = step(s, nl033, 0.3, 0.3, 0.02)
        v = s.profile.values
        assert np.max(np.abs(v - v[::-1])) < 1e-10

    def test_steady_path_members_are_fixed_points(self, nl033, homog, interval_1):
        from rdcontrol.steady import build_steady_path

        path = build_steady_path(nl033, homog, interval_1, K=5, delta=0.1, n_grid=101)
        member = path.profiles[len(path) // 2]
        trace = float(member.values[0])
        s = PdeState(0.0, member, homog)
        for _ in range(100):
            s = step(s, nl033, trace, trace, 0.02)
        assert np.max(np.abs(s.profile.values - member.values)) < 1e-10


class TestSimulate:
    def test_snapshots_and_distances(self, nl033, homog, interval_1):
        p0 = GridProfile(interval_1, np.ones(101))
        sim = simulate(p0, nl033, homog, ControlSchedule.static(0.0), T=2.0, dt=0.02,
                       snapshot_every=20)
        assert sim.times[0] == 0.0 and sim.times[-1] == pytest.approx(2.0)
        assert len(sim.snapshots) == len(sim.times)
        assert sim.sup_dist[0.0][0] == pytest.approx(1.0)
        assert np.all(np.diff(sim.sup_dist[0.0]) <= 1e-12)  # monotone decay run
        assert np.all((sim.control_log[:, 1:] >= 0.0) & (sim.control_log[:, 1:] <= 1.0))

    def test_piecewise_schedule(self, nl033, homog, interval_1):
        sched = ControlSchedule.piecewise([(0.0, 0.2), (1.0, 0.9)])
        p0 = GridProfile(interval_1, np.zeros(101))
        sim = simulate(p0, nl033, homog, sched, T=2.0, dt=0.02, snapshot_every=10)
        log = sim.control_log
        assert np.all(log[log[:, 0] < 1.0, 1] == 0.2)
        assert np.all(log[log[:, 0] >= 1.0, 1] == 0.9)

    def test_schedule_clamps(self, nl033, interval_1):
        sched = ControlSchedule.static(1.7)
        assert sched.boundary_values(0.0, GridProfile(interval_1, np.zeros(11))) == (1.0, 1.0)


class TestVerdicts:
    def test_trivial_convergence(self, nl033, homog, interval_1):
        p0 = GridProfile(interval_1, np.full(101, 0.33))
        v = asymptotic_verdict(p0, nl033, homog, 0.33, T_max=5.0, dt=0.02)
        assert v.status == "converged" and v.time is not None

    def test_certificate_region_converges(self, nl033, homog, interval_1):
        p0 = GridProfile(interval_1, np.ones(101))
        v = asymptotic_verdict(p0, nl033, homog, 0.0, T_max=60.0, dt=0.02)
        assert v.status == "converged"

    def test_blocked_with_barrier(self, nl033):
        drift = DriftField.radial("gauss_out", 1.0)
        g = DomainGeometry.interval(2.5)
        b = find_barrier_zero(nl033, drift, 1.0, 2.5, 1, n_grid=201)
        v = asymptotic_verdict(GridProfile(g, np.ones(201)), nl033, drift, 0.0,
                               T_max=80.0, dt=0.02)
        assert v.status == "blocked"
        assert v.residual_sup > 0.1
        # trajectory dominates the witness nodewise
        assert np.min(v.residual_profile.values - b.profile.values) >= -1e-6

    def test_blocked_to_one(self, nl033):
        drift = DriftField.radial("gauss_out", 1.0)
        g = DomainGeometry.interval(2.5)
        b = find_barrier_one(nl033, drift, 1.0, 2.5, 1, n_grid=201)
        v = asymptotic_verdict(GridProfile(g, np.zeros(201)), nl033, drift, 1.0,
                               T_max=80.0, dt=0.02)
        assert v.status == "blocked"
        assert np.max(v.residual_profile.values - b.profile.values) <= 1e-6

    def test_unblocking_strong_inward_drift(self, nl033):
        # N = e^{x^2/2}, sigma small: converges to every target
        drift = DriftField.radial("gauss_in", 0.25)
        g = DomainGeometry.interval(4.0)
        for a in (0.0, 1.0):
            for p0val in (0.0, 1.0):
                v = asymptotic_verdict(GridProfile(g, np.full(161, p0val)), nl033,
                                       drift, a, T_max=60.0, dt=0.02)
                assert v.status == "converged", (a, p0val)

    def test_horizon_too_short(self, nl033, homog):
        g = DomainGeometry.interval(2.5)
        p0 = GridProfile(g, np.ones(201))
        with pytest.raises(SolverFailure, match="horizon-too-short"):
            asymptotic_verdict(p0, nl033, homog, 0.0, T_max=1.0, dt=0.02)
