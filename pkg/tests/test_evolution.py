"""Tests for the time integrators, monitors, and moving-frame machinery."""

import numpy as np
import pytest
import scipy.fft as fft

from dnls2d.spectral import Field, Grid, ModelParams
from dnls2d.stationary import StationaryProblem, initial_iterate, newton_solve
from dnls2d.evolution import (
    FrameState,
    IllConditionedFrame,
    IntegratorConfig,
    MonitorConfig,
    RunState,
    conserved_functional,
    evolve,
    moving_frame_velocity,
    observed_order,
    step,
)


@pytest.fixture(scope="module")
def townes128():
    g = Grid(5.0, 5.0, 128, 128)
    state = newton_solve(initial_iterate(g), StationaryProblem(g, ModelParams()), tol=1e-12)
    return g, state


class TestConfigValidation:
    def test_integrator_config_rejects_bad_values(self):
        with pytest.raises(ValueError):
            IntegratorConfig(dt=0.0, t_end=1.0)
        with pytest.raises(ValueError):
            IntegratorConfig(dt=float("nan"), t_end=1.0)
        with pytest.raises(ValueError):
            IntegratorConfig(dt=1e-3, t_end=1.0, scheme="euler")
        with pytest.raises(ValueError):
            IntegratorConfig(dt=1e-3, t_end=1.0, stiff_cutoff=0.0)
        with pytest.raises(ValueError):
            IntegratorConfig(dt=1e-3, t_end=1.0, krasny_tau=-1e-13)

    def test_n_steps_rounds_to_nearest(self):
        assert IntegratorConfig(dt=1e-3, t_end=1.0).n_steps == 1000
        assert IntegratorConfig(dt=0.3, t_end=1.0).n_steps == 3
        assert IntegratorConfig(dt=1e-3, t_end=0.0).n_steps == 1

    def test_monitor_config_rejects_bad_sampling(self):
        with pytest.raises(ValueError):
            MonitorConfig(sample_every=0)

    def test_frame_state_zeroes_immobile_components(self):
        f = FrameState(v=(1.0, 2.0), pinned_axis=("x2",))
        assert f.v == (0.0, 2.0)
        assert f.moving_mask == (False, True)
        assert FrameState().moving_mask == (True, True)
        with pytest.raises(ValueError):
            FrameState(pinned_axis=("x3",))

    def test_run_state_requires_spectral_field(self):
        with pytest.raises(ValueError, match="spectral"):
            RunState(t=0.0, u_hat=Field(np.ones((8, 8), complex), "physical"))

    def test_evolve_rejects_mismatched_shape(self):
        g = Grid(1.0, 1.0, 16, 16)
        with pytest.raises(ValueError, match="shape"):
            evolve(
                Field(np.ones((8, 8), complex), "physical"),
                IntegratorConfig(dt=1e-2, t_end=1e-2),
                g,
                ModelParams(),
            )


class TestConservedFunctional:
    # closed forms for u = 4 exp(-r^2) on the L = 2 box (boundary values
    # ~ 1e-35, so the periodic sums match the plane integrals):
    # int |u|^2 = 8 pi and int |grad u|^2 = 16 pi
    def test_gaussian_mass_closed_form(self):
        g = Grid(2.0, 2.0, 128, 128)
        x1, x2 = g.meshgrid()
        u = Field(4.0 * np.exp(-(x1**2 + x2**2)) + 0j, "physical")
        u_hat = Field(fft.fft2(u.values), "spectral")
        m = conserved_functional(u_hat, g, ModelParams())
        assert m == pytest.approx(8.0 * np.pi, rel=1e-12)

    def test_gaussian_weighted_mass_closed_form(self):
        g = Grid(2.0, 2.0, 128, 128)
        x1, x2 = g.meshgrid()
        u_hat = Field(fft.fft2(4.0 * np.exp(-(x1**2 + x2**2))), "spectral")
        m = conserved_functional(
            u_hat, g, ModelParams(epsilon=1.0, axes=("x1", "x2"))
        )
        assert m == pytest.approx(24.0 * np.pi, rel=1e-12)

    def test_requires_spectral_field(self):
        g = Grid(2.0, 2.0, 16, 16)
        with pytest.raises(ValueError, match="spectral"):
            conserved_functional(
                Field(np.ones(g.shape, complex), "physical"), g, ModelParams()
            )


class TestClosedFormSolutions:
    @pytest.mark.parametrize("scheme", ["composite_rk", "if_rk4"])
    def test_spatially_constant_data_follows_the_phase_ode(self, scheme):
        # constant fields reduce the PDE to d/dt u = i |u|^(2 sigma) u,
        # solved by a pure phase rotation of the zero mode
        g = Grid(1.0, 1.0, 8, 8)
        a = 1.3 + 0.4j
        u0 = Field(np.full(g.shape, a), "physical")
        rec = evolve(
            u0,
            IntegratorConfig(dt=1e-3, t_end=1.0, scheme=scheme),
            g,
            ModelParams(sigma=2.0),
            monitors=MonitorConfig(snapshot_times=(1.0,)),
        )
        exact = a * np.exp(1j * abs(a) ** 4)
        assert np.abs(rec.snapshots[-1][1].values - exact).max() < 1e-9

    def test_if_rk4_linear_part_is_the_exact_propagator(self):
        g = Grid(2.0, 3.0, 32, 16)
        params = ModelParams(epsilon=1.0, axes=("x1",), delta=(0.2, 0.3))
        rng = np.random.default_rng(5)
        c = np.zeros(g.shape, complex)
        c[:4, :3] = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        u0 = np.fft.ifft2(c)
        rec = evolve(
            Field(u0, "physical"),
            IntegratorConfig(dt=1e-2, t_end=1.0, scheme="if_rk4", linear_only=True),
            g,
            params,
            monitors=MonitorConfig(snapshot_times=(1.0,)),
        )
        xi1 = np.fft.fftfreq(32, d=1.0 / 32) / 2.0
        xi2 = np.fft.fftfreq(16, d=1.0 / 16) / 3.0
        XI1, XI2 = np.meshgrid(xi1, xi2, indexing="ij")
        L = -1j * (XI1**2 + XI2**2) / (1.0 + XI1**2)
        exact = np.fft.ifft2(np.exp(L) * np.fft.fft2(u0))
        assert np.abs(rec.snapshots[-1][1].values - exact).max() < 1e-14

    def test_composite_reduces_to_classical_rk4_without_stiff_modes(self):
        # textbook RK4 on the semidiscrete system, symbols rebuilt from
        # scratch; with the cutoff above every |L| dt the composite scheme
        # must reproduce it to roundoff
        g = Grid(2.0, 3.0, 32, 16)
        params = ModelParams(epsilon=0.7, axes=("x2",), delta=(0.15, -0.3), sigma=2.0)
        rng = np.random.default_rng(5)
        c = np.zeros(g.shape, complex)
        c[:4, :3] = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        c[-3:, -2:] = rng.standard_normal((3, 2))
        u0 = np.fft.ifft2(c)

        xi1 = np.fft.fftfreq(32, d=1.0 / 32) / 2.0
        xi2 = np.fft.fftfreq(16, d=1.0 / 16) / 3.0
        XI1, XI2 = np.meshgrid(xi1, xi2, indexing="ij")
        P = 1.0 + 0.7**2 * XI2**2
        L = -1j * (XI1**2 + XI2**2) / P
        NLM = 1j * (1.0 - 0.15 * XI1 + 0.3 * XI2) / P

        def rhs(uh):
            u = np.fft.ifft2(uh)
            return L * uh + NLM * np.fft.fft2(np.abs(u) ** 4 * u)

        h = 1e-3
        uh = np.fft.fft2(u0)
        for _ in range(10):
            k1 = rhs(uh)
            k2 = rhs(uh + 0.5 * h * k1)
            k3 = rhs(uh + 0.5 * h * k2)
            k4 = rhs(uh + h * k3)
            uh = uh + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

        rec = evolve(
            Field(u0, "physical"),
            IntegratorConfig(dt=h, t_end=10 * h, stiff_cutoff=1e12),
            g,
            params,
            monitors=MonitorConfig(snapshot_times=(10 * h,)),
        )
        diff = np.abs(rec.snapshots[-1][1].values - np.fft.ifft2(uh)).max()
        assert diff < 1e-15

    def test_ground_state_orbit(self):
        g = Grid(5.0, 5.0, 64, 64)
        st = newton_solve(initial_iterate(g), StationaryProblem(g, ModelParams()), tol=1e-12)
        rec = evolve(
            st.Q,
            IntegratorConfig(dt=1e-3, t_end=0.1),
            g,
            ModelParams(),
            monitors=MonitorConfig(snapshot_times=(0.1,)),
        )
        uf = rec.snapshots[-1][1].values
        assert np.abs(uf - np.exp(0.1j) * st.Q.values).max() < 1e-10
        assert rec.sample_array()[:, 2].max() < 1e-13


class TestMonitors:
    def _gaussian(self, g, amp=4.0):
        x1, x2 = g.meshgrid()
        return Field(amp * np.exp(-(x1**2 + x2**2)) + 0j, "physical")

    def test_mass_drift_stop(self):
        # an aggressive spectral filter bleeds mass until the guard trips
        g = Grid(2.0, 2.0, 64, 64)
        rec = evolve(
            self._gaussian(g),
            IntegratorConfig(dt=1e-3, t_end=0.1, krasny_tau=0.5),
            g,
            ModelParams(sigma=2.0),
        )
        assert rec.status.kind == "mass_drift_stop"
        assert rec.stop_time is not None and rec.stop_time <= 0.05
        assert rec.samples[-1].mass_rel_drift > 1e-3
        assert np.all(np.isfinite(rec.sample_array()))

    def test_overflow_stop_records_nothing_from_poisoned_step(self):
        g = Grid(2.0, 2.0, 64, 64)
        with np.errstate(over="ignore", invalid="ignore"):
            rec = evolve(
                self._gaussian(g, amp=50.0),
                IntegratorConfig(dt=0.5, t_end=2.0),
                g,
                ModelParams(sigma=2.0),
            )
        assert rec.status.kind == "overflow_stop"
        assert rec.stop_time == pytest.approx(0.5)
        assert len(rec.samples) == 1
        assert np.all(np.isfinite(rec.sample_array()))

    def test_resolution_warning_marks_but_does_not_stop(self):
        # under-resolved focusing run: the tail indicator trips on the first
        # step while the raised drift limit lets the run finish
        g = Grid(2.0, 2.0, 64, 64)
        rec = evolve(
            self._gaussian(g),
            IntegratorConfig(dt=1e-3, t_end=0.009),
            g,
            ModelParams(sigma=2.0),
            monitors=MonitorConfig(mass_drift_limit=1.0),
        )
        assert rec.status.kind == "resolution_warn"
        assert rec.status.t == pytest.approx(0.001)
        arr = rec.sample_array()
        assert arr[-1, 0] == pytest.approx(0.009)  # ran to t_end
        first_bad = arr[arr[:, 3] > 1e-4][0, 0]
        assert first_bad == pytest.approx(0.001)

    def test_sample_thinning_keeps_final_step(self):
        g = Grid(1.0, 1.0, 8, 8)
        u0 = Field(np.full(g.shape, 0.5 + 0j), "physical")
        rec = evolve(
            u0,
            IntegratorConfig(dt=0.1, t_end=1.0),
            g,
            ModelParams(),
            monitors=MonitorConfig(sample_every=3),
        )
        ts = [s.t for s in rec.samples]
        assert ts == pytest.approx([0.0, 0.3, 0.6, 0.9, 1.0])

    def test_snapshots_capture_first_step_at_or_past_request(self):
        g = Grid(1.0, 1.0, 8, 8)
        u0 = Field(np.full(g.shape, 0.5 + 0j), "physical")
        rec = evolve(
            u0,
            IntegratorConfig(dt=1e-2, t_end=0.1),
            g,
            ModelParams(),
            monitors=MonitorConfig(snapshot_times=(0.0, 0.05, 0.0751)),
        )
        times = [t for t, _ in rec.snapshots]
        assert times == pytest.approx([0.0, 0.05, 0.08])
        assert all(f.space == "physical" for _, f in rec.snapshots)
        assert np.abs(rec.snapshots[0][1].values - u0.values).max() < 1e-15

    def test_status_string_format(self):
        g = Grid(1.0, 1.0, 8, 8)
        u0 = Field(np.full(g.shape, 0.1 + 0j), "physical")
        rec = evolve(u0, IntegratorConfig(dt=1e-2, t_end=0.05), g, ModelParams())
        assert str(rec.status) == "completed"
        assert rec.stop_time is None


class TestDeterminism:
    def test_identical_configs_give_bitwise_identical_runs(self):
        g = Grid(2.0, 2.0, 32, 32)
        x1, x2 = g.meshgrid()
        u0 = Field((1.5 + 0.2j) * np.exp(-(x1**2 + 2 * x2**2)), "physical")
        kwargs = dict(
            cfg=IntegratorConfig(dt=1e-2, t_end=0.3),
            grid=g,
            params=ModelParams(epsilon=1.0, axes=("x1",), delta=(0.0, 0.3)),
            monitors=MonitorConfig(snapshot_times=(0.3,)),
        )
        rec1 = evolve(u0, kwargs["cfg"], kwargs["grid"], kwargs["params"], kwargs["monitors"])
        rec2 = evolve(u0, kwargs["cfg"], kwargs["grid"], kwargs["params"], kwargs["monitors"])
        assert rec1.sample_array().tobytes() == rec2.sample_array().tobytes()
        assert (
            rec1.snapshots[-1][1].values.tobytes()
            == rec2.snapshots[-1][1].values.tobytes()
        )

    def test_spectral_and_physical_input_agree(self):
        g = Grid(1.0, 1.0, 16, 16)
        x1, x2 = g.meshgrid()
        u0 = (0.8 + 0.1j) * np.exp(1j * x1) * np.exp(-0.0 * x2)
        cfg = IntegratorConfig(dt=1e-2, t_end=0.1)
        rec_p = evolve(Field(u0, "physical"), cfg, g, ModelParams())
        rec_s = evolve(Field(fft.fft2(u0), "spectral"), cfg, g, ModelParams())
        assert rec_p.sample_array().tobytes() == rec_s.sample_array().tobytes()


class TestMovingFrame:
    def test_boosted_soliton_velocity(self, townes128):
        # u = Q exp(i k.x) travels at 2k; both components grid-aligned
        g, st = townes128
        X1, X2 = g.meshgrid()
        u = st.Q.values * np.exp(1j * (0.2 * X1 - 0.4 * X2))
        rs = RunState(t=0.0, u_hat=Field(fft.fft2(u), "spectral"), frame=FrameState())
        v = moving_frame_velocity(rs, g, ModelParams())
        assert v == pytest.approx([0.4, -0.8], abs=5e-3)

    def test_symmetric_data_has_zero_velocity(self, townes128):
        g, st = townes128
        rs = RunState(
            t=0.0, u_hat=Field(fft.fft2(st.Q.values), "spectral"), frame=FrameState()
        )
        v = moving_frame_velocity(rs, g, ModelParams())
        assert np.abs(v).max() < 1e-12

    def test_singular_hessian_warns_and_keeps_previous_velocity(self):
        g = Grid(5.0, 5.0, 64, 64)
        const = np.full(g.shape, 1.0 + 0j)
        rs = RunState(
            t=0.0,
            u_hat=Field(fft.fft2(const), "spectral"),
            frame=FrameState(v=(0.7, 0.0)),
        )
        with pytest.warns(IllConditionedFrame):
            v = moving_frame_velocity(rs, g, ModelParams())
        assert v == pytest.approx([0.7, 0.0])

    def test_tracked_run_reports_steady_velocity(self, townes128):
        g, st = townes128
        X1, X2 = g.meshgrid()
        u0 = Field(st.Q.values * np.exp(1j * (0.2 * X1 - 0.4 * X2)), "physical")
        rec = evolve(
            u0,
            IntegratorConfig(dt=1e-3, t_end=0.1),
            g,
            ModelParams(),
            frame=FrameState(),
        )
        assert rec.status.kind == "completed"
        arr = rec.sample_array()
        assert np.abs(arr[:, 4] - 0.4).max() < 5e-3
        assert np.abs(arr[:, 5] + 0.8).max() < 5e-3
        # the profile rides along rigidly
        assert arr[:, 1].max() - arr[:, 1].min() < 1e-3 * arr[0, 1]
        assert arr[:, 2].max() < 1e-12

    def test_pinned_axis_restricts_tracking(self, townes128):
        g, st = townes128
        X1, X2 = g.meshgrid()
        u0 = Field(st.Q.values * np.exp(1j * (0.2 * X1 - 0.4 * X2)), "physical")
        rec = evolve(
            u0,
            IntegratorConfig(dt=1e-3, t_end=0.02),
            g,
            ModelParams(),
            frame=FrameState(pinned_axis=("x2",)),
        )
        arr = rec.sample_array()
        assert np.all(arr[:, 4] == 0.0)
        assert np.abs(arr[:, 5] + 0.8).max() < 5e-3

    def test_step_matches_evolve_prefix(self, townes128):
        g, st = townes128
        cfg = IntegratorConfig(dt=1e-3, t_end=2e-3)
        s0 = RunState(t=0.0, u_hat=Field(fft.fft2(st.Q.values), "spectral"))
        s1 = step(s0, cfg, g, ModelParams())
        s2 = step(s1, cfg, g, ModelParams())
        rec = evolve(st.Q, cfg, g, ModelParams(), monitors=MonitorConfig(snapshot_times=(2e-3,)))
        assert s2.t == pytest.approx(2e-3)
        assert np.abs(
            fft.ifft2(s2.u_hat.values) - rec.snapshots[-1][1].values
        ).max() < 1e-15


class TestObservedOrder:
    def test_synthetic_fourth_order_slope(self):
        assert observed_order(lambda dt: 3.7 * dt**4, [0.1, 0.05, 0.025]) == pytest.approx(
            4.0, abs=1e-10
        )

    def test_rejects_nonpositive_errors(self):
        with pytest.raises(ValueError):
            observed_order(lambda dt: 0.0, [0.1, 0.05])
