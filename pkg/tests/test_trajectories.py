import numpy as np
import pytest

from lambda_sim import (
    AtomParams,
    NoiseParams,
    compute_coeffs,
    constructed_generator,
    ensemble_average,
    evolve,
    integrate_trajectory,
    sample_ou,
)
from lambda_sim.states import ground_state_vec, mat_to_vec

ATOM = AtomParams(omega=100.0, delta=0.0)
NOISE = NoiseParams(dd=10.0, eta=0.0)


class TestSampleOU:
    def test_zero_strength_gives_zero_path(self):
        path = sample_ou(NoiseParams(dd=0.0), dt=1e-3, n_steps=1000, seed=4)
        assert np.abs(path.samples).max() == 0.0
        assert len(path.samples) == 1001

    @pytest.mark.parametrize("kappa_dt", [0.01, 0.5, 2.0])
    def test_stationary_moments_at_any_step(self, kappa_dt):
        # the exact update has no discretization bias in the field statistics
        noise = NoiseParams(dd=10.0, kappa=60.0)
        dt = kappa_dt / noise.kappa
        path = sample_ou(noise, dt=dt, n_steps=1_000_000, seed=123)
        f = path.samples
        target = noise.dd * noise.kappa
        assert np.mean(np.abs(f) ** 2) == pytest.approx(target, rel=0.05)
        assert abs(np.mean(f * f)) < 0.02 * target
        assert abs(np.mean(f)) < 0.02 * np.sqrt(target)

    def test_autocorrelation_matches_lorentzian_bandwidth(self):
        noise = NoiseParams(dd=10.0, kappa=60.0)
        dt = 0.05 / noise.kappa
        path = sample_ou(noise, dt=dt, n_steps=1_000_000, seed=7)
        f = path.samples
        for kappa_tau in (0.5, 1.0, 2.0, 3.0):
            lag = int(round(kappa_tau / (noise.kappa * dt)))
            est = np.mean(f[:-lag] * np.conj(f[lag:])).real
            expected = noise.dd * noise.kappa * np.exp(-noise.kappa * lag * dt)
            assert est == pytest.approx(expected, rel=0.05)

    def test_seed_reproducibility(self):
        a = sample_ou(NOISE, dt=1e-3, n_steps=500, seed=99)
        b = sample_ou(NOISE, dt=1e-3, n_steps=500, seed=99)
        np.testing.assert_array_equal(a.samples, b.samples)


class TestIntegrateTrajectory:
    def test_noise_free_path_matches_effective_equation(self):
        # with D = 0 the microscopic and effective equations coincide
        quiet = NoiseParams(dd=0.0)
        dt = 4e-4
        n_steps = 4000
        path = sample_ou(quiet, dt=dt / 2, n_steps=2 * n_steps, seed=0)
        rho0 = np.zeros((3, 3), dtype=complex)
        rho0[0, 0] = 1.0
        t, rhos = integrate_trajectory(ATOM, quiet, path, rho0, store_every=400)
        g = constructed_generator(ATOM, compute_coeffs(ATOM, quiet))
        _, ref = evolve(g, ground_state_vec(), t_end=n_steps * dt, dt=dt, store_every=400)
        final = mat_to_vec(rhos[-1])
        assert np.abs(final - ref[-1]).max() < 1e-8

    def test_trace_and_positivity_along_noisy_trajectory(self):
        dt = 4e-4
        n_steps = 5000
        path = sample_ou(NOISE, dt=dt / 2, n_steps=2 * n_steps, seed=21)
        rho0 = np.zeros((3, 3), dtype=complex)
        rho0[0, 0] = 1.0
        t, rhos = integrate_trajectory(ATOM, NOISE, path, rho0, store_every=50)
        traces = np.einsum("kii->k", rhos)
        assert np.abs(traces - 1.0).max() < 1e-8
        herm = np.abs(rhos - rhos.conj().transpose(0, 2, 1)).max()
        assert herm < 1e-8
        min_eig = min(np.linalg.eigvalsh(0.5 * (r + r.conj().T)).min() for r in rhos)
        assert min_eig > -1e-8

    def test_rejects_bad_initial_state(self):
        path = sample_ou(NOISE, dt=1e-3, n_steps=10, seed=1)
        with pytest.raises(ValueError, match="trace"):
            integrate_trajectory(ATOM, NOISE, path, np.eye(3, dtype=complex))


class TestEnsembleAverage:
    def test_zero_noise_is_deterministic(self):
        quiet = NoiseParams(dd=0.0)
        ens = ensemble_average(ATOM, quiet, n_traj=5, t_end=1.0, dt=5e-4, base_seed=11)
        # identical trajectories; the mean subtraction leaves only rounding
        assert np.abs(ens.se).max() < 1e-15
        g = constructed_generator(ATOM, compute_coeffs(ATOM, quiet))
        _, ref = evolve(g, ground_state_vec(), t_end=1.0, dt=5e-4)
        ref_pops = np.array([ref[-1][0].real, ref[-1][4].real,
                             1 - ref[-1][0].real - ref[-1][4].real])
        np.testing.assert_allclose(ens.mean[-1], ref_pops, atol=1e-7)

    def test_bit_identical_reruns_and_thread_invariance(self):
        a = ensemble_average(ATOM, NOISE, n_traj=12, t_end=1.0, dt=5e-4, base_seed=3)
        b = ensemble_average(ATOM, NOISE, n_traj=12, t_end=1.0, dt=5e-4, base_seed=3)
        c = ensemble_average(ATOM, NOISE, n_traj=12, t_end=1.0, dt=5e-4, base_seed=3, threads=4)
        np.testing.assert_array_equal(a.mean, b.mean)
        np.testing.assert_array_equal(a.se, b.se)
        np.testing.assert_array_equal(a.mean, c.mean)
        np.testing.assert_array_equal(a.se, c.se)

    def test_agrees_with_effective_equation(self):
        ens = ensemble_average(ATOM, NOISE, n_traj=250, t_end=6.0, dt=5e-4, base_seed=1)
        g = constructed_generator(ATOM, compute_coeffs(ATOM, NOISE))
        _, ref = evolve(g, ground_state_vec(), t_end=6.0, dt=1e-4)
        ref_pops = np.array([ref[-1][0].real, ref[-1][4].real,
                             1 - ref[-1][0].real - ref[-1][4].real])
        z = np.abs(ens.mean[-1] - ref_pops) / ens.se[-1]
        assert z.max() < 3.0

    def test_standard_error_halves_when_quadrupling(self):
        # doubling the trajectory count shrinks SE by ~1/sqrt(2)
        e1 = ensemble_average(ATOM, NOISE, n_traj=200, t_end=2.0, dt=5e-4, base_seed=7)
        e2 = ensemble_average(ATOM, NOISE, n_traj=400, t_end=2.0, dt=5e-4, base_seed=7)
        ratio = e2.se[-1] / e1.se[-1]
        assert np.all(np.abs(ratio - 1.0 / np.sqrt(2.0)) < 0.2 / np.sqrt(2.0))

    def test_means_stay_physical(self):
        ens = ensemble_average(ATOM, NOISE, n_traj=40, t_end=2.0, dt=5e-4, base_seed=19)
        assert np.all(ens.mean >= -3.0 * ens.se - 1e-12)
        assert np.all(ens.mean <= 1.0 + 3.0 * ens.se + 1e-12)
        np.testing.assert_allclose(ens.mean.sum(axis=1), 1.0, atol=1e-8)
