import math

import numpy as np
import pytest

from lambda_sim import AtomParams, NoiseParams, derive, generalized_rabi


class TestGeneralizedRabi:
    def test_zero_coupling(self):
        assert generalized_rabi(AtomParams(omega=0.0, delta=5.0)) == 5.0

    def test_resonant_drive(self):
        # sqrt(8 * 100^2), evaluated independently
        expected = math.sqrt(8.0) * 100.0
        assert generalized_rabi(AtomParams(omega=100.0, delta=0.0)) == pytest.approx(
            expected, abs=1e-12
        )
        assert expected == pytest.approx(282.84271247461902, abs=1e-10)

    def test_detuned_drive(self):
        expected = math.sqrt(20.0**2 + 8.0 * 100.0**2)
        assert generalized_rabi(AtomParams(omega=100.0, delta=20.0)) == pytest.approx(
            expected, abs=1e-12
        )
        assert expected == pytest.approx(283.54893757515649, abs=1e-10)

    def test_even_in_delta_and_monotone(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            om = rng.uniform(0.1, 400.0)
            de = rng.uniform(-300.0, 300.0)
            r = generalized_rabi(AtomParams(omega=om, delta=de))
            assert r == generalized_rabi(AtomParams(omega=om, delta=-de))
            assert generalized_rabi(AtomParams(omega=om, delta=abs(de) + 1.0)) > r
            assert generalized_rabi(AtomParams(omega=om + 1.0, delta=de)) > r
            assert r >= abs(de)
            assert r >= math.sqrt(8.0) * om


class TestDerivedQuantities:
    def test_eigenvalue_identities(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            p = AtomParams(omega=rng.uniform(1.0, 300.0), delta=rng.uniform(-200.0, 200.0))
            d = derive(p)
            assert d.lambda_plus * d.lambda_minus == pytest.approx(-2.0 * p.omega**2, rel=1e-12)
            assert d.lambda_plus + d.lambda_minus == pytest.approx(p.delta, abs=1e-9)
            assert d.lambda_zero == 0.0
            assert d.n_plus > 1.0 and d.n_minus > 1.0

    def test_requires_positive_omega(self):
        with pytest.raises(ValueError):
            derive(AtomParams(omega=0.0, delta=5.0))


class TestValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(omega=-1.0, delta=0.0),
            dict(omega=10.0, delta=0.0, gamma=0.0),
            dict(omega=10.0, delta=0.0, gamma_sg=-1e-6),
            dict(omega=10.0, delta=0.0, mu_sq=0.0),
            dict(omega=float("nan"), delta=0.0),
        ],
    )
    def test_atom_rejects(self, kwargs):
        with pytest.raises(ValueError):
            AtomParams(**kwargs)

    @pytest.mark.parametrize(
        "kwargs",
        [dict(dd=-0.1), dict(dd=1.0, kappa=0.0), dict(dd=float("inf"))],
    )
    def test_noise_rejects(self, kwargs):
        with pytest.raises(ValueError):
            NoiseParams(**kwargs)

    def test_defaults(self):
        p = AtomParams(omega=100.0, delta=0.0)
        n = NoiseParams(dd=10.0)
        assert (p.gamma, p.gamma_sg, p.mu_sq) == (1.0, 1e-3, 1.0)
        assert (n.eta, n.kappa) == (0.0, 60.0)
