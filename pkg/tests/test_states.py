import numpy as np
import pytest

from thermoent import (QubitThermalSpec, ThermalSpec, TruncationError,
                       coherent_state, compose, fock_state,
                       nbar_from_temperature, partial_trace,
                       pe_from_temperature, phase_randomized_coherent,
                       thermal_oscillator, thermal_qubit)
from thermoent.states import HBAR, K_B


class TestTemperatureConversions:
    def test_nbar_at_log2_point(self):
        # hbar*omega/kB T = ln 2 gives nbar exactly 1
        omega = 2 * np.pi * 1e6
        temp = HBAR * omega / (K_B * np.log(2.0))
        assert nbar_from_temperature(temp, omega) == pytest.approx(1.0, rel=1e-12)

    def test_nbar_vanishes_at_low_temperature(self):
        omega = 2 * np.pi * 1e6
        assert nbar_from_temperature(1e-7, omega) < 1e-20

    def test_nbar_at_ratio_point_one(self):
        omega = 2 * np.pi * 1e6
        temp = HBAR * omega / (K_B * 0.1)
        assert nbar_from_temperature(temp, omega) == pytest.approx(9.5083, abs=1e-4)

    def test_pe_high_temperature_limit(self):
        omega = 2 * np.pi * 1e6
        assert pe_from_temperature(1e6, omega) == pytest.approx(0.5, abs=1e-9)
        assert pe_from_temperature(1e6, omega) < 0.5

    def test_pe_low_temperature_limit(self):
        omega = 2 * np.pi * 1e9
        assert pe_from_temperature(1e-4, omega) == pytest.approx(0.0, abs=1e-30)

    def test_pe_at_unit_ratio(self):
        omega = 2 * np.pi * 1e6
        temp = HBAR * omega / K_B
        assert pe_from_temperature(temp, omega) == pytest.approx(1.0 / (np.e + 1.0),
                                                                 rel=1e-12)

    def test_nonpositive_inputs(self):
        with pytest.raises(ValueError):
            nbar_from_temperature(-1.0, 1.0)
        with pytest.raises(ValueError):
            nbar_from_temperature(1.0, 0.0)
        with pytest.raises(ValueError):
            pe_from_temperature(0.0, 1.0)


class TestSpecs:
    def test_exactly_one_route(self):
        with pytest.raises(ValueError):
            ThermalSpec(nbar=1.0, temperature=1.0, frequency=1.0)
        with pytest.raises(ValueError):
            ThermalSpec()
        with pytest.raises(ValueError):
            ThermalSpec(temperature=1.0)

    def test_resolve_matches_function(self):
        omega = 2 * np.pi * 2e6
        spec = ThermalSpec(temperature=1e-3, frequency=omega)
        assert spec.resolve() == pytest.approx(nbar_from_temperature(1e-3, omega))
        assert ThermalSpec(nbar=2.5).resolve() == 2.5

    def test_qubit_spec_bounds(self):
        with pytest.raises(ValueError):
            QubitThermalSpec(pe=1.2)
        assert QubitThermalSpec(pe=0.3).resolve() == 0.3


class TestThermalOscillator:
    def test_ground_state_at_zero(self):
        rho = thermal_oscillator(0.0, 6)
        expected = np.zeros((6, 6))
        expected[0, 0] = 1.0
        assert np.allclose(rho.data, expected, atol=0)

    def test_geometric_weights(self):
        rho = thermal_oscillator(1.0, 40)
        p = np.real(np.diag(rho.data))
        assert p[0] == pytest.approx(0.5, abs=1e-9)
        assert p[1] == pytest.approx(0.25, abs=1e-9)
        assert p[2] == pytest.approx(0.125, abs=1e-9)

    def test_mean_occupation(self):
        # oracle: closed-form mean of the truncated, renormalized geometric
        # distribution; the deficit against nbar is the tail mass times
        # roughly (dim + nbar), a few 1e-5 at the auto-selected dimension
        from thermoent import choose_dimension
        nbar = 5.0
        dim = choose_dimension(nbar, 1e-6)
        rho = thermal_oscillator(nbar, dim)
        p = np.real(np.diag(rho.data))
        mean = np.sum(np.arange(dim) * p)
        q = nbar / (1 + nbar)
        n = np.arange(dim)
        expected = np.sum(n * q**n) / np.sum(q**n)
        assert mean == pytest.approx(expected, abs=1e-10)
        assert mean == pytest.approx(nbar, abs=1e-4)

    def test_mean_occupation_monotone_in_dim(self):
        means = []
        for dim in (30, 40, 50, 60):
            p = np.real(np.diag(thermal_oscillator(2.0, dim, tail_tol=1e-3).data))
            means.append(np.sum(np.arange(dim) * p))
        assert all(b > a for a, b in zip(means, means[1:]))
        assert all(m < 2.0 for m in means)

    def test_tail_refusal(self):
        with pytest.raises(TruncationError):
            thermal_oscillator(5.0, 30)


class TestThermalQubit:
    def test_extremes(self):
        assert np.allclose(thermal_qubit(0.0).data, np.diag([1.0, 0.0]))
        assert np.allclose(thermal_qubit(0.5).data, np.eye(2) / 2)

    def test_partial_inversion_population(self):
        rho = thermal_qubit(0.63)
        assert np.allclose(rho.data, np.diag([0.37, 0.63]))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            thermal_qubit(-0.1)
        with pytest.raises(ValueError):
            thermal_qubit(1.1)


class TestCoherentState:
    def test_vacuum(self):
        rho = coherent_state(0.0, 5)
        assert rho.data[0, 0] == pytest.approx(1.0)

    def test_purity(self):
        rho = coherent_state(1.3 + 0.4j, 24)
        assert np.real(np.vdot(rho.data, rho.data)) == pytest.approx(1.0, abs=1e-10)

    def test_mean_occupation(self):
        # oracle: sum n |c_n|^2 must equal |alpha|^2
        rho = coherent_state(2.0, 40)
        p = np.real(np.diag(rho.data))
        assert np.sum(np.arange(40) * p) == pytest.approx(4.0, abs=1e-5)

    def test_tail_refusal(self):
        with pytest.raises(TruncationError):
            coherent_state(3.0, 10)


class TestPhaseRandomizedCoherent:
    def test_vacuum(self):
        rho = phase_randomized_coherent(0.0, 5)
        assert rho.data[0, 0] == pytest.approx(1.0)

    def test_no_coherences(self):
        rho = phase_randomized_coherent(1.5, 24)
        off = rho.data - np.diag(np.diag(rho.data))
        assert np.max(np.abs(off)) == 0.0

    def test_poisson_variance(self):
        # oracle: Poisson variance equals the mean |alpha|^2
        rho = phase_randomized_coherent(np.sqrt(2.0), 30)
        p = np.real(np.diag(rho.data))
        n = np.arange(30)
        mean = np.sum(n * p)
        var = np.sum(n**2 * p) - mean**2
        assert var == pytest.approx(2.0, abs=1e-5)

    def test_same_diagonal_as_coherent(self):
        alpha = 1.2
        diag_c = np.real(np.diag(coherent_state(alpha, 24).data))
        diag_p = np.real(np.diag(phase_randomized_coherent(alpha, 24).data))
        assert np.allclose(diag_c, diag_p, atol=1e-12)


class TestFock:
    def test_projector(self):
        rho = fock_state(3, 6)
        assert rho.data[3, 3] == 1.0
        assert np.count_nonzero(rho.data) == 1

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            fock_state(6, 6)


class TestCompose:
    def test_pure_product_purity(self):
        rho = compose([thermal_qubit(0.0, "q"), fock_state(0, 4, "m")])
        assert np.real(np.vdot(rho.data, rho.data)) == pytest.approx(1.0)

    def test_trace_one(self):
        rho = compose([thermal_qubit(0.2, "q"),
                       thermal_oscillator(1.0, 24, "m1"),
                       thermal_oscillator(0.5, 18, "m2")])
        assert np.trace(rho.data) == pytest.approx(1.0, abs=1e-12)

    def test_roundtrip_through_partial_trace(self):
        a = thermal_oscillator(0.8, 20, "a")
        b = thermal_qubit(0.31, "b")
        joint = compose([a, b])
        back = partial_trace(joint, {"a"})
        assert np.max(np.abs(back.data - a.data)) < 1e-12

    def test_label_collision(self):
        with pytest.raises(ValueError):
            compose([thermal_qubit(0.1, "x"), thermal_qubit(0.2, "x")])

    def test_empty(self):
        with pytest.raises(ValueError):
            compose([])
