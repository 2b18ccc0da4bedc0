import numpy as np
import pytest

from thermoent import (BathChannel, BathSpec, DensityMatrix, HilbertSpace,
                       ModelConfig, Operator, StepControl, TimeGrid,
                       annihilation, build_model, choose_dimension, compose,
                       evolve_lindblad, evolve_unitary, excited_population,
                       fock_state, lindblad_jumps, pauli, thermal_oscillator,
                       thermal_qubit)


class TestTimeGrid:
    def test_times(self):
        grid = TimeGrid(end=3.0, samples=4)
        assert np.allclose(grid.times, [0.0, 1.0, 2.0, 3.0])

    def test_validation(self):
        with pytest.raises(ValueError):
            TimeGrid(end=1.0, samples=1)
        with pytest.raises(ValueError):
            TimeGrid(end=0.0, samples=10)


class TestChooseDimension:
    def test_vacuum(self):
        assert choose_dimension(0.0, 1e-6) == 6  # minimal 2 plus 4 guard levels

    def test_reference_point(self):
        # geometric tail (1/2)^d < 1e-6 first holds at d = 20
        assert choose_dimension(1.0, 1e-6) == 24

    def test_monotone_in_nbar(self):
        dims = [choose_dimension(nb, 1e-6) for nb in (0.5, 1.0, 2.0, 5.0)]
        assert dims == sorted(dims)

    def test_monotone_in_epsilon(self):
        dims = [choose_dimension(2.0, eps) for eps in (1e-4, 1e-6, 1e-8)]
        assert dims == sorted(dims)

    def test_tail_bound_holds(self):
        for nb in (0.3, 1.0, 3.7):
            d = choose_dimension(nb, 1e-6, guard=0)
            q = nb / (1 + nb)
            assert q**d < 1e-6 <= q ** (d - 1)


class TestLindbladJumps:
    def setup_method(self):
        self.space = HilbertSpace([("q", 2), ("m", 4)])

    def test_zero_temperature_relaxation(self):
        bath = BathSpec([BathChannel("qubit_relaxation", "q", 0.04)])
        ops = lindblad_jumps(bath, self.space)
        assert len(ops) == 1
        expected = np.sqrt(0.04) * np.kron(pauli("minus").data, np.eye(4))
        assert np.allclose(ops[0].data, expected, atol=0)

    def test_zero_rate_contributes_nothing(self):
        bath = BathSpec([BathChannel("qubit_dephasing", "q", 0.0)])
        assert lindblad_jumps(bath, self.space) == []

    def test_thermal_pair_norm_ratio(self):
        bath = BathSpec([BathChannel("mode_damping", "m", 0.01, nbar_th=1.0)])
        lower, upper = lindblad_jumps(bath, self.space)
        r = np.linalg.norm(lower.data) ** 2 / np.linalg.norm(upper.data) ** 2
        assert r == pytest.approx(2.0, rel=1e-12)  # (1 + nbar) : nbar

    def test_dephasing_uses_sigma_z(self):
        bath = BathSpec([BathChannel("qubit_dephasing", "q", 0.25)])
        (op,) = lindblad_jumps(bath, self.space)
        assert np.allclose(op.data, 0.5 * np.kron(pauli("z").data, np.eye(4)), atol=0)

    def test_unknown_target(self):
        bath = BathSpec([BathChannel("mode_damping", "nope", 0.1)])
        with pytest.raises(KeyError):
            lindblad_jumps(bath, self.space)


def _jc_setup():
    cfg = ModelConfig(model="1S", ratios={"r_1S": 0.0}, mode_dims={"m1": 6, "m2": 2})
    space, h = build_model(cfg)
    excited = compose([thermal_qubit(1.0, "q"), fock_state(0, 6, "m1"),
                       fock_state(0, 2, "m2")])
    return space, h, excited


class TestEvolveUnitary:
    def test_zero_hamiltonian_is_identity(self):
        space, _, rho0 = _jc_setup()
        h0 = Operator(space, np.zeros((space.total_dim,) * 2))
        traj = evolve_unitary(h0, rho0, TimeGrid(end=5.0, samples=6))
        for state in traj:
            assert np.allclose(state.data, rho0.data, atol=1e-14)

    def test_rabi_oscillation(self):
        # two-level oracle: from |e,0> the excited population is cos^2(tau)
        _, h, rho0 = _jc_setup()
        grid = TimeGrid(end=3.0, samples=31)
        traj = evolve_unitary(h, rho0, grid)
        pe = np.array([excited_population(s, "q") for s in traj])
        assert np.allclose(pe, np.cos(grid.times) ** 2, atol=1e-10)

    def test_spectrum_preserved(self):
        space, h, _ = _jc_setup()
        rho0 = compose([thermal_qubit(0.2, "q"),
                        thermal_oscillator(0.8, 6, "m1", tail_tol=1e-2),
                        fock_state(0, 2, "m2")])
        ref = np.sort(np.linalg.eigvalsh(rho0.data))
        traj = evolve_unitary(h, rho0, TimeGrid(end=9.0, samples=4))
        for state in traj:
            got = np.sort(np.linalg.eigvalsh(state.data))
            assert np.max(np.abs(got - ref)) < 1e-9

    def test_rejects_nonhermitian(self):
        space, _, rho0 = _jc_setup()
        bad = np.zeros((space.total_dim,) * 2, dtype=complex)
        bad[0, 1] = 1.0
        with pytest.raises(ValueError):
            evolve_unitary(Operator(space, bad), rho0, TimeGrid(end=1.0, samples=2))


class TestEvolveLindblad:
    def test_empty_jumps_matches_unitary(self):
        _, h, rho0 = _jc_setup()
        grid = TimeGrid(end=4.0, samples=9)
        closed = evolve_unitary(h, rho0, grid)
        open_ = evolve_lindblad(h, [], rho0, grid)
        for a, b in zip(closed, open_):
            assert np.max(np.abs(a.data - b.data)) < 1e-8

    def test_single_mode_decay_oracle(self):
        # analytic oracle: pure damping from |1><1| decays as exp(-rate * tau)
        space = HilbertSpace([("m", 3)])
        h0 = Operator(space, np.zeros((3, 3)))
        rho0 = fock_state(1, 3, "m")
        rate = 0.3
        jump = Operator(space, np.sqrt(rate) * annihilation(3).data)
        grid = TimeGrid(end=6.0, samples=13)
        traj = evolve_lindblad(h0, [jump], rho0, grid)
        p1 = np.array([np.real(s.data[1, 1]) for s in traj])
        assert np.allclose(p1, np.exp(-rate * grid.times), atol=1e-8)

    def test_trace_and_positivity(self):
        space, h, _ = _jc_setup()
        rho0 = compose([thermal_qubit(0.0, "q"),
                        thermal_oscillator(0.5, 6, "m1", tail_tol=1e-2),
                        fock_state(0, 2, "m2")])
        bath = BathSpec([BathChannel("qubit_dephasing", "q", 0.1),
                         BathChannel("mode_damping", "m1", 0.05, nbar_th=0.5)])
        jumps = lindblad_jumps(bath, space)
        traj = evolve_lindblad(h, jumps, rho0, TimeGrid(end=5.0, samples=6))
        for state in traj:
            assert abs(np.trace(state.data) - 1.0) < 1e-9
            assert np.linalg.eigvalsh(state.data)[0] > -1e-7

    def test_heating_raises_occupation(self):
        space = HilbertSpace([("m", 8)])
        h0 = Operator(space, np.zeros((8, 8)))
        rho0 = fock_state(0, 8, "m")
        bath = BathSpec([BathChannel("mode_damping", "m", 0.2, nbar_th=1.0)])
        jumps = lindblad_jumps(bath, space)
        traj = evolve_lindblad(h0, jumps, rho0, TimeGrid(end=3.0, samples=4))
        n_op = np.diag(np.arange(8.0))
        occs = [float(np.real(np.trace(n_op @ s.data))) for s in traj]
        assert all(b > a - 1e-12 for a, b in zip(occs, occs[1:]))

    def test_step_refinement_reported(self):
        space, h, rho0 = _jc_setup()
        traj = evolve_lindblad(h, [], rho0, TimeGrid(end=1.0, samples=3),
                               control=StepControl(initial_step=0.5))
        assert traj.step <= 0.25


class TestLindbladGeneratorReduction:
    def test_zero_rates_reduce_to_unitary_generator(self):
        # operator-level check on a small superoperator matrix
        space = HilbertSpace([("q", 2)])
        h = Operator(space, pauli("x").data)
        eye = np.eye(2)
        sup_unitary = -1j * (np.kron(eye, h.data) - np.kron(h.data.T, eye))
        bath = BathSpec([BathChannel("qubit_dephasing", "q", 0.0)])
        jumps = lindblad_jumps(bath, space)
        sup_lindblad = sup_unitary.copy()
        for l in jumps:
            ld = l.data
            sup_lindblad += (np.kron(ld.conj(), ld)
                             - 0.5 * np.kron(eye, ld.conj().T @ ld)
                             - 0.5 * np.kron((ld.conj().T @ ld).T, eye))
        assert np.array_equal(sup_lindblad, sup_unitary)
