import numpy as np
import pytest

from thermoent import (DensityMatrix, HilbertSpace, Operator, annihilation,
                       embed, identity, partial_trace, partial_transpose,
                       pauli, thermal_oscillator, thermal_qubit, trace_norm)
from thermoent.states import compose


def bell_state():
    space = HilbertSpace([("q1", 2), ("q2", 2)])
    v = np.zeros(4)
    v[0] = v[3] = 1.0 / np.sqrt(2.0)
    return DensityMatrix(space, np.outer(v, v))


class TestHilbertSpace:
    def test_total_dim_is_product(self):
        space = HilbertSpace([("q", 2), ("m1", 5), ("m2", 7)])
        assert space.total_dim == 70
        assert space.dims == (2, 5, 7)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError):
            HilbertSpace([("a", 2), ("a", 3)])

    def test_unknown_label(self):
        space = HilbertSpace([("q", 2)])
        with pytest.raises(KeyError):
            space.axis("nope")


class TestAnnihilation:
    def test_qubit_sized(self):
        a = annihilation(2)
        assert np.array_equal(a.data, [[0, 1], [0, 0]])

    def test_dim3_entries(self):
        a = annihilation(3).data
        assert a[0, 1] == 1.0
        assert a[1, 2] == pytest.approx(np.sqrt(2.0))
        assert np.count_nonzero(a) == 2

    def test_number_spectrum(self):
        # eigensolver oracle on a†a
        a = annihilation(10)
        n = a.dag() @ a
        assert np.allclose(np.linalg.eigvalsh(n.data), np.arange(10), atol=1e-12)

    def test_invalid_dimension(self):
        with pytest.raises(ValueError):
            annihilation(1)


class TestPauli:
    def test_plus_in_ge_ordering(self):
        assert np.array_equal(pauli("plus").data, [[0, 0], [1, 0]])

    def test_z_diagonal(self):
        assert np.array_equal(pauli("z").data, np.diag([-1.0, 1.0]))

    def test_completeness(self):
        sp, sm = pauli("plus").data, pauli("minus").data
        assert np.allclose(sp @ sm + sm @ sp, np.eye(2))

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            pauli("w")


class TestEmbed:
    def test_kron_order(self):
        space = HilbertSpace([("q", 2), ("m", 3)])
        emb = embed(pauli("z"), space, "q")
        assert np.allclose(emb.data, np.kron(pauli("z").data, np.eye(3)))

    def test_identity_embeds_to_identity(self):
        space = HilbertSpace([("q", 2), ("m", 4)])
        eye2 = identity(HilbertSpace([("x", 2)]))
        assert np.allclose(embed(eye2, space, "q").data, np.eye(8))

    def test_mean_occupation_expectation(self):
        # direct-sum oracle: sum n p_n over truncated, renormalized weights
        space = HilbertSpace([("q", 2), ("m", 4)])
        a = annihilation(4)
        n_op = embed(a.dag() @ a, space, "m")
        rho = compose([thermal_qubit(0.0, "q"),
                       thermal_oscillator(1.0, 4, "m", tail_tol=0.2)])
        got = np.real(np.trace(n_op.data @ rho.data))
        p = np.array([0.5, 0.25, 0.125, 0.0625])
        p /= p.sum()
        assert got == pytest.approx(np.sum(np.arange(4) * p), abs=1e-12)

    def test_dimension_mismatch(self):
        space = HilbertSpace([("q", 2), ("m", 4)])
        with pytest.raises(ValueError):
            embed(annihilation(3), space, "m")
        with pytest.raises(KeyError):
            embed(annihilation(4), space, "nope")

    def test_hermiticity_preserved(self):
        rng = np.random.default_rng(7)
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        herm = m + m.conj().T
        space = HilbertSpace([("a", 3), ("b", 2)])
        op = embed(Operator(HilbertSpace([("x", 3)]), herm), space, "a")
        assert np.max(np.abs(op.data - op.data.conj().T)) == 0.0


class TestDensityMatrix:
    def test_rejects_nonhermitian(self):
        space = HilbertSpace([("q", 2)])
        with pytest.raises(ValueError):
            DensityMatrix(space, [[0.5, 0.1], [0.3, 0.5]])

    def test_rejects_bad_trace(self):
        space = HilbertSpace([("q", 2)])
        with pytest.raises(ValueError):
            DensityMatrix(space, np.diag([0.7, 0.7]))

    def test_rejects_negative(self):
        space = HilbertSpace([("q", 2)])
        with pytest.raises(ValueError):
            DensityMatrix(space, np.diag([1.2, -0.2]))

    def test_data_is_readonly(self):
        rho = thermal_qubit(0.3)
        with pytest.raises(ValueError):
            rho.data[0, 0] = 2.0


class TestPartialTrace:
    def test_product_state_recovers_factor(self):
        qa = thermal_qubit(0.2, "a")
        qb = thermal_qubit(0.7, "b")
        joint = compose([qa, qb])
        assert np.allclose(partial_trace(joint, {"a"}).data, qa.data, atol=1e-12)

    def test_trace_preserved(self):
        rng = np.random.default_rng(3)
        m = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        space = HilbertSpace([("q", 2), ("m1", 3), ("m2", 2)])
        full = DensityMatrix(space, rho)
        for keep in ({"q"}, {"m1"}, {"q", "m2"}, {"m1", "m2"}):
            reduced = partial_trace(full, keep)
            assert np.trace(reduced.data) == pytest.approx(1.0, abs=1e-12)

    def test_bell_reduces_to_maximally_mixed(self):
        reduced = partial_trace(bell_state(), {"q1"})
        assert np.allclose(reduced.data, np.eye(2) / 2.0, atol=1e-12)

    def test_empty_keep_rejected(self):
        with pytest.raises(ValueError):
            partial_trace(bell_state(), set())


class TestPartialTranspose:
    def test_product_state_stays_psd(self):
        joint = compose([thermal_qubit(0.2, "a"), thermal_qubit(0.4, "b")])
        pt = partial_transpose(joint, {"a"})
        assert np.linalg.eigvalsh(pt.data)[0] >= -1e-14

    def test_bell_minimum_eigenvalue(self):
        pt = partial_transpose(bell_state(), {"q1"})
        assert np.linalg.eigvalsh(pt.data)[0] == pytest.approx(-0.5, abs=1e-12)

    def test_involution_is_bitwise(self):
        rng = np.random.default_rng(11)
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        space = HilbertSpace([("a", 2), ("b", 3)])
        full = DensityMatrix(space, rho)
        twice = partial_transpose(partial_transpose(full, {"b"}), {"b"})
        assert np.array_equal(twice.data, full.data)

    def test_trace_and_hermiticity_preserved(self):
        pt = partial_transpose(bell_state(), {"q2"})
        assert np.trace(pt.data) == pytest.approx(1.0, abs=1e-14)
        assert np.max(np.abs(pt.data - pt.data.conj().T)) == 0.0

    def test_full_or_empty_block_rejected(self):
        with pytest.raises(ValueError):
            partial_transpose(bell_state(), set())
        with pytest.raises(ValueError):
            partial_transpose(bell_state(), {"q1", "q2"})


class TestTraceNorm:
    def test_density_matrix_is_one(self):
        assert trace_norm(thermal_qubit(0.37)) == pytest.approx(1.0, abs=1e-12)

    def test_diagonal(self):
        space = HilbertSpace([("x", 2)])
        m = Operator(space, np.diag([3.0, -4.0]))
        assert trace_norm(m) == pytest.approx(7.0, abs=1e-12)

    def test_hermitian_path_matches_svd(self):
        # SVD oracle on a random Hermitian matrix
        rng = np.random.default_rng(5)
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        herm = m + m.conj().T
        svd_value = float(np.sum(np.linalg.svd(herm, compute_uv=False)))
        got = trace_norm(Operator(HilbertSpace([("x", 6)]), herm))
        assert got == pytest.approx(svd_value, abs=1e-10)

    def test_lower_bound_by_trace(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
            assert trace_norm(m) >= abs(np.trace(m)) - 1e-12


def test_kron_associativity():
    rng = np.random.default_rng(2)
    a, b, c = (rng.normal(size=(d, d)) for d in (2, 3, 2))
    assert np.allclose(np.kron(np.kron(a, b), c), np.kron(a, np.kron(b, c)), atol=0)
