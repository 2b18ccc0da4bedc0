"""Correlation and state diagnostics: logarithmic negativity, concurrence,
entanglement potential, qubit populations, fidelity and purity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import (DensityMatrix, HilbertSpace, Operator, partial_trace,
                        partial_transpose, trace_norm)

LN_CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class BipartiteCut:
    """Disjoint label blocks that together cover the measured space."""

    block_a: tuple[str, ...]
    block_b: tuple[str, ...]

    def __init__(self, block_a, block_b):
        a = tuple(block_a)
        b = tuple(block_b)
        if not a or not b:
            raise ValueError("both cut blocks must be nonempty")
        if set(a) & set(b):
            raise ValueError(f"cut blocks overlap: {sorted(set(a) & set(b))}")
        object.__setattr__(self, "block_a", a)
        object.__setattr__(self, "block_b", b)

    def validate(self, space: HilbertSpace):
        have = set(self.block_a) | set(self.block_b)
        expected = set(space.labels)
        if have != expected:
            raise ValueError(
                f"cut {sorted(have)} does not cover the state's subsystems "
                f"{sorted(expected)}; trace out ancillas first"
            )


def logarithmic_negativity(rho: DensityMatrix, cut: BipartiteCut) -> float:
    """log2 of the trace norm of the partial transpose across the cut.

    Values within 1e-10 below zero are clamped to zero; they are eigenvalue
    noise on separable states.
    """
    cut.validate(rho.space)
    pt = partial_transpose(rho, cut.block_a)
    value = float(np.log2(trace_norm(pt)))
    if value < 0.0:
        if value < -LN_CLAMP_TOL:
            raise ArithmeticError(
                f"trace norm of a partial transpose fell below 1 by {-value:.3e}; "
                "this indicates a numerical failure upstream"
            )
        return 0.0
    return value


_SYSY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence from the spin-flipped spectrum:
    max(0, l1 - l2 - l3 - l4) with l_i the sorted square roots of eig(rho rho~)."""
    if rho.space.total_dim != 4 or rho.space.dims != (2, 2):
        raise ValueError(f"concurrence needs a two-qubit state, got dims {rho.space.dims}")
    r = rho.data
    r_tilde = _SYSY @ r.conj() @ _SYSY
    evals = np.linalg.eigvals(r @ r_tilde)
    lam = np.sqrt(np.sort(np.abs(np.real(evals)))[::-1])
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _beamsplitter_5050(dim: int) -> np.ndarray:
    """Unitary exp(pi/4 (c^dag a - c a^dag)) on mode (x) ancilla, both of size dim."""
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    cdag_a = np.kron(a, a.conj().T)  # a on the mode, c^dag on the ancilla
    gen = (np.pi / 4.0) * (cdag_a - cdag_a.conj().T)
    herm = 1j * gen  # Hermitian since gen is anti-Hermitian
    energies, basis = np.linalg.eigh(herm)
    return basis @ (np.exp(-1j * energies)[:, None] * basis.conj().T)


def entanglement_potential(rho: DensityMatrix) -> float:
    """Nonclassicality of a single-mode state as the entanglement it releases
    on a balanced beamsplitter against the vacuum.

    The ancilla gets the same truncation as the input; a balanced passive
    coupling cannot populate ancilla levels above the input's support.
    """
    if len(rho.space.subsystems) != 1:
        raise ValueError("entanglement potential is defined for a single mode")
    dim = rho.space.total_dim
    u = _beamsplitter_5050(dim)
    vac = np.zeros((dim, dim), dtype=complex)
    vac[0, 0] = 1.0
    joint = np.kron(rho.data, vac)
    out = u.conj().T @ joint @ u
    label = rho.space.labels[0]
    space = HilbertSpace([(label, dim), (label + "_ancilla", dim)])
    rho_e = DensityMatrix.trusted(space, out)
    return logarithmic_negativity(rho_e, BipartiteCut((label,), (label + "_ancilla",)))


def _qubit_marginal(rho: DensityMatrix, qubit_label: str) -> np.ndarray:
    if rho.space.dim(qubit_label) != 2:
        raise ValueError(f"subsystem {qubit_label!r} is not a qubit")
    if len(rho.space.subsystems) == 1:
        return rho.data
    return partial_trace(rho, {qubit_label}).data


def excited_population(rho: DensityMatrix, qubit_label: str) -> float:
    """Occupation of |e> after tracing out everything else."""
    return float(np.real(_qubit_marginal(rho, qubit_label)[1, 1]))


def ground_fidelity(rho: DensityMatrix, qubit_label: str) -> float:
    """Occupation of |g> after tracing out everything else; coherences ignored."""
    return float(np.real(_qubit_marginal(rho, qubit_label)[0, 0]))


def purity(rho: DensityMatrix) -> float:
    """trace(rho^2); 1 for pure states, 1/total_dim for maximally mixed ones."""
    return float(np.real(np.vdot(rho.data, rho.data)))
