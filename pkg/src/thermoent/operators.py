"""Dense complex operator algebra on labeled tensor-product Hilbert spaces.

Subsystems are declared in a fixed order and composite indices are row-major
in that order, so every construction here is deterministic. Qubits use the
basis ordering (|g>, |e>) = (index 0, index 1) throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = -1e-8


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered collection of labeled subsystems defining a tensor-product space.

    Parameters
    ----------
    subsystems : sequence of (label, dim) pairs
        Declaration order fixes the composite (row-major) index ordering.
    """

    subsystems: tuple[tuple[str, int], ...]

    def __init__(self, subsystems):
        subsystems = tuple((str(lbl), int(d)) for lbl, d in subsystems)
        if not subsystems:
            raise ValueError("a HilbertSpace needs at least one subsystem")
        labels = [lbl for lbl, _ in subsystems]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate subsystem labels in {labels}")
        for lbl, d in subsystems:
            if d < 1:
                raise ValueError(f"subsystem {lbl!r} has non-positive dimension {d}")
        object.__setattr__(self, "subsystems", subsystems)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.subsystems)

    @property
    def total_dim(self) -> int:
        n = 1
        for _, d in self.subsystems:
            n *= d
        return n

    def axis(self, label: str) -> int:
        for i, (lbl, _) in enumerate(self.subsystems):
            if lbl == label:
                return i
        raise KeyError(f"unknown subsystem label {label!r}; have {self.labels}")

    def dim(self, label: str) -> int:
        return self.subsystems[self.axis(label)][1]

    def subspace(self, labels) -> "HilbertSpace":
        """Space of the given labels, kept in declaration order."""
        keep = set(labels)
        unknown = keep - set(self.labels)
        if unknown:
            raise KeyError(f"unknown subsystem labels {sorted(unknown)}")
        return HilbertSpace([s for s in self.subsystems if s[0] in keep])

    def __repr__(self):
        inner = ", ".join(f"{lbl}:{d}" for lbl, d in self.subsystems)
        return f"HilbertSpace({inner})"


def single_mode(dim: int, label: str = "mode") -> HilbertSpace:
    return HilbertSpace([(label, dim)])


def single_qubit(label: str = "qubit") -> HilbertSpace:
    return HilbertSpace([(label, 2)])


def _as_operator_matrix(data, total_dim: int) -> np.ndarray:
    data = np.asarray(data, dtype=complex)
    if data.shape != (total_dim, total_dim):
        raise ValueError(
            f"operator shape {data.shape} does not match space dimension {total_dim}"
        )
    data = np.ascontiguousarray(data)
    data.setflags(write=False)
    return data


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix attached to a HilbertSpace.

    The matrix is made read-only at construction; instances are safe to share
    across parallel workers.
    """

    space: HilbertSpace
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "data", _as_operator_matrix(self.data, self.space.total_dim))

    def dag(self) -> "Operator":
        return Operator(self.space, self.data.conj().T)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return bool(np.max(np.abs(self.data - self.data.conj().T)) <= tol)

    def __matmul__(self, other: "Operator") -> "Operator":
        if other.space != self.space:
            raise ValueError("operator product requires matching spaces")
        return Operator(self.space, self.data @ other.data)


@dataclass(frozen=True)
class DensityMatrix(Operator):
    """Hermitian, unit-trace, positive-semidefinite operator.

    The constructor verifies all three invariants (Hermiticity to 1e-10,
    trace to 1e-8, minimum eigenvalue above -1e-8). ``trusted`` skips the
    eigenvalue check for matrices whose positivity is guaranteed by
    construction, e.g. states produced by unitary propagation.
    """

    def __post_init__(self):
        super().__post_init__()
        self._check_basic()
        evmin = np.linalg.eigvalsh(self.data)[0]
        if evmin < POSITIVITY_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {evmin:.3e}")

    def _check_basic(self):
        herm = np.max(np.abs(self.data - self.data.conj().T))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian (max deviation {herm:.3e})")
        tr = self.data.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr:.12g} differs from 1")

    @classmethod
    def trusted(cls, space: HilbertSpace, data) -> "DensityMatrix":
        obj = object.__new__(cls)
        object.__setattr__(obj, "space", space)
        object.__setattr__(obj, "data", _as_operator_matrix(data, space.total_dim))
        obj._check_basic()
        return obj

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))


def annihilation(dim: int) -> Operator:
    """Single-mode annihilation operator: a[k-1, k] = sqrt(k)."""
    if dim < 2:
        raise ValueError(f"mode dimension must be at least 2, got {dim}")
    data = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    return Operator(single_mode(dim), data)


def creation(dim: int) -> Operator:
    return annihilation(dim).dag()


def number(dim: int) -> Operator:
    if dim < 2:
        raise ValueError(f"mode dimension must be at least 2, got {dim}")
    return Operator(single_mode(dim), np.diag(np.arange(dim, dtype=float)))


_PAULI = {
    "plus": np.array([[0, 0], [1, 0]], dtype=complex),
    "minus": np.array([[0, 1], [0, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def pauli(which: str) -> Operator:
    """Qubit operator in the (|g>, |e>) basis; sigma_plus maps |g> to |e>."""
    try:
        data = _PAULI[which]
    except KeyError:
        raise ValueError(f"unknown Pauli name {which!r}; expected one of {sorted(_PAULI)}")
    return Operator(single_qubit(), data.copy())


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.total_dim, dtype=complex))


def embed(op: Operator, space: HilbertSpace, label: str) -> Operator:
    """Extend a single-subsystem operator with identities on every other subsystem."""
    axis = space.axis(label)
    target_dim = space.subsystems[axis][1]
    if op.space.total_dim != target_dim:
        raise ValueError(
            f"operator dimension {op.space.total_dim} does not match "
            f"subsystem {label!r} of dimension {target_dim}"
        )
    out = np.ones((1, 1), dtype=complex)
    for i, (_, d) in enumerate(space.subsystems):
        factor = op.data if i == axis else np.eye(d, dtype=complex)
        out = np.kron(out, factor)
    return Operator(space, out)


def _tensor_view(data: np.ndarray, dims: tuple[int, ...]) -> np.ndarray:
    return data.reshape(dims + dims)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out all subsystems not named in ``keep``; order is preserved."""
    keep = set(keep)
    if not keep:
        raise ValueError("keep set must not be empty")
    space = rho.space
    unknown = keep - set(space.labels)
    if unknown:
        raise KeyError(f"unknown subsystem labels {sorted(unknown)}")
    dims = space.dims
    n = len(dims)
    t = _tensor_view(rho.data, dims)
    # trace highest axes first so earlier axis numbers stay valid
    traced = sorted((i for i, (lbl, _) in enumerate(space.subsystems) if lbl not in keep),
                    reverse=True)
    live = n
    for ax in traced:
        t = np.trace(t, axis1=ax, axis2=ax + live)
        live -= 1
    reduced = space.subspace(keep)
    d = reduced.total_dim
    return DensityMatrix.trusted(reduced, t.reshape(d, d))


def partial_transpose(rho: Operator, block) -> Operator:
    """Transpose the indices of the ``block`` subsystems only.

    Implemented as a pure axis permutation, so applying it twice over the
    same block returns the original matrix bitwise.
    """
    block = set(block)
    space = rho.space
    labels = set(space.labels)
    if not block or block == labels:
        raise ValueError("block must be a nonempty proper subset of the subsystem labels")
    unknown = block - labels
    if unknown:
        raise KeyError(f"unknown subsystem labels {sorted(unknown)}")
    dims = space.dims
    n = len(dims)
    perm = list(range(2 * n))
    for i, (lbl, _) in enumerate(space.subsystems):
        if lbl in block:
            perm[i], perm[i + n] = perm[i + n], perm[i]
    t = _tensor_view(rho.data, dims).transpose(perm)
    d = space.total_dim
    return Operator(space, t.reshape(d, d))


def trace_norm(m: Operator | np.ndarray) -> float:
    """Sum of singular values; Hermitian input uses its eigenvalues directly."""
    data = m.data if isinstance(m, Operator) else np.asarray(m, dtype=complex)
    if data.ndim != 2 or data.shape[0] != data.shape[1]:
        raise ValueError(f"trace norm needs a square matrix, got shape {data.shape}")
    scale = max(1.0, float(np.max(np.abs(data))))
    if np.max(np.abs(data - data.conj().T)) <= 1e-12 * scale:
        return float(np.sum(np.abs(np.linalg.eigvalsh(data))))
    return float(np.sum(np.linalg.svd(data, compute_uv=False)))
