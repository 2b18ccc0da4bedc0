"""Initial-state constructors: thermal, Fock, coherent and phase-averaged states.

Truncated states are renormalized to unit trace, and construction refuses to
proceed when the dropped occupation tail exceeds the tolerance (default 1e-6),
so downstream accuracy is never silently degraded by too small a Fock space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import DensityMatrix, HilbertSpace, single_mode, single_qubit

# exact SI values (2019 redefinition); k_B and h are defined constants
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23      # J / K

DEFAULT_TAIL_TOL = 1e-6


class TruncationError(ValueError):
    """Raised when a Fock-space cutoff would drop more tail weight than allowed."""


def nbar_from_temperature(temperature: float, omega: float) -> float:
    """Bose-Einstein mean occupation 1 / (exp(hbar*omega / kB*T) - 1)."""
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if omega <= 0:
        raise ValueError(f"frequency must be positive, got {omega}")
    x = HBAR * omega / (K_B * temperature)
    return 1.0 / np.expm1(x)


def pe_from_temperature(temperature: float, omega_int: float) -> float:
    """Excited-state occupation of a two-level system in thermal equilibrium.

    Always below 1/2 for finite temperature.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if omega_int <= 0:
        raise ValueError(f"frequency must be positive, got {omega_int}")
    x = HBAR * omega_int / (K_B * temperature)
    return 1.0 / (np.exp(x) + 1.0)


@dataclass(frozen=True)
class ThermalSpec:
    """Mean occupation of an oscillator, given directly or via (T, omega)."""

    nbar: float | None = None
    temperature: float | None = None
    frequency: float | None = None

    def __post_init__(self):
        direct = self.nbar is not None
        thermo = self.temperature is not None or self.frequency is not None
        if direct == thermo:
            raise ValueError("give either nbar or (temperature, frequency), not both")
        if thermo and (self.temperature is None or self.frequency is None):
            raise ValueError("temperature and frequency must be given together")
        if direct and self.nbar < 0:
            raise ValueError(f"nbar must be nonnegative, got {self.nbar}")

    def resolve(self) -> float:
        if self.nbar is not None:
            return float(self.nbar)
        return float(nbar_from_temperature(self.temperature, self.frequency))


@dataclass(frozen=True)
class QubitThermalSpec:
    """Excited-state probability of a qubit, direct or via (T, omega)."""

    pe: float | None = None
    temperature: float | None = None
    frequency: float | None = None

    def __post_init__(self):
        direct = self.pe is not None
        thermo = self.temperature is not None or self.frequency is not None
        if direct == thermo:
            raise ValueError("give either pe or (temperature, frequency), not both")
        if thermo and (self.temperature is None or self.frequency is None):
            raise ValueError("temperature and frequency must be given together")
        if direct and not 0.0 <= self.pe <= 1.0:
            raise ValueError(f"pe must lie in [0, 1], got {self.pe}")

    def resolve(self) -> float:
        if self.pe is not None:
            return float(self.pe)
        return float(pe_from_temperature(self.temperature, self.frequency))


def thermal_weights(nbar: float, dim: int, tail_tol: float = DEFAULT_TAIL_TOL) -> np.ndarray:
    """Renormalized Boltzmann weights p_n = nbar^n / (1+nbar)^(n+1) on n < dim."""
    if dim < 2:
        raise ValueError(f"mode dimension must be at least 2, got {dim}")
    if nbar < 0:
        raise ValueError(f"nbar must be nonnegative, got {nbar}")
    if nbar == 0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    q = nbar / (1.0 + nbar)
    tail = q**dim  # exact geometric tail mass
    if tail >= tail_tol:
        raise TruncationError(
            f"thermal tail {tail:.3e} at dim={dim}, nbar={nbar} exceeds tolerance "
            f"{tail_tol:.1e}; increase the dimension (see choose_dimension)"
        )
    p = (1.0 - q) * q ** np.arange(dim)
    return p / p.sum()


def thermal_oscillator(nbar: float, dim: int, label: str = "mode",
                       tail_tol: float = DEFAULT_TAIL_TOL) -> DensityMatrix:
    """Truncated thermal state of a single mode with mean occupation nbar."""
    p = thermal_weights(nbar, dim, tail_tol)
    return DensityMatrix.trusted(single_mode(dim, label), np.diag(p).astype(complex))


def thermal_qubit(pe: float, label: str = "qubit") -> DensityMatrix:
    """Qubit populations diag(1-pe, pe) in the (|g>, |e>) ordering."""
    if not 0.0 <= pe <= 1.0:
        raise ValueError(f"pe must lie in [0, 1], got {pe}")
    return DensityMatrix.trusted(single_qubit(label),
                                 np.diag([1.0 - pe, pe]).astype(complex))


def coherent_amplitudes(alpha: complex, dim: int,
                        tail_tol: float = DEFAULT_TAIL_TOL) -> np.ndarray:
    """Renormalized Fock amplitudes c_n = exp(-|a|^2/2) a^n / sqrt(n!)."""
    if dim < 2:
        raise ValueError(f"mode dimension must be at least 2, got {dim}")
    alpha = complex(alpha)
    c = np.empty(dim, dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / np.sqrt(n)
    norm2 = float(np.sum(np.abs(c) ** 2))
    tail = 1.0 - norm2
    if tail >= tail_tol:
        raise TruncationError(
            f"coherent-state tail {tail:.3e} at dim={dim}, |alpha|^2={abs(alpha)**2:.3g} "
            f"exceeds tolerance {tail_tol:.1e}"
        )
    return c / np.sqrt(norm2)


def coherent_state(alpha: complex, dim: int, label: str = "mode",
                   tail_tol: float = DEFAULT_TAIL_TOL) -> DensityMatrix:
    """Pure coherent state |alpha><alpha| on a truncated mode."""
    c = coherent_amplitudes(alpha, dim, tail_tol)
    return DensityMatrix.trusted(single_mode(dim, label), np.outer(c, c.conj()))


def poisson_weights(alpha_abs: float, dim: int,
                    tail_tol: float = DEFAULT_TAIL_TOL) -> np.ndarray:
    """Renormalized Poisson weights with mean |alpha|^2 on n < dim."""
    if dim < 2:
        raise ValueError(f"mode dimension must be at least 2, got {dim}")
    if alpha_abs < 0:
        raise ValueError(f"|alpha| must be nonnegative, got {alpha_abs}")
    mean = alpha_abs**2
    p = np.empty(dim)
    p[0] = np.exp(-mean)
    for n in range(1, dim):
        p[n] = p[n - 1] * mean / n
    tail = 1.0 - float(p.sum())
    if tail >= tail_tol:
        raise TruncationError(
            f"Poisson tail {tail:.3e} at dim={dim}, mean={mean:.3g} exceeds "
            f"tolerance {tail_tol:.1e}"
        )
    return p / p.sum()


def phase_randomized_coherent(alpha_abs: float, dim: int, label: str = "mode",
                              tail_tol: float = DEFAULT_TAIL_TOL) -> DensityMatrix:
    """Phase-averaged coherent state: Poisson-diagonal mixture over Fock states."""
    p = poisson_weights(alpha_abs, dim, tail_tol)
    return DensityMatrix.trusted(single_mode(dim, label), np.diag(p).astype(complex))


def fock_state(n: int, dim: int, label: str = "mode") -> DensityMatrix:
    """Number-state projector |n><n|."""
    if dim < 2:
        raise ValueError(f"mode dimension must be at least 2, got {dim}")
    if not 0 <= n < dim:
        raise ValueError(f"Fock index {n} outside truncated range [0, {dim})")
    data = np.zeros((dim, dim), dtype=complex)
    data[n, n] = 1.0
    return DensityMatrix.trusted(single_mode(dim, label), data)


def compose(parts) -> DensityMatrix:
    """Tensor product of density matrices in declaration order."""
    parts = list(parts)
    if not parts:
        raise ValueError("compose needs at least one state")
    subsystems = []
    for part in parts:
        subsystems.extend(part.space.subsystems)
    space = HilbertSpace(subsystems)  # raises on label collision
    data = np.ones((1, 1), dtype=complex)
    for part in parts:
        data = np.kron(data, part.data)
    return DensityMatrix.trusted(space, data)
