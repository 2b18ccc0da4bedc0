"""Unitary and Lindblad propagation of density matrices, plus truncation sizing.

Unitary runs use a single Hermitian eigendecomposition of H, reused for every
sample time. Open-system runs integrate the Lindblad master equation with
fixed-step fourth-order Runge-Kutta; the step is accepted only once halving
it moves every sampled matrix element by less than the convergence tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import (HERMITICITY_TOL, DensityMatrix, HilbertSpace, Operator,
                        annihilation, creation, embed, pauli)

TRACE_DRIFT_TOL = 1e-9
STEP_CONVERGENCE_TOL = 1e-7
DEFAULT_GUARD_LEVELS = 4


class ConvergenceError(RuntimeError):
    """Step-size refinement failed to reach the requested accuracy."""


class TraceDriftError(RuntimeError):
    """Propagated state lost more trace than the drift budget allows."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sample times in scaled units tau."""

    end: float
    samples: int
    start: float = 0.0

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError(f"need at least 2 samples, got {self.samples}")
        if not self.end > self.start:
            raise ValueError(f"grid end {self.end} must exceed start {self.start}")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.start, self.end, self.samples)


BATH_KINDS = ("qubit_dephasing", "qubit_relaxation", "mode_damping")


@dataclass(frozen=True)
class BathChannel:
    kind: str
    target: str
    rate: float
    nbar_th: float = 0.0

    def __post_init__(self):
        if self.kind not in BATH_KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}; expected {BATH_KINDS}")
        if self.rate < 0:
            raise ValueError(f"rate must be nonnegative, got {self.rate}")
        if self.nbar_th < 0:
            raise ValueError(f"bath occupancy must be nonnegative, got {self.nbar_th}")


@dataclass(frozen=True)
class BathSpec:
    channels: tuple[BathChannel, ...]

    def __init__(self, channels):
        object.__setattr__(self, "channels", tuple(channels))


def choose_dimension(nbar_max: float, epsilon: float = 1e-6,
                     guard: int = DEFAULT_GUARD_LEVELS) -> int:
    """Smallest Fock dimension whose Boltzmann tail is below epsilon, plus guard levels.

    The guard absorbs occupation pushed above the initial support by bath
    heating or coherent-state tails during the simulated horizon.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if nbar_max < 0:
        raise ValueError(f"nbar must be nonnegative, got {nbar_max}")
    if nbar_max == 0:
        return 2 + guard
    q = nbar_max / (1.0 + nbar_max)
    # tail mass above dim d is q**d; smallest d with q**d < epsilon
    d = int(math.ceil(math.log(epsilon) / math.log(q)))
    while q**d >= epsilon:  # guard against rounding at the boundary
        d += 1
    return max(d, 2) + guard


def lindblad_jumps(bath: BathSpec, space: HilbertSpace) -> list[Operator]:
    """Jump operators for the given channels, embedded in the full space.

    Thermal channels emit a lowering/raising pair with rates scaled by
    (1 + nbar_th) and nbar_th; zero-occupancy channels emit only the
    lowering member. Zero-rate channels contribute nothing.
    """
    ops: list[Operator] = []
    for ch in bath.channels:
        if ch.rate == 0.0:
            continue
        if ch.kind == "qubit_dephasing":
            if space.dim(ch.target) != 2:
                raise ValueError(f"dephasing target {ch.target!r} is not a qubit")
            base = pauli("z")
            ops.append(_scaled(base, space, ch.target, ch.rate))
        elif ch.kind == "qubit_relaxation":
            if space.dim(ch.target) != 2:
                raise ValueError(f"relaxation target {ch.target!r} is not a qubit")
            ops.append(_scaled(pauli("minus"), space, ch.target, ch.rate * (1.0 + ch.nbar_th)))
            if ch.nbar_th > 0:
                ops.append(_scaled(pauli("plus"), space, ch.target, ch.rate * ch.nbar_th))
        else:  # mode_damping
            d = space.dim(ch.target)
            ops.append(_scaled(annihilation(d), space, ch.target, ch.rate * (1.0 + ch.nbar_th)))
            if ch.nbar_th > 0:
                ops.append(_scaled(creation(d), space, ch.target, ch.rate * ch.nbar_th))
    return ops


def _scaled(op: Operator, space: HilbertSpace, label: str, rate: float) -> Operator:
    emb = embed(op, space, label)
    return Operator(space, np.sqrt(rate) * emb.data)


def _require_hermitian(h: Operator):
    dev = np.max(np.abs(h.data - h.data.conj().T))
    if dev > HERMITICITY_TOL:
        raise ValueError(f"Hamiltonian is not Hermitian (max deviation {dev:.3e})")


class UnitaryTrajectory:
    """Lazy time series of density matrices under rho(t) = U rho0 U^dag.

    States are reconstructed on demand from one cached eigendecomposition,
    so indexing is cheap in memory even for long grids.
    """

    def __init__(self, h: Operator, rho0: DensityMatrix, grid: TimeGrid):
        if h.space != rho0.space:
            raise ValueError("Hamiltonian and state live on different spaces")
        _require_hermitian(h)
        self.space = rho0.space
        self.grid = grid
        self.times = grid.times
        self._energies, self._basis = np.linalg.eigh(h.data)
        self._rho_eig = self._basis.conj().T @ rho0.data @ self._basis

    def __len__(self) -> int:
        return len(self.times)

    def state(self, tau: float) -> DensityMatrix:
        phase = np.exp(-1j * self._energies * tau)
        core = phase[:, None] * self._rho_eig * phase.conj()[None, :]
        data = self._basis @ core @ self._basis.conj().T
        return DensityMatrix.trusted(self.space, data)

    def __getitem__(self, i: int) -> DensityMatrix:
        return self.state(self.times[i])

    def __iter__(self):
        for t in self.times:
            yield self.state(t)

    def observe(self, observables: dict) -> dict[str, np.ndarray]:
        """Evaluate named callables on every sampled state."""
        out = {name: np.empty(len(self.times)) for name in observables}
        for i, t in enumerate(self.times):
            rho = self.state(t)
            for name, fn in observables.items():
                out[name][i] = fn(rho)
        return out


def evolve_unitary(h: Operator, rho0: DensityMatrix, grid: TimeGrid) -> UnitaryTrajectory:
    """Closed-system evolution sampled on the grid."""
    return UnitaryTrajectory(h, rho0, grid)


@dataclass(frozen=True)
class StepControl:
    """Fixed-step RK4 refinement policy for the master equation."""

    initial_step: float = 0.02
    tolerance: float = STEP_CONVERGENCE_TOL
    max_refinements: int = 10
    trace_tol: float = TRACE_DRIFT_TOL


class LindbladTrajectory:
    """Materialized time series of density matrices from an RK4 integration."""

    def __init__(self, space: HilbertSpace, times: np.ndarray,
                 states: list[np.ndarray], step: float):
        self.space = space
        self.times = times
        self.step = step
        self._states = states

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, i: int) -> DensityMatrix:
        return DensityMatrix.trusted(self.space, self._states[i])

    def __iter__(self):
        for i in range(len(self.times)):
            yield self[i]

    def observe(self, observables: dict) -> dict[str, np.ndarray]:
        out = {name: np.empty(len(self.times)) for name in observables}
        for i in range(len(self.times)):
            rho = self[i]
            for name, fn in observables.items():
                out[name][i] = fn(rho)
        return out


def _lindblad_rhs(rho, drift, jumps):
    a = drift @ rho
    out = a + a.conj().T
    for l in jumps:
        out += l @ rho @ l.conj().T
    return out


def _integrate_samples(h, jumps, rho0, times, step, trace_tol):
    """RK4 from sample to sample with an integer number of substeps per gap."""
    drift = -1j * h.copy()
    for l in jumps:
        drift -= 0.5 * (l.conj().T @ l)
    rho = rho0.copy()
    states = [rho.copy()]
    t0 = times[0]
    for k in range(1, len(times)):
        span = times[k] - times[k - 1]
        nsub = max(1, int(math.ceil(span / step - 1e-12)))
        hsub = span / nsub
        for _ in range(nsub):
            k1 = _lindblad_rhs(rho, drift, jumps)
            k2 = _lindblad_rhs(rho + 0.5 * hsub * k1, drift, jumps)
            k3 = _lindblad_rhs(rho + 0.5 * hsub * k2, drift, jumps)
            k4 = _lindblad_rhs(rho + hsub * k3, drift, jumps)
            rho = rho + (hsub / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            rho = 0.5 * (rho + rho.conj().T)
        tr = float(np.real(np.trace(rho)))
        budget = trace_tol * max(1.0, times[k] - t0)
        if abs(tr - 1.0) > budget:
            raise TraceDriftError(
                f"trace drift {abs(tr - 1.0):.3e} at tau={times[k]:.6g} exceeds "
                f"budget {budget:.3e}; the step size is too coarse for this generator"
            )
        rho = rho / tr
        states.append(rho.copy())
    return states


def evolve_lindblad(h: Operator, jumps, rho0: DensityMatrix, grid: TimeGrid,
                    control: StepControl = StepControl()) -> LindbladTrajectory:
    """Open-system evolution sampled on the grid.

    The integration is repeated with halved steps until the sampled states
    from consecutive refinements agree elementwise within the control
    tolerance; the refined result is returned.
    """
    space = rho0.space
    _require_hermitian(h)
    jump_data = []
    for j in jumps:
        if j.space != space:
            raise ValueError("jump operators must share the state's space")
        jump_data.append(j.data)
    times = grid.times
    step = min(control.initial_step, float(np.min(np.diff(times))))
    previous = _integrate_samples(h.data, jump_data, rho0.data, times, step,
                                  control.trace_tol)
    for _ in range(control.max_refinements):
        step /= 2.0
        refined = _integrate_samples(h.data, jump_data, rho0.data, times, step,
                                     control.trace_tol)
        delta = max(float(np.max(np.abs(a - b))) for a, b in zip(previous, refined))
        if delta < control.tolerance:
            return LindbladTrajectory(space, times, refined, step)
        previous = refined
    raise ConvergenceError(
        f"step refinement did not converge below {control.tolerance:.1e} "
        f"after {control.max_refinements} halvings (last step {step:.3e})"
    )
