"""Excitation-number block decomposition for fast exact propagation.

Every model Hamiltonian in this package commutes with the total excitation
count (qubit excitations plus phonon numbers), so the full space splits into
small sectors of fixed total excitation. Initial states built from diagonal
and pure factors decompose into weighted pure sources that each occupy few
sectors, and the dynamics never mixes sectors. Propagating sources sector by
sector is exact and orders of magnitude cheaper than dense evolution at the
Fock dimensions the truncation discipline demands.

The same grading structures make the entanglement measurements cheap: for
block-diagonal states the partial transpose over a two-subsystem cut is block
diagonal in the index difference, so its spectrum is assembled from many
small Hermitian blocks instead of one huge one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hamiltonians import Term
from .operators import HilbertSpace


class SectorBasis:
    """Index arithmetic of a labeled space graded by total excitation."""

    def __init__(self, space: HilbertSpace):
        self.space = space
        self.dims = space.dims
        n = space.total_dim
        strides = np.ones(len(self.dims), dtype=np.int64)
        for i in range(len(self.dims) - 2, -1, -1):
            strides[i] = strides[i + 1] * self.dims[i + 1]
        self.strides = strides
        self.multi = [arr.astype(np.int64) for arr in
                      np.unravel_index(np.arange(n), self.dims)]
        self.grade = np.sum(self.multi, axis=0)
        self.n_sectors = int(self.grade.max()) + 1
        self.sectors = [np.flatnonzero(self.grade == g) for g in range(self.n_sectors)]
        pos = np.empty(n, dtype=np.int64)
        for idx in self.sectors:
            pos[idx] = np.arange(len(idx))
        self.pos = pos

    def axis(self, label: str) -> int:
        return self.space.axis(label)


def _hop_entries(basis: SectorBasis, idx: np.ndarray, up_axis: int, down_axis: int,
                 amp: complex) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Matrix elements of (raise on up_axis) x (lower on down_axis) within a sector.

    Returns (source positions, target positions, amplitudes); ladder factors
    sqrt(n_down) and sqrt(n_up + 1) included. Transitions that would leave the
    truncated range are dropped, matching the dense truncated operators.
    """
    up = basis.multi[up_axis][idx]
    down = basis.multi[down_axis][idx]
    ok = (down >= 1) & (up <= basis.dims[up_axis] - 2)
    src = np.flatnonzero(ok)
    target = idx[src] + basis.strides[up_axis] - basis.strides[down_axis]
    values = amp * np.sqrt((up[src] + 1.0) * down[src])
    return src, basis.pos[target], values


def sector_hamiltonian(basis: SectorBasis, terms, sector: int) -> np.ndarray:
    """Dense Hamiltonian block of one excitation sector."""
    idx = basis.sectors[sector]
    s = len(idx)
    h = np.zeros((s, s), dtype=complex)
    for term in terms:
        if term.kappa == 0.0:
            continue
        amp = term.kappa * np.exp(1j * term.phase)
        if term.kind == "jc":
            # sigma+ a: raise the qubit, lower the mode
            src, tgt, val = _hop_entries(basis, idx, basis.axis(term.first),
                                         basis.axis(term.second), amp)
        elif term.kind == "bs":
            # a_i^dag a_j: raise mode i, lower mode j
            src, tgt, val = _hop_entries(basis, idx, basis.axis(term.first),
                                         basis.axis(term.second), term.kappa)
        elif term.kind == "exchange":
            src, tgt, val = _hop_entries(basis, idx, basis.axis(term.first),
                                         basis.axis(term.second), amp)
        else:
            raise ValueError(f"unknown term kind {term.kind!r}")
        h[tgt, src] += val
        h[src, tgt] += np.conj(val)
    return h


class CompiledModel:
    """Sector Hamiltonians and their eigendecompositions, built lazily."""

    def __init__(self, space: HilbertSpace, terms):
        self.basis = SectorBasis(space)
        self.terms = tuple(terms)
        self._eigs: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def eig(self, sector: int) -> tuple[np.ndarray, np.ndarray]:
        cached = self._eigs.get(sector)
        if cached is None:
            h = sector_hamiltonian(self.basis, self.terms, sector)
            cached = np.linalg.eigh(h)
            self._eigs[sector] = cached
        return cached


# ---------------------------------------------------------------------------
# initial states as weighted pure sources

@dataclass(frozen=True)
class Factor:
    """One subsystem's initial state: Fock-diagonal weights or a pure vector."""

    kind: str  # "diag" | "pure"
    values: np.ndarray

    @classmethod
    def diagonal(cls, probs) -> "Factor":
        probs = np.asarray(probs, dtype=float)
        return cls("diag", probs)

    @classmethod
    def pure(cls, amplitudes) -> "Factor":
        return cls("pure", np.asarray(amplitudes, dtype=complex))


def _factor_supports(factor: Factor):
    """(index, weight-or-amplitude) columns this factor contributes."""
    if factor.kind == "diag":
        support = np.flatnonzero(factor.values > 0.0)
        return [(int(i), float(factor.values[i]), None) for i in support]
    return [(None, 1.0, factor.values)]


class DiagonalSources:
    """Weighted basis-state sources; each lives in exactly one sector."""

    def __init__(self, basis: SectorBasis, factors: list[Factor]):
        if any(f.kind != "diag" for f in factors):
            raise ValueError("DiagonalSources needs Fock-diagonal factors only")
        combos = [np.flatnonzero(f.values > 0.0) for f in factors]
        grids = np.meshgrid(*combos, indexing="ij")
        flat = [g.ravel() for g in grids]
        composite = sum(f * s for f, s in zip(flat, basis.strides))
        weights = np.ones(len(composite))
        for f, ids in zip(factors, flat):
            weights = weights * f.values[ids]
        self.sector_rows: dict[int, np.ndarray] = {}
        self.sector_weights: dict[int, np.ndarray] = {}
        grade = basis.grade[composite]
        for g in np.unique(grade):
            mask = grade == g
            self.sector_rows[int(g)] = basis.pos[composite[mask]]
            self.sector_weights[int(g)] = weights[mask]
        self.sectors = sorted(self.sector_rows)
        self.total_weight = float(weights.sum())


class DiagonalEvolution:
    """Unitary evolution of diagonal sources, sampled per sector."""

    def __init__(self, model: CompiledModel, sources: DiagonalSources):
        self.model = model
        self.sources = sources
        self._coeffs = {}
        for g in sources.sectors:
            energies, basis_g = model.eig(g)
            rows = sources.sector_rows[g]
            # V^dag applied to basis-state columns selects conjugated rows
            self._coeffs[g] = (energies, basis_g, basis_g[rows, :].conj().T)

    def sample(self, tau: float):
        """list of (sector, weights, Psi) with Psi columns the evolved sources."""
        out = []
        for g in self.sources.sectors:
            energies, basis_g, amp = self._coeffs[g]
            psi = basis_g @ (np.exp(-1j * energies * tau)[:, None] * amp)
            out.append((g, self.sources.sector_weights[g], psi))
        return out


class PureSources:
    """Weighted pure sources that may span several sectors (coherent factors)."""

    def __init__(self, basis: SectorBasis, factors: list[Factor]):
        columns = [_factor_supports(f) for f in factors]
        self.sources = []
        self.total_weight = 0.0

        def expand(depth, weight, chosen):
            if depth == len(columns):
                self._add_source(basis, factors, weight, chosen)
                return
            for idx, w, vec in columns[depth]:
                expand(depth + 1, weight * w, chosen + [(idx, vec)])

        expand(0, 1.0, [])
        self.total_weight = float(sum(w for w, _ in self.sources))

    def _add_source(self, basis, factors, weight, chosen):
        # tensor the per-subsystem vectors over their joint support
        supports = []
        amps = []
        for (idx, vec), factor in zip(chosen, factors):
            if vec is None:
                supports.append(np.array([idx], dtype=np.int64))
                amps.append(np.ones(1, dtype=complex))
            else:
                supports.append(np.arange(len(vec), dtype=np.int64))
                amps.append(vec)
        grids = np.meshgrid(*supports, indexing="ij")
        flat = [g.ravel() for g in grids]
        composite = sum(f * s for f, s in zip(flat, basis.strides))
        amplitude = np.ones(len(composite), dtype=complex)
        for a, ids, support in zip(amps, flat, supports):
            lookup = np.empty(int(support.max()) + 1, dtype=np.int64)
            lookup[support] = np.arange(len(support))
            amplitude = amplitude * a[lookup[ids]]
        by_sector = {}
        grade = basis.grade[composite]
        for g in np.unique(grade):
            mask = grade == g
            by_sector[int(g)] = (basis.pos[composite[mask]], amplitude[mask])
        self.sources.append((float(weight), by_sector))


class PureEvolution:
    """Unitary evolution of cross-sector pure sources."""

    def __init__(self, model: CompiledModel, sources: PureSources):
        self.model = model
        self.sources = sources
        self._coeffs = []
        for weight, by_sector in sources.sources:
            per = {}
            for g, (rows, amps) in by_sector.items():
                energies, basis_g = model.eig(g)
                a0 = basis_g[rows, :].conj().T @ amps
                per[g] = (energies, basis_g, a0)
            self._coeffs.append((weight, per))

    def sample(self, tau: float):
        """list of (weight, dict sector -> component vector)."""
        out = []
        for weight, per in self._coeffs:
            comps = {}
            for g, (energies, basis_g, a0) in per.items():
                comps[g] = basis_g @ (np.exp(-1j * energies * tau) * a0)
            out.append((weight, comps))
        return out


# ---------------------------------------------------------------------------
# reductions of block-structured states

class ReductionMap:
    """Per-sector row groupings for tracing out a set of subsystems.

    Rows of a sector are grouped by the traced multi-index; within a group
    the kept flat indices identify the reduced-space components.
    """

    def __init__(self, basis: SectorBasis, keep_labels):
        self.basis = basis
        keep = list(keep_labels)
        space = basis.space
        for lbl in keep:
            space.axis(lbl)
        self.keep_axes = [i for i, (lbl, _) in enumerate(space.subsystems) if lbl in keep]
        traced_axes = [i for i in range(len(space.dims)) if i not in self.keep_axes]
        kept_dims = [space.dims[i] for i in self.keep_axes]
        self.kept_dim = int(np.prod(kept_dims)) if kept_dims else 1
        self.kept_dims = tuple(kept_dims)
        kept_strides = np.ones(len(kept_dims), dtype=np.int64)
        for i in range(len(kept_dims) - 2, -1, -1):
            kept_strides[i] = kept_strides[i + 1] * kept_dims[i + 1]
        n = space.total_dim
        kidx = np.zeros(n, dtype=np.int64)
        for ax, stride in zip(self.keep_axes, kept_strides):
            kidx += basis.multi[ax] * stride
        tidx = np.zeros(n, dtype=np.int64)
        mult = 1
        for ax in reversed(traced_axes):
            tidx += basis.multi[ax] * mult
            mult *= space.dims[ax]
        tgrade = np.zeros(n, dtype=np.int64)
        for ax in traced_axes:
            tgrade += basis.multi[ax]
        self._kidx = kidx
        self._tidx = tidx
        self._tgrade = tgrade
        self._groups: dict[int, list] = {}

    def groups(self, sector: int):
        """list of (row positions, kept flat indices, kept grade) per traced value."""
        cached = self._groups.get(sector)
        if cached is not None:
            return cached
        idx = self.basis.sectors[sector]
        kidx = self._kidx[idx]
        tidx = self._tidx[idx]
        order = np.lexsort((kidx, tidx))
        groups = []
        start = 0
        srt_t = tidx[order]
        while start < len(order):
            end = start
            while end < len(order) and srt_t[end] == srt_t[start]:
                end += 1
            rows = order[start:end]
            kept_grade = sector - int(self._tgrade[idx[rows[0]]])
            groups.append((rows, kidx[rows], kept_grade))
            start = end
        self._groups[sector] = groups
        return groups


def reduced_from_columns(rmap: ReductionMap, samples) -> np.ndarray:
    """Dense reduced density matrix from per-sector weighted columns."""
    k = rmap.kept_dim
    rho = np.zeros((k, k), dtype=complex)
    for sector, weights, psi in samples:
        for rows, kidx, _ in rmap.groups(sector):
            block = psi[rows, :]
            rho[np.ix_(kidx, kidx)] += (block * weights[None, :]) @ block.conj().T
    return rho


def reduced_from_blocks(rmap: ReductionMap, blocks: dict[int, np.ndarray]) -> np.ndarray:
    """Dense reduced density matrix from a block-diagonal state."""
    k = rmap.kept_dim
    rho = np.zeros((k, k), dtype=complex)
    for sector, block in blocks.items():
        for rows, kidx, _ in rmap.groups(sector):
            rho[np.ix_(kidx, kidx)] += block[np.ix_(rows, rows)]
    return rho


def reduced_from_pure(rmap: ReductionMap, samples) -> np.ndarray:
    """Dense reduced density matrix from cross-sector pure sources.

    Components with equal traced index interfere across sectors, so the
    kept-by-traced rectangle is assembled per source before contracting.
    """
    k = rmap.kept_dim
    rho = np.zeros((k, k), dtype=complex)
    basis = rmap.basis
    for weight, comps in samples:
        tdim = 1
        for i, d in enumerate(basis.dims):
            if i not in rmap.keep_axes:
                tdim *= d
        f = np.zeros((k, max(tdim, 1)), dtype=complex)
        for sector, vec in comps.items():
            idx = basis.sectors[sector]
            f[rmap._kidx[idx], rmap._tidx[idx]] += vec
        rho += weight * (f @ f.conj().T)
    return rho


# ---------------------------------------------------------------------------
# graded negativity: spectrum of the partial transpose from difference blocks

class GradedNegativity:
    """Logarithmic negativity across a cut of two index-graded subsystems.

    For states that are block diagonal in the total excitation, the partial
    transpose is block diagonal in the index difference a - b. Blocks are
    gathered from an accumulator Omega[N, a, a'] holding the grade-N reduced
    blocks, then diagonalized in batches.
    """

    def __init__(self, dim_a: int, dim_b: int):
        self.dim_a = dim_a
        self.dim_b = dim_b
        self.n_grades = dim_a + dim_b - 1
        self._gathers = []  # (count, size, flat index arrays)
        by_size: dict[int, list[np.ndarray]] = {}
        for k in range(-(dim_b - 1), dim_a):
            a_vals = np.arange(max(0, k), min(dim_a - 1, dim_b - 1 + k) + 1)
            if len(a_vals) == 0:
                continue
            ai = a_vals[:, None]
            aj = a_vals[None, :]
            flat = ((ai + aj - k) * dim_a + ai) * dim_a + aj
            by_size.setdefault(len(a_vals), []).append(flat)
        for size, flats in sorted(by_size.items()):
            self._gathers.append((size, np.stack(flats)))

    def new_accumulator(self) -> np.ndarray:
        return np.zeros((self.n_grades, self.dim_a, self.dim_a), dtype=complex)

    def add_column(self, omega: np.ndarray, grade: int, a_vals: np.ndarray,
                   amps: np.ndarray, weight: float):
        omega[grade][np.ix_(a_vals, a_vals)] += weight * np.outer(amps, amps.conj())

    def add_columns(self, omega: np.ndarray, grade: int, a_vals: np.ndarray,
                    amp_matrix: np.ndarray, weights: np.ndarray):
        omega[grade][np.ix_(a_vals, a_vals)] += \
            (amp_matrix * weights[None, :]) @ amp_matrix.conj().T

    def add_block(self, omega: np.ndarray, grade: int, a_vals: np.ndarray,
                  block: np.ndarray):
        omega[grade][np.ix_(a_vals, a_vals)] += block

    def trace_norm_pt(self, omega: np.ndarray) -> float:
        flat = omega.reshape(-1)
        total = 0.0
        for _, idx in self._gathers:
            blocks = flat[idx]
            evals = np.linalg.eigvalsh(blocks)
            total += float(np.sum(np.abs(evals)))
        return total

    def ln(self, omega: np.ndarray) -> float:
        value = float(np.log2(self.trace_norm_pt(omega)))
        if value < 0.0:
            if value < -1e-10:
                raise ArithmeticError(
                    f"partial-transpose trace norm fell below 1 by {-value:.3e}"
                )
            return 0.0
        return value


def _balanced_splitter_generator(sector: int) -> np.ndarray:
    """pi/4 (c^dag a - c a^dag) restricted to the joint excitation sector,
    in the basis indexed by the primary mode's occupation k = 0..sector."""
    n = sector
    gen = np.zeros((n + 1, n + 1))
    for k in range(1, n + 1):
        # c^dag a: |k, n-k> -> sqrt(k (n-k+1)) |k-1, n-k+1>
        gen[k - 1, k] += math.sqrt(k * (n - k + 1))
    gen = (np.pi / 4.0) * (gen - gen.T)
    return gen


def balanced_splitter_columns(dim: int) -> list[np.ndarray]:
    """For each n < dim: the two-mode sector vector U^dag |n, 0> of the
    balanced splitter, indexed by the primary mode's occupation."""
    cols = []
    for n in range(dim):
        gen = _balanced_splitter_generator(n)
        energies, basis = np.linalg.eigh(1j * gen)
        u = basis @ (np.exp(-1j * energies)[:, None] * basis.conj().T)
        cols.append(u.conj().T[:, n].copy())
    return cols


def potential_from_occupations(probs: np.ndarray,
                               splitter_cols: list[np.ndarray],
                               graded: GradedNegativity) -> float:
    """Entanglement potential of a Fock-diagonal single-mode state."""
    omega = graded.new_accumulator()
    for n, p in enumerate(probs):
        if p <= 0.0:
            continue
        u = splitter_cols[n]
        a_vals = np.arange(n + 1)
        graded.add_column(omega, n, a_vals, u, float(p))
    return graded.ln(omega)


# ---------------------------------------------------------------------------
# block-diagonal Lindblad integration

_JUMP_SHIFTS = {"lower": -1, "raise": +1, "diag": 0}


@dataclass(frozen=True)
class SectorJump:
    """A jump operator acting as a fixed shift on the excitation grading."""

    shift: int
    blocks: dict  # sector -> matrix mapping sector to sector+shift


def _jump_blocks(basis: SectorBasis, axis: int, action: str, scale: float,
                 sectors) -> SectorJump:
    """Build sector blocks of a local ladder/diagonal jump on one subsystem."""
    blocks = {}
    for g in sectors:
        idx = basis.sectors[g]
        s = len(idx)
        vals = basis.multi[axis][idx]
        if action == "diag_z":
            diag = np.where(vals == 1, 1.0, -1.0) * scale
            blocks[g] = np.diag(diag.astype(complex))
            continue
        if action == "lower":
            ok = vals >= 1
            src = np.flatnonzero(ok)
            target = idx[src] - basis.strides[axis]
            amp = scale * np.sqrt(vals[src].astype(float))
            tsec = g - 1
        else:  # raise
            ok = vals <= basis.dims[axis] - 2
            src = np.flatnonzero(ok)
            target = idx[src] + basis.strides[axis]
            amp = scale * np.sqrt(vals[src] + 1.0)
            tsec = g + 1
        if tsec < 0 or tsec >= basis.n_sectors:
            continue
        tdim = len(basis.sectors[tsec])
        block = np.zeros((tdim, s), dtype=complex)
        block[basis.pos[target], src] = amp
        blocks[g] = block
    shift = 0 if action == "diag_z" else (-1 if action == "lower" else 1)
    return SectorJump(shift, blocks)


def sector_jumps_from_bath(basis: SectorBasis, bath, sectors) -> list[SectorJump]:
    """Sector-blocked jump operators mirroring dynamics.lindblad_jumps."""
    jumps = []
    for ch in bath.channels:
        if ch.rate == 0.0:
            continue
        ax = basis.axis(ch.target)
        if ch.kind == "qubit_dephasing":
            if basis.dims[ax] != 2:
                raise ValueError(f"dephasing target {ch.target!r} is not a qubit")
            jumps.append(_jump_blocks(basis, ax, "diag_z", math.sqrt(ch.rate), sectors))
        elif ch.kind == "qubit_relaxation":
            if basis.dims[ax] != 2:
                raise ValueError(f"relaxation target {ch.target!r} is not a qubit")
            jumps.append(_jump_blocks(basis, ax, "lower",
                                      math.sqrt(ch.rate * (1 + ch.nbar_th)), sectors))
            if ch.nbar_th > 0:
                jumps.append(_jump_blocks(basis, ax, "raise",
                                          math.sqrt(ch.rate * ch.nbar_th), sectors))
        else:  # mode_damping
            jumps.append(_jump_blocks(basis, ax, "lower",
                                      math.sqrt(ch.rate * (1 + ch.nbar_th)), sectors))
            if ch.nbar_th > 0:
                jumps.append(_jump_blocks(basis, ax, "raise",
                                          math.sqrt(ch.rate * ch.nbar_th), sectors))
    return jumps


class BlockLindblad:
    """RK4 integration of the master equation on a block-diagonal state."""

    def __init__(self, model: CompiledModel, bath, sources: DiagonalSources):
        self.model = model
        basis = model.basis
        self.basis = basis
        self.all_sectors = list(range(basis.n_sectors))
        self.jumps = sector_jumps_from_bath(basis, bath, self.all_sectors)
        self.hams = {g: sector_hamiltonian(basis, model.terms, g)
                     for g in self.all_sectors}
        # drift = -iH - 1/2 sum J^dag J per sector
        self.drift = {}
        for g in self.all_sectors:
            d = -1j * self.hams[g]
            for jump in self.jumps:
                block = jump.blocks.get(g)
                if block is not None:
                    d = d - 0.5 * (block.conj().T @ block)
            self.drift[g] = d
        self.rho0 = {}
        for g in sources.sectors:
            s = len(basis.sectors[g])
            block = np.zeros((s, s), dtype=complex)
            rows = sources.sector_rows[g]
            block[rows, rows] = sources.sector_weights[g]
            self.rho0[g] = block

    def _rhs(self, blocks):
        out = {}
        for g, rho in blocks.items():
            a = self.drift[g] @ rho
            out[g] = a + a.conj().T
        for jump in self.jumps:
            for g, rho in blocks.items():
                block = jump.blocks.get(g)
                if block is None:
                    continue
                tsec = g + jump.shift
                feed = block @ rho @ block.conj().T
                if tsec in out:
                    out[tsec] = out[tsec] + feed
                else:
                    out[tsec] = feed
        return out

    def integrate(self, times: np.ndarray, step: float, trace_tol: float,
                  on_sample):
        """Fixed-step RK4 streaming each sampled block state to on_sample."""
        blocks = {g: b.copy() for g, b in self.rho0.items()}
        on_sample(0, blocks)
        t0 = times[0]
        for k in range(1, len(times)):
            span = times[k] - times[k - 1]
            nsub = max(1, int(math.ceil(span / step - 1e-12)))
            h = span / nsub
            for _ in range(nsub):
                k1 = self._rhs(blocks)
                k2 = self._rhs(_axpy(blocks, k1, 0.5 * h))
                k3 = self._rhs(_axpy(blocks, k2, 0.5 * h))
                k4 = self._rhs(_axpy(blocks, k3, h))
                new = {}
                for g in set(blocks) | set(k1) | set(k2) | set(k3) | set(k4):
                    acc = blocks.get(g, 0)
                    upd = (h / 6.0) * (_get(k1, g) + 2 * _get(k2, g)
                                       + 2 * _get(k3, g) + _get(k4, g))
                    val = acc + upd if isinstance(acc, np.ndarray) else upd
                    new[g] = 0.5 * (val + val.conj().T)
                blocks = new
            tr = sum(float(np.real(np.trace(b))) for b in blocks.values())
            budget = trace_tol * max(1.0, times[k] - t0)
            if abs(tr - 1.0) > budget:
                from .dynamics import TraceDriftError
                raise TraceDriftError(
                    f"trace drift {abs(tr - 1.0):.3e} at tau={times[k]:.6g} "
                    f"exceeds budget {budget:.3e}"
                )
            blocks = {g: b / tr for g, b in blocks.items()}
            on_sample(k, blocks)


def _axpy(blocks, deriv, factor):
    out = {}
    for g in set(blocks) | set(deriv):
        base = blocks.get(g)
        d = deriv.get(g)
        if base is None:
            out[g] = factor * d
        elif d is None:
            out[g] = base
        else:
            out[g] = base + factor * d
    return out


def _get(deriv, g):
    val = deriv.get(g)
    return val if val is not None else 0.0
