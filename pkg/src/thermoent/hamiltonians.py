"""Interaction Hamiltonians for qubit-coupled vibrational modes.

Two ingredients appear in every model: the excitation-exchanging qubit-mode
coupling kappa*(sigma+ a e^{i phi} + h.c.) obtained on the red sideband, and
the phonon-hopping mode-mode coupling kappa*(a_i^dag a_j + h.c.) mediated by
the Coulomb interaction. Dynamics is run in dimensionless form: the
normalizing qubit-mode rate is 1 and time is the scaled variable tau.

The trap-parameter helpers convert physical SI quantities into those rates;
they apply the Coulomb constant explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import HilbertSpace, Operator, annihilation, embed, identity, pauli

COULOMB_CONSTANT = 8.9875517923e9  # 1 / (4 pi eps_0), N m^2 / C^2


@dataclass(frozen=True)
class PhysicalTrapParams:
    """SI parameters of a two-ion linear trap with sideband laser drive.

    The chain-alignment condition omega_z < omega_x is enforced; the laser
    detuning is fixed at the first red motional sideband.
    """

    mass: float              # kg
    charge: float            # C
    omega_x: float           # rad/s, radial secular frequency
    omega_z: float           # rad/s, axial secular frequency
    rabi_frequency: float    # rad/s
    lamb_dicke: float        # dimensionless
    laser_phase: float = 0.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.charge == 0:
            raise ValueError("charge must be nonzero")
        if self.omega_x <= 0 or self.omega_z <= 0:
            raise ValueError("trap frequencies must be positive")
        if not self.omega_z < self.omega_x:
            raise ValueError(
                f"chain alignment requires omega_z < omega_x "
                f"(got {self.omega_z:.4g} >= {self.omega_x:.4g})"
            )
        if self.lamb_dicke <= 0:
            raise ValueError(f"Lamb-Dicke parameter must be positive, got {self.lamb_dicke}")
        if self.rabi_frequency <= 0:
            raise ValueError(f"Rabi frequency must be positive, got {self.rabi_frequency}")


def equilibrium_separation(params: PhysicalTrapParams) -> float:
    """Distance between the two axial equilibrium positions, in meters.

    Each ion sits at +/- (k e^2 / (4 m omega_z^2))^(1/3) along the trap axis,
    with k the Coulomb constant.
    """
    e2 = COULOMB_CONSTANT * params.charge**2
    return 2.0 * (e2 / (4.0 * params.mass * params.omega_z**2)) ** (1.0 / 3.0)


def coulomb_bs_rate(params: PhysicalTrapParams) -> float:
    """Magnitude of the phonon-hopping rate between the radial modes, rad/s.

    Equals k e^2 / (2 m omega_x d^3) with d the equilibrium separation; the
    overall sign is a mode phase and is absorbed into the Hamiltonian.
    """
    d = equilibrium_separation(params)
    e2 = COULOMB_CONSTANT * params.charge**2
    return e2 / (2.0 * params.mass * params.omega_x * d**3)


def sideband_jc_rate(params: PhysicalTrapParams) -> float:
    """Qubit-mode coupling rate on the red sideband: Rabi frequency times Lamb-Dicke."""
    return params.rabi_frequency * params.lamb_dicke


def coupling_ratio(params: PhysicalTrapParams) -> float:
    """Hopping rate over qubit-mode rate; the dimensionless knob of the side models."""
    return coulomb_bs_rate(params) / sideband_jc_rate(params)


def jc_term(space: HilbertSpace, qubit_label: str, mode_label: str,
            kappa: float, phase: float = 0.0) -> Operator:
    """kappa * (sigma+ a e^{i phase} + sigma- a^dag e^{-i phase}), embedded in space."""
    if space.dim(qubit_label) != 2:
        raise ValueError(f"subsystem {qubit_label!r} is not a qubit")
    sp = embed(pauli("plus"), space, qubit_label)
    a = embed(annihilation(space.dim(mode_label)), space, mode_label)
    half = kappa * np.exp(1j * phase) * (sp.data @ a.data)
    return Operator(space, half + half.conj().T)


def bs_term(space: HilbertSpace, mode_i: str, mode_j: str, kappa: float) -> Operator:
    """kappa * (a_i^dag a_j + a_i a_j^dag), embedded in space."""
    if mode_i == mode_j:
        raise ValueError("hopping needs two distinct modes")
    ai = embed(annihilation(space.dim(mode_i)), space, mode_i)
    aj = embed(annihilation(space.dim(mode_j)), space, mode_j)
    half = kappa * (ai.data.conj().T @ aj.data)
    return Operator(space, half + half.conj().T)


def exchange_term(space: HilbertSpace, qubit_a: str, qubit_b: str,
                  kappa: float, phase: float = 0.0) -> Operator:
    """kappa * (sigma+_a sigma-_b e^{i phase} + h.c.), embedded in space."""
    for lbl in (qubit_a, qubit_b):
        if space.dim(lbl) != 2:
            raise ValueError(f"subsystem {lbl!r} is not a qubit")
    if qubit_a == qubit_b:
        raise ValueError("exchange needs two distinct qubits")
    pa = embed(pauli("plus"), space, qubit_a)
    mb = embed(pauli("minus"), space, qubit_b)
    half = kappa * np.exp(1j * phase) * (pa.data @ mb.data)
    return Operator(space, half + half.conj().T)


def total_excitation(space: HilbertSpace) -> Operator:
    """Sum of number operators and qubit projectors |e><e|; conserved by all models."""
    out = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    for lbl, d in space.subsystems:
        if d == 2:
            op = Operator(HilbertSpace([(lbl, 2)]), np.diag([0.0, 1.0]).astype(complex))
        else:
            op = Operator(HilbertSpace([(lbl, d)]), np.diag(np.arange(d, dtype=float)))
        out += embed(op, space, lbl).data
    return Operator(space, out)


@dataclass(frozen=True)
class Term:
    """One interaction term: kind in {jc, bs, exchange}, its subsystems and coupling."""

    kind: str
    first: str
    second: str
    kappa: float
    phase: float = 0.0

    @property
    def name(self) -> str:
        return f"{self.kind}:{self.first}:{self.second}"


MODEL_NAMES = ("1S", "1M", "2S", "2M", "1S1S", "3Q")

# ratio keys each model requires; the normalizing coupling is always 1
_MODEL_RATIOS = {
    "1S": ("r_1S",),
    "1M": ("r_1M",),
    "2S": ("r_2S_BS", "r_2S_b"),
    "2M": ("r_2M_b1", "r_2M_b2", "r_2M_a2"),
    "1S1S": ("r_1S1S_BS", "r_1S1S_b2"),
    "3Q": ("r_3Q",),
}


@dataclass(frozen=True)
class ModelConfig:
    """Choice of interaction layout plus its dimensionless coupling ratios.

    base_coupling sets the physical scale of the normalizing rate (rad/s) and
    only matters when converting scaled time back to seconds; the generated
    Hamiltonians always use the dimensionless convention kappa_norm = 1.
    """

    model: str
    ratios: dict = field(default_factory=dict)
    phases: dict = field(default_factory=dict)
    mode_dims: dict = field(default_factory=dict)
    base_coupling: float = 1.0

    def __post_init__(self):
        if self.model not in MODEL_NAMES:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODEL_NAMES}")
        required = set(_MODEL_RATIOS[self.model])
        given = set(self.ratios)
        missing = required - given
        if missing:
            raise ValueError(f"model {self.model} needs ratios {sorted(missing)}")
        extra = given - required
        if extra:
            raise ValueError(f"model {self.model} does not use ratios {sorted(extra)}")
        for key, val in self.ratios.items():
            if val < 0:
                raise ValueError(f"ratio {key} must be nonnegative, got {val}")
        if self.base_coupling <= 0:
            raise ValueError(f"base_coupling must be positive, got {self.base_coupling}")
        for lbl, d in self.mode_dims.items():
            if int(d) < 2:
                raise ValueError(f"mode {lbl!r} dimension must be at least 2, got {d}")

    def labels(self) -> tuple[str, ...]:
        return model_labels(self.model)


def model_labels(model: str) -> tuple[str, ...]:
    if model in ("1S", "1M"):
        return ("q", "m1", "m2")
    if model in ("2S", "2M", "1S1S"):
        return ("qa", "qb", "m1", "m2")
    if model == "3Q":
        return ("q1", "q2", "q3")
    raise ValueError(f"unknown model {model!r}")


def mode_labels(model: str) -> tuple[str, ...]:
    return tuple(lbl for lbl in model_labels(model) if lbl.startswith("m"))


def qubit_labels(model: str) -> tuple[str, ...]:
    return tuple(lbl for lbl in model_labels(model) if lbl.startswith("q"))


def model_space(config: ModelConfig) -> HilbertSpace:
    subsystems = []
    for lbl in model_labels(config.model):
        if lbl.startswith("q"):
            subsystems.append((lbl, 2))
        else:
            try:
                subsystems.append((lbl, int(config.mode_dims[lbl])))
            except KeyError:
                raise ValueError(f"mode_dims is missing an entry for {lbl!r}")
    return HilbertSpace(subsystems)


def model_terms(config: ModelConfig) -> list[Term]:
    """Interaction terms of the chosen model in the kappa_norm = 1 convention."""
    r = config.ratios
    ph = dict(config.phases)

    def phase(name):
        return float(ph.pop(name, 0.0))

    m = config.model
    if m == "1S":
        terms = [Term("jc", "q", "m1", 1.0, phase("jc:q:m1")),
                 Term("bs", "m1", "m2", r["r_1S"])]
    elif m == "1M":
        terms = [Term("jc", "q", "m1", 1.0, phase("jc:q:m1")),
                 Term("jc", "q", "m2", r["r_1M"], phase("jc:q:m2"))]
    elif m == "2S":
        terms = [Term("jc", "qa", "m1", 1.0, phase("jc:qa:m1")),
                 Term("jc", "qb", "m1", r["r_2S_b"], phase("jc:qb:m1")),
                 Term("bs", "m1", "m2", r["r_2S_BS"])]
    elif m == "2M":
        terms = [Term("jc", "qa", "m1", 1.0, phase("jc:qa:m1")),
                 Term("jc", "qa", "m2", r["r_2M_a2"], phase("jc:qa:m2")),
                 Term("jc", "qb", "m1", r["r_2M_b1"], phase("jc:qb:m1")),
                 Term("jc", "qb", "m2", r["r_2M_b2"], phase("jc:qb:m2"))]
    elif m == "1S1S":
        terms = [Term("jc", "qa", "m1", 1.0, phase("jc:qa:m1")),
                 Term("jc", "qb", "m2", r["r_1S1S_b2"], phase("jc:qb:m2")),
                 Term("bs", "m1", "m2", r["r_1S1S_BS"])]
    elif m == "3Q":
        terms = [Term("exchange", "q1", "q2", 1.0, phase("exchange:q1:q2")),
                 Term("exchange", "q2", "q3", r["r_3Q"], phase("exchange:q2:q3"))]
    else:
        raise ValueError(f"unknown model {m!r}")
    if ph:
        raise ValueError(f"model {m} has no phase slots named {sorted(ph)}")
    return terms


def term_operator(space: HilbertSpace, term: Term) -> Operator:
    if term.kind == "jc":
        return jc_term(space, term.first, term.second, term.kappa, term.phase)
    if term.kind == "bs":
        return bs_term(space, term.first, term.second, term.kappa)
    if term.kind == "exchange":
        return exchange_term(space, term.first, term.second, term.kappa, term.phase)
    raise ValueError(f"unknown term kind {term.kind!r}")


def build_model(config: ModelConfig) -> tuple[HilbertSpace, Operator]:
    """Dense Hamiltonian of the configured model, Hermitian by construction."""
    space = model_space(config)
    h = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    for term in model_terms(config):
        if term.kappa == 0.0:
            continue
        h = h + term_operator(space, term).data
    return space, Operator(space, h)
