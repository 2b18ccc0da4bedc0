"""Simulator of thermally induced entanglement between the vibrational modes
of trapped ions coupled through beamsplitter and qubit-mode interactions.

The library layers are:

* :mod:`thermoent.operators` -- labeled tensor-product spaces and dense
  operator algebra (embedding, partial trace, partial transpose, trace norm);
* :mod:`thermoent.states` -- thermal, Fock, coherent and phase-averaged
  initial states with a strict truncation-tail policy;
* :mod:`thermoent.hamiltonians` -- the interaction models and the mapping
  from physical trap parameters to coupling rates;
* :mod:`thermoent.dynamics` -- unitary and Lindblad propagation plus
  truncation sizing;
* :mod:`thermoent.measures` -- logarithmic negativity, concurrence,
  entanglement potential, populations, fidelity, purity;
* :mod:`thermoent.sectors` -- excitation-sector fast engine used by the
  experiment runner;
* :mod:`thermoent.experiments` -- config-driven runner, presets, sweeps,
  CSV/JSON output and the command line interface.
"""

__version__ = "0.1.0"

from .operators import (DensityMatrix, HilbertSpace, Operator, annihilation,
                        creation, embed, identity, number, partial_trace,
                        partial_transpose, pauli, trace_norm)
from .states import (QubitThermalSpec, ThermalSpec, TruncationError,
                     coherent_state, compose, fock_state, nbar_from_temperature,
                     pe_from_temperature, phase_randomized_coherent,
                     thermal_oscillator, thermal_qubit)
from .hamiltonians import (ModelConfig, PhysicalTrapParams, bs_term, build_model,
                           coulomb_bs_rate, coupling_ratio, equilibrium_separation,
                           exchange_term, jc_term, sideband_jc_rate, total_excitation)
from .dynamics import (BathChannel, BathSpec, ConvergenceError, StepControl,
                       TimeGrid, TraceDriftError, choose_dimension,
                       evolve_lindblad, evolve_unitary, lindblad_jumps)
from .measures import (BipartiteCut, concurrence, entanglement_potential,
                       excited_population, ground_fidelity,
                       logarithmic_negativity, purity)

__all__ = [
    "__version__",
    "DensityMatrix", "HilbertSpace", "Operator", "annihilation", "creation",
    "embed", "identity", "number", "partial_trace", "partial_transpose",
    "pauli", "trace_norm",
    "QubitThermalSpec", "ThermalSpec", "TruncationError", "coherent_state",
    "compose", "fock_state", "nbar_from_temperature", "pe_from_temperature",
    "phase_randomized_coherent", "thermal_oscillator", "thermal_qubit",
    "ModelConfig", "PhysicalTrapParams", "bs_term", "build_model",
    "coulomb_bs_rate", "coupling_ratio", "equilibrium_separation",
    "exchange_term", "jc_term", "sideband_jc_rate", "total_excitation",
    "BathChannel", "BathSpec", "ConvergenceError", "StepControl", "TimeGrid",
    "TraceDriftError", "choose_dimension", "evolve_lindblad", "evolve_unitary",
    "lindblad_jumps",
    "BipartiteCut", "concurrence", "entanglement_potential",
    "excited_population", "ground_fidelity", "logarithmic_negativity", "purity",
]
