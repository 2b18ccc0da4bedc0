"""Config-driven scenario runner: time series, peak extraction, parameter
sweeps, decoherence studies, comparison protocols and convergence studies."""

from .config import ExperimentConfig, Observable, StateSpec, SweepConfig
from .presets import list_presets, preset
from .runner import RunResult, SweepResult, convergence_study, first_peak, run, sweep

__all__ = [
    "ExperimentConfig", "Observable", "StateSpec", "SweepConfig",
    "list_presets", "preset",
    "RunResult", "SweepResult", "convergence_study", "first_peak", "run", "sweep",
]
