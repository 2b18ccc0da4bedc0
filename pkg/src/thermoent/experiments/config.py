"""Experiment configuration: strict parsing of the JSON scenario documents.

Unknown keys are hard errors everywhere; a typo in a physics parameter must
never silently fall back to a default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import BathChannel, BathSpec, TimeGrid, choose_dimension, DEFAULT_GUARD_LEVELS
from ..hamiltonians import ModelConfig, mode_labels, model_labels
from ..states import (QubitThermalSpec, ThermalSpec, coherent_amplitudes,
                      poisson_weights, thermal_weights)
from ..sectors import Factor

DEFAULT_EPSILON = 1e-6
ENGINES = ("auto", "sector", "dense")


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


def _take(mapping, allowed, context):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{context}: expected a mapping, got {type(mapping).__name__}")
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"{context}: unknown keys {sorted(unknown)}; allowed {sorted(allowed)}")
    return mapping


@dataclass(frozen=True)
class StateSpec:
    """Initial state of one subsystem.

    kind is one of thermal, qubit, coherent, prcs, fock; the value carries the
    mean occupation, excited population, amplitude, or Fock index.
    """

    kind: str
    value: complex

    @classmethod
    def from_dict(cls, label: str, raw: dict) -> "StateSpec":
        is_qubit = label.startswith("q")
        allowed = ("pe", "temperature", "frequency") if is_qubit else \
                  ("nbar", "coherent", "prcs", "fock", "temperature", "frequency")
        _take(raw, allowed, f"initial.{label}")
        if "temperature" in raw or "frequency" in raw:
            if set(raw) != {"temperature", "frequency"}:
                raise ConfigError(
                    f"initial.{label}: temperature and frequency must appear together "
                    "and without other keys"
                )
            if is_qubit:
                pe = QubitThermalSpec(temperature=raw["temperature"],
                                      frequency=raw["frequency"]).resolve()
                return cls("qubit", pe)
            nbar = ThermalSpec(temperature=raw["temperature"],
                               frequency=raw["frequency"]).resolve()
            return cls("thermal", nbar)
        if len(raw) != 1:
            raise ConfigError(f"initial.{label}: give exactly one state key, got {sorted(raw)}")
        key, value = next(iter(raw.items()))
        if key == "pe":
            return cls("qubit", float(value))
        if key == "nbar":
            return cls("thermal", float(value))
        if key == "coherent":
            if isinstance(value, (list, tuple)):
                if len(value) != 2:
                    raise ConfigError(f"initial.{label}.coherent: expected [re, im]")
                value = complex(value[0], value[1])
            return cls("coherent", complex(value))
        if key == "prcs":
            return cls("prcs", float(value))
        if key == "fock":
            return cls("fock", int(value))
        raise ConfigError(f"initial.{label}: unknown state key {key!r}")

    def to_dict(self) -> dict:
        if self.kind == "qubit":
            return {"pe": float(np.real(self.value))}
        if self.kind == "thermal":
            return {"nbar": float(np.real(self.value))}
        if self.kind == "coherent":
            v = complex(self.value)
            return {"coherent": [v.real, v.imag]}
        if self.kind == "prcs":
            return {"prcs": float(np.real(self.value))}
        return {"fock": int(np.real(self.value))}

    def effective_nbar(self) -> float:
        """Mean occupation this state needs the truncation to support."""
        if self.kind == "thermal":
            return float(np.real(self.value))
        if self.kind in ("coherent", "prcs"):
            a = self.value if self.kind == "coherent" else float(np.real(self.value))
            return float(abs(a) ** 2)
        if self.kind == "fock":
            return float(np.real(self.value))
        return 0.0

    def factor(self, dim: int, tail_tol: float) -> Factor:
        """Concrete truncated factor for the sector engine."""
        if self.kind == "qubit":
            pe = float(np.real(self.value))
            return Factor.diagonal([1.0 - pe, pe])
        if self.kind == "thermal":
            return Factor.diagonal(thermal_weights(float(np.real(self.value)), dim, tail_tol))
        if self.kind == "prcs":
            return Factor.diagonal(poisson_weights(float(np.real(self.value)), dim, tail_tol))
        if self.kind == "coherent":
            return Factor.pure(coherent_amplitudes(complex(self.value), dim, tail_tol))
        n = int(np.real(self.value))
        if not 0 <= n < dim:
            raise ConfigError(f"Fock index {n} outside truncated range [0, {dim})")
        probs = np.zeros(dim)
        probs[n] = 1.0
        return Factor.diagonal(probs)


_OBS_NAMES = ("ln", "concurrence", "pe", "ground_fidelity", "purity", "ep")


@dataclass(frozen=True)
class Observable:
    """A named measure with its cut or target arguments."""

    name: str
    between: tuple[tuple[str, ...], tuple[str, ...]] | None = None
    target: str | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "Observable":
        _take(raw, ("name", "between", "target"), "observables[]")
        name = raw.get("name")
        if name not in _OBS_NAMES:
            raise ConfigError(f"unknown observable {name!r}; expected one of {_OBS_NAMES}")
        if name in ("ln", "concurrence"):
            between = raw.get("between")
            if (not isinstance(between, (list, tuple)) or len(between) != 2
                    or not all(isinstance(b, (list, tuple)) and b for b in between)):
                raise ConfigError(f"observable {name!r} needs between: [[labels],[labels]]")
            if "target" in raw:
                raise ConfigError(f"observable {name!r} does not take a target")
            return cls(name, (tuple(between[0]), tuple(between[1])))
        if name in ("pe", "ground_fidelity", "ep"):
            if "between" in raw or "target" not in raw:
                raise ConfigError(f"observable {name!r} needs a target label")
            return cls(name, target=str(raw["target"]))
        if "between" in raw or "target" in raw:
            raise ConfigError("observable 'purity' takes no arguments")
        return cls(name)

    def to_dict(self) -> dict:
        out = {"name": self.name}
        if self.between is not None:
            out["between"] = [list(self.between[0]), list(self.between[1])]
        if self.target is not None:
            out["target"] = self.target
        return out

    @property
    def column(self) -> str:
        if self.between is not None:
            return f"{self.name}:{'+'.join(self.between[0])}|{'+'.join(self.between[1])}"
        if self.target is not None:
            return f"{self.name}:{self.target}"
        return self.name


@dataclass(frozen=True)
class DimsPolicy:
    """Explicit per-mode dimensions, or automatic sizing from the tail bound."""

    auto: bool
    epsilon: float = DEFAULT_EPSILON
    guard: int = DEFAULT_GUARD_LEVELS
    explicit: dict = field(default_factory=dict)

    @classmethod
    def from_raw(cls, raw, model: str) -> "DimsPolicy":
        if raw is None:
            return cls(auto=True)
        if isinstance(raw, str):
            text = raw.strip()
            if text == "auto":
                return cls(auto=True)
            if text.startswith("auto(") and text.endswith(")"):
                return cls(auto=True, epsilon=float(text[5:-1]))
            raise ConfigError(f"dims: cannot parse {raw!r}; use 'auto', 'auto(eps)' or a mapping")
        _take(raw, set(mode_labels(model)) | {"epsilon", "guard"}, "dims")
        eps = float(raw.get("epsilon", DEFAULT_EPSILON))
        guard = int(raw.get("guard", DEFAULT_GUARD_LEVELS))
        explicit = {k: int(v) for k, v in raw.items() if k not in ("epsilon", "guard")}
        if explicit:
            missing = set(mode_labels(model)) - set(explicit)
            if missing:
                raise ConfigError(f"dims: missing explicit entries for {sorted(missing)}")
            return cls(auto=False, epsilon=eps, guard=guard, explicit=explicit)
        return cls(auto=True, epsilon=eps, guard=guard)

    def to_dict(self, model: str) -> dict:
        out = {"epsilon": self.epsilon, "guard": self.guard}
        if not self.auto:
            out.update({k: int(v) for k, v in self.explicit.items()})
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully specified single propagation run."""

    model: ModelConfig
    initial: dict
    grid: TimeGrid
    observables: tuple[Observable, ...]
    bath: BathSpec | None = None
    dims: DimsPolicy = DimsPolicy(auto=True)
    engine: str = "auto"

    def __post_init__(self):
        if not self.observables:
            raise ConfigError("observables must not be empty")
        labels = set(model_labels(self.model.model))
        given = set(self.initial)
        if given != labels:
            raise ConfigError(
                f"initial must cover every subsystem {sorted(labels)}, got {sorted(given)}"
            )
        for lbl, spec in self.initial.items():
            if lbl.startswith("q") and spec.kind != "qubit":
                raise ConfigError(f"initial.{lbl}: qubits take a pe (or temperature) spec")
            if lbl.startswith("m") and spec.kind == "qubit":
                raise ConfigError(f"initial.{lbl}: modes do not take a pe spec")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        _take(raw, ("model", "initial", "bath", "grid", "observables", "dims", "engine"),
              "config")
        for key in ("model", "initial", "grid", "observables"):
            if key not in raw:
                raise ConfigError(f"config: missing required section {key!r}")
        mraw = _take(dict(raw["model"]),
                     ("name", "ratios", "phases", "base_coupling"), "model")
        try:
            model = ModelConfig(model=str(mraw.get("name")),
                                ratios=dict(mraw.get("ratios", {})),
                                phases=dict(mraw.get("phases", {})),
                                base_coupling=float(mraw.get("base_coupling", 1.0)))
        except ValueError as exc:
            raise ConfigError(f"model: {exc}") from exc
        initial = {str(lbl): StateSpec.from_dict(str(lbl), dict(spec))
                   for lbl, spec in dict(raw["initial"]).items()}
        graw = _take(dict(raw["grid"]), ("start", "end", "samples"), "grid")
        try:
            grid = TimeGrid(start=float(graw.get("start", 0.0)),
                            end=float(graw["end"]), samples=int(graw["samples"]))
        except KeyError as exc:
            raise ConfigError(f"grid: missing {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from exc
        observables = tuple(Observable.from_dict(dict(o)) for o in raw["observables"])
        bath = None
        if raw.get("bath") is not None:
            braw = _take(dict(raw["bath"]), ("channels",), "bath")
            channels = []
            for craw in braw.get("channels", []):
                craw = _take(dict(craw), ("kind", "target", "rate", "nbar_th"), "bath.channels[]")
                try:
                    channels.append(BathChannel(kind=str(craw["kind"]),
                                                target=str(craw["target"]),
                                                rate=float(craw["rate"]),
                                                nbar_th=float(craw.get("nbar_th", 0.0))))
                except KeyError as exc:
                    raise ConfigError(f"bath channel: missing {exc}") from exc
                except ValueError as exc:
                    raise ConfigError(f"bath channel: {exc}") from exc
            bath = BathSpec(channels)
        dims = DimsPolicy.from_raw(raw.get("dims"), model.model)
        engine = str(raw.get("engine", "auto"))
        try:
            return cls(model=model, initial=initial, grid=grid, observables=observables,
                       bath=bath, dims=dims, engine=engine)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        out = {
            "model": {
                "name": self.model.model,
                "ratios": {k: float(v) for k, v in sorted(self.model.ratios.items())},
                "phases": {k: float(v) for k, v in sorted(self.model.phases.items())},
                "base_coupling": float(self.model.base_coupling),
            },
            "initial": {lbl: self.initial[lbl].to_dict() for lbl in sorted(self.initial)},
            "grid": {"start": self.grid.start, "end": self.grid.end,
                     "samples": self.grid.samples},
            "observables": [o.to_dict() for o in self.observables],
            "dims": self.dims.to_dict(self.model.model),
            "engine": self.engine,
        }
        if self.bath is not None:
            out["bath"] = {"channels": [
                {"kind": c.kind, "target": c.target, "rate": c.rate, "nbar_th": c.nbar_th}
                for c in self.bath.channels
            ]}
        return out

    def resolved_dims(self) -> dict[str, int]:
        """Per-mode Fock dimensions.

        Automatic sizing gives every mode in a coupled cluster the dimension
        demanded by the cluster's hottest initial state, since excitation
        exchange can concentrate the whole excitation budget in any one of
        them; modes with all couplings switched off are sized on their own.
        """
        modes = mode_labels(self.model.model)
        if not self.dims.auto:
            return dict(self.dims.explicit)
        if not modes:
            return {}
        clusters = _coupling_clusters(self.model)
        out = {}
        for cluster in clusters:
            hot = max((self.initial[lbl].effective_nbar()
                       for lbl in cluster if lbl in modes), default=0.0)
            dim = choose_dimension(hot, self.dims.epsilon, self.dims.guard)
            for lbl in cluster:
                if lbl in modes:
                    out[lbl] = dim
        return out

    def with_updates(self, **replacements) -> "ExperimentConfig":
        raw = self.to_dict()
        raw.update(replacements)
        return ExperimentConfig.from_dict(raw)


def _coupling_clusters(model: ModelConfig) -> list[set[str]]:
    """Connected components of subsystems under nonzero interaction terms."""
    from ..hamiltonians import model_terms
    labels = list(model_labels(model.model))
    parent = {lbl: lbl for lbl in labels}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    placeholder_dims = {m: 2 for m in mode_labels(model.model)}
    probe = ModelConfig(model=model.model, ratios=model.ratios, phases=model.phases,
                        mode_dims=placeholder_dims, base_coupling=model.base_coupling)
    for term in model_terms(probe):
        if term.kappa != 0.0:
            ra, rb = find(term.first), find(term.second)
            if ra != rb:
                parent[ra] = rb
    clusters: dict[str, set[str]] = {}
    for lbl in labels:
        clusters.setdefault(find(lbl), set()).add(lbl)
    return list(clusters.values())


_REDUCTIONS = ("first_peak_value", "first_peak_time", "full_series")


@dataclass(frozen=True)
class SweepConfig:
    """A base run plus one or two swept parameter axes."""

    base: ExperimentConfig
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    reduction: str = "first_peak_value"

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError(f"sweep needs 1 or 2 axes, got {len(self.axes)}")
        for path, values in self.axes:
            if not values:
                raise ConfigError(f"sweep axis {path!r} has no values")
            if not all(np.isfinite(v) for v in values):
                raise ConfigError(f"sweep axis {path!r} has non-finite values")
        if self.reduction not in _REDUCTIONS:
            raise ConfigError(f"reduction must be one of {_REDUCTIONS}")

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepConfig":
        _take(raw, ("base", "axes", "reduction"), "sweep")
        if "base" not in raw or "axes" not in raw:
            raise ConfigError("sweep: missing required sections 'base' and/or 'axes'")
        base = ExperimentConfig.from_dict(dict(raw["base"]))
        axes = []
        for araw in raw["axes"]:
            araw = _take(dict(araw), ("path", "values"), "sweep.axes[]")
            try:
                axes.append((str(araw["path"]), tuple(float(v) for v in araw["values"])))
            except KeyError as exc:
                raise ConfigError(f"sweep axis: missing {exc}") from exc
        return cls(base=base, axes=tuple(axes),
                   reduction=str(raw.get("reduction", "first_peak_value")))

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "axes": [{"path": p, "values": list(v)} for p, v in self.axes],
            "reduction": self.reduction,
        }


def set_by_path(raw: dict, path: str, value):
    """Assign into a nested config dict via a dotted path like
    'initial.m1.nbar' or 'bath.channels.0.rate'."""
    parts = path.split(".")
    node = raw
    for part in parts[:-1]:
        if isinstance(node, list):
            node = node[int(part)]
        elif part in node:
            node = node[part]
        else:
            raise ConfigError(f"path {path!r}: no section {part!r}")
        if not isinstance(node, (dict, list)):
            raise ConfigError(f"path {path!r}: {part!r} is not a section")
    leaf = parts[-1]
    if isinstance(node, list):
        node[int(leaf)] = value
    else:
        node[leaf] = value


def load_config(path: str):
    """Read a JSON config file; returns an ExperimentConfig or SweepConfig."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError("config file must contain a JSON object")
    if "base" in raw or "axes" in raw:
        return SweepConfig.from_dict(raw)
    return ExperimentConfig.from_dict(raw)
