"""Experiment configuration: YAML/JSON documents validated before any computation."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
import yaml

from .diagnostics import TEST_FUNCTIONS
from .errors import IETLabError, ValidationError
from .groups import group_from_name, representation_from_label

COMMANDS = ("induct", "verify", "diagnose", "scan", "sweep")
FAULTS = (None, "corrupt_gamma")


class ConfigError(IETLabError, ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class IETSpec:
    lengths: list | None = None
    permutation: list | None = None
    random: bool = False
    n: int = 4


@dataclass
class GroupSpec:
    backend: str = "su2"
    elements: list | None = None
    random: bool = True
    exact: bool = False


@dataclass
class ExperimentConfig:
    command: str
    seed: int = 0
    arithmetic: str | None = None  # inferred from explicit lengths; exact for random ones
    iet: IETSpec = field(default_factory=IETSpec)
    group: GroupSpec = field(default_factory=GroupSpec)
    rep: str | None = None
    depth: int = 10
    epsilon: float | None = None
    N: int = 10_000
    M: int = 1000
    A: int = 2048
    samples: int = 50
    triples: int = 1
    haar_samples: int = 100_000
    fiber_tol: float = 1e-9
    base_tol: float = 1e-9
    test_fns: list = field(default_factory=lambda: list(TEST_FUNCTIONS))
    shifts: list = field(default_factory=lambda: [0.0])
    seeds: int = 10
    workers: int = 1
    correlation: bool = True
    fault: str | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_INT_FIELDS = ("seed", "depth", "N", "M", "A", "samples", "triples", "haar_samples", "seeds", "workers")
_FLOAT_FIELDS = ("epsilon", "fiber_tol", "base_tol")
_POSITIVE = ("N", "M", "A", "samples", "triples", "haar_samples", "seeds", "workers")


def _sub(doc, name, cls):
    if doc is None:
        return cls()
    if not isinstance(doc, dict):
        raise ConfigError(name, "must be a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}", "unknown field")
    return cls(**doc)


def parse_config(doc: dict, command: str | None = None, seed: int | None = None) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a mapping")
    doc = dict(doc.get("config", doc))  # a manifest embeds its config
    if command is not None:
        doc["command"] = command
    if seed is not None:
        doc["seed"] = seed
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    if doc.get("command") not in COMMANDS:
        raise ConfigError("command", f"must be one of {COMMANDS}, got {doc.get('command')!r}")
    for name in _FLOAT_FIELDS:
        # YAML 1.1 leaves "1e-9" (no dot) as a string
        if isinstance(doc.get(name), str):
            try:
                doc[name] = float(doc[name])
            except ValueError:
                raise ConfigError(name, f"must be a number, got {doc[name]!r}") from None
    doc["iet"] = _sub(doc.get("iet"), "iet", IETSpec)
    doc["group"] = _sub(doc.get("group"), "group", GroupSpec)
    cfg = ExperimentConfig(**doc)
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig):
    for name in _INT_FIELDS:
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(name, f"must be an integer, got {v!r}")
    for name in _POSITIVE:
        if getattr(cfg, name) < 1:
            raise ConfigError(name, "must be >= 1")
    if cfg.depth < 0:
        raise ConfigError("depth", "must be >= 0")
    if cfg.command in ("diagnose", "sweep") and cfg.depth < 1:
        raise ConfigError("depth", "must be >= 1 for defect trajectories")
    if cfg.arithmetic not in (None, "exact", "float"):
        raise ConfigError("arithmetic", "must be 'exact' or 'float'")
    if cfg.epsilon is not None and not (isinstance(cfg.epsilon, (int, float)) and cfg.epsilon >= 0):
        raise ConfigError("epsilon", "must be a non-negative number")
    for name in ("fiber_tol", "base_tol"):
        if not isinstance(getattr(cfg, name), (int, float)) or getattr(cfg, name) < 0:
            raise ConfigError(name, "must be a non-negative number")
    if cfg.fault not in FAULTS:
        raise ConfigError("fault", f"must be one of {FAULTS}")

    spec = cfg.iet
    if spec.random:
        if not isinstance(spec.n, int) or spec.n < 2:
            raise ConfigError("iet.n", "must be an integer >= 2")
    else:
        if spec.lengths is None or spec.permutation is None:
            raise ConfigError("iet", "give lengths and permutation, or random: true")
        if len(spec.lengths) != len(spec.permutation):
            raise ConfigError("iet.lengths", "length does not match the permutation")
        from .iet import build_iet

        try:
            build_iet(spec.lengths, spec.permutation, cfg.arithmetic)
        except ValidationError as exc:
            raise ConfigError("iet", str(exc)) from None

    if cfg.command == "induct":
        return
    try:
        group = group_from_name(cfg.group.backend)
    except (ValidationError, ValueError) as exc:
        raise ConfigError("group.backend", str(exc)) from None
    if cfg.group.elements is not None:
        n = len(spec.permutation) if not spec.random else spec.n
        if len(cfg.group.elements) != n:
            raise ConfigError("group.elements", f"need {n} elements, got {len(cfg.group.elements)}")
        try:
            for c in cfg.group.elements:
                group.from_coords(c, True if cfg.group.exact else None)
        except (ValidationError, ValueError, TypeError) as exc:
            raise ConfigError("group.elements", str(exc)) from None
    elif not cfg.group.random:
        raise ConfigError("group", "give elements or random: true")
    if cfg.rep is not None:
        try:
            rep = representation_from_label(group, cfg.rep)
        except (ValidationError, ValueError, TypeError) as exc:
            raise ConfigError("rep", str(exc)) from None
    elif cfg.command in ("diagnose", "scan", "sweep"):
        raise ConfigError("rep", "required for this command")
    else:
        rep = None
    if cfg.command == "scan":
        if rep.dim != 1:
            raise ConfigError("rep", "scan needs a one-dimensional character")
        unknown = [h for h in cfg.test_fns if h not in TEST_FUNCTIONS]
        if unknown:
            raise ConfigError("test_fns", f"unknown test functions {unknown}")


def load_config(path: str | Path, command: str | None = None, seed: int | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
        # YAML 1.1 reads "1e-09" as a string, so JSON goes through json
        doc = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"not valid JSON: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError("--config", f"not valid YAML: {exc}") from None
    return parse_config(doc or {}, command, seed)
