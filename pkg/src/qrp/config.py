"""Declarative experiment configuration: YAML files, defaults, strict checks.

A config file holds an optional ``preset`` name plus four optional blocks
(``model``, ``drive``, ``readouts``, ``tasks``) that refine the preset (or
the library defaults when no preset is given).  Unknown keys are fatal so a
typo can never silently change the physics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .diagnostics import OtocSpec, TmiSpec
from .driver import DriveConfig
from .hamiltonian import IsingParams
from .pauli import OperatorLabelError, parse_operator_label


class ConfigError(ValueError):
    """Configuration rejected; the message names the offending key."""


MODEL_KEYS = ("n", "j", "h_x", "h_z")
DRIVE_KEYS = ("t_in", "n_grid", "washout", "train", "test", "seed", "tmi_cap")
TASK_KEYS = (
    "stm_delays",
    "deviation",
    "deviation_windows",
    "correlations",
    "otoc",
    "tmi",
    "record",
)
TOP_KEYS = ("preset", "out", "model", "drive", "readouts", "tasks")

DEFAULT_MODEL = {"n": 7, "j": 1.0, "h_x": 0.0, "h_z": 1.0}
DEFAULT_DRIVE = {
    "t_in": 5.0,
    "n_grid": 50,
    "washout": 1000,
    "train": 2000,
    "test": 2000,
    "seed": 42,
    "tmi_cap": 200,
}
DEFAULT_TASKS = {
    "stm_delays": [0],
    "deviation": False,
    "deviation_windows": 4000,
    "correlations": [],
    "otoc": [],
    "tmi": [],
    "record": False,
}


@dataclass(frozen=True)
class TaskSpec:
    """Post-processing requested for one run."""

    stm_delays: tuple[int, ...] = (0,)
    deviation: bool = False
    deviation_windows: int = 4000
    correlations: tuple[int, ...] = ()
    otoc: tuple[OtocSpec, ...] = ()
    tmi: tuple[TmiSpec, ...] = ()
    record: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved description of a single drive plus its tasks."""

    model: IsingParams
    drive: DriveConfig
    readouts: tuple[str, ...]
    tasks: TaskSpec


@dataclass
class ConfigFile:
    """Validated but unresolved content of a config file."""

    preset: str | None = None
    out: str | None = None
    model: dict = field(default_factory=dict)
    drive: dict = field(default_factory=dict)
    readouts: list[str] | None = None
    tasks: dict = field(default_factory=dict)


def _require_mapping(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(value).__name__}")
    return value


def _check_keys(block: dict, allowed: tuple[str, ...], where: str) -> None:
    for key in block:
        if key not in allowed:
            raise ConfigError(
                f"unknown key {key!r} in {where!r} (allowed: {', '.join(allowed)})"
            )


def parse_config(path: str | Path) -> ConfigFile:
    """Load and strictly validate a config file (structure only)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"syntax error in {path}: {exc}") from exc
    if raw is None:
        raw = {}
    raw = _require_mapping(raw, str(path))
    _check_keys(raw, TOP_KEYS, str(path))

    doc = ConfigFile()
    if "preset" in raw:
        if not isinstance(raw["preset"], str):
            raise ConfigError("preset must be a string")
        doc.preset = raw["preset"]
    if "out" in raw:
        if not isinstance(raw["out"], str):
            raise ConfigError("out must be a string path")
        doc.out = raw["out"]
    if "model" in raw:
        block = _require_mapping(raw["model"], "model")
        _check_keys(block, MODEL_KEYS, "model")
        doc.model = dict(block)
    if "drive" in raw:
        block = _require_mapping(raw["drive"], "drive")
        _check_keys(block, DRIVE_KEYS, "drive")
        doc.drive = dict(block)
    if "readouts" in raw:
        if not isinstance(raw["readouts"], list) or not all(
            isinstance(x, str) for x in raw["readouts"]
        ):
            raise ConfigError("readouts must be a list of operator labels")
        doc.readouts = list(raw["readouts"])
    if "tasks" in raw:
        block = _require_mapping(raw["tasks"], "tasks")
        _check_keys(block, TASK_KEYS, "tasks")
        doc.tasks = dict(block)
    return doc


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    return value


def _as_float(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def _as_bool(value: Any, where: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{where} must be true/false, got {value!r}")
    return value


def _as_int_list(value: Any, where: str) -> tuple[int, ...]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{where} must be a list of integers, got {value!r}")
    return tuple(_as_int(x, where) for x in value)


def build_model(block: dict) -> IsingParams:
    merged = {**DEFAULT_MODEL, **block}
    try:
        return IsingParams(
            n=_as_int(merged["n"], "model.n"),
            j=_as_float(merged["j"], "model.j"),
            h_x=_as_float(merged["h_x"], "model.h_x"),
            h_z=_as_float(merged["h_z"], "model.h_z"),
        )
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc


def build_drive(block: dict) -> DriveConfig:
    merged = {**DEFAULT_DRIVE, **block}
    try:
        return DriveConfig(
            t_in=_as_float(merged["t_in"], "drive.t_in"),
            n_grid=_as_int(merged["n_grid"], "drive.n_grid"),
            n_washout=_as_int(merged["washout"], "drive.washout"),
            n_train=_as_int(merged["train"], "drive.train"),
            n_test=_as_int(merged["test"], "drive.test"),
            seed=_as_int(merged["seed"], "drive.seed"),
            tmi_cap=_as_int(merged["tmi_cap"], "drive.tmi_cap"),
        )
    except ValueError as exc:
        raise ConfigError(f"drive: {exc}") from exc


def build_tasks(block: dict) -> TaskSpec:
    merged = {**DEFAULT_TASKS, **block}
    otoc_specs = []
    for item in merged["otoc"]:
        if isinstance(item, OtocSpec):
            otoc_specs.append(item)
            continue
        item = _require_mapping(item, "tasks.otoc entry")
        _check_keys(item, ("w", "v"), "tasks.otoc entry")
        if "w" not in item or "v" not in item:
            raise ConfigError("tasks.otoc entries need both 'w' and 'v'")
        try:
            otoc_specs.append(OtocSpec.of(item["w"], item["v"]))
        except OperatorLabelError as exc:
            raise ConfigError(f"tasks.otoc: {exc}") from exc
    tmi_specs = []
    for item in merged["tmi"]:
        if isinstance(item, TmiSpec):
            tmi_specs.append(item)
            continue
        item = _require_mapping(item, "tasks.tmi entry")
        _check_keys(item, ("a", "b", "c"), "tasks.tmi entry")
        if set(item) != {"a", "b", "c"}:
            raise ConfigError("tasks.tmi entries need subsets 'a', 'b', 'c'")
        try:
            tmi_specs.append(
                TmiSpec(
                    a=_as_int_list(item["a"], "tasks.tmi.a"),
                    b=_as_int_list(item["b"], "tasks.tmi.b"),
                    c=_as_int_list(item["c"], "tasks.tmi.c"),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"tasks.tmi: {exc}") from exc
    return TaskSpec(
        stm_delays=_as_int_list(merged["stm_delays"], "tasks.stm_delays"),
        deviation=_as_bool(merged["deviation"], "tasks.deviation"),
        deviation_windows=_as_int(
            merged["deviation_windows"], "tasks.deviation_windows"
        ),
        correlations=_as_int_list(merged["correlations"], "tasks.correlations"),
        otoc=tuple(otoc_specs),
        tmi=tuple(tmi_specs),
        record=_as_bool(merged["record"], "tasks.record"),
    )


def default_readouts(n: int) -> list[str]:
    return [f"z{i}" for i in range(1, n + 1)]


def build_config(
    model_block: dict,
    drive_block: dict,
    readouts: list[str] | None,
    tasks_block: dict,
) -> ExperimentConfig:
    """Construct and cross-validate a full single-run configuration."""
    model = build_model(model_block)
    drive = build_drive(drive_block)
    tasks = build_tasks(tasks_block)
    if readouts is None:
        readouts = default_readouts(model.n)

    seen = set()
    for label in readouts:
        try:
            p = parse_operator_label(label)
        except OperatorLabelError as exc:
            raise ConfigError(f"readouts: {exc}") from exc
        if p.terms and max(p.sites) > model.n:
            raise ConfigError(
                f"readout {label!r} uses site {max(p.sites)} but the register "
                f"ends at qubit {model.n}"
            )
        if label in seen:
            raise ConfigError(f"duplicate readout {label!r}")
        seen.add(label)

    for d in tasks.stm_delays:
        if d < 0 or d > drive.n_washout:
            raise ConfigError(
                f"stm delay {d} outside [0, washout={drive.n_washout}]"
            )
    for q in tasks.correlations:
        if not 1 <= q <= model.n:
            raise ConfigError(f"correlation qubit {q} outside chain 1..{model.n}")
    for spec in tasks.otoc:
        for p in (spec.w, spec.v):
            if p.terms and max(p.sites) > model.n:
                raise ConfigError(
                    f"otoc operator {p.label()!r} outside register 0..{model.n}"
                )
    for spec in tasks.tmi:
        top = max(spec.a + spec.b + spec.c)
        if top > model.n:
            raise ConfigError(f"tmi subset qubit {top} outside register 0..{model.n}")
    if tasks.deviation:
        missing = [lab for lab in default_readouts(model.n) if lab not in readouts]
        if missing:
            raise ConfigError(
                f"deviation needs single-site z readouts on every chain qubit; "
                f"missing {missing}"
            )
        if 0 not in tasks.stm_delays:
            raise ConfigError("deviation needs delay 0 in tasks.stm_delays")
        want = tuple(range(1, model.n + 1))
        if tuple(sorted(tasks.correlations)) != want:
            raise ConfigError(
                f"deviation needs tasks.correlations = {list(want)}"
            )
    return ExperimentConfig(
        model=model, drive=drive, readouts=tuple(readouts), tasks=tasks
    )
