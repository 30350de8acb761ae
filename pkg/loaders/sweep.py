"""Sweep configuration

Builds an ExperimentConfig from four layers, later ones winning:

    built-in defaults < config.toml [experiments.<kind>] < sweep file < CLI

Sweep files are YAML (a JSON document is valid YAML too) and are checked
against config/schema/sweep.json before use.
"""
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from conic.solver import SolverSettings
from features.experiments import (
    DEFAULT_OBJECTIVES, SWEEP_KINDS, EntropyComparison, ExperimentConfig,
    GammaSweep, NoiseSweep, RangeSweep, ScaleSweep,
)
from features.models import ObjectiveKind
from features.pipeline import MetricOptions
from loaders import config as config_loader
from type_defs import GenConfig, NoiseModel, Placement
from utils.errors import ConfigError, FormatError
from utils.logger import get_logger
from utils.schema_validator import validate_sweep

logger = get_logger("loaders.sweep")

BUILTIN: Dict[str, Any] = {
    "sensors": 80,
    "anchors": 5,
    "radio_range": 0.25,
    "noise_std": 0.05,
    "noise_model": NoiseModel.ADDITIVE.value,
    "num_networks": 50,
    "master_seed": 0,
    "workers": 1,
    "record_timing": True,
}


def load_sweep_file(path) -> Dict[str, Any]:
    """Parse and schema-check a sweep file"""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"sweep config not found: {path}") from e
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise FormatError(f"{path}: {getattr(e, 'problem', None) or e}",
                          line=mark.line + 1 if mark is not None else None) from e
    except OSError as e:
        raise ConfigError(f"cannot read sweep config {path}: {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise FormatError(f"{path}: sweep config must be a mapping", line=1)
    issue = validate_sweep(data)
    if issue is not None:
        raise FormatError(f"{path}: {issue.message}", field=issue.field)
    return data


def _objectives(values) -> tuple:
    if values is None:
        return DEFAULT_OBJECTIVES
    return tuple(ObjectiveKind.parse(v) for v in values)


def _sweep(kind: str, values: Dict[str, Any]):
    if kind == GammaSweep.kind:
        return GammaSweep(gammas=tuple(values.get("gammas") or ()))
    if kind == NoiseSweep.kind:
        return NoiseSweep(noise_stds=tuple(values.get("noise_stds") or ()))
    if kind == RangeSweep.kind:
        return RangeSweep(radio_ranges=tuple(values.get("radio_ranges") or ()))
    if kind == ScaleSweep.kind:
        return ScaleSweep(sensor_counts=tuple(values.get("sensor_counts") or ()),
                          max_degree=values.get("max_degree"))
    return EntropyComparison(
        bin_width=values["bin_width"], sigma_ref=values["sigma_ref"], threshold=values["threshold"],
    )


def build_experiment(kind: str, file_values: Optional[Dict[str, Any]] = None,
                     overrides: Optional[Dict[str, Any]] = None, quick: bool = False) -> ExperimentConfig:
    """Merge the configuration layers into a validated ExperimentConfig"""
    if kind not in SWEEP_KINDS:
        raise ConfigError(f"unknown sweep kind '{kind}' (expected one of {sorted(SWEEP_KINDS)})")

    experiments = config_loader.section("experiments")
    metrics_section = config_loader.section("metrics")
    file_values = dict(file_values or {})
    if file_values.get("kind", kind) != kind:
        raise ConfigError(f"sweep file is for kind '{file_values['kind']}', not '{kind}'")
    file_values.pop("kind", None)

    values: Dict[str, Any] = dict(BUILTIN)
    values.update({k: metrics_section[k] for k in ("bin_width", "sigma_ref", "threshold") if k in metrics_section})
    values.update({k: v for k, v in experiments.items() if not isinstance(v, dict)})
    values.update(experiments.get(kind, {}))
    values.update(file_values)

    if quick:
        values["num_networks"] = experiments.get("quick_networks", 20)
        values["sensors"] = min(int(values["sensors"]), int(experiments.get("quick_sensors", 60)))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})

    if kind == ScaleSweep.kind and "sensors" not in experiments.get(kind, {}) and "sensors" not in file_values:
        counts = values.get("sensor_counts") or [values["sensors"]]
        values["sensors"] = int(counts[0])

    try:
        noise_model = NoiseModel(values["noise_model"])
        placement = Placement(config_loader.get("netgen.placement", Placement.UNIT_SQUARE_CENTERED.value))
    except ValueError as e:
        raise ConfigError(str(e)) from e

    base = GenConfig(
        n=values["sensors"],
        m=values["anchors"],
        radio_range=values["radio_range"],
        noise_std=values["noise_std"],
        noise_model=noise_model,
        placement=placement,
        eps_distance=config_loader.get("netgen.eps_distance", 1e-8),
    )
    solver_values = dict(config_loader.section("solver"))
    solver_values.update(file_values.get("solver", {}))
    settings = SolverSettings.from_config(solver_values, **(overrides or {}).get("solver", {}))

    cfg = ExperimentConfig(
        base=base,
        sweep=_sweep(kind, values),
        objectives=_objectives(values.get("objectives")),
        num_networks=values["num_networks"],
        master_seed=values["master_seed"],
        workers=values["workers"],
        record_timing=bool(values["record_timing"]),
        settings=settings,
        metrics=MetricOptions.from_config(),
    )
    logger.debug(f"Experiment {kind}: {cfg}")
    return cfg.check()
