"""Configuration validators

Same contract for every validator: return (ok, errors) and never raise, so
callers can collect every problem in one pass and report them together.
"""

import math
from typing import Any, List, Tuple

from type_defs import GenConfig, NoiseModel, Placement


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_real(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def validate_gen_config(cfg: GenConfig, prefix: str = "") -> Tuple[bool, List[str]]:
    """Check a GenConfig against its invariants"""
    errors: List[str] = []
    p = f"[{prefix}] " if prefix else ""

    if not _is_int(cfg.n) or cfg.n < 1:
        errors.append(f"{p}n must be an integer >= 1 (got {cfg.n!r})")
    if not _is_int(cfg.m) or cfg.m < 0:
        errors.append(f"{p}m must be an integer >= 0 (got {cfg.m!r})")
    if not _is_real(cfg.radio_range) or cfg.radio_range <= 0:
        errors.append(f"{p}radio_range must be > 0 (got {cfg.radio_range!r})")
    if not _is_real(cfg.noise_std) or cfg.noise_std < 0:
        errors.append(f"{p}noise_std must be >= 0 (got {cfg.noise_std!r})")
    if not isinstance(cfg.noise_model, NoiseModel):
        errors.append(f"{p}noise_model must be one of {[m.value for m in NoiseModel]}")
    if not isinstance(cfg.placement, Placement):
        errors.append(f"{p}placement must be one of {[m.value for m in Placement]}")
    if cfg.max_degree is not None and (not _is_int(cfg.max_degree) or cfg.max_degree < 1):
        errors.append(f"{p}max_degree must be an integer >= 1 when set (got {cfg.max_degree!r})")
    if not _is_int(cfg.seed) or not (0 <= cfg.seed < 2 ** 64):
        errors.append(f"{p}seed must be a 64-bit unsigned integer (got {cfg.seed!r})")
    if not _is_real(cfg.eps_distance) or cfg.eps_distance <= 0:
        errors.append(f"{p}eps_distance must be > 0")

    return (len(errors) == 0, errors)


def validate_positive_list(name: str, values: Any, allow_zero: bool = False) -> List[str]:
    """Errors for a sweep value list (nonempty, finite, positive)"""
    if not isinstance(values, (list, tuple)) or len(values) == 0:
        return [f"{name} must be a nonempty list"]
    errors = []
    for i, value in enumerate(values):
        if not _is_real(value):
            errors.append(f"{name}[{i}] must be a finite number (got {value!r})")
        elif value < 0 or (value == 0 and not allow_zero):
            bound = ">= 0" if allow_zero else "> 0"
            errors.append(f"{name}[{i}] must be {bound} (got {value!r})")
    return errors


def validate_experiment(cfg) -> Tuple[bool, List[str]]:
    """Check an ExperimentConfig (features.experiments) against its invariants"""
    from features.experiments import (
        EntropyComparison, GammaSweep, NoiseSweep, RangeSweep, ScaleSweep,
    )

    errors: List[str] = []
    if not _is_int(cfg.num_networks) or cfg.num_networks < 1:
        errors.append(f"num_networks must be >= 1 (got {cfg.num_networks!r})")
    if not _is_int(cfg.master_seed) or not (0 <= cfg.master_seed < 2 ** 64):
        errors.append("master_seed must be a 64-bit unsigned integer")
    if not _is_int(cfg.workers) or cfg.workers < 1:
        errors.append(f"workers must be >= 1 (got {cfg.workers!r})")

    _, base_errors = validate_gen_config(cfg.base, prefix="base")
    errors.extend(base_errors)

    sweep = cfg.sweep
    if isinstance(sweep, GammaSweep):
        errors.extend(validate_positive_list("gammas", sweep.gammas))
    elif isinstance(sweep, NoiseSweep):
        errors.extend(validate_positive_list("noise_stds", sweep.noise_stds, allow_zero=True))
    elif isinstance(sweep, RangeSweep):
        errors.extend(validate_positive_list("radio_ranges", sweep.radio_ranges))
    elif isinstance(sweep, ScaleSweep):
        errors.extend(validate_positive_list("sensor_counts", sweep.sensor_counts))
        if any(not _is_int(n) for n in sweep.sensor_counts):
            errors.append("sensor_counts must be integers")
        if sweep.max_degree is not None and (not _is_int(sweep.max_degree) or sweep.max_degree < 1):
            errors.append("max_degree must be an integer >= 1 when set")
    elif isinstance(sweep, EntropyComparison):
        for name in ("bin_width", "sigma_ref", "threshold"):
            value = getattr(sweep, name)
            if not _is_real(value) or value <= 0:
                errors.append(f"{name} must be > 0 (got {value!r})")
    else:
        errors.append(f"unsupported sweep type: {type(sweep).__name__}")

    if not isinstance(sweep, GammaSweep) and not cfg.objectives:
        errors.append("objectives must be a nonempty list")

    return (len(errors) == 0, errors)
