"""pipeline: generate -> build -> solve -> measure for one network

Responsibilities:
- solve_instance: one graph, one objective, everything the CLI prints
- run_network: one seeded network under every objective of a sweep cell,
  turned into NetworkRecord rows; failures become status values, never
  exceptions
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from conic.solver import SolveResult, SolverSettings, solve
from features.metrics import AccuracyReport, entropy_report, position_error, tail_fraction
from features.models import (
    EstimatedPositions, LocalizationModel, ObjectiveKind, build_model,
    extract_errors, extract_positions,
)
from features.netgen import build_measurements, generate_network
from loaders import config as config_loader
from type_defs import GenConfig, MeasurementGraph, NetworkTruth, NetworkRecord
from utils.errors import BadStatus, EmptyGraph
from utils.logger import get_logger

logger = get_logger("features.pipeline")

EMPTY_GRAPH = "EmptyGraph"
BAD_STATUS = "BadStatus"


@dataclass(frozen=True)
class MetricOptions:
    bin_width: float = 0.0049
    sigma_ref: float = 0.008
    threshold: float = 0.022
    q_floor: float = 1e-12

    @classmethod
    def from_config(cls, **overrides) -> "MetricOptions":
        section = config_loader.section("metrics")
        values = {name: section[name] for name in cls.__dataclass_fields__ if name in section}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class Cell:
    """One sweep point: every network of the sweep is run under this setting"""

    sweep_value: float
    gen: GenConfig
    objectives: Tuple[ObjectiveKind, ...]
    metrics: MetricOptions = field(default_factory=MetricOptions)
    variant: str = ""


@dataclass(eq=False)
class SolveOutcome:
    model: LocalizationModel
    result: SolveResult
    positions: Optional[EstimatedPositions] = None
    errors: Optional[np.ndarray] = None
    accuracy: Optional[AccuracyReport] = None


def solve_instance(graph: MeasurementGraph, objective: ObjectiveKind,
                   settings: Optional[SolverSettings] = None,
                   truth: Optional[NetworkTruth] = None) -> SolveOutcome:
    """Build and solve one model; positions and errors only for usable results"""
    settings = settings or SolverSettings()
    model = build_model(graph, objective)
    result = solve(model.program, settings)
    outcome = SolveOutcome(model=model, result=result)
    if not result.ok:
        return outcome

    outcome.positions = extract_positions(model, result)
    outcome.errors = extract_errors(model, result, settings.tol_feas)
    if truth is not None:
        outcome.accuracy = position_error(truth, outcome.positions, outcome.errors)
    return outcome


def _failed(cell: Cell, objective: ObjectiveKind, index: int, seed: int, status: str,
            v: int = 0, solve_time: float = math.nan, iterations: int = 0) -> NetworkRecord:
    return NetworkRecord(
        sweep_value=cell.sweep_value, objective=str(objective), network_index=index,
        pe=math.nan, solve_time=solve_time, iterations=iterations, status=status,
        variant=cell.variant, seed=seed, v=v,
    )


def run_network(cell: Cell, index: int, seed: int, settings: SolverSettings,
                record_timing: bool = True) -> List[NetworkRecord]:
    """All objectives of `cell` on network `index` (drawn from `seed`)"""
    gen = cell.gen.with_(seed=seed)
    truth = generate_network(gen)
    try:
        graph = build_measurements(truth, gen)
    except EmptyGraph as e:
        logger.warning(f"Network {index} (value {cell.sweep_value}): {e}")
        return [_failed(cell, obj, index, seed, EMPTY_GRAPH) for obj in cell.objectives]

    records = []
    for objective in cell.objectives:
        try:
            outcome = solve_instance(graph, objective, settings, truth)
        except BadStatus as e:
            logger.error(f"Network {index} {objective}: {e}")
            records.append(_failed(cell, objective, index, seed, BAD_STATUS, v=graph.v))
            continue
        result = outcome.result
        elapsed = result.wall_time if record_timing else 0.0

        if outcome.accuracy is None:
            records.append(_failed(cell, objective, index, seed, result.status.value, v=graph.v,
                                   solve_time=elapsed, iterations=result.iterations))
            logger.info(f"Network {index} {objective} value={cell.sweep_value}: {result.status.value}")
            continue

        report = entropy_report(outcome.errors, cell.metrics.bin_width, cell.metrics.sigma_ref, cell.metrics.q_floor)
        records.append(NetworkRecord(
            sweep_value=cell.sweep_value,
            objective=str(objective),
            network_index=index,
            pe=outcome.accuracy.pe,
            solve_time=elapsed,
            iterations=result.iterations,
            status=result.status.value,
            relative_entropy=report.d_bits,
            tail_fraction=tail_fraction(outcome.errors, cell.metrics.threshold),
            variant=cell.variant,
            seed=seed,
            v=graph.v,
        ))
        logger.info(
            f"Network {index} {objective} value={cell.sweep_value}{' ' + cell.variant if cell.variant else ''}: "
            f"{result.status.value} pe={outcome.accuracy.pe:.4g} it={result.iterations} t={elapsed:.3f}s"
        )
    return records
