"""experiments: multi-network studies

An ExperimentConfig pairs a base GenConfig with one sweep. Every sweep runs
the same networks: network i is drawn from derive_seed(master_seed, i) no
matter the sweep value or objective. The router fans the (cell, network)
jobs out; this module turns the records into SweepRow aggregates.
"""
import asyncio
import importlib
import math
from dataclasses import dataclass, field, replace
from typing import ClassVar, Dict, List, Optional, Tuple, Type, Union

import numpy as np
import pandas as pd

from conic.solver import SolverSettings
from features.models import BISWAS_YE, LEAST_SQUARES, PROPOSED_QP, ObjectiveKind
from features.pipeline import MetricOptions, solve_instance
from features.netgen import build_measurements, generate_network
from loaders.validator import validate_experiment
from router import route
from type_defs import GenConfig, NetworkRecord, SweepRow
from utils.errors import ConfigError
from utils.logger import get_logger

logger = get_logger("features.experiments")

DEFAULT_OBJECTIVES = (ObjectiveKind(BISWAS_YE), ObjectiveKind(LEAST_SQUARES), ObjectiveKind(PROPOSED_QP))


@dataclass(frozen=True)
class GammaSweep:
    kind: ClassVar[str] = "gamma"
    gammas: Tuple[float, ...]


@dataclass(frozen=True)
class NoiseSweep:
    kind: ClassVar[str] = "noise"
    noise_stds: Tuple[float, ...]


@dataclass(frozen=True)
class RangeSweep:
    kind: ClassVar[str] = "range"
    radio_ranges: Tuple[float, ...]


@dataclass(frozen=True)
class ScaleSweep:
    """Sensor counts; with max_degree every count also runs degree-capped"""
    kind: ClassVar[str] = "scale"
    sensor_counts: Tuple[int, ...]
    max_degree: Optional[int] = None


@dataclass(frozen=True)
class EntropyComparison:
    kind: ClassVar[str] = "entropy"
    bin_width: float = 0.0049
    sigma_ref: float = 0.008
    threshold: float = 0.022


Sweep = Union[GammaSweep, NoiseSweep, RangeSweep, ScaleSweep, EntropyComparison]
SWEEP_KINDS: Dict[str, Type] = {
    cls.kind: cls for cls in (GammaSweep, NoiseSweep, RangeSweep, ScaleSweep, EntropyComparison)
}


@dataclass(frozen=True)
class ExperimentConfig:
    base: GenConfig
    sweep: Sweep
    objectives: Tuple[ObjectiveKind, ...] = DEFAULT_OBJECTIVES
    num_networks: int = 50
    master_seed: int = 0
    workers: int = 1
    record_timing: bool = True
    settings: SolverSettings = field(default_factory=SolverSettings)
    metrics: MetricOptions = field(default_factory=MetricOptions)

    @property
    def kind(self) -> str:
        return self.sweep.kind

    def check(self) -> "ExperimentConfig":
        _, errors = validate_experiment(self)
        errors = errors + self.settings.errors()
        if errors:
            raise ConfigError(errors)
        return self

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


@dataclass(eq=False)
class SweepOutcome:
    kind: str
    rows: List[SweepRow]
    records: List[NetworkRecord]
    notes: List[str] = field(default_factory=list)

    @property
    def all_failed(self) -> bool:
        return not any(r.succeeded for r in self.records)


def records_frame(records: List[NetworkRecord]) -> pd.DataFrame:
    columns = list(NetworkRecord.__dataclass_fields__)
    if not records:
        return pd.DataFrame(columns=columns)
    return pd.DataFrame([{name: getattr(r, name) for name in columns} for r in records], columns=columns)


def aggregate(records: List[NetworkRecord], num_networks: int) -> List[SweepRow]:
    """Means over succeeded networks per (sweep_value, variant, objective)

    Row order follows the first appearance of each group, i.e. the order in
    which the handler listed its cells. std_pe is the population deviation.
    """
    df = records_frame(records)
    if df.empty:
        return []
    df["ok"] = [r.succeeded for r in records]

    rows = []
    for (value, variant, objective), group in df.groupby(["sweep_value", "variant", "objective"], sort=False, dropna=False):
        ok = group[group["ok"]]
        count = int(len(ok))

        def mean(col: str) -> float:
            vals = ok[col].dropna()
            return float(vals.mean()) if len(vals) else math.nan

        rows.append(SweepRow(
            sweep_value=float(value),
            variant=str(variant),
            objective=str(objective),
            mean_pe=mean("pe"),
            std_pe=float(ok["pe"].std(ddof=0)) if count else math.nan,
            mean_solve_time=mean("solve_time"),
            mean_iterations=mean("iterations"),
            mean_relative_entropy=mean("relative_entropy"),
            mean_tail_fraction=mean("tail_fraction"),
            networks_succeeded=count,
            num_networks=num_networks,
        ))
    return rows


def run_sweep(cfg: ExperimentConfig) -> SweepOutcome:
    """Run every (cell, network) job of the sweep and aggregate"""
    cfg.check()
    records = asyncio.run(route(cfg))
    rows = aggregate(records, cfg.num_networks)
    handler = importlib.import_module(f"handlers.{type(cfg.sweep).__name__}")
    notes = list(handler.summarize(rows))
    succeeded = sum(r.succeeded for r in records)
    logger.info(f"Sweep {cfg.kind} finished: {succeeded}/{len(records)} runs succeeded")
    return SweepOutcome(kind=cfg.kind, rows=rows, records=records, notes=notes)


def _require(cfg: ExperimentConfig, sweep_type: Type) -> None:
    if not isinstance(cfg.sweep, sweep_type):
        raise ConfigError(f"expected a {sweep_type.__name__}, got {type(cfg.sweep).__name__}")


def run_gamma_sweep(cfg: ExperimentConfig) -> List[SweepRow]:
    _require(cfg, GammaSweep)
    return run_sweep(cfg).rows


def run_noise_sweep(cfg: ExperimentConfig) -> List[SweepRow]:
    _require(cfg, NoiseSweep)
    return run_sweep(cfg).rows


def run_range_sweep(cfg: ExperimentConfig) -> List[SweepRow]:
    _require(cfg, RangeSweep)
    return run_sweep(cfg).rows


def run_scale_sweep(cfg: ExperimentConfig) -> List[SweepRow]:
    _require(cfg, ScaleSweep)
    return run_sweep(cfg).rows


def run_entropy_comparison(cfg: ExperimentConfig) -> List[SweepRow]:
    _require(cfg, EntropyComparison)
    return run_sweep(cfg).rows


def loglog_slope(sizes, times) -> float:
    """Least-squares slope of log(time) against log(size); nan if underdetermined"""
    x = np.asarray(sizes, dtype=float)
    y = np.asarray(times, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0)
    if np.count_nonzero(keep) < 2 or np.unique(x[keep]).size < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)


def position_dump(gen: GenConfig, objectives, settings: Optional[SolverSettings] = None) -> pd.DataFrame:
    """True against estimated coordinates of one network, per objective

    Columns: objective, status, index, x, y, x_hat, y_hat. Objectives whose
    solve fails contribute rows with empty estimates.
    """
    truth = generate_network(gen)
    graph = build_measurements(truth, gen)
    X = truth.sensor_array()
    frames = []
    for objective in objectives:
        outcome = solve_instance(graph, objective, settings, truth)
        est = outcome.positions.array() if outcome.positions is not None else np.full_like(X, np.nan)
        frames.append(pd.DataFrame({
            "objective": str(objective),
            "status": outcome.result.status.value,
            "index": np.arange(truth.n),
            "x": X[:, 0],
            "y": X[:, 1],
            "x_hat": est[:, 0],
            "y_hat": est[:, 1],
        }))
        pe = outcome.accuracy.pe if outcome.accuracy is not None else math.nan
        logger.info(f"Position dump {objective}: {outcome.result.status.value} pe={pe:.4g}")
    return pd.concat(frames, ignore_index=True)
