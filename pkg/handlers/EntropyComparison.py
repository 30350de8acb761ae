"""Handler: relative entropy of squared-distance errors per objective"""
import math
from typing import List

from features.pipeline import Cell, MetricOptions
from type_defs import SweepRow


def cells(cfg) -> List[Cell]:
    metrics = MetricOptions(
        bin_width=cfg.sweep.bin_width,
        sigma_ref=cfg.sweep.sigma_ref,
        threshold=cfg.sweep.threshold,
        q_floor=cfg.metrics.q_floor,
    )
    return [Cell(sweep_value=float(cfg.base.noise_std), gen=cfg.base,
                 objectives=tuple(cfg.objectives), metrics=metrics)]


def summarize(rows: List[SweepRow]) -> List[str]:
    ranked = sorted(
        (r for r in rows if not math.isnan(r.mean_relative_entropy)),
        key=lambda r: r.mean_relative_entropy,
    )
    if not ranked:
        return []
    order = " <= ".join(f"{r.objective} ({r.mean_relative_entropy:.4f} bits)" for r in ranked)
    return [f"relative entropy: {order}"]
