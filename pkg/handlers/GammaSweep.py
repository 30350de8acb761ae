"""Handler: regularization-coefficient sweep

Responsibilities:
- One cell per gamma, each solved with the qp-gamma objective only
- Report the PE change across the two largest gammas (plateau check)
"""
import math
from typing import List

from features.models import PROPOSED_QP_GAMMA, ObjectiveKind
from features.pipeline import Cell
from type_defs import SweepRow


def cells(cfg) -> List[Cell]:
    return [
        Cell(
            sweep_value=float(gamma),
            gen=cfg.base,
            objectives=(ObjectiveKind(PROPOSED_QP_GAMMA, float(gamma)),),
            metrics=cfg.metrics,
        )
        for gamma in cfg.sweep.gammas
    ]


def summarize(rows: List[SweepRow]) -> List[str]:
    ranked = sorted((r for r in rows if not math.isnan(r.mean_pe)), key=lambda r: r.sweep_value)
    if len(ranked) < 2:
        return []
    a, b = ranked[-2], ranked[-1]
    change = abs(a.mean_pe - b.mean_pe) / max(a.mean_pe, b.mean_pe) if max(a.mean_pe, b.mean_pe) > 0 else 0.0
    return [f"plateau: PE {a.mean_pe:.4g} at gamma={a.sweep_value:g} vs {b.mean_pe:.4g} at gamma={b.sweep_value:g} ({100 * change:.1f}% apart)"]
