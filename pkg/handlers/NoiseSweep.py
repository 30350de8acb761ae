"""Handler: measurement-noise sweep (one cell per noise standard deviation)"""
import math
from collections import defaultdict
from typing import List

from features.pipeline import Cell
from type_defs import SweepRow


def cells(cfg) -> List[Cell]:
    return [
        Cell(sweep_value=float(sigma), gen=cfg.base.with_(noise_std=float(sigma)),
             objectives=tuple(cfg.objectives), metrics=cfg.metrics)
        for sigma in cfg.sweep.noise_stds
    ]


def summarize(rows: List[SweepRow]) -> List[str]:
    by_objective = defaultdict(list)
    for r in rows:
        if not math.isnan(r.mean_pe):
            by_objective[r.objective].append((r.sweep_value, r.mean_pe))
    notes = []
    for objective, points in by_objective.items():
        pes = [pe for _, pe in sorted(points)]
        monotone = all(x <= y for x, y in zip(pes, pes[1:]))
        notes.append(f"{objective}: PE {'nondecreasing' if monotone else 'not monotone'} in noise")
    return notes
