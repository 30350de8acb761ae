"""Handler: sensor-count scaling

Responsibilities:
- One cell per sensor count; with max_degree set, a second degree-capped
  cell per count (variant "cap=<k>")
- Report the log-log slope of mean solve time against n per objective and
  variant

Networks run one at a time so solve times are not skewed by contention.
"""
from collections import defaultdict
from typing import List

from features.experiments import loglog_slope
from features.pipeline import Cell
from type_defs import SweepRow

SEQUENTIAL = True


def cap_variant(max_degree: int) -> str:
    return f"cap={max_degree}"


def cells(cfg) -> List[Cell]:
    out = []
    for n in cfg.sweep.sensor_counts:
        gen = cfg.base.with_(n=int(n), max_degree=None)
        out.append(Cell(sweep_value=float(n), gen=gen, objectives=tuple(cfg.objectives), metrics=cfg.metrics))
        if cfg.sweep.max_degree is not None:
            out.append(Cell(
                sweep_value=float(n),
                gen=gen.with_(max_degree=int(cfg.sweep.max_degree)),
                objectives=tuple(cfg.objectives),
                metrics=cfg.metrics,
                variant=cap_variant(cfg.sweep.max_degree),
            ))
    return out


def summarize(rows: List[SweepRow]) -> List[str]:
    series = defaultdict(list)
    for r in rows:
        series[(r.objective, r.variant)].append((r.sweep_value, r.mean_solve_time))
    notes = []
    for (objective, variant), points in series.items():
        sizes, times = zip(*sorted(points))
        label = f"{objective} {variant}".strip()
        notes.append(f"{label}: time ~ n^{loglog_slope(sizes, times):.2f}")
    return notes
