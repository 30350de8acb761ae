"""Handler: radio-range sweep

Small ranges can leave a network without edges; those networks show up as
EmptyGraph records and lower networks_succeeded.
"""
from typing import List

from features.pipeline import Cell
from type_defs import SweepRow


def cells(cfg) -> List[Cell]:
    return [
        Cell(sweep_value=float(r), gen=cfg.base.with_(radio_range=float(r)),
             objectives=tuple(cfg.objectives), metrics=cfg.metrics)
        for r in cfg.sweep.radio_ranges
    ]


def summarize(rows: List[SweepRow]) -> List[str]:
    short = [r for r in rows if r.networks_succeeded < r.num_networks]
    return [
        f"{r.objective} at r={r.sweep_value:g}: {r.networks_succeeded}/{r.num_networks} networks solved"
        for r in short
    ]
