"""Seeded random streams

All randomness goes through numpy's PCG64 bit generator. A seed is expanded
with SeedSequence into independent per-purpose substreams, so drawing more
noise values never shifts sensor placement.
"""
from typing import Dict, Tuple

import numpy as np

STREAMS: Tuple[str, ...] = ("anchors", "sensors", "noise")


def substreams(seed: int) -> Dict[str, np.random.Generator]:
    """Return one independent Generator per purpose in STREAMS"""
    children = np.random.SeedSequence(int(seed)).spawn(len(STREAMS))
    return {
        name: np.random.Generator(np.random.PCG64(child))
        for name, child in zip(STREAMS, children)
    }


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for network `index` of an experiment"""
    state = np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1, dtype=np.uint64)
    return int(state[0])
