from typing import List
import asyncio
import importlib

from features.pipeline import Cell, run_network
from type_defs import NetworkRecord
from utils.logger import get_logger
from utils.rng import derive_seed

logger = get_logger("router")

FAILED = "Error"


async def route(cfg) -> List[NetworkRecord]:
    """Route an experiment to its sweep handler and run every network

    Args:
        cfg: ExperimentConfig (features.experiments)

    Returns:
        List[NetworkRecord]: ordered by (cell, network index, objective)
        regardless of completion order

    Note: one failing network never aborts the sweep; it is recorded with
    status "Error".
    """
    kind = type(cfg.sweep).__name__
    logger.debug(f"Routing sweep: {kind}")

    # Import handler once per sweep
    try:
        mod = importlib.import_module(f"handlers.{kind}")
    except ImportError as e:
        logger.error(f"Failed to import handler for {kind}: {e}")
        return []
    cells_fn = getattr(mod, "cells", None)
    if cells_fn is None:
        logger.warning(f"Handler {kind} has no 'cells' function")
        return []

    cells: List[Cell] = list(cells_fn(cfg))
    jobs = [(cell, index) for cell in cells for index in range(cfg.num_networks)]
    workers = 1 if getattr(mod, "SEQUENTIAL", False) else max(1, int(cfg.workers))
    logger.info(f"Sweep {kind}: {len(cells)} cells x {cfg.num_networks} networks, {workers} worker(s)")

    gate = asyncio.Semaphore(workers)
    tasks = [_handle_job(cell, index, cfg, gate) for cell, index in jobs]
    results = await asyncio.gather(*tasks, return_exceptions=True)

    records: List[NetworkRecord] = []
    for (cell, index), result in zip(jobs, results):
        if isinstance(result, Exception):
            logger.error(f"Network {index} failed for value {cell.sweep_value}: {result!r}")
            records.extend(_failed_records(cell, index, derive_seed(cfg.master_seed, index)))
        else:
            records.extend(result)

    logger.debug(f"Returning {len(records)} records")
    return records


async def _handle_job(cell: Cell, index: int, cfg, gate: asyncio.Semaphore) -> List[NetworkRecord]:
    """Run one network of one cell in a worker thread"""
    seed = derive_seed(cfg.master_seed, index)
    async with gate:
        return await asyncio.to_thread(run_network, cell, index, seed, cfg.settings, cfg.record_timing)


def _failed_records(cell: Cell, index: int, seed: int) -> List[NetworkRecord]:
    return [
        NetworkRecord(
            sweep_value=cell.sweep_value, objective=str(obj), network_index=index,
            pe=float("nan"), solve_time=float("nan"), iterations=0, status=FAILED,
            variant=cell.variant, seed=seed,
        )
        for obj in cell.objectives
    ]
