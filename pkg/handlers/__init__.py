"""Sweep handlers

One module per sweep type, named after its ExperimentConfig sweep class.
Each exposes cells(cfg) -> List[Cell] and summarize(rows) -> List[str];
router.route imports them by name.
"""
