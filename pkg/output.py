"""Output Management: CSV writers + console summaries

CSV is the result contract: header row first, reals with 10 significant
digits, rows in the order they were produced.
"""
import sys
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np
import pandas as pd

from type_defs import NetworkRecord, Point2, SweepRow
from utils.errors import FormatError, InstanceIOError
from utils.logger import get_logger

logger = get_logger("output")

FLOAT_FORMAT = "%.10g"
POSITION_COLUMNS = ["index", "x", "y"]
ERROR_COLUMNS = ["edge_kind", "i", "j_or_k", "error"]
NETWORK_COLUMNS = [
    "sweep_value", "variant", "objective", "network_index", "pe", "solve_time",
    "iterations", "status", "relative_entropy", "tail_fraction", "seed", "v",
]


def _write(df: pd.DataFrame, path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise InstanceIOError(f"cannot write {path}: {e}") from e
    logger.debug(f"Wrote {len(df)} rows to {path}")
    return path


def _read(path, columns: Sequence[str]) -> pd.DataFrame:
    path = Path(path)
    try:
        df = pd.read_csv(path)
    except FileNotFoundError as e:
        raise InstanceIOError(f"file not found: {path}") from e
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FormatError(f"{path}: {e}") from e
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise FormatError(f"{path}: missing columns {missing}", line=1, field=missing[0])
    return df


def sweep_frame(rows: List[SweepRow]) -> pd.DataFrame:
    columns = list(SweepRow.__dataclass_fields__)
    return pd.DataFrame([{c: getattr(r, c) for c in columns} for r in rows], columns=columns)


def network_frame(records: List[NetworkRecord]) -> pd.DataFrame:
    return pd.DataFrame([{c: getattr(r, c) for c in NETWORK_COLUMNS} for r in records], columns=NETWORK_COLUMNS)


def write_sweep(out_dir, kind: str, rows: List[SweepRow], records: List[NetworkRecord]) -> Dict[str, Path]:
    """<kind>_summary.csv (SweepRow per line) and <kind>_networks.csv (raw log)"""
    out_dir = Path(out_dir)
    return {
        "summary": _write(sweep_frame(rows), out_dir / f"{kind}_summary.csv"),
        "networks": _write(network_frame(records), out_dir / f"{kind}_networks.csv"),
    }


def write_positions(path, points: Iterable[Point2]) -> Path:
    pts = list(points)
    df = pd.DataFrame({
        "index": np.arange(len(pts)),
        "x": [p.x for p in pts],
        "y": [p.y for p in pts],
    }, columns=POSITION_COLUMNS)
    return _write(df, path)


def read_positions(path) -> np.ndarray:
    df = _read(path, POSITION_COLUMNS).sort_values("index")
    if list(df["index"]) != list(range(len(df))):
        raise FormatError(f"{path}: index column must run 0..{len(df) - 1}", field="index")
    return df[["x", "y"]].to_numpy(dtype=float)


def write_errors(path, edge_order, errors) -> Path:
    """One line per measured edge in model edge order"""
    errors = np.asarray(errors, dtype=float)
    df = pd.DataFrame({
        "edge_kind": [ref.kind for ref in edge_order],
        "i": [ref.a for ref in edge_order],
        "j_or_k": [ref.b for ref in edge_order],
        "error": errors,
    }, columns=ERROR_COLUMNS)
    return _write(df, path)


def read_errors(path) -> np.ndarray:
    return _read(path, ERROR_COLUMNS)["error"].to_numpy(dtype=float)


def write_frame(path, df: pd.DataFrame) -> Path:
    return _write(df, path)


def _fmt(value) -> str:
    if isinstance(value, float):
        return "nan" if np.isnan(value) else f"{value:.6g}"
    return str(value)


def print_summary(rows: List[SweepRow], notes: Optional[List[str]] = None, stream: TextIO = sys.stdout) -> None:
    """Human-readable sweep table on stdout"""
    df = sweep_frame(rows)
    if df.empty:
        print("(no results)", file=stream)
    else:
        shown = df[["sweep_value", "variant", "objective", "mean_pe", "std_pe",
                    "mean_solve_time", "mean_iterations", "mean_relative_entropy",
                    "mean_tail_fraction", "networks_succeeded"]]
        print(shown.to_string(index=False, formatters={c: _fmt for c in shown.columns}), file=stream)
    for note in notes or []:
        print(note, file=stream)


def emit(fields: Dict[str, object], stream: TextIO = sys.stdout) -> None:
    """key: value lines for single-instance commands"""
    for key, value in fields.items():
        print(f"{key}: {_fmt(value)}", file=stream)
