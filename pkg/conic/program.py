"""Standard-form cone programs

    minimize    c'x
    subject to  A x = b,  x in K_1 x K_2 x ... x K_p

The variable vector is partitioned, in order, by the cone blocks. PSD blocks
hold svec(X). ProgramBuilder is the only way models create programs: it hands
out index ranges per named block and accumulates sparse rows.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sps

from conic.svec import svec_length


class ConeKind(str, Enum):
    NONNEG = "nonneg"
    SECOND_ORDER = "soc"
    PSD = "psd"


@dataclass(frozen=True)
class ConeBlock:
    """One cone factor: NonNeg(k), SecondOrder(d) or PSD(s)

    `size` is k, d or s respectively; `slots` is the number of scalar
    variables the block occupies.
    """

    kind: ConeKind
    size: int

    @classmethod
    def nonneg(cls, k: int) -> "ConeBlock":
        return cls(ConeKind.NONNEG, int(k))

    @classmethod
    def second_order(cls, d: int) -> "ConeBlock":
        return cls(ConeKind.SECOND_ORDER, int(d))

    @classmethod
    def psd(cls, s: int) -> "ConeBlock":
        return cls(ConeKind.PSD, int(s))

    @property
    def slots(self) -> int:
        if self.kind == ConeKind.PSD:
            return svec_length(self.size)
        return self.size

    @property
    def degree(self) -> int:
        """Barrier degree (rank of the Jordan algebra)"""
        if self.kind == ConeKind.NONNEG:
            return self.size
        if self.kind == ConeKind.SECOND_ORDER:
            return 1
        return self.size

    @property
    def min_size(self) -> int:
        return 2 if self.kind == ConeKind.SECOND_ORDER else 1

    def __str__(self) -> str:
        return f"{self.kind.value}({self.size})"


@dataclass(frozen=True, eq=False)
class EqRow:
    """Sparse equality row: sum(vals * x[cols]) == rhs"""

    cols: np.ndarray
    vals: np.ndarray
    rhs: float


@dataclass(frozen=True, eq=False)
class ConeProgram:
    num_vars: int
    objective: np.ndarray
    rows: Tuple[EqRow, ...]
    blocks: Tuple[ConeBlock, ...]
    names: Dict[str, Tuple[int, int]] = field(default_factory=dict)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def block_offsets(self) -> List[int]:
        offsets, pos = [], 0
        for blk in self.blocks:
            offsets.append(pos)
            pos += blk.slots
        return offsets

    def degree(self) -> int:
        return sum(blk.degree for blk in self.blocks)

    def rhs(self) -> np.ndarray:
        return np.array([r.rhs for r in self.rows], dtype=float)

    def matrix(self) -> sps.csr_matrix:
        """A as CSR (duplicate entries would be summed; validate() rejects them)"""
        if not self.rows:
            return sps.csr_matrix((0, self.num_vars))
        indptr = np.zeros(len(self.rows) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([r.cols.size for r in self.rows])
        indices = np.concatenate([r.cols for r in self.rows]).astype(np.int64)
        data = np.concatenate([r.vals for r in self.rows]).astype(float)
        A = sps.csr_matrix((data, indices, indptr), shape=(len(self.rows), self.num_vars))
        A.sum_duplicates()
        return A

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.objective @ x)

    def slice(self, name: str) -> slice:
        lo, hi = self.names[name]
        return slice(lo, hi)


def validate(p: ConeProgram) -> List[str]:
    """Structural diagnostics; empty list means the program is well formed"""
    diagnostics: List[str] = []

    if not p.blocks:
        diagnostics.append("blocks: program has no cone blocks")
    for idx, blk in enumerate(p.blocks):
        if blk.size < blk.min_size:
            diagnostics.append(f"blocks[{idx}]: {blk} smaller than minimum size {blk.min_size}")

    total = sum(blk.slots for blk in p.blocks)
    if total != p.num_vars:
        diagnostics.append(f"blocks: slot sizes sum to {total}, num_vars is {p.num_vars}")

    if np.shape(p.objective) != (p.num_vars,):
        diagnostics.append(f"objective: length {np.size(p.objective)} != num_vars {p.num_vars}")
    elif not np.all(np.isfinite(p.objective)):
        diagnostics.append("objective: non-finite coefficient")

    for r_idx, row in enumerate(p.rows):
        cols = np.asarray(row.cols)
        if cols.shape != np.shape(row.vals):
            diagnostics.append(f"rows[{r_idx}]: {cols.size} columns but {np.size(row.vals)} values")
            continue
        bad = cols[(cols < 0) | (cols >= p.num_vars)]
        if bad.size:
            diagnostics.append(f"rows[{r_idx}]: column index {int(bad[0])} out of range [0, {p.num_vars})")
        uniq, counts = np.unique(cols, return_counts=True)
        if np.any(counts > 1):
            diagnostics.append(f"rows[{r_idx}]: duplicate coefficient for column {int(uniq[counts > 1][0])}")
        if not np.all(np.isfinite(row.vals)) or not np.isfinite(row.rhs):
            diagnostics.append(f"rows[{r_idx}]: non-finite coefficient or rhs")

    for name, (lo, hi) in p.names.items():
        if not (0 <= lo <= hi <= p.num_vars):
            diagnostics.append(f"names['{name}']: range [{lo}, {hi}) outside [0, {p.num_vars}]")

    return diagnostics


class ProgramBuilder:
    """Accumulates blocks, rows and objective terms for a ConeProgram"""

    def __init__(self):
        self._blocks: List[ConeBlock] = []
        self._names: Dict[str, Tuple[int, int]] = {}
        self._rows: List[EqRow] = []
        self._objective: Dict[int, float] = {}
        self._num_vars = 0

    @property
    def num_vars(self) -> int:
        return self._num_vars

    def add_block(self, name: str, block: ConeBlock) -> int:
        """Append a block; returns the offset of its first slot"""
        if name in self._names:
            raise ValueError(f"block name '{name}' already used")
        offset = self._num_vars
        self._blocks.append(block)
        self._num_vars += block.slots
        self._names[name] = (offset, self._num_vars)
        return offset

    def name_range(self, name: str, lo: int, hi: int) -> None:
        self._names[name] = (lo, hi)

    def add_row(self, cols: Sequence[int], vals: Sequence[float], rhs: float) -> int:
        """Add an equality row; returns its index"""
        self._rows.append(EqRow(
            cols=np.asarray(cols, dtype=np.int64),
            vals=np.asarray(vals, dtype=float),
            rhs=float(rhs),
        ))
        return len(self._rows) - 1

    def add_objective(self, col: int, coef: float) -> None:
        self._objective[col] = self._objective.get(col, 0.0) + float(coef)

    def build(self) -> ConeProgram:
        c = np.zeros(self._num_vars)
        for col, coef in self._objective.items():
            c[col] = coef
        return ConeProgram(
            num_vars=self._num_vars,
            objective=c,
            rows=tuple(self._rows),
            blocks=tuple(self._blocks),
            names=dict(self._names),
        )


def dump_program(p: ConeProgram, precision: int = 17) -> str:
    """Plain-text form for diffing programs across implementations

    Layout: header line, one `block` line per cone, `c` lines for nonzero
    objective entries, then one `row` line per equality (rhs first, then
    col:val pairs sorted by column).
    """
    fmt = f"{{:.{precision}g}}"
    lines = [f"program vars={p.num_vars} rows={p.num_rows} blocks={len(p.blocks)}"]
    for offset, blk in zip(p.block_offsets(), p.blocks):
        lines.append(f"block {blk.kind.value} {blk.size} offset={offset}")
    for name, (lo, hi) in sorted(p.names.items(), key=lambda kv: (kv[1], kv[0])):
        lines.append(f"name {name} [{lo},{hi})")
    for col in np.flatnonzero(p.objective):
        lines.append(f"c {col} {fmt.format(p.objective[col])}")
    for r_idx, row in enumerate(p.rows):
        order = np.argsort(row.cols, kind="stable")
        terms = " ".join(f"{int(row.cols[k])}:{fmt.format(row.vals[k])}" for k in order)
        lines.append(f"row {r_idx} rhs={fmt.format(row.rhs)} {terms}")
    return "\n".join(lines) + "\n"
