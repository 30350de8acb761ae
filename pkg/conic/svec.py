"""Scaled symmetric vectorization

svec stacks the upper triangle of a symmetric matrix row by row and multiplies
off-diagonal entries by sqrt(2), so <svec(A), svec(B)> == trace(A B).
smat(svec(M)) returns the diagonal bit for bit; each off-diagonal entry goes
through one multiply and one divide by sqrt(2), so it comes back within 2 ulp.
The batched variants work on a leading stack axis.
"""
import math
from functools import lru_cache
from typing import Tuple

import numpy as np

from utils.errors import DimensionError

SQRT2 = math.sqrt(2.0)
SYMMETRY_TOL = 1e-12


def svec_length(side: int) -> int:
    return side * (side + 1) // 2


def triangular_side(length: int) -> int:
    """Side s with s(s+1)/2 == length, DimensionError otherwise"""
    side = int((math.isqrt(8 * length + 1) - 1) // 2)
    if length < 1 or svec_length(side) != length:
        raise DimensionError(f"length {length} is not triangular")
    return side


@lru_cache(maxsize=64)
def _layout(side: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, cols = np.triu_indices(side)
    scale = np.where(rows == cols, 1.0, SQRT2)
    rows.setflags(write=False)
    cols.setflags(write=False)
    scale.setflags(write=False)
    return rows, cols, scale


def svec_index(side: int, i: int, j: int) -> int:
    """Position of entry (i, j) of a side x side matrix in its svec"""
    if i > j:
        i, j = j, i
    # rows before i contribute side, side-1, ... entries
    return i * side - i * (i - 1) // 2 + (j - i)


def svec(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"svec needs a square matrix, got shape {M.shape}")
    if not np.allclose(M, M.T, rtol=0.0, atol=SYMMETRY_TOL):
        raise DimensionError("svec needs a symmetric matrix")
    rows, cols, scale = _layout(M.shape[0])
    return M[rows, cols] * scale


def smat(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"smat needs a vector, got shape {v.shape}")
    side = triangular_side(v.size)
    rows, cols, scale = _layout(side)
    M = np.zeros((side, side))
    M[rows, cols] = v / scale
    M[cols, rows] = v / scale
    return M


def svec_batch(Ms: np.ndarray) -> np.ndarray:
    """(k, s, s) -> (k, s(s+1)/2); symmetry is assumed, not checked"""
    rows, cols, scale = _layout(Ms.shape[-1])
    return Ms[:, rows, cols] * scale


def smat_batch(V: np.ndarray, side: int) -> np.ndarray:
    """(k, s(s+1)/2) -> (k, s, s)"""
    rows, cols, scale = _layout(side)
    out = np.zeros((V.shape[0], side, side))
    vals = V / scale
    out[:, rows, cols] = vals
    out[:, cols, rows] = vals
    return out
