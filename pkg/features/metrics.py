"""metrics: accuracy and error-distribution measures

Responsibilities:
- Position error (PE) between true and estimated sensor coordinates
- Zero-centered histograms of signed squared-distance errors
- Discretized zero-mean Gaussian reference and relative entropy in bits
- Tail and interval fractions, error moments
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import ndtr, rel_entr

from type_defs import NetworkTruth
from utils.errors import EmptyInput, LengthMismatch, NotNormalized
from utils.logger import get_logger

logger = get_logger("features.metrics")

Q_FLOOR = 1e-12
NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ErrorHistogram:
    """Contiguous half-open bins [lo, hi) of width bin_width, zero bin centered"""

    bin_width: float
    edges: np.ndarray
    counts: np.ndarray
    probabilities: np.ndarray

    @property
    def bins(self) -> Tuple[Tuple[float, float], ...]:
        return tuple(zip(self.edges[:-1].tolist(), self.edges[1:].tolist()))

    @property
    def num_bins(self) -> int:
        return int(self.counts.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True, eq=False)
class RelativeEntropyReport:
    d_bits: float
    p: np.ndarray
    q: np.ndarray
    sigma_ref: float
    histogram: Optional[ErrorHistogram] = None


@dataclass(frozen=True, eq=False)
class AccuracyReport:
    pe: float
    per_sensor_errors: np.ndarray
    f1: float = math.nan
    f2: float = math.nan


@dataclass(frozen=True)
class ErrorMoments:
    """Mean (F1) and variance (F2) of signed and absolute errors"""

    f1: float
    f2: float
    f1_abs: float
    f2_abs: float


def _as_errors(errors) -> np.ndarray:
    arr = np.asarray(errors, dtype=float).ravel()
    if arr.size == 0:
        raise EmptyInput("no errors given")
    return arr


def error_moments(errors) -> ErrorMoments:
    e = _as_errors(errors)
    a = np.abs(e)
    return ErrorMoments(
        f1=float(e.mean()), f2=float(np.mean((e - e.mean()) ** 2)),
        f1_abs=float(a.mean()), f2_abs=float(np.mean((a - a.mean()) ** 2)),
    )


def position_error(truth: NetworkTruth, est, errors=None) -> AccuracyReport:
    """Mean Euclidean distance between true and estimated sensors

    `est` is an EstimatedPositions or an (n, 2) array. When signed edge
    errors are passed, their F1/F2 are attached to the report.
    """
    X = truth.sensor_array()
    Xh = est.array() if hasattr(est, "array") else np.asarray(est, dtype=float).reshape(-1, 2)
    if X.shape != Xh.shape:
        raise LengthMismatch(f"truth has {X.shape[0]} sensors, estimate has {Xh.shape[0]}")
    if X.shape[0] == 0:
        raise EmptyInput("no sensors to compare")

    per_sensor = np.linalg.norm(X - Xh, axis=1)
    f1 = f2 = math.nan
    if errors is not None and np.size(errors):
        moments = error_moments(errors)
        f1, f2 = moments.f1, moments.f2
    return AccuracyReport(pe=float(per_sensor.mean()), per_sensor_errors=per_sensor, f1=f1, f2=f2)


def histogram(errors, bin_width: float) -> ErrorHistogram:
    """Bin k covers [(k - 1/2) w, (k + 1/2) w); bins run symmetrically -K..K"""
    e = _as_errors(errors)
    if not (bin_width > 0 and math.isfinite(bin_width)):
        raise ValueError(f"bin_width must be > 0 (got {bin_width!r})")
    if not np.all(np.isfinite(e)):
        raise ValueError("errors contain non-finite values")

    K = int(np.max(np.abs(np.floor(e / bin_width + 0.5))))
    # bin against the edges actually reported; e / w can round across an edge
    while True:
        edges = (np.arange(-K, K + 2) - 0.5) * bin_width
        idx = np.searchsorted(edges, e, side="right") - 1
        if idx.min() >= 0 and idx.max() <= 2 * K:
            break
        K += 1
    counts = np.bincount(idx, minlength=2 * K + 1)
    return ErrorHistogram(
        bin_width=float(bin_width),
        edges=edges,
        counts=counts,
        probabilities=counts / e.size,
    )


def discretized_gaussian(edges: Sequence[float], sigma: float, q_floor: float = Q_FLOOR) -> np.ndarray:
    """Zero-mean Gaussian mass per bin, floored and renormalized to sum 1

    Bins right of zero use survival-function differences so mirrored bins
    get bit-identical mass.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must be strictly increasing with at least one bin")
    if not (sigma > 0):
        raise ValueError(f"sigma must be > 0 (got {sigma!r})")

    lo, hi = edges[:-1] / sigma, edges[1:] / sigma
    mass = np.where(
        lo >= 0,
        ndtr(-lo) - ndtr(-hi),
        np.where(hi <= 0, ndtr(hi) - ndtr(lo), 1.0 - ndtr(lo) - ndtr(-hi)),
    )
    mass = np.maximum(mass, q_floor)
    return mass / mass.sum()


def _check_distribution(name: str, x: np.ndarray) -> None:
    if np.any(x < 0) or abs(float(x.sum()) - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"{name} must be nonnegative and sum to 1 (sum={float(x.sum()):.12g})")


def relative_entropy(p, q, q_floor: float = Q_FLOOR) -> float:
    """D(p || q) in bits over bins with p > 0, q floored at q_floor"""
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    if p.size != q.size:
        raise LengthMismatch(f"p has {p.size} bins, q has {q.size}")
    _check_distribution("p", p)
    _check_distribution("q", q)
    d = float(np.sum(rel_entr(p, np.maximum(q, q_floor)))) / math.log(2.0)
    return max(d, 0.0)


def tail_fraction(errors, threshold: float) -> float:
    e = _as_errors(errors)
    return float(np.count_nonzero(np.abs(e) > threshold)) / e.size


def interval_fraction(errors, lo: float, hi: float) -> float:
    """Share of errors inside [lo, hi)"""
    e = _as_errors(errors)
    return float(np.count_nonzero((e >= lo) & (e < hi))) / e.size


def entropy_report(errors, bin_width: float, sigma_ref: float, q_floor: float = Q_FLOOR) -> RelativeEntropyReport:
    hist = histogram(errors, bin_width)
    q = discretized_gaussian(hist.edges, sigma_ref, q_floor)
    d = relative_entropy(hist.probabilities, q, q_floor)
    logger.debug(f"Relative entropy {d:.4f} bits over {hist.num_bins} bins")
    return RelativeEntropyReport(d_bits=d, p=hist.probabilities, q=q, sigma_ref=float(sigma_ref), histogram=hist)


def histogram_frame(report: RelativeEntropyReport) -> pd.DataFrame:
    """Columns bin_lo, bin_hi, count, p, q"""
    hist = report.histogram
    return pd.DataFrame({
        "bin_lo": hist.edges[:-1],
        "bin_hi": hist.edges[1:],
        "count": hist.counts,
        "p": report.p,
        "q": report.q,
    })
