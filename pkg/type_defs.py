"""Shared network types

Everything here is frozen: a generated network or a loaded instance is never
mutated, so the same object can be handed to several builders or threads.
Coordinates are stored as tuples of Point2 (field-for-field comparable);
`*_array()` helpers give the numpy view the numeric code works on.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class NoiseModel(str, Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


class Placement(str, Enum):
    # [-0.5, 0.5]^2
    UNIT_SQUARE_CENTERED = "unit_square_centered"


PLACEMENT_BOUNDS = {
    Placement.UNIT_SQUARE_CENTERED: (-0.5, 0.5),
}


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


def points_array(points: Tuple[Point2, ...]) -> np.ndarray:
    """(k, 2) array view of a point tuple"""
    if not points:
        return np.zeros((0, 2))
    return np.array([p.as_tuple() for p in points], dtype=float)


def points_from_array(arr: np.ndarray) -> Tuple[Point2, ...]:
    return tuple(Point2(float(row[0]), float(row[1])) for row in np.asarray(arr, dtype=float).reshape(-1, 2))


@dataclass(frozen=True)
class NetworkTruth:
    """Ground-truth anchor and sensor coordinates"""

    anchors: Tuple[Point2, ...]
    sensors: Tuple[Point2, ...]

    @property
    def n(self) -> int:
        return len(self.sensors)

    @property
    def m(self) -> int:
        return len(self.anchors)

    def anchor_array(self) -> np.ndarray:
        return points_array(self.anchors)

    def sensor_array(self) -> np.ndarray:
        return points_array(self.sensors)

    def translated(self, dx: float, dy: float) -> "NetworkTruth":
        return NetworkTruth(
            anchors=tuple(Point2(p.x + dx, p.y + dy) for p in self.anchors),
            sensors=tuple(Point2(p.x + dx, p.y + dy) for p in self.sensors),
        )


@dataclass(frozen=True)
class SensorEdge:
    """Measured sensor-sensor distance, i < j"""
    i: int
    j: int
    d_hat: float


@dataclass(frozen=True)
class AnchorEdge:
    """Measured distance between sensor j and anchor k"""
    j: int
    k: int
    d_hat: float


@dataclass(frozen=True)
class MeasurementGraph:
    """Connectivity sets N_s / N_a with their noisy distances

    The anchor coordinates travel with the graph: they are known to the
    localizer and every model needs them.
    """

    n: int
    m: int
    anchors: Tuple[Point2, ...]
    sensor_edges: Tuple[SensorEdge, ...]
    anchor_edges: Tuple[AnchorEdge, ...]
    radio_range: float
    noise_std: float = 0.0
    noise_model: NoiseModel = NoiseModel.ADDITIVE
    # in-range sensor pairs dropped by a degree cap: unmeasured but not far
    pruned_pairs: Tuple[Tuple[int, int], ...] = ()

    @property
    def v(self) -> int:
        """Number of measured distances |N_s| + |N_a|"""
        return len(self.sensor_edges) + len(self.anchor_edges)

    def anchor_array(self) -> np.ndarray:
        return points_array(self.anchors)

    def sensor_degrees(self) -> np.ndarray:
        """Sensor-to-sensor degree of every sensor"""
        deg = np.zeros(self.n, dtype=int)
        for e in self.sensor_edges:
            deg[e.i] += 1
            deg[e.j] += 1
        return deg

    def translated(self, dx: float, dy: float) -> "MeasurementGraph":
        """Same measurements with the anchors shifted (a rigid move of the scene)"""
        return MeasurementGraph(
            n=self.n,
            m=self.m,
            anchors=tuple(Point2(p.x + dx, p.y + dy) for p in self.anchors),
            sensor_edges=self.sensor_edges,
            anchor_edges=self.anchor_edges,
            radio_range=self.radio_range,
            noise_std=self.noise_std,
            noise_model=self.noise_model,
            pruned_pairs=self.pruned_pairs,
        )


@dataclass(frozen=True)
class GenConfig:
    """Random network generation settings"""

    n: int
    m: int
    radio_range: float
    noise_std: float = 0.0
    noise_model: NoiseModel = NoiseModel.ADDITIVE
    max_degree: Optional[int] = None
    seed: int = 0
    placement: Placement = Placement.UNIT_SQUARE_CENTERED
    eps_distance: float = field(default=1e-8, compare=False)

    def with_(self, **changes) -> "GenConfig":
        from dataclasses import replace
        return replace(self, **changes)


SUCCEEDED_STATUSES = ("Optimal", "MaxIterations")


@dataclass(frozen=True)
class NetworkRecord:
    """Outcome of one (network, objective) pipeline run inside a sweep"""

    sweep_value: float
    objective: str
    network_index: int
    pe: float
    solve_time: float
    iterations: int
    status: str
    relative_entropy: float = float("nan")
    tail_fraction: float = float("nan")
    variant: str = ""
    seed: int = 0
    v: int = 0

    @property
    def succeeded(self) -> bool:
        return self.status in SUCCEEDED_STATUSES


@dataclass(frozen=True)
class SweepRow:
    """Aggregate over the succeeded networks of one (sweep value, variant, objective)"""

    sweep_value: float
    variant: str
    objective: str
    mean_pe: float
    std_pe: float
    mean_solve_time: float
    mean_iterations: float
    mean_relative_entropy: float
    mean_tail_fraction: float
    networks_succeeded: int
    num_networks: int
