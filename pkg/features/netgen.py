"""netgen: random planar networks and simulated range measurements

Responsibilities:
- Place anchors and sensors uniformly in the placement square
- Connect every pair within radio range and corrupt the true distance
- Optionally cap the sensor-to-sensor degree (nearest neighbours win)
"""
from typing import List, Tuple

import numpy as np

from loaders.validator import validate_gen_config
from type_defs import (
    AnchorEdge, GenConfig, MeasurementGraph, NetworkTruth, NoiseModel,
    PLACEMENT_BOUNDS, SensorEdge, points_from_array,
)
from utils.errors import ConfigError, EmptyGraph, LengthMismatch
from utils.logger import get_logger
from utils.rng import substreams

logger = get_logger("features.netgen")


def _check(cfg: GenConfig) -> None:
    ok, errors = validate_gen_config(cfg)
    if not ok:
        raise ConfigError(errors)


def generate_network(cfg: GenConfig) -> NetworkTruth:
    """Draw m anchors and n sensors uniformly from the placement square"""
    _check(cfg)
    lo, hi = PLACEMENT_BOUNDS[cfg.placement]
    streams = substreams(cfg.seed)

    anchors = streams["anchors"].uniform(lo, hi, size=(cfg.m, 2))
    sensors = streams["sensors"].uniform(lo, hi, size=(cfg.n, 2))

    logger.debug(f"Generated network n={cfg.n} m={cfg.m} seed={cfg.seed}")
    return NetworkTruth(anchors=points_from_array(anchors), sensors=points_from_array(sensors))


def _noisy(d: np.ndarray, g: np.ndarray, cfg: GenConfig) -> np.ndarray:
    if cfg.noise_model == NoiseModel.MULTIPLICATIVE:
        noisy = d * (1.0 + cfg.noise_std * g)
    else:
        noisy = d + cfg.noise_std * g
    return np.maximum(cfg.eps_distance, noisy)


def _cap_degree(pairs: List[Tuple[int, int]], dist: np.ndarray, n: int, k: int) -> np.ndarray:
    """Greedy nearest-first selection keeping every sensor's degree <= k

    Returns a boolean keep-mask aligned with `pairs`.
    """
    order = sorted(range(len(pairs)), key=lambda e: (dist[e], pairs[e][0], pairs[e][1]))
    degree = np.zeros(n, dtype=int)
    keep = np.zeros(len(pairs), dtype=bool)
    for e in order:
        i, j = pairs[e]
        if degree[i] < k and degree[j] < k:
            keep[e] = True
            degree[i] += 1
            degree[j] += 1
    return keep


def build_measurements(truth: NetworkTruth, cfg: GenConfig) -> MeasurementGraph:
    """Simulate the measurement graph of a network

    Edges are enumerated in canonical order (sensor pairs i < j
    lexicographically, then sensor-anchor pairs by (j, k)). One normal draw is
    taken per in-range pair before any degree pruning, so the cap never shifts
    the noise seen by surviving edges.
    """
    _check(cfg)
    if truth.n != cfg.n or truth.m != cfg.m:
        raise LengthMismatch(
            f"truth has n={truth.n}, m={truth.m} but config asks n={cfg.n}, m={cfg.m}"
        )

    X = truth.sensor_array()
    A = truth.anchor_array()
    r = cfg.radio_range
    noise_rng = substreams(cfg.seed)["noise"]

    # Sensor-sensor candidates
    iu, ju = np.triu_indices(cfg.n, k=1)
    d_ss = np.linalg.norm(X[iu] - X[ju], axis=1)
    in_range = d_ss <= r
    iu, ju, d_ss = iu[in_range], ju[in_range], d_ss[in_range]

    # Sensor-anchor candidates
    if cfg.m > 0:
        jj, kk = np.meshgrid(np.arange(cfg.n), np.arange(cfg.m), indexing="ij")
        jj, kk = jj.ravel(), kk.ravel()
        d_sa = np.linalg.norm(X[jj] - A[kk], axis=1)
        in_range = d_sa <= r
        jj, kk, d_sa = jj[in_range], kk[in_range], d_sa[in_range]
    else:
        jj = kk = np.zeros(0, dtype=int)
        d_sa = np.zeros(0)

    g = noise_rng.standard_normal(len(d_ss) + len(d_sa))
    dh_ss = _noisy(d_ss, g[:len(d_ss)], cfg)
    dh_sa = _noisy(d_sa, g[len(d_ss):], cfg)

    pairs = list(zip(iu.tolist(), ju.tolist()))
    pruned: Tuple[Tuple[int, int], ...] = ()
    if cfg.max_degree is not None and pairs:
        keep = _cap_degree(pairs, d_ss, cfg.n, cfg.max_degree)
        dropped = int(len(pairs) - keep.sum())
        if dropped:
            logger.debug(f"Degree cap {cfg.max_degree} dropped {dropped} sensor edges")
        pruned = tuple(p for p, kept in zip(pairs, keep) if not kept)
        pairs = [p for p, kept in zip(pairs, keep) if kept]
        dh_ss = dh_ss[keep]

    sensor_edges = tuple(SensorEdge(i, j, float(d)) for (i, j), d in zip(pairs, dh_ss))
    anchor_edges = tuple(
        AnchorEdge(int(j), int(k), float(d)) for j, k, d in zip(jj, kk, dh_sa)
    )

    if not sensor_edges and not anchor_edges:
        raise EmptyGraph(f"no pair within radio range {r} (n={cfg.n}, m={cfg.m})")

    graph = MeasurementGraph(
        n=cfg.n,
        m=cfg.m,
        anchors=truth.anchors,
        sensor_edges=sensor_edges,
        anchor_edges=anchor_edges,
        radio_range=float(r),
        noise_std=float(cfg.noise_std),
        noise_model=cfg.noise_model,
        pruned_pairs=pruned,
    )
    logger.debug(f"Measurement graph: |N_s|={len(sensor_edges)} |N_a|={len(anchor_edges)}")
    return graph


def validate_graph(graph: MeasurementGraph) -> Tuple[bool, List[str]]:
    """Structural checks on a (possibly hand-written) measurement graph"""
    errors: List[str] = []
    if graph.n < 1:
        errors.append("n must be >= 1")
    if len(graph.anchors) != graph.m:
        errors.append(f"{len(graph.anchors)} anchor coordinates for m={graph.m}")
    if not (graph.radio_range > 0):
        errors.append("radio_range must be > 0")
    seen = set()
    for idx, e in enumerate(graph.sensor_edges):
        if not (0 <= e.i < e.j < graph.n):
            errors.append(f"sensor_edges[{idx}]: need 0 <= i < j < n (got {e.i}, {e.j})")
        if not (e.d_hat > 0):
            errors.append(f"sensor_edges[{idx}]: d_hat must be > 0")
        if ("s", e.i, e.j) in seen:
            errors.append(f"sensor_edges[{idx}]: duplicate edge ({e.i}, {e.j})")
        seen.add(("s", e.i, e.j))
    for idx, e in enumerate(graph.anchor_edges):
        if not (0 <= e.j < graph.n and 0 <= e.k < graph.m):
            errors.append(f"anchor_edges[{idx}]: index out of range ({e.j}, {e.k})")
        if not (e.d_hat > 0):
            errors.append(f"anchor_edges[{idx}]: d_hat must be > 0")
        if ("a", e.j, e.k) in seen:
            errors.append(f"anchor_edges[{idx}]: duplicate edge ({e.j}, {e.k})")
        seen.add(("a", e.j, e.k))
    if graph.v < 1:
        errors.append("graph has no edges")
    return (len(errors) == 0, errors)
