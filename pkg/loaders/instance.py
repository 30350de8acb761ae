"""Instance files

One JSON document per network: the measurement graph (anchors, edges, radio
range) plus, when known, the true sensor coordinates. Floats are written with
repr precision, so save -> load is exact and the same network always gives
the same bytes.
"""
import json
import re
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from features.netgen import validate_graph
from type_defs import (
    AnchorEdge, GenConfig, MeasurementGraph, NetworkTruth, NoiseModel,
    SensorEdge, points_array, points_from_array,
)
from utils.errors import EmptyGraph, FormatError, InstanceIOError
from utils.logger import get_logger
from utils.schema_validator import validate_instance

logger = get_logger("loaders.instance")

FORMAT_VERSION = 1


def instance_document(graph: MeasurementGraph, truth: Optional[NetworkTruth] = None,
                      cfg: Optional[GenConfig] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "version": FORMAT_VERSION,
        "n": graph.n,
        "m": graph.m,
        "radio_range": graph.radio_range,
        "noise_std": graph.noise_std,
        "noise_model": graph.noise_model.value,
    }
    if cfg is not None:
        doc["max_degree"] = cfg.max_degree
        doc["seed"] = cfg.seed
    doc["anchors"] = points_array(graph.anchors).tolist()
    if truth is not None:
        doc["sensors"] = truth.sensor_array().tolist()
    doc["sensor_edges"] = [[e.i, e.j, e.d_hat] for e in graph.sensor_edges]
    doc["anchor_edges"] = [[e.j, e.k, e.d_hat] for e in graph.anchor_edges]
    if graph.pruned_pairs:
        doc["pruned_pairs"] = [[i, j] for i, j in graph.pruned_pairs]
    return doc


def _dumps(doc: Dict[str, Any]) -> str:
    """Header fields one per line, every point / edge on its own line"""
    lines = ["{"]
    items = list(doc.items())
    for pos, (key, value) in enumerate(items):
        comma = "," if pos < len(items) - 1 else ""
        if isinstance(value, list):
            if not value:
                lines.append(f'  {json.dumps(key)}: []{comma}')
                continue
            lines.append(f'  {json.dumps(key)}: [')
            for k, entry in enumerate(value):
                tail = "," if k < len(value) - 1 else ""
                lines.append(f"    {json.dumps(entry)}{tail}")
            lines.append(f"  ]{comma}")
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(value)}{comma}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_instance(path, graph: MeasurementGraph, truth: Optional[NetworkTruth] = None,
                  cfg: Optional[GenConfig] = None) -> Path:
    path = Path(path)
    text = _dumps(instance_document(graph, truth, cfg))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise InstanceIOError(f"cannot write instance {path}: {e}") from e
    logger.debug(f"Saved instance n={graph.n} m={graph.m} v={graph.v} to {path}")
    return path


def _line_of(text: str, field: Optional[str]) -> Optional[int]:
    """Best-effort line number of a top-level key (or of the list entry it names)"""
    if not field:
        return None
    parts = field.split(".")
    key = f'"{parts[0]}"'
    lines = text.splitlines()
    for idx, line in enumerate(lines, start=1):
        if line.lstrip().startswith(key):
            if len(parts) > 1 and parts[1].isdigit() and line.rstrip().endswith("["):
                target = idx + 1 + int(parts[1])
                return target if target <= len(lines) else idx
            return idx
    return None


def _error_field(message: str) -> Optional[str]:
    """Field path of a graph error, e.g. sensor_edges[3] -> sensor_edges.3"""
    match = re.match(r"(\w+)(?:\[(\d+)\])?:", message)
    if not match:
        return None
    return match.group(1) if match.group(2) is None else f"{match.group(1)}.{match.group(2)}"


def parse_instance(text: str) -> Tuple[MeasurementGraph, Optional[NetworkTruth]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, line=e.lineno) from e
    if not isinstance(doc, dict):
        raise FormatError("instance must be a JSON object", line=1)

    issue = validate_instance(doc)
    if issue is not None:
        raise FormatError(issue.message, line=_line_of(text, issue.field), field=issue.field)

    n, m = doc["n"], doc["m"]
    if len(doc["anchors"]) != m:
        raise FormatError(f"{len(doc['anchors'])} anchors listed for m={m}",
                          line=_line_of(text, "anchors"), field="anchors")
    anchors = points_from_array(doc["anchors"]) if m else ()

    graph = MeasurementGraph(
        n=n,
        m=m,
        anchors=anchors,
        sensor_edges=tuple(SensorEdge(int(i), int(j), float(d)) for i, j, d in doc["sensor_edges"]),
        anchor_edges=tuple(AnchorEdge(int(j), int(k), float(d)) for j, k, d in doc["anchor_edges"]),
        radio_range=float(doc["radio_range"]),
        noise_std=float(doc.get("noise_std", 0.0)),
        noise_model=NoiseModel(doc.get("noise_model", NoiseModel.ADDITIVE.value)),
        pruned_pairs=tuple((int(i), int(j)) for i, j in doc.get("pruned_pairs", [])),
    )
    if graph.v == 0:
        raise EmptyGraph("instance has no measured edges")
    ok, errors = validate_graph(graph)
    if not ok:
        field = _error_field(errors[0])
        raise FormatError("; ".join(errors), line=_line_of(text, field), field=field)

    truth = None
    if "sensors" in doc:
        if len(doc["sensors"]) != n:
            raise FormatError(f"{len(doc['sensors'])} sensors listed for n={n}",
                              line=_line_of(text, "sensors"), field="sensors")
        truth = NetworkTruth(anchors=anchors, sensors=points_from_array(doc["sensors"]))
    return graph, truth


def load_instance(path) -> Tuple[MeasurementGraph, Optional[NetworkTruth]]:
    """Read an instance file; truth is None when the file has no sensors"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise InstanceIOError(f"instance file not found: {path}") from e
    except OSError as e:
        raise InstanceIOError(f"cannot read instance {path}: {e}") from e
    graph, truth = parse_instance(text)
    logger.debug(f"Loaded instance n={graph.n} m={graph.m} v={graph.v} from {path}")
    return graph, truth
