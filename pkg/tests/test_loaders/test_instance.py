"""Instance file tests"""
import json

import pytest

from loaders.instance import FORMAT_VERSION, instance_document, load_instance, parse_instance, save_instance
from tests.framework import small_network
from utils.errors import EmptyGraph, FormatError, InstanceIOError


def _doc(**changes):
    doc = {
        "version": 1, "n": 2, "m": 1, "radio_range": 0.5,
        "anchors": [[0.0, 0.0]],
        "sensors": [[0.1, 0.0], [0.0, 0.2]],
        "sensor_edges": [[0, 1, 0.22]],
        "anchor_edges": [[0, 0, 0.1]],
    }
    doc.update(changes)
    return json.dumps(doc, indent=2)


class TestSaveLoad:
    """save_instance -> load_instance"""

    def test_exact(self, tmp_path):
        truth, graph, gen = small_network(n=12, m=4, radio_range=0.5, noise_std=0.03)
        path = save_instance(tmp_path / "net.json", graph, truth, gen)
        loaded_graph, loaded_truth = load_instance(path)
        assert loaded_graph == graph
        assert loaded_truth == truth

    def test_same_bytes(self, tmp_path):
        truth, graph, gen = small_network()
        a = save_instance(tmp_path / "a.json", graph, truth, gen).read_bytes()
        b = save_instance(tmp_path / "b.json", graph, truth, gen).read_bytes()
        assert a == b
        assert json.loads(a)["version"] == FORMAT_VERSION

    def test_without_truth(self, tmp_path):
        _, graph, _ = small_network()
        _, truth = load_instance(save_instance(tmp_path / "g.json", graph))
        assert truth is None

    def test_pruned_pairs_survive(self, tmp_path):
        truth, graph, gen = small_network(n=15, m=3, radio_range=0.6, max_degree=2)
        assert graph.pruned_pairs
        loaded, _ = load_instance(save_instance(tmp_path / "capped.json", graph, truth, gen))
        assert loaded.pruned_pairs == graph.pruned_pairs

    def test_document_layout(self):
        truth, graph, gen = small_network()
        doc = instance_document(graph, truth, gen)
        assert doc["seed"] == gen.seed
        assert len(doc["sensor_edges"]) == len(graph.sensor_edges)
        assert len(doc["sensors"]) == graph.n

    def test_missing_file(self, tmp_path):
        with pytest.raises(InstanceIOError):
            load_instance(tmp_path / "absent.json")


class TestParseErrors:
    """Malformed documents name the offending line or field"""

    def test_valid(self):
        graph, truth = parse_instance(_doc())
        assert graph.v == 2
        assert truth.n == 2

    def test_bad_json(self):
        with pytest.raises(FormatError) as exc:
            parse_instance('{\n  "n": 2,\n  oops\n}')
        assert exc.value.line == 3

    def test_schema_violation(self):
        pytest.importorskip("jsonschema")
        with pytest.raises(FormatError) as exc:
            parse_instance(_doc(radio_range=-1.0))
        assert exc.value.field == "radio_range"
        assert exc.value.line is not None

    def test_anchor_count(self):
        with pytest.raises(FormatError) as exc:
            parse_instance(_doc(m=2))
        assert exc.value.field == "anchors"

    def test_edge_out_of_range(self):
        with pytest.raises(FormatError) as exc:
            parse_instance(_doc(sensor_edges=[[0, 1, 0.2], [0, 5, 0.3]]))
        assert exc.value.field == "sensor_edges.1"

    def test_sensor_count(self):
        with pytest.raises(FormatError):
            parse_instance(_doc(sensors=[[0.0, 0.0]]))

    def test_no_edges(self):
        with pytest.raises(EmptyGraph):
            parse_instance(_doc(sensor_edges=[], anchor_edges=[]))
