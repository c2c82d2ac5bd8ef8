import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridplace import (
    GraphFormatError,
    InstanceSpec,
    InvalidInputError,
    SbaGraph,
    density_percent,
    generate_instance,
    preset,
    read_graph,
    table5_specs,
    total_hosting,
    write_graph,
)
from hybridplace.graphio import format_edge_list, graph_from_dict, graph_to_dict, parse_edge_list
from hybridplace.instances import TABLE5_DENSITY, _pair

TABLE5 = {
    "G1": (20, 19, 469), "G2": (17, 28, 521), "G3": (18, 46, 418), "G4": (11, 22, 254),
    "G5": (16, 60, 413), "G6": (14, 55, 332), "G7": (13, 55, 319), "G8": (19, 137, 570),
    "G9": (15, 95, 363), "G10": (12, 66, 297),
}


def test_table5_presets():
    specs = table5_specs()
    assert [s.name for s in specs] == list(TABLE5)
    for s in specs:
        assert (s.nodes, s.edges, s.total_hosting) == TABLE5[s.name]
    assert preset("g5").nodes == 16


@pytest.mark.parametrize("spec", table5_specs(), ids=lambda s: s.name)
def test_generated_presets_match_statistics(spec):
    graph = generate_instance(spec)
    assert graph.n == spec.nodes
    assert len(graph.edges) == spec.edges
    assert total_hosting(graph) == spec.total_hosting
    assert round(density_percent(graph), -1) == TABLE5_DENSITY[spec.name]
    hosting = graph.hosting
    assert np.all(hosting >= 1) and np.all(hosting == np.round(hosting))
    rates = [e.rate for e in graph.edges]
    assert min(rates) >= spec.rate_min and max(rates) <= spec.rate_max
    assert all(r == round(r, 1) for r in rates)


def test_g10_is_complete_and_g1_sparse():
    assert density_percent(generate_instance(preset("G10"))) == 100
    g1 = preset("G1")
    assert g1.edges < g1.nodes


def test_generation_is_seed_deterministic():
    spec = preset("G3").with_seed(42)
    assert generate_instance(spec) == generate_instance(spec)
    assert generate_instance(spec).hosting.tolist() == generate_instance(spec).hosting.tolist()
    assert generate_instance(spec) != generate_instance(spec.with_seed(43))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.data())
def test_generated_graph_validity(n, data):
    m = data.draw(st.integers(0, n * (n - 1) // 2))
    extra = data.draw(st.integers(0, 200))
    lo = data.draw(st.floats(0.1, 20))
    hi = data.draw(st.floats(lo, 60))
    spec = InstanceSpec("x", n, m, n + extra, lo, hi, seed=data.draw(st.integers(0, 2**32)))
    graph = generate_instance(spec)
    assert graph.n == n and len(graph.edges) == m
    assert total_hosting(graph) == n + extra
    assert all(e.a != e.b for e in graph.edges)
    assert len({e.key for e in graph.edges}) == m
    assert all(lo <= e.rate <= hi for e in graph.edges)


def test_pair_indexing_covers_all_pairs():
    n = 7
    pairs = [_pair(k, n) for k in range(n * (n - 1) // 2)]
    assert pairs == [(i, j) for i in range(n) for j in range(i + 1, n)]


@pytest.mark.parametrize(
    "spec",
    [InstanceSpec("a", 4, 7, 10), InstanceSpec("b", 4, 2, 3), InstanceSpec("c", 4, 2, 10, 0, 5),
     InstanceSpec("d", 4, 2, 10, 6, 5), InstanceSpec("e", 0, 0, 0)],
)
def test_invalid_specs(spec):
    with pytest.raises(InvalidInputError):
        generate_instance(spec)


def test_unknown_preset():
    with pytest.raises(InvalidInputError):
        preset("G11")


# graph files


def test_edge_list_example():
    graph = parse_edge_list("3 1\n0 10\n1 20\n2 30\n0 2 5.5")
    assert graph == SbaGraph.from_arrays([10, 20, 30], [(0, 2, 5.5)])


def test_edge_list_self_loop_rejected(tmp_path):
    path = tmp_path / "loop.txt"
    path.write_text("2 1\n0 1\n1 2\n1 1 4.0\n")
    with pytest.raises(GraphFormatError, match="self-loop"):
        read_graph(path)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("", "line 1"),
        ("2 1\n0 1\n1 x\n0 1 3\n", "line 3"),
        ("2 1\n0 1\n1 2\n0 1\n", "line 4"),
        ("2 2\n0 1\n1 2\n0 1 3\n", "announces"),
        ("2 2\n0 1\n1 2\n0 1 3\n1 0 2\n", "duplicate"),
        ("2 1\n0 1\n1 2\n0 5 3\n", "missing node"),
    ],
)
def test_edge_list_errors(text, fragment):
    with pytest.raises(GraphFormatError, match=fragment):
        parse_edge_list(text)


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"version": 2, "nodes": [], "edges": []}, "version"),
        ({"version": 1, "nodes": [{"id": 0}], "edges": []}, r"nodes\[0\]: missing field 'hosting'"),
        ({"version": 1, "nodes": [{"id": 0, "hosting": "a"}], "edges": []}, r"nodes\[0\].hosting"),
        ({"version": 1, "nodes": [{"id": 0, "hosting": 1}, {"id": 1, "hosting": 1}],
          "edges": [{"a": 0, "b": 1.5, "rate": 1}]}, r"edges\[0\].b"),
        ({"version": 1, "nodes": "x", "edges": []}, "nodes"),
    ],
)
def test_json_errors(doc, fragment):
    with pytest.raises(GraphFormatError, match=fragment):
        graph_from_dict(doc)


def test_json_syntax_error_names_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"version": 1,\n "nodes": [\n')
    with pytest.raises(GraphFormatError, match="line"):
        read_graph(path)


def test_json_field_names(tmp_path, bank_graph):
    path = tmp_path / "g.json"
    write_graph(bank_graph, path)
    doc = json.loads(path.read_text())
    assert set(doc) == {"version", "nodes", "edges"}
    assert doc["version"] == 1
    assert doc["nodes"][0] == {"id": 0, "hosting": 12.0}
    assert doc["edges"][1] == {"a": 0, "b": 2, "rate": 17.5}


@pytest.mark.parametrize("name, fmt", [("g.json", None), ("g.txt", None), ("g.dat", "json"), ("g.graph", "edgelist")])
@pytest.mark.parametrize("spec", table5_specs()[::3], ids=lambda s: s.name)
def test_round_trip(tmp_path, name, fmt, spec):
    graph = generate_instance(spec)
    path = tmp_path / name
    write_graph(graph, path, fmt)
    back = read_graph(path)
    assert back == graph
    assert back.nodes == graph.nodes
    assert [(e.a, e.b, e.rate) for e in back.edges] == [(e.a, e.b, e.rate) for e in graph.edges]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=2, max_size=8), st.data())
def test_round_trip_full_precision(hosting, data):
    n = len(hosting)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = data.draw(st.lists(st.sampled_from(pairs), unique=True))
    rates = data.draw(st.lists(st.floats(0, 1e3, allow_nan=False), min_size=len(chosen), max_size=len(chosen)))
    graph = SbaGraph.from_arrays(hosting, [(a, b, r) for (a, b), r in zip(chosen, rates)])
    assert graph_from_dict(json.loads(json.dumps(graph_to_dict(graph)))) == graph
    assert parse_edge_list(format_edge_list(graph)) == graph


def test_write_unknown_format(tmp_path, path3):
    with pytest.raises(InvalidInputError):
        write_graph(path3, tmp_path / "x", "xml")
