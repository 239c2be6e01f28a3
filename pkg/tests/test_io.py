import json

import networkx as nx
import numpy as np
import pytest

from polnet.exceptions import DecodingError, ValidationError
from polnet.io import (
    export_graph,
    format_value,
    load_adjacency,
    load_graph,
    read_edge_list,
    write_csv,
    write_dot,
    write_json,
)


def test_read_edge_list_header_comments_weights(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("# relations\nsource,target,weight\nb,a,2\n\na, c ,\n", encoding="utf-8")
    assert read_edge_list(p) == [("b", "a", 2.0, 3), ("a", "c", None, 5)]


def test_read_edge_list_errors_carry_line_numbers(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("u,v\na,b\nonly\n", encoding="utf-8")
    with pytest.raises(ValidationError, match=r"e\.csv:3"):
        read_edge_list(p)
    p.write_text("a,b,heavy\n", encoding="utf-8")
    with pytest.raises(ValidationError, match=r":1: weight"):
        read_edge_list(p)
    p.write_bytes(b"a,b\n\xff,c\n")
    with pytest.raises(DecodingError, match="byte offset 4"):
        read_edge_list(p)


def test_self_loops_rejected_with_line(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("u,v\na,b\nc,c\n", encoding="utf-8")
    with pytest.raises(ValidationError, match=r":3: self-loop"):
        load_adjacency(p)
    with pytest.raises(ValidationError, match="self-loop"):
        load_graph(p)


def test_load_adjacency_symmetrises_and_collapses(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("u,v\nb,a\na,b\nb,c\n", encoding="utf-8")
    y = load_adjacency(p)
    assert y.labels == ("a", "b", "c") and y.n_edges == 2


def test_graph_exports_roundtrip(tmp_path):
    g = nx.Graph()
    g.add_edge("paz", "justicia", weight=3)
    g.add_edge("paz", 'dice "no"', weight=1)
    export_graph(g, tmp_path / "g.graphml", "graphml")
    back = load_graph(tmp_path / "g.graphml")
    assert {frozenset(e) for e in back.edges} == {frozenset(e) for e in g.edges}
    assert back["paz"]["justicia"]["weight"] == 3

    export_graph(g, tmp_path / "g.csv", "csv")
    assert (tmp_path / "g.csv").read_text() == 'u,v,weight\npaz,justicia,3\npaz,"dice ""no""",1\n'
    again = load_graph(tmp_path / "g.csv")
    assert again["paz"]["justicia"]["weight"] == 3.0

    write_dot(g, tmp_path / "g.dot")
    dot = (tmp_path / "g.dot").read_text()
    assert dot.startswith('graph "G" {') and '"paz" -- "justicia" [weight=3];' in dot
    assert r'"dice \"no\""' in dot

    with pytest.raises(ValidationError):
        export_graph(g, tmp_path / "g.x", "gexf")


def test_format_value():
    assert format_value(None) == "NA"
    assert format_value(float("nan")) == "NA"
    assert format_value(0.1) == "0.1"
    assert format_value(np.float64(1 / 3)) == repr(1 / 3)
    assert format_value(np.int64(4)) == "4"
    assert format_value(True) == "true"
    assert format_value(2.0) == "2.0"


def test_writers_are_utf8_with_dot_decimals(tmp_path):
    write_csv(tmp_path / "t.csv", ["término", "valor"], [("niño", 0.5), ("paz", None)])
    assert (tmp_path / "t.csv").read_bytes() == "término,valor\nniño,0.5\npaz,NA\n".encode()
    write_json(tmp_path / "t.json", {"x": np.array([1.5, 2]), "n": np.int32(3), "s": {"b", "a"}, "t": "ñ"})
    assert json.loads((tmp_path / "t.json").read_text(encoding="utf-8")) == {
        "x": [1.5, 2.0], "n": 3, "s": ["a", "b"], "t": "ñ",
    }
    assert "ñ" in (tmp_path / "t.json").read_text(encoding="utf-8")
