# -*- coding: utf-8 -*-
"""Graphes étiquetés, Dir(G), boules, vues, homomorphismes, fichiers."""

import json

import pytest

from src.anon_election.core.graph import (
    GraphValidationError, Homomorphism, HomomorphismError, LabeledGraph, SymDigraph, UnknownVertexError,
    ball, build_dir, dump_digraph, dump_graph, homomorphism_violations, is_isomorphic, load_digraph,
    load_graph, strip_sources, to_labeled_graph, truncated_view, validate_digraph, validate_graph,
    views_isomorphic, with_labels,
)

from . import k2, ring, ring_dir, write_graph_file


# =============================================================================
# validate_graph
# =============================================================================

def test_ring_is_valid():
    assert validate_graph(ring(5)).ok


def test_port_set_violation_reported():
    g = LabeledGraph.build("bad", [("a", "x", None), ("b", "x", None), ("c", "x", None)],
                           [("a", "b", 1, 1), ("b", "c", 3, 1), ("c", "a", 2, 2)])
    report = validate_graph(g)
    assert "port-set" in report.codes()
    assert any("'b'" in m for m in report.messages())


def test_disconnected_graph_rejected():
    g = LabeledGraph.build("split", [(v, "x", None) for v in "abcd"],
                           [("a", "b", 1, 1), ("c", "d", 1, 1)])
    assert validate_graph(g).codes() == ["disconnected"]


def test_self_loop_and_multi_edge():
    g = LabeledGraph.build("loops", [("a", "x", None), ("b", "x", None)],
                           [("a", "a", 1, 2), ("a", "b", 1, 1), ("b", "a", 2, 2)])
    codes = validate_graph(g).codes()
    assert "self-loop" in codes
    assert "multi-edge" in codes


def test_single_vertex_is_valid():
    g = LabeledGraph.build("K1", [("v0", "x", None)], [])
    assert validate_graph(g).ok
    assert len(build_dir(g).arcs) == 0


# =============================================================================
# Dir(G)
# =============================================================================

def test_build_dir_labels_and_sym():
    d = build_dir(k2())
    assert set(d.arcs) == {"v0>v1", "v1>v0"}
    assert d.arcs["v0>v1"].label == (1, 1)
    assert d.sym["v0>v1"] == "v1>v0"
    assert d.vertex_label["v0"] == ("a", None)
    assert validate_digraph(d).ok


def test_build_dir_with_sources_gives_private_classes():
    d = build_dir(k2(sources=("s", None)), with_sources=True)
    assert d.vertex_label["v0"] == ("a", "s")
    assert d.vertex_label["v1"] == ("b", "#v1")


def test_build_dir_refuses_invalid_graph():
    g = LabeledGraph.build("bad", [("a", "x", None), ("b", "x", None)], [("a", "b", 2, 1)])
    with pytest.raises(GraphValidationError):
        build_dir(g)


def test_ring_ports_reversed_on_sym():
    d = ring_dir(4)
    a = d.arcs["v0>v1"]
    assert a.label == (1, 2)
    assert d.arcs[d.sym[a.id]].label == (2, 1)


def test_validate_digraph_detects_broken_sym():
    d = ring_dir(3)
    sym = dict(d.sym)
    sym["v0>v1"] = "v2>v1"
    broken = SymDigraph(d.name, d.vertices, d.vertex_label, d.arcs, sym)
    codes = validate_digraph(broken).codes()
    assert "sym-not-involution" in codes or "sym-incidence" in codes


def test_to_labeled_graph_inverts_build_dir():
    g = ring(5, labels=list("abcab"))
    back = to_labeled_graph(build_dir(g, with_sources=True))
    assert is_isomorphic(build_dir(back), build_dir(g))


def test_strip_sources_and_with_labels():
    d = ring_dir(3, sources=["s", "s", "t"], with_sources=True)
    stripped = strip_sources(d)
    assert all(lbl[1] is None for lbl in stripped.vertex_label.values())
    tagged = with_labels(d, lambda v, lbl: (lbl[0], v), name="tagged")
    assert tagged.name == "tagged"
    assert tagged.vertex_label["v2"] == ("x", "v2")


# =============================================================================
# Boules et vues
# =============================================================================

def test_ball_radius_one_on_ring():
    d = ring_dir(6)
    b = ball(d, "v0", 1)
    assert b.vertices == frozenset({"v5", "v0", "v1"})
    # arcs avec une extrémité à distance 0
    assert b.arcs == frozenset({"v0>v1", "v1>v0", "v0>v5", "v5>v0"})


def test_ball_radius_zero_and_negative():
    d = ring_dir(4)
    assert ball(d, "v2", 0).vertices == frozenset({"v2"})
    assert ball(d, "v2", 0).arcs == frozenset()
    assert ball(d, "v2", -1).vertices == frozenset()


def test_ball_unknown_vertex():
    with pytest.raises(UnknownVertexError):
        ball(ring_dir(3), "nope", 1)


def test_views_of_ring_vertices_are_isomorphic():
    d = ring_dir(5)
    assert views_isomorphic(truncated_view(d, "v0", 3), truncated_view(d, "v3", 3))


def test_views_distinguish_labels():
    d = ring_dir(5, labels=list("abxxx"))
    assert not views_isomorphic(truncated_view(d, "v2", 2), truncated_view(d, "v4", 2))


def test_views_of_c3_and_c6_agree():
    assert views_isomorphic(truncated_view(ring_dir(3), "v0", 4), truncated_view(ring_dir(6), "v0", 4))


# =============================================================================
# Homomorphismes
# =============================================================================

def test_ring_double_cover_homomorphism_has_no_violation():
    c6, c3 = ring_dir(6), ring_dir(3)
    phi = Homomorphism.from_vertex_map(c6, c3, {f"v{i}": f"v{i % 3}" for i in range(6)})
    assert homomorphism_violations(c6, c3, phi).ok


def test_homomorphism_label_violation():
    c4 = ring_dir(4, labels=list("abab"))
    c2 = ring_dir(4, labels=list("aaaa"))
    h = Homomorphism.identity(c4).retarget(c4.name, c2.name)
    assert "vertex-label" in homomorphism_violations(c4, c2, h).codes()


def test_homomorphism_undefined_vertex_raises():
    d = ring_dir(3)
    h = Homomorphism({"v0": "v0"}, {}, d.name, d.name)
    with pytest.raises(HomomorphismError):
        homomorphism_violations(d, d, h)


def test_isomorphism_respects_labels():
    assert is_isomorphic(ring_dir(4, labels=list("abaa")), ring_dir(4, labels=list("aaab")))
    assert not is_isomorphic(ring_dir(4, labels=list("abab")), ring_dir(4, labels=list("aabb")))


# =============================================================================
# Fichiers
# =============================================================================

def test_load_graph_roundtrip(tmp_path):
    path = tmp_path / "ring.json"
    path.write_text(json.dumps(dump_graph(ring(4, labels=list("abcd")))), encoding="utf-8")
    g = load_graph(path)
    assert len(g) == 4
    assert g.vertex_label["v2"] == "c"


def test_load_graph_reports_line_numbers(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text(
        "name: bad\n"
        "vertices:\n"
        "  - {id: a, label: x}\n"
        "  - {id: b, label: x}\n"
        "edges:\n"
        "  - {u: a, v: b, pu: 1, pv: 2}\n",
        encoding="utf-8",
    )
    with pytest.raises(GraphValidationError) as exc:
        load_graph(path)
    assert any(v.code == "port-set" for v in exc.value.violations)
    assert any("ligne" in v.message for v in exc.value.violations)


def test_load_graph_schema_error(tmp_path):
    path = write_graph_file(tmp_path / "g.json", [("a", "x", None)], [])
    data = json.loads(open(path, encoding="utf-8").read())
    data["edges"] = [{"u": "a"}]
    (tmp_path / "g.json").write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(GraphValidationError):
        load_graph(path)


def test_dump_and_load_digraph(tmp_path):
    d = ring_dir(3, sources=["s", "t", "s"], with_sources=True)
    path = tmp_path / "d.json"
    path.write_text(json.dumps(dump_digraph(d)), encoding="utf-8")
    loaded = load_digraph(path)
    assert set(loaded.arcs) == set(d.arcs)
    assert loaded.vertex_label["v1"] == ("x", "t")
    assert is_isomorphic(loaded, d)


def test_dump_digraph_keeps_composite_labels(tmp_path):
    """Étiquettes non textuelles (n-uplets, entiers) : relues à l'identique."""
    d = with_labels(ring_dir(3), lambda v, lbl: ((lbl[0], int(v[1:])), lbl[1]), name="tagged")
    d = with_labels(d, lambda v, lbl: (7, lbl[1]) if v == "v2" else lbl, name="tagged")
    path = tmp_path / "d.json"
    path.write_text(json.dumps(dump_digraph(d)), encoding="utf-8")
    loaded = load_digraph(path)
    assert loaded.vertex_label["v0"] == (("x", 0), None)
    assert loaded.vertex_label["v1"] == (("x", 1), None)
    assert loaded.vertex_label["v2"] == (7, None)
    assert is_isomorphic(loaded, d)
