# -*- coding: utf-8 -*-
"""Générateurs : specs texte, formes, paires de revêtement, corpus."""

import json

import pytest

from src.anon_election.core.coverings import is_symmetric_covering
from src.anon_election.core.families import (
    GeneratorError, default_covering_specs, generate, generate_covering_pair, generate_quasi_covering_ring,
    load_corpus, parse_spec, quasi_covering_corpus, resolve_graphs, vertex_ids,
)
from src.anon_election.core.graph import build_dir, dump_graph, validate_graph

from . import ring


# =============================================================================
# Specs
# =============================================================================

def test_parse_spec_canonical_text():
    spec = parse_spec("ring:6, anon, classes=ababab")
    assert spec.shape == "ring"
    assert spec.n == 6
    assert spec.classes == list("ababab")
    assert spec.text() == "ring:6,anon,classes=ababab"


def test_parse_spec_multichar_pattern():
    spec = parse_spec("clique:3,labels=red/blue,shared")
    assert spec.labels == ["red", "blue"]
    assert generate(spec).vertex_label["v2"] == "red"


@pytest.mark.parametrize("text", ["", "star:5", "ring:x", "grid:3", "random:5:2", "ring:4,weird"])
def test_parse_spec_errors(text):
    with pytest.raises(GeneratorError):
        parse_spec(text)


def test_ring_needs_three_vertices():
    with pytest.raises(GeneratorError):
        generate("ring:2,anon,shared")


def test_vertex_ids_are_padded():
    assert vertex_ids(3) == ["v0", "v1", "v2"]
    assert vertex_ids(12)[0] == "v00"


# =============================================================================
# Formes
# =============================================================================

@pytest.mark.parametrize("text, size", [
    ("ring:5,anon,shared", 5),
    ("path:4,distinct,unshared", 4),
    ("clique:5,anon,one-unshared", 5),
    ("grid:3x2,anon,shared", 6),
    ("torus:3x4,anon,shared", 12),
    ("random:8:3:42,anon,unshared", 8),
])
def test_generated_graphs_are_valid(text, size):
    g = generate(text)
    assert len(g) == size
    assert validate_graph(g).ok


def test_random_graph_is_reproducible():
    assert build_dir(generate("random:9:3:7,anon,shared")).fingerprint == \
        build_dir(generate("random:9:3:7,anon,shared")).fingerprint


def test_source_layouts():
    g = generate("ring:4,anon,one-unshared")
    assert g.source_class == {"v0": "u", "v1": "s", "v2": "s", "v3": "s"}
    assert generate("ring:3,distinct,unshared").vertex_label["v1"] == "l01"


# =============================================================================
# Revêtements et quasi-revêtements
# =============================================================================

@pytest.mark.parametrize("spec, q", default_covering_specs()[::9])
def test_covering_pairs_are_coverings(spec, q):
    pair = generate_covering_pair(spec, q)
    verdict = is_symmetric_covering(pair.total_dir, pair.base_dir, pair.phi)
    assert verdict.accepted
    assert verdict.sheet_count == q


def test_covering_pair_rejects_paths():
    with pytest.raises(GeneratorError):
        generate_covering_pair("path:4,anon,shared", 2)


def test_identity_pair():
    pair = generate_covering_pair("ring:4,anon,shared", 1)
    assert pair.total is pair.base


def test_quasi_ring_rejects_multiples():
    with pytest.raises(GeneratorError):
        generate_quasi_covering_ring(9, 3)


def test_quasi_covering_corpus_is_valid():
    witnesses = quasi_covering_corpus(5)
    assert witnesses
    assert all(w.radius >= 0 for w in witnesses)


# =============================================================================
# Corpus
# =============================================================================

def test_load_corpus_mixes_specs_and_files(tmp_path):
    (tmp_path / "c4.json").write_text(json.dumps(dump_graph(ring(4, name="C4"))), encoding="utf-8")
    (tmp_path / "demo.yaml").write_text(
        "name: demo\n"
        "description: test\n"
        "graphs:\n"
        "  - ring:5,anon,unshared\n"
        "  - c4.json\n",
        encoding="utf-8",
    )
    graphs = load_corpus("demo", tmp_path)
    assert [len(g) for g in graphs] == [5, 4]
    assert graphs[1].name == "C4"


def test_missing_corpus(tmp_path):
    with pytest.raises(GeneratorError):
        load_corpus("absent", tmp_path)


def test_resolve_graphs_spec():
    [g] = resolve_graphs("clique:3,anon,shared")
    assert len(g) == 3
