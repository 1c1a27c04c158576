# -*- coding: utf-8 -*-
"""Revêtements symétriques, base minimale, oracle exhaustif, quasi-revêtements."""

import pytest

from src.anon_election.core.coverings import (
    CoveringError, OracleSizeError, brute_force_base_oracle, check_sheet_bound, compose,
    coarsest_equitable_partition, is_b_minimal, is_minimal, is_quasi_covering, is_symmetric_covering,
    make_quasi_covering_witness, minimal_base, quasi_witness_from_covering, sheets,
)
from src.anon_election.core.families import (
    generate, generate_covering_pair, generate_quasi_covering_path, generate_quasi_covering_ring,
)
from src.anon_election.core.graph import Homomorphism, build_dir

from . import k2, ring, ring_dir


# =============================================================================
# is_symmetric_covering
# =============================================================================

def test_identity_is_one_sheet_covering():
    d = ring_dir(5)
    verdict = is_symmetric_covering(d, d, Homomorphism.identity(d))
    assert verdict.accepted
    assert verdict.sheet_count == 1


def test_c6_covers_c3_with_two_sheets():
    pair = generate_covering_pair("ring:3,anon,unshared", 2)
    verdict = is_symmetric_covering(pair.total_dir, pair.base_dir, pair.phi)
    assert verdict.accepted
    assert verdict.sheet_count == 2
    assert verdict.fiber("v0") == ["v0", "v3"]


def test_torus_covering():
    pair = generate_covering_pair("torus:3x3,anon,shared", 2)
    assert len(pair.total) == 18
    assert is_symmetric_covering(pair.total_dir, pair.base_dir, pair.phi).accepted


def test_label_mismatch_rejected():
    c6 = ring_dir(6, labels=list("abcabc"))
    c3 = ring_dir(3, labels=list("abd"))
    c3 = c3.renamed("C3")
    phi = Homomorphism.from_vertex_map(c6, c3, {f"v{i}": f"v{i % 3}" for i in range(6)})
    verdict = is_symmetric_covering(c6, c3, phi)
    assert not verdict.accepted
    assert verdict.reasons


def test_non_surjective_rejected():
    c6 = ring_dir(6)
    c3 = ring_dir(3)
    phi = Homomorphism.from_vertex_map(c6, c3, {f"v{i}": "v0" for i in range(6)})
    assert not is_symmetric_covering(c6, c3, phi).accepted


def test_name_mismatch_raises():
    d = ring_dir(3)
    with pytest.raises(CoveringError):
        is_symmetric_covering(d, d, Homomorphism.identity(d).retarget("X", d.name))


def test_compose_coverings():
    c12 = build_dir(ring(12), with_sources=False).renamed("C12")
    c6 = ring_dir(6)
    c3 = ring_dir(3)
    first = is_symmetric_covering(c12, c6, Homomorphism.from_vertex_map(
        c12, c6, {f"v{i}": f"v{i % 6}" for i in range(12)}))
    second = is_symmetric_covering(c6, c3, Homomorphism.from_vertex_map(
        c6, c3, {f"v{i}": f"v{i % 3}" for i in range(6)}))
    assert first.accepted and second.accepted
    both = compose(first, second)
    assert both.accepted
    assert both.sheet_count == 4


# =============================================================================
# Base minimale
# =============================================================================

def test_minimal_base_of_ababab_ring():
    d = build_dir(generate("ring:6,labels=ab,shared"), with_sources=True)
    base, phi = minimal_base(d)
    assert len(base) == 2
    assert is_symmetric_covering(d, base, phi).sheet_count == 3


def test_k2_edge_folds_onto_self_paired_loop():
    """Arête (1, 1) entre sommets équivalents : base à une boucle appariée à elle-même."""
    d = build_dir(k2(labels=("a", "a"), sources=("s", "s")), with_sources=True)
    assert coarsest_equitable_partition(d) == [["v0", "v1"]]
    base, phi = minimal_base(d)
    assert len(base) == 1
    (loop,) = base.arcs.values()
    assert loop.s == loop.t and loop.label == (1, 1)
    assert base.sym[loop.id] == loop.id
    assert is_symmetric_covering(d, base, phi).sheet_count == 2


def test_partition_determines_partner_classes():
    """Deux arcs de même (classe, étiquette, classe cible) ont des partenaires Sym de mêmes classes."""
    d = build_dir(generate("ring:6,labels=ab,shared"), with_sources=True)
    blocks = coarsest_equitable_partition(d)
    class_of = {v: i for i, block in enumerate(blocks) for v in block}
    seen = {}
    for a in d.arcs.values():
        partner = d.arcs[d.sym[a.id]]
        key = (class_of[a.s], a.label, class_of[a.t])
        partner_key = (class_of[partner.s], partner.label, class_of[partner.t])
        assert seen.setdefault(key, partner_key) == partner_key


def test_distinct_labels_are_minimal():
    assert is_b_minimal(generate("ring:6,distinct,shared"))


def test_unshared_sources_make_uniform_ring_b_minimal():
    g = generate("ring:6,anon,unshared")
    assert is_b_minimal(g)
    assert not is_minimal(build_dir(g))


def test_one_unshared_ring_is_b_minimal():
    assert is_b_minimal(generate("ring:5,anon,one-unshared"))


def test_k2_same_label_shared_source_is_not_b_minimal():
    assert not is_b_minimal(k2(labels=("a", "a"), sources=("s", "s")))
    assert is_b_minimal(k2(labels=("a", "b"), sources=("s", "s")))


def test_equitable_partition_of_c4_abab():
    d = ring_dir(4, sources=list("abab"), with_sources=True)
    blocks = sorted(sorted(b) for b in coarsest_equitable_partition(d))
    assert blocks == [["v0", "v2"], ["v1", "v3"]]


@pytest.mark.parametrize("spec", [
    "ring:4,anon,shared",
    "ring:6,anon,classes=abcabc",
    "ring:5,anon,one-unshared",
    "path:4,anon,shared",
    "clique:4,anon,classes=aabb",
    "clique:3,anon,shared",
    "random:6:2:3,anon,classes=ab",
])
def test_minimal_base_agrees_with_oracle(spec):
    d = build_dir(generate(spec), with_sources=True)
    base, _ = minimal_base(d)
    bases = brute_force_base_oracle(d)
    assert len(bases[0]) == len(base)


def test_oracle_refuses_large_graphs():
    with pytest.raises(OracleSizeError):
        brute_force_base_oracle(ring_dir(12))


# =============================================================================
# Quasi-revêtements
# =============================================================================

def test_path_over_ring_quasi_covering():
    w = generate_quasi_covering_path(21, 3, radius=9)
    assert w.proper
    assert is_quasi_covering(w.d1, w.d0, w.center, 9, w.gamma)
    assert w.q >= 3
    assert sheets(w) == w.q


def test_quasi_covering_radius_too_large_fails():
    w = generate_quasi_covering_path(21, 3, radius=9)
    # au rayon 10, la boule atteint l'extrémité du chemin (degré 1)
    assert not is_quasi_covering(w.d1, w.d0, w.center, 10, w.gamma)


def test_ring_quasi_covering():
    w = generate_quasi_covering_ring(10, 3)
    assert w.radius == 4
    assert w.proper


def test_covering_is_quasi_covering_of_any_radius():
    pair = generate_covering_pair("ring:3,anon,shared", 2)
    cover = is_symmetric_covering(pair.total_dir, pair.base_dir, pair.phi)
    w = quasi_witness_from_covering(cover, "v0", 7)
    assert not w.proper


def test_invalid_quasi_witness_raises():
    w = generate_quasi_covering_path(11, 3)
    with pytest.raises(CoveringError):
        make_quasi_covering_witness(w.d1, w.d0, w.center, w.radius + 2, w.gamma)


@pytest.mark.parametrize("q", [2, 3])
def test_sheet_bound_on_generated_witnesses(q):
    witnesses = [generate_quasi_covering_path(length, 3) for length in range(13, 33, 2)]
    witnesses += [generate_quasi_covering_ring(size, 4) for size in (13, 17, 21, 25)]
    assert all(check_sheet_bound(w, q) for w in witnesses)
