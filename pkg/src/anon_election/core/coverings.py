# -*- coding: utf-8 -*-
"""
Revêtements symétriques et quasi-revêtements.

- is_symmetric_covering : vérifie une projection φ (bijection locale + Sym)
- covering_from_partition : quotient candidat d'une partition de sommets
- minimal_base : partition équitable la plus grossière, quotient vérifié
- is_b_minimal : minimalité avec les classes de sources dans les étiquettes
- brute_force_base_oracle : énumération exhaustive (petits digraphes)
- is_quasi_covering / sheets / make_quasi_covering_witness
"""

import sys
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from ..config import settings
from .graph import (
    Homomorphism, HomomorphismError, LabeledGraph, SymDigraph,
    ball, build_dir, homomorphism_violations, is_isomorphic,
)


class CoveringError(ValueError):
    """Projection absente ou incompatible (domaine/codomaine, précondition)."""


class OracleSizeError(ValueError):
    """Digraphe trop grand pour l'oracle exhaustif."""


# =============================================================================
# Témoins
# =============================================================================

@dataclass(frozen=True)
class CoveringWitness:
    """φ : total -> base acceptée ; chaque sommet de la base a sheet_count antécédents."""
    total: SymDigraph
    base: SymDigraph
    phi: Homomorphism
    sheet_count: int

    @property
    def accepted(self) -> bool:
        return True

    def fiber(self, base_vertex: str) -> List[str]:
        return sorted(v for v in self.total.vertices if self.phi.vertex_map[v] == base_vertex)


@dataclass(frozen=True)
class Rejection:
    """Refus motivé d'une projection."""
    reasons: Tuple[str, ...]

    @property
    def accepted(self) -> bool:
        return False


@dataclass(frozen=True)
class QuasiCoveringWitness:
    """(D₁, D₀, v₁, r, γ) validé, avec le drapeau 'propre' et le nombre de feuillets."""
    d1: SymDigraph
    d0: SymDigraph
    center: str
    radius: int
    gamma: Homomorphism
    proper: bool
    q: int = field(default=0)


# =============================================================================
# Revêtements symétriques
# =============================================================================

def is_symmetric_covering(total: SymDigraph, base: SymDigraph,
                          phi: Homomorphism) -> Union[CoveringWitness, Rejection]:
    """
    Accepte φ ssi homomorphisme étiqueté, localement bijectif sur les arcs
    entrants et sortants, compatible avec Sym et surjectif.
    """
    if phi.domain != total.name or phi.codomain != base.name:
        raise CoveringError(
            f"φ va de {phi.domain} vers {phi.codomain}, attendu {total.name} -> {base.name}")

    reasons: List[str] = []
    missing_v = [v for v in total.vertices if v not in phi.vertex_map]
    missing_a = sorted(a for a in total.arcs if a not in phi.arc_map)
    if missing_v or missing_a:
        return Rejection((f"φ non défini sur {len(missing_v)} sommets et {len(missing_a)} arcs",))

    report = homomorphism_violations(total, base, phi)
    reasons.extend(report.messages())
    if reasons:
        return Rejection(tuple(reasons))

    for v in total.vertices:
        w = phi.vertex_map[v]
        out_img = sorted(phi.arc_map[a.id] for a in total.out_arcs[v])
        if out_img != sorted(a.id for a in base.out_arcs[w]):
            reasons.append(f"pas de bijection sur les arcs sortants de {v} -> {w}")
        in_img = sorted(phi.arc_map[a.id] for a in total.in_arcs[v])
        if in_img != sorted(a.id for a in base.in_arcs[w]):
            reasons.append(f"pas de bijection sur les arcs entrants de {v} -> {w}")

    for a_id, b_id in sorted(phi.arc_map.items()):
        if phi.arc_map.get(total.sym[a_id]) != base.sym.get(b_id):
            reasons.append(f"φ(Sym({a_id})) ≠ Sym(φ({a_id}))")

    fibers = phi.preimages()
    unreached = [w for w in base.vertices if w not in fibers]
    if unreached:
        reasons.append(f"φ non surjectif : {', '.join(unreached)} sans antécédent")
    sizes = {len(vs) for vs in fibers.values()}
    if not unreached and len(sizes) > 1:
        reasons.append(f"fibres de tailles différentes {sorted(sizes)}")

    if reasons:
        return Rejection(tuple(reasons))
    return CoveringWitness(total, base, phi, sizes.pop())


def compose(first: CoveringWitness, second: CoveringWitness) -> Union[CoveringWitness, Rejection]:
    """φ′ ∘ φ pour φ : D -> D′ et φ′ : D′ -> D″ (revérifiée)."""
    if first.base.name != second.total.name:
        raise CoveringError(f"Composition impossible : {first.base.name} ≠ {second.total.name}")
    return is_symmetric_covering(first.total, second.base, first.phi.compose(second.phi))


def covering_from_partition(d: SymDigraph, blocks: Sequence[Sequence[str]],
                            name: Optional[str] = None) -> Optional[Tuple[SymDigraph, Homomorphism]]:
    """
    Construit le quotient de d par une partition de sommets, ou None si la
    partition n'induit pas de revêtement.

    Représentant d'un bloc = son premier sommet dans l'ordre de d ; les arcs
    de la base sont les arcs sortants du représentant, redirigés vers le
    représentant de la classe d'arrivée.
    """
    class_of: Dict[str, int] = {}
    for i, block in enumerate(blocks):
        for v in block:
            class_of[v] = i
    if set(class_of) != set(d.vertices):
        return None
    reps: Dict[int, str] = {}
    for v in d.vertices:
        reps.setdefault(class_of[v], v)
    rep_of = {v: reps[class_of[v]] for v in d.vertices}

    for v in d.vertices:
        if d.vertex_label[v] != d.vertex_label[rep_of[v]]:
            return None

    base_arcs: List[Tuple[str, str, str, int, int]] = []
    sym_pairs: List[Tuple[str, str]] = []
    for u in reps.values():
        for a in d.out_arcs[u]:
            base_arcs.append((a.id, u, rep_of[a.t], a.label[0], a.label[1]))
    arc_index = {(s, p): (a_id, t, (p, q)) for a_id, s, t, p, q in base_arcs}
    for a_id, s, t, p, q in base_arcs:
        partner = arc_index.get((t, q))
        if partner is None or partner[1] != s or partner[2] != (q, p):
            return None
        sym_pairs.append((a_id, partner[0]))

    base = SymDigraph.build(
        name or f"{d.name}/base",
        {u: d.vertex_label[u] for u in reps.values()},
        base_arcs, sym_pairs,
    )
    arc_map: Dict[str, str] = {}
    for a in d.arcs.values():
        target = arc_index.get((rep_of[a.s], a.label[0]))
        if target is None or target[2] != a.label or target[1] != rep_of[a.t]:
            return None
        arc_map[a.id] = target[0]
    phi = Homomorphism(rep_of, arc_map, d.name, base.name)
    return base, phi


def _label_classes(d: SymDigraph) -> Dict[str, int]:
    ids: Dict[str, int] = {}
    class_of: Dict[str, int] = {}
    for v in d.vertices:
        key = repr(d.vertex_label[v])
        class_of[v] = ids.setdefault(key, len(ids))
    return class_of


def coarsest_equitable_partition(d: SymDigraph) -> List[List[str]]:
    """
    Raffinement itéré : (classe, {(étiquette d'arc, classe de la cible)}).

    Le partenaire Sym d'un arc (p, q) de v vers w est l'unique arc sortant
    de w de port q (ports sortants = [1, deg] dans D_{L×B}) : sa classe est
    celle de w, déjà dans la signature. Une boucle (p, p) est forcément
    auto-appariée pour la même raison.
    """
    class_of = _label_classes(d)
    count = len(set(class_of.values()))
    while True:
        ids: Dict[Tuple, int] = {}
        refined: Dict[str, int] = {}
        for v in d.vertices:
            signature = (class_of[v], tuple(sorted((a.label, class_of[a.t]) for a in d.out_arcs[v])))
            refined[v] = ids.setdefault(signature, len(ids))
        class_of = refined
        if len(ids) == count:
            break
        count = len(ids)
    blocks: Dict[int, List[str]] = {}
    for v in d.vertices:
        blocks.setdefault(class_of[v], []).append(v)
    return list(blocks.values())


def minimal_base(d: SymDigraph) -> Tuple[SymDigraph, Homomorphism]:
    """Base minimale de d et projection quotient (vérifiée par is_symmetric_covering)."""
    built = covering_from_partition(d, coarsest_equitable_partition(d))
    if built is None:
        raise CoveringError(f"Partition équitable de {d.name} non réalisable (digraphe hors D_L×B ?)")
    base, phi = built
    verdict = is_symmetric_covering(d, base, phi)
    if not verdict.accepted:
        raise CoveringError(f"Quotient de {d.name} refusé : {'; '.join(verdict.reasons)}")
    return base, phi


def is_minimal(d: SymDigraph) -> bool:
    base, _ = minimal_base(d)
    return len(base) == len(d)


def is_b_minimal(g: LabeledGraph) -> bool:
    """Minimalité de Dir(G) avec les classes de sources dans les étiquettes."""
    return is_minimal(build_dir(g, with_sources=True))


# =============================================================================
# Oracle exhaustif
# =============================================================================

def _label_compatible_partitions(d: SymDigraph, max_blocks: int) -> Iterator[List[List[str]]]:
    """Partitions en blocs d'étiquette homogène (chaînes à croissance restreinte)."""
    vertices = list(d.vertices)
    blocks: List[List[str]] = []

    def extend(i: int):
        if i == len(vertices):
            yield [list(b) for b in blocks]
            return
        v = vertices[i]
        for block in blocks:
            if d.vertex_label[block[0]] == d.vertex_label[v]:
                block.append(v)
                yield from extend(i + 1)
                block.pop()
        if len(blocks) < max_blocks:
            blocks.append([v])
            yield from extend(i + 1)
            blocks.pop()

    yield from extend(0)


def brute_force_base_oracle(d: SymDigraph, max_base_size: Optional[int] = None) -> List[SymDigraph]:
    """
    Toutes les bases de d (à isomorphisme près) d'au plus max_base_size sommets,
    triées par taille.
    """
    if len(d) > settings.oracle_max_vertices:
        raise OracleSizeError(
            f"{d.name} : {len(d)} sommets > oracle_max_vertices={settings.oracle_max_vertices}")
    limit = max_base_size if max_base_size is not None else len(d)
    bases: List[SymDigraph] = []
    for blocks in _label_compatible_partitions(d, limit):
        built = covering_from_partition(d, blocks, name=f"{d.name}/q{len(bases)}")
        if built is None:
            continue
        base, phi = built
        if not is_symmetric_covering(d, base, phi).accepted:
            continue
        if any(len(b) == len(base) and is_isomorphic(b, base) for b in bases):
            continue
        bases.append(base)
    return sorted(bases, key=len)


# =============================================================================
# Quasi-revêtements
# =============================================================================

def is_quasi_covering(d1: SymDigraph, d0: SymDigraph, v1: str, r: int, gamma: Homomorphism) -> bool:
    """
    Critère local : sur B(v₁, r), γ préserve étiquettes et incidence,
    (i) commute avec Sym, (ii) est injectif sur les arcs entrants/sortants
    de chaque sommet de la boule, (iii) surjectif pour les sommets de B(v₁, r−1).

    γ doit être défini sur toute la boule (sinon HomomorphismError).
    """
    b = ball(d1, v1, r)
    for v in b.vertices:
        if v not in gamma.vertex_map:
            raise HomomorphismError(f"γ non défini sur le sommet {v} de la boule B({v1}, {r})")
    for a in b.arcs:
        if a not in gamma.arc_map:
            raise HomomorphismError(f"γ non défini sur l'arc {a} de la boule B({v1}, {r})")

    report = homomorphism_violations(d1, d0, gamma, vertices=b.vertices, arcs=b.arcs)
    if not report.ok:
        return False

    for a in b.arcs:
        partner = d1.sym[a]
        if partner in b.arcs and gamma.arc_map[partner] != d0.sym.get(gamma.arc_map[a]):
            return False

    for v in b.vertices:
        w = gamma.vertex_map[v]
        out_img = [gamma.arc_map[a.id] for a in d1.out_arcs[v] if a.id in b.arcs]
        in_img = [gamma.arc_map[a.id] for a in d1.in_arcs[v] if a.id in b.arcs]
        if len(set(out_img)) != len(out_img) or len(set(in_img)) != len(in_img):
            return False
        if b.distance[v] <= r - 1:
            if set(out_img) != {a.id for a in d0.out_arcs[w]}:
                return False
            if set(in_img) != {a.id for a in d0.in_arcs[w]}:
                return False
    return True


def _is_proper(d1: SymDigraph, center: str, r: int) -> bool:
    inner = ball(d1, center, r - 1)
    return len(inner.vertices) != len(d1.vertices) or len(inner.arcs) != len(d1.arcs)


def sheets(w: QuasiCoveringWitness) -> int:
    """q = min sur les sommets de D₀ du nombre d'antécédents w avec B(w, 1) ⊆ B(v₁, r)."""
    if not is_quasi_covering(w.d1, w.d0, w.center, w.radius, w.gamma):
        raise CoveringError(f"Témoin invalide : {w.d1.name} -> {w.d0.name} (centre {w.center}, r={w.radius})")
    return _sheets(w.d1, w.d0, w.center, w.radius, w.gamma)


def _sheets(d1: SymDigraph, d0: SymDigraph, center: str, r: int, gamma: Homomorphism) -> int:
    outer = ball(d1, center, r)
    counts = {v: 0 for v in d0.vertices}
    for x in outer.vertices:
        if outer.contains(ball(d1, x, 1)):
            counts[gamma.vertex_map[x]] = counts.get(gamma.vertex_map[x], 0) + 1
    return min(counts.values()) if counts else 0


def make_quasi_covering_witness(d1: SymDigraph, d0: SymDigraph, center: str, r: int,
                                gamma: Homomorphism) -> QuasiCoveringWitness:
    """Valide (D₁, D₀, v₁, r, γ) et calcule le drapeau 'propre' et q."""
    if not is_quasi_covering(d1, d0, center, r, gamma):
        raise CoveringError(f"{d1.name} n'est pas un quasi-revêtement de {d0.name} "
                            f"de centre {center} et de rayon {r}")
    return QuasiCoveringWitness(d1, d0, center, r, gamma,
                                proper=_is_proper(d1, center, r),
                                q=_sheets(d1, d0, center, r, gamma))


def quasi_witness_from_covering(cover: CoveringWitness, center: str, r: int) -> QuasiCoveringWitness:
    """Un revêtement vu comme quasi-revêtement de centre et rayon donnés."""
    return make_quasi_covering_witness(cover.total, cover.base, center, r, cover.phi)


def check_sheet_bound(w: QuasiCoveringWitness, q: int) -> bool:
    """Quasi-revêtement propre de rayon r ≥ q·|V(D₀)| ⇒ au moins q feuillets."""
    if not w.proper or w.radius < q * len(w.d0):
        return True
    ok = w.q >= q
    if not ok:
        print(f"❌ [Coverings] {w.d1.name} -> {w.d0.name} : {w.q} feuillets < {q} "
              f"(r={w.radius})", file=sys.stderr)
    return ok
