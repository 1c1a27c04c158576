# -*- coding: utf-8 -*-
"""
Noyau graphe - graphes étiquetés à numérotation de ports et digraphes symétriques.

Contenu :
- LabeledGraph : réseau simple connexe, étiquettes λ, ports δ, classes de sources
- SymDigraph   : digraphe symétrique étiqueté (involution Sym, étiquettes (p, q))
- Ball, ViewTree, Homomorphism
- validate_graph / validate_digraph : rapports de violations (pas d'exception)
- build_dir, ball, truncated_view, isomorphism
- Chargement / export JSON-YAML avec numéros de ligne dans les erreurs

Les identifiants de sommets sont des chaînes opaques ; networkx sert pour la
connexité, les distances (BFS, direction ignorée) et l'isomorphisme étiqueté.
"""

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx
import yaml
from networkx.algorithms import isomorphism as nx_iso
from pydantic import BaseModel, ValidationError

from .models import (
    ArcRecord, DigraphFile, DigraphVertexRecord, EdgeRecord, GraphFile, HomomorphismFile, VertexRecord,
)

# Étiquette de sommet d'un digraphe : (λ, classe de source ou None)
VertexLabel = Tuple[Any, Optional[str]]
ArcLabel = Tuple[int, int]
Path_ = Tuple[str, ...]


# =============================================================================
# Erreurs & rapports
# =============================================================================

@dataclass(frozen=True)
class Violation:
    """Invariant violé. `where` est un chemin dans le fichier source (ex: ("edges", 3))."""
    code: str
    message: str
    where: Tuple[Any, ...] = ()

    def __str__(self) -> str:
        return self.message


@dataclass
class ValidationReport:
    """Liste des invariants violés ; vide ssi l'objet est valide."""
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, where: Tuple[Any, ...] = ()):
        self.violations.append(Violation(code, message, where))

    def codes(self) -> List[str]:
        return [v.code for v in self.violations]

    def messages(self) -> List[str]:
        return [v.message for v in self.violations]


class GraphValidationError(ValueError):
    """Graphe ou fichier de graphe invalide (liste complète des violations)."""

    def __init__(self, violations: Iterable[Union[Violation, str]], source: str = ""):
        self.violations = [v if isinstance(v, Violation) else Violation("invalid", v) for v in violations]
        head = f"Graphe invalide ({source})" if source else "Graphe invalide"
        super().__init__(head + " :\n" + "\n".join(f"  - {v.message}" for v in self.violations))


class UnknownVertexError(ValueError):
    """Sommet absent du graphe."""

    def __init__(self, vertex: str, graph: str):
        self.vertex = vertex
        super().__init__(f"Sommet inconnu '{vertex}' dans {graph}")


class HomomorphismError(ValueError):
    """Homomorphisme mal formé (sommet ou arc non défini, cible absente)."""


# =============================================================================
# Graphes étiquetés (niveau réseau)
# =============================================================================

@dataclass(frozen=True)
class Edge:
    """Arête {u, v} avec pu = port_u(v) et pv = port_v(u)."""
    u: str
    v: str
    pu: int
    pv: int


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """
    Réseau anonyme : graphe simple connexe avec étiquettes, ports et sources.

    Les invariants ne sont pas imposés à la construction : validate_graph()
    produit le rapport, et build_dir() refuse un graphe invalide.
    """
    name: str
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    vertex_label: Mapping[str, str]
    source_class: Mapping[str, Optional[str]]

    @classmethod
    def build(cls, name: str, vertices: Iterable[Tuple[str, str, Optional[str]]],
              edges: Iterable[Tuple[str, str, int, int]]) -> "LabeledGraph":
        """Construit depuis des tuples (id, label, source) et (u, v, pu, pv)."""
        vs = list(vertices)
        return cls(
            name=name,
            vertices=tuple(v for v, _, _ in vs),
            edges=tuple(Edge(u, v, pu, pv) for u, v, pu, pv in edges),
            vertex_label={v: lbl for v, lbl, _ in vs},
            source_class={v: src for v, _, src in vs},
        )

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def port(self) -> Dict[str, Dict[str, int]]:
        """port[u][v] = port_u(v)."""
        ports: Dict[str, Dict[str, int]] = {v: {} for v in self.vertices}
        for e in self.edges:
            ports.setdefault(e.u, {})[e.v] = e.pu
            ports.setdefault(e.v, {})[e.u] = e.pv
        return ports

    def degree(self, v: str) -> int:
        return len(self.port[v])

    def neighbor_on_port(self, v: str, p: int) -> str:
        for w, port in self.port[v].items():
            if port == p:
                return w
        raise KeyError(f"Pas de port {p} en {v}")

    @cached_property
    def nx_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((e.u, e.v) for e in self.edges)
        return g

    def with_sources(self, classes: Mapping[str, Optional[str]], name: Optional[str] = None) -> "LabeledGraph":
        """Copie avec d'autres classes de sources."""
        return LabeledGraph(name or self.name, self.vertices, self.edges,
                            dict(self.vertex_label), {v: classes.get(v) for v in self.vertices})

    def relabeled(self, labels: Mapping[str, str], name: Optional[str] = None) -> "LabeledGraph":
        """Copie avec d'autres étiquettes λ."""
        return LabeledGraph(name or self.name, self.vertices, self.edges,
                            {v: labels[v] for v in self.vertices}, dict(self.source_class))


def validate_graph(g: LabeledGraph) -> ValidationReport:
    """Vérifie les invariants de LabeledGraph (simple, connexe, ports = [1, deg])."""
    report = ValidationReport()
    if not g.vertices:
        report.add("empty", "graphe vide", ("vertices",))
        return report

    seen = set()
    for i, v in enumerate(g.vertices):
        if v in seen:
            report.add("duplicate-vertex", f"sommet '{v}' déclaré deux fois", ("vertices", i))
        seen.add(v)

    pairs = set()
    ports: Dict[str, List[int]] = {v: [] for v in g.vertices}
    for i, e in enumerate(g.edges):
        where = ("edges", i)
        if e.u not in seen or e.v not in seen:
            missing = e.u if e.u not in seen else e.v
            report.add("unknown-vertex", f"arête #{i} : sommet inconnu '{missing}'", where)
            continue
        if e.u == e.v:
            report.add("self-loop", f"arête #{i} : boucle sur '{e.u}'", where)
            continue
        key = frozenset((e.u, e.v))
        if key in pairs:
            report.add("multi-edge", f"arête #{i} : arête multiple {e.u}–{e.v}", where)
            continue
        pairs.add(key)
        ports[e.u].append(e.pu)
        ports[e.v].append(e.pv)

    for i, v in enumerate(g.vertices):
        got = sorted(ports.get(v, []))
        if got != list(range(1, len(got) + 1)):
            report.add("port-set",
                       f"sommet '{v}' : ports {got} au lieu de [1, {len(got)}]",
                       ("vertices", i))

    if report.ok and not nx.is_connected(g.nx_graph):
        report.add("disconnected",
                   f"graphe non connexe ({nx.number_connected_components(g.nx_graph)} composantes)",
                   ("edges",))
    return report


# =============================================================================
# Digraphes symétriques
# =============================================================================

@dataclass(frozen=True)
class Arc:
    """Arc a avec s(a), t(a) et étiquette (p, q)."""
    id: str
    s: str
    t: str
    label: ArcLabel


@dataclass(frozen=True, eq=False)
class SymDigraph:
    """
    Digraphe symétrique étiqueté (D, λ, Sym).

    Peut contenir boucles et arcs multiples (bases minimales, D_M) ; les
    dictionnaires sont considérés immuables après construction.
    """
    name: str
    vertices: Tuple[str, ...]
    vertex_label: Mapping[str, VertexLabel]
    arcs: Mapping[str, Arc]
    sym: Mapping[str, str]

    @classmethod
    def build(cls, name: str, vertices: Mapping[str, VertexLabel],
              arcs: Iterable[Tuple[str, str, str, int, int]],
              sym: Iterable[Tuple[str, str]]) -> "SymDigraph":
        """Construit depuis {v: label}, des tuples (id, s, t, p, q) et des paires Sym."""
        arc_map = {a: Arc(a, s, t, (p, q)) for a, s, t, p, q in arcs}
        sym_map: Dict[str, str] = {}
        for a, b in sym:
            sym_map[a] = b
            sym_map[b] = a
        return cls(name, tuple(vertices), dict(vertices), arc_map, sym_map)

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def index(self) -> Dict[str, int]:
        """Indices entiers denses des sommets."""
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def out_arcs(self) -> Dict[str, Tuple[Arc, ...]]:
        out: Dict[str, List[Arc]] = {v: [] for v in self.vertices}
        for a in self.arcs.values():
            out.setdefault(a.s, []).append(a)
        return {v: tuple(sorted(arcs, key=lambda a: (a.label, a.id))) for v, arcs in out.items()}

    @cached_property
    def in_arcs(self) -> Dict[str, Tuple[Arc, ...]]:
        inc: Dict[str, List[Arc]] = {v: [] for v in self.vertices}
        for a in self.arcs.values():
            inc.setdefault(a.t, []).append(a)
        return {v: tuple(sorted(arcs, key=lambda a: (a.label[1], a.label[0], a.id))) for v, arcs in inc.items()}

    @cached_property
    def _out_by_port(self) -> Dict[Tuple[str, int], Arc]:
        return {(a.s, a.label[0]): a for a in self.arcs.values()}

    @cached_property
    def _in_by_port(self) -> Dict[Tuple[str, int], Arc]:
        return {(a.t, a.label[1]): a for a in self.arcs.values()}

    @cached_property
    def arcs_between(self) -> Dict[Tuple[str, str], Tuple[Arc, ...]]:
        between: Dict[Tuple[str, str], List[Arc]] = {}
        for a in sorted(self.arcs.values(), key=lambda a: a.id):
            between.setdefault((a.s, a.t), []).append(a)
        return {k: tuple(v) for k, v in between.items()}

    def degree(self, v: str) -> int:
        return len(self.out_arcs[v])

    def out_arc_by_port(self, v: str, p: int) -> Arc:
        """Arc sortant de v dont la première composante d'étiquette vaut p."""
        return self._out_by_port[(v, p)]

    def in_arc_by_port(self, v: str, q: int) -> Arc:
        """Arc entrant en v dont la seconde composante d'étiquette vaut q."""
        return self._in_by_port[(v, q)]

    def has_vertex(self, v: str) -> bool:
        return v in self.vertex_label

    @cached_property
    def nx_multi(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        for v in self.vertices:
            g.add_node(v, label=self.vertex_label[v])
        for a in self.arcs.values():
            g.add_edge(a.s, a.t, key=a.id, label=a.label)
        return g

    @cached_property
    def nx_undirected(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((a.s, a.t) for a in self.arcs.values() if a.s != a.t)
        return g

    @cached_property
    def fingerprint(self) -> Tuple[Any, ...]:
        """Empreinte hashable (égalité structurelle exacte, identifiants compris)."""
        return (
            tuple(sorted((v, repr(self.vertex_label[v])) for v in self.vertices)),
            tuple(sorted((a.id, a.s, a.t, a.label) for a in self.arcs.values())),
            tuple(sorted(self.sym.items())),
        )

    def distances(self, v: str, cutoff: Optional[int] = None) -> Dict[str, int]:
        """dist_D(v, ·) par parcours en largeur, direction ignorée."""
        if not self.has_vertex(v):
            raise UnknownVertexError(v, self.name)
        return nx.single_source_shortest_path_length(self.nx_undirected, v, cutoff=cutoff)

    def renamed(self, name: str) -> "SymDigraph":
        return SymDigraph(name, self.vertices, self.vertex_label, self.arcs, self.sym)


def validate_digraph(d: SymDigraph) -> ValidationReport:
    """
    Rapport d'appartenance à D_{L×B} + forte connexité.

    Vérifie : Sym défini et involutif avec s(a) = t(Sym(a)), étiquettes
    inversées par Sym, boucles auto-appariées seulement si l'étiquette est
    (p, p), ports sortants = [1, deg] en chaque sommet, connexité.
    """
    report = ValidationReport()
    if not d.vertices:
        report.add("empty", "digraphe vide", ("vertices",))
        return report

    for a in sorted(d.arcs.values(), key=lambda a: a.id):
        where = ("arcs", a.id)
        if a.s not in d.vertex_label or a.t not in d.vertex_label:
            report.add("unknown-vertex", f"arc {a.id} : extrémité inconnue", where)
            continue
        if a.label[0] < 1 or a.label[1] < 1:
            report.add("port-set", f"arc {a.id} : ports {a.label} non strictement positifs", where)
        partner = d.sym.get(a.id)
        if partner is None or partner not in d.arcs:
            report.add("sym-undefined", f"sym undefined : l'arc {a.id} n'a pas de partenaire", where)
            continue
        b = d.arcs[partner]
        if d.sym.get(partner) != a.id:
            report.add("sym-not-involution", f"Sym n'est pas une involution sur {a.id} ↔ {partner}", where)
        if b.s != a.t or b.t != a.s:
            report.add("sym-incidence", f"s({a.id}) ≠ t(Sym({a.id})) ou l'inverse", where)
        if b.label != (a.label[1], a.label[0]):
            report.add("label-not-reversed",
                       f"étiquette de Sym({a.id}) = {b.label}, attendu {(a.label[1], a.label[0])}", where)
        if partner == a.id and a.label[0] != a.label[1]:
            report.add("loop-label", f"boucle auto-appariée {a.id} d'étiquette {a.label} ≠ (p, p)", where)

    for v in d.vertices:
        ports = sorted(a.label[0] for a in d.out_arcs.get(v, ()))
        if ports != list(range(1, len(ports) + 1)):
            report.add("port-set", f"sommet '{v}' : ports sortants {ports} au lieu de [1, {len(ports)}]",
                       ("vertices", v))

    if not report.violations or all(v.code != "unknown-vertex" for v in report.violations):
        if not nx.is_strongly_connected(d.nx_multi):
            report.add("disconnected", "digraphe non fortement connexe", ("arcs",))
    return report


def source_class_of(g: LabeledGraph, v: str) -> str:
    """Classe de source de v ; absente = source privée."""
    return g.source_class.get(v) or f"#{v}"


def build_dir(g: LabeledGraph, with_sources: bool = False) -> SymDigraph:
    """
    Dir(G) : chaque arête {u, v} donne a_(u,v) et a_(v,u), étiquetés
    (port_u(v), port_v(u)) et (port_v(u), port_u(v)), appariés par Sym.

    with_sources=True place la classe de source dans l'étiquette de sommet ;
    un sommet sans classe reçoit la classe privée "#<id>".
    """
    report = validate_graph(g)
    if not report.ok:
        raise GraphValidationError(report.violations, g.name)
    labels = {v: (g.vertex_label[v], source_class_of(g, v) if with_sources else None) for v in g.vertices}
    arcs = []
    sym = []
    for e in g.edges:
        a_uv, a_vu = f"{e.u}>{e.v}", f"{e.v}>{e.u}"
        arcs.append((a_uv, e.u, e.v, e.pu, e.pv))
        arcs.append((a_vu, e.v, e.u, e.pv, e.pu))
        sym.append((a_uv, a_vu))
    return SymDigraph.build(g.name, labels, arcs, sym)


def to_labeled_graph(d: SymDigraph, name: Optional[str] = None) -> LabeledGraph:
    """Inverse de build_dir pour un digraphe sans boucle ni arc multiple."""
    edges = []
    seen = set()
    for a in sorted(d.arcs.values(), key=lambda a: a.id):
        if a.s == a.t:
            raise GraphValidationError([Violation("self-loop", f"boucle {a.id} : pas un graphe simple")], d.name)
        partner = d.sym[a.id]
        if partner in seen:
            continue
        seen.add(a.id)
        edges.append((a.s, a.t, a.label[0], a.label[1]))
    vertices = [(v, d.vertex_label[v][0], d.vertex_label[v][1]) for v in d.vertices]
    g = LabeledGraph.build(name or d.name, vertices, edges)
    report = validate_graph(g)
    if not report.ok:
        raise GraphValidationError(report.violations, d.name)
    return g


def with_labels(d: SymDigraph, fn: Callable[[str, VertexLabel], Any], name: Optional[str] = None) -> SymDigraph:
    """Copie de d dont l'étiquette de chaque sommet v devient fn(v, label)."""
    return SymDigraph(name or d.name, d.vertices,
                      {v: fn(v, d.vertex_label[v]) for v in d.vertices}, d.arcs, d.sym)


def strip_sources(d: SymDigraph, name: Optional[str] = None) -> SymDigraph:
    """Retire la classe de source des étiquettes (λ, classe) -> (λ, None)."""
    return with_labels(d, lambda _v, lbl: (lbl[0], None), name)


# =============================================================================
# Boules
# =============================================================================

@dataclass(frozen=True)
class Ball:
    """B_D(v, r) : sommets à distance ≤ r, arcs dont une extrémité est à distance ≤ r−1."""
    parent: str
    center: str
    radius: int
    vertices: frozenset
    arcs: frozenset
    distance: Mapping[str, int] = field(compare=False, hash=False)

    def contains(self, other: "Ball") -> bool:
        return other.vertices <= self.vertices and other.arcs <= self.arcs


def ball(d: SymDigraph, v: str, r: int) -> Ball:
    """Boule étiquetée de centre v et de rayon r (r < 0 donne la boule vide)."""
    if not d.has_vertex(v):
        raise UnknownVertexError(v, d.name)
    if r < 0:
        return Ball(d.name, v, r, frozenset(), frozenset(), {})
    dist = d.distances(v, cutoff=r)
    inner = {w for w, k in dist.items() if k <= r - 1}
    arcs = frozenset(a.id for a in d.arcs.values() if a.s in inner or a.t in inner)
    return Ball(d.name, v, r, frozenset(dist), arcs, dist)


# =============================================================================
# Vues tronquées
# =============================================================================

@dataclass(frozen=True, eq=False)
class ViewTree:
    """
    Vue de v tronquée à la profondeur d : un nœud par chemin non bégayant
    (suite d'identifiants d'arcs), étiquettes recopiées de l'extrémité.
    """
    root: str
    depth: int
    nodes: Tuple[Path_, ...]
    node_label: Mapping[Path_, VertexLabel]
    arc_label: Mapping[Path_, ArcLabel]

    @cached_property
    def children(self) -> Dict[Path_, Tuple[Path_, ...]]:
        kids: Dict[Path_, List[Path_]] = {p: [] for p in self.nodes}
        for p in self.nodes:
            if p:
                kids[p[:-1]].append(p)
        return {p: tuple(c) for p, c in kids.items()}

    def canonical(self, path: Path_ = ()) -> Tuple[Any, ...]:
        """Forme canonique : deux vues sont isomorphes ssi leurs formes sont égales."""
        return self._canon[path]

    @cached_property
    def _canon(self) -> Dict[Path_, Tuple[Any, ...]]:
        canon: Dict[Path_, Tuple[Any, ...]] = {}
        for p in sorted(self.nodes, key=len, reverse=True):
            sub = sorted((repr(self.arc_label[c]), canon[c]) for c in self.children[p])
            canon[p] = (repr(self.node_label[p]), tuple(sub))
        return canon


def truncated_view(d: SymDigraph, v: str, depth: int) -> ViewTree:
    """T_D(v) restreinte aux chemins non bégayants de longueur ≤ depth."""
    if not d.has_vertex(v):
        raise UnknownVertexError(v, d.name)
    nodes: List[Path_] = [()]
    node_label: Dict[Path_, VertexLabel] = {(): d.vertex_label[v]}
    arc_label: Dict[Path_, ArcLabel] = {}
    frontier: List[Path_] = [()]
    for _ in range(depth):
        nxt: List[Path_] = []
        for path in frontier:
            end = d.arcs[path[-1]].t if path else v
            back = d.sym[path[-1]] if path else None
            for a in d.out_arcs[end]:
                if a.id == back:
                    continue
                child = path + (a.id,)
                nodes.append(child)
                node_label[child] = d.vertex_label[a.t]
                arc_label[child] = a.label
                nxt.append(child)
        frontier = nxt
    return ViewTree(v, depth, tuple(nodes), node_label, arc_label)


def views_isomorphic(t1: ViewTree, t2: ViewTree) -> bool:
    return t1.depth == t2.depth and t1.canonical() == t2.canonical()


# =============================================================================
# Isomorphisme
# =============================================================================

def isomorphism(d1: SymDigraph, d2: SymDigraph) -> Optional[Dict[str, str]]:
    """Bijection de sommets préservant étiquettes de sommets et d'arcs, ou None."""
    if len(d1.vertices) != len(d2.vertices) or len(d1.arcs) != len(d2.arcs):
        return None
    matcher = nx_iso.MultiDiGraphMatcher(
        d1.nx_multi, d2.nx_multi,
        node_match=nx_iso.categorical_node_match("label", None),
        edge_match=nx_iso.categorical_multiedge_match("label", None),
    )
    if matcher.is_isomorphic():
        return dict(matcher.mapping)
    return None


def is_isomorphic(d1: SymDigraph, d2: SymDigraph) -> bool:
    return isomorphism(d1, d2) is not None


# =============================================================================
# Homomorphismes
# =============================================================================

@dataclass(frozen=True, eq=False)
class Homomorphism:
    """γ : domain -> codomain, donné sommet par sommet et arc par arc."""
    vertex_map: Mapping[str, str]
    arc_map: Mapping[str, str]
    domain: str
    codomain: str

    def __call__(self, v: str) -> str:
        return self.vertex_map[v]

    @classmethod
    def identity(cls, d: SymDigraph) -> "Homomorphism":
        return cls({v: v for v in d.vertices}, {a: a for a in d.arcs}, d.name, d.name)

    @classmethod
    def from_vertex_map(cls, dom: SymDigraph, cod: SymDigraph, vmap: Mapping[str, str],
                        arcs: Optional[Iterable[str]] = None) -> "Homomorphism":
        """
        Complète une application de sommets en homomorphisme.

        Chaque arc a (restreint à `arcs` si fourni) dont les deux extrémités
        sont envoyées est associé à l'arc de cod entre les images portant la
        même étiquette, sinon au premier arc entre les images ; un arc sans
        candidat reste non défini.
        """
        amap: Dict[str, str] = {}
        ids = sorted(arcs) if arcs is not None else sorted(dom.arcs)
        for a_id in ids:
            a = dom.arcs[a_id]
            if a.s not in vmap or a.t not in vmap:
                continue
            candidates = cod.arcs_between.get((vmap[a.s], vmap[a.t]), ())
            if not candidates:
                continue
            same = [b for b in candidates if b.label == a.label]
            amap[a_id] = (same or list(candidates))[0].id
        return cls(dict(vmap), amap, dom.name, cod.name)

    def retarget(self, domain: str, codomain: str) -> "Homomorphism":
        """Même application, vue entre digraphes renommés (ex: étiquettes augmentées)."""
        return Homomorphism(self.vertex_map, self.arc_map, domain, codomain)

    def preimages(self) -> Dict[str, List[str]]:
        fibers: Dict[str, List[str]] = {}
        for v, w in self.vertex_map.items():
            fibers.setdefault(w, []).append(v)
        return fibers

    def compose(self, after: "Homomorphism") -> "Homomorphism":
        """after ∘ self."""
        if self.codomain != after.domain:
            raise HomomorphismError(f"Composition impossible : {self.codomain} ≠ {after.domain}")
        return Homomorphism(
            {v: after.vertex_map[w] for v, w in self.vertex_map.items()},
            {a: after.arc_map[b] for a, b in self.arc_map.items()},
            self.domain, after.codomain,
        )


def homomorphism_violations(dom: SymDigraph, cod: SymDigraph, h: Homomorphism,
                            vertices: Optional[Iterable[str]] = None,
                            arcs: Optional[Iterable[str]] = None) -> ValidationReport:
    """
    Vérifie incidence et étiquettes sur les sommets/arcs donnés (tous par défaut).

    Un sommet ou un arc sans image est une erreur de contrat (HomomorphismError),
    pas une violation.
    """
    report = ValidationReport()
    vs = list(vertices) if vertices is not None else list(dom.vertices)
    arc_ids = list(arcs) if arcs is not None else list(dom.arcs)
    for v in vs:
        if v not in h.vertex_map:
            raise HomomorphismError(f"γ non défini sur le sommet {v}")
        w = h.vertex_map[v]
        if not cod.has_vertex(w):
            report.add("unknown-vertex", f"γ({v}) = {w} absent de {cod.name}")
        elif dom.vertex_label[v] != cod.vertex_label[w]:
            report.add("vertex-label", f"étiquette de {v} {dom.vertex_label[v]!r} ≠ celle de {w} {cod.vertex_label[w]!r}")
    for a_id in sorted(arc_ids):
        if a_id not in h.arc_map:
            raise HomomorphismError(f"γ non défini sur l'arc {a_id}")
        b_id = h.arc_map[a_id]
        if b_id not in cod.arcs:
            report.add("unknown-arc", f"γ({a_id}) = {b_id} absent de {cod.name}")
            continue
        a, b = dom.arcs[a_id], cod.arcs[b_id]
        if h.vertex_map.get(a.s) != b.s or h.vertex_map.get(a.t) != b.t:
            report.add("incidence", f"incidence non préservée sur {a_id} -> {b_id}")
        if a.label != b.label:
            report.add("arc-label", f"étiquette {a.label} de {a_id} ≠ {b.label} de {b_id}")
    return report


# =============================================================================
# Chargement / export
# =============================================================================

def _compose_node(text: str):
    try:
        return yaml.compose(text)
    except yaml.YAMLError:
        return None


def _line_of(node, where: Tuple[Any, ...], id_key: str = "id") -> Optional[int]:
    """Numéro de ligne (1-based) du nœud YAML désigné par `where`."""
    current = node
    line = current.start_mark.line + 1 if current is not None else None
    for step in where:
        if current is None:
            break
        nxt = None
        if isinstance(current, yaml.MappingNode):
            for k, v in current.value:
                if k.value == step:
                    nxt = v
                    break
        elif isinstance(current, yaml.SequenceNode):
            if isinstance(step, int) and 0 <= step < len(current.value):
                nxt = current.value[step]
            elif isinstance(step, str):
                for item in current.value:
                    if isinstance(item, yaml.MappingNode) and any(
                            k.value == id_key and getattr(v, "value", None) == step for k, v in item.value):
                        nxt = item
                        break
        current = nxt
        if current is not None:
            line = current.start_mark.line + 1
    return line


def _read_model(path: Union[str, Path], model: type) -> Tuple[BaseModel, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
        data = yaml.safe_load(text)
    except (OSError, yaml.YAMLError) as e:
        raise GraphValidationError([Violation("parse", f"fichier illisible : {e}")], str(path))
    root = _compose_node(text)
    try:
        return model.model_validate(data or {}), root
    except ValidationError as e:
        violations = []
        for err in e.errors():
            loc = tuple(err["loc"])
            line = _line_of(root, loc)
            dotted = ".".join(str(x) for x in loc)
            violations.append(Violation("schema", f"ligne {line} : {dotted} : {err['msg']}", loc))
        raise GraphValidationError(violations, str(path))


def _with_lines(report: ValidationReport, root) -> List[Violation]:
    out = []
    for v in report.violations:
        line = _line_of(root, v.where) if v.where else None
        prefix = f"ligne {line} : " if line else ""
        out.append(Violation(v.code, prefix + v.message, v.where))
    return out


def graph_from_model(model: GraphFile, name: str) -> LabeledGraph:
    return LabeledGraph.build(
        model.name or name,
        [(v.id, v.label, v.source) for v in model.vertices],
        [(e.u, e.v, e.pu, e.pv) for e in model.edges],
    )


def load_graph(path: Union[str, Path]) -> LabeledGraph:
    """Charge un graphe JSON/YAML ; refuse tout invariant violé avec numéros de ligne."""
    model, root = _read_model(path, GraphFile)
    g = graph_from_model(model, Path(path).stem)
    report = validate_graph(g)
    if not report.ok:
        raise GraphValidationError(_with_lines(report, root), str(path))
    return g


def dump_graph(g: LabeledGraph) -> Dict[str, Any]:
    """Forme JSON d'un graphe (noms de champs exacts du format)."""
    return GraphFile(
        name=g.name,
        vertices=[VertexRecord(id=v, label=g.vertex_label[v], source=g.source_class.get(v)) for v in g.vertices],
        edges=[EdgeRecord(u=e.u, v=e.v, pu=e.pu, pv=e.pv) for e in g.edges],
    ).model_dump()


def _json_label(label: Any) -> Any:
    if isinstance(label, (tuple, list)):
        return [_json_label(x) for x in label]
    return label


def _hashable_label(label: Any) -> Any:
    if isinstance(label, list):
        return tuple(_hashable_label(x) for x in label)
    return label


def digraph_from_model(model: DigraphFile, name: str) -> SymDigraph:
    vertices = {v.id: (_hashable_label(v.label), v.source) for v in model.vertices}
    arcs = [(a.id, a.s, a.t, a.p, a.q) for a in model.arcs]
    sym = []
    for pair in model.sym:
        if len(pair) == 1:
            sym.append((pair[0], pair[0]))
        elif len(pair) == 2:
            sym.append((pair[0], pair[1]))
    return SymDigraph.build(model.name or name, vertices, arcs, sym)


def load_digraph(path: Union[str, Path]) -> SymDigraph:
    """Charge un digraphe symétrique explicite ; refuse s'il n'est pas dans D_{L×B}."""
    model, root = _read_model(path, DigraphFile)
    d = digraph_from_model(model, Path(path).stem)
    report = validate_digraph(d)
    if not report.ok:
        raise GraphValidationError(_with_lines(report, root), str(path))
    return d


def dump_digraph(d: SymDigraph) -> Dict[str, Any]:
    pairs = []
    seen = set()
    for a in sorted(d.arcs):
        b = d.sym.get(a)
        if b is None or a in seen:
            continue
        seen.update((a, b))
        pairs.append([a, b])
    return DigraphFile(
        name=d.name,
        vertices=[DigraphVertexRecord(id=v, label=_json_label(d.vertex_label[v][0]),
                                      source=d.vertex_label[v][1])
                  for v in d.vertices],
        arcs=[ArcRecord(id=a.id, s=a.s, t=a.t, p=a.label[0], q=a.label[1])
              for a in sorted(d.arcs.values(), key=lambda a: a.id)],
        sym=pairs,
    ).model_dump()


def load_homomorphism(path: Union[str, Path], domain: str, codomain: str) -> Homomorphism:
    model, _ = _read_model(path, HomomorphismFile)
    return Homomorphism(dict(model.vertex_map), dict(model.arc_map),
                        model.domain or domain, model.codomain or codomain)


def dump_homomorphism(h: Homomorphism) -> Dict[str, Any]:
    return HomomorphismFile(domain=h.domain, codomain=h.codomain,
                            vertex_map=dict(h.vertex_map), arc_map=dict(h.arc_map)).model_dump()
