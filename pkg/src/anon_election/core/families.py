# -*- coding: utf-8 -*-
"""
Générateurs de graphes et de fixtures.

Une spec texte décrit forme, étiquetage et sources :

    ring:6,anon,classes=ababab
    clique:4,anon,classes=aaab
    random:7:3:42,distinct,one-unshared

Conventions de ports :
- ring   : 1 = successeur, 2 = prédécesseur (orientation globale) ;
- path   : 1 = successeur, 2 = prédécesseur ; le dernier sommet atteint
           son prédécesseur par le port 1 ;
- clique : port_i(j) = (j − i) mod n ;
- grid   : ports compactés dans l'ordre est, ouest, nord, sud ;
- torus  : 1 = est, 2 = ouest, 3 = nord, 4 = sud ;
- random : voisins triés puis permutés par le générateur de la spec.

Sommets v0, v1, ... (zéros à gauche au-delà de 10 sommets).
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import yaml
from pydantic import BaseModel, Field

from ..config import settings
from .coverings import QuasiCoveringWitness, make_quasi_covering_witness
from .graph import (
    Homomorphism, LabeledGraph, SymDigraph, build_dir, load_graph, validate_graph, GraphValidationError,
)


class GeneratorError(ValueError):
    """Spec mal formée ou construction non prise en charge."""


Shape = Literal["ring", "path", "clique", "grid", "torus", "random"]


class GeneratorSpec(BaseModel):
    """Forme + étiquetage + sources ; text() redonne la forme canonique."""
    shape: Shape
    n: int = Field(0, ge=0)
    width: int = 0
    height: int = 0
    degree: int = 0
    seed: int = 0
    labeling: Literal["anon", "distinct", "pattern"] = "anon"
    labels: List[str] = Field(default_factory=list)
    sources: Literal["unshared", "shared", "one-unshared", "classes"] = "unshared"
    classes: List[str] = Field(default_factory=list)

    @property
    def size(self) -> int:
        if self.shape in ("grid", "torus"):
            return self.width * self.height
        return self.n

    def text(self) -> str:
        if self.shape in ("grid", "torus"):
            head = f"{self.shape}:{self.width}x{self.height}"
        elif self.shape == "random":
            head = f"random:{self.n}:{self.degree}:{self.seed}"
        else:
            head = f"{self.shape}:{self.n}"
        parts = [head]
        parts.append(f"labels={_pattern_text(self.labels)}" if self.labeling == "pattern" else self.labeling)
        parts.append(f"classes={_pattern_text(self.classes)}" if self.sources == "classes" else self.sources)
        return ",".join(parts)


def _pattern_text(items: Sequence[str]) -> str:
    return "".join(items) if all(len(x) == 1 for x in items) else "/".join(items)


def _pattern(text: str) -> List[str]:
    if not text:
        raise GeneratorError("Motif vide")
    return text.split("/") if "/" in text else list(text)


def _int(token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise GeneratorError(f"{what} : entier attendu, reçu '{token}'") from None


def parse_spec(text: str) -> GeneratorSpec:
    """ring:N, path:N, clique:N, grid:WxH, torus:WxH, random:N:DEG:SEED + options."""
    tokens = [t.strip() for t in text.strip().split(",") if t.strip()]
    if not tokens:
        raise GeneratorError("Spec vide")
    head, options = tokens[0], tokens[1:]
    shape, _, rest = head.partition(":")
    values: Dict[str, object] = {"shape": shape}
    if shape in ("ring", "path", "clique"):
        values["n"] = _int(rest, shape)
    elif shape in ("grid", "torus"):
        w, sep, h = rest.partition("x")
        if not sep:
            raise GeneratorError(f"{shape} : format WxH attendu, reçu '{rest}'")
        values["width"], values["height"] = _int(w, "largeur"), _int(h, "hauteur")
    elif shape == "random":
        parts = rest.split(":")
        if len(parts) != 3:
            raise GeneratorError(f"random : format random:N:DEG:SEED attendu, reçu '{head}'")
        values["n"], values["degree"], values["seed"] = (_int(p, "random") for p in parts)
    else:
        raise GeneratorError(f"Forme inconnue '{shape}' (ring, path, clique, grid, torus, random)")

    for opt in options:
        if opt in ("anon", "distinct"):
            values["labeling"] = opt
        elif opt.startswith("labels="):
            values["labeling"], values["labels"] = "pattern", _pattern(opt[len("labels="):])
        elif opt in ("unshared", "shared", "one-unshared"):
            values["sources"] = opt
        elif opt.startswith("classes="):
            values["sources"], values["classes"] = "classes", _pattern(opt[len("classes="):])
        else:
            raise GeneratorError(f"Option inconnue '{opt}'")
    return GeneratorSpec(**values)


# =============================================================================
# Formes
# =============================================================================

Edges = List[Tuple[int, int, int, int]]


def _ring_edges(n: int) -> Edges:
    if n < 3:
        raise GeneratorError(f"ring({n}) : n ≥ 3 requis (C₂ n'est pas simple)")
    return [(i, (i + 1) % n, 1, 2) for i in range(n)]


def _path_edges(n: int) -> Edges:
    if n < 1:
        raise GeneratorError("path : n ≥ 1 requis")
    return [(i, i + 1, 1, 2 if i + 1 < n - 1 else 1) for i in range(n - 1)]


def _clique_edges(n: int) -> Edges:
    if n < 1:
        raise GeneratorError("clique : n ≥ 1 requis")
    return [(i, j, (j - i) % n, (i - j) % n) for i in range(n) for j in range(i + 1, n)]


def _grid_edges(w: int, h: int) -> Edges:
    if w < 1 or h < 1 or w * h < 1:
        raise GeneratorError(f"grid({w}x{h}) : dimensions ≥ 1 requises")
    idx = lambda x, y: y * w + x  # noqa: E731
    directions: Dict[int, List[Tuple[str, int]]] = {}
    for y in range(h):
        for x in range(w):
            present = []
            if x + 1 < w:
                present.append(("E", idx(x + 1, y)))
            if x > 0:
                present.append(("W", idx(x - 1, y)))
            if y + 1 < h:
                present.append(("N", idx(x, y + 1)))
            if y > 0:
                present.append(("S", idx(x, y - 1)))
            directions[idx(x, y)] = present
    port = {(u, v): i + 1 for u, present in directions.items() for i, (_, v) in enumerate(present)}
    edges = []
    for y in range(h):
        for x in range(w):
            u = idx(x, y)
            for v in (idx(x + 1, y) if x + 1 < w else None, idx(x, y + 1) if y + 1 < h else None):
                if v is not None:
                    edges.append((u, v, port[(u, v)], port[(v, u)]))
    return edges


def _torus_edges(w: int, h: int) -> Edges:
    if w < 3 or h < 3:
        raise GeneratorError(f"torus({w}x{h}) : w, h ≥ 3 requis")
    idx = lambda x, y: y * w + x  # noqa: E731
    edges = []
    for y in range(h):
        for x in range(w):
            edges.append((idx(x, y), idx((x + 1) % w, y), 1, 2))
            edges.append((idx(x, y), idx(x, (y + 1) % h), 3, 4))
    return edges


def _random_edges(n: int, degree: int, seed: int) -> Edges:
    if n < 2 or degree < 1:
        raise GeneratorError(f"random({n}, {degree}) : n ≥ 2 et degré ≥ 1 requis")
    m = min(n * degree // 2, n * (n - 1) // 2)
    g = nx.gnm_random_graph(n, m, seed=seed)
    components = sorted((sorted(c) for c in nx.connected_components(g)), key=lambda c: c[0])
    for left, right in zip(components, components[1:]):
        g.add_edge(left[0], right[0])
    rng = np.random.default_rng(seed)
    port: Dict[Tuple[int, int], int] = {}
    for u in range(n):
        neighbors = sorted(g.neighbors(u))
        order = rng.permutation(len(neighbors))
        for k, i in enumerate(order):
            port[(u, neighbors[int(i)])] = k + 1
    return [(u, v, port[(u, v)], port[(v, u)]) for u, v in sorted(tuple(sorted(e)) for e in g.edges())]


def _edges(spec: GeneratorSpec) -> Edges:
    if spec.shape == "ring":
        return _ring_edges(spec.n)
    if spec.shape == "path":
        return _path_edges(spec.n)
    if spec.shape == "clique":
        return _clique_edges(spec.n)
    if spec.shape == "grid":
        return _grid_edges(spec.width, spec.height)
    if spec.shape == "torus":
        return _torus_edges(spec.width, spec.height)
    return _random_edges(spec.n, spec.degree, spec.seed)


def vertex_ids(n: int) -> List[str]:
    width = len(str(max(n - 1, 0)))
    return [f"v{i:0{width}d}" for i in range(n)]


def _layout(spec: GeneratorSpec, n: int) -> Tuple[List[str], List[Optional[str]]]:
    if spec.labeling == "anon":
        labels = ["x"] * n
    elif spec.labeling == "distinct":
        labels = [f"l{i:02d}" for i in range(n)]
    else:
        labels = [spec.labels[i % len(spec.labels)] for i in range(n)]

    if spec.sources == "unshared":
        classes: List[Optional[str]] = [f"s{i}" for i in range(n)]
    elif spec.sources == "shared":
        classes = ["s"] * n
    elif spec.sources == "one-unshared":
        classes = ["u"] + ["s"] * (n - 1)
    else:
        classes = [spec.classes[i % len(spec.classes)] for i in range(n)]
    return labels, classes


def _assemble(name: str, n: int, edges: Edges, labels: Sequence[str],
              classes: Sequence[Optional[str]]) -> LabeledGraph:
    ids = vertex_ids(n)
    g = LabeledGraph.build(
        name,
        [(ids[i], labels[i], classes[i]) for i in range(n)],
        [(ids[u], ids[v], pu, pv) for u, v, pu, pv in edges],
    )
    report = validate_graph(g)
    if not report.ok:
        raise GraphValidationError(report.violations, name)
    return g


def generate(spec: Union[GeneratorSpec, str]) -> LabeledGraph:
    """Graphe déterministe pour une spec (les formes aléatoires dépendent de la graine de la spec)."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    edges = _edges(spec)
    labels, classes = _layout(spec, spec.size)
    return _assemble(spec.text(), spec.size, edges, labels, classes)


# =============================================================================
# Revêtements
# =============================================================================

@dataclass(frozen=True)
class CoveringPair:
    """
    total -> base à q feuillets ; φ relie les digraphes avec classes de
    sources dans les étiquettes, donc les sources du total sont partagées par fibre.
    """
    total: LabeledGraph
    base: LabeledGraph
    phi: Homomorphism
    sheets: int
    total_dir: SymDigraph
    base_dir: SymDigraph


def generate_covering_pair(base_spec: Union[GeneratorSpec, str], sheets: int) -> CoveringPair:
    """ring(n) -> C_{qn} ; torus(w, h) -> torus(qw, h) ; q = 1 donne l'identité."""
    if isinstance(base_spec, str):
        base_spec = parse_spec(base_spec)
    if sheets < 1:
        raise GeneratorError(f"Nombre de feuillets invalide : {sheets}")
    if base_spec.shape not in ("ring", "torus"):
        raise GeneratorError(f"Pas de revêtement connexe à {sheets} feuillets pour la forme '{base_spec.shape}'")

    base = generate(base_spec)
    base_dir = build_dir(base, with_sources=True)
    if sheets == 1:
        return CoveringPair(base, base, Homomorphism.identity(base_dir), 1, base_dir, base_dir)

    labels, classes = _layout(base_spec, base_spec.size)
    if base_spec.shape == "ring":
        n = base_spec.n
        total_n = sheets * n
        edges = _ring_edges(total_n)
        image = [i % n for i in range(total_n)]
    else:
        w, h = base_spec.width, base_spec.height
        total_n = sheets * w * h
        edges = _torus_edges(sheets * w, h)
        image = [(i // (sheets * w)) * w + (i % (sheets * w)) % w for i in range(total_n)]

    name = f"{base.name}*{sheets}"
    total = _assemble(name, total_n, edges, [labels[j] for j in image], [classes[j] for j in image])
    total_dir = build_dir(total, with_sources=True)
    total_ids, base_ids = vertex_ids(total_n), vertex_ids(base_spec.size)
    vmap = {total_ids[i]: base_ids[image[i]] for i in range(total_n)}
    phi = Homomorphism.from_vertex_map(total_dir, base_dir, vmap)
    return CoveringPair(total, base, phi, sheets, total_dir, base_dir)


# =============================================================================
# Quasi-revêtements
# =============================================================================

def generate_quasi_covering_path(length: int, base_size: int, radius: Optional[int] = None,
                                 center: Optional[int] = None) -> QuasiCoveringWitness:
    """
    P_length -> C_base_size, i ↦ i mod base_size. Rayon admissible :
    r ≤ min(c, length − 2 − c) (le dernier sommet a un port 1 vers son prédécesseur).
    """
    if base_size < 3:
        raise GeneratorError("La base doit être un anneau de taille ≥ 3")
    c = length // 2 if center is None else center
    limit = min(c, length - 2 - c)
    r = limit if radius is None else radius
    if not 0 <= c < length or r < 0 or r > limit:
        raise GeneratorError(f"P{length} -> C{base_size} : rayon {r} hors de [0, {limit}] pour le centre {c}")
    d1 = build_dir(generate(f"path:{length},anon,shared"))
    d0 = build_dir(generate(f"ring:{base_size},anon,shared"))
    return _witness(d1, d0, length, base_size, c, r)


def generate_quasi_covering_ring(size: int, base_size: int, radius: Optional[int] = None) -> QuasiCoveringWitness:
    """C_size -> C_base_size (size non multiple de base_size), centre size // 2, r ≤ min(c, size − 1 − c)."""
    if base_size < 3 or size % base_size == 0:
        raise GeneratorError(f"C{size} -> C{base_size} : taille multiple de la base (revêtement, pas quasi)")
    c = size // 2
    limit = min(c, size - 1 - c)
    r = limit if radius is None else radius
    if r < 0 or r > limit:
        raise GeneratorError(f"C{size} -> C{base_size} : rayon {r} hors de [0, {limit}]")
    d1 = build_dir(generate(f"ring:{size},anon,shared"))
    d0 = build_dir(generate(f"ring:{base_size},anon,shared"))
    return _witness(d1, d0, size, base_size, c, r)


def _witness(d1: SymDigraph, d0: SymDigraph, size: int, base_size: int, c: int, r: int) -> QuasiCoveringWitness:
    ids1, ids0 = vertex_ids(size), vertex_ids(base_size)
    vmap = {ids1[i]: ids0[i % base_size] for i in range(size)}
    gamma = Homomorphism.from_vertex_map(d1, d0, vmap)
    return make_quasi_covering_witness(d1, d0, ids1[c], r, gamma)


def quasi_covering_corpus(max_radius: Optional[int] = None) -> List[QuasiCoveringWitness]:
    """Chemins et grands anneaux au-dessus de petits anneaux."""
    max_radius = settings.quasi_max_radius if max_radius is None else max_radius
    witnesses = []
    for base in (3, 4, 5):
        for length in range(2 * base + 3, 2 * max_radius + 3, 2):
            witnesses.append(generate_quasi_covering_path(length, base))
        for size in range(2 * base + 1, 2 * max_radius + 2):
            if size % base:
                witnesses.append(generate_quasi_covering_ring(size, base))
    return witnesses


# =============================================================================
# Corpus
# =============================================================================

def load_corpus(name: str, corpus_dir: Union[str, Path, None] = None) -> List[LabeledGraph]:
    """CORPUS/<name>.yaml : {'name', 'description', 'graphs': [spec ou chemin]}."""
    directory = Path(corpus_dir or settings.corpus_dir)
    path = directory / f"{name}.yaml"
    if not path.exists():
        raise GeneratorError(f"Corpus introuvable : {path}")
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    entries = data.get("graphs") or []
    if not entries:
        raise GeneratorError(f"Corpus {name} vide")
    return [resolve_graph(str(e), base_dir=directory) for e in entries]


def resolve_graph(source: str, base_dir: Union[str, Path, None] = None) -> LabeledGraph:
    """Fichier JSON/YAML existant, sinon spec de générateur."""
    path = Path(source)
    if base_dir is not None and not path.is_absolute() and not path.exists():
        path = Path(base_dir) / path
    if path.suffix in (".json", ".yaml", ".yml") and path.exists():
        return load_graph(path)
    return generate(source)


def resolve_graphs(source: str) -> List[LabeledGraph]:
    """'corpus:NOM', un fichier ou une spec."""
    if source.startswith("corpus:"):
        return load_corpus(source[len("corpus:"):])
    return [resolve_graph(source)]


def default_covering_specs() -> List[Tuple[str, int]]:
    """Bases ≤ 6 sommets, 2 ou 3 feuillets, étiquettes et sources variées."""
    layouts = [
        "anon,unshared", "anon,shared", "anon,one-unshared", "distinct,shared",
        "anon,classes=ab", "labels=ab,shared", "labels=aab,classes=ba",
    ]
    specs = []
    for n in (3, 4, 5, 6):
        for layout in layouts:
            for q in (2, 3):
                specs.append((f"ring:{n},{layout}", q))
    return specs
