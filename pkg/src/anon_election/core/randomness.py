# -*- coding: utf-8 -*-
"""
Sources aléatoires partagées.

Chaque classe de sources possède un flux de bits adressable par index :
b(u, t) ne dépend que de (classe(u), t), jamais de l'entrelacement des
tirages. Le flux est un Philox (numpy) clé par la graine de la classe ;
le bit t est le bit t mod 64 du mot t // 64.

Les graines dérivent toutes d'une graine maître (blake2b, 64 bits).
"""

import hashlib
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional

import numpy as np

from .graph import LabeledGraph, SymDigraph, UnknownVertexError, source_class_of
from .models import DrawLogFile, DrawRecordModel

_WORDS_PER_CHUNK = 64


def derive_seed(master: int, *parts) -> int:
    """Graine 64 bits dérivée de (master, *parts) ; injective en pratique sur les parts."""
    material = repr((int(master),) + tuple(str(p) for p in parts)).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(material, digest_size=8).digest(), "little")


class ClassStream:
    """Flux de bits d'une classe : fonction pure (graine, index)."""

    def __init__(self, seed: int):
        self.seed = seed
        self._generator = np.random.Philox(key=seed)
        self._words: List[int] = []

    def bit(self, index: int) -> str:
        word, offset = divmod(index, 64)
        while word >= len(self._words):
            self._words.extend(int(w) for w in self._generator.random_raw(_WORDS_PER_CHUNK))
        return "1" if (self._words[word] >> offset) & 1 else "0"

    def bits(self, start: int, count: int) -> str:
        return "".join(self.bit(start + i) for i in range(count))


@dataclass(frozen=True)
class DrawRecord:
    """Un tirage : le sommet, sa classe, l'index consommé et le bit obtenu."""
    vertex: str
    class_id: str
    index: int
    bit: str


@dataclass
class SourceAssignment:
    """
    Partition des sommets en classes de sources, avec un compteur de tirages
    par sommet. Deux sommets d'une même classe lisent les mêmes bits aux
    mêmes index.
    """
    class_of: Dict[str, str]
    class_seed: Dict[str, int]
    master_seed: int = 0
    counters: Dict[str, int] = field(default_factory=dict)
    draw_log: List[DrawRecord] = field(default_factory=list)
    _streams: Dict[str, ClassStream] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for v in self.class_of:
            self.counters.setdefault(v, 0)

    # -------------------------------------------------------------------------
    # Construction
    # -------------------------------------------------------------------------

    @classmethod
    def from_classes(cls, class_of: Mapping[str, str], master_seed: int = 0) -> "SourceAssignment":
        classes = dict(class_of)
        seeds = {c: derive_seed(master_seed, "class", c) for c in sorted(set(classes.values()))}
        return cls(classes, seeds, master_seed)

    @classmethod
    def from_graph(cls, g: LabeledGraph, master_seed: int = 0) -> "SourceAssignment":
        """Classes du graphe ; un sommet sans classe a une source privée."""
        return cls.from_classes({v: source_class_of(g, v) for v in g.vertices}, master_seed)

    @classmethod
    def from_digraph(cls, d: SymDigraph, master_seed: int = 0) -> "SourceAssignment":
        """Classes lues dans la seconde composante des étiquettes (λ, classe)."""
        return cls.from_classes({v: d.vertex_label[v][1] or f"#{v}" for v in d.vertices}, master_seed)

    def fresh(self) -> "SourceAssignment":
        """Même partition et mêmes graines, compteurs remis à zéro, journal vide."""
        return SourceAssignment(dict(self.class_of), dict(self.class_seed), self.master_seed,
                                _streams=self._streams)

    # -------------------------------------------------------------------------
    # Tirages
    # -------------------------------------------------------------------------

    def stream(self, class_id: str) -> ClassStream:
        stream = self._streams.get(class_id)
        if stream is None:
            stream = ClassStream(self.class_seed[class_id])
            self._streams[class_id] = stream
        return stream

    def draw_bit(self, v: str) -> str:
        """b(v, t) avec t le compteur de v ; n'incrémente que le compteur de v."""
        if v not in self.class_of:
            raise UnknownVertexError(v, "SourceAssignment")
        class_id = self.class_of[v]
        index = self.counters[v]
        bit = self.stream(class_id).bit(index)
        self.counters[v] = index + 1
        self.draw_log.append(DrawRecord(v, class_id, index, bit))
        return bit

    def draw_bits(self, v: str, count: int) -> str:
        return "".join(self.draw_bit(v) for _ in range(count))

    def bits_drawn(self) -> int:
        return len(self.draw_log)

    def same_partition(self, other: "SourceAssignment") -> bool:
        return self.class_of == other.class_of and all(
            self.class_seed[c] == other.class_seed.get(c) for c in set(self.class_of.values()))

    # -------------------------------------------------------------------------
    # Sérialisation
    # -------------------------------------------------------------------------

    def export_log(self) -> DrawLogFile:
        return DrawLogFile(
            master_seed=self.master_seed,
            draws=[DrawRecordModel(vertex=r.vertex, class_id=r.class_id, index=r.index, bit=r.bit)
                   for r in self.draw_log],
        )


def replay_draws(log: Iterable[DrawRecord], assignment: SourceAssignment) -> Optional[DrawRecord]:
    """
    Rejoue un journal sur une affectation neuve ; renvoie le premier tirage
    non reproduit, ou None si tout concorde bit à bit.
    """
    replay = assignment.fresh()
    for record in log:
        if replay.class_of.get(record.vertex) != record.class_id or replay.counters[record.vertex] != record.index:
            return record
        if replay.draw_bit(record.vertex) != record.bit:
            return record
    return None


def fiber_shared_assignment(witness, base_assignment: SourceAssignment) -> SourceAssignment:
    """
    Affectation adverse du relèvement : chaque sommet v du revêtement prend la
    classe de φ(v) avec la graine de la base.
    """
    if not getattr(witness, "accepted", False):
        from .coverings import CoveringError
        reasons = "; ".join(getattr(witness, "reasons", ())) or "projection refusée"
        raise CoveringError(f"Sources partagées par fibre impossibles : {reasons}")
    phi = witness.phi
    class_of = {v: base_assignment.class_of[phi.vertex_map[v]] for v in witness.total.vertices}
    seeds = {c: base_assignment.class_seed[c] for c in set(class_of.values())}
    return SourceAssignment(class_of, seeds, base_assignment.master_seed)


def is_fiber_shared(phi_vertex_map: Mapping[str, str], lifted: SourceAssignment,
                    base: SourceAssignment) -> bool:
    """Vrai ssi chaque sommet relevé partage la source (classe et graine) de son image."""
    for v, w in phi_vertex_map.items():
        c = lifted.class_of.get(v)
        if c != base.class_of.get(w) or lifted.class_seed.get(c) != base.class_seed.get(c):
            return False
    return True


def corrupt_class(a: SourceAssignment, vertex: str) -> SourceAssignment:
    """Contrôle négatif : place `vertex` dans une classe privée neuve."""
    if vertex not in a.class_of:
        raise UnknownVertexError(vertex, "SourceAssignment")
    class_of = dict(a.class_of)
    corrupted = f"corrupt:{vertex}"
    class_of[vertex] = corrupted
    seeds = dict(a.class_seed)
    seeds[corrupted] = derive_seed(a.master_seed, "corrupt", vertex)
    return SourceAssignment(class_of, seeds, a.master_seed)
