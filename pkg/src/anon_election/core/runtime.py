# -*- coding: utf-8 -*-
"""
Simulateur déterministe de passage de messages.

Modèle :
- un canal FIFO par arc a = (s, t) : un message envoyé par s sur le port
  p = étiquette[0] arrive en t sur le port q = étiquette[1] ;
- un événement = une règle appliquée par un nœud (Wakeup, Deliver d'un
  message, Spontaneous) ;
- la politique d'ordonnancement produit les événements (synchrone par
  rondes, aléatoire graine fixée, adaptative, script) ;
- l'exécution est une fonction pure de (digraphe, algorithme, sources,
  politique, budget) : replay() la reproduit bit à bit.

Le relèvement (lift_execution) rejoue une trace de la base sur chaque fibre
d'un revêtement.
"""

import sys
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import (
    Any, Callable, Deque, Dict, Iterable, Iterator, List, Optional,
    Protocol, Sequence, Tuple, Union,
)

import numpy as np

from ..config import settings
from .graph import Homomorphism, SymDigraph
from .models import (
    Counterexample, EventKind, EventRecord, RunStatus, ScheduleFile, SnapshotRecord, TraceFile,
)
from .randomness import SourceAssignment, is_fiber_shared


class SchedulingError(ValueError):
    """Événement impossible (script, politique) ou budget invalide."""


class LiftingError(ValueError):
    """Relèvement impossible : projection refusée ou sources non partagées par fibre."""


class GuardError(ValueError):
    """Règle appliquée alors que sa garde est fausse."""


# =============================================================================
# Événements & messages
# =============================================================================

@dataclass(frozen=True)
class Wakeup:
    vertex: str

    def on(self, vertex: str) -> "Wakeup":
        return Wakeup(vertex)


@dataclass(frozen=True)
class Deliver:
    """Réception du message en tête du canal entrant sur le port `port`."""
    vertex: str
    port: int

    def on(self, vertex: str) -> "Deliver":
        return Deliver(vertex, self.port)


@dataclass(frozen=True)
class Spontaneous:
    vertex: str
    rule: str = "C"

    def on(self, vertex: str) -> "Spontaneous":
        return Spontaneous(vertex, self.rule)


Event = Union[Wakeup, Deliver, Spontaneous]


def event_to_record(e: Event) -> EventRecord:
    if isinstance(e, Wakeup):
        return EventRecord(kind=EventKind.WAKEUP, vertex=e.vertex)
    if isinstance(e, Deliver):
        return EventRecord(kind=EventKind.DELIVER, vertex=e.vertex, port=e.port)
    return EventRecord(kind=EventKind.SPONTANEOUS, vertex=e.vertex, rule=e.rule)


def event_from_record(r: EventRecord) -> Event:
    if r.kind == EventKind.WAKEUP:
        return Wakeup(r.vertex)
    if r.kind == EventKind.DELIVER:
        if r.port is None:
            raise SchedulingError(f"Deliver sans port sur {r.vertex}")
        return Deliver(r.vertex, r.port)
    return Spontaneous(r.vertex, r.rule or "C")


@dataclass(frozen=True)
class Message:
    """Charge utile algorithmique + port d'émission p de l'expéditeur."""
    payload: Any
    via_port: int


@dataclass(frozen=True)
class NodeInfo:
    """Ce qu'un nœud connaît au démarrage : son étiquette λ et son degré."""
    vertex: str
    label: Any
    degree: int


@dataclass(frozen=True)
class Step:
    """Résultat d'une règle : nouvel état et messages (port, charge utile)."""
    state: Any
    outgoing: Tuple[Tuple[int, Any], ...] = ()


class NodeAlgorithm(Protocol):
    """Contrat d'un algorithme : fonctions pures de (état, événement, bits tirés)."""

    name: str

    def initial_state(self, info: NodeInfo) -> Any: ...

    def wakeup_enabled(self, state: Any) -> bool: ...

    def spontaneous_enabled(self, state: Any) -> bool: ...

    def bits_needed(self, state: Any, event: Event) -> int: ...

    def step(self, state: Any, event: Event, bits: str, message: Optional[Message] = None) -> Step: ...

    def is_terminal(self, state: Any) -> bool: ...

    def accepts_when_terminal(self) -> bool: ...

    def summarize(self, state: Any) -> Dict[str, Any]: ...


# =============================================================================
# Algorithme de référence
# =============================================================================

@dataclass(frozen=True)
class EchoState:
    degree: int
    woken: bool = False
    received: int = 0


class EchoAlgorithm:
    """Diffuse au réveil, absorbe les réceptions ; terminal après deg réceptions."""

    name = "echo"

    def initial_state(self, info: NodeInfo) -> EchoState:
        return EchoState(info.degree)

    def wakeup_enabled(self, state: EchoState) -> bool:
        return not state.woken

    def spontaneous_enabled(self, state: EchoState) -> bool:
        return False

    def bits_needed(self, state: EchoState, event: Event) -> int:
        return 0

    def step(self, state: EchoState, event: Event, bits: str, message: Optional[Message] = None) -> Step:
        if isinstance(event, Wakeup):
            return Step(EchoState(state.degree, True, state.received),
                        tuple((p, "echo") for p in range(1, state.degree + 1)))
        if isinstance(event, Deliver):
            return Step(EchoState(state.degree, state.woken, state.received + 1))
        raise GuardError(f"echo : pas de règle {event}")

    def is_terminal(self, state: EchoState) -> bool:
        return state.woken and state.received >= state.degree

    def accepts_when_terminal(self) -> bool:
        return False

    def summarize(self, state: EchoState) -> Dict[str, Any]:
        return {"woken": state.woken, "received": state.received}


# =============================================================================
# Simulation
# =============================================================================

class Simulation:
    """État global mutable d'une exécution (propriété exclusive de run())."""

    def __init__(self, d: SymDigraph, alg: NodeAlgorithm, sources: SourceAssignment):
        self.digraph = d
        self.algorithm = alg
        self.sources = sources
        self.vertices: Tuple[str, ...] = tuple(sorted(d.vertices))
        self.states: Dict[str, Any] = {
            v: alg.initial_state(NodeInfo(v, d.vertex_label[v][0], d.degree(v))) for v in d.vertices
        }
        self.channels: Dict[str, Deque[Message]] = {a: deque() for a in d.arcs}
        self.steps = 0

    # -------------------------------------------------------------------------

    def channel_at(self, v: str, q: int) -> Deque[Message]:
        return self.channels[self.digraph.in_arc_by_port(v, q).id]

    def terminal(self, v: str) -> bool:
        return self.algorithm.is_terminal(self.states[v])

    def all_terminal(self) -> bool:
        return all(self.terminal(v) for v in self.vertices)

    def in_flight(self) -> Dict[str, Dict[int, int]]:
        """Nombre de messages en attente par (sommet, port de réception)."""
        counts: Dict[str, Dict[int, int]] = {}
        for a_id, queue in self.channels.items():
            if queue:
                arc = self.digraph.arcs[a_id]
                counts.setdefault(arc.t, {})[arc.label[1]] = len(queue)
        return counts

    def is_activable(self, e: Event) -> bool:
        if e.vertex not in self.states:
            return False
        state = self.states[e.vertex]
        alg = self.algorithm
        if isinstance(e, Wakeup):
            return alg.wakeup_enabled(state)
        if isinstance(e, Deliver):
            if alg.is_terminal(state) and not alg.accepts_when_terminal():
                return False
            try:
                return bool(self.channel_at(e.vertex, e.port))
            except KeyError:
                return False
        return not alg.is_terminal(state) and alg.spontaneous_enabled(state)

    def activable(self) -> List[Event]:
        """Événements activables, dans un ordre canonique (sommet, type, port)."""
        events: List[Event] = []
        alg = self.algorithm
        for v in self.vertices:
            state = self.states[v]
            if alg.wakeup_enabled(state):
                events.append(Wakeup(v))
            if not alg.is_terminal(state) or alg.accepts_when_terminal():
                for a in self.digraph.in_arcs[v]:
                    if self.channels[a.id]:
                        events.append(Deliver(v, a.label[1]))
            if not alg.is_terminal(state) and alg.spontaneous_enabled(state):
                events.append(Spontaneous(v))
        return events

    def execute(self, e: Event) -> Tuple[Any, Any]:
        """Applique e ; renvoie (état avant, état après)."""
        if not self.is_activable(e):
            raise SchedulingError(f"Événement non activable : {e}")
        v = e.vertex
        before = self.states[v]
        message = self.channel_at(v, e.port).popleft() if isinstance(e, Deliver) else None
        bits = self.sources.draw_bits(v, self.algorithm.bits_needed(before, e))
        result = self.algorithm.step(before, e, bits, message)
        for p, payload in result.outgoing:
            arc = self.digraph.out_arc_by_port(v, p)
            self.channels[arc.id].append(Message(payload, p))
        self.states[v] = result.state
        self.steps += 1
        if settings.sim_debug:
            print(f"🎲 [Runtime] #{self.steps} {e} -> {len(result.outgoing)} message(s)", file=sys.stderr)
        return before, result.state


# =============================================================================
# Politiques d'ordonnancement
# =============================================================================

class SynchronousPolicy:
    """
    Rondes : chaque nœud, dans l'ordre des identifiants, se réveille s'il le
    peut, sinon reçoit les messages en vol au début de la ronde (ports
    croissants) puis applique une règle spontanée si elle est activable.
    """

    name = "synchronous"

    def __init__(self, max_rounds: Optional[int] = None):
        self.max_rounds = max_rounds
        self.round_marks: List[int] = []

    def events(self, sim: Simulation) -> Iterator[Event]:
        self.round_marks = []
        rounds = 0
        while self.max_rounds is None or rounds < self.max_rounds:
            counts = sim.in_flight()
            self.round_marks.append(sim.steps)
            progressed = False
            for v in sim.vertices:
                if sim.is_activable(Wakeup(v)):
                    yield Wakeup(v)
                    progressed = True
                    continue
                for q, k in sorted(counts.get(v, {}).items()):
                    for _ in range(k):
                        e = Deliver(v, q)
                        if not sim.is_activable(e):
                            break
                        yield e
                        progressed = True
                e = Spontaneous(v)
                if sim.is_activable(e):
                    yield e
                    progressed = True
            rounds += 1
            if not progressed:
                self.round_marks.pop()
                return


class RandomPolicy:
    """Adversaire non adaptatif : choix uniforme parmi les événements activables."""

    name = "random"

    def __init__(self, seed: int):
        self.seed = seed

    def events(self, sim: Simulation) -> Iterator[Event]:
        rng = np.random.default_rng(self.seed)
        while True:
            candidates = sim.activable()
            if not candidates:
                return
            yield candidates[int(rng.integers(len(candidates)))]


def smallest_number_first(sim: Simulation, candidates: Sequence[Event], rng: np.random.Generator) -> Event:
    """Favorise le nœud de plus petit numéro ; égalités départagées par le flux de l'ordonnanceur."""
    keys = [getattr(sim.states[e.vertex], "n", 0) for e in candidates]
    best = min(keys)
    pool = [e for e, k in zip(candidates, keys) if k == best]
    return pool[int(rng.integers(len(pool)))]


class AdaptivePolicy:
    """
    Adversaire adaptatif : le sélecteur voit les états courants et le
    préfixe du journal de tirages (sim.sources.draw_log), jamais les bits futurs.

    Un sélecteur comme smallest_number_first peut repousser indéfiniment les
    livraisons vers les grands numéros. La politique reste équitable : un
    événement activable depuis plus de `patience` choix consécutifs passe
    avant le sélecteur (le plus ancien d'abord, ordre canonique ensuite).
    """

    name = "adaptive"

    def __init__(self, seed: int,
                 chooser: Callable[[Simulation, Sequence[Event], np.random.Generator], Event] = smallest_number_first,
                 patience: int = 64):
        if patience < 1:
            raise SchedulingError(f"patience doit être ≥ 1 (reçu {patience})")
        self.seed = seed
        self.chooser = chooser
        self.patience = patience

    def events(self, sim: Simulation) -> Iterator[Event]:
        rng = np.random.default_rng(self.seed)
        waiting: Dict[Event, int] = {}
        while True:
            candidates = sim.activable()
            if not candidates:
                return
            waiting = {e: waiting.get(e, 0) + 1 for e in candidates}
            overdue = [e for e in candidates if waiting[e] > self.patience]
            if overdue:
                chosen = max(overdue, key=lambda e: waiting[e])
            else:
                chosen = self.chooser(sim, candidates, rng)
            waiting.pop(chosen, None)
            yield chosen


class ScriptedPolicy:
    """Rejoue une liste d'événements ; strict=False arrête au premier événement impossible."""

    name = "scripted"

    def __init__(self, schedule: Iterable[Event], strict: bool = True):
        self.schedule = list(schedule)
        self.strict = strict

    def events(self, sim: Simulation) -> Iterator[Event]:
        for i, e in enumerate(self.schedule):
            if not sim.is_activable(e):
                if self.strict:
                    raise SchedulingError(f"Script : événement #{i} {e} non activable")
                return
            yield e


def load_schedule(path: Union[str, Path]) -> List[Event]:
    """Script JSON {"events": [...]} pour la politique 'scripted'."""
    model = ScheduleFile.model_validate_json(Path(path).read_text(encoding="utf-8"))
    return [event_from_record(r) for r in model.events]


def dump_schedule(events: Iterable[Event]) -> ScheduleFile:
    return ScheduleFile(events=[event_to_record(e) for e in events])


Policy = Union[SynchronousPolicy, RandomPolicy, AdaptivePolicy, ScriptedPolicy]


# =============================================================================
# Traces
# =============================================================================

StepMonitor = Callable[[int, str, Any, Any], None]


@dataclass
class ExecutionTrace:
    """
    Exécution complète : configuration initiale, événements, instantanés,
    journal de tirages et statut. Les états sont des valeurs immuables.
    """
    digraph: SymDigraph
    algorithm: Any
    sources: SourceAssignment
    policy: str
    events: List[Event] = field(default_factory=list)
    snapshots: List[Tuple[int, Dict[str, Any]]] = field(default_factory=list)
    round_marks: List[int] = field(default_factory=list)
    draw_log: List[Any] = field(default_factory=list)
    status: RunStatus = RunStatus.UNDECIDED
    final_states: Dict[str, Any] = field(default_factory=dict)
    snapshot_stride: int = 0

    @property
    def steps(self) -> int:
        return len(self.events)

    def snapshot_at(self, step: int) -> Optional[Dict[str, Any]]:
        for s, states in self.snapshots:
            if s == step:
                return states
        return None

    def to_file(self) -> TraceFile:
        summarize = getattr(self.algorithm, "summarize", lambda s: {"state": repr(s)})
        return TraceFile(
            digraph=self.digraph.name,
            algorithm=getattr(self.algorithm, "name", type(self.algorithm).__name__),
            policy=self.policy,
            status=self.status,
            events=[event_to_record(e) for e in self.events],
            draws=self.sources.export_log().draws,
            snapshots=[SnapshotRecord(step=s, states={v: summarize(st) for v, st in sorted(states.items())})
                       for s, states in self.snapshots],
        )


def run(d: SymDigraph, alg: NodeAlgorithm, src: SourceAssignment, policy: Policy,
        budget: Optional[int] = None, snapshot_stride: Optional[int] = None,
        snapshot_marks: Optional[Iterable[int]] = None,
        monitors: Sequence[StepMonitor] = ()) -> ExecutionTrace:
    """
    Exécute alg sur d jusqu'à : tous les nœuds terminaux, plus rien
    d'activable, fin de la politique, ou budget épuisé (statut 'undecided').

    Les sources sont copiées (compteurs à zéro) : l'appelant garde les siennes.
    Instantané après chaque k-ième événement (k = snapshot_stride, 0 = aucun),
    ou aux positions explicites snapshot_marks.
    """
    budget = settings.event_budget if budget is None else budget
    if budget <= 0:
        raise SchedulingError(f"Budget d'événements invalide : {budget}")
    stride = settings.snapshot_stride if snapshot_stride is None else snapshot_stride
    marks = set(snapshot_marks) if snapshot_marks is not None else None

    sources = src.fresh()
    sim = Simulation(d, alg, sources)
    trace = ExecutionTrace(d, alg, src.fresh(), policy.name, snapshot_stride=stride)
    if stride or marks is not None:
        trace.snapshots.append((0, dict(sim.states)))

    status: Optional[RunStatus] = None
    if sim.all_terminal():
        status = RunStatus.TERMINATED
    else:
        for e in policy.events(sim):
            if sim.steps >= budget:
                status = RunStatus.UNDECIDED
                if settings.sim_debug:
                    print(f"🎲 [Runtime] budget épuisé après {budget} événements sur {d.name}", file=sys.stderr)
                break
            before, after = sim.execute(e)
            trace.events.append(e)
            for monitor in monitors:
                monitor(sim.steps, e.vertex, before, after)
            if (marks is not None and sim.steps in marks) or (marks is None and stride and sim.steps % stride == 0):
                trace.snapshots.append((sim.steps, dict(sim.states)))
            if sim.all_terminal():
                status = RunStatus.TERMINATED
                break

    if status is None:
        quiet = not sim.activable()
        status = RunStatus.TERMINATED if quiet or sim.all_terminal() else RunStatus.UNDECIDED

    trace.status = status
    trace.final_states = dict(sim.states)
    trace.draw_log = list(sources.draw_log)
    trace.sources.draw_log = list(sources.draw_log)
    trace.sources.counters = dict(sources.counters)
    trace.round_marks = list(getattr(policy, "round_marks", []))
    return trace


def replay(trace: ExecutionTrace) -> ExecutionTrace:
    """Ré-exécute la trace depuis sa configuration initiale et sa liste d'événements."""
    marks = [s for s, _ in trace.snapshots] if trace.snapshots and not trace.snapshot_stride else None
    return run(trace.digraph, trace.algorithm, trace.sources, ScriptedPolicy(trace.events),
               budget=max(1, len(trace.events)),
               snapshot_stride=trace.snapshot_stride, snapshot_marks=marks)


def replays_identically(trace: ExecutionTrace) -> bool:
    """replay() reproduit événements, tirages, instantanés et états finaux."""
    again = replay(trace)
    return (again.events == trace.events
            and again.draw_log == trace.draw_log
            and again.snapshots == trace.snapshots
            and again.final_states == trace.final_states)


# =============================================================================
# Relèvement
# =============================================================================

@dataclass
class LiftedTrace:
    """Trace relevée ; batch_marks[i] = nombre d'événements après la copie du i-ème événement de base."""
    trace: ExecutionTrace
    batch_marks: List[int]
    phi: Homomorphism


def lift_execution(base_trace: ExecutionTrace, total: SymDigraph, phi: Homomorphism,
                   lifted_src: SourceAssignment, strict: bool = True) -> LiftedTrace:
    """
    Pour chaque événement de base sur v′, applique le même événement à chaque
    v ∈ φ⁻¹(v′) (ordre des identifiants). strict=False tolère des sources non
    partagées par fibre (contrôles négatifs) et arrête au premier événement
    devenu impossible.
    """
    from .coverings import is_symmetric_covering

    base = base_trace.digraph
    verdict = is_symmetric_covering(total, base, phi)
    if not verdict.accepted:
        raise LiftingError(f"Projection refusée : {'; '.join(verdict.reasons)}")
    if strict and not is_fiber_shared(phi.vertex_map, lifted_src, base_trace.sources):
        raise LiftingError(f"Sources de {total.name} non partagées par fibre")

    fibers = {w: sorted(vs) for w, vs in phi.preimages().items()}
    script: List[Event] = []
    marks: List[int] = [0]
    for e in base_trace.events:
        for v in fibers.get(e.vertex, ()):
            script.append(e.on(v))
        marks.append(len(script))

    lifted = run(total, base_trace.algorithm, lifted_src, ScriptedPolicy(script, strict=strict),
                 budget=max(1, len(script)), snapshot_marks=marks)
    lifted.policy = f"lifted:{base_trace.policy}"
    return LiftedTrace(lifted, marks, phi)


def fiberwise_mismatch(base_trace: ExecutionTrace, lifted: LiftedTrace) -> Optional[Counterexample]:
    """
    Premier (pas, sommet) où state(v) ≠ state(φ(v)) ; la trace de base doit
    avoir un instantané par événement.
    """
    base_snaps = dict(base_trace.snapshots)
    lifted_snaps = dict(lifted.trace.snapshots)
    phi = lifted.phi.vertex_map
    for step, mark in enumerate(lifted.batch_marks):
        base_states = base_snaps.get(step)
        if base_states is None:
            continue
        states = lifted_snaps.get(mark)
        if states is None:
            return Counterexample(step=step, vertex="*", expected="exécution relevée complète",
                                  actual="exécution relevée interrompue")
        for v in sorted(states):
            if states[v] != base_states[phi[v]]:
                return Counterexample(step=step, vertex=v, expected=repr(base_states[phi[v]])[:500],
                                      actual=repr(states[v])[:500])
    return None
