# -*- coding: utf-8 -*-
"""
Vérifications exécutables sur des traces concrètes.

- check_lifting : une exécution relevée le long d'un revêtement reste
  égale fibre par fibre (égalité exacte des états) ;
- check_quasi_lifting : après k rondes synchrones, un quasi-revêtement de
  rayon r reste un quasi-revêtement de rayon r − k pour les étiquettes
  augmentées des états ;
- impossibility_witness : sur un revêtement à ≥ 2 feuillets, aucune
  exécution relevée n'élit correctement ;
- check_counter_radius : pendant M_τ, Dir(G) est un quasi-revêtement de
  D_M(v) de centre v et de rayon c(v), et les compteurs respectent leur
  discipline (moniteurs pas à pas).

Chaque vérification rend un CheckReport ; un échec porte le premier
contre-exemple (pas, sommet, attendu, obtenu) et les graines pour le rejouer.
"""

import sys
from collections import Counter
from dataclasses import dataclass, field, replace as dc_replace
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from ..config import settings
from .coverings import (
    CoveringError, QuasiCoveringWitness, is_quasi_covering, is_symmetric_covering, minimal_base,
)
from .election_m import MAlgorithm, dm_arc_id, evaluate_outcome, view_precedes
from .election_mtau import MTauAlgorithm
from .families import (
    default_covering_specs, generate, generate_covering_pair, quasi_covering_corpus,
)
from .graph import Homomorphism, LabeledGraph, SymDigraph, ball, build_dir, with_labels
from .knowledge import Knowledge, parse_knowledge
from .models import CheckReport, Counterexample, Outcome, RunStatus
from .randomness import SourceAssignment, corrupt_class, derive_seed, fiber_shared_assignment
from .runtime import (
    ExecutionTrace, RandomPolicy, SynchronousPolicy, fiberwise_mismatch, lift_execution, run,
)


class CheckError(ValueError):
    """Précondition d'une vérification non remplie."""


BATTERIES = ("lifting", "quasi-lifting", "prop-a5", "impossibility")


def _short(value: Any) -> str:
    return repr(value)[:500]


# =============================================================================
# Moniteurs pas à pas
# =============================================================================

@dataclass
class Monitor:
    """Collecte les violations ; appelé par run() après chaque événement."""
    name: str = "monitor"
    violations: List[Counterexample] = field(default_factory=list)

    @property
    def first(self) -> Optional[Counterexample]:
        return self.violations[0] if self.violations else None

    def fail(self, step: int, vertex: str, expected: str, actual: str):
        self.violations.append(Counterexample(step=step, vertex=vertex, expected=expected, actual=actual))


@dataclass
class MonotonicityMonitor(Monitor):
    """n croissant, b̄ prolongé, N ⪯, M ⊆ (sans les bits), densité des numéros, maximalité de soi."""
    name: str = "monotonicity"

    def __call__(self, step: int, vertex: str, before, after):
        if after.n < before.n:
            self.fail(step, vertex, f"n ≥ {before.n}", f"n = {after.n}")
        if not after.bits.startswith(before.bits):
            self.fail(step, vertex, f"b̄ prolonge {before.bits!r}", repr(after.bits))
        if before.view != after.view and not view_precedes(before.view, after.view):
            self.fail(step, vertex, "N_i ⪯ N_i+1", _short(sorted(e.sort_key for e in after.view)))
        if not before.mailbox.included_in(after.mailbox):
            self.fail(step, vertex, "M_i ⊆ M_i+1", f"{len(after.mailbox)} entrées")
        numbers = after.mailbox.numbers
        if numbers and numbers != frozenset(range(1, max(numbers) + 1)):
            self.fail(step, vertex, f"numéros denses 1..{max(numbers)}", _short(sorted(numbers)))
        if after.n >= 1 and after.mailbox.has_stronger(after.n, after.key):
            self.fail(step, vertex, f"({after.n}, λ, b̄, N) maximal dans M", "entrée plus forte présente")


@dataclass
class CounterMonitor(Monitor):
    """
    Discipline des compteurs : +1 au plus sous M inchangé, c ≥ min A, et
    propagation (c ≥ 1 ⇒ chaque voisin a eu c ≥ c − 1 avec la même boîte).
    """
    digraph: Optional[SymDigraph] = None
    name: str = "counters"
    best: Dict[str, Dict[Any, int]] = field(default_factory=dict)

    def __call__(self, step: int, vertex: str, before, after):
        sig = after.mailbox.shape
        history = self.best.setdefault(vertex, {})
        history[sig] = max(history.get(sig, -2), after.c)

        if after.mailbox.same_shape(before.mailbox) and not (before.c <= after.c <= before.c + 1):
            self.fail(step, vertex, f"c ∈ [{before.c}, {before.c + 1}]", f"c = {after.c}")
        low = min((a for _, a in after.counters), default=-1)
        if after.c < low:
            self.fail(step, vertex, f"c ≥ min A = {low}", f"c = {after.c}")
        if after.c >= 1 and self.digraph is not None:
            for a in self.digraph.in_arcs[vertex]:
                seen = self.best.get(a.s, {}).get(sig, -2)
                if seen < after.c - 1:
                    self.fail(step, vertex, f"voisin {a.s} avec c ≥ {after.c - 1} pour la même boîte",
                              f"max observé {seen}")
                    break


@dataclass
class QuasiCoveringMonitor(Monitor):
    """
    Si S(M(v)) est cohérent et c(v) ≥ 0 : Dir(G) est un quasi-revêtement de
    D_M(v) de centre v et de rayon c(v), γ(w) = n(w) au moment où M(w) = M(v).
    shift ≠ 0 fausse γ (contrôle négatif).
    """
    digraph: Optional[SymDigraph] = None
    name: str = "quasi-covering"
    shift: int = 0
    numbers: Dict[str, Dict[Any, int]] = field(default_factory=dict)
    checked: int = 0

    def __call__(self, step: int, vertex: str, before, after):
        sig = after.mailbox.shape
        self.numbers.setdefault(vertex, {})[sig] = after.n
        if after.c < 0 or self.digraph is None:
            return
        dm = after.mailbox.dm
        if dm is None:
            return
        d = self.digraph
        b = ball(d, vertex, after.c)
        vmap: Dict[str, str] = {}
        for w in sorted(b.vertices):
            n = self.numbers.get(w, {}).get(sig)
            if n is None:
                self.fail(step, vertex, f"γ({w}) défini (boîte de {vertex} déjà vue en {w})", "jamais vue")
                return
            vmap[w] = str(n + self.shift)
        amap = {}
        for a_id in b.arcs:
            a = d.arcs[a_id]
            amap[a_id] = dm_arc_id(int(vmap[a.t]), int(vmap[a.s]), a.label[0], a.label[1])
        gamma = Homomorphism(vmap, amap, d.name, dm.name)
        self.checked += 1
        if not is_quasi_covering(d, dm, vertex, after.c, gamma):
            self.fail(step, vertex, f"quasi-revêtement de D_M de rayon {after.c}",
                      f"refusé (|D_M| = {len(dm)})")


def _settled_key(state) -> Tuple[Any, ...]:
    return (state.label, state.n, state.view, state.mailbox.signature)


@dataclass
class StabilizationMonitor(Monitor):
    """
    Dernier pas où (λ, n, N, M) a changé, par sommet. settle() exige qu'une
    trace terminée finisse sur ces valeurs : un suffixe stable existe.
    """
    name: str = "stabilization"
    last_change: Dict[str, int] = field(default_factory=dict)
    settled: Dict[str, Tuple[Any, ...]] = field(default_factory=dict)

    def __call__(self, step: int, vertex: str, before, after):
        key = _settled_key(after)
        if _settled_key(before) != key:
            self.last_change[vertex] = step
            self.settled[vertex] = key

    @property
    def stable_from(self) -> int:
        return max(self.last_change.values(), default=0)

    def settle(self, trace: ExecutionTrace):
        if trace.status != RunStatus.TERMINATED:
            vertex = next((v for v, s in sorted(trace.final_states.items())
                           if getattr(s, "decision", None) is None), min(trace.final_states, default=""))
            self.fail(trace.steps, vertex, "trace terminée avec un suffixe stable",
                      f"{trace.status.value} après {trace.steps} événements")
            return
        for v, s in sorted(trace.final_states.items()):
            if v in self.settled and self.settled[v] != _settled_key(s):
                self.fail(trace.steps, v, f"(λ, n, N, M) constants depuis le pas {self.last_change[v]}",
                          f"n = {s.n}, {len(s.mailbox)} entrées")
                return


def check_stabilization(trace: ExecutionTrace) -> CheckReport:
    """Rejoue les instantanés de la trace dans le moniteur de stabilisation, puis settle()."""
    monitor = StabilizationMonitor()
    previous: Optional[Dict[str, Any]] = None
    for step, states in [*trace.snapshots, (trace.steps, trace.final_states)]:
        if previous is not None:
            for v in sorted(states):
                if states[v] is not previous[v]:
                    monitor(step, v, previous[v], states[v])
        previous = states
    monitor.settle(trace)
    return _report("stabilization", trace.digraph.name, [monitor], [trace.sources.master_seed],
                   {"status": trace.status.value, "stable_from": monitor.stable_from})


def _report(check: str, instance: str, monitors: Sequence[Monitor], seeds: List[int],
            details: Dict[str, Any]) -> CheckReport:
    failures = [(m.name, m.first) for m in monitors if m.first is not None]
    first = min(failures, key=lambda x: x[1].step) if failures else None
    details = dict(details)
    details["violations"] = {m.name: len(m.violations) for m in monitors}
    if first:
        details["failed_monitor"] = first[0]
    return CheckReport(check=check, instance=instance, passed=first is None,
                       counterexample=first[1] if first else None, seeds=seeds, details=details)


def check_monotonicity(trace: ExecutionTrace) -> CheckReport:
    """Rejoue les instantanés consécutifs d'une trace (pas de 1) dans le moniteur de monotonie."""
    monitor = MonotonicityMonitor()
    previous: Optional[Dict[str, Any]] = None
    for step, states in trace.snapshots:
        if previous is not None:
            for v in sorted(states):
                if states[v] is not previous[v]:
                    monitor(step, v, previous[v], states[v])
        previous = states
    return _report("monotonicity", trace.digraph.name, [monitor], [trace.sources.master_seed],
                   {"snapshots": len(trace.snapshots)})


# =============================================================================
# Relèvement
# =============================================================================

def check_lifting(total: SymDigraph, base: SymDigraph, phi: Homomorphism, alg, rounds: Optional[int] = None,
                  seed: int = 0, corrupt: bool = False) -> CheckReport:
    """
    k rondes synchrones sur la base, relevées sur le total avec sources
    partagées par fibre ; état(v) = état(φ(v)) à chaque pas.
    corrupt=True déplace un sommet relevé dans une classe privée.
    """
    rounds = settings.check_rounds if rounds is None else rounds
    verdict = is_symmetric_covering(total, base, phi)
    if not verdict.accepted:
        raise CoveringError(f"{total.name} -> {base.name} refusé : {'; '.join(verdict.reasons)}")

    base_src = SourceAssignment.from_digraph(base, seed)
    lifted_src = fiber_shared_assignment(verdict, base_src)
    if corrupt:
        lifted_src = corrupt_class(lifted_src, sorted(total.vertices)[0])

    base_trace = run(base, alg, base_src, SynchronousPolicy(rounds), budget=settings.event_budget,
                     snapshot_stride=1)
    lifted = lift_execution(base_trace, total, phi, lifted_src, strict=not corrupt)
    mismatch = fiberwise_mismatch(base_trace, lifted)
    return CheckReport(
        check="lifting", instance=f"{total.name} -> {base.name}", passed=mismatch is None,
        counterexample=mismatch, seeds=[seed],
        details={"rounds": rounds, "base_events": base_trace.steps, "lifted_events": lifted.trace.steps,
                 "sheets": verdict.sheet_count, "corrupt": corrupt},
    )


# =============================================================================
# Quasi-relèvement
# =============================================================================

def quasi_sources(w: QuasiCoveringWitness, seed: int) -> Tuple[SourceAssignment, SourceAssignment]:
    """D₀ : une classe par sommet ; D₁ : classe de γ(x) dans B(v₁, r), privée au-delà."""
    base = SourceAssignment.from_classes({v: f"c:{v}" for v in w.d0.vertices}, seed)
    inside = ball(w.d1, w.center, w.radius).vertices
    lifted = SourceAssignment.from_classes(
        {x: f"c:{w.gamma.vertex_map[x]}" if x in inside else f"#{x}" for x in w.d1.vertices}, seed)
    return base, lifted


def _with_states(d: SymDigraph, states: Dict[str, Any], name: str) -> SymDigraph:
    return with_labels(d, lambda v, lbl: (lbl, states[v]), name)


def check_quasi_lifting(w: QuasiCoveringWitness, alg, rounds: int, seed: int = 0) -> CheckReport:
    """
    k rondes synchrones sur D₀ et D₁ ; D₁ étiqueté par les états reste un
    quasi-revêtement de D₀ étiqueté par les états, de centre v₁ et de rayon
    r − k, et état(v₁) = état(γ(v₁)). k = 0 : le témoin initial lui-même.
    """
    k = rounds
    if k < 0 or k >= w.radius:
        raise CheckError(f"k = {k} hors de [0, r − 1] (r = {w.radius})")
    instance = f"{w.d1.name} -> {w.d0.name} (centre {w.center}, r={w.radius}, k={k})"
    if k == 0:
        ok = is_quasi_covering(w.d1, w.d0, w.center, w.radius, w.gamma)
        return CheckReport(check="quasi-lifting", instance=instance, passed=ok, seeds=[seed],
                           counterexample=None if ok else Counterexample(
                               step=0, vertex=w.center, expected=f"quasi-revêtement de rayon {w.radius}",
                               actual="refusé"),
                           details={"residual_radius": w.radius})

    base_src, lifted_src = quasi_sources(w, seed)
    base_trace = run(w.d0, alg, base_src, SynchronousPolicy(k), budget=settings.event_budget, snapshot_stride=0)
    lifted_trace = run(w.d1, alg, lifted_src, SynchronousPolicy(k), budget=settings.event_budget, snapshot_stride=0)

    center_image = w.gamma.vertex_map[w.center]
    expected, actual = base_trace.final_states[center_image], lifted_trace.final_states[w.center]
    details = {"residual_radius": w.radius - k, "base_events": base_trace.steps,
               "lifted_events": lifted_trace.steps}
    if expected != actual:
        return CheckReport(check="quasi-lifting", instance=instance, passed=False, seeds=[seed],
                           counterexample=Counterexample(step=k, vertex=w.center, expected=_short(expected),
                                                         actual=_short(actual)),
                           details=details)

    d1 = _with_states(w.d1, lifted_trace.final_states, f"{w.d1.name}@{k}")
    d0 = _with_states(w.d0, base_trace.final_states, f"{w.d0.name}@{k}")
    gamma = w.gamma.retarget(d1.name, d0.name)
    ok = is_quasi_covering(d1, d0, w.center, w.radius - k, gamma)
    counterexample = None
    if not ok:
        inner = ball(w.d1, w.center, w.radius - k)
        culprit = next((x for x in sorted(inner.vertices)
                        if lifted_trace.final_states[x] != base_trace.final_states[w.gamma.vertex_map[x]]),
                       w.center)
        counterexample = Counterexample(
            step=k, vertex=culprit,
            expected=_short(base_trace.final_states[w.gamma.vertex_map[culprit]]),
            actual=_short(lifted_trace.final_states[culprit]))
    return CheckReport(check="quasi-lifting", instance=instance, passed=ok, seeds=[seed],
                       counterexample=counterexample, details=details)


def corrupt_witness(w: QuasiCoveringWitness) -> QuasiCoveringWitness:
    """Contrôle négatif : γ envoie le centre sur un autre sommet de D₀."""
    image = w.gamma.vertex_map[w.center]
    other = next(v for v in w.d0.vertices if v != image)
    vmap = dict(w.gamma.vertex_map)
    vmap[w.center] = other
    return dc_replace(w, gamma=Homomorphism(vmap, w.gamma.arc_map, w.gamma.domain, w.gamma.codomain))


# =============================================================================
# Témoins d'impossibilité
# =============================================================================

def impossibility_witness(total: SymDigraph, base: SymDigraph, phi: Homomorphism, alg,
                          budget: int, seeds: Iterable[int], corrupt: bool = False) -> CheckReport:
    """
    Pour chaque graine : exécution synchrone sur la base, relevée sur le
    total. Les états restent égaux fibre par fibre, et aucune issue n'est
    correcte (plusieurs élus ou indécis).
    """
    verdict = is_symmetric_covering(total, base, phi)
    if not verdict.accepted:
        raise CoveringError(f"{total.name} -> {base.name} refusé : {'; '.join(verdict.reasons)}")
    if verdict.sheet_count < 2:
        raise CheckError(f"{total.name} -> {base.name} : {verdict.sheet_count} feuillet(s), au moins 2 requis")

    seeds = list(seeds)
    outcomes: Counter = Counter()
    first: Optional[Counterexample] = None
    for seed in seeds:
        base_src = SourceAssignment.from_digraph(base, seed)
        lifted_src = fiber_shared_assignment(verdict, base_src)
        if corrupt:
            lifted_src = SourceAssignment.from_classes({v: f"#{v}" for v in total.vertices}, seed)
        base_trace = run(base, alg, base_src, SynchronousPolicy(), budget=budget, snapshot_stride=1)
        lifted = lift_execution(base_trace, total, phi, lifted_src, strict=not corrupt)
        outcome = evaluate_outcome(lifted.trace).outcome
        outcomes[outcome.value] += 1
        if first is None:
            mismatch = fiberwise_mismatch(base_trace, lifted)
            if mismatch is not None:
                first = mismatch
            elif outcome == Outcome.CORRECT:
                first = Counterexample(step=lifted.trace.steps, vertex="*",
                                       expected="aucune élection correcte", actual="correct")
    return CheckReport(
        check="impossibility", instance=f"{total.name} -> {base.name}",
        passed=first is None and outcomes[Outcome.CORRECT.value] == 0,
        counterexample=first, seeds=seeds,
        details={"outcomes": dict(sorted(outcomes.items())), "sheets": verdict.sheet_count, "corrupt": corrupt},
    )


# =============================================================================
# Rayon des compteurs (M_τ)
# =============================================================================

def check_counter_radius(g: LabeledGraph, knowledge: Knowledge, seed: int = 0,
                         budget: Optional[int] = None, corrupt: bool = False) -> CheckReport:
    """M_τ sous ordonnanceur aléatoire, avec les moniteurs de compteurs, de quasi-revêtement et de monotonie."""
    prepared = knowledge.prepare(g)
    d = build_dir(prepared)
    src = SourceAssignment.from_graph(prepared, seed)
    alg = MTauAlgorithm(knowledge)
    monitors: List[Monitor] = [
        QuasiCoveringMonitor(digraph=d, shift=1 if corrupt else 0),
        CounterMonitor(digraph=d),
        MonotonicityMonitor(),
    ]
    stabilization = StabilizationMonitor()
    trace = run(d, alg, src, RandomPolicy(derive_seed(seed, "scheduler", g.name)),
                budget=budget or settings.event_budget, snapshot_stride=0,
                monitors=[*monitors, stabilization])
    stabilization.settle(trace)
    return _report("prop-a5", f"{g.name} [{knowledge.describe()}]", [*monitors, stabilization], [seed], {
        "outcome": evaluate_outcome(trace).outcome.value,
        "status": trace.status.value,
        "events": trace.steps,
        "radius_checks": monitors[0].checked,
        "stable_from": stabilization.stable_from,
    })


# =============================================================================
# Batteries
# =============================================================================

def default_counter_instances() -> List[Tuple[str, str]]:
    """(spec, connaissance) : membres B-minimaux et non B-minimaux."""
    return [
        ("clique:2,labels=ab,shared", "two-approx:2"),
        ("path:3,distinct,shared", "exact-size:3"),
        ("ring:4,anon,one-unshared", "two-approx:4"),
        ("ring:5,anon,unshared", "two-approx:6"),
        ("clique:4,anon,classes=aaab", "exact-size:4"),
        ("ring:4,anon,classes=abab", "bk:4"),
        ("ring:5,anon,classes=aabcd", "bk:2"),
    ]


def impossibility_fixtures() -> List[Tuple[SymDigraph, SymDigraph, Homomorphism, int, str]]:
    """(total, base, φ, n_total, description) : C₆/C₃ et C₄/C₂ à sources partagées par fibre."""
    c6 = generate_covering_pair("ring:3,anon,unshared", 2)
    c4 = build_dir(generate("ring:4,anon,classes=ab"), with_sources=True)
    c2, phi2 = minimal_base(c4)
    return [
        (c6.total_dir, c6.base_dir, c6.phi, 6, "C6/C3, n=6"),
        (c6.total_dir, c6.base_dir, c6.phi, 3, "C6/C3, n=3"),
        (c4, c2, phi2, 4, "C4/C2, n=4"),
    ]


def run_battery(name: str, seed: int = 0, corrupt: bool = False, quick: bool = True) -> List[CheckReport]:
    """lifting, quasi-lifting, prop-a5, impossibility ou all."""
    if name == "all":
        return [r for b in BATTERIES for r in run_battery(b, seed, corrupt, quick)]
    if name not in BATTERIES:
        raise CheckError(f"Batterie inconnue '{name}' ({', '.join(BATTERIES)}, all)")
    print(f"🔎 [Verifier] batterie {name} (graine {seed}{', corrompue' if corrupt else ''})", file=sys.stderr)

    reports: List[CheckReport] = []
    if name == "lifting":
        specs = default_covering_specs()
        for i, (spec, q) in enumerate(specs[::4] if quick else specs):
            pair = generate_covering_pair(spec, q)
            alg = MAlgorithm(len(pair.total))
            reports.append(check_lifting(pair.total_dir, pair.base_dir, pair.phi, alg,
                                         rounds=10 if quick else settings.check_rounds,
                                         seed=derive_seed(seed, "lifting", i), corrupt=corrupt))

    elif name == "quasi-lifting":
        witnesses = quasi_covering_corpus(6 if quick else settings.quasi_max_radius)
        for i, w in enumerate(witnesses[::3] if quick else witnesses):
            target = corrupt_witness(w) if corrupt else w
            alg = MAlgorithm(len(w.d1))
            ks = sorted({1, w.radius // 2, w.radius - 1} - {0}) if quick else range(1, w.radius)
            for k in ks:
                reports.append(check_quasi_lifting(target, alg, k, seed=derive_seed(seed, "quasi", i)))

    elif name == "prop-a5":
        for i, (spec, text) in enumerate(default_counter_instances()):
            reports.append(check_counter_radius(generate(spec), parse_knowledge(text),
                                                seed=derive_seed(seed, "prop-a5", i),
                                                budget=200_000 if quick else None, corrupt=corrupt))

    else:
        count = 5 if quick else 100
        for total, base, phi, n_total, _ in impossibility_fixtures():
            seeds = [derive_seed(seed, "impossibility", n_total, j) for j in range(count)]
            reports.append(impossibility_witness(total, base, phi, MAlgorithm(n_total),
                                                 budget=2_000 if quick else 20_000,
                                                 seeds=seeds, corrupt=corrupt))

    failed = sum(1 for r in reports if not r.passed)
    icon = "✅" if not failed else "❌"
    print(f"{icon} [Verifier] {name} : {len(reports) - failed}/{len(reports)} vérifications réussies", file=sys.stderr)
    return reports
