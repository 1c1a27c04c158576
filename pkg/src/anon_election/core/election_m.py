# -*- coding: utf-8 -*-
"""
Algorithme M : énumération randomisée, élection à taille connue.

Chaque nœud maintient (λ, b̄, n, N, M) :
- b̄ : bits tirés de sa source (un bit par règle I ou C) ;
- n : numéro provisoire ; N : vue locale (numéros des voisins par port) ;
- M : boîte aux lettres, tout ce que le nœud a entendu.

Règles :
- I (réveil, rien reçu) : n := 1, un bit, M := {(1, λ, b̄, ∅)}, diffusion ;
- R (réception) : union des boîtes, renumérotation si un autre nœud porte
  le même numéro avec une clé (λ, b̄, N) plus forte, mise à jour de N,
  diffusion si M a changé (deux entrées d'accord sur (n, λ, N) et dont les
  bits propres sont préfixes l'une de l'autre sont identifiées) ;
- C (spontanée) : M cohérente et numéro n_total absent, un bit, entrée
  propre rafraîchie dans M, diffusion.

Terminaison : n = n_total (ELECTED) ou n_total vu dans M (NON-ELECTED).
"""

from dataclasses import dataclass, field, replace
from functools import cached_property, cmp_to_key
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .graph import SymDigraph, validate_digraph
from .models import Decision, Outcome, RunStatus
from .runtime import Deliver, Event, GuardError, Message, NodeInfo, Spontaneous, Step, Wakeup


class ConfigurationError(ValueError):
    """Paramètre d'algorithme invalide (n_total, connaissance...)."""


class IncoherentMailboxError(ValueError):
    """D_M demandé sur une boîte aux lettres non cohérente."""


Label = Optional[str]


def _label_key(label: Label) -> Tuple[int, str]:
    """⊥ (None) précède toute étiquette ; les étiquettes sont comparées comme chaînes."""
    return (0, "") if label is None else (1, str(label))


def is_prefix_related(b1: str, b2: str) -> bool:
    return b1.startswith(b2) or b2.startswith(b1)


# =============================================================================
# Vues locales et ordre ≺
# =============================================================================

@dataclass(frozen=True)
class LocalViewEntry:
    """(m, ℓ, b̄, p, q) : le voisin de numéro m est relié par l'arc étiqueté (p, q)."""
    m: int
    label: Label
    bits: str
    p: int
    q: int

    @property
    def sort_key(self) -> Tuple[Any, ...]:
        return (self.m, _label_key(self.label), self.bits, self.p, self.q)

    @property
    def shape(self) -> Tuple[int, Label, int, int]:
        return (self.m, self.label, self.p, self.q)


View = FrozenSet[LocalViewEntry]


def initial_view(degree: int) -> View:
    return frozenset(LocalViewEntry(0, None, "", 0, q) for q in range(1, degree + 1))


def view_precedes(n1: View, n2: View) -> bool:
    """N₁ ≺ N₂ : le maximum de la différence symétrique appartient à N₂."""
    if n1 == n2:
        return False
    top = max(n1 ^ n2, key=lambda e: e.sort_key)
    return top in n2


def compare_keys(k1: Tuple[Label, str, View], k2: Tuple[Label, str, View]) -> int:
    """
    Ordre sur (ℓ, b̄, N) : étiquette, puis bits (ordre alphabétique, un
    préfixe précède ses extensions), puis vue sous ≺. Renvoie -1, 0 ou 1.
    """
    (l1, b1, v1), (l2, b2, v2) = k1, k2
    if _label_key(l1) != _label_key(l2):
        return -1 if _label_key(l1) < _label_key(l2) else 1
    if b1 != b2:
        return -1 if b1 < b2 else 1
    if v1 == v2:
        return 0
    return -1 if view_precedes(v1, v2) else 1


# =============================================================================
# Boîte aux lettres
# =============================================================================

Projection = Tuple[int, Label, View]
Shape = Tuple[int, Label, FrozenSet[Tuple[int, Label, int, int]]]


@dataclass(frozen=True)
class MailboxEntry:
    """(n, ℓ, b̄, N) : un état (numéro, étiquette, bits, vue) tenu par un nœud."""
    n: int
    label: Label
    bits: str
    view: View

    @property
    def key(self) -> Tuple[Label, str, View]:
        return (self.label, self.bits, self.view)

    @property
    def projection(self) -> Projection:
        """L'entrée sans ses bits propres ; la vue garde les bits des voisins."""
        return (self.n, self.label, self.view)

    @cached_property
    def shape(self) -> Shape:
        """L'entrée sans aucune séquence de bits (ni la sienne, ni celles de la vue)."""
        return (self.n, self.label, frozenset(e.shape for e in self.view))

    def dominates(self, other: "MailboxEntry") -> bool:
        """Même (n, λ, N) et b̄ prolonge celui de other."""
        return self.projection == other.projection and self.bits.startswith(other.bits)


_entry_order = cmp_to_key(lambda a, b: compare_keys(a.key, b.key))


@dataclass(frozen=True, eq=False)
class Mailbox:
    """
    Ensemble d'entrées groupées par (n, λ, N) ; dans un groupe ne reste que
    l'entrée aux bits propres les plus longs (les autres en sont des préfixes)
    ou plusieurs entrées incomparables. Égalité exacte (bits compris) ;
    signature ignore les bits propres, shape toutes les séquences de bits.
    """
    groups: Mapping[Projection, FrozenSet[MailboxEntry]] = field(default_factory=dict)

    @classmethod
    def of(cls, entries: Iterable[MailboxEntry]) -> "Mailbox":
        return cls().merge_entries(entries)

    @cached_property
    def entries(self) -> FrozenSet[MailboxEntry]:
        return frozenset(e for group in self.groups.values() for e in group)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Mailbox) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self) -> str:
        return f"Mailbox({len(self.entries)} entrées, {len(self.groups)} groupes)"

    # -------------------------------------------------------------------------
    # Union
    # -------------------------------------------------------------------------

    def merge_entries(self, entries: Iterable[MailboxEntry]) -> "Mailbox":
        groups: Dict[Projection, FrozenSet[MailboxEntry]] = dict(self.groups)
        changed = False
        for entry in entries:
            group = groups.get(entry.projection, frozenset())
            if entry in group or any(e.dominates(entry) for e in group):
                continue
            groups[entry.projection] = frozenset(e for e in group if not entry.dominates(e)) | {entry}
            changed = True
        return Mailbox(groups) if changed else self

    def merge(self, other: "Mailbox") -> "Mailbox":
        if other is self or other.entries <= self.entries:
            return self
        return self.merge_entries(other.entries)

    def add(self, entry: MailboxEntry) -> "Mailbox":
        return self.merge_entries((entry,))

    # -------------------------------------------------------------------------
    # Comparaisons
    # -------------------------------------------------------------------------

    @cached_property
    def signature(self) -> FrozenSet[Projection]:
        return frozenset(self.groups)

    def same_as(self, other: "Mailbox") -> bool:
        """M = M_old aux bits propres près : décide des diffusions de la règle R."""
        return self.signature == other.signature

    def included_in(self, other: "Mailbox") -> bool:
        return self.signature <= other.signature

    @cached_property
    def shape(self) -> FrozenSet[Shape]:
        return frozenset(e.shape for e in self.entries)

    def same_shape(self, other: "Mailbox") -> bool:
        """Égalité sans aucune séquence de bits : régit les compteurs de M_τ."""
        return self.shape == other.shape

    # -------------------------------------------------------------------------
    # Numéros, S(M), cohérence
    # -------------------------------------------------------------------------

    @cached_property
    def numbers(self) -> FrozenSet[int]:
        return frozenset(p[0] for p in self.groups)

    @property
    def max_number(self) -> int:
        return max(self.numbers, default=0)

    def has_number(self, n: int) -> bool:
        return n in self.numbers

    def has_stronger(self, n: int, key: Tuple[Label, str, View]) -> bool:
        """Existe-t-il une entrée de numéro n de clé strictement plus forte que key ?"""
        return any(e.n == n and compare_keys(key, e.key) < 0 for e in self.entries)

    @cached_property
    def maximal(self) -> Dict[int, MailboxEntry]:
        """S(M) : pour chaque numéro, l'entrée maximale pour l'ordre sur (ℓ, b̄, N)."""
        best: Dict[int, List[MailboxEntry]] = {}
        for e in self.entries:
            best.setdefault(e.n, []).append(e)
        return {n: max(es, key=_entry_order) for n, es in sorted(best.items())}

    @cached_property
    def coherent(self) -> bool:
        return not self.incoherence()

    def incoherence(self) -> Optional[str]:
        """Première raison d'incohérence de S(M), ou None."""
        s = self.maximal
        if not s:
            return "S(M) vide"
        for n1, e1 in s.items():
            for x in e1.view:
                if x.p == 0 or x.m == 0 or x.label is None:
                    return f"entrée {n1} : port {x.q} non renseigné"
                e2 = s.get(x.m)
                if e2 is None:
                    return f"entrée {n1} : numéro {x.m} absent de S(M)"
                if e2.label != x.label:
                    return f"entrée {n1} : étiquette de {x.m} incohérente"
                if not is_prefix_related(e2.bits, x.bits):
                    return f"entrée {n1} : bits de {x.m} incompatibles"
                if not any(y.m == n1 and y.label == e1.label and y.p == x.q and y.q == x.p
                           and is_prefix_related(y.bits, e1.bits) for y in e2.view):
                    return f"entrée {n1} : pas d'arc réciproque chez {x.m}"
        reached = {min(s)}
        frontier = [min(s)]
        while frontier:
            for x in s[frontier.pop()].view:
                if x.m not in reached:
                    reached.add(x.m)
                    frontier.append(x.m)
        if len(reached) != len(s):
            return f"S(M) non connexe : {len(s) - len(reached)} numéro(s) hors d'atteinte de {min(s)}"
        return None

    @cached_property
    def dm(self) -> Optional[SymDigraph]:
        return build_dm(self) if self.coherent else None


def dm_arc_id(n: int, n2: int, p: int, q: int) -> str:
    """Identifiant de l'arc a_{n,n′,p,q} de D_M (cible n, source n′)."""
    return f"a_{n}_{n2}_{p}_{q}"


def build_dm(mailbox: Mailbox) -> SymDigraph:
    """Reconstruit D_M à partir de S(M) cohérent : sommets = numéros, arcs = vues."""
    reason = mailbox.incoherence()
    if reason:
        raise IncoherentMailboxError(f"D_M indéfini : {reason}")
    s = mailbox.maximal
    vertices = {str(n): (e.label, None) for n, e in s.items()}
    arcs, sym = [], []
    for n, e in s.items():
        for x in sorted(e.view, key=lambda y: y.sort_key):
            arcs.append((dm_arc_id(n, x.m, x.p, x.q), str(x.m), str(n), x.p, x.q))
            sym.append((dm_arc_id(n, x.m, x.p, x.q), dm_arc_id(x.m, n, x.q, x.p)))
    d = SymDigraph.build("D_M", vertices, arcs, sym)
    report = validate_digraph(d)
    if not report.ok:
        raise IncoherentMailboxError(f"D_M invalide : {'; '.join(report.messages())}")
    return d


# =============================================================================
# États et messages
# =============================================================================

@dataclass(frozen=True)
class MPayload:
    """⟨(n, ℓ, b̄, M)⟩ ; le port d'émission voyage dans Message.via_port."""
    n: int
    label: Label
    bits: str
    mailbox: Mailbox


@dataclass(frozen=True)
class MState:
    label: Label
    degree: int
    n_total: int
    bits: str = ""
    n: int = 0
    view: View = frozenset()
    mailbox: Mailbox = field(default_factory=Mailbox)
    decision: Optional[Decision] = None

    @property
    def key(self) -> Tuple[Label, str, View]:
        return (self.label, self.bits, self.view)

    def self_entry(self) -> MailboxEntry:
        return MailboxEntry(self.n, self.label, self.bits, self.view)


def apply_receipt(state, payload, via_port: int, port: int):
    """
    Partie commune de la règle R (M et M_τ) : union, renumérotation,
    mise à jour de la vue sur le port de réception, ajout de l'entrée propre.
    """
    mailbox = state.mailbox.merge(payload.mailbox)
    n = state.n
    if n == 0 or mailbox.has_stronger(n, state.key):
        n = 1 + mailbox.max_number
    view = frozenset(e for e in state.view if e.q != port) | {
        LocalViewEntry(payload.n, payload.label, payload.bits, via_port, port)}
    mailbox = mailbox.add(MailboxEntry(n, state.label, state.bits, view))
    return replace(state, n=n, view=view, mailbox=mailbox)


def broadcast(degree: int, payload: Any) -> Tuple[Tuple[int, Any], ...]:
    return tuple((p, payload) for p in range(1, degree + 1))


class MAlgorithm:
    """Algorithme M paramétré par la taille connue n_total."""

    name = "m"

    def __init__(self, n_total: int):
        if n_total < 1:
            raise ConfigurationError(f"n_total doit être ≥ 1 (reçu {n_total})")
        self.n_total = n_total

    def initial_state(self, info: NodeInfo) -> MState:
        return MState(label=info.label, degree=info.degree, n_total=self.n_total,
                      view=initial_view(info.degree))

    def wakeup_enabled(self, s: MState) -> bool:
        return s.n == 0 and not s.mailbox.entries and s.decision is None

    def spontaneous_enabled(self, s: MState) -> bool:
        return (s.n >= 1 and s.decision is None and s.mailbox.coherent
                and not s.mailbox.has_number(self.n_total))

    def bits_needed(self, s: MState, event: Event) -> int:
        return 0 if isinstance(event, Deliver) else 1

    def _payload(self, s: MState) -> MPayload:
        return MPayload(s.n, s.label, s.bits, s.mailbox)

    def step(self, s: MState, event: Event, bits: str, message: Optional[Message] = None) -> Step:
        if isinstance(event, Wakeup):
            if not self.wakeup_enabled(s):
                raise GuardError(f"I non applicable (n={s.n})")
            bits_now = s.bits + bits
            new = replace(s, n=1, bits=bits_now,
                          mailbox=Mailbox.of([MailboxEntry(1, s.label, bits_now, frozenset())]))
            new = self._decide(new)
            return Step(new, broadcast(new.degree, self._payload(new)))

        if isinstance(event, Deliver):
            if message is None:
                raise GuardError("R sans message")
            new = self._decide(apply_receipt(s, message.payload, message.via_port, event.port))
            if new.mailbox.same_as(s.mailbox):
                return Step(new)
            return Step(new, broadcast(new.degree, self._payload(new)))

        if isinstance(event, Spontaneous):
            if not self.spontaneous_enabled(s):
                raise GuardError("C non applicable")
            bits_now = s.bits + bits
            refreshed = MailboxEntry(s.n, s.label, bits_now, s.view)
            new = replace(s, bits=bits_now, mailbox=s.mailbox.add(refreshed))
            return Step(new, broadcast(new.degree, self._payload(new)))

        raise GuardError(f"Événement inconnu : {event!r}")

    def _decide(self, s: MState) -> MState:
        if s.decision is not None:
            return s
        if s.n == self.n_total:
            return replace(s, decision=Decision.ELECTED)
        if s.mailbox.has_number(self.n_total):
            return replace(s, decision=Decision.NON_ELECTED)
        return s

    def is_terminal(self, s: MState) -> bool:
        return s.decision is not None

    def accepts_when_terminal(self) -> bool:
        return False

    def summarize(self, s: MState) -> Dict[str, Any]:
        return summarize_state(s)


def summarize_state(s) -> Dict[str, Any]:
    summary = {
        "n": s.n,
        "bits": s.bits,
        "decision": s.decision.value if s.decision else None,
        "view": sorted([e.m, e.label, e.bits, e.p, e.q] for e in s.view),
        "mailbox": len(s.mailbox),
        "coherent": s.mailbox.coherent,
    }
    if hasattr(s, "c"):
        summary["c"] = s.c
    return summary


# =============================================================================
# Classification des exécutions
# =============================================================================

@dataclass(frozen=True)
class ElectionResult:
    outcome: Outcome
    elected: Optional[str] = None


def evaluate_outcome(trace) -> ElectionResult:
    """
    Plusieurs ELECTED : multiple-elected. Sinon un nœud sans décision :
    undecided. Sinon exactement un ELECTED : correct. Sinon none-elected.
    """
    final: Mapping[str, Any] = trace.final_states
    decisions = {v: getattr(s, "decision", None) for v, s in final.items()}
    elected = sorted(v for v, d in decisions.items() if d == Decision.ELECTED)
    if len(elected) >= 2:
        return ElectionResult(Outcome.MULTIPLE_ELECTED)
    if any(d is None for d in decisions.values()) or \
            (trace.status == RunStatus.UNDECIDED and not final):
        return ElectionResult(Outcome.UNDECIDED)
    if len(elected) == 1:
        return ElectionResult(Outcome.CORRECT, elected[0])
    return ElectionResult(Outcome.NONE_ELECTED)


def final_numbers(trace) -> Dict[str, int]:
    return {v: s.n for v, s in sorted(trace.final_states.items())}
