# -*- coding: utf-8 -*-
"""
Algorithme M_τ : M muni de compteurs de stabilité (type SSP).

En plus de (λ, b̄, n, N, M), chaque nœud tient :
- c : rayon sur lequel le calcul est localement stable (−1 dès que M
  change autrement que par des bits) ;
- A : dernier compteur reçu de chaque voisin dont la boîte a la forme de M.

Les diffusions suivent M aux bits propres près : un bit tiré par un voisin
se propage sans remettre les compteurs à zéro.

c augmente d'au plus 1 par réception quand tous les compteurs voisins sont
≥ c et que QC tient : S(M) cohérent, D_M ∈ F, c ≤ τ(D_M). Un nœud décide
quand c ≥ τ(D_M) avec D_M ∈ F : ELECTED ssi son numéro est le maximum de D_M.
Après décision, il continue de relayer les boîtes (voisins encore indécis).
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

from .election_m import (
    Label, Mailbox, MailboxEntry, View, apply_receipt, broadcast, initial_view, summarize_state,
)
from .graph import SymDigraph
from .knowledge import Knowledge, KnowledgeError, NoKnowledge
from .models import Decision
from .runtime import Deliver, Event, GuardError, Message, NodeInfo, Spontaneous, Step, Wakeup


@dataclass(frozen=True)
class MTPayload:
    """⟨(n, ℓ, b̄, M, a)⟩ : a = compteur de l'expéditeur à l'envoi (règles R et C)."""
    n: int
    label: Label
    bits: str
    mailbox: Mailbox
    a: int


@dataclass(frozen=True)
class MTState:
    label: Label
    degree: int
    bits: str = ""
    n: int = 0
    view: View = frozenset()
    mailbox: Mailbox = field(default_factory=Mailbox)
    c: int = -1
    counters: Tuple[Tuple[int, int], ...] = ()
    decision: Optional[Decision] = None

    @property
    def key(self):
        return (self.label, self.bits, self.view)

    def self_entry(self) -> MailboxEntry:
        return MailboxEntry(self.n, self.label, self.bits, self.view)

    @property
    def neighbor_counters(self) -> Dict[int, int]:
        return dict(self.counters)


def reset_counters(degree: int) -> Tuple[Tuple[int, int], ...]:
    return tuple((q, -1) for q in range(1, degree + 1))


@dataclass(frozen=True)
class DigraphVerdict:
    """Appartenance de D_M à F et τ(D_M), mis en cache par empreinte."""
    digraph: SymDigraph
    in_family: bool
    tau: int


class MTauAlgorithm:
    """M_τ pour une connaissance F donnée (τ doit exister)."""

    name = "mtau"

    def __init__(self, knowledge: Knowledge):
        if isinstance(knowledge, NoKnowledge):
            raise KnowledgeError("M_τ exige une fonction τ : la connaissance 'none' n'en fournit pas")
        self.knowledge = knowledge
        self._verdicts: Dict[Tuple[Any, ...], DigraphVerdict] = {}

    # -------------------------------------------------------------------------
    # D_M, F et τ
    # -------------------------------------------------------------------------

    def verdict(self, mailbox: Mailbox) -> Optional[DigraphVerdict]:
        """None si S(M) n'est pas cohérent."""
        d = mailbox.dm
        if d is None:
            return None
        cached = self._verdicts.get(d.fingerprint)
        if cached is None:
            cached = DigraphVerdict(d, self.knowledge.contains(d), self.knowledge.tau(d))
            self._verdicts[d.fingerprint] = cached
        return cached

    def qc_holds(self, s: MTState) -> bool:
        v = self.verdict(s.mailbox)
        return v is not None and v.in_family and s.c <= v.tau

    # -------------------------------------------------------------------------
    # Gardes
    # -------------------------------------------------------------------------

    def initial_state(self, info: NodeInfo) -> MTState:
        return MTState(label=info.label, degree=info.degree, view=initial_view(info.degree),
                       counters=reset_counters(info.degree))

    def wakeup_enabled(self, s: MTState) -> bool:
        return s.n == 0 and not s.mailbox.entries and s.decision is None

    def spontaneous_enabled(self, s: MTState) -> bool:
        if s.n < 1 or s.decision is not None:
            return False
        v = self.verdict(s.mailbox)
        return v is not None and s.c < v.tau

    def bits_needed(self, s: MTState, event: Event) -> int:
        return 0 if isinstance(event, Deliver) else 1

    # -------------------------------------------------------------------------
    # Règles
    # -------------------------------------------------------------------------

    def _payload(self, s: MTState) -> MTPayload:
        return MTPayload(s.n, s.label, s.bits, s.mailbox, s.c)

    def step(self, s: MTState, event: Event, bits: str, message: Optional[Message] = None) -> Step:
        if isinstance(event, Wakeup):
            if not self.wakeup_enabled(s):
                raise GuardError(f"I non applicable (n={s.n})")
            bits_now = s.bits + bits
            new = replace(s, n=1, c=-1, bits=bits_now,
                          mailbox=Mailbox.of([MailboxEntry(1, s.label, bits_now, frozenset())]))
            new = self._decide(new)
            return Step(new, broadcast(new.degree, self._payload(new)))

        if isinstance(event, Deliver):
            if message is None:
                raise GuardError("R sans message")
            return self._receive(s, message.payload, message.via_port, event.port)

        if isinstance(event, Spontaneous):
            if not self.spontaneous_enabled(s):
                raise GuardError("C non applicable")
            bits_now = s.bits + bits
            refreshed = MailboxEntry(s.n, s.label, bits_now, s.view)
            new = replace(s, bits=bits_now, mailbox=s.mailbox.add(refreshed))
            return Step(new, broadcast(new.degree, self._payload(new)))

        raise GuardError(f"Événement inconnu : {event!r}")

    def _receive(self, s: MTState, payload: MTPayload, via_port: int, port: int) -> Step:
        c_old = s.c
        new = apply_receipt(s, payload, via_port, port)
        grown = not new.mailbox.same_as(s.mailbox)
        if not new.mailbox.same_shape(s.mailbox):
            new = replace(new, c=-1, counters=reset_counters(new.degree))
        if new.mailbox.same_shape(payload.mailbox):
            counters = dict(new.counters)
            counters[port] = payload.a
            new = replace(new, counters=tuple(sorted(counters.items())))
        # Au plus un incrément par application de R.
        if all(a >= new.c for _, a in new.counters) and self.qc_holds(new):
            new = replace(new, c=new.c + 1)
        new = self._decide(new)
        if grown or new.c != c_old:
            return Step(new, broadcast(new.degree, self._payload(new)))
        return Step(new)

    def _decide(self, s: MTState) -> MTState:
        if s.decision is not None:
            return s
        v = self.verdict(s.mailbox)
        if v is None or not v.in_family or s.c < v.tau:
            return s
        top = max(int(x) for x in v.digraph.vertices)
        return replace(s, decision=Decision.ELECTED if s.n == top else Decision.NON_ELECTED)

    # -------------------------------------------------------------------------

    def is_terminal(self, s: MTState) -> bool:
        return s.decision is not None

    def accepts_when_terminal(self) -> bool:
        return True

    def summarize(self, s: MTState) -> Dict[str, Any]:
        summary = summarize_state(s)
        summary["counters"] = [list(x) for x in s.counters]
        return summary
