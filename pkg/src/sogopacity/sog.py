"""Deterministic symbolic observation graph (SOG) over an LTS."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .lts import LabeledTransitionSystem, SecretSpec, Word
from .stateset import ExplicitStateSet, StateSet, img, saturate


@dataclass(frozen=True)
class Aggregate:
    """One SOG node: a saturation-closed, non-empty set of LTS states."""

    id: int
    states: StateSet
    contains_secret: bool
    all_secret: bool


@dataclass(frozen=True)
class Sog:
    lts: LabeledTransitionSystem
    aggregates: tuple[Aggregate, ...]
    edges: tuple[tuple[int, str, int], ...]
    # parent aggregate and event through which each aggregate was discovered
    parents: tuple[tuple[int, str] | None, ...]
    initial: int = 0

    @property
    def observable_alphabet(self) -> frozenset[str]:
        return self.lts.observable

    @cached_property
    def _succ(self) -> dict[tuple[int, str], int]:
        return {(a, e): b for a, e, b in self.edges}

    def successor(self, aid: int, event: str) -> int | None:
        return self._succ.get((aid, event))

    @cached_property
    def _out(self) -> dict[int, list[tuple[str, int]]]:
        out: dict[int, list[tuple[str, int]]] = {a.id: [] for a in self.aggregates}
        for a, e, b in self.edges:
            out[a].append((e, b))
        return {a: sorted(v) for a, v in out.items()}

    def out_edges(self, aid: int) -> list[tuple[str, int]]:
        return self._out[aid]

    def trace_to(self, aid: int) -> Word:
        """Observable word along which ``aid`` was first discovered."""
        events = []
        while self.parents[aid] is not None:
            aid, e = self.parents[aid]
            events.append(e)
        return tuple(reversed(events))

    def walk(self, word: Sequence[str]) -> int | None:
        aid = self.initial
        for e in word:
            aid = self._succ.get((aid, e))
            if aid is None:
                return None
        return aid

    def words(self, max_len: int) -> Iterator[tuple[Word, int]]:
        """All observable words of length <= ``max_len`` with their aggregate."""
        level = [((), self.initial)]
        for depth in range(max_len + 1):
            yield from level
            if depth == max_len:
                return
            level = [(w + (e,), b) for w, a in level for e, b in self.out_edges(a)]

    def disclosing_words(self, max_len: int) -> set[Word]:
        """Words of length <= ``max_len`` that lead to an all-secret aggregate."""
        return {w for w, a in self.words(max_len) if self.aggregates[a].all_secret}


def _aggregate_flags(states: StateSet, secret: frozenset[int]) -> tuple[bool, bool]:
    members = set(states)
    contains = bool(members & secret)
    return contains, bool(members) and members <= secret


def enable_obs(lts: LabeledTransitionSystem, a: Aggregate | StateSet) -> tuple[str, ...]:
    """Observable events with a non-empty image from ``a``, sorted by id."""
    states = a.states if isinstance(a, Aggregate) else a
    succ = lts.observable_successors
    events = {e for q in states for e in succ[q]}
    return tuple(sorted(events))


def build_sog(lts: LabeledTransitionSystem, secret: SecretSpec, backend=ExplicitStateSet) -> Sog:
    """Build the deterministic SOG by depth-first exploration.

    Aggregates are numbered in discovery order and events are tried in
    sorted order, so two builds of the same LTS are identical.
    """
    secret_idx = secret.indices(lts)
    a0_states = saturate(lts, backend(lts, [lts.initial_index]))
    treated: dict[StateSet, int] = {a0_states: 0}
    aggregates = [Aggregate(0, a0_states, *_aggregate_flags(a0_states, secret_idx))]
    parents: list[tuple[int, str] | None] = [None]
    edges: list[tuple[int, str, int]] = []

    stack = [(0, iter(enable_obs(lts, a0_states)))]
    while stack:
        aid, pending = stack[-1]
        event = next(pending, None)
        if event is None:
            stack.pop()
            continue
        succ_states = saturate(lts, img(lts, aggregates[aid].states, event))
        target = treated.get(succ_states)
        if target is None:
            target = len(aggregates)
            treated[succ_states] = target
            aggregates.append(Aggregate(target, succ_states, *_aggregate_flags(succ_states, secret_idx)))
            parents.append((aid, event))
            stack.append((target, iter(enable_obs(lts, succ_states))))
        edges.append((aid, event, target))

    return Sog(lts, tuple(aggregates), tuple(edges), tuple(parents))


def _quote(s: str) -> str:
    # backslashes are left alone: DOT reads "\n" in labels as a line break
    return '"' + s.replace('"', '\\"') + '"'


def export_dot(sog: Sog, *, show_states: bool = True, name: str = "SOG") -> str:
    """Render the SOG as a Graphviz digraph.

    All-secret aggregates are filled red with a double border; aggregates
    that merely contain a secret state are filled yellow.
    """
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=box, fontname=monospace];"]
    for agg in sog.aggregates:
        label = f"a{agg.id}"
        if show_states:
            label += "\\n{" + ", ".join(agg.states.ids()) + "}"
        attrs = [f"label={_quote(label)}"]
        if agg.all_secret:
            attrs += ["style=filled", 'fillcolor="#f4a6a6"', "peripheries=2"]
        elif agg.contains_secret:
            attrs += ["style=filled", 'fillcolor="#fff3b0"']
        if agg.id == sog.initial:
            attrs.append("penwidth=2")
        lines.append(f"  a{agg.id} [{', '.join(attrs)}];")
    for a, e, b in sog.edges:
        lines.append(f"  a{a} -> a{b} [label={_quote(sog.lts.label(e))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_lts_dot(lts: LabeledTransitionSystem, secret: SecretSpec, *, name: str = "LTS") -> str:
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=circle, fontname=monospace];"]
    for s in lts.states:
        attrs = [f"label={_quote(s)}"]
        if s in secret.states:
            attrs += ["style=filled", 'fillcolor="#f4a6a6"']
        if s == lts.initial:
            attrs.append("penwidth=2")
        lines.append(f"  {_quote(s)} [{', '.join(attrs)}];")
    for src, e, dst in lts.edges:
        style = "" if e in lts.observable else ", style=dashed"
        lines.append(f"  {_quote(src)} -> {_quote(dst)} [label={_quote(lts.label(e))}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def sog_to_dict(sog: Sog) -> dict:
    return {
        "aggregates": [
            {"id": a.id, "states": list(a.states.ids()), "all_secret": a.all_secret}
            for a in sog.aggregates
        ],
        "initial": sog.initial,
        "edges": [{"from": a, "event": e, "to": b} for a, e, b in sog.edges],
    }
