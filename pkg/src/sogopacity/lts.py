"""Labeled transition systems with a partitioned alphabet."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ModelError

Word = tuple[str, ...]
Edge = tuple[str, str, str]


@dataclass(frozen=True)
class LabeledTransitionSystem:
    """States, initial state, observable/unobservable events and a (possibly
    nondeterministic) transition relation.

    State order is meaningful: it fixes the integer index each state gets in
    the state-set layer, and therefore every tie-break downstream.
    ``markings`` is set when the LTS is the reachability graph of a net.
    """

    states: tuple[str, ...]
    initial: str
    observable: frozenset[str]
    unobservable: frozenset[str]
    edges: tuple[Edge, ...]
    labels: Mapping[str, str] = field(default_factory=dict, hash=False)
    markings: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "observable", frozenset(self.observable))
        object.__setattr__(self, "unobservable", frozenset(self.unobservable))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "labels", dict(self.labels))
        if self.markings is not None:
            object.__setattr__(self, "markings", tuple(self.markings))
        self._validate()

    def _validate(self) -> None:
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate state id in LTS")
        if self.initial not in self.index:
            raise ModelError(f"initial state {self.initial!r} is not a state")
        both = self.observable & self.unobservable
        if both:
            raise ModelError(f"events both observable and unobservable: {sorted(both)}")
        for src, ev, dst in self.edges:
            if src not in self.index:
                raise ModelError(f"edge ({src}, {ev}, {dst}): unknown state {src!r}")
            if dst not in self.index:
                raise ModelError(f"edge ({src}, {ev}, {dst}): unknown state {dst!r}")
            if ev not in self.alphabet:
                raise ModelError(f"edge ({src}, {ev}, {dst}): unknown event {ev!r}")
        if self.markings is not None and len(self.markings) != len(self.states):
            raise ModelError("markings must align with states")

    @property
    def alphabet(self) -> frozenset[str]:
        return self.observable | self.unobservable

    @cached_property
    def index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @property
    def initial_index(self) -> int:
        return self.index[self.initial]

    def label(self, event: str) -> str:
        return self.labels.get(event, event)

    @cached_property
    def _adjacency(self):
        n = len(self.states)
        unobs: list[set[int]] = [set() for _ in range(n)]
        unobs_pred: list[set[int]] = [set() for _ in range(n)]
        obs: list[dict[str, set[int]]] = [{} for _ in range(n)]
        out: list[list[tuple[str, int]]] = [[] for _ in range(n)]
        for src, ev, dst in self.edges:
            i, j = self.index[src], self.index[dst]
            out[i].append((ev, j))
            if ev in self.observable:
                obs[i].setdefault(ev, set()).add(j)
            else:
                unobs[i].add(j)
                unobs_pred[j].add(i)
        return (
            tuple(tuple(sorted(s)) for s in unobs),
            tuple(tuple(sorted(s)) for s in unobs_pred),
            tuple({e: tuple(sorted(t)) for e, t in sorted(d.items())} for d in obs),
            tuple(tuple(sorted(set(o))) for o in out),
        )

    @property
    def unobservable_successors(self) -> tuple[tuple[int, ...], ...]:
        return self._adjacency[0]

    @property
    def unobservable_predecessors(self) -> tuple[tuple[int, ...], ...]:
        return self._adjacency[1]

    @property
    def observable_successors(self) -> tuple[dict[str, tuple[int, ...]], ...]:
        return self._adjacency[2]

    @property
    def successors(self) -> tuple[tuple[tuple[str, int], ...], ...]:
        """Outgoing ``(event, target index)`` pairs per state, sorted."""
        return self._adjacency[3]


@dataclass(frozen=True)
class SecretSpec:
    """Set of secret state ids."""

    states: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))

    def check(self, lts: LabeledTransitionSystem) -> None:
        unknown = self.states - set(lts.states)
        if unknown:
            raise ModelError(f"secret states not in the LTS: {sorted(unknown)}")

    def indices(self, lts: LabeledTransitionSystem) -> frozenset[int]:
        self.check(lts)
        return frozenset(lts.index[s] for s in self.states)


def project(w: Sequence[str], observables: Iterable[str]) -> Word:
    """Erase every event of ``w`` that is not in ``observables``."""
    keep = observables if isinstance(observables, (set, frozenset)) else set(observables)
    return tuple(e for e in w if e in keep)


def enumerate_runs(lts: LabeledTransitionSystem, max_len: int) -> Iterator[tuple[Word, str]]:
    """Yield every run of length <= ``max_len`` as ``(word, end state)``.

    Runs come out by length, then by word, then by end-state order. A word
    reaching several states (nondeterminism) is yielded once per end state.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    level: list[tuple[Word, int]] = [((), lts.initial_index)]
    for depth in range(max_len + 1):
        for w, q in level:
            yield w, lts.states[q]
        if depth == max_len:
            break
        level = sorted({(w + (ev,), j) for w, q in level for ev, j in lts.successors[q]})


def observationally_equivalent_runs(lts: LabeledTransitionSystem, w_obs: Sequence[str]):
    """End states of all runs whose observable projection is ``w_obs``."""
    from .stateset import ExplicitStateSet, img, saturate

    for e in w_obs:
        if e not in lts.observable:
            raise ModelError(f"{e!r} is not an observable event")
    current = saturate(lts, ExplicitStateSet(lts, [lts.initial_index]))
    for e in w_obs:
        if current.is_empty():
            break
        current = saturate(lts, img(lts, current, e))
    return current
