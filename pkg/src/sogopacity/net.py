"""Petri nets, open workflow nets and their reachability graphs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union

from .errors import ModelError, PreconditionError, UnboundedNetError

Arc = tuple[str, str]

DEFAULT_MAX_STATES = 100_000
DEFAULT_MAX_TOKENS = 255


class Marking:
    """Sparse, immutable token assignment. Absent places hold zero tokens."""

    __slots__ = ("_items", "_dict", "_hash")

    def __init__(self, tokens: Mapping[str, int] | Iterable[tuple[str, int]] | None = None):
        pairs = dict(tokens or {})
        items = []
        for place, count in pairs.items():
            count = int(count)
            if count < 0:
                raise ModelError(f"negative token count {count} for place {place!r}")
            if count:
                items.append((place, count))
        self._items = tuple(sorted(items))
        self._dict = dict(self._items)
        self._hash = hash(self._items)

    def __getitem__(self, place: str) -> int:
        return self._dict.get(place, 0)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self._dict)

    def items(self) -> tuple[tuple[str, int], ...]:
        return self._items

    def as_dict(self) -> dict[str, int]:
        return dict(self._dict)

    def __iter__(self) -> Iterator[str]:
        return (p for p, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Marking):
            return NotImplemented
        return self._items == other._items

    def __lt__(self, other: Marking) -> bool:
        return self._items < other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{p}:{c}" for p, c in self._items)
        return f"Marking({{{inner}}})"


@dataclass(frozen=True)
class SecretMarking:
    """A secret given either as an exact marking or as place-count constraints.

    With ``exact=False`` a marking matches when every constrained place holds
    exactly the stated count (zero included); unconstrained places are free.
    """

    constraints: Mapping[str, int] = field(hash=False)
    exact: bool = True
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", dict(self.constraints))
        for place, count in self.constraints.items():
            if int(count) < 0:
                raise ModelError(f"secret {self.name or ''}: negative count for place {place!r}")

    @property
    def places(self) -> frozenset[str]:
        return frozenset(self.constraints)

    def matches(self, m: Marking) -> bool:
        if self.exact:
            return m == Marking(self.constraints)
        return all(m[p] == c for p, c in self.constraints.items())


@dataclass(frozen=True)
class PetriNet:
    """Place/transition net with weighted arcs.

    ``observable`` and ``labels`` are observer metadata: which transitions the
    observer sees, and a display label per transition (defaults to its id).
    """

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    weights: Mapping[Arc, int] = field(hash=False)
    initial_marking: Marking
    observable: frozenset[str] = frozenset()
    labels: Mapping[str, str] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "places", tuple(self.places))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        object.__setattr__(self, "weights", dict(self.weights))
        object.__setattr__(self, "observable", frozenset(self.observable))
        object.__setattr__(self, "labels", dict(self.labels))
        if not isinstance(self.initial_marking, Marking):
            object.__setattr__(self, "initial_marking", Marking(self.initial_marking))
        self._validate()

    def _validate(self) -> None:
        places, transitions = set(self.places), set(self.transitions)
        if len(places) != len(self.places):
            raise ModelError("duplicate place id")
        if len(transitions) != len(self.transitions):
            raise ModelError("duplicate transition id")
        clash = places & transitions
        if clash:
            raise ModelError(f"ids used both as place and transition: {sorted(clash)}")
        for (src, dst), w in self.weights.items():
            if src in places and dst in transitions or src in transitions and dst in places:
                pass
            elif src not in places | transitions:
                raise ModelError(f"arc ({src}, {dst}): unknown node {src!r}")
            elif dst not in places | transitions:
                raise ModelError(f"arc ({src}, {dst}): unknown node {dst!r}")
            else:
                raise ModelError(f"arc ({src}, {dst}) must connect a place and a transition")
            if not isinstance(w, int) or w < 1:
                raise ModelError(f"arc ({src}, {dst}) has weight {w!r}; weights must be >= 1")
        unknown = self.initial_marking.support - places
        if unknown:
            raise ModelError(f"initial marking names unknown places {sorted(unknown)}")
        unknown = self.observable - transitions
        if unknown:
            raise ModelError(f"observable set names unknown transitions {sorted(unknown)}")

    @property
    def flow(self) -> frozenset[Arc]:
        return frozenset(self.weights)

    @cached_property
    def _pre(self) -> dict[str, tuple[tuple[str, int], ...]]:
        pre: dict[str, list] = {t: [] for t in self.transitions}
        for (src, dst), w in self.weights.items():
            if dst in pre:
                pre[dst].append((src, w))
        return {t: tuple(sorted(v)) for t, v in pre.items()}

    @cached_property
    def _post(self) -> dict[str, tuple[tuple[str, int], ...]]:
        post: dict[str, list] = {t: [] for t in self.transitions}
        for (src, dst), w in self.weights.items():
            if src in post:
                post[src].append((dst, w))
        return {t: tuple(sorted(v)) for t, v in post.items()}

    def preset(self, t: str) -> tuple[tuple[str, int], ...]:
        return self._pre[t]

    def postset(self, t: str) -> tuple[tuple[str, int], ...]:
        return self._post[t]

    def label(self, t: str) -> str:
        return self.labels.get(t, t)

    def weight(self, src: str, dst: str) -> int:
        return self.weights.get((src, dst), 0)


@dataclass(frozen=True)
class OWFNet:
    """Open workflow net: a Petri net plus interface places and a final marking."""

    core: PetriNet
    inputs: frozenset[str] = frozenset()
    outputs: frozenset[str] = frozenset()
    final_marking: Marking | None = None

    def __post_init__(self):
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        if self.final_marking is not None and not isinstance(self.final_marking, Marking):
            object.__setattr__(self, "final_marking", Marking(self.final_marking))
        places = set(self.core.places)
        unknown = (self.inputs | self.outputs) - places
        if unknown:
            raise ModelError(f"interface names unknown places {sorted(unknown)}")
        both = self.inputs & self.outputs
        if both:
            raise ModelError(f"places both input and output: {sorted(both)}")
        if self.final_marking is not None:
            unknown = self.final_marking.support - places
            if unknown:
                raise ModelError(f"final marking names unknown places {sorted(unknown)}")

    @property
    def interface(self) -> frozenset[str]:
        return self.inputs | self.outputs

    @property
    def inner_places(self) -> tuple[str, ...]:
        return tuple(p for p in self.core.places if p not in self.interface)


AnyNet = Union[PetriNet, OWFNet]


def as_petri_net(net: AnyNet) -> PetriNet:
    return net.core if isinstance(net, OWFNet) else net


def _check_marking(net: PetriNet, m: Marking) -> None:
    unknown = m.support - set(net.places)
    if unknown:
        raise ModelError(f"marking names unknown places {sorted(unknown)}")


def enabled(net: AnyNet, m: Marking) -> frozenset[str]:
    """Transitions whose every input place holds at least the arc weight."""
    net = as_petri_net(net)
    _check_marking(net, m)
    return frozenset(
        t for t in net.transitions if all(m[p] >= w for p, w in net.preset(t))
    )


def fire(net: AnyNet, m: Marking, t: str) -> Marking:
    net = as_petri_net(net)
    if t not in net._pre:
        raise ModelError(f"unknown transition {t!r}")
    _check_marking(net, m)
    counts = m.as_dict()
    for p, w in net.preset(t):
        if counts.get(p, 0) < w:
            raise PreconditionError(f"transition {t!r} is not enabled at {m!r}")
        counts[p] -= w
    for p, w in net.postset(t):
        counts[p] = counts.get(p, 0) + w
    return Marking(counts)


@dataclass(frozen=True)
class IncidenceMatrix:
    """Net token effect per (place, transition); absent pairs are zero."""

    entries: Mapping[tuple[str, str], int]

    def __getitem__(self, key: tuple[str, str]) -> int:
        return self.entries.get(key, 0)

    def effect(self, counts: Mapping[str, int]) -> dict[str, int]:
        """Token change produced by firing each transition ``counts[t]`` times."""
        delta: dict[str, int] = {}
        for (p, t), c in self.entries.items():
            n = counts.get(t, 0)
            if n and c:
                delta[p] = delta.get(p, 0) + c * n
        return delta


def incidence_matrix(net: AnyNet) -> IncidenceMatrix:
    net = as_petri_net(net)
    entries: dict[tuple[str, str], int] = {}
    for (src, dst), w in net.weights.items():
        if src in net._pre:  # transition -> place
            key = (dst, src)
            entries[key] = entries.get(key, 0) + w
        else:
            key = (src, dst)
            entries[key] = entries.get(key, 0) - w
    return IncidenceMatrix(dict(sorted(entries.items())))


def _normalize_secrets(
    net: PetriNet, secret_markings: Iterable[Marking | SecretMarking]
) -> list[SecretMarking]:
    out = []
    for s in secret_markings:
        if isinstance(s, Marking):
            s = SecretMarking(s.as_dict(), exact=True)
        unknown = s.places - set(net.places)
        if unknown:
            label = f"secret {s.name!r}" if s.name else "secret marking"
            raise ModelError(f"{label} names unknown places {sorted(unknown)}")
        out.append(s)
    return out


def build_reachability_graph(
    net: AnyNet,
    secret_markings: Iterable[Marking | SecretMarking] = (),
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_tokens: int = DEFAULT_MAX_TOKENS,
):
    """Explore reachable markings breadth first and return ``(lts, secret)``.

    States are named ``S0, S1, ...`` in discovery order; transitions are
    tried in lexicographic id order, so the numbering is reproducible.
    """
    from .lts import LabeledTransitionSystem, SecretSpec

    pn = as_petri_net(net)
    secrets = _normalize_secrets(pn, secret_markings)
    order = sorted(pn.transitions)

    m0 = pn.initial_marking
    index = {m0: 0}
    markings = [m0]
    edges = []
    queue = deque([m0])
    while queue:
        m = queue.popleft()
        src = index[m]
        for t in order:
            if not all(m[p] >= w for p, w in pn.preset(t)):
                continue
            m2 = fire(pn, m, t)
            if m2 not in index:
                for p, c in m2.items():
                    if c > max_tokens:
                        raise UnboundedNetError(
                            f"place {p!r} exceeds the token ceiling of {max_tokens}; "
                            "the net is possibly unbounded"
                        )
                if len(markings) >= max_states:
                    raise UnboundedNetError(
                        f"more than {max_states} reachable markings; the net is possibly unbounded"
                    )
                index[m2] = len(markings)
                markings.append(m2)
                queue.append(m2)
            edges.append((src, t, index[m2]))

    names = [f"S{i}" for i in range(len(markings))]
    lts = LabeledTransitionSystem(
        states=names,
        initial=names[0],
        observable=pn.observable,
        unobservable=frozenset(pn.transitions) - pn.observable,
        edges=[(names[a], t, names[b]) for a, t, b in edges],
        labels={t: pn.label(t) for t in pn.transitions},
        markings=markings,
    )
    secret = SecretSpec(
        frozenset(names[i] for i, m in enumerate(markings) if any(s.matches(m) for s in secrets))
    )
    return lts, secret


@dataclass(frozen=True)
class Diagnostic:
    code: str
    element: str | None
    message: str

    def __str__(self) -> str:
        return self.message


def _inner_graph(net: AnyNet) -> tuple[list[str], dict[str, set[str]], dict[str, set[str]]]:
    pn = as_petri_net(net)
    interface = net.interface if isinstance(net, OWFNet) else frozenset()
    nodes = [p for p in pn.places if p not in interface] + list(pn.transitions)
    succ: dict[str, set[str]] = {n: set() for n in nodes}
    pred: dict[str, set[str]] = {n: set() for n in nodes}
    for src, dst in pn.weights:
        if src in interface or dst in interface:
            continue
        succ[src].add(dst)
        pred[dst].add(src)
    return nodes, succ, pred


def _closure(start: str, step: dict[str, set[str]]) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        for n in step[stack.pop()]:
            if n not in seen:
                seen.add(n)
                stack.append(n)
    return seen


def find_source_sink(net: AnyNet) -> tuple[list[str], list[str]]:
    """Non-interface places without incoming / outgoing inner arcs."""
    pn = as_petri_net(net)
    nodes, succ, pred = _inner_graph(net)
    places = [n for n in nodes if n in set(pn.places)]
    sources = sorted(p for p in places if not pred[p])
    sinks = sorted(p for p in places if not succ[p])
    return sources, sinks


def validate_wf_structure(net: AnyNet) -> list[Diagnostic]:
    """Check the workflow-net shape, ignoring interface places.

    Returns one diagnostic per violation; an empty list means the net has a
    single source place, a single sink place, and every node on a path between.
    """
    nodes, succ, pred = _inner_graph(net)
    sources, sinks = find_source_sink(net)
    diags: list[Diagnostic] = []
    if not sources:
        diags.append(Diagnostic("no-source", None, "no source place (every place has an incoming arc)"))
    elif len(sources) > 1:
        diags.append(
            Diagnostic("multiple-sources", ",".join(sources), f"multiple source places: {', '.join(sources)}")
        )
    if not sinks:
        diags.append(Diagnostic("no-sink", None, "no sink place (every place has an outgoing arc)"))
    elif len(sinks) > 1:
        diags.append(Diagnostic("multiple-sinks", ",".join(sinks), f"multiple sink places: {', '.join(sinks)}"))
    if len(sources) == 1 and len(sinks) == 1:
        forward = _closure(sources[0], succ)
        backward = _closure(sinks[0], pred)
        for n in nodes:
            if n not in forward or n not in backward:
                diags.append(
                    Diagnostic("off-path", n, f"node {n!r} is not on a path from {sources[0]!r} to {sinks[0]!r}")
                )
    else:
        # Without a unique source/sink pair the path condition is undefined;
        # still name nodes that are disconnected from everything.
        for n in nodes:
            if not succ[n] and not pred[n]:
                diags.append(Diagnostic("isolated", n, f"node {n!r} is isolated"))
    return diags
