"""Enforcement of simple opacity by padding the model with dummy behavior.

Every all-secret aggregate gets one fresh non-secret state, reached from one
of its members through a fresh unobservable transition. The observer then
can no longer be sure the system sits in a secret state after any word that
leads to that aggregate. Nothing observable is added, so the observable
language is unchanged.

On nets the dummy transition moves one token out of a host place of the
disclosing marking. Open workflow nets keep a single sink: when the only
admissible host is the sink itself, the arc that filled it is rerouted
through a fresh place and the dummy transition delivers the token instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .checker import CounterExample, check_simple
from .errors import EnforcementError, ModelError
from .lts import LabeledTransitionSystem, SecretSpec, Word
from .net import (
    AnyNet,
    Marking,
    OWFNet,
    PetriNet,
    SecretMarking,
    as_petri_net,
    build_reachability_graph,
    find_source_sink,
    incidence_matrix,
)
from .sog import Aggregate, Sog

WeightedArc = tuple[str, str, int]


@dataclass(frozen=True)
class SuperLanguageAdditions:
    """Observations that must gain a non-secret explanation."""

    traces: frozenset[Word] = frozenset()

    def __bool__(self) -> bool:
        return bool(self.traces)

    def sorted(self) -> list[Word]:
        return sorted(self.traces, key=lambda w: (len(w), w))


@dataclass(frozen=True)
class EnforcementPatch:
    new_states: tuple[tuple[str, int], ...] = ()
    new_transitions: tuple[str, ...] = ()
    new_places: tuple[str, ...] = ()
    removed_arcs: tuple[WeightedArc, ...] = ()
    added_arcs: tuple[WeightedArc, ...] = ()
    incidence_updates: tuple[tuple[str, str, int], ...] = ()
    # LTS edges (source, event, target) introduced by the patch
    new_edges: tuple[tuple[str, str, str], ...] = ()

    @property
    def is_identity(self) -> bool:
        return not (
            self.new_states or self.new_transitions or self.new_places
            or self.removed_arcs or self.added_arcs or self.new_edges
        )

    def to_dict(self) -> dict:
        return {
            "new_states": [{"state": s, "aggregate": a} for s, a in self.new_states],
            "new_transitions": list(self.new_transitions),
            "new_places": list(self.new_places),
            "removed_arcs": [{"from": a, "to": b, "weight": w} for a, b, w in self.removed_arcs],
            "added_arcs": [{"from": a, "to": b, "weight": w} for a, b, w in self.added_arcs],
            "incidence_updates": [
                {"place": p, "transition": t, "value": v} for p, t, v in self.incidence_updates
            ],
            "new_edges": [{"from": a, "event": e, "to": b} for a, e, b in self.new_edges],
        }


def _validated(sog: Sog, counterexamples: Iterable[CounterExample]) -> list[CounterExample]:
    out = []
    for c in counterexamples:
        target = sog.walk(c.trace)
        if target is None or target != c.target or not sog.aggregates[target].all_secret:
            shown = " ".join(c.trace) or "ε"
            raise EnforcementError(f"counterexample trace {shown!r} does not reach an all-secret aggregate")
        out.append(c)
    return out


def compute_min_superlanguage(
    lts: LabeledTransitionSystem,
    secret: SecretSpec,
    sog: Sog,
    counterexamples: Sequence[CounterExample],
) -> SuperLanguageAdditions:
    """Observations produced only by runs ending in a secret state.

    The set can be infinite under cycles; it is represented by one witness
    per all-secret aggregate, namely the aggregate's discovery trace.
    """
    secret.check(lts)
    _validated(sog, counterexamples)
    return SuperLanguageAdditions(frozenset(sog.trace_to(a.id) for a in sog.aggregates if a.all_secret))


def _fresh(base: str, taken: set[str], counter: list[int]) -> str:
    while True:
        counter[0] += 1
        name = f"{base}__op{counter[0]}"
        if name not in taken:
            taken.add(name)
            return name


def _untreated(sog: Sog, counterexamples: Sequence[CounterExample]) -> list[CounterExample]:
    seen: set[int] = set()
    out = []
    for c in counterexamples:
        if c.target not in seen:
            seen.add(c.target)
            out.append(c)
    return out


def _host_order(agg: Aggregate, used: set[int]) -> list[int]:
    # highest index first, states not hosting a patch yet before the others
    members = sorted(agg.states, reverse=True)
    return [q for q in members if q not in used] + [q for q in members if q in used]


# ---------------------------------------------------------------- LTS level


def _patch_lts(
    lts: LabeledTransitionSystem,
    sog: Sog,
    targets: list[CounterExample],
) -> tuple[LabeledTransitionSystem, Sog, EnforcementPatch]:
    taken = set(lts.states) | set(lts.alphabet)
    counter = [0]
    used: set[int] = set()
    new_states, new_edges, new_transitions = [], [], []
    extra_members: dict[int, list[int]] = {}
    for c in targets:
        agg = sog.aggregates[c.target]
        q = _host_order(agg, used)[0]
        used.add(q)
        q_id = lts.states[q]
        counter[0] = len(new_transitions)
        t_new = _fresh(c.event or "eps", taken, counter)
        counter[0] = len(new_states)
        q_new = _fresh(q_id, taken, counter)
        new_states.append((q_new, agg.id))
        new_transitions.append(t_new)
        new_edges.append((q_id, t_new, q_new))
        extra_members.setdefault(q, []).append(len(lts.states) + len(new_states) - 1)

    patched = LabeledTransitionSystem(
        states=lts.states + tuple(s for s, _ in new_states),
        initial=lts.initial,
        observable=lts.observable,
        unobservable=lts.unobservable | set(new_transitions),
        edges=lts.edges + tuple(new_edges),
        labels={**lts.labels, **{t: t for t in new_transitions}},
    )
    # The dummy states have no observable successors, so the aggregate
    # structure is unchanged: each aggregate holding a host state simply
    # gains that host's dummy states.
    backend = type(sog.aggregates[0].states)
    aggregates = []
    for agg in sog.aggregates:
        members = list(agg.states)
        for q in agg.states:
            members.extend(extra_members.get(q, ()))
        states = backend(patched, members)
        all_secret = agg.all_secret and not any(q in extra_members for q in agg.states)
        aggregates.append(Aggregate(agg.id, states, agg.contains_secret, all_secret))
    new_sog = Sog(patched, tuple(aggregates), sog.edges, sog.parents, sog.initial)
    patch = EnforcementPatch(
        new_states=tuple(new_states),
        new_transitions=tuple(new_transitions),
        new_edges=tuple(new_edges),
    )
    return patched, new_sog, patch


# ---------------------------------------------------------------- net level


@dataclass
class _NetEdit:
    net: AnyNet
    places: list[str]
    transitions: list[str]
    weights: dict[tuple[str, str], int]
    labels: dict[str, str]
    taken: set[str]
    new_places: list[str] = field(default_factory=list)
    new_transitions: list[str] = field(default_factory=list)
    removed: list[WeightedArc] = field(default_factory=list)
    added: list[WeightedArc] = field(default_factory=list)

    @classmethod
    def of(cls, net: AnyNet) -> _NetEdit:
        pn = as_petri_net(net)
        return cls(
            net, list(pn.places), list(pn.transitions), dict(pn.weights), dict(pn.labels),
            set(pn.places) | set(pn.transitions),
        )

    def add_arc(self, src: str, dst: str, w: int) -> None:
        self.weights[(src, dst)] = w
        self.added.append((src, dst, w))

    def remove_arc(self, src: str, dst: str) -> None:
        w = self.weights.pop((src, dst))
        self.removed.append((src, dst, w))

    def new_place(self, base: str) -> str:
        p = _fresh(base, self.taken, [len(self.new_places)])
        self.places.append(p)
        self.new_places.append(p)
        return p

    def new_transition(self, base: str) -> str:
        t = _fresh(base, self.taken, [len(self.new_transitions)])
        self.transitions.append(t)
        self.new_transitions.append(t)
        self.labels[t] = t
        return t

    def build(self) -> AnyNet:
        pn = as_petri_net(self.net)
        core = PetriNet(
            places=self.places,
            transitions=self.transitions,
            weights=self.weights,
            initial_marking=pn.initial_marking,
            observable=pn.observable,
            labels=self.labels,
        )
        if isinstance(self.net, OWFNet):
            return OWFNet(core, self.net.inputs, self.net.outputs, self.net.final_marking)
        return core


def _owf_sink(net: OWFNet) -> str:
    _, sinks = find_source_sink(net)
    if len(sinks) != 1:
        raise EnforcementError(
            f"open workflow net has no unique sink place (found {', '.join(sinks) or 'none'})"
        )
    return sinks[0]


def _is_secret(m: Marking, secrets: Sequence[SecretMarking]) -> bool:
    return any(s.matches(m) for s in secrets)


def _moved(m: Marking, src: str, dst: str, w: int = 1) -> Marking:
    counts = m.as_dict()
    counts[src] -= w
    counts[dst] = counts.get(dst, 0) + w
    return Marking(counts)


def get_place(
    net: AnyNet, m: Marking, secrets: Sequence[SecretMarking] = ()
) -> str | None:
    """Host place for a dummy transition at marking ``m``.

    The most heavily marked place wins, ties going to the smaller id.
    Interface places are never chosen, nor is the sink of an open workflow
    net. Candidates whose patched marking would itself be secret are
    skipped. Returns None when no place qualifies.
    """
    pn = as_petri_net(net)
    excluded: set[str] = set()
    sink = None
    if isinstance(net, OWFNet):
        excluded |= net.interface
        sink = _owf_sink(net)
        excluded.add(sink)
    candidates = sorted((p for p, c in m.items() if p not in excluded), key=lambda p: (-m[p], p))
    for p in candidates:
        # the token either leaves for a fresh place (which no secret can
        # mention) or, on open workflow nets, goes straight to the sink
        after = _moved(m, p, sink) if sink is not None else _moved(m, p, "\0fresh")
        if not _is_secret(after, secrets):
            return p
    return None


def _marking_producer(
    lts: LabeledTransitionSystem, q: int, place: str, net: PetriNet, preferred: str | None
) -> str | None:
    """A transition that put a token in ``place`` on some edge into ``q``."""
    into = sorted({ev for src, ev, dst in lts.edges if lts.index[dst] == q and net.weight(ev, place) > 0})
    if preferred in into:
        return preferred
    return into[0] if into else None


def owf_final_place_repair(
    edit: _NetEdit,
    t: str,
    t_new: str,
    sink: str,
) -> str:
    """Reroute ``t -> sink`` through a fresh place consumed by ``t_new``.

    Afterwards ``t`` fills the fresh place and ``t_new`` moves the token on
    to the sink, so the net keeps a single sink and ``t_new`` lies on every
    completion through ``t``. Returns the fresh place.
    """
    if (t, sink) not in edit.weights:
        raise EnforcementError(f"transition {t!r} has no arc into the sink {sink!r}")
    w = edit.weights[(t, sink)]
    edit.remove_arc(t, sink)
    p_new = edit.new_place(sink)
    edit.add_arc(t, p_new, w)
    edit.add_arc(p_new, t_new, w)
    edit.add_arc(t_new, sink, w)
    return p_new


def _patch_net(
    net: AnyNet,
    lts: LabeledTransitionSystem,
    sog: Sog,
    targets: list[CounterExample],
    secrets: Sequence[SecretMarking],
) -> tuple[AnyNet, EnforcementPatch, list[tuple[int, str, Marking, Marking]]]:
    if lts.markings is None:
        raise EnforcementError("the LTS carries no markings; it is not the reachability graph of the net")
    pn = as_petri_net(net)
    edit = _NetEdit.of(net)
    sink = _owf_sink(net) if isinstance(net, OWFNet) else None
    used: set[int] = set()
    hosts = []
    for c in targets:
        agg = sog.aggregates[c.target]
        plan = None
        for q in _host_order(agg, used):
            m = lts.markings[q]
            p = get_place(net, m, secrets)
            if p is not None:
                plan = (q, p, None)
                break
            if sink is not None and m[sink] > 0:
                t = _marking_producer(lts, q, sink, pn, c.event)
                if t is not None and not _is_secret(_moved(m, sink, "\0fresh", pn.weight(t, sink)), secrets):
                    plan = (q, sink, t)
                    break
        if plan is None:
            shown = " ".join(c.trace) or "ε"
            raise EnforcementError(f"no admissible host place for the aggregate reached by {shown!r}")
        q, p, producer = plan
        used.add(q)
        m = lts.markings[q]
        t_new = edit.new_transition(c.event or "eps")
        if producer is not None:
            if (producer, sink) in edit.weights:
                p_mid = owf_final_place_repair(edit, producer, t_new, sink)
            else:
                # an earlier repair already rerouted this producer; hang the
                # new transition on the same intermediate place
                p_mid = next(a[1] for a in edit.added if a[0] == producer and a[1] in edit.new_places)
                edit.add_arc(p_mid, t_new, edit.weights[(producer, p_mid)])
                edit.add_arc(t_new, sink, edit.weights[(producer, p_mid)])
            # the fresh state is the one just before t_new delivers the token
            w = edit.weights[(producer, p_mid)]
            hosts.append((c.target, t_new, _moved(m, sink, p_mid, w), m))
            continue
        if sink is not None:
            edit.add_arc(p, t_new, 1)
            edit.add_arc(t_new, sink, 1)
            after = _moved(m, p, sink)
        else:
            p_new = edit.new_place(p)
            edit.add_arc(p, t_new, 1)
            edit.add_arc(t_new, p_new, 1)
            after = _moved(m, p, p_new)
        hosts.append((c.target, t_new, m, after))

    patched = edit.build()
    before = incidence_matrix(net)
    after = incidence_matrix(patched)
    keys = sorted(set(before.entries) | set(after.entries))
    updates = tuple((p, t, after[p, t]) for p, t in keys if before[p, t] != after[p, t])
    patch = EnforcementPatch(
        new_transitions=tuple(edit.new_transitions),
        new_places=tuple(edit.new_places),
        removed_arcs=tuple(edit.removed),
        added_arcs=tuple(edit.added),
        incidence_updates=updates,
    )
    return patched, patch, hosts


def _keep_names(
    original: LabeledTransitionSystem, rebuilt: LabeledTransitionSystem, secret: SecretSpec
) -> tuple[LabeledTransitionSystem, SecretSpec]:
    """Rename ``rebuilt`` so markings already present in ``original`` keep
    their state ids; new markings are numbered after the old ones."""
    old = {m: s for s, m in zip(original.states, original.markings)}
    taken = set(original.states)
    rename: dict[str, str] = {}
    n = len(original.states)
    for s, m in zip(rebuilt.states, rebuilt.markings):
        if m in old:
            rename[s] = old[m]
        else:
            while f"S{n}" in taken:
                n += 1
            rename[s] = f"S{n}"
            taken.add(rename[s])
            n += 1
    lts = LabeledTransitionSystem(
        states=[rename[s] for s in rebuilt.states],
        initial=rename[rebuilt.initial],
        observable=rebuilt.observable,
        unobservable=rebuilt.unobservable,
        edges=[(rename[a], e, rename[b]) for a, e, b in rebuilt.edges],
        labels=rebuilt.labels,
        markings=rebuilt.markings,
    )
    return lts, SecretSpec(frozenset(rename[s] for s in secret.states))


def opacify(
    net: AnyNet | None,
    lts: LabeledTransitionSystem,
    sog: Sog,
    counterexamples: Sequence[CounterExample],
    *,
    secret_markings: Iterable[Marking | SecretMarking] = (),
) -> tuple[AnyNet | None, LabeledTransitionSystem, Sog, EnforcementPatch]:
    """Patch the model so that no aggregate is all secret.

    ``counterexamples`` must come from :func:`check_simple` on ``lts``. With
    ``net=None`` only the LTS and SOG are patched. With a net, the net is
    patched, its reachability graph rebuilt (markings already known keep
    their state ids) and re-verified; :class:`EnforcementError` is raised if
    the result is still not opaque. An empty counterexample list gives the
    identity patch and returns the inputs unchanged.
    """
    checked = _validated(sog, counterexamples)
    targets = _untreated(sog, checked)
    if not targets:
        return net, lts, sog, EnforcementPatch()

    if net is None:
        patched_lts, patched_sog, patch = _patch_lts(lts, sog, targets)
        return None, patched_lts, patched_sog, patch

    secrets = list(secret_markings)
    patched_net, patch, hosts = _patch_net(net, lts, sog, targets, _as_secret_markings(secrets))
    try:
        rebuilt, rebuilt_secret = build_reachability_graph(patched_net, secrets)
    except ModelError as exc:
        raise EnforcementError(f"patched net could not be explored: {exc}") from exc
    patched_lts, patched_secret = _keep_names(lts, rebuilt, rebuilt_secret)
    verdict, patched_sog = check_simple(patched_lts, patched_secret)
    if not verdict.opaque:
        left = ", ".join(" ".join(t) or "ε" for t in verdict.traces())
        raise EnforcementError(f"patched net still discloses the secret after: {left}")

    # Report the dummy step taken at the disclosing marking. On the plain
    # path the fresh state is its target; after a sink repair it is the
    # intermediate marking the step leaves from.
    by_marking = dict(zip(patched_lts.markings, patched_lts.states))
    new_states, new_edges = [], []
    for host_agg, t_new, src, dst in hosts:
        a, b = by_marking[src], by_marking[dst]
        fresh = b if a in lts.index else a
        new_states.append((fresh, host_agg))
        new_edges.append((a, t_new, b))
    patch = EnforcementPatch(
        new_states=tuple(new_states),
        new_transitions=patch.new_transitions,
        new_places=patch.new_places,
        removed_arcs=patch.removed_arcs,
        added_arcs=patch.added_arcs,
        incidence_updates=patch.incidence_updates,
        new_edges=tuple(new_edges),
    )
    return patched_net, patched_lts, patched_sog, patch


def _as_secret_markings(secrets: Iterable[Marking | SecretMarking]) -> list[SecretMarking]:
    return [SecretMarking(s.as_dict()) if isinstance(s, Marking) else s for s in secrets]


def revert_patch(model, patch: EnforcementPatch):
    """Undo ``patch`` on a patched net, or on an LTS patched without a net."""
    if isinstance(model, LabeledTransitionSystem):
        gone = {s for s, _ in patch.new_states}
        edges = [e for e in model.edges if e not in set(patch.new_edges)]
        return LabeledTransitionSystem(
            states=[s for s in model.states if s not in gone],
            initial=model.initial,
            observable=model.observable,
            unobservable=model.unobservable - set(patch.new_transitions),
            edges=edges,
            labels={k: v for k, v in model.labels.items() if k not in set(patch.new_transitions)},
        )
    pn = as_petri_net(model)
    weights = dict(pn.weights)
    for src, dst, _ in patch.added_arcs:
        weights.pop((src, dst), None)
    for src, dst, w in patch.removed_arcs:
        weights[(src, dst)] = w
    core = PetriNet(
        places=[p for p in pn.places if p not in set(patch.new_places)],
        transitions=[t for t in pn.transitions if t not in set(patch.new_transitions)],
        weights=weights,
        initial_marking=pn.initial_marking,
        observable=pn.observable,
        labels={k: v for k, v in pn.labels.items() if k not in set(patch.new_transitions)},
    )
    if isinstance(model, OWFNet):
        return OWFNet(core, model.inputs, model.outputs, model.final_marking)
    return core
