"""JSON model files: Petri nets / open workflow nets and plain LTSs.

A file holding ``places`` is a net; one holding ``states`` is an LTS. Every
error names the file and the JSON path of the offending value, and unknown
fields are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ModelError
from .lts import LabeledTransitionSystem, SecretSpec
from .net import AnyNet, Marking, OWFNet, PetriNet, SecretMarking, as_petri_net, build_reachability_graph

NET_FIELDS = {
    "name", "description", "places", "transitions", "arcs",
    "initial_marking", "final_marking", "interface", "secrets",
}
LTS_FIELDS = {"name", "description", "states", "initial", "events", "edges", "secret_states"}


@dataclass(frozen=True)
class Model:
    """A parsed model file. Exactly one of ``net`` / ``lts`` is set."""

    net: AnyNet | None = None
    secrets: tuple[SecretMarking, ...] = ()
    lts: LabeledTransitionSystem | None = None
    secret: SecretSpec = SecretSpec()
    name: str | None = None
    description: str | None = None
    source: str | None = field(default=None, compare=False)

    @property
    def is_net(self) -> bool:
        return self.net is not None

    def semantics(self) -> tuple[LabeledTransitionSystem, SecretSpec]:
        """The LTS to verify and its secret states."""
        if self.net is not None:
            return build_reachability_graph(self.net, self.secrets)
        return self.lts, self.secret


class _Reader:
    def __init__(self, source: str):
        self.source = source

    def fail(self, path: str, message: str):
        raise ModelError(f"{self.source}: {path}: {message}")

    def obj(self, value: Any, path: str, allowed: set[str], required: tuple[str, ...] = ()) -> dict:
        if not isinstance(value, dict):
            self.fail(path, "expected an object")
        for key in sorted(value):
            if key not in allowed:
                self.fail(f"{path}.{key}", "unknown field")
        for key in required:
            if key not in value:
                self.fail(f"{path}.{key}", "missing required field")
        return value

    def lst(self, value: Any, path: str) -> list:
        if not isinstance(value, list):
            self.fail(path, "expected an array")
        return value

    def string(self, value: Any, path: str) -> str:
        if not isinstance(value, str) or not value:
            self.fail(path, "expected a non-empty string")
        return value

    def boolean(self, value: Any, path: str) -> bool:
        if not isinstance(value, bool):
            self.fail(path, "expected true or false")
        return value

    def count(self, value: Any, path: str, minimum: int = 0) -> int:
        if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
            self.fail(path, f"expected an integer >= {minimum}")
        return value

    def marking(self, value: Any, path: str, places: set[str]) -> dict[str, int]:
        if not isinstance(value, dict):
            self.fail(path, "expected an object mapping places to token counts")
        out = {}
        for place, c in value.items():
            if place not in places:
                self.fail(f"{path}.{place}", "unknown place")
            out[place] = self.count(c, f"{path}.{place}")
        return out

    def names(self, value: Any, path: str, known: set[str] | None = None, what: str = "id") -> list[str]:
        out = []
        for i, item in enumerate(self.lst(value, path)):
            s = self.string(item, f"{path}[{i}]")
            if known is not None and s not in known:
                self.fail(f"{path}[{i}]", f"unknown {what} {s!r}")
            out.append(s)
        if len(set(out)) != len(out):
            self.fail(path, "duplicate entries")
        return out


def _parse_net(r: _Reader, doc: dict) -> Model:
    r.obj(doc, "$", NET_FIELDS, ("places", "transitions", "arcs", "initial_marking"))
    places = r.names(doc["places"], "$.places")
    place_set = set(places)
    transitions, observable, labels = [], set(), {}
    for i, t in enumerate(r.lst(doc["transitions"], "$.transitions")):
        path = f"$.transitions[{i}]"
        r.obj(t, path, {"id", "label", "observable"}, ("id", "observable"))
        tid = r.string(t["id"], f"{path}.id")
        if tid in transitions:
            r.fail(f"{path}.id", f"duplicate transition id {tid!r}")
        transitions.append(tid)
        if r.boolean(t["observable"], f"{path}.observable"):
            observable.add(tid)
        if "label" in t:
            labels[tid] = r.string(t["label"], f"{path}.label")
    nodes = place_set | set(transitions)
    weights: dict[tuple[str, str], int] = {}
    for i, a in enumerate(r.lst(doc["arcs"], "$.arcs")):
        path = f"$.arcs[{i}]"
        r.obj(a, path, {"from", "to", "weight"}, ("from", "to"))
        src = r.string(a["from"], f"{path}.from")
        dst = r.string(a["to"], f"{path}.to")
        for key, node in (("from", src), ("to", dst)):
            if node not in nodes:
                r.fail(f"{path}.{key}", f"unknown node {node!r}")
        if (src in place_set) == (dst in place_set):
            r.fail(path, f"arc ({src}, {dst}) must connect a place and a transition")
        if (src, dst) in weights:
            r.fail(path, f"duplicate arc ({src}, {dst})")
        weights[(src, dst)] = r.count(a.get("weight", 1), f"{path}.weight", 1)
    m0 = r.marking(doc["initial_marking"], "$.initial_marking", place_set)
    try:
        core = PetriNet(places, transitions, weights, Marking(m0), frozenset(observable), labels)
    except ModelError as exc:
        r.fail("$", str(exc))

    net: AnyNet = core
    if "interface" in doc or "final_marking" in doc:
        inputs: list[str] = []
        outputs: list[str] = []
        if "interface" in doc:
            iface = r.obj(doc["interface"], "$.interface", {"inputs", "outputs"})
            inputs = r.names(iface.get("inputs", []), "$.interface.inputs", place_set, "place")
            outputs = r.names(iface.get("outputs", []), "$.interface.outputs", place_set, "place")
            both = set(inputs) & set(outputs)
            if both:
                r.fail("$.interface", f"places both input and output: {sorted(both)}")
        final = None
        if "final_marking" in doc:
            final = Marking(r.marking(doc["final_marking"], "$.final_marking", place_set))
        net = OWFNet(core, frozenset(inputs), frozenset(outputs), final)

    secrets = []
    for i, s in enumerate(r.lst(doc.get("secrets", []), "$.secrets")):
        path = f"$.secrets[{i}]"
        r.obj(s, path, {"marking", "exact", "name"}, ("marking",))
        constraints = r.marking(s["marking"], f"{path}.marking", place_set)
        exact = r.boolean(s.get("exact", True), f"{path}.exact")
        name = r.string(s["name"], f"{path}.name") if "name" in s else None
        secrets.append(SecretMarking(constraints, exact, name))
    return Model(
        net=net,
        secrets=tuple(secrets),
        name=doc.get("name") and r.string(doc["name"], "$.name"),
        description=doc.get("description") and r.string(doc["description"], "$.description"),
    )


def _parse_lts(r: _Reader, doc: dict) -> Model:
    r.obj(doc, "$", LTS_FIELDS, ("states", "initial", "events", "edges"))
    states = r.names(doc["states"], "$.states")
    state_set = set(states)
    initial = r.string(doc["initial"], "$.initial")
    if initial not in state_set:
        r.fail("$.initial", f"unknown state {initial!r}")
    observable, unobservable, labels = [], [], {}
    for i, e in enumerate(r.lst(doc["events"], "$.events")):
        path = f"$.events[{i}]"
        r.obj(e, path, {"id", "observable", "label"}, ("id", "observable"))
        eid = r.string(e["id"], f"{path}.id")
        if eid in observable or eid in unobservable:
            r.fail(f"{path}.id", f"duplicate event id {eid!r}")
        (observable if r.boolean(e["observable"], f"{path}.observable") else unobservable).append(eid)
        if "label" in e:
            labels[eid] = r.string(e["label"], f"{path}.label")
    events = set(observable) | set(unobservable)
    edges = []
    for i, e in enumerate(r.lst(doc["edges"], "$.edges")):
        path = f"$.edges[{i}]"
        r.obj(e, path, {"from", "event", "to"}, ("from", "event", "to"))
        src = r.string(e["from"], f"{path}.from")
        ev = r.string(e["event"], f"{path}.event")
        dst = r.string(e["to"], f"{path}.to")
        if src not in state_set:
            r.fail(f"{path}.from", f"unknown state {src!r}")
        if dst not in state_set:
            r.fail(f"{path}.to", f"unknown state {dst!r}")
        if ev not in events:
            r.fail(f"{path}.event", f"unknown event {ev!r}")
        edges.append((src, ev, dst))
    secret = r.names(doc.get("secret_states", []), "$.secret_states", state_set, "state")
    lts = LabeledTransitionSystem(states, initial, frozenset(observable), frozenset(unobservable), edges, labels)
    return Model(
        lts=lts,
        secret=SecretSpec(frozenset(secret)),
        name=doc.get("name") and r.string(doc["name"], "$.name"),
        description=doc.get("description") and r.string(doc["description"], "$.description"),
    )


def parse_model(doc: Any, source: str = "<model>") -> Model:
    """Build a :class:`Model` from an already decoded JSON document."""
    r = _Reader(source)
    if not isinstance(doc, dict):
        r.fail("$", "expected an object")
    if "places" in doc:
        model = _parse_net(r, doc)
    elif "states" in doc:
        model = _parse_lts(r, doc)
    else:
        r.fail("$", "neither a net (no 'places') nor an LTS (no 'states')")
    return Model(model.net, model.secrets, model.lts, model.secret, model.name, model.description, source)


def loads(text: str, source: str = "<string>") -> Model:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_model(doc, source)


def load(path: str | Path) -> Model:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelError(f"{path}: cannot read file: {exc.strerror}") from exc
    return loads(text, str(path))


def net_to_dict(
    net: AnyNet,
    secrets: tuple[SecretMarking, ...] = (),
    *,
    name: str | None = None,
    description: str | None = None,
) -> dict:
    pn = as_petri_net(net)
    doc: dict[str, Any] = {}
    if name:
        doc["name"] = name
    if description:
        doc["description"] = description
    doc["places"] = list(pn.places)
    transitions = []
    for t in pn.transitions:
        entry: dict[str, Any] = {"id": t}
        if t in pn.labels:
            entry["label"] = pn.labels[t]
        entry["observable"] = t in pn.observable
        transitions.append(entry)
    doc["transitions"] = transitions
    doc["arcs"] = [{"from": a, "to": b, "weight": w} for (a, b), w in pn.weights.items()]
    doc["initial_marking"] = pn.initial_marking.as_dict()
    if isinstance(net, OWFNet):
        if net.final_marking is not None:
            doc["final_marking"] = net.final_marking.as_dict()
        doc["interface"] = {"inputs": sorted(net.inputs), "outputs": sorted(net.outputs)}
    out = []
    for s in secrets:
        entry = {"marking": dict(s.constraints), "exact": s.exact}
        if s.name:
            entry["name"] = s.name
        out.append(entry)
    doc["secrets"] = out
    return doc


def lts_to_dict(
    lts: LabeledTransitionSystem,
    secret: SecretSpec = SecretSpec(),
    *,
    name: str | None = None,
    description: str | None = None,
) -> dict:
    doc: dict[str, Any] = {}
    if name:
        doc["name"] = name
    if description:
        doc["description"] = description
    doc["states"] = list(lts.states)
    doc["initial"] = lts.initial
    events = []
    for e in sorted(lts.alphabet):
        entry: dict[str, Any] = {"id": e, "observable": e in lts.observable}
        if e in lts.labels:
            entry["label"] = lts.labels[e]
        events.append(entry)
    doc["events"] = events
    doc["edges"] = [{"from": a, "event": e, "to": b} for a, e, b in lts.edges]
    doc["secret_states"] = [s for s in lts.states if s in secret.states]
    return doc


def model_to_dict(model: Model) -> dict:
    if model.net is not None:
        return net_to_dict(model.net, model.secrets, name=model.name, description=model.description)
    return lts_to_dict(model.lts, model.secret, name=model.name, description=model.description)


def dumps(doc: Any) -> str:
    """Stable JSON text (two-space indent, trailing newline)."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
