import re

import pytest
from hypothesis import given, settings

from harness import closer, ltss, ltss_with_secret
from sogopacity.corpus import load_corpus
from sogopacity.lts import LabeledTransitionSystem, SecretSpec, enumerate_runs, project
from sogopacity.sog import build_sog, enable_obs, export_dot, sog_to_dict
from sogopacity.stateset import BitStateSet, ExplicitStateSet, img, saturate


def corpus_sog(name):
    lts, secret = load_corpus()[name].semantics()
    return lts, secret, build_sog(lts, secret)


def test_enable_obs_examples():
    lts = LabeledTransitionSystem(["q0", "q1", "q2"], "q0", {"b", "a"}, (), [("q0", "b", "q1"), ("q0", "a", "q2")])
    sog = build_sog(lts, SecretSpec())
    assert enable_obs(lts, sog.aggregates[0]) == ("a", "b")
    assert enable_obs(lts, sog.aggregates[sog.successor(0, "a")]) == ()


def test_fog_initial_aggregate_enables_only_t1():
    lts, _, sog = corpus_sog("fog")
    assert enable_obs(lts, sog.aggregates[0]) == ("T1",)


def test_fully_observable_deterministic_lts_gives_singletons():
    lts = LabeledTransitionSystem(
        ["q0", "q1", "q2"], "q0", {"a", "b"}, (), [("q0", "a", "q1"), ("q1", "b", "q2"), ("q2", "a", "q0")]
    )
    sog = build_sog(lts, SecretSpec())
    assert [a.states.ids() for a in sog.aggregates] == [("q0",), ("q1",), ("q2",)]
    assert sorted(sog.edges) == [(0, "a", 1), (1, "b", 2), (2, "a", 0)]


def test_fog_single_mixed_secret_aggregate():
    _, secret, sog = corpus_sog("fog")
    assert len(secret.states) == 1
    holding = [a for a in sog.aggregates if a.contains_secret]
    assert len(holding) == 1
    assert not holding[0].all_secret
    assert not any(a.all_secret for a in sog.aggregates)


def test_cpr_has_two_all_secret_aggregates():
    _, _, sog = corpus_sog("cpr")
    assert sum(a.all_secret for a in sog.aggregates) >= 2


@pytest.mark.parametrize("name", ["br", "fog", "cpr", "cpub", "app"])
def test_corpus_sog_definition_and_bounds(name):
    lts, secret, sog = corpus_sog(name)
    a0 = saturate(lts, ExplicitStateSet(lts, [lts.initial_index]))
    assert sog.aggregates[0].states == a0
    for a, e, b in sog.edges:
        assert sog.aggregates[b].states == saturate(lts, img(lts, sog.aggregates[a].states, e))
    assert len(sog.aggregates) <= len(lts.states)


def test_dot_small_graphs():
    single = build_sog(LabeledTransitionSystem(["q0"], "q0", {"a"}, (), []), SecretSpec())
    dot = export_dot(single)
    assert dot.count("[label=") == 1 and "->" not in dot
    two = build_sog(LabeledTransitionSystem(["q0", "q1"], "q0", {"a"}, (), [("q0", "a", "q1")]), SecretSpec({"q1"}))
    dot = export_dot(two)
    assert dot.count("->") == 1 and 'label="a"' in dot
    assert "peripheries=2" in dot


def test_dot_node_count_matches_fog_sog():
    _, _, sog = corpus_sog("fog")
    dot = export_dot(sog)
    assert len(re.findall(r"^  a\d+ \[", dot, re.M)) == len(sog.aggregates)


def test_dot_label_keeps_send_receive_marks():
    _, _, sog = corpus_sog("cpr")
    assert 'label="T7!"' in export_dot(sog)


def test_rebuild_is_stable():
    lts, secret, sog = corpus_sog("cpr")
    again = build_sog(lts, secret)
    assert again == sog
    assert export_dot(again) == export_dot(sog)
    assert sog_to_dict(again) == sog_to_dict(sog)


def test_discovery_is_depth_first():
    # q0 -a-> q1 -c-> q3 ; q0 -b-> q2 : DFS visits q1's successor before q2
    lts = LabeledTransitionSystem(
        ["q0", "q1", "q2", "q3"], "q0", {"a", "b", "c"}, (),
        [("q0", "a", "q1"), ("q0", "b", "q2"), ("q1", "c", "q3")],
    )
    sog = build_sog(lts, SecretSpec())
    assert [a.states.ids() for a in sog.aggregates] == [("q0",), ("q1",), ("q3",), ("q2",)]
    assert sog.trace_to(2) == ("a", "c")


@settings(max_examples=150, deadline=None)
@given(ltss_with_secret(max_states=6))
def test_sog_invariants(case):
    lts, secret = case
    sog = build_sog(lts, secret)
    s = secret.indices(lts)
    seen = set()
    for a, e, _ in sog.edges:
        assert (a, e) not in seen
        seen.add((a, e))
    reach = {0} | {b for _, _, b in sog.edges}
    assert reach == {a.id for a in sog.aggregates}
    for agg in sog.aggregates:
        members = set(agg.states)
        assert members
        assert set(saturate(lts, agg.states)) == members
        assert agg.contains_secret == bool(members & s)
        assert agg.all_secret == (members <= s)
    assert len(sog.aggregates) <= 2 ** len(lts.states)


@settings(max_examples=100, deadline=None)
@given(ltss(max_states=5))
def test_sog_language_is_projected_lts_language(lts):
    sog = build_sog(lts, SecretSpec())
    runs = {project(w, lts.observable) for w, _ in enumerate_runs(lts, 6)}
    # every observation of a run of length <= 6 is an SOG path ...
    assert all(sog.walk(w) is not None for w in runs)
    # ... and every SOG path is the observation of some run
    close, step = closer(lts)
    for w, _ in sog.words(4):
        est = close({lts.initial})
        for e in w:
            est = step(est, e)
        assert est


@settings(max_examples=100, deadline=None)
@given(ltss_with_secret(max_states=6))
def test_backends_build_the_same_sog(case):
    lts, secret = case
    a = build_sog(lts, secret, ExplicitStateSet)
    b = build_sog(lts, secret, BitStateSet)
    assert a.edges == b.edges
    assert [list(x.states) for x in a.aggregates] == [list(x.states) for x in b.aggregates]
    assert [x.all_secret for x in a.aggregates] == [x.all_secret for x in b.aggregates]
