import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harness import ltss
from sogopacity.corpus import load_corpus
from sogopacity.errors import ModelError
from sogopacity.lts import (
    LabeledTransitionSystem,
    SecretSpec,
    enumerate_runs,
    observationally_equivalent_runs,
    project,
)
from sogopacity.sog import build_sog

CPR_OBSERVABLE = {"T1", "T4", "T5", "T7", "T10", "T11", "T13", "T14", "T16", "T18", "T19", "T21"}


def lts(states, edges, observable, unobservable=(), initial="q0"):
    return LabeledTransitionSystem(states, initial, frozenset(observable), frozenset(unobservable), edges)


def test_project_examples():
    assert project(("T7", "T8", "T12", "T13"), CPR_OBSERVABLE) == ("T7", "T13")
    assert project((), {"a"}) == ()
    assert project(("a", "b", "a"), {"a", "b"}) == ("a", "b", "a")


words = st.lists(st.sampled_from("abcxy"), max_size=10).map(tuple)
obs_sets = st.sets(st.sampled_from("abcxy"))


@given(words, obs_sets)
def test_project_idempotent_and_shorter(w, obs):
    p = project(w, obs)
    assert project(p, obs) == p
    assert len(p) <= len(w)
    assert (len(p) == len(w)) == all(e in obs for e in w)


@given(words, st.integers(0, 10), obs_sets)
def test_project_monotone_on_prefixes(w, cut, obs):
    u = w[:cut]
    assert project(w, obs)[: len(project(u, obs))] == project(u, obs)


def test_lts_validation():
    with pytest.raises(ModelError, match="initial"):
        lts(["q0"], [], {"a"}, initial="nope")
    with pytest.raises(ModelError, match="both observable"):
        lts(["q0"], [], {"a"}, {"a"})
    with pytest.raises(ModelError, match="unknown event"):
        lts(["q0"], [("q0", "z", "q0")], {"a"})
    with pytest.raises(ModelError, match="unknown state"):
        lts(["q0"], [("q0", "a", "q9")], {"a"})


def test_secret_spec_must_be_subset():
    with pytest.raises(ModelError):
        SecretSpec({"q9"}).indices(lts(["q0"], [], {"a"}))


def test_enumerate_runs_examples():
    assert list(enumerate_runs(lts(["q0"], [], {"a"}), 5)) == [((), "q0")]
    chain = lts(["q0", "q1"], [("q0", "a", "q1")], {"a"})
    assert list(enumerate_runs(chain, 1)) == [((), "q0"), (("a",), "q1")]
    loop = lts(["q0"], [("q0", "a", "q0")], {"a"})
    assert list(enumerate_runs(loop, 2)) == [((), "q0"), (("a",), "q0"), (("a", "a"), "q0")]


@settings(max_examples=100, deadline=None)
@given(ltss(max_states=5), st.integers(0, 4))
def test_enumerate_runs_prefix_closed_and_ordered(l, n):
    runs = list(enumerate_runs(l, n))
    words = {w for w, _ in runs}
    assert all(w[:-1] in words for w in words if w)
    assert len(runs) == len(set(runs))
    keys = [(len(w), w) for w, _ in runs]
    assert keys == sorted(keys)


def test_observationally_equivalent_examples():
    l = lts(["q0", "q1", "q2"], [("q0", "u", "q1"), ("q1", "o", "q2")], {"o"}, {"u"})
    assert set(observationally_equivalent_runs(l, ()).ids()) == {"q0", "q1"}
    assert set(observationally_equivalent_runs(l, ("o",)).ids()) == {"q2"}
    assert set(observationally_equivalent_runs(l, ("o", "o")).ids()) == set()
    with pytest.raises(ModelError):
        observationally_equivalent_runs(l, ("u",))


def test_fog_estimate_after_t1_t5_t6_mixes_secret_and_non_secret():
    model = load_corpus()["fog"]
    l, secret = model.semantics()
    est = set(observationally_equivalent_runs(l, ("T1", "T5", "T6")).ids())
    assert est & secret.states
    assert est - secret.states


@pytest.mark.parametrize("name", ["br", "fog", "cpr", "cpub", "app"])
def test_estimates_match_sog_aggregates_on_corpus(name):
    l, secret = load_corpus()[name].semantics()
    sog = build_sog(l, secret)
    for w, aid in sog.words(10):
        assert observationally_equivalent_runs(l, w) == sog.aggregates[aid].states


@settings(max_examples=100, deadline=None)
@given(ltss(max_states=5))
def test_estimates_match_sog_aggregates_on_random(l):
    sog = build_sog(l, SecretSpec())
    for w, aid in sog.words(5):
        assert observationally_equivalent_runs(l, w) == sog.aggregates[aid].states
