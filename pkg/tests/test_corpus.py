import pytest

from sogopacity.corpus import NAMES, CorpusError, load_corpus, load_model


def alphabet(name):
    net = load_corpus()[name].net.core
    return (
        {net.label(t) for t in net.observable},
        set(net.transitions) - net.observable,
    )


def secret_names(name):
    return {s.name for s in load_corpus()[name].secrets}


def test_five_models():
    corpus = load_corpus()
    assert set(corpus) == set(NAMES) == {"br", "fog", "cpr", "cpub", "app"}


def test_fog_alphabet_and_secret():
    obs, unobs = alphabet("fog")
    assert obs == {"T1!", "T5?", "T6!", "T10?"}
    assert unobs == {"T2", "T3", "T4", "T7", "T8", "T9", "T11"}
    assert secret_names("fog") == {"S6"}
    _, secret = load_corpus()["fog"].semantics()
    assert len(secret.states) == 1


def test_cpr_alphabet_and_secrets():
    obs, unobs = alphabet("cpr")
    assert obs == {"T1!", "T4?", "T5!", "T7!", "T10?", "T11!", "T13?", "T14!", "T16!", "T18?", "T19!", "T21?"}
    assert unobs == {"T2", "T3", "T6", "T8", "T9", "T12", "T15", "T17", "T20"}
    assert secret_names("cpr") == {"S1", "S3", "S4", "S7", "S16", "S21", "S22", "S23"}


def test_cpr_reachability_realizes_every_named_secret():
    model = load_corpus()["cpr"]
    lts, secret = model.semantics()
    for s in model.secrets:
        hits = {q for q, m in zip(lts.states, lts.markings) if s.matches(m)}
        assert hits and hits <= secret.states, s.name


def test_app_alphabet_and_secrets():
    obs, unobs = alphabet("app")
    assert obs == {"T2?", "T3!", "T4?", "T5!", "T6?", "T7!", "T8!"}
    assert unobs == {"T1", "T9"}
    assert secret_names("app") == {"S2", "S6", "S7", "S9", "S10", "S11"}
    _, secret = load_corpus()["app"].semantics()
    assert len(secret.states) == 6


@pytest.mark.parametrize("name", ["br", "cpub"])
def test_no_secrets(name):
    model = load_corpus()[name]
    assert model.secrets == ()
    assert model.semantics()[1].states == frozenset()


def test_unknown_name():
    with pytest.raises(CorpusError, match="unknown corpus model"):
        load_model("nope")


def test_corrupt_file_is_reported(monkeypatch):
    from sogopacity import corpus

    monkeypatch.setattr(corpus, "corpus_text", lambda name: '{"places": [')
    with pytest.raises(CorpusError, match="fog.json is corrupt"):
        corpus.load_model("fog")
