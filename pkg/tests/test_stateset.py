import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harness import ltss
from sogopacity.errors import UsageError
from sogopacity.lts import LabeledTransitionSystem
from sogopacity.stateset import BitStateSet, ExplicitStateSet, img, saturate

BACKENDS = [ExplicitStateSet, BitStateSet]


def lts(n, edges, observable=("o",), unobservable=("u",)):
    return LabeledTransitionSystem([f"q{i}" for i in range(n)], "q0", observable, unobservable, edges)


@pytest.mark.parametrize("B", BACKENDS)
def test_saturate_examples(B):
    closed = lts(2, [("q0", "o", "q1")])
    assert set(saturate(closed, B(closed, [0]))) == {0}
    chain = lts(3, [("q0", "u", "q1"), ("q1", "u", "q2")])
    assert set(saturate(chain, B(chain, [0]))) == {0, 1, 2}
    cycle = lts(2, [("q0", "u", "q1"), ("q1", "u", "q0")])
    assert set(saturate(cycle, B(cycle, [0]))) == {0, 1}


@pytest.mark.parametrize("B", BACKENDS)
def test_img_examples(B):
    one = lts(2, [("q0", "o", "q1")])
    assert set(img(one, B(one, [0]), "o")) == {1}
    assert img(one, B(one, [1]), "o").is_empty()
    nondet = lts(3, [("q0", "o", "q1"), ("q0", "o", "q2")])
    assert set(img(nondet, B(nondet, [0]), "o")) == {1, 2}
    with pytest.raises(UsageError):
        img(one, B(one, [0]), "u")


@pytest.mark.parametrize("B", BACKENDS)
def test_set_algebra(B):
    l = lts(3, [])
    x, y = B(l, [1]), B(l, [1, 2])
    assert x.is_subset(y) and x <= y
    assert y.difference(y).is_empty()
    assert B(l, []).is_subset(x)
    assert set(x | y) == {1, 2} and set(x & y) == {1}
    assert B(l, [2, 1]) == B(l, [1, 2]) and hash(B(l, [2, 1])) == hash(B(l, [1, 2]))
    assert y.ids() == ("q1", "q2")


def test_mixed_operands_rejected():
    a, b = lts(2, []), lts(3, [])
    with pytest.raises(UsageError):
        ExplicitStateSet(a, [0]) | ExplicitStateSet(b, [0])
    with pytest.raises(UsageError):
        ExplicitStateSet(a, [0]) | BitStateSet(a, [0])
    with pytest.raises(UsageError):
        saturate(a, ExplicitStateSet(b, [0]))


@settings(max_examples=150, deadline=None)
@given(ltss(max_states=8, min_unobs=1), st.data())
def test_closure_laws(l, data):
    n = len(l.states)
    xs = data.draw(st.sets(st.integers(0, n - 1)))
    ys = data.draw(st.sets(st.integers(0, n - 1))) | xs
    for B in BACKENDS:
        x, y = B(l, xs), B(l, ys)
        sx = saturate(l, x)
        assert x <= sx
        assert saturate(l, sx) == sx
        assert sx <= saturate(l, y)
        for e in sorted(l.observable):
            assert img(l, x | y, e) == img(l, x, e) | img(l, y, e)


def test_backends_interchangeable():
    """Same results from both backends on 500 random LTSs (<= 64 states, <= 8 events)."""
    rng = random.Random(11)
    for _ in range(500):
        n = rng.randint(1, 64)
        obs = [f"o{i}" for i in range(rng.randint(1, 4))]
        unobs = [f"u{i}" for i in range(rng.randint(0, 4))]
        edges = {
            (f"q{rng.randrange(n)}", rng.choice(obs + unobs), f"q{rng.randrange(n)}")
            for _ in range(rng.randint(0, 3 * n))
        }
        l = LabeledTransitionSystem([f"q{i}" for i in range(n)], "q0", obs, unobs, sorted(edges))
        xs = {rng.randrange(n) for _ in range(rng.randint(0, 5))}
        ys = {rng.randrange(n) for _ in range(rng.randint(0, 5))}
        ex, bx = ExplicitStateSet(l, xs), BitStateSet(l, xs)
        ey, by = ExplicitStateSet(l, ys), BitStateSet(l, ys)
        assert list(saturate(l, ex)) == list(saturate(l, bx))
        for e in obs:
            assert list(img(l, ex, e)) == list(img(l, bx, e))
        assert list(ex | ey) == list(bx | by)
        assert list(ex & ey) == list(bx & by)
        assert list(ex - ey) == list(bx - by)
        assert (ex <= ey) == (bx <= by)
        assert ex.is_empty() == bx.is_empty()
