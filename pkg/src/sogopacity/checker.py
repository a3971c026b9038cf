"""Simple, K-step weak and K-step strong opacity verification.

Simple opacity is decided on the SOG: the secret leaks exactly when some
reachable aggregate holds nothing but secret states.

The K-step variants use a delayed estimator. Each estimator state keeps a
window of trajectories, one entry per observation segment (the stretch of
the run from one observable event up to the next). An entry is
``(state, crossed)``: the state where the segment ended (or the current
state, for the newest entry) and whether a secret state was visited
anywhere in that segment. Alongside the window the estimator keeps the
last K+1 SOG estimates, needed to recover every state a segment may have
passed through.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Literal

from .lts import LabeledTransitionSystem, SecretSpec, Word
from .sog import Sog, build_sog, enable_obs
from .stateset import ExplicitStateSet, img, saturate

Variant = Literal["simple", "k_weak", "k_strong"]
VARIANTS: tuple[Variant, ...] = ("simple", "k_weak", "k_strong")


@dataclass(frozen=True)
class CounterExample:
    """A disclosing observation.

    For simple opacity ``source``/``target`` are SOG aggregate ids; for the
    K-step variants they are estimator state ids. ``event`` is None for the
    initial (empty-trace) disclosure.
    """

    trace: Word
    source: int
    event: str | None
    target: int
    lag: int = 0

    def to_dict(self) -> dict:
        return {
            "trace": list(self.trace),
            "source": self.source,
            "event": self.event,
            "target": self.target,
            "lag": self.lag,
        }


@dataclass(frozen=True)
class Verdict:
    variant: Variant
    k: int
    counterexamples: tuple[CounterExample, ...] = ()
    stats: dict = field(default_factory=dict, hash=False, compare=False)

    @property
    def opaque(self) -> bool:
        return not self.counterexamples

    def traces(self) -> list[Word]:
        return [c.trace for c in self.counterexamples]

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "k": self.k,
            "opaque": self.opaque,
            "counterexamples": [c.to_dict() for c in self.counterexamples],
            "stats": dict(self.stats),
        }


def check_simple(lts: LabeledTransitionSystem, secret: SecretSpec) -> tuple[Verdict, Sog]:
    """Build the SOG and collect one counterexample per all-secret aggregate.

    Construction runs to completion even after the first violation; the
    trace of each counterexample is the depth-first discovery path.
    """
    sog = build_sog(lts, secret)
    found = []
    for agg in sog.aggregates:
        if not agg.all_secret:
            continue
        parent = sog.parents[agg.id]
        if parent is None:
            found.append(CounterExample((), agg.id, None, agg.id))
        else:
            found.append(CounterExample(sog.trace_to(agg.id), parent[0], parent[1], agg.id))
    stats = {"states": len(lts.states), "aggregates": len(sog.aggregates), "estimator_states": 0}
    return Verdict("simple", 0, tuple(found), stats), sog


Entry = tuple[int, bool]
Trajectory = tuple[Entry, ...]


@dataclass(frozen=True)
class DelayEstimatorState:
    window: frozenset[Trajectory]
    estimates: tuple[frozenset[int], ...]

    @property
    def length(self) -> int:
        return len(self.estimates)


class DelayEstimator:
    """K-delay trajectory estimator over one LTS and secret."""

    def __init__(self, lts: LabeledTransitionSystem, secret: SecretSpec, k: int):
        if k < 0:
            raise ValueError("K must be >= 0")
        self.lts = lts
        self.k = k
        self.secret = secret.indices(lts)
        self._closure_cache: dict[Entry, frozenset[Entry]] = {}

    def _closure(self, entry: Entry) -> frozenset[Entry]:
        # (state, crossed) pairs reachable by unobservable moves
        cached = self._closure_cache.get(entry)
        if cached is not None:
            return cached
        succ = self.lts.unobservable_successors
        seen = {entry}
        work = [entry]
        while work:
            q, f = work.pop()
            for r in succ[q]:
                nxt = (r, f or r in self.secret)
                if nxt not in seen:
                    seen.add(nxt)
                    work.append(nxt)
        result = frozenset(seen)
        self._closure_cache[entry] = result
        return result

    def _saturate(self, states: Iterable[int]) -> frozenset[int]:
        return frozenset(saturate(self.lts, ExplicitStateSet(self.lts, states)))

    def initial(self) -> DelayEstimatorState:
        q0 = self.lts.initial_index
        window = frozenset((e,) for e in self._closure((q0, q0 in self.secret)))
        return DelayEstimatorState(window, (self._saturate([q0]),))

    def enabled(self, est: DelayEstimatorState) -> tuple[str, ...]:
        return enable_obs(self.lts, est.estimates[-1])

    def step(self, est: DelayEstimatorState, event: str) -> DelayEstimatorState | None:
        obs = self.lts.observable_successors
        keep = self.k + 1
        window = set()
        for traj in est.window:
            for y, g in self._closure(traj[-1]):
                for z in obs[y].get(event, ()):
                    head = traj[:-1] + ((y, g),)
                    for entry in self._closure((z, z in self.secret)):
                        window.add((head + (entry,))[-keep:])
        if not window:
            return None
        current = ExplicitStateSet(self.lts, est.estimates[-1])
        nxt = frozenset(saturate(self.lts, img(self.lts, current, event)))
        return DelayEstimatorState(frozenset(window), (est.estimates + (nxt,))[-keep:])

    def lag_estimate(self, est: DelayEstimatorState, lag: int) -> frozenset[int]:
        """Every state the system may have been in ``lag`` observations ago."""
        ends = {traj[-1 - lag][0] for traj in est.window}
        pred = self.lts.unobservable_predecessors
        allowed = est.estimates[-1 - lag]
        seen = set(ends)
        work = list(ends)
        while work:
            q = work.pop()
            for r in pred[q]:
                if r in allowed and r not in seen:
                    seen.add(r)
                    work.append(r)
        return frozenset(seen)

    def weak_disclosures(self, est: DelayEstimatorState) -> list[int]:
        """Lags (<= K) whose estimate is non-empty and entirely secret."""
        out = []
        for lag in range(est.length):
            states = self.lag_estimate(est, lag)
            if states and states <= self.secret:
                out.append(lag)
        return out

    def strong_disclosure(self, est: DelayEstimatorState) -> int | None:
        """Smallest lag k such that every consistent history crossed a secret
        within the last k observations, or None if some history is clean."""
        worst = 0
        for traj in est.window:
            recent = next((j for j in range(len(traj)) if traj[-1 - j][1]), None)
            if recent is None:
                return None
            worst = max(worst, recent)
        return worst

    def explore(self):
        """Breadth-first walk of the reachable estimator graph.

        Yields ``(id, state, word, parent_id, event)`` in discovery order;
        ``word`` is a shortest observation reaching the state.
        """
        init = self.initial()
        ids = {init: 0}
        queue = deque([(init, ())])
        yield 0, init, (), None, None
        while queue:
            est, word = queue.popleft()
            src = ids[est]
            for e in self.enabled(est):
                nxt = self.step(est, e)
                if nxt is None or nxt in ids:
                    continue
                ids[nxt] = len(ids)
                queue.append((nxt, word + (e,)))
                yield ids[nxt], nxt, word + (e,), src, e


def _check_k_step(lts, secret, k: int, variant: Variant) -> Verdict:
    est = DelayEstimator(lts, secret, k)
    found = []
    count = 0
    estimates = set()
    for sid, state, word, parent, event in est.explore():
        count += 1
        estimates.add(state.estimates[-1])
        if variant == "k_weak":
            lags = est.weak_disclosures(state)
            lag = lags[0] if lags else None
        else:
            lag = est.strong_disclosure(state)
        if lag is not None:
            src = sid if parent is None else parent
            found.append(CounterExample(word, src, event, sid, lag))
    found.sort(key=lambda c: (len(c.trace), c.trace, c.target))
    stats = {"states": len(lts.states), "aggregates": len(estimates), "estimator_states": count}
    return Verdict(variant, k, tuple(found), stats)


def check_k_step_weak(lts: LabeledTransitionSystem, secret: SecretSpec, k: int) -> Verdict:
    """Decide K-step weak opacity: no lag-k estimate (k <= K) is all secret.

    One counterexample per disclosing estimator state, carrying a shortest
    observation and the smallest disclosing lag.
    """
    return _check_k_step(lts, secret, k, "k_weak")


def check_k_step_strong(lts: LabeledTransitionSystem, secret: SecretSpec, k: int) -> Verdict:
    """Decide K-step strong opacity: every observation admits a history that
    neither ended in nor crossed a secret state during its last K observations."""
    return _check_k_step(lts, secret, k, "k_strong")


def check(lts: LabeledTransitionSystem, secret: SecretSpec, variant: Variant, k: int = 0) -> Verdict:
    if variant == "simple":
        return check_simple(lts, secret)[0]
    if variant == "k_weak":
        return check_k_step_weak(lts, secret, k)
    if variant == "k_strong":
        return check_k_step_strong(lts, secret, k)
    raise ValueError(f"unknown variant {variant!r}")


Disclosure = tuple[Word, str, int]


def estimator_disclosures(
    lts: LabeledTransitionSystem, secret: SecretSpec, k: int, max_len: int
) -> set[Disclosure]:
    """Every disclosing observation of length <= ``max_len`` as seen by the
    SOG (simple) and the delayed estimator (weak, strong)."""
    sog = build_sog(lts, secret)
    out: set[Disclosure] = {(w, "simple", 0) for w in sog.disclosing_words(max_len)}

    est = DelayEstimator(lts, secret, k)
    memo: dict[tuple[DelayEstimatorState, str], DelayEstimatorState | None] = {}
    level = [((), est.initial())]
    for depth in range(max_len + 1):
        for w, state in level:
            for lag in est.weak_disclosures(state):
                out.add((w, "k_weak", lag))
            lag = est.strong_disclosure(state)
            if lag is not None:
                out.add((w, "k_strong", lag))
        if depth == max_len:
            break
        nxt = []
        for w, state in level:
            for e in est.enabled(state):
                key = (state, e)
                if key not in memo:
                    memo[key] = est.step(state, e)
                if memo[key] is not None:
                    nxt.append((w + (e,), memo[key]))
        level = nxt
    return out
