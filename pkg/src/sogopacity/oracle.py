"""Brute-force reference for the three opacity definitions.

The oracle walks the tree of runs directly on the LTS edges and groups runs
by their observable projection. A run prefix is summarised by its current
state and, for each of its last K+1 observation segments, the set of states
it visited there. Two prefixes with the same observation and the same
summary have identical futures for every definition checked here, so the
search keeps one of them; this is what makes the walk finite while still
covering runs of any length. Nothing from the SOG or estimator code is used.
"""

from __future__ import annotations

from collections import defaultdict

from .lts import LabeledTransitionSystem, SecretSpec, Word

Summary = tuple[int, tuple[frozenset[int], ...]]


def _unobservable_closure(lts: LabeledTransitionSystem, nodes: set[Summary]) -> set[Summary]:
    seen = set(nodes)
    work = list(nodes)
    while work:
        q, hist = work.pop()
        for ev, r in lts.successors[q]:
            if ev in lts.observable:
                continue
            node = (r, hist[:-1] + (hist[-1] | {r},))
            if node not in seen:
                seen.add(node)
                work.append(node)
    return seen


def runs_by_observation(
    lts: LabeledTransitionSystem, k: int, depth: int
) -> dict[Word, frozenset[Summary]]:
    """Summaries of all runs whose observation has length <= ``depth``."""
    keep = k + 1
    q0 = lts.initial_index
    start = frozenset(_unobservable_closure(lts, {(q0, (frozenset([q0]),))}))
    # equal summary sets have equal futures, so each one is expanded once
    memo: dict[frozenset[Summary], dict[str, frozenset[Summary]]] = {}

    def expand(nodes: frozenset[Summary]) -> dict[str, frozenset[Summary]]:
        if nodes not in memo:
            grown: dict[str, set[Summary]] = defaultdict(set)
            for q, hist in nodes:
                for ev, r in lts.successors[q]:
                    if ev in lts.observable:
                        grown[ev].add((r, (hist + (frozenset([r]),))[-keep:]))
            memo[nodes] = {ev: frozenset(_unobservable_closure(lts, g)) for ev, g in grown.items()}
        return memo[nodes]

    level = {(): start}
    out: dict[Word, frozenset[Summary]] = {}
    for n in range(depth + 1):
        out.update(level)
        if n == depth:
            break
        level = {w + (ev,): nxt for w, nodes in level.items() for ev, nxt in expand(nodes).items()}
    return out


def oracle_disclosures(
    lts: LabeledTransitionSystem, secret: SecretSpec, k: int, depth: int | None = None
) -> list[tuple[Word, str, int]]:
    """All ``(observation, variant, lag)`` disclosures up to ``depth`` observations.

    ``simple``: every run with this observation ends in a secret state.
    ``k_weak``/lag j: every run with this observation was in a secret state
    at every point of the segment j observations back (j <= K).
    ``k_strong``/lag j: every run visited a secret state within its last
    K+1 segments; j is the smallest look-back that already catches them all.
    Default depth is ``|Q| + K + 2``.
    """
    if depth is None:
        depth = len(lts.states) + k + 2
    s = secret.indices(lts)
    verdicts: dict[frozenset[Summary], tuple[bool, list[int], int | None]] = {}

    def judge(nodes: frozenset[Summary]) -> tuple[bool, list[int], int | None]:
        if nodes not in verdicts:
            simple = all(q in s for q, _ in nodes)
            width = max(len(hist) for _, hist in nodes)
            weak = [
                lag for lag in range(width)
                if set().union(*(hist[-1 - lag] for _, hist in nodes)) <= s
            ]
            recent = []
            for _, hist in nodes:
                hits = [j for j in range(len(hist)) if hist[-1 - j] & s]
                recent.append(hits[0] if hits else None)
            strong = None if None in recent else max(recent)
            verdicts[nodes] = (simple, weak, strong)
        return verdicts[nodes]

    found = []
    for w, nodes in runs_by_observation(lts, k, depth).items():
        simple, weak, strong = judge(nodes)
        if simple:
            found.append((w, "simple", 0))
        found.extend((w, "k_weak", lag) for lag in weak if lag <= min(k, len(w)))
        if strong is not None:
            found.append((w, "k_strong", strong))
    found.sort(key=lambda d: (len(d[0]), d[0], d[1], d[2]))
    return found
