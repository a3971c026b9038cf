"""Canonical state sets and the two symbolic primitives of the SOG.

Two interchangeable backends are provided. ``ExplicitStateSet`` keeps a
sorted tuple of state indices and is the default; ``BitStateSet`` packs
membership into a Python int. Both are immutable values bound to one LTS.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .errors import UsageError
from .lts import LabeledTransitionSystem


class StateSet:
    """Common surface of the state-set backends."""

    __slots__ = ("_lts",)

    def __init__(self, lts: LabeledTransitionSystem):
        self._lts = lts

    @property
    def lts(self) -> LabeledTransitionSystem:
        return self._lts

    def _same_ambient(self, other: StateSet) -> None:
        if type(other) is not type(self):
            raise UsageError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other._lts is not self._lts and other._lts != self._lts:
            raise UsageError("state sets belong to different transition systems")

    def ids(self) -> tuple[str, ...]:
        """Member state ids, in state order."""
        return tuple(self._lts.states[i] for i in self)

    def union(self, other):
        raise NotImplementedError

    def __or__(self, other):
        return self.union(other)

    def __and__(self, other):
        return self.intersect(other)

    def __sub__(self, other):
        return self.difference(other)

    def __le__(self, other):
        return self.is_subset(other)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({{{', '.join(self.ids())}}})"


class ExplicitStateSet(StateSet):
    __slots__ = ("_members", "_set")

    def __init__(self, lts: LabeledTransitionSystem, members: Iterable[int] = ()):
        super().__init__(lts)
        self._set = frozenset(members)
        self._members = tuple(sorted(self._set))

    def _new(self, members: Iterable[int]) -> ExplicitStateSet:
        return ExplicitStateSet(self._lts, members)

    def __iter__(self) -> Iterator[int]:
        return iter(self._members)

    def __len__(self) -> int:
        return len(self._members)

    def __contains__(self, i: int) -> bool:
        return i in self._set

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExplicitStateSet):
            return NotImplemented
        return self._members == other._members and (
            self._lts is other._lts or self._lts == other._lts
        )

    def __hash__(self) -> int:
        return hash(self._members)

    def union(self, other: ExplicitStateSet) -> ExplicitStateSet:
        self._same_ambient(other)
        return self._new(self._set | other._set)

    def intersect(self, other: ExplicitStateSet) -> ExplicitStateSet:
        self._same_ambient(other)
        return self._new(self._set & other._set)

    def difference(self, other: ExplicitStateSet) -> ExplicitStateSet:
        self._same_ambient(other)
        return self._new(self._set - other._set)

    def is_subset(self, other: ExplicitStateSet) -> bool:
        self._same_ambient(other)
        return self._set <= other._set

    def is_empty(self) -> bool:
        return not self._members


class BitStateSet(StateSet):
    __slots__ = ("_mask",)

    def __init__(self, lts: LabeledTransitionSystem, members: Iterable[int] = (), *, mask: int | None = None):
        super().__init__(lts)
        if mask is None:
            mask = 0
            for i in members:
                mask |= 1 << i
        self._mask = mask

    @property
    def mask(self) -> int:
        return self._mask

    def __iter__(self) -> Iterator[int]:
        m, i = self._mask, 0
        while m:
            if m & 1:
                yield i
            m >>= 1
            i += 1

    def __len__(self) -> int:
        return bin(self._mask).count("1")

    def __contains__(self, i: int) -> bool:
        return bool(self._mask >> i & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitStateSet):
            return NotImplemented
        return self._mask == other._mask and (self._lts is other._lts or self._lts == other._lts)

    def __hash__(self) -> int:
        return hash(self._mask)

    def union(self, other: BitStateSet) -> BitStateSet:
        self._same_ambient(other)
        return BitStateSet(self._lts, mask=self._mask | other._mask)

    def intersect(self, other: BitStateSet) -> BitStateSet:
        self._same_ambient(other)
        return BitStateSet(self._lts, mask=self._mask & other._mask)

    def difference(self, other: BitStateSet) -> BitStateSet:
        self._same_ambient(other)
        return BitStateSet(self._lts, mask=self._mask & ~other._mask)

    def is_subset(self, other: BitStateSet) -> bool:
        self._same_ambient(other)
        return self._mask & ~other._mask == 0

    def is_empty(self) -> bool:
        return self._mask == 0


def _bit_tables(lts: LabeledTransitionSystem):
    # Cached on the LTS instance; the LTS is immutable so the tables stay valid.
    tables = lts.__dict__.get("_bit_tables")
    if tables is None:
        unobs = [sum(1 << j for j in succ) for succ in lts.unobservable_successors]
        obs = [{e: sum(1 << j for j in t) for e, t in d.items()} for d in lts.observable_successors]
        tables = (unobs, obs)
        lts.__dict__["_bit_tables"] = tables
    return tables


def _check_owner(lts: LabeledTransitionSystem, s: StateSet) -> None:
    if s.lts is not lts and s.lts != lts:
        raise UsageError("state set does not belong to this transition system")


def saturate(lts: LabeledTransitionSystem, seed: StateSet) -> StateSet:
    """Close ``seed`` under unobservable transitions (least fixpoint)."""
    _check_owner(lts, seed)
    if isinstance(seed, BitStateSet):
        unobs, _ = _bit_tables(lts)
        closed = seed.mask
        frontier = closed
        while frontier:
            nxt = 0
            m, i = frontier, 0
            while m:
                if m & 1:
                    nxt |= unobs[i]
                m >>= 1
                i += 1
            frontier = nxt & ~closed
            closed |= frontier
        return BitStateSet(lts, mask=closed)

    succ = lts.unobservable_successors
    visited = set(seed)
    work = list(visited)
    while work:
        q = work.pop()
        for r in succ[q]:
            if r not in visited:
                visited.add(r)
                work.append(r)
    return ExplicitStateSet(lts, visited)


def img(lts: LabeledTransitionSystem, a: StateSet, event: str) -> StateSet:
    """States reached from ``a`` by one ``event`` step (no saturation)."""
    if event not in lts.observable:
        raise UsageError(f"img is defined for observable events only, got {event!r}")
    _check_owner(lts, a)
    if isinstance(a, BitStateSet):
        _, obs = _bit_tables(lts)
        out = 0
        for q in a:
            out |= obs[q].get(event, 0)
        return BitStateSet(lts, mask=out)
    succ = lts.observable_successors
    return ExplicitStateSet(lts, (r for q in a for r in succ[q].get(event, ())))
