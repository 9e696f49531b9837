"""Classically saturated, clash-free extensions of a finite formula set.

A saturation of a seed is exactly what an open, finished branch of a
classical tableau started on the seed contains: the seed plus everything a
run of the branch rules added.  The rules are

  * phi & psi      adds phi and psi,
  * ~~phi          adds phi,
  * ~(phi & psi)   adds ~phi or ~psi, but only while neither is present.

A finished branch has no applicable rule left, does not contain falsum and
never contains a formula together with its negation.  Boxes are opaque to
all three rules, so a saturation of a seed has the seed's modal degree.

Enumeration explores the rule applications as a graph over intermediate
sets, which covers every application order; the disjunction rule is
blocked once one of its two targets is present, so branches never pad
themselves with underived material.  An inconsistent seed has no
saturations at all; callers treat the empty stream as the failed branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .formula import And, FALSUM, Falsum, Formula, Not, csf, set_degree, sort_key


@dataclass(frozen=True)
class Saturation:
    """A saturated, clash-free set together with the seed it extends."""

    members: frozenset[Formula]
    seed: frozenset[Formula]

    @property
    def degree(self) -> int:
        return set_degree(self.members)


def _clashes(members: frozenset[Formula]) -> bool:
    if FALSUM in members:
        return True
    return any(isinstance(f, Not) and f.child in members for f in members)


def _conflicts(members: frozenset[Formula], new: Formula) -> bool:
    if isinstance(new, Falsum):
        return True
    if isinstance(new, Not) and new.child in members:
        return True
    return Not(new) in members


def _pending(members: frozenset[Formula]) -> list[Formula]:
    """Formulas a rule could still add, in deterministic order."""
    moves: list[Formula] = []
    seen: set[Formula] = set()

    def push(f: Formula) -> None:
        if f not in members and f not in seen:
            seen.add(f)
            moves.append(f)

    for f in sorted(members, key=sort_key):
        if isinstance(f, And):
            push(f.left)
            push(f.right)
        elif isinstance(f, Not):
            c = f.child
            if isinstance(c, Not):
                push(c.child)
            elif isinstance(c, And):
                nl, nr = Not(c.left), Not(c.right)
                if nl not in members and nr not in members:
                    push(nl)
                    push(nr)
    return moves


def saturations(seed: Iterable[Formula]) -> Iterator[Saturation]:
    """Enumerate every saturation of the seed, each exactly once.

    Depth-first over the graph of partial branches; the yield order is
    deterministic.  Yields nothing when the seed is classically
    inconsistent.
    """
    seed = frozenset(seed)
    if _clashes(seed):
        return
    visited: set[frozenset[Formula]] = set()
    stack: list[frozenset[Formula]] = [seed]
    while stack:
        current = stack.pop()
        if current in visited:
            continue
        visited.add(current)
        moves = _pending(current)
        if not moves:
            yield Saturation(current, seed)
            continue
        successors = []
        for new in moves:
            if not _conflicts(current, new):
                successors.append(current | {new})
        stack.extend(reversed(successors))


@lru_cache(maxsize=None)
def saturation_family(seed: frozenset[Formula]) -> tuple[Saturation, ...]:
    """Materialized, cached form of saturations(); hot paths go through here."""
    return tuple(saturations(seed))


def is_saturation_of(candidate: Iterable[Formula], seed: Iterable[Formula]) -> bool:
    """Decide whether candidate is a saturation of seed.

    Checks the containment bounds seed <= candidate <= csf(seed), the branch
    invariants, and that some run of the rules actually produces candidate.
    """
    candidate = frozenset(candidate)
    seed = frozenset(seed)
    if not seed <= candidate:
        return False
    if not candidate <= csf(seed):
        return False
    if _clashes(candidate):
        return False
    for f in candidate:
        if isinstance(f, And):
            if f.left not in candidate or f.right not in candidate:
                return False
        elif isinstance(f, Not):
            c = f.child
            if isinstance(c, Not) and c.child not in candidate:
                return False
            if isinstance(c, And):
                if Not(c.left) not in candidate and Not(c.right) not in candidate:
                    return False
    return _reachable(seed, candidate)


def _reachable(seed: frozenset[Formula], target: frozenset[Formula]) -> bool:
    # Order matters: a disjunction rule is blocked once fulfilled, so an
    # element may be addable in one run order but not another.
    visited: set[frozenset[Formula]] = set()
    stack = [seed]
    while stack:
        current = stack.pop()
        if current == target:
            return True
        if current in visited:
            continue
        visited.add(current)
        for new in _pending(current):
            if new in target:
                stack.append(current | {new})
    return False
