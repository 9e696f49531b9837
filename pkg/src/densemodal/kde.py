"""Fixpoint decision procedure for the unimodal logic of dense frames.

The subformulas of the target are enumerated children-first.  A profile is
a bit vector over that enumeration that respects the Boolean structure
(falsum bit 0, negation flips, conjunction takes the minimum); atom and box
bits are free.  Starting from the frame of all profiles with the full
box-respecting relation, one refinement step removes profiles whose false
boxes have no falsifying successor and edges without a midpoint.  The
refinement shrinks a finite structure, so it reaches a fixpoint; the
fixpoint frame is dense, its profiles satisfy exactly their own bits, and
the target is valid over dense frames exactly when every surviving profile
has the target bit set.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional

from .errors import InvariantError
from .formula import (
    And,
    Atom,
    Box,
    Falsum,
    Formula,
    Not,
    is_unimodal,
)
from .kdeab import SAT, UNSAT, SatResult
from .oracle import KripkeModel

Profile = tuple[int, ...]

# Free bits live at atom and box positions; the profile count is 2**free.
FREE_BIT_LIMIT = 22


class SubformulaIndex:
    """Children-first enumeration of the subformulas of one target."""

    def __init__(self, entries: list[Formula]):
        self.entries = tuple(entries)
        self.n = len(entries)
        self.position = {f: i for i, f in enumerate(entries)}
        self.box_pairs = [
            (i, self.position[f.child])
            for i, f in enumerate(entries)
            if isinstance(f, Box)
        ]
        self.free_positions = [
            i for i, f in enumerate(entries) if isinstance(f, (Atom, Box))
        ]

    @property
    def target(self) -> Formula:
        return self.entries[-1]


def build_index(phi: Formula) -> SubformulaIndex:
    """Deduplicating post-order traversal; the target comes last."""
    if not is_unimodal(phi):
        raise ValueError("the dense-logic solver handles unimodal formulas only")
    entries: list[Formula] = []
    seen: set[Formula] = set()

    def walk(f: Formula) -> None:
        if f in seen:
            return
        if isinstance(f, Not):
            walk(f.child)
        elif isinstance(f, And):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, Box):
            walk(f.child)
        seen.add(f)
        entries.append(f)

    walk(phi)
    return SubformulaIndex(entries)


@dataclass(frozen=True)
class ProfileFrame:
    """A set of profiles plus a box-respecting relation between them."""

    profiles: frozenset[Profile]
    rel: frozenset[tuple[Profile, Profile]]


def profiles(ix: SubformulaIndex) -> Iterator[Profile]:
    """All structure-respecting bit vectors, free bits in ascending order."""
    free = ix.free_positions
    for choice in product((0, 1), repeat=len(free)):
        assigned = dict(zip(free, choice))
        bits: list[int] = []
        for i, f in enumerate(ix.entries):
            if isinstance(f, (Atom, Box)):
                bits.append(assigned[i])
            elif isinstance(f, Falsum):
                bits.append(0)
            elif isinstance(f, Not):
                bits.append(1 - bits[ix.position[f.child]])
            else:
                bits.append(min(bits[ix.position[f.left]], bits[ix.position[f.right]]))
        yield tuple(bits)


def initial_frame(ix: SubformulaIndex, max_free_bits: int = FREE_BIT_LIMIT) -> ProfileFrame:
    """All profiles with every box-respecting edge."""
    if len(ix.free_positions) > max_free_bits:
        raise ValueError(
            f"{len(ix.free_positions)} free bits exceed the limit of "
            f"{max_free_bits}; the profile set would have 2**{len(ix.free_positions)} elements"
        )
    ps = list(profiles(ix))
    box_pairs = ix.box_pairs
    rel = frozenset(
        (x, y)
        for x in ps
        for y in ps
        if all(x[i] == 0 or y[j] == 1 for (i, j) in box_pairs)
    )
    return ProfileFrame(frozenset(ps), rel)


def refine_frame(frame: ProfileFrame, ix: SubformulaIndex) -> ProfileFrame:
    """One pruning step; the output is always contained in the input.

    A profile survives when each of its false boxes has a successor
    falsifying the body; an edge survives when both ends survive and the
    edge has a midpoint in the input frame.
    """
    succ: dict[Profile, set[Profile]] = {p: set() for p in frame.profiles}
    pred: dict[Profile, set[Profile]] = {p: set() for p in frame.profiles}
    for x, y in frame.rel:
        succ[x].add(y)
        pred[y].add(x)
    keep = set()
    for p in frame.profiles:
        ok = True
        for i, j in ix.box_pairs:
            if p[i] == 0 and not any(q[j] == 0 for q in succ[p]):
                ok = False
                break
        if ok:
            keep.add(p)
    rel = frozenset(
        (x, y)
        for (x, y) in frame.rel
        if x in keep and y in keep and succ[x] & pred[y]
    )
    return ProfileFrame(frozenset(keep), rel)


def fixpoint(phi: Formula, max_free_bits: int = FREE_BIT_LIMIT) -> tuple[ProfileFrame, int]:
    """Iterate refinement to stability; returns the frame and the step count.

    The step count is the least k with refine^(k+1) == refine^k.  The
    resulting frame is never empty; emptiness would invalidate the whole
    procedure, so it is checked on every run.
    """
    ix = build_index(phi)
    frame = initial_frame(ix, max_free_bits)
    iterations = 0
    while True:
        refined = refine_frame(frame, ix)
        if refined == frame:
            break
        frame = refined
        iterations += 1
    if not frame.profiles:
        raise InvariantError(f"empty fixpoint frame for {phi}")
    return frame, iterations


def kde_valid(phi: Formula, max_free_bits: int = FREE_BIT_LIMIT) -> bool:
    """Validity over dense frames: the target bit is set in every survivor."""
    frame, _ = fixpoint(phi, max_free_bits)
    last = build_index(phi).n - 1
    return all(p[last] == 1 for p in frame.profiles)


def frame_model(frame: ProfileFrame, ix: SubformulaIndex, root: Profile) -> KripkeModel:
    """Read a profile frame as a pointed Kripke model.

    Worlds are the profiles in lexicographic order; an atom holds where its
    bit is set.
    """
    order = sorted(frame.profiles)
    ids = {p: i for i, p in enumerate(order)}
    valuation: dict[str, set[int]] = {}
    for i, f in enumerate(ix.entries):
        if isinstance(f, Atom):
            valuation[f.name] = {ids[p] for p in order if p[i] == 1}
    return KripkeModel(
        worlds=list(range(len(order))),
        ra={(ids[x], ids[y]) for (x, y) in frame.rel},
        rb=set(),
        valuation=valuation,
        root=ids[root],
    )


def kde_sat(phi: Formula, max_free_bits: int = FREE_BIT_LIMIT) -> SatResult:
    """Satisfiability over dense frames, with the fixpoint frame as witness.

    SAT exactly when some surviving profile sets the target bit; the witness
    is the fixpoint model pointed at the lexicographically smallest such
    profile.
    """
    ix = build_index(phi)
    frame, _ = fixpoint(phi, max_free_bits)
    last = ix.n - 1
    hits = sorted(p for p in frame.profiles if p[last] == 1)
    if not hits:
        return SatResult(UNSAT, None, None)
    return SatResult(SAT, frame_model(frame, ix, hits[0]), None)


def counter_model(phi: Formula, max_free_bits: int = FREE_BIT_LIMIT) -> Optional[KripkeModel]:
    """For an invalid formula, the fixpoint model pointed at a failing profile."""
    ix = build_index(phi)
    frame, _ = fixpoint(phi, max_free_bits)
    last = ix.n - 1
    misses = sorted(p for p in frame.profiles if p[last] == 0)
    if not misses:
        return None
    return frame_model(frame, ix, misses[0])
