"""Satisfiability over weakly dense bimodal frames.

A finite formula set is satisfiable exactly when one of its saturations is.
For a saturation, every negated b-box spawns an ordinary successor problem
of strictly smaller degree.  Every negated a-box starts a window chain: an
initial window whose first part carries the diamond body, then repeated
continuations whose first parts must all be satisfiable.  An infinite such
chain would witness the diamond outright; because windows over one anchor
form a finite space, a chain that repeats a window can be looped instead,
so the search accepts on the first repetition (lasso mode) or after a
pigeonhole-sized countdown (counter mode).  The two acceptances agree: a
lasso unrolls to any length, and a chain longer than the number of distinct
windows must repeat.

Every SAT verdict is converted into an explicit finite model (worlds are
the distinct saturations the accepted search touched, chains close their
loops with b-edges) and verified against the model checker before being
reported; a verdict whose witness fails verification raises InvariantError
rather than returning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import InvariantError
from .formula import (
    Atom,
    Box,
    Formula,
    MOD_A,
    MOD_B,
    Not,
    box_inverse,
    csf,
    set_degree,
    sf,
    sort_key,
)
from .oracle import KripkeModel, is_weakly_dense, model_check
from .saturation import Saturation, is_saturation_of, saturation_family
from . import windows as _windows

SAT = "SAT"
UNSAT = "UNSAT"

LASSO = "lasso"
COUNTER = "counter"


def counter_bound(members: Iterable[Formula]) -> int:
    """Upper bound on distinct windows for an anchor: 2**(M*(d+1)).

    M counts csf(sf(anchor)); every window part is a subset of that
    universe, so the bound dominates the number of window tuples.
    """
    members = frozenset(members)
    m = len(csf(sf(members)))
    return 2 ** (m * (set_degree(members) + 1))


@dataclass(frozen=True)
class BoundPolicy:
    """How a window chain is allowed to stop.

    In counter mode the budget is normally computed per anchor via
    counter_bound; counter_value pins it explicitly (used by tests, and by
    the budget-zero degenerate case, which accepts immediately).
    """

    mode: str = LASSO
    counter_value: Optional[int] = None

    def __post_init__(self) -> None:
        if self.mode not in (LASSO, COUNTER):
            raise ValueError(f"unknown bound mode {self.mode!r}")


@dataclass
class SatStats:
    """Search counters.

    saturations counts candidates consumed at choice points, windows counts
    windows entered across all chain searches, max_depth is the deepest
    recursive successor problem (the root counts as depth 0).
    """

    saturations: int = 0
    windows: int = 0
    max_depth: int = 0

    def as_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "saturations": self.saturations,
            "windows": self.windows,
        }


@dataclass(frozen=True)
class SatResult:
    verdict: str
    witness: Optional[KripkeModel]
    stats: Optional[SatStats]


@dataclass
class Trace:
    """Accepted search tree: one node per satisfiable saturation."""

    members: frozenset[Formula]
    b_children: list[tuple[Formula, "Trace"]] = field(default_factory=list)
    a_chains: list[tuple[Formula, "ChainWitness"]] = field(default_factory=list)


@dataclass
class ChainWitness:
    """Heads of an accepted window chain; the tail loops back to cycle_start."""

    heads: list[Trace]
    cycle_start: int


def _diamond_bodies(members: frozenset[Formula], modality: str) -> list[Formula]:
    bodies = [
        f.child.child
        for f in members
        if isinstance(f, Not)
        and isinstance(f.child, Box)
        and f.child.modality == modality
    ]
    return sorted(bodies, key=sort_key)


class _Search:
    def __init__(self, policy: BoundPolicy, memo: bool = True):
        self.policy = policy
        self.memo_enabled = memo
        self.memo: dict[frozenset[Formula], Optional[Trace]] = {}
        self.stats = SatStats()
        self._cont_cache: dict[tuple, tuple] = {}

    # -- saturation choice points ------------------------------------------

    def family(self, seed: frozenset[Formula]) -> tuple[Saturation, ...]:
        fam = saturation_family(seed)
        self.stats.saturations += len(fam)
        return fam

    def continuations_of(self, window: _windows.Window) -> tuple:
        key = (window.anchor.members, window.parts)
        got = self._cont_cache.get(key)
        if got is None:
            got = tuple(_windows.continuations(window))
            self._cont_cache[key] = got
        return got

    # -- main recursion ----------------------------------------------------

    def sat_members(self, members: frozenset[Formula], depth: int) -> Optional[Trace]:
        if self.memo_enabled and members in self.memo:
            return self.memo[members]
        if depth > self.stats.max_depth:
            self.stats.max_depth = depth
        node: Optional[Trace] = Trace(members)
        for body in _diamond_bodies(members, MOD_B):
            seed = frozenset({Not(body)}) | box_inverse(members, MOD_B)
            child = None
            for cand in self.family(seed):
                child = self.sat_members(cand.members, depth + 1)
                if child is not None:
                    break
            if child is None:
                node = None
                break
            node.b_children.append((body, child))
        if node is not None:
            anchor = Saturation(members, members)
            for body in _diamond_bodies(members, MOD_A):
                chain = None
                for start in _windows.initial_windows(anchor, Not(body)):
                    self.stats.windows += 1
                    chain = self.chain(start, depth)
                    if chain is not None:
                        break
                if chain is None:
                    node = None
                    break
                node.a_chains.append((body, chain))
        if self.memo_enabled:
            self.memo[members] = node
        return node

    # -- window chains -----------------------------------------------------

    def chain(
        self,
        start: _windows.Window,
        depth: int,
        budget_override: Optional[int] = None,
        fold: bool = True,
    ) -> Optional[ChainWitness]:
        if self.policy.mode == COUNTER:
            budget = budget_override
            if budget is None:
                budget = counter_bound(start.anchor.members)
            return self.counter_chain(start, budget, depth, fold)
        return self.lasso_chain(start, depth)

    def lasso_chain(self, start: _windows.Window, depth: int) -> Optional[ChainWitness]:
        """Accept on the first window repeated along the current chain."""
        first = self.sat_members(start.head, depth + 1)
        if first is None:
            return None
        wins = [start]
        heads = [first]
        iters = [iter(self.continuations_of(start))]
        seen = {start.parts: 0}
        while wins:
            nxt = next(iters[-1], None)
            if nxt is None:
                del seen[wins[-1].parts]
                wins.pop()
                heads.pop()
                iters.pop()
                continue
            self.stats.windows += 1
            node = self.sat_members(nxt.head, depth + 1)
            if node is None:
                continue
            if nxt.parts in seen:
                return ChainWitness(list(heads), seen[nxt.parts])
            seen[nxt.parts] = len(wins)
            wins.append(nxt)
            heads.append(node)
            iters.append(iter(self.continuations_of(nxt)))
        return None

    def counter_chain(
        self, start: _windows.Window, budget: int, depth: int, fold: bool = True
    ) -> Optional[ChainWitness]:
        """Accept once budget many windows with satisfiable heads line up.

        A chain that fails with r steps still owed also fails with more
        owed, so failures are memoized by window under the smallest budget
        they failed at; this prunes rewalks without changing the accepted
        language.
        """
        if budget <= 0:
            return ChainWitness([], 0)
        min_fail: dict[tuple, int] = {}
        wins: list[_windows.Window] = []
        heads: list[Trace] = []
        iters: list[Iterator] = []
        owed: list[int] = []

        def note_fail(parts: tuple, r: int) -> None:
            prev = min_fail.get(parts)
            if prev is None or r < prev:
                min_fail[parts] = r

        def enter(window: _windows.Window, r: int) -> bool:
            prev = min_fail.get(window.parts)
            if prev is not None and prev <= r:
                return False
            node = self.sat_members(window.head, depth + 1)
            if node is None:
                note_fail(window.parts, 1)
                return False
            wins.append(window)
            heads.append(node)
            iters.append(iter(self.continuations_of(window)))
            owed.append(r)
            return True

        def accept() -> ChainWitness:
            return _loop_of(wins, heads) if fold else ChainWitness([], 0)

        if not enter(start, budget):
            return None
        if budget == 1:
            return accept()
        while wins:
            nxt = next(iters[-1], None)
            if nxt is None:
                note_fail(wins[-1].parts, owed[-1])
                wins.pop()
                heads.pop()
                iters.pop()
                owed.pop()
                continue
            self.stats.windows += 1
            if enter(nxt, owed[-1] - 1):
                if owed[-1] == 1:
                    return accept()
        return None


def _loop_of(wins: list, heads: list[Trace]) -> ChainWitness:
    """Fold an accepted chain at its first repeated window."""
    seen: dict[tuple, int] = {}
    for i, window in enumerate(wins):
        j = seen.get(window.parts)
        if j is not None:
            return ChainWitness(heads[:i], j)
        seen[window.parts] = i
    raise InvariantError(
        "accepted counter chain contains no repeated window; "
        "the budget was below the true window count"
    )


# --------------------------------------------------------------------------
# Public entry points.


def extract_model(trace: Trace) -> KripkeModel:
    """Turn an accepted search tree into a finite pointed model.

    One world per distinct saturation.  b-diamond children get b-edges;
    every head of a window chain gets an a-edge from its anchor, each head
    a b-edge from the next one, and the head after the last is the first of
    the cycle, closing the loop.
    """
    ids: dict[frozenset[Formula], int] = {}
    order: list[frozenset[Formula]] = []
    ra: set[tuple[int, int]] = set()
    rb: set[tuple[int, int]] = set()

    def world(node: Trace) -> int:
        got = ids.get(node.members)
        if got is not None:
            return got
        wid = len(order)
        ids[node.members] = wid
        order.append(node.members)
        for _, child in node.b_children:
            rb.add((wid, world(child)))
        for _, chain in node.a_chains:
            head_ids = [world(h) for h in chain.heads]
            count = len(head_ids)
            for i, hid in enumerate(head_ids):
                ra.add((wid, hid))
                after = head_ids[i + 1] if i + 1 < count else head_ids[chain.cycle_start]
                rb.add((after, hid))
        return wid

    root = world(trace)
    valuation: dict[str, set[int]] = {}
    for wid, members in enumerate(order):
        for f in members:
            if isinstance(f, Atom):
                valuation.setdefault(f.name, set()).add(wid)
    return KripkeModel(
        worlds=list(range(len(order))),
        ra=ra,
        rb=rb,
        valuation=valuation,
        root=root,
    )


def _verified_witness(trace: Trace, at_root: Iterable[Formula]) -> KripkeModel:
    model = extract_model(trace)
    if not is_weakly_dense(model):
        raise InvariantError("extracted witness frame is not weakly dense")
    for f in sorted(at_root, key=sort_key):
        if not model_check(model, model.root, f):
            raise InvariantError(f"extracted witness fails model_check on {f}")
    return model


def sat_set(
    formulas: Iterable[Formula],
    policy: Optional[BoundPolicy] = None,
    memo: bool = True,
) -> SatResult:
    """Satisfiability of a finite bimodal formula set over weakly dense frames.

    SAT exactly when some saturation of the set is satisfiable; the verdict
    carries a verified witness model and search statistics.
    """
    targets = frozenset(formulas)
    search = _Search(policy or BoundPolicy(), memo)
    for cand in search.family(targets):
        trace = search.sat_members(cand.members, 0)
        if trace is not None:
            model = _verified_witness(trace, targets)
            return SatResult(SAT, model, search.stats)
    return SatResult(UNSAT, None, search.stats)


def sat_saturation(
    saturation: Saturation,
    policy: Optional[BoundPolicy] = None,
    memo: bool = True,
) -> SatResult:
    """Satisfiability of a single saturation (diamond by diamond)."""
    if not is_saturation_of(saturation.members, saturation.seed):
        raise ValueError("not a valid saturation of its seed")
    search = _Search(policy or BoundPolicy(), memo)
    trace = search.sat_members(saturation.members, 0)
    if trace is None:
        return SatResult(UNSAT, None, search.stats)
    model = _verified_witness(trace, saturation.members)
    return SatResult(SAT, model, search.stats)


def sat_window_chain(
    window: _windows.Window,
    policy: Optional[BoundPolicy] = None,
    memo: bool = True,
) -> bool:
    """Whether a window chain starting here can be completed.

    This is the one entry point that honours an explicit counter_value on
    the policy; full solves always compute the per-anchor bound, which
    keeps the loop-folding of accepted chains well defined.
    """
    policy = policy or BoundPolicy()
    search = _Search(policy, memo)
    return search.chain(window, 0, policy.counter_value, fold=False) is not None
