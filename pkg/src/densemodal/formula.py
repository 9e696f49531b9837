"""Formula ASTs, concrete syntax and set-level closure operators.

The core grammar has five node kinds: atoms, falsum, negation, conjunction
and an indexed box.  Top, disjunction, implication and diamonds are surface
sugar: the parser rewrites them into the core on the way in and the printer
reintroduces them on the way out, so the solvers only ever handle five
shapes.  Unimodal formulas use box index "a" internally; the printer writes
a bare "[]"/"<>" for them in unimodal mode.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

MOD_A = "a"
MOD_B = "b"

UNIMODAL = "unimodal"
BIMODAL = "bimodal"


class ParseError(Exception):
    """Malformed or mode-incompatible input text."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (column {position})")
        self.message = message
        self.position = position


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Falsum(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    modality: str
    child: Formula

    def __post_init__(self) -> None:
        if self.modality not in (MOD_A, MOD_B):
            raise ValueError(f"unknown modality {self.modality!r}")


FALSUM = Falsum()
TOP = Not(FALSUM)


def lor(left: Formula, right: Formula) -> Formula:
    """Disjunction, in core form."""
    return Not(And(Not(left), Not(right)))


def implies(left: Formula, right: Formula) -> Formula:
    """Implication, in core form."""
    return Not(And(left, Not(right)))


def diamond(modality: str, child: Formula) -> Formula:
    """Diamond, in core form."""
    return Not(Box(modality, Not(child)))


@lru_cache(maxsize=None)
def sort_key(phi: Formula) -> tuple:
    """Total structural order on formulas.

    Every enumeration in the package iterates formulas in this order, so
    results are reproducible across processes regardless of hash seeding.
    """
    if isinstance(phi, Falsum):
        return (0,)
    if isinstance(phi, Atom):
        return (1, phi.name)
    if isinstance(phi, Not):
        return (2, sort_key(phi.child))
    if isinstance(phi, And):
        return (3, sort_key(phi.left), sort_key(phi.right))
    return (4, phi.modality, sort_key(phi.child))


def sorted_formulas(formulas: Iterable[Formula]) -> list[Formula]:
    return sorted(formulas, key=sort_key)


@lru_cache(maxsize=None)
def degree(phi: Formula) -> int:
    """Maximum box-nesting depth."""
    if isinstance(phi, (Atom, Falsum)):
        return 0
    if isinstance(phi, Not):
        return degree(phi.child)
    if isinstance(phi, And):
        return max(degree(phi.left), degree(phi.right))
    return 1 + degree(phi.child)


@lru_cache(maxsize=None)
def size(phi: Formula) -> int:
    """Number of AST nodes; parentheses and modality indices do not count."""
    if isinstance(phi, (Atom, Falsum)):
        return 1
    if isinstance(phi, Not):
        return 1 + size(phi.child)
    if isinstance(phi, And):
        return 1 + size(phi.left) + size(phi.right)
    return 1 + size(phi.child)


def measures(phi: Formula) -> tuple[int, int]:
    return degree(phi), size(phi)


@lru_cache(maxsize=None)
def atom_names(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Atom):
        return frozenset((phi.name,))
    if isinstance(phi, Falsum):
        return frozenset()
    if isinstance(phi, Not):
        return atom_names(phi.child)
    if isinstance(phi, And):
        return atom_names(phi.left) | atom_names(phi.right)
    return atom_names(phi.child)


@lru_cache(maxsize=None)
def is_unimodal(phi: Formula) -> bool:
    """True when no b-indexed box occurs anywhere in the tree."""
    if isinstance(phi, (Atom, Falsum)):
        return True
    if isinstance(phi, Not):
        return is_unimodal(phi.child)
    if isinstance(phi, And):
        return is_unimodal(phi.left) and is_unimodal(phi.right)
    return phi.modality == MOD_A and is_unimodal(phi.child)


def set_degree(formulas: Iterable[Formula]) -> int:
    return max((degree(f) for f in formulas), default=0)


def set_size(formulas: Iterable[Formula]) -> int:
    return sum(size(f) for f in formulas)


def csf(formulas: Iterable[Formula]) -> frozenset[Formula]:
    """Classical closure: split conjunctions and negations, never boxes."""
    out: set[Formula] = set()
    todo = list(formulas)
    while todo:
        f = todo.pop()
        if f in out:
            continue
        out.add(f)
        if isinstance(f, And):
            todo.append(f.left)
            todo.append(f.right)
        elif isinstance(f, Not):
            c = f.child
            todo.append(c)
            if isinstance(c, And):
                todo.append(Not(c.left))
                todo.append(Not(c.right))
    return frozenset(out)


def sf(formulas: Iterable[Formula]) -> frozenset[Formula]:
    """Full closure: like csf, but boxes and negated boxes unfold too."""
    out: set[Formula] = set()
    todo = list(formulas)
    while todo:
        f = todo.pop()
        if f in out:
            continue
        out.add(f)
        if isinstance(f, And):
            todo.append(f.left)
            todo.append(f.right)
        elif isinstance(f, Box):
            todo.append(f.child)
        elif isinstance(f, Not):
            c = f.child
            todo.append(c)
            if isinstance(c, And):
                todo.append(Not(c.left))
                todo.append(Not(c.right))
            elif isinstance(c, Box):
                todo.append(Not(c.child))
    return frozenset(out)


def box_inverse(formulas: Iterable[Formula], modality: str) -> frozenset[Formula]:
    """Bodies of the top-level boxes with the given index."""
    return frozenset(
        f.child for f in formulas if isinstance(f, Box) and f.modality == modality
    )


# --------------------------------------------------------------------------
# Concrete syntax.
#
# atoms        [a-z][a-z0-9_]*        constants   false, true
# unary        ~  []  <>  [a]  [b]  <a>  <b>      (tightest, right-assoc)
# binary       &   then   |   then   ->           (loosest, right-assoc)

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<atom>[a-z][a-z0-9_]*)"
    r"|(?P<op>\[a\]|\[b\]|\[\]|<a>|<b>|<>|->|[&|~()])"
)

_UNARY_TOKENS = {"~", "[]", "<>", "[a]", "[b]", "<a>", "<b>"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "atom":
            word = m.group()
            kind = word if word in ("false", "true") else "atom"
            tokens.append((kind, word, pos))
        elif m.lastgroup == "op":
            tokens.append((m.group(), m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def parse(text: str, mode: str = UNIMODAL) -> Formula:
    """Parse concrete syntax into the desugared core AST.

    In unimodal mode the indexed operators [a]/[b]/<a>/<b> are rejected; in
    bimodal mode the bare []/<> are rejected.  Raises ParseError with a
    character position on any failure.
    """
    if mode not in (UNIMODAL, BIMODAL):
        raise ValueError(f"unknown mode {mode!r}")
    tokens = _tokenize(text)
    index = 0

    def peek() -> tuple[str, str, int]:
        return tokens[index]

    def advance() -> tuple[str, str, int]:
        nonlocal index
        tok = tokens[index]
        index += 1
        return tok

    def unary_node(op: str, pos: int, child: Formula) -> Formula:
        if op == "~":
            return Not(child)
        if op in ("[]", "<>"):
            if mode == BIMODAL:
                raise ParseError(
                    f"bare {op!r} is not available in bimodal mode", pos
                )
            return Box(MOD_A, child) if op == "[]" else diamond(MOD_A, child)
        if mode == UNIMODAL:
            raise ParseError(
                f"indexed operator {op!r} is not available in unimodal mode", pos
            )
        modality = MOD_A if op in ("[a]", "<a>") else MOD_B
        if op.startswith("["):
            return Box(modality, child)
        return diamond(modality, child)

    def parse_unary() -> Formula:
        kind, _, pos = peek()
        if kind in _UNARY_TOKENS:
            advance()
            return unary_node(kind, pos, parse_unary())
        return parse_primary()

    def parse_primary() -> Formula:
        kind, word, pos = advance()
        if kind == "atom":
            return Atom(word)
        if kind == "false":
            return FALSUM
        if kind == "true":
            return Not(FALSUM)
        if kind == "(":
            inner = parse_implies()
            closing, _, cpos = advance()
            if closing != ")":
                raise ParseError("expected ')'", cpos)
            return inner
        raise ParseError("expected a formula", pos)

    def parse_and() -> Formula:
        left = parse_unary()
        if peek()[0] == "&":
            advance()
            return And(left, parse_and())
        return left

    def parse_or() -> Formula:
        left = parse_and()
        if peek()[0] == "|":
            advance()
            return lor(left, parse_or())
        return left

    def parse_implies() -> Formula:
        left = parse_or()
        if peek()[0] == "->":
            advance()
            return implies(left, parse_implies())
        return left

    result = parse_implies()
    kind, word, pos = peek()
    if kind != "eof":
        raise ParseError(f"unexpected trailing input {word!r}", pos)
    return result


# Printer precedence levels; unary operators and atoms bind tightest.
_LV_IMP, _LV_OR, _LV_AND, _LV_TIGHT = 1, 2, 3, 4


def render(phi: Formula, mode: str | None = None) -> str:
    """Print a formula so that parse(render(f), mode) == f.

    The printer re-sugars true, disjunction, implication and diamonds.  With
    mode=None the mode is inferred: bimodal exactly when a b-box occurs.
    """
    if mode is None:
        mode = UNIMODAL if is_unimodal(phi) else BIMODAL
    if mode not in (UNIMODAL, BIMODAL):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == UNIMODAL and not is_unimodal(phi):
        raise ValueError("cannot render a b-box in unimodal mode")
    text, _ = _render(phi, mode)
    return text


def _wrap(rendered: tuple[str, int], minimum: int) -> str:
    text, level = rendered
    return f"({text})" if level < minimum else text


def _box_symbol(modality: str, mode: str) -> str:
    if mode == UNIMODAL:
        return "[]"
    return "[a]" if modality == MOD_A else "[b]"


def _diamond_symbol(modality: str, mode: str) -> str:
    if mode == UNIMODAL:
        return "<>"
    return "<a>" if modality == MOD_A else "<b>"


def _render(phi: Formula, mode: str) -> tuple[str, int]:
    if isinstance(phi, Atom):
        return phi.name, _LV_TIGHT
    if isinstance(phi, Falsum):
        return "false", _LV_TIGHT
    if isinstance(phi, Box):
        sym = _box_symbol(phi.modality, mode)
        return sym + _wrap(_render(phi.child, mode), _LV_TIGHT), _LV_TIGHT
    if isinstance(phi, And):
        left = _wrap(_render(phi.left, mode), _LV_AND + 1)
        right = _wrap(_render(phi.right, mode), _LV_AND)
        return f"{left} & {right}", _LV_AND
    # Negation: check the sugar patterns before falling back to "~".
    c = phi.child
    if isinstance(c, Falsum):
        return "true", _LV_TIGHT
    if isinstance(c, Box) and isinstance(c.child, Not):
        sym = _diamond_symbol(c.modality, mode)
        return sym + _wrap(_render(c.child.child, mode), _LV_TIGHT), _LV_TIGHT
    if isinstance(c, And):
        if isinstance(c.left, Not) and isinstance(c.right, Not):
            left = _wrap(_render(c.left.child, mode), _LV_OR + 1)
            right = _wrap(_render(c.right.child, mode), _LV_OR)
            return f"{left} | {right}", _LV_OR
        if isinstance(c.right, Not):
            left = _wrap(_render(c.left, mode), _LV_IMP + 1)
            right = _wrap(_render(c.right.child, mode), _LV_IMP)
            return f"{left} -> {right}", _LV_IMP
    return "~" + _wrap(_render(c, mode), _LV_TIGHT), _LV_TIGHT


def all_formulas(
    max_size: int,
    names: Iterable[str],
    modalities: tuple[str, ...] = (MOD_A,),
) -> list[Formula]:
    """Every core-AST formula with at most max_size nodes, smallest first.

    The order is fully deterministic: by node count, and within one count by
    construction order (negations, then boxes, then conjunctions by split).
    """
    names = sorted(names)
    by_size: dict[int, list[Formula]] = {1: [FALSUM] + [Atom(n) for n in names]}
    for k in range(2, max_size + 1):
        batch: list[Formula] = [Not(f) for f in by_size[k - 1]]
        for m in modalities:
            batch.extend(Box(m, f) for f in by_size[k - 1])
        for i in range(1, k - 1):
            batch.extend(
                And(l, r) for l in by_size[i] for r in by_size[k - 1 - i]
            )
        by_size[k] = batch
    result: list[Formula] = []
    for k in range(1, max_size + 1):
        result.extend(by_size[k])
    return result
