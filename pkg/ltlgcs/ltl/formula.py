#!/usr/bin/env python

"""
LTL formula trees.

Formulas are immutable, hashable dataclasses. `str()` prints the concrete
grammar accepted by ltlgcs.ltl.parser, except for the internal-only
`Bottom` (printed `false`, which the parser also accepts) and `Release`
(printed `R`, which it does not).
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
import re
from typing import ClassVar, FrozenSet, Iterable, List, Tuple


class Kind(Enum):
    TRUE = "true"
    FALSE = "false"
    ATOM = "atom"
    NOT = "!"
    AND = "&"
    OR = "|"
    NEXT = "X"
    UNTIL = "U"
    RELEASE = "R"
    EVENTUALLY = "F"
    ALWAYS = "G"


KEYWORDS = frozenset(["X", "F", "G", "U", "true", "false"])
ATOM_NAME = re.compile(r"[a-zA-Z0-9_]+\Z")


@dataclass(frozen=True)
class Formula:
    kind: ClassVar[Kind]

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Top(Formula):
    kind = Kind.TRUE


@dataclass(frozen=True)
class Bottom(Formula):
    kind = Kind.FALSE


@dataclass(frozen=True)
class Atom(Formula):
    kind = Kind.ATOM
    name: str

    def __post_init__(self) -> None:
        if not ATOM_NAME.match(self.name) or self.name in KEYWORDS:
            raise ValueError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True)
class Unary(Formula):
    operand: Formula

    def children(self) -> Tuple[Formula, ...]:
        return (self.operand,)


@dataclass(frozen=True)
class Binary(Formula):
    left: Formula
    right: Formula

    def children(self) -> Tuple[Formula, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class Not(Unary):
    kind = Kind.NOT


@dataclass(frozen=True)
class Next(Unary):
    kind = Kind.NEXT


@dataclass(frozen=True)
class Eventually(Unary):
    kind = Kind.EVENTUALLY


@dataclass(frozen=True)
class Always(Unary):
    kind = Kind.ALWAYS


@dataclass(frozen=True)
class And(Binary):
    kind = Kind.AND


@dataclass(frozen=True)
class Or(Binary):
    kind = Kind.OR


@dataclass(frozen=True)
class Until(Binary):
    kind = Kind.UNTIL


@dataclass(frozen=True)
class Release(Binary):
    """
    `left R right`: right holds up to and including the first position
    where left holds, or forever. Only produced by to_nnf.
    """

    kind = Kind.RELEASE


TRUE = Top()
FALSE = Bottom()


def _paren(f: Formula) -> str:
    if isinstance(f, (Top, Bottom, Atom)):
        return to_text(f)
    return f"({to_text(f)})"


def to_text(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return f"!{_paren(f.operand)}"
    if isinstance(f, Unary):
        return f"{f.kind.value} {_paren(f.operand)}"
    if isinstance(f, Binary):
        return f"{_paren(f.left)} {f.kind.value} {_paren(f.right)}"
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> FrozenSet[str]:
    if isinstance(f, Atom):
        return frozenset([f.name])
    out: FrozenSet[str] = frozenset()
    for child in f.children():
        out |= atoms(child)
    return out


def size(f: Formula) -> int:
    return 1 + sum(size(child) for child in f.children())


def temporal_depth(f: Formula) -> int:
    "Number of temporal operators in f."
    own = 1 if isinstance(f, (Next, Eventually, Always, Until, Release)) else 0
    return own + sum(temporal_depth(child) for child in f.children())


def to_nnf(f: Formula) -> Formula:
    """
    Push negations down to atoms.

    ¬(a U b) becomes (¬a) R (¬b) and ¬(a R b) becomes (¬a) U (¬b); ¬○ is
    pushed through ○ unchanged, so negated next steps are strong.
    """
    if isinstance(f, (Top, Bottom, Atom)):
        return f
    if isinstance(f, Not):
        return _negate(f.operand)
    if isinstance(f, Unary):
        return type(f)(to_nnf(f.operand))
    if isinstance(f, Binary):
        return type(f)(to_nnf(f.left), to_nnf(f.right))
    raise TypeError(f"not a formula: {f!r}")


def _negate(f: Formula) -> Formula:
    "NNF of ¬f."
    if isinstance(f, Top):
        return FALSE
    if isinstance(f, Bottom):
        return TRUE
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return to_nnf(f.operand)
    if isinstance(f, And):
        return Or(_negate(f.left), _negate(f.right))
    if isinstance(f, Or):
        return And(_negate(f.left), _negate(f.right))
    if isinstance(f, Next):
        return Next(_negate(f.operand))
    if isinstance(f, Until):
        return Release(_negate(f.left), _negate(f.right))
    if isinstance(f, Release):
        return Until(_negate(f.left), _negate(f.right))
    if isinstance(f, Eventually):
        return Always(_negate(f.operand))
    if isinstance(f, Always):
        return Eventually(_negate(f.operand))
    raise TypeError(f"not a formula: {f!r}")


def is_nnf(f: Formula) -> bool:
    if isinstance(f, Not):
        return isinstance(f.operand, Atom)
    return all(is_nnf(child) for child in f.children())


def is_syntactically_cosafe(f: Formula) -> bool:
    """
    True iff f only uses true, false, atoms, negated atoms, &, |, X, U and F.
    """
    if isinstance(f, (Top, Bottom, Atom)):
        return True
    if isinstance(f, Not):
        return isinstance(f.operand, Atom)
    if isinstance(f, (Always, Release)):
        return False
    return all(is_syntactically_cosafe(child) for child in f.children())


# Syntactic normal form used to identify automaton states.


@lru_cache(maxsize=None)
def sort_key(f: Formula) -> str:
    return to_text(f)


def _flatten(f: Formula, cls: type) -> Iterable[Formula]:
    if isinstance(f, cls):
        yield from _flatten(f.left, cls)  # type: ignore[attr-defined]
        yield from _flatten(f.right, cls)  # type: ignore[attr-defined]
    else:
        yield f


def conjunction(parts: Iterable[Formula]) -> Formula:
    return _junction(parts, And, TRUE, FALSE)


def disjunction(parts: Iterable[Formula]) -> Formula:
    return _junction(parts, Or, FALSE, TRUE)


def _junction(parts: Iterable[Formula], cls: type, unit: Formula, zero: Formula) -> Formula:
    seen = {}
    for part in parts:
        for leaf in _flatten(part, cls):
            if leaf == zero:
                return zero
            if leaf != unit:
                seen[leaf] = True
    items: List[Formula] = sorted(seen, key=sort_key)
    if not items:
        return unit
    out = items[-1]
    for item in reversed(items[:-1]):
        out = cls(item, out)
    return out


@lru_cache(maxsize=65536)
def simplify(f: Formula) -> Formula:
    """
    Absorb true/false, flatten and deduplicate & and |, and order their
    operands. Equal results mean equal languages; the converse is left to
    automaton minimization.
    """
    if isinstance(f, And):
        return conjunction(simplify(p) for p in _flatten(f, And))
    if isinstance(f, Or):
        return disjunction(simplify(p) for p in _flatten(f, Or))
    if isinstance(f, Unary) and not isinstance(f, Not):
        inner = simplify(f.operand)
        if isinstance(inner, Bottom) and isinstance(f, (Next, Eventually, Always)):
            return FALSE
        if isinstance(inner, Top) and isinstance(f, Always):
            return TRUE
        return type(f)(inner)
    if isinstance(f, Binary):
        left, right = simplify(f.left), simplify(f.right)
        if isinstance(f, Until) and isinstance(right, Bottom):
            return FALSE
        if isinstance(f, Release) and isinstance(right, Top):
            return TRUE
        return type(f)(left, right)
    return f
