#!/usr/bin/env python

"""
Words and the reference semantics of LTL over them.

check_word is the oracle that automata and plans are checked against, so
it works directly from the semantic clauses and shares no code with the
automaton constructions.

Finite words are read with LTLf semantics on the negation normal form of
the formula: `X` is a strong next, so it fails at the last letter. Lasso
words (a prefix followed by a cycle repeated forever) are evaluated
exactly: every position at or after the lasso index folds onto the cycle,
and `U`/`R` are solved as least/greatest fixpoints over those finitely many
positions.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from ltlgcs.error import LassoRequiredError
from ltlgcs.ltl.formula import (
    Always,
    And,
    Atom,
    Bottom,
    Eventually,
    Formula,
    Next,
    Not,
    Or,
    Release,
    Top,
    Until,
    is_syntactically_cosafe,
    to_nnf,
)

Letter = FrozenSet[str]


@dataclass(frozen=True)
class Word:
    letters: Tuple[Letter, ...]
    lasso: Optional[int] = None  # index where the repeating cycle starts

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "letters", tuple(frozenset(letter) for letter in self.letters)
        )
        if self.lasso is not None and not 0 <= self.lasso < len(self.letters):
            raise ValueError(
                f"lasso index {self.lasso} outside word of length {len(self.letters)}"
            )

    @classmethod
    def of(cls, letters: Iterable[Iterable[str]], lasso: Optional[int] = None) -> "Word":
        return cls(tuple(frozenset(letter) for letter in letters), lasso)

    @classmethod
    def lasso_of(
        cls, prefix: Iterable[Iterable[str]], cycle: Iterable[Iterable[str]]
    ) -> "Word":
        head = [frozenset(letter) for letter in prefix]
        loop = [frozenset(letter) for letter in cycle]
        if not loop:
            raise ValueError("lasso cycle must be nonempty")
        return cls(tuple(head + loop), len(head))

    @property
    def is_lasso(self) -> bool:
        return self.lasso is not None

    @property
    def prefix(self) -> Tuple[Letter, ...]:
        if self.lasso is None:
            return self.letters
        return self.letters[: self.lasso]

    @property
    def cycle(self) -> Tuple[Letter, ...]:
        if self.lasso is None:
            return ()
        return self.letters[self.lasso :]

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        def show(letter: Letter) -> str:
            return "{" + ",".join(sorted(letter)) + "}"

        head = " ".join(show(letter) for letter in self.prefix)
        if self.lasso is None:
            return head
        loop = " ".join(show(letter) for letter in self.cycle)
        return f"{head} ({loop})^w".strip()


def check_word(f: Formula, w: Word) -> bool:
    """
    Does w satisfy f? Raises LassoRequiredError for a finite word and a
    formula outside the co-safe fragment.
    """
    if w.lasso is None:
        nnf = to_nnf(f)
        if not is_syntactically_cosafe(nnf):
            raise LassoRequiredError(f"finite word given for {f}")
        return _Finite(w.letters).holds(nnf, 0)
    return _Lasso(w.letters, w.lasso).sat(f)[0]


def holds_empty(f: Formula) -> bool:
    """
    Does the empty suffix satisfy f? Only boolean combinations of `true`
    do; everything that needs a current letter fails.
    """
    if isinstance(f, Top):
        return True
    if isinstance(f, And):
        return holds_empty(f.left) and holds_empty(f.right)
    if isinstance(f, Or):
        return holds_empty(f.left) or holds_empty(f.right)
    return False


class _Finite:
    def __init__(self, letters: Tuple[Letter, ...]) -> None:
        self.letters = letters
        self.n = len(letters)
        self.memo: Dict[Tuple[Formula, int], bool] = {}

    def holds(self, f: Formula, i: int) -> bool:
        if i >= self.n:
            return holds_empty(f)
        key = (f, i)
        if key not in self.memo:
            self.memo[key] = self._holds(f, i)
        return self.memo[key]

    def _holds(self, f: Formula, i: int) -> bool:
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Atom):
            return f.name in self.letters[i]
        if isinstance(f, Not):
            return not self.holds(f.operand, i)
        if isinstance(f, And):
            return self.holds(f.left, i) and self.holds(f.right, i)
        if isinstance(f, Or):
            return self.holds(f.left, i) or self.holds(f.right, i)
        if isinstance(f, Next):
            return i + 1 < self.n and self.holds(f.operand, i + 1)
        if isinstance(f, Eventually):
            return any(self.holds(f.operand, j) for j in range(i, self.n))
        if isinstance(f, Always):
            return all(self.holds(f.operand, j) for j in range(i, self.n))
        if isinstance(f, Until):
            for j in range(i, self.n):
                if self.holds(f.right, j):
                    return True
                if not self.holds(f.left, j):
                    return False
            return False
        if isinstance(f, Release):
            for j in range(i, self.n):
                if not self.holds(f.right, j):
                    return False
                if self.holds(f.left, j):
                    return True
            return True
        raise TypeError(f"not a formula: {f!r}")


class _Lasso:
    def __init__(self, letters: Tuple[Letter, ...], lasso: int) -> None:
        self.letters = letters
        self.n = len(letters)
        self.succ = [i + 1 for i in range(self.n - 1)] + [lasso]
        self.memo: Dict[Formula, List[bool]] = {}

    def sat(self, f: Formula) -> List[bool]:
        "Truth value of f at every position."
        if f not in self.memo:
            self.memo[f] = self._sat(f)
        return self.memo[f]

    def _sat(self, f: Formula) -> List[bool]:
        n = self.n
        if isinstance(f, Top):
            return [True] * n
        if isinstance(f, Bottom):
            return [False] * n
        if isinstance(f, Atom):
            return [f.name in letter for letter in self.letters]
        if isinstance(f, Not):
            return [not v for v in self.sat(f.operand)]
        if isinstance(f, And):
            return [a and b for a, b in zip(self.sat(f.left), self.sat(f.right))]
        if isinstance(f, Or):
            return [a or b for a, b in zip(self.sat(f.left), self.sat(f.right))]
        if isinstance(f, Next):
            inner = self.sat(f.operand)
            return [inner[self.succ[i]] for i in range(n)]
        if isinstance(f, Until):
            return self._until(self.sat(f.left), self.sat(f.right))
        if isinstance(f, Eventually):
            return self._until([True] * n, self.sat(f.operand))
        if isinstance(f, Release):
            return self._release(self.sat(f.left), self.sat(f.right))
        if isinstance(f, Always):
            return self._release([False] * n, self.sat(f.operand))
        raise TypeError(f"not a formula: {f!r}")

    def _until(self, left: List[bool], right: List[bool]) -> List[bool]:
        # least fixpoint of U = right | (left & X U)
        out = [False] * self.n
        changed = True
        while changed:
            changed = False
            for i in reversed(range(self.n)):
                value = right[i] or (left[i] and out[self.succ[i]])
                if value != out[i]:
                    out[i] = value
                    changed = True
        return out

    def _release(self, left: List[bool], right: List[bool]) -> List[bool]:
        # greatest fixpoint of R = right & (left | X R)
        out = [True] * self.n
        changed = True
        while changed:
            changed = False
            for i in reversed(range(self.n)):
                value = right[i] and (left[i] or out[self.succ[i]])
                if value != out[i]:
                    out[i] = value
                    changed = True
        return out
