#!/usr/bin/env python

"""
Deterministic automata over an explicit alphabet of label sets.

ltlf_to_dfa builds a DFA for a co-safe formula by formula progression:
each state is a residual formula (what is still owed after the letters read
so far), identified up to the syntactic normal form of
ltlgcs.ltl.formula.simplify, then minimized with Hopcroft's algorithm.
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
import logging
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

from ltlgcs.error import LetterError, NotCoSafeError
from ltlgcs.ltl.formula import (
    FALSE,
    TRUE,
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
    conjunction,
    disjunction,
    is_syntactically_cosafe,
    simplify,
    to_nnf,
)
from ltlgcs.ltl.semantics import Letter, Word, holds_empty

log = logging.getLogger(__name__)

State = int
Letters = Union[Word, Sequence[Iterable[str]]]


class AutomatonKind(Enum):
    DFA = "dfa"
    DBA = "dba"


def letter_key(letter: Letter) -> Tuple[int, List[str]]:
    return (len(letter), sorted(letter))


def show_letter(letter: Letter) -> str:
    return "{" + ",".join(sorted(letter)) + "}"


@dataclass(frozen=True, eq=False)
class Automaton:
    """
    (Q, q0, Σ, δ, F). States are 0..len(states)-1; δ is total over the
    alphabet. `descriptions` optionally names each state (its residual
    formula).
    """

    states: Tuple[State, ...]
    initial: State
    alphabet: FrozenSet[Letter]
    transitions: Dict[Tuple[State, Letter], State]
    accepting: FrozenSet[State]
    kind: AutomatonKind
    descriptions: Dict[State, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.initial not in self.states:
            raise ValueError("initial state is not a state")
        if not self.accepting <= frozenset(self.states):
            raise ValueError("accepting states are not states")
        for state in self.states:
            for letter in self.alphabet:
                if self.transitions.get((state, letter)) not in self.states:
                    raise ValueError(
                        f"no transition from {state} on {show_letter(letter)}"
                    )

    def step(self, state: State, letter: Iterable[str]) -> State:
        key = (state, frozenset(letter))
        try:
            return self.transitions[key]
        except KeyError:
            raise LetterError(f"{show_letter(key[1])} is not in the alphabet")

    def run(self, letters: Letters, start: Optional[State] = None) -> List[State]:
        "States visited reading letters, starting state included."
        state = self.initial if start is None else start
        out = [state]
        for letter in _letters(letters):
            state = self.step(state, letter)
            out.append(state)
        return out

    def accepts(self, letters: Letters) -> bool:
        "Finite-word acceptance: the run ends in an accepting state."
        return self.run(letters)[-1] in self.accepting

    def accepts_lasso(self, prefix: Letters, cycle: Letters) -> bool:
        return accepts_lasso(self, prefix, cycle)

    def successors(self, state: State) -> Set[State]:
        return {self.transitions[(state, letter)] for letter in self.alphabet}

    def to_dot(self, name: str = "automaton") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;", "  init [shape=point];"]
        for state in self.states:
            shape = "doublecircle" if state in self.accepting else "circle"
            label = self.descriptions.get(state, str(state)).replace('"', '\\"')
            lines.append(f'  q{state} [shape={shape}, label="{label}"];')
        lines.append(f"  init -> q{self.initial};")
        for (src, letter), dst in sorted(
            self.transitions.items(), key=lambda t: (t[0][0], letter_key(t[0][1]))
        ):
            lines.append(f'  q{src} -> q{dst} [label="{show_letter(letter)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _letters(letters: Letters) -> Sequence[Iterable[str]]:
    if isinstance(letters, Word):
        return letters.letters
    return letters


def accepts_lasso(aut: Automaton, prefix: Letters, cycle: Letters) -> bool:
    """
    Does aut accept prefix · cycle^ω?

    For a DBA, the cycle is iterated from the end of the prefix until the
    automaton state at the cycle start repeats; the word is accepted iff an
    accepting state is entered in the periodic part. A DFA only looks at the
    prefix.
    """
    loop = list(_letters(cycle))
    if not loop:
        raise ValueError("cycle must be nonempty")
    state = aut.run(prefix)[-1]
    if aut.kind is AutomatonKind.DFA:
        return state in aut.accepting
    seen: Dict[State, int] = {}
    hits: List[bool] = []
    while state not in seen:
        seen[state] = len(hits)
        visited = aut.run(loop, start=state)
        hits.append(any(q in aut.accepting for q in visited[1:]))
        state = visited[-1]
    return any(hits[seen[state] :])


def progress(f: Formula, letter: Letter, finite: bool) -> Formula:
    """
    Residual of the NNF formula f after reading letter: a·u satisfies f iff
    u satisfies the residual. With finite set, `X` is strong, so its residual
    also demands that another letter follows (`F true`).
    """
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Atom):
        return TRUE if f.name in letter else FALSE
    if isinstance(f, Not):
        assert isinstance(f.operand, Atom), "progression needs NNF"
        return FALSE if f.operand.name in letter else TRUE
    if isinstance(f, And):
        return conjunction(
            [progress(f.left, letter, finite), progress(f.right, letter, finite)]
        )
    if isinstance(f, Or):
        return disjunction(
            [progress(f.left, letter, finite), progress(f.right, letter, finite)]
        )
    if isinstance(f, Next):
        if finite:
            return conjunction([f.operand, Eventually(TRUE)])
        return f.operand
    if isinstance(f, Until):
        return disjunction(
            [
                progress(f.right, letter, finite),
                conjunction([progress(f.left, letter, finite), f]),
            ]
        )
    if isinstance(f, Eventually):
        return disjunction([progress(f.operand, letter, finite), f])
    if isinstance(f, Always):
        return conjunction([progress(f.operand, letter, finite), f])
    if isinstance(f, Release):
        return conjunction(
            [
                progress(f.right, letter, finite),
                disjunction([progress(f.left, letter, finite), f]),
            ]
        )
    raise TypeError(f"not a formula: {f!r}")


def explore(
    start: Formula, alphabet: Sequence[Letter], finite: bool
) -> Tuple[List[Formula], Dict[Tuple[State, Letter], State]]:
    "Breadth-first closure of start under progression."
    residuals: List[Formula] = [simplify(start)]
    index = {residuals[0]: 0}
    delta: Dict[Tuple[State, Letter], State] = {}
    queue = deque([0])
    while queue:
        state = queue.popleft()
        for letter in alphabet:
            nxt = simplify(progress(residuals[state], letter, finite))
            if nxt not in index:
                index[nxt] = len(residuals)
                residuals.append(nxt)
                queue.append(index[nxt])
            delta[(state, letter)] = index[nxt]
    return residuals, delta


def normalize_alphabet(alphabet: Iterable[Iterable[str]]) -> List[Letter]:
    letters = sorted({frozenset(letter) for letter in alphabet}, key=letter_key)
    if not letters:
        raise ValueError("alphabet must be nonempty")
    return letters


def ltlf_to_dfa(f: Formula, alphabet: Iterable[Iterable[str]]) -> Automaton:
    """
    Minimal DFA over exactly `alphabet` accepting the finite words that
    satisfy the co-safe formula f.
    """
    nnf = to_nnf(f)
    if not is_syntactically_cosafe(nnf):
        raise NotCoSafeError(str(f))
    letters = normalize_alphabet(alphabet)
    residuals, delta = explore(nnf, letters, finite=True)
    accepting = {i for i, r in enumerate(residuals) if holds_empty(r)}
    log.debug("progression DFA for %s: %d states", f, len(residuals))
    return minimize(
        len(residuals),
        0,
        letters,
        delta,
        accepting,
        AutomatonKind.DFA,
        [str(r) for r in residuals],
    )


def minimize(
    count: int,
    initial: State,
    alphabet: Sequence[Letter],
    delta: Dict[Tuple[State, Letter], State],
    accepting: Set[State],
    kind: AutomatonKind,
    descriptions: Optional[Sequence[str]] = None,
) -> Automaton:
    """
    Hopcroft partition refinement over the reachable states, then renumber
    blocks in breadth-first order from the initial block.
    """
    reachable = reachable_states(initial, alphabet, delta)
    final = frozenset(accepting & reachable)
    rest = frozenset(reachable - final)
    partition: List[FrozenSet[State]] = [b for b in (final, rest) if b]
    work: List[FrozenSet[State]] = [min(partition, key=len)] if len(partition) == 2 else []
    inverse: Dict[Tuple[State, Letter], Set[State]] = {}
    for (src, letter), dst in delta.items():
        if src in reachable:
            inverse.setdefault((dst, letter), set()).add(src)
    while work:
        splitter = work.pop()
        for letter in alphabet:
            pre: Set[State] = set()
            for state in splitter:
                pre |= inverse.get((state, letter), set())
            if not pre:
                continue
            refined: List[FrozenSet[State]] = []
            for block in partition:
                inside = block & pre
                outside = block - pre
                if inside and outside:
                    refined.extend([inside, outside])
                    if block in work:
                        work.remove(block)
                        work.extend([inside, outside])
                    else:
                        work.append(min(inside, outside, key=len))
                else:
                    refined.append(block)
            partition = refined
    block_of = {state: i for i, block in enumerate(partition) for state in block}
    # renumber breadth-first
    order = {block_of[initial]: 0}
    queue = deque([initial])
    rep = {0: initial}
    while queue:
        state = queue.popleft()
        for letter in alphabet:
            dst = delta[(state, letter)]
            if block_of[dst] not in order:
                order[block_of[dst]] = len(order)
                rep[order[block_of[dst]]] = dst
                queue.append(dst)
    transitions = {
        (order[block_of[src]], letter): order[block_of[dst]]
        for (src, letter), dst in delta.items()
        if src in reachable
    }
    names: Dict[State, str] = {}
    if descriptions is not None:
        names = {new: descriptions[old] for new, old in rep.items()}
    return Automaton(
        states=tuple(range(len(order))),
        initial=0,
        alphabet=frozenset(alphabet),
        transitions=transitions,
        accepting=frozenset(order[block_of[q]] for q in final),
        kind=kind,
        descriptions=names,
    )


def reachable_states(
    initial: State, alphabet: Sequence[Letter], delta: Dict[Tuple[State, Letter], State]
) -> Set[State]:
    seen = {initial}
    queue = deque([initial])
    while queue:
        state = queue.popleft()
        for letter in alphabet:
            dst = delta[(state, letter)]
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    return seen


def is_minimal(aut: Automaton) -> bool:
    "No two states of aut are equivalent."
    letters = sorted(aut.alphabet, key=letter_key)
    again = minimize(
        len(aut.states),
        aut.initial,
        letters,
        dict(aut.transitions),
        set(aut.accepting),
        aut.kind,
    )
    return len(again.states) == len(aut.states)
