#!/usr/bin/env python

"""
Deterministic Büchi automata for a fragment of full LTL.

States come from formula progression (as for DFAs), which is deterministic
by construction. Each `U`/`F` subformula is an eventuality; a transition
fulfils it when the eventuality was not owed in the source state, or when
reading the letter discharges it. A level counter over the eventualities
turns these transition marks into a single set of accepting states.
Hopcroft reduction leaves states apart that differ only in acceptance, so
small automata are then shrunk further by merging states pairwise, keeping
a merge only when the language provably stays the same.

Progression cannot resolve a choice between a persistent obligation (`G`
or `R`) and something else, so any reachable state holding one under a
disjunction is refused, as is any construction that disagrees with
check_word on short lasso words.
"""

from itertools import combinations, product as cartesian
import logging
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

import networkx as nx

from ltlgcs import config
from ltlgcs.error import UnsupportedFormulaError
from ltlgcs.ltl.automata import (
    Automaton,
    AutomatonKind,
    accepts_lasso,
    explore,
    letter_key,
    minimize,
    normalize_alphabet,
    progress,
    reachable_states,
)
from ltlgcs.ltl.formula import (
    FALSE,
    Always,
    And,
    Eventually,
    Formula,
    Or,
    Release,
    Until,
    simplify,
    to_nnf,
)
from ltlgcs.ltl.semantics import Letter, Word, check_word

log = logging.getLogger(__name__)

CROSS_CHECK_WORDS = 20000  # upper bound on lasso words compared against check_word


def _pending(f: Formula) -> Set[Formula]:
    "Formulas reachable from f through & and | only."
    if isinstance(f, (And, Or)):
        return _pending(f.left) | _pending(f.right)
    return {f}


def _eventualities(f: Formula) -> List[Formula]:
    found: Dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, (Until, Eventually)):
            found[g] = None
        for child in g.children():
            walk(child)

    walk(f)
    return list(found)


def _persistent(f: Formula) -> bool:
    if isinstance(f, (Always, Release)):
        return True
    return any(_persistent(child) for child in f.children())


def _has_persistent_choice(f: Formula) -> bool:
    if isinstance(f, Or):
        return any(_persistent(part) for part in (f.left, f.right))
    if isinstance(f, And):
        return _has_persistent_choice(f.left) or _has_persistent_choice(f.right)
    return False


def ltl_to_dba(f: Formula, alphabet: Iterable[Iterable[str]]) -> Automaton:
    """
    DBA over exactly `alphabet` accepting the lasso words that satisfy f,
    or UnsupportedFormulaError.
    """
    nnf = to_nnf(f)
    letters = normalize_alphabet(alphabet)
    residuals, delta = explore(nnf, letters, finite=False)
    for residual in residuals:
        if _has_persistent_choice(residual):
            raise UnsupportedFormulaError(
                f"{f}: reachable obligation {residual} needs a nondeterministic choice"
            )

    eventualities = [
        u for u in _eventualities(nnf) if any(u in _pending(r) for r in residuals)
    ]
    top = len(eventualities)
    fulfilled: Dict[Tuple[Formula, Letter], bool] = {
        (u, letter): u not in _pending(simplify(progress(u, letter, finite=False)))
        for u in eventualities
        for letter in letters
    }

    def marked(level: int, state: int, letter: Letter) -> bool:
        u = eventualities[level]
        return u not in _pending(residuals[state]) or fulfilled[(u, letter)]

    # states of the degeneralized automaton are (residual, level) pairs
    index: Dict[Tuple[int, int], int] = {(0, 0): 0}
    order: List[Tuple[int, int]] = [(0, 0)]
    transitions: Dict[Tuple[int, Letter], int] = {}
    pos = 0
    while pos < len(order):
        state, level = order[pos]
        for letter in letters:
            nxt = 0 if level == top else level
            while nxt < top and marked(nxt, state, letter):
                nxt += 1
            target = (delta[(state, letter)], nxt)
            if target not in index:
                index[target] = len(order)
                order.append(target)
            transitions[(pos, letter)] = index[target]
        pos += 1
    accepting = {
        i for i, (state, level) in enumerate(order)
        if level == top and residuals[state] != FALSE
    }
    descriptions = [f"{residuals[state]} @{level}" for state, level in order]
    log.debug(
        "progression DBA for %s: %d residuals, %d eventualities, %d states",
        f,
        len(residuals),
        top,
        len(order),
    )
    aut = minimize(
        len(order), 0, letters, transitions, accepting, AutomatonKind.DBA, descriptions
    )
    if len(aut.states) <= config.DBA_REDUCE_LIMIT:
        aut = merge_states(aut)
    _cross_check(nnf, aut, letters)
    return aut


def _cross_check(f: Formula, aut: Automaton, letters: Sequence[Letter]) -> None:
    prefix_bound = config.DBA_CHECK_PREFIX
    cycle_bound = config.DBA_CHECK_CYCLE
    while prefix_bound > 0 and _count(len(letters), prefix_bound, cycle_bound) > CROSS_CHECK_WORDS:
        prefix_bound -= 1
    while cycle_bound > 1 and _count(len(letters), prefix_bound, cycle_bound) > CROSS_CHECK_WORDS:
        cycle_bound -= 1
    for plen in range(prefix_bound + 1):
        for clen in range(1, cycle_bound + 1):
            for prefix in cartesian(letters, repeat=plen):
                for cycle in cartesian(letters, repeat=clen):
                    word = Word.lasso_of(prefix, cycle)
                    if accepts_lasso(aut, prefix, cycle) != check_word(f, word):
                        raise UnsupportedFormulaError(
                            f"{f}: automaton disagrees with the semantics on {word}"
                        )


def _count(size: int, prefix_bound: int, cycle_bound: int) -> int:
    prefixes = sum(size**p for p in range(prefix_bound + 1))
    cycles = sum(size**c for c in range(1, cycle_bound + 1))
    return prefixes * cycles


Delta = Dict[Tuple[int, Letter], int]


def _included(
    first: Tuple[int, Delta, FrozenSet[int]],
    second: Tuple[int, Delta, FrozenSet[int]],
    letters: Sequence[Letter],
) -> bool:
    """
    Every word the first DBA accepts, the second accepts too: no reachable
    cycle of the product visits an accepting state of the first while
    avoiding the accepting states of the second.
    """
    (init_a, delta_a, acc_a), (init_b, delta_b, acc_b) = first, second
    graph = nx.DiGraph()
    start = (init_a, init_b)
    graph.add_node(start)
    stack = [start]
    while stack:
        a, b = stack.pop()
        for letter in letters:
            nxt = (delta_a[(a, letter)], delta_b[(b, letter)])
            if nxt not in graph:
                stack.append(nxt)
            graph.add_edge((a, b), nxt)
    rejecting = graph.subgraph([node for node in graph if node[1] not in acc_b])
    for component in nx.strongly_connected_components(rejecting):
        if not any(a in acc_a for a, _ in component):
            continue
        node = next(iter(component))
        if len(component) > 1 or rejecting.has_edge(node, node):
            return False
    return True


def same_language(first: Automaton, second: Automaton) -> bool:
    "Two DBAs over the same alphabet accept the same infinite words."
    if first.alphabet != second.alphabet:
        return False
    letters = sorted(first.alphabet, key=letter_key)
    a = (first.initial, dict(first.transitions), first.accepting)
    b = (second.initial, dict(second.transitions), second.accepting)
    return _included(a, b, letters) and _included(b, a, letters)


def merge_states(aut: Automaton) -> Automaton:
    """
    Merge pairs of states (the later one into the earlier, which keeps
    its acceptance) for as long as some merge leaves the language intact.
    """
    letters = sorted(aut.alphabet, key=letter_key)
    reference = (aut.initial, dict(aut.transitions), aut.accepting)
    delta: Delta = dict(aut.transitions)
    accepting = frozenset(aut.accepting)
    merged = 0
    changed = True
    while changed:
        changed = False
        live = sorted(reachable_states(aut.initial, letters, delta))
        for keep, drop in combinations(live, 2):
            trial = {
                (src, letter): keep if dst == drop else dst
                for (src, letter), dst in delta.items()
                if src != drop
            }
            candidate = (aut.initial, trial, accepting - {drop})
            if _included(reference, candidate, letters) and _included(
                candidate, reference, letters
            ):
                delta, accepting = trial, accepting - {drop}
                merged += 1
                changed = True
                break
    if not merged:
        return aut
    log.debug("merged %d of %d DBA states", merged, len(aut.states))
    return minimize(
        len(aut.states),
        aut.initial,
        letters,
        delta,
        set(accepting),
        AutomatonKind.DBA,
        [aut.descriptions.get(state, "") for state in aut.states],
    )
