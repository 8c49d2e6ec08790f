#!/usr/bin/env python

"""
The finite abstraction of a set of labeled regions: one state per region,
a transition between every pair of regions that intersect (touching
counts), and every region holding the start configuration as an initial
state.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
import logging
from typing import Dict, FrozenSet, List, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from ltlgcs import config
from ltlgcs.error import DimensionError, InfeasiblePolytopeError, NoInitialRegionError
from ltlgcs.geometry import ArrayLike, LabeledRegion

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TransitionSystem:
    regions: Tuple[LabeledRegion, ...]
    initial: FrozenSet[int]
    adjacency: FrozenSet[Tuple[int, int]]
    q0: np.ndarray

    @property
    def states(self) -> range:
        return range(len(self.regions))

    def region_of(self, s: int) -> LabeledRegion:
        return self.regions[s]

    def label_of(self, s: int) -> FrozenSet[str]:
        return self.regions[s].labels

    def successors(self, s: int) -> List[int]:
        return sorted(t for (u, t) in self.adjacency if u == s)

    def letters(self) -> Set[FrozenSet[str]]:
        "The observed alphabet: every region label."
        return {region.labels for region in self.regions}

    def index_of(self, name: str) -> int:
        for s, region in enumerate(self.regions):
            if region.name == name:
                return s
        raise KeyError(name)

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for s, region in enumerate(self.regions):
            g.add_node(s, name=region.name, labels=sorted(region.labels))
        g.add_edges_from(self.adjacency)
        return g

    def to_dot(self) -> str:
        lines = ["digraph transys {"]
        for s, region in enumerate(self.regions):
            label = f"{region.name}\\n{{{','.join(sorted(region.labels))}}}"
            style = ", peripheries=2" if s in self.initial else ""
            lines.append(f'  s{s} [label="{label}"{style}];')
        for u, v in sorted(self.adjacency):
            if u < v:
                lines.append(f"  s{u} -> s{v} [dir=both];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_ts(
    regions: Sequence[LabeledRegion], q0: ArrayLike, pool_size: int = config.POOL_SIZE
) -> TransitionSystem:
    start = np.asarray(q0, dtype=float).reshape(-1)
    if not regions:
        raise NoInitialRegionError("no regions given")
    n = regions[0].n
    for region in regions:
        if region.n != n:
            raise DimensionError(f"region {region.name} is in R^{region.n}, expected R^{n}")
    if start.size != n:
        raise DimensionError(f"start has dimension {start.size}, regions are in R^{n}")
    names = [region.name for region in regions]
    if len(set(names)) != len(names):
        raise DimensionError("region names must be unique")

    def empty(i: int) -> bool:
        return regions[i].polytope.is_empty()

    def meet(pair: Tuple[int, int]) -> bool:
        i, j = pair
        return regions[i].polytope.intersects(regions[j].polytope)

    pairs = list(combinations(range(len(regions)), 2))
    with ThreadPoolExecutor(max_workers=max(1, pool_size)) as pool:
        emptiness = list(pool.map(empty, range(len(regions))))
        meets: Dict[Tuple[int, int], bool] = dict(zip(pairs, pool.map(meet, pairs)))
    for i, is_empty in enumerate(emptiness):
        if is_empty:
            raise InfeasiblePolytopeError(f"region {regions[i].name} is empty")

    adjacency = {(s, s) for s in range(len(regions))}
    for (i, j), touching in meets.items():
        if touching:
            adjacency |= {(i, j), (j, i)}
    initial = frozenset(
        s
        for s, region in enumerate(regions)
        if region.polytope.contains(start, config.FEASIBILITY_TOL)
    )
    if not initial:
        raise NoInitialRegionError(f"start {start.tolist()} lies in no region")
    log.debug(
        "transition system: %d regions, %d transitions, initial %s",
        len(regions),
        len(adjacency),
        sorted(initial),
    )
    return TransitionSystem(tuple(regions), initial, frozenset(adjacency), start)
