"""
Slim/fat analysis of tree languages.

A language is slim when some K bounds the thickness of all its trees. For a
reduced automaton with n states this is decided on the state graph, where
(p, q) is an edge iff δ(a, p, r) = q or δ(a, r, p) = q for some a and r. The
language is fat iff the graph has a cycle through a special edge (one realizable with
a sibling state reached by infinitely many trees) from which F is reachable;
slim languages never exceed thickness 2^(n-1).

Besides the graph decision, `exact_max_thickness` explores level
configurations directly and serves as an independent oracle.
"""

import heapq
import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property

import networkx as nx

from presslim.automata.tree import State, TreeAutomaton, ensure_reduced
from presslim.exceptions import (
    InconclusiveCapException,
    NotFatException,
    NotReducedException,
    StateNotInfiniteException,
)
from presslim.helpers.misc import sort_key
from presslim.trees import Symbol, Tree, levels

logger = logging.getLogger(__name__)


class Side(StrEnum):
    """
    Which child the edge source occupies.
    """

    LEFT = "left"
    RIGHT = "right"


class SlimKind(StrEnum):
    SLIM = "slim"
    FAT = "fat"


@dataclass(frozen=True)
class Realizer:
    """
    One way to realize an edge (p, q): δ(symbol, p, sibling) = q for LEFT,
    δ(symbol, sibling, p) = q for RIGHT.
    """

    symbol: Symbol
    side: Side
    sibling: State


@dataclass(frozen=True, eq=False)
class StateGraph:
    automaton: TreeAutomaton
    graph: nx.DiGraph
    marked: bool = False

    def edges(self) -> list[tuple[State, State]]:
        return sorted(self.graph.edges, key=lambda edge: (self._index(edge[0]), self._index(edge[1])))

    def realizers(self, source: State, target: State) -> list[Realizer]:
        return sorted(
            self.graph.edges[source, target]["realizers"],
            key=lambda r: (sort_key(r.symbol), r.side, self._index(r.sibling)),
        )

    def is_special(self, source: State, target: State) -> bool:
        return bool(self.graph.edges[source, target].get("special", False))

    def special_edges(self) -> list[tuple[State, State]]:
        return [edge for edge in self.edges() if self.is_special(*edge)]

    @cached_property
    def cyclic_states(self) -> frozenset[State]:
        """
        States lying on a cycle: SCCs with two or more states, or a self-loop.
        """

        cyclic = set()
        for component in nx.strongly_connected_components(self.graph):
            if len(component) > 1:
                cyclic |= component
            else:
                (state,) = component
                if self.graph.has_edge(state, state):
                    cyclic.add(state)
        return frozenset(cyclic)

    @cached_property
    def infinite_states(self) -> frozenset[State]:
        infinite = set(self.cyclic_states)
        for state in self.cyclic_states:
            infinite |= nx.descendants(self.graph, state)
        return frozenset(infinite)

    @cached_property
    def components(self) -> dict[State, int]:
        return {
            state: i
            for i, component in enumerate(nx.strongly_connected_components(self.graph))
            for state in component
        }

    def _index(self, state: State) -> int:
        return self.automaton.index(state)

    def __str__(self):
        return f"StateGraph<vertices={self.graph.number_of_nodes()}, edges={self.graph.number_of_edges()}>"


@dataclass(frozen=True)
class FatRecipe:
    """
    How a fat language is pumped: a special edge, a closed walk through it
    (starting and ending at the edge source) and a path from the source into F.
    """

    special_edge: tuple[State, State]
    cycle: tuple[State, ...]
    path_to_final: tuple[State, ...]


@dataclass(frozen=True)
class SlimVerdict:
    kind: SlimKind
    states: int
    bound: int
    exact_max_thickness: int | None = None
    recipe: FatRecipe | None = None

    @property
    def is_slim(self) -> bool:
        return self.kind is SlimKind.SLIM

    def __str__(self):
        return f"SlimVerdict<{self.kind}, n={self.states}, bound={self.bound}>"


@dataclass(frozen=True)
class LevelConfig:
    """
    Guessed states of one level's nodes.

    The exploration only ever builds these in sorted state order: the width
    reached below a level doesn't depend on sibling order, so configs are
    deduplicated as multisets and the sequence is kept only as the type.
    """

    entries: tuple[State, ...]

    def __len__(self):
        return len(self.entries)


@dataclass
class _Exploration:
    automaton: TreeAutomaton
    cap: int
    options: dict[State, list[tuple[State, ...]]] = field(default_factory=dict)

    def __post_init__(self):
        for state in self.automaton.states:
            contributions = set()
            if state in self.automaton.leaf_states:
                contributions.add(())
            for symbol in self.automaton.alphabet:
                for pair in self.automaton.predecessors(symbol, state):
                    contributions.add(tuple(sorted(pair, key=self.automaton.index)))
            self.options[state] = sorted(contributions, key=lambda c: [self.automaton.index(s) for s in c])

    def successors(self, config: LevelConfig) -> tuple[set[LevelConfig], bool]:
        """
        Canonical configs of the next level, and whether one exceeds the cap.

        Every state of a reduced automaton closes as a leaf or has predecessors,
        so a partial combination that is already too wide extends to a full one.
        """

        partial: set[tuple[State, ...]] = {()}
        for state in config.entries:
            grown = set()
            for prefix in partial:
                for contribution in self.options[state]:
                    combined = tuple(sorted(prefix + contribution, key=self.automaton.index))
                    if len(combined) > self.cap:
                        return set(), True
                    grown.add(combined)
            partial = grown
        return {LevelConfig(entries) for entries in partial if entries}, False


def build_graph(automaton: TreeAutomaton) -> StateGraph:
    """
    The state graph with every realizing (symbol, side, sibling) triple recorded.
    """

    if not automaton.reduced:
        raise NotReducedException("The state graph is defined for reduced automata.")

    graph = nx.DiGraph()
    graph.add_nodes_from(automaton.states)
    symbols = sorted(automaton.alphabet, key=sort_key)
    for symbol in symbols:
        for left in automaton.states:
            for right in automaton.states:
                target = automaton.delta[(symbol, left, right)]
                _add_realizer(graph, left, target, Realizer(symbol, Side.LEFT, right))
                _add_realizer(graph, right, target, Realizer(symbol, Side.RIGHT, left))
    return StateGraph(automaton=automaton, graph=graph)


def _add_realizer(graph: nx.DiGraph, source: State, target: State, realizer: Realizer) -> None:
    if graph.has_edge(source, target):
        graph.edges[source, target]["realizers"].add(realizer)
    else:
        graph.add_edge(source, target, realizers={realizer})


def infinite_state(graph: StateGraph, state: State) -> bool:
    """
    Whether infinitely many trees evaluate to state: some cycle reaches it.
    """

    return state in graph.infinite_states


def mark_special(graph: StateGraph) -> StateGraph:
    marked = graph.graph.copy()
    for source, target, data in marked.edges(data=True):
        data["realizers"] = set(data["realizers"])
        data["special"] = any(infinite_state(graph, r.sibling) for r in data["realizers"])
    return StateGraph(automaton=graph.automaton, graph=marked, marked=True)


def slim_bound(states: int) -> int:
    return 2 ** max(states - 1, 0)


def _analyze(automaton: TreeAutomaton) -> tuple[TreeAutomaton, StateGraph, FatRecipe | None]:
    reduced = ensure_reduced(automaton)
    graph = mark_special(build_graph(reduced))
    return reduced, graph, _find_fat_recipe(graph)


def _find_fat_recipe(graph: StateGraph) -> FatRecipe | None:
    """
    The least special edge (by state indices) inside an SCC from which F is reachable.
    """

    automaton = graph.automaton
    for source, target in graph.special_edges():
        if graph.components[source] != graph.components[target]:
            continue

        reachable = {source} | nx.descendants(graph.graph, source)
        finals = [state for state in automaton.states if state in automaton.final and state in reachable]
        if not finals:
            continue

        if source == target:
            cycle = (source, source)
        else:
            component = [s for s in automaton.states if graph.components[s] == graph.components[source]]
            back = nx.shortest_path(graph.graph.subgraph(component), target, source)
            cycle = (source, *back)

        paths = nx.single_source_shortest_path(graph.graph, source)
        final = min(finals, key=lambda state: (len(paths[state]), automaton.index(state)))
        return FatRecipe(special_edge=(source, target), cycle=cycle, path_to_final=tuple(paths[final]))
    return None


def decide_slim(automaton: TreeAutomaton, with_exact_thickness: bool = False) -> SlimVerdict:
    reduced, graph, recipe = _analyze(automaton)
    states = reduced.size
    bound = slim_bound(states)

    if recipe is not None:
        logger.info("Language is fat: special edge %s lies on a cycle reaching F.", recipe.special_edge)
        return SlimVerdict(kind=SlimKind.FAT, states=states, bound=bound, recipe=recipe)

    exact = exact_max_thickness(reduced, bound) if with_exact_thickness else None
    logger.info("Language is slim: n=%d, bound=%d, exact=%s.", states, bound, exact)
    return SlimVerdict(kind=SlimKind.SLIM, states=states, bound=bound, exact_max_thickness=exact)


def exact_max_thickness(automaton: TreeAutomaton, cap: int | None = None) -> int | SlimKind:
    """
    Widest level among accepted trees, found by exploring level configurations.

    Starts from one-entry configs (q_f) and expands every entry either as a
    leaf or into the child states of some transition. Returns the maximal
    width when exploration closes under the cap, SlimKind.FAT when a wider
    level is reachable and the cap is at least 2^(n-1).
    """

    reduced = ensure_reduced(automaton)
    bound = slim_bound(reduced.size)
    cap = bound if cap is None else cap

    exploration = _Exploration(reduced, cap)
    starts = [LevelConfig((state,)) for state in reduced.states if state in reduced.final]
    if not starts:
        return 0

    seen = set(starts)
    frontier = [(-1, index, config) for index, config in enumerate(starts)]
    heapq.heapify(frontier)
    counter = len(starts)
    widest = 0

    while frontier:
        _, _, config = heapq.heappop(frontier)
        widest = max(widest, len(config))
        successors, overflow = exploration.successors(config)
        if overflow:
            if cap >= bound:
                logger.debug("Level wider than %d reached: language is fat.", cap)
                return SlimKind.FAT
            raise InconclusiveCapException(
                f"A level wider than {cap} is reachable, but {cap} is below the bound {bound}."
            )
        for successor in successors:
            if successor not in seen:
                seen.add(successor)
                counter += 1
                # widest first, so fat languages overflow early
                heapq.heappush(frontier, (-len(successor), counter, successor))

    logger.debug("Explored %d level configurations, widest %d.", len(seen), widest)
    return widest


def _widest_level(t: Tree) -> int:
    widths = [len(level) for level in levels(t)]
    return widths.index(max(widths))


def _extend(graph: StateGraph, tree: Tree, source: State, target: State, sibling_tree) -> Tree:
    """
    Put tree under a new root so that the result evaluates to target.
    """

    realizers = graph.realizers(source, target)
    realizer = next((r for r in realizers if sibling_tree.accepts_sibling(graph, r)), realizers[0])
    side = sibling_tree.build(graph, realizer)
    if realizer.side is Side.LEFT:
        return Tree(realizer.symbol, tree, side)
    return Tree(realizer.symbol, side, tree)


class _WitnessSibling:
    def accepts_sibling(self, graph: StateGraph, realizer: Realizer) -> bool:
        return True

    def build(self, graph: StateGraph, realizer: Realizer) -> Tree:
        return graph.automaton.witnesses[realizer.sibling]


@dataclass(frozen=True)
class _TallSibling:
    min_height: int

    def accepts_sibling(self, graph: StateGraph, realizer: Realizer) -> bool:
        return infinite_state(graph, realizer.sibling)

    def build(self, graph: StateGraph, realizer: Realizer) -> Tree:
        return _tall_tree(graph, realizer.sibling, self.min_height)


def _walk(graph: StateGraph, tree: Tree, path: tuple[State, ...]) -> Tree:
    for source, target in zip(path, path[1:]):
        tree = _extend(graph, tree, source, target, _WitnessSibling())
    return tree


def _shortest_cycle(graph: StateGraph, state: State) -> tuple[State, ...]:
    if graph.graph.has_edge(state, state):
        return state, state

    automaton = graph.automaton
    component = [s for s in automaton.states if graph.components[s] == graph.components[state]]
    subgraph = graph.graph.subgraph(component)
    candidates = [
        (state, *nx.shortest_path(subgraph, successor, state))
        for successor in sorted(subgraph.successors(state), key=automaton.index)
    ]
    return min(candidates, key=len)


def _tall_tree(graph: StateGraph, state: State, min_height: int) -> Tree:
    automaton = graph.automaton
    sources = [s for s in automaton.states if s in graph.cyclic_states]
    paths = []
    for source in sources:
        try:
            paths.append(nx.shortest_path(graph.graph, source, state))
        except nx.NetworkXNoPath:
            continue
    path = min(paths, key=lambda p: (len(p), automaton.index(p[0])))

    start = path[0]
    cycle = _shortest_cycle(graph, start)
    missing = max(0, min_height - (len(path) - 1))
    rounds = math.ceil(missing / (len(cycle) - 1))

    tree = automaton.witnesses[start]
    for _ in range(rounds):
        tree = _walk(graph, tree, cycle)
    return _walk(graph, tree, tuple(path))


def tall_tree_for_state(automaton: TreeAutomaton, state: State, min_height: int) -> Tree:
    """
    A tree evaluating to state with height at least min_height.

    Starts from a witness of a cyclic state, goes around its cycle as often as
    needed and then along a shortest path to state, splicing in witness trees
    for the sibling states.
    """

    if not automaton.reduced:
        raise NotReducedException("Tall trees are built on reduced automata.")
    graph = mark_special(build_graph(automaton))
    if not infinite_state(graph, state):
        raise StateNotInfiniteException(f"Only finitely many trees evaluate to {state!r}.")
    return _tall_tree(graph, state, min_height)


def pump_thick_witness(automaton: TreeAutomaton, thickness_floor: int) -> Tree:
    """
    An accepted tree of thickness greater than thickness_floor.

    Goes around the fat cycle thickness_floor times. Each pass through the
    special edge hangs a sibling tree tall enough to reach the currently widest
    level, which widens that level by at least one node. Finally follows the
    path into F.
    """

    reduced, graph, recipe = _analyze(automaton)
    if recipe is None:
        raise NotFatException("The language is slim, its thickness is bounded.")

    source, target = recipe.special_edge
    tree = reduced.witnesses[source]
    for _ in range(thickness_floor):
        tree = _extend(graph, tree, source, target, _TallSibling(_widest_level(tree)))
        tree = _walk(graph, tree, recipe.cycle[1:])
    return _walk(graph, tree, recipe.path_to_final)
