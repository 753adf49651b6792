import itertools
from collections.abc import Callable, Iterable

import networkx as nx
from hypothesis import strategies as st

from presslim.automata.tree import State, TreeAutomaton, ensure_reduced
from presslim.slimness import build_graph, decide_slim, mark_special
from presslim.trees import Symbol, Tree

SYMBOLS = ("a", "b")


def tabulate(
    alphabet: Iterable[Symbol],
    states: Iterable[State],
    init: Callable[[Symbol], State],
    rule: Callable[[Symbol, State, State], State],
    final: Iterable[State],
) -> TreeAutomaton:
    alphabet = list(alphabet)
    states = list(states)
    return TreeAutomaton(
        alphabet=alphabet,
        states=states,
        init={symbol: init(symbol) for symbol in alphabet},
        delta={
            (symbol, p, q): rule(symbol, p, q)
            for symbol in alphabet
            for p, q in itertools.product(states, states)
        },
        final=final,
    )


def trees(alphabet: Iterable[Symbol] = ("a",), max_leaves: int = 12) -> st.SearchStrategy[Tree]:
    labels = st.sampled_from(list(alphabet))
    return st.recursive(
        labels.map(Tree),
        lambda children: st.builds(Tree, labels, children, children),
        max_leaves=max_leaves,
    )


@st.composite
def tree_automata(draw, max_states: int = 5, max_symbols: int = 2) -> TreeAutomaton:
    size = draw(st.integers(min_value=1, max_value=max_states))
    alphabet = SYMBOLS[:draw(st.integers(min_value=1, max_value=max_symbols))]
    states = tuple(range(size))
    pick = st.sampled_from(states)
    init = {symbol: draw(pick) for symbol in alphabet}
    delta = {(symbol, p, q): draw(pick) for symbol in alphabet for p in states for q in states}
    final = draw(st.frozensets(pick, min_size=1))
    return TreeAutomaton(alphabet=alphabet, states=states, init=init, delta=delta, final=final)


def reduced_automata(**kwargs) -> st.SearchStrategy[TreeAutomaton]:
    return tree_automata(**kwargs).map(ensure_reduced)


def make_slim(automaton: TreeAutomaton) -> TreeAutomaton:
    """
    Drop from F every state reachable from a special edge inside a strongly connected component.
    """

    reduced = ensure_reduced(automaton)
    graph = mark_special(build_graph(reduced))
    doomed = set()
    for source, target in graph.special_edges():
        if graph.components[source] == graph.components[target]:
            doomed |= {source} | nx.descendants(graph.graph, source)
    slim = TreeAutomaton(
        alphabet=reduced.alphabet,
        states=reduced.states,
        init=reduced.init,
        delta=reduced.delta,
        final=reduced.final - doomed,
    )
    return ensure_reduced(slim)


def slim_automata(**kwargs) -> st.SearchStrategy[TreeAutomaton]:
    return tree_automata(**kwargs).map(make_slim)


def fat_automata(**kwargs) -> st.SearchStrategy[TreeAutomaton]:
    return reduced_automata(**kwargs).filter(lambda automaton: not decide_slim(automaton).is_slim)


def comb(size: int) -> Tree:
    """
    The left comb with size inner nodes.
    """

    t = Tree("a")
    for _ in range(size):
        t = Tree("a", t, Tree("a"))
    return t
