"""
Deterministic bottom-up tree automata over binary trees.

An automaton (Q, ι, δ, F) assigns ι(a) to a leaf labeled a and δ(a, p, q) to an
inner node labeled a whose children evaluate to p and q. Tables are dense and
total; partial tables are rejected unless explicitly completed with a sink.
"""

import itertools
import logging
from collections.abc import Callable, Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import TypeAlias

from presslim.consts import BOX
from presslim.exceptions import (
    IncompleteAutomatonException,
    NotReducedException,
    StateNotProducibleException,
    UndeclaredStateException,
    UnknownSymbolException,
)
from presslim.helpers.misc import ordered, render_symbol
from presslim.trees import Symbol, Tree

logger = logging.getLogger(__name__)

State: TypeAlias = Hashable
Transition: TypeAlias = tuple[Symbol, State, State]

DEFAULT_SINK = "sink"


@dataclass(frozen=True, eq=False)
class TreeAutomaton:
    alphabet: frozenset[Symbol]
    states: tuple[State, ...]
    init: Mapping[Symbol, State]
    delta: Mapping[Transition, State]
    final: frozenset[State]
    reduced: bool = False
    witnesses: Mapping[State, Tree] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "final", frozenset(self.final))
        object.__setattr__(self, "init", MappingProxyType(dict(self.init)))
        object.__setattr__(self, "delta", MappingProxyType(dict(self.delta)))
        object.__setattr__(self, "witnesses", MappingProxyType(dict(self.witnesses)))
        self.validate()

    def validate(self) -> None:
        declared = set(self.states)
        if len(declared) != len(self.states):
            raise UndeclaredStateException("States must be declared once each.")
        if not self.final <= declared:
            raise UndeclaredStateException(f"Final states {ordered(self.final - declared)} are not declared.")

        for symbol in self.alphabet:
            if symbol not in self.init:
                raise IncompleteAutomatonException(f"No start state for symbol {render_symbol(symbol)!r}.")
            if self.init[symbol] not in declared:
                raise UndeclaredStateException(f"Start state {self.init[symbol]!r} is not declared.")

        for symbol, p, q in itertools.product(self.alphabet, self.states, self.states):
            target = self.delta.get((symbol, p, q))
            if target is None:
                raise IncompleteAutomatonException(
                    f"No transition for ({render_symbol(symbol)}, {p}, {q})."
                )
            if target not in declared:
                raise UndeclaredStateException(f"Transition target {target!r} is not declared.")

    @property
    def size(self) -> int:
        return len(self.states)

    @cached_property
    def _indices(self) -> dict[State, int]:
        return {state: i for i, state in enumerate(self.states)}

    def index(self, state: State) -> int:
        return self._indices[state]

    @cached_property
    def _predecessors(self) -> dict[tuple[Symbol, State], tuple[tuple[State, State], ...]]:
        collected: dict[tuple[Symbol, State], list[tuple[State, State]]] = {}
        for symbol in ordered(self.alphabet):
            for p, q in itertools.product(self.states, self.states):
                collected.setdefault((symbol, self.delta[(symbol, p, q)]), []).append((p, q))
        return {key: tuple(pairs) for key, pairs in collected.items()}

    def predecessors(self, symbol: Symbol, state: State) -> tuple[tuple[State, State], ...]:
        """
        All child-state pairs (p, q) with δ(symbol, p, q) = state, in table order.
        """

        return self._predecessors.get((symbol, state), ())

    @cached_property
    def leaf_states(self) -> frozenset[State]:
        return frozenset(self.init.values())

    def start(self, symbol: Symbol) -> State:
        try:
            return self.init[symbol]
        except KeyError:
            raise UnknownSymbolException(f"Symbol {render_symbol(symbol)!r} is not in the alphabet.")

    def step(self, symbol: Symbol, left: State, right: State) -> State:
        try:
            return self.delta[(symbol, left, right)]
        except KeyError:
            raise UnknownSymbolException(f"Symbol {render_symbol(symbol)!r} is not in the alphabet.")

    def accepts(self, t: Tree) -> bool:
        return run(self, t) in self.final

    def __str__(self):
        return f"TreeAutomaton<states={len(self.states)}, symbols={len(self.alphabet)}, {self.reduced=}>"


@dataclass(frozen=True)
class StateWitness:
    state: State
    tree: Tree


@dataclass(frozen=True)
class Reduction:
    automaton: TreeAutomaton
    kept: tuple[State, ...]
    removed: frozenset[State]


def run(automaton: TreeAutomaton, t: Tree) -> State:
    """
    The state the automaton assigns to t, computed bottom-up without recursion.
    """

    evaluated: dict[int, State] = {}
    stack: list[tuple[Tree, bool]] = [(t, False)]
    while stack:
        node, expanded = stack.pop()
        if node.is_leaf:
            evaluated[id(node)] = automaton.start(node.label)
        elif expanded:
            evaluated[id(node)] = automaton.step(node.label, evaluated[id(node.left)], evaluated[id(node.right)])
        else:
            stack.append((node, True))
            stack.append((node.right, False))
            stack.append((node.left, False))
    return evaluated[id(t)]


def reduce(automaton: TreeAutomaton) -> Reduction:
    """
    Restrict the automaton to producible states.

    Producible states are computed as a least fixpoint by rounds: round 0 takes
    the image of ι, round k+1 adds δ(a, p, q) for producible p, q. A state first
    reached in round k gets a witness of height k, which is minimal.
    """

    symbols = ordered(automaton.alphabet)
    witnesses: dict[State, Tree] = {}
    for symbol in symbols:
        witnesses.setdefault(automaton.init[symbol], Tree(symbol))

    rounds = 0
    while True:
        known = [state for state in automaton.states if state in witnesses]
        found: dict[State, Tree] = {}
        for symbol in symbols:
            for p, q in itertools.product(known, known):
                target = automaton.delta[(symbol, p, q)]
                if target not in witnesses and target not in found:
                    found[target] = Tree(symbol, witnesses[p], witnesses[q])
        if not found:
            break
        witnesses.update(found)
        rounds += 1

    kept = tuple(state for state in automaton.states if state in witnesses)
    removed = frozenset(automaton.states) - frozenset(kept)
    logger.debug("Reduced automaton in %d rounds: kept %d, removed %d states.", rounds, len(kept), len(removed))

    reduced = TreeAutomaton(
        alphabet=automaton.alphabet,
        states=kept,
        init=automaton.init,
        delta={
            (symbol, p, q): automaton.delta[(symbol, p, q)]
            for symbol in automaton.alphabet
            for p, q in itertools.product(kept, kept)
        },
        final=automaton.final & frozenset(kept),
        reduced=True,
        witnesses=witnesses,
    )
    return Reduction(automaton=reduced, kept=kept, removed=removed)


def ensure_reduced(automaton: TreeAutomaton) -> TreeAutomaton:
    return automaton if automaton.reduced else reduce(automaton).automaton


def witness_for_state(automaton: TreeAutomaton, state: State) -> StateWitness:
    """
    A minimal-height tree evaluating to state, recorded while reducing.
    """

    if not automaton.reduced:
        raise NotReducedException("Witnesses are only recorded for reduced automata.")
    if state not in automaton.witnesses:
        raise StateNotProducibleException(f"No tree evaluates to state {state!r}.")
    return StateWitness(state=state, tree=automaton.witnesses[state])


def is_empty(automaton: TreeAutomaton) -> bool:
    return not ensure_reduced(automaton).final


def build_producible(
    alphabet: Iterable[Symbol],
    start: Callable[[Symbol], State],
    step: Callable[[Symbol, State, State], State],
    accepting: Callable[[State], bool],
) -> TreeAutomaton:
    """
    Tabulate an automaton given by functions, over the states trees actually reach.
    """

    symbols = ordered(alphabet)
    init = {symbol: start(symbol) for symbol in symbols}
    states: list[State] = []
    seen: set[State] = set()
    for state in init.values():
        if state not in seen:
            seen.add(state)
            states.append(state)

    delta: dict[Transition, State] = {}
    changed = True
    while changed:
        changed = False
        for symbol in symbols:
            for p, q in itertools.product(list(states), list(states)):
                if (symbol, p, q) in delta:
                    continue
                target = step(symbol, p, q)
                delta[(symbol, p, q)] = target
                if target not in seen:
                    seen.add(target)
                    states.append(target)
                    changed = True

    final = {state for state in states if accepting(state)}
    return TreeAutomaton(alphabet=symbols, states=states, init=init, delta=delta, final=final)


def intersect(first: TreeAutomaton, second: TreeAutomaton) -> TreeAutomaton:
    """
    Product automaton for L(first) ∩ L(second), built over producible pairs only.
    """

    if first.alphabet != second.alphabet:
        raise UnknownSymbolException("Intersected automata must share one alphabet.")

    return build_producible(
        first.alphabet,
        start=lambda symbol: (first.init[symbol], second.init[symbol]),
        step=lambda symbol, p, q: (first.delta[(symbol, p[0], q[0])], second.delta[(symbol, p[1], q[1])]),
        accepting=lambda state: state[0] in first.final and state[1] in second.final,
    )


def relabel(automaton: TreeAutomaton, rename: Callable[[Symbol], Symbol]) -> TreeAutomaton:
    """
    Same automaton read over renamed symbols; rename must be injective.
    """

    return TreeAutomaton(
        alphabet={rename(symbol) for symbol in automaton.alphabet},
        states=automaton.states,
        init={rename(symbol): state for symbol, state in automaton.init.items()},
        delta={(rename(symbol), p, q): target for (symbol, p, q), target in automaton.delta.items()},
        final=automaton.final,
    )


def lift_to_tuples(automaton: TreeAutomaton) -> TreeAutomaton:
    """
    Read an automaton over Σ as one over 1-tuples, the padded alphabet of arity 1.
    """

    return relabel(automaton, lambda symbol: (symbol,))


def complete_with_sink(
    alphabet: Iterable[Symbol],
    states: Iterable[State],
    init: Mapping[Symbol, State],
    delta: Mapping[Transition, State],
    sink: State = DEFAULT_SINK,
) -> tuple[list[State], dict[Symbol, State], dict[Transition, State]]:
    """
    Fill the missing entries of partial tables with a fresh sink state.
    """

    alphabet = ordered(alphabet)
    states = list(states)
    if sink in states:
        raise UndeclaredStateException(f"Sink state {sink!r} clashes with a declared state.")
    completed_states = states + [sink]

    completed_init = {symbol: init.get(symbol, sink) for symbol in alphabet}
    completed_delta = {
        (symbol, p, q): delta.get((symbol, p, q), sink)
        for symbol in alphabet
        for p, q in itertools.product(completed_states, completed_states)
    }
    return completed_states, completed_init, completed_delta


def padded_alphabet(base: Iterable[Symbol], arity: int) -> frozenset[tuple]:
    """
    Σ_□^n: n-tuples over Σ ∪ {BOX} with at least one non-BOX component.
    """

    letters = ordered(base) + [BOX]
    return frozenset(
        combination
        for combination in itertools.product(letters, repeat=arity)
        if any(component != BOX for component in combination)
    )
