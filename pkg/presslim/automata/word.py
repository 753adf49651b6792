"""
Finite word automata over derived alphabets.

Automata are nondeterministic by default; determinization materializes only
the reachable subsets. Complement needs a deterministic complete automaton.
"""

import logging
from collections import deque
from collections.abc import Callable, Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import TypeAlias

from presslim.consts import BOX
from presslim.exceptions import ComplementOfNondeterministicException, UndeclaredStateException
from presslim.helpers.misc import ordered, render_symbol

logger = logging.getLogger(__name__)

State: TypeAlias = Hashable
Letter: TypeAlias = Hashable
Word: TypeAlias = tuple[Letter, ...]


@dataclass(frozen=True, eq=False)
class WordAutomaton:
    alphabet: frozenset[Letter]
    states: tuple[State, ...]
    start: frozenset[State]
    edges: Mapping[tuple[State, Letter], frozenset[State]]
    final: frozenset[State]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "start", frozenset(self.start))
        object.__setattr__(self, "final", frozenset(self.final))
        object.__setattr__(
            self,
            "edges",
            MappingProxyType({key: frozenset(targets) for key, targets in self.edges.items() if targets}),
        )
        self.validate()

    def validate(self) -> None:
        declared = set(self.states)
        if not self.start <= declared or not self.final <= declared:
            raise UndeclaredStateException("Start and final states must be declared.")
        for (source, letter), targets in self.edges.items():
            if source not in declared or not targets <= declared:
                raise UndeclaredStateException(f"Edge on {render_symbol(letter)!r} refers to an undeclared state.")
            if letter not in self.alphabet:
                raise UndeclaredStateException(f"Edge letter {render_symbol(letter)!r} is not in the alphabet.")

    @classmethod
    def from_transitions(
        cls,
        alphabet: Iterable[Letter],
        states: Iterable[State],
        start: Iterable[State],
        transitions: Iterable[tuple[State, Letter, State]],
        final: Iterable[State],
    ) -> "WordAutomaton":
        edges: dict[tuple[State, Letter], set[State]] = {}
        for source, letter, target in transitions:
            edges.setdefault((source, letter), set()).add(target)
        return cls(alphabet=alphabet, states=states, start=start, edges=edges, final=final)

    @property
    def transitions(self) -> list[tuple[State, Letter, State]]:
        return [
            (source, letter, target)
            for (source, letter), targets in self.edges.items()
            for target in targets
        ]

    @cached_property
    def letters(self) -> list[Letter]:
        return ordered(self.alphabet)

    @cached_property
    def is_deterministic(self) -> bool:
        """
        One start state and exactly one successor for every state and letter.
        """

        if len(self.start) != 1:
            return False
        return all(
            len(self.edges.get((state, letter), ())) == 1 for state in self.states for letter in self.alphabet
        )

    def successors(self, current: Iterable[State], letter: Letter) -> frozenset[State]:
        return frozenset(target for state in current for target in self.edges.get((state, letter), ()))

    def accepts(self, word: Sequence[Letter]) -> bool:
        current = self.start
        for letter in word:
            current = self.successors(current, letter)
            if not current:
                return False
        return bool(current & self.final)

    def __str__(self):
        return f"WordAutomaton<states={len(self.states)}, letters={len(self.alphabet)}, edges={len(self.edges)}>"


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    counterexample: Word | None = None

    def __bool__(self):
        return self.equivalent


def convolve_words(words: Sequence[Sequence[Letter]]) -> Word:
    """
    Column j holds the j-th letter of every word, BOX past a word's end.
    """

    if not words:
        raise ValueError("Convolution needs at least one word.")
    length = max(len(word) for word in words)
    return tuple(
        tuple(word[column] if column < len(word) else BOX for word in words)
        for column in range(length)
    )


def unconvolve_word(word: Sequence[tuple], arity: int) -> tuple[Word, ...]:
    """
    Lanes of a convolution, each trimmed at its BOX suffix.
    """

    lanes = []
    for lane in range(arity):
        letters = [column[lane] for column in word]
        end = len(letters)
        while end and letters[end - 1] == BOX:
            end -= 1
        if BOX in letters[:end]:
            raise ValueError(f"Lane {lane} has BOX before its end.")
        lanes.append(tuple(letters[:end]))
    return tuple(lanes)


def determinize(automaton: WordAutomaton, alphabet: Iterable[Letter] | None = None) -> WordAutomaton:
    """
    Subset construction over reachable subsets; the result is complete over
    the given alphabet (the empty subset serves as sink when reached).
    """

    letters = ordered(automaton.alphabet if alphabet is None else alphabet)
    start = frozenset(automaton.start)
    states = [start]
    seen = {start}
    edges: dict[tuple[State, Letter], frozenset[State]] = {}
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        for letter in letters:
            target = automaton.successors(subset, letter)
            edges[(subset, letter)] = frozenset({target})
            if target not in seen:
                seen.add(target)
                states.append(target)
                queue.append(target)

    final = {subset for subset in states if subset & automaton.final}
    logger.debug("Determinized %d states into %d subsets.", len(automaton.states), len(states))
    return WordAutomaton(alphabet=letters, states=states, start={start}, edges=edges, final=final)


def complement(automaton: WordAutomaton) -> WordAutomaton:
    if not automaton.is_deterministic:
        raise ComplementOfNondeterministicException("Determinize the automaton before complementing it.")
    return WordAutomaton(
        alphabet=automaton.alphabet,
        states=automaton.states,
        start=automaton.start,
        edges=automaton.edges,
        final=set(automaton.states) - automaton.final,
    )


def intersect(first: WordAutomaton, second: WordAutomaton) -> WordAutomaton:
    """
    Product automaton over reachable state pairs.
    """

    letters = ordered(first.alphabet | second.alphabet)
    starts = [(p, q) for p in ordered(first.start) for q in ordered(second.start)]
    states = list(starts)
    seen = set(starts)
    edges: dict[tuple[State, Letter], set[State]] = {}
    queue = deque(starts)
    while queue:
        pair = queue.popleft()
        p, q = pair
        for letter in letters:
            targets = {
                (p_next, q_next)
                for p_next in first.edges.get((p, letter), ())
                for q_next in second.edges.get((q, letter), ())
            }
            if targets:
                edges[(pair, letter)] = targets
            for target in ordered(targets):
                if target not in seen:
                    seen.add(target)
                    states.append(target)
                    queue.append(target)

    final = {(p, q) for p, q in states if p in first.final and q in second.final}
    return WordAutomaton(alphabet=letters, states=states, start=starts, edges=edges, final=final)


def union(first: WordAutomaton, second: WordAutomaton) -> WordAutomaton:
    """
    Disjoint union; states are tagged with 0 and 1.
    """

    edges: dict[tuple[State, Letter], set[State]] = {}
    for tag, automaton in enumerate((first, second)):
        for (source, letter), targets in automaton.edges.items():
            edges[((tag, source), letter)] = {(tag, target) for target in targets}

    return WordAutomaton(
        alphabet=first.alphabet | second.alphabet,
        states=[(0, s) for s in first.states] + [(1, s) for s in second.states],
        start={(0, s) for s in first.start} | {(1, s) for s in second.start},
        edges=edges,
        final={(0, s) for s in first.final} | {(1, s) for s in second.final},
    )


def is_empty(automaton: WordAutomaton) -> bool:
    return shortest_accepted(automaton) is None


def shortest_accepted(automaton: WordAutomaton) -> Word | None:
    """
    A shortest accepted word, found by breadth-first search from the start states.
    """

    parents: dict[State, tuple[State, Letter] | None] = {state: None for state in automaton.start}
    queue = deque(ordered(automaton.start))
    while queue:
        state = queue.popleft()
        if state in automaton.final:
            return _trace(parents, state)
        for letter in automaton.letters:
            for target in ordered(automaton.edges.get((state, letter), ())):
                if target not in parents:
                    parents[target] = (state, letter)
                    queue.append(target)
    return None


def _trace(parents: Mapping, state) -> Word:
    letters = []
    while parents[state] is not None:
        state, letter = parents[state]
        letters.append(letter)
    return tuple(reversed(letters))


def equivalent(first: WordAutomaton, second: WordAutomaton) -> Equivalence:
    """
    Compare languages by exploring pairs of reachable subsets breadth-first;
    the first pair that disagrees on acceptance yields a shortest distinguishing word.
    """

    letters = ordered(first.alphabet | second.alphabet)
    start = (first.start, second.start)
    parents: dict = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        left, right = pair
        if bool(left & first.final) != bool(right & second.final):
            return Equivalence(False, _trace(parents, pair))
        for letter in letters:
            target = (first.successors(left, letter), second.successors(right, letter))
            if target not in parents:
                parents[target] = (pair, letter)
                queue.append(target)
    return Equivalence(True)


def includes(container: WordAutomaton, contained: WordAutomaton) -> bool:
    """
    Whether L(contained) ⊆ L(container): contained ∩ ¬container must be empty.
    """

    letters = container.alphabet | contained.alphabet
    rest = intersect(contained, complement(determinize(container, letters)))
    return is_empty(rest)


def minimize(automaton: WordAutomaton) -> WordAutomaton:
    """
    Hopcroft-style partition refinement of the determinized automaton.
    """

    dfa = determinize(automaton)
    letters = dfa.letters
    accepting = frozenset(dfa.final)
    rejecting = frozenset(dfa.states) - accepting

    sources: dict[tuple[Letter, State], set[State]] = {}
    for (source, letter), targets in dfa.edges.items():
        for target in targets:
            sources.setdefault((letter, target), set()).add(source)

    partition = [block for block in (accepting, rejecting) if block]
    pending = [min(partition, key=len)] if len(partition) == 2 else list(partition)
    while pending:
        splitter = pending.pop()
        for letter in letters:
            incoming = {source for target in splitter for source in sources.get((letter, target), ())}
            refined = []
            for block in partition:
                inside, outside = block & incoming, block - incoming
                if inside and outside:
                    refined.extend([inside, outside])
                    if block in pending:
                        pending.remove(block)
                        pending.extend([inside, outside])
                    else:
                        pending.append(min(inside, outside, key=len))
                else:
                    refined.append(block)
            partition = refined

    block_of = {state: i for i, block in enumerate(partition) for state in block}
    (start,) = dfa.start
    edges = {
        (block_of[source], letter): {block_of[target] for target in targets}
        for (source, letter), targets in dfa.edges.items()
    }
    logger.debug("Minimized %d states into %d blocks.", len(dfa.states), len(partition))
    return WordAutomaton(
        alphabet=dfa.alphabet,
        states=range(len(partition)),
        start={block_of[start]},
        edges=edges,
        final={block_of[state] for state in dfa.final},
    )


def relabel(automaton: WordAutomaton, rename: Callable[[Letter], Letter]) -> WordAutomaton:
    return WordAutomaton(
        alphabet={rename(letter) for letter in automaton.alphabet},
        states=automaton.states,
        start=automaton.start,
        edges={(source, rename(letter)): targets for (source, letter), targets in automaton.edges.items()},
        final=automaton.final,
    )


def rename_states(automaton: WordAutomaton, prefix: str = "q") -> WordAutomaton:
    """
    Canonical names q0, q1, ... in breadth-first order from the start states.
    Unreachable states are dropped.
    """

    names: dict[State, str] = {}
    queue = deque()
    for state in ordered(automaton.start):
        names[state] = f"{prefix}{len(names)}"
        queue.append(state)
    while queue:
        state = queue.popleft()
        for letter in automaton.letters:
            for target in ordered(automaton.edges.get((state, letter), ())):
                if target not in names:
                    names[target] = f"{prefix}{len(names)}"
                    queue.append(target)

    return WordAutomaton(
        alphabet=automaton.alphabet,
        states=names.values(),
        start={names[state] for state in automaton.start},
        edges={
            (names[source], letter): {names[target] for target in targets}
            for (source, letter), targets in automaton.edges.items()
            if source in names
        },
        final={names[state] for state in automaton.final if state in names},
    )
