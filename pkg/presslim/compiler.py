"""
Compilation of tree-automatic presentations with slim domains into word-automatic ones.

The compiled word automata read level codes (see presslim.encoding) and
simulate the tree automaton top-down, one level per block: the automaton state
keeps the ordered records of the current level, each record holding the lanes
that have a node there and the tree-automaton state that node must evaluate to.
After a block has been read, every inner record guesses child states (p0, p1)
with δ(label, p0, p1) equal to its required state and hands them to the next
level; leaf records must satisfy ι(label). A word is accepted when no records
are left at its end.
"""

import itertools
import logging
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import StrEnum
from types import MappingProxyType
from typing import TypeAlias

from presslim.automata.tree import (
    State,
    TreeAutomaton,
    build_producible,
    ensure_reduced,
    intersect as intersect_trees,
    padded_alphabet,
)
from presslim.automata.word import Letter, Word, WordAutomaton, includes, minimize as minimize_word, rename_states
from presslim.consts import BOX, PAD
from presslim.encoding import CodeSymbol, code_alphabet, shape_automaton, tuple_shape_automaton
from presslim.exceptions import (
    ArityMismatchException,
    BudgetExceededException,
    CertificationException,
    FatDomainException,
    InvalidBlockWidthException,
)
from presslim.helpers.misc import ordered, sort_key
from presslim.settings import state_budget
from presslim.slimness import SlimKind, SlimVerdict, decide_slim, exact_max_thickness, pump_thick_witness
from presslim.trees import Symbol, Tree

logger = logging.getLogger(__name__)

Lanes: TypeAlias = tuple[bool, ...]

_SINK = "sink"


class WidthPolicy(StrEnum):
    """
    How the block width K is chosen for a slim domain.
    """

    EXACT = "exact"
    BOUND = "bound"


@dataclass(frozen=True)
class TreeRelation:
    arity: int
    automaton: TreeAutomaton


@dataclass(frozen=True)
class TreePresentation:
    name: str
    domain: TreeAutomaton
    relations: Mapping[str, TreeRelation] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "relations", MappingProxyType(dict(self.relations)))

    @property
    def base_alphabet(self) -> frozenset[Symbol]:
        return self.domain.alphabet


@dataclass(frozen=True)
class WordRelation:
    arity: int
    automaton: WordAutomaton


@dataclass(frozen=True)
class WordPresentation:
    name: str
    domain: WordAutomaton
    block_width: int
    base_alphabet: frozenset[Symbol]
    relations: Mapping[str, WordRelation] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "relations", MappingProxyType(dict(self.relations)))


@dataclass(frozen=True)
class Entry:
    """
    One node of the union domain on the current level: the lanes having it and
    the state its subtree must evaluate to.
    """

    lanes: Lanes
    state: State

    def sort_key(self) -> tuple:
        return self.lanes, sort_key(self.state)


@dataclass(frozen=True)
class SimState:
    """
    Records of the current level plus the columns of its block read so far.
    The state without records is the accepting one.
    """

    pending: tuple[Entry, ...]
    columns: tuple[tuple, ...] = ()

    @property
    def accepting(self) -> bool:
        return not self.pending

    def lane_counts(self, arity: int) -> list[int]:
        return [sum(1 for entry in self.pending if entry.lanes[lane]) for lane in range(arity)]

    def sort_key(self) -> tuple:
        return tuple(entry.sort_key() for entry in self.pending), tuple(sort_key(c) for c in self.columns)


class _LevelSimulator:
    """
    Lazy construction of the word automaton simulating a tree automaton level by level.

    With tupled=False the automaton reads plain level codes of the domain;
    otherwise it reads convolutions of arity codes and labels are Σ_□^n tuples.
    """

    def __init__(
        self,
        automaton: TreeAutomaton,
        block_width: int,
        arity: int,
        base: Iterable[Symbol],
        tupled: bool,
        budget: int | None = None,
    ):
        if block_width < 1:
            raise InvalidBlockWidthException(f"Block width must be at least 1, got {block_width}.")
        self.automaton = ensure_reduced(automaton)
        self.block_width = block_width
        self.arity = arity
        self.tupled = tupled
        self.budget = state_budget(budget)

        letters = code_alphabet(base)
        self.pairs = ordered(letter for letter in letters if isinstance(letter, CodeSymbol))
        if tupled:
            self.alphabet = frozenset(
                combination
                for combination in itertools.product(ordered(letters) + [BOX], repeat=arity)
                if any(component != BOX for component in combination)
            )
        else:
            self.alphabet = letters

    def starts(self) -> list[SimState]:
        everywhere = (True,) * self.arity
        return [SimState((Entry(everywhere, state),)) for state in self.automaton.states if state in self.automaton.final]

    def _split(self, letter: Letter) -> tuple:
        return letter if self.tupled else (letter,)

    def _join(self, components: tuple) -> Letter:
        return components if self.tupled else components[0]

    def letters(self, state: SimState) -> list[Letter]:
        """
        Letters with the right shape for the next column: code symbols while a
        lane still has nodes to show, PAD after them, BOX for lanes without nodes.
        """

        column = len(state.columns)
        choices = []
        for count in state.lane_counts(self.arity):
            if count == 0:
                choices.append([BOX])
            elif column < count:
                choices.append(self.pairs)
            else:
                choices.append([PAD])
        return [self._join(combination) for combination in itertools.product(*choices)]

    def _fits(self, state: SimState, components: tuple) -> bool:
        if len(components) != self.arity:
            return False
        column = len(state.columns)
        for count, component in zip(state.lane_counts(self.arity), components):
            if count == 0:
                expected = component == BOX
            elif column < count:
                expected = isinstance(component, CodeSymbol) and component.label != BOX
            else:
                expected = component == PAD
            if not expected:
                return False
        return True

    def step(self, state: SimState, letter: Letter) -> set[SimState]:
        components = self._split(letter)
        if state.accepting or not isinstance(components, tuple) or not self._fits(state, components):
            return set()
        columns = state.columns + (components,)
        if len(columns) < self.block_width:
            return {SimState(state.pending, columns)}
        return self._next_levels(state.pending, columns)

    def _next_levels(self, pending: tuple[Entry, ...], columns: tuple[tuple, ...]) -> set[SimState]:
        labels: list[list] = [[BOX] * self.arity for _ in pending]
        bits: list[list[bool]] = [[False] * self.arity for _ in pending]
        for lane in range(self.arity):
            rank = 0
            for position, entry in enumerate(pending):
                if entry.lanes[lane]:
                    symbol = columns[rank][lane]
                    labels[position][lane] = symbol.label
                    bits[position][lane] = symbol.inner
                    rank += 1

        options = []
        for entry, label, lane_bits in zip(pending, labels, bits):
            label = self._join(tuple(label))
            children = tuple(lane_bits)
            if not any(children):
                if self.automaton.init.get(label) != entry.state:
                    return set()
                options.append([()])
            else:
                pairs = self.automaton.predecessors(label, entry.state)
                if not pairs:
                    return set()
                options.append([(Entry(children, left), Entry(children, right)) for left, right in pairs])

        levels = set()
        for choice in itertools.product(*options):
            records = tuple(record for pair in choice for record in pair)
            widths = [sum(1 for record in records if record.lanes[lane]) for lane in range(self.arity)]
            if max(widths, default=0) > self.block_width:
                if not self.tupled:
                    raise FatDomainException(
                        f"The domain has trees with a level of {max(widths)} nodes, wider than K={self.block_width}."
                    )
                continue
            levels.add(SimState(records))
        return levels

    def compile(self) -> WordAutomaton:
        starts = self.starts()
        states = list(starts)
        seen = set(starts)
        edges: dict[tuple[SimState, Letter], set[SimState]] = {}
        queue = deque(starts)
        while queue:
            state = queue.popleft()
            if state.accepting:
                continue
            for letter in self.letters(state):
                targets = self.step(state, letter)
                if not targets:
                    continue
                edges[(state, letter)] = targets
                for target in sorted(targets, key=sort_key):
                    if target not in seen:
                        seen.add(target)
                        states.append(target)
                        queue.append(target)
                        if len(states) > self.budget:
                            raise BudgetExceededException(
                                f"Compilation exceeded the budget of {self.budget} states."
                            )

        final = {state for state in states if state.accepting}
        logger.debug("Compiled %d simulation states, %d edges.", len(states), len(edges))
        return WordAutomaton(alphabet=self.alphabet, states=states, start=starts, edges=edges, final=final)

    def accepting_run(self, word: Word) -> list[SimState] | None:
        """
        The states of one accepting run on word, or None when it is rejected.
        """

        layer: dict[SimState, list[SimState]] = {state: [state] for state in self.starts()}
        for letter in word:
            following: dict[SimState, list[SimState]] = {}
            for state, path in layer.items():
                if state.accepting:
                    continue
                for target in self.step(state, letter):
                    following.setdefault(target, path + [target])
            layer = following
        for state, path in layer.items():
            if state.accepting:
                return path
        return None


def _base_of(automaton: TreeAutomaton, arity: int) -> frozenset[Symbol]:
    """
    The base alphabet behind a padded tuple alphabet of the given arity.
    """

    base = set()
    for symbol in automaton.alphabet:
        if not isinstance(symbol, tuple) or len(symbol) != arity:
            raise ArityMismatchException(f"Symbol {symbol!r} is not a {arity}-tuple.")
        base |= {component for component in symbol if component != BOX}
    if automaton.alphabet != padded_alphabet(base, arity):
        raise ArityMismatchException(f"The alphabet is not the padded alphabet of arity {arity}.")
    return frozenset(base)


def compile_domain(automaton: TreeAutomaton, block_width: int, budget: int | None = None) -> WordAutomaton:
    """
    Word automaton for { encode(t, K) : t ∈ L(automaton) }.
    """

    simulator = _LevelSimulator(automaton, block_width, 1, automaton.alphabet, tupled=False, budget=budget)
    return simulator.compile()


def compile_relation(
    automaton: TreeAutomaton,
    arity: int,
    block_width: int,
    budget: int | None = None,
) -> WordAutomaton:
    """
    Word automaton for the convolutions ⊗(encode(t_1, K), ..., encode(t_n, K))
    with ⊗(t_1, ..., t_n) accepted by the automaton.
    """

    if arity < 1:
        raise ArityMismatchException(f"Arity must be at least 1, got {arity}.")
    base = _base_of(automaton, arity)
    simulator = _LevelSimulator(automaton, block_width, arity, base, tupled=True, budget=budget)
    return simulator.compile()


def relation_run(
    automaton: TreeAutomaton,
    arity: int,
    block_width: int,
    word: Word,
) -> list[SimState] | None:
    """
    Trace of an accepting run of the compiled relation automaton on word.
    """

    base = _base_of(automaton, arity)
    return _LevelSimulator(automaton, block_width, arity, base, tupled=True).accepting_run(word)


def lanes_in_domain(domain: TreeAutomaton, arity: int) -> TreeAutomaton:
    """
    Tree automaton over Σ_□^n accepting ⊗(t_1, ..., t_n) iff every t_i ∈ L(domain).

    States are tuples holding each lane's domain state, None where the lane
    has no node; labelings that are no convolution go to a sink.
    """

    def start(symbol: tuple) -> State:
        return tuple(None if component == BOX else domain.init[component] for component in symbol)

    def step(symbol: tuple, left: State, right: State) -> State:
        if left == _SINK or right == _SINK:
            return _SINK
        lanes = []
        for component, left_lane, right_lane in zip(symbol, left, right):
            if component == BOX:
                if left_lane is not None or right_lane is not None:
                    return _SINK
                lanes.append(None)
            elif left_lane is None and right_lane is None:
                lanes.append(domain.init[component])
            elif left_lane is not None and right_lane is not None:
                lanes.append(domain.delta[(component, left_lane, right_lane)])
            else:
                return _SINK
        return tuple(lanes)

    def accepting(state: State) -> bool:
        return state != _SINK and all(lane in domain.final for lane in state)

    return build_producible(padded_alphabet(domain.alphabet, arity), start, step, accepting)


def choose_block_width(
    domain: TreeAutomaton,
    policy: WidthPolicy | int = WidthPolicy.EXACT,
    verdict: SlimVerdict | None = None,
) -> int:
    """
    Block width for a slim domain. A verdict already computed for the domain is reused.
    """

    if verdict is None:
        verdict = decide_slim(domain)
    if not verdict.is_slim:
        raise FatDomainException("The domain is fat: no block width bounds its thickness.")

    if isinstance(policy, int) and not isinstance(policy, WidthPolicy):
        if policy < 1:
            raise InvalidBlockWidthException(f"Block width must be at least 1, got {policy}.")
        return policy
    if WidthPolicy(policy) is WidthPolicy.BOUND:
        return verdict.bound
    if verdict.exact_max_thickness is not None:
        return max(1, verdict.exact_max_thickness)
    return max(1, exact_max_thickness(domain, verdict.bound))


def convert_presentation(
    presentation: TreePresentation,
    policy: WidthPolicy | int = WidthPolicy.EXACT,
    budget: int | None = None,
    minimize: bool = False,
    verdict: SlimVerdict | None = None,
) -> WordPresentation:
    """
    Word-automatic presentation of the structure a slim tree presentation describes.

    Relations are first restricted to tuples of domain elements, and every
    compiled automaton is certified to accept only (convolutions of) valid codes.
    """

    block_width = choose_block_width(presentation.domain, policy, verdict)
    base = presentation.base_alphabet
    logger.info("Converting %s with block width %d.", presentation.name, block_width)

    domain = compile_domain(presentation.domain, block_width, budget)
    if not includes(shape_automaton(base, block_width), domain):
        raise CertificationException("Compiled domain accepts a word that is no level code.")

    relations = {}
    for name, relation in presentation.relations.items():
        expected = padded_alphabet(base, relation.arity)
        if relation.automaton.alphabet != expected:
            raise ArityMismatchException(f"Relation {name!r} isn't over the padded alphabet of arity {relation.arity}.")
        restricted = intersect_trees(relation.automaton, lanes_in_domain(presentation.domain, relation.arity))
        compiled = compile_relation(restricted, relation.arity, block_width, budget)
        if not includes(tuple_shape_automaton(base, block_width, relation.arity), compiled):
            raise CertificationException(f"Compiled relation {name!r} accepts a non-convolution of codes.")
        relations[name] = WordRelation(relation.arity, compiled)

    if minimize:
        domain = minimize_word(domain)
        relations = {name: WordRelation(r.arity, minimize_word(r.automaton)) for name, r in relations.items()}

    return WordPresentation(
        name=presentation.name,
        domain=rename_states(domain),
        block_width=block_width,
        base_alphabet=frozenset(base),
        relations={name: WordRelation(r.arity, rename_states(r.automaton)) for name, r in relations.items()},
    )


class Automaticity(StrEnum):
    WORD_AUTOMATIC = "word-automatic"
    NOT_WORD_AUTOMATIC = "not-word-automatic-given-scattered"


@dataclass(frozen=True)
class AutomaticityVerdict:
    verdict: Automaticity
    slim: SlimVerdict
    presentation: WordPresentation | None = None
    witness: Tree | None = None


def decide_word_automatic(
    presentation: TreePresentation,
    policy: WidthPolicy | int = WidthPolicy.EXACT,
    budget: int | None = None,
    minimize: bool = False,
) -> AutomaticityVerdict:
    """
    Decide word automaticity of a tree-automatic scattered linear ordering.

    A slim domain yields a word-automatic presentation. A fat one yields an
    accepted tree thicker than 2^(n-1); for scattered orderings a fat domain
    rules out word automaticity, which the caller has to vouch for.
    """

    slim = decide_slim(presentation.domain, with_exact_thickness=True)
    if slim.kind is SlimKind.SLIM:
        converted = convert_presentation(presentation, policy, budget, minimize, verdict=slim)
        return AutomaticityVerdict(verdict=Automaticity.WORD_AUTOMATIC, slim=slim, presentation=converted)

    witness = pump_thick_witness(presentation.domain, slim.bound)
    return AutomaticityVerdict(verdict=Automaticity.NOT_WORD_AUTOMATIC, slim=slim, witness=witness)
