"""
Level-by-level encoding of thin trees as words.

A tree t of thickness at most K is written as h(t)+1 blocks of width K. Block
ℓ lists the nodes of level ℓ in lexicographic order as pairs ⟨label, child
bit⟩ (bit 1 for inner nodes) and is padded with PAD up to width K. The
children of the s-th inner node of block ℓ are the (2s-1)-th and 2s-th nodes
of block ℓ+1, which makes the encoding injective and lets it be decoded in
one pass.
"""

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import TypeAlias

from presslim.automata.word import WordAutomaton
from presslim.consts import BOX, CHILD_BIT_SEPARATOR, PAD, Reserved
from presslim.exceptions import InvalidBlockWidthException, InvalidCodeException, ThicknessExceedsKException
from presslim.helpers.misc import ordered
from presslim.trees import Symbol, Tree, levels, thickness

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CodeSymbol:
    """
    A non-padding code letter ⟨label, child bit⟩, rendered `a/1` or `a/0`.
    """

    label: Symbol
    inner: bool

    def sort_key(self) -> tuple:
        return str(self.label), self.inner

    def __str__(self):
        return f"{self.label}{CHILD_BIT_SEPARATOR}{int(self.inner)}"


CodeLetter: TypeAlias = CodeSymbol | Reserved
CodeWord: TypeAlias = tuple[CodeLetter, ...]


class CodeClause(StrEnum):
    """
    The shape conditions of a level code.
    """

    BLOCK = "(a)"
    FIRST = "(b)-first"
    STEP = "(b)-step"
    LAST = "(b)-last"


@dataclass(frozen=True)
class Violation:
    clause: CodeClause
    block: int
    detail: str = ""

    def __str__(self):
        return f"{self.clause} violated in block {self.block}" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class CodeCheck:
    valid: bool
    violation: Violation | None = None

    def __bool__(self):
        return self.valid


def code_alphabet(base: Iterable[Symbol]) -> frozenset[CodeLetter]:
    """
    Σ̂ = Σ × {0, 1} ∪ {PAD}.
    """

    letters: set[CodeLetter] = {CodeSymbol(symbol, inner) for symbol in base for inner in (False, True)}
    letters.add(PAD)
    return frozenset(letters)


def _check_block_width(block_width: int) -> None:
    if block_width < 1:
        raise InvalidBlockWidthException(f"Block width must be at least 1, got {block_width}.")


def encode(t: Tree, block_width: int) -> CodeWord:
    _check_block_width(block_width)
    if thickness(t) > block_width:
        raise ThicknessExceedsKException(f"Tree of thickness {thickness(t)} doesn't fit blocks of width {block_width}.")

    word: list[CodeLetter] = []
    for level in levels(t):
        word.extend(CodeSymbol(node.label, not node.is_leaf) for node in level)
        word.extend([PAD] * (block_width - len(level)))
    return tuple(word)


def is_valid_code(word: Sequence[CodeLetter], block_width: int) -> CodeCheck:
    """
    Check the shape of a level code and report the first violated condition.

    (a) every block is a nonempty run of code symbols followed by PADs;
    (b) the first block holds one symbol, each further block holds twice as
        many symbols as the previous block has child bits set, and the last
        block has no child bit set.
    """

    _check_block_width(block_width)
    if not word:
        return CodeCheck(False, Violation(CodeClause.BLOCK, 0, "empty word"))

    promised = 1
    for block, start in enumerate(range(0, len(word), block_width)):
        letters = word[start:start + block_width]
        if len(letters) < block_width:
            return CodeCheck(False, Violation(CodeClause.BLOCK, block, "incomplete block"))

        content = 0
        while content < block_width and isinstance(letters[content], CodeSymbol):
            content += 1
        if content == 0 or any(letter != PAD for letter in letters[content:]):
            return CodeCheck(False, Violation(CodeClause.BLOCK, block, "content must precede padding"))

        if block == 0 and content != 1:
            return CodeCheck(False, Violation(CodeClause.FIRST, block, f"root block holds {content} nodes"))
        if block > 0 and content != promised:
            return CodeCheck(
                False,
                Violation(CodeClause.STEP, block, f"{content} nodes where {promised} children were announced"),
            )
        promised = 2 * sum(1 for letter in letters[:content] if letter.inner)

    if promised:
        last = (len(word) - 1) // block_width
        return CodeCheck(False, Violation(CodeClause.LAST, last, "last block announces children"))
    return CodeCheck(True)


def decode(word: Sequence[CodeLetter], block_width: int) -> Tree:
    """
    Rebuild the tree of a level code.

    Blocks are read left to right into per-level node records; subtrees are
    then assembled from the deepest level up, the s-th inner node of a level
    taking the next two nodes of the level below as children.
    """

    check = is_valid_code(word, block_width)
    if not check:
        raise InvalidCodeException(check.violation)

    records: list[list[CodeSymbol]] = [
        [letter for letter in word[start:start + block_width] if isinstance(letter, CodeSymbol)]
        for start in range(0, len(word), block_width)
    ]

    below: list[Tree] = []
    for level in reversed(records):
        children = iter(below)
        built = []
        for record in level:
            if record.inner:
                built.append(Tree(record.label, next(children), next(children)))
            else:
                built.append(Tree(record.label))
        below = built
    return below[0]


def shape_automaton(base: Iterable[Symbol], block_width: int) -> WordAutomaton:
    """
    Deterministic automaton accepting exactly the valid codes of width block_width.

    A state (column, expected, inner) is the position inside the current block,
    the number of code symbols the block must hold and the child bits seen so far.
    """

    _check_block_width(block_width)
    alphabet = code_alphabet(base)
    pairs = ordered(letter for letter in alphabet if isinstance(letter, CodeSymbol))
    done = "end"

    start = (0, 1, 0)
    states: list = [start]
    seen = {start}
    edges: dict = {}
    index = 0
    while index < len(states):
        state = states[index]
        index += 1
        if state == done:
            continue
        column, expected, inner = state
        if column < expected:
            moves = [(letter, inner + int(letter.inner)) for letter in pairs]
        else:
            moves = [(PAD, inner)]

        for letter, counted in moves:
            if column + 1 < block_width:
                target = (column + 1, expected, counted)
            elif counted == 0:
                target = done
            elif 2 * counted <= block_width:
                target = (0, 2 * counted, 0)
            else:
                continue
            edges[(state, letter)] = frozenset({target})
            if target not in seen:
                seen.add(target)
                states.append(target)

    logger.debug("Shape automaton for width %d has %d states.", block_width, len(states))
    return WordAutomaton(alphabet=alphabet, states=states, start={start}, edges=edges, final={done} & seen)


def tuple_shape_automaton(base: Iterable[Symbol], block_width: int, arity: int) -> WordAutomaton:
    """
    Convolutions of arity valid codes: each lane follows the shape automaton
    and shows BOX only once its code has ended.
    """

    lane = shape_automaton(base, block_width)
    (lane_start,) = lane.start
    lane_letters = ordered(lane.alphabet) + [BOX]
    letters = [
        combination
        for combination in itertools.product(lane_letters, repeat=arity)
        if any(component != BOX for component in combination)
    ]

    start = (lane_start,) * arity
    states: list = [start]
    seen = {start}
    edges: dict = {}
    index = 0
    while index < len(states):
        state = states[index]
        index += 1
        for letter in letters:
            target = []
            for lane_state, component in zip(state, letter):
                if component == BOX:
                    if lane_state not in lane.final:
                        break
                    target.append(lane_state)
                else:
                    successors = lane.edges.get((lane_state, component))
                    if not successors:
                        break
                    (successor,) = successors
                    target.append(successor)
            else:
                target = tuple(target)
                edges[(state, letter)] = frozenset({target})
                if target not in seen:
                    seen.add(target)
                    states.append(target)

    final = {state for state in states if all(lane_state in lane.final for lane_state in state)}
    return WordAutomaton(alphabet=frozenset(letters), states=states, start={start}, edges=edges, final=final)
