"""
Finite binary labeled trees.

A tree domain is a finite prefix-closed set of bit strings in which every node
has either no children or both. Trees here are immutable values: they compare
and hash structurally, so they can be used as dictionary keys by the oracles.
"""

from collections.abc import Hashable, Iterator, Sequence
from dataclasses import dataclass
from typing import TypeAlias

from presslim.consts import BOX
from presslim.exceptions import PositionNotInDomainException, ProjectException
from presslim.helpers.misc import render_symbol

Position: TypeAlias = str
Symbol: TypeAlias = Hashable

ROOT: Position = ""


class MalformedTreeException(ProjectException):
    """
    Raised when a node is given exactly one child.
    """
    pass


@dataclass(frozen=True)
class Tree:
    label: Symbol
    left: "Tree | None" = None
    right: "Tree | None" = None

    def __post_init__(self):
        if (self.left is None) != (self.right is None):
            raise MalformedTreeException(f"Node {render_symbol(self.label)!r} must have zero or two children.")

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def children(self) -> tuple["Tree", "Tree"] | None:
        if self.left is None:
            return None
        return self.left, self.right

    def __str__(self):
        if self.is_leaf:
            return render_symbol(self.label)
        return f"({render_symbol(self.label)} {self.left} {self.right})"


def is_position(path: str) -> bool:
    return all(bit in "01" for bit in path)


def levels(t: Tree) -> Iterator[list[Tree]]:
    """
    Yield the nodes of each level, left to right.
    """

    current = [t]
    while current:
        yield current
        current = [child for node in current if not node.is_leaf for child in node.children]


def thickness(t: Tree) -> int:
    return max(len(level) for level in levels(t))


def height(t: Tree) -> int:
    return sum(1 for _ in levels(t)) - 1


def subtree(t: Tree, u: Position) -> Tree:
    """
    The subtree of t rooted at position u.
    """

    if not is_position(u):
        raise PositionNotInDomainException(f"{u!r} is not a bit string.")

    node = t
    for depth, bit in enumerate(u):
        if node.is_leaf:
            raise PositionNotInDomainException(f"Position {u!r} leaves the tree at depth {depth}.")
        node = node.left if bit == "0" else node.right
    return node


def label_at(t: Tree, u: Position) -> Symbol:
    return subtree(t, u).label


def level_nodes(t: Tree, level: int) -> list[Position]:
    """
    Positions of t on the given level, in lexicographic order (0 before 1).
    """

    current: list[tuple[Position, Tree]] = [(ROOT, t)]
    for _ in range(level):
        current = [
            (position + bit, child)
            for position, node in current
            if not node.is_leaf
            for bit, child in zip("01", node.children)
        ]
        if not current:
            break
    return [position for position, _ in current]


def domain(t: Tree) -> set[Position]:
    positions = set()
    stack: list[tuple[Position, Tree]] = [(ROOT, t)]
    while stack:
        position, node = stack.pop()
        positions.add(position)
        if not node.is_leaf:
            stack.append((position + "0", node.left))
            stack.append((position + "1", node.right))
    return positions


def convolve_trees(ts: Sequence[Tree]) -> Tree:
    """
    Superpose trees over the padded tuple alphabet.
    The domain is the union of domains; lane i shows BOX where t_i has no node.
    """

    if not ts:
        raise ValueError("Convolution needs at least one tree.")
    return _convolve(tuple(ts))


def _convolve(lanes: tuple[Tree | None, ...]) -> Tree:
    label = tuple(BOX if lane is None else lane.label for lane in lanes)
    if all(lane is None or lane.is_leaf for lane in lanes):
        return Tree(label)

    left = tuple(None if lane is None or lane.is_leaf else lane.left for lane in lanes)
    right = tuple(None if lane is None or lane.is_leaf else lane.right for lane in lanes)
    return Tree(label, _convolve(left), _convolve(right))


def unconvolve_tree(t: Tree) -> tuple[Tree, ...]:
    """
    Recover the lanes of a convolution by dropping BOX positions.
    """

    arity = len(t.label)
    return tuple(_project(t, lane) for lane in range(arity))


def _project(t: Tree, lane: int) -> Tree:
    label = t.label[lane]
    if label == BOX:
        raise MalformedTreeException(f"Lane {lane} is absent at a node it should contain.")
    if t.is_leaf or t.left.label[lane] == BOX:
        return Tree(label)
    return Tree(label, _project(t.left, lane), _project(t.right, lane))
