from pathlib import Path

import pytest

from presslim.automata.tree import padded_alphabet
from presslim.compiler import TreePresentation, TreeRelation
from presslim.consts import BOX
from presslim.tests.strategies import tabulate
from presslim.trees import Tree

DATA_DIR = Path(__file__).parent / "data"


def spine_rule(symbol, p, q):
    return "C" if (p, q) in (("L", "L"), ("C", "L")) else "D"


def spine_lt_rule(symbol, p, q):
    if symbol == ("a", BOX) or "D" in (p, q):
        return "D"
    if symbol == (BOX, "a") or "S" in (p, q):
        return "S"
    return "E"


def spine_lt_init(symbol):
    return {("a", "a"): "E", (BOX, "a"): "S", ("a", BOX): "D"}[symbol]


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def a_all():
    return tabulate(["a"], ["q"], lambda symbol: "q", lambda symbol, p, q: "q", {"q"})


@pytest.fixture
def a_leaf():
    return tabulate(["a"], ["L", "D"], lambda symbol: "L", lambda symbol, p, q: "D", {"L"})


@pytest.fixture
def a_cat():
    """
    Caterpillars: every inner node has a leaf child.
    """

    def rule(symbol, p, q):
        return "C" if (p, q) in (("L", "L"), ("C", "L"), ("L", "C")) else "D"

    return tabulate(["a"], ["L", "C", "D"], lambda symbol: "L", rule, {"C"})


@pytest.fixture
def a_spine():
    """
    Left combs: a leaf, or an inner node whose left child is a left comb and right child a leaf.
    """

    return tabulate(["a"], ["L", "C", "D"], lambda symbol: "L", spine_rule, {"L", "C"})


@pytest.fixture
def a_spine_lt():
    """
    Pairs (s, t) with dom(s) a proper subset of dom(t).
    """

    return tabulate(padded_alphabet(["a"], 2), ["E", "S", "D"], spine_lt_init, spine_lt_rule, {"S"})


@pytest.fixture
def a_eq():
    alphabet = padded_alphabet(["a", "b"], 2)

    def diagonal(symbol):
        return symbol[0] == symbol[1]

    return tabulate(
        alphabet,
        ["Y", "N"],
        lambda symbol: "Y" if diagonal(symbol) else "N",
        lambda symbol, p, q: "Y" if diagonal(symbol) and p == q == "Y" else "N",
        {"Y"},
    )


@pytest.fixture
def t_ex():
    return Tree(
        "a",
        Tree("b", Tree("c"), Tree("b", Tree("a"), Tree("c"))),
        Tree("c", Tree("b"), Tree("a")),
    )


@pytest.fixture
def ord_omega(a_spine, a_spine_lt):
    return TreePresentation(name="ordOmega", domain=a_spine, relations={"<": TreeRelation(2, a_spine_lt)})
