import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from presslim.consts import BOX
from presslim.exceptions import PositionNotInDomainException
from presslim.tests.strategies import trees
from presslim.trees import (
    MalformedTreeException,
    Tree,
    convolve_trees,
    domain,
    height,
    label_at,
    level_nodes,
    subtree,
    thickness,
    unconvolve_tree,
)


def test_example_tree_measures(t_ex):
    assert height(t_ex) == 3
    assert thickness(t_ex) == 4
    assert str(t_ex) == "(a (b c (b a c)) (c b a))"


def test_subtree_and_labels(t_ex):
    assert subtree(t_ex, "") == t_ex
    assert str(subtree(t_ex, "01")) == "(b a c)"
    assert label_at(t_ex, "010") == "a"
    assert label_at(t_ex, "11") == "a"


def test_subtree_outside_domain(t_ex):
    with pytest.raises(PositionNotInDomainException):
        subtree(t_ex, "000")
    with pytest.raises(PositionNotInDomainException):
        subtree(t_ex, "2")


def test_level_nodes_are_lexicographic(t_ex):
    assert level_nodes(t_ex, 0) == [""]
    assert level_nodes(t_ex, 2) == ["00", "01", "10", "11"]
    assert level_nodes(t_ex, 3) == ["010", "011"]
    assert level_nodes(t_ex, 7) == []


def test_domain_is_prefix_closed(t_ex):
    positions = domain(t_ex)
    assert len(positions) == 9
    assert all(position[:-1] in positions for position in positions if position)


def test_single_child_is_rejected():
    with pytest.raises(MalformedTreeException):
        Tree("a", Tree("a"))


def test_convolution_pads_absent_lanes():
    t = convolve_trees([Tree("a"), Tree("b", Tree("a"), Tree("a"))])
    assert t.label == ("a", "b")
    assert t.left.label == (BOX, "a")
    assert t.right.label == (BOX, "a")
    assert t.left.is_leaf


@settings(max_examples=100, deadline=None)
@given(st.lists(trees(("a", "b"), max_leaves=8), min_size=1, max_size=3))
def test_convolution_is_injective(lanes):
    t = convolve_trees(lanes)
    assert unconvolve_tree(t) == tuple(lanes)
    assert domain(t) == set().union(*(domain(lane) for lane in lanes))
