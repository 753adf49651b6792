import pytest
from hypothesis import given, settings

from presslim.automata.tree import TreeAutomaton, ensure_reduced, run
from presslim.exceptions import InconclusiveCapException, NotFatException, NotReducedException, StateNotInfiniteException
from presslim.oracles import EnumerationSpec, accepted_trees, heights_reaching
from presslim.slimness import (
    SlimKind,
    build_graph,
    decide_slim,
    exact_max_thickness,
    infinite_state,
    mark_special,
    pump_thick_witness,
    slim_bound,
    tall_tree_for_state,
)
from presslim.tests.strategies import fat_automata, reduced_automata, slim_automata
from presslim.trees import height, thickness


def test_slim_bound():
    assert [slim_bound(n) for n in (1, 2, 3, 4)] == [1, 2, 4, 8]


def test_all_trees_are_fat(a_all):
    verdict = decide_slim(a_all)

    assert verdict.kind is SlimKind.FAT
    assert verdict.states == 1
    assert verdict.bound == 1
    assert verdict.recipe.special_edge == ("q", "q")
    assert exact_max_thickness(a_all) is SlimKind.FAT


@pytest.mark.parametrize("fixture, widest", [("a_leaf", 1), ("a_cat", 2), ("a_spine", 2)])
def test_slim_fixtures(request, fixture, widest):
    automaton = request.getfixturevalue(fixture)
    verdict = decide_slim(automaton, with_exact_thickness=True)

    assert verdict.is_slim
    assert verdict.exact_max_thickness == widest
    assert widest <= verdict.bound


def test_special_edges_of_the_leaf_language(a_leaf):
    graph = mark_special(build_graph(ensure_reduced(a_leaf)))

    assert graph.special_edges() == [("L", "D"), ("D", "D")]
    assert infinite_state(graph, "D")
    assert not infinite_state(graph, "L")


def test_graph_needs_a_reduced_automaton(a_leaf):
    with pytest.raises(NotReducedException):
        build_graph(a_leaf)


def test_cap_below_bound_is_inconclusive(a_cat):
    with pytest.raises(InconclusiveCapException):
        exact_max_thickness(a_cat, cap=1)


def test_empty_language_has_thickness_zero(a_leaf):
    empty = TreeAutomaton(
        alphabet=a_leaf.alphabet, states=a_leaf.states, init=a_leaf.init, delta=a_leaf.delta, final=()
    )
    assert exact_max_thickness(empty) == 0


def test_pumping_needs_a_fat_language(a_cat):
    with pytest.raises(NotFatException):
        pump_thick_witness(a_cat, 1)


def test_tall_trees_need_infinite_states(a_leaf):
    reduced = ensure_reduced(a_leaf)
    with pytest.raises(StateNotInfiniteException):
        tall_tree_for_state(reduced, "L", 3)
    with pytest.raises(NotReducedException):
        tall_tree_for_state(a_leaf, "D", 3)


def test_pumped_witness_of_all_trees(a_all):
    for floor in range(6):
        t = pump_thick_witness(a_all, floor)
        assert a_all.accepts(t)
        assert thickness(t) > floor


@settings(max_examples=200, deadline=None)
@given(reduced_automata(max_states=5, max_symbols=2))
def test_graph_and_exploration_agree(automaton):
    verdict = decide_slim(automaton)
    widest = exact_max_thickness(automaton, verdict.bound)
    assert verdict.is_slim == (widest is not SlimKind.FAT)


def _assert_within_bound(automaton, max_height):
    verdict = decide_slim(automaton, with_exact_thickness=True)
    assert verdict.is_slim

    spec = EnumerationSpec(automaton.alphabet, max_height, max_thickness=verdict.bound + 1)
    for t in accepted_trees(automaton, spec):
        assert thickness(t) <= verdict.exact_max_thickness <= verdict.bound


@settings(max_examples=40, deadline=None)
@given(slim_automata(max_states=3, max_symbols=1))
def test_slim_unary_languages_respect_the_bound(automaton):
    _assert_within_bound(automaton, 5)


@settings(max_examples=20, deadline=None)
@given(slim_automata(max_states=3, max_symbols=2))
def test_slim_languages_respect_the_bound(automaton):
    _assert_within_bound(automaton, 3)


@settings(max_examples=50, deadline=None)
@given(reduced_automata(max_states=4, max_symbols=2))
def test_infinite_states_agree_with_heights(automaton):
    graph = mark_special(build_graph(automaton))
    n = automaton.size
    for state in automaton.states:
        tall = any(h >= n for h in heights_reaching(automaton, state, 2 * n))
        assert infinite_state(graph, state) == tall


@settings(max_examples=30, deadline=None)
@given(reduced_automata(max_states=4, max_symbols=2))
def test_tall_trees_reach_their_state(automaton):
    graph = mark_special(build_graph(automaton))
    for state in automaton.states:
        if not infinite_state(graph, state):
            continue
        for min_height in (1, 4, 7):
            t = tall_tree_for_state(automaton, state, min_height)
            assert run(automaton, t) == state
            assert height(t) >= min_height


@settings(max_examples=20, deadline=None)
@given(fat_automata(max_states=4, max_symbols=2))
def test_pumped_witnesses_are_thick(automaton):
    for floor in range(1, 9):
        t = pump_thick_witness(automaton, floor)
        assert automaton.accepts(t)
        assert thickness(t) > floor


def test_caterpillar_state_graph(a_cat):
    graph = build_graph(ensure_reduced(a_cat))
    assert set(graph.edges()) == {("L", "C"), ("C", "C"), ("C", "D"), ("D", "D"), ("L", "D")}


def test_caterpillar_special_edges(a_cat):
    graph = mark_special(build_graph(ensure_reduced(a_cat)))
    assert not graph.is_special("C", "C")
    assert graph.is_special("D", "D")
    assert infinite_state(graph, "C")
    assert not infinite_state(graph, "L")


@settings(max_examples=100, deadline=None)
@given(reduced_automata(max_states=4, max_symbols=2))
def test_graph_edges_come_from_transitions(automaton):
    graph = build_graph(automaton)
    expected = {
        (child, automaton.delta[(symbol, p, q)])
        for (symbol, p, q) in automaton.delta
        for child in (p, q)
    }
    assert set(graph.edges()) == expected
