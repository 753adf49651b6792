import itertools

import pytest

from presslim.automata.word import convolve_words
from presslim.consts import BOX, PAD
from presslim.encoding import (
    CodeClause,
    CodeSymbol,
    code_alphabet,
    decode,
    encode,
    is_valid_code,
    shape_automaton,
    tuple_shape_automaton,
)
from presslim.exceptions import InvalidBlockWidthException, InvalidCodeException, ThicknessExceedsKException
from presslim.formats import format_code_word, parse_code_word
from presslim.oracles import EnumerationSpec, enumerate_trees
from presslim.tests.strategies import comb
from presslim.trees import Tree

EXAMPLE_CODE = "a/1 # # # # b/1 c/1 # # # c/0 b/1 b/0 a/0 # a/0 c/0 # # #"


def test_example_tree_encoding(t_ex):
    assert format_code_word(encode(t_ex, 5)) == EXAMPLE_CODE


def test_example_code_decodes(t_ex):
    assert decode(parse_code_word(EXAMPLE_CODE), 5) == t_ex


def test_tree_too_thick_for_block(t_ex):
    with pytest.raises(ThicknessExceedsKException):
        encode(t_ex, 3)


def test_block_width_must_be_positive():
    with pytest.raises(InvalidBlockWidthException):
        encode(Tree("a"), 0)
    with pytest.raises(InvalidBlockWidthException):
        shape_automaton(["a"], 0)


def test_code_alphabet():
    assert code_alphabet(["a"]) == {CodeSymbol("a", False), CodeSymbol("a", True), PAD}


@pytest.mark.parametrize(
    "word, clause",
    [
        ("", CodeClause.BLOCK),
        ("# a/0", CodeClause.BLOCK),
        ("a/0 # a/0", CodeClause.BLOCK),
        ("a/0 a/0", CodeClause.FIRST),
        ("a/1 # a/0 #", CodeClause.STEP),
        ("a/1 # a/0 a/1", CodeClause.LAST),
    ],
)
def test_first_violation_is_reported(word, clause):
    check = is_valid_code(parse_code_word(word), 2)
    assert not check
    assert check.violation.clause is clause


def test_decode_rejects_invalid_codes():
    with pytest.raises(InvalidCodeException) as error:
        decode(parse_code_word("a/1 #"), 2)
    assert error.value.violation.clause is CodeClause.LAST


@pytest.mark.parametrize("block_width", [3, 4])
def test_encoding_round_trip(block_width):
    spec = EnumerationSpec(["a", "b"], max_height=4, max_thickness=3)
    for t in enumerate_trees(spec):
        word = encode(t, block_width)
        assert is_valid_code(word, block_width)
        assert decode(word, block_width) == t


def test_encoding_is_injective():
    spec = EnumerationSpec(["a", "b"], max_height=3, max_thickness=2)
    codes = [encode(t, 2) for t in enumerate_trees(spec)]
    assert len(set(codes)) == len(codes)


@pytest.mark.parametrize("block_width", [1, 2])
def test_shape_automaton_matches_the_validator(block_width):
    letters = sorted(code_alphabet(["a"]), key=str)
    automaton = shape_automaton(["a"], block_width)
    for length in range(7):
        for word in itertools.product(letters, repeat=length):
            assert automaton.accepts(word) == bool(is_valid_code(word, block_width))


def test_tuple_shape_automaton():
    automaton = tuple_shape_automaton(["a"], 2, 2)
    short, long = encode(Tree("a"), 2), encode(comb(2), 2)

    assert automaton.accepts(convolve_words([short, long]))
    assert automaton.accepts(convolve_words([long, long]))
    assert not automaton.accepts(convolve_words([short, short[:1]]))
    assert not automaton.accepts(tuple((BOX, letter) for letter in long[:2]) + convolve_words([short, long])[2:])
