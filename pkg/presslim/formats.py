"""
Text formats for trees, automata and presentations.

  .sexp  tree as an S-expression: leaf `a`, inner node `(a L R)`
  .ta    tree automaton, one directive per line
  .wa    word automaton, one directive per line
  .tap   tree presentation: domain and relation files
  .wap   word presentation: the same plus the block width

Lines starting with `#` are comments in the line-based formats. Paths inside
presentation files are relative to the presentation file.
"""

import logging
import re
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

from presslim.automata.tree import TreeAutomaton, complete_with_sink, lift_to_tuples, padded_alphabet
from presslim.automata.word import Letter, WordAutomaton, rename_states
from presslim.compiler import TreePresentation, TreeRelation, WordPresentation, WordRelation
from presslim.consts import BOX, CHILD_BIT_SEPARATOR, PAD, SYMBOL_PATTERN, TUPLE_SEPARATOR
from presslim.encoding import CodeSymbol, CodeWord
from presslim.exceptions import FormatException, ProjectException
from presslim.helpers.misc import ordered, render_symbol
from presslim.trees import Symbol, Tree

logger = logging.getLogger(__name__)

COMMENT = "#"

_SYMBOL = re.compile(rf"^{SYMBOL_PATTERN}$")
_SEXP_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for number, line in enumerate(text.splitlines(), start=1):
        words = line.split()
        if words and not words[0].startswith(COMMENT):
            yield number, words


def parse_symbol(token: str, source: str = "<input>", line: int | None = None) -> Symbol:
    """
    A user symbol: `[A-Za-z0-9_]+`, except the reserved BOX rendering `_`.
    """

    if not _SYMBOL.match(token) or token == BOX:
        raise FormatException(f"{token!r} is not a valid symbol.", source, line)
    return token


def _parse_tuple_symbol(token: str, arity: int, source: str, line: int) -> tuple:
    components = token.split(TUPLE_SEPARATOR)
    if len(components) != arity:
        raise FormatException(f"Symbol {token!r} doesn't have {arity} components.", source, line)
    symbol = tuple(BOX if component == BOX else parse_symbol(component, source, line) for component in components)
    if all(component == BOX for component in symbol):
        raise FormatException(f"Symbol {token!r} has no non-BOX component.", source, line)
    return symbol


# trees


def parse_tree(text: str, source: str = "<input>") -> Tree:
    tokens = _SEXP_TOKEN.findall(text)
    if not tokens:
        raise FormatException("Empty tree.", source)

    position = 0

    def node() -> Tree:
        nonlocal position
        if position >= len(tokens):
            raise FormatException("Unexpected end of tree.", source)
        token = tokens[position]
        position += 1
        if token == ")":
            raise FormatException("Unexpected ')'.", source)
        if token != "(":
            return Tree(parse_symbol(token, source))

        if position >= len(tokens) or tokens[position] in "()":
            raise FormatException("Inner node needs a label.", source)
        label = parse_symbol(tokens[position], source)
        position += 1
        left = node()
        right = node()
        if position >= len(tokens) or tokens[position] != ")":
            raise FormatException(f"Node {label!r} must have exactly two children.", source)
        position += 1
        return Tree(label, left, right)

    t = node()
    if position != len(tokens):
        raise FormatException("Trailing input after tree.", source)
    return t


def format_tree(t: Tree) -> str:
    return str(t)


def parse_trees(text: str, source: str = "<input>") -> list[Tree]:
    """
    One tree per nonempty line.
    """

    return [parse_tree(line, f"{source}:{number}") for number, line in enumerate(text.splitlines(), 1) if line.strip()]


# tree automata


@dataclass(frozen=True)
class ParsedTreeAutomaton:
    automaton: TreeAutomaton
    arity: int | None = None


def parse_tree_automaton(text: str, source: str = "<input>", with_sink: bool = False) -> ParsedTreeAutomaton:
    """
    Read a .ta file.

    Without an `arity` line the alphabet lists plain symbols. With `arity n`
    it lists the base alphabet Σ, the automaton reads Σ_□^n and symbols in
    `init`/`trans` lines are written `a,_`. Partial tables are an error unless
    with_sink is set.
    """

    base: list[Symbol] | None = None
    arity: int | None = None
    states: list[str] | None = None
    final: list[str] = []
    entries: list[tuple[int, list[str]]] = []

    for number, words in _lines(text):
        directive, arguments = words[0], words[1:]
        if directive == "alphabet":
            base = [parse_symbol(token, source, number) for token in arguments]
        elif directive == "arity":
            if len(arguments) != 1 or not arguments[0].isdigit() or int(arguments[0]) < 1:
                raise FormatException("Arity must be one positive integer.", source, number)
            arity = int(arguments[0])
        elif directive == "states":
            states = list(arguments)
        elif directive == "final":
            final.extend(arguments)
        elif directive in ("init", "trans"):
            entries.append((number, words))
        else:
            raise FormatException(f"Unknown directive {directive!r}.", source, number)

    if base is None or states is None:
        raise FormatException("Both `alphabet` and `states` are required.", source)

    def symbol_of(token: str, number: int) -> Symbol:
        if arity is None:
            symbol = parse_symbol(token, source, number)
            if symbol not in base:
                raise FormatException(f"Symbol {token!r} is not in the alphabet.", source, number)
            return symbol
        symbol = _parse_tuple_symbol(token, arity, source, number)
        if any(component != BOX and component not in base for component in symbol):
            raise FormatException(f"Symbol {token!r} is not over the alphabet.", source, number)
        return symbol

    init: dict = {}
    delta: dict = {}
    for number, words in entries:
        if words[0] == "init":
            if len(words) != 4 or words[2] != "->":
                raise FormatException("Expected `init a -> q`.", source, number)
            key, target = symbol_of(words[1], number), words[3]
            table = init
        else:
            if len(words) != 6 or words[4] != "->":
                raise FormatException("Expected `trans a p q -> r`.", source, number)
            key, target = (symbol_of(words[1], number), words[2], words[3]), words[5]
            table = delta
        if key in table and table[key] != target:
            raise FormatException(f"Conflicting entries for {words[1]!r}.", source, number)
        table[key] = target

    alphabet = padded_alphabet(base, arity) if arity is not None else frozenset(base)
    if with_sink:
        states, init, delta = complete_with_sink(alphabet, states, init, delta)

    try:
        automaton = TreeAutomaton(alphabet=alphabet, states=states, init=init, delta=delta, final=final)
    except ProjectException as e:
        raise FormatException(str(e), source)
    return ParsedTreeAutomaton(automaton=automaton, arity=arity)


def format_tree_automaton(automaton: TreeAutomaton, arity: int | None = None) -> str:
    if arity is None:
        base = ordered(automaton.alphabet)
    else:
        base = ordered({component for symbol in automaton.alphabet for component in symbol if component != BOX})

    names = {state: f"q{i}" for i, state in enumerate(automaton.states)}
    lines = [f"alphabet {' '.join(map(render_symbol, base))}"]
    if arity is not None:
        lines.append(f"arity {arity}")
    lines.append(f"states {' '.join(names.values())}")
    for symbol in ordered(automaton.alphabet):
        lines.append(f"init {render_symbol(symbol)} -> {names[automaton.init[symbol]]}")
    for symbol in ordered(automaton.alphabet):
        for p in automaton.states:
            for q in automaton.states:
                target = automaton.delta[(symbol, p, q)]
                lines.append(f"trans {render_symbol(symbol)} {names[p]} {names[q]} -> {names[target]}")
    lines.append(f"final {' '.join(names[state] for state in automaton.states if state in automaton.final)}")
    return "\n".join(lines) + "\n"


# word automata


def parse_letter(token: str, source: str = "<input>", line: int | None = None) -> Letter:
    """
    A code letter `a/0`, `a/1` or `#`; a tuple of them joined by `,`, with `_` for BOX.
    """

    if TUPLE_SEPARATOR in token:
        components = tuple(
            BOX if component == BOX else parse_letter(component, source, line)
            for component in token.split(TUPLE_SEPARATOR)
        )
        if all(component == BOX for component in components):
            raise FormatException(f"Letter {token!r} has no non-BOX component.", source, line)
        return components
    if token == PAD:
        return PAD
    label, separator, bit = token.rpartition(CHILD_BIT_SEPARATOR)
    if not separator or bit not in ("0", "1"):
        raise FormatException(f"{token!r} is not a code letter.", source, line)
    return CodeSymbol(parse_symbol(label, source, line), bit == "1")


def format_letter(letter: Letter) -> str:
    return render_symbol(letter)


def parse_code_word(text: str, source: str = "<input>") -> CodeWord:
    return tuple(parse_letter(token, source) for token in text.split())


def format_code_word(word: CodeWord) -> str:
    return " ".join(format_letter(letter) for letter in word)


def parse_word_automaton(text: str, source: str = "<input>") -> WordAutomaton:
    alphabet: list[Letter] | None = None
    states: list[str] | None = None
    start: list[str] = []
    final: list[str] = []
    transitions: list[tuple[str, Letter, str]] = []

    for number, words in _lines(text):
        directive, arguments = words[0], words[1:]
        if directive == "walphabet":
            alphabet = [parse_letter(token, source, number) for token in arguments]
        elif directive == "states":
            states = list(arguments)
        elif directive == "start":
            start.extend(arguments)
        elif directive == "final":
            final.extend(arguments)
        elif directive == "edge":
            if len(arguments) != 3:
                raise FormatException("Expected `edge p sym q`.", source, number)
            transitions.append((arguments[0], parse_letter(arguments[1], source, number), arguments[2]))
        else:
            raise FormatException(f"Unknown directive {directive!r}.", source, number)

    if alphabet is None or states is None:
        raise FormatException("Both `walphabet` and `states` are required.", source)
    try:
        return WordAutomaton.from_transitions(alphabet, states, start, transitions, final)
    except ProjectException as e:
        raise FormatException(str(e), source)


def format_word_automaton(automaton: WordAutomaton) -> str:
    """
    States get canonical names q0, q1, ... in breadth-first order, so equal
    constructions always print the same text.
    """

    named = rename_states(automaton)
    lines = [
        f"walphabet {' '.join(format_letter(letter) for letter in named.letters)}",
        f"states {' '.join(named.states)}",
        f"start {' '.join(ordered(named.start))}",
    ]
    index = {state: i for i, state in enumerate(named.states)}
    for source_state in named.states:
        for letter in named.letters:
            for target in sorted(named.edges.get((source_state, letter), ()), key=index.__getitem__):
                lines.append(f"edge {source_state} {format_letter(letter)} {target}")
    lines.append(f"final {' '.join(state for state in named.states if state in named.final)}")
    return "\n".join(lines) + "\n"


# presentations


@dataclass(frozen=True)
class _PresentationFile:
    name: str
    domain: Path
    relations: list[tuple[str, int, Path]]
    block_width: int | None


def _parse_presentation_file(path: Path) -> _PresentationFile:
    source = str(path)
    name: str | None = None
    domain: Path | None = None
    relations: list[tuple[str, int, Path]] = []
    block_width: int | None = None

    for number, words in _lines(read_text(path)):
        directive, arguments = words[0], words[1:]
        if directive == "presentation" and len(arguments) == 1:
            name = arguments[0]
        elif directive == "domain" and len(arguments) == 1:
            domain = path.parent / arguments[0]
        elif directive == "relation" and len(arguments) == 3:
            if not arguments[1].isdigit() or int(arguments[1]) < 1:
                raise FormatException(f"Arity {arguments[1]!r} must be a positive integer.", source, number)
            if any(arguments[0] == known for known, _, _ in relations):
                raise FormatException(f"Relation {arguments[0]!r} is declared twice.", source, number)
            relations.append((arguments[0], int(arguments[1]), path.parent / arguments[2]))
        elif directive == "blockwidth" and len(arguments) == 1:
            if not arguments[0].isdigit() or int(arguments[0]) < 1:
                raise FormatException("Block width must be a positive integer.", source, number)
            block_width = int(arguments[0])
        else:
            raise FormatException(f"Malformed directive {' '.join(words)!r}.", source, number)

    if name is None or domain is None:
        raise FormatException("Both `presentation` and `domain` are required.", source)
    return _PresentationFile(name=name, domain=domain, relations=relations, block_width=block_width)


def decode_text(data: bytes, source: str = "<input>") -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise FormatException(f"Not UTF-8 text: invalid byte at offset {e.start}.", source)


def read_text(path: str | Path) -> str:
    """
    Contents of a UTF-8 input file; unreadable or undecodable files raise FormatException.
    """

    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise FormatException(f"Can't read {path}: {e.strerror}.", str(path))
    return decode_text(data, str(path))


def load_tree_presentation(path: str | Path, with_sink: bool = False) -> TreePresentation:
    path = Path(path)
    header = _parse_presentation_file(path)
    domain = parse_tree_automaton(read_text(header.domain), str(header.domain), with_sink)
    if domain.arity is not None:
        raise FormatException("The domain automaton must not declare an arity.", str(header.domain))

    relations = {}
    for name, arity, relation_path in header.relations:
        parsed = parse_tree_automaton(read_text(relation_path), str(relation_path), with_sink)
        automaton = parsed.automaton
        if parsed.arity is None and arity == 1:
            automaton = lift_to_tuples(automaton)
        elif parsed.arity != arity:
            raise FormatException(f"Relation {name!r} is declared with arity {arity}.", str(relation_path))
        relations[name] = TreeRelation(arity=arity, automaton=automaton)

    logger.debug("Loaded tree presentation %s with %d relations.", header.name, len(relations))
    return TreePresentation(name=header.name, domain=domain.automaton, relations=relations)


def load_word_presentation(path: str | Path) -> WordPresentation:
    path = Path(path)
    header = _parse_presentation_file(path)
    if header.block_width is None:
        raise FormatException("Word presentations need a `blockwidth` line.", str(path))

    domain = parse_word_automaton(read_text(header.domain), str(header.domain))
    base = frozenset(letter.label for letter in domain.alphabet if isinstance(letter, CodeSymbol))
    relations = {
        name: WordRelation(arity, parse_word_automaton(read_text(relation_path), str(relation_path)))
        for name, arity, relation_path in header.relations
    }
    return WordPresentation(
        name=header.name,
        domain=domain,
        block_width=header.block_width,
        base_alphabet=base,
        relations=relations,
    )


def write_word_presentation(presentation: WordPresentation, path: str | Path) -> list[Path]:
    """
    Write path (.wap) and one .wa file per automaton next to it. Returns all written paths.
    """

    path = Path(path)
    stem = path.stem
    domain_path = path.with_name(f"{stem}.domain.wa")
    written = [path, domain_path]
    lines = [f"presentation {presentation.name}", f"domain {domain_path.name}"]
    domain_path.write_text(format_word_automaton(presentation.domain), encoding="utf-8")

    for i, (name, relation) in enumerate(sorted(presentation.relations.items())):
        relation_path = path.with_name(f"{stem}.rel{i}.wa")
        relation_path.write_text(format_word_automaton(relation.automaton), encoding="utf-8")
        lines.append(f"relation {name} {relation.arity} {relation_path.name}")
        written.append(relation_path)

    lines.append(f"blockwidth {presentation.block_width}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return written
