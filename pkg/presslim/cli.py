import functools
import json
import logging
import sys
import time
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any, BinaryIO

import click

from presslim.automata.tree import TreeAutomaton
from presslim.compiler import Automaticity, WidthPolicy, convert_presentation, decide_word_automatic
from presslim.encoding import decode, encode
from presslim.consts import DEFAULT_MAX_HEIGHT
from presslim.exceptions import CertificationException, ProjectException
from presslim.formats import (
    decode_text,
    format_code_word,
    format_tree,
    load_tree_presentation,
    load_word_presentation,
    parse_code_word,
    parse_tree_automaton,
    parse_symbol,
    parse_trees,
    read_text,
    write_word_presentation,
)
from presslim.oracles import EnumerationSpec, VerdictReport, enumerate_trees, sanity_order, verify_presentation
from presslim.settings import Settings
from presslim.slimness import pump_thick_witness
from presslim.trees import height, thickness

logger = logging.getLogger(__name__)

EXIT_VERIFICATION_FAILED = 1
EXIT_INPUT_ERROR = 2


@dataclass(frozen=True)
class Options:
    human: bool
    with_sink: bool


class BlockWidthType(click.ParamType):
    """
    `exact`, `bound` or a positive integer.
    """

    name = "exact|bound|N"

    def convert(self, value, param, ctx):
        if isinstance(value, (int, WidthPolicy)):
            return value
        if value in tuple(WidthPolicy):
            return WidthPolicy(value)
        try:
            width = int(value)
        except ValueError:
            self.fail(f"{value!r} is neither 'exact', 'bound' nor an integer.", param, ctx)
        if width < 1:
            self.fail(f"Block width must be at least 1, got {width}.", param, ctx)
        return width


BLOCK_WIDTH = BlockWidthType()


def handle_errors(command: Callable) -> Callable:
    """
    Report project errors on stderr and exit with the input-error code.
    """

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ProjectException as e:
            logger.debug("Command failed.", exc_info=True)
            click.echo(f"error: {e}", err=True)
            raise SystemExit(EXIT_INPUT_ERROR)

    return wrapper


def emit(options: Options, report: dict[str, Any]) -> None:
    if not options.human:
        click.echo(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False))
        return
    width = max((len(key) for key in report), default=0)
    for key, value in sorted(report.items()):
        if isinstance(value, list):
            value = ", ".join(map(str, value)) or "-"
        click.echo(f"{key.ljust(width)}  {'-' if value is None else value}")


def _configure_logging(verbose: int) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = Settings.from_env().log_level
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _stream_name(stream: BinaryIO) -> str:
    return getattr(stream, "name", "<stdin>")


def _load_domain(path: Path, with_sink: bool) -> TreeAutomaton:
    if path.suffix == ".tap":
        return load_tree_presentation(path, with_sink).domain
    return parse_tree_automaton(read_text(path), str(path), with_sink).automaton


@click.group()
@click.option("-v", "--verbose", count=True, help="Log INFO (-v) or DEBUG (-vv) messages to stderr.")
@click.option("--human", is_flag=True, help="Print aligned text instead of JSON.")
@click.option("--complete-with-sink", is_flag=True, help="Complete partial automaton tables with a sink state.")
@click.pass_context
@handle_errors
def main(ctx: click.Context, verbose: int, human: bool, complete_with_sink: bool):
    """
    Decide word automaticity of tree-automatic scattered linear orderings.
    """

    _configure_logging(verbose)
    ctx.obj = Options(human=human, with_sink=complete_with_sink)


@main.command()
@click.argument("presentation", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), help="Write the word presentation.")
@click.option("--k", "block_width", type=BLOCK_WIDTH, default=WidthPolicy.EXACT.value, show_default=True)
@click.option("--minimize", is_flag=True, help="Minimize compiled automata.")
@click.option("--timing", is_flag=True, help="Report the running time.")
@click.pass_obj
@handle_errors
def decide(options: Options, presentation: Path, output: Path | None, block_width, minimize: bool, timing: bool):
    """
    Decide whether a presented scattered ordering is word automatic.
    """

    tree_presentation = load_tree_presentation(presentation, options.with_sink)
    started = time.perf_counter()
    verdict = decide_word_automatic(tree_presentation, block_width, minimize=minimize)
    seconds = time.perf_counter() - started

    report = VerdictReport.from_verdict(verdict, seconds).to_dict(with_timing=timing)
    if verdict.verdict is Automaticity.NOT_WORD_AUTOMATIC:
        witness = verdict.witness
        if not tree_presentation.domain.accepts(witness) or thickness(witness) <= verdict.slim.bound:
            raise CertificationException("The pumped witness isn't an accepted tree above the thickness bound.")
        report["witness_thickness"] = thickness(witness)
    elif output is not None:
        report["files"] = [str(path) for path in write_word_presentation(verdict.presentation, output)]
    emit(options, report)


@main.command()
@click.argument("presentation", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--k", "block_width", type=BLOCK_WIDTH, default=WidthPolicy.EXACT.value, show_default=True)
@click.option("--minimize", is_flag=True, help="Minimize compiled automata.")
@click.pass_obj
@handle_errors
def convert(options: Options, presentation: Path, output: Path, block_width, minimize: bool):
    """
    Compile a tree presentation with a slim domain into a word presentation.
    """

    tree_presentation = load_tree_presentation(presentation, options.with_sink)
    word_presentation = convert_presentation(tree_presentation, block_width, minimize=minimize)
    report = {
        "block_width": word_presentation.block_width,
        "domain_states": len(word_presentation.domain.states),
        "files": [str(path) for path in write_word_presentation(word_presentation, output)],
    }
    emit(options, report)


@main.command("encode")
@click.option("--k", "block_width", type=int, required=True, help="Block width.")
@click.argument("trees", type=click.File("rb"), default="-")
@handle_errors
def encode_command(block_width: int, trees: BinaryIO):
    """
    Encode trees, one S-expression per line, as level codes.
    """

    source = _stream_name(trees)
    for t in parse_trees(decode_text(trees.read(), source), source):
        click.echo(format_code_word(encode(t, block_width)))


@main.command("decode")
@click.option("--k", "block_width", type=int, required=True, help="Block width.")
@click.argument("words", type=click.File("rb"), default="-")
@handle_errors
def decode_command(block_width: int, words: BinaryIO):
    """
    Decode level codes, one per line, back into S-expressions.
    """

    source = _stream_name(words)
    for number, line in enumerate(decode_text(words.read(), source).splitlines(), start=1):
        if line.strip():
            click.echo(format_tree(decode(parse_code_word(line, f"{source}:{number}"), block_width)))


@main.command()
@click.argument("automaton", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--min-thickness", type=click.IntRange(min=0), required=True)
@click.pass_obj
@handle_errors
def witness(options: Options, automaton: Path, min_thickness: int):
    """
    Pump an accepted tree of thickness at least M from a fat .ta or .tap domain.
    """

    domain = _load_domain(automaton, options.with_sink)
    t = pump_thick_witness(domain, max(min_thickness - 1, 0))
    emit(options, {"tree": str(t), "thickness": thickness(t), "height": height(t)})


@main.command()
@click.argument("tree_presentation", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("word_presentation", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--max-height", type=click.IntRange(min=0), default=DEFAULT_MAX_HEIGHT, show_default=True)
@click.pass_obj
@handle_errors
def verify(options: Options, tree_presentation: Path, word_presentation: Path, max_height: int):
    """
    Compare a tree presentation with a word presentation on all small trees.
    """

    report = verify_presentation(
        load_tree_presentation(tree_presentation, options.with_sink),
        load_word_presentation(word_presentation),
        max_height,
    )
    emit(options, report.to_dict())
    if not report:
        raise SystemExit(EXIT_VERIFICATION_FAILED)


@main.command("sanity-order")
@click.argument("presentation", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--max-height", type=click.IntRange(min=0), default=DEFAULT_MAX_HEIGHT, show_default=True)
@click.pass_obj
@handle_errors
def sanity_order_command(options: Options, presentation: Path, max_height: int):
    """
    Check that '<' is a strict linear order on small domain elements.
    """

    report = sanity_order(load_tree_presentation(presentation, options.with_sink), max_height)
    emit(options, report.to_dict())
    if not report:
        raise SystemExit(EXIT_VERIFICATION_FAILED)


@main.command("enumerate")
@click.option("--alphabet", required=True, help="Space-separated symbols.")
@click.option("--max-height", type=click.IntRange(min=0), required=True)
@click.option("--max-thickness", type=click.IntRange(min=1), default=None)
@click.option("--max-count", type=click.IntRange(min=1), default=None)
@click.option("--accepted-by", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.pass_obj
@handle_errors
def enumerate_command(
    options: Options,
    alphabet: str,
    max_height: int,
    max_thickness: int | None,
    max_count: int | None,
    accepted_by: Path | None,
):
    """
    List all trees within the bounds, by height and then by text form.
    """

    symbols = [parse_symbol(token) for token in alphabet.split()]
    trees = enumerate_trees(EnumerationSpec(symbols, max_height, max_thickness, max_count))
    if accepted_by is not None:
        automaton = _load_domain(accepted_by, options.with_sink)
        trees = (t for t in trees if automaton.accepts(t))
    for t in trees:
        click.echo(format_tree(t))

