"""
Brute-force oracles: exhaustive tree enumeration and the checks built on it.
"""

import itertools
import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from typing import Any

from presslim.automata.tree import State, TreeAutomaton
from presslim.automata.word import convolve_words
from presslim.compiler import AutomaticityVerdict, TreePresentation, WordPresentation
from presslim.consts import DEFAULT_VERIFY_MAX_TUPLES
from presslim.encoding import encode
from presslim.exceptions import MissingRelationException
from presslim.helpers.misc import ordered
from presslim.slimness import decide_slim, exact_max_thickness
from presslim.trees import Symbol, Tree, convolve_trees

logger = logging.getLogger(__name__)

ORDER_RELATION = "<"


@dataclass(frozen=True)
class EnumerationSpec:
    alphabet: Iterable[Symbol]
    max_height: int
    max_thickness: int | None = None
    max_count: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(ordered(self.alphabet)))
        if self.max_height < 0:
            raise ValueError(f"Height bound must be non-negative, got {self.max_height}.")


def _widths(left: tuple[int, ...], right: tuple[int, ...]) -> tuple[int, ...]:
    depth = max(len(left), len(right))
    padded_left = left + (0,) * (depth - len(left))
    padded_right = right + (0,) * (depth - len(right))
    return (1,) + tuple(a + b for a, b in zip(padded_left, padded_right))


def enumerate_trees(spec: EnumerationSpec) -> Iterator[Tree]:
    """
    Every tree within the bounds exactly once, by height and then by text form.

    Trees of height h+1 are built from pairs of kept trees of height at most h
    with at least one of height exactly h; a tree wider than the thickness bound
    is never kept, which prunes all trees containing it.
    """

    limit = spec.max_thickness
    produced = 0
    # per height: (tree, level widths)
    by_height: list[list[tuple[Tree, tuple[int, ...]]]] = []

    for h in range(spec.max_height + 1):
        if h == 0:
            current = [(Tree(symbol), (1,)) for symbol in spec.alphabet]
        else:
            lower = [item for items in by_height[:-1] for item in items]
            top = by_height[-1]
            current = []
            pairs = itertools.chain(
                itertools.product(top, lower),
                itertools.product(lower, top),
                itertools.product(top, top),
            )
            for (left, left_widths), (right, right_widths) in pairs:
                widths = _widths(left_widths, right_widths)
                if limit is not None and max(widths) > limit:
                    continue
                for symbol in spec.alphabet:
                    current.append((Tree(symbol, left, right), widths))
        if limit is not None and limit < 1:
            current = []

        current.sort(key=lambda item: str(item[0]))
        by_height.append(current)
        for t, _ in current:
            yield t
            produced += 1
            if spec.max_count is not None and produced >= spec.max_count:
                return
        if not current:
            return


def accepted_trees(automaton: TreeAutomaton, spec: EnumerationSpec) -> Iterator[Tree]:
    return (t for t in enumerate_trees(spec) if automaton.accepts(t))


def heights_reaching(automaton: TreeAutomaton, state: State, max_height: int) -> list[int]:
    """
    Heights h ≤ max_height of the trees evaluating to state, by dynamic
    programming over the states reached at each exact height.
    """

    exact = {automaton.init[symbol] for symbol in automaton.alphabet}
    below = set(exact)
    heights = [0] if state in exact else []
    for h in range(1, max_height + 1):
        reached = set()
        for symbol in automaton.alphabet:
            for p, q in itertools.product(below, below):
                if p in exact or q in exact:
                    reached.add(automaton.delta[(symbol, p, q)])
        exact = reached
        below |= reached
        if state in exact:
            heights.append(h)
    return heights


def count_heights_reaching(automaton: TreeAutomaton, state: State, max_height: int) -> int:
    return len(heights_reaching(automaton, state, max_height))


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    checked: int
    counterexample: str | None = None
    detail: str = ""

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "counterexample": self.counterexample,
            "detail": self.detail,
        }


def _failure(checked: int, counterexample: Any, detail: str) -> VerificationReport:
    logger.info("Verification failed: %s (%s).", detail, counterexample)
    return VerificationReport(passed=False, checked=checked, counterexample=str(counterexample), detail=detail)


def verify_presentation(
    tree_presentation: TreePresentation,
    word_presentation: WordPresentation,
    max_height: int,
    max_tuples: int = DEFAULT_VERIFY_MAX_TUPLES,
) -> VerificationReport:
    """
    Compare a tree presentation with its word counterpart on all trees up to max_height.

    Checks domain membership, injectivity of the encoding on domain elements
    and, for every relation, membership of tuples of domain elements (at most
    max_tuples per relation). Reports the first counterexample.
    """

    block_width = word_presentation.block_width
    tree_domain = tree_presentation.domain
    word_domain = word_presentation.domain
    checked = 0
    elements: list[Tree] = []
    codes: dict[tuple, Tree] = {}

    verdict = decide_slim(tree_domain)
    widest = exact_max_thickness(tree_domain, verdict.bound) if verdict.is_slim else verdict.kind
    if not verdict.is_slim or widest > block_width:
        return _failure(checked, f"thickness {widest}", f"domain has trees thicker than the block width {block_width}")

    spec = EnumerationSpec(tree_presentation.base_alphabet, max_height, max_thickness=block_width)
    for t in enumerate_trees(spec):
        checked += 1
        in_domain = tree_domain.accepts(t)
        code = encode(t, block_width)
        if in_domain != word_domain.accepts(code):
            return _failure(checked, t, "domain membership differs")
        if in_domain:
            if code in codes:
                return _failure(checked, t, f"same code as {codes[code]}")
            codes[code] = t
            elements.append(t)

    for name, relation in sorted(tree_presentation.relations.items()):
        compiled = word_presentation.relations.get(name)
        if compiled is None:
            return _failure(checked, name, "relation missing from the word presentation")
        encoded = {t: encode(t, block_width) for t in elements}
        tuples = itertools.islice(itertools.product(elements, repeat=relation.arity), max_tuples)
        for members in tuples:
            checked += 1
            expected = relation.automaton.accepts(convolve_trees(members))
            actual = compiled.automaton.accepts(convolve_words([encoded[t] for t in members]))
            if expected != actual:
                rendered = " ".join(str(t) for t in members)
                return _failure(checked, rendered, f"membership in {name!r} differs")

    logger.debug("Verified %d cases.", checked)
    return VerificationReport(passed=True, checked=checked)


@dataclass(frozen=True)
class OrderReport:
    passed: bool
    elements: int
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        return {"passed": self.passed, "elements": self.elements, "violations": list(self.violations)}


def sanity_order(
    presentation: TreePresentation,
    max_height: int,
    max_tuples: int = DEFAULT_VERIFY_MAX_TUPLES,
) -> OrderReport:
    """
    Check that "<" is a strict linear order on the enumerated domain elements.

    Slim domains are enumerated up to their exact thickness only. This is a
    sanity check; scatteredness is out of its reach.
    """

    relation = presentation.relations.get(ORDER_RELATION)
    if relation is None or relation.arity != 2:
        raise MissingRelationException(f"Presentation {presentation.name!r} has no binary relation '<'.")

    verdict = decide_slim(presentation.domain)
    cap = exact_max_thickness(presentation.domain, verdict.bound) if verdict.is_slim else None
    spec = EnumerationSpec(presentation.base_alphabet, max_height, max_thickness=cap)
    elements = list(accepted_trees(presentation.domain, spec))

    less = {
        (s, t)
        for s, t in itertools.product(elements, repeat=2)
        if relation.automaton.accepts(convolve_trees((s, t)))
    }

    violations = []
    for s, t in itertools.product(elements, repeat=2):
        if s == t and (s, s) in less:
            violations.append(f"irreflexivity: {s} < {s}")
        elif s != t and ((s, t) in less) == ((t, s) in less):
            violations.append(f"trichotomy: {s} and {t}")

    for (s, t), u in itertools.islice(itertools.product(sorted(less, key=str), elements), max_tuples):
        if (t, u) in less and (s, u) not in less:
            violations.append(f"transitivity: {s} < {t} < {u}")

    logger.debug("Checked order on %d elements, %d violations.", len(elements), len(violations))
    return OrderReport(passed=not violations, elements=len(elements), violations=violations)


@dataclass(frozen=True)
class VerdictReport:
    slim: bool
    states: int
    bound: int
    exact_k: int | None
    verdict: str
    witness: str | None = None
    block_width: int | None = None
    seconds: float = 0.0

    @classmethod
    def from_verdict(cls, verdict: AutomaticityVerdict, seconds: float = 0.0) -> "VerdictReport":
        return cls(
            slim=verdict.slim.is_slim,
            states=verdict.slim.states,
            bound=verdict.slim.bound,
            exact_k=verdict.slim.exact_max_thickness,
            verdict=str(verdict.verdict),
            witness=None if verdict.witness is None else str(verdict.witness),
            block_width=None if verdict.presentation is None else verdict.presentation.block_width,
            seconds=seconds,
        )

    def to_dict(self, with_timing: bool = False) -> dict[str, Any]:
        report = {
            "slim": self.slim,
            "n": self.states,
            "bound": self.bound,
            "exact_k": self.exact_k,
            "verdict": self.verdict,
            "witness": self.witness,
            "block_width": self.block_width,
        }
        if with_timing:
            report["seconds"] = round(self.seconds, 6)
        return report
