class ProjectException(Exception):
    """
    Base exception for the project.
    """
    pass


class PositionNotInDomainException(ProjectException):
    """
    Raised when a position does not address a node of the given tree.
    """
    pass


class UnknownSymbolException(ProjectException):
    """
    Raised when a tree carries a label outside the automaton's alphabet.
    """
    pass


class IncompleteAutomatonException(ProjectException):
    """
    Raised when a start function or transition table is not total
    over the declared alphabet and states.
    """
    pass


class UndeclaredStateException(ProjectException):
    """
    Raised when a table or a final set refers to a state that isn't declared.
    """
    pass


class StateNotProducibleException(ProjectException):
    """
    Raised when a witness is requested for a state no tree reaches.
    """
    pass


class NotReducedException(ProjectException):
    """
    Raised when an operation needs a reduced automaton, while an unreduced one is given.
    """
    pass


class NotFatException(ProjectException):
    """
    Raised when a thick witness is requested for an automaton with a slim language.
    """
    pass


class StateNotInfiniteException(ProjectException):
    """
    Raised when a tall tree is requested for a state reached by finitely many trees.
    """
    pass


class InconclusiveCapException(ProjectException):
    """
    Raised when level exploration exceeds a cap that is below the slimness bound,
    so neither a slim nor a fat verdict can be drawn.
    """
    pass


class ThicknessExceedsKException(ProjectException):
    """
    Raised when a tree is too thick for the requested block width.
    """
    pass


class InvalidBlockWidthException(ProjectException):
    """
    Raised when a block width smaller than 1 is given.
    """
    pass


class InvalidCodeException(ProjectException):
    """
    Raised when a word does not have the shape of a level code.
    Carries the first violated condition.
    """

    def __init__(self, violation):
        super().__init__(f"Invalid code word: {violation}")
        self.violation = violation


class ComplementOfNondeterministicException(ProjectException):
    """
    Raised when complementing an automaton that is not deterministic and complete.
    """
    pass


class FatDomainException(ProjectException):
    """
    Raised when a domain language contains trees thicker than the block width.
    """
    pass


class ArityMismatchException(ProjectException):
    """
    Raised when a relation automaton's alphabet doesn't fit its declared arity.
    """
    pass


class BudgetExceededException(ProjectException):
    """
    Raised when a compilation materializes more states than the configured budget.
    """
    pass


class FormatException(ProjectException):
    """
    Raised when an input file can't be parsed.
    """

    def __init__(self, message: str, source: str = "<input>", line: int | None = None):
        location = f"{source}:{line}" if line is not None else source
        super().__init__(f"{location}: {message}")
        self.source = source
        self.line = line


class MissingRelationException(ProjectException):
    """
    Raised when a presentation lacks a relation an operation needs.
    """
    pass


class CertificationException(ProjectException):
    """
    Raised when a compiled automaton fails its inclusion check against the code shape.
    """
    pass
