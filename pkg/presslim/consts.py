from enum import StrEnum


class Reserved(StrEnum):
    """
    Symbols disjoint from every user alphabet.
    BOX pads convolutions, PAD pads code blocks.
    """

    BOX = "_"
    PAD = "#"


BOX = Reserved.BOX
PAD = Reserved.PAD

SYMBOL_PATTERN = r"[A-Za-z0-9_]+"
TUPLE_SEPARATOR = ","
CHILD_BIT_SEPARATOR = "/"

DEFAULT_STATE_BUDGET = 200_000
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_MAX_HEIGHT = 4
DEFAULT_VERIFY_MAX_TUPLES = 20_000

BUDGET_ENV_VAR = "PRESSLIM_BUDGET"
LOG_LEVEL_ENV_VAR = "PRESSLIM_LOG_LEVEL"
