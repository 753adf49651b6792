from collections.abc import Hashable, Iterable
from typing import Any, TypeVar

T = TypeVar("T", bound=Hashable)


def sort_key(obj: Any) -> tuple:
    """
    Total order over the mixed values used as symbols and states:
    strings, ints, tuples and frozensets of those, objects with their
    own sort_key, and anything else by repr.
    """

    if isinstance(obj, tuple):
        return 3, tuple(sort_key(item) for item in obj)
    if isinstance(obj, str):
        return 0, str(obj)
    if isinstance(obj, (bool, int)):
        return 1, int(obj)
    if hasattr(obj, "sort_key"):
        return 2, obj.sort_key()
    if isinstance(obj, frozenset):
        return 4, tuple(sorted(sort_key(item) for item in obj))
    return 5, repr(obj)


def ordered(items: Iterable[T]) -> list[T]:
    return sorted(items, key=sort_key)


def render_symbol(symbol: Any) -> str:
    """
    Text form of a symbol: tuple components joined by commas, BOX as `_`, PAD as `#`.
    """

    if isinstance(symbol, tuple):
        return ",".join(render_symbol(component) for component in symbol)
    return str(symbol)
