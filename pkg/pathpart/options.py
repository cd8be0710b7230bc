import os
from dataclasses import dataclass, replace
from typing import Optional

# hard-coded enumeration defaults
DEFAULT_ELEM_LEN = 5  # longest element word enumerated
DEFAULT_WORD_LEN = 4  # longest domain word enumerated
DEFAULT_POWER_BOUND = 12  # powers tried before an order is called indeterminate

DEFAULT_MAX_VERTICES = 160  # graph searches refuse larger graphs
DEFAULT_MAX_ELEMENTS = 200_000  # enumerations refuse to materialise more
DEFAULT_MAX_SUBGROUP_ORDER = 64  # closures abandoned past this size

DEFAULT_SEED = 20240917

MAX_MEM_ENV = "PATHPART_MAX_MEM"


class SearchLimitExceeded(RuntimeError):
    """A graph or group search was asked to run past the configured limit."""


class EnumerationOverflow(RuntimeError):
    """An enumeration produced more items than the configured element cap."""


@dataclass(frozen=True)
class Bounds:
    # longest element (as a word over the decorating groups) to enumerate
    elem_len: int = DEFAULT_ELEM_LEN

    # longest domain word (number of entries) to enumerate
    word_len: int = DEFAULT_WORD_LEN

    # powers x, x^2, ... tried when classifying element orders
    power_bound: int = DEFAULT_POWER_BOUND

    def __post_init__(self):
        for name in ("elem_len", "word_len", "power_bound"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"Bound `{name}` must be a positive integer, got {value!r}")

    def with_(self, **changes) -> "Bounds":
        return replace(self, **changes)


# bounds used by the graph-recovery pipeline: length-2 elements already
# exhibit every infinite-order element kind, and keep decorations like S3 cheap
RECOVERY_BOUNDS = Bounds(elem_len=2, word_len=3, power_bound=DEFAULT_POWER_BOUND)


def _max_elements_from_env() -> int:
    raw = os.environ.get(MAX_MEM_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_ELEMENTS
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{MAX_MEM_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{MAX_MEM_ENV} must be at least 1")
    return value


class SearchLimits:
    """
    Process-wide limits guarding exhaustive searches.

    The element cap is read from the PATHPART_MAX_MEM environment variable
    when it is set; every limit can be changed at runtime and restored with
    `reset()`.
    """
    _max_vertices = DEFAULT_MAX_VERTICES
    _max_elements = _max_elements_from_env()
    _max_subgroup_order = DEFAULT_MAX_SUBGROUP_ORDER

    @classmethod
    def set_max_vertices(cls, n: int):
        if n < 1:
            raise ValueError("Vertex limit must be at least 1")
        cls._max_vertices = n

    @classmethod
    def get_max_vertices(cls) -> int:
        return cls._max_vertices

    @classmethod
    def set_max_elements(cls, n: int):
        if n < 1:
            raise ValueError("Element limit must be at least 1")
        cls._max_elements = n

    @classmethod
    def get_max_elements(cls) -> int:
        return cls._max_elements

    @classmethod
    def set_max_subgroup_order(cls, n: int):
        if n < 1:
            raise ValueError("Subgroup order limit must be at least 1")
        cls._max_subgroup_order = n

    @classmethod
    def get_max_subgroup_order(cls) -> int:
        return cls._max_subgroup_order

    @classmethod
    def check_vertices(cls, n: int, what: str = "graph", limit: Optional[int] = None):
        limit = cls._max_vertices if limit is None else limit
        if n > limit:
            raise SearchLimitExceeded(
                f"{what} has {n} vertices, over the search limit of {limit} "
                f"(raise it with --max-vertices)"
            )

    @classmethod
    def check_elements(cls, n: int, what: str = "enumeration"):
        if n > cls._max_elements:
            raise EnumerationOverflow(
                f"{what} exceeded {cls._max_elements} items; lower the bounds "
                f"or raise {MAX_MEM_ENV}"
            )

    @classmethod
    def reset(cls):
        cls._max_vertices = DEFAULT_MAX_VERTICES
        cls._max_elements = _max_elements_from_env()
        cls._max_subgroup_order = DEFAULT_MAX_SUBGROUP_ORDER

    @classmethod
    def get_info(cls) -> dict:
        return {
            "max_vertices": cls._max_vertices,
            "max_elements": cls._max_elements,
            "max_subgroup_order": cls._max_subgroup_order,
        }
