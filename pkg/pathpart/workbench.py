from typing import Optional, Sequence, Union

from . import analysis
from .decpart import DecGraph, ElementHolder, MGHandle, build
from .fingroup import FinGroup, builtin_group, builtin_groups
from .graphs import Graph
from .morphisms import AutGroupResult, OracleAgreement, aut_group, oracle_agreement
from .options import RECOVERY_BOUNDS, Bounds
from .partialcore import AxiomReport, check_axioms


class DecoratedPartialGroup():
    def __init__(self, graph: Graph, decorations: Union[str, FinGroup, Sequence] = "Z2", bounds: Optional[Bounds] = None):
        if isinstance(decorations, (str, FinGroup)):
            decorations = [decorations] * graph.n
        if len(decorations) != graph.n:
            raise ValueError("Please give one decoration per vertex")

        groups = []
        for d in decorations:
            if isinstance(d, str):
                try:
                    d = builtin_group(d)
                except KeyError:
                    raise ValueError(f"Please select a built-in group, one of {sorted(builtin_groups)} or Z<n>") from None
            groups.append(d)

        self.decgraph = DecGraph(graph, groups)
        self.handle: MGHandle = build(self.decgraph)
        self.bounds = bounds or Bounds()

    @classmethod
    def from_decgraph(cls, dg: DecGraph, bounds: Optional[Bounds] = None) -> "DecoratedPartialGroup":
        return cls(dg.graph, list(dg.dec), bounds)

    def parse(self, text: str):
        return self.handle.parse_elem(text)

    def elements(self, max_len: Optional[int] = None):
        return list(self.handle.enum_elems(self.bounds.elem_len if max_len is None else max_len))

    def check_axioms(self, verbose: bool = False) -> AxiomReport:
        return check_axioms(self.handle, self.bounds.elem_len, self.bounds.word_len, verbose=verbose)

    def automorphisms(self, verbose: bool = False) -> AutGroupResult:
        return aut_group(self.decgraph, verbose=verbose)

    def oracle(self, max_len: int = 3, verbose: bool = False) -> OracleAgreement:
        return oracle_agreement(self.decgraph, max_len, verbose=verbose)

    def recover(self, bounds: Bounds = RECOVERY_BOUNDS) -> DecGraph:
        return analysis.recover_decgraph(self.handle, bounds)

    def nerve(self, n: int = 2):
        return analysis.nerve(self.handle, n, self.bounds.elem_len)

    def homotopy_selfequiv_order(self) -> int:
        return analysis.homotopy_selfequiv_order(self.handle, self.bounds)

    # Element cache management methods
    @staticmethod
    def set_element_cache_size(size: int):
        """
        Configure how many enumerated alphabets to keep in memory.

        Each (decorated graph, length bound) pair is one entry. Raise this when
        alternating between several decorated graphs.

        Args:
            size: Maximum number of alphabets to cache (must be >= 1)
        """
        ElementHolder.set_cache_size(size)

    @staticmethod
    def get_element_cache_size() -> int:
        return ElementHolder.get_cache_size()

    @staticmethod
    def get_cached_alphabet_count() -> int:
        return ElementHolder.get_cached_count()

    @staticmethod
    def clear_element_cache():
        """Drop every cached alphabet."""
        ElementHolder.clear_cache()

    @staticmethod
    def unload_elements(dg: DecGraph, max_len: Optional[int] = None) -> bool:
        """
        Drop the cached alphabets of one decorated graph.

        Without `max_len` every bound cached for `dg` is dropped. Returns
        whether anything was removed; the alphabet is rebuilt on next use.
        """
        return ElementHolder.unload(dg, max_len)

    @staticmethod
    def get_cache_info() -> dict:
        return ElementHolder.get_cache_info()
