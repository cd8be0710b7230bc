import gc
import logging
from datetime import datetime
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .fingroup import FinGroup, builtin_group, group_from_json, group_to_json
from .graphs import Graph, graph_from_json, graph_to_json
from .options import DEFAULT_ELEM_LEN, DEFAULT_SEED, SearchLimits
from .partialcore import DomainError, PartialGroupHandle
from .words import (
    CRWord,
    Letter,
    format_word,
    invert,
    is_cyclically_reduced,
    parse_word,
    reduce_concat,
    word_key,
)

logger = logging.getLogger(__name__)


class DecGraph:
    """A simple graph with a non-trivial finite group at every vertex."""

    def __init__(self, graph: Graph, dec: Sequence[FinGroup]):
        dec = tuple(dec)
        if len(dec) != graph.n:
            raise ValueError(f"Expected {graph.n} decorations, got {len(dec)}")
        for v, g in enumerate(dec):
            if g.order < 2:
                raise ValueError(f"Decoration at vertex {graph.label(v)} is trivial")
        self.graph = graph
        self.dec = dec

    @property
    def n(self) -> int:
        return self.graph.n

    def __eq__(self, other):
        if not isinstance(other, DecGraph):
            return NotImplemented
        return self.graph == other.graph and self.dec == other.dec

    def __hash__(self):
        return hash((self.graph, self.dec))

    def __repr__(self):
        decs = ", ".join(f"{self.graph.label(v)}:{g}" for v, g in enumerate(self.dec))
        return f"DecGraph({self.graph!r}, [{decs}])"


def uniform(graph: Graph, g: FinGroup) -> DecGraph:
    return DecGraph(graph, [g] * graph.n)


def _is_builtin(g: FinGroup) -> bool:
    if not g.name:
        return False
    try:
        return builtin_group(g.name) == g
    except KeyError:
        return False


def decgraph_from_json(obj) -> DecGraph:
    if not isinstance(obj, dict) or "graph" not in obj:
        raise ValueError("Decorated graph must be an object with a 'graph'")
    graph = graph_from_json(obj["graph"])
    decorations = obj.get("decorations", "Z2")
    if isinstance(decorations, str):
        return uniform(graph, builtin_group(decorations))
    if not isinstance(decorations, dict):
        raise ValueError("'decorations' must be a group name or an object keyed by vertex")
    missing = [label for label in graph.labels if label not in decorations]
    if missing:
        raise ValueError(f"No decoration for vertices {missing}")
    return DecGraph(graph, [group_from_json(decorations[label]) for label in graph.labels])


def decgraph_to_json(dg: DecGraph) -> dict:
    return {
        "graph": graph_to_json(dg.graph),
        "decorations": {
            dg.graph.label(v): (g.name if _is_builtin(g) else group_to_json(g))
            for v, g in enumerate(dg.dec)
        },
    }


def generate_elements(dg: DecGraph, max_len: int) -> List[CRWord]:
    """
    All clique-supported cyclically reduced words of length <= max_len.

    Ordered by length, then lexicographically on (vertex, elem).
    """
    graph, dec = dg.graph, dg.dec
    letters = [Letter(v, x) for v in graph.vertices for x in range(1, dec[v].order)]
    out: List[CRWord] = [CRWord(())]
    level: List[Tuple[Tuple[Letter, ...], frozenset]] = [((), frozenset())]
    for _ in range(max_len):
        nxt = []
        for w, supp in level:
            for letter in letters:
                v = letter.vertex
                if w and w[-1].vertex == v:
                    continue
                if v not in supp and not all(graph.adjacent(v, u) for u in supp):
                    continue
                nxt.append((w + (letter,), supp | {v}))
        level = nxt
        out.extend(CRWord(w) for w, _ in level if is_cyclically_reduced(w))
        SearchLimits.check_elements(len(out) + len(level), "element enumeration")
        if not level:
            break
    logger.debug("enumerated %d elements of length <= %d", len(out), max_len)
    return out


class ElementHolder:
    """
    Caches enumerated alphabets with LRU eviction.

    Keys are (decorated graph, length bound). When the cache is full the
    least recently used alphabet is dropped before a new one is enumerated.
    """
    # Cache storage: {(decgraph, max_len): {"elements": list, "last_access": timestamp}}
    _cache = {}
    # Maximum number of alphabets kept in memory
    _max_cache_size = 4

    @classmethod
    def set_cache_size(cls, size: int):
        """
        Set the maximum number of alphabets to cache.

        Args:
            size: Maximum number of cached alphabets (must be >= 1)

        Raises:
            ValueError: If size < 1
        """
        if size < 1:
            raise ValueError("Cache size must be at least 1")

        old_size = cls._max_cache_size
        cls._max_cache_size = size

        if size < old_size:
            cls._evict_to_size(size)

    @classmethod
    def get_cache_size(cls) -> int:
        return cls._max_cache_size

    @classmethod
    def get_cached_count(cls) -> int:
        return len(cls._cache)

    @classmethod
    def get_elements(cls, dg: DecGraph, max_len: int) -> List[CRWord]:
        """
        Get the alphabet of length <= max_len from cache, enumerating it if needed.

        Args:
            dg: The decorated graph
            max_len: Longest word enumerated

        Returns:
            The elements in enumeration order
        """
        cache_key = (dg, max_len)

        if cache_key in cls._cache:
            cls._cache[cache_key]["last_access"] = datetime.now()
            return cls._cache[cache_key]["elements"]

        if len(cls._cache) >= cls._max_cache_size:
            cls._evict_lru()

        elements = generate_elements(dg, max_len)
        cls._cache[cache_key] = {
            "elements": elements,
            "last_access": datetime.now(),
        }
        return elements

    @classmethod
    def _evict_lru(cls):
        if not cls._cache:
            return
        lru_key = min(cls._cache.items(), key=lambda x: x[1]["last_access"])[0]
        del cls._cache[lru_key]
        logger.debug("evicted alphabet of %r (length %d)", lru_key[0], lru_key[1])
        gc.collect()

    @classmethod
    def _evict_to_size(cls, target_size: int):
        while len(cls._cache) > target_size:
            cls._evict_lru()

    @classmethod
    def clear_cache(cls):
        cls._cache.clear()
        gc.collect()

    @classmethod
    def unload(cls, dg: DecGraph, max_len: Optional[int] = None) -> bool:
        """
        Drop cached alphabets of one decorated graph.

        Args:
            dg: The decorated graph
            max_len: Optional bound selecting one entry. If None, drops every bound.

        Returns:
            bool: True if something was dropped
        """
        if max_len is not None:
            keys = [(dg, max_len)] if (dg, max_len) in cls._cache else []
        else:
            keys = [key for key in cls._cache if key[0] == dg]
        for key in keys:
            del cls._cache[key]
        if keys:
            gc.collect()
        return bool(keys)

    @classmethod
    def get_cache_info(cls) -> dict:
        info = {
            "max_size": cls._max_cache_size,
            "current_size": len(cls._cache),
            "alphabets": [],
        }
        for (dg, max_len), data in cls._cache.items():
            info["alphabets"].append({
                "decgraph": repr(dg),
                "max_len": max_len,
                "elements": len(data["elements"]),
                "last_access": data["last_access"].isoformat(),
            })
        return info


class MGHandle(PartialGroupHandle):
    """
    The partial group of a decorated graph.

    Elements are cyclically reduced free-product words whose support is a
    clique. A word (u_1, ..., u_n) of elements is in the domain when the union
    of the supports is a clique and every segment u_i...u_j multiplies to a
    cyclically reduced word. The product is the reduced form.
    """

    def __init__(self, dg: DecGraph):
        self.decgraph = dg
        self.graph = dg.graph
        self.dec = dg.dec
        self.unit = CRWord(())

    def letters(self) -> List[CRWord]:
        return [CRWord((Letter(v, x),)) for v in self.graph.vertices for x in range(1, self.dec[v].order)]

    def contains(self, e) -> bool:
        if not isinstance(e, tuple):
            return False
        try:
            letters = [Letter(*letter) for letter in e]
        except TypeError:
            return False
        for v, x in letters:
            if not (0 <= v < self.graph.n and 0 < x < self.dec[v].order):
                return False
        if not is_cyclically_reduced(letters):
            return False
        return self.graph.is_clique(sorted({v for v, _ in letters}))

    def _segments_cyclically_reduced(self, w: Sequence[CRWord]) -> bool:
        n = len(w)
        for i in range(n):
            stack: List[Letter] = []
            for j in range(i, n):
                for v, x in w[j]:
                    if stack and stack[-1].vertex == v:
                        y = self.dec[v].mul(stack.pop().elem, x)
                        if y != 0:
                            stack.append(Letter(v, y))
                    else:
                        stack.append(Letter(v, x))
                if len(stack) >= 2 and stack[0].vertex == stack[-1].vertex:
                    return False
        return True

    def in_domain(self, w: Sequence[CRWord]) -> bool:
        for e in w:
            if not self.contains(e):
                raise DomainError(f"{e!r} is not an element of {self.describe()}")
        supp = set()
        for e in w:
            supp.update(v for v, _ in e)
        if not self.graph.is_clique(sorted(supp)):
            return False
        return self._segments_cyclically_reduced(w)

    def product(self, w: Sequence[CRWord]) -> CRWord:
        if not self.in_domain(w):
            raise DomainError(f"{self.format_word(w)} is not in the domain")
        return CRWord(reduce_concat(w, self.dec))

    def inverse(self, e: CRWord) -> CRWord:
        if not self.contains(e):
            raise DomainError(f"{e!r} is not an element of {self.describe()}")
        return CRWord(invert(e, self.dec))

    def enum_elems(self, max_size: int = DEFAULT_ELEM_LEN) -> Iterator[CRWord]:
        yield from ElementHolder.get_elements(self.decgraph, max_size)

    def elem_size(self, e):
        return len(e)

    def elem_key(self, e):
        return word_key(e)

    def format_elem(self, e):
        return format_word(e, self.graph.labels, self.dec)

    def format_word(self, w):
        return "(" + ", ".join("(" + self.format_elem(e) + ")" if e else "()" for e in w) + ")"

    def parse_elem(self, text: str) -> CRWord:
        w = parse_word(text, self.graph.vertex, self.dec)
        word = CRWord(w)
        if not self.contains(word):
            raise DomainError(f"{text!r} is not supported on a clique")
        return word

    def describe(self):
        decs = ", ".join(f"{self.graph.label(v)}:{g}" for v, g in enumerate(self.dec))
        return f"M(G,H) on {self.graph.n} vertices, {len(self.graph.edges)} edges [{decs}]"


def build(dg: DecGraph) -> MGHandle:
    return MGHandle(dg)


def path_partial(g: Graph) -> MGHandle:
    return MGHandle(uniform(g, builtin_group("Z2")))


def in_domain(h: MGHandle, w: Sequence[CRWord]) -> bool:
    return h.in_domain(w)


def product(h: MGHandle, w: Sequence[CRWord]) -> CRWord:
    return h.product(w)


def enum_elems(h: MGHandle, max_len: int) -> List[CRWord]:
    return list(h.enum_elems(max_len))


def vertex_subgroup(h: MGHandle, v: int) -> frozenset:
    """The decoration at `v` as a set of elements (length-1 words and the unit)."""
    return frozenset([h.unit] + [CRWord((Letter(v, x),)) for x in range(1, h.dec[v].order)])


PALETTES = {
    "oracle": ("Z2", "Z3", "V4"),
    "recovery": ("Z2", "Z3", "Z4", "V4", "S3"),
}


def random_decgraphs(
    count: int,
    max_vertices: int,
    palette: Sequence[str] = PALETTES["recovery"],
    seed: int = DEFAULT_SEED,
    accept: Optional[Callable[[DecGraph], bool]] = None,
    edge_probability: Tuple[float, float] = (0.3, 0.8),
    max_tries: int = 10_000,
) -> List[DecGraph]:
    """
    Seeded corpus of random decorated graphs.

    Vertex counts are uniform in 1..max_vertices, edges come from a G(n, p)
    graph with p drawn from `edge_probability`, decorations are drawn from
    `palette` (built-in group names). Candidates rejected by `accept` are
    redrawn.
    """
    rng = np.random.default_rng(seed)
    groups = [builtin_group(name) for name in palette]
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"Only {len(out)} of {count} random decorated graphs accepted")
        n = int(rng.integers(1, max_vertices + 1))
        p = float(rng.uniform(*edge_probability))
        g = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))
        labels = [chr(ord("a") + i) for i in range(n)]
        graph = Graph(n, g.edges(), labels)
        dg = DecGraph(graph, [groups[int(i)] for i in rng.integers(len(groups), size=n)])
        if accept is not None and not accept(dg):
            continue
        out.append(dg)
    logger.debug("random corpus: %d decorated graphs in %d draws", count, tries)
    return out
