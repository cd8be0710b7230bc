import logging
from collections import Counter, deque
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .fingroup import FinGroup, find_isomorphism, generators, table_group
from .options import SearchLimits

logger = logging.getLogger(__name__)


class RealizationError(RuntimeError):
    """A realized graph failed its automorphism-group check."""


class Graph:
    """
    A simple undirected graph on the vertices 0..n-1.

    `labels` optionally names the vertices (used by the word syntax and the
    JSON format); the graph structure itself only ever sees integer ids.
    """

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]] = (), labels: Optional[Sequence[str]] = None):
        if n < 0:
            raise ValueError("Vertex count must be non-negative")
        adj = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"Edge ({u}, {v}) uses an unknown vertex")
            if u == v:
                raise ValueError(f"Self-loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        if labels is not None:
            labels = tuple(str(label) for label in labels)
            if len(labels) != n or len(set(labels)) != n:
                raise ValueError("Vertex labels must be distinct and one per vertex")
        self._adj = tuple(frozenset(a) for a in adj)
        self._labels = labels
        self._edges = tuple(sorted((u, v) for u in range(n) for v in adj[u] if u < v))

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def vertices(self) -> range:
        return range(self.n)

    @property
    def edges(self) -> Tuple[Tuple[int, int], ...]:
        return self._edges

    @property
    def labels(self) -> Tuple[str, ...]:
        if self._labels is None:
            return tuple(str(v) for v in self.vertices)
        return self._labels

    def label(self, v: int) -> str:
        return self.labels[v]

    def vertex(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"Unknown vertex {label!r}") from None

    def neighbors(self, v: int) -> frozenset:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def is_clique(self, s: Iterable[int]) -> bool:
        return is_clique(self, s)

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        rows = [u for u, v in self._edges] + [v for u, v in self._edges]
        cols = [v for u, v in self._edges] + [u for u, v in self._edges]
        matrix = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))
        count, _ = connected_components(matrix, directed=False)
        return count == 1

    def relabel(self, labels: Sequence[str]) -> "Graph":
        return Graph(self.n, self._edges, labels)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self._edges)
        return g

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._edges == other._edges and self.n == other.n and self.labels == other.labels

    def __hash__(self):
        return hash((self.n, self._edges, self.labels))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={len(self._edges)})"


def complete(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("A cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def edgeless(n: int) -> Graph:
    return Graph(n)


def from_networkx(g: nx.Graph) -> Graph:
    nodes = sorted(g.nodes(), key=str)
    index = {v: i for i, v in enumerate(nodes)}
    labels = [str(v) for v in nodes] if any(not isinstance(v, int) for v in nodes) else None
    return Graph(len(nodes), [(index[u], index[v]) for u, v in g.edges()], labels)


def graph_from_json(obj) -> Graph:
    """
    Parse a graph from its JSON form.

    Accepts {"vertices": [...], "edges": [[u, v], ...]} or the adjacency-list
    shorthand {"adjacency": {"a": ["b", ...], ...}}. Vertex labels are mapped
    to ids in sorted label order.
    """
    if not isinstance(obj, dict):
        raise ValueError("Graph must be a JSON object")
    if "adjacency" in obj:
        adjacency = obj["adjacency"]
        names = set(map(str, adjacency))
        for targets in adjacency.values():
            names.update(map(str, targets))
        edge_list = [(str(u), str(v)) for u, targets in adjacency.items() for v in targets]
    elif "vertices" in obj:
        names = set(map(str, obj["vertices"]))
        edge_list = [(str(u), str(v)) for u, v in obj.get("edges", [])]
    else:
        raise ValueError("Graph needs either 'vertices' or 'adjacency'")
    labels = sorted(names, key=_label_key)
    index = {label: i for i, label in enumerate(labels)}
    for u, v in edge_list:
        if u not in index or v not in index:
            raise ValueError(f"Edge ({u}, {v}) uses an unknown vertex")
    return Graph(len(labels), [(index[u], index[v]) for u, v in edge_list], labels)


def _label_key(label: str):
    # numeric labels sort numerically, the rest alphabetically after them
    return (0, int(label), "") if label.lstrip("-").isdigit() else (1, 0, label)


def graph_to_json(g: Graph) -> dict:
    return {
        "vertices": list(g.labels),
        "edges": [[g.label(u), g.label(v)] for u, v in g.edges],
    }


def is_clique(g: Graph, s: Iterable[int]) -> bool:
    s = list(s)
    for v in s:
        if not (isinstance(v, (int, np.integer)) and 0 <= v < g.n):
            raise KeyError(f"Unknown vertex {v!r}")
    return all(g.adjacent(u, v) for i, u in enumerate(s) for v in s[i + 1:] if u != v)


class GraphMap:
    """A graph homomorphism `source -> target`, stored as a vertex map."""

    def __init__(self, source: Graph, target: Graph, vmap: Sequence[int]):
        vmap = tuple(int(w) for w in vmap)
        if len(vmap) != source.n:
            raise ValueError(f"Expected {source.n} vertex images, got {len(vmap)}")
        if any(not 0 <= w < target.n for w in vmap):
            raise ValueError("Vertex image outside the target graph")
        for u, v in source.edges:
            if not target.adjacent(vmap[u], vmap[v]):
                raise ValueError(f"Edge ({u}, {v}) is not preserved")
        self.source = source
        self.target = target
        self.vmap = vmap

    def __call__(self, v: int) -> int:
        return self.vmap[v]

    def is_bijective(self) -> bool:
        return self.source.n == self.target.n and len(set(self.vmap)) == len(self.vmap)

    def is_isomorphism(self) -> bool:
        return self.is_bijective() and len(self.source.edges) == len(self.target.edges)

    def compose(self, other: "GraphMap") -> "GraphMap":
        """`self` after `other`."""
        if other.target.n != self.source.n:
            raise ValueError("Maps are not composable")
        return GraphMap(other.source, self.target, [self.vmap[w] for w in other.vmap])

    def inverse(self) -> "GraphMap":
        if not self.is_isomorphism():
            raise ValueError("Only isomorphisms can be inverted")
        vmap = [0] * self.source.n
        for v, w in enumerate(self.vmap):
            vmap[w] = v
        return GraphMap(self.target, self.source, vmap)

    @classmethod
    def identity(cls, g: Graph) -> "GraphMap":
        return cls(g, g, range(g.n))

    def is_identity(self) -> bool:
        return self.vmap == tuple(range(len(self.vmap))) and self.source.n == self.target.n

    def __eq__(self, other):
        if not isinstance(other, GraphMap):
            return NotImplemented
        return self.vmap == other.vmap and self.source == other.source and self.target == other.target

    def __hash__(self):
        return hash(self.vmap)

    def __repr__(self):
        return f"GraphMap({list(self.vmap)})"


def _refine_colors(graphs: Sequence[Graph]) -> List[List[int]]:
    # colour refinement run jointly on the disjoint union so colours compare
    # across graphs; starts from the degree partition
    colors = [[g.degree(v) for v in g.vertices] for g in graphs]
    n_classes = len({c for cs in colors for c in cs})
    while True:
        signatures = [
            [
                (cs[v], tuple(sorted(cs[w] for w in g.neighbors(v))))
                for v in g.vertices
            ]
            for g, cs in zip(graphs, colors)
        ]
        palette = {sig: i for i, sig in enumerate(sorted({s for sigs in signatures for s in sigs}))}
        colors = [[palette[s] for s in sigs] for sigs in signatures]
        if len(palette) == n_classes:
            return colors
        n_classes = len(palette)


def _search_order(g: Graph, colors: Sequence[int]) -> List[int]:
    class_size = Counter(colors)
    order, seen = [], set()
    for root in sorted(g.vertices, key=lambda v: (class_size[colors[v]], v)):
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in sorted(g.neighbors(v), key=lambda w: (class_size[colors[w]], w)):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def _isomorphisms(a: Graph, b: Graph, find_all: bool) -> Iterator[Tuple[int, ...]]:
    SearchLimits.check_vertices(max(a.n, b.n))
    if a.n != b.n or len(a.edges) != len(b.edges):
        return
    color_a, color_b = _refine_colors([a, b])
    if Counter(color_a) != Counter(color_b):
        return
    by_color: Dict[int, List[int]] = {}
    for w in b.vertices:
        by_color.setdefault(color_b[w], []).append(w)

    order = _search_order(a, color_a)
    # for each vertex, the already-placed vertices its image must be checked against
    earlier = [[u for u in order[:i]] for i in range(len(order))]
    placed_neighbor = [
        next((u for u in order[:i] if a.adjacent(u, v)), None) for i, v in enumerate(order)
    ]

    vmap = [-1] * a.n
    used = [False] * b.n
    nodes = 0

    def candidates(i):
        v = order[i]
        parent = placed_neighbor[i]
        pool = b.neighbors(vmap[parent]) if parent is not None else by_color[color_a[v]]
        return sorted(w for w in pool if not used[w] and color_b[w] == color_a[v])

    def extend(i):
        nonlocal nodes
        if i == len(order):
            yield tuple(vmap)
            return
        v = order[i]
        for w in candidates(i):
            nodes += 1
            if all(a.adjacent(u, v) == b.adjacent(vmap[u], w) for u in earlier[i]):
                vmap[v] = w
                used[w] = True
                yield from extend(i + 1)
                used[w] = False
                vmap[v] = -1

    for found in extend(0):
        yield found
        if not find_all:
            break
    logger.debug("isomorphism search on %d vertices visited %d nodes", a.n, nodes)


def automorphisms(g: Graph) -> List[GraphMap]:
    """All automorphisms of `g`, sorted by vertex map (identity first)."""
    maps = sorted(_isomorphisms(g, g, find_all=True))
    return [GraphMap(g, g, vmap) for vmap in maps]


def isomorphic(a: Graph, b: Graph) -> Optional[GraphMap]:
    found = next(_isomorphisms(a, b, find_all=False), None)
    if found is None:
        return None
    f = GraphMap(a, b, found)
    f.inverse()  # raises unless edges match exactly in both directions
    return f


def aut_table(g: Graph) -> FinGroup:
    """The automorphism group of `g` as a multiplication table."""
    auts = automorphisms(g)
    vmaps = [f.vmap for f in auts]
    return table_group(vmaps, lambda p, q: tuple(p[w] for w in q))


def small_connected_graphs(max_n: int) -> List[Graph]:
    """Connected graphs on 1..max_n vertices, one per isomorphism class."""
    if max_n > 7:
        raise ValueError("The graph atlas only covers graphs on up to 7 vertices")
    out = []
    for g in nx.graph_atlas_g():
        if 0 < g.number_of_nodes() <= max_n and nx.is_connected(g):
            out.append(from_networkx(g))
    return out


def frucht_realize(h: FinGroup, count: int, verify: bool = True) -> List[Graph]:
    """
    Graphs whose automorphism group is isomorphic to `h`.

    Each graph is the Cayley digraph of `h` on a greedy generating set with
    every arc g -> g*s_i replaced by a path g - a - b - g*s_i, where a carries
    a pendant path of length 2i-1+shift and b one of length 2i+shift. The
    tails fix the arc colour and direction, so the automorphisms are exactly
    the left multiplications. Varying `shift` changes the vertex count, giving
    pairwise non-isomorphic graphs. The trivial group uses the identity as a
    pseudo-generator so that its single vertex carries one self-arc gadget.

    Parameters
    ----------
    h: FinGroup
        The group to realize.

    count: int
        Number of pairwise non-isomorphic graphs to produce.

    verify: bool
        Check each graph's automorphism group against `h` (table isomorphism).

    Returns
    -------
    A list of `count` graphs.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    gens = generators(h) or [0]
    graphs = []
    for shift in range(count):
        edges = []
        n = h.order

        def tail(start: int, length: int):
            nonlocal n
            prev = start
            for _ in range(length):
                edges.append((prev, n))
                prev = n
                n += 1

        for g in h.elements():
            for i, s in enumerate(gens, start=1):
                a, b = n, n + 1
                n += 2
                edges.extend([(g, a), (a, b), (b, h.mul(g, s))])
                tail(a, 2 * i - 1 + shift)
                tail(b, 2 * i + shift)
        graph = Graph(n, edges)
        if verify:
            _verify_realization(graph, h)
        graphs.append(graph)
    logger.debug("realized %s on %s vertices", h, [g.n for g in graphs])
    return graphs


def _verify_realization(graph: Graph, h: FinGroup):
    table = aut_table(graph)
    if table.order != h.order:
        raise RealizationError(
            f"Realizer produced a graph with {table.order} automorphisms for a group of order {h.order}"
        )
    if find_isomorphism(table, h) is None:
        raise RealizationError("Realizer produced a graph whose automorphism group is not isomorphic to the target")
