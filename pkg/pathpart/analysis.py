import enum
import itertools
import logging
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import tqdm

from .decpart import DecGraph, MGHandle, build
from .fingroup import FinGroup, GroupAxiomError
from .graphs import Graph, GraphMap, isomorphic
from .options import RECOVERY_BOUNDS, Bounds, SearchLimits
from .partialcore import Elem, PartialGroupHandle, induced_table, is_subgroup, powers

logger = logging.getLogger(__name__)


class NonTrivialNormalizer(ValueError):
    """The normalizer certificate is not trivial at the requested bound."""


class OrderClass(enum.Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    INDETERMINATE = "indeterminate"


def classify_order(h: PartialGroupHandle, e: Elem, power_bound: int) -> Tuple[OrderClass, Optional[int]]:
    """
    Order class of `e`, with its order when finite.

    Powers are built by in-domain products e^k = (e^(k-1), e). An element
    whose powers leave the domain, or keep growing strictly in size, is
    infinite; one that neither returns to the unit nor does either within the
    bound is indeterminate.
    """
    if e == h.unit:
        return OrderClass.FINITE, 1
    sizes = []
    reached = 0
    for k, x in powers(h, e, power_bound):
        if x == h.unit:
            return OrderClass.FINITE, k
        sizes.append(h.elem_size(x))
        reached = k
    if reached < power_bound:
        return OrderClass.INFINITE, None
    if len(sizes) >= 2 and all(a < b for a, b in zip(sizes, sizes[1:])):
        return OrderClass.INFINITE, None
    return OrderClass.INDETERMINATE, None


def classify_orders(h: PartialGroupHandle, elem_bound: int, power_bound: int) -> Dict[Elem, OrderClass]:
    out = {}
    for e in sorted(h.enum_elems(elem_bound), key=h.elem_key):
        out[e] = classify_order(h, e, power_bound)[0]
    undecided = [e for e, c in out.items() if c is OrderClass.INDETERMINATE]
    if undecided:
        warnings.warn(
            f"{len(undecided)} elements have indeterminate order at power bound {power_bound}, "
            f"e.g. {h.format_elem(undecided[0])}; they are left out of subgroup seeds"
        )
    return out


def finite_order_elements(h: PartialGroupHandle, elem_bound: int, power_bound: int) -> frozenset:
    classes = classify_orders(h, elem_bound, power_bound)
    return frozenset(e for e, c in classes.items() if c is OrderClass.FINITE)


@dataclass(frozen=True)
class SubgroupRecord:
    elements: frozenset
    table: FinGroup = field(compare=False)

    @property
    def order(self) -> int:
        return len(self.elements)


def _closure(h: PartialGroupHandle, seed: Sequence[Elem], limit: int) -> Optional[frozenset]:
    # smallest set containing seed closed under binary products, or None as
    # soon as a product leaves the domain or the set outgrows `limit`
    closed = {h.unit, *seed}
    queue = deque(closed)
    while queue:
        x = queue.popleft()
        for s in seed:
            for pair in ((x, s), (s, x)):
                if not h.in_domain(pair):
                    return None
                y = h.product(pair)
                if y not in closed:
                    closed.add(y)
                    if len(closed) > limit:
                        return None
                    queue.append(y)
    return frozenset(closed)


def _record(h: PartialGroupHandle, elems: frozenset, bounds: Bounds) -> Optional[SubgroupRecord]:
    if not is_subgroup(h, elems, max_word_len=min(bounds.word_len, max(3, len(elems) + 1))):
        return None
    try:
        table = induced_table(h, elems)
    except GroupAxiomError:
        return None
    return SubgroupRecord(elems, table)


def _record_key(h: PartialGroupHandle, r: SubgroupRecord):
    return sorted(h.elem_key(e) for e in r.elements if e != h.unit)


def maximal_finite_subgroups(
    h: PartialGroupHandle,
    bounds: Bounds = RECOVERY_BOUNDS,
    verbose: Optional[bool] = False,
) -> List[SubgroupRecord]:
    """
    Maximal finite subgroups among closures of finite-order elements.

    Cyclic closures of single elements seed a set of candidate subgroups,
    which is grown by closing unions of pairs until nothing new appears.
    Pairs with some cross product outside the domain are rejected before
    closing. The maximal candidates under inclusion are returned, ordered by
    their elements.
    """
    limit = SearchLimits.get_max_subgroup_order()
    finite = sorted(finite_order_elements(h, bounds.elem_len, bounds.power_bound), key=h.elem_key)
    candidates: Dict[frozenset, SubgroupRecord] = {}
    for e in finite:
        if e == h.unit:
            continue
        closed = _closure(h, [e], limit)
        if closed is not None and closed not in candidates:
            record = _record(h, closed, bounds)
            if record is not None:
                candidates[closed] = record

    tried = set()
    changed = True
    with tqdm.tqdm(disable=not verbose, desc="subgroups", unit="merge") as bar:
        while changed:
            changed = False
            for a, b in itertools.combinations(list(candidates), 2):
                if a <= b or b <= a or (a, b) in tried:
                    continue
                tried.add((a, b))
                bar.update()
                if not all(h.in_domain((x, y)) for x in a for y in b):
                    continue
                closed = _closure(h, sorted(a | b, key=h.elem_key), limit)
                if closed is None or closed in candidates:
                    continue
                record = _record(h, closed, bounds)
                if record is not None:
                    candidates[closed] = record
                    changed = True

    maximal = [r for s, r in candidates.items() if not any(s < t for t in candidates)]
    maximal.sort(key=lambda r: _record_key(h, r))
    logger.debug("%d candidate subgroups, %d maximal", len(candidates), len(maximal))
    return maximal


@dataclass
class MaxSubResult:
    graph: Graph
    records: List[SubgroupRecord]
    witnesses: Dict[Tuple[int, int], tuple]
    strong: bool


def maxsub(
    h: PartialGroupHandle,
    bounds: Bounds = RECOVERY_BOUNDS,
    strong: bool = False,
    records: Optional[List[SubgroupRecord]] = None,
) -> MaxSubResult:
    """
    The graph of maximal finite subgroups.

    Two subgroups are adjacent when some pair (h1, h2) of non-unit elements
    lies in the domain, or with `strong` when every such pair does. The
    witness of each edge is one domain pair (the failing pair is not kept).
    """
    if records is None:
        records = maximal_finite_subgroups(h, bounds)
    edges, witnesses = [], {}
    for i, j in itertools.combinations(range(len(records)), 2):
        a = sorted((e for e in records[i].elements if e != h.unit), key=h.elem_key)
        b = sorted((e for e in records[j].elements if e != h.unit), key=h.elem_key)
        pairs = ((x, y) for x in a for y in b)
        if strong:
            adjacent = bool(a) and bool(b) and all(h.in_domain(p) for p in pairs)
            witness = (a[0], b[0]) if adjacent else None
        else:
            witness = next((p for p in pairs if h.in_domain(p)), None)
            adjacent = witness is not None
        if adjacent:
            edges.append((i, j))
            witnesses[(i, j)] = witness
    labels = [_record_label(h, r, k) for k, r in enumerate(records)]
    if len(set(labels)) != len(labels):
        labels = [f"H{k}" for k in range(len(records))]
    return MaxSubResult(Graph(len(records), edges, labels), records, witnesses, strong)


def _record_label(h: PartialGroupHandle, r: SubgroupRecord, k: int) -> str:
    # subgroups of M(G,H) sit on one vertex; name them after it
    if isinstance(h, MGHandle):
        vertices = {letter.vertex for e in r.elements for letter in e}
        if len(vertices) == 1:
            return h.graph.label(vertices.pop())
    return f"H{k}"


def maxsub_graph(h: PartialGroupHandle, bounds: Bounds = RECOVERY_BOUNDS) -> Graph:
    return maxsub(h, bounds).graph


def strong_maxsub_graph(h: PartialGroupHandle, bounds: Bounds = RECOVERY_BOUNDS) -> Graph:
    return maxsub(h, bounds, strong=True).graph


def maxsub_symmetry_check(h: PartialGroupHandle, records: Sequence[SubgroupRecord]) -> Optional[tuple]:
    """First pair (h1, h2) where (h1, h2) in D disagrees with (h2^-1, h1^-1) in D, if any."""
    for r1, r2 in itertools.permutations(records, 2):
        for x in sorted(r1.elements, key=h.elem_key):
            for y in sorted(r2.elements, key=h.elem_key):
                if x == h.unit or y == h.unit:
                    continue
                if h.in_domain((x, y)) != h.in_domain((h.inverse(y), h.inverse(x))):
                    return (x, y)
    return None


def recover_check(dg: DecGraph, bounds: Bounds = RECOVERY_BOUNDS) -> Optional[GraphMap]:
    """An isomorphism from the maximal-finite-subgroup graph of M(G,H) onto G, if found."""
    return isomorphic(maxsub_graph(build(dg), bounds), dg.graph)


def recover_decgraph(h: PartialGroupHandle, bounds: Bounds = RECOVERY_BOUNDS) -> DecGraph:
    """The decorated graph read off a partial group: subgroup graph plus subgroup tables."""
    result = maxsub(h, bounds)
    return DecGraph(result.graph, [r.table for r in result.records])


class NerveTruncation:
    """
    Simplices of the nerve up to dimension n.

    A k-simplex is a domain word of length k. Face d_i multiplies entries i
    and i+1 (d_0 and d_k drop the first and last entry), degeneracy s_i
    inserts the unit at position i. The single 0-simplex is the empty word.
    """

    def __init__(self, h: PartialGroupHandle, n: int, dims: Dict[int, List[tuple]], elems: Sequence[Elem] = ()):
        self.h = h
        self.n = n
        self.elems = list(elems)
        self.dims = dims
        self._index = {k: {s: i for i, s in enumerate(simplices)} for k, simplices in dims.items()}

    def face(self, i: int, simplex: tuple) -> tuple:
        k = len(simplex)
        if not 0 <= i <= k or k == 0:
            raise ValueError(f"No face d_{i} on a {k}-simplex")
        if i == 0:
            return simplex[1:]
        if i == k:
            return simplex[:-1]
        return simplex[: i - 1] + (self.h.product(simplex[i - 1: i + 1]),) + simplex[i + 1:]

    def degeneracy(self, i: int, simplex: tuple) -> tuple:
        k = len(simplex)
        if not 0 <= i <= k:
            raise ValueError(f"No degeneracy s_{i} on a {k}-simplex")
        return simplex[:i] + (self.h.unit,) + simplex[i:]

    def non_degenerate(self, k: int) -> List[tuple]:
        return [s for s in self.dims.get(k, []) if self.h.unit not in s]

    def contains(self, simplex: tuple) -> bool:
        return simplex in self._index.get(len(simplex), {})

    def check_simplicial_identities(self) -> List[str]:
        """All violated identities (empty when the truncation is a simplicial set)."""
        failures = []
        d, s = self.face, self.degeneracy
        for k, simplices in self.dims.items():
            for x in simplices:
                for i in range(k + 1):
                    if k >= 1 and not self.contains(d(i, x)):
                        failures.append(f"d_{i}{x} is not stored")
                    if k < self.n and not self.contains(s(i, x)):
                        failures.append(f"s_{i}{x} is not stored")
                if k >= 2:
                    for i, j in itertools.combinations(range(k + 1), 2):
                        if d(i, d(j, x)) != d(j - 1, d(i, x)):
                            failures.append(f"d_{i} d_{j} != d_{j - 1} d_{i} on {x}")
                for j in range(k + 1):
                    y = s(j, x)
                    if d(j, y) != x or d(j + 1, y) != x:
                        failures.append(f"d_{j} s_{j} or d_{j + 1} s_{j} is not the identity on {x}")
                    for i in range(k + 2):
                        if i < j and d(i, y) != s(j - 1, d(i, x)):
                            failures.append(f"d_{i} s_{j} != s_{j - 1} d_{i} on {x}")
                        if i > j + 1 and d(i, y) != s(j, d(i - 1, x)):
                            failures.append(f"d_{i} s_{j} != s_{j} d_{i - 1} on {x}")
                    for i in range(j + 1):
                        if s(i, s(j, x)) != s(j + 1, s(i, x)):
                            failures.append(f"s_{i} s_{j} != s_{j + 1} s_{i} on {x}")
        return failures

    def inner_horn_fillers(self) -> List[tuple]:
        """Inner 2-horns over the enumerated elements without a stored filler."""
        unfilled = []
        for x, y in itertools.product(self.elems, repeat=2):
            if not self.h.in_domain((x, y)):
                continue
            filler = (x, y)
            if not self.contains(filler) or not self.contains(self.face(1, filler)):
                unfilled.append(filler)
        return unfilled

    def to_json(self) -> dict:
        fmt = self.h.format_word
        out = {"simplices": {}, "faces": {}, "degeneracies": {}}
        for k, simplices in sorted(self.dims.items()):
            out["simplices"][str(k)] = [fmt(x) for x in simplices]
            if k >= 1:
                for i in range(k + 1):
                    out["faces"][f"{k},{i}"] = [self._index[k - 1][self.face(i, x)] for x in simplices]
            if k < self.n:
                for i in range(k + 1):
                    out["degeneracies"][f"{k},{i}"] = [self._index[k + 1][self.degeneracy(i, x)] for x in simplices]
        return out


def nerve(h: PartialGroupHandle, n: int, elem_bound: int) -> NerveTruncation:
    """
    The nerve truncated at dimension `n`, over elements of size <= elem_bound.

    Starts from all domain words of length <= n over the enumerated elements
    (units included) and closes the collection under faces and degeneracies.
    """
    elems = sorted(h.enum_elems(elem_bound), key=h.elem_key)
    dims: Dict[int, set] = {0: {()}}
    level = [()]
    for k in range(1, n + 1):
        level = [w + (e,) for w in level for e in elems if h.in_domain(w + (e,))]
        dims[k] = set(level)
        SearchLimits.check_elements(sum(len(v) for v in dims.values()), "nerve")

    truncation = NerveTruncation(h, n, {})
    changed = True
    while changed:
        changed = False
        for k in range(n, -1, -1):
            for x in list(dims[k]):
                new = []
                if k >= 1:
                    new.extend(truncation.face(i, x) for i in range(k + 1))
                if k < n:
                    new.extend(truncation.degeneracy(i, x) for i in range(k + 1))
                for y in new:
                    if y not in dims[len(y)]:
                        dims[len(y)].add(y)
                        changed = True

    def key(w):
        return tuple(h.elem_key(e) for e in w)

    ordered = {k: sorted(simplices, key=key) for k, simplices in dims.items()}
    logger.debug("nerve truncation sizes: %s", {k: len(v) for k, v in ordered.items()})
    return NerveTruncation(h, n, ordered, elems)


def normalizer(h: PartialGroupHandle, elem_bound: int) -> frozenset:
    """
    Enumerated eta with (eta, mu, eta^-1) in the domain for every enumerated mu.

    Every element of the true normalizer that is enumerated passes, so a
    result of just the unit certifies triviality on the enumerated elements.
    """
    elems = sorted(h.enum_elems(elem_bound), key=h.elem_key)
    out = []
    for eta in elems:
        inv = h.inverse(eta)
        if all(h.in_domain((eta, mu, inv)) for mu in elems):
            out.append(eta)
    return frozenset(out)


def homotopy_selfequiv_order(h: MGHandle, bounds: Bounds = Bounds(elem_len=4)) -> int:
    """
    Order of the group of self-homotopy equivalences of the nerve.

    Only answered when the normalizer certificate is trivial at the bound, in
    which case it equals the order of the automorphism group.
    """
    from .morphisms import aut_group

    found = normalizer(h, bounds.elem_len)
    if found != {h.unit}:
        others = sorted((e for e in found if e != h.unit), key=h.elem_key)
        raise NonTrivialNormalizer(
            f"normalizer at length {bounds.elem_len} contains {h.format_elem(others[0])} "
            f"({len(found)} elements); the quotient by it is not computed"
        )
    return aut_group(h.decgraph).order
