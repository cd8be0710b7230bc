import itertools
import logging
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import tqdm

from .decpart import DecGraph, MGHandle, build, uniform
from .fingroup import (
    FinGroup,
    GroupMap,
    automorphisms as group_automorphisms,
    builtin_group,
    find_isomorphism,
    identify,
    injective_homs,
    table_group,
)
from .graphs import GraphMap, automorphisms as graph_automorphisms
from .options import DEFAULT_ELEM_LEN, DEFAULT_WORD_LEN, EnumerationOverflow, SearchLimits
from .partialcore import DomainError, Elem, PartialGroupHandle, enum_domain_words, powers
from .words import CRWord, Letter

logger = logging.getLogger(__name__)


class DecMorphism:
    """A graph homomorphism together with injective maps between the decorations."""

    def __init__(self, source: DecGraph, target: DecGraph, gmap: GraphMap, fam: Sequence[GroupMap]):
        fam = tuple(fam)
        if gmap.source != source.graph or gmap.target != target.graph:
            raise ValueError("Graph map does not match the decorated graphs")
        if len(fam) != source.n:
            raise ValueError(f"Expected {source.n} group maps, got {len(fam)}")
        for v, f in enumerate(fam):
            if f.source != source.dec[v] or f.target != target.dec[gmap(v)]:
                raise ValueError(f"Group map at vertex {source.graph.label(v)} has the wrong source or target")
            if not f.is_injective():
                raise ValueError(f"Group map at vertex {source.graph.label(v)} is not injective")
        self.source = source
        self.target = target
        self.gmap = gmap
        self.fam = fam

    @property
    def key(self):
        return (self.gmap.vmap, tuple(f.images for f in self.fam))

    def __call__(self, letter: Letter) -> Letter:
        v, x = letter
        return Letter(self.gmap(v), self.fam[v](x))

    def apply(self, w: Sequence[Letter]) -> CRWord:
        return CRWord(self(letter) for letter in w)

    def compose(self, other: "DecMorphism") -> "DecMorphism":
        """`self` after `other`."""
        return DecMorphism(
            other.source,
            self.target,
            self.gmap.compose(other.gmap),
            [self.fam[other.gmap(v)].compose(f) for v, f in enumerate(other.fam)],
        )

    def is_identity(self) -> bool:
        return self.gmap.is_identity() and all(f.is_identity() for f in self.fam)

    @classmethod
    def identity(cls, dg: DecGraph) -> "DecMorphism":
        return cls(dg, dg, GraphMap.identity(dg.graph), [GroupMap.identity(g) for g in dg.dec])

    def __eq__(self, other):
        if not isinstance(other, DecMorphism):
            return NotImplemented
        return self.key == other.key and self.source == other.source and self.target == other.target

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"DecMorphism({list(self.gmap.vmap)}, {[list(f.images) for f in self.fam]})"

    def describe(self) -> str:
        g, dec = self.source.graph, self.source.dec
        parts = []
        for v in g.vertices:
            w = self.gmap(v)
            elems = ", ".join(
                f"{dec[v].label(x)}->{self.target.dec[w].label(self.fam[v](x))}"
                for x in range(1, dec[v].order)
            )
            parts.append(f"{g.label(v)}->{self.target.graph.label(w)} [{elems}]")
        return "; ".join(parts)


class PartialHom:
    """An elementwise map between partial groups."""

    def __init__(self, source: PartialGroupHandle, target: PartialGroupHandle, fn: Callable[[Elem], Elem], name: str = ""):
        self.source = source
        self.target = target
        self.fn = fn
        self.name = name

    def __call__(self, e: Elem) -> Elem:
        return self.fn(e)

    def apply_word(self, w: Sequence[Elem]) -> tuple:
        return tuple(self.fn(e) for e in w)

    def compose(self, other: "PartialHom") -> "PartialHom":
        """`self` after `other`."""
        return PartialHom(other.source, self.target, lambda e: self.fn(other.fn(e)), f"{self.name} o {other.name}")


def induced_hom(m: DecMorphism) -> PartialHom:
    return PartialHom(build(m.source), build(m.target), m.apply, repr(m))


@dataclass
class HomReport:
    passed: bool
    n_words: int
    axiom: str = ""
    word: tuple = ()
    detail: str = ""
    incomplete: bool = False

    def replay(self, f: PartialHom) -> bool:
        """True when the recorded violation still occurs."""
        return _hom_violation(f, self.word) is not None


def _hom_violation(f: PartialHom, w: Sequence[Elem]) -> Optional[Tuple[str, str]]:
    image = f.apply_word(w)
    for e in image:
        if not f.target.contains(e):
            return "H1", f"{e!r} is not an element of the target"
    if not f.target.in_domain(image):
        return "H1", f"{f.target.format_word(image)} is not in the target domain"
    lhs = f.target.product(image)
    rhs = f(f.source.product(w))
    if lhs != rhs:
        return "H2", f"{f.target.format_elem(lhs)} != {f.target.format_elem(rhs)}"
    return None


def check_hom(
    f: PartialHom,
    max_word_len: int = DEFAULT_WORD_LEN,
    max_elem_size: int = DEFAULT_ELEM_LEN,
) -> HomReport:
    """Verify H1 (domain words go to domain words) and H2 (products commute) up to the bounds."""
    elems = sorted(f.source.enum_elems(max_elem_size), key=f.source.elem_key)
    words = [()]
    incomplete = False
    try:
        words.extend(enum_domain_words(f.source, elems, max_word_len))
    except EnumerationOverflow as e:
        logger.warning("homomorphism check truncated: %s", e)
        incomplete = True
    for w in words:
        found = _hom_violation(f, w)
        if found is not None:
            axiom, detail = found
            return HomReport(False, len(words), axiom, w, detail, incomplete)
    return HomReport(True, len(words), incomplete=incomplete)


def path_lift(f: GraphMap) -> DecMorphism:
    """A graph homomorphism as a morphism of graphs decorated by Z2 everywhere."""
    z2 = builtin_group("Z2")
    source, target = uniform(f.source, z2), uniform(f.target, z2)
    return DecMorphism(source, target, f, [GroupMap.identity(z2)] * f.source.n)


def decorate(f: PartialHom) -> DecMorphism:
    """
    Recover the decorated-graph morphism behind a homomorphism of M(G,H)'s.

    Each vertex group must land inside a single vertex group of the target;
    the vertex map and the group maps are read off the images of letters.
    """
    source, target = f.source, f.target
    if not isinstance(source, MGHandle) or not isinstance(target, MGHandle):
        raise TypeError("decorate needs homomorphisms between decorated-graph partial groups")
    vmap, fam = [], []
    for v in source.graph.vertices:
        g = source.dec[v]
        images = {}
        for x in range(1, g.order):
            y = f(CRWord((Letter(v, x),)))
            if len(y) != 1:
                raise ValueError(f"Letter {source.format_elem(CRWord((Letter(v, x),)))} does not map to a letter")
            images[x] = y[0]
        vertices = {letter.vertex for letter in images.values()}
        if len(vertices) != 1:
            raise ValueError(f"Vertex group at {source.graph.label(v)} is split across vertices")
        w = vertices.pop()
        vmap.append(w)
        fam.append(GroupMap(g, target.dec[w], [0] + [images[x].elem for x in range(1, g.order)]))
    return DecMorphism(source.decgraph, target.decgraph, GraphMap(source.graph, target.graph, vmap), fam)


def kernel(f: PartialHom, max_elem_size: int = DEFAULT_ELEM_LEN) -> frozenset:
    """Enumerated source elements sent to the unit."""
    return frozenset(e for e in f.source.enum_elems(max_elem_size) if f(e) == f.target.unit)


def kernel_is_torsion_free(f: PartialHom, max_elem_size: int = DEFAULT_ELEM_LEN, power_bound: int = 12) -> bool:
    """No non-unit kernel element has a power returning to the unit within `power_bound`."""
    for e in kernel(f, max_elem_size):
        if e == f.source.unit:
            continue
        if any(x == f.source.unit for _, x in powers(f.source, e, power_bound)):
            return False
    return True


@lru_cache(maxsize=None)
def _isomorphisms(a: FinGroup, b: FinGroup) -> Tuple[GroupMap, ...]:
    if a.order != b.order:
        return ()
    return tuple(injective_homs(a, b))


def predicted_aut_order(dg: DecGraph) -> int:
    """Order of the automorphism group from the exact sequence, without listing it."""
    aut_orders = [len(group_automorphisms(g)) for g in dg.dec]
    total = 0
    for sigma in graph_automorphisms(dg.graph):
        if all(find_isomorphism(dg.dec[v], dg.dec[sigma(v)]) is not None for v in dg.graph.vertices):
            count = 1
            for k in aut_orders:
                count *= k
            total += count
    return total


@dataclass
class AutGroupResult:
    decgraph: DecGraph
    elements: List[DecMorphism]
    table: FinGroup
    kernel: List[DecMorphism]
    image_in_graph_aut: List[GraphMap]
    graph_aut: List[GraphMap]

    @property
    def order(self) -> int:
        return len(self.elements)

    def kernel_table(self) -> FinGroup:
        return table_group(self.kernel, lambda a, b: a.compose(b))

    def image_table(self) -> FinGroup:
        return table_group([g.vmap for g in self.image_in_graph_aut], lambda p, q: tuple(p[w] for w in q))

    def exact_sequence(self) -> dict:
        """The sequence 1 -> prod Aut(H_v) -> Aut -> Aut(G) with its image and exactness."""
        kernel_name = identify(self.kernel_table())
        aut_name = identify(self.table)
        graph_name = identify(table_group([g.vmap for g in self.graph_aut], lambda p, q: tuple(p[w] for w in q)))
        image_order = len(self.image_in_graph_aut)
        return {
            "kernel": kernel_name,
            "kernel_order": len(self.kernel),
            "aut": aut_name,
            "aut_order": self.order,
            "graph_aut": graph_name,
            "graph_aut_order": len(self.graph_aut),
            "image_order": image_order,
            "image_trivial": image_order == 1,
            "surjective": image_order == len(self.graph_aut),
            "text": f"1 -> {kernel_name} -> {aut_name} -> {graph_name}",
        }

    def section(self) -> List[DecMorphism]:
        """Graph automorphisms lifted with identity families; needs uniform decorations."""
        if len(set(self.decgraph.dec)) > 1:
            raise ValueError("Identity lifts need all decorations equal")
        dg = self.decgraph
        return [DecMorphism(dg, dg, sigma, [GroupMap.identity(g) for g in dg.dec]) for sigma in self.graph_aut]

    def is_section(self) -> bool:
        """Lifts are automorphisms, project back onto their graph map, and compose like them."""
        lifts = self.section()
        members = set(self.elements)
        by_vmap = {lift.gmap.vmap: lift for lift in lifts}
        for lift, sigma in zip(lifts, self.graph_aut):
            if lift not in members or lift.gmap != sigma:
                return False
        for a, b in itertools.product(lifts, repeat=2):
            if a.compose(b) != by_vmap[a.gmap.compose(b.gmap).vmap]:
                return False
        return True


def aut_group(dg: DecGraph, verbose: Optional[bool] = False) -> AutGroupResult:
    """
    The automorphism group of the partial group of `dg`, computed on the graph side.

    Automorphisms are pairs (sigma, family of isomorphisms H_v -> H_sigma(v)),
    ordered by vertex permutation and then by the family maps.
    """
    graph_aut = graph_automorphisms(dg.graph)
    elements = []
    for sigma in tqdm.tqdm(graph_aut, disable=not verbose, desc="aut", unit="graph map"):
        choices = [_isomorphisms(dg.dec[v], dg.dec[sigma(v)]) for v in dg.graph.vertices]
        for fam in itertools.product(*choices):
            elements.append(DecMorphism(dg, dg, sigma, fam))
            SearchLimits.check_elements(len(elements), "automorphism enumeration")
    table = table_group(elements, lambda a, b: a.compose(b))
    kernel_elems = [m for m in elements if m.gmap.is_identity()]
    image, seen = [], set()
    for m in elements:
        if m.gmap.vmap not in seen:
            seen.add(m.gmap.vmap)
            image.append(m.gmap)
    logger.debug("aut group of %r has order %d", dg, len(elements))
    return AutGroupResult(dg, elements, table, kernel_elems, image, graph_aut)


@dataclass(frozen=True)
class TruncatedAut:
    """A bijection of the truncated alphabet, as images of its elements in enumeration order."""
    images: Tuple[int, ...]


def _index_words(h: MGHandle, elems: List[CRWord], max_len: int, max_word_len: int):
    # domain words of total letter length <= max_len, as index tuples with product index
    index = {e: i for i, e in enumerate(elems)}
    nonunit = [e for e in elems if e]
    words: Dict[Tuple[int, ...], int] = {}
    level = [((), 0)]
    cap = SearchLimits.get_max_elements()
    for _ in range(max_word_len):
        nxt = []
        for w, size in level:
            for e in nonunit:
                if size + len(e) > max_len:
                    break
                candidate = w + (e,)
                if h.in_domain(candidate):
                    key = tuple(index[x] for x in candidate)
                    words[key] = index[h.product(candidate)]
                    nxt.append((candidate, size + len(e)))
            if len(words) > cap:
                raise EnumerationOverflow(f"more than {cap} truncated domain words")
        level = nxt
    return index, words


def brute_aut_truncated(
    h: MGHandle,
    max_len: int,
    max_word_len: Optional[int] = None,
    verbose: Optional[bool] = False,
) -> List[TruncatedAut]:
    """
    Automorphisms of the truncated partial group, found without graph theory.

    Backtracks over bijections of the length-1 alphabet, pruning by pair
    domain membership, pair products and inverses; extends each survivor to
    all elements of length <= max_len through in-domain decompositions; keeps
    the bijections that preserve domain membership and products in both
    directions on every domain word of total length <= max_len.

    Parameters
    ----------
    h: MGHandle
        The partial group.

    max_len: int
        Truncation length for elements and for the total length of checked words.

    max_word_len: int
        Most entries in a checked domain word; defaults to `max_len`.

    Returns
    -------
    The truncated automorphisms, sorted by their images.
    """
    max_word_len = max_len if max_word_len is None else max_word_len
    elems = sorted(h.enum_elems(max_len), key=h.elem_key)
    index, words = _index_words(h, elems, max_len, max_word_len)
    letters = [i for i, e in enumerate(elems) if len(e) == 1]
    unit = index[h.unit]
    pair_cache: Dict[Tuple[int, int], Optional[int]] = {}

    def pair(i: int, j: int) -> Optional[int]:
        # product index of an in-domain pair, -1 when the product leaves the truncation
        key = (i, j)
        if key not in pair_cache:
            w = (elems[i], elems[j])
            if h.in_domain(w):
                pair_cache[key] = index.get(h.product(w), -1)
            else:
                pair_cache[key] = None
        return pair_cache[key]

    def consistent(phi: Dict[int, int], x: int) -> bool:
        y = phi[x]
        inv_x, inv_y = index[h.inverse(elems[x])], index[h.inverse(elems[y])]
        if inv_x in phi and phi[inv_x] != inv_y:
            return False
        for x2, y2 in phi.items():
            for a, b, c, d in ((x, x2, y, y2), (x2, x, y2, y)):
                p, q = pair(a, b), pair(c, d)
                if (p is None) != (q is None):
                    return False
                if p is None:
                    continue
                if (p == -1) != (q == -1):
                    return False
                if p == -1:
                    continue
                if (p == unit) != (q == unit):
                    return False
                # length-1 images are taken by letters, so products must match in kind
                if (len(elems[p]) == 1) != (len(elems[q]) == 1):
                    return False
                if p in phi and phi[p] != q:
                    return False
        return True

    candidates: List[Dict[int, int]] = []

    def assign(k: int, phi: Dict[int, int], used: set):
        if k == len(letters):
            candidates.append(dict(phi))
            return
        x = letters[k]
        for y in letters:
            if y in used:
                continue
            phi[x] = y
            if consistent(phi, x):
                used.add(y)
                assign(k + 1, phi, used)
                used.discard(y)
            del phi[x]

    assign(0, {}, set())
    logger.debug("%d letter bijections survive pair pruning", len(candidates))

    found = []
    for phi in tqdm.tqdm(candidates, disable=not verbose, desc="oracle", unit="map"):
        images = _extend_to_truncation(h, elems, index, phi, unit)
        if images is None:
            continue
        if _preserves_words(images, words):
            found.append(TruncatedAut(tuple(images)))
    found.sort(key=lambda t: t.images)
    return found


def _decompose(h: MGHandle, e: CRWord) -> Tuple[CRWord, CRWord]:
    # split e = u v with (u, v) in the domain and both factors shorter than e
    for k in (1, 2):
        u, v = CRWord(e[:k]), e[k:]
        if not h.contains(v):
            continue
        v = CRWord(v)
        if h.in_domain((u, v)) and h.product((u, v)) == e:
            return u, v
    raise DomainError(f"No in-domain decomposition of {h.format_elem(e)}")


def _extend_to_truncation(h, elems, index, phi, unit) -> Optional[List[int]]:
    images = [-1] * len(elems)
    images[unit] = unit
    for x, y in phi.items():
        images[x] = y
    for i, e in enumerate(elems):
        if images[i] >= 0:
            continue
        u, v = _decompose(h, e)
        fu, fv = elems[images[index[u]]], elems[images[index[v]]]
        if not h.in_domain((fu, fv)):
            return None
        target = h.product((fu, fv))
        if target not in index:
            return None
        images[i] = index[target]
    if len(set(images)) != len(images):
        return None
    return images


def _preserves_words(images: List[int], words: Dict[Tuple[int, ...], int]) -> bool:
    inverse = [0] * len(images)
    for i, j in enumerate(images):
        inverse[j] = i
    for table in (images, inverse):
        for w, prod in words.items():
            mapped = tuple(table[i] for i in w)
            if words.get(mapped, -1) != table[prod]:
                return False
    return True


def restrict(m: DecMorphism, elems: Sequence[CRWord]) -> Optional[TruncatedAut]:
    """The action of a decorated-graph automorphism on a truncated alphabet."""
    index = {e: i for i, e in enumerate(elems)}
    images = []
    for e in elems:
        image = m.apply(e)
        if image not in index:
            return None
        images.append(index[image])
    return TruncatedAut(tuple(images))


@dataclass
class OracleAgreement:
    agree: bool
    oracle_count: int
    predicted_count: int
    max_len: int
    spurious: List[TruncatedAut]
    missing: List[TruncatedAut]


def oracle_agreement(
    dg: DecGraph,
    max_len: int,
    max_word_len: Optional[int] = None,
    verbose: Optional[bool] = False,
    aut: Optional[AutGroupResult] = None,
) -> OracleAgreement:
    """
    Compare the truncated brute-force automorphisms with the restricted graph-side group.

    `aut` is the result of `aut_group(dg)` when the caller already has it.
    """
    h = build(dg)
    oracle = brute_aut_truncated(h, max_len, max_word_len, verbose=verbose)
    elems = sorted(h.enum_elems(max_len), key=h.elem_key)
    aut = aut_group(dg) if aut is None else aut
    predicted = [restrict(m, elems) for m in aut.elements]
    oracle_set = set(oracle)
    predicted_set = {t for t in predicted if t is not None}
    spurious = sorted(oracle_set - predicted_set, key=lambda t: t.images)
    missing = sorted(predicted_set - oracle_set, key=lambda t: t.images)
    if spurious:
        warnings.warn(
            f"{len(spurious)} truncated automorphisms at length {max_len} are not induced by "
            f"decorated-graph automorphisms of {dg!r}"
        )
    agree = not spurious and not missing and len(predicted_set) == len(predicted) == len(oracle)
    return OracleAgreement(agree, len(oracle), len(predicted), max_len, spurious, missing)
