import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import tqdm
from networkx.utils import UnionFind

from .fingroup import FinGroup, GroupAxiomError, GroupMap, induced_subgroup
from .options import DEFAULT_ELEM_LEN, DEFAULT_WORD_LEN, EnumerationOverflow, SearchLimits

logger = logging.getLogger(__name__)

Elem = Hashable
AXIOMS = ("D1", "D2", "P1", "P2", "P3")


class DomainError(ValueError):
    """A word is outside the domain, or an entry is outside the alphabet."""


class PartialGroupHandle(ABC):
    """
    A partial group given intensionally.

    Subclasses provide membership, the domain predicate, the product on domain
    words and inversion, plus a bounded element enumerator. Nothing is ever
    materialised beyond what a caller asks for.
    """

    unit: Elem

    @abstractmethod
    def contains(self, e: Elem) -> bool:
        ...

    @abstractmethod
    def in_domain(self, w: Sequence[Elem]) -> bool:
        ...

    @abstractmethod
    def product(self, w: Sequence[Elem]) -> Elem:
        ...

    @abstractmethod
    def inverse(self, e: Elem) -> Elem:
        ...

    @abstractmethod
    def enum_elems(self, max_size: int) -> Iterator[Elem]:
        ...

    @abstractmethod
    def describe(self) -> str:
        ...

    def elem_size(self, e: Elem) -> int:
        """Size used by enumeration bounds (word length for word handles)."""
        return 0 if e == self.unit else 1

    def elem_key(self, e: Elem):
        return e

    def format_elem(self, e: Elem) -> str:
        return str(e)

    def parse_elem(self, text: str) -> Elem:
        raise NotImplementedError(f"{type(self).__name__} has no element syntax")

    def format_word(self, w: Sequence[Elem]) -> str:
        return "(" + ", ".join(self.format_elem(e) for e in w) + ")"

    def invert_word(self, w: Sequence[Elem]) -> tuple:
        return tuple(self.inverse(e) for e in reversed(w))

    def _check_entries(self, w: Sequence[Elem]):
        for e in w:
            if not self.contains(e):
                raise DomainError(f"{e!r} is not an element of {self.describe()}")

    def __repr__(self):
        return f"<{type(self).__name__}: {self.describe()}>"


class GroupHandle(PartialGroupHandle):
    """A finite group seen as a partial group whose domain is every word."""

    def __init__(self, g: FinGroup):
        self.group = g
        self.unit = 0

    def contains(self, e):
        return isinstance(e, int) and 0 <= e < self.group.order

    def in_domain(self, w):
        self._check_entries(w)
        return True

    def product(self, w):
        self._check_entries(w)
        result = 0
        for x in w:
            result = self.group.mul(result, x)
        return result

    def inverse(self, e):
        self._check_entries((e,))
        return self.group.inverse(e)

    def enum_elems(self, max_size=DEFAULT_ELEM_LEN):
        yield from (self.group.elements() if max_size > 0 else [0])

    def describe(self):
        return f"group {self.group}"

    def format_elem(self, e):
        return self.group.label(e)

    def parse_elem(self, text):
        return self.group.index(text)


def from_group(g: FinGroup) -> GroupHandle:
    return GroupHandle(g)


class FreeOnOneHandle(PartialGroupHandle):
    """
    The free partial group on one generator.

    Elements are 0 (unit), 1 (a) and -1 (a^-1). A word is in the domain when,
    ignoring units, it alternates between a and a^-1; its product is the
    exponent sum.
    """

    _names = {0: "1", 1: "a", -1: "a^-1"}

    def __init__(self):
        self.unit = 0

    def contains(self, e):
        return e in (0, 1, -1) and not isinstance(e, bool)

    def in_domain(self, w):
        self._check_entries(w)
        core = [x for x in w if x != 0]
        return all(x != y for x, y in zip(core, core[1:]))

    def product(self, w):
        if not self.in_domain(w):
            raise DomainError(f"{self.format_word(w)} is not in the domain")
        return sum(w)

    def inverse(self, e):
        self._check_entries((e,))
        return -e

    def enum_elems(self, max_size=1):
        yield from ((0, 1, -1) if max_size > 0 else (0,))

    def elem_key(self, e):
        return (abs(e), -e)

    def describe(self):
        return "free partial group on one generator"

    def format_elem(self, e):
        return self._names[e]

    def parse_elem(self, text):
        for e, name in self._names.items():
            if text.strip() == name:
                return e
        raise KeyError(f"Unknown element {text!r}; expected one of {list(self._names.values())}")


def free_on_one() -> FreeOnOneHandle:
    return FreeOnOneHandle()


class GroupDiagram:
    """
    A finite acyclic diagram of injective group homomorphisms.

    `arrows` holds (src, dst, map) triples with `map: nodes[src] -> nodes[dst]`.
    """

    def __init__(
        self,
        nodes: Sequence[FinGroup],
        arrows: Sequence[Tuple[int, int, GroupMap]],
        names: Optional[Sequence[str]] = None,
    ):
        self.nodes = tuple(nodes)
        self.names = tuple(names) if names is not None else tuple(f"G{i}" for i in range(len(nodes)))
        if not self.nodes:
            raise ValueError("A diagram needs at least one node")
        if len(self.names) != len(self.nodes):
            raise ValueError("One name per node expected")
        shape = nx.DiGraph()
        shape.add_nodes_from(range(len(self.nodes)))
        for src, dst, f in arrows:
            if not (0 <= src < len(self.nodes) and 0 <= dst < len(self.nodes)):
                raise ValueError(f"Arrow {src} -> {dst} uses an unknown node")
            if f.source != self.nodes[src] or f.target != self.nodes[dst]:
                raise ValueError(f"Arrow {src} -> {dst} does not match its node groups")
            if not f.is_injective():
                raise ValueError(f"Arrow {src} -> {dst} is not injective")
            shape.add_edge(src, dst)
        if not nx.is_directed_acyclic_graph(shape):
            raise ValueError("Diagram shape must be acyclic")
        self.arrows = tuple(arrows)

    @classmethod
    def from_subgroups(
        cls,
        ambient: FinGroup,
        subsets: Sequence[Iterable],
        inclusions: Sequence[Tuple[int, int]],
        names: Optional[Sequence[str]] = None,
    ) -> "GroupDiagram":
        """Diagram of subgroups of `ambient` (given by element labels or indices) and inclusions."""
        members, nodes = [], []
        for i, subset in enumerate(subsets):
            elems = sorted({ambient.index(str(x)) for x in subset})
            sub, _ = induced_subgroup(ambient, elems, name=names[i] if names else None)
            members.append(elems)
            nodes.append(sub)
        arrows = []
        for src, dst in inclusions:
            position = {x: k for k, x in enumerate(members[dst])}
            if not set(members[src]) <= set(position):
                raise ValueError(f"Node {src} is not contained in node {dst}")
            arrows.append((src, dst, GroupMap(nodes[src], nodes[dst], [position[x] for x in members[src]])))
        return cls(nodes, arrows, names)


class ColimitHandle(PartialGroupHandle):
    """
    Colimit in partial groups of a diagram of group injections.

    Elements are equivalence classes of (node, element) pairs under
    x ~ f(x) for every arrow f, with all node identities identified. Each
    class is represented by its least (node, element) pair. A word lies in the
    domain when all of its entries have representatives in one common node.
    """

    def __init__(self, diagram: GroupDiagram):
        self.diagram = diagram
        uf = UnionFind()
        for i, g in enumerate(diagram.nodes):
            for x in g.elements():
                uf[(i, x)]
            uf.union((0, 0), (i, 0))
        for src, dst, f in diagram.arrows:
            for x in diagram.nodes[src].elements():
                uf.union((src, x), (dst, f(x)))

        self._rep: Dict[Tuple[int, int], Tuple[int, int]] = {}
        self._witnesses: Dict[Tuple[int, int], Dict[int, int]] = {}
        for members in uf.to_sets():
            rep = min(members)
            by_node: Dict[int, int] = {}
            for node, x in members:
                if node in by_node:
                    raise ValueError(
                        f"Diagram identifies two elements of node {diagram.names[node]}; "
                        f"only commuting injection diagrams are supported"
                    )
                by_node[node] = x
                self._rep[(node, x)] = rep
            self._witnesses[rep] = by_node
        self.unit = self._rep[(0, 0)]
        self._names = self._make_names()
        logger.debug("colimit of %d nodes has %d classes", len(diagram.nodes), len(self._witnesses))

    def _make_names(self) -> Dict[Tuple[int, int], str]:
        plain = {rep: self.diagram.nodes[rep[0]].label(rep[1]) for rep in self._witnesses}
        counts: Dict[str, int] = {}
        for name in plain.values():
            counts[name] = counts.get(name, 0) + 1
        return {
            rep: name if counts[name] == 1 else f"{name}@{self.diagram.names[rep[0]]}"
            for rep, name in plain.items()
        }

    def lookup(self, node: int, x: int) -> Tuple[int, int]:
        return self._rep[(node, x)]

    def node_elements(self, node: int) -> frozenset:
        """The classes of the elements of one node group."""
        return frozenset(self._rep[(node, x)] for x in self.diagram.nodes[node].elements())

    def witnesses(self, w: Sequence[Elem]) -> List[int]:
        self._check_entries(w)
        common = set(range(len(self.diagram.nodes)))
        for e in w:
            if e != self.unit:
                common &= self._witnesses[e].keys()
        return sorted(common)

    def contains(self, e):
        return e in self._witnesses

    def in_domain(self, w):
        return bool(self.witnesses(w))

    def products_by_witness(self, w: Sequence[Elem]) -> Dict[int, Elem]:
        """The product of `w` evaluated in every witnessing node."""
        out = {}
        for node in self.witnesses(w):
            g = self.diagram.nodes[node]
            result = 0
            for e in w:
                result = g.mul(result, self._witnesses[e][node])
            out[node] = self._rep[(node, result)]
        return out

    def product(self, w):
        nodes = self.witnesses(w)
        if not nodes:
            raise DomainError(f"{self.format_word(w)} is not in the domain")
        node = nodes[0]
        g = self.diagram.nodes[node]
        result = 0
        for e in w:
            result = g.mul(result, self._witnesses[e][node])
        return self._rep[(node, result)]

    def inverse(self, e):
        self._check_entries((e,))
        node, x = e
        return self._rep[(node, self.diagram.nodes[node].inverse(x))]

    def enum_elems(self, max_size=DEFAULT_ELEM_LEN):
        if max_size <= 0:
            yield self.unit
            return
        yield from sorted(self._witnesses)

    def describe(self):
        return "colimit of " + ", ".join(
            f"{name}({g.order})" for name, g in zip(self.diagram.names, self.diagram.nodes)
        )

    def format_elem(self, e):
        return self._names[e]

    def parse_elem(self, text):
        text = text.strip()
        for rep, name in self._names.items():
            if name == text:
                return rep
        # a label that is ambiguous across classes may still be qualified by node
        label, _, node_name = text.partition("@")
        for node, g in enumerate(self.diagram.nodes):
            if node_name and self.diagram.names[node] != node_name:
                continue
            if g.labels is not None and label in g.labels:
                return self._rep[(node, g.labels.index(label))]
        raise KeyError(f"Unknown element {text!r}")


def colimit_of_groups(d: GroupDiagram) -> ColimitHandle:
    return ColimitHandle(d)


class CorruptedHandle(PartialGroupHandle):
    """Wraps a handle, overriding the product of exactly one word."""

    def __init__(self, inner: PartialGroupHandle, word: Sequence[Elem], value: Elem):
        self.inner = inner
        self.word = tuple(word)
        self.value = value
        self.unit = inner.unit

    def contains(self, e):
        return self.inner.contains(e)

    def in_domain(self, w):
        return self.inner.in_domain(w)

    def product(self, w):
        if tuple(w) == self.word:
            return self.value
        return self.inner.product(w)

    def inverse(self, e):
        return self.inner.inverse(e)

    def enum_elems(self, max_size=DEFAULT_ELEM_LEN):
        return self.inner.enum_elems(max_size)

    def elem_size(self, e):
        return self.inner.elem_size(e)

    def elem_key(self, e):
        return self.inner.elem_key(e)

    def format_elem(self, e):
        return self.inner.format_elem(e)

    def parse_elem(self, text):
        return self.inner.parse_elem(text)

    def describe(self):
        return f"{self.inner.describe()} with product of {self.inner.format_word(self.word)} remapped"


def corrupt_product(p: PartialGroupHandle, word: Sequence[Elem], value: Elem) -> CorruptedHandle:
    return CorruptedHandle(p, word, value)


def powers(p: PartialGroupHandle, e: Elem, bound: int) -> Iterator[Tuple[int, Elem]]:
    """(k, e^k) for k = 1..bound, stopping once (e^(k-1), e) leaves the domain."""
    x = e
    yield 1, x
    for k in range(2, bound + 1):
        if not p.in_domain((x, e)):
            return
        x = p.product((x, e))
        yield k, x


def enum_domain_words(
    p: PartialGroupHandle,
    elems: Sequence[Elem],
    max_word_len: int,
) -> Iterator[tuple]:
    """
    Non-degenerate domain words over `elems`, by length then by position.

    Words are grown by appending one entry at a time; prefixes of domain words
    are domain words, so pruning at a failing prefix loses nothing.
    """
    letters = [e for e in elems if e != p.unit]
    level = [()]
    count = 0
    cap = SearchLimits.get_max_elements()
    for _ in range(max_word_len):
        nxt = []
        for w in level:
            for e in letters:
                candidate = w + (e,)
                if p.in_domain(candidate):
                    count += 1
                    if count > cap:
                        raise EnumerationOverflow(
                            f"more than {cap} domain words; lower --max-len or raise PATHPART_MAX_MEM"
                        )
                    nxt.append(candidate)
                    yield candidate
        level = nxt
        if not level:
            break


@dataclass(frozen=True)
class Counterexample:
    axiom: str
    word: tuple
    split: Tuple[int, ...] = ()
    detail: str = ""

    def replay(self, p: PartialGroupHandle) -> bool:
        """True when the violation still occurs on `p`."""
        return _CHECKS[self.axiom](p, self.word, self.split) is not None

    def describe(self, p: PartialGroupHandle) -> str:
        where = f" split at {list(self.split)}" if self.split else ""
        return f"{self.axiom} fails on {p.format_word(self.word)}{where}: {self.detail}"


@dataclass
class AxiomReport:
    max_elem_size: int
    max_word_len: int
    verdicts: Dict[str, bool] = field(default_factory=lambda: {a: True for a in AXIOMS})
    counterexamples: Dict[str, Counterexample] = field(default_factory=dict)
    n_elems: int = 0
    n_words: int = 0
    incomplete: bool = False

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def record(self, cx: Counterexample):
        self.verdicts[cx.axiom] = False
        self.counterexamples.setdefault(cx.axiom, cx)

    def to_dict(self, p: Optional[PartialGroupHandle] = None) -> dict:
        return {
            "bounds": {"max_elem_size": self.max_elem_size, "max_word_len": self.max_word_len},
            "elements": self.n_elems,
            "domain_words": self.n_words,
            "incomplete": self.incomplete,
            "verdicts": dict(self.verdicts),
            "counterexamples": {
                a: {
                    "word": p.format_word(cx.word) if p is not None else repr(cx.word),
                    "split": list(cx.split),
                    "detail": cx.detail,
                }
                for a, cx in self.counterexamples.items()
            },
        }


def _check_d1(p, word, split):
    return None if p.in_domain(word) else "length-1 word not in the domain"


def _check_p1(p, word, split):
    value = p.product(word)
    return None if value == word[0] else f"product is {p.format_elem(value)}"


def _check_d2(p, word, split):
    (i,) = split
    if not p.in_domain(word[:i]):
        return "left factor not in the domain"
    if not p.in_domain(word[i:]):
        return "right factor not in the domain"
    return None


def _check_p2(p, word, split):
    i, j = split
    collapsed = word[:i] + (p.product(word[i:j]),) + word[j:]
    if not p.in_domain(collapsed):
        return f"{p.format_word(collapsed)} not in the domain"
    lhs, rhs = p.product(word), p.product(collapsed)
    if lhs != rhs:
        return f"products differ: {p.format_elem(lhs)} vs {p.format_elem(rhs)}"
    return None


def _check_p3(p, word, split):
    for e in word:
        if p.inverse(p.inverse(e)) != e:
            return f"inversion is not involutive on {p.format_elem(e)}"
    both = p.invert_word(word) + tuple(word)
    if not p.in_domain(both):
        return f"{p.format_word(both)} not in the domain"
    value = p.product(both)
    if value != p.unit:
        return f"u^-1 u multiplies to {p.format_elem(value)}"
    return None


_CHECKS: Dict[str, Callable] = {
    "D1": _check_d1,
    "D2": _check_d2,
    "P1": _check_p1,
    "P2": _check_p2,
    "P3": _check_p3,
}


def check_axioms(
    p: PartialGroupHandle,
    max_elem_size: int = DEFAULT_ELEM_LEN,
    max_word_len: int = DEFAULT_WORD_LEN,
    verbose: Optional[bool] = False,
) -> AxiomReport:
    """
    Check the partial-group axioms on a bounded part of `p`.

    Parameters
    ----------
    p: PartialGroupHandle
        The handle to check.

    max_elem_size: int
        Elements are enumerated up to this size.

    max_word_len: int
        Non-degenerate domain words are enumerated up to this length; unit
        insertions are covered by the empty middle factor of the P2 splits.

    verbose: bool
        Show a progress bar over the domain words.

    Returns
    -------
    An AxiomReport. A failing axiom always carries its first counterexample;
    `incomplete` is set when the element cap cut the enumeration short.
    """
    report = AxiomReport(max_elem_size, max_word_len)
    elems = sorted(p.enum_elems(max_elem_size), key=p.elem_key)
    report.n_elems = len(elems)

    for e in elems:
        for axiom in ("D1", "P1"):
            if report.verdicts[axiom]:
                detail = _CHECKS[axiom](p, (e,), ())
                if detail is not None:
                    report.record(Counterexample(axiom, (e,), (), detail))

    words = [()]
    try:
        for w in enum_domain_words(p, elems, max_word_len):
            words.append(w)
    except EnumerationOverflow as e:
        logger.warning("axiom check truncated: %s", e)
        report.incomplete = True
    report.n_words = len(words) - 1

    for w in tqdm.tqdm(words, disable=not verbose, desc="axioms", unit="word"):
        n = len(w)
        if report.verdicts["D2"]:
            for i in range(1, n):
                detail = _check_d2(p, w, (i,))
                if detail is not None:
                    report.record(Counterexample("D2", w, (i,), detail))
                    break
        if report.verdicts["P2"]:
            for i, j in itertools.combinations_with_replacement(range(n + 1), 2):
                detail = _check_p2(p, w, (i, j))
                if detail is not None:
                    report.record(Counterexample("P2", w, (i, j), detail))
                    break
        if report.verdicts["P3"]:
            detail = _check_p3(p, w, ())
            if detail is not None:
                report.record(Counterexample("P3", w, (), detail))
    logger.debug("checked %d elements and %d domain words of %s", len(elems), len(words), p.describe())
    return report


def induced_table(p: PartialGroupHandle, elems: Iterable[Elem], name: Optional[str] = None) -> FinGroup:
    """
    The multiplication table induced on `elems`, unit first.

    Raises GroupAxiomError when the set is not closed under binary products
    (or a pair is not in the domain), or the table is not a group.
    """
    ordered = sorted(set(elems), key=p.elem_key)
    if p.unit in ordered:
        ordered.remove(p.unit)
    ordered.insert(0, p.unit)
    index = {e: i for i, e in enumerate(ordered)}
    table = [[0] * len(ordered) for _ in ordered]
    for i, x in enumerate(ordered):
        for j, y in enumerate(ordered):
            if not p.in_domain((x, y)):
                raise GroupAxiomError("closure", f"{p.format_word((x, y))} is not in the domain")
            xy = p.product((x, y))
            if xy not in index:
                raise GroupAxiomError("closure", f"{p.format_word((x, y))} leaves the set")
            table[i][j] = index[xy]
    labels = [p.format_elem(e) for e in ordered]
    if len(set(labels)) != len(labels):
        labels = None
    return FinGroup(table, labels=labels, name=name)


def is_subgroup(p: PartialGroupHandle, s: Iterable[Elem], max_word_len: Optional[int] = None) -> bool:
    """
    Whether every word over `s` is in the domain with product in `s`.

    Words are tested up to length max(3, |s|+1) unless `max_word_len` is
    given, after which the induced table must be a group.
    """
    s = set(s)
    if p.unit not in s:
        return False
    if any(p.inverse(e) not in s for e in s):
        return False
    bound = max(3, len(s) + 1) if max_word_len is None else max_word_len
    ordered = sorted(s, key=p.elem_key)
    for k in range(1, bound + 1):
        for w in itertools.product(ordered, repeat=k):
            if not p.in_domain(w) or p.product(w) not in s:
                return False
    try:
        induced_table(p, s)
    except GroupAxiomError:
        return False
    return True


def is_partial_subgroup(p: PartialGroupHandle, s: Iterable[Elem], max_word_len: int = DEFAULT_WORD_LEN) -> bool:
    """Closed under inversion, and products of domain words over `s` stay in `s`."""
    s = set(s)
    if p.unit not in s or any(p.inverse(e) not in s for e in s):
        return False
    ordered = sorted(s, key=p.elem_key)
    return all(p.product(w) in s for w in enum_domain_words(p, ordered, max_word_len))
