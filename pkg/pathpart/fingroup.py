import itertools
import logging
import re
from collections import deque
from typing import Callable, Hashable, Iterable, List, Optional, Sequence

import numba
import numpy as np

logger = logging.getLogger(__name__)


class GroupAxiomError(ValueError):
    """A multiplication table failed one of the group axioms.

    `axiom` is one of "closure", "identity", "inverse", "associativity".
    """

    def __init__(self, axiom: str, message: str):
        super().__init__(f"{axiom}: {message}")
        self.axiom = axiom


@numba.jit(nopython=True)
def _associativity_violation(table: np.ndarray):
    n = table.shape[0]
    for x in range(n):
        for y in range(n):
            xy = table[x, y]
            for z in range(n):
                if table[xy, z] != table[x, table[y, z]]:
                    return x, y, z
    return -1, -1, -1


@numba.jit(nopython=True)
def _homomorphism_violation(src: np.ndarray, dst: np.ndarray, images: np.ndarray):
    n = src.shape[0]
    for x in range(n):
        for y in range(n):
            if images[src[x, y]] != dst[images[x], images[y]]:
                return x, y
    return -1, -1


class FinGroup:
    """
    A finite group given by its multiplication table.

    Elements are the integers 0..order-1 and 0 is always the identity. The
    table is validated exhaustively at construction and stored read-only, so
    instances can be shared freely.
    """

    def __init__(
        self,
        table,
        labels: Optional[Sequence[str]] = None,
        name: Optional[str] = None,
    ):
        table = np.asarray(table)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise GroupAxiomError("closure", "table must be a non-empty square array")
        if not np.issubdtype(table.dtype, np.integer):
            raise GroupAxiomError("closure", "table entries must be integers")
        n = table.shape[0]
        if table.min() < 0 or table.max() >= n:
            raise GroupAxiomError("closure", f"table entries must lie in 0..{n - 1}")
        table = np.ascontiguousarray(table, dtype=np.int64)

        elems = np.arange(n)
        if not (np.array_equal(table[0], elems) and np.array_equal(table[:, 0], elems)):
            raise GroupAxiomError("identity", "0 is not a two-sided identity")

        inv = np.empty(n, dtype=np.int64)
        for x in range(n):
            candidates = np.flatnonzero((table[x] == 0) & (table[:, x] == 0))
            if len(candidates) == 0:
                raise GroupAxiomError("inverse", f"no inverse for {x}")
            inv[x] = candidates[0]

        x, y, z = _associativity_violation(table)
        if x >= 0:
            raise GroupAxiomError(
                "associativity", f"({x}*{y})*{z} differs from {x}*({y}*{z})"
            )

        if labels is not None:
            labels = tuple(str(label) for label in labels)
            if len(labels) != n:
                raise ValueError(f"Expected {n} labels, got {len(labels)}")
            if len(set(labels)) != n:
                raise ValueError("Element labels must be pairwise distinct")

        table.setflags(write=False)
        inv.setflags(write=False)
        self._table = table
        self._inv = inv
        self._labels = labels
        self.name = name
        self._key = table.tobytes()

    @property
    def order(self) -> int:
        return self._table.shape[0]

    @property
    def identity(self) -> int:
        return 0

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def inv(self) -> np.ndarray:
        return self._inv

    @property
    def labels(self) -> Optional[tuple]:
        return self._labels

    def elements(self) -> range:
        return range(self.order)

    def mul(self, x: int, y: int) -> int:
        return int(self._table[x, y])

    def inverse(self, x: int) -> int:
        return int(self._inv[x])

    def label(self, x: int) -> str:
        if self._labels is None:
            return str(x)
        return self._labels[x]

    def index(self, label: str) -> int:
        """Element index for a label; bare integers are accepted as indices."""
        if self._labels is not None and label in self._labels:
            return self._labels.index(label)
        try:
            x = int(label)
        except (TypeError, ValueError):
            raise KeyError(f"Unknown element {label!r} in {self}") from None
        if not 0 <= x < self.order:
            raise KeyError(f"Element {x} out of range for {self}")
        return x

    def __eq__(self, other):
        if not isinstance(other, FinGroup):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"FinGroup({self.name or 'order ' + str(self.order)})"

    def __str__(self):
        return self.name or f"group of order {self.order}"


class GroupMap:
    """A homomorphism between finite groups, stored as an image array."""

    def __init__(self, source: FinGroup, target: FinGroup, images: Sequence[int]):
        images = np.asarray(images, dtype=np.int64)
        if images.shape != (source.order,):
            raise ValueError(f"Expected {source.order} images, got {images.shape}")
        if images.min() < 0 or images.max() >= target.order:
            raise ValueError("Image outside the target group")
        if images[0] != 0:
            raise ValueError("Identity must map to the identity")
        x, y = _homomorphism_violation(source.table, target.table, images)
        if x >= 0:
            raise ValueError(f"Not a homomorphism: f({x}*{y}) != f({x})*f({y})")
        self.source = source
        self.target = target
        self.images = tuple(int(i) for i in images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.source.order == self.target.order

    def compose(self, other: "GroupMap") -> "GroupMap":
        """`self` after `other`."""
        if other.target != self.source:
            raise ValueError("Maps are not composable")
        return GroupMap(other.source, self.target, [self.images[i] for i in other.images])

    def inverse(self) -> "GroupMap":
        if not self.is_bijective():
            raise ValueError("Only bijective maps can be inverted")
        images = [0] * self.source.order
        for x, y in enumerate(self.images):
            images[y] = x
        return GroupMap(self.target, self.source, images)

    @classmethod
    def identity(cls, g: FinGroup) -> "GroupMap":
        return cls(g, g, range(g.order))

    def is_identity(self) -> bool:
        return self.source == self.target and self.images == tuple(range(self.source.order))

    def __eq__(self, other):
        if not isinstance(other, GroupMap):
            return NotImplemented
        return (
            self.images == other.images
            and self.source == other.source
            and self.target == other.target
        )

    def __hash__(self):
        return hash((self.images, self.source, self.target))

    def __repr__(self):
        return f"GroupMap({self.source} -> {self.target}, {list(self.images)})"


def make_cyclic(n: int) -> FinGroup:
    if n < 1:
        raise ValueError(f"Cyclic group order must be at least 1, got {n}")
    elems = np.arange(n)
    table = (elems[:, None] + elems[None, :]) % n
    return FinGroup(table, name=f"Z{n}")


def make_from_table(table, labels: Optional[Sequence[str]] = None, name: Optional[str] = None) -> FinGroup:
    return FinGroup(table, labels=labels, name=name)


def direct_product(a: FinGroup, b: FinGroup) -> FinGroup:
    # element (i, j) is stored at i * |b| + j
    table = (a.table[:, None, :, None] * b.order + b.table[None, :, None, :]).reshape(
        a.order * b.order, a.order * b.order
    )
    labels = None
    if a.labels is not None or b.labels is not None:
        labels = [f"({a.label(i)},{b.label(j)})" for i in a.elements() for j in b.elements()]
    name = f"{a}x{b}" if a.name and b.name else None
    return FinGroup(table, labels=labels, name=name)


def element_order(g: FinGroup, x: int) -> int:
    k, y = 1, x
    while y != 0:
        y = g.mul(y, x)
        k += 1
    return k


def subgroup_closure(g: FinGroup, seed: Iterable[int]) -> frozenset:
    """Smallest subgroup of `g` containing `seed`."""
    seed = sorted(set(seed))
    for x in seed:
        if not 0 <= x < g.order:
            raise ValueError(f"Element {x} out of range for {g}")
    closed = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in seed:
            y = g.mul(x, s)
            if y not in closed:
                closed.add(y)
                queue.append(y)
    return frozenset(closed)


def induced_subgroup(g: FinGroup, elems: Iterable[int], name: Optional[str] = None):
    """
    The subgroup on `elems` as a FinGroup of its own.

    Returns the subgroup and the inclusion into `g` (a GroupMap). Element
    labels are inherited from `g`.
    """
    elems = sorted(set(elems))
    if not elems or elems[0] != 0:
        raise GroupAxiomError("identity", "a subgroup must contain the identity")
    index = {x: i for i, x in enumerate(elems)}
    table = np.empty((len(elems), len(elems)), dtype=np.int64)
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            xy = g.mul(x, y)
            if xy not in index:
                raise GroupAxiomError("closure", f"{g.label(x)}*{g.label(y)} leaves the subset")
            table[i, j] = index[xy]
    sub = FinGroup(table, labels=[g.label(x) for x in elems], name=name)
    return sub, GroupMap(sub, g, elems)


def generators(g: FinGroup) -> List[int]:
    """Greedy generating set: repeatedly add the least element not yet reached."""
    gens: List[int] = []
    reached = frozenset([0])
    for x in g.elements():
        if x not in reached:
            gens.append(x)
            reached = subgroup_closure(g, gens)
        if len(reached) == g.order:
            break
    return gens


def _extend(a: FinGroup, b: FinGroup, gens: Sequence[int], gen_images: Sequence[int]) -> Optional[List[int]]:
    # breadth-first over right multiplication by generators; a consistent
    # assignment f(x s) = f(x) f(s) for every x and generator s is a homomorphism
    images = [-1] * a.order
    images[0] = 0
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s, fs in zip(gens, gen_images):
            y = a.mul(x, s)
            fy = b.mul(images[x], fs)
            if images[y] == -1:
                images[y] = fy
                queue.append(y)
            elif images[y] != fy:
                return None
    return images


def _homs(a: FinGroup, b: FinGroup, injective: bool) -> List[GroupMap]:
    if injective and a.order > b.order:
        return []
    gens = generators(a)
    b_orders = [element_order(b, y) for y in b.elements()]
    candidates = []
    for s in gens:
        k = element_order(a, s)
        if injective:
            candidates.append([y for y in b.elements() if b_orders[y] == k])
        else:
            candidates.append([y for y in b.elements() if k % b_orders[y] == 0])

    found = []
    for choice in itertools.product(*candidates):
        images = _extend(a, b, gens, choice)
        if images is None:
            continue
        if injective and len(set(images)) != a.order:
            continue
        found.append(GroupMap(a, b, images))
    found.sort(key=lambda f: f.images)
    logger.debug("%d homomorphisms %s -> %s (injective=%s)", len(found), a, b, injective)
    return found


def injective_homs(a: FinGroup, b: FinGroup) -> List[GroupMap]:
    return _homs(a, b, injective=True)


def automorphisms(g: FinGroup) -> List[GroupMap]:
    return _homs(g, g, injective=True)


def find_isomorphism(a: FinGroup, b: FinGroup) -> Optional[GroupMap]:
    if a.order != b.order:
        return None
    gens = generators(a)
    b_orders = [element_order(b, y) for y in b.elements()]
    candidates = [[y for y in b.elements() if b_orders[y] == element_order(a, s)] for s in gens]
    for choice in itertools.product(*candidates):
        images = _extend(a, b, gens, choice)
        if images is not None and len(set(images)) == a.order:
            return GroupMap(a, b, images)
    return None


def table_group(
    elements: Sequence[Hashable],
    multiply: Callable[[Hashable, Hashable], Hashable],
    labels: Optional[Sequence[str]] = None,
    name: Optional[str] = None,
) -> FinGroup:
    """
    Build the FinGroup of a finite list of composable objects.

    Parameters
    ----------
    elements: Sequence[Hashable]
        The group elements, identity first. Each must be hashable.

    multiply: Callable
        The binary operation on elements.

    Returns
    -------
    A validated FinGroup whose element i is `elements[i]`.
    """
    index = {e: i for i, e in enumerate(elements)}
    if len(index) != len(elements):
        raise ValueError("Elements must be pairwise distinct")
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            xy = multiply(x, y)
            if xy not in index:
                raise GroupAxiomError("closure", f"product of elements {i} and {j} escapes the set")
            table[i, j] = index[xy]
    return FinGroup(table, labels=labels, name=name)


def _symmetric3() -> FinGroup:
    perms = sorted(itertools.permutations(range(3)))

    def cycle_label(p):
        seen, parts = set(), []
        for start in range(3):
            if start in seen or p[start] == start:
                continue
            cycle, i = [], start
            while i not in seen:
                seen.add(i)
                cycle.append(str(i + 1))
                i = p[i]
            parts.append("(" + "".join(cycle) + ")")
        return "".join(parts) or "1"

    return table_group(
        perms,
        lambda p, q: tuple(p[q[i]] for i in range(3)),
        labels=[cycle_label(p) for p in perms],
        name="S3",
    )


def _dihedral8() -> FinGroup:
    # element s*4 + k is t^s x^k, with t x t = x^-1
    table = np.empty((8, 8), dtype=np.int64)
    for s1, k1, s2, k2 in itertools.product(range(2), range(4), range(2), range(4)):
        k = ((-k1 if s2 else k1) + k2) % 4
        table[s1 * 4 + k1, s2 * 4 + k2] = ((s1 + s2) % 2) * 4 + k
    labels = ["1", "x", "x2", "x3", "t", "tx", "tx2", "tx3"]
    return FinGroup(table, labels=labels, name="D8")


def _klein4() -> FinGroup:
    z2 = make_cyclic(2)
    v4 = direct_product(z2, z2)
    return FinGroup(v4.table, labels=["1", "a", "b", "ab"], name="V4")


builtin_groups = {
    "V4": _klein4,
    "S3": _symmetric3,
    "D8": _dihedral8,
}


def builtin_group(name: str) -> FinGroup:
    """Named group: "Z<n>" for cyclic groups, or one of "V4", "S3", "D8"."""
    if name in builtin_groups:
        return builtin_groups[name]()
    match = re.fullmatch(r"Z(\d+)", name)
    if match:
        return make_cyclic(int(match.group(1)))
    raise KeyError(
        f"Unknown group {name!r}; expected Z<n> or one of {sorted(builtin_groups)}"
    )


def identify(g: FinGroup) -> str:
    """Short name of `g` up to isomorphism, for reports."""
    if g.order == 1:
        return "1"
    if any(element_order(g, x) == g.order for x in g.elements()):
        return f"Z{g.order}"
    for name in builtin_groups:
        candidate = builtin_group(name)
        if candidate.order == g.order and find_isomorphism(g, candidate) is not None:
            return name
    return f"group of order {g.order}"


def group_from_json(obj) -> FinGroup:
    if isinstance(obj, str):
        return builtin_group(obj)
    if not isinstance(obj, dict) or "table" not in obj:
        raise ValueError("Group must be a built-in name or an object with a 'table'")
    table = np.asarray(obj["table"])
    if "order" in obj and obj["order"] != len(table):
        raise ValueError(f"Declared order {obj['order']} does not match table size {len(table)}")
    return FinGroup(table, labels=obj.get("labels"), name=obj.get("name"))


def group_to_json(g: FinGroup) -> dict:
    out = {"order": g.order, "table": g.table.tolist()}
    if g.labels is not None:
        out["labels"] = list(g.labels)
    if g.name:
        out["name"] = g.name
    return out
