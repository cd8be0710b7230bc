from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from more_itertools import circular_shifts

from .fingroup import FinGroup

# decorations are indexed by vertex id
Decoration = Sequence[FinGroup]


class Letter(NamedTuple):
    vertex: int
    elem: int  # non-identity element of the group at `vertex`


FPWord = Tuple[Letter, ...]


def _check(w: Iterable[Letter], dec: Decoration) -> FPWord:
    out = []
    for letter in w:
        v, x = letter
        if not 0 <= v < len(dec):
            raise KeyError(f"Unknown vertex {v}")
        if not 0 < x < dec[v].order:
            raise ValueError(f"Element {x} is not a non-identity element of the group at vertex {v}")
        out.append(letter if isinstance(letter, Letter) else Letter(v, x))
    return tuple(out)


def reduce(w: Iterable[Letter], dec: Decoration) -> FPWord:
    """Reduced form of a free-product word, by a single stack pass."""
    stack: List[Letter] = []
    for v, x in _check(w, dec):
        if stack and stack[-1].vertex == v:
            y = dec[v].mul(stack.pop().elem, x)
            if y != 0:
                stack.append(Letter(v, y))
        else:
            stack.append(Letter(v, x))
    return tuple(stack)


def reduce_concat(words: Iterable[Iterable[Letter]], dec: Decoration) -> FPWord:
    return reduce((letter for w in words for letter in w), dec)


def is_reduced(w: Sequence[Letter]) -> bool:
    return all(w[i][0] != w[i + 1][0] for i in range(len(w) - 1))


def is_cyclically_reduced(w: Sequence[Letter]) -> bool:
    return is_reduced(w) and (len(w) <= 1 or w[0][0] != w[-1][0])


def is_cyclically_reduced_literal(w: Sequence[Letter]) -> bool:
    """Cyclic reducedness by checking every cyclic permutation."""
    return all(is_reduced(shift) for shift in circular_shifts(tuple(w)))


def invert(w: Iterable[Letter], dec: Decoration) -> FPWord:
    return tuple(Letter(v, dec[v].inverse(x)) for v, x in reversed(_check(w, dec)))


def support(w: Iterable[Letter]) -> frozenset:
    return frozenset(letter[0] for letter in w)


def power(w: Sequence[Letter], n: int, dec: Decoration) -> FPWord:
    if n < 0:
        return power(invert(w, dec), -n, dec)
    return reduce(tuple(w) * n, dec)


def word_key(w: Sequence[Letter]):
    """Sort key: by length, then lexicographic on (vertex, elem)."""
    return (len(w), tuple(w))


class CRWord(tuple):
    """
    A cyclically reduced word.

    Construction rejects words that are not cyclically reduced instead of
    normalising them, so holding a CRWord means holding an alphabet element.
    """

    def __new__(cls, letters: Iterable[Letter] = (), dec: Optional[Decoration] = None):
        letters = tuple(letters) if dec is None else _check(letters, dec)
        letters = tuple(letter if isinstance(letter, Letter) else Letter(*letter) for letter in letters)
        if any(letter.elem == 0 for letter in letters):
            raise ValueError("Letters must be non-identity elements")
        if not is_reduced(letters):
            raise ValueError(f"Word {letters} is not reduced")
        if not is_cyclically_reduced(letters):
            raise ValueError(f"Word {letters} is not cyclically reduced")
        return super().__new__(cls, letters)

    @property
    def support(self) -> frozenset:
        return support(self)

    def __repr__(self):
        return f"CRWord({list(self)})"


def parse_word(
    text: str,
    vertex: Callable[[str], int],
    dec: Decoration,
) -> FPWord:
    """
    Parse the literal syntax "a.1 b.2 a".

    Each token is `vertex.elem`; the element may be an index or a label of the
    vertex's group and defaults to 1 when omitted. "()" and the empty string
    denote the empty word.
    """
    text = text.strip()
    if text in ("", "()", "∅"):
        return ()
    letters = []
    for token in text.replace(",", " ").split():
        name, _, elem = token.partition(".")
        v = vertex(name)
        x = dec[v].index(elem) if elem else 1
        letters.append(Letter(v, x))
    return _check(letters, dec)


def format_word(w: Sequence[Letter], labels: Sequence[str], dec: Optional[Decoration] = None) -> str:
    if not w:
        return "()"
    tokens = []
    for v, x in w:
        elem = dec[v].label(x) if dec is not None and dec[v].labels is not None else str(x)
        tokens.append(f"{labels[v]}.{elem}")
    return " ".join(tokens)
