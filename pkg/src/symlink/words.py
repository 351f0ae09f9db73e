"""Cyclic itineraries, eventually periodic bi-infinite itineraries, and orders.

Conventions fixed here once and used everywhere:

* a cyclic word of length n is indexed by Z/nZ;
* the vertical order compares forward rays (indices 1, 2, ...) through the
  per-cuboid successor order, position 0 being lowest;
* the horizontal order compares backward rays (indices -1, -2, ...) through
  the per-cuboid predecessor order, position 0 being leftmost;
* two words are comparable on either axis only when they agree at index 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import PreconditionError
from .model import MarkovModel


@dataclass(frozen=True)
class CyclicWord:
    letters: tuple[str, ...]

    def __post_init__(self):
        if not self.letters:
            raise PreconditionError("cyclic word must be nonempty")

    def __len__(self):
        return len(self.letters)

    def __getitem__(self, i: int) -> str:
        return self.letters[i % len(self.letters)]

    def rotate(self, k: int) -> "CyclicWord":
        """The word v with v_i = u_{i+k}."""
        n = len(self.letters)
        k %= n
        return CyclicWord(self.letters[k:] + self.letters[:k])

    def __str__(self):
        return "".join(self.letters) if all(len(c) == 1 for c in self.letters) \
            else "(" + ",".join(self.letters) + ")"


def word(letters) -> CyclicWord:
    return CyclicWord(tuple(letters))


def is_valid_cyclic(model: MarkovModel, u: CyclicWord) -> bool:
    n = len(u)
    return all(model.has_edge(u[i], u[i + 1]) for i in range(n))


def check_cyclic(model: MarkovModel, u: CyclicWord) -> None:
    if not is_valid_cyclic(model, u):
        raise PreconditionError(f"cyclic word {u} is not an itinerary of the model")


def canonical(model: MarkovModel, u: CyclicWord) -> CyclicWord:
    """Canonical rotation: lexicographically least under the alphabet order."""
    rank = model.letter_rank
    n = len(u)
    best = min(range(n), key=lambda k: tuple(rank(u[k + i]) for i in range(n)))
    return u.rotate(best)


def primitive_decompose(u: CyclicWord) -> tuple[CyclicWord, int]:
    """Write u = root^exponent with root primitive and the exponent maximal."""
    n = len(u)
    for d in range(1, n + 1):
        if n % d:
            continue
        if all(u.letters[i] == u.letters[i % d] for i in range(n)):
            return CyclicWord(u.letters[:d]), n // d
    raise AssertionError("unreachable")  # d = n always matches


def is_primitive(u: CyclicWord) -> bool:
    return primitive_decompose(u)[1] == 1


def concat(u: CyclicWord, v: CyclicWord) -> CyclicWord:
    """Concatenation uv; defined when both words start at the same cuboid."""
    if u[0] != v[0]:
        raise PreconditionError(f"cannot concatenate: {u} starts at {u[0]}, {v} at {v[0]}")
    return CyclicWord(u.letters + v.letters)


def power(u: CyclicWord, k: int) -> CyclicWord:
    if k < 1:
        raise PreconditionError("power exponent must be >= 1")
    return CyclicWord(u.letters * k)


@dataclass(frozen=True)
class BiWord:
    """Eventually periodic bi-infinite itinerary.

    The middle block occupies indices [start, start + len(middle)); below it
    the word repeats left_cycle, above it right_cycle.  The anchor `start`
    keeps the representation closed under shifting (a shifted word keeps its
    letters, only the window moves).
    """

    left_cycle: CyclicWord
    middle: tuple[str, ...]
    right_cycle: CyclicWord
    start: int = 0

    def letter(self, i: int) -> str:
        s, m = self.start, len(self.middle)
        if i < s:
            return self.left_cycle[i - s]
        if i < s + m:
            return self.middle[i - s]
        return self.right_cycle[i - s - m]

    def forward_periodic_from(self) -> int:
        """Least index f >= 1 such that the word is right-periodic on [f, oo)."""
        return max(1, self.start + len(self.middle))

    def backward_periodic_to(self) -> int:
        """Greatest index g <= -1 such that the word is left-periodic on (-oo, g]."""
        return min(-1, self.start - 1)


def periodic(u: CyclicWord) -> BiWord:
    """The purely periodic word of u: letter(i) = u_i for all i."""
    return BiWord(u, (), u, 0)


def is_valid_biword(model: MarkovModel, w: BiWord) -> bool:
    if not (is_valid_cyclic(model, w.left_cycle) and is_valid_cyclic(model, w.right_cycle)):
        return False
    lo = w.start - 1
    hi = w.start + len(w.middle)
    return all(model.has_edge(w.letter(i), w.letter(i + 1)) for i in range(lo, hi + 1))


def check_biword(model: MarkovModel, w: BiWord) -> None:
    if not is_valid_biword(model, w):
        raise PreconditionError("bi-infinite word is not an itinerary of the model")


def shift_word(w: BiWord, n: int) -> BiWord:
    """The shifted word with letter(i) = w.letter(i + n)."""
    return BiWord(w.left_cycle, w.middle, w.right_cycle, w.start - n)


def letters_equal(w: BiWord, x: BiWord) -> bool:
    """Exact equality of the underlying bi-infinite sequences."""
    lo = min(w.backward_periodic_to(), x.backward_periodic_to()) \
        - math.lcm(len(w.left_cycle), len(x.left_cycle)) - 1
    hi = max(w.forward_periodic_from(), x.forward_periodic_from()) \
        + math.lcm(len(w.right_cycle), len(x.right_cycle)) + 1
    return all(w.letter(i) == x.letter(i) for i in range(lo, hi + 1))


class Ordering(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


class Axis(enum.Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


def compare(model: MarkovModel, w: BiWord, x: BiWord, axis: Axis) -> Ordering:
    """Compare two itineraries along one axis.

    Vertical scans indices 1, 2, ... and decides the first disagreement by
    the successor order of the common previous letter; horizontal scans
    -1, -2, ... using the predecessor order of the common following letter.
    Words disagreeing at index 0 are incomparable.  Equality of eventually
    periodic rays is decided by a bounded scan: past both middle windows the
    rays are periodic, so agreement over one further lcm of the tail periods
    forces agreement everywhere.
    """
    check_biword(model, w)
    check_biword(model, x)
    if w.letter(0) != x.letter(0):
        return Ordering.INCOMPARABLE

    if axis is Axis.VERTICAL:
        bound = max(w.forward_periodic_from(), x.forward_periodic_from()) \
            + math.lcm(len(w.right_cycle), len(x.right_cycle)) + 1
        for k in range(1, bound + 1):
            a, b = w.letter(k), x.letter(k)
            if a != b:
                order = model.out_order[w.letter(k - 1)]
                return Ordering.LESS if order.index(a) < order.index(b) else Ordering.GREATER
        return Ordering.EQUAL

    bound = min(w.backward_periodic_to(), x.backward_periodic_to()) \
        - math.lcm(len(w.left_cycle), len(x.left_cycle)) - 1
    for k in range(-1, bound - 1, -1):
        a, b = w.letter(k), x.letter(k)
        if a != b:
            order = model.in_order[w.letter(k + 1)]
            return Ordering.LESS if order.index(a) < order.index(b) else Ordering.GREATER
    return Ordering.EQUAL


def strictly_less(model: MarkovModel, w: BiWord, x: BiWord, axis: Axis) -> bool:
    return compare(model, w, x, axis) is Ordering.LESS


def less_equal(model: MarkovModel, w: BiWord, x: BiWord, axis: Axis) -> bool:
    return compare(model, w, x, axis) in (Ordering.LESS, Ordering.EQUAL)


def realization_degree(model: MarkovModel, u: CyclicWord) -> int:
    """Degree of the covering realizing the orbit: 2 exactly on the declared
    non-orientable boundary orbits (up to rotation and taking roots), else 1."""
    check_cyclic(model, u)
    root, _ = primitive_decompose(u)
    key = canonical(model, root)
    for listed in model.nonorientable_boundary_orbits:
        listed_root, _ = primitive_decompose(CyclicWord(listed))
        if canonical(model, listed_root) == key:
            return 2
    return 1


def biword_to_document(w: BiWord) -> dict:
    doc = {
        "left": list(w.left_cycle.letters),
        "middle": list(w.middle),
        "right": list(w.right_cycle.letters),
    }
    if w.start:
        doc["start"] = w.start
    return doc


def biword_from_document(doc: dict) -> BiWord:
    try:
        return BiWord(
            CyclicWord(tuple(doc["left"])),
            tuple(doc.get("middle", [])),
            CyclicWord(tuple(doc["right"])),
            int(doc.get("start", 0)),
        )
    except (KeyError, TypeError) as exc:
        raise PreconditionError(f"malformed bi-infinite word document: {exc}") from exc
