"""Finitely supported invariant measures and their reductions.

A signed measure is a rational combination of periodic-orbit measures; keys
are stored as canonical rotations of primitive words, so eta of a power
appears as its root with the exponent folded into the coefficient.  All
arithmetic in this module is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .model import Edge, MarkovModel, format_rational, parse_rational
from .words import (
    CyclicWord,
    canonical,
    check_cyclic,
    concat,
    power,
    primitive_decompose,
)


@dataclass(frozen=True)
class SignedMeasure:
    """Finite map from canonical primitive cyclic words to nonzero coefficients."""

    terms: dict[CyclicWord, Fraction]

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0].letters)))

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[CyclicWord]:
        return [u for u, _ in self]

    def total_mass(self) -> Fraction:
        return sum((a * len(u) for u, a in self.terms.items()), Fraction(0))

    def total_variation(self) -> Fraction:
        return sum((abs(a) * len(u) for u, a in self.terms.items()), Fraction(0))


def make_measure(model: MarkovModel, items) -> SignedMeasure:
    """Normalize (word, coefficient) pairs into a SignedMeasure.

    Words are validated, rotated to canonical position and replaced by their
    primitive root (scaling the coefficient by the exponent); zero terms drop.
    """
    terms: dict[CyclicWord, Fraction] = {}
    for u, a in items:
        check_cyclic(model, u)
        a = Fraction(a)
        if a == 0:
            continue
        root, exponent = primitive_decompose(u)
        key = canonical(model, root)
        coeff = terms.get(key, Fraction(0)) + a * exponent
        if coeff == 0:
            terms.pop(key, None)
        else:
            terms[key] = coeff
    return SignedMeasure(terms)


def zero_measure() -> SignedMeasure:
    return SignedMeasure({})


def add(nu: SignedMeasure, mu: SignedMeasure) -> SignedMeasure:
    terms = dict(nu.terms)
    for u, a in mu.terms.items():
        c = terms.get(u, Fraction(0)) + a
        if c == 0:
            terms.pop(u, None)
        else:
            terms[u] = c
    return SignedMeasure(terms)


def scale(nu: SignedMeasure, factor) -> SignedMeasure:
    factor = Fraction(factor)
    if factor == 0:
        return zero_measure()
    return SignedMeasure({u: a * factor for u, a in nu.terms.items()})


def orbit_measure(model: MarkovModel, u: CyclicWord) -> SignedMeasure:
    """The periodic-orbit measure eta_u, with eta of a power counting multiplicity."""
    return make_measure(model, [(u, Fraction(1))])


@dataclass(frozen=True)
class EdgeFlow:
    mass: dict[Edge, Fraction]
    total: Fraction

    def __getitem__(self, edge: Edge) -> Fraction:
        return self.mass.get(edge, Fraction(0))


def _traversals(u: CyclicWord) -> dict[Edge, int]:
    counts: dict[Edge, int] = {}
    n = len(u)
    for i in range(n):
        e = (u[i], u[i + 1])
        counts[e] = counts.get(e, 0) + 1
    return counts


def edge_flow(model: MarkovModel, nu: SignedMeasure) -> EdgeFlow:
    """Cylinder masses: the value of the measure on each two-letter cylinder."""
    mass: dict[Edge, Fraction] = {}
    for u, a in nu.terms.items():
        for e, k in _traversals(u).items():
            c = mass.get(e, Fraction(0)) + a * k
            if c == 0:
                mass.pop(e, None)
            else:
                mass[e] = c
    total = sum(mass.values(), Fraction(0))
    return EdgeFlow(mass, total)


def flow_is_conserved(model: MarkovModel, flow: EdgeFlow) -> bool:
    for c in model.alphabet:
        into = sum((v for (a, b), v in flow.mass.items() if b == c), Fraction(0))
        out = sum((v for (a, b), v in flow.mass.items() if a == c), Fraction(0))
        if into != out:
            return False
    return True


def homology_class(model: MarkovModel, nu: SignedMeasure) -> tuple[Fraction, ...]:
    """Pair the edge flow with the homology labeling."""
    acc = [Fraction(0)] * model.homology_dim
    flow = edge_flow(model, nu)
    for e, m in flow.mass.items():
        label = model.homology_label[e]
        for i, x in enumerate(label):
            acc[i] += m * x
    return tuple(acc)


def is_null_class(model: MarkovModel, nu: SignedMeasure) -> bool:
    return all(x == 0 for x in homology_class(model, nu))


def split_at(u: CyclicWord, cuboid: str) -> list[CyclicWord]:
    """Split a cyclic word at its occurrences of one cuboid.

    The word is rotated to its first occurrence; the returned factors each
    carry the cuboid exactly once, at index 0, and concatenate back to the
    rotated word.  A word avoiding the cuboid comes back whole.
    """
    positions = [i for i in range(len(u)) if u[i] == cuboid]
    if not positions:
        return [u]
    v = u.rotate(positions[0])
    marks = [i for i in range(len(v)) if v[i] == cuboid]
    marks.append(len(v))
    return [CyclicWord(v.letters[marks[j]:marks[j + 1]]) for j in range(len(marks) - 1)]


def reduce(model: MarkovModel, cuboid: str, nu: SignedMeasure) -> SignedMeasure:
    """Reduction at one cuboid: split every orbit measure at its visits.

    Terms avoiding the cuboid, or visiting it once, are fixed; the rest map
    to the sum of the orbit measures of their factors.  Edge flow is
    preserved exactly, because splitting preserves the multiset of traversed
    edges.
    """
    if cuboid not in set(model.alphabet):
        raise PreconditionError(f"unknown cuboid {cuboid!r}")
    out: list[tuple[CyclicWord, Fraction]] = []
    for u, a in nu.terms.items():
        for piece in split_at(u, cuboid):
            out.append((piece, a))
    return make_measure(model, out)


def reduce_all(model: MarkovModel, nu: SignedMeasure) -> SignedMeasure:
    """Compose the reductions over all cuboids in alphabet order.

    Every surviving orbit meets each cuboid at most once.
    """
    for cuboid in model.alphabet:
        nu = reduce(model, cuboid, nu)
    return nu


def meets_each_cuboid_at_most_once(u: CyclicWord) -> bool:
    seen = set()
    for c in u.letters:
        if c in seen:
            return False
        seen.add(c)
    return True


def cohomologous_shift(model: MarkovModel, v: CyclicWord, u: CyclicWord, k: int) -> SignedMeasure:
    """The measure (1/k)(eta_{v^k u} - eta_u), cohomologous to eta_v.

    Concatenation adds traversal counts, so the edge flow of the result is
    exactly the flow of eta_v.
    """
    check_cyclic(model, u)
    check_cyclic(model, v)
    if k < 1:
        raise PreconditionError("k must be a positive integer")
    if u[0] != v[0]:
        raise PreconditionError("u and v must start at the same cuboid")
    if set(u.letters) != set(model.alphabet):
        raise PreconditionError("u must visit every cuboid")
    ru, _ = primitive_decompose(u)
    rv, _ = primitive_decompose(v)
    if canonical(model, ru) == canonical(model, rv):
        raise PreconditionError("u and v share a primitive root")
    big = concat(power(v, k), u)
    return make_measure(model, [(big, Fraction(1, k)), (u, Fraction(-1, k))])


def measure_to_document(nu: SignedMeasure) -> list[dict]:
    return [
        {"word": list(u.letters), "coeff": format_rational(a)}
        for u, a in nu
    ]


def measure_from_document(model: MarkovModel, doc) -> SignedMeasure:
    if not isinstance(doc, list):
        raise PreconditionError("measure document must be an array")
    items = []
    for entry in doc:
        if not isinstance(entry, dict) or "word" not in entry or "coeff" not in entry:
            raise PreconditionError("each measure entry needs 'word' and 'coeff'")
        items.append((CyclicWord(tuple(entry["word"])), parse_rational(entry["coeff"])))
    return make_measure(model, items)
