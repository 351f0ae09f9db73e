"""Prime return words, the linking function, its pairing, and the staged
linking number with a pluggable base pairing.

The staged sum composes the per-cuboid reductions in alphabet order
R_1, ..., R_p and accumulates, for k = 0..p-1, the pairing of the linking
function at R_{k+1} against the measure reduced by R_1..R_k; the base table
is then paired with the fully reduced (prime supported) measure.  This is
the telescoping-consistent indexing; see LinkValue.staging for the
convention echoed in output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PreconditionError
from .measures import SignedMeasure, homology_class, is_null_class, reduce
from .model import MarkovModel, format_rational
from .words import (
    Axis,
    BiWord,
    CyclicWord,
    Ordering,
    check_biword,
    compare,
    periodic,
    realization_degree,
    shift_word,
)

STAGING_NOTE = (
    "sum over k of the pairing at stage cuboid k+1 applied to the measure "
    "reduced at stages 1..k, plus the base pairing of the fully reduced measure"
)


@dataclass(frozen=True)
class PrimeOrbit:
    """A cyclic word visiting its anchor cuboid exactly once, at index 0."""

    word: CyclicWord

    def __post_init__(self):
        anchor = self.word[0]
        if any(self.word[i] == anchor for i in range(1, len(self.word))):
            raise PreconditionError(f"{self.word} revisits its anchor {anchor}")

    @property
    def anchor(self) -> str:
        return self.word[0]


@dataclass(frozen=True)
class BaseLinkTable:
    """Symmetric rational pairing on unordered pairs of cyclic words.

    The default table is identically zero and flags results as purely
    combinatorial, so nothing silently pretends to be a manifold pairing.
    """

    entries: dict[frozenset, Fraction] = field(default_factory=dict)
    default_zero: bool = True

    def value(self, u: CyclicWord, v: CyclicWord) -> Fraction:
        if self.default_zero:
            return Fraction(0)
        key = frozenset((u.letters, v.letters))
        if key not in self.entries:
            raise PreconditionError(
                f"base table has no entry for pair ({u}, {v})")
        return self.entries[key]


def base_table_from_model(model: MarkovModel) -> BaseLinkTable:
    if model.base_link is None:
        return BaseLinkTable()
    return BaseLinkTable(dict(model.base_link), default_zero=False)


def base_table_from_document(doc) -> BaseLinkTable:
    from .model import parse_rational

    if not isinstance(doc, list):
        raise PreconditionError("base table document must be an array")
    entries = {}
    for item in doc:
        if not isinstance(item, dict) or not {"u", "v", "value"} <= set(item):
            raise PreconditionError("each base entry needs 'u', 'v', 'value'")
        key = frozenset((tuple(item["u"]), tuple(item["v"])))
        entries[key] = parse_rational(item["value"])
    return BaseLinkTable(entries, default_zero=False)


@dataclass(frozen=True)
class LinkValue:
    value: Fraction
    combinatorial_only: bool
    base_term: Fraction
    stage_breakdown: tuple[tuple[str, Fraction], ...]
    staging: str = STAGING_NOTE

    def to_document(self) -> dict:
        return {
            "value": format_rational(self.value),
            "combinatorial_only": self.combinatorial_only,
            "base_term": format_rational(self.base_term),
            "stage_breakdown": [
                {"cuboid": c, "value": format_rational(v)} for c, v in self.stage_breakdown
            ],
            "staging": self.staging,
        }


def enumerate_prime_orbits(model: MarkovModel, cuboid: str, max_len: int) -> list[PrimeOrbit]:
    """All prime return words at the cuboid, by length then letters."""
    if max_len < 1:
        raise PreconditionError("max_len must be >= 1")
    if cuboid not in set(model.alphabet):
        raise PreconditionError(f"unknown cuboid {cuboid!r}")
    out: list[PrimeOrbit] = []
    frontier = [(cuboid,)]
    for length in range(1, max_len + 1):
        nxt = []
        for path in frontier:
            if model.has_edge(path[-1], cuboid):
                out.append(PrimeOrbit(CyclicWord(path)))
            if length < max_len:
                for succ in model.out_order[path[-1]]:
                    if succ != cuboid:
                        nxt.append(path + (succ,))
        frontier = nxt
    return out


def return_word(model: MarkovModel, cuboid: str, w: BiWord) -> CyclicWord | None:
    """The word read from index 0 to the next visit of the anchor cuboid.

    None when the forward tail never meets the cuboid again.
    """
    check_biword(model, w)
    if w.letter(0) != cuboid:
        raise PreconditionError(f"word does not start at {cuboid!r}")
    horizon = w.forward_periodic_from() + len(w.right_cycle)
    for k in range(1, horizon + 1):
        if w.letter(k) == cuboid:
            return CyclicWord(tuple(w.letter(i) for i in range(k)))
    return None


def linking_function(model: MarkovModel, cuboid: str, w: BiWord, x: BiWord) -> int:
    """The +-1/0 valued linking function at one cuboid.

    With u the return word of w (empty case giving 0): +1 on the region
    where the periodic word of u is horizontally below x while x sits
    vertically in [shift^{|u|} w, w); -1 on the mirrored region with the
    roles of w and its shift exchanged; 0 elsewhere.  The two regions are
    disjoint by construction and this is asserted.
    """
    check_biword(model, x)
    if x.letter(0) != cuboid:
        raise PreconditionError(f"second word does not start at {cuboid!r}")
    u = return_word(model, cuboid, w)
    if u is None:
        return 0
    ubar = periodic(u)
    if compare(model, ubar, x, Axis.HORIZONTAL) is not Ordering.LESS:
        return 0
    shifted = shift_word(w, len(u))
    xw = compare(model, x, w, Axis.VERTICAL)
    xs = compare(model, x, shifted, Axis.VERTICAL)
    plus = xs in (Ordering.GREATER, Ordering.EQUAL) and xw is Ordering.LESS
    minus = xw in (Ordering.GREATER, Ordering.EQUAL) and xs is Ordering.LESS
    assert not (plus and minus), "linking regions must be disjoint"
    if plus:
        return 1
    if minus:
        return -1
    return 0


def _check_orientable_support(model: MarkovModel, nu: SignedMeasure) -> None:
    for u in nu.terms:
        if realization_degree(model, u) == 2:
            raise PreconditionError(
                f"orbit {u} has a degree-two realization; linking is undefined on it")


def _placements(model: MarkovModel, u: CyclicWord, cuboid: str) -> list[BiWord]:
    return [periodic(u.rotate(k)) for k in range(len(u)) if u[k] == cuboid]


def linking_pairing(model: MarkovModel, cuboid: str,
                    nu: SignedMeasure, mu: SignedMeasure) -> Fraction:
    """Integral of the linking function at one cuboid against nu (x) mu.

    Sums the linking function over all anchored shift placements of the two
    orbit families, weighted bilinearly by the coefficients.
    """
    _check_orientable_support(model, nu)
    _check_orientable_support(model, mu)
    total = Fraction(0)
    for u, a in nu.terms.items():
        ws = _placements(model, u, cuboid)
        if not ws:
            continue
        for v, b in mu.terms.items():
            for w in ws:
                for x in _placements(model, v, cuboid):
                    val = linking_function(model, cuboid, w, x)
                    if val:
                        total += a * b * val
    return total


def link_full_staged(model: MarkovModel, nu: SignedMeasure, mu: SignedMeasure,
                     base: BaseLinkTable, staging_order=None,
                     require_null_class: bool = True) -> LinkValue:
    """Staged linking number with an explicit staging order (internal knob;
    the public entry point stages in alphabet order)."""
    order = tuple(staging_order) if staging_order is not None else model.alphabet
    if sorted(order) != sorted(model.alphabet):
        raise PreconditionError("staging order must enumerate the alphabet")
    if require_null_class:
        if not is_null_class(model, nu):
            raise PreconditionError(
                f"first measure is not null-cohomologous: class {homology_class(model, nu)}")
        if not is_null_class(model, mu):
            raise PreconditionError(
                f"second measure is not null-cohomologous: class {homology_class(model, mu)}")
    _check_orientable_support(model, nu)
    _check_orientable_support(model, mu)

    stages = []
    current = nu
    for cuboid in order:
        stages.append((cuboid, linking_pairing(model, cuboid, current, mu)))
        current = reduce(model, cuboid, current)

    base_term = Fraction(0)
    for u, a in current.terms.items():
        for v, b in mu.terms.items():
            base_term += a * b * base.value(u, v)

    value = base_term + sum((v for _, v in stages), Fraction(0))
    return LinkValue(value, base.default_zero, base_term, tuple(stages))


def link_full(model: MarkovModel, nu: SignedMeasure, mu: SignedMeasure,
              base: BaseLinkTable | None = None) -> LinkValue:
    """Linking number of two null-cohomologous finitely supported measures.

    The base table supplies the pairing on prime-supported measures; the
    default zero table marks the result combinatorial-only.
    """
    if base is None:
        base = BaseLinkTable()
    return link_full_staged(model, nu, mu, base)
