"""Combinatorial model of a Markov partition.

A model is the transition alphabet of the partition together with the
total orders on successors/predecessors of each cuboid, a rational
homology label per edge, the list of boundary orbits with non-orientable
leaves, and an optional externally supplied base pairing table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ModelParseError, ModelValidationError

Edge = tuple[str, str]


def parse_rational(value) -> Fraction:
    """Parse a rational serialized as a canonical "p/q" or integer string."""
    if isinstance(value, bool):
        raise ModelParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelParseError(f"not a rational: {value!r}") from exc
    raise ModelParseError(f"not a rational: {value!r} (floats are rejected)")


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


@dataclass(frozen=True)
class MarkovModel:
    """Validated transition data of a Markov partition.

    Immutable after construction; every filed op treats it as a shared
    read-only value.
    """

    alphabet: tuple[str, ...]
    edges: frozenset[Edge]
    out_order: dict[str, tuple[str, ...]]
    in_order: dict[str, tuple[str, ...]]
    homology_dim: int
    homology_label: dict[Edge, tuple[Fraction, ...]]
    nonorientable_boundary_orbits: frozenset[tuple[str, ...]]
    base_link: dict[frozenset, Fraction] | None = None
    _letter_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_letter_index", {c: i for i, c in enumerate(self.alphabet)}
        )

    def letter_rank(self, letter: str) -> int:
        return self._letter_index[letter]

    def has_edge(self, src: str, dst: str) -> bool:
        return (src, dst) in self.edges

    def successors(self, letter: str) -> tuple[str, ...]:
        return self.out_order[letter]

    def predecessors(self, letter: str) -> tuple[str, ...]:
        return self.in_order[letter]

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: (self.letter_rank(e[0]), self.letter_rank(e[1])))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> Check | None:
        for c in self.checks:
            if not c.passed:
                return c
        return None


def _strongly_connected(alphabet, edges) -> bool:
    if not alphabet:
        return False
    succ = {c: [] for c in alphabet}
    pred = {c: [] for c in alphabet}
    for a, b in edges:
        succ[a].append(b)
        pred[b].append(a)

    def reach(start, nbrs):
        seen = {start}
        stack = [start]
        while stack:
            for d in nbrs[stack.pop()]:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
        return seen

    root = alphabet[0]
    return len(reach(root, succ)) == len(alphabet) and len(reach(root, pred)) == len(alphabet)


def _valid_cyclic_letters(model_edges, letters) -> bool:
    n = len(letters)
    if n == 0:
        return False
    return all((letters[i], letters[(i + 1) % n]) in model_edges for i in range(n))


def validate(model: MarkovModel) -> ValidationReport:
    """Run every model invariant and report pass/fail with the offending item.

    The checks are evaluated in a fixed order over canonically sorted
    items, so the report does not depend on document key order.
    """
    checks: list[Check] = []

    names_ok = bool(model.alphabet) and all(
        isinstance(c, str) and c for c in model.alphabet
    ) and len(set(model.alphabet)) == len(model.alphabet)
    checks.append(Check("alphabet distinct nonempty", names_ok,
                        "" if names_ok else f"alphabet {list(model.alphabet)}"))

    alpha = set(model.alphabet)
    bad_edge = next((e for e in sorted(model.edges) if e[0] not in alpha or e[1] not in alpha), None)
    checks.append(Check("edges reference alphabet", bad_edge is None,
                        "" if bad_edge is None else f"edge {bad_edge} uses unknown cuboid"))

    bad_label = None
    for e in sorted(model.edges):
        lab = model.homology_label.get(e)
        if lab is None or len(lab) != model.homology_dim:
            bad_label = e
            break
    checks.append(Check("homology labels have length homology_dim", bad_label is None,
                        "" if bad_label is None else f"edge {bad_label}"))

    def order_check(orders, kind, neighbors):
        for c in model.alphabet:
            listed = orders.get(c)
            if listed is None:
                return Check(f"{kind} total order", False, f"{kind} missing at {c}")
            expected = neighbors(c)
            if len(set(listed)) != len(listed):
                return Check(f"{kind} total order", False, f"{kind} repeats a cuboid at {c}")
            extra = [d for d in listed if d not in expected]
            if extra:
                return Check(f"{kind} total order", False, f"{kind} lists non-edge at {c}: {extra[0]}")
            missing = [d for d in sorted(expected) if d not in listed]
            if missing:
                return Check(f"{kind} total order", False, f"{kind} incomplete at {c}")
        return Check(f"{kind} total order", True)

    checks.append(order_check(model.out_order, "out_order",
                              lambda c: {d for (a, d) in model.edges if a == c}))
    checks.append(order_check(model.in_order, "in_order",
                              lambda c: {a for (a, d) in model.edges if d == c}))

    sc = _strongly_connected(model.alphabet, model.edges)
    checks.append(Check("strongly connected", sc, "" if sc else "not strongly connected"))

    # A strongly connected graph carries a single cycle exactly when
    # every vertex has one outgoing edge, i.e. |edges| == |alphabet|.
    mixing = sc and len(model.edges) > len(model.alphabet)
    checks.append(Check("at least two distinct cycles", mixing,
                        "" if mixing else "transition graph is a single cycle"))

    bad_orbit = next(
        (w for w in sorted(model.nonorientable_boundary_orbits)
         if not _valid_cyclic_letters(model.edges, w)),
        None,
    )
    checks.append(Check("nonorientable boundary orbits are valid itineraries",
                        bad_orbit is None,
                        "" if bad_orbit is None else f"orbit {list(bad_orbit)}"))

    base_ok, base_detail = True, ""
    if model.base_link is not None:
        for key in model.base_link:
            for w in key:
                if not _valid_cyclic_letters(model.edges, w):
                    base_ok, base_detail = False, f"base_link word {list(w)} invalid"
                    break
            if not base_ok:
                break
    checks.append(Check("base_link words are valid itineraries", base_ok, base_detail))

    return ValidationReport(tuple(checks))


def _require(cond, message):
    if not cond:
        raise ModelParseError(message)


def model_from_document(doc: dict) -> MarkovModel:
    """Build an (unvalidated) model from a parsed JSON object."""
    _require(isinstance(doc, dict), "model document must be a JSON object")
    for key in ("alphabet", "edges", "out_order", "in_order", "homology_dim"):
        _require(key in doc, f"missing key {key!r}")

    alphabet = doc["alphabet"]
    _require(isinstance(alphabet, list) and all(isinstance(c, str) for c in alphabet),
             "alphabet must be an array of strings")

    dim = doc["homology_dim"]
    _require(isinstance(dim, int) and not isinstance(dim, bool) and dim >= 0,
             "homology_dim must be a nonnegative integer")

    edges: set[Edge] = set()
    labels: dict[Edge, tuple[Fraction, ...]] = {}
    _require(isinstance(doc["edges"], list), "edges must be an array")
    for item in doc["edges"]:
        _require(isinstance(item, dict) and "from" in item and "to" in item,
                 "each edge needs 'from' and 'to'")
        e = (item["from"], item["to"])
        _require(e not in edges, f"duplicate edge {e}")
        edges.add(e)
        hom = item.get("homology", [])
        _require(isinstance(hom, list), f"edge {e}: homology must be an array")
        labels[e] = tuple(parse_rational(v) for v in hom)

    def read_order(key):
        raw = doc[key]
        _require(isinstance(raw, dict), f"{key} must be an object")
        out = {}
        for c, lst in raw.items():
            _require(isinstance(lst, list) and all(isinstance(d, str) for d in lst),
                     f"{key}[{c!r}] must be an array of strings")
            out[c] = tuple(lst)
        return out

    orbits = doc.get("nonorientable_boundary_orbits", [])
    _require(isinstance(orbits, list), "nonorientable_boundary_orbits must be an array")
    orbit_set = set()
    for w in orbits:
        _require(isinstance(w, list) and w and all(isinstance(c, str) for c in w),
                 "each boundary orbit must be a nonempty array of letters")
        orbit_set.add(tuple(w))

    base = None
    if "base_link" in doc and doc["base_link"] is not None:
        raw = doc["base_link"]
        _require(isinstance(raw, list), "base_link must be an array")
        base = {}
        for item in raw:
            _require(isinstance(item, dict) and {"u", "v", "value"} <= set(item),
                     "each base_link entry needs 'u', 'v' and 'value'")
            u, v = tuple(item["u"]), tuple(item["v"])
            key = frozenset((u, v))
            val = parse_rational(item["value"])
            _require(base.get(key, val) == val,
                     f"base_link repeats pair {sorted(key)} with conflicting values")
            base[key] = val

    return MarkovModel(
        alphabet=tuple(alphabet),
        edges=frozenset(edges),
        out_order=read_order("out_order"),
        in_order=read_order("in_order"),
        homology_dim=dim,
        homology_label=labels,
        nonorientable_boundary_orbits=frozenset(orbit_set),
        base_link=base,
    )


def load_model(document: str) -> MarkovModel:
    """Parse and validate a UTF-8 JSON model document."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"malformed JSON: {exc}") from exc
    model = model_from_document(doc)
    report = validate(model)
    if not report.ok:
        failure = report.first_failure()
        raise ModelValidationError(failure.detail or failure.name)
    return model


def model_to_document(model: MarkovModel) -> dict:
    """Canonical JSON object for a model (sorted edges, canonical rationals)."""
    doc = {
        "alphabet": list(model.alphabet),
        "edges": [
            {
                "from": a,
                "to": b,
                "homology": [format_rational(x) for x in model.homology_label[(a, b)]],
            }
            for (a, b) in model.sorted_edges()
        ],
        "out_order": {c: list(model.out_order[c]) for c in model.alphabet},
        "in_order": {c: list(model.in_order[c]) for c in model.alphabet},
        "homology_dim": model.homology_dim,
        "nonorientable_boundary_orbits": [list(w) for w in sorted(model.nonorientable_boundary_orbits)],
    }
    if model.base_link is not None:
        entries = []
        for key in model.base_link:
            pair = sorted(key)
            u = pair[0]
            v = pair[-1]
            entries.append({"u": list(u), "v": list(v), "value": format_rational(model.base_link[key])})
        entries.sort(key=lambda d: (d["u"], d["v"]))
        doc["base_link"] = entries
    return doc


def serialize(model: MarkovModel) -> str:
    return json.dumps(model_to_document(model), indent=2, sort_keys=True)
