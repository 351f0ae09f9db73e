"""Cross-section and Birkhoff-boundary decision procedures.

Everything here is exact: Karp's recurrence and Bellman-Ford potentials in
rational arithmetic, a Bland-rule simplex for the minimum-linking program,
and certificates that are re-verified before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .linking import BaseLinkTable, link_full_staged
from .measures import (
    SignedMeasure,
    add,
    homology_class,
    is_null_class,
    make_measure,
    scale,
    zero_measure,
)
from .model import Edge, MarkovModel, parse_rational
from .simplex import solve_lp
from .words import (
    Axis,
    CyclicWord,
    Ordering,
    canonical,
    check_cyclic,
    compare,
    concat,
    is_primitive,
    periodic,
    power,
    primitive_decompose,
    realization_degree,
)


@dataclass(frozen=True)
class EdgeWeighting:
    """Evaluation of a cohomology class on the edges of the transition graph."""

    weight: dict[Edge, Fraction]

    def __call__(self, edge: Edge) -> Fraction:
        return self.weight[edge]


def check_weighting(model: MarkovModel, w: EdgeWeighting) -> None:
    missing = [e for e in model.sorted_edges() if e not in w.weight]
    if missing:
        raise PreconditionError(f"weighting undefined on edge {missing[0]}")


def weighting_from_document(model: MarkovModel, doc) -> EdgeWeighting:
    if not isinstance(doc, list):
        raise PreconditionError("weighting document must be an array")
    weight = {}
    for item in doc:
        if not isinstance(item, dict) or not {"from", "to", "value"} <= set(item):
            raise PreconditionError("each weight entry needs 'from', 'to', 'value'")
        weight[(item["from"], item["to"])] = parse_rational(item["value"])
    w = EdgeWeighting(weight)
    check_weighting(model, w)
    return w


def max_mean_cycle(model: MarkovModel, w: EdgeWeighting) -> tuple[Fraction, CyclicWord]:
    """Exact maximum cycle mean via Karp's recurrence, with an attaining cycle.

    The cycle is recovered from the tight-edge subgraph of the reduced
    weights, where every cycle has mean exactly the optimum.
    """
    check_weighting(model, w)
    letters = model.alphabet
    n = len(letters)
    idx = {c: i for i, c in enumerate(letters)}
    NEG = None  # stands for -infinity

    # F[k][v] = max weight of a k-edge walk from the source to v
    source = 0
    F = [[NEG] * n for _ in range(n + 1)]
    F[0][source] = Fraction(0)
    for k in range(1, n + 1):
        for (a, b) in model.edges:
            ia, ib = idx[a], idx[b]
            prev = F[k - 1][ia]
            if prev is None:
                continue
            cand = prev + w((a, b))
            if F[k][ib] is None or cand > F[k][ib]:
                F[k][ib] = cand

    best = None
    for v in range(n):
        if F[n][v] is None:
            continue
        worst = None
        for k in range(n):
            if F[k][v] is None:
                continue
            ratio = (F[n][v] - F[k][v]) / (n - k)
            if worst is None or ratio < worst:
                worst = ratio
        if worst is not None and (best is None or worst > best):
            best = worst
    assert best is not None, "strongly connected graph must have a cycle"

    # tight edges of the reduced weights w - best carry the optimal cycles
    pot = _longest_path_potentials(model, w, best)
    tight = {}
    for (a, b) in model.sorted_edges():
        if w((a, b)) - best == pot[b] - pot[a]:
            tight.setdefault(a, []).append(b)
    cycle = _find_cycle(model, tight)
    mean = sum((w((cycle[i], cycle[i + 1])) for i in range(len(cycle))), Fraction(0)) / len(cycle)
    assert mean == best
    return best, cycle


def _longest_path_potentials(model: MarkovModel, w: EdgeWeighting, mu: Fraction):
    """Bellman-Ford longest-path potentials for weights reduced by mu.

    The reduced weights have no positive cycle, so the values stabilize
    after |V| rounds and satisfy pot[b] >= pot[a] + (w - mu) on every edge.
    """
    pot = {c: Fraction(0) for c in model.alphabet}
    for _ in range(len(model.alphabet) + 1):
        changed = False
        for (a, b) in model.sorted_edges():
            cand = pot[a] + w((a, b)) - mu
            if cand > pot[b]:
                pot[b] = cand
                changed = True
        if not changed:
            break
    assert not changed, "reduced weights admit a positive cycle"
    return pot


def _find_cycle(model: MarkovModel, succ: dict) -> CyclicWord:
    """Deterministic cycle search in a subgraph given by successor lists."""
    state = {}
    order = []

    def dfs(v):
        state[v] = 1
        order.append(v)
        for nxt in succ.get(v, ()):
            if state.get(nxt) == 1:
                i = order.index(nxt)
                return CyclicWord(tuple(order[i:]))
            if nxt not in state:
                found = dfs(nxt)
                if found is not None:
                    return found
        state[v] = 2
        order.pop()
        return None

    for start in model.alphabet:
        if start not in state:
            found = dfs(start)
            if found is not None:
                return canonical(model, found)
    raise AssertionError("tight subgraph must contain a cycle")


@dataclass(frozen=True)
class PotentialCertificate:
    """Vertex potential exhibiting strict positivity on every cycle."""

    values: dict[str, Fraction]

    def verify(self, model: MarkovModel, w: EdgeWeighting) -> bool:
        return all(
            w(e) + self.values[e[1]] - self.values[e[0]] > 0
            for e in model.edges
        )


@dataclass(frozen=True)
class ObstructionCertificate:
    """A directed cycle of nonpositive total weight."""

    cycle: CyclicWord
    weight_sum: Fraction

    def verify(self, model: MarkovModel, w: EdgeWeighting) -> bool:
        total = sum((w((self.cycle[i], self.cycle[i + 1]))
                     for i in range(len(self.cycle))), Fraction(0))
        return total == self.weight_sum and total <= 0


SectionCertificate = PotentialCertificate | ObstructionCertificate


def cross_section(model: MarkovModel, w: EdgeWeighting) -> SectionCertificate:
    """Decide strict cycle positivity, with a dual witness either way.

    Positive side: Bellman-Ford potentials for the weights reduced below the
    minimum cycle mean, so each edge inequality is strict.  Negative side:
    an explicit cycle of nonpositive weight.
    """
    check_weighting(model, w)
    neg = EdgeWeighting({e: -v for e, v in w.weight.items()})
    value, cycle = max_mean_cycle(model, neg)
    if value >= 0:
        total = sum((w((cycle[i], cycle[i + 1])) for i in range(len(cycle))), Fraction(0))
        cert = ObstructionCertificate(cycle, total)
        assert cert.verify(model, w)
        return cert
    min_mean = -value
    eps = min_mean / 2
    reduced = EdgeWeighting({e: v - eps for e, v in w.weight.items()})
    dist = _shortest_path_all(model, reduced)
    cert = PotentialCertificate({c: -dist[c] for c in model.alphabet})
    assert cert.verify(model, w)
    return cert


def _shortest_path_all(model: MarkovModel, w: EdgeWeighting):
    """Bellman-Ford distances from the first cuboid (no nonpositive cycles)."""
    INF = None
    dist = {c: INF for c in model.alphabet}
    dist[model.alphabet[0]] = Fraction(0)
    for _ in range(len(model.alphabet) + 1):
        changed = False
        for (a, b) in model.sorted_edges():
            if dist[a] is None:
                continue
            cand = dist[a] + w((a, b))
            if dist[b] is None or cand < dist[b]:
                dist[b] = cand
                changed = True
        if not changed:
            break
    assert not changed, "negative cycle in reduced weights"
    return dist


@dataclass(frozen=True)
class MinLinkResult:
    value: Fraction | None
    argmin: SignedMeasure | None
    horizon: int
    status: str  # "optimal-at-horizon" | "infeasible"
    orbit_values: tuple[tuple[CyclicWord, Fraction], ...]


def _candidate_orbits(model: MarkovModel, max_len: int) -> list[CyclicWord]:
    from .gibbs import _primitive_cycles

    return [u for u in _primitive_cycles(model, max_len)
            if realization_degree(model, u) == 1]


def min_link(model: MarkovModel, gamma: SignedMeasure, base: BaseLinkTable | None,
             max_len: int) -> MinLinkResult:
    """Minimize the linking number of the boundary measure against the
    null-cohomologous probability measures supported at the horizon.

    Enumerates the primitive orbits of length at most max_len, evaluates the
    linking of each normalized orbit measure by bilinearity, and solves the
    exact LP over convex weights with the null-class constraint.
    """
    if max_len < 1:
        raise PreconditionError("max_len must be >= 1")
    if base is None:
        base = BaseLinkTable()
    if not is_null_class(model, gamma):
        raise PreconditionError(
            f"boundary measure is not null-cohomologous: {homology_class(model, gamma)}")

    orbits = _candidate_orbits(model, max_len)
    values = []
    classes = []
    for u in orbits:
        mu = scale(make_measure(model, [(u, 1)]), Fraction(1, len(u)))
        lv = link_full_staged(model, gamma, mu, base, require_null_class=False)
        values.append(lv.value)
        classes.append(homology_class(model, mu))

    n = len(orbits)
    b_dim = model.homology_dim
    A = [[Fraction(1)] * n]
    b = [Fraction(1)]
    for i in range(b_dim):
        A.append([classes[j][i] for j in range(n)])
        b.append(Fraction(0))
    res = solve_lp(A, b, values)
    orbit_values = tuple(zip(orbits, values))
    if res.status == "infeasible":
        return MinLinkResult(None, None, max_len, "infeasible", orbit_values)
    assert res.status == "optimal", "convex program cannot be unbounded"

    argmin = zero_measure()
    for u, c in zip(orbits, res.x):
        if c:
            argmin = add(argmin, scale(make_measure(model, [(u, 1)]), c / len(u)))
    assert argmin.total_mass() == 1
    assert is_null_class(model, argmin)
    return MinLinkResult(res.objective, argmin, max_len, "optimal-at-horizon", orbit_values)


@dataclass(frozen=True)
class BoundaryVerdict:
    verdict: str  # "POSITIVE-AT-HORIZON" | "NEGATIVE"
    horizon: int
    vacuous: bool
    min_result: MinLinkResult
    note: str

    @property
    def positive(self) -> bool:
        return self.verdict == "POSITIVE-AT-HORIZON"


HORIZON_NOTE = (
    "verdict is limited to null-cohomologous probability measures supported "
    "on orbits of length at most the horizon; strict positivity is required, "
    "a vanishing minimum counts as NEGATIVE"
)


def birkhoff_boundary_verdict(model: MarkovModel, gamma: SignedMeasure,
                              base: BaseLinkTable | None, max_len: int) -> BoundaryVerdict:
    """Positivity of the minimum linking number at the enumeration horizon.

    An empty feasible set is the vacuous positive case: the boundary
    criterion holds independently of the measure tested.
    """
    result = min_link(model, gamma, base, max_len)
    if result.status == "infeasible":
        return BoundaryVerdict("POSITIVE-AT-HORIZON", max_len, True, result, HORIZON_NOTE)
    if result.value > 0:
        return BoundaryVerdict("POSITIVE-AT-HORIZON", max_len, False, result, HORIZON_NOTE)
    return BoundaryVerdict("NEGATIVE", max_len, False, result, HORIZON_NOTE)


@dataclass(frozen=True)
class Boundary1Cycle:
    """Signed multiplicities of periodic orbits forming an invariant 1-cycle."""

    terms: dict[CyclicWord, int]

    def to_document(self) -> list[dict]:
        items = sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0].letters))
        return [{"word": list(u.letters), "multiplicity": m} for u, m in items]


def boundary_cycle_class(model: MarkovModel, cycle: Boundary1Cycle) -> tuple[Fraction, ...]:
    """Homology class of the 1-cycle, with orbit classes normalized by the
    realization degree (a degree-two word traverses its geometric orbit twice)."""
    acc = [Fraction(0)] * model.homology_dim
    for u, m in cycle.terms.items():
        deg = realization_degree(model, u)
        cls = homology_class(model, make_measure(model, [(u, 1)]))
        for i, x in enumerate(cls):
            acc[i] += Fraction(m, deg) * x
    return tuple(acc)


def fried_boundary(model: MarkovModel, u1: CyclicWord, u2: CyclicWord,
                   k1: int, k2: int) -> Boundary1Cycle:
    """Boundary bookkeeping of the partial section spanned between two orbits.

    Only the even-multiplicity case is emitted, where the section meets the
    combined orbit exactly once; the sign pattern is decided by the two
    orders.  The combined word is asserted primitive and the emitted cycle
    is exactly null-homologous under degree normalization.
    """
    check_cyclic(model, u1)
    check_cyclic(model, u2)
    if u1[0] != u2[0]:
        raise PreconditionError("orbits must start at a common cuboid")
    if not is_primitive(u1) or not is_primitive(u2):
        raise PreconditionError("orbits must be primitive")
    if canonical(model, u1) == canonical(model, u2):
        raise PreconditionError("orbits share a primitive root")
    if k1 < 1 or k2 < 1 or k1 % 2 or k2 % 2:
        raise PreconditionError("multiplicities must be positive even integers")

    p1, p2 = periodic(u1), periodic(u2)
    vert = compare(model, p1, p2, Axis.VERTICAL)
    horiz = compare(model, p1, p2, Axis.HORIZONTAL)
    if vert is Ordering.LESS and horiz is Ordering.LESS:
        sign = 1
    elif vert is Ordering.LESS and horiz is Ordering.GREATER:
        sign = -1
    else:
        raise PreconditionError(
            "order hypotheses fail: need the first orbit vertically below the "
            "second, and the two orbits horizontally comparable")

    n1 = realization_degree(model, u1)
    n2 = realization_degree(model, u2)
    w = concat(power(u1, k1), power(u2, k2))
    root, exponent = primitive_decompose(w)
    assert exponent == 1, "even-power concatenation must be primitive"

    terms = {
        canonical(model, u1): sign * k1 * n1,
        canonical(model, u2): sign * k2 * n2,
        canonical(model, w): -sign,
    }
    cycle = Boundary1Cycle(terms)
    assert all(v == 0 for v in boundary_cycle_class(model, cycle))
    return cycle


@dataclass(frozen=True)
class SeparatingFunctional:
    functional: tuple[Fraction, ...]
    margin: Fraction

    def verify(self, points) -> bool:
        if self.margin <= 0:
            return False
        for x, t in points:
            lhs = sum((f * xi for f, xi in zip(self.functional, x)), Fraction(0))
            if not t >= lhs + self.margin:
                return False
        return True


@dataclass(frozen=True)
class SeparationWitness:
    """Convex combination of the points hitting {0} x (-inf, 0]."""

    coefficients: tuple[Fraction, ...]

    def verify(self, points) -> bool:
        if any(c < 0 for c in self.coefficients) or sum(self.coefficients) != 1:
            return False
        dim = len(points[0][0])
        comb_x = [Fraction(0)] * dim
        comb_t = Fraction(0)
        for (x, t), c in zip(points, self.coefficients):
            for i, xi in enumerate(x):
                comb_x[i] += c * xi
            comb_t += c * t
        return all(v == 0 for v in comb_x) and comb_t <= 0


def separating_functional(points):
    """Separate the convex hull of (vector, scalar) points from {0} x (-inf, 0].

    Returns a SeparatingFunctional (f, eta) with t >= f.x + eta on every
    point and eta > 0, or a SeparationWitness convex combination meeting the
    excluded ray.  Exact LP; the certificate is verified before return.
    """
    if not points:
        raise PreconditionError("need at least one point")
    pts = [(tuple(Fraction(v) for v in x), Fraction(t)) for x, t in points]
    dim = len(pts[0][0])
    if any(len(x) != dim for x, _ in pts):
        raise PreconditionError("points must share one dimension")

    n = len(pts)
    A = [[Fraction(1)] * n]
    b = [Fraction(1)]
    for i in range(dim):
        A.append([pts[j][0][i] for j in range(n)])
        b.append(Fraction(0))
    c = [pts[j][1] for j in range(n)]
    res = solve_lp(A, b, c)

    if res.status == "optimal" and res.objective <= 0:
        witness = SeparationWitness(tuple(res.x))
        assert witness.verify(pts)
        return witness
    if res.status == "optimal":
        # dual of the convex program: y_0 + f.x_i <= t_i with y_0 = value > 0
        eta = res.dual[0]
        f = tuple(res.dual[1:])
        cert = SeparatingFunctional(f, eta)
        assert cert.verify(pts)
        return cert

    # no convex combination has zero vector part: separate 0 from the x_i
    g = _strictly_positive_functional([x for x, _ in pts])
    shift = max(Fraction(1) - t for _, t in pts)
    if shift < 0:
        shift = Fraction(0)
    f = tuple(-shift * gi for gi in g)
    cert = SeparatingFunctional(f, Fraction(1))
    assert cert.verify(pts)
    return cert


def _strictly_positive_functional(vectors):
    """A rational g with g.x >= 1 on every vector; exists when 0 is outside
    the convex hull of the vectors."""
    dim = len(vectors[0])
    n = len(vectors)
    # find g via: g.x_i - s_i = 1, s_i >= 0, g free (split into g+ - g-)
    cols = 2 * dim + n
    A = []
    b = []
    for i, x in enumerate(vectors):
        row = [Fraction(0)] * cols
        for d in range(dim):
            row[d] = Fraction(x[d])
            row[dim + d] = -Fraction(x[d])
        row[2 * dim + i] = Fraction(-1)
        A.append(row)
        b.append(Fraction(1))
    res = solve_lp(A, b, [Fraction(0)] * cols)
    assert res.status == "optimal", "separation must exist when the hull misses 0"
    return [res.x[d] - res.x[dim + d] for d in range(dim)]
