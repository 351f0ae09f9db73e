"""Discrete-time thermodynamic formalism on the transition graph.

Potentials are locally constant (one weight per edge), so pressure and the
equilibrium state reduce to the leading eigendata of the edge-weighted
transition matrix.  This is the only floating-point module; iteration
schedules are fixed so runs reproduce bit-for-bit on one platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError
from .model import Edge, MarkovModel
from .simplex import rank, solve_lp
from .words import CyclicWord, check_cyclic

POWER_TOL = 1e-12
POWER_RESIDUAL_CAP = 1e-10  # the report invariant: residuals stay below this
POWER_MAX_ITER = 100_000
NEWTON_DAMPING = 0.5
NEWTON_MAX_ITER = 200
NEWTON_FD_STEP = 1e-6
CLASS_RESIDUAL_TARGET = 1e-8


@dataclass(frozen=True)
class Potential:
    """Locally constant potential: one real weight per edge."""

    weight: dict[Edge, float]

    def __call__(self, edge: Edge) -> float:
        return self.weight[edge]


def constant_potential(model: MarkovModel, value: float = 0.0) -> Potential:
    return Potential({e: float(value) for e in model.edges})


def check_potential(model: MarkovModel, pot: Potential) -> None:
    missing = [e for e in model.sorted_edges() if e not in pot.weight]
    if missing:
        raise PreconditionError(f"potential undefined on edge {missing[0]}")


@dataclass(frozen=True)
class PressureReport:
    pressure: float
    spectral_radius: float
    right_vector: dict[str, float]
    left_vector: dict[str, float]
    right_residual: float
    left_residual: float
    iterations: int


@dataclass(frozen=True)
class MarkovMeasure:
    stationary: dict[str, float]
    edge_prob: dict[Edge, float]

    def edge_mass(self, edge: Edge) -> float:
        return self.stationary[edge[0]] * self.edge_prob[edge]

    def masses(self) -> dict[Edge, float]:
        return {e: self.edge_mass(e) for e in self.edge_prob}


def _weight_matrix(model: MarkovModel, pot: Potential) -> np.ndarray:
    n = len(model.alphabet)
    M = np.zeros((n, n))
    for (a, b) in model.edges:
        M[model.letter_rank(a), model.letter_rank(b)] = math.exp(pot((a, b)))
    return M


def _power_iteration(M: np.ndarray, tol: float, max_iter: int):
    """Perron pair of an irreducible nonnegative matrix.

    Iterates the shifted operator M + I (primitive whenever M is
    irreducible, so the iteration cannot oscillate on periodic graphs) from
    the all-ones vector; the reported eigenvalue and residual refer to M.
    """
    n = M.shape[0]
    shifted = M + np.eye(n)
    x = np.ones(n)
    x /= x.sum()
    lam = 0.0
    for it in range(1, max_iter + 1):
        y = shifted @ x
        norm = y.sum()
        x = y / norm
        lam = norm - 1.0
        residual = np.max(np.abs(M @ x - lam * x))
        # scale the test with the spectral radius (the rounding floor of the
        # residual grows with it), but never past the reported-residual cap
        threshold = min(max(tol, tol * lam), max(POWER_RESIDUAL_CAP, tol))
        if residual <= threshold * np.max(np.abs(x)):
            return lam, x, residual, it
    raise PreconditionError(
        f"power iteration did not converge: residual {residual:.3e} after {max_iter} iterations")


def pressure(model: MarkovModel, pot: Potential, tol: float = POWER_TOL) -> PressureReport:
    """Pressure of an edge potential: log of the leading eigenvalue of the
    weighted transition matrix."""
    check_potential(model, pot)
    M = _weight_matrix(model, pot)
    lam, r, res_r, it_r = _power_iteration(M, tol, POWER_MAX_ITER)
    lam_l, l, res_l, it_l = _power_iteration(M.T, tol, POWER_MAX_ITER)
    names = model.alphabet
    return PressureReport(
        pressure=math.log(lam),
        spectral_radius=lam,
        right_vector={c: float(r[i]) for i, c in enumerate(names)},
        left_vector={c: float(l[i]) for i, c in enumerate(names)},
        right_residual=float(res_r),
        left_residual=float(res_l),
        iterations=max(it_r, it_l),
    )


def equilibrium_state(model: MarkovModel, pot: Potential, tol: float = POWER_TOL) -> MarkovMeasure:
    """The Markov measure attaining the variational supremum for the potential."""
    check_potential(model, pot)
    M = _weight_matrix(model, pot)
    lam, r, _, _ = _power_iteration(M, tol, POWER_MAX_ITER)
    _, l, _, _ = _power_iteration(M.T, tol, POWER_MAX_ITER)
    n = len(model.alphabet)
    pi = l * r
    pi /= pi.sum()
    stationary = {c: float(pi[i]) for i, c in enumerate(model.alphabet)}
    edge_prob = {}
    for (a, b) in model.sorted_edges():
        i, j = model.letter_rank(a), model.letter_rank(b)
        edge_prob[(a, b)] = float(M[i, j] * r[j] / (lam * r[i]))
    return MarkovMeasure(stationary, edge_prob)


def entropy(measure: MarkovMeasure) -> float:
    h = 0.0
    for (a, b), p in measure.edge_prob.items():
        if p > 0:
            h -= measure.stationary[a] * p * math.log(p)
    return h


def potential_average(measure: MarkovMeasure, pot: Potential) -> float:
    return sum(measure.edge_mass(e) * pot(e) for e in measure.edge_prob)


def measure_class(model: MarkovModel, measure: MarkovMeasure) -> tuple[float, ...]:
    """Homology class of a Markov measure: edge masses paired with the labels."""
    acc = [0.0] * model.homology_dim
    for e in model.sorted_edges():
        m = measure.edge_mass(e)
        for i, x in enumerate(model.homology_label[e]):
            acc[i] += m * float(x)
    return tuple(acc)


@dataclass(frozen=True)
class EscapeReport:
    escape_mass: float
    bound: float
    top_entropy: float
    passed: bool


def escape_bound_check(model: MarkovModel, pot: Potential, gamma: CyclicWord,
                       U: set[Edge], C1: float, C2: float) -> EscapeReport:
    """Check the equilibrium-state escape bound for a potential peaking on
    one orbit: mass outside U is at most top entropy over (C2 - C1)."""
    check_potential(model, pot)
    check_cyclic(model, gamma)
    if not C2 > C1:
        raise PreconditionError("need C2 > C1")
    gamma_edges = {(gamma[i], gamma[i + 1]) for i in range(len(gamma))}
    if not gamma_edges <= U:
        raise PreconditionError("the orbit's edges must lie inside U")
    for e in model.sorted_edges():
        if pot(e) > C2 + 1e-15:
            raise PreconditionError(f"potential exceeds C2 on {e}")
        if e in gamma_edges and abs(pot(e) - C2) > 1e-12:
            raise PreconditionError(f"potential must equal C2 on the orbit edge {e}")
        if e not in U and pot(e) > C1 + 1e-15:
            raise PreconditionError(f"potential exceeds C1 off U on {e}")

    state = equilibrium_state(model, pot)
    escape = sum(state.edge_mass(e) for e in model.sorted_edges() if e not in U)
    h_top = pressure(model, constant_potential(model)).pressure
    bound = h_top / (C2 - C1)
    return EscapeReport(escape, bound, h_top, escape <= bound + 1e-9)


@dataclass(frozen=True)
class HomologyFullReport:
    full: bool
    horizon: int
    cycles: tuple[CyclicWord, ...]
    combination: dict[CyclicWord, Fraction] | None
    separating_functional: tuple[Fraction, ...] | None

    def certificate_ok(self, model: MarkovModel) -> bool:
        from .measures import homology_class, make_measure

        classes = [homology_class(model, make_measure(model, [(u, 1)])) for u in self.cycles]
        if self.full:
            total = [Fraction(0)] * model.homology_dim
            for u, cls in zip(self.cycles, classes):
                c = self.combination[u]
                if c < 1:
                    return False
                for i, x in enumerate(cls):
                    total[i] += c * x
            return all(v == 0 for v in total)
        f = self.separating_functional
        dots = [sum((fi * xi for fi, xi in zip(f, cls)), Fraction(0)) for cls in classes]
        return all(d >= 0 for d in dots) and sum(dots, Fraction(0)) > 0


def _primitive_cycles(model: MarkovModel, max_len: int) -> list[CyclicWord]:
    """Primitive cyclic words of length <= max_len, one per rotation class,
    in deterministic (length, letters) order."""
    from .words import canonical, is_primitive

    seen = set()
    out = []
    frontier = [(c,) for c in model.alphabet]
    for length in range(1, max_len + 1):
        for path in sorted(frontier, key=lambda p: tuple(model.letter_rank(c) for c in p)):
            if model.has_edge(path[-1], path[0]):
                u = CyclicWord(path)
                if is_primitive(u):
                    key = canonical(model, u)
                    if key not in seen:
                        seen.add(key)
                        out.append(key)
        if length < max_len:
            frontier = [p + (s,) for p in frontier for s in model.out_order[p[-1]]]
    return out


def is_homologically_full(model: MarkovModel, max_len: int) -> HomologyFullReport:
    """Feasibility of a strictly positive null combination of cycle classes.

    True comes with the combination; false carries the horizon and an exact
    functional nonnegative on every enumerated class with positive total.
    """
    from .measures import homology_class, make_measure

    if max_len < 1:
        raise PreconditionError("max_len must be >= 1")
    cycles = _primitive_cycles(model, max_len)
    classes = [homology_class(model, make_measure(model, [(u, 1)])) for u in cycles]
    b_dim = model.homology_dim
    n = len(cycles)
    # substitute c = 1 + d, d >= 0:  sum d_i v_i = -sum v_i; minimize sum d_i
    A = [[classes[j][i] for j in range(n)] for i in range(b_dim)]
    b = [-sum((classes[j][i] for j in range(n)), Fraction(0)) for i in range(b_dim)]
    res = solve_lp(A, b, [Fraction(1)] * n)
    if res.status == "optimal":
        combo = {cycles[j]: res.x[j] + 1 for j in range(n)}
        report = HomologyFullReport(True, max_len, tuple(cycles), combo, None)
    else:
        y = res.farkas
        f = [-v for v in y]
        scale = max((abs(v) for v in f), default=Fraction(0))
        if scale:
            f = [v / scale for v in f]
        report = HomologyFullReport(False, max_len, tuple(cycles), None, tuple(f))
    assert report.certificate_ok(model)
    return report


@dataclass(frozen=True)
class NullClassReport:
    x: tuple[float, ...]
    residual: float
    converged: bool
    iterations: int
    method: str


def _bump_potential(model: MarkovModel, base: Potential, x,
                    plus_edges, minus_edges) -> Potential:
    w = dict(base.weight)
    for i, xi in enumerate(x):
        if xi > 0:
            for e in plus_edges[i]:
                w[e] += xi
        elif xi < 0:
            for e in minus_edges[i]:
                w[e] += -xi
    return Potential(w)


def null_class_potential(model: MarkovModel, plus_orbits: list[CyclicWord],
                         minus_orbits: list[CyclicWord], base_pot: Potential,
                         r: float) -> NullClassReport:
    """Search the bump-potential family for an equilibrium state of zero class.

    The family raises the potential on the chosen orbits' edges, the plus
    orbit for a positive coordinate and its minus partner for a negative
    one.  Damped Newton with a finite-difference Jacobian runs first; the
    one-dimensional case falls back to bisection, justified by the sign
    change the degree argument provides on a large box.
    """
    from .measures import homology_class as mclass, make_measure

    check_potential(model, base_pot)
    if len(plus_orbits) != len(minus_orbits) or not plus_orbits:
        raise PreconditionError("need matching nonempty orbit families")
    if r <= 0:
        raise PreconditionError("box radius must be positive")
    n = len(plus_orbits)

    plus_classes = [mclass(model, make_measure(model, [(u, 1)])) for u in plus_orbits]
    minus_classes = [mclass(model, make_measure(model, [(u, 1)])) for u in minus_orbits]
    label_span = rank([model.homology_label[e] for e in model.sorted_edges()])
    if rank(plus_classes) != n or label_span != n:
        raise PreconditionError(
            "classes of the plus orbits must form a basis of the label span")
    for i in range(n):
        if any(p + m != 0 for p, m in zip(plus_classes[i], minus_classes[i])):
            raise PreconditionError(
                f"minus orbit {i} is not anti-homologous to its plus partner")
    if not is_homologically_full(model, len(model.alphabet)).full:
        raise PreconditionError("model is not homologically full")

    def orbit_edges(u: CyclicWord) -> frozenset:
        return frozenset((u[i], u[i + 1]) for i in range(len(u)))

    plus_edges = [orbit_edges(u) for u in plus_orbits]
    minus_edges = [orbit_edges(u) for u in minus_orbits]
    all_sets = plus_edges + minus_edges
    for i in range(len(all_sets)):
        for j in range(i + 1, len(all_sets)):
            if all_sets[i] & all_sets[j]:
                raise PreconditionError(
                    "bump supports must be edge-disjoint between the chosen orbits")

    # express the class of a measure in the plus-class basis (exact change of
    # coordinates applied to a float vector)
    basis_cols = [[float(plus_classes[j][i]) for j in range(n)] for i in range(model.homology_dim)]
    B = np.array(basis_cols)  # dim x n
    BtB_inv = np.linalg.inv(B.T @ B)

    def f(x):
        pot = _bump_potential(model, base_pot, x, plus_edges, minus_edges)
        state = equilibrium_state(model, pot)
        cls = np.array(measure_class(model, state))
        return BtB_inv @ (B.T @ cls), float(np.max(np.abs(cls)))

    def attempt_newton(x0):
        x = np.array(x0, dtype=float)
        best = None
        for it in range(1, NEWTON_MAX_ITER + 1):
            val, residual = f(x)
            if best is None or residual < best[1]:
                best = (x.copy(), residual, it)
            if residual <= max(POWER_TOL, 1e-12):
                return best
            J = np.zeros((n, n))
            for j in range(n):
                xp = x.copy()
                xp[j] += NEWTON_FD_STEP
                vp, _ = f(xp)
                J[:, j] = (vp - val) / NEWTON_FD_STEP
            try:
                step = np.linalg.solve(J, val)
            except np.linalg.LinAlgError:
                break
            x = np.clip(x - NEWTON_DAMPING * step, -r, r)
        return best

    best = attempt_newton([0.0] * n)
    method = "newton"
    if best[1] > CLASS_RESIDUAL_TARGET and n == 1:
        lo, hi = -float(r), float(r)
        flo, _ = f([lo])
        fhi, _ = f([hi])
        if flo[0] * fhi[0] <= 0:
            method = "bisection"
            for it in range(200):
                mid = 0.5 * (lo + hi)
                fmid, residual = f([mid])
                if residual < best[1]:
                    best = (np.array([mid]), residual, NEWTON_MAX_ITER + it)
                if residual <= 1e-13:
                    break
                if flo[0] * fmid[0] <= 0:
                    hi = mid
                else:
                    lo, flo = mid, fmid
    elif best[1] > CLASS_RESIDUAL_TARGET:
        # deterministic multistart over box corners and center
        for corner in _box_grid(n, float(r)):
            cand = attempt_newton(corner)
            if cand[1] < best[1]:
                best = cand
            if best[1] <= CLASS_RESIDUAL_TARGET:
                break

    x, residual, iterations = best
    return NullClassReport(tuple(float(v) for v in x), residual,
                           residual <= CLASS_RESIDUAL_TARGET, iterations, method)


def _box_grid(n: int, r: float):
    import itertools

    for point in itertools.product((-r / 2, 0.0, r / 2), repeat=n):
        yield list(point)


def max_cycle_mean_of_potential(model: MarkovModel, pot: Potential) -> Fraction:
    """Exact maximum cycle mean of the potential, for the strict comparison
    with pressure (cross-module check against the section machinery)."""
    from .sections import EdgeWeighting, max_mean_cycle

    weights = EdgeWeighting({e: Fraction(pot(e)) for e in model.edges})
    value, _ = max_mean_cycle(model, weights)
    return value
