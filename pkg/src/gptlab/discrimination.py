"""State distinguishability, capacity, complete measurements and K = N^r fits.

Distinguishability of n states is a feasibility problem over n effect
vectors: they must sum to the unit effect, evaluate to the Kronecker delta on
the given states, and lie in the effect cone.  The cone constraint is the
vertex-dual description for polytopes, an exact geometric criterion for
balls, and a cutting-plane loop with eigenvalue separation for quantum
systems (the engine stays purely LP-based).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gptlab import quantum
from gptlab.config import resolve_tol
from gptlab.errors import BudgetExceededError, DomainError
from gptlab.convex import (
    BallRep,
    Measurement,
    QuantumRep,
    SimplexRep,
    StateSpace,
    contains_effect,
    contains_state,
    simplex_vertices,
    unit_effect_vector,
    vertices_of,
)
from gptlab.lp import LinearProgram, lp_feasible, lp_solve

DEFAULT_VERTEX_BUDGET = 64
DEFAULT_LP_BUDGET = 4000
CUTTING_PLANE_ROUNDS = 50


@dataclass(frozen=True)
class DistinguishabilityWitness:
    """A measurement with E_i(omega_j) = delta_ij on the listed states."""

    measurement: Measurement
    states: np.ndarray

    @property
    def n(self) -> int:
        return self.measurement.n_outcomes


def verify_witness(space: StateSpace, witness: DistinguishabilityWitness,
                   tol: float | None = None) -> bool:
    """Re-check a witness from first principles (delta values + valid effects)."""
    tol = resolve_tol(tol)
    eff = witness.measurement.effects
    states = np.atleast_2d(witness.states)
    if eff.shape[0] != states.shape[0]:
        return False
    delta = eff @ states.T
    if np.max(np.abs(delta - np.eye(eff.shape[0]))) > 10 * tol:
        return False
    return all(contains_effect(space, f, tol=10 * tol) for f in eff)


def _single_state_witness(space: StateSpace, state: np.ndarray) -> DistinguishabilityWitness:
    unit = unit_effect_vector(space.ambient_dim)
    return DistinguishabilityWitness(Measurement(unit[None, :]), np.atleast_2d(state))


def _polytope_distinguishable(space: StateSpace, states: np.ndarray,
                              tol: float) -> DistinguishabilityWitness | None:
    verts = vertices_of(space)
    n, K = states.shape
    n_var = n * K
    # sum_i E_i = unit effect
    a_eq_sum = np.tile(np.eye(K), (1, n))
    b_eq_sum = unit_effect_vector(K)
    # E_i(omega_j) = delta_ij
    a_eq_delta = np.zeros((n * n, n_var))
    for i in range(n):
        for j in range(n):
            a_eq_delta[i * n + j, i * K : (i + 1) * K] = states[j]
    b_eq_delta = np.eye(n).reshape(-1)
    # effect cone via the dual description: E_i(v_k) >= 0 for every vertex
    nv = verts.shape[0]
    a_ub = np.zeros((n * nv, n_var))
    for i in range(n):
        a_ub[i * nv : (i + 1) * nv, i * K : (i + 1) * K] = -verts
    prog = LinearProgram(
        objective=np.zeros(n_var),
        a_eq=np.vstack([a_eq_sum, a_eq_delta]),
        b_eq=np.concatenate([b_eq_sum, b_eq_delta]),
        a_ub=a_ub,
        b_ub=np.zeros(n * nv),
    )
    feasible, point = lp_feasible(prog, tol=tol)
    if not feasible:
        return None
    effects = point.reshape(n, K)
    # exact renormalization of the last effect absorbs LP residuals
    effects[-1] = unit_effect_vector(K) - effects[:-1].sum(axis=0)
    return DistinguishabilityWitness(Measurement(effects), states)


def _ball_distinguishable(space: StateSpace, states: np.ndarray,
                          tol: float) -> DistinguishabilityWitness | None:
    """Exact criterion: an effect attains value 1 on the ball only at a single
    boundary point, so a perfectly distinguishable set is a pair of antipodal
    boundary points; larger sets are impossible."""
    n = states.shape[0]
    if n > 2:
        return None
    a, b = states[0][1:], states[1][1:]
    check_tol = max(tol, 1e-9)
    if abs(np.linalg.norm(a) - 1.0) > check_tol or abs(np.linalg.norm(b) - 1.0) > check_tol:
        return None
    if np.max(np.abs(a + b)) > check_tol:
        return None
    direction = a / np.linalg.norm(a)
    e1 = np.concatenate([[0.5], 0.5 * direction])
    e2 = np.concatenate([[0.5], -0.5 * direction])
    return DistinguishabilityWitness(Measurement(np.vstack([e1, e2])), states)


def _quantum_cut_states(space: StateSpace, states: np.ndarray, rng: np.random.Generator
                        ) -> list[np.ndarray]:
    n_level = space.rep.n
    cuts: list[np.ndarray] = []
    for s in states:
        rho = quantum.state_matrix(s, n_level)
        _, vecs = np.linalg.eigh(rho)
        for k in range(n_level):
            v = vecs[:, k]
            cuts.append(quantum.state_coords(np.outer(v, v.conj()), n_level))
    for k in range(n_level):
        v = np.zeros(n_level, dtype=complex)
        v[k] = 1.0
        cuts.append(quantum.state_coords(np.outer(v, v.conj()), n_level))
    for _ in range(4 * n_level):
        cuts.append(quantum.state_coords(quantum.random_pure_density(n_level, rng), n_level))
    return cuts


def _quantum_distinguishable(space: StateSpace, states: np.ndarray, tol: float,
                             max_rounds: int = CUTTING_PLANE_ROUNDS
                             ) -> DistinguishabilityWitness | None:
    """Outer linear relaxation of the positive-semidefinite effect cone,
    tightened by eigenvector cuts until the returned effects verify exactly."""
    n_level = space.rep.n
    n, K = states.shape
    rng = np.random.default_rng(0)
    cuts = _quantum_cut_states(space, states, rng)

    n_var = 2 * n * K  # effect coordinates + L1 proxy variables
    a_eq_sum = np.hstack([np.tile(np.eye(K), (1, n)), np.zeros((K, n * K))])
    b_eq_sum = unit_effect_vector(K)
    a_eq_delta = np.zeros((n * n, n_var))
    for i in range(n):
        for j in range(n):
            a_eq_delta[i * n + j, i * K : (i + 1) * K] = states[j]
    b_eq_delta = np.eye(n).reshape(-1)
    # |z| <= u rows keep LP vertices near the cone instead of at wild corners
    eye = np.eye(n * K)
    a_ub_abs = np.vstack([np.hstack([eye, -eye]), np.hstack([-eye, -eye])])
    b_ub_abs = np.zeros(2 * n * K)
    objective = np.concatenate([np.zeros(n * K), -np.ones(n * K)])

    for _ in range(max_rounds):
        rows = []
        for s in cuts:
            for i in range(n):
                row = np.zeros(n_var)
                row[i * K : (i + 1) * K] = -s
                rows.append(row)
        prog = LinearProgram(
            objective=objective,
            a_eq=np.vstack([a_eq_sum, a_eq_delta]),
            b_eq=np.concatenate([b_eq_sum, b_eq_delta]),
            a_ub=np.vstack([a_ub_abs] + [np.array(rows)]),
            b_ub=np.concatenate([b_ub_abs, np.zeros(len(rows))]),
        )
        sol = lp_solve(prog, tol=tol)
        if not sol.optimal:
            return None
        effects = sol.point[: n * K].reshape(n, K)
        effects[-1] = unit_effect_vector(K) - effects[:-1].sum(axis=0)
        violations = 0
        for i in range(n):
            mat = quantum.effect_matrix(effects[i], n_level)
            eigvals, eigvecs = np.linalg.eigh(mat)
            if eigvals[0] < -tol:
                violations += 1
                v = eigvecs[:, 0]
                cuts.append(quantum.state_coords(np.outer(v, v.conj()), n_level))
        if violations == 0:
            witness = DistinguishabilityWitness(Measurement(effects), states)
            if verify_witness(space, witness, tol=tol):
                return witness
            return None
    return None


def distinguishable(space: StateSpace, states, tol: float | None = None
                    ) -> DistinguishabilityWitness | None:
    """Perfect-distinguishability witness for the given states, or None."""
    tol = resolve_tol(tol)
    states = np.atleast_2d(np.asarray(states, dtype=float))
    for s in states:
        if not contains_state(space, s, tol=max(tol, 1e-7)):
            raise DomainError("state not contained in the space")
    n = states.shape[0]
    if n == 0:
        raise DomainError("empty state list")
    if n == 1:
        return _single_state_witness(space, states[0])
    rep = space.rep
    if isinstance(rep, BallRep):
        return _ball_distinguishable(space, states, tol)
    if isinstance(rep, QuantumRep):
        return _quantum_distinguishable(space, states, tol)
    return _polytope_distinguishable(space, states, tol)


# ---------------------------------------------------------------------------
# Capacity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CapacityResult:
    """Capacity value with its witness; ``n`` is None when only a bound is known."""

    n: int | None
    witness: DistinguishabilityWitness | None
    exact: bool
    lower_bound: int

    @property
    def indeterminate(self) -> bool:
        return self.n is None


def _simplex_capacity(space: StateSpace) -> CapacityResult:
    n = space.rep.n
    verts = simplex_vertices(n)
    effects = np.zeros((n, n))
    effects[0, 0] = 1.0
    effects[0, 1:] = -1.0
    for j in range(1, n):
        effects[j, j] = 1.0
    witness = DistinguishabilityWitness(Measurement(effects), verts)
    return CapacityResult(n, witness, exact=True, lower_bound=n)


def _ball_capacity(space: StateSpace) -> CapacityResult:
    d = space.rep.d
    north = np.zeros(d + 1)
    north[0] = 1.0
    north[1] = 1.0
    south = north.copy()
    south[1] = -1.0
    e1 = np.zeros(d + 1)
    e1[0] = 0.5
    e1[1] = 0.5
    e2 = e1.copy()
    e2[1] = -0.5
    witness = DistinguishabilityWitness(Measurement(np.vstack([e1, e2])), np.vstack([north, south]))
    return CapacityResult(2, witness, exact=True, lower_bound=2)


def _quantum_capacity(space: StateSpace) -> CapacityResult:
    n = space.rep.n
    states = []
    effects = []
    for k in range(n):
        v = np.zeros(n, dtype=complex)
        v[k] = 1.0
        proj = np.outer(v, v.conj())
        states.append(quantum.state_coords(proj, n))
        effects.append(quantum.effect_coords(proj, n))
    witness = DistinguishabilityWitness(Measurement(np.array(effects)), np.array(states))
    return CapacityResult(n, witness, exact=True, lower_bound=n)


def capacity(space: StateSpace, vertex_budget: int = DEFAULT_VERTEX_BUDGET,
             lp_budget: int = DEFAULT_LP_BUDGET, tol: float | None = None) -> CapacityResult:
    """Maximal number of jointly perfectly distinguishable states.

    Closed form with a verified certificate for simplices, balls and quantum
    systems; subset search over extreme points (monotonicity-pruned,
    distance-ordered) for polytopes.  Exceeding the LP budget yields an
    indeterminate result carrying the best lower bound.
    """
    tol = resolve_tol(tol)
    rep = space.rep
    if isinstance(rep, SimplexRep):
        return _simplex_capacity(space)
    if isinstance(rep, BallRep):
        return _ball_capacity(space)
    if isinstance(rep, QuantumRep):
        return _quantum_capacity(space)

    verts = vertices_of(space)
    nv = verts.shape[0]
    if nv > vertex_budget:
        raise BudgetExceededError(
            f"{nv} vertices exceed the budget of {vertex_budget}", lower_bound=1
        )
    best_witness = _single_state_witness(space, verts[0])
    best_n = 1
    level = {frozenset([i]) for i in range(nv)}
    lp_calls = 0
    size = 2
    while level:
        candidates = set()
        for subset in level:
            top = max(subset)
            for j in range(top + 1, nv):
                cand = subset | {j}
                if all(frozenset(cand - {x}) in level for x in cand):
                    candidates.add(frozenset(cand))
        if not candidates:
            break

        def min_pairwise(subset: frozenset) -> float:
            pts = verts[sorted(subset)]
            return min(
                np.linalg.norm(pts[i] - pts[j])
                for i in range(len(pts))
                for j in range(i + 1, len(pts))
            )

        ordered = sorted(candidates, key=lambda s: (-min_pairwise(s), sorted(s)))
        next_level = set()
        witness = None
        for cand in ordered:
            if lp_calls >= lp_budget:
                return CapacityResult(None, best_witness, exact=False, lower_bound=best_n)
            lp_calls += 1
            w = distinguishable(space, verts[sorted(cand)], tol=tol)
            if w is not None:
                next_level.add(cand)
                witness = witness or w
        if not next_level:
            break
        best_n = size
        best_witness = witness
        level = next_level
        size += 1
    return CapacityResult(best_n, best_witness, exact=True, lower_bound=best_n)


def complete_measurement(space: StateSpace, tol: float | None = None) -> DistinguishabilityWitness:
    """A measurement distinguishing as many states as the capacity allows."""
    result = capacity(space, tol=tol)
    if result.indeterminate:
        raise BudgetExceededError(
            "capacity search exhausted its budget", lower_bound=result.lower_bound
        )
    return result.witness


# ---------------------------------------------------------------------------
# Capacity-exponent structure
# ---------------------------------------------------------------------------

def fit_capacity_exponent(pairs) -> int | None:
    """The unique integer r >= 1 with K = N^r across all (N, K) pairs, else None."""
    pairs = [(int(n), int(k)) for n, k in pairs]
    if not pairs:
        raise DomainError("empty pair list")
    for n, k in pairs:
        if n < 1 or k < 1:
            raise DomainError("capacities and dimensions must be >= 1")
    anchors = [(n, k) for n, k in pairs if n >= 2]
    if not anchors:
        return None  # only trivial pairs: the exponent is not unique
    n0, k0 = anchors[0]
    r = int(round(np.log(k0) / np.log(n0)))
    if r < 1 or n0**r != k0:
        return None
    if all(n**r == k for n, k in pairs + [(1, 1)]):
        return r
    return None


def admissible_bit_dimensions(r_max: int) -> list[int]:
    """Ball dimensions compatible with K_2 = 2^r: the list 2^r - 1 for r <= r_max."""
    if r_max < 1:
        raise DomainError("r_max must be >= 1")
    return [2**r - 1 for r in range(1, r_max + 1)]
