"""Bipartite composition: min/max tensor spaces, marginals, conditionals,
no-signalling checks and CHSH evaluation.

Bipartite states live in the Kronecker product of the part ambients, indexed
row-major by coordinate pairs; coordinate (0, 0) is the normalization
coordinate, and the composite unit effect is the product of the part units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gptlab import quantum
from gptlab.config import resolve_tol
from gptlab.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    UnsupportedRepresentationError,
    ZeroProbabilityConditioningError,
)
from gptlab.convex import (
    BallRep,
    Measurement,
    PolytopeRep,
    QuantumRep,
    SimplexRep,
    StateSpace,
    contains_state,
    sample_pure_state,
    sample_state,
    unit_effect_vector,
    vertices_of,
)
from gptlab.discrimination import (
    DistinguishabilityWitness,
    capacity,
    complete_measurement,
    verify_witness,
)
from gptlab.geometry import affine_dimension, dual_cone_rays, dual_cone_rays_exact
from gptlab.symmetry import (
    FiniteMatrixGroup,
    PermutationGroup,
    _group_matrices,
    _round_key,
    maximally_mixed,
)

MIN_TENSOR = "min"
MAX_TENSOR = "max"

MAX_COMPOSITE_VERTICES = 4096


def product_state(omega_a: np.ndarray, omega_b: np.ndarray) -> np.ndarray:
    """Independent preparation: the Kronecker product of the coordinate vectors."""
    return np.kron(np.asarray(omega_a, dtype=float), np.asarray(omega_b, dtype=float))


def product_effect(effect_a: np.ndarray, effect_b: np.ndarray) -> np.ndarray:
    """Independent local measurement outcome; evaluation factorizes exactly."""
    return np.kron(np.asarray(effect_a, dtype=float), np.asarray(effect_b, dtype=float))


def _is_finite(space: StateSpace) -> bool:
    return isinstance(space.rep, (PolytopeRep, SimplexRep))


@dataclass(frozen=True)
class Composite:
    """A bipartite state space tagged with its composition rule.

    ``space`` is an explicit polytope when both parts have finite vertex
    lists; composites of ball/quantum parts are handled constructively
    (products, marginals, conditionals) and by membership queries.
    """

    part_a: StateSpace
    part_b: StateSpace
    rule: str
    space: StateSpace | None

    @property
    def k_a(self) -> int:
        return self.part_a.ambient_dim

    @property
    def k_b(self) -> int:
        return self.part_b.ambient_dim

    @property
    def ambient_dim(self) -> int:
        return self.k_a * self.k_b

    @property
    def unit_effect(self) -> np.ndarray:
        return unit_effect_vector(self.ambient_dim)


def _part_cone_rays(space: StateSpace, tol: float) -> np.ndarray:
    """Extreme rays of the part's effect cone (facets of its state cone)."""
    return dual_cone_rays(vertices_of(space), tol=tol)


def _integral(arr: np.ndarray) -> bool:
    return bool(np.max(np.abs(arr - np.round(arr))) < 1e-12)


def compose(a: StateSpace, b: StateSpace, rule: str, tol: float | None = None,
            exact: bool | None = None) -> Composite:
    """Build the min- or max-tensor composite of two state spaces.

    Min tensor: convex hull of all products of part vertices (separable
    states).  Max tensor: every normalized vector that is nonnegative on all
    product effects; vertices enumerated by double description from the
    product-effect inequalities, with exact rational arithmetic on small
    integral cases.
    """
    tol = resolve_tol(tol)
    if rule not in (MIN_TENSOR, MAX_TENSOR):
        raise ValueError(f"unknown composition rule {rule!r}")
    name = f"{rule}({a.name},{b.name})"

    if rule == MIN_TENSOR:
        if not (_is_finite(a) and _is_finite(b)):
            return Composite(a, b, rule, space=None)
        va, vb = vertices_of(a), vertices_of(b)
        prods = np.array([np.kron(x, y) for x in va for y in vb])
        return Composite(a, b, rule, space=StateSpace(name=name, rep=PolytopeRep(prods)))

    if not (_is_finite(a) and _is_finite(b)):
        return Composite(a, b, rule, space=None)
    rays_a = _part_cone_rays(a, tol)
    rays_b = _part_cone_rays(b, tol)
    rows = np.array([np.kron(f, g) for f in rays_a for g in rays_b])
    if exact is None:
        exact = _integral(rows) and rows.shape[1] <= 16
    if exact:
        fracs = dual_cone_rays_exact(np.round(rows).astype(int))
        rays = np.array([[float(x / r[0]) for x in r] for r in fracs])
    else:
        raw = dual_cone_rays(rows, tol=tol)
        if np.any(raw[:, 0] <= tol):
            raise UnsupportedRepresentationError(
                "max tensor enumeration produced an unnormalizable ray"
            )
        rays = raw / raw[:, 0:1]
    if rays.shape[0] > MAX_COMPOSITE_VERTICES:
        raise BudgetExceededError(
            f"composite has {rays.shape[0]} vertices (budget {MAX_COMPOSITE_VERTICES})"
        )
    return Composite(a, b, rule, space=StateSpace(name=name, rep=PolytopeRep(rays)))


# ---------------------------------------------------------------------------
# Marginals and conditionals
# ---------------------------------------------------------------------------

def _check_dim(c: Composite, omega: np.ndarray) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (c.ambient_dim,):
        raise DimensionMismatchError(
            f"bipartite vector of shape {omega.shape}, expected ({c.ambient_dim},)"
        )
    return omega


def contract_b(c: Composite, omega: np.ndarray, effect_b: np.ndarray) -> np.ndarray:
    """(Id_A (x) E_B)(omega): the unnormalized A-vector after outcome E_B."""
    omega = _check_dim(c, omega)
    return omega.reshape(c.k_a, c.k_b) @ np.asarray(effect_b, dtype=float)


def contract_a(c: Composite, omega: np.ndarray, effect_a: np.ndarray) -> np.ndarray:
    omega = _check_dim(c, omega)
    return np.asarray(effect_a, dtype=float) @ omega.reshape(c.k_a, c.k_b)


def reduced_state(c: Composite, omega: np.ndarray, side: str = "A") -> np.ndarray:
    """Marginal on one side: contraction of the other index with the unit effect."""
    if side == "A":
        return contract_b(c, omega, unit_effect_vector(c.k_b))
    if side == "B":
        return contract_a(c, omega, unit_effect_vector(c.k_a))
    raise ValueError("side must be 'A' or 'B'")


def conditional_state(c: Composite, omega: np.ndarray, effect: np.ndarray,
                      side: str = "B", tol: float | None = None) -> np.ndarray:
    """State left on the opposite side after observing ``effect`` on ``side``."""
    tol = resolve_tol(tol)
    raw = contract_b(c, omega, effect) if side == "B" else contract_a(c, omega, effect)
    weight = raw[0]
    if weight <= tol:
        raise ZeroProbabilityConditioningError(
            f"conditioning probability {weight:.3e} below tolerance"
        )
    return raw / weight


# ---------------------------------------------------------------------------
# No-signalling and CHSH
# ---------------------------------------------------------------------------

def no_signalling_check(c: Composite, omega: np.ndarray, measurements_b,
                        tol: float | None = None) -> bool:
    """The A-marginal reconstructed outcome-by-outcome must not depend on the
    B measurement choice (within tol)."""
    tol = resolve_tol(tol)
    marginals = []
    for m in measurements_b:
        if m.ambient_dim != c.k_b:
            raise DimensionMismatchError("measurement does not act on part B")
        total = np.zeros(c.k_a)
        for effect in m.effects:
            total = total + contract_b(c, omega, effect)
        marginals.append(total)
    for i in range(len(marginals)):
        for j in range(i + 1, len(marginals)):
            if np.max(np.abs(marginals[i] - marginals[j])) > tol:
                return False
    return True


def chsh_value(c: Composite, omega: np.ndarray, a_measurements, b_measurements) -> float:
    """|<A0B0> + <A0B1> + <A1B0> - <A1B1>| with the first effect of each
    two-outcome measurement valued +1."""
    omega = _check_dim(c, omega)
    if len(a_measurements) != 2 or len(b_measurements) != 2:
        raise ValueError("CHSH needs two settings per side")

    def correlator(ma: Measurement, mb: Measurement) -> float:
        if ma.n_outcomes != 2 or mb.n_outcomes != 2:
            raise ValueError("CHSH settings must be two-outcome measurements")
        total = 0.0
        for i, ea in enumerate(ma.effects):
            for j, eb in enumerate(mb.effects):
                sign = 1.0 if i == j else -1.0
                total += sign * float(product_effect(ea, eb) @ omega)
        return total

    c00 = correlator(a_measurements[0], b_measurements[0])
    c01 = correlator(a_measurements[0], b_measurements[1])
    c10 = correlator(a_measurements[1], b_measurements[0])
    c11 = correlator(a_measurements[1], b_measurements[1])
    return abs(c00 + c01 + c10 - c11)


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------

def local_tomography_check(c: Composite, rng: np.random.Generator | None = None,
                           tol: float | None = None) -> bool:
    """Product effects separate states iff the composite spans K_A*K_B - 1
    affine dimensions."""
    tol = resolve_tol(tol)
    target = c.ambient_dim - 1
    if c.space is not None:
        return affine_dimension(vertices_of(c.space), tol) == target
    rng = rng if rng is not None else np.random.default_rng(0)
    samples = np.array([
        product_state(sample_state(c.part_a, rng), sample_state(c.part_b, rng))
        for _ in range(2 * c.ambient_dim + 8)
    ])
    return affine_dimension(samples, tol=max(tol, 1e-7)) == target


def maximally_mixed_composite(c: Composite, tol: float | None = None) -> np.ndarray:
    """Group-invariant composite state.

    For finite local groups this is an honest orbit average of a composite
    pure state under local product transformations; for parametric parts the
    closed-form product is the group average (the averaging projector
    factorizes).
    """
    ga, gb = c.part_a.group, c.part_b.group
    finite = isinstance(ga, (FiniteMatrixGroup, PermutationGroup)) and isinstance(
        gb, (FiniteMatrixGroup, PermutationGroup)
    )
    if finite and c.space is not None:
        eye_a = np.eye(c.k_a)
        eye_b = np.eye(c.k_b)
        gens = [np.kron(m, eye_b) for m in _group_matrices(ga)]
        gens += [np.kron(eye_a, m) for m in _group_matrices(gb)]
        start = vertices_of(c.space)[-1]
        seen: dict[bytes, np.ndarray] = {_round_key(start): start}
        frontier = [start]
        while frontier:
            nxt = []
            for s in frontier:
                for mat in gens:
                    t = mat @ s
                    key = _round_key(t)
                    if key not in seen:
                        seen[key] = t
                        nxt.append(t)
            frontier = nxt
        return np.mean(list(seen.values()), axis=0)
    return product_state(maximally_mixed(c.part_a), maximally_mixed(c.part_b))


@dataclass(frozen=True)
class MultiplicativityResult:
    product_bound: int                 # N_A * N_B, witnessed by product states
    witness: DistinguishabilityWitness
    composite_capacity: int | None     # full-search result; None if not attempted
    capacity_exact: bool               # False when the search ran out of budget
    ok: bool


def capacity_multiplicativity_check(c: Composite, full_search: bool = False,
                                    lp_budget: int | None = None,
                                    tol: float | None = None) -> MultiplicativityResult:
    """Verify that the parts' complete measurements combine into N_A*N_B
    jointly distinguishable product states; optionally confirm the composite
    capacity by full subset search (finite case, within budget).

    A budget-exhausted full search downgrades to the lower-bound-only result
    rather than reporting a failure.
    """
    tol = resolve_tol(tol)
    wa = complete_measurement(c.part_a, tol=tol)
    wb = complete_measurement(c.part_b, tol=tol)
    states = np.array([
        product_state(sa, sb) for sa in wa.states for sb in wb.states
    ])
    effects = np.array([
        product_effect(ea, eb) for ea in wa.measurement.effects for eb in wb.measurement.effects
    ])
    witness = DistinguishabilityWitness(Measurement(effects), states)
    delta = effects @ states.T
    ok = bool(np.max(np.abs(delta - np.eye(states.shape[0]))) <= 10 * tol)
    if c.space is not None:
        ok = ok and verify_witness(c.space, witness, tol=tol)
    composite_capacity = None
    capacity_exact = False
    if full_search and c.space is not None:
        kwargs = {} if lp_budget is None else {"lp_budget": lp_budget}
        result = capacity(c.space, tol=tol, **kwargs)
        composite_capacity = result.n
        capacity_exact = result.exact
        if result.n is not None:
            ok = ok and result.n == states.shape[0]
    return MultiplicativityResult(
        states.shape[0], witness, composite_capacity, capacity_exact, ok
    )


# ---------------------------------------------------------------------------
# Membership for continuous-part max tensors
# ---------------------------------------------------------------------------

def max_tensor_contains(c: Composite, omega: np.ndarray, tol: float | None = None,
                        rng: np.random.Generator | None = None, n_starts: int = 8,
                        n_iters: int = 60) -> bool:
    """Membership query for max-tensor composites without a vertex list.

    Minimizes product-effect values by alternating exact one-sided
    minimizations from several starts; a semi-decision (sound for rejection,
    heuristic for acceptance).
    """
    tol = resolve_tol(tol)
    omega = _check_dim(c, omega)
    if c.space is not None:
        return contains_state(c.space, omega, tol=tol)
    if abs(omega[0] - 1.0) > tol:
        return False
    rng = rng if rng is not None else np.random.default_rng(0)
    M = omega.reshape(c.k_a, c.k_b)

    def min_effect(space: StateSpace, w: np.ndarray) -> tuple[float, np.ndarray]:
        """Minimize f·w over the normalized extreme effects of the cone."""
        rep = space.rep
        if isinstance(rep, BallRep):
            what = w[1:]
            norm = np.linalg.norm(what)
            direction = -what / norm if norm > 0 else np.zeros(rep.d)
            f = np.concatenate([[1.0], direction])
            return float(f @ w), f
        if isinstance(rep, QuantumRep):
            mat = quantum.state_matrix(w, rep.n)
            eigvals, eigvecs = np.linalg.eigh(mat)
            v = eigvecs[:, 0]
            f = quantum.effect_coords(np.outer(v, v.conj()), rep.n)
            return float(f @ w), f
        rays = _part_cone_rays(space, resolve_tol(None))
        values = rays @ w
        k = int(np.argmin(values))
        return float(values[k]), rays[k]

    worst = np.inf
    for _ in range(n_starts):
        g = _random_cone_effect(c.part_b, rng)
        value = np.inf
        for _ in range(n_iters):
            _, f = min_effect(c.part_a, M @ g)
            new_value, g = min_effect(c.part_b, f @ M)
            if abs(new_value - value) < 1e-13:
                value = new_value
                break
            value = new_value
        worst = min(worst, value)
    return worst >= -tol


def _random_cone_effect(space: StateSpace, rng: np.random.Generator) -> np.ndarray:
    rep = space.rep
    if isinstance(rep, BallRep):
        n = rng.normal(size=rep.d)
        return np.concatenate([[1.0], n / np.linalg.norm(n)])
    if isinstance(rep, QuantumRep):
        return quantum.effect_coords(quantum.random_pure_density(rep.n, rng), rep.n)
    rays = _part_cone_rays(space, resolve_tol(None))
    return rays[rng.integers(rays.shape[0])]


def sample_composite_state(c: Composite, rng: np.random.Generator) -> np.ndarray:
    """Random state of the composite (mixture of vertices / products)."""
    if c.space is not None:
        return sample_state(c.space, rng)
    weights = rng.dirichlet(np.ones(8))
    parts = [
        product_state(sample_pure_state(c.part_a, rng), sample_pure_state(c.part_b, rng))
        for _ in range(8)
    ]
    return weights @ np.array(parts)
