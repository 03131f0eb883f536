"""Transformation groups, transitivity, invariant states, faces and probes.

Group elements act as K x K matrices on homogeneous coordinates, fixing the
normalization coordinate.  Parametric families (ball rotations, unitary
conjugations) are handled constructively and by sampling; finite families by
explicit matrices or permutation tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from gptlab import quantum
from gptlab.config import resolve_tol
from gptlab.errors import (
    DomainError,
    NoFaceError,
    UnsupportedRepresentationError,
    ValidationError,
)
from gptlab.convex import (
    BallRep,
    PolytopeRep,
    QuantumRep,
    SimplexRep,
    StateSpace,
    affine_dim_of,
    contains_state,
    effect_range,
    sample_pure_state,
    sample_state,
    unit_effect_vector,
    vertices_of,
)
from gptlab.geometry import affine_dimension


# ---------------------------------------------------------------------------
# Group descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteMatrixGroup:
    """Explicit finite matrix group acting on homogeneous coordinates."""

    matrices: np.ndarray  # (M, K, K)

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=float)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ValidationError("matrices must have shape (M, K, K)")
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    @property
    def order(self) -> int:
        return self.matrices.shape[0]


@dataclass(frozen=True)
class PermutationGroup:
    """Symmetric group on N levels acting on classical fiducial coordinates."""

    n: int


@dataclass(frozen=True)
class RotationGroup:
    """SO(d) acting on the ball coordinates, fixing the normalization coordinate."""

    d: int


@dataclass(frozen=True)
class UnitaryGroup:
    """Unitary conjugations rho -> U rho U† on a quantum N-level system."""

    n: int


GroupDescriptor = FiniteMatrixGroup | PermutationGroup | RotationGroup | UnitaryGroup


def _round_key(arr: np.ndarray) -> bytes:
    # + 0.0 collapses -0.0 and 0.0 to the same byte pattern
    return (np.round(arr, 9) + 0.0).tobytes()


def permutation_coordinate_matrix(perm: np.ndarray, n: int) -> np.ndarray:
    """Matrix on [1, p_1, .., p_{n-1}] induced by relabeling level k -> perm[k].

    Levels are 0-based; coordinate i (1 <= i <= n-1) holds the probability of
    level i, and level 0 carries the implied probability 1 - sum(others).
    """
    perm = np.asarray(perm, dtype=int)
    inv = np.empty(n, dtype=int)
    inv[perm] = np.arange(n)
    mat = np.zeros((n, n))
    mat[0, 0] = 1.0
    for i in range(1, n):
        k = inv[i]
        if k == 0:
            mat[i, 0] = 1.0
            mat[i, 1:] = -1.0
        else:
            mat[i, k] = 1.0
    return mat


def haar_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar sample from SO(d), embedded as a (d+1) x (d+1) coordinate matrix."""
    g = rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diagonal(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1.0
    out = np.eye(d + 1)
    out[1:, 1:] = q
    return out


def rotation_between(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """SO(d) element mapping unit vector u to unit vector v (two reflections).

    The first Householder reflection swaps u and v; a second reflection fixing
    v repairs the determinant.  Needs d >= 2.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    d = u.size
    if d < 2:
        raise DomainError("rotation construction needs dimension >= 2")
    if np.linalg.norm(u - v) < 1e-14:
        return np.eye(d)
    w = (v - u) / np.linalg.norm(v - u)
    h1 = np.eye(d) - 2.0 * np.outer(w, w)
    # any unit vector orthogonal to v
    basis = np.eye(d)
    idx = int(np.argmin(np.abs(v)))
    w2 = basis[idx] - (basis[idx] @ v) * v
    w2 /= np.linalg.norm(w2)
    h2 = np.eye(d) - 2.0 * np.outer(w2, w2)
    return h2 @ h1


def sample_element(group: GroupDescriptor, rng: np.random.Generator) -> np.ndarray:
    """Random group element as a coordinate matrix."""
    if isinstance(group, FiniteMatrixGroup):
        return group.matrices[rng.integers(group.order)]
    if isinstance(group, PermutationGroup):
        return permutation_coordinate_matrix(rng.permutation(group.n), group.n)
    if isinstance(group, RotationGroup):
        return haar_rotation(group.d, rng)
    if isinstance(group, UnitaryGroup):
        u = quantum.random_unitary(group.n, rng)
        return quantum.unitary_coordinate_matrix(u, group.n)
    raise UnsupportedRepresentationError(f"unknown group descriptor {group!r}")


def apply(transform: np.ndarray, omega: np.ndarray, space: StateSpace | None = None,
          tol: float | None = None) -> np.ndarray:
    """Matrix action of a reversible transformation on a state."""
    out = np.asarray(transform, dtype=float) @ np.asarray(omega, dtype=float)
    if space is not None and not contains_state(space, out, tol=tol):
        raise ValidationError("transform maps the state outside the space; group descriptor invalid")
    return out


def validate_group(space: StateSpace, rng: np.random.Generator, n_states: int = 100,
                   n_elements: int = 20, tol: float | None = None) -> None:
    """Sample-check that every element maps the state set onto itself.

    Finite groups are additionally checked for closure under product and
    inverse (table check).
    """
    tol = resolve_tol(tol)
    group = space.group
    if group is None:
        raise DomainError(f"{space.name} has no group descriptor")
    if isinstance(group, FiniteMatrixGroup):
        elements = list(group.matrices)
        keys = {_round_key(m) for m in group.matrices}
        for a in group.matrices:
            if np.abs(np.linalg.det(a)) < 1e-12:
                raise ValidationError("singular group element")
            if _round_key(np.linalg.inv(a)) not in keys:
                raise ValidationError("group not closed under inverse")
            for b in group.matrices:
                if _round_key(a @ b) not in keys:
                    raise ValidationError("group not closed under product")
    else:
        elements = [sample_element(group, rng) for _ in range(n_elements)]
    states = [sample_state(space, rng) for _ in range(n_states)]
    for mat in elements:
        for s in states:
            if not contains_state(space, mat @ s, tol=max(tol, 1e-7)):
                raise ValidationError(f"{space.name}: group element leaves the state set")


# ---------------------------------------------------------------------------
# Transitivity and continuity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransitivityResult:
    transitive: bool
    witnesses: tuple = ()       # (source, target, matrix) triples
    stranded: np.ndarray | None = None


def _vertex_orbits(space: StateSpace, matrices: list[np.ndarray], tol: float):
    verts = vertices_of(space)
    nv = verts.shape[0]

    def vertex_index(x: np.ndarray) -> int:
        dists = np.max(np.abs(verts - x), axis=1)
        j = int(np.argmin(dists))
        if dists[j] > 100 * tol:
            raise ValidationError("group element maps a vertex off the vertex set")
        return j

    # BFS from vertex 0, recording a transporter matrix per reached vertex
    transporter: dict[int, np.ndarray] = {0: np.eye(space.ambient_dim)}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for mat in matrices:
                j = vertex_index(mat @ verts[i])
                if j not in transporter:
                    transporter[j] = mat @ transporter[i]
                    nxt.append(j)
        frontier = nxt
    return transporter, nv


def _group_matrices(group: GroupDescriptor) -> list[np.ndarray]:
    if isinstance(group, FiniteMatrixGroup):
        return list(group.matrices)
    if isinstance(group, PermutationGroup):
        n = group.n
        gens = []
        for k in range(1, n):
            perm = np.arange(n)
            perm[0], perm[k] = perm[k], perm[0]
            gens.append(permutation_coordinate_matrix(perm, n))
        return gens
    raise UnsupportedRepresentationError("finite element list requested for a parametric group")


def transitivity_check(space: StateSpace, rng: np.random.Generator | None = None,
                       n_samples: int = 10, tol: float | None = None) -> TransitivityResult:
    """Does the group act transitively on the pure states?

    Finite groups: orbit computation on the extreme points.  Parametric
    groups: constructive transformation between sampled boundary points.
    """
    tol = resolve_tol(tol)
    group = space.group
    if group is None:
        raise DomainError(f"{space.name} has no group descriptor")
    rng = rng if rng is not None else np.random.default_rng(0)

    if isinstance(group, (FiniteMatrixGroup, PermutationGroup)):
        transporter, nv = _vertex_orbits(space, _group_matrices(group), tol)
        verts = vertices_of(space)
        if len(transporter) < nv:
            stranded = verts[min(set(range(nv)) - set(transporter))]
            return TransitivityResult(False, stranded=stranded)
        witnesses = tuple(
            (verts[0], verts[j], transporter[j]) for j in sorted(transporter)
        )
        return TransitivityResult(True, witnesses=witnesses)

    if isinstance(group, RotationGroup):
        d = group.d
        witnesses = []
        for _ in range(n_samples):
            a = sample_pure_state(space, rng)
            b = sample_pure_state(space, rng)
            rot = np.eye(d + 1)
            rot[1:, 1:] = rotation_between(a[1:], b[1:])
            if np.max(np.abs(rot @ a - b)) > 1e-7:
                return TransitivityResult(False, stranded=a)
            witnesses.append((a, b, rot))
        return TransitivityResult(True, witnesses=tuple(witnesses))

    if isinstance(group, UnitaryGroup):
        n = group.n
        witnesses = []
        for _ in range(n_samples):
            psi = rng.normal(size=n) + 1j * rng.normal(size=n)
            psi /= np.linalg.norm(psi)
            phi = rng.normal(size=n) + 1j * rng.normal(size=n)
            phi /= np.linalg.norm(phi)
            u = quantum.basis_transport_unitary(psi, phi)
            mat = quantum.unitary_coordinate_matrix(u, n)
            a = quantum.state_coords(np.outer(psi, psi.conj()), n)
            b = quantum.state_coords(np.outer(phi, phi.conj()), n)
            if np.max(np.abs(mat @ a - b)) > 1e-7:
                return TransitivityResult(False, stranded=a)
            witnesses.append((a, b, mat))
        return TransitivityResult(True, witnesses=tuple(witnesses))

    raise UnsupportedRepresentationError(f"unknown group descriptor {group!r}")


def continuity_check(space: StateSpace, rng: np.random.Generator | None = None,
                     tol: float | None = None) -> bool:
    """True iff transitivity is achieved inside a connected parametric family.

    Finite groups and permutation groups are discrete, hence False.  Rotation
    witnesses are checked to have determinant +1 (path to the identity).
    """
    group = space.group
    if group is None:
        raise DomainError(f"{space.name} has no group descriptor")
    if isinstance(group, (FiniteMatrixGroup, PermutationGroup)):
        return False
    result = transitivity_check(space, rng=rng, tol=tol)
    if not result.transitive:
        return False
    if isinstance(group, RotationGroup):
        return all(abs(np.linalg.det(m) - 1.0) < 1e-7 for _, _, m in result.witnesses)
    return True  # unitary conjugations: U(n) is connected


# ---------------------------------------------------------------------------
# Maximally mixed state
# ---------------------------------------------------------------------------

def orbit_states(space: StateSpace, start: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Orbit of a state under a finite group descriptor (BFS, deduplicated)."""
    tol = resolve_tol(tol)
    group = space.group
    matrices = _group_matrices(group)
    seen: dict[bytes, np.ndarray] = {}
    frontier = [np.asarray(start, dtype=float)]
    seen[_round_key(frontier[0])] = frontier[0]
    while frontier:
        nxt = []
        for s in frontier:
            for mat in matrices:
                t = mat @ s
                k = _round_key(t)
                if k not in seen:
                    seen[k] = t
                    nxt.append(t)
        frontier = nxt
    return np.array(list(seen.values()))


def maximally_mixed(space: StateSpace, tol: float | None = None) -> np.ndarray:
    """The group-invariant state: exact orbit average for finite groups,
    closed form (center / uniform / identity-over-N) for parametric ones."""
    rep = space.rep
    if isinstance(rep, BallRep):
        return unit_effect_vector(space.ambient_dim)
    if isinstance(rep, QuantumRep):
        return unit_effect_vector(space.ambient_dim)
    if isinstance(rep, SimplexRep):
        mu = np.full(rep.n, 1.0 / rep.n)
        mu[0] = 1.0
        return mu
    if space.group is None:
        raise DomainError(f"{space.name} has no group descriptor")
    orbit = orbit_states(space, vertices_of(space)[0], tol=tol)
    return orbit.mean(axis=0)


# ---------------------------------------------------------------------------
# Strict convexity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StrictConvexityResult:
    strictly_convex: bool
    witness: tuple | None = None  # (endpoint, endpoint, boundary midpoint)

    def __bool__(self) -> bool:
        return self.strictly_convex


def strict_convexity_check(space: StateSpace, tol: float | None = None) -> StrictConvexityResult:
    """No line segments in the boundary of the state set.

    Polytopes of affine dimension >= 2 fail with an edge-midpoint witness;
    segments and balls pass; quantum passes only for N <= 2 (for N >= 3,
    a rank-deficient mixed state sits on the boundary).
    """
    tol = resolve_tol(tol)
    rep = space.rep
    if isinstance(rep, BallRep):
        return StrictConvexityResult(True)
    if isinstance(rep, QuantumRep):
        if rep.n <= 2:
            return StrictConvexityResult(True)
        diag = np.zeros((rep.n, rep.n), dtype=complex)
        diag[0, 0] = diag[1, 1] = 0.5
        a = np.zeros((rep.n, rep.n), dtype=complex)
        a[0, 0] = 1.0
        b = np.zeros((rep.n, rep.n), dtype=complex)
        b[1, 1] = 1.0
        witness = tuple(quantum.state_coords(m, rep.n) for m in (a, b, diag))
        return StrictConvexityResult(False, witness=witness)
    verts = vertices_of(space)
    if affine_dimension(verts, tol) <= 1:
        return StrictConvexityResult(True)
    # affine dimension >= 2: some exposing hyperplane contains two vertices
    from gptlab.geometry import dual_cone_rays

    rays = dual_cone_rays(verts, tol=tol)
    for f in rays:
        values = verts @ f
        flat = np.nonzero(np.abs(values) <= tol)[0]
        if flat.size >= 2:
            i, j = int(flat[0]), int(flat[1])
            mid = 0.5 * (verts[i] + verts[j])
            return StrictConvexityResult(False, witness=(verts[i], verts[j], mid))
    return StrictConvexityResult(True)


# ---------------------------------------------------------------------------
# Faces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    """The set of states where a given effect attains value 1."""

    parent: StateSpace
    effect: np.ndarray
    kind: str                       # "vertices" | "point" | "quantum" | "all"
    vertices: np.ndarray | None = None
    point: np.ndarray | None = None
    projector: np.ndarray | None = None

    @property
    def quantum_rank(self) -> int | None:
        if self.projector is None:
            return None
        return int(round(np.trace(self.projector).real))


def face_extract(space: StateSpace, effect: np.ndarray, tol: float | None = None) -> Face:
    """Extract {omega : effect(omega) = 1}; the effect must attain 1 on the space."""
    tol = resolve_tol(tol)
    effect = np.asarray(effect, dtype=float)
    lo, hi = effect_range(space, effect)
    if hi < 1.0 - tol:
        raise NoFaceError(f"effect attains at most {hi:.6f} < 1")
    rep = space.rep
    if isinstance(rep, BallRep):
        fhat = effect[1:]
        radius = np.linalg.norm(fhat)
        if radius <= tol:
            return Face(space, effect, kind="all")
        point = np.concatenate([[1.0], fhat / radius])
        return Face(space, effect, kind="point", point=point)
    if isinstance(rep, QuantumRep):
        mat = quantum.effect_matrix(effect, rep.n)
        eigvals, eigvecs = np.linalg.eigh(mat)
        ones = np.abs(eigvals - 1.0) <= 100 * tol
        basis = eigvecs[:, ones]
        projector = basis @ basis.conj().T
        if int(ones.sum()) == rep.n:
            return Face(space, effect, kind="all", projector=projector)
        return Face(space, effect, kind="quantum", projector=projector)
    verts = vertices_of(space)
    values = verts @ effect
    members = verts[values >= 1.0 - tol]
    if members.shape[0] == verts.shape[0]:
        return Face(space, effect, kind="all", vertices=members)
    return Face(space, effect, kind="vertices", vertices=members)


# ---------------------------------------------------------------------------
# Equivalence probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    consistent: bool
    mismatch: str | None = None
    details: dict | None = None

    def __bool__(self) -> bool:
        return self.consistent


def space_invariants(obj: StateSpace | Face) -> dict:
    """Affine invariants used by the equivalence probe.

    Values may be None when not finitely computable for the representation.
    """
    from gptlab.discrimination import capacity

    if isinstance(obj, Face):
        if obj.kind == "all":
            return space_invariants(obj.parent)
        if obj.kind == "point":
            return {"affine_dim": 0, "capacity": 1, "strictly_convex": True, "n_extreme": 1}
        if obj.kind == "quantum":
            m = obj.quantum_rank
            return {
                "affine_dim": m * m - 1,
                "capacity": m,
                "strictly_convex": m <= 2,
                "n_extreme": 1 if m == 1 else None,
            }
        sub = StateSpace(name="face", rep=PolytopeRep(obj.vertices))
        cap = capacity(sub)
        return {
            "affine_dim": affine_dimension(obj.vertices),
            "capacity": cap.n,
            "strictly_convex": bool(strict_convexity_check(sub)),
            "n_extreme": obj.vertices.shape[0],
        }
    cap = capacity(obj)
    inv = {
        "affine_dim": affine_dim_of(obj),
        "capacity": cap.n,
        "strictly_convex": bool(strict_convexity_check(obj)),
        "n_extreme": None,
    }
    if isinstance(obj.rep, (PolytopeRep, SimplexRep)):
        inv["n_extreme"] = vertices_of(obj).shape[0]
    return inv


def equivalence_probe(obj1: StateSpace | Face, obj2: StateSpace | Face) -> ProbeResult:
    """Necessary-condition comparison of affine invariants.

    Consistency is reported as such: it never certifies equivalence, but any
    mismatch is a certified inequivalence witness.
    """
    inv1 = space_invariants(obj1)
    inv2 = space_invariants(obj2)
    for key in ("affine_dim", "capacity", "strictly_convex", "n_extreme"):
        a, b = inv1.get(key), inv2.get(key)
        if a is None or b is None:
            continue
        if a != b:
            return ProbeResult(False, mismatch=key, details={"left": inv1, "right": inv2})
    return ProbeResult(True, details={"left": inv1, "right": inv2})


# ---------------------------------------------------------------------------
# Bit-dimension admissibility
# ---------------------------------------------------------------------------

G2_EXCEPTION_DIMENSION = 7


def two_bit_face_dimension_test(d: int) -> bool:
    """Can two d-dimensional ball bits combine into a joint system?

    The bit-pair face spans d+1 dimensions, but for d >= 4 the irreducible
    local rotation action forces an orbit of dimension (d-1)^2 > d+1, a
    contradiction.  d in {1, 2, 3} survives.  The d = 7 exceptional-group
    branch is flagged separately (see ``is_g2_exception``), not computed.
    """
    if d < 1:
        raise DomainError("dimension must be >= 1")
    return not (d > 3 and (d - 1) ** 2 > d + 1)


def is_g2_exception(d: int) -> bool:
    """The d = 7 case admits an exceptional transitive group; flagged, not computed."""
    return d == G2_EXCEPTION_DIMENSION


# ---------------------------------------------------------------------------
# Distinguishable decompositions of the maximally mixed state
# ---------------------------------------------------------------------------

def maximally_mixed_decomposition(space: StateSpace):
    """N perfectly distinguishable pure states averaging to the maximally mixed state.

    Closed form for simplices (all vertices), balls (antipodal poles) and
    quantum systems (an orthonormal basis); for polytopes, searched among
    capacity witnesses.  Returns a DistinguishabilityWitness.
    """
    from gptlab.discrimination import capacity, distinguishable

    rep = space.rep
    if isinstance(rep, (SimplexRep, BallRep, QuantumRep)):
        return capacity(space).witness
    cap = capacity(space)
    mu = maximally_mixed(space)
    verts = vertices_of(space)
    tol = resolve_tol(None)
    for subset in combinations(range(verts.shape[0]), cap.n):
        states = verts[list(subset)]
        if np.max(np.abs(states.mean(axis=0) - mu)) > tol:
            continue
        witness = distinguishable(space, states)
        if witness is not None:
            return witness
    return None
