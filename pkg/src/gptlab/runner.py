"""Theory definitions, postulate checking and structured reports.

A theory is a state space plus a group and a set of allowed effects, loaded
from a small JSON schema.  ``check_postulates`` runs the five postulate
probes (plus the continuity variant) against a composite partner and emits a
deterministic, serializable report; every Fail carries a witness that can be
replayed through the originating operation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from gptlab.config import resolve_tol
from gptlab.errors import (
    BudgetExceededError,
    UnsupportedRepresentationError,
    ValidationError,
)
from gptlab.convex import (
    BallRep,
    Measurement,
    PolytopeRep,
    QuantumRep,
    SimplexRep,
    StateSpace,
    contains_effect,
    effect_range,
    extremal_effects,
    sample_pure_state,
    unit_effect_vector,
    validate_space,
    vertices_of,
)
from gptlab.composites import MIN_TENSOR, chsh_value, compose, local_tomography_check
from gptlab.discrimination import (
    admissible_bit_dimensions,
    capacity,
    complete_measurement,
    fit_capacity_exponent,
)
from gptlab.lp import LinearProgram, lp_feasible
from gptlab.models import (
    classical,
    gbit_ball,
    quantum,
    qubit_measurement,
    square_gbit,
    square_measurements,
)
from gptlab.symmetry import (
    FiniteMatrixGroup,
    continuity_check,
    equivalence_probe,
    face_extract,
    is_g2_exception,
    strict_convexity_check,
    transitivity_check,
    two_bit_face_dimension_test,
)
from gptlab import quantum as qc

PASS = "pass"
FAIL = "fail"
PROBES_PASS = "probes_pass"
INDETERMINATE = "indeterminate"

POSTULATE_KEYS = ("P1", "P2", "P3", "P3C", "P4", "P4prime")

SYMMETRY_SEARCH_VERTEX_BUDGET = 16


# ---------------------------------------------------------------------------
# Theory definitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoryDefinition:
    """Parsed theory: space family/parameters, group spec, allowed effects."""

    name: str
    space_spec: dict
    group_spec: dict = field(default_factory=lambda: {"kind": "auto"})
    allowed_effects: object = "all"  # "all" or an array of functionals

    def build(self) -> StateSpace:
        return build_space(self)


def polytope_symmetry_group(vertices: np.ndarray, tol: float | None = None,
                            vertex_budget: int = SYMMETRY_SEARCH_VERTEX_BUDGET,
                            node_budget: int = 200_000) -> FiniteMatrixGroup:
    """Vertex permutations extendable to linear maps.

    Backtracking over vertex images, pruned by the pairwise-distance
    structure; each complete permutation is accepted only if it extends to a
    linear map on the ambient space (solve, then check the residual).
    """
    tol = resolve_tol(tol)
    verts = np.atleast_2d(np.asarray(vertices, dtype=float))
    nv = verts.shape[0]
    if nv > vertex_budget:
        raise BudgetExceededError(f"{nv} vertices exceed symmetry budget {vertex_budget}")
    # distance comparisons at the run tolerance: coarser tol admits symmetry
    # groups of approximately symmetric vertex data
    digits = max(1, int(np.floor(-np.log10(100.0 * tol))))
    dist = np.round(np.linalg.norm(verts[:, None, :] - verts[None, :, :], axis=2), digits)
    signature = [tuple(sorted(dist[i])) for i in range(nv)]
    pinv = np.linalg.pinv(verts.T)

    found: list[np.ndarray] = []
    assignment = np.full(nv, -1, dtype=int)
    used = np.zeros(nv, dtype=bool)
    nodes = 0

    def extend(i: int) -> None:
        nonlocal nodes
        if i == nv:
            M = verts[assignment].T @ pinv
            if np.max(np.abs(M @ verts.T - verts[assignment].T)) <= 100 * tol:
                found.append(M)
            return
        for j in range(nv):
            if used[j] or signature[i] != signature[j]:
                continue
            if any(dist[i, k] != dist[j, assignment[k]] for k in range(i)):
                continue
            nodes += 1
            if nodes > node_budget:
                raise BudgetExceededError(
                    f"symmetry search exceeded {node_budget} nodes"
                )
            used[j] = True
            assignment[i] = j
            extend(i + 1)
            used[j] = False
            assignment[i] = -1

    extend(0)
    return FiniteMatrixGroup(np.array(found))


def build_space(td: TheoryDefinition) -> StateSpace:
    """Construct and validate the state space described by a definition."""
    spec = td.space_spec
    family = spec.get("family")
    kind = td.group_spec.get("kind", "auto")
    if kind not in ("auto", "finite"):
        raise ValidationError(f"unknown group kind {kind!r}")
    if family == "classical":
        space = classical(int(spec["N"]))
    elif family == "ball":
        space = gbit_ball(int(spec["d"]))
    elif family == "square":
        space = square_gbit()
    elif family == "quantum":
        space = quantum(int(spec["N"]))
    elif family == "polytope":
        verts = np.asarray(spec["vertices"], dtype=float)
        if kind == "finite":
            group = FiniteMatrixGroup(np.asarray(td.group_spec["matrices"], dtype=float))
        else:
            group = polytope_symmetry_group(verts)
        space = StateSpace(name=td.name, rep=PolytopeRep(verts), group=group)
        validate_space(space)
    else:
        raise ValidationError(f"unknown space family {family!r}")
    if family != "polytope" and kind == "finite":
        # explicit matrices replace the family's canonical group
        group = FiniteMatrixGroup(np.asarray(td.group_spec["matrices"], dtype=float))
        space = StateSpace(name=space.name, rep=space.rep, group=group)
    if not _all_effects_allowed(td.allowed_effects):
        allowed = np.atleast_2d(np.asarray(td.allowed_effects, dtype=float))
        for f in allowed:
            if not contains_effect(space, f):
                raise ValidationError("allowed effect outside [0, 1] on the state space")
    return space


def _all_effects_allowed(allowed) -> bool:
    return isinstance(allowed, str) and allowed == "all"


def theory_from_dict(data: dict) -> TheoryDefinition:
    if not isinstance(data, dict) or "space" not in data:
        raise ValidationError("theory JSON must contain a 'space' object")
    allowed = data.get("allowed_effects", "all")
    if allowed != "all":
        allowed = np.asarray(allowed, dtype=float)
    return TheoryDefinition(
        name=str(data.get("name", "unnamed")),
        space_spec=dict(data["space"]),
        group_spec=dict(data.get("group", {"kind": "auto"})),
        allowed_effects=allowed,
    )


def load_theory(path: str) -> TheoryDefinition:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {path}: {exc}") from exc
    return theory_from_dict(data)


# ---------------------------------------------------------------------------
# Deterministic JSON writer (17 significant digits, sorted keys)
# ---------------------------------------------------------------------------

def dump_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if value != value or value in (float("inf"), float("-inf")):
            raise ValidationError("non-finite float in report")
        return format(value, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dump_json(obj.tolist(), indent)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = ",\n".join("  " * (indent + 1) + dump_json(v, indent + 1) for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj):
            items.append(
                "  " * (indent + 1) + json.dumps(str(key)) + ": " + dump_json(obj[key], indent + 1)
            )
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise ValidationError(f"cannot serialize {type(obj)!r}")


# ---------------------------------------------------------------------------
# Postulate report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PostulateReport:
    theory: str
    partner: str | None
    rule: str
    seed: int
    tolerance: float
    metrics: dict
    postulates: dict

    def to_dict(self) -> dict:
        return {
            "theory": self.theory,
            "partner": self.partner,
            "rule": self.rule,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "metrics": self.metrics,
            "postulates": self.postulates,
        }

    @staticmethod
    def from_dict(data: dict) -> "PostulateReport":
        return PostulateReport(
            theory=data["theory"],
            partner=data["partner"],
            rule=data["rule"],
            seed=int(data["seed"]),
            tolerance=float(data["tolerance"]),
            metrics=dict(data["metrics"]),
            postulates={k: dict(v) for k, v in data["postulates"].items()},
        )

    @property
    def any_budget_exhausted(self) -> bool:
        return any(
            entry.get("status") == INDETERMINATE for entry in self.postulates.values()
        )


def report_render(report: PostulateReport, format: str = "json") -> str:
    """Deterministic serialization; the JSON form round-trips exactly."""
    if format == "json":
        return dump_json(report.to_dict()) + "\n"
    if format == "md":
        lines = [
            f"# Postulate report: {report.theory}",
            "",
            f"- partner: {report.partner or report.theory}",
            f"- composite rule: {report.rule}",
            f"- seed: {report.seed}, tolerance: {report.tolerance:g}",
            "",
            "| postulate | status | detail |",
            "|---|---|---|",
        ]
        for key in POSTULATE_KEYS:
            entry = report.postulates[key]
            detail = entry.get("reason") or ("witness attached" if entry.get("witness") else "")
            lines.append(f"| {key} | {entry['status']} | {detail} |")
        lines.append("")
        lines.append("## Metrics")
        lines.append("")
        for key in sorted(report.metrics):
            lines.append(f"- {key}: {report.metrics[key]}")
        lines.append("")
        return "\n".join(lines)
    raise ValidationError(f"unknown report format {format!r}")


def report_parse(text: str) -> PostulateReport:
    return PostulateReport.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Individual postulate probes
# ---------------------------------------------------------------------------

def _status(status: str, witness=None, reason: str | None = None) -> dict:
    entry: dict = {"status": status}
    if witness is not None:
        entry["witness"] = witness
    if reason is not None:
        entry["reason"] = reason
    return entry


def _check_p1(space: StateSpace, partner: StateSpace, rule: str,
              rng: np.random.Generator, tol: float) -> dict:
    try:
        comp = compose(space, partner, rule, tol=tol)
    except UnsupportedRepresentationError as exc:
        return _status(INDETERMINATE, reason=f"composite construction: {exc}")
    ok = local_tomography_check(comp, rng=rng, tol=tol)
    if ok:
        return _status(PASS)
    return _status(FAIL, witness={"expected_dim": comp.ambient_dim - 1})


def _smaller_reference(space: StateSpace, n: int) -> StateSpace | None:
    if isinstance(space.rep, SimplexRep):
        return classical(n)
    if isinstance(space.rep, QuantumRep):
        return quantum(n)
    return None


def _face_size(space: StateSpace, face) -> int | None:
    """Number of extreme points of a face, when finite."""
    if face.kind == "point":
        return 1
    if face.kind == "vertices":
        return int(face.vertices.shape[0])
    if face.kind == "quantum":
        return 1 if face.quantum_rank == 1 else None
    return None


def _check_p2(space: StateSpace, rng: np.random.Generator, tol: float) -> dict:
    cap = capacity(space, tol=tol)
    if cap.indeterminate:
        return _status(INDETERMINATE, reason="capacity search budget exhausted")
    n = cap.n
    if n == 1:
        return _status(PROBES_PASS, reason="trivial state space")

    if n == 2:
        # Every two-outcome measurement attaining {0, 1} is complete, so each
        # exposed face must contain a single state.
        if isinstance(space.rep, (PolytopeRep, SimplexRep)):
            for f in extremal_effects(space, tol=tol):
                lo, hi = effect_range(space, f)
                if lo > tol or hi < 1.0 - tol:
                    continue
                face = face_extract(space, f, tol=tol)
                size = _face_size(space, face)
                if size is not None and size > 1:
                    return _status(
                        FAIL,
                        witness={
                            "effect": f.tolist(),
                            "face_extreme_points": int(size),
                            "required": 1,
                        },
                        reason="a complete-measurement face has more than one state",
                    )
            return _status(PROBES_PASS)
        # ball / quantum(2): strict convexity plus sampled exposing effects
        if not strict_convexity_check(space, tol=tol):
            return _status(FAIL, reason="boundary segment in a capacity-2 space")
        for _ in range(10):
            pure = sample_pure_state(space, rng)
            if isinstance(space.rep, BallRep):
                f = np.concatenate([[0.5], 0.5 * pure[1:]])
            else:
                rho = qc.state_matrix(pure, space.rep.n)
                f = qc.effect_coords(rho, space.rep.n)
            face = face_extract(space, f, tol=tol)
            if _face_size(space, face) != 1:
                return _status(FAIL, witness={"effect": f.tolist()})
        return _status(PROBES_PASS)

    reference = _smaller_reference(space, n - 1)
    if reference is None:
        return _status(INDETERMINATE, reason="no reference state space of capacity N-1")
    witness = complete_measurement(space, tol=tol)
    unit = unit_effect_vector(space.ambient_dim)
    for effect in witness.measurement.effects:
        face = face_extract(space, unit - effect, tol=tol)
        probe = equivalence_probe(face, reference)
        if not probe:
            return _status(
                FAIL,
                witness={"effect": (unit - effect).tolist(), "mismatch": probe.mismatch},
            )
    return _status(PROBES_PASS)


def _check_p3(space: StateSpace, rng: np.random.Generator, tol: float) -> dict:
    result = transitivity_check(space, rng=rng, tol=tol)
    if result.transitive:
        return _status(PASS)
    return _status(FAIL, witness={"stranded_state": result.stranded.tolist()})


def _check_p3c(space: StateSpace, rng: np.random.Generator, tol: float) -> dict:
    if continuity_check(space, rng=rng, tol=tol):
        return _status(PASS)
    kind = type(space.group).__name__
    return _status(FAIL, witness={"group_kind": kind},
                   reason="no continuous family achieves the required transitions")


def _effect_in_hull(allowed: np.ndarray, f: np.ndarray, tol: float) -> bool:
    n = allowed.shape[0]
    prog = LinearProgram(
        objective=np.zeros(n),
        a_eq=np.vstack([allowed.T, np.ones((1, n))]),
        b_eq=np.concatenate([f, [1.0]]),
        bounds=np.column_stack([np.zeros(n), np.full(n, np.inf)]),
    )
    ok, _ = lp_feasible(prog, tol=tol)
    return ok


def _check_p4(space: StateSpace, allowed_effects, tol: float) -> dict:
    if _all_effects_allowed(allowed_effects):
        # Definitional for built-in theories: every functional with values in
        # [0, 1] is declared an allowed measurement outcome.
        return _status(PASS)
    allowed = np.atleast_2d(np.asarray(allowed_effects, dtype=float))
    if not isinstance(space.rep, (PolytopeRep, SimplexRep)):
        return _status(
            INDETERMINATE,
            reason="restricted effect list on a continuous space: only listed effects checked",
        )
    for f in extremal_effects(space, tol=tol):
        if not _effect_in_hull(allowed, f, tol):
            return _status(
                FAIL,
                witness={"missing_extremal_effect": f.tolist()},
                reason="extremal functional not reachable from the allowed effects",
            )
    return _status(PASS)


def _polytope_distinguishable_partner(space: StateSpace, omega: np.ndarray,
                                      tol: float) -> bool:
    verts = vertices_of(space)
    nv, k = verts.shape
    for j in range(nv):
        if np.max(np.abs(verts[j] - omega)) <= tol:
            continue
        prog = LinearProgram(
            objective=np.zeros(k),
            a_eq=np.vstack([omega[None, :], verts[j][None, :]]),
            b_eq=np.array([1.0, 0.0]),
            a_ub=np.vstack([-verts, verts]),
            b_ub=np.concatenate([np.zeros(nv), np.ones(nv)]),
        )
        ok, _ = lp_feasible(prog, tol=tol)
        if ok:
            return True
    return False


def _check_p4_prime(space: StateSpace, rng: np.random.Generator, tol: float) -> dict:
    rep = space.rep
    if isinstance(rep, BallRep):
        # boundary states are distinguished from their antipodes
        for _ in range(10):
            pure = sample_pure_state(space, rng)
            e = np.concatenate([[0.5], 0.5 * pure[1:]])
            antipode = np.concatenate([[1.0], -pure[1:]])
            if abs(e @ pure - 1.0) > tol or abs(e @ antipode) > tol:
                return _status(FAIL, witness={"state": pure.tolist()})
        return _status(PASS)
    if isinstance(rep, QuantumRep):
        if rep.n == 1:
            return _status(PASS, reason="no non-interior states")
        for _ in range(10):
            pure = sample_pure_state(space, rng)
            rho = qc.state_matrix(pure, rep.n)
            eigvals, eigvecs = np.linalg.eigh(rho)
            kernel = eigvecs[:, 0]
            partner = qc.state_coords(np.outer(kernel, kernel.conj()), rep.n)
            e = qc.effect_coords(np.eye(rep.n) - np.outer(kernel, kernel.conj()), rep.n)
            if abs(e @ pure - 1.0) > 10 * tol or abs(e @ partner) > 10 * tol:
                return _status(FAIL, witness={"state": pure.tolist()})
        return _status(PASS)
    verts = vertices_of(space)
    if verts.shape[0] == 1:
        return _status(PASS, reason="no non-interior states")
    for omega in verts:
        if not _polytope_distinguishable_partner(space, omega, tol):
            return _status(FAIL, witness={"state": omega.tolist()})
    return _status(PASS)


def _canonical_binary_measurements(space: StateSpace):
    """Two distinguished two-outcome measurements for CHSH metrics, when natural."""
    rep = space.rep
    if isinstance(rep, PolytopeRep) and space.ambient_dim == 3:
        candidates = list(square_measurements())
        for m in candidates:
            if not all(contains_effect(space, e) for e in m.effects):
                return None  # the fiducial readouts are not effects of this polytope
        return candidates
    if isinstance(rep, BallRep) and rep.d >= 2:
        k = space.ambient_dim
        m = []
        for axis in (1, 2):
            e = np.zeros(k)
            e[0] = 0.5
            e[axis] = 0.5
            m.append(Measurement(np.vstack([e, unit_effect_vector(k) - e])))
        return m
    if isinstance(rep, QuantumRep) and rep.n == 2:
        return [qubit_measurement([0, 0, 1]), qubit_measurement([1, 0, 0])]
    if isinstance(rep, SimplexRep) and rep.n >= 2:
        e = np.zeros(space.ambient_dim)
        e[1] = 1.0
        m = Measurement(np.vstack([e, unit_effect_vector(space.ambient_dim) - e]))
        return [m, m]
    return None


def _chsh_metric(space: StateSpace, partner: StateSpace, rule: str, tol: float) -> float | None:
    ma = _canonical_binary_measurements(space)
    mb = _canonical_binary_measurements(partner)
    if ma is None or mb is None:
        return None
    try:
        comp = compose(space, partner, rule, tol=tol)
    except (UnsupportedRepresentationError, BudgetExceededError):
        return None
    if comp.space is None:
        return None
    best = 0.0
    for vertex in vertices_of(comp.space):
        best = max(best, chsh_value(comp, vertex, ma, mb))
    return best


# ---------------------------------------------------------------------------
# Main entry point
# ---------------------------------------------------------------------------

def check_postulates(theory: TheoryDefinition, partner: TheoryDefinition | None = None,
                     rule: str = MIN_TENSOR, seed: int = 0,
                     tol: float | None = None) -> PostulateReport:
    """Run all postulate probes for a theory (composite checks against
    ``partner``, which defaults to the theory itself)."""
    tol = resolve_tol(tol)
    rng = np.random.default_rng(seed)
    space = build_space(theory)
    partner_space = build_space(partner) if partner is not None else space

    postulates: dict[str, dict] = {}

    def run(key: str, fn, *args) -> None:
        try:
            postulates[key] = fn(*args)
        except BudgetExceededError as exc:
            postulates[key] = _status(INDETERMINATE, reason=f"budget exhausted: {exc}")

    run("P1", _check_p1, space, partner_space, rule, rng, tol)
    run("P2", _check_p2, space, rng, tol)
    run("P3", _check_p3, space, rng, tol)
    run("P3C", _check_p3c, space, rng, tol)
    run("P4", _check_p4, space, theory.allowed_effects, tol)
    run("P4prime", _check_p4_prime, space, rng, tol)

    cap = capacity(space, tol=tol)
    k = space.ambient_dim
    metrics: dict = {
        "K": k,
        "N": cap.n,
        "capacity_exact": cap.exact,
        "r": fit_capacity_exponent([(cap.n, k)]) if cap.n is not None else None,
        "strictly_convex": bool(strict_convexity_check(space, tol=tol)),
        "bit_dimension": None,
        "bit_dimension_admissible": None,
        "g2_exception": None,
        "chsh_max": _chsh_metric(space, partner_space, rule, tol),
    }
    if cap.n == 2:
        d = k - 1
        metrics["bit_dimension"] = d
        metrics["bit_dimension_admissible"] = bool(
            d in admissible_bit_dimensions(max(1, d.bit_length()))
            and two_bit_face_dimension_test(d)
        )
        metrics["g2_exception"] = is_g2_exception(d)

    return PostulateReport(
        theory=theory.name,
        partner=partner.name if partner is not None else None,
        rule=rule,
        seed=seed,
        tolerance=tol,
        metrics=metrics,
        postulates=postulates,
    )
