"""gptlab: convex state spaces, effects, composites and postulate checks.

The package implements the machinery of generalized probabilistic theories:
states as real coordinate vectors with a leading normalization coordinate,
effects as linear functionals, state spaces given as polytopes, simplices,
Euclidean balls or quantum level systems, composition under the min/max
tensor rules, and a postulate checker with a JSON/markdown report format.
"""

from gptlab.config import DEFAULT_TOL, get_tol, set_tol
from gptlab.convex import (
    BallRep,
    Measurement,
    PolytopeRep,
    QuantumRep,
    SimplexRep,
    StateSpace,
    contains_effect,
    contains_state,
    evaluate,
    extremal_effects,
    mix,
    sample_pure_state,
    sample_state,
    unit_effect_vector,
    validate_space,
    vertices_of,
)
from gptlab.composites import (
    MAX_TENSOR,
    MIN_TENSOR,
    Composite,
    capacity_multiplicativity_check,
    chsh_value,
    compose,
    conditional_state,
    local_tomography_check,
    maximally_mixed_composite,
    no_signalling_check,
    product_effect,
    product_state,
    reduced_state,
)
from gptlab.discrimination import (
    CapacityResult,
    DistinguishabilityWitness,
    admissible_bit_dimensions,
    capacity,
    complete_measurement,
    distinguishable,
    fit_capacity_exponent,
    verify_witness,
)
from gptlab.lp import LinearProgram, LpSolution, lp_feasible, lp_solve
# NB: the quantum-theory constructor stays at gptlab.models.quantum so that
# the name does not shadow the gptlab.quantum coordinate-helper submodule.
from gptlab.models import (
    bell_state,
    bloch2_isometry_check,
    bloch_map,
    classical,
    gbit_ball,
    pr_box_state,
    psi_u,
    square_gbit,
    square_measurements,
    tsirelson_settings,
)
from gptlab.runner import (
    PostulateReport,
    TheoryDefinition,
    check_postulates,
    load_theory,
    report_parse,
    report_render,
)
from gptlab.symmetry import (
    Face,
    FiniteMatrixGroup,
    PermutationGroup,
    RotationGroup,
    UnitaryGroup,
    apply,
    continuity_check,
    equivalence_probe,
    face_extract,
    is_g2_exception,
    maximally_mixed,
    maximally_mixed_decomposition,
    strict_convexity_check,
    transitivity_check,
    two_bit_face_dimension_test,
)

__version__ = "0.1.0"
