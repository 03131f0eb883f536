"""Tensor composition, marginals, conditioning, no-signalling and CHSH."""

from itertools import product

import numpy as np
import pytest

from gptlab.errors import ZeroProbabilityConditioningError
from gptlab.convex import (
    contains_state,
    extremal_effects,
    sample_state,
    vertices_of,
)
from gptlab.composites import (
    capacity_multiplicativity_check,
    chsh_value,
    compose,
    conditional_state,
    local_tomography_check,
    max_tensor_contains,
    maximally_mixed_composite,
    no_signalling_check,
    product_effect,
    product_state,
    reduced_state,
    sample_composite_state,
)
from gptlab.geometry import affine_dimension
from gptlab.models import (
    bell_state,
    classical,
    gbit_ball,
    pr_box_state,
    quantum,
    square_gbit,
    square_measurements,
    tsirelson_settings,
)
from gptlab.symmetry import maximally_mixed
from gptlab import quantum as qc


@pytest.fixture(scope="module")
def square_pair():
    sq = square_gbit()
    return compose(sq, sq, "max")


def test_product_unit_effect_on_products(rng):
    a, b = classical(2), gbit_ball(3)
    omega = product_state(sample_state(a, rng), sample_state(b, rng))
    unit = product_effect(a.unit_effect, b.unit_effect)
    assert unit @ omega == pytest.approx(1.0, abs=1e-12)


def test_product_effect_factorizes():
    # E1 (x) E1 on north (x) north = 1; X (x) Y on vertex(1,.) (x) vertex(.,0) = 0
    e1 = np.array([0.5, 0.5, 0.0, 0.0])
    north = np.array([1.0, 1.0, 0.0, 0.0])
    assert product_effect(e1, e1) @ product_state(north, north) == pytest.approx(1.0, abs=1e-15)
    x_eff = np.array([0.0, 1.0, 0.0])
    y_eff = np.array([0.0, 0.0, 1.0])
    va = np.array([1.0, 1.0, 0.0])  # X = 1
    vb = np.array([1.0, 1.0, 0.0])  # Y = 0
    assert product_effect(x_eff, y_eff) @ product_state(va, vb) == pytest.approx(0.0, abs=1e-15)


def test_max_tensor_square_square(square_pair):
    comp = square_pair
    verts = vertices_of(comp.space)
    assert verts.shape == (24, 9)
    assert affine_dimension(verts) == 8
    # 16 deterministic vertices (binary entries) + 8 PR-type vertices
    binary = sum(1 for v in verts if np.all(np.isin(np.round(v, 9), (0.0, 1.0))))
    assert binary == 16


def test_min_tensor_classical_bit_with_three_level():
    comp = compose(classical(2), classical(3), "min")
    assert comp.ambient_dim == 6
    verts = vertices_of(comp.space)
    assert verts.shape == (6, 6)
    assert affine_dimension(verts) == 5
    assert local_tomography_check(comp)


def test_min_tensor_of_classicals_probes_like_classical_product():
    from gptlab.symmetry import equivalence_probe

    comp = compose(classical(2), classical(3), "min")
    probe = equivalence_probe(comp.space, classical(6))
    assert probe.consistent


def test_min_tensor_equals_max_tensor_for_simplices():
    lo = compose(classical(2), classical(2), "min")
    hi = compose(classical(2), classical(2), "max")
    a = {tuple(np.round(v, 9)) for v in vertices_of(lo.space)}
    b = {tuple(np.round(v, 9)) for v in vertices_of(hi.space)}
    assert a == b


def test_min_tensor_contained_in_max_tensor(square_pair):
    sq = square_gbit()
    lo = compose(sq, sq, "min")
    for v in vertices_of(lo.space):
        assert contains_state(square_pair.space, v)


def test_every_product_state_is_contained(square_pair, rng):
    sq = square_gbit()
    for _ in range(25):
        omega = product_state(sample_state(sq, rng), sample_state(sq, rng))
        assert contains_state(square_pair.space, omega)


def test_reduced_state_of_product_is_factor(rng):
    a, b = square_gbit(), classical(3)
    comp = compose(a, b, "min")
    sa, sb = sample_state(a, rng), sample_state(b, rng)
    omega = product_state(sa, sb)
    assert np.allclose(reduced_state(comp, omega, "A"), sa, atol=1e-12)
    assert np.allclose(reduced_state(comp, omega, "B"), sb, atol=1e-12)


def test_reduced_state_of_pr_box_is_center(square_pair):
    pr = pr_box_state()
    assert np.allclose(reduced_state(square_pair, pr, "A"), [1.0, 0.5, 0.5], atol=1e-12)
    assert np.allclose(reduced_state(square_pair, pr, "B"), [1.0, 0.5, 0.5], atol=1e-12)
    # cross-check: uniform outcome marginals 1/2 per fiducial measurement
    mx, my = square_measurements()
    for m in (mx, my):
        lam = product_effect(np.array([1.0, 0, 0]), m.effects[0]) @ pr
        assert lam == pytest.approx(0.5, abs=1e-12)


def test_reduced_bell_state_is_maximally_mixed():
    q2 = quantum(2)
    comp = compose(q2, q2, "min")
    red = reduced_state(comp, bell_state(), "A")
    # oracle: partial trace of the 4x4 density matrix
    rho = qc.composite_state_matrix(bell_state(), 2, 2)
    oracle = qc.state_coords(qc.partial_trace(rho, 2, 2, "A"), 2)
    assert np.allclose(red, oracle, atol=1e-12)
    assert np.allclose(qc.state_matrix(red, 2), np.eye(2) / 2, atol=1e-12)


def test_conditional_state_of_product_is_independent(rng):
    a, b = square_gbit(), square_gbit()
    comp = compose(a, b, "min")
    sa, sb = sample_state(a, rng), sample_state(b, rng)
    omega = product_state(sa, sb)
    mx, _ = square_measurements()
    cond = conditional_state(comp, omega, mx.effects[0], side="B")
    assert np.allclose(cond, sa, atol=1e-11)


def test_conditional_pr_box_collapses_to_vertex(square_pair):
    pr = pr_box_state()
    mx, _ = square_measurements()
    # outcome 0 of the X measurement on B leaves the (0,0) vertex on A
    cond = conditional_state(square_pair, pr, mx.effects[1], side="B")
    assert np.allclose(cond, [1.0, 0.0, 0.0], atol=1e-12)
    # outcome 1 leaves the (1,1) vertex: perfect correlation
    cond = conditional_state(square_pair, pr, mx.effects[0], side="B")
    assert np.allclose(cond, [1.0, 1.0, 1.0], atol=1e-12)


def test_conditional_bell_state_on_projector():
    q2 = quantum(2)
    comp = compose(q2, q2, "min")
    proj = qc.effect_coords(np.diag([1.0, 0.0]).astype(complex), 2)
    cond = conditional_state(comp, bell_state(), proj, side="B")
    # oracle: conditional density matrix (P rho P / Tr) partial-traced
    rho = qc.composite_state_matrix(bell_state(), 2, 2)
    pb = np.kron(np.eye(2), np.diag([1.0, 0.0]))
    sub = pb @ rho @ pb
    sub = sub / np.trace(sub).real
    oracle = qc.state_coords(qc.partial_trace(sub, 2, 2, "A"), 2)
    assert np.allclose(cond, oracle, atol=1e-12)
    assert np.allclose(qc.state_matrix(cond, 2), np.diag([1.0, 0.0]), atol=1e-12)


def test_conditional_on_side_a(square_pair):
    # conditioning on an A effect leaves a B state; PR correlations are symmetric
    pr = pr_box_state()
    mx, _ = square_measurements()
    cond = conditional_state(square_pair, pr, mx.effects[0], side="A")
    assert np.allclose(cond, [1.0, 1.0, 1.0], atol=1e-12)


def test_max_tensor_membership_quantum_parts(rng):
    q2 = quantum(2)
    comp = compose(q2, q2, "max")
    assert comp.space is None
    for _ in range(5):
        from gptlab.convex import sample_state

        omega = product_state(sample_state(q2, rng), sample_state(q2, rng))
        assert max_tensor_contains(comp, omega, rng=rng)
    # the maximally entangled state is inside the max tensor of two qubits
    assert max_tensor_contains(comp, bell_state(), rng=rng)
    # an overstretched entangled vector violates some product effect
    mu = product_state(
        np.array([1.0, 0, 0, 0]), np.array([1.0, 0, 0, 0])
    )
    stretched = mu + 3.0 * (bell_state() - mu)
    assert not max_tensor_contains(comp, stretched, rng=rng)


def test_conditional_zero_probability_raises(square_pair):
    pr = pr_box_state()
    zero_effect = np.zeros(3)
    with pytest.raises(ZeroProbabilityConditioningError):
        conditional_state(square_pair, pr, zero_effect, side="B")


def test_no_signalling_for_composite_states(square_pair, rng):
    mx, my = square_measurements()
    for _ in range(50):
        omega = sample_composite_state(square_pair, rng)
        assert no_signalling_check(square_pair, omega, [mx, my])
    assert no_signalling_check(square_pair, pr_box_state(), [mx, my])


def test_no_signalling_detects_tampering(square_pair):
    mx, my = square_measurements()
    tampered = pr_box_state()
    # a huge joint coordinate: the per-measurement reconstructions of the
    # A-marginal no longer cancel, exposing the tampering
    tampered[4] += 1e16
    assert not no_signalling_check(square_pair, tampered, [mx, my])


def test_chsh_pr_box_is_four(square_pair):
    mx, my = square_measurements()
    assert chsh_value(square_pair, pr_box_state(), (mx, my), (mx, my)) == pytest.approx(4.0, abs=1e-12)


def test_chsh_deterministic_maximum_is_two(square_pair):
    # brute force over all 16 deterministic product strategies
    mx, my = square_measurements()
    sq = square_gbit()
    verts = vertices_of(sq)
    best = 0.0
    for va, vb in product(verts, verts):
        value = chsh_value(square_pair, product_state(va, vb), (mx, my), (mx, my))
        best = max(best, value)
    assert best == pytest.approx(2.0, abs=1e-12)


def test_chsh_bell_tsirelson():
    q2 = quantum(2)
    comp = compose(q2, q2, "min")
    (a0, a1), (b0, b1) = tsirelson_settings()
    value = chsh_value(comp, bell_state(), (a0, a1), (b0, b1))
    # oracle: direct quantum expectation values on the 4x4 density matrix
    rho = qc.composite_state_matrix(bell_state(), 2, 2)
    sx, sz = qc.SIGMA_X, qc.SIGMA_Z
    s = 1 / np.sqrt(2)
    ops = [
        (sz, (sz + sx) * s), (sz, (sz - sx) * s),
        (sx, (sz + sx) * s), (sx, (sz - sx) * s),
    ]
    corr = [np.trace(np.kron(p, q) @ rho).real for p, q in ops]
    oracle = abs(corr[0] + corr[1] + corr[2] - corr[3])
    assert value == pytest.approx(oracle, abs=1e-12)
    assert value == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-9)


def test_local_tomography_sampled_for_quantum_min_tensor(rng):
    q2 = quantum(2)
    comp = compose(q2, q2, "min")
    assert comp.space is None
    assert comp.ambient_dim == 16
    assert local_tomography_check(comp, rng=rng)


def test_maximally_mixed_composite_multiplicative(rng):
    parts = [classical(2), classical(3), square_gbit(), gbit_ball(3), quantum(2)]
    for a in parts:
        for b in parts:
            for rule in ("min", "max"):
                comp = compose(a, b, rule)
                mu = maximally_mixed_composite(comp)
                expected = product_state(maximally_mixed(a), maximally_mixed(b))
                assert np.max(np.abs(mu - expected)) <= 1e-9, (a.name, b.name, rule)


def test_orbit_average_of_pr_vertex_is_product_mixed(square_pair):
    # the composite group average is an honest computation on a non-product vertex
    mu = maximally_mixed_composite(square_pair)
    sq_mu = np.array([1.0, 0.5, 0.5])
    assert np.allclose(mu, product_state(sq_mu, sq_mu), atol=1e-12)


def test_capacity_multiplicativity():
    comp = compose(classical(2), classical(2), "min")
    result = capacity_multiplicativity_check(comp, full_search=True)
    assert result.ok
    assert result.product_bound == 4
    assert result.composite_capacity == 4

    comp = compose(quantum(2), quantum(2), "min")
    result = capacity_multiplicativity_check(comp)
    assert result.ok and result.product_bound == 4


def test_capacity_multiplicativity_max_square(square_pair):
    result = capacity_multiplicativity_check(square_pair)
    assert result.ok
    assert result.product_bound == 4
    # default budget leaves the full capacity unconfirmed, not failed
    limited = capacity_multiplicativity_check(square_pair, full_search=True, lp_budget=50)
    assert limited.ok and not limited.capacity_exact


def test_no_signalling_polytope_capacity_is_multiplicative(square_pair):
    # full subset search over the 24 vertices confirms capacity 2*2
    result = capacity_multiplicativity_check(square_pair, full_search=True, lp_budget=100_000)
    assert result.ok
    assert result.capacity_exact
    assert result.composite_capacity == 4


def test_conditional_states_stay_in_local_space(square_pair, rng):
    # conditional states of max-tensor states lie in the local state space
    sq = square_gbit()
    effects = extremal_effects(sq)
    for _ in range(100):
        omega = sample_composite_state(square_pair, rng)
        for effect in effects:
            lam = product_effect(np.array([1.0, 0.0, 0.0]), effect) @ omega
            if lam <= 1e-9:
                continue
            cond = conditional_state(square_pair, omega, effect, side="B")
            assert contains_state(sq, cond, tol=1e-7)


def test_marginal_decomposition_identity(square_pair, rng):
    # omega_A = lam * cond(E) + (1 - lam) * cond(1 - E)
    sq = square_gbit()
    mx, _ = square_measurements()
    effect = mx.effects[0]
    complement = mx.effects[1]
    for _ in range(100):
        omega = sample_composite_state(square_pair, rng)
        marg = reduced_state(square_pair, omega, "A")
        lam = product_effect(np.array([1.0, 0.0, 0.0]), effect) @ omega
        if lam <= 1e-9 or lam >= 1 - 1e-9:
            continue
        c1 = conditional_state(square_pair, omega, effect, side="B")
        c2 = conditional_state(square_pair, omega, complement, side="B")
        recombined = lam * c1 + (1.0 - lam) * c2
        assert np.max(np.abs(recombined - marg)) <= 1e-9


def test_max_tensor_membership_for_continuous_parts(rng):
    ball = gbit_ball(3)
    comp = compose(ball, ball, "max")
    assert comp.space is None
    for _ in range(10):
        omega = product_state(sample_state(ball, rng), sample_state(ball, rng))
        assert max_tensor_contains(comp, omega, rng=rng)
    # a vector scaled beyond the state set must be rejected
    bad = product_state(np.array([1.0, 1.4, 0.0, 0.0]), np.array([1.0, 1.0, 0.0, 0.0]))
    assert not max_tensor_contains(comp, bad, rng=rng)
