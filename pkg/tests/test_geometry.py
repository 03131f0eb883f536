"""Double description against brute-force oracles."""

from fractions import Fraction

import numpy as np
import pytest

from gptlab.errors import ValidationError
from gptlab.geometry import (
    affine_dimension,
    brute_force_dual_cone_rays,
    brute_force_polytope_vertices,
    canonicalize_vertices,
    dual_cone_rays,
    dual_cone_rays_exact,
    extremal_effect_vectors,
)

BIT_VERTICES = np.array([[1.0, 0.0], [1.0, 1.0]])
SQUARE_VERTICES = np.array(
    [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0], [1.0, 1.0, 1.0]]
)


def _as_set(arr, digits=9):
    return {tuple(np.round(row, digits)) for row in np.atleast_2d(arr)}


def test_affine_dimension():
    assert affine_dimension(SQUARE_VERTICES) == 2
    assert affine_dimension(BIT_VERTICES) == 1
    assert affine_dimension(np.array([[1.0, 2.0]])) == 0


def test_canonicalize_sorts_and_dedupes():
    verts = np.array([[1.0, 1.0], [1.0, 0.0], [1.0, 1.0 + 1e-12]])
    out = canonicalize_vertices(verts)
    assert out.shape == (2, 2)
    assert np.array_equal(out[0], [1.0, 0.0])


def test_bit_effect_cone_rays():
    rays = dual_cone_rays(BIT_VERTICES)
    assert _as_set(rays) == {(0.0, 1.0), (1.0, -1.0)}


def test_square_effect_cone_rays_match_oracle():
    rays = dual_cone_rays(SQUARE_VERTICES)
    oracle = brute_force_dual_cone_rays(SQUARE_VERTICES)
    assert _as_set(rays, 6) == _as_set(oracle, 6)
    assert _as_set(rays) == {
        (0.0, 1.0, 0.0),
        (0.0, 0.0, 1.0),
        (1.0, -1.0, 0.0),
        (1.0, 0.0, -1.0),
    }


def test_extremal_effects_bit():
    effects = extremal_effect_vectors(BIT_VERTICES)
    assert _as_set(effects) == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, -1.0)}


def test_extremal_effects_square():
    effects = extremal_effect_vectors(SQUARE_VERTICES)
    assert _as_set(effects) == {
        (0.0, 0.0, 0.0),
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
        (1.0, -1.0, 0.0),
        (0.0, 0.0, 1.0),
        (1.0, 0.0, -1.0),
    }


def test_extremal_effects_simplex3_are_all_binary_patterns():
    # oracle: brute force over vertex value patterns in {0,1}^3, then keep
    # extreme points of the (here, bijective) value map
    verts = np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0]])
    expected = set()
    for pattern in np.ndindex(2, 2, 2):
        f = np.linalg.solve(verts, np.array(pattern, dtype=float))
        expected.add(tuple(np.round(f, 9)))
    effects = extremal_effect_vectors(verts)
    assert _as_set(effects) == expected
    assert effects.shape[0] == 8


def test_random_cone_rays_match_bruteforce(rng):
    for _ in range(20):
        k = int(rng.integers(2, 5))
        m = int(rng.integers(k, k + 4))
        gens = rng.normal(size=(m, k))
        # keep the dual cone pointed and nonempty: add the positive orthant rows
        gens = np.vstack([gens, np.eye(k)])
        rays = dual_cone_rays(gens)
        oracle = brute_force_dual_cone_rays(gens)
        assert _as_set(rays, 6) == _as_set(oracle, 6)
        # every ray satisfies the generating inequalities
        assert np.all(gens @ rays.T >= -1e-9)


def test_not_pointed_raises():
    with pytest.raises(ValidationError):
        dual_cone_rays(np.array([[1.0, 0.0]]))  # rank 1 in R^2


def test_no_signalling_polytope_vertex_count_and_oracle():
    square_rays = dual_cone_rays(SQUARE_VERTICES)
    rows = np.array([np.kron(f, g) for f in square_rays for g in square_rays])
    verts = dual_cone_rays(rows)
    verts = verts / verts[:, :1]
    assert verts.shape == (24, 9)
    # independent oracle: basic feasible points of the H-polytope
    oracle = brute_force_polytope_vertices(
        a_ub=-rows,
        b_ub=np.zeros(rows.shape[0]),
        a_eq=np.eye(9)[:1],
        b_eq=np.array([1.0]),
    )
    assert _as_set(verts, 6) == _as_set(oracle, 6)


def test_exact_enumeration_is_bit_exact():
    square_rays = dual_cone_rays(SQUARE_VERTICES)
    rows = np.array([np.kron(f, g) for f in square_rays for g in square_rays]).astype(int)
    rays = dual_cone_rays_exact(rows)
    assert len(rays) == 24
    normalized = {tuple(x / r[0] for x in r) for r in rays}
    values = {v for ray in normalized for v in ray}
    assert values == {Fraction(0), Fraction(1, 2), Fraction(1)}
    # 16 deterministic vertices (0/1 entries) and 8 with half-entries
    deterministic = [r for r in normalized if Fraction(1, 2) not in r]
    assert len(deterministic) == 16
