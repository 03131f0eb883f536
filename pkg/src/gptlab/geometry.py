"""Cone duality and vertex/facet enumeration via the double description method.

One routine serves every direction of the duality: the extreme rays of
``{x : G x >= 0}`` give facet effects when ``G`` holds polytope vertices, and
give composite-state vertices when ``G`` holds product-effect functionals.
An exact ``fractions.Fraction`` path is available for integral inputs so that
small canonical fixtures are bit-exact.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from gptlab.config import resolve_tol
from gptlab.errors import ValidationError


def affine_dimension(points: np.ndarray, tol: float | None = None) -> int:
    """Dimension of the affine hull of the given row vectors."""
    tol = resolve_tol(tol)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] <= 1:
        return 0
    diffs = pts[1:] - pts[0]
    svals = np.linalg.svd(diffs, compute_uv=False)
    scale = svals[0] if svals.size and svals[0] > 0 else 1.0
    return int(np.sum(svals > tol * max(1.0, scale)))


def canonicalize_vertices(vertices: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Deduplicate within tol and sort lexicographically (deterministic identity)."""
    tol = resolve_tol(tol)
    verts = np.atleast_2d(np.asarray(vertices, dtype=float))
    if verts.size == 0:
        return verts.reshape(0, verts.shape[1] if verts.ndim == 2 else 0)
    order = np.lexsort(verts.T[::-1])
    verts = verts[order]
    kept: list[np.ndarray] = []
    for row in verts:
        if not any(np.max(np.abs(row - k)) <= tol for k in kept):
            kept.append(row)
    return np.array(kept)


def _independent_rows(G: np.ndarray, tol: float) -> list[int]:
    """Greedy pick of linearly independent rows via Gram-Schmidt."""
    chosen: list[int] = []
    basis: list[np.ndarray] = []
    for i, row in enumerate(G):
        residual = row.astype(float).copy()
        for b in basis:
            residual -= (residual @ b) * b
        norm = np.linalg.norm(residual)
        if norm > tol * max(1.0, np.linalg.norm(row)):
            basis.append(residual / norm)
            chosen.append(i)
            if len(chosen) == G.shape[1]:
                break
    return chosen


def _adjacent(mask_p: int, mask_n: int, masks: list[int], p: int, n: int) -> bool:
    common = mask_p & mask_n
    for k, mask in enumerate(masks):
        if k != p and k != n and (mask & common) == common:
            return False
    return True


def dual_cone_rays(generators: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Extreme rays of the pointed cone ``{x : generators @ x >= 0}``.

    Requires the generator rows to span the full space (otherwise the cone
    contains a line and has no extreme rays).  Rays are scaled to unit
    max-abs and returned in lexicographic order.
    """
    tol = resolve_tol(tol)
    G = np.atleast_2d(np.asarray(generators, dtype=float))
    K = G.shape[1]
    scales = np.max(np.abs(G), axis=1)
    if np.any(scales == 0):
        raise ValidationError("zero generator row")
    G = G / scales[:, None]

    chosen = _independent_rows(G, tol)
    if len(chosen) < K:
        raise ValidationError("generators do not span the space; dual cone is not pointed")
    order = chosen + [i for i in range(G.shape[0]) if i not in chosen]
    G = G[order]

    rays = [np.ascontiguousarray(col) for col in np.linalg.inv(G[:K]).T]
    full = (1 << K) - 1
    masks = [full & ~(1 << j) for j in range(K)]
    rays = [r / np.max(np.abs(r)) for r in rays]

    for t in range(K, G.shape[0]):
        g = G[t]
        values = np.array([g @ r for r in rays])
        pos = [i for i, v in enumerate(values) if v > tol]
        neg = [i for i, v in enumerate(values) if v < -tol]
        zero = [i for i in range(len(rays)) if i not in pos and i not in neg]
        if not neg:
            for i in zero:
                masks[i] |= 1 << t
            continue
        new_rays: list[np.ndarray] = []
        new_masks: list[int] = []
        for p in pos:
            for n in neg:
                if not _adjacent(masks[p], masks[n], masks, p, n):
                    continue
                ray = values[p] * rays[n] - values[n] * rays[p]
                ray /= np.max(np.abs(ray))
                new_rays.append(ray)
                new_masks.append((masks[p] & masks[n]) | (1 << t))
        rays = [rays[i] for i in pos] + [rays[i] for i in zero] + new_rays
        masks = (
            [masks[i] for i in pos]
            + [masks[i] | (1 << t) for i in zero]
            + new_masks
        )

    if not rays:
        return np.zeros((0, K))
    return canonicalize_vertices(np.array(rays), tol=tol)


def dual_cone_rays_exact(generators) -> list[tuple[Fraction, ...]]:
    """Exact-rational double description for integral/rational generators."""
    G = [[Fraction(x).limit_denominator(10**12) for x in row] for row in np.atleast_2d(generators).tolist()]
    K = len(G[0])

    def reduce_rows(rows):
        # returns indices of a maximal independent subset (exact elimination)
        chosen = []
        work: list[list[Fraction]] = []
        pivots: list[int] = []
        for i, row in enumerate(rows):
            r = list(row)
            for w, pc in zip(work, pivots):
                if r[pc] != 0:
                    f = r[pc] / w[pc]
                    r = [a - f * b for a, b in zip(r, w)]
            pivot_col = next((c for c, v in enumerate(r) if v != 0), None)
            if pivot_col is not None:
                work.append(r)
                pivots.append(pivot_col)
                chosen.append(i)
                if len(chosen) == K:
                    break
        return chosen

    chosen = reduce_rows(G)
    if len(chosen) < K:
        raise ValidationError("generators do not span the space; dual cone is not pointed")
    order = chosen + [i for i in range(len(G)) if i not in chosen]
    G = [G[i] for i in order]

    # invert the leading K x K block by Gauss-Jordan
    M = [list(G[i]) + [Fraction(int(i == j)) for j in range(K)] for i in range(K)]
    for col in range(K):
        pivot = next(r for r in range(col, K) if M[r][col] != 0)
        M[col], M[pivot] = M[pivot], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(K):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    inv_cols = [[M[i][K + j] for i in range(K)] for j in range(K)]

    def norm(ray):
        scale = max(abs(v) for v in ray)
        return tuple(v / scale for v in ray)

    rays = [norm(c) for c in inv_cols]
    full = (1 << K) - 1
    masks = [full & ~(1 << j) for j in range(K)]

    for t in range(K, len(G)):
        g = G[t]
        values = [sum(a * b for a, b in zip(g, r)) for r in rays]
        pos = [i for i, v in enumerate(values) if v > 0]
        neg = [i for i, v in enumerate(values) if v < 0]
        zero = [i for i, v in enumerate(values) if v == 0]
        if not neg:
            for i in zero:
                masks[i] |= 1 << t
            continue
        new_rays = []
        new_masks = []
        for p in pos:
            for n in neg:
                if not _adjacent(masks[p], masks[n], masks, p, n):
                    continue
                ray = tuple(values[p] * rn - values[n] * rp for rp, rn in zip(rays[p], rays[n]))
                new_rays.append(norm(ray))
                new_masks.append((masks[p] & masks[n]) | (1 << t))
        rays = [rays[i] for i in pos] + [rays[i] for i in zero] + new_rays
        masks = (
            [masks[i] for i in pos]
            + [masks[i] | (1 << t) for i in zero]
            + new_masks
        )

    return sorted(set(rays))


def extremal_effect_vectors(vertices: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Extreme points of ``{f : 0 <= f·v <= 1 for every vertex v}``.

    Computed by homogenizing the effect polytope into a pointed cone in one
    extra dimension and enumerating its extreme rays.
    """
    tol = resolve_tol(tol)
    verts = np.atleast_2d(np.asarray(vertices, dtype=float))
    nv, K = verts.shape
    rows = np.zeros((2 * nv + 1, K + 1))
    rows[:nv, :K] = verts
    rows[nv : 2 * nv, :K] = -verts
    rows[nv : 2 * nv, K] = 1.0
    rows[2 * nv, K] = 1.0
    rays = dual_cone_rays(rows, tol=tol)
    if np.any(rays[:, K] <= tol):
        raise ValidationError("effect polytope enumeration produced a recession ray")
    effects = rays[:, :K] / rays[:, K : K + 1]
    return canonicalize_vertices(effects, tol=tol)


def brute_force_dual_cone_rays(generators: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Independent oracle: rays from null spaces of (K-1)-subsets of generators."""
    tol = resolve_tol(tol)
    G = np.atleast_2d(np.asarray(generators, dtype=float))
    R, K = G.shape
    found: list[np.ndarray] = []
    for subset in combinations(range(R), K - 1):
        sub = G[list(subset)]
        _, svals, vt = np.linalg.svd(sub)
        if np.sum(svals > tol * max(1.0, svals[0] if svals.size else 1.0)) != K - 1:
            continue
        d = vt[-1]
        for cand in (d, -d):
            if np.all(G @ cand >= -tol * 10):
                active = np.abs(G @ cand) <= 10 * tol
                if np.sum(active) >= K - 1 and affine_dimension(
                    np.vstack([np.zeros(K), G[active]])
                ) == K - 1:
                    found.append(cand / np.max(np.abs(cand)))
                break
    if not found:
        return np.zeros((0, K))
    return canonicalize_vertices(np.array(found), tol=1e-7)


def brute_force_polytope_vertices(
    a_ub: np.ndarray,
    b_ub: np.ndarray,
    a_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    tol: float | None = None,
) -> np.ndarray:
    """Independent oracle: enumerate basic feasible points of an H-polytope."""
    tol = resolve_tol(tol)
    A = np.atleast_2d(np.asarray(a_ub, dtype=float))
    b = np.asarray(b_ub, dtype=float)
    K = A.shape[1]
    if a_eq is None:
        Ae = np.zeros((0, K))
        be = np.zeros(0)
    else:
        Ae = np.atleast_2d(np.asarray(a_eq, dtype=float))
        be = np.asarray(b_eq, dtype=float)
    n_free = K - Ae.shape[0]
    found: list[np.ndarray] = []
    for subset in combinations(range(A.shape[0]), n_free):
        M = np.vstack([Ae, A[list(subset)]])
        rhs = np.concatenate([be, b[list(subset)]])
        try:
            x = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            continue
        if np.all(A @ x <= b + 10 * tol):
            found.append(x)
    if not found:
        return np.zeros((0, K))
    return canonicalize_vertices(np.array(found), tol=1e-7)
