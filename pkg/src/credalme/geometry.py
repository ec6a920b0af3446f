"""Small polytope routines on the probability simplex.

Everything here works in low dimension (a single variable's domain), so the
vertex/facet conversions are plain combinatorial enumeration.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np
from scipy.optimize import nnls

from .model import CapExceededError, ConvexSpec, CredalError, Halfspace

# Largest domain size for which vertex/facet conversions are attempted.
MAX_CONVERSION_DIM = 4

DEDUP_TOL = 1e-12


class InfeasibleError(CredalError):
    """A constraint set has no probability distribution satisfying it."""


def _dedupe(points: list[np.ndarray], tol: float) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in out):
            out.append(p)
    return out


def vertices_box_simplex(l: Sequence[float], u: Sequence[float]) -> list[np.ndarray]:
    """Vertices of ``{r : sum(r) = 1, l <= r <= u}``.

    Every vertex has all but (at most) one coordinate at a bound, so we fix
    one free coordinate, put each other one at its lower or upper bound and
    keep the candidates where the free coordinate lands inside its own box.
    """
    l = np.asarray(l, dtype=float)
    u = np.asarray(u, dtype=float)
    d = len(l)
    if l.sum() > 1 + 1e-12 or u.sum() < 1 - 1e-12 or np.any(l > u):
        raise InfeasibleError(f"box l={l.tolist()} u={u.tolist()} misses the simplex")
    cands = []
    for j in range(d):
        others = [k for k in range(d) if k != j]
        for pick in itertools.product((0, 1), repeat=d - 1):
            r = np.empty(d)
            for k, hi in zip(others, pick):
                r[k] = u[k] if hi else l[k]
            r[j] = 1.0 - r[others].sum()
            if l[j] - 1e-12 <= r[j] <= u[j] + 1e-12:
                r[j] = min(max(r[j], l[j]), u[j])
                cands.append(r)
    verts = _dedupe(cands, DEDUP_TOL)
    verts.sort(key=lambda v: tuple(-v))
    return verts


def box_halfspaces(l: Sequence[float], u: Sequence[float]) -> list[Halfspace]:
    d = len(l)
    hs = []
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        hs.append(Halfspace(-e, -float(l[j])))
        hs.append(Halfspace(e, float(u[j])))
    return hs


def _check_dim(d: int) -> None:
    if d > MAX_CONVERSION_DIM:
        raise CapExceededError(
            f"vertex/facet conversion refused above dimension {MAX_CONVERSION_DIM} (got {d})"
        )


def hrep_to_vrep(spec: ConvexSpec, tol: float = 1e-9) -> list[np.ndarray]:
    """Vertices of a halfspace set intersected with the simplex (d <= 4)."""
    d = spec.dim
    _check_dim(d)
    rows = [np.asarray(h.a, float) for h in spec.halfspaces]
    rhs = [h.b for h in spec.halfspaces]
    for j in range(d):
        e = np.zeros(d)
        e[j] = -1.0
        rows.append(e)
        rhs.append(0.0)
    A = np.array(rows)
    b = np.array(rhs)
    verts = []
    for combo in itertools.combinations(range(len(rows)), d - 1):
        M = np.vstack([np.ones(d), A[list(combo)]])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        r = np.linalg.solve(M, np.concatenate([[1.0], b[list(combo)]]))
        if np.all(A @ r <= b + tol):
            verts.append(np.clip(r, 0.0, 1.0))
    if not verts:
        raise InfeasibleError("halfspace set is empty on the simplex")
    return _dedupe(verts, 1e-9)


def _affine_frame(points: np.ndarray, tol: float = 1e-10):
    """Centre, orthonormal direction basis of the affine hull, and its complement
    inside the plane ``sum(r) = 0``."""
    c = points.mean(axis=0)
    d = points.shape[1]
    diffs = points - c
    if len(points) > 1:
        _, s, vt = np.linalg.svd(diffs, full_matrices=True)
        rank = int(np.sum(s > tol))
        Q = vt[:rank].T
    else:
        Q = np.zeros((d, 0))
    ones = np.ones((d, 1)) / np.sqrt(d)
    basis = np.hstack([Q, ones])
    _, _, vt = np.linalg.svd(basis.T, full_matrices=True)
    W = vt[basis.shape[1]:].T
    return c, Q, W


def vrep_to_hrep(spec: ConvexSpec, tol: float = 1e-10) -> list[Halfspace]:
    """Facet description of a vertex set's hull (d <= 4).

    Lower-dimensional hulls also get pairs of opposite halfspaces pinning the
    directions the hull does not span.
    """
    d = spec.dim
    _check_dim(d)
    P = np.array(spec.vertices, dtype=float)
    c, Q, W = _affine_frame(P)
    hs: list[Halfspace] = []
    for w in W.T:
        off = float(w @ c)
        hs.append(Halfspace(w, off))
        hs.append(Halfspace(-w, -off))
    m = Q.shape[1]
    if m == 0:
        return hs
    Y = (P - c) @ Q
    if m == 1:
        y = Y[:, 0]
        q = Q[:, 0]
        hs.append(Halfspace(q, float(y.max() + q @ c)))
        hs.append(Halfspace(-q, float(-y.min() - q @ c)))
        return hs
    normals: list[tuple[np.ndarray, float]] = []
    for combo in itertools.combinations(range(len(Y)), m):
        S = Y[list(combo)]
        D = S[1:] - S[0]
        _, s, vt = np.linalg.svd(D, full_matrices=True)
        if np.sum(s > 1e-10) != m - 1:
            continue
        n = vt[-1]
        off = n @ S[0]
        side = Y @ n - off
        if np.all(side <= tol):
            pass
        elif np.all(side >= -tol):
            n, off = -n, -off
        else:
            continue
        if not any(np.allclose(n, n2, atol=1e-9) and abs(off - o2) < 1e-9 for n2, o2 in normals):
            normals.append((n, off))
    for n, off in normals:
        a = Q @ n
        hs.append(Halfspace(a, float(off + a @ c)))
    return hs


def convex_vertices(spec: ConvexSpec) -> list[np.ndarray]:
    if spec.is_vrep:
        return [np.asarray(v, float) for v in spec.vertices]
    return hrep_to_vrep(spec)


def convex_halfspaces(spec: ConvexSpec) -> list[Halfspace]:
    if spec.is_vrep:
        return vrep_to_hrep(spec)
    return list(spec.halfspaces)


def in_convex(spec: ConvexSpec, r: Sequence[float], tol: float = 1e-9) -> bool:
    """Whether ``r`` lies in the convex set, up to ``tol``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < -tol) or abs(r.sum() - 1.0) > tol:
        return False
    if spec.is_vrep:
        return hull_distance(spec.vertices, r) <= tol
    return all(np.dot(h.a, r) <= h.b + tol for h in spec.halfspaces)


def hull_distance(vertices, r: Sequence[float]) -> float:
    """Euclidean distance from ``r`` to the hull of ``vertices`` (for simplex points)."""
    V = np.asarray(vertices, dtype=float)
    r = np.asarray(r, dtype=float)
    # Heavy weight on the affine row so the weights sum to one.
    M = np.vstack([V.T, 1e3 * np.ones(len(V))])
    _, res = nnls(M, np.concatenate([r, [1e3]]))
    return float(res)


def in_box(l, u, r, tol: float = 1e-9) -> bool:
    r = np.asarray(r, dtype=float)
    return bool(
        np.all(r >= np.asarray(l) - tol)
        and np.all(r <= np.asarray(u) + tol)
        and abs(r.sum() - 1.0) <= tol
    )
