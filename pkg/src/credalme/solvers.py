"""Entropy maximization kernels.

Three local solvers over a single conditional distribution (box, vertex
hull, halfspaces) and one global solver over a full joint table subject to
linearized conditional constraints.  All entropies are in nats.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.optimize import linprog
from scipy.special import logsumexp

from .geometry import InfeasibleError, convex_halfspaces, hull_distance, in_convex
from .model import (
    CredalError,
    ConjunctiveEvent,
    CredalNetwork,
    Conditional,
    ConvexConditional,
    ConvexSpec,
    Halfspace,
    JointTable,
    KBItem,
    Variable,
    check_cap,
    event_mask,
    network_kb,
    ordered_variables,
)

log = logging.getLogger(__name__)

# Joint-oracle certificate: largest accepted constraint residual.
RESIDUAL_TOL = 1e-8
# Atoms below this are reported as exact zeros.
ZERO_SNAP = 1e-14


class SolverError(CredalError):
    """A solver failed to produce a certified optimum."""


@dataclass(frozen=True)
class SolverConfig:
    bisection_tol: float = 1e-12
    convex_tol: float = 1e-9
    max_iters: int = 100_000

    def __post_init__(self):
        if min(self.bisection_tol, self.convex_tol) <= 0 or self.max_iters <= 0:
            raise ValueError("solver tolerances and iteration limit must be positive")


DEFAULT = SolverConfig()


def entropy(p) -> float:
    """Shannon entropy in nats, with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("entropy of a vector with negative entries")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


# ---------------------------------------------------------------------------
# Box-constrained simplex
# ---------------------------------------------------------------------------


def _maxent_box(l, u, config: SolverConfig = DEFAULT) -> tuple[np.ndarray, int]:
    l = np.asarray(l, dtype=float)
    u = np.asarray(u, dtype=float)
    if (
        l.shape != u.shape
        or np.any(l < 0)
        or np.any(u > 1)
        or np.any(l > u)
        or l.sum() > 1 + 1e-12
        or u.sum() < 1 - 1e-12
    ):
        raise InfeasibleError(f"infeasible box l={l.tolist()} u={u.tolist()}")

    def mass(t):
        return np.clip(t, l, u).sum()

    lo, hi = float(l.min()), float(u.max())
    iters = 0
    while hi - lo > config.bisection_tol and iters < config.max_iters:
        mid = 0.5 * (lo + hi)
        if mass(mid) < 1.0:
            lo = mid
        else:
            hi = mid
        iters += 1
    t = 0.5 * (lo + hi)
    # Recompute the level exactly from the coordinates left unclamped.
    free = (l < t) & (t < u)
    if free.any():
        clamped = np.where(t <= l, l, u)[~free].sum()
        t_exact = (1.0 - clamped) / free.sum()
        if np.all(l[free] - config.bisection_tol <= t_exact) and np.all(
            t_exact <= u[free] + config.bisection_tol
        ):
            t = t_exact
    return np.clip(t, l, u), iters


def maxent_box(l, u, config: SolverConfig = DEFAULT) -> np.ndarray:
    """Maximum entropy distribution with ``l <= r <= u``.

    The optimum clips a common level ``t`` into every box, so it is found by
    bisection on the nondecreasing map ``t -> sum(clip(t, l, u))``.
    """
    return _maxent_box(l, u, config)[0]


# ---------------------------------------------------------------------------
# Vertex hull (conditional gradient)
# ---------------------------------------------------------------------------


def _segment_argmax(r: np.ndarray, direction: np.ndarray, gmax: float) -> float:
    """Maximize entropy of ``r + g * direction`` over ``g`` in ``[0, gmax]``."""

    def slope(g):
        x = r + g * direction
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(direction != 0, direction * np.log(np.maximum(x, 0.0)), 0.0)
        return -terms.sum()

    if slope(0.0) <= 0:
        return 0.0
    s_hi = slope(gmax)
    if s_hi >= 0:
        return gmax
    # Safeguarded Newton on the decreasing slope.
    lo, hi = 0.0, gmax
    g = 0.5 * gmax
    nz = direction != 0
    for _ in range(100):
        sg = slope(g)
        if sg > 0:
            lo = g
        else:
            hi = g
        curv = -np.sum(direction[nz] ** 2 / (r[nz] + g * direction[nz]))
        nxt = g - sg / curv if curv < 0 else 0.5 * (lo + hi)
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - g) <= 1e-16 * max(1.0, gmax) or hi - lo <= 1e-16 * max(1.0, gmax):
            return nxt
        g = nxt
    return g


def _affine_polish(active: np.ndarray, r0: np.ndarray, max_iters: int = 100) -> np.ndarray | None:
    """Entropy maximizer over the affine hull of ``active`` (rows), by Newton.

    Returns None if the iterate leaves the positive orthant or stalls.
    """
    c = active[0]
    D = (active[1:] - c).T
    if D.shape[1] == 0:
        return c.copy()
    U, s, _ = np.linalg.svd(D, full_matrices=False)
    Q = U[:, s > 1e-10]
    if Q.shape[1] == 0:
        return c.copy()
    x = Q.T @ (r0 - c)
    r = c + Q @ x
    if np.any(r <= 0):
        return None
    for _ in range(max_iters):
        g = Q.T @ np.log(r)
        if np.max(np.abs(g)) < 1e-15:
            break
        H = Q.T @ (Q / r[:, None])
        step = np.linalg.solve(H, -g)
        a = 1.0
        while np.any(c + Q @ (x + a * step) <= 0):
            a *= 0.5
            if a < 1e-12:
                return None
        x = x + a * step
        r = c + Q @ x
        if np.max(np.abs(a * step)) < 1e-16:
            break
    return r


def _fw_gap(V: np.ndarray, r: np.ndarray) -> float:
    g = -np.log(r)
    return float(np.max(V @ g) - g @ r)


def _maxent_vrep(vertices, config: SolverConfig = DEFAULT) -> tuple[np.ndarray, int]:
    V = np.array(vertices, dtype=float)
    if V.ndim != 2 or len(V) == 0:
        raise InfeasibleError("empty vertex list")
    d = V.shape[1]
    V = np.unique(V, axis=0)
    if len(V) == 1:
        return V[0].copy(), 0
    support = np.any(V > 0, axis=0)
    Vs = V[:, support]

    w = np.full(len(Vs), 1.0 / len(Vs))
    r = w @ Vs
    target = config.convex_tol * 1e-3
    iters = 0
    for iters in range(1, config.max_iters + 1):
        g = -np.log(r) - 1.0
        scores = Vs @ g
        s = int(np.argmax(scores))
        gap_fw = scores[s] - g @ r
        if gap_fw <= target:
            break
        if iters % 10 == 0:
            # Try to finish on the current active face.
            polished = _affine_polish(Vs[w > 1e-9], r)
            if (
                polished is not None
                and np.all(polished > 0)
                and _fw_gap(Vs, polished) <= target
                and hull_weights_ok(Vs, polished)
            ):
                r = polished
                break
        act = np.flatnonzero(w > 0)
        a = act[np.argmin(scores[act])]
        gap_away = g @ r - scores[a]
        if gap_fw >= gap_away:
            direction = Vs[s] - r
            gmax = 1.0
        else:
            direction = r - Vs[a]
            gmax = w[a] / (1.0 - w[a])
        step = _segment_argmax(r, direction, gmax)
        if gap_fw >= gap_away:
            w *= 1.0 - step
            w[s] += step
        else:
            w *= 1.0 + step
            w[a] -= step
            if step >= gmax * (1 - 1e-15):
                w[a] = 0.0
        w[w < 1e-300] = 0.0
        w /= w.sum()
        r = w @ Vs
        if step == 0.0:
            break
    else:
        polished = _affine_polish(Vs[w > 1e-9], r)
        if polished is not None and np.all(polished > 0) and hull_weights_ok(Vs, polished):
            if _fw_gap(Vs, polished) <= _fw_gap(Vs, r):
                r = polished
    out = np.zeros(d)
    out[support] = r
    return out / out.sum(), iters


def hull_weights_ok(V: np.ndarray, r: np.ndarray, tol: float = 1e-12) -> bool:
    return hull_distance(V, r) <= tol


def maxent_vrep(vertices, config: SolverConfig = DEFAULT) -> np.ndarray:
    """Maximum entropy point of the convex hull of ``vertices``.

    Away-step conditional gradient; the linear subproblem is a scan over the
    vertex list.  Once the active vertices settle, a Newton solve on their
    affine hull finishes the job to machine precision.
    """
    return _maxent_vrep(vertices, config)[0]


# ---------------------------------------------------------------------------
# Simplex with homogeneous linear constraints (shared by hrep and joint)
# ---------------------------------------------------------------------------


@dataclass
class MaxEntResult:
    p: np.ndarray
    iterations: int
    max_residual: float
    duality_gap: float
    support: np.ndarray = field(repr=False)
    log_factors: np.ndarray = field(repr=False, default=None)


def _lp(c, A_ub, b_ub, A_eq, b_eq, bounds):
    return linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )


def _worst_violation(A_eq, A_in, labels_eq, labels_in) -> str:
    """Describe the constraint that stays most violated at the least-violating point."""
    n = (A_eq if A_eq.size else A_in).shape[1]
    # variables: p (n), t (1); minimize t
    rows_ub, rhs_ub = [], []
    for row in A_eq:
        rows_ub.append(np.concatenate([row, [-1.0]]))
        rows_ub.append(np.concatenate([-row, [-1.0]]))
        rhs_ub += [0.0, 0.0]
    for row in A_in:
        rows_ub.append(np.concatenate([row, [-1.0]]))
        rhs_ub.append(0.0)
    c = np.zeros(n + 1)
    c[-1] = 1.0
    res = _lp(
        c, np.array(rows_ub), np.array(rhs_ub),
        np.concatenate([np.ones(n), [0.0]])[None, :], [1.0],
        [(0, None)] * n + [(None, None)],
    )
    if res.status != 0:
        return "constraints are infeasible"
    p = res.x[:n]
    viol = [(abs(row @ p), lab) for row, lab in zip(A_eq, labels_eq)]
    viol += [(max(row @ p, 0.0), lab) for row, lab in zip(A_in, labels_in)]
    amount, label = max(viol)
    return f"constraints are infeasible; most violated: {label} (by {amount:.3g})"


def _support(A_eq: np.ndarray, A_in: np.ndarray, n: int, thr: float = 1e-8) -> np.ndarray | None:
    """Atoms that some feasible distribution gives positive mass.

    Returns None if no distribution satisfies the constraints.  Because the
    feasible set is convex, averaging witnesses shows the union of supports is
    itself attained, so a few LPs suffice.
    """
    known = np.zeros(n, dtype=bool)
    delta = 1.0 / n
    while True:
        unknown = np.flatnonzero(~known)
        k = len(unknown)
        if k == 0:
            return known
        # variables: p (n), t (k); maximize sum t, t_i <= p_unknown_i, t <= delta
        c = np.concatenate([np.zeros(n), -np.ones(k)])
        T = np.zeros((k, n + k))
        T[np.arange(k), unknown] = -1.0
        T[np.arange(k), n + np.arange(k)] = 1.0
        A_ub = [T]
        b_ub = [np.zeros(k)]
        if A_in.size:
            A_ub.append(np.hstack([A_in, np.zeros((len(A_in), k))]))
            b_ub.append(np.zeros(len(A_in)))
        A_eq_full = [np.concatenate([np.ones(n), np.zeros(k)])[None, :]]
        b_eq = [np.ones(1)]
        if A_eq.size:
            A_eq_full.append(np.hstack([A_eq, np.zeros((len(A_eq), k))]))
            b_eq.append(np.zeros(len(A_eq)))
        res = _lp(
            c, np.vstack(A_ub), np.concatenate(b_ub), np.vstack(A_eq_full),
            np.concatenate(b_eq), [(0, None)] * n + [(0, delta)] * k,
        )
        if res.status == 2:
            return None
        if res.status != 0:
            raise SolverError(f"support LP failed: {res.message}")
        p = res.x[:n]
        new = (~known) & (p > thr)
        if not new.any():
            return known
        known |= new


def _dual_newton(A: np.ndarray, n_eq: int, config: SolverConfig) -> tuple[np.ndarray, np.ndarray, int]:
    """Minimize ``log sum exp(-A^T nu)`` with ``nu[n_eq:] >= 0`` by projected Newton."""
    m, n = A.shape
    nu = np.zeros(m)
    lower = np.full(m, -np.inf)
    lower[n_eq:] = 0.0

    def evaluate(nu):
        z = -(A.T @ nu)
        lz = logsumexp(z)
        p = np.exp(z - lz)
        return lz, p

    f, p = evaluate(nu)
    it = 0
    best = np.inf
    stall = 0
    for it in range(1, config.max_iters + 1):
        Ap = A @ p
        g = -Ap
        proj = nu - np.maximum(nu - g, lower)
        pg = float(np.max(np.abs(proj), initial=0.0))
        if pg <= 1e-15:
            break
        # Near machine precision further steps only shuffle roundoff.
        if pg < best * 0.5:
            best, stall = pg, 0
        else:
            stall += 1
            if stall >= 8 and best < 1e-11:
                break
        eps = min(1e-10, pg)
        active = (nu - lower <= eps) & (g > 0)
        free = ~active
        d = np.zeros(m)
        a = 1.0
        if free.any():
            Af = A[free]
            H = (Af * p) @ Af.T - np.outer(Ap[free], Ap[free])
            lam, vec = np.linalg.eigh(H)
            flat = lam <= 1e-12 * max(1.0, lam[-1])
            gv = vec.T @ g[free]
            # Along a flat direction v the exponent shifts by a constant c and
            # the dual is exactly linear with slope -c; slide until a bound binds.
            if np.linalg.norm(gv[flat]) > 1e-10:
                d[free] = -vec[:, flat] @ gv[flat]
                a = 1e8
            else:
                d[free] = -vec[:, ~flat] @ (gv[~flat] / lam[~flat])
        if g @ d >= 0 or not np.all(np.isfinite(d)):
            d = -g
            d[active] = 0.0
            a = 1.0
        slack = 1e-15 * max(1.0, abs(f))
        improved = False
        while a > 1e-20:
            cand = np.maximum(nu + a * d, lower)
            fc, pc = evaluate(cand)
            if fc <= f + 1e-4 * (g @ (cand - nu)) + slack:
                improved = True
                break
            a *= 0.5
        if not improved:
            break
        nu, f, p = cand, fc, pc
    return nu, p, it


def maxent_simplex(
    n: int,
    A_eq: np.ndarray | None = None,
    A_in: np.ndarray | None = None,
    config: SolverConfig = DEFAULT,
    labels_eq: Sequence[str] | None = None,
    labels_in: Sequence[str] | None = None,
) -> MaxEntResult:
    """Maximum entropy distribution on ``n`` atoms with ``A_eq p = 0``, ``A_in p <= 0``.

    Atoms that no feasible distribution can weight are removed first (LP);
    on the remaining support the optimum is strictly positive and the
    exponential-family dual is attained, which projected Newton then solves.
    The result carries its residual and duality-gap certificate.
    """
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, float).reshape(-1, n)
    A_in = np.zeros((0, n)) if A_in is None else np.asarray(A_in, float).reshape(-1, n)
    labels_eq = list(labels_eq or (f"eq[{i}]" for i in range(len(A_eq))))
    labels_in = list(labels_in or (f"ineq[{i}]" for i in range(len(A_in))))

    # Rows with no positive coefficient can never bind on nonnegative p.
    keep_in = np.any(A_in > 0, axis=1)
    A_in_k = A_in[keep_in]

    support = _support(A_eq, A_in_k, n)
    if support is None or not support.any():
        raise InfeasibleError(_worst_violation(A_eq, A_in, labels_eq, labels_in))

    S = np.flatnonzero(support)
    Be = A_eq[:, S]
    Bi = A_in_k[:, S]
    scale_e = np.max(np.abs(Be), axis=1) if len(Be) else np.zeros(0)
    scale_i = np.max(np.abs(Bi), axis=1) if len(Bi) else np.zeros(0)
    Be = Be[scale_e > 1e-14] / scale_e[scale_e > 1e-14, None]
    Bi = Bi[scale_i > 1e-14] / scale_i[scale_i > 1e-14, None]
    Bi = Bi[np.any(Bi > 0, axis=1)] if len(Bi) else Bi
    A = np.vstack([Be, Bi])
    n_eq = len(Be)

    if len(A):
        nu, ps, iters = _dual_newton(A, n_eq, config)
    else:
        nu, ps, iters = np.zeros(0), np.full(len(S), 1.0 / len(S)), 0

    p = np.zeros(n)
    p[S] = ps
    res_eq = np.abs(A_eq @ p) if len(A_eq) else np.zeros(0)
    res_in = np.maximum(A_in @ p, 0.0) if len(A_in) else np.zeros(0)
    max_res = float(max(res_eq.max(initial=0.0), res_in.max(initial=0.0)))
    gap = float(abs(nu @ (A @ ps))) if len(A) else 0.0
    if max_res > RESIDUAL_TOL or gap > config.convex_tol:
        raise SolverError(
            f"maximum entropy solve not certified: residual {max_res:.3g}, gap {gap:.3g}"
        )
    log_factors = -(A.T @ nu) if len(A) else np.zeros(len(S))
    p[p < ZERO_SNAP] = 0.0
    p /= p.sum()
    return MaxEntResult(p, iters, max_res, gap, support, log_factors)


def _homogenize(halfspaces: Sequence[Halfspace], d: int) -> np.ndarray:
    if not halfspaces:
        return np.zeros((0, d))
    return np.array([np.asarray(h.a, float) - h.b for h in halfspaces])


def _maxent_hrep(halfspaces, d: int, config: SolverConfig = DEFAULT) -> tuple[np.ndarray, int]:
    hs = [h if isinstance(h, Halfspace) else Halfspace(h[0], h[1]) for h in halfspaces]
    if any(len(h.a) != d for h in hs):
        raise ValueError("halfspace dimension mismatch")
    res = maxent_simplex(d, A_in=_homogenize(hs, d), config=config)
    return res.p, res.iterations


def maxent_hrep(halfspaces, d: int, config: SolverConfig = DEFAULT) -> np.ndarray:
    """Maximum entropy point of ``{r in simplex : a . r <= b}``.

    On the simplex ``a . r <= b`` is the homogeneous ``(a - b) . r <= 0``, so
    this is the joint solver on ``d`` atoms.
    """
    return _maxent_hrep(halfspaces, d, config)[0]


# ---------------------------------------------------------------------------
# Joint oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearizedConstraint:
    """``sum_k coefficients[k] * Pr(atom_k)  (= | <=)  0``."""

    indices: tuple[int, ...]
    values: tuple[float, ...]
    relation: str = "="
    rhs: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.relation not in ("=", "<="):
            raise ValueError(f"bad relation {self.relation!r}")

    @property
    def coefficients(self) -> dict[int, float]:
        return dict(zip(self.indices, self.values))

    def dense(self, n: int) -> np.ndarray:
        row = np.zeros(n)
        np.add.at(row, np.asarray(self.indices, dtype=int), np.asarray(self.values, float))
        return row

    @classmethod
    def from_dense(cls, row: np.ndarray, relation: str, label: str = "") -> "LinearizedConstraint":
        idx = np.flatnonzero(row != 0)
        return cls(tuple(int(i) for i in idx), tuple(float(v) for v in row[idx]), relation, 0.0, label)


def _conditional_rows(
    variables: Sequence[Variable], premise, conclusion_mask: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Indicator rows of ``premise`` and ``premise ∧ conclusion``."""
    c = event_mask(variables, premise).astype(float)
    return c, c * conclusion_mask


def linearize(
    source: Union[CredalNetwork, Sequence[KBItem]],
    variables: Sequence[Variable] | None = None,
) -> list[LinearizedConstraint]:
    """Linear constraints over the atoms of ``variables`` equivalent to the KB.

    ``Pr(d|c) = r`` becomes ``Pr(c∧d) - r Pr(c) = 0``, which also holds
    vacuously when ``Pr(c) = 0``; intervals give two inequalities and a
    convex set one inequality per facet.
    """
    if isinstance(source, CredalNetwork):
        kb = network_kb(source)
        if variables is None:
            variables = ordered_variables(source)
    else:
        kb = list(source)
        if variables is None:
            raise ValueError("variables are required for a plain list of conditionals")
    n = check_cap(variables)
    out: list[LinearizedConstraint] = []
    for item in kb:
        if isinstance(item, Conditional):
            d = event_mask(variables, item.conclusion).astype(float)
            c, cd = _conditional_rows(variables, item.premise, d)
            if item.is_point:
                out.append(LinearizedConstraint.from_dense(cd - item.lower * c, "=", str(item)))
            else:
                out.append(LinearizedConstraint.from_dense(item.lower * c - cd, "<=", f"{item} lower"))
                out.append(LinearizedConstraint.from_dense(cd - item.upper * c, "<=", f"{item} upper"))
        elif isinstance(item, ConvexConditional):
            var = next(v for v in variables if v.name == item.variable)
            c = event_mask(variables, item.premise).astype(float)
            cx = []
            for value in var.domain:
                cx.append(c * event_mask(variables, ConjunctiveEvent(((var.name, value),))))
            for k, h in enumerate(convex_halfspaces(item.spec)):
                row = sum(a * m for a, m in zip(h.a, cx)) - h.b * c
                if np.any(row != 0):
                    out.append(LinearizedConstraint.from_dense(row, "<=", f"{item} facet {k}"))
        else:
            raise TypeError(f"not a conditional: {item!r}")
    return out


def maxent_joint(
    variables: Sequence[Variable],
    constraints: Sequence[LinearizedConstraint],
    config: SolverConfig = DEFAULT,
) -> JointTable:
    """Maximum entropy joint distribution satisfying ``constraints``."""
    return maxent_joint_result(variables, constraints, config)[0]


def maxent_joint_result(
    variables: Sequence[Variable],
    constraints: Sequence[LinearizedConstraint],
    config: SolverConfig = DEFAULT,
) -> tuple[JointTable, MaxEntResult]:
    n = check_cap(variables)
    eq = [c for c in constraints if c.relation == "="]
    ineq = [c for c in constraints if c.relation == "<="]
    A_eq = np.array([c.dense(n) for c in eq]).reshape(-1, n)
    A_in = np.array([c.dense(n) for c in ineq]).reshape(-1, n)
    res = maxent_simplex(
        n, A_eq, A_in, config,
        labels_eq=[c.label or f"eq[{i}]" for i, c in enumerate(eq)],
        labels_in=[c.label or f"ineq[{i}]" for i, c in enumerate(ineq)],
    )
    log.debug("joint maxent: %d atoms, %d iterations, residual %.2e", n, res.iterations, res.max_residual)
    return JointTable(tuple(variables), res.p), res


def satisfies(joint: JointTable, kb: Sequence[KBItem], tol: float = 1e-8) -> list[str]:
    """Conditionals of ``kb`` that ``joint`` violates (premises of mass 0 are vacuous)."""
    bad = []
    for item in kb:
        pc = joint.prob(item.premise)
        if pc <= tol:
            continue
        if isinstance(item, Conditional):
            both = item.premise.conjoin(item.conclusion)
            r = joint.prob(both) / pc
            if r < item.lower - tol or r > item.upper + tol:
                bad.append(f"{item}: Pr = {r:.12g}")
        else:
            var = next(v for v in joint.variables if v.name == item.variable)
            r = [
                joint.prob(item.premise.conjoin(ConjunctiveEvent(((var.name, x),)))) / pc
                for x in var.domain
            ]
            if not in_convex(item.spec, r, tol):
                bad.append(f"{item}: Pr = {np.round(r, 12).tolist()}")
    return bad
