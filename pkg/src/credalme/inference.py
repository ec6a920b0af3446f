"""Exact queries on point networks and lower/upper bounds over credal sets."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import convex_vertices, vertices_box_simplex
from .imap import ci_gap
from .model import (
    CapExceededError,
    ConjunctiveEvent,
    CredalError,
    CredalNetwork,
    Interval,
    JointTable,
    Point,
    check_cap,
    event_mask,
    ordered_variables,
    parent_instantiations,
)

__all__ = [
    "Query",
    "UndefinedConditionalError",
    "joint_of_bn",
    "cond_prob",
    "vertices_box_simplex",
    "credal_bounds",
    "local_conditionals",
    "dag_violations",
]

# Largest number of vertex combinations credal_bounds will enumerate.
MAX_COMBINATIONS = 10**7

ZERO_MASS = 1e-15


class UndefinedConditionalError(CredalError, ZeroDivisionError):
    """The conditioning event has probability zero."""


@dataclass(frozen=True)
class Query:
    target: ConjunctiveEvent
    evidence: ConjunctiveEvent = ConjunctiveEvent()

    def __post_init__(self):
        if self.target.is_true():
            raise ValueError("query target must not be the true event")

    @classmethod
    def parse(cls, target: str, evidence: str = "true") -> "Query":
        return cls(ConjunctiveEvent.parse(target), ConjunctiveEvent.parse(evidence))

    @property
    def variables(self) -> set[str]:
        return set(self.target.variables) | set(self.evidence.variables)


def _cpt_array(net: CredalNetwork, child: str, rows: Sequence[Sequence[float]] | None = None) -> np.ndarray:
    """CPT of ``child`` as an array with axes (parents..., child)."""
    parents = net.parents(child)
    shape = [net.variable(p).size for p in parents] + [net.variable(child).size]
    if rows is None:
        rows = []
        for t in net.tables_for(child):
            if not isinstance(t.body, Point):
                raise TypeError(f"table {child}|{t.given} is not a point distribution")
            rows.append(t.body.p)
    return np.asarray(rows, dtype=float).reshape(shape)


def _product_joint(net: CredalNetwork, order: Sequence[str], cpts: dict[str, np.ndarray]) -> np.ndarray:
    pos = {n: i for i, n in enumerate(order)}
    shape = [net.variable(n).size for n in order]
    joint = np.ones(shape)
    for child, arr in cpts.items():
        axes = [pos[p] for p in net.parents(child)] + [pos[child]]
        perm = np.argsort(axes)
        arr = np.transpose(arr, perm)
        bshape = [1] * len(order)
        for ax in axes:
            bshape[ax] = shape[ax]
        joint = joint * arr.reshape(bshape)
    return joint.reshape(-1)


def joint_of_bn(bn: CredalNetwork, order: Sequence[str] | None = None) -> JointTable:
    """Product-form joint of a point network, over its topological order."""
    variables = ordered_variables(bn, order)
    check_cap(variables)
    names = [v.name for v in variables]
    cpts = {n: _cpt_array(bn, n) for n in names}
    return JointTable(tuple(variables), _product_joint(bn, names, cpts))


def cond_prob(joint: JointTable, q: Query) -> float:
    """``Pr(target | evidence)``; raises if the evidence has probability zero."""
    pc = joint.prob(q.evidence)
    if pc <= ZERO_MASS:
        raise UndefinedConditionalError(f"Pr({q.evidence}) = 0")
    both = q.evidence.conjoin(q.target)
    return joint.prob(both) / pc


def _table_vertices(body) -> list[np.ndarray]:
    if isinstance(body, Point):
        return [np.asarray(body.p)]
    if isinstance(body, Interval):
        return vertices_box_simplex(body.l, body.u)
    return convex_vertices(body.spec)


@dataclass
class Bounds:
    lo: float
    hi: float
    lo_witness: dict | None = None
    hi_witness: dict | None = None

    def __iter__(self):
        return iter((self.lo, self.hi))


def credal_bounds(
    net: CredalNetwork,
    q: Query,
    cap: int = MAX_COMBINATIONS,
    witness: bool = False,
) -> Bounds:
    """Exact min and max of ``Pr(target | evidence)`` over the credal set.

    The query is a ratio of multilinear functions of the table rows, so its
    extremes sit at vertex choices.  Only tables of ancestors of the query
    variables are enumerated; the rest marginalize out.
    """
    relevant = net.ancestors(q.variables)
    sub = net.subnetwork(relevant)
    order = [v.name for v in ordered_variables(sub)]
    check_cap(ordered_variables(sub))

    slots = []  # (child, row index, vertex list)
    for child in order:
        for k, t in enumerate(sub.tables_for(child)):
            slots.append((child, k, _table_vertices(t.body)))
    total = math.prod(len(s[2]) for s in slots)
    if total > cap:
        raise CapExceededError(f"{total} vertex combinations exceed the cap of {cap}")

    variables = ordered_variables(sub, order)
    ev_mask = event_mask(variables, q.evidence)
    both = q.evidence.conjoin(q.target)
    both_mask = event_mask(variables, both)

    lo = hi = None
    lo_w = hi_w = None
    rows = {child: [None] * len(parent_instantiations(sub, child)) for child in order}
    for pick in itertools.product(*(range(len(s[2])) for s in slots)):
        for (child, k, verts), i in zip(slots, pick):
            rows[child][k] = verts[i]
        cpts = {c: _cpt_array(sub, c, rows[c]) for c in order}
        joint = _product_joint(sub, order, cpts)
        pc = joint[ev_mask].sum()
        if pc <= ZERO_MASS:
            continue
        val = joint[both_mask].sum() / pc
        if lo is None or val < lo:
            lo = val
            lo_w = pick
        if hi is None or val > hi:
            hi = val
            hi_w = pick
    if lo is None:
        raise UndefinedConditionalError(f"Pr({q.evidence}) = 0 for every vertex choice")

    def describe(pick):
        return {
            f"{child}|{sub.tables_for(child)[k].given}": verts[i].tolist()
            for (child, k, verts), i in zip(slots, pick)
        }

    if witness:
        return Bounds(float(lo), float(hi), describe(lo_w), describe(hi_w))
    return Bounds(float(lo), float(hi))


def local_conditionals(joint: JointTable, net: CredalNetwork) -> dict[tuple[str, ConjunctiveEvent], np.ndarray | None]:
    """``Pr(X | pa(X))`` read off a joint for every table; None where ``Pr(pa) = 0``."""
    out = {}
    for v in net.variables:
        for pa in parent_instantiations(net, v.name):
            pc = joint.prob(pa)
            if pc <= ZERO_MASS:
                out[(v.name, pa)] = None
                continue
            row = []
            for x in v.domain:
                e = pa.conjoin(ConjunctiveEvent(((v.name, x),)))
                row.append(joint.probs[event_mask(joint.variables, e)].sum() / pc)
            out[(v.name, pa)] = np.asarray(row)
    return out


def dag_violations(joint: JointTable, net: CredalNetwork, tol: float = 1e-8) -> list[str]:
    """Local Markov check: each variable is independent of its non-descendant
    non-parents given its parents (conditioning events of mass <= tol skipped)."""
    bad = []
    for v in net.variables:
        parents = set(net.parents(v.name))
        others = set(net.names) - net.descendants(v.name) - parents - {v.name}
        if not others:
            continue
        gap = ci_gap(joint, {v.name}, others, parents, tol)
        if gap > tol:
            bad.append(
                f"{v.name} depends on {sorted(others)} given {sorted(parents)} (gap {gap:.3g})"
            )
    return bad
