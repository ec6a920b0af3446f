"""Undirected co-occurrence graph of a knowledge base and independence checks.

Two variables are adjacent iff some conditional mentions both.  Separation
in that graph implies conditional independence in the maximum entropy model
of the knowledge base, which :func:`verify_imap` checks numerically.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .model import JointTable, KBItem, NetworkFormatError, Variable


@dataclass(frozen=True)
class UndirectedGraph:
    nodes: tuple[str, ...]
    edges: frozenset[frozenset[str]] = frozenset()

    def __post_init__(self):
        known = set(self.nodes)
        for e in self.edges:
            if len(e) != 2:
                raise ValueError(f"self-loop or malformed edge {set(e)}")
            if not e <= known:
                raise ValueError(f"edge {set(e)} references unknown nodes")

    def neighbours(self, node: str) -> set[str]:
        return {n for e in self.edges if node in e for n in e if n != node}

    def has_edge(self, x: str, y: str) -> bool:
        return frozenset((x, y)) in self.edges


def build_gkb(kb: Iterable[KBItem], variables: Sequence[str | Variable]) -> UndirectedGraph:
    names = tuple(v.name if isinstance(v, Variable) else v for v in variables)
    known = set(names)
    edges = set()
    for item in kb:
        vs = item.variables
        unknown = vs - known
        if unknown:
            raise NetworkFormatError(f"conditional {item} mentions unknown {sorted(unknown)}")
        for x, y in itertools.combinations(sorted(vs), 2):
            edges.add(frozenset((x, y)))
    return UndirectedGraph(names, frozenset(edges))


def separates(g: UndirectedGraph, X: Iterable[str], Y: Iterable[str], Z: Iterable[str]) -> bool:
    """Whether every path from X to Y passes through Z."""
    X, Y, Z = set(X), set(Y), set(Z)
    if X & Y or X & Z or Y & Z:
        raise ValueError("X, Y and Z must be pairwise disjoint")
    seen = set(X)
    queue = deque(X)
    while queue:
        n = queue.popleft()
        if n in Y:
            return False
        for m in g.neighbours(n):
            if m not in seen and m not in Z:
                seen.add(m)
                queue.append(m)
    return True


def ci_gap(joint: JointTable, X, Y, Z, tol: float = 1e-5) -> float:
    """Largest ``|Pr(x|y,z) - Pr(x|z)|`` over instantiations with ``Pr(y,z) > tol``."""
    X, Y, Z = sorted(X), sorted(Y), sorted(Z)
    if not X or not Y:
        return 0.0
    m = joint.marginal(X + Y + Z)
    nx = int(np.prod(m.shape[: len(X)]))
    ny = int(np.prod(m.shape[len(X): len(X) + len(Y)]))
    m = m.reshape(nx, ny, -1)
    pyz = m.sum(axis=0)
    pxz = m.sum(axis=1)
    pz = pxz.sum(axis=0)
    ok = pyz > tol
    if not ok.any():
        return 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        x_given_yz = m / pyz[None]
        x_given_z = pxz / pz[None]
    diff = np.abs(x_given_yz - x_given_z[:, None, :])
    return float(diff[:, ok].max())


def cond_independent(joint: JointTable, X, Y, Z, tol: float = 1e-5) -> bool:
    return ci_gap(joint, X, Y, Z, tol) <= tol


@dataclass
class ImapReport:
    checked: int = 0
    separated: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        return json.dumps(
            {"checked": self.checked, "separated": self.separated, "violations": self.violations},
            indent=1,
        )


def _all_triples(names: Sequence[str]):
    for roles in itertools.product(range(4), repeat=len(names)):
        X = [n for n, r in zip(names, roles) if r == 1]
        Y = [n for n, r in zip(names, roles) if r == 2]
        Z = [n for n, r in zip(names, roles) if r == 3]
        if X and Y:
            yield X, Y, Z


def verify_imap(
    kb: Sequence[KBItem],
    joint: JointTable,
    trials: int = 500,
    tol: float = 1e-5,
    seed: int = 0,
) -> ImapReport:
    """Check that every triple separated in the KB graph is independent in ``joint``.

    Triples (X, Y, Z) are exhausted when there are at most ``trials`` of them,
    otherwise ``trials`` are drawn uniformly.
    """
    names = list(joint.names)
    g = build_gkb(kb, names)
    total = sum(1 for _ in _all_triples(names))
    if total <= trials:
        triples = list(_all_triples(names))
    else:
        rng = random.Random(seed)
        triples = []
        while len(triples) < trials:
            roles = [rng.randrange(4) for _ in names]
            X = [n for n, r in zip(names, roles) if r == 1]
            Y = [n for n, r in zip(names, roles) if r == 2]
            Z = [n for n, r in zip(names, roles) if r == 3]
            if X and Y:
                triples.append((X, Y, Z))
    report = ImapReport()
    for X, Y, Z in triples:
        report.checked += 1
        if not separates(g, X, Y, Z):
            continue
        report.separated += 1
        gap = ci_gap(joint, X, Y, Z, tol)
        if gap > tol:
            report.violations.append({"x": X, "y": Y, "z": Z, "max_gap": gap})
    return report
