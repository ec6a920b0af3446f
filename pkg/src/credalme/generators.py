"""Random networks and knowledge bases for property tests and theorem checks."""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .model import (
    Conditional,
    ConditionalSet,
    ConjunctiveEvent,
    Convex,
    ConvexSpec,
    CredalNetwork,
    Interval,
    Point,
    Variable,
    parent_instantiations,
)

NAMES = "ABCDEFGH"


def random_distribution(rng: np.random.Generator, d: int, floor: float = 0.02) -> np.ndarray:
    """Dirichlet(1) draw kept at least ``floor`` away from zero in every entry."""
    p = rng.dirichlet(np.ones(d))
    p = floor + (1 - d * floor) * p
    return p / p.sum()


def random_interval(rng: np.random.Generator, d: int) -> Interval:
    q = random_distribution(rng, d)
    l = np.clip(q - rng.uniform(0, 0.3, d), 0.0, 1.0)
    u = np.clip(q + rng.uniform(0, 0.3, d), 0.0, 1.0)
    return Interval(l, u)


def random_vertices(rng: np.random.Generator, d: int, k: int | None = None) -> Convex:
    q = random_distribution(rng, d)
    k = k or int(rng.integers(1, 5))
    verts = []
    for _ in range(k):
        a = rng.uniform(0.1, 0.8)
        verts.append((1 - a) * q + a * rng.dirichlet(np.ones(d)))
    return Convex(ConvexSpec(vertices=[v / v.sum() for v in verts]))


def random_body(rng: np.random.Generator, d: int, kinds: Sequence[str]):
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "point":
        return Point(random_distribution(rng, d))
    if kind == "interval":
        return random_interval(rng, d)
    if kind == "convex-v":
        return random_vertices(rng, d)
    raise ValueError(kind)


def random_variables(rng: np.random.Generator, n: int, d_max: int) -> tuple[Variable, ...]:
    out = []
    for i in range(n):
        d = int(rng.integers(2, d_max + 1))
        name = NAMES[i]
        out.append(Variable(name, tuple(f"{name.lower()}{j + 1}" for j in range(d))))
    return tuple(out)


def _fill_tables(rng, variables, edges, kinds) -> CredalNetwork:
    skeleton = CredalNetwork(variables, edges, ())
    tables = []
    for v in variables:
        for pa in parent_instantiations(skeleton, v.name):
            tables.append(ConditionalSet(v.name, pa, random_body(rng, v.size, kinds)))
    return skeleton.replace_tables(tables)


def random_tree(
    rng: np.random.Generator,
    n_max: int = 5,
    d_max: int = 3,
    kinds: Sequence[str] = ("point",),
) -> CredalNetwork:
    """Directed tree: node i > 0 gets exactly one parent among nodes < i."""
    n = int(rng.integers(2, n_max + 1))
    variables = random_variables(rng, n, d_max)
    edges = tuple(
        (variables[int(rng.integers(i))].name, variables[i].name) for i in range(1, n)
    )
    return _fill_tables(rng, variables, edges, kinds)


def random_dag(
    rng: np.random.Generator,
    n_max: int = 4,
    d_max: int = 3,
    kinds: Sequence[str] = ("point", "interval", "convex-v"),
    edge_prob: float = 0.5,
) -> CredalNetwork:
    n = int(rng.integers(2, n_max + 1))
    variables = random_variables(rng, n, d_max)
    edges = tuple(
        (variables[i].name, variables[j].name)
        for i, j in itertools.combinations(range(n), 2)
        if rng.random() < edge_prob
    )
    return _fill_tables(rng, variables, edges, kinds)


def random_event(rng, variables, names) -> ConjunctiveEvent:
    return ConjunctiveEvent(
        tuple((n, variables[n].domain[int(rng.integers(variables[n].size))]) for n in names)
    )


def random_kb(
    rng: np.random.Generator,
    n_max: int = 4,
    d_max: int = 3,
    n_conditionals: int | None = None,
) -> tuple[tuple[Variable, ...], list[Conditional]]:
    """Satisfiable point/interval conditionals over arbitrary conjunctive events.

    Every number is read off (or widened around) one hidden positive joint,
    so that joint is a model.
    """
    from .model import JointTable

    n = int(rng.integers(2, n_max + 1))
    variables = random_variables(rng, n, d_max)
    by_name = {v.name: v for v in variables}
    hidden = JointTable(variables, random_distribution(rng, int(np.prod([v.size for v in variables])), 1e-3))
    kb = []
    for _ in range(n_conditionals or int(rng.integers(1, 4))):
        names = [v.name for v in variables]
        k = int(rng.integers(1, min(3, n) + 1))
        chosen = list(rng.choice(names, size=k, replace=False))
        n_prem = int(rng.integers(0, k))
        premise = random_event(rng, by_name, sorted(chosen[:n_prem]))
        conclusion = random_event(rng, by_name, sorted(chosen[n_prem:]))
        r = hidden.prob(premise.conjoin(conclusion)) / hidden.prob(premise)
        if rng.random() < 0.5:
            kb.append(Conditional.point(conclusion, premise, r))
        else:
            lo = max(0.0, r - rng.uniform(0, 0.2))
            hi = min(1.0, r + rng.uniform(0, 0.2))
            kb.append(Conditional.interval(conclusion, premise, lo, hi))
    return variables, kb
