"""Credal network data model: variables, events, conditional tables, parsing.

A network is a DAG over discrete variables plus one conditional set per
(variable, parent instantiation) pair.  Conditional sets are point
distributions, per-value probability intervals, or finitely generated convex
sets in vertex or halfspace form.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

# Largest number of atomic events any dense operation is allowed to build.
MAX_ATOMS = 2**20

SUM_TOL = 1e-9


class CredalError(Exception):
    """Base class for all errors raised by this package."""


class NetworkFormatError(CredalError, ValueError):
    """The network document is malformed or references unknown names."""


class CycleError(CredalError, ValueError):
    pass


class CapExceededError(CredalError):
    """An operation would materialize more atoms/combinations than allowed."""


# ---------------------------------------------------------------------------
# Variables and events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    name: str
    domain: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if len(self.domain) < 2:
            raise NetworkFormatError(f"variable {self.name!r} needs at least 2 values")
        if len(set(self.domain)) != len(self.domain):
            raise NetworkFormatError(f"variable {self.name!r} has repeated values")

    @property
    def size(self) -> int:
        return len(self.domain)

    def index(self, value: str) -> int:
        try:
            return self.domain.index(value)
        except ValueError:
            raise NetworkFormatError(
                f"value {value!r} not in domain of {self.name!r}"
            ) from None


@dataclass(frozen=True)
class ConjunctiveEvent:
    """A conjunction of ``variable = value`` assignments; empty means true."""

    items: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        items = tuple(sorted((str(k), str(v)) for k, v in self.items))
        names = [k for k, _ in items]
        if len(set(names)) != len(names):
            raise NetworkFormatError(f"variable repeated in event {items}")
        object.__setattr__(self, "items", items)

    @classmethod
    def of(cls, assignments: Mapping[str, str] | None = None, **kw: str) -> "ConjunctiveEvent":
        merged = dict(assignments or {})
        merged.update(kw)
        return cls(tuple(merged.items()))

    @classmethod
    def parse(cls, text: str) -> "ConjunctiveEvent":
        """Parse ``"A=a1,C=c2"``; ``"true"`` or an empty string is the true event."""
        text = text.strip()
        if text in ("", "true", "⊤"):
            return cls()
        pairs = []
        for part in text.split(","):
            name, sep, value = part.partition("=")
            if not sep or not name.strip() or not value.strip():
                raise NetworkFormatError(f"bad event term {part!r} in {text!r}")
            pairs.append((name.strip(), value.strip()))
        return cls(tuple(pairs))

    @property
    def assignments(self) -> dict[str, str]:
        return dict(self.items)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.items)

    def is_true(self) -> bool:
        return not self.items

    def conjoin(self, other: "ConjunctiveEvent") -> "ConjunctiveEvent | None":
        """Return ``self ∧ other`` or None if the two assign different values."""
        merged = dict(self.items)
        for k, v in other.items:
            if merged.setdefault(k, v) != v:
                return None
        return ConjunctiveEvent(tuple(merged.items()))

    def __str__(self) -> str:
        if not self.items:
            return "true"
        return ",".join(f"{k}={v}" for k, v in self.items)


TRUE = ConjunctiveEvent()


class AtomicEvent(tuple):
    """A full instantiation ``(index, values)`` of an ordered variable list."""

    __slots__ = ()

    def __new__(cls, index: int, values: tuple[str, ...], names: tuple[str, ...]):
        return tuple.__new__(cls, (index, values, names))

    @property
    def index(self) -> int:
        return self[0]

    @property
    def values(self) -> tuple[str, ...]:
        return self[1]

    @property
    def assignments(self) -> dict[str, str]:
        return dict(zip(self[2], self[1]))


def n_atoms(variables: Sequence[Variable]) -> int:
    return math.prod(v.size for v in variables)


def check_cap(variables: Sequence[Variable], cap: int = MAX_ATOMS) -> int:
    n = n_atoms(variables)
    if n > cap:
        raise CapExceededError(f"{n} atomic events exceed the cap of {cap}")
    return n


def enumerate_atomic_events(variables: Sequence[Variable]) -> list[AtomicEvent]:
    """All full instantiations in mixed-radix order, last variable fastest."""
    check_cap(variables)
    names = tuple(v.name for v in variables)
    return [
        AtomicEvent(i, values, names)
        for i, values in enumerate(itertools.product(*(v.domain for v in variables)))
    ]


def atom_index(variables: Sequence[Variable], assignments: Mapping[str, str]) -> int:
    idx = 0
    for v in variables:
        idx = idx * v.size + v.index(assignments[v.name])
    return idx


def implies(omega: AtomicEvent, c: ConjunctiveEvent) -> bool:
    a = omega.assignments
    for name, value in c.items:
        if name not in a:
            raise NetworkFormatError(f"unknown variable {name!r} in event {c}")
        if a[name] != value:
            return False
    return True


def event_mask(variables: Sequence[Variable], c: ConjunctiveEvent | None) -> np.ndarray:
    """Boolean vector over atoms marking those that imply ``c``.

    ``None`` stands for a contradictory event and yields an all-false mask.
    """
    shape = tuple(v.size for v in variables)
    if c is None:
        return np.zeros(int(np.prod(shape)), dtype=bool)
    mask = np.ones(shape, dtype=bool)
    pos = {v.name: i for i, v in enumerate(variables)}
    for name, value in c.items:
        if name not in pos:
            raise NetworkFormatError(f"unknown variable {name!r} in event {c}")
        var = variables[pos[name]]
        sel = np.zeros(var.size, dtype=bool)
        sel[var.index(value)] = True
        bshape = [1] * len(variables)
        bshape[pos[name]] = var.size
        mask = mask & sel.reshape(bshape)
    return mask.reshape(-1)


# ---------------------------------------------------------------------------
# Conditional set bodies
# ---------------------------------------------------------------------------


def _vec(xs: Iterable[float]) -> tuple[float, ...]:
    return tuple(float(x) for x in xs)


@dataclass(frozen=True)
class Point:
    p: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", _vec(self.p))

    kind = "point"

    @property
    def dim(self) -> int:
        return len(self.p)


@dataclass(frozen=True)
class Interval:
    l: tuple[float, ...]
    u: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "l", _vec(self.l))
        object.__setattr__(self, "u", _vec(self.u))

    kind = "interval"

    @property
    def dim(self) -> int:
        return len(self.l)


@dataclass(frozen=True)
class Halfspace:
    """The constraint ``a · r <= b``."""

    a: tuple[float, ...]
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", _vec(self.a))
        object.__setattr__(self, "b", float(self.b))


@dataclass(frozen=True)
class ConvexSpec:
    """A convex subset of the probability simplex.

    Exactly one of ``vertices`` (convex hull of the given points) or
    ``halfspaces`` (intersection with the simplex) is set.
    """

    vertices: tuple[tuple[float, ...], ...] | None = None
    halfspaces: tuple[Halfspace, ...] | None = None
    dim: int = field(default=0)

    def __post_init__(self):
        if (self.vertices is None) == (self.halfspaces is None):
            raise NetworkFormatError("convex set needs exactly one of vertices/halfspaces")
        if self.vertices is not None:
            verts = tuple(_vec(v) for v in self.vertices)
            object.__setattr__(self, "vertices", verts)
            if verts and not self.dim:
                object.__setattr__(self, "dim", len(verts[0]))
        else:
            hs = tuple(
                h if isinstance(h, Halfspace) else Halfspace(h[0], h[1])
                for h in self.halfspaces
            )
            object.__setattr__(self, "halfspaces", hs)
            if hs and not self.dim:
                object.__setattr__(self, "dim", len(hs[0].a))
        if self.dim < 1:
            raise NetworkFormatError("convex set dimension unknown")

    @property
    def is_vrep(self) -> bool:
        return self.vertices is not None


@dataclass(frozen=True)
class Convex:
    spec: ConvexSpec

    @property
    def kind(self) -> str:
        return "convex-v" if self.spec.is_vrep else "convex-h"

    @property
    def dim(self) -> int:
        return self.spec.dim


Body = Union[Point, Interval, Convex]


@dataclass(frozen=True)
class ConditionalSet:
    child: str
    given: ConjunctiveEvent
    body: Body


def body_violations(body: Body, tol: float = SUM_TOL) -> list[str]:
    """Local well-formedness problems of a single table body."""
    out = []
    if isinstance(body, Point):
        p = np.asarray(body.p)
        if np.any(p < -tol) or np.any(p > 1 + tol):
            out.append("point probabilities outside [0, 1]")
        if abs(p.sum() - 1.0) > tol:
            out.append(f"point probabilities sum to {p.sum():.12g}, not 1")
    elif isinstance(body, Interval):
        l, u = np.asarray(body.l), np.asarray(body.u)
        if l.shape != u.shape:
            out.append("interval bounds have different lengths")
            return out
        if np.any(l < -tol) or np.any(u > 1 + tol) or np.any(l > u + tol):
            out.append("interval bounds violate 0 <= l <= u <= 1")
        if l.sum() > 1 + tol:
            out.append(f"Σl > 1 (Σl = {l.sum():.12g})")
        if u.sum() < 1 - tol:
            out.append(f"Σu < 1 (Σu = {u.sum():.12g})")
    else:
        spec = body.spec
        if spec.is_vrep:
            if not spec.vertices:
                out.append("empty vertex list")
            for v in spec.vertices:
                v = np.asarray(v)
                if len(v) != spec.dim:
                    out.append("vertex has wrong dimension")
                elif np.any(v < -tol) or abs(v.sum() - 1.0) > tol:
                    out.append(f"vertex {tuple(v)} is not on the probability simplex")
        else:
            if any(len(h.a) != spec.dim for h in spec.halfspaces):
                out.append("halfspace has wrong dimension")
            elif not hrep_feasible(spec):
                out.append("empty convex set (halfspaces infeasible on the simplex)")
    return out


def hrep_feasible(spec: ConvexSpec, tol: float = 1e-9) -> bool:
    from scipy.optimize import linprog

    d = spec.dim
    if not spec.halfspaces:
        return True
    A = np.array([h.a for h in spec.halfspaces])
    b = np.array([h.b for h in spec.halfspaces])
    res = linprog(
        np.zeros(d), A_ub=A, b_ub=b + tol, A_eq=np.ones((1, d)), b_eq=[1.0],
        bounds=[(0, None)] * d, method="highs",
    )
    return res.status == 0


def body_dim(body: Body) -> int:
    return body.dim


# ---------------------------------------------------------------------------
# Network
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CredalNetwork:
    variables: tuple[Variable, ...]
    edges: tuple[tuple[str, str], ...]
    tables: tuple[ConditionalSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "tables", tuple(self.tables))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise NetworkFormatError(f"unknown variable {name!r}")

    def parents(self, name: str) -> tuple[str, ...]:
        """Parents of ``name`` in declaration order of the variables."""
        ps = {p for p, c in self.edges if c == name}
        return tuple(n for n in self.names if n in ps)

    def children(self, name: str) -> tuple[str, ...]:
        cs = {c for p, c in self.edges if p == name}
        return tuple(n for n in self.names if n in cs)

    def descendants(self, name: str) -> set[str]:
        seen: set[str] = set()
        stack = list(self.children(name))
        while stack:
            n = stack.pop()
            if n not in seen:
                seen.add(n)
                stack.extend(self.children(n))
        return seen

    def ancestors(self, names: Iterable[str]) -> set[str]:
        """``names`` together with all their ancestors."""
        seen: set[str] = set()
        stack = list(names)
        while stack:
            n = stack.pop()
            if n not in seen:
                seen.add(n)
                stack.extend(self.parents(n))
        return seen

    def table(self, child: str, given: ConjunctiveEvent) -> ConditionalSet:
        for t in self.tables:
            if t.child == child and t.given == given:
                return t
        raise KeyError(f"no table for {child} | {given}")

    def tables_for(self, child: str) -> list[ConditionalSet]:
        """Tables of ``child`` in parent-instantiation order."""
        return [self.table(child, pa) for pa in parent_instantiations(self, child)]

    def is_point(self) -> bool:
        return all(isinstance(t.body, Point) for t in self.tables)

    def is_tree(self) -> bool:
        """Directed tree: one root, every other node has exactly one parent."""
        n_par = [len(self.parents(n)) for n in self.names]
        return n_par.count(0) == 1 and all(k <= 1 for k in n_par) and is_dag(self)

    def replace_tables(self, tables: Iterable[ConditionalSet]) -> "CredalNetwork":
        return CredalNetwork(self.variables, self.edges, tuple(tables))

    def subnetwork(self, names: Iterable[str]) -> "CredalNetwork":
        """Restriction to an ancestrally closed set of variables."""
        keep = set(names)
        return CredalNetwork(
            tuple(v for v in self.variables if v.name in keep),
            tuple(e for e in self.edges if e[0] in keep and e[1] in keep),
            tuple(t for t in self.tables if t.child in keep),
        )


def parent_instantiations(net: CredalNetwork, var: str) -> list[ConjunctiveEvent]:
    net.variable(var)
    pvars = [net.variable(p) for p in net.parents(var)]
    if not pvars:
        return [TRUE]
    names = [p.name for p in pvars]
    return [
        ConjunctiveEvent(tuple(zip(names, values)))
        for values in itertools.product(*(p.domain for p in pvars))
    ]


def _kahn(names: Sequence[str], edges: Iterable[tuple[str, str]]) -> list[str]:
    indeg = {n: 0 for n in names}
    succ: dict[str, list[str]] = {n: [] for n in names}
    for p, c in edges:
        if p in succ and c in indeg:
            succ[p].append(c)
            indeg[c] += 1
    heap = [n for n, k in indeg.items() if k == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for c in succ[n]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    return order


def is_dag(net: CredalNetwork) -> bool:
    return len(_kahn(net.names, net.edges)) == len(net.variables)


def topological_order(net: CredalNetwork) -> list[str]:
    """Edge-consistent variable order; ties broken lexicographically by name."""
    order = _kahn(net.names, net.edges)
    if len(order) != len(net.variables):
        stuck = sorted(set(net.names) - set(order))
        raise CycleError(f"network has a directed cycle through {stuck}")
    return order


def is_consistent_order(net: CredalNetwork, order: Sequence[str]) -> bool:
    if sorted(order) != sorted(net.names):
        return False
    pos = {n: i for i, n in enumerate(order)}
    return all(pos[p] < pos[c] for p, c in net.edges)


def ordered_variables(net: CredalNetwork, order: Sequence[str] | None = None) -> list[Variable]:
    if order is None:
        order = topological_order(net)
    return [net.variable(n) for n in order]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(f"- {v}" for v in self.violations)


def validate(net: CredalNetwork) -> ValidationReport:
    """Structural and numeric checks; problems are reported, never raised."""
    out: list[str] = []
    names = [v.name for v in net.variables]
    if len(set(names)) != len(names):
        out.append("duplicate variable names")
    known = set(names)
    for p, c in net.edges:
        if p not in known or c not in known:
            out.append(f"edge {p}->{c} references an unknown variable")
        elif p == c:
            out.append(f"self-loop on {p}")
    if not is_dag(net):
        stuck = sorted(set(names) - set(_kahn(names, net.edges)))
        out.append(f"cycle among {stuck}")

    seen: dict[tuple[str, ConjunctiveEvent], int] = {}
    for t in net.tables:
        key = (t.child, t.given)
        seen[key] = seen.get(key, 0) + 1
        if t.child not in known:
            out.append(f"table for unknown variable {t.child!r}")
            continue
        var = net.variable(t.child)
        if set(t.given.variables) != set(net.parents(t.child)):
            out.append(f"table {t.child}|{t.given} does not condition on exactly the parents")
        for name, value in t.given.items:
            if name in known and value not in net.variable(name).domain:
                out.append(f"table {t.child}|{t.given}: unknown value {value!r}")
        if body_dim(t.body) != var.size:
            out.append(f"table {t.child}|{t.given}: dimension {body_dim(t.body)} != {var.size}")
            continue
        for msg in body_violations(t.body):
            out.append(f"table {t.child}|{t.given}: {msg}")
    for key, k in seen.items():
        if k > 1:
            out.append(f"duplicate table {key[0]}|{key[1]}")
    for n in names:
        if n not in known or any(p not in known for p in net.parents(n)):
            continue
        for pa in parent_instantiations(net, n):
            if (n, pa) not in seen:
                out.append(f"missing table {n}|{pa}")
    return ValidationReport(out)


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------


def _body_from_json(obj: dict, where: str) -> Body:
    kind = obj.get("kind")
    try:
        if kind == "point":
            return Point(obj["p"])
        if kind == "interval":
            return Interval(obj["l"], obj["u"])
        if kind == "convex-v":
            return Convex(ConvexSpec(vertices=obj["vertices"]))
        if kind == "convex-h":
            hs = [Halfspace(h["a"], h["b"]) for h in obj["halfspaces"]]
            return Convex(ConvexSpec(halfspaces=hs, dim=int(obj.get("dim", 0)) or
                                     (len(hs[0].a) if hs else 0)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, NetworkFormatError):
            raise NetworkFormatError(f"{where}: {exc}") from None
        raise NetworkFormatError(f"{where}: malformed {kind} table ({exc!r})") from None
    raise NetworkFormatError(f"{where}: unknown table kind {kind!r}")


def parse_network(text: str) -> CredalNetwork:
    """Read a network from its JSON document.

    Raises NetworkFormatError on syntax errors (with line/column), unknown
    variables or values, duplicate tables, and tables whose own numbers are
    inconsistent (e.g. lower bounds summing above one).  Graph-level issues
    such as cycles or missing tables are left to :func:`validate`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(
            f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise NetworkFormatError("top-level document must be an object")
    try:
        variables = tuple(Variable(v["name"], tuple(v["domain"])) for v in doc["variables"])
    except (KeyError, TypeError) as exc:
        raise NetworkFormatError(f"malformed variables section ({exc!r})") from None
    by_name = {v.name: v for v in variables}
    if len(by_name) != len(variables):
        raise NetworkFormatError("duplicate variable names")

    edges = []
    for e in doc.get("edges", []):
        if len(e) != 2:
            raise NetworkFormatError(f"edge {e!r} must be a [parent, child] pair")
        for n in e:
            if n not in by_name:
                raise NetworkFormatError(f"edge {e!r} references unknown variable {n!r}")
        edges.append((str(e[0]), str(e[1])))

    tables = []
    seen = set()
    for i, t in enumerate(doc.get("tables", [])):
        where = f"tables[{i}]"
        child = t.get("child")
        if child not in by_name:
            raise NetworkFormatError(f"{where}: unknown variable {child!r}")
        given = t.get("given", {})
        for name, value in given.items():
            if name not in by_name:
                raise NetworkFormatError(f"{where}: unknown variable {name!r} in given")
            if value not in by_name[name].domain:
                raise NetworkFormatError(f"{where}: unknown value {value!r} for {name!r}")
        ev = ConjunctiveEvent.of(given)
        if (child, ev) in seen:
            raise NetworkFormatError(f"{where}: duplicate table {child}|{ev}")
        seen.add((child, ev))
        body = _body_from_json(t, where)
        if body_dim(body) != by_name[child].size:
            raise NetworkFormatError(
                f"{where}: vector length {body_dim(body)} does not match domain of {child!r}"
            )
        problems = body_violations(body)
        if problems:
            raise NetworkFormatError(f"{where} ({child}|{ev}): " + "; ".join(problems))
        tables.append(ConditionalSet(child, ev, body))
    return CredalNetwork(variables, tuple(edges), tuple(tables))


def load_network(path) -> CredalNetwork:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def body_to_json(body: Body) -> dict:
    if isinstance(body, Point):
        return {"kind": "point", "p": list(body.p)}
    if isinstance(body, Interval):
        return {"kind": "interval", "l": list(body.l), "u": list(body.u)}
    spec = body.spec
    if spec.is_vrep:
        return {"kind": "convex-v", "vertices": [list(v) for v in spec.vertices]}
    return {
        "kind": "convex-h",
        "dim": spec.dim,
        "halfspaces": [{"a": list(h.a), "b": h.b} for h in spec.halfspaces],
    }


def network_to_json(net: CredalNetwork) -> dict:
    tables = []
    for t in net.tables:
        row = {"child": t.child, "given": t.given.assignments}
        row.update(body_to_json(t.body))
        tables.append(row)
    return {
        "variables": [{"name": v.name, "domain": list(v.domain)} for v in net.variables],
        "edges": [list(e) for e in net.edges],
        "tables": tables,
    }


def render_network(net: CredalNetwork) -> str:
    """Canonical JSON text, one variable/edge/table per line.

    ``parse_network(render_network(n)) == n`` for every network.
    """
    doc = network_to_json(net)

    def block(key):
        rows = [json.dumps(x, ensure_ascii=False) for x in doc[key]]
        if not rows:
            return f' "{key}": []'
        return f' "{key}": [\n  ' + ",\n  ".join(rows) + "\n ]"

    return "{\n" + ",\n".join(block(k) for k in ("variables", "edges", "tables")) + "\n}\n"


# ---------------------------------------------------------------------------
# Joint tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JointTable:
    """Dense distribution over the atomic events of ``variables``."""

    variables: tuple[Variable, ...]
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.size != n_atoms(self.variables):
            raise ValueError("probability vector does not match the variables")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(v.size for v in self.variables)

    def tensor(self) -> np.ndarray:
        return self.probs.reshape(self.shape)

    def prob(self, event: ConjunctiveEvent | None) -> float:
        return float(self.probs[event_mask(self.variables, event)].sum())

    def marginal(self, names: Sequence[str]) -> np.ndarray:
        """Marginal tensor with axes in the order of ``names``."""
        pos = [self.names.index(n) for n in names]
        other = tuple(i for i in range(len(self.variables)) if i not in pos)
        m = self.tensor().sum(axis=other)
        kept = sorted(pos)
        return np.transpose(m, [kept.index(p) for p in pos])

    def reorder(self, names: Sequence[str]) -> "JointTable":
        pos = [self.names.index(n) for n in names]
        t = np.transpose(self.tensor(), pos)
        return JointTable(tuple(self.variables[i] for i in pos), t.reshape(-1))

    def entries(self) -> Iterator[tuple[dict[str, str], float]]:
        for omega, p in zip(enumerate_atomic_events(self.variables), self.probs):
            yield omega.assignments, float(p)


# ---------------------------------------------------------------------------
# General conditionals (arbitrary conjunctive premises and conclusions)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Conditional:
    """``(conclusion | premise)[lower, upper]``; a point conditional has lower == upper."""

    conclusion: ConjunctiveEvent
    premise: ConjunctiveEvent
    lower: float
    upper: float

    @classmethod
    def point(cls, conclusion, premise, r: float) -> "Conditional":
        return cls(_event(conclusion), _event(premise), float(r), float(r))

    @classmethod
    def interval(cls, conclusion, premise, l: float, u: float) -> "Conditional":
        return cls(_event(conclusion), _event(premise), float(l), float(u))

    @property
    def is_point(self) -> bool:
        return self.lower == self.upper

    @property
    def variables(self) -> set[str]:
        return set(self.conclusion.variables) | set(self.premise.variables)

    def __str__(self) -> str:
        if self.is_point:
            return f"({self.conclusion}|{self.premise})[{self.lower:.12g}]"
        return f"({self.conclusion}|{self.premise})[{self.lower:.12g},{self.upper:.12g}]"


@dataclass(frozen=True)
class ConvexConditional:
    """``(X | premise)[K]`` for a convex set K over the domain of X."""

    variable: str
    premise: ConjunctiveEvent
    spec: ConvexSpec

    @property
    def variables(self) -> set[str]:
        return {self.variable} | set(self.premise.variables)

    def __str__(self) -> str:
        return f"({self.variable}|{self.premise})[K]"


KBItem = Union[Conditional, ConvexConditional]


def _event(e) -> ConjunctiveEvent:
    if isinstance(e, ConjunctiveEvent):
        return e
    if isinstance(e, str):
        return ConjunctiveEvent.parse(e)
    return ConjunctiveEvent.of(e)


def network_kb(net: CredalNetwork) -> list[KBItem]:
    """The conditionals a network stands for, one group per table."""
    kb: list[KBItem] = []
    for t in net.tables:
        var = net.variable(t.child)
        b = t.body
        if isinstance(b, Convex):
            kb.append(ConvexConditional(t.child, t.given, b.spec))
            continue
        lo, hi = (b.p, b.p) if isinstance(b, Point) else (b.l, b.u)
        for value, l, u in zip(var.domain, lo, hi):
            kb.append(Conditional(ConjunctiveEvent(((t.child, value),)), t.given, l, u))
    return kb


def consistent_orders(net: CredalNetwork) -> list[list[str]]:
    """Every variable order that puts parents before children."""
    return [list(p) for p in itertools.permutations(net.names) if is_consistent_order(net, p)]
