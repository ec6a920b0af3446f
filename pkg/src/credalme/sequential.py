"""Sequential maximum entropy selection of one joint from a credal network.

:func:`select_sequential` replaces every conditional set by its own maximum
entropy member; the product of those rows is the sequential maximum entropy
model.  :func:`select_sequential_direct` builds the same joint the long way,
one variable at a time over growing prefixes with earlier results frozen, and
exists to check the short way.  :func:`global_me_model` is the plain
(non-sequential) maximum entropy model, for comparison.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import InfeasibleError
from .model import (
    ConditionalSet,
    ConjunctiveEvent,
    Convex,
    CredalError,
    CredalNetwork,
    Interval,
    JointTable,
    Point,
    check_cap,
    enumerate_atomic_events,
    event_mask,
    is_consistent_order,
    network_kb,
    ordered_variables,
    topological_order,
    validate,
)
from .solvers import (
    DEFAULT,
    LinearizedConstraint,
    SolverConfig,
    _maxent_box,
    _maxent_hrep,
    _maxent_vrep,
    entropy,
    linearize,
    maxent_joint,
)

log = logging.getLogger(__name__)


class NetworkInvalidError(CredalError, ValueError):
    def __init__(self, report):
        super().__init__("network failed validation:\n" + str(report))
        self.report = report


@dataclass(frozen=True)
class TableDiagnostic:
    child: str
    given: ConjunctiveEvent
    kind: str
    entropy: float
    iterations: int


@dataclass(frozen=True)
class SelectionResult:
    bayes_net: CredalNetwork
    order_used: tuple[str, ...]
    per_table_diagnostics: tuple[TableDiagnostic, ...] = field(default=(), repr=False)


def solve_body(body, config: SolverConfig = DEFAULT) -> tuple[np.ndarray, int]:
    """Maximum entropy member of one conditional set, with iteration count."""
    if isinstance(body, Point):
        return np.asarray(body.p), 0
    if isinstance(body, Interval):
        return _maxent_box(body.l, body.u, config)
    spec = body.spec
    if spec.is_vrep:
        return _maxent_vrep(spec.vertices, config)
    return _maxent_hrep(spec.halfspaces, spec.dim, config)


def select_sequential(net: CredalNetwork, config: SolverConfig = DEFAULT) -> SelectionResult:
    report = validate(net)
    if not report.ok:
        raise NetworkInvalidError(report)
    tables = []
    diags = []
    for t in net.tables:
        try:
            r, iters = solve_body(t.body, config)
        except InfeasibleError as exc:
            raise InfeasibleError(f"table {t.child}|{t.given}: {exc}") from None
        if isinstance(t.body, Point):
            tables.append(t)
        else:
            tables.append(ConditionalSet(t.child, t.given, Point(r)))
        diags.append(TableDiagnostic(t.child, t.given, t.body.kind, entropy(r), iters))
    return SelectionResult(
        net.replace_tables(tables), tuple(topological_order(net)), tuple(diags)
    )


def _freeze_constraints(prev: JointTable, variables) -> list[LinearizedConstraint]:
    """Pin ``Pr(omega) = prev(omega)`` for every atom of the previous prefix."""
    n = check_cap(variables)
    out = []
    for omega, q in zip(enumerate_atomic_events(prev.variables), prev.probs):
        ev = ConjunctiveEvent(tuple(omega.assignments.items()))
        row = event_mask(variables, ev).astype(float) - q * np.ones(n)
        out.append(LinearizedConstraint.from_dense(row, "=", f"freeze {ev} = {q:.12g}"))
    return out


def select_sequential_direct(
    net: CredalNetwork,
    order: Sequence[str] | None = None,
    config: SolverConfig = DEFAULT,
) -> JointTable:
    """Sequential maximum entropy model computed literally over prefixes.

    Step ``i`` maximizes entropy over the first ``i`` variables subject to the
    conditionals concluding on the ``i``-th variable and to the previous
    step's distribution, held fixed atom by atom.
    """
    report = validate(net)
    if not report.ok:
        raise NetworkInvalidError(report)
    if order is None:
        order = topological_order(net)
    order = list(order)
    if not is_consistent_order(net, order):
        raise ValueError(f"order {order} is not consistent with the network's edges")
    kb = network_kb(net)
    joint = None
    for i, name in enumerate(order):
        variables = ordered_variables(net, order[: i + 1])
        own = [c for c in kb if _concludes_on(c, name)]
        constraints = linearize(own, variables)
        if joint is not None:
            constraints += _freeze_constraints(joint, variables)
        joint = maxent_joint(variables, constraints, config)
        log.debug("direct step %d (%s): entropy %.6f", i + 1, name, entropy(joint.probs))
    return joint


def _concludes_on(item, name: str) -> bool:
    if hasattr(item, "conclusion"):
        return name in item.conclusion.variables
    return item.variable == name


def global_me_model(net: CredalNetwork, config: SolverConfig = DEFAULT) -> JointTable:
    """Maximum entropy model of the network's conditionals, ignoring the DAG."""
    variables = ordered_variables(net)
    return maxent_joint(variables, linearize(net, variables), config)
