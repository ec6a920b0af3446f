"""Bundled example networks."""

from __future__ import annotations

from importlib import resources

from .model import (
    Conditional,
    ConditionalSet,
    ConjunctiveEvent,
    CredalNetwork,
    Interval,
    Variable,
    parse_network,
)


def fixture_text(name: str) -> str:
    return resources.files("credalme").joinpath("data", name).read_text(encoding="utf-8")


def example52() -> CredalNetwork:
    """Five-variable interval network with the chain A -> C -> F."""
    return parse_network(fixture_text("example52.json"))


def collider_witness() -> CredalNetwork:
    """Point network A -> C <- B whose global maximum entropy model breaks A ⊥ B."""
    return parse_network(fixture_text("collider_witness.json"))


BURGLARY_VARIABLES = (
    Variable("A", ("a", "na")),
    Variable("B", ("b", "nb")),
    Variable("C", ("c", "nc")),
)


def burglary(u: float) -> CredalNetwork:
    """Interval chain A -> B -> C where only ``Pr(C=c | B=b) = u`` is known.

    A is burglary, B the alarm, C the phone call.
    """
    A, B, C = BURGLARY_VARIABLES
    ev = ConjunctiveEvent.of
    vacuous = Interval((0.0, 0.0), (1.0, 1.0))
    tables = (
        ConditionalSet("A", ev(), vacuous),
        ConditionalSet("B", ev(A="a"), vacuous),
        ConditionalSet("B", ev(A="na"), vacuous),
        ConditionalSet("C", ev(B="b"), Interval((u, 1.0 - u), (u, 1.0 - u))),
        ConditionalSet("C", ev(B="nb"), vacuous),
    )
    return CredalNetwork(BURGLARY_VARIABLES, (("A", "B"), ("B", "C")), tables)


def burglary_kb(u: float) -> list[Conditional]:
    """The single conditional ``(C=c | B=b)[u]``."""
    return [Conditional.point({"C": "c"}, {"B": "b"}, u)]


def fall_off_curve(u: float) -> float:
    """Closed form of ``Pr(B=b | A=a)`` in the global maximum entropy model of :func:`burglary_kb`."""
    return 1.0 / (1.0 + 2.0 * u**u * (1.0 - u) ** (1.0 - u))
