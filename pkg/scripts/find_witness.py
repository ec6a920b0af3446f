"""Search for a point collider network whose global ME model breaks its DAG.

Writes the first instance with an L-infinity gap above the threshold to
src/credalme/data/collider_witness.json.
"""

import argparse
from pathlib import Path

import numpy as np

from credalme.inference import joint_of_bn
from credalme.model import (
    ConditionalSet,
    ConjunctiveEvent,
    CredalNetwork,
    Point,
    Variable,
    parent_instantiations,
    render_network,
)
from credalme.sequential import global_me_model

OUT = Path(__file__).resolve().parents[1] / "src" / "credalme" / "data" / "collider_witness.json"


def collider(c_rows) -> CredalNetwork:
    variables = (
        Variable("A", ("a1", "a2")),
        Variable("B", ("b1", "b2")),
        Variable("C", ("c1", "c2")),
    )
    skel = CredalNetwork(variables, (("A", "C"), ("B", "C")), ())
    tables = [
        ConditionalSet("A", ConjunctiveEvent(), Point((0.5, 0.5))),
        ConditionalSet("B", ConjunctiveEvent(), Point((0.5, 0.5))),
    ]
    for pa, r in zip(parent_instantiations(skel, "C"), c_rows):
        tables.append(ConditionalSet("C", pa, Point((r, round(1 - r, 2)))))
    return skel.replace_tables(tables)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threshold", type=float, default=1e-3)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    for trial in range(1000):
        rows = np.round(rng.uniform(0.05, 0.95, 4), 2)
        net = collider(rows)
        gap = np.abs(global_me_model(net).probs - joint_of_bn(net).probs).max()
        print(f"trial {trial}: C rows {rows.tolist()} gap {gap:.4g}")
        if gap > args.threshold:
            OUT.write_text(render_network(net), encoding="utf-8")
            print(f"wrote {OUT}")
            return
    raise SystemExit("no witness found")


if __name__ == "__main__":
    main()
