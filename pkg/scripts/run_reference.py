#!/usr/bin/env python3
"""Run the 3-node reference scenario and summarise it.

    python scripts/run_reference.py [--seed N] [--hello] [--out trace.tr]
"""

import argparse
from collections import Counter
from pathlib import Path

from aodvsim.scenario import load_scenario
from aodvsim.sim import Simulation
from aodvsim.stats import compute_stats

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--hello", action="store_true", help="enable HELLO beacons")
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    sim = Simulation(load_scenario(ROOT / "scenarios" / "reference3.scn"),
                     seed=args.seed, hello=args.hello)
    sim.run()
    if args.out:
        sim.write_trace(args.out)

    print(compute_stats(sim.records).table())
    print()
    # when did node 0 hold a usable route to node 1?
    for t, dst, old, new in sim.agents[0].rtable.history:
        if dst == 1:
            print(f"  t={t:9.4f}  node 0 -> 1: {old.name:>6} -> {new.name}")
    per_node = Counter((r.node, r.label) for r in sim.records if r.label and r.event == "s")
    print()
    for (node, label), n in sorted(per_node.items()):
        print(f"  node {node} sent {n:4d} {label}")


if __name__ == "__main__":
    main()
