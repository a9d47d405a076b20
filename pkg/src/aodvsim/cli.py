"""Command line: ``aodvsim run`` executes a scenario, ``aodvsim stats`` summarises a trace.

Exit codes: 0 success, 2 scenario error, 3 trace parse error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from aodvsim.scenario import ScenarioError, load_scenario, parse_bool
from aodvsim.sim import Simulation
from aodvsim.stats import compute_stats
from aodvsim.trace import TraceParseError, read_trace

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_TRACE = 3
EXIT_IO = 4


def _onoff(text: str) -> bool:
    try:
        return parse_bool(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected on/off, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aodvsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write its trace")
    run.add_argument("--scenario", required=True, help="scenario file")
    run.add_argument("--trace-out", required=True, help="trace file to write")
    run.add_argument("--seed", type=int, default=None,
                     help="random seed (default: scenario seed, else 0)")
    run.add_argument("--hello", type=_onoff, default=None, metavar="on|off")
    run.add_argument("--lld", type=_onoff, default=None, metavar="on|off",
                     help="link-layer break detection")
    run.add_argument("--stop", type=float, default=None, help="override stop time")

    stats = sub.add_parser("stats", help="summarise a trace file")
    stats.add_argument("--trace", required=True)
    return p


def cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as e:
        print(f"{args.scenario}: {e}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as e:
        print(f"cannot read scenario: {e}", file=sys.stderr)
        return EXIT_IO
    try:
        sim = Simulation(scenario, seed=args.seed, hello=args.hello, lld=args.lld,
                         stop=args.stop)
    except ValueError as e:
        print(f"{args.scenario}: {e}", file=sys.stderr)
        return EXIT_SCENARIO
    sim.run()
    try:
        n = sim.write_trace(args.trace_out)
    except OSError as e:
        print(f"cannot write trace: {e}", file=sys.stderr)
        return EXIT_IO
    print(f"simulated {sim.kernel.now:.3f} s, {sim.kernel.processed} events, "
          f"{n} trace records -> {args.trace_out}")
    return EXIT_OK


def cmd_stats(args) -> int:
    try:
        records = read_trace(args.trace)
    except TraceParseError as e:
        print(f"{args.trace}: {e}", file=sys.stderr)
        return EXIT_TRACE
    except OSError as e:
        print(f"cannot read trace: {e}", file=sys.stderr)
        return EXIT_IO
    report = compute_stats(records)
    print(report.table())
    print()
    print(report.key_values())
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return cmd_stats(args)


if __name__ == "__main__":
    sys.exit(main())
