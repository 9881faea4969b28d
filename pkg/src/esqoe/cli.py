"""Command-line front end.

Subcommands: ``gen`` (write a seeded synthetic instance directory),
``rank`` (inspect a CP-net file: ranked outcomes and the resulting slot
preferences), ``allocate`` (run one strategy on an instance directory and
report QoE), ``bench`` (the strategy-comparison harness) and ``plot``
(render benchmark CSVs as SVG charts).

``--seed`` falls back to the ESQOE_SEED environment variable, then 0.
Exit codes: 0 on success, 2 on usage errors, 1 on any other failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import allocation, bench, cpnet, metrics, plotting, workload


def _default_seed() -> int:
    env = os.environ.get("ESQOE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"ESQOE_SEED must be an integer, got {env!r}") from None
    return 0


def _parse_counts(spec: str) -> tuple[int, ...]:
    """Parse 'a:b:step' into the inclusive range a, a+step, .., b."""
    pieces = spec.split(":")
    if len(pieces) != 3:
        raise ValueError(f"--counts expects a:b:step, got {spec!r}")
    try:
        a, b, step = (int(p) for p in pieces)
    except ValueError:
        raise ValueError(f"--counts expects integers a:b:step, got {spec!r}") from None
    if step <= 0 or a > b or a < 1:
        raise ValueError(f"--counts needs 1 <= a <= b and step > 0, got {spec!r}")
    return tuple(range(a, b + 1, step))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esqoe",
        description="Allocate crowdsourced wireless-energy services to time slots "
                    "and score the result by quality of experience.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a seeded synthetic instance directory")
    p_gen.add_argument("--out", required=True, help="instance directory to write")
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--services", type=int, default=340)
    p_gen.add_argument("--requests", type=int, default=100)
    p_gen.add_argument("--slots", type=int, default=8)
    p_gen.add_argument("--credit", type=float, default=1.0)
    p_gen.add_argument("--rate", type=float, default=1.0)

    p_rank = sub.add_parser("rank", help="rank the outcomes of a CP-net file")
    p_rank.add_argument("cpnet_file")
    p_rank.add_argument("--pid", default=None, help="only show this provider's block")

    p_alloc = sub.add_parser("allocate", help="run one strategy on an instance directory")
    p_alloc.add_argument("instance_dir")
    p_alloc.add_argument("--strategy", choices=sorted(allocation.STRATEGIES),
                         default="importance")
    p_alloc.add_argument("--out", default=None,
                         help="directory for allocation/summary/QoE report CSVs")

    p_bench = sub.add_parser("bench", help="compare strategies over a seeded trial grid")
    p_bench.add_argument("--out", required=True, help="directory for records/aggregate CSVs")
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--trials", type=int, default=200)
    p_bench.add_argument("--counts", default="100:600:100", help="request counts as a:b:step")
    p_bench.add_argument("--services", type=int, default=340)
    p_bench.add_argument("--slots", type=int, default=8)
    p_bench.add_argument("--strategies", default="importance,fcfs,demand",
                         help="comma-separated strategy names")

    p_plot = sub.add_parser("plot", help="render benchmark CSV output as SVG charts")
    p_plot.add_argument("csv_path", help="records or aggregate CSV from `esqoe bench`")
    p_plot.add_argument("--out", required=True, help="directory for the SVG files")

    return parser


def _cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    params = workload.GenParams(
        seed=seed,
        n_services=args.services,
        n_requests=args.requests,
        n_slots=args.slots,
        credit=args.credit,
        rate=args.rate,
    )
    instance = workload.generate(params)
    workload.save_instance(instance, args.out)
    print(f"wrote instance with {args.services} services, {args.requests} requests, "
          f"{args.slots} slots to {args.out} (seed {seed})")
    return 0


def _cmd_rank(args) -> int:
    blocks = cpnet.parse_cpnet_file(args.cpnet_file)
    if args.pid is not None:
        blocks = [b for b in blocks if b.pid == args.pid]
        if not blocks:
            raise ValueError(f"no provider block named {args.pid} in {args.cpnet_file}")
    for block in blocks:
        print(f"provider {block.pid}")
        names = block.net.names
        for outcome, rank in cpnet.rank_outcomes(block.net):
            assignment = ", ".join(f"{n}={v}" for n, v in zip(names, outcome))
            slot = block.slot_map.slot_of(block.net, outcome)
            where = f"slot {slot}" if slot is not None else "unmapped"
            print(f"  rank {rank}: {assignment} ({where})")
        ptp = cpnet.to_ptp(block.net, block.slot_map, block.pid)
        body = "; ".join(f"slot {s} rank {k}" for s, k in ptp.prefs)
        print(f"  preferences: {body}")
    return 0


def _cmd_allocate(args) -> int:
    instance = workload.load_instance(args.instance_dir)
    inp = allocation.StrategyInput.from_instance(instance)
    plan = allocation.STRATEGIES[args.strategy](inp)
    report = metrics.qoe(instance.edd, instance.business_model, plan)
    print(f"strategy {args.strategy}: {len(plan.entries)} allocation entries")
    print(f"qoe = {report.qoe!r}")
    print(f"total_reward = {report.total_reward!r}")
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        allocation.write_allocation_report(plan, os.path.join(args.out, "allocation.csv"))
        allocation.write_slot_summary(plan, inp, os.path.join(args.out, "slot_summary.csv"))
        metrics.write_qoe_report(report, instance.edd, plan,
                                 os.path.join(args.out, "qoe_report.csv"))
        print(f"reports written to {args.out}")
    return 0


def _cmd_bench(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    config = bench.BenchConfig(
        seed=seed,
        request_counts=_parse_counts(args.counts),
        n_services=args.services,
        trials=args.trials,
        n_slots=args.slots,
        strategies=tuple(s.strip() for s in args.strategies.split(",") if s.strip()),
    )
    records, aggregates = bench.run_bench(config)
    os.makedirs(args.out, exist_ok=True)
    records_path = os.path.join(args.out, "records.csv")
    aggregate_path = os.path.join(args.out, "aggregate.csv")
    bench.write_records_csv(records, records_path)
    bench.write_aggregate_csv(aggregates, aggregate_path)
    print(f"kernel backend: {allocation.kernel_backend()}")
    print(f"{len(records)} records -> {records_path}")
    print("strategy        requests   mean qoe     sd qoe   mean time (us)")
    for a in aggregates:
        print(f"{a.strategy:<15} {a.n_requests:>8}   {a.mean_qoe:.4f}   "
              f"{a.sd_qoe:.4f}   {a.mean_exec_time_us:>12.1f}")
    return 0


def _cmd_plot(args) -> int:
    qoe_path, time_path = plotting.plot_benchmark(args.csv_path, args.out)
    print(f"wrote {qoe_path}")
    print(f"wrote {time_path}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "rank": _cmd_rank,
    "allocate": _cmd_allocate,
    "bench": _cmd_bench,
    "plot": _cmd_plot,
}


def cli_dispatch(argv: list[str]) -> int:
    """Run the CLI on an argv list; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as err:
        print(f"esqoe {args.command}: error: {err}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
