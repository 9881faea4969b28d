"""Experiment harness: strategy comparison over seeded trial grids.

For every (request count, trial) cell one instance is generated and every
enabled strategy runs on that same instance, so comparisons are fair by
construction (the instance fingerprint is recorded to prove it).  Per-trial
seeds are derived as ``blake2b("<seed>:<count>:<trial>", digest_size=8)``,
so extending the count grid never reshuffles existing cells.  Everything
except the measured execution time is reproducible byte for byte.
"""

from __future__ import annotations

import hashlib
import statistics
import time
from dataclasses import dataclass

from . import metrics, workload
from .allocation import STRATEGIES, StrategyInput

DEFAULT_COUNTS = (100, 200, 300, 400, 500, 600)


@dataclass(frozen=True)
class BenchConfig:
    seed: int = 0
    request_counts: tuple[int, ...] = DEFAULT_COUNTS
    n_services: int = 340
    trials: int = 200
    n_slots: int = 8
    strategies: tuple[str, ...] = ("importance", "fcfs", "demand")
    credit: float = 1.0
    rate: float = 1.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.request_counts or any(c < 1 for c in self.request_counts):
            raise ValueError("request_counts must be non-empty and positive")
        for name in self.strategies:
            if name not in STRATEGIES:
                raise ValueError(f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}")


@dataclass(frozen=True)
class BenchRecord:
    strategy: str
    n_requests: int
    trial: int
    instance_hash: str
    qoe: float
    total_reward: float
    exec_time_us: float

    def __post_init__(self):
        if self.exec_time_us < 0:
            raise ValueError("execution time cannot be negative")
        if not 0.0 <= self.qoe <= 1.0:
            raise ValueError(f"qoe {self.qoe} outside [0, 1]")


@dataclass(frozen=True)
class BenchAggregate:
    strategy: str
    n_requests: int
    mean_qoe: float
    sd_qoe: float
    mean_reward: float
    mean_exec_time_us: float


def trial_seed(seed: int, n_requests: int, trial: int) -> int:
    """Stable per-cell seed; independent of the rest of the grid."""
    digest = hashlib.blake2b(f"{seed}:{n_requests}:{trial}".encode(), digest_size=8)
    return int.from_bytes(digest.digest(), "big")


def run_bench(config: BenchConfig):
    """Run the full grid; returns (records, aggregates).

    Cells execute trial-major (all counts of trial 0, then trial 1, ...) so
    slow environmental drift never correlates with the request count, but
    records are emitted in (request count, trial, strategy-as-configured)
    order regardless; aggregates follow (strategy, request count).  Timing
    covers the compose call only, in microseconds.
    """
    by_cell: dict[tuple[int, int], list[BenchRecord]] = {}
    for trial in range(config.trials):
        for n_requests in config.request_counts:
            params = workload.GenParams(
                seed=trial_seed(config.seed, n_requests, trial),
                n_services=config.n_services,
                n_requests=n_requests,
                n_slots=config.n_slots,
                credit=config.credit,
                rate=config.rate,
            )
            instance = workload.generate(params)
            fingerprint = workload.instance_fingerprint(instance)
            inp = StrategyInput.from_instance(instance)
            cell = []
            for name in config.strategies:
                compose = STRATEGIES[name]
                start = time.perf_counter_ns()
                plan = compose(inp)
                elapsed_ns = time.perf_counter_ns() - start
                report = metrics.qoe(instance.edd, instance.business_model, plan)
                cell.append(BenchRecord(
                    strategy=name,
                    n_requests=n_requests,
                    trial=trial,
                    instance_hash=fingerprint,
                    qoe=report.qoe,
                    total_reward=report.total_reward,
                    exec_time_us=elapsed_ns / 1000.0,
                ))
            by_cell[(n_requests, trial)] = cell
    records: list[BenchRecord] = []
    for n_requests in config.request_counts:
        for trial in range(config.trials):
            records.extend(by_cell[(n_requests, trial)])
    return records, aggregate(records, config)


def aggregate(records: list[BenchRecord], config: BenchConfig | None = None) -> list[BenchAggregate]:
    """Mean and sample standard deviation per (strategy, request count).

    Without a config, strategies keep first-appearance order and counts are
    sorted ascending.
    """
    grouped: dict[tuple[str, int], list[BenchRecord]] = {}
    for rec in records:
        grouped.setdefault((rec.strategy, rec.n_requests), []).append(rec)
    if config is not None:
        strategies, counts = config.strategies, config.request_counts
    else:
        strategies = tuple(dict.fromkeys(r.strategy for r in records))
        counts = tuple(sorted({r.n_requests for r in records}))
    out = []
    for name in strategies:
        for n_requests in counts:
            cell = grouped.get((name, n_requests), [])
            if not cell:
                continue
            qoes = [r.qoe for r in cell]
            out.append(BenchAggregate(
                strategy=name,
                n_requests=n_requests,
                mean_qoe=statistics.mean(qoes),
                sd_qoe=statistics.stdev(qoes) if len(qoes) > 1 else 0.0,
                mean_reward=statistics.mean([r.total_reward for r in cell]),
                mean_exec_time_us=statistics.mean([r.exec_time_us for r in cell]),
            ))
    return out


RECORDS_HEADER = "strategy,n_requests,trial,instance_hash,qoe,total_reward,exec_time_us"
AGGREGATE_HEADER = "strategy,n_requests,mean_qoe,sd_qoe,mean_reward,mean_exec_time_us"


def write_records_csv(records: list[BenchRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(RECORDS_HEADER + "\n")
        for r in records:
            fh.write(
                f"{r.strategy},{r.n_requests},{r.trial},{r.instance_hash},"
                f"{r.qoe!r},{r.total_reward!r},{r.exec_time_us!r}\n"
            )


def write_aggregate_csv(aggregates: list[BenchAggregate], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(AGGREGATE_HEADER + "\n")
        for a in aggregates:
            fh.write(
                f"{a.strategy},{a.n_requests},{a.mean_qoe!r},{a.sd_qoe!r},"
                f"{a.mean_reward!r},{a.mean_exec_time_us!r}\n"
            )


def read_records_csv(path) -> list[BenchRecord]:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != RECORDS_HEADER:
        raise ValueError(f"{path}: expected records header {RECORDS_HEADER!r}")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        f = line.split(",")
        if len(f) != 7:
            raise ValueError(f"{path} row {lineno}: expected 7 fields, got {len(f)}")
        records.append(BenchRecord(
            strategy=f[0], n_requests=int(f[1]), trial=int(f[2]), instance_hash=f[3],
            qoe=float(f[4]), total_reward=float(f[5]), exec_time_us=float(f[6]),
        ))
    return records


def read_aggregate_csv(path) -> list[BenchAggregate]:
    aggregates = []
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != AGGREGATE_HEADER:
        raise ValueError(f"{path}: expected aggregate header {AGGREGATE_HEADER!r}")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        f = line.split(",")
        if len(f) != 6:
            raise ValueError(f"{path} row {lineno}: expected 6 fields, got {len(f)}")
        aggregates.append(BenchAggregate(
            strategy=f[0], n_requests=int(f[1]), mean_qoe=float(f[2]),
            sd_qoe=float(f[3]), mean_reward=float(f[4]), mean_exec_time_us=float(f[5]),
        ))
    return aggregates
