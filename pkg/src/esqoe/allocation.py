"""Composition strategies: allocating energy services to time slots.

Three strategies share one inner allocation rule and differ only in
processing order:

* ``compose_importance`` walks slots by descending business importance and,
  within a slot, offers the cheapest rewards first (provider preference
  rank ascending) — the proposed approach.
* ``compose_fcfs`` walks slots chronologically with candidates in
  registration (id) order — baseline greedy1.
* ``compose_demand_priority`` walks slots by descending demand with
  candidates in registration order — baseline greedy2.

Within a slot, each candidate contributes ``min(residual demand, residual
energy)``; a service may therefore be split across several slots, and a
drained service never reappears as a candidate.  All orderings are total
(ties fall back to slot index / service id), so plans are reproducible
byte for byte.

The inner loop is the hot path of the benchmark harness.  It runs on a
compiled Cython kernel when the extension is available and on a pure-Python
twin otherwise; ``kernel_backend()`` reports the active one and the
``ESQOE_KERNEL`` environment variable (``compiled`` | ``python``) pins a
choice at import time.
"""

from __future__ import annotations

import math
import os
from array import array
from dataclasses import dataclass

from . import _kernel as _kernel_py
from . import incentive
from .model import (
    TOLERANCE,
    BusinessModel,
    EnergyDemandDistribution,
    EnergyService,
    IncentiveModel,
    Instance,
    ProviderTemporalPreferences,
)

try:
    from . import _ckernel as _kernel_c
except ImportError:
    _kernel_c = None

_FORCED = os.environ.get("ESQOE_KERNEL")
if _FORCED == "python":
    _active_kernel = _kernel_py
elif _FORCED == "compiled":
    if _kernel_c is None:
        raise ImportError("ESQOE_KERNEL=compiled but the esqoe._ckernel extension is not built")
    _active_kernel = _kernel_c
else:
    _active_kernel = _kernel_c if _kernel_c is not None else _kernel_py


def kernel_backend() -> str:
    """Name of the allocation kernel in use: 'compiled' or 'python'."""
    return _active_kernel.BACKEND


def use_kernel(name: str) -> None:
    """Switch the allocation kernel ('compiled', 'python' or 'auto')."""
    global _active_kernel
    if name == "python":
        _active_kernel = _kernel_py
    elif name == "compiled":
        if _kernel_c is None:
            raise ValueError("the esqoe._ckernel extension is not built")
        _active_kernel = _kernel_c
    elif name == "auto":
        _active_kernel = _kernel_c if _kernel_c is not None else _kernel_py
    else:
        raise ValueError(f"unknown kernel {name!r}")


@dataclass(frozen=True)
class StrategyInput:
    """Everything a composition strategy consumes."""

    edd: EnergyDemandDistribution
    services: tuple[EnergyService, ...]
    ptps: tuple[ProviderTemporalPreferences, ...]
    business_model: BusinessModel
    incentive_model: IncentiveModel

    def __post_init__(self):
        if self.edd.n != self.business_model.n:
            raise ValueError(
                f"demand covers {self.edd.n} slots, business model {self.business_model.n}"
            )
        by_pid = {}
        for ptp in self.ptps:
            if ptp.pid in by_pid:
                raise ValueError(f"provider {ptp.pid} has more than one preference set")
            for s, _ in ptp.prefs:
                if s >= self.edd.n:
                    raise ValueError(f"provider {ptp.pid}: slot {s} outside 0..{self.edd.n - 1}")
            by_pid[ptp.pid] = ptp
        ids = set()
        for svc in self.services:
            if svc.id in ids:
                raise ValueError(f"duplicate service id {svc.id}")
            ids.add(svc.id)
            if svc.pid not in by_pid:
                raise ValueError(f"service {svc.id}: provider {svc.pid} has no preference set")

    @staticmethod
    def from_instance(inst: Instance) -> "StrategyInput":
        return StrategyInput(
            edd=inst.edd,
            services=inst.services,
            ptps=inst.ptps,
            business_model=inst.business_model,
            incentive_model=inst.incentive_model,
        )

    def ptp_for(self, pid: str) -> ProviderTemporalPreferences:
        for ptp in self.ptps:
            if ptp.pid == pid:
                return ptp
        raise KeyError(pid)


@dataclass(frozen=True)
class AllocationPlan:
    """A strategy's output: priced entries plus per-slot allocation totals."""

    strategy_name: str
    entries: tuple[incentive.RewardQuote, ...]
    al: tuple[float, ...]
    total_reward: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _prepare(inp: StrategyInput, by_rank: bool):
    """Shared kernel prep: id-ordered services, per-slot candidate lists (CSR)."""
    n = inp.edd.n
    services = sorted(inp.services, key=lambda s: s.id)
    ptp_by_pid = {ptp.pid: ptp for ptp in inp.ptps}
    rank_of: list[dict[int, int]] = []
    buckets: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # (rank, service idx)
    for idx, svc in enumerate(services):
        ranks = dict(ptp_by_pid[svc.pid].prefs)
        rank_of.append(ranks)
        for slot, rank in ranks.items():
            buckets[slot].append((rank, idx))
    cand_order: list[int] = []
    cand_start = [0]
    for bucket in buckets:
        if by_rank:
            bucket.sort()  # (rank, id position) ascending
        else:
            bucket.sort(key=lambda item: item[1])  # registration order
        cand_order.extend(idx for _, idx in bucket)
        cand_start.append(len(cand_order))
    return services, rank_of, cand_order, cand_start


def _run(inp: StrategyInput, name: str, slot_order: list[int], by_rank: bool) -> AllocationPlan:
    n = inp.edd.n
    services, rank_of, cand_order, cand_start = _prepare(inp, by_rank)
    demand = [r for _, r in inp.edd.entries]
    energy = [svc.ae for svc in services]
    cap = len(services) + n

    if _active_kernel is _kernel_py:
        out_service = [0] * cap
        out_slot = [0] * cap
        out_amount = [0.0] * cap
        k = _kernel_py.allocate(slot_order, demand, energy, cand_order, cand_start,
                                out_service, out_slot, out_amount, TOLERANCE)
    else:
        out_service = array("q", bytes(8 * cap))
        out_slot = array("q", bytes(8 * cap))
        out_amount = array("d", bytes(8 * cap))
        k = _kernel_c.allocate(
            array("q", slot_order), array("d", demand), array("d", energy),
            array("q", cand_order), array("q", cand_start),
            out_service, out_slot, out_amount, TOLERANCE,
        )

    im = inp.incentive_model
    entries = []
    al = [0.0] * n
    for j in range(k):
        svc = services[out_service[j]]
        slot = out_slot[j]
        amount = out_amount[j]
        rank = rank_of[out_service[j]][slot]
        entries.append(incentive.RewardQuote(
            service_id=svc.id,
            slot_index=slot,
            amount=amount,
            pref_rank=rank,
            credits=amount / im.rate * im.credit * rank,
        ))
        al[slot] += amount
    return AllocationPlan(
        strategy_name=name,
        entries=tuple(entries),
        al=tuple(al),
        total_reward=math.fsum(e.credits for e in entries),
    )


def compose_importance(inp: StrategyInput) -> AllocationPlan:
    """Fill the most important slots first, cheapest eligible services first."""
    importance = inp.business_model.importance
    slot_order = sorted(range(inp.edd.n), key=lambda i: (-importance[i], i))
    return _run(inp, "importance", slot_order, by_rank=True)


def compose_fcfs(inp: StrategyInput) -> AllocationPlan:
    """Greedy baseline 1: chronological slots, services in registration order."""
    return _run(inp, "fcfs", list(range(inp.edd.n)), by_rank=False)


def compose_demand_priority(inp: StrategyInput) -> AllocationPlan:
    """Greedy baseline 2: biggest-demand slots first, registration-order services."""
    r = inp.edd.r_values
    slot_order = sorted(range(inp.edd.n), key=lambda i: (-r[i], i))
    return _run(inp, "demand", slot_order, by_rank=False)


STRATEGIES = {
    "importance": compose_importance,
    "fcfs": compose_fcfs,
    "demand": compose_demand_priority,
}


def validate_plan(plan: AllocationPlan, inp: StrategyInput) -> ValidationReport:
    """Check every plan invariant; reports violations instead of raising.

    Verifies positive amounts, per-slot totals within demand, per-service
    totals within the offered energy, slot eligibility, and that each
    entry's reward matches the incentive formula on its amount.
    """
    violations: list[str] = []
    n = inp.edd.n
    r = inp.edd.r_values
    svc_by_id = {s.id: s for s in inp.services}
    ptp_by_pid = {p.pid: p for p in inp.ptps}

    slot_totals = [0.0] * n
    svc_totals: dict[str, float] = {}
    for pos, entry in enumerate(plan.entries):
        if entry.amount <= 0:
            violations.append(f"entry {pos}: non-positive amount {entry.amount}")
            continue
        svc = svc_by_id.get(entry.service_id)
        if svc is None:
            violations.append(f"entry {pos}: unknown service {entry.service_id}")
            continue
        if not 0 <= entry.slot_index < n:
            violations.append(f"entry {pos}: slot {entry.slot_index} outside horizon")
            continue
        slot_totals[entry.slot_index] += entry.amount
        svc_totals[svc.id] = svc_totals.get(svc.id, 0.0) + entry.amount
        ptp = ptp_by_pid[svc.pid]
        rank = incentive.pref_rank(ptp, entry.slot_index)
        if rank is None:
            violations.append(
                f"entry {pos}: service {svc.id} not eligible for slot {entry.slot_index}"
            )
            continue
        if rank != entry.pref_rank:
            violations.append(
                f"entry {pos}: recorded rank {entry.pref_rank} differs from "
                f"provider rank {rank}"
            )
        expected = incentive.reward(entry.amount, entry.slot_index, ptp, inp.incentive_model)
        if abs(expected - entry.credits) > TOLERANCE:
            violations.append(
                f"entry {pos}: reward {entry.credits} differs from incentive "
                f"formula value {expected}"
            )
    for i in range(n):
        if slot_totals[i] > r[i] + TOLERANCE:
            violations.append(f"slot {i}: allocated {slot_totals[i]} exceeds demand {r[i]}")
    for sid, total in svc_totals.items():
        if total > svc_by_id[sid].ae + TOLERANCE:
            violations.append(
                f"service {sid}: allocated {total} exceeds offered energy {svc_by_id[sid].ae}"
            )
    for i in range(n):
        if abs(slot_totals[i] - plan.al[i]) > TOLERANCE:
            violations.append(
                f"slot {i}: plan total {plan.al[i]} inconsistent with entries ({slot_totals[i]})"
            )
    return ValidationReport(violations=tuple(violations))


def write_allocation_report(plan: AllocationPlan, path) -> None:
    """Allocation report CSV: one row per plan entry."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("strategy,slot_index,service_id,amount_mah,pref_rank,reward_credits\n")
        for e in plan.entries:
            fh.write(
                f"{plan.strategy_name},{e.slot_index},{e.service_id},"
                f"{e.amount!r},{e.pref_rank},{e.credits!r}\n"
            )


def write_slot_summary(plan: AllocationPlan, inp: StrategyInput, path) -> None:
    """Per-slot summary CSV: demand, allocation, fulfillment and importance."""
    from .metrics import fulfillment

    ratios = fulfillment(inp.edd, plan)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("slot_index,r_mah,al_mah,fulfillment,importance\n")
        for i, (r, al, f, imp) in enumerate(
            zip(inp.edd.r_values, plan.al, ratios, inp.business_model.importance)
        ):
            fh.write(f"{i},{r!r},{al!r},{f!r},{imp!r}\n")
