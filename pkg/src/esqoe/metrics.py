"""Quality-of-experience scoring of allocation plans.

QoE is the importance-weighted mean per-slot demand fulfillment:

    qoe = sum_i(min(Al_i / r_i, 1) * I_i) / n

Slots with zero demand count as fully fulfilled (nothing to satisfy should
not penalize the experience), and the ratio is capped at 1 so over-supply
cannot inflate the score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .model import BusinessModel, EnergyDemandDistribution

if TYPE_CHECKING:
    from .allocation import AllocationPlan


@dataclass(frozen=True)
class SlotScore:
    slot_index: int
    fulfillment: float
    importance: float
    term: float


@dataclass(frozen=True)
class QoEReport:
    qoe: float
    per_slot: tuple[SlotScore, ...]
    total_reward: float
    n: int


def fulfillment(edd: EnergyDemandDistribution, plan: "AllocationPlan") -> list[float]:
    """Per-slot fulfillment ratios in [0, 1]; 1.0 for zero-demand slots."""
    if len(plan.al) != edd.n:
        raise ValueError(f"plan covers {len(plan.al)} slots, demand has {edd.n}")
    ratios = []
    for (_, r), al in zip(edd.entries, plan.al):
        if r > 0:
            ratios.append(min(al / r, 1.0))
        else:
            ratios.append(1.0)
    return ratios


def total_reward(plan: "AllocationPlan") -> float:
    """Sum of the plan's entry rewards, in credits."""
    return math.fsum(e.credits for e in plan.entries)


def qoe(
    edd: EnergyDemandDistribution,
    bm: BusinessModel,
    plan: "AllocationPlan",
) -> QoEReport:
    """Score a plan against the demand distribution and business model."""
    if bm.n != edd.n:
        raise ValueError(f"business model covers {bm.n} slots, demand has {edd.n}")
    ratios = fulfillment(edd, plan)
    per_slot = tuple(
        SlotScore(slot_index=i, fulfillment=f, importance=w, term=f * w)
        for i, (f, w) in enumerate(zip(ratios, bm.importance))
    )
    value = math.fsum(s.term for s in per_slot) / edd.n
    return QoEReport(
        qoe=value,
        per_slot=per_slot,
        total_reward=total_reward(plan),
        n=edd.n,
    )


def write_qoe_report(report: QoEReport, edd: EnergyDemandDistribution,
                     plan: "AllocationPlan", path) -> None:
    """QoE report CSV: per-slot rows plus a trailing summary row."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("slot_index,r_mah,al_mah,fulfillment,importance,term\n")
        for s, (_, r), al in zip(report.per_slot, edd.entries, plan.al):
            fh.write(f"{s.slot_index},{r!r},{al!r},{s.fulfillment!r},{s.importance!r},{s.term!r}\n")
        fh.write(f"qoe,{report.qoe!r},total_reward,{report.total_reward!r}\n")
