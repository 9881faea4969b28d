"""Provider rewards for allocated energy.

The super provider pays stored credits for shared energy; the price scales
with the provider's preference rank of the serving slot, so being assigned
to a less preferred slot pays strictly more:

    credits = amount / rate * credit * rank

with rank 1 the provider's most preferred eligible slot.  Rewards are paid
on the amount actually allocated, which may be a split of the service.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import IncentiveModel, ProviderTemporalPreferences


@dataclass(frozen=True)
class RewardQuote:
    """One priced allocation: ``amount`` mAh of ``service_id`` in ``slot_index``."""

    service_id: str
    slot_index: int
    amount: float
    pref_rank: int
    credits: float

    def __post_init__(self):
        if not self.amount > 0:
            raise ValueError(f"quote for {self.service_id}: amount must be > 0")
        if self.pref_rank < 1:
            raise ValueError(f"quote for {self.service_id}: rank must be >= 1")


def pref_rank(ptp: ProviderTemporalPreferences, slot_index: int) -> int | None:
    """The provider's rank for a slot, or None when the slot is not offered."""
    for slot, rank in ptp.prefs:
        if slot == slot_index:
            return rank
    return None


def reward(
    amount: float,
    slot_index: int,
    ptp: ProviderTemporalPreferences,
    im: IncentiveModel,
) -> float:
    """Credits owed for allocating ``amount`` mAh to ``slot_index``.

    Raises if the provider does not offer the slot or the amount is not
    positive; linear in amount, strictly increasing in rank.
    """
    if not amount > 0:
        raise ValueError(f"amount must be > 0, got {amount}")
    rank = pref_rank(ptp, slot_index)
    if rank is None:
        raise ValueError(f"provider {ptp.pid} does not offer slot {slot_index}")
    return amount / im.rate * im.credit * rank


def quote(
    service_id: str,
    amount: float,
    slot_index: int,
    ptp: ProviderTemporalPreferences,
    im: IncentiveModel,
) -> RewardQuote:
    """Price an allocation and bundle it with its rank."""
    rank = pref_rank(ptp, slot_index)
    if rank is None:
        raise ValueError(f"provider {ptp.pid} does not offer slot {slot_index}")
    return RewardQuote(
        service_id=service_id,
        slot_index=slot_index,
        amount=amount,
        pref_rank=rank,
        credits=amount / im.rate * im.credit * rank,
    )
