"""Domain types for crowdsourced energy sharing in a microcell.

A microcell owner (the "super provider") manages wireless-energy exchange
between provider devices and consumer devices over a horizon of discrete
time slots.  This module holds the value types everything else consumes:
services on the supply side, requests on the demand side, the per-slot
aggregated demand distribution, the owner's slot-importance weights, the
reward parameters, and each provider's ranked slot preferences.

All types validate their invariants at construction and are immutable;
energy amounts are real-valued mAh compared against ``TOLERANCE``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

#: Global comparison tolerance for energy amounts (mAh).  A residual at or
#: below this is treated as fully consumed so float residue never keeps a
#: drained service in play.
TOLERANCE = 1e-9


@dataclass(frozen=True)
class Horizon:
    """A contiguous run of ``n`` fixed-length time slots.

    Slot ``i`` covers minutes ``[origin + i*slot_duration,
    origin + (i+1)*slot_duration)``.
    """

    origin: int
    slot_duration: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"horizon needs at least one slot, got n={self.n}")
        if self.slot_duration < 1:
            raise ValueError(f"slot_duration must be >= 1 minute, got {self.slot_duration}")

    @property
    def span(self) -> int:
        """Total minutes covered."""
        return self.n * self.slot_duration

    @property
    def end(self) -> int:
        """First minute past the horizon."""
        return self.origin + self.span

    def slot_of(self, minute: int) -> int:
        """Map a minute to its slot index; rejects minutes outside the horizon."""
        if not self.origin <= minute < self.end:
            raise ValueError(
                f"minute {minute} outside horizon [{self.origin}, {self.end})"
            )
        return (minute - self.origin) // self.slot_duration

    def slot_bounds(self, i: int) -> tuple[int, int]:
        """Half-open minute interval of slot ``i``."""
        if not 0 <= i < self.n:
            raise ValueError(f"slot index {i} outside 0..{self.n - 1}")
        start = self.origin + i * self.slot_duration
        return start, start + self.slot_duration


def build_horizon(origin: int, slot_duration: int, n: int) -> Horizon:
    """Construct a validated horizon of ``n`` slots of ``slot_duration`` minutes."""
    return Horizon(origin=origin, slot_duration=slot_duration, n=n)


@dataclass(frozen=True)
class EnergyService:
    """Energy offered by one provider device: amount ``ae`` (mAh) at ``loc``."""

    id: str
    pid: str
    ae: float
    loc: tuple[float, float]

    def __post_init__(self):
        if not self.ae > 0:
            raise ValueError(f"service {self.id}: ae must be > 0, got {self.ae}")


@dataclass(frozen=True)
class EnergyRequest:
    """Energy wanted by one consumer device during minutes ``[st, et)``."""

    id: str
    cid: str
    re: float
    loc: tuple[float, float]
    st: int
    et: int

    def __post_init__(self):
        if not self.re > 0:
            raise ValueError(f"request {self.id}: re must be > 0, got {self.re}")
        if not self.st < self.et:
            raise ValueError(
                f"request {self.id}: start minute {self.st} must precede end minute {self.et}"
            )


@dataclass(frozen=True)
class EnergyDemandDistribution:
    """Aggregated required energy per slot: one ``(slot_index, r)`` entry per slot."""

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self):
        for pos, (i, r) in enumerate(self.entries):
            if i != pos:
                raise ValueError(
                    f"demand entries must cover slots 0..n-1 in order; "
                    f"position {pos} holds slot {i}"
                )
            if r < 0:
                raise ValueError(f"slot {i}: aggregated demand must be >= 0, got {r}")

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def r_values(self) -> tuple[float, ...]:
        return tuple(r for _, r in self.entries)

    @property
    def total(self) -> float:
        return math.fsum(r for _, r in self.entries)


@dataclass(frozen=True)
class BusinessModel:
    """Per-slot importance weights in [0, 1], highest = most valuable to the owner."""

    importance: tuple[float, ...]

    def __post_init__(self):
        if not self.importance:
            raise ValueError("business model needs at least one importance weight")
        for i, w in enumerate(self.importance):
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"slot {i}: importance must be in [0, 1], got {w}")

    @property
    def n(self) -> int:
        return len(self.importance)


@dataclass(frozen=True)
class IncentiveModel:
    """Reward parameters: ``credit`` per unit, ``rate`` mAh per credit unit."""

    credit: float
    rate: float

    def __post_init__(self):
        if not self.credit > 0:
            raise ValueError(f"credit must be > 0, got {self.credit}")
        if not self.rate > 0:
            raise ValueError(f"rate must be > 0, got {self.rate}")


@dataclass(frozen=True)
class ProviderTemporalPreferences:
    """A provider's eligible slots with dense ranks, 1 = most preferred."""

    pid: str
    prefs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        slots = [s for s, _ in self.prefs]
        if len(set(slots)) != len(slots):
            raise ValueError(f"provider {self.pid}: duplicate slot in preferences")
        for s, _ in self.prefs:
            if s < 0:
                raise ValueError(f"provider {self.pid}: negative slot index {s}")
        ranks = sorted(k for _, k in self.prefs)
        if ranks != list(range(1, len(self.prefs) + 1)):
            raise ValueError(
                f"provider {self.pid}: ranks must be a permutation of "
                f"1..{len(self.prefs)}, got {ranks}"
            )

    @property
    def slots(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.prefs)


@dataclass(frozen=True)
class Instance:
    """A complete, cross-validated allocation problem.

    Bundles the horizon, supply (services + provider preferences), demand
    (distribution, optionally the raw request log it came from) and the
    owner's business/incentive models.
    """

    horizon: Horizon
    services: tuple[EnergyService, ...]
    ptps: tuple[ProviderTemporalPreferences, ...]
    edd: EnergyDemandDistribution
    business_model: BusinessModel
    incentive_model: IncentiveModel
    requests: tuple[EnergyRequest, ...] | None = None
    _ptp_index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        n = self.horizon.n
        if self.edd.n != n:
            raise ValueError(f"demand distribution covers {self.edd.n} slots, horizon has {n}")
        if self.business_model.n != n:
            raise ValueError(f"business model covers {self.business_model.n} slots, horizon has {n}")
        ids = [s.id for s in self.services]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate service ids in instance")
        by_pid: dict[str, ProviderTemporalPreferences] = {}
        for ptp in self.ptps:
            if ptp.pid in by_pid:
                raise ValueError(f"provider {ptp.pid} has more than one preference set")
            for s, _ in ptp.prefs:
                if s >= n:
                    raise ValueError(
                        f"provider {ptp.pid}: preferred slot {s} outside horizon 0..{n - 1}"
                    )
            by_pid[ptp.pid] = ptp
        for svc in self.services:
            if svc.pid not in by_pid:
                raise ValueError(f"service {svc.id}: provider {svc.pid} has no preference set")
        known_pids = {s.pid for s in self.services}
        for pid in by_pid:
            if pid not in known_pids:
                raise ValueError(f"preference set for unknown provider {pid}")
        if self.requests is not None:
            rids = [r.id for r in self.requests]
            if len(set(rids)) != len(rids):
                raise ValueError("duplicate request ids in instance")
        object.__setattr__(self, "_ptp_index", by_pid)

    def ptp_for(self, pid: str) -> ProviderTemporalPreferences:
        return self._ptp_index[pid]


def aggregate_edd(
    requests: list[EnergyRequest] | tuple[EnergyRequest, ...],
    horizon: Horizon,
) -> EnergyDemandDistribution:
    """Aggregate a request log into per-slot demand.

    A request contributes its full ``re`` to the slot containing its start
    minute.  Per-slot sums run over requests in ascending request-id order,
    so the result is independent of the input list's ordering.  Requests
    falling outside the horizon are rejected by id.
    """
    buckets: list[list[tuple[str, float]]] = [[] for _ in range(horizon.n)]
    for req in requests:
        if not (horizon.origin <= req.st < horizon.end and req.et <= horizon.end):
            raise ValueError(
                f"request {req.id} ([{req.st}, {req.et})) lies outside horizon "
                f"[{horizon.origin}, {horizon.end})"
            )
        buckets[horizon.slot_of(req.st)].append((req.id, req.re))
    entries = []
    for i, group in enumerate(buckets):
        group.sort(key=lambda item: item[0])
        entries.append((i, math.fsum(re for _, re in group)))
    return EnergyDemandDistribution(entries=tuple(entries))
