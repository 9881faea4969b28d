"""Seeded synthetic instances and the on-disk instance format.

The generator draws services, requests, provider preferences and slot
importance weights from the documented parameter ranges, fully determined
by a 64-bit seed.  Randomness comes from CPython's ``random.Random``
(MT19937) through its ``random()`` method only — the one surface the
standard library guarantees to be reproducible across versions and
platforms — with integer draws, range sampling and shuffles derived here
from that stream.  Identical seeds therefore give byte-identical instances
everywhere.

An instance directory holds::

    horizon.csv          n,slot_duration,origin           (written by save;
                         optional on load, defaulting to 60-minute slots at
                         origin 0 with n taken from the business model)
    services.csv         id,pid,ae_mah,loc_x,loc_y
    requests.csv         id,cid,re_mah,loc_x,loc_y,start_min,end_min
    business_model.csv   slot_index,importance
    incentive_model.csv  credit,rate
    ptp.csv              pid,slot_index,rank
    cpnets.txt           optional CP-net blocks; ranked into preferences at
                         load time (see the cpnet module's file format)

Floats are serialized with ``repr`` so save -> load round-trips exactly.
"""

from __future__ import annotations

import hashlib
import os
import random
from dataclasses import dataclass

from . import cpnet as cpnet_mod
from .model import (
    BusinessModel,
    EnergyDemandDistribution,
    EnergyRequest,
    EnergyService,
    Horizon,
    IncentiveModel,
    Instance,
    ProviderTemporalPreferences,
    aggregate_edd,
    build_horizon,
)

INSTANCE_FILES = (
    "horizon.csv",
    "services.csv",
    "requests.csv",
    "business_model.csv",
    "incentive_model.csv",
    "ptp.csv",
)


class SeededSampler:
    """Deterministic sampling derived from ``random.Random.random()`` only."""

    def __init__(self, seed: int):
        self._r = random.Random(seed)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self._r.random()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        return lo + int(self._r.random() * (hi - lo + 1))

    def subset(self, n: int, k: int) -> list[int]:
        """k distinct values from range(n), in ascending order."""
        pool = list(range(n))
        for i in range(k):
            j = self.randint(i, n - 1)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:k])

    def permutation(self, k: int) -> list[int]:
        """Fisher-Yates shuffle of 1..k."""
        values = list(range(1, k + 1))
        for i in range(k - 1, 0, -1):
            j = self.randint(0, i)
            values[i], values[j] = values[j], values[i]
        return values


@dataclass(frozen=True)
class GenParams:
    """Generator configuration; defaults follow the experiment environment
    (8 hourly slots, 5-100 mAh energies, 5-60 minute requests, 1-4 preferred
    slots per provider)."""

    seed: int
    n_services: int
    n_requests: int
    n_slots: int = 8
    slot_duration: int = 60
    origin: int = 0
    ae_range: tuple[float, float] = (5.0, 100.0)
    re_range: tuple[float, float] = (5.0, 100.0)
    duration_range: tuple[int, int] = (5, 60)
    pref_count_range: tuple[int, int] = (1, 4)
    importance: tuple[float, ...] | None = None
    credit: float = 1.0
    rate: float = 1.0
    loc_range: tuple[float, float] = (0.0, 100.0)

    def __post_init__(self):
        if self.n_services < 0 or self.n_requests < 0:
            raise ValueError("n_services and n_requests must be >= 0")
        if self.n_slots < 1 or self.slot_duration < 1:
            raise ValueError("n_slots and slot_duration must be >= 1")
        for name in ("ae_range", "re_range", "loc_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} must satisfy lo <= hi, got ({lo}, {hi})")
        if self.ae_range[0] <= 0 or self.re_range[0] <= 0:
            raise ValueError("energy ranges must have positive lower bounds")
        lo, hi = self.duration_range
        if not 1 <= lo <= hi:
            raise ValueError(f"duration_range must satisfy 1 <= lo <= hi, got ({lo}, {hi})")
        lo, hi = self.pref_count_range
        if not 1 <= lo <= hi:
            raise ValueError(f"pref_count_range must satisfy 1 <= lo <= hi, got ({lo}, {hi})")
        if hi > self.n_slots:
            raise ValueError(
                f"pref_count_range upper bound {hi} exceeds n_slots {self.n_slots}"
            )
        if self.importance is not None and len(self.importance) != self.n_slots:
            raise ValueError(
                f"explicit importance list has {len(self.importance)} weights, "
                f"n_slots is {self.n_slots}"
            )
        if self.credit <= 0 or self.rate <= 0:
            raise ValueError("credit and rate must be > 0")


def _width(count: int) -> int:
    return max(4, len(str(max(count - 1, 0))))


def generate(params: GenParams) -> Instance:
    """Build a seeded instance.

    Draw order is fixed (services, then provider preferences, then
    requests, then importance weights) so a given seed always produces the
    same instance.
    """
    sampler = SeededSampler(params.seed)
    horizon = build_horizon(params.origin, params.slot_duration, params.n_slots)

    sw = _width(params.n_services)
    services = []
    for i in range(params.n_services):
        ae = sampler.uniform(*params.ae_range)
        x = sampler.uniform(*params.loc_range)
        y = sampler.uniform(*params.loc_range)
        services.append(
            EnergyService(id=f"s{i:0{sw}d}", pid=f"p{i:0{sw}d}", ae=ae, loc=(x, y))
        )

    ptps = []
    for i in range(params.n_services):
        k = sampler.randint(*params.pref_count_range)
        slots = sampler.subset(params.n_slots, k)
        ranks = sampler.permutation(k)
        ptps.append(
            ProviderTemporalPreferences(
                pid=f"p{i:0{sw}d}", prefs=tuple(zip(slots, ranks))
            )
        )

    rw = _width(params.n_requests)
    requests = []
    for i in range(params.n_requests):
        re = sampler.uniform(*params.re_range)
        x = sampler.uniform(*params.loc_range)
        y = sampler.uniform(*params.loc_range)
        st = sampler.randint(horizon.origin, horizon.end - 1)
        duration = sampler.randint(*params.duration_range)
        et = min(st + duration, horizon.end)
        requests.append(
            EnergyRequest(id=f"r{i:0{rw}d}", cid=f"c{i:0{rw}d}", re=re, loc=(x, y), st=st, et=et)
        )

    if params.importance is not None:
        weights = tuple(params.importance)
    else:
        weights = tuple(sampler.uniform(0.0, 1.0) for _ in range(params.n_slots))

    return Instance(
        horizon=horizon,
        services=tuple(services),
        ptps=tuple(ptps),
        edd=aggregate_edd(requests, horizon),
        business_model=BusinessModel(importance=weights),
        incentive_model=IncentiveModel(credit=params.credit, rate=params.rate),
        requests=tuple(requests),
    )


def save_instance(instance: Instance, directory) -> None:
    """Write the instance directory (see module docstring for the layout)."""
    os.makedirs(directory, exist_ok=True)

    def path(name):
        return os.path.join(directory, name)

    with open(path("horizon.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("n,slot_duration,origin\n")
        fh.write(f"{instance.horizon.n},{instance.horizon.slot_duration},{instance.horizon.origin}\n")
    with open(path("services.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("id,pid,ae_mah,loc_x,loc_y\n")
        for s in instance.services:
            fh.write(f"{s.id},{s.pid},{s.ae!r},{s.loc[0]!r},{s.loc[1]!r}\n")
    with open(path("requests.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("id,cid,re_mah,loc_x,loc_y,start_min,end_min\n")
        for r in instance.requests or ():
            fh.write(f"{r.id},{r.cid},{r.re!r},{r.loc[0]!r},{r.loc[1]!r},{r.st},{r.et}\n")
    with open(path("business_model.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("slot_index,importance\n")
        for i, w in enumerate(instance.business_model.importance):
            fh.write(f"{i},{w!r}\n")
    with open(path("incentive_model.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("credit,rate\n")
        fh.write(f"{instance.incentive_model.credit!r},{instance.incentive_model.rate!r}\n")
    with open(path("ptp.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("pid,slot_index,rank\n")
        for ptp in instance.ptps:
            for slot, rank in ptp.prefs:
                fh.write(f"{ptp.pid},{slot},{rank}\n")


def _read_rows(path, expected_header: str) -> list[tuple[int, list[str]]]:
    """Rows of a CSV as (line number, fields); checks the header verbatim."""
    name = os.path.basename(path)
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{name}: empty file, expected header {expected_header!r}")
    if lines[0] != expected_header:
        raise ValueError(f"{name}: expected header {expected_header!r}, got {lines[0]!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != expected_header.count(",") + 1:
            raise ValueError(f"{name} row {lineno}: expected "
                             f"{expected_header.count(',') + 1} fields, got {len(fields)}")
        rows.append((lineno, fields))
    return rows


def _parse(kind, name, lineno, text):
    try:
        return kind(text)
    except ValueError:
        raise ValueError(
            f"{name} row {lineno}: cannot parse {text!r} as {kind.__name__}"
        ) from None


def load_instance(directory, allow_cpnet_override: bool = False) -> Instance:
    """Read and fully validate an instance directory.

    CP-net blocks in ``cpnets.txt``, when present, are ranked into provider
    preferences.  A provider appearing both there and in ``ptp.csv`` is a
    conflict unless ``allow_cpnet_override`` is set, in which case the
    CP-net wins.
    """

    def path(fname):
        return os.path.join(directory, fname)

    for fname in ("services.csv", "requests.csv", "business_model.csv", "incentive_model.csv"):
        if not os.path.exists(path(fname)):
            raise FileNotFoundError(f"instance directory {directory} is missing {fname}")
    cpnets_present = os.path.exists(path("cpnets.txt"))
    ptp_present = os.path.exists(path("ptp.csv"))
    if not ptp_present and not cpnets_present:
        raise FileNotFoundError(f"instance directory {directory} is missing ptp.csv")

    bm_rows = _read_rows(path("business_model.csv"), "slot_index,importance")
    weights = {}
    for lineno, fields in bm_rows:
        idx = _parse(int, "business_model.csv", lineno, fields[0])
        weights[idx] = _parse(float, "business_model.csv", lineno, fields[1])
    if sorted(weights) != list(range(len(weights))):
        raise ValueError("business_model.csv: slot indices must cover 0..n-1 exactly once")
    bm = BusinessModel(importance=tuple(weights[i] for i in range(len(weights))))

    if os.path.exists(path("horizon.csv")):
        rows = _read_rows(path("horizon.csv"), "n,slot_duration,origin")
        if len(rows) != 1:
            raise ValueError("horizon.csv: expected exactly one data row")
        lineno, fields = rows[0]
        horizon = build_horizon(
            origin=_parse(int, "horizon.csv", lineno, fields[2]),
            slot_duration=_parse(int, "horizon.csv", lineno, fields[1]),
            n=_parse(int, "horizon.csv", lineno, fields[0]),
        )
        if horizon.n != bm.n:
            raise ValueError(
                f"horizon.csv declares {horizon.n} slots, business_model.csv has {bm.n}"
            )
    else:
        horizon = build_horizon(origin=0, slot_duration=60, n=bm.n)

    services = []
    for lineno, f in _read_rows(path("services.csv"), "id,pid,ae_mah,loc_x,loc_y"):
        try:
            services.append(EnergyService(
                id=f[0], pid=f[1],
                ae=_parse(float, "services.csv", lineno, f[2]),
                loc=(_parse(float, "services.csv", lineno, f[3]),
                     _parse(float, "services.csv", lineno, f[4])),
            ))
        except ValueError as err:
            raise ValueError(f"services.csv row {lineno}: {err}") from None

    requests = []
    for lineno, f in _read_rows(path("requests.csv"),
                                "id,cid,re_mah,loc_x,loc_y,start_min,end_min"):
        try:
            requests.append(EnergyRequest(
                id=f[0], cid=f[1],
                re=_parse(float, "requests.csv", lineno, f[2]),
                loc=(_parse(float, "requests.csv", lineno, f[3]),
                     _parse(float, "requests.csv", lineno, f[4])),
                st=_parse(int, "requests.csv", lineno, f[5]),
                et=_parse(int, "requests.csv", lineno, f[6]),
            ))
        except ValueError as err:
            raise ValueError(f"requests.csv row {lineno}: {err}") from None

    rows = _read_rows(path("incentive_model.csv"), "credit,rate")
    if len(rows) != 1:
        raise ValueError("incentive_model.csv: expected exactly one data row")
    lineno, f = rows[0]
    im = IncentiveModel(
        credit=_parse(float, "incentive_model.csv", lineno, f[0]),
        rate=_parse(float, "incentive_model.csv", lineno, f[1]),
    )

    csv_prefs: dict[str, list[tuple[int, int]]] = {}
    if ptp_present:
        for lineno, f in _read_rows(path("ptp.csv"), "pid,slot_index,rank"):
            csv_prefs.setdefault(f[0], []).append((
                _parse(int, "ptp.csv", lineno, f[1]),
                _parse(int, "ptp.csv", lineno, f[2]),
            ))
    ptps: dict[str, ProviderTemporalPreferences] = {}
    for pid, prefs in csv_prefs.items():
        try:
            ptps[pid] = ProviderTemporalPreferences(pid=pid, prefs=tuple(sorted(prefs)))
        except ValueError as err:
            raise ValueError(f"ptp.csv: {err}") from None

    if cpnets_present:
        for block in cpnet_mod.parse_cpnet_file(path("cpnets.txt")):
            if block.pid in csv_prefs and not allow_cpnet_override:
                raise ValueError(
                    f"provider {block.pid} appears in both ptp.csv and cpnets.txt; "
                    f"pass allow_cpnet_override to let the CP-net win"
                )
            ptps[block.pid] = cpnet_mod.to_ptp(block.net, block.slot_map, block.pid)

    return Instance(
        horizon=horizon,
        services=tuple(services),
        ptps=tuple(ptps[pid] for pid in sorted(ptps)),
        edd=aggregate_edd(requests, horizon),
        business_model=bm,
        incentive_model=im,
        requests=tuple(requests),
    )


def canonical_lines(instance: Instance) -> list[str]:
    """Deterministic text rendering of every validated field."""
    lines = [
        f"horizon,{instance.horizon.n},{instance.horizon.slot_duration},{instance.horizon.origin}"
    ]
    for s in instance.services:
        lines.append(f"service,{s.id},{s.pid},{s.ae!r},{s.loc[0]!r},{s.loc[1]!r}")
    for ptp in instance.ptps:
        body = ";".join(f"{slot}:{rank}" for slot, rank in ptp.prefs)
        lines.append(f"ptp,{ptp.pid},{body}")
    for r in instance.requests or ():
        lines.append(f"request,{r.id},{r.cid},{r.re!r},{r.loc[0]!r},{r.loc[1]!r},{r.st},{r.et}")
    lines.append("edd," + ",".join(repr(r) for r in instance.edd.r_values))
    lines.append("bm," + ",".join(repr(w) for w in instance.business_model.importance))
    lines.append(f"im,{instance.incentive_model.credit!r},{instance.incentive_model.rate!r}")
    return lines


def instance_fingerprint(instance: Instance) -> str:
    """16-hex-digit digest over the canonical rendering."""
    digest = hashlib.blake2b("\n".join(canonical_lines(instance)).encode(), digest_size=8)
    return digest.hexdigest()
