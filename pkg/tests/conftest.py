"""Shared fixtures: tiny hand-checkable instances and the two-attribute
day/time CP-net used across the suite."""

import pytest

from esqoe import (
    BusinessModel,
    EnergyDemandDistribution,
    EnergyService,
    IncentiveModel,
    ProviderTemporalPreferences,
    StrategyInput,
)
from esqoe.cpnet import CPNet


def make_input(r, importance, services, credit=1.0, rate=1.0):
    """Build a StrategyInput from compact specs.

    ``services`` is a list of (id, ae, prefs) with prefs a dict slot->rank;
    provider ids mirror service ids.
    """
    svcs = []
    ptps = []
    for sid, ae, prefs in services:
        svcs.append(EnergyService(id=sid, pid="P" + sid, ae=float(ae), loc=(0.0, 0.0)))
        ptps.append(ProviderTemporalPreferences(
            pid="P" + sid, prefs=tuple(sorted(prefs.items()))
        ))
    return StrategyInput(
        edd=EnergyDemandDistribution(entries=tuple((i, float(v)) for i, v in enumerate(r))),
        services=tuple(svcs),
        ptps=tuple(ptps),
        business_model=BusinessModel(importance=tuple(importance)),
        incentive_model=IncentiveModel(credit=credit, rate=rate),
    )


@pytest.fixture
def day_time_net():
    """Two binary attributes: day preferred D1 > D2; the preferred time slot
    flips with the day (T1 first on D1, T2 first on D2)."""
    return CPNet(
        attributes=(("D", ("D1", "D2")), ("T", ("T1", "T2"))),
        parents={"T": ("D",)},
        cpts={
            "D": {(): ("D1", "D2")},
            "T": {("D1",): ("T1", "T2"), ("D2",): ("T2", "T1")},
        },
    )


DAY_TIME_TEXT = """\
provider p1
attr D: D1,D2
attr T: T1,T2 parents D
cpt D: D1 > D2
cpt T | D=D1: T1 > T2
cpt T | D=D2: T2 > T1
map grid 2x2
"""
