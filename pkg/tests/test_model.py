import math
import random

import pytest

from esqoe import (
    BusinessModel,
    EnergyDemandDistribution,
    EnergyRequest,
    EnergyService,
    IncentiveModel,
    ProviderTemporalPreferences,
    aggregate_edd,
    build_horizon,
)


def req(rid, re, st, et=None):
    return EnergyRequest(id=rid, cid="c" + rid, re=re, loc=(0.0, 0.0),
                         st=st, et=et if et is not None else st + 5)


class TestHorizon:
    def test_eight_hourly_slots(self):
        h = build_horizon(0, 60, 8)
        assert h.span == 480
        assert h.slot_bounds(0) == (0, 60)
        assert h.slot_bounds(7) == (420, 480)

    def test_single_slot(self):
        h = build_horizon(0, 60, 1)
        assert h.slot_bounds(0) == (0, 60)
        assert h.slot_of(0) == 0
        assert h.slot_of(59) == 0

    def test_slot_of_mid_horizon(self):
        assert build_horizon(0, 60, 8).slot_of(125) == 2

    def test_slot_of_respects_origin(self):
        h = build_horizon(100, 30, 4)
        assert h.slot_of(100) == 0
        assert h.slot_of(219) == 3
        with pytest.raises(ValueError):
            h.slot_of(99)
        with pytest.raises(ValueError):
            h.slot_of(220)

    @pytest.mark.parametrize("origin,dur,n", [(0, 0, 1), (0, 60, 0), (0, -5, 3)])
    def test_rejects_non_positive(self, origin, dur, n):
        with pytest.raises(ValueError):
            build_horizon(origin, dur, n)


class TestTypeInvariants:
    def test_service_needs_positive_energy(self):
        with pytest.raises(ValueError, match="ae"):
            EnergyService(id="s1", pid="p1", ae=0.0, loc=(0.0, 0.0))

    def test_request_needs_positive_energy(self):
        with pytest.raises(ValueError, match="re"):
            req("r1", 0.0, 10)

    def test_request_needs_ordered_times(self):
        with pytest.raises(ValueError, match="precede"):
            req("r1", 5.0, 30, 30)

    def test_edd_rejects_gaps_and_negatives(self):
        with pytest.raises(ValueError, match="slot"):
            EnergyDemandDistribution(entries=((0, 1.0), (2, 1.0)))
        with pytest.raises(ValueError, match=">= 0"):
            EnergyDemandDistribution(entries=((0, -1.0),))

    def test_business_model_bounds(self):
        with pytest.raises(ValueError):
            BusinessModel(importance=(0.5, 1.2))
        with pytest.raises(ValueError):
            BusinessModel(importance=())

    def test_incentive_model_positive(self):
        with pytest.raises(ValueError):
            IncentiveModel(credit=0.0, rate=1.0)
        with pytest.raises(ValueError):
            IncentiveModel(credit=1.0, rate=-2.0)

    def test_ptp_ranks_must_be_dense_permutation(self):
        with pytest.raises(ValueError, match="permutation"):
            ProviderTemporalPreferences(pid="p1", prefs=((0, 1), (3, 3)))
        with pytest.raises(ValueError, match="duplicate"):
            ProviderTemporalPreferences(pid="p1", prefs=((2, 1), (2, 2)))
        ProviderTemporalPreferences(pid="p1", prefs=((4, 2), (6, 1)))


class TestAggregateEdd:
    def test_both_starts_in_first_slot(self):
        h = build_horizon(0, 60, 2)
        edd = aggregate_edd([req("r1", 50.0, 10), req("r2", 30.0, 40)], h)
        assert edd.entries == ((0, 80.0), (1, 0.0))

    def test_empty_request_list(self):
        edd = aggregate_edd([], build_horizon(0, 60, 3))
        assert edd.r_values == (0.0, 0.0, 0.0)

    def test_request_outside_horizon_named(self):
        h = build_horizon(0, 60, 2)
        with pytest.raises(ValueError, match="r9"):
            aggregate_edd([req("r9", 5.0, 130)], h)
        with pytest.raises(ValueError, match="r8"):
            aggregate_edd([req("r8", 5.0, 118, 125)], h)

    def test_conservation_against_raw_sum(self):
        rng = random.Random(2024)
        h = build_horizon(0, 60, 8)
        requests = [
            req(f"r{i:03d}", 5.0 + 95.0 * rng.random(), rng.randrange(0, 480))
            for i in range(100)
        ]
        edd = aggregate_edd(requests, h)
        assert math.fsum(edd.r_values) == pytest.approx(
            math.fsum(r.re for r in requests), abs=1e-9
        )

    def test_permutation_invariance(self):
        rng = random.Random(7)
        h = build_horizon(0, 30, 5)
        requests = [
            req(f"r{i:02d}", 1.0 + rng.random(), rng.randrange(0, 150))
            for i in range(40)
        ]
        base = aggregate_edd(requests, h)
        for _ in range(5):
            rng.shuffle(requests)
            assert aggregate_edd(requests, h) == base
