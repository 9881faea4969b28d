import random

import pytest

from esqoe import IncentiveModel, ProviderTemporalPreferences
from esqoe.incentive import RewardQuote, pref_rank, quote, reward


@pytest.fixture
def ptp():
    return ProviderTemporalPreferences(pid="p1", prefs=((2, 1), (5, 2)))


class TestPrefRank:
    def test_first_choice(self, ptp):
        assert pref_rank(ptp, 2) == 1

    def test_second_choice(self, ptp):
        assert pref_rank(ptp, 5) == 2

    def test_not_offered(self, ptp):
        assert pref_rank(ptp, 7) is None


class TestReward:
    def test_hand_computed(self):
        ptp = ProviderTemporalPreferences(pid="p", prefs=((0, 3), (1, 1), (2, 2)))
        im = IncentiveModel(credit=2.0, rate=10.0)
        assert reward(100.0, 0, ptp, im) == 60.0
        assert reward(50.0, 2, ptp, im) == 20.0

    def test_unit_case(self):
        ptp = ProviderTemporalPreferences(pid="p", prefs=((4, 1),))
        im = IncentiveModel(credit=3.5, rate=25.0)
        assert reward(25.0, 4, ptp, im) == 3.5

    def test_slot_not_offered(self, ptp):
        with pytest.raises(ValueError, match="does not offer"):
            reward(10.0, 7, ptp, IncentiveModel(credit=1.0, rate=1.0))

    def test_non_positive_amount(self, ptp):
        with pytest.raises(ValueError, match="amount"):
            reward(0.0, 2, ptp, IncentiveModel(credit=1.0, rate=1.0))

    def test_linearity(self):
        rng = random.Random(31)
        for _ in range(200):
            rank_count = rng.randint(1, 6)
            slot = rng.randrange(rank_count)
            ranks = list(range(1, rank_count + 1))
            rng.shuffle(ranks)
            ptp = ProviderTemporalPreferences(
                pid="p", prefs=tuple((i, k) for i, k in enumerate(ranks))
            )
            im = IncentiveModel(credit=rng.uniform(0.1, 5.0), rate=rng.uniform(0.5, 50.0))
            a = rng.uniform(0.01, 500.0)
            assert reward(2 * a, slot, ptp, im) == 2 * reward(a, slot, ptp, im)

    def test_monotone_in_rank(self):
        rng = random.Random(17)
        im = IncentiveModel(credit=1.3, rate=7.0)
        for _ in range(100):
            n = rng.randint(2, 8)
            ptp = ProviderTemporalPreferences(
                pid="p", prefs=tuple((i, i + 1) for i in range(n))
            )
            a = rng.uniform(0.5, 100.0)
            values = [reward(a, slot, ptp, im) for slot in range(n)]
            assert all(lo < hi for lo, hi in zip(values, values[1:]))

    def test_pure(self, ptp):
        im = IncentiveModel(credit=0.7, rate=3.0)
        assert reward(12.5, 5, ptp, im) == reward(12.5, 5, ptp, im)


class TestQuote:
    def test_carries_rank_and_credits(self, ptp):
        q = quote("s1", 40.0, 5, ptp, IncentiveModel(credit=2.0, rate=4.0))
        assert q == RewardQuote(service_id="s1", slot_index=5, amount=40.0,
                                pref_rank=2, credits=40.0)

    def test_rejects_bad_fields(self):
        with pytest.raises(ValueError):
            RewardQuote(service_id="s", slot_index=0, amount=0.0, pref_rank=1, credits=0.0)
        with pytest.raises(ValueError):
            RewardQuote(service_id="s", slot_index=0, amount=1.0, pref_rank=0, credits=0.0)
