import random

import pytest

from esqoe import GenParams, StrategyInput, generate
from esqoe.allocation import (
    STRATEGIES,
    AllocationPlan,
    compose_demand_priority,
    compose_fcfs,
    compose_importance,
    kernel_backend,
    use_kernel,
    validate_plan,
)
from esqoe.incentive import RewardQuote
from conftest import make_input


def entry_triples(plan):
    return [(e.service_id, e.slot_index, e.amount) for e in plan.entries]


class TestComposeImportance:
    def test_prefers_important_slot(self):
        inp = make_input(r=[400, 400], importance=[0.4, 0.9],
                         services=[("s1", 400, {0: 1, 1: 2})])
        plan = compose_importance(inp)
        assert entry_triples(plan) == [("s1", 1, 400.0)]
        assert plan.al == (0.0, 400.0)

    def test_no_services(self):
        inp = make_input(r=[100, 100], importance=[0.5, 0.5], services=[])
        plan = compose_importance(inp)
        assert plan.entries == ()
        assert plan.al == (0.0, 0.0)

    def test_split_across_slots(self):
        inp = make_input(r=[300, 300], importance=[0.9, 0.4],
                         services=[("s1", 500, {0: 1, 1: 2})])
        plan = compose_importance(inp)
        assert entry_triples(plan) == [("s1", 0, 300.0), ("s1", 1, 200.0)]

    def test_cheaper_rank_first_within_slot(self):
        inp = make_input(
            r=[100, 0], importance=[1.0, 0.5],
            services=[("s1", 80, {0: 2, 1: 1}), ("s2", 80, {0: 1, 1: 2})],
        )
        plan = compose_importance(inp)
        assert entry_triples(plan) == [("s2", 0, 80.0), ("s1", 0, 20.0)]

    def test_importance_tie_breaks_to_lower_slot(self):
        inp = make_input(r=[100, 100], importance=[0.6, 0.6],
                         services=[("s1", 100, {0: 1, 1: 2})])
        plan = compose_importance(inp)
        assert entry_triples(plan) == [("s1", 0, 100.0)]


class TestComposeFcfs:
    def test_chronological_order(self):
        inp = make_input(r=[400, 400], importance=[0.4, 0.9],
                         services=[("s1", 400, {0: 1, 1: 2})])
        plan = compose_fcfs(inp)
        assert entry_triples(plan) == [("s1", 0, 400.0)]

    def test_single_slot_matches_importance(self):
        rng = random.Random(3)
        for _ in range(20):
            services = [
                (f"s{i}", rng.randint(10, 200), {0: 1}) for i in range(rng.randint(1, 5))
            ]
            inp = make_input(r=[rng.randint(50, 600)], importance=[rng.random()],
                             services=services)
            assert sorted(entry_triples(compose_fcfs(inp))) == \
                sorted(entry_triples(compose_importance(inp)))

    def test_no_demand(self):
        inp = make_input(r=[0, 0], importance=[0.9, 0.9],
                         services=[("s1", 50, {0: 1, 1: 2})])
        assert compose_fcfs(inp).entries == ()

    def test_registration_order_within_slot(self):
        inp = make_input(
            r=[100], importance=[1.0],
            services=[("s2", 80, {0: 1}), ("s1", 80, {0: 2})],
        )
        plan = compose_fcfs(inp)
        assert entry_triples(plan) == [("s1", 0, 80.0), ("s2", 0, 20.0)]


class TestComposeDemandPriority:
    def test_largest_demand_first(self):
        inp = make_input(r=[100, 500], importance=[0.9, 0.1],
                         services=[("s1", 500, {0: 1, 1: 2})])
        plan = compose_demand_priority(inp)
        assert entry_triples(plan) == [("s1", 1, 500.0)]

    def test_equal_demand_matches_fcfs(self):
        rng = random.Random(8)
        for _ in range(10):
            services = [
                (f"s{i}", rng.randint(20, 120),
                 {s: k + 1 for k, s in enumerate(rng.sample(range(3), rng.randint(1, 3)))})
                for i in range(4)
            ]
            inp = make_input(r=[200, 200, 200], importance=[0.1, 0.9, 0.5],
                             services=services)
            assert compose_demand_priority(inp).entries == compose_fcfs(inp).entries

    def test_no_services(self):
        inp = make_input(r=[50], importance=[1.0], services=[])
        assert compose_demand_priority(inp).entries == ()


class TestPlanProperties:
    def test_feasibility_fuzz(self):
        rng = random.Random(512)
        for trial in range(150):
            params = GenParams(
                seed=rng.getrandbits(63),
                n_services=rng.randint(1, 40),
                n_requests=rng.randint(0, 80),
            )
            inst = generate(params)
            inp = StrategyInput.from_instance(inst)
            for name, compose in STRATEGIES.items():
                report = validate_plan(compose(inp), inp)
                assert report.ok, f"{name} violated: {report.violations[:3]}"

    def test_deterministic_plans(self):
        inst = generate(GenParams(seed=9, n_services=60, n_requests=90))
        inp = StrategyInput.from_instance(inst)
        for compose in STRATEGIES.values():
            assert compose(inp) == compose(inp)

    def test_never_allocates_to_zero_demand(self):
        inp = make_input(r=[0, 120, 0], importance=[1.0, 0.2, 0.9],
                         services=[("s1", 500, {0: 1, 1: 2, 2: 3})])
        for compose in STRATEGIES.values():
            plan = compose(inp)
            assert {e.slot_index for e in plan.entries} <= {1}

    def test_single_flexible_service_fills_by_descending_importance(self):
        importance = [0.3, 0.8, 0.1, 0.6]
        inp = make_input(
            r=[100, 100, 100, 100], importance=importance,
            services=[("s1", 250, {0: 1, 1: 2, 2: 3, 3: 4})],
        )
        plan = compose_importance(inp)
        assert entry_triples(plan) == [
            ("s1", 1, 100.0), ("s1", 3, 100.0), ("s1", 0, 50.0)
        ]

    def test_entry_ranks_non_decreasing_within_slot(self):
        rng = random.Random(77)
        for _ in range(30):
            inst = generate(GenParams(seed=rng.getrandbits(63),
                                      n_services=30, n_requests=60))
            plan = compose_importance(StrategyInput.from_instance(inst))
            by_slot = {}
            for e in plan.entries:
                by_slot.setdefault(e.slot_index, []).append(e.pref_rank)
            for ranks in by_slot.values():
                assert ranks == sorted(ranks)


class TestValidatePlan:
    def test_strategy_plans_clean(self):
        inst = generate(GenParams(seed=4, n_services=25, n_requests=50))
        inp = StrategyInput.from_instance(inst)
        for compose in STRATEGIES.values():
            assert validate_plan(compose(inp), inp).ok

    def test_over_allocation_detected(self):
        inp = make_input(r=[100], importance=[1.0], services=[("s1", 400, {0: 1})])
        plan = AllocationPlan(
            strategy_name="handmade",
            entries=(RewardQuote("s1", 0, 150.0, 1, 150.0),),
            al=(150.0,),
            total_reward=150.0,
        )
        report = validate_plan(plan, inp)
        assert any("slot 0" in v and "exceeds demand" in v for v in report.violations)

    def test_ineligible_slot_detected(self):
        inp = make_input(r=[100, 100], importance=[1.0, 1.0],
                         services=[("s1", 400, {0: 1})])
        plan = AllocationPlan(
            strategy_name="handmade",
            entries=(RewardQuote("s1", 1, 50.0, 1, 50.0),),
            al=(0.0, 50.0),
            total_reward=50.0,
        )
        report = validate_plan(plan, inp)
        assert any("not eligible" in v for v in report.violations)

    def test_wrong_reward_detected(self):
        inp = make_input(r=[100], importance=[1.0], services=[("s1", 400, {0: 1})])
        plan = AllocationPlan(
            strategy_name="handmade",
            entries=(RewardQuote("s1", 0, 50.0, 1, 99.0),),
            al=(50.0,),
            total_reward=99.0,
        )
        report = validate_plan(plan, inp)
        assert any("formula" in v for v in report.violations)

    def test_service_overdraw_detected(self):
        inp = make_input(r=[500, 500], importance=[1.0, 1.0],
                         services=[("s1", 100, {0: 1, 1: 2})])
        plan = AllocationPlan(
            strategy_name="handmade",
            entries=(
                RewardQuote("s1", 0, 80.0, 1, 80.0),
                RewardQuote("s1", 1, 80.0, 2, 160.0),
            ),
            al=(80.0, 80.0),
            total_reward=240.0,
        )
        report = validate_plan(plan, inp)
        assert any("exceeds offered energy" in v for v in report.violations)


class TestKernelBackends:
    def test_backend_reported(self):
        assert kernel_backend() in ("compiled", "python")

    def test_backends_agree_exactly(self):
        if kernel_backend() == "python":
            try:
                use_kernel("compiled")
            except ValueError:
                pytest.skip("compiled kernel not built")
        rng = random.Random(2718)
        try:
            for _ in range(40):
                inst = generate(GenParams(
                    seed=rng.getrandbits(63),
                    n_services=rng.randint(0, 50),
                    n_requests=rng.randint(0, 100),
                ))
                inp = StrategyInput.from_instance(inst)
                for compose in STRATEGIES.values():
                    use_kernel("compiled")
                    compiled_plan = compose(inp)
                    use_kernel("python")
                    python_plan = compose(inp)
                    assert compiled_plan == python_plan
        finally:
            use_kernel("auto")
