"""Exact branch-and-bound solver, greedy warm start, and brute force."""
from __future__ import annotations

import random

import pytest

from satsched.instance import VisibleTimeWindow
from satsched.solver import (
    SizeGuardError,
    brute_force,
    greedy,
    schedule_value,
    sequence_feasible,
    solve_exact,
)
from satsched.validator import validate
from satsched.windowing import preprocess
from conftest import mk_instance, random_tiny_instance
from test_windowing import exact5_resource


def w(mission: str, begin: float, end: float, resource: str = "R") -> VisibleTimeWindow:
    return VisibleTimeWindow(mission, resource, begin, end)


def contended_instance():
    # Four one-window missions competing for a span that fits only two.
    return mk_instance(
        (0.0, 300.0),
        [("M1", 10.0, 7), ("M2", 10.0, 5), ("M3", 10.0, 3), ("M4", 10.0, 2)],
        [exact5_resource()],
        [(m, "R", 0.0, 30.0) for m in ("M1", "M2", "M3", "M4")],
    )


class TestSequenceFeasible:
    def test_empty(self):
        assert sequence_feasible([], 5.0) == []

    def test_single_item_starts_at_window_begin(self):
        assert sequence_feasible([(w("A", 5.0, 20.0), 10.0)], 5.0) == [5.0]

    def test_disjoint_items_chain(self):
        starts = sequence_feasible(
            [(w("A", 0.0, 15.0), 10.0), (w("B", 20.0, 60.0), 10.0)], 5.0
        )
        assert starts == [0.0, 20.0]

    def test_order_is_searched_not_taken_from_input(self):
        # B must run first even though A is listed first.
        starts = sequence_feasible(
            [(w("A", 10.0, 40.0), 10.0), (w("B", 0.0, 12.0), 10.0)], 5.0
        )
        assert starts is not None
        a, b = starts
        assert b == 0.0
        assert a >= b + 10.0 + 5.0

    def test_exact_fit(self):
        starts = sequence_feasible(
            [(w("A", 0.0, 25.0), 10.0), (w("B", 0.0, 25.0), 10.0)], 5.0
        )
        assert starts is not None
        assert sorted(starts) == [0.0, 15.0]

    def test_infeasible_when_span_too_small(self):
        assert (
            sequence_feasible(
                [(w("A", 0.0, 21.0), 10.0), (w("B", 0.0, 21.0), 10.0)], 5.0
            )
            is None
        )

    def test_spacing_respected_on_random_feasible_sets(self):
        for seed in range(30):
            rng = random.Random(400 + seed)
            spacing = rng.choice([0.0, 1.0, 3.0])
            items = []
            for i in range(rng.randint(1, 6)):
                begin = rng.uniform(0.0, 50.0)
                dur = rng.uniform(1.0, 6.0)
                items.append((w(f"M{i}", begin, begin + dur + rng.uniform(0.0, 20.0)), dur))
            starts = sequence_feasible(items, spacing)
            if starts is None:
                continue
            placed = sorted(
                (s, d) for s, (win, d) in zip(starts, items)
            )
            for (win, d), s in zip(items, starts):
                assert win.begin - 1e-9 <= s <= win.end - d + 1e-9
            for (s1, d1), (s2, _) in zip(placed, placed[1:]):
                assert s2 - (s1 + d1) >= spacing - 1e-9


class TestGreedy:
    def test_produces_valid_schedule(self):
        for seed in range(30):
            rng = random.Random(500 + seed)
            instance = random_tiny_instance(rng)
            schedule = greedy(instance, preprocess(instance), "weight")
            assert validate(instance, schedule).ok, seed

    def test_never_beats_the_oracle(self):
        for seed in range(30):
            rng = random.Random(600 + seed)
            instance = random_tiny_instance(rng, max_missions=5)
            best = schedule_value(brute_force(instance, "weight"), "weight")
            mine = schedule_value(greedy(instance, None, "weight"), "weight")
            assert mine <= best, seed


class TestSolveExact:
    def test_contended_example(self):
        instance = contended_instance()
        report = solve_exact(instance, preprocess(instance), "weight")
        assert report.best_value == 12  # 7 + 5: capacity is two of four
        assert report.proven_optimal
        assert report.root_bound >= 12.0
        assert report.upper_bound == 12.0
        assert validate(instance, report.schedule).ok

    def test_subinterval_bound_tightens_root(self):
        instance = contended_instance()
        with_prep = solve_exact(instance, preprocess(instance), "weight")
        without = solve_exact(instance, None, "weight")
        assert with_prep.best_value == without.best_value == 12
        assert with_prep.root_bound <= without.root_bound
        assert with_prep.nodes <= without.nodes

    def test_matches_brute_force_on_both_objectives(self):
        for seed in range(40):
            rng = random.Random(700 + seed)
            instance = random_tiny_instance(rng)
            for objective in ("weight", "count"):
                expected = schedule_value(brute_force(instance, objective), objective)
                report = solve_exact(instance, preprocess(instance), objective)
                assert report.proven_optimal, (seed, objective)
                assert report.best_value == expected, (seed, objective)
                assert validate(instance, report.schedule).ok, (seed, objective)

    def test_audit_checks_bound_monotonicity(self):
        for seed in range(15):
            rng = random.Random(800 + seed)
            instance = random_tiny_instance(rng)
            report = solve_exact(instance, preprocess(instance), "weight", audit=True)
            expected = schedule_value(brute_force(instance, "weight"), "weight")
            assert report.best_value == expected, seed

    def test_deterministic(self):
        rng = random.Random(33)
        instance = random_tiny_instance(rng)
        a = solve_exact(instance, preprocess(instance), "weight")
        b = solve_exact(instance, preprocess(instance), "weight")
        assert a.schedule.assignments == b.schedule.assignments
        assert a.nodes == b.nodes
        assert a.best_value == b.best_value

    def test_limit_keeps_upper_bound_honest(self):
        instance = contended_instance()
        for node_limit in (1, 2, 3, 5, 8):
            report = solve_exact(instance, None, "weight", node_limit=node_limit)
            assert report.upper_bound >= 12.0 - 1e-9, node_limit
            assert report.best_value <= report.upper_bound
            if report.limit_reached is None:
                assert report.proven_optimal

    def test_limit_honesty_on_random_instances(self):
        for seed in range(25):
            rng = random.Random(900 + seed)
            instance = random_tiny_instance(rng)
            expected = schedule_value(brute_force(instance, "weight"), "weight")
            limit = rng.randint(1, 30)
            report = solve_exact(instance, preprocess(instance), "weight", node_limit=limit)
            assert report.upper_bound >= expected - 1e-9, (seed, limit)
            assert report.best_value <= expected, (seed, limit)
            assert validate(instance, report.schedule).ok, (seed, limit)

    def test_gap_definition(self):
        instance = contended_instance()
        report = solve_exact(instance, None, "weight", node_limit=3)
        if report.upper_bound > 0:
            expected = (report.upper_bound - report.best_value) / report.upper_bound
            assert report.gap == pytest.approx(max(0.0, expected))

    def test_preassigned_missions_count_toward_value(self):
        instance = mk_instance(
            (0.0, 100.0),
            [("A", 10.0, 6)],
            [exact5_resource()],
            [("A", "R", 5.0, 30.0)],
        )
        prep = preprocess(instance)
        assert prep.n_prime == 1
        report = solve_exact(instance, prep, "weight")
        assert report.best_value == 6
        assert len(report.schedule.assignments) == 1
        assert report.schedule.assignments[0].start == 5.0


class TestBruteForce:
    def test_mission_guard(self):
        missions = [(f"M{i}", 2.0, 1) for i in range(11)]
        instance = mk_instance((0.0, 50.0), missions, [("R", 1.0)], [])
        with pytest.raises(SizeGuardError, match="missions"):
            brute_force(instance, "weight")

    def test_window_guard(self):
        missions = [(f"M{i}", 2.0, 1) for i in range(7)]
        windows = [
            (f"M{i}", "R", 3.0 * k, 3.0 * k + 2.5) for i in range(7) for k in range(3)
        ]
        instance = mk_instance((0.0, 100.0), missions, [("R", 0.5)], windows)
        with pytest.raises(SizeGuardError, match="windows"):
            brute_force(instance, "weight")

    def test_schedules_are_valid(self):
        for seed in range(20):
            rng = random.Random(1000 + seed)
            instance = random_tiny_instance(rng, max_missions=5)
            schedule = brute_force(instance, "count")
            assert validate(instance, schedule).ok, seed


class TestUsageBudget:
    """Windows far apart, so only the per-resource usage budget couples
    the missions (A weight 7, B 5, C 3, each 10 s long)."""

    def instance(self, max_usage: float):
        return mk_instance(
            (0.0, 300.0),
            [("A", 10.0, 7), ("B", 10.0, 5), ("C", 10.0, 3)],
            [{**exact5_resource(), "max_usage": max_usage}],
            [("A", "R", 0.0, 30.0), ("B", "R", 100.0, 130.0), ("C", "R", 200.0, 230.0)],
        )

    @pytest.mark.parametrize(
        "max_usage,weight_best,count_best",
        [(10.0, 7, 1), (20.0, 12, 2), (25.0, 12, 2), (30.0, 15, 3)],
    )
    def test_budget_respected_on_every_path(self, max_usage, weight_best, count_best):
        instance = self.instance(max_usage)
        prep = preprocess(instance)
        for objective, expected in (("weight", weight_best), ("count", count_best)):
            oracle = brute_force(instance, objective)
            assert schedule_value(oracle, objective) == expected
            assert validate(instance, oracle).ok
            for use_prep in (prep, None):
                report = solve_exact(instance, use_prep, objective)
                assert report.best_value == expected
                assert report.proven_optimal
                assert validate(instance, report.schedule).ok

    def test_greedy_stays_inside_budget(self):
        instance = self.instance(20.0)
        schedule = greedy(instance, None, "weight")
        assert validate(instance, schedule).ok
        assert schedule_value(schedule, "weight") <= 12
