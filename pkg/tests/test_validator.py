"""Schedule validation: one finding code per broken rule."""
from __future__ import annotations

import random

from satsched.solver import Assignment, Schedule, brute_force, make_schedule
from satsched.formulations import build_baseline, build_improved, embed_schedule
from satsched.linmodel import evaluate
from satsched.validator import (
    DUP_MISSION,
    PERIOD_VIOLATION,
    REFERENCE_ERROR,
    SETUP_VIOLATION,
    USAGE_EXCEEDED,
    WINDOW_VIOLATION,
    validate,
)
from conftest import mk_instance, random_tiny_instance
from test_windowing import exact5_resource


def two_mission_instance():
    """A (10 s) in [10, 40]; B (10 s) in [20, 90] and A again in [65, 105].

    Setup spacing is exactly 5 s.  The base schedule A@10, B@60 is valid
    with lots of slack, so each mutation below breaks exactly one rule.
    """
    return mk_instance(
        (0.0, 200.0),
        [("A", 10.0, 3), ("B", 10.0, 2)],
        [exact5_resource()],
        [
            ("A", "R", 10.0, 40.0),
            ("A", "R", 65.0, 105.0),
            ("B", "R", 20.0, 90.0),
        ],
    )


def schedule_for(instance, placements):
    """placements: list of (mission, resource, window index, start)."""
    assignments = []
    for mission, resource, k, start in placements:
        windows = [
            w for w in instance.windows
            if w.mission == mission and w.resource == resource
        ]
        assignments.append(Assignment(mission, resource, windows[k], start))
    return make_schedule(instance, assignments)


def base_schedule(instance):
    return schedule_for(instance, [("A", "R", 0, 10.0), ("B", "R", 0, 60.0)])


def window_mutation():
    # B's observation [95, 105] leaves its window [20, 90]
    instance = two_mission_instance()
    return instance, schedule_for(instance, [("A", "R", 0, 10.0), ("B", "R", 0, 95.0)])


def setup_mutation():
    # gap between A's end (20) and B's start (23) is under the 5 s bound
    instance = two_mission_instance()
    return instance, schedule_for(instance, [("A", "R", 0, 10.0), ("B", "R", 0, 23.0)])


def dup_mutation():
    instance = two_mission_instance()
    schedule = schedule_for(
        instance,
        [("A", "R", 0, 10.0), ("B", "R", 0, 60.0), ("A", "R", 1, 90.0)],
    )
    return instance, schedule


def period_mutation():
    # The mission range and its window extend past the period end, so a
    # late observation stays inside the window but leaves the period.
    instance = mk_instance(
        (0.0, 200.0),
        [("A", 10.0, 3, 0.0, 230.0)],
        [exact5_resource()],
        [("A", "R", 150.0, 230.0)],
        normalize=False,
    )
    return instance, schedule_for(instance, [("A", "R", 0, 215.0)])


def usage_mutation():
    instance = mk_instance(
        (0.0, 200.0),
        [("A", 10.0, 1), ("B", 10.0, 1), ("C", 10.0, 1)],
        [{**exact5_resource(), "max_usage": 25.0}],
        [("A", "R", 0.0, 30.0), ("B", "R", 40.0, 70.0), ("C", "R", 80.0, 110.0)],
    )
    schedule = schedule_for(
        instance,
        [("A", "R", 0, 0.0), ("B", "R", 0, 40.0), ("C", "R", 0, 80.0)],
    )
    return instance, schedule


def mutation_suite():
    """One (code, instance, schedule) triple per constraint family; each
    schedule breaks exactly its own rule."""
    return [
        (WINDOW_VIOLATION, *window_mutation()),
        (SETUP_VIOLATION, *setup_mutation()),
        (DUP_MISSION, *dup_mutation()),
        (PERIOD_VIOLATION, *period_mutation()),
        (USAGE_EXCEEDED, *usage_mutation()),
    ]


class TestCleanSchedules:
    def test_base_schedule_passes(self):
        instance = two_mission_instance()
        report = validate(instance, base_schedule(instance))
        assert report.ok
        assert report.findings == ()

    def test_empty_schedule_passes(self):
        instance = two_mission_instance()
        assert validate(instance, make_schedule(instance, [])).ok

    def test_oracle_schedules_pass(self):
        for seed in range(30):
            rng = random.Random(1100 + seed)
            instance = random_tiny_instance(rng, max_missions=5)
            assert validate(instance, brute_force(instance, "weight")).ok, seed


class TestMutations:
    def test_window_violation(self):
        instance, mutated = window_mutation()
        assert validate(instance, mutated).codes() == (WINDOW_VIOLATION,)

    def test_setup_violation(self):
        instance, mutated = setup_mutation()
        assert validate(instance, mutated).codes() == (SETUP_VIOLATION,)

    def test_dup_mission(self):
        instance, mutated = dup_mutation()
        assert validate(instance, mutated).codes() == (DUP_MISSION,)

    def test_period_violation(self):
        instance, late = period_mutation()
        assert validate(instance, late).codes() == (PERIOD_VIOLATION,)

    def test_usage_exceeded(self):
        instance, packed = usage_mutation()
        assert validate(instance, packed).codes() == (USAGE_EXCEEDED,)

    def test_suite_covers_all_five_families(self):
        codes = [code for code, _, _ in mutation_suite()]
        assert sorted(codes) == sorted(
            [DUP_MISSION, USAGE_EXCEEDED, WINDOW_VIOLATION, SETUP_VIOLATION,
             PERIOD_VIOLATION]
        )

    def test_reference_error(self):
        # Built by hand: make_schedule rejects unknown ids up front.
        instance = two_mission_instance()
        ghost = Assignment("ZZ", "R", instance.windows[0], 10.0)
        report = validate(instance, Schedule((ghost,), 1, 0))
        assert report.codes() == (REFERENCE_ERROR,)

    def test_unknown_resource_is_a_reference_error(self):
        instance = two_mission_instance()
        ghost = Assignment("A", "R9", instance.windows[0], 10.0)
        report = validate(instance, Schedule((ghost,), 1, 0))
        assert report.codes() == (REFERENCE_ERROR,)


class TestConsistencyWithModels:
    def test_setup_break_seen_by_validator_and_both_models(self):
        instance = two_mission_instance()
        good = base_schedule(instance)
        bad = schedule_for(instance, [("A", "R", 0, 10.0), ("B", "R", 0, 23.0)])
        for build in (build_baseline, build_improved):
            model = build(instance, None)
            ok_values = embed_schedule(instance, None, model, good)
            _, ok_violations = evaluate(model, ok_values)
            assert ok_violations == [], build.__name__
            bad_values = embed_schedule(instance, None, model, bad)
            _, bad_violations = evaluate(model, bad_values)
            assert bad_violations != [], build.__name__
        assert validate(instance, bad).codes() == (SETUP_VIOLATION,)

    def test_window_break_seen_by_validator_and_both_models(self):
        instance = two_mission_instance()
        bad = schedule_for(instance, [("A", "R", 0, 33.0), ("B", "R", 0, 60.0)])
        # A's observation [33, 43] overruns its window [10, 40]
        assert validate(instance, bad).codes() == (WINDOW_VIOLATION,)
        for build in (build_baseline, build_improved):
            model = build(instance, None)
            _, violations = evaluate(model, embed_schedule(instance, None, model, bad))
            assert violations != [], build.__name__
