"""Exact scheduling: sequencing checks, greedy warm start, branch and
bound, and a brute-force oracle for desk-scale verification.

All search is deterministic and single-threaded: node order is fixed by
mission declaration and conflict counts, ties keep the first incumbent,
and no randomness or wall-clock value influences the result (limits only
truncate the search).  The branch-and-bound bound is admissible: it never
undercounts what an optimal completion of a node could still collect, so
pruning keeps optimality and the final bound is a true upper bound.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .instance import EPS, SchedulingInstance, VisibleTimeWindow, setup_time_bound
from .windowing import PreprocessResult, empty_preprocess

__all__ = [
    "SolverError",
    "SizeGuardError",
    "Assignment",
    "Schedule",
    "SolveReport",
    "schedule_value",
    "make_schedule",
    "sequence_feasible",
    "greedy",
    "solve_exact",
    "brute_force",
]

OBJECTIVES = ("count", "weight")


class SolverError(ValueError):
    """Raised for invalid solver inputs."""


class SizeGuardError(SolverError):
    """Raised when an instance exceeds the brute-force size guard."""


@dataclass(frozen=True)
class Assignment:
    """One observation: `mission` starts at `start` on `resource`, using
    the given visible time window."""

    mission: str
    resource: str
    window: VisibleTimeWindow
    start: float


@dataclass(frozen=True)
class Schedule:
    assignments: tuple[Assignment, ...]
    objective_count: int
    objective_weight: int


def schedule_value(schedule: Schedule, objective: str) -> int:
    if objective == "count":
        return schedule.objective_count
    if objective == "weight":
        return schedule.objective_weight
    raise SolverError(f"unknown objective {objective!r}")


def make_schedule(
    instance: SchedulingInstance, assignments: Iterable[Assignment]
) -> Schedule:
    """Build a schedule in canonical order with both objective totals."""
    ordered = tuple(
        sorted(assignments, key=lambda a: (a.resource, a.start, a.mission))
    )
    weight = sum(instance.mission(a.mission).weight for a in ordered)
    return Schedule(ordered, len(ordered), weight)


@dataclass(frozen=True)
class SolveReport:
    schedule: Schedule
    objective: str
    best_value: int
    root_bound: float
    upper_bound: float
    proven_optimal: bool
    nodes: int
    elapsed: float
    limit_reached: str | None

    @property
    def gap(self) -> float:
        """Relative distance of the incumbent to the proven upper bound."""
        if self.upper_bound <= 0.0:
            return 0.0
        return max(0.0, (self.upper_bound - self.best_value) / self.upper_bound)


# --- sequencing ---------------------------------------------------------


def sequence_feasible(
    items: Sequence[tuple[VisibleTimeWindow, float]],
    spacing: float,
) -> list[float] | None:
    """Start times placing every (window, duration) item on one resource
    with `spacing` seconds between consecutive observations, or None.

    Searches observation orders depth-first with earliest-start
    propagation; a memo on the placed set keyed by the best frontier time
    prunes dominated revisits.  The returned starts align with the input
    order.
    """
    n = len(items)
    if n == 0:
        return []
    starts = [0.0] * n
    # Smallest frontier seen per placed-set; larger frontiers cannot do
    # better, so they are pruned.
    best_frontier: dict[int, float] = {}

    order = sorted(range(n), key=lambda i: (items[i][0].begin, items[i][0].end, i))

    def dfs(mask: int, frontier: float) -> bool:
        if mask == (1 << n) - 1:
            return True
        seen = best_frontier.get(mask)
        if seen is not None and frontier >= seen - EPS:
            return False
        best_frontier[mask] = frontier
        tried: set[tuple[float, float, float]] = set()
        for i in order:
            bit = 1 << i
            if mask & bit:
                continue
            window, duration = items[i]
            key = (window.begin, window.end, duration)
            if key in tried:
                continue
            tried.add(key)
            start = window.begin if mask == 0 else max(window.begin, frontier + spacing)
            if start > window.end - duration + EPS:
                continue
            start = min(start, window.end - duration)
            starts[i] = start
            if dfs(mask | bit, start + duration):
                return True
        return False

    if dfs(0, -math.inf):
        return starts
    return None


# --- objective helpers --------------------------------------------------


def _value_fn(instance: SchedulingInstance, objective: str) -> Callable[[str], int]:
    if objective not in OBJECTIVES:
        raise SolverError(f"unknown objective {objective!r}")
    if objective == "count":
        return lambda mission_id: 1
    return lambda mission_id: instance.mission(mission_id).weight


def _preassigned_assignments(prep: PreprocessResult) -> list[Assignment]:
    return [
        Assignment(pa.mission, pa.resource, pa.window, pa.start)
        for pa in prep.preassigned
    ]


# --- greedy -------------------------------------------------------------


def greedy(
    instance: SchedulingInstance,
    prep: PreprocessResult | None,
    objective: str,
) -> Schedule:
    """Deterministic greedy lower bound.

    Weight mode inserts missions by decreasing weight density (weight per
    second of observation); count mode tries missions with the fewest
    windows first, since they are the easiest to lose.  Each mission takes
    the first window that keeps its resource sequence feasible.
    """
    if prep is None:
        prep = empty_preprocess(instance)
    reduced = prep.reduced_instance
    spacing = {r.id: setup_time_bound(r) for r in reduced.resources}
    usage_cap = {r.id: r.max_usage for r in reduced.resources}
    used = {r.id: 0.0 for r in reduced.resources}

    # Per resource: (window used for sequencing, duration, mission, real window)
    chosen: dict[str, list[tuple[VisibleTimeWindow, float, str, VisibleTimeWindow]]] = {
        r.id: [] for r in reduced.resources
    }
    done = set()
    for pa in prep.preassigned:
        duration = reduced.mission(pa.mission).duration
        pin = VisibleTimeWindow(pa.mission, pa.resource, pa.start, pa.start + duration)
        chosen[pa.resource].append((pin, duration, pa.mission, pa.window))
        used[pa.resource] += duration
        done.add(pa.mission)

    index = {m.id: i for i, m in enumerate(reduced.missions)}
    candidates = [m for m in reduced.missions if m.id not in done]
    if objective == "weight":
        candidates.sort(key=lambda m: (-(m.weight / m.duration), -m.weight, index[m.id]))
    else:
        candidates.sort(key=lambda m: (len(reduced.windows_by_mission[m.id]), index[m.id]))

    for m in candidates:
        for w in reduced.windows_by_mission[m.id]:
            if used[w.resource] + m.duration > usage_cap[w.resource] + EPS:
                continue
            trial = chosen[w.resource] + [(w, m.duration, m.id, w)]
            if sequence_feasible([(it[0], it[1]) for it in trial], spacing[w.resource]) is not None:
                chosen[w.resource] = trial
                used[w.resource] += m.duration
                break

    assignments: list[Assignment] = []
    for rid, items in chosen.items():
        if not items:
            continue
        starts = sequence_feasible([(it[0], it[1]) for it in items], spacing[rid])
        if starts is None:
            raise SolverError("greedy produced an infeasible sequence")
        for (win, _, mission, real), start in zip(items, starts):
            assignments.append(Assignment(mission, rid, real, start))
    return make_schedule(reduced, assignments)


# --- branch and bound ---------------------------------------------------


def solve_exact(
    instance: SchedulingInstance,
    prep: PreprocessResult | None,
    objective: str,
    *,
    time_limit: float | None = None,
    node_limit: int | None = None,
    audit: bool = False,
) -> SolveReport:
    """Exact branch and bound over mission -> (window or skip) choices.

    Missions are branched in decreasing conflict order; children first try
    each window in declaration order, then the skip branch, so good
    incumbents appear early.  Window branches must fit both the resource
    sequence and its remaining usage budget.  The node bound sums
    committed value plus every undecided mission's value, clipped by the
    remaining capacity of the effective subinterval a mission is confined
    to (each mission counts against at most one subinterval, so the
    groups are disjoint and the bound stays admissible).  `audit` asserts
    bound monotonicity along every explored edge.
    """
    started = time.monotonic()
    if prep is None:
        prep = empty_preprocess(instance)
    reduced = prep.reduced_instance
    value = _value_fn(reduced, objective)
    spacing = {r.id: setup_time_bound(r) for r in reduced.resources}
    usage_cap = {r.id: r.max_usage for r in reduced.resources}
    used = {r.id: 0.0 for r in reduced.resources}

    base_assignments = _preassigned_assignments(prep)
    base_value = sum(value(a.mission) for a in base_assignments)
    for a in base_assignments:
        used[a.resource] += reduced.mission(a.mission).duration

    # Missions with surviving windows, in decreasing conflict order.
    index = {m.id: i for i, m in enumerate(reduced.missions)}

    def conflict_score(mission_id: str) -> int:
        score = 0
        for w in reduced.windows_by_mission[mission_id]:
            for other in reduced.windows_by_resource[w.resource]:
                if other.mission != mission_id and _overlaps(w, other):
                    score += 1
        return score

    order = [m.id for m in reduced.missions if reduced.windows_by_mission[m.id]]
    order.sort(key=lambda mid: (-conflict_score(mid), index[mid]))

    subs = prep.subintervals
    sub_members: list[set[VisibleTimeWindow]] = [set(s.candidate_windows) for s in subs]
    window_subs: dict[VisibleTimeWindow, list[int]] = {}
    for si, members in enumerate(sub_members):
        for w in members:
            window_subs.setdefault(w, []).append(si)

    # The single subinterval a mission is confined to, if any: all of its
    # windows must be candidates of that subinterval.  Smallest span wins.
    confined: dict[str, int | None] = {}
    for mid in order:
        windows = reduced.windows_by_mission[mid]
        shared: set[int] | None = None
        for w in windows:
            here = set(window_subs.get(w, ()))
            shared = here if shared is None else shared & here
        pick: int | None = None
        if shared:
            pick = min(shared, key=lambda si: (subs[si].length, si))
        confined[mid] = pick

    sub_groups: dict[int, list[str]] = {}
    for mid in order:
        si = confined[mid]
        if si is not None:
            sub_groups.setdefault(si, []).append(mid)

    chosen: dict[str, list[tuple[VisibleTimeWindow, float, str]]] = {
        r.id: [] for r in reduced.resources
    }
    committed_in_sub = [0] * len(subs)

    def bound(pos: int, committed: float) -> float:
        total = committed
        undecided_by_sub: dict[int, list[int]] = {}
        for mid in order[pos:]:
            si = confined[mid]
            if si is None:
                total += value(mid)
            else:
                undecided_by_sub.setdefault(si, []).append(value(mid))
        for si, values in undecided_by_sub.items():
            room = subs[si].capacity - committed_in_sub[si]
            if room <= 0:
                continue
            values.sort(reverse=True)
            total += sum(values[:room])
        return total

    warm = greedy(instance, prep, objective)
    incumbent_value = schedule_value(warm, objective)
    incumbent = warm

    nodes = 0
    limit_reason: str | None = None
    unresolved = -math.inf
    root_bound = base_value + bound(0, 0.0)

    def out_of_budget() -> str | None:
        if node_limit is not None and nodes >= node_limit:
            return "nodes"
        if time_limit is not None and time.monotonic() - started > time_limit:
            return "time"
        return None

    def snapshot_schedule() -> Schedule:
        assignments = list(base_assignments)
        for rid, items in chosen.items():
            if not items:
                continue
            starts = sequence_feasible([(w, d) for w, d, _ in items], spacing[rid])
            if starts is None:
                raise SolverError("committed sequence became infeasible")
            for (w, _, mission), start in zip(items, starts):
                assignments.append(Assignment(mission, rid, w, start))
        return make_schedule(reduced, assignments)

    def dfs(pos: int, committed: float, node_bound: float) -> bool:
        """Returns False when the budget ran out inside this subtree."""
        nonlocal nodes, incumbent, incumbent_value, unresolved, limit_reason
        nodes += 1
        reason = out_of_budget()
        if reason is not None:
            limit_reason = reason
            unresolved = max(unresolved, base_value + node_bound)
            return False
        if pos == len(order):
            total = base_value + committed
            if total > incumbent_value:
                incumbent_value = int(round(total))
                incumbent = snapshot_schedule()
            return True
        if math.floor(node_bound + base_value + 1e-6) <= incumbent_value:
            return True
        mid = order[pos]
        mission = reduced.mission(mid)
        # Branches: take the mission in each window, then skip it (None).
        branches: list[VisibleTimeWindow | None] = [*reduced.windows_by_mission[mid], None]

        def commit(w: VisibleTimeWindow) -> None:
            chosen[w.resource].append((w, mission.duration, mid))
            used[w.resource] += mission.duration
            for si in window_subs.get(w, ()):
                committed_in_sub[si] += 1

        def revert(w: VisibleTimeWindow) -> None:
            chosen[w.resource].pop()
            used[w.resource] -= mission.duration
            for si in window_subs.get(w, ()):
                committed_in_sub[si] -= 1

        for idx, w in enumerate(branches):
            if w is None:
                child_committed = committed
            else:
                if used[w.resource] + mission.duration > usage_cap[w.resource] + EPS:
                    continue
                trial = chosen[w.resource] + [(w, mission.duration, mid)]
                if sequence_feasible([(win, d) for win, d, _ in trial], spacing[w.resource]) is None:
                    continue
                commit(w)
                child_committed = committed + value(mid)
            child_bound = bound(pos + 1, child_committed)
            if audit and child_bound > node_bound + 1e-9:
                raise AssertionError(
                    f"bound rose from {node_bound} to {child_bound} at mission {mid}"
                )
            ok = dfs(pos + 1, child_committed, child_bound)
            if w is not None:
                revert(w)
            if not ok:
                # Budget ran out inside that child.  The abandoned branches
                # of this node must still back the reported upper bound.
                for rest in branches[idx + 1 :]:
                    if rest is None:
                        abandoned = bound(pos + 1, committed)
                    else:
                        commit(rest)
                        abandoned = bound(pos + 1, committed + value(mid))
                        revert(rest)
                    unresolved = max(unresolved, base_value + abandoned)
                return False
        return True

    finished = dfs(0, 0.0, bound(0, 0.0))
    elapsed = time.monotonic() - started
    if finished:
        upper = float(incumbent_value)
    else:
        upper = max(float(incumbent_value), unresolved)
    # A hit limit still proves optimality when every abandoned subtree was
    # already bounded at or below the incumbent.
    proven = upper <= incumbent_value + EPS
    return SolveReport(
        schedule=incumbent,
        objective=objective,
        best_value=incumbent_value,
        root_bound=root_bound,
        upper_bound=upper,
        proven_optimal=proven,
        nodes=nodes,
        elapsed=elapsed,
        limit_reached=limit_reason,
    )


def _overlaps(a: VisibleTimeWindow, b: VisibleTimeWindow) -> bool:
    return min(a.end, b.end) - max(a.begin, b.begin) > EPS


# --- brute force --------------------------------------------------------


def brute_force(
    instance: SchedulingInstance,
    objective: str,
    *,
    max_missions: int = 10,
    max_windows: int = 20,
) -> Schedule:
    """Optimal schedule by exhaustive enumeration (small instances only).

    Every mission -> (window or skip) mapping is tried; each resource is
    checked by enumerating observation orders with earliest-start
    placement, and its usage budget is charged per observation.
    Infeasible prefixes are cut, which never changes the result.  Guarded
    to `max_missions` missions and `max_windows` windows.
    """
    if len(instance.missions) > max_missions:
        raise SizeGuardError(
            f"{len(instance.missions)} missions exceed the brute-force guard "
            f"of {max_missions}"
        )
    if len(instance.windows) > max_windows:
        raise SizeGuardError(
            f"{len(instance.windows)} windows exceed the brute-force guard "
            f"of {max_windows}"
        )
    value = _value_fn(instance, objective)
    spacing = {r.id: setup_time_bound(r) for r in instance.resources}
    usage_cap = {r.id: r.max_usage for r in instance.resources}
    used = {r.id: 0.0 for r in instance.resources}
    chosen: dict[str, list[tuple[VisibleTimeWindow, float, str]]] = {
        r.id: [] for r in instance.resources
    }
    best_value = -1
    best_items: dict[str, list[tuple[VisibleTimeWindow, float, str]]] = {}

    missions = list(instance.missions)

    def walk(pos: int, total: int) -> None:
        nonlocal best_value, best_items
        if pos == len(missions):
            if total > best_value:
                best_value = total
                best_items = {rid: list(items) for rid, items in chosen.items()}
            return
        m = missions[pos]
        for w in instance.windows_by_mission[m.id]:
            if used[w.resource] + m.duration > usage_cap[w.resource] + EPS:
                continue
            trial = chosen[w.resource] + [(w, m.duration, m.id)]
            if sequence_feasible([(win, d) for win, d, _ in trial], spacing[w.resource]) is None:
                continue
            chosen[w.resource] = trial
            used[w.resource] += m.duration
            walk(pos + 1, total + value(m.id))
            used[w.resource] -= m.duration
            chosen[w.resource] = chosen[w.resource][:-1]
        walk(pos + 1, total)

    walk(0, 0)
    assignments: list[Assignment] = []
    for rid, items in best_items.items():
        if not items:
            continue
        starts = sequence_feasible([(w, d) for w, d, _ in items], spacing[rid])
        if starts is None:
            raise SolverError("brute force kept an infeasible sequence")
        for (w, _, mission), start in zip(items, starts):
            assignments.append(Assignment(mission, rid, w, start))
    return make_schedule(instance, assignments)
