"""Window conflict analysis and preprocessing.

Given a normalized instance this module computes, per resource, the
feasible time intervals (maximal unions of pairwise-chained windows), the
conflict profile (how many windows cover each time piece), and effective
subintervals with a packing capacity.  On top of those it preassigns
missions whose observations provably cannot disturb any other choice, and
shrinks the instance accordingly.  Preprocessing is conservative: it never
changes the optimal objective value, it only removes decisions whose best
outcome is already known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .instance import (
    EPS,
    InstanceError,
    Mission,
    Resource,
    SchedulingInstance,
    VisibleTimeWindow,
    setup_time_bound,
)

__all__ = [
    "FeasibleTimeInterval",
    "ConflictSegment",
    "EffectiveSubinterval",
    "PreAssignment",
    "PreprocessResult",
    "ResourceStats",
    "InstanceStats",
    "build_feasible_intervals",
    "conflict_profile",
    "max_assignable",
    "contention",
    "preassign_free_windows",
    "effective_subintervals",
    "preprocess",
    "empty_preprocess",
    "resource_stats",
]


@dataclass(frozen=True)
class FeasibleTimeInterval:
    """Maximal interval covered by a chain of overlapping windows."""

    resource: str
    begin: float
    end: float
    member_windows: tuple[VisibleTimeWindow, ...]

    @property
    def length(self) -> float:
        return self.end - self.begin


@dataclass(frozen=True)
class ConflictSegment:
    """A maximal piece of constant window coverage inside one interval."""

    begin: float
    end: float
    degree: int


@dataclass(frozen=True)
class EffectiveSubinterval:
    """A contended span of one resource with a packing capacity.

    `capacity` bounds how many observations can run inside [begin, end];
    `candidate_windows` are the windows fully contained in the span.  Only
    spans whose candidate mission count exceeds the capacity are worth a
    constraint, so only those are emitted by preprocessing.
    """

    resource: str
    begin: float
    end: float
    capacity: int
    candidate_windows: tuple[VisibleTimeWindow, ...]

    @property
    def length(self) -> float:
        return self.end - self.begin


@dataclass(frozen=True)
class PreAssignment:
    """A mission fixed at `start` inside `window` before model building."""

    mission: str
    resource: str
    window: VisibleTimeWindow
    start: float


@dataclass(frozen=True)
class PreprocessResult:
    preassigned: tuple[PreAssignment, ...]
    reduced_instance: SchedulingInstance
    subintervals: tuple[EffectiveSubinterval, ...]

    @property
    def n_prime(self) -> int:
        return len(self.preassigned)


@dataclass(frozen=True)
class ResourceStats:
    """Contention statistics of one resource on one instance."""

    resource: str
    delta: float
    window_count: int
    total_visible: float
    feasible_time: float
    capacity: int
    contention: float | None


@dataclass(frozen=True)
class InstanceStats:
    per_resource: tuple[ResourceStats, ...]
    paon: float
    paot: float


# --- interval primitives ------------------------------------------------


def build_feasible_intervals(
    windows: Sequence[VisibleTimeWindow],
) -> list[FeasibleTimeInterval]:
    """Merge windows of one resource into maximal overlapping chains.

    Windows that merely touch at an endpoint stay separate: two
    observations cannot share an instant, so touching windows do not
    constrain each other through overlap.
    """
    if not windows:
        return []
    resource = windows[0].resource
    for w in windows:
        if w.resource != resource:
            raise InstanceError("build_feasible_intervals: windows span several resources")
    ordered = sorted(windows, key=lambda w: (w.begin, w.end, w.mission))
    groups: list[list[VisibleTimeWindow]] = [[ordered[0]]]
    reach = ordered[0].end
    for w in ordered[1:]:
        if w.begin < reach - EPS:
            groups[-1].append(w)
            reach = max(reach, w.end)
        else:
            groups.append([w])
            reach = w.end
    out = []
    for group in groups:
        begin = min(w.begin for w in group)
        end = max(w.end for w in group)
        out.append(FeasibleTimeInterval(resource, begin, end, tuple(group)))
    return out


def conflict_profile(fti: FeasibleTimeInterval) -> list[ConflictSegment]:
    """Constant-coverage segments of one feasible time interval."""
    return _coverage_segments(fti.member_windows)


def _coverage_segments(
    windows: Sequence[VisibleTimeWindow],
) -> list[ConflictSegment]:
    """Positive-coverage segments of an arbitrary window set, left to right.

    Adjacent segments with equal degree are merged; zero-coverage gaps are
    omitted, so the output may be discontiguous.
    """
    events: list[tuple[float, int]] = []
    for w in windows:
        events.append((w.begin, 1))
        events.append((w.end, -1))
    events.sort()
    segments: list[ConflictSegment] = []
    degree = 0
    prev = None
    for time, step in events:
        if prev is not None and degree > 0 and time - prev > EPS:
            if segments and segments[-1].degree == degree and abs(segments[-1].end - prev) <= EPS:
                segments[-1] = ConflictSegment(segments[-1].begin, time, degree)
            else:
                segments.append(ConflictSegment(prev, time, degree))
        degree += step
        prev = time
    return segments


def max_assignable(length: float, durations: Sequence[float], delta: float) -> int:
    """How many observations fit in `length` seconds with `delta` setup gaps.

    With uniform durations D this is floor((length + delta) / (D + delta)).
    Otherwise the shortest durations are packed greedily, which maximizes
    the count.  `durations` lists one duration per candidate mission, so
    the result never exceeds len(durations).
    """
    if not durations:
        return 0
    ordered = sorted(durations)
    count = 0
    used = 0.0
    for d in ordered:
        extra = d if count == 0 else d + delta
        if used + extra <= length + EPS:
            used += extra
            count += 1
        else:
            break
    return count


def contention(total_visible: float, feasible_time: float) -> float | None:
    """Contention ratio (T - F) / F; None when no time is feasible."""
    if feasible_time <= 0.0:
        return None
    return (total_visible - feasible_time) / feasible_time


# --- preassignment ------------------------------------------------------


def _zone_clear(
    start: float,
    duration: float,
    spacing: float,
    obstacles: Iterable[tuple[float, float]],
) -> bool:
    """True when [start, start+duration] keeps `spacing` seconds clear of
    every obstacle interval, so no outside observation can conflict."""
    end = start + duration
    for b, e in obstacles:
        if not (e <= start - spacing + EPS or b >= end + spacing - EPS):
            return False
    return True


def _find_start(
    lo: float,
    hi: float,
    duration: float,
    spacing: float,
    obstacles: Sequence[tuple[float, float]],
) -> float | None:
    """Earliest start in [lo, hi - duration] whose observation clears all
    obstacles by `spacing`; None when no candidate start works.

    Only obstacle right edges shifted by `spacing` can unblock a placement,
    so those are the only candidate starts besides `lo`.
    """
    limit = hi - duration
    if limit < lo - EPS:
        return None
    candidates = [lo]
    for _, e in obstacles:
        s = e + spacing
        if lo - EPS <= s <= limit + EPS:
            candidates.append(s)
    for s in sorted(candidates):
        s = min(max(s, lo), limit)
        if _zone_clear(s, duration, spacing, obstacles):
            return s
    return None


class _Workspace:
    """Mutable view of one instance while preassignment iterates."""

    def __init__(self, instance: SchedulingInstance) -> None:
        self.instance = instance
        self.alive: list[VisibleTimeWindow] = list(instance.windows)
        self.assigned: dict[str, PreAssignment] = {}
        self.spacing = {r.id: setup_time_bound(r) for r in instance.resources}
        # Preassignment is only sound where the usage budget can never
        # bind: fixing a mission on a tight resource could spend time a
        # more valuable mission needs.  A resource is safe when even
        # observing every visible mission fits its budget.
        visible: dict[str, set[str]] = {r.id: set() for r in instance.resources}
        for w in instance.windows:
            visible[w.resource].add(w.mission)
        self.usage_free = {
            r.id
            for r in instance.resources
            if sum(instance.mission(mid).duration for mid in visible[r.id])
            <= r.max_usage
        }

    def alive_on(self, resource_id: str) -> list[VisibleTimeWindow]:
        return [w for w in self.alive if w.resource == resource_id]

    def obstacles_for(
        self, resource_id: str, exclude_missions: set[str]
    ) -> list[tuple[float, float]]:
        """Intervals a new placement on the resource must keep clear of:
        other missions' surviving windows plus already fixed observations."""
        out = [
            (w.begin, w.end)
            for w in self.alive
            if w.resource == resource_id and w.mission not in exclude_missions
        ]
        for pa in self.assigned.values():
            if pa.resource == resource_id:
                d = self.instance.mission(pa.mission).duration
                out.append((pa.start, pa.start + d))
        return out

    def commit(self, pa: PreAssignment) -> None:
        self.assigned[pa.mission] = pa
        self.alive = [w for w in self.alive if w.mission != pa.mission]


def _free_parts(
    window: VisibleTimeWindow, others: Sequence[tuple[float, float]]
) -> list[tuple[float, float]]:
    """Sub-parts of `window` untouched by any other-mission window."""
    parts = [(window.begin, window.end)]
    for b, e in others:
        next_parts: list[tuple[float, float]] = []
        for pb, pe in parts:
            if e <= pb + EPS or b >= pe - EPS:
                next_parts.append((pb, pe))
                continue
            if b > pb + EPS:
                next_parts.append((pb, b))
            if e < pe - EPS:
                next_parts.append((e, pe))
        parts = next_parts
    return parts


def _free_window_pass(ws: _Workspace) -> bool:
    """Fix missions inside free window parts until nothing changes.

    A placement is taken only when it keeps a full setup-time zone clear of
    every other surviving window and fixed observation on the resource, so
    it can never invalidate a choice the final schedule might prefer.
    """
    changed_any = False
    changed = True
    while changed:
        changed = False
        for m in ws.instance.missions:
            if m.id in ws.assigned:
                continue
            for w in [w for w in ws.alive if w.mission == m.id]:
                if w.resource not in ws.usage_free:
                    continue
                spacing = ws.spacing[w.resource]
                obstacles = ws.obstacles_for(w.resource, {m.id})
                for pb, pe in _free_parts(w, obstacles):
                    if pe - pb < m.duration - EPS:
                        continue
                    start = _find_start(pb, pe, m.duration, spacing, obstacles)
                    if start is None:
                        continue
                    ws.commit(PreAssignment(m.id, w.resource, w, start))
                    changed = changed_any = True
                    break
                if m.id in ws.assigned:
                    break
    return changed_any


def _place_group(
    ws: _Workspace,
    resource_id: str,
    group: Sequence[tuple[Mission, VisibleTimeWindow]],
) -> list[PreAssignment] | None:
    """Chain the group earliest-start with full setup spacing; each member
    must also clear the zone of every window outside the group.  Returns
    None (and fixes nothing) when any member fails."""
    spacing = ws.spacing[resource_id]
    exclude = {m.id for m, _ in group}
    obstacles = ws.obstacles_for(resource_id, exclude)
    placements: list[PreAssignment] = []
    prev_end: float | None = None
    for m, w in sorted(group, key=lambda mw: (mw[1].begin, mw[1].end, mw[0].id)):
        start = w.begin if prev_end is None else max(w.begin, prev_end + spacing)
        if start > w.end - m.duration + EPS:
            return None
        start = min(start, w.end - m.duration)
        if not _zone_clear(start, m.duration, spacing, obstacles):
            return None
        placements.append(PreAssignment(m.id, resource_id, w, start))
        prev_end = start + m.duration
    return placements


def _group_candidates(
    ws: _Workspace, windows: Sequence[VisibleTimeWindow]
) -> list[tuple[Mission, VisibleTimeWindow]]:
    """One (mission, earliest window) entry per distinct mission."""
    chosen: dict[str, VisibleTimeWindow] = {}
    for w in sorted(windows, key=lambda w: (w.begin, w.end, w.mission)):
        chosen.setdefault(w.mission, w)
    return [(ws.instance.mission(mid), w) for mid, w in sorted(chosen.items())]


def _components(
    windows: Sequence[VisibleTimeWindow],
) -> list[list[VisibleTimeWindow]]:
    """Connected components of the overlap graph, left to right."""
    if not windows:
        return []
    merged = build_feasible_intervals(list(windows))
    return [list(f.member_windows) for f in merged]


def _span_capacity(
    ws: _Workspace, windows: Sequence[VisibleTimeWindow], delta: float
) -> tuple[float, float, list[str], int]:
    begin = min(w.begin for w in windows)
    end = max(w.end for w in windows)
    mission_ids = sorted({w.mission for w in windows})
    durations = [ws.instance.mission(mid).duration for mid in mission_ids]
    cap = max_assignable(end - begin, durations, delta)
    return begin, end, mission_ids, cap


def _capacity_pass(ws: _Workspace) -> bool:
    """Assign whole window groups whose count fits the span capacity.

    Each feasible time interval is inspected; when the candidate missions
    exceed the capacity, the lowest-degree conflict piece is removed
    (with the windows covering it) and the remaining components are
    retried.  Removal here only narrows attention; removed windows stay in
    the model and act as zone obstacles for any placement."""
    changed = False
    for r in sorted(ws.instance.resources, key=lambda r: r.id):
        if r.id not in ws.usage_free:
            continue
        delta = r.stabilize
        queue = _components(ws.alive_on(r.id))
        while queue:
            windows = queue.pop(0)
            # Commits inside this loop kill every window of the assigned
            # missions, so queued components may hold stale entries.
            alive = set(ws.alive)
            fresh = [w for w in windows if w in alive]
            if not fresh:
                continue
            if len(fresh) < len(windows):
                queue.extend(_components(fresh))
                continue
            _, _, mission_ids, cap = _span_capacity(ws, windows, delta)
            if len(mission_ids) <= cap:
                group = _group_candidates(ws, windows)
                placements = _place_group(ws, r.id, group)
                if placements is not None:
                    for pa in placements:
                        ws.commit(pa)
                    changed = True
                    continue
            segments = _coverage_segments(windows)
            if len(segments) <= 1:
                continue
            low = min(segments, key=lambda s: (s.degree, s.begin))
            rest = [
                w
                for w in windows
                if not (w.begin < low.end - EPS and w.end > low.begin + EPS)
            ]
            if len(rest) < len(windows):
                queue.extend(_components(rest))
    return changed


def preassign_free_windows(instance: SchedulingInstance) -> PreprocessResult:
    """Fix missions that own provably undisturbed window parts.

    Runs only the free-window rule (no capacity-based grouping, no
    subinterval emission); `preprocess` drives the full pipeline.
    """
    ws = _Workspace(instance)
    _free_window_pass(ws)
    return _finish(ws, ())


def _finish(
    ws: _Workspace, subintervals: tuple[EffectiveSubinterval, ...]
) -> PreprocessResult:
    reduced = SchedulingInstance(
        ws.instance.period,
        ws.instance.missions,
        ws.instance.resources,
        tuple(ws.alive),
    )
    ordered = tuple(
        ws.assigned[m.id] for m in ws.instance.missions if m.id in ws.assigned
    )
    return PreprocessResult(ordered, reduced, subintervals)


def effective_subintervals(
    fti: FeasibleTimeInterval,
    delta: float,
    durations_by_mission: dict[str, float],
) -> list[EffectiveSubinterval]:
    """Contended spans of one feasible time interval.

    Starting from the full interval, three independent shrink sequences
    drop the leftmost, the rightmost, or the longest conflict piece
    together with the windows covering it, re-examining the remaining
    components each round.  Every span seen along the way whose candidate
    mission count exceeds its capacity is emitted; duplicates are merged.
    """
    found: dict[tuple[float, float], EffectiveSubinterval] = {}

    def consider(windows: Sequence[VisibleTimeWindow]) -> None:
        begin = min(w.begin for w in windows)
        end = max(w.end for w in windows)
        mission_ids = sorted({w.mission for w in windows})
        durations = [durations_by_mission[mid] for mid in mission_ids]
        cap = max_assignable(end - begin, durations, delta)
        if len(mission_ids) > cap:
            key = (round(begin, 9), round(end, 9))
            if key not in found:
                found[key] = EffectiveSubinterval(
                    fti.resource,
                    begin,
                    end,
                    cap,
                    tuple(
                        sorted(
                            windows, key=lambda w: (w.begin, w.end, w.mission)
                        )
                    ),
                )

    def shrink(choose) -> None:
        queue = [list(fti.member_windows)]
        while queue:
            windows = queue.pop(0)
            if not windows:
                continue
            consider(windows)
            segments = _coverage_segments(windows)
            if len(segments) <= 1:
                continue
            seg = choose(segments)
            rest = [
                w
                for w in windows
                if not (w.begin < seg.end - EPS and w.end > seg.begin + EPS)
            ]
            if len(rest) < len(windows):
                queue.extend(_components(rest))

    shrink(lambda segs: segs[0])
    shrink(lambda segs: segs[-1])
    shrink(lambda segs: max(segs, key=lambda s: (s.end - s.begin, -s.begin)))
    return sorted(found.values(), key=lambda s: (s.begin, s.end))


def preprocess(instance: SchedulingInstance) -> PreprocessResult:
    """Full preprocessing of a normalized instance.

    Alternates the free-window rule and capacity-based group assignment to
    a fixpoint, then collects effective subintervals over the surviving
    windows.  Resources whose visible missions could overrun the usage
    budget take no preassignments; their subintervals are still emitted.
    """
    ws = _Workspace(instance)
    changed = True
    while changed:
        changed = _free_window_pass(ws)
        if _capacity_pass(ws):
            changed = True
    subs: list[EffectiveSubinterval] = []
    durations = {m.id: m.duration for m in instance.missions}
    for r in sorted(instance.resources, key=lambda r: r.id):
        for fti in build_feasible_intervals(ws.alive_on(r.id)):
            subs.extend(effective_subintervals(fti, r.stabilize, durations))
    subs.sort(key=lambda s: (s.resource, s.begin, s.end))
    return _finish(ws, tuple(subs))


def empty_preprocess(instance: SchedulingInstance) -> PreprocessResult:
    """A no-op preprocessing result: nothing fixed, nothing emitted."""
    return PreprocessResult((), instance, ())


# --- statistics ---------------------------------------------------------


def resource_stats(instance: SchedulingInstance) -> InstanceStats:
    """Per-resource contention statistics of a normalized instance.

    For each resource: window count N, total visible time T (sum of window
    lengths), feasible time F (measure of the union), packing capacity rn
    (summed over feasible time intervals), and contention (T - F) / F.
    paon and paot average window count and visible time per mission.
    """
    per: list[ResourceStats] = []
    n = len(instance.missions)
    durations = {m.id: m.duration for m in instance.missions}
    for r in instance.resources:
        windows = instance.windows_by_resource.get(r.id, ())
        total = sum(w.length for w in windows)
        ftis = build_feasible_intervals(list(windows))
        feasible = sum(f.length for f in ftis)
        cap = 0
        for f in ftis:
            mission_ids = sorted({w.mission for w in f.member_windows})
            cap += max_assignable(
                f.length, [durations[mid] for mid in mission_ids], r.stabilize
            )
        per.append(
            ResourceStats(
                resource=r.id,
                delta=r.stabilize,
                window_count=len(windows),
                total_visible=total,
                feasible_time=feasible,
                capacity=cap,
                contention=contention(total, feasible),
            )
        )
    paon, paot = assignment_opportunity(
        [s.window_count for s in per], [s.total_visible for s in per], n
    )
    return InstanceStats(tuple(per), paon, paot)


def assignment_opportunity(
    window_counts: Sequence[int],
    visible_times: Sequence[float],
    mission_count: int,
) -> tuple[float, float]:
    """Average windows per mission (paon) and visible seconds per mission
    (paot), from per-resource window counts and total visible times."""
    if mission_count <= 0:
        return 0.0, 0.0
    return (
        sum(window_counts) / mission_count,
        sum(visible_times) / mission_count,
    )
