"""Mixed-integer linear formulations of the scheduling problem.

Two builders produce models over a preprocessed instance.  The baseline
formulation uses one continuous start time per mission and big-M
disjunctions for every mission pair sharing a resource.  The improved
formulation attaches one start time to every window and only emits pair
constraints where window geometry demands them; overlapping window pairs
get indicator binaries with window-bound coefficients, so no big-M
constant appears anywhere in that model.
"""

from __future__ import annotations

import enum
from collections import Counter
from typing import Mapping, Sequence

from .instance import (
    EPS,
    Mission,
    Resource,
    SchedulingInstance,
    VisibleTimeWindow,
    setup_time_bound,
)
from .linmodel import BINARY, CONTINUOUS, LinearModel, ModelBuilder
from .solver import Assignment, Schedule, make_schedule
from .windowing import PreprocessResult, empty_preprocess

__all__ = [
    "FormulationError",
    "PairClass",
    "big_m",
    "classify_pair",
    "build_baseline",
    "build_improved",
    "embed_schedule",
    "extract_schedule",
]


class FormulationError(ValueError):
    """Raised for inconsistent build inputs."""


def big_m(instance: SchedulingInstance) -> float:
    """Big-M constant: period length plus the largest observation duration
    plus the largest setup-time bound.  Safe for every start-time
    difference the baseline disjunctions can see."""
    max_d = max((m.duration for m in instance.missions), default=0.0)
    max_s = max((setup_time_bound(r) for r in instance.resources), default=0.0)
    return instance.period.length + max_d + max_s


class PairClass(enum.Enum):
    OVERLAPPING = "overlapping"
    ORDERED_FIRST_SECOND = "ordered_first_second"
    ORDERED_SECOND_FIRST = "ordered_second_first"
    INDEPENDENT = "independent"


def classify_pair(
    first: VisibleTimeWindow,
    second: VisibleTimeWindow,
    spacing: float,
) -> PairClass:
    """Geometric relation of two windows of different missions.

    Overlap needs positive shared measure; windows touching at one point
    are ordered.  Disjoint windows separated by at least the setup spacing
    are independent: no pair constraint can ever bind.
    """
    if first.mission == second.mission:
        raise FormulationError("classify_pair needs windows of different missions")
    if min(first.end, second.end) - max(first.begin, second.begin) > EPS:
        return PairClass.OVERLAPPING
    if first.begin <= second.begin:
        gap = second.begin - first.end
        if gap >= spacing - EPS:
            return PairClass.INDEPENDENT
        return PairClass.ORDERED_FIRST_SECOND
    gap = first.begin - second.end
    if gap >= spacing - EPS:
        return PairClass.INDEPENDENT
    return PairClass.ORDERED_SECOND_FIRST


def _check_prep(instance: SchedulingInstance, prep: PreprocessResult) -> None:
    reduced = prep.reduced_instance
    if reduced.period != instance.period:
        raise FormulationError("preprocessing result belongs to a different period")
    if [m.id for m in reduced.missions] != [m.id for m in instance.missions]:
        raise FormulationError("preprocessing result lists different missions")
    pool = Counter(instance.windows)
    for w in reduced.windows:
        if pool[w] <= 0:
            raise FormulationError(
                f"reduced window {w.mission}/{w.resource} [{w.begin}, {w.end}] "
                "is not part of the instance"
            )
        pool[w] -= 1
    fixed = {pa.mission for pa in prep.preassigned}
    for w in reduced.windows:
        if w.mission in fixed:
            raise FormulationError(f"preassigned mission {w.mission} still has windows")
    surviving = set(reduced.windows)
    for sub in prep.subintervals:
        for w in sub.candidate_windows:
            if w not in surviving:
                raise FormulationError("subinterval references a removed window")


def _values(instance: SchedulingInstance, objective: str):
    if objective == "count":
        return lambda m: 1
    if objective == "weight":
        return lambda m: instance.mission(m).weight
    raise FormulationError(f"unknown objective {objective!r}")


class _Context:
    """Shared naming and bookkeeping for both builders."""

    def __init__(
        self,
        instance: SchedulingInstance,
        prep: PreprocessResult,
        objective: str,
    ) -> None:
        _check_prep(instance, prep)
        self.reduced = prep.reduced_instance
        self.prep = prep
        self.objective = objective
        self.value = _values(self.reduced, objective)
        fixed = {pa.mission for pa in prep.preassigned}
        self.modeled = [m for m in self.reduced.missions if m.id not in fixed]
        self.mission_index = {m.id: i for i, m in enumerate(self.reduced.missions)}
        self.spacing = {r.id: setup_time_bound(r) for r in self.reduced.resources}
        self.resources = sorted(self.reduced.resources, key=lambda r: r.id)
        # Stable window index within each (mission, resource) pair.
        self.window_key: dict[VisibleTimeWindow, tuple[str, str, int]] = {}
        self.windows_of: dict[str, list[VisibleTimeWindow]] = {}
        for m in self.modeled:
            for r_id in self.reduced.resources_of_mission(m.id):
                pair = self.reduced.pair_windows(m.id, r_id)
                for k, w in enumerate(pair):
                    self.window_key[w] = (m.id, r_id, k)
            self.windows_of[m.id] = list(self.reduced.windows_by_mission[m.id])
        self.preassigned_value = sum(self.value(pa.mission) for pa in prep.preassigned)

    def x_name(self, w: VisibleTimeWindow) -> str:
        m, r, k = self.window_key[w]
        return f"x_{m}_{r}_{k}"

    def metadata(self, formulation: str, extra: Mapping[str, object]) -> dict:
        meta = {
            "formulation": formulation,
            "objective": self.objective,
            "n_prime": self.prep.n_prime,
            "preassigned_value": self.preassigned_value,
        }
        meta.update(extra)
        return meta

    def subinterval_rows(self, builder: ModelBuilder) -> None:
        """Capacity and duration-packing rows for effective subintervals."""
        counters: dict[str, int] = {}
        for sub in self.prep.subintervals:
            idx = counters.get(sub.resource, 0)
            counters[sub.resource] = idx + 1
            delta = self.reduced.resource(sub.resource).stabilize
            xs = [self.x_name(w) for w in sub.candidate_windows if w in self.window_key]
            if not xs:
                continue
            builder.add_constraint(
                f"subn_{sub.resource}_{idx}",
                [(x, 1.0) for x in xs],
                "<=",
                float(sub.capacity),
            )
            terms = []
            for w in sub.candidate_windows:
                if w not in self.window_key:
                    continue
                d = self.reduced.mission(w.mission).duration
                terms.append((self.x_name(w), d + delta))
            builder.add_constraint(
                f"subt_{sub.resource}_{idx}",
                terms,
                "<=",
                sub.length + delta,
            )


def _terms(pairs: Sequence[tuple[str, float]]) -> list[tuple[str, float]]:
    return [(name, coef) for name, coef in pairs if coef != 0.0]


def build_baseline(
    instance: SchedulingInstance,
    prep: PreprocessResult | None,
    objective: str = "weight",
) -> LinearModel:
    """Big-M formulation: one start time per mission, window-selection
    binaries, and ordering binaries for every mission pair sharing a
    resource."""
    if prep is None:
        prep = empty_preprocess(instance)
    ctx = _Context(instance, prep, objective)
    reduced = ctx.reduced
    horizon = reduced.period.end
    u = big_m(reduced)
    b = ModelBuilder("max")

    for m in ctx.modeled:
        b.add_variable(f"t_{m.id}", CONTINUOUS, 0.0, max(0.0, horizon - m.duration))
    for m in ctx.modeled:
        for w in ctx.windows_of[m.id]:
            b.add_variable(ctx.x_name(w), BINARY, 0.0, 1.0)

    shared_pairs: dict[tuple[str, str], list[str]] = {}
    for r in ctx.resources:
        on_r = [m for m in ctx.modeled if reduced.pair_windows(m.id, r.id)]
        for i, m1 in enumerate(on_r):
            for m2 in on_r[i + 1 :]:
                b.add_variable(f"f_{m1.id}_{m2.id}_{r.id}", BINARY, 0.0, 1.0)
                b.add_variable(f"f_{m2.id}_{m1.id}_{r.id}", BINARY, 0.0, 1.0)
                shared_pairs.setdefault((m1.id, m2.id), []).append(r.id)

    for m in ctx.modeled:
        xs = [ctx.x_name(w) for w in ctx.windows_of[m.id]]
        if xs:
            b.add_constraint(f"acc_{m.id}", [(x, 1.0) for x in xs], "<=", 1.0)
    for r in ctx.resources:
        terms = []
        for w in reduced.windows_by_resource[r.id]:
            if w in ctx.window_key:
                terms.append((ctx.x_name(w), reduced.mission(w.mission).duration))
        if terms:
            b.add_constraint(f"use_{r.id}", terms, "<=", r.max_usage)

    for m in ctx.modeled:
        for w in ctx.windows_of[m.id]:
            mid, rid, k = ctx.window_key[w]
            x = ctx.x_name(w)
            b.add_constraint(
                f"obslo_{mid}_{rid}_{k}",
                _terms([(f"t_{mid}", 1.0), (x, -w.begin)]),
                ">=",
                0.0,
            )
            # t + (U - End + D) x <= U  linearizes  t <= End - D + U (1 - x).
            b.add_constraint(
                f"obsup_{mid}_{rid}_{k}",
                _terms([(f"t_{mid}", 1.0), (x, u - (w.end - m.duration))]),
                "<=",
                u,
            )

    for r in ctx.resources:
        on_r = [m for m in ctx.modeled if reduced.pair_windows(m.id, r.id)]
        spacing = ctx.spacing[r.id]
        for i, m1 in enumerate(on_r):
            xs1 = [ctx.x_name(w) for w in reduced.pair_windows(m1.id, r.id)]
            for m2 in on_r[i + 1 :]:
                xs2 = [ctx.x_name(w) for w in reduced.pair_windows(m2.id, r.id)]
                f12 = f"f_{m1.id}_{m2.id}_{r.id}"
                f21 = f"f_{m2.id}_{m1.id}_{r.id}"
                # t1 - t2 >= (D2 + spacing) f12 - (U - D2)(1 - f12)
                b.add_constraint(
                    f"seq_{m1.id}_{m2.id}_{r.id}",
                    _terms(
                        [
                            (f"t_{m1.id}", 1.0),
                            (f"t_{m2.id}", -1.0),
                            (f12, -(u + spacing)),
                        ]
                    ),
                    ">=",
                    m2.duration - u,
                )
                b.add_constraint(
                    f"seq_{m2.id}_{m1.id}_{r.id}",
                    _terms(
                        [
                            (f"t_{m2.id}", 1.0),
                            (f"t_{m1.id}", -1.0),
                            (f21, -(u + spacing)),
                        ]
                    ),
                    ">=",
                    m1.duration - u,
                )
                b.add_constraint(
                    f"fsel1_{m1.id}_{m2.id}_{r.id}",
                    [(f12, 1.0), (f21, 1.0)] + [(x, -1.0) for x in xs1],
                    "<=",
                    0.0,
                )
                b.add_constraint(
                    f"fsel2_{m1.id}_{m2.id}_{r.id}",
                    [(f12, 1.0), (f21, 1.0)] + [(x, -1.0) for x in xs2],
                    "<=",
                    0.0,
                )
                b.add_constraint(
                    f"fsel3_{m1.id}_{m2.id}_{r.id}",
                    [(f12, 1.0), (f21, 1.0)]
                    + [(x, -1.0) for x in xs1]
                    + [(x, -1.0) for x in xs2],
                    ">=",
                    -1.0,
                )

    for (m1, m2), rids in shared_pairs.items():
        terms = []
        for rid in rids:
            terms.append((f"f_{m1}_{m2}_{rid}", 1.0))
            terms.append((f"f_{m2}_{m1}_{rid}", 1.0))
        b.add_constraint(f"pairone_{m1}_{m2}", terms, "<=", 1.0)

    ctx.subinterval_rows(b)

    objective_terms = []
    for m in ctx.modeled:
        for w in ctx.windows_of[m.id]:
            objective_terms.append((ctx.x_name(w), float(ctx.value(m.id))))
    return b.build(objective_terms, ctx.metadata("baseline", {"big_m": u}))


def build_improved(
    instance: SchedulingInstance,
    prep: PreprocessResult | None,
    objective: str = "weight",
) -> LinearModel:
    """Window-indexed formulation without any big-M constant.

    Each window carries its own start variable, pinned to 0 while the
    window is unselected.  Pair constraints exist only for window pairs
    that geometrically interact: disjoint pairs closer than the setup
    spacing get one ordering row, overlapping pairs get two indicator
    rows with selection-consistency rows, and anything further apart gets
    nothing.
    """
    if prep is None:
        prep = empty_preprocess(instance)
    ctx = _Context(instance, prep, objective)
    reduced = ctx.reduced
    if abs(reduced.period.begin) > EPS:
        raise FormulationError("window-indexed formulation needs a normalized instance")
    horizon = reduced.period.end
    b = ModelBuilder("max")

    def t_name(w: VisibleTimeWindow) -> str:
        mid, rid, k = ctx.window_key[w]
        return f"t_{mid}_{rid}_{k}"

    for m in ctx.modeled:
        for w in ctx.windows_of[m.id]:
            b.add_variable(t_name(w), CONTINUOUS, 0.0, max(0.0, horizon - m.duration))
    for m in ctx.modeled:
        for w in ctx.windows_of[m.id]:
            b.add_variable(ctx.x_name(w), BINARY, 0.0, 1.0)

    overlap_pairs: dict[
        str, list[tuple[VisibleTimeWindow, VisibleTimeWindow]]
    ] = {}
    ordered_pairs: dict[
        str, list[tuple[VisibleTimeWindow, VisibleTimeWindow]]
    ] = {}
    for r in ctx.resources:
        windows = [w for w in reduced.windows_by_resource[r.id] if w in ctx.window_key]
        spacing = ctx.spacing[r.id]
        overlaps: list[tuple[VisibleTimeWindow, VisibleTimeWindow]] = []
        ordered: list[tuple[VisibleTimeWindow, VisibleTimeWindow]] = []
        for i, w1 in enumerate(windows):
            for w2 in windows[i + 1 :]:
                if w1.mission == w2.mission:
                    continue
                cls = classify_pair(w1, w2, spacing)
                if cls is PairClass.OVERLAPPING:
                    overlaps.append((w1, w2))
                elif cls is PairClass.ORDERED_FIRST_SECOND:
                    ordered.append((w1, w2))
                elif cls is PairClass.ORDERED_SECOND_FIRST:
                    ordered.append((w2, w1))
        overlap_pairs[r.id] = overlaps
        ordered_pairs[r.id] = ordered
        for w1, w2 in overlaps:
            m1, r1, k1 = ctx.window_key[w1]
            m2, r2, k2 = ctx.window_key[w2]
            b.add_variable(f"f_{r.id}_{m1}_{k1}_{m2}_{k2}", BINARY, 0.0, 1.0)
            b.add_variable(f"f_{r.id}_{m2}_{k2}_{m1}_{k1}", BINARY, 0.0, 1.0)

    for m in ctx.modeled:
        xs = [ctx.x_name(w) for w in ctx.windows_of[m.id]]
        if xs:
            b.add_constraint(f"acc_{m.id}", [(x, 1.0) for x in xs], "<=", 1.0)
    for r in ctx.resources:
        terms = []
        for w in reduced.windows_by_resource[r.id]:
            if w in ctx.window_key:
                terms.append((ctx.x_name(w), reduced.mission(w.mission).duration))
        if terms:
            b.add_constraint(f"use_{r.id}", terms, "<=", r.max_usage)

    for m in ctx.modeled:
        for w in ctx.windows_of[m.id]:
            mid, rid, k = ctx.window_key[w]
            x = ctx.x_name(w)
            t = t_name(w)
            b.add_constraint(
                f"obslo_{mid}_{rid}_{k}",
                _terms([(t, 1.0), (x, -w.begin)]),
                ">=",
                0.0,
            )
            # With x = 0 this pins t to 0; with x = 1 it caps the start at
            # the latest feasible moment inside the window.
            b.add_constraint(
                f"obsup_{mid}_{rid}_{k}",
                _terms([(t, 1.0), (x, -(w.end - m.duration))]),
                "<=",
                0.0,
            )

    pair_sum: dict[tuple[str, str], list[str]] = {}
    for r in ctx.resources:
        spacing = ctx.spacing[r.id]
        for w1, w2 in ordered_pairs[r.id]:
            # w1 is entirely before w2 and too close for free sequencing.
            m1, _, k1 = ctx.window_key[w1]
            m2, _, k2 = ctx.window_key[w2]
            d1 = reduced.mission(m1).duration
            b.add_constraint(
                f"ord_{r.id}_{m1}_{k1}_{m2}_{k2}",
                _terms(
                    [
                        (t_name(w2), 1.0),
                        (t_name(w1), -1.0),
                        (ctx.x_name(w1), -(d1 + spacing)),
                        (ctx.x_name(w2), -(w1.end + spacing)),
                    ]
                ),
                ">=",
                -(w1.end + spacing),
            )
        for w1, w2 in overlap_pairs[r.id]:
            m1, _, k1 = ctx.window_key[w1]
            m2, _, k2 = ctx.window_key[w2]
            d1 = reduced.mission(m1).duration
            d2 = reduced.mission(m2).duration
            fa = f"f_{r.id}_{m1}_{k1}_{m2}_{k2}"  # w1 observed after w2
            fb = f"f_{r.id}_{m2}_{k2}_{m1}_{k1}"
            tag = f"{r.id}_{m1}_{k1}_{m2}_{k2}"
            b.add_constraint(
                f"ovl1_{tag}",
                _terms(
                    [
                        (t_name(w1), 1.0),
                        (t_name(w2), -1.0),
                        (fa, -(w2.end + spacing)),
                        (fb, -w1.begin),
                    ]
                ),
                ">=",
                -(w2.end - d2),
            )
            b.add_constraint(
                f"ovl2_{tag}",
                _terms(
                    [
                        (t_name(w2), 1.0),
                        (t_name(w1), -1.0),
                        (fb, -(w1.end + spacing)),
                        (fa, -w2.begin),
                    ]
                ),
                ">=",
                -(w1.end - d1),
            )
            b.add_constraint(
                f"fsel1_{tag}",
                [(fa, 1.0), (fb, 1.0), (ctx.x_name(w1), -1.0)],
                "<=",
                0.0,
            )
            b.add_constraint(
                f"fsel2_{tag}",
                [(fa, 1.0), (fb, 1.0), (ctx.x_name(w2), -1.0)],
                "<=",
                0.0,
            )
            b.add_constraint(
                f"fsel3_{tag}",
                [(fa, 1.0), (fb, 1.0), (ctx.x_name(w1), -1.0), (ctx.x_name(w2), -1.0)],
                ">=",
                -1.0,
            )
            key = (
                (m1, m2) if ctx.mission_index[m1] < ctx.mission_index[m2] else (m2, m1)
            )
            pair_sum.setdefault(key, []).extend([fa, fb])

    for (m1, m2), fs in pair_sum.items():
        b.add_constraint(
            f"pairone_{m1}_{m2}", [(f, 1.0) for f in fs], "<=", 1.0
        )

    ctx.subinterval_rows(b)

    objective_terms = []
    for m in ctx.modeled:
        for w in ctx.windows_of[m.id]:
            objective_terms.append((ctx.x_name(w), float(ctx.value(m.id))))
    return b.build(objective_terms, ctx.metadata("improved", {}))


# --- schedule embedding and extraction ----------------------------------


def _locate_window(
    ctx_windows: Mapping[VisibleTimeWindow, tuple[str, str, int]],
    assignment: Assignment,
) -> tuple[str, str, int]:
    if assignment.window in ctx_windows:
        return ctx_windows[assignment.window]
    for w, key in ctx_windows.items():
        if (
            w.mission == assignment.mission
            and w.resource == assignment.resource
            and abs(w.begin - assignment.window.begin) <= 1e-6
            and abs(w.end - assignment.window.end) <= 1e-6
        ):
            return key
    raise FormulationError(
        f"schedule window for {assignment.mission} on {assignment.resource} "
        "does not exist in the model"
    )


def embed_schedule(
    instance: SchedulingInstance,
    prep: PreprocessResult | None,
    model: LinearModel,
    schedule: Schedule,
) -> dict[str, float]:
    """Variable values representing `schedule` in `model`.

    Preassigned missions are skipped (they are not modeled); ordering
    binaries are set from start-time comparisons.  The result is a full
    assignment suitable for evaluation.
    """
    if prep is None:
        prep = empty_preprocess(instance)
    ctx = _Context(instance, prep, model.metadata.get("objective", "weight"))
    formulation = model.metadata.get("formulation")
    values = {v.name: 0.0 for v in model.variables}
    fixed = {pa.mission for pa in prep.preassigned}
    placed: dict[str, tuple[str, str, int, float]] = {}
    for a in schedule.assignments:
        if a.mission in fixed:
            continue
        mid, rid, k = _locate_window(ctx.window_key, a)
        if mid in placed:
            raise FormulationError(f"mission {mid} appears twice in the schedule")
        placed[mid] = (mid, rid, k, a.start)
        values[f"x_{mid}_{rid}_{k}"] = 1.0
        if formulation == "baseline":
            values[f"t_{mid}"] = a.start
        else:
            values[f"t_{mid}_{rid}_{k}"] = a.start

    if formulation == "baseline":
        by_resource: dict[str, list[tuple[str, float]]] = {}
        for mid, (_, rid, _, start) in placed.items():
            by_resource.setdefault(rid, []).append((mid, start))
        for rid, entries in by_resource.items():
            for i, (m1, s1) in enumerate(entries):
                for m2, s2 in entries[i + 1 :]:
                    late, early = (m1, m2) if s1 > s2 else (m2, m1)
                    name = f"f_{late}_{early}_{rid}"
                    if name in values:
                        values[name] = 1.0
    else:
        for mid, (_, rid, k, start) in placed.items():
            for mid2, (_, rid2, k2, start2) in placed.items():
                if mid >= mid2 or rid != rid2:
                    continue
                if start > start2:
                    name = f"f_{rid}_{mid}_{k}_{mid2}_{k2}"
                    alt = f"f_{rid}_{mid}_{k}_{mid2}_{k2}"
                else:
                    name = f"f_{rid}_{mid2}_{k2}_{mid}_{k}"
                    alt = name
                if name in values:
                    values[name] = 1.0
    return values


def extract_schedule(
    instance: SchedulingInstance,
    prep: PreprocessResult | None,
    model: LinearModel,
    values: Mapping[str, float],
) -> Schedule:
    """Schedule from an integral model solution, preassignments included."""
    if prep is None:
        prep = empty_preprocess(instance)
    ctx = _Context(instance, prep, model.metadata.get("objective", "weight"))
    formulation = model.metadata.get("formulation")
    key_to_window = {key: w for w, key in ctx.window_key.items()}
    assignments: list[Assignment] = [
        Assignment(pa.mission, pa.resource, pa.window, pa.start)
        for pa in prep.preassigned
    ]
    seen: set[str] = set()
    for w, (mid, rid, k) in ctx.window_key.items():
        if values.get(f"x_{mid}_{rid}_{k}", 0.0) <= 0.5:
            continue
        if mid in seen:
            raise FormulationError(f"solution selects mission {mid} twice")
        seen.add(mid)
        if formulation == "baseline":
            start = values.get(f"t_{mid}", 0.0)
        else:
            start = values.get(f"t_{mid}_{rid}_{k}", 0.0)
        assignments.append(Assignment(mid, rid, key_to_window[(mid, rid, k)], start))
    return make_schedule(ctx.reduced, assignments)
