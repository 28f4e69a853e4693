"""Domain model for observation scheduling instances.

An instance couples a scheduling period with missions (targets needing one
continuous observation), imaging resources, and the visible time windows
during which a resource can observe a mission.  All times are seconds,
all angles radians.  Instances round-trip through a strict JSON document
format: unknown keys are rejected so that stale or misspelled fields
cannot silently change the meaning of an experiment.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Iterable, Mapping

# Interval arithmetic tolerance, in seconds.  Feasibility checks on
# schedules use the looser tolerance in validator.py.
EPS = 1e-9

__all__ = [
    "EPS",
    "InstanceError",
    "SchedulingPeriod",
    "Mission",
    "Resource",
    "VisibleTimeWindow",
    "AngleSample",
    "SchedulingInstance",
    "parse_instance",
    "serialize_instance",
    "instance_to_dict",
    "instance_from_dict",
    "normalize_and_clip",
    "setup_time_exact",
    "setup_time_bound",
]


class InstanceError(ValueError):
    """Raised for malformed instance documents or invariant violations."""


@dataclass(frozen=True)
class SchedulingPeriod:
    """Closed planning horizon [begin, end] in seconds."""

    begin: float
    end: float

    def __post_init__(self) -> None:
        if not self.begin >= 0.0:
            raise InstanceError(f"period begin must be >= 0, got {self.begin}")
        if not self.end > self.begin:
            raise InstanceError(
                f"period end must exceed begin, got [{self.begin}, {self.end}]"
            )

    @property
    def length(self) -> float:
        return self.end - self.begin


@dataclass(frozen=True)
class Mission:
    """One observation request.

    The observation must run for `duration` contiguous seconds, start no
    earlier than `earliest` and finish no later than `latest`, and counts
    `weight` toward the weighted objective.
    """

    id: str
    earliest: float
    latest: float
    duration: float
    weight: int

    def __post_init__(self) -> None:
        if not self.id:
            raise InstanceError("mission id must be a non-empty string")
        if not self.earliest <= self.latest:
            raise InstanceError(
                f"mission {self.id}: earliest {self.earliest} exceeds latest {self.latest}"
            )
        if not self.duration > 0.0:
            raise InstanceError(f"mission {self.id}: duration must be positive")
        if not isinstance(self.weight, int) or isinstance(self.weight, bool):
            raise InstanceError(f"mission {self.id}: weight must be an integer")
        if self.weight < 1:
            raise InstanceError(f"mission {self.id}: weight must be positive")


@dataclass(frozen=True)
class Resource:
    """An imaging resource (satellite sensor).

    `max_usage` caps the summed observation time over the period.  The
    attitude model bounds slewing between consecutive observations:
    swing angle within [-max_swing, max_swing] changed at `swing_rate`
    rad/s, rotation angle in [0, 2*pi) changed at `rotation_rate` rad/s,
    plus `stabilize` seconds of settling after each maneuver.
    """

    id: str
    max_usage: float
    max_swing: float
    swing_rate: float
    rotation_rate: float
    stabilize: float

    def __post_init__(self) -> None:
        if not self.id:
            raise InstanceError("resource id must be a non-empty string")
        if not self.max_usage > 0.0:
            raise InstanceError(f"resource {self.id}: max_usage must be positive")
        if self.max_swing < 0.0:
            raise InstanceError(f"resource {self.id}: max_swing must be >= 0")
        if not self.swing_rate > 0.0:
            raise InstanceError(f"resource {self.id}: swing_rate must be positive")
        if not self.rotation_rate > 0.0:
            raise InstanceError(f"resource {self.id}: rotation_rate must be positive")
        if self.stabilize < 0.0:
            raise InstanceError(f"resource {self.id}: stabilize must be >= 0")


@dataclass(frozen=True)
class VisibleTimeWindow:
    """Interval [begin, end] during which `resource` can observe `mission`."""

    mission: str
    resource: str
    begin: float
    end: float

    def __post_init__(self) -> None:
        if not self.begin < self.end:
            raise InstanceError(
                f"window for {self.mission} on {self.resource}: "
                f"begin {self.begin} must precede end {self.end}"
            )

    @property
    def length(self) -> float:
        return self.end - self.begin


@dataclass(frozen=True)
class AngleSample:
    """Attitude (swing, rotation) a resource needs for one observation."""

    swing: float
    rotation: float

    def check(self, resource: Resource) -> None:
        if abs(self.swing) > resource.max_swing + EPS:
            raise InstanceError(
                f"swing {self.swing} outside +/-{resource.max_swing} "
                f"for resource {resource.id}"
            )
        if not 0.0 <= self.rotation < 2.0 * math.pi:
            raise InstanceError(f"rotation {self.rotation} outside [0, 2*pi)")


def setup_time_exact(
    sample_from: AngleSample, sample_to: AngleSample, resource: Resource
) -> float:
    """Exact setup time between two attitudes on `resource`, in seconds.

    Rotation is periodic, so the resource turns the shorter way around;
    the rotation term therefore never exceeds a half turn.
    """
    sample_from.check(resource)
    sample_to.check(resource)
    rotation_gap = abs(sample_to.rotation - sample_from.rotation)
    rotation_gap = min(rotation_gap, 2.0 * math.pi - rotation_gap)
    return (
        abs(sample_to.swing - sample_from.swing) / resource.swing_rate
        + rotation_gap / resource.rotation_rate
        + resource.stabilize
    )


def setup_time_bound(resource: Resource) -> float:
    """Upper bound on the setup time between any two attitudes of `resource`.

    Swing can traverse at most the full 2*max_swing range; rotation at most
    pi because the shorter direction around the circle never exceeds a half
    turn.  Some schedulers space observations by this bound when the actual
    attitudes are unknown.
    """
    return (
        2.0 * resource.max_swing / resource.swing_rate
        + math.pi / resource.rotation_rate
        + resource.stabilize
    )


@dataclass(frozen=True)
class SchedulingInstance:
    """A full problem instance.

    Missions and resources keep their declaration order; ids are unique.
    Every window references a declared mission and resource.
    """

    period: SchedulingPeriod
    missions: tuple[Mission, ...]
    resources: tuple[Resource, ...]
    windows: tuple[VisibleTimeWindow, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "missions", tuple(self.missions))
        object.__setattr__(self, "resources", tuple(self.resources))
        object.__setattr__(self, "windows", tuple(self.windows))
        seen: set[str] = set()
        for m in self.missions:
            if m.id in seen:
                raise InstanceError(f"duplicate mission id {m.id}")
            seen.add(m.id)
        seen = set()
        for r in self.resources:
            if r.id in seen:
                raise InstanceError(f"duplicate resource id {r.id}")
            seen.add(r.id)
        mission_ids = {m.id for m in self.missions}
        resource_ids = {r.id for r in self.resources}
        for w in self.windows:
            if w.mission not in mission_ids:
                raise InstanceError(f"window references unknown mission {w.mission}")
            if w.resource not in resource_ids:
                raise InstanceError(f"window references unknown resource {w.resource}")

    @cached_property
    def _missions_by_id(self) -> Mapping[str, Mission]:
        return {m.id: m for m in self.missions}

    @cached_property
    def _resources_by_id(self) -> Mapping[str, Resource]:
        return {r.id: r for r in self.resources}

    def mission(self, mission_id: str) -> Mission:
        try:
            return self._missions_by_id[mission_id]
        except KeyError:
            raise InstanceError(f"unknown mission {mission_id}") from None

    def resource(self, resource_id: str) -> Resource:
        try:
            return self._resources_by_id[resource_id]
        except KeyError:
            raise InstanceError(f"unknown resource {resource_id}") from None

    @cached_property
    def windows_by_resource(self) -> Mapping[str, tuple[VisibleTimeWindow, ...]]:
        grouped: dict[str, list[VisibleTimeWindow]] = {r.id: [] for r in self.resources}
        for w in self.windows:
            grouped[w.resource].append(w)
        return {rid: tuple(ws) for rid, ws in grouped.items()}

    @cached_property
    def windows_by_mission(self) -> Mapping[str, tuple[VisibleTimeWindow, ...]]:
        grouped: dict[str, list[VisibleTimeWindow]] = {m.id: [] for m in self.missions}
        for w in self.windows:
            grouped[w.mission].append(w)
        return {mid: tuple(ws) for mid, ws in grouped.items()}

    def resources_of_mission(self, mission_id: str) -> tuple[str, ...]:
        """Resource ids with at least one window for the mission, deduplicated
        in order of first appearance."""
        out: list[str] = []
        for w in self.windows_by_mission.get(mission_id, ()):
            if w.resource not in out:
                out.append(w.resource)
        return tuple(out)

    def missions_of_resource(self, resource_id: str) -> tuple[str, ...]:
        out: list[str] = []
        for w in self.windows_by_resource.get(resource_id, ()):
            if w.mission not in out:
                out.append(w.mission)
        return tuple(out)

    def pair_windows(
        self, mission_id: str, resource_id: str
    ) -> tuple[VisibleTimeWindow, ...]:
        """Windows of one (mission, resource) pair, in declaration order.

        The position of a window in this tuple is its stable index used by
        variable naming in the linear formulations.
        """
        return tuple(
            w
            for w in self.windows_by_mission.get(mission_id, ())
            if w.resource == resource_id
        )


# --- strict JSON document handling -------------------------------------

_PERIOD_KEYS = {"begin", "end"}
_MISSION_KEYS = {"id", "earliest", "latest", "duration", "weight"}
_RESOURCE_KEYS = {"id", "max_usage", "max_swing", "swing_rate", "rotation_rate", "stabilize"}
_RESOURCE_OPTIONAL = {"max_usage"}
_WINDOW_KEYS = {"mission", "resource", "begin", "end"}
_TOP_KEYS = {"period", "missions", "resources", "windows"}


def _expect_object(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise InstanceError(f"{where}: expected a JSON object")
    return value


def _expect_array(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise InstanceError(f"{where}: expected a JSON array")
    return value


def _check_keys(obj: dict, where: str, required: set[str], optional: set[str] = frozenset()) -> None:
    unknown = sorted(set(obj) - required - optional)
    if unknown:
        raise InstanceError(f"{where}: unknown key(s) {', '.join(unknown)}")
    missing = sorted(required - set(obj))
    if missing:
        raise InstanceError(f"{where}: missing key(s) {', '.join(missing)}")


def _number(obj: dict, key: str, where: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceError(f"{where}: {key} must be a number")
    return float(value)


def _integer(obj: dict, key: str, where: str) -> int:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(f"{where}: {key} must be an integer")
    return value


def _string(obj: dict, key: str, where: str) -> str:
    value = obj[key]
    if not isinstance(value, str):
        raise InstanceError(f"{where}: {key} must be a string")
    return value


def instance_from_dict(doc: Any) -> SchedulingInstance:
    """Build an instance from a parsed JSON document, rejecting unknown keys."""
    top = _expect_object(doc, "instance document")
    _check_keys(top, "instance document", _TOP_KEYS)

    pobj = _expect_object(top["period"], "period")
    _check_keys(pobj, "period", _PERIOD_KEYS)
    period = SchedulingPeriod(_number(pobj, "begin", "period"), _number(pobj, "end", "period"))

    missions = []
    for i, mobj in enumerate(_expect_array(top["missions"], "missions")):
        where = f"missions[{i}]"
        mobj = _expect_object(mobj, where)
        _check_keys(mobj, where, _MISSION_KEYS)
        missions.append(
            Mission(
                id=_string(mobj, "id", where),
                earliest=_number(mobj, "earliest", where),
                latest=_number(mobj, "latest", where),
                duration=_number(mobj, "duration", where),
                weight=_integer(mobj, "weight", where),
            )
        )

    resources = []
    for i, robj in enumerate(_expect_array(top["resources"], "resources")):
        where = f"resources[{i}]"
        robj = _expect_object(robj, where)
        _check_keys(robj, where, _RESOURCE_KEYS - _RESOURCE_OPTIONAL, _RESOURCE_OPTIONAL)
        # A missing usage cap means the resource may observe for the whole
        # period, so the cap defaults to the period length.
        max_usage = _number(robj, "max_usage", where) if "max_usage" in robj else period.length
        resources.append(
            Resource(
                id=_string(robj, "id", where),
                max_usage=max_usage,
                max_swing=_number(robj, "max_swing", where),
                swing_rate=_number(robj, "swing_rate", where),
                rotation_rate=_number(robj, "rotation_rate", where),
                stabilize=_number(robj, "stabilize", where),
            )
        )

    windows = []
    for i, wobj in enumerate(_expect_array(top["windows"], "windows")):
        where = f"windows[{i}]"
        wobj = _expect_object(wobj, where)
        _check_keys(wobj, where, _WINDOW_KEYS)
        windows.append(
            VisibleTimeWindow(
                mission=_string(wobj, "mission", where),
                resource=_string(wobj, "resource", where),
                begin=_number(wobj, "begin", where),
                end=_number(wobj, "end", where),
            )
        )

    return SchedulingInstance(period, tuple(missions), tuple(resources), tuple(windows))


def parse_instance(text: str) -> SchedulingInstance:
    """Parse the strict JSON instance format.

    Raises InstanceError with a line/column position for syntax errors and
    a field path for semantic ones.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(
            f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    return instance_from_dict(doc)


def instance_to_dict(instance: SchedulingInstance) -> dict:
    return {
        "period": {"begin": instance.period.begin, "end": instance.period.end},
        "missions": [
            {
                "id": m.id,
                "earliest": m.earliest,
                "latest": m.latest,
                "duration": m.duration,
                "weight": m.weight,
            }
            for m in instance.missions
        ],
        "resources": [
            {
                "id": r.id,
                "max_usage": r.max_usage,
                "max_swing": r.max_swing,
                "swing_rate": r.swing_rate,
                "rotation_rate": r.rotation_rate,
                "stabilize": r.stabilize,
            }
            for r in instance.resources
        ],
        "windows": [
            {"mission": w.mission, "resource": w.resource, "begin": w.begin, "end": w.end}
            for w in instance.windows
        ],
    }


def serialize_instance(instance: SchedulingInstance) -> str:
    """Serialize to the strict JSON format; parse(serialize(x)) == x."""
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def normalize_and_clip(instance: SchedulingInstance) -> SchedulingInstance:
    """Shift times so the period begins at 0 and clip windows.

    Each window is intersected with the scheduling period and with its
    mission's [earliest, latest] range; windows left shorter than the
    mission duration are dropped.  The operation is idempotent.
    """
    shift = instance.period.begin
    period = SchedulingPeriod(0.0, instance.period.length)
    missions = tuple(
        replace(m, earliest=m.earliest - shift, latest=m.latest - shift)
        for m in instance.missions
    )
    windows: list[VisibleTimeWindow] = []
    for w in instance.windows:
        m = instance.mission(w.mission)
        begin = max(w.begin, m.earliest, instance.period.begin) - shift
        end = min(w.end, m.latest, instance.period.end) - shift
        if end - begin >= m.duration - EPS:
            windows.append(VisibleTimeWindow(w.mission, w.resource, begin, end))
    return SchedulingInstance(period, missions, instance.resources, tuple(windows))
