"""Independent schedule feasibility checking.

The validator re-derives every feasibility condition directly from the
instance, sharing no logic with the solver or the formulations: ids must
resolve, each mission appears once, observations must fit inside a window
clipped to the mission's own time range, lie inside the scheduling
period, respect per-resource setup spacing, and stay within usage
budgets.  Findings carry stable codes so tests and tooling can assert on
exact failure classes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .instance import SchedulingInstance, setup_time_bound
from .solver import Schedule

__all__ = [
    "REFERENCE_ERROR",
    "DUP_MISSION",
    "WINDOW_VIOLATION",
    "PERIOD_VIOLATION",
    "SETUP_VIOLATION",
    "USAGE_EXCEEDED",
    "Finding",
    "ValidationReport",
    "validate",
]

REFERENCE_ERROR = "REFERENCE_ERROR"
DUP_MISSION = "DUP_MISSION"
WINDOW_VIOLATION = "WINDOW_VIOLATION"
PERIOD_VIOLATION = "PERIOD_VIOLATION"
SETUP_VIOLATION = "SETUP_VIOLATION"
USAGE_EXCEEDED = "USAGE_EXCEEDED"

# Feasibility slack, in seconds.  Schedules produced by floating-point
# arithmetic may miss window edges by rounding noise; anything worse is a
# real violation.
TOLERANCE = 1e-6


@dataclass(frozen=True)
class Finding:
    code: str
    mission: str | None
    resource: str | None
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not self.findings

    def codes(self) -> tuple[str, ...]:
        return tuple(f.code for f in self.findings)


def validate(
    instance: SchedulingInstance,
    schedule: Schedule,
    tolerance: float = TOLERANCE,
) -> ValidationReport:
    """Check `schedule` against `instance`; both must share a time frame.

    The window check only involves window bounds clipped to the mission
    range; staying inside the scheduling period is a separate finding, so
    a schedule breaking exactly one rule yields exactly one code.
    """
    findings: list[Finding] = []
    usable: list = []
    for a in schedule.assignments:
        try:
            mission = instance.mission(a.mission)
            instance.resource(a.resource)
        except Exception:
            findings.append(
                Finding(
                    REFERENCE_ERROR,
                    a.mission,
                    a.resource,
                    "unknown mission or resource id",
                )
            )
            continue
        usable.append((a, mission))

    counts: dict[str, int] = {}
    for a, _ in usable:
        counts[a.mission] = counts.get(a.mission, 0) + 1
    for mission_id, k in counts.items():
        if k > 1:
            findings.append(
                Finding(
                    DUP_MISSION, mission_id, None, f"mission scheduled {k} times"
                )
            )

    for a, mission in usable:
        end = a.start + mission.duration
        hosted = False
        for w in instance.windows_by_mission.get(a.mission, ()):
            if w.resource != a.resource:
                continue
            lo = max(w.begin, mission.earliest)
            hi = min(w.end, mission.latest)
            if a.start >= lo - tolerance and end <= hi + tolerance:
                hosted = True
                break
        if not hosted:
            findings.append(
                Finding(
                    WINDOW_VIOLATION,
                    a.mission,
                    a.resource,
                    f"observation [{a.start}, {end}] fits no visible window "
                    "clipped to the mission range",
                )
            )
        if a.start < instance.period.begin - tolerance or end > instance.period.end + tolerance:
            findings.append(
                Finding(
                    PERIOD_VIOLATION,
                    a.mission,
                    a.resource,
                    f"observation [{a.start}, {end}] leaves the scheduling period "
                    f"[{instance.period.begin}, {instance.period.end}]",
                )
            )

    by_resource: dict[str, list] = {}
    for a, mission in usable:
        by_resource.setdefault(a.resource, []).append((a, mission))
    for resource_id in sorted(by_resource):
        resource = instance.resource(resource_id)
        spacing = setup_time_bound(resource)
        entries = sorted(by_resource[resource_id], key=lambda am: am[0].start)
        for (a1, m1), (a2, m2) in zip(entries, entries[1:]):
            required = a1.start + m1.duration + spacing
            if a2.start < required - tolerance:
                findings.append(
                    Finding(
                        SETUP_VIOLATION,
                        a2.mission,
                        resource_id,
                        f"start {a2.start} precedes {required} "
                        f"(predecessor {a1.mission} plus setup {spacing})",
                    )
                )
        used = sum(m.duration for _, m in by_resource[resource_id])
        if used > resource.max_usage + tolerance:
            findings.append(
                Finding(
                    USAGE_EXCEEDED,
                    None,
                    resource_id,
                    f"total observation time {used} exceeds budget {resource.max_usage}",
                )
            )
    return ValidationReport(tuple(findings))
