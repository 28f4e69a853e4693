"""Seeded random instance generation in three contention styles.

Style R scatters windows across satellite passes, so most windows stay
isolated.  Styles C and M pull missions into clusters whose windows pile
up around shared anchor times inside a pass; M uses larger clusters and
tighter jitter than C, so its windows overlap the most.  Averaged over
seeds this orders the contention statistics M >= C >= R.

Generation is a pure function of the configuration: the same config
(seed included) always yields the byte-identical instance document.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .instance import (
    InstanceError,
    Mission,
    Resource,
    SchedulingInstance,
    SchedulingPeriod,
    VisibleTimeWindow,
)

__all__ = ["STYLES", "GeneratorConfig", "generate"]

STYLES = ("R", "C", "M")

_PASS_LENGTH = 600.0
_PASSES_PER_DAY = 14.0

# Stabilization times cycled over resources; rotation is fast enough that
# the setup-time bound is dominated by stabilization.
_STABILIZE_CYCLE = (25.0, 30.0, 40.0)


@dataclass(frozen=True)
class GeneratorConfig:
    style: str
    missions: int
    resources: int
    horizon: float = 86400.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.style not in STYLES:
            raise InstanceError(f"unknown style {self.style!r}, expected one of {STYLES}")
        if self.missions < 1:
            raise InstanceError("missions must be >= 1")
        if self.resources < 1:
            raise InstanceError("resources must be >= 1")
        if self.horizon < 2.0 * _PASS_LENGTH:
            raise InstanceError(f"horizon must be at least {2.0 * _PASS_LENGTH} seconds")


@dataclass(frozen=True)
class _StyleParams:
    cluster_size: int
    jitter: float
    participate: float
    emit: float


_STYLE_PARAMS = {
    "C": _StyleParams(cluster_size=12, jitter=90.0, participate=0.8, emit=0.8),
    "M": _StyleParams(cluster_size=25, jitter=45.0, participate=0.9, emit=0.9),
}


def _passes(horizon: float, phase: float) -> list[float]:
    """Start times of the visibility passes of one resource."""
    period = horizon / _PASSES_PER_DAY
    starts = []
    start = phase
    while start + _PASS_LENGTH <= horizon:
        starts.append(start)
        start += period
    if not starts:
        starts.append(max(0.0, horizon - _PASS_LENGTH))
    return starts


def _window_length(rng: random.Random) -> float:
    sigma = 0.45
    mean = 95.0
    mu = math.log(mean) - sigma * sigma / 2.0
    return min(550.0, max(12.0, rng.lognormvariate(mu, sigma)))


def _place_in_pass(
    rng: random.Random, pass_start: float, length: float
) -> tuple[float, float]:
    begin = pass_start + rng.uniform(0.0, _PASS_LENGTH - length)
    return begin, begin + length


def _place_near(
    pass_start: float, center: float, length: float
) -> tuple[float, float]:
    begin = center - length / 2.0
    begin = min(max(begin, pass_start), pass_start + _PASS_LENGTH - length)
    return begin, begin + length


def generate(config: GeneratorConfig) -> SchedulingInstance:
    rng = random.Random(config.seed)
    horizon = float(config.horizon)
    period = SchedulingPeriod(0.0, horizon)

    resources = tuple(
        Resource(
            id=f"S{j + 1}",
            max_usage=horizon,
            max_swing=0.0,
            swing_rate=1.0,
            rotation_rate=1e9,
            stabilize=_STABILIZE_CYCLE[j % len(_STABILIZE_CYCLE)],
        )
        for j in range(config.resources)
    )
    pass_starts = {
        r.id: _passes(horizon, rng.uniform(0.0, horizon / _PASSES_PER_DAY)) for r in resources
    }
    missions = tuple(
        Mission(
            id=f"T{i + 1:04d}",
            earliest=0.0,
            latest=horizon,
            duration=float(rng.randint(3, 10)),
            weight=rng.randint(1, 10),
        )
        for i in range(config.missions)
    )

    windows: list[VisibleTimeWindow] = []
    if config.style == "R":
        for m in missions:
            extra = (1 if rng.random() < 0.35 else 0) + (1 if rng.random() < 0.10 else 0)
            for _ in range(1 + extra):
                r = resources[rng.randrange(len(resources))]
                pass_start = pass_starts[r.id][rng.randrange(len(pass_starts[r.id]))]
                begin, end = _place_in_pass(rng, pass_start, _window_length(rng))
                windows.append(VisibleTimeWindow(m.id, r.id, begin, end))
    else:
        params = _STYLE_PARAMS[config.style]
        clusters = [
            missions[i : i + params.cluster_size]
            for i in range(0, len(missions), params.cluster_size)
        ]
        for cluster in clusters:
            flags = [rng.random() < params.participate for _ in resources]
            if not any(flags):
                flags[rng.randrange(len(resources))] = True
            anchors: dict[str, tuple[float, float]] = {}
            for r, joins in zip(resources, flags):
                if joins:
                    pass_start = pass_starts[r.id][rng.randrange(len(pass_starts[r.id]))]
                    center = pass_start + rng.uniform(
                        params.jitter, _PASS_LENGTH - params.jitter
                    )
                    anchors[r.id] = (pass_start, center)
            for m in cluster:
                emitted = 0
                for r in resources:
                    if r.id not in anchors:
                        continue
                    if rng.random() < params.emit:
                        pass_start, center = anchors[r.id]
                        jittered = center + rng.uniform(-params.jitter, params.jitter)
                        begin, end = _place_near(pass_start, jittered, _window_length(rng))
                        windows.append(VisibleTimeWindow(m.id, r.id, begin, end))
                        emitted += 1
                if emitted == 0:
                    rid = sorted(anchors)[0]
                    pass_start, center = anchors[rid]
                    begin, end = _place_near(pass_start, center, _window_length(rng))
                    windows.append(VisibleTimeWindow(m.id, rid, begin, end))

    windows.sort(key=lambda w: (w.mission, w.resource, w.begin, w.end))
    return SchedulingInstance(period, missions, resources, tuple(windows))
