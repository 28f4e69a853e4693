"""Shared builders for the test suite.

`mk_instance` builds a normalized instance from compact tuples so tests can
state tiny scenarios in a few lines.  `random_tiny_instance` draws small
random instances (seeded by the caller) that stay within the brute-force
guards, for oracle comparisons.
"""
from __future__ import annotations

import random

from satsched.instance import (
    SchedulingInstance,
    instance_from_dict,
    normalize_and_clip,
)


def mk_instance(
    period: tuple[float, float],
    missions: list[tuple],
    resources: list[tuple],
    windows: list[tuple[str, str, float, float]],
    *,
    normalize: bool = True,
) -> SchedulingInstance:
    """Compact builder.

    missions: (id, duration, weight) or (id, duration, weight, earliest, latest)
    resources: (id, stabilize) or (id, stabilize, max_usage) or a full dict
    windows: (mission, resource, begin, end)
    """
    begin, end = period
    mdocs = []
    for m in missions:
        if len(m) == 3:
            mid, dur, weight = m
            lo, hi = begin, end
        else:
            mid, dur, weight, lo, hi = m
        mdocs.append(
            {"id": mid, "earliest": lo, "latest": hi, "duration": dur, "weight": weight}
        )
    rdocs = []
    for r in resources:
        if isinstance(r, dict):
            rdocs.append(r)
            continue
        rid, delta = r[0], r[1]
        doc = {
            "id": rid,
            "max_swing": 0.0,
            "swing_rate": 1.0,
            "rotation_rate": 1e9,
            "stabilize": delta,
        }
        if len(r) >= 3:
            doc["max_usage"] = r[2]
        rdocs.append(doc)
    doc = {
        "period": {"begin": begin, "end": end},
        "missions": mdocs,
        "resources": rdocs,
        "windows": [
            {"mission": m, "resource": r, "begin": b, "end": e}
            for (m, r, b, e) in windows
        ],
    }
    instance = instance_from_dict(doc)
    return normalize_and_clip(instance) if normalize else instance


def random_tiny_instance(
    rng: random.Random,
    *,
    max_missions: int = 8,
    max_resources: int = 3,
    max_windows_per_mission: int = 3,
) -> SchedulingInstance:
    """A small random instance that stays inside the brute-force guards."""
    n = rng.randint(1, max_missions)
    n_res = rng.randint(1, max_resources)
    horizon = rng.choice([40.0, 60.0, 90.0, 120.0])
    missions = [
        (f"M{i}", float(rng.randint(2, 6)), rng.randint(1, 10)) for i in range(1, n + 1)
    ]
    resources = [
        (f"R{j}", rng.choice([0.5, 1.0, 2.0, 3.0])) for j in range(1, n_res + 1)
    ]
    windows: list[tuple[str, str, float, float]] = []
    budget = 20  # brute-force guard on total window count
    for mid, dur, _ in missions:
        k = rng.randint(0, max_windows_per_mission)
        for _ in range(k):
            if budget == 0:
                break
            rid = resources[rng.randrange(n_res)][0]
            length = dur + rng.random() * 18.0
            begin = rng.random() * max(horizon - length, 1.0)
            windows.append((mid, rid, begin, begin + length))
            budget -= 1
    return mk_instance((0.0, horizon), missions, resources, windows)
