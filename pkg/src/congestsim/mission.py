"""Wave-structured mission plans.

Buildings are partitioned into pie-slice regions around the launch zone
(bearing-sorted ring cut into equal-count arcs) and assigned to waves
outermost-first: wave k surveils each region's k-th farthest building, so
early waves clear the launch zone before later ones start.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from congestsim.world import Building, World

BUILDING_SURVEIL = "BuildingSurveil"
RTL = "RTL"
LAUNCH = "Launch"

SURVEIL_FORWARD_UAVS = 4
SURVEIL_DOWNWARD_UAVS = 1

DEFAULT_WAVE_DELAY_S = 90.0


class MissionError(ValueError):
    pass


@dataclass(frozen=True)
class Tactic:
    kind: str
    target: str | None = None

    @property
    def required_uavs(self) -> int:
        if self.kind == BUILDING_SURVEIL:
            return SURVEIL_FORWARD_UAVS + SURVEIL_DOWNWARD_UAVS
        return 1


@dataclass(frozen=True)
class MissionPlan:
    building_set: str
    waves: tuple[tuple[Tactic, ...], ...]
    inter_wave_delay_s: float = DEFAULT_WAVE_DELAY_S
    num_regions: int = field(default=0)

    @property
    def num_waves(self) -> int:
        return len(self.waves)

    def wave_start_times_s(self) -> list[float]:
        return [i * self.inter_wave_delay_s for i in range(len(self.waves))]

    def all_building_ids(self) -> list[str]:
        return [t.target for wave in self.waves for t in wave]

    def required_uavs(self) -> int:
        return sum(t.required_uavs for wave in self.waves for t in wave)


def _bearing(origin, b: Building) -> float:
    cx, cy = b.center()
    a = math.atan2(cy - origin[1], cx - origin[0])
    return a if a >= 0.0 else a + 2.0 * math.pi


def _distance(origin, b: Building) -> float:
    cx, cy = b.center()
    return math.hypot(cx - origin[0], cy - origin[1])


def create_regions(buildings: list[Building], origin, n: int) -> list[list[Building]]:
    """Partition buildings into n angular sectors about origin.

    Buildings are sorted by bearing from the origin and the sorted ring is
    cut into n equal-count contiguous arcs. n must divide the building
    count.
    """
    if n < 1:
        raise MissionError("need at least one region")
    if len(buildings) % n != 0:
        raise MissionError(f"{n} regions do not divide {len(buildings)} buildings")
    ordered = sorted(buildings, key=lambda b: (_bearing(origin, b), b.id))
    size = len(buildings) // n
    return [ordered[i * size:(i + 1) * size] for i in range(n)]


def assign_waves(regions: list[list[Building]], origin, num_waves: int) -> list[list[Building]]:
    """Wave k takes each region's k-th farthest building from the origin.

    Ties in distance break by building id so replays are deterministic.
    """
    for region in regions:
        if len(region) != num_waves:
            raise MissionError(
                f"region holds {len(region)} buildings, expected {num_waves}")
    ranked = [sorted(r, key=lambda b: (-_distance(origin, b), b.id)) for r in regions]
    return [[region[k] for region in ranked] for k in range(num_waves)]


def build_mission_plan(world: World, building_ids: list[str], num_waves: int,
                       delay_s: float = DEFAULT_WAVE_DELAY_S,
                       building_set: str = "custom") -> MissionPlan:
    """Compose region creation and wave assignment into a surveil plan."""
    buildings = [world.building(bid) for bid in building_ids]
    if num_waves < 1:
        raise MissionError("need at least one wave")
    if len(buildings) % num_waves != 0:
        raise MissionError(
            f"{num_waves} waves do not divide {len(buildings)} buildings")
    n_regions = len(buildings) // num_waves
    origin = world.launch_centroid()
    regions = create_regions(buildings, origin, n_regions)
    waves = assign_waves(regions, origin, num_waves)
    return MissionPlan(
        building_set=building_set,
        waves=tuple(tuple(Tactic(BUILDING_SURVEIL, b.id) for b in wave) for wave in waves),
        inter_wave_delay_s=delay_s,
        num_regions=n_regions,
    )


def save_mission_plan(plan: MissionPlan, path) -> None:
    data = {
        "building_set": plan.building_set,
        "num_waves": plan.num_waves,
        "delay_s": plan.inter_wave_delay_s,
        "waves": [[t.target for t in wave] for wave in plan.waves],
    }
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True))


def load_mission_plan(path) -> MissionPlan:
    data = json.loads(Path(path).read_text())
    waves = tuple(
        tuple(Tactic(BUILDING_SURVEIL, str(bid)) for bid in wave)
        for wave in data["waves"]
    )
    n_waves = len(waves)
    total = sum(len(w) for w in waves)
    return MissionPlan(
        building_set=str(data.get("building_set", "custom")),
        waves=waves,
        inter_wave_delay_s=float(data.get("delay_s", DEFAULT_WAVE_DELAY_S)),
        num_regions=total // n_waves if n_waves else 0,
    )
