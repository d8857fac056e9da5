"""Built-in synthetic test-site maps.

The real exercise sites are not published, so two desk-scale stand-ins ship
with the package. Both preserve the topology that matters for congestion
(compact vs elongated site, launch zone as a choke point) and reuse the
published building labels.

"cassidy-like": compact 285 x 350 m site, 41 x 37 m launch zone near the
center, 12 buildings placed on bearings around the zone so that the
outermost-first wave assignment is well defined (with 6 waves the first
wave surveils buildings 12 and 21).

"leschi-like": elongated 800 x 250 m site with a 7.5 x 170 m roadway launch
zone and two 12-building sets (A and B) on either side of the road.
"""

from __future__ import annotations

import math

from congestsim.world import Building, Rect, World

# Cassidy-like geometry: (bearing deg, range m, half_w, half_l, height).
# Bearings ascend so the bearing-sorted ring splits into the two pie-slice
# regions {12,9,4c,7,16,28} and {21,24,34,37b,31,43}; ranges decrease
# wave-by-wave within each region.
_CASSIDY_BUILDINGS = {
    "12": (15.0, 115.0, 5.0, 6.0, 9.0),
    "9": (45.0, 95.0, 6.0, 5.0, 6.0),
    "4c": (75.0, 105.0, 5.0, 5.0, 12.0),
    "7": (105.0, 75.0, 5.0, 6.0, 5.0),
    "16": (135.0, 85.0, 6.0, 6.0, 8.0),
    "28": (165.0, 65.0, 5.0, 5.0, 4.0),
    "21": (195.0, 120.0, 6.0, 5.0, 15.0),
    "24": (225.0, 90.0, 5.0, 5.0, 7.0),
    "34": (255.0, 110.0, 5.0, 6.0, 10.0),
    "37b": (285.0, 80.0, 6.0, 5.0, 6.0),
    "31": (315.0, 100.0, 5.0, 5.0, 11.0),
    "43": (345.0, 70.0, 5.0, 6.0, 5.0),
}

_CASSIDY_ZONE = Rect(124.0, 160.0, 165.0, 197.0)  # 41 m E-W x 37 m N-S

# Leschi-like geometry: id -> (center x, center y, half_w, half_l, height).
_LESCHI_BUILDINGS = {
    "1": (60.0, 200.0, 6.0, 5.0, 8.0),
    "2": (140.0, 170.0, 5.0, 7.0, 6.0),
    "9": (230.0, 210.0, 7.0, 5.0, 12.0),
    "12": (90.0, 60.0, 5.0, 5.0, 5.0),
    "15": (170.0, 90.0, 6.0, 4.0, 9.0),
    "25": (260.0, 40.0, 5.0, 6.0, 7.0),
    "29": (330.0, 190.0, 6.0, 6.0, 10.0),
    "31": (350.0, 60.0, 5.0, 5.0, 6.0),
    "32": (430.0, 80.0, 7.0, 5.0, 11.0),
    "33": (295.0, 150.0, 5.0, 5.0, 8.0),
    "35": (510.0, 50.0, 5.0, 7.0, 5.0),
    "37": (295.0, 100.0, 5.0, 5.0, 7.0),
    "51": (590.0, 90.0, 6.0, 5.0, 13.0),
    "53": (560.0, 200.0, 5.0, 5.0, 6.0),
    "55": (640.0, 40.0, 5.0, 5.0, 8.0),
    "58": (680.0, 95.0, 6.0, 6.0, 10.0),
    "59": (620.0, 170.0, 7.0, 5.0, 9.0),
    "60": (690.0, 210.0, 5.0, 5.0, 12.0),
    "61": (740.0, 70.0, 5.0, 6.0, 6.0),
    "62": (720.0, 160.0, 5.0, 5.0, 15.0),
    "63": (760.0, 220.0, 5.0, 5.0, 7.0),
    "64": (500.0, 210.0, 6.0, 5.0, 8.0),
    "65": (420.0, 180.0, 5.0, 6.0, 10.0),
    "67": (380.0, 230.0, 5.0, 5.0, 5.0),
}

_LESCHI_ZONE = Rect(315.0, 121.25, 485.0, 128.75)  # 170 m x 7.5 m roadway

BUILDING_SETS = {
    "cassidy": ["4c", "7", "9", "12", "16", "21", "24", "28", "31", "34", "37b", "43"],
    # Inner eight buildings: short sorties keep desk-scale sweeps quick.
    "cassidy-desk": ["9", "7", "16", "28", "24", "37b", "31", "43"],
    "leschi-a": ["1", "2", "9", "29", "33", "37", "53", "59", "60", "62", "63", "65"],
    "leschi-b": ["12", "15", "25", "31", "32", "35", "51", "55", "58", "61", "64", "67"],
}


def _zone_polygon(rect: Rect):
    return ((rect.min_x, rect.min_y), (rect.max_x, rect.min_y),
            (rect.max_x, rect.max_y), (rect.min_x, rect.max_y))


def _cassidy_world() -> World:
    cx = (_CASSIDY_ZONE.min_x + _CASSIDY_ZONE.max_x) / 2.0
    cy = (_CASSIDY_ZONE.min_y + _CASSIDY_ZONE.max_y) / 2.0
    buildings = []
    for bid, (bearing, rng, hw, hl, h) in _CASSIDY_BUILDINGS.items():
        t = math.radians(bearing)
        x = cx + rng * math.cos(t)
        y = cy + rng * math.sin(t)
        buildings.append(Building(bid, Rect(x - hw, y - hl, x + hw, y + hl), h))
    world = World(name="cassidy-like", bounds=Rect(0.0, 0.0, 285.0, 350.0),
                  launch_zone=_zone_polygon(_CASSIDY_ZONE),
                  buildings=tuple(buildings))
    world.validate()
    return world


def _leschi_world() -> World:
    buildings = [
        Building(bid, Rect(x - hw, y - hl, x + hw, y + hl), h)
        for bid, (x, y, hw, hl, h) in _LESCHI_BUILDINGS.items()
    ]
    world = World(name="leschi-like", bounds=Rect(0.0, 0.0, 800.0, 250.0),
                  launch_zone=_zone_polygon(_LESCHI_ZONE),
                  buildings=tuple(buildings))
    world.validate()
    return world


def _empty_world() -> World:
    world = World(name="empty", bounds=Rect(0.0, 0.0, 100.0, 100.0),
                  launch_zone=_zone_polygon(Rect(40.0, 40.0, 60.0, 60.0)),
                  buildings=())
    world.validate()
    return world


_BUILDERS = {
    "cassidy-like": _cassidy_world,
    "leschi-like": _leschi_world,
    "empty": _empty_world,
}


def builtin_world(name: str) -> World:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin world {name!r}; "
                       f"choices: {sorted(_BUILDERS)}") from None


def builtin_names() -> list[str]:
    return sorted(_BUILDERS)


def building_set(name: str) -> list[str]:
    try:
        return list(BUILDING_SETS[name])
    except KeyError:
        raise KeyError(f"unknown building set {name!r}; "
                       f"choices: {sorted(BUILDING_SETS)}") from None
