"""Geometric model of a mock-urban test site: buildings, launch zone, bounds.

Coordinates are local ENU meters; an optional geodetic anchor ties them to
lat/lon. Worlds are immutable after load and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from congestsim import kernels


class WorldError(ValueError):
    """Raised for malformed world files or invariant violations."""


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, closed on all edges."""

    min_x: float
    min_y: float
    max_x: float
    max_y: float

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, x: float, y: float) -> bool:
        return self.min_x <= x <= self.max_x and self.min_y <= y <= self.max_y

    def center(self) -> tuple[float, float]:
        return ((self.min_x + self.max_x) / 2.0, (self.min_y + self.max_y) / 2.0)


@dataclass(frozen=True)
class Building:
    id: str
    footprint: Rect
    height: float

    def center(self) -> tuple[float, float]:
        return self.footprint.center()


def _segments_intersect(a, b, c, d) -> bool:
    # Proper or improper intersection of segments ab and cd.
    def orient(p, q, r):
        v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        if v > 1e-12:
            return 1
        if v < -1e-12:
            return -1
        return 0

    def on_seg(p, q, r):
        return (min(p[0], q[0]) - 1e-12 <= r[0] <= max(p[0], q[0]) + 1e-12
                and min(p[1], q[1]) - 1e-12 <= r[1] <= max(p[1], q[1]) + 1e-12)

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_seg(a, b, c):
        return True
    if o2 == 0 and on_seg(a, b, d):
        return True
    if o3 == 0 and on_seg(c, d, a):
        return True
    if o4 == 0 and on_seg(c, d, b):
        return True
    return False


def polygon_is_simple(vertices: list[tuple[float, float]]) -> bool:
    """True iff no two non-adjacent edges intersect."""
    m = len(vertices)
    if m < 3:
        return False
    edges = [(vertices[i], vertices[(i + 1) % m]) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if j == i or (j + 1) % m == i or (i + 1) % m == j:
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def point_in_polygon(x: float, y: float, vertices, eps: float = 1e-9) -> bool:
    """Ray-casting containment; points within eps of an edge count as inside."""
    m = len(vertices)
    inside = False
    for i in range(m):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % m]
        # boundary proximity
        dx, dy = x1 - x0, y1 - y0
        seg2 = dx * dx + dy * dy
        t = 0.0 if seg2 == 0.0 else max(0.0, min(1.0, ((x - x0) * dx + (y - y0) * dy) / seg2))
        ex, ey = x0 + t * dx - x, y0 + t * dy - y
        if ex * ex + ey * ey <= eps * eps:
            return True
        if (y0 > y) != (y1 > y):
            xi = x0 + (y - y0) * dx / dy
            if x < xi:
                inside = not inside
    return inside


def polygon_centroid(vertices) -> tuple[float, float]:
    """Area centroid of a simple polygon."""
    a = cx = cy = 0.0
    m = len(vertices)
    for i in range(m):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % m]
        cross = x0 * y1 - x1 * y0
        a += cross
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    if abs(a) < 1e-12:
        xs = [v[0] for v in vertices]
        ys = [v[1] for v in vertices]
        return (sum(xs) / m, sum(ys) / m)
    a *= 0.5
    return (cx / (6.0 * a), cy / (6.0 * a))


def distance_to_polygon(x: float, y: float, vertices) -> float:
    """Distance from a point to a polygon; zero when inside."""
    if point_in_polygon(x, y, vertices):
        return 0.0
    best = math.inf
    m = len(vertices)
    for i in range(m):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % m]
        dx, dy = x1 - x0, y1 - y0
        seg2 = dx * dx + dy * dy
        t = 0.0 if seg2 == 0.0 else max(0.0, min(1.0, ((x - x0) * dx + (y - y0) * dy) / seg2))
        ex, ey = x0 + t * dx - x, y0 + t * dy - y
        best = min(best, math.hypot(ex, ey))
    return best


@dataclass(frozen=True)
class World:
    name: str
    bounds: Rect
    launch_zone: tuple[tuple[float, float], ...]
    buildings: tuple[Building, ...]
    anchor: tuple[float, float] | None = None
    _building_array: np.ndarray = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        arr = np.zeros((len(self.buildings), 5), dtype=np.float64)
        for i, b in enumerate(self.buildings):
            arr[i] = (b.footprint.min_x, b.footprint.min_y,
                      b.footprint.max_x, b.footprint.max_y, b.height)
        object.__setattr__(self, "_building_array", arr)

    @property
    def building_array(self) -> np.ndarray:
        """(n, 5) rows [min_x, min_y, max_x, max_y, height] for the kernels."""
        return self._building_array

    def building(self, building_id: str) -> Building:
        for b in self.buildings:
            if b.id == building_id:
                return b
        raise WorldError(f"unknown building id {building_id!r}")

    def launch_centroid(self) -> tuple[float, float]:
        return polygon_centroid(self.launch_zone)

    def to_geodetic(self, x: float, y: float) -> tuple[float, float]:
        """Convert local ENU meters to (lat, lon) degrees.

        Requires a geodetic anchor at the local origin; uses a local
        equirectangular approximation, which is ample at site scale.
        """
        if self.anchor is None:
            raise WorldError(f"world {self.name!r} has no geodetic anchor")
        lat0, lon0 = self.anchor
        lat = lat0 + y / 111_320.0
        lon = lon0 + x / (111_320.0 * math.cos(math.radians(lat0)))
        return lat, lon

    def validate(self) -> None:
        if not polygon_is_simple(list(self.launch_zone)):
            raise WorldError("launch zone polygon is self-intersecting")
        seen: set[str] = set()
        for b in self.buildings:
            if b.id in seen:
                raise WorldError(f"duplicate building id {b.id!r}")
            seen.add(b.id)
            if b.height <= 0:
                raise WorldError(f"building {b.id!r} has non-positive height")
            fp = b.footprint
            if fp.width <= 0 or fp.height <= 0:
                raise WorldError(f"building {b.id!r} footprint has no area")
            if not (self.bounds.contains(fp.min_x, fp.min_y)
                    and self.bounds.contains(fp.max_x, fp.max_y)):
                raise WorldError(f"building {b.id!r} extends outside world bounds")


def is_occupied(world: World, point) -> bool:
    """True iff the point lies inside some building volume.

    Building volumes are footprint x [0, height], closed. The point must be
    inside the world's horizontal bounds.
    """
    x, y, z = float(point[0]), float(point[1]), float(point[2])
    if not world.bounds.contains(x, y):
        raise WorldError(f"point ({x}, {y}) outside world bounds")
    return kernels.point_in_buildings(x, y, z, world.building_array)


def _rect_from_obj(obj) -> Rect:
    return Rect(float(obj["min"][0]), float(obj["min"][1]),
                float(obj["max"][0]), float(obj["max"][1]))


def load_world(path) -> World:
    """Load and validate a world JSON file (lengths in meters)."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise WorldError(f"cannot parse world file {path}: {exc}") from exc
    try:
        bounds = _rect_from_obj(data["bounds"])
        zone = tuple((float(p[0]), float(p[1])) for p in data["launch_zone"])
        buildings = tuple(
            Building(str(b["id"]), _rect_from_obj(b), float(b["height"]))
            for b in data["buildings"]
        )
        anchor = tuple(data["anchor"]) if data.get("anchor") else None
    except (KeyError, TypeError, IndexError) as exc:
        raise WorldError(f"world file {path} missing field: {exc}") from exc
    world = World(name=str(data.get("name", "unnamed")), bounds=bounds,
                  launch_zone=zone, buildings=buildings, anchor=anchor)
    world.validate()
    return world


def save_world(world: World, path) -> None:
    data = {
        "name": world.name,
        "bounds": {"min": [world.bounds.min_x, world.bounds.min_y],
                   "max": [world.bounds.max_x, world.bounds.max_y]},
        "launch_zone": [[x, y] for x, y in world.launch_zone],
        "buildings": [
            {"id": b.id,
             "min": [b.footprint.min_x, b.footprint.min_y],
             "max": [b.footprint.max_x, b.footprint.max_y],
             "height": b.height}
            for b in world.buildings
        ],
    }
    if world.anchor is not None:
        data["anchor"] = list(world.anchor)
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True))
