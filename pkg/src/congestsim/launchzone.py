"""Launch-zone vehicle placement: square/hex grids, safety validation, and
greedy row-packing capacity analysis.

Safety rule: the minimum safe separation between two vehicles is the sum of
their safety radii (1 m per UAV, 3 m per UGV), so 2 m UAV-UAV, 4 m UAV-UGV,
6 m UGV-UGV. Layout generation can deliberately skip the safety check to
express naive (unsafe) configurations; validate_layout is the single source
of truth for safety.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from congestsim.world import Rect, World, point_in_polygon

UAV = "UAV"
UGV = "UGV"

SQUARE = "square"
HEXAGONAL = "hexagonal"

# Pairwise-distance tolerance: exact-grid spacings sit on the safety
# boundary, so comparisons allow this much slack.
DIST_TOL = 1e-9


class LayoutError(ValueError):
    """Raised when a requested layout cannot be generated safely."""


@dataclass(frozen=True)
class VehicleSpec:
    platform: str
    kind: str
    footprint_m: tuple[float, float]
    safety_radius: float
    cruise_speed: float
    ascent_speed: float
    battery_mean_min: float
    battery_std_min: float
    camera: str = "none"


# Footprints from the platform data sheets; battery means follow the
# simulator defaults (Solo 22 min, M500 30 min); std defaults to 10% of mean.
PLATFORMS: dict[str, VehicleSpec] = {
    "Solo": VehicleSpec("Solo", UAV, (0.259, 0.188), 1.0, 5.0, 2.0, 22.0, 2.2, "forward"),
    "IfoS": VehicleSpec("IfoS", UAV, (0.275, 0.275), 1.0, 5.0, 2.0, 25.0, 2.5, "forward"),
    "M500": VehicleSpec("M500", UAV, (0.3937, 0.3937), 1.0, 5.0, 2.0, 30.0, 3.0, "forward"),
    "MicroSeeker": VehicleSpec("MicroSeeker", UAV, (0.191, 0.191), 1.0, 5.0, 2.0, 25.0, 2.5, "downward"),
    "R1_UGV": VehicleSpec("R1_UGV", UGV, (0.426, 0.486), 3.0, 1.5, 0.0, 210.0, 21.0, "none"),
}


def make_vehicle(platform: str, camera: str | None = None) -> VehicleSpec:
    spec = PLATFORMS[platform]
    if camera is not None:
        spec = replace(spec, camera=camera)
    return spec


def min_safe_distance(a: VehicleSpec, b: VehicleSpec) -> float:
    """Minimum safe operating distance: the sum of the two safety radii."""
    return a.safety_radius + b.safety_radius


@dataclass(frozen=True)
class Slot:
    slot_id: str
    x: float
    y: float
    vehicle: VehicleSpec


@dataclass(frozen=True)
class LaunchZoneLayout:
    pattern: str
    spacing: float
    slots: tuple[Slot, ...]

    def positions(self):
        return [(s.x, s.y) for s in self.slots]

    def counts(self) -> tuple[int, int]:
        ugv = sum(1 for s in self.slots if s.vehicle.kind == UGV)
        return ugv, len(self.slots) - ugv


@dataclass(frozen=True)
class Violation:
    kind: str  # "spacing" or "outside"
    slot_a: str
    slot_b: str | None
    distance: float
    required: float

    def __str__(self) -> str:
        if self.kind == "outside":
            return f"slot {self.slot_a} outside launch zone"
        return (f"slots {self.slot_a}/{self.slot_b}: {self.distance:.3f} m "
                f"< required {self.required:.3f} m")


def grid_positions(pattern: str, spacing: float, rows: int, cols: int):
    """Row-major grid offsets. Square uses pitch = spacing on both axes;
    hexagonal uses row pitch spacing*sqrt(3)/2 with odd rows shifted by
    spacing/2."""
    if pattern == SQUARE:
        row_pitch, odd_shift = spacing, 0.0
    elif pattern == HEXAGONAL:
        row_pitch, odd_shift = spacing * math.sqrt(3.0) / 2.0, spacing / 2.0
    else:
        raise LayoutError(f"unknown pattern {pattern!r}")
    pts = []
    for r in range(rows):
        shift = odd_shift if r % 2 == 1 else 0.0
        for c in range(cols):
            pts.append((c * spacing + shift, r * row_pitch))
    return pts


def generate_layout(world: World, pattern: str, spacing: float, manifest,
                    rows: int, cols: int, check: bool = True) -> LaunchZoneLayout:
    """Place manifest vehicles row-major on a grid centered in the world's
    launch zone.

    manifest: ordered list of (vehicle_id, VehicleSpec); the first vehicle
    binds to the first slot. With check=True the layout must fit inside the
    launch-zone polygon and satisfy pairwise safety distances; check=False
    returns the raw layout for validate_layout to judge.
    """
    if spacing <= 0:
        raise LayoutError("spacing must be positive")
    if rows * cols < len(manifest):
        raise LayoutError(f"grid {rows}x{cols} too small for {len(manifest)} vehicles")
    pts = grid_positions(pattern, spacing, rows, cols)[: len(manifest)]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    cx, cy = world.launch_centroid()
    off_x = cx - (min(xs) + max(xs)) / 2.0
    off_y = cy - (min(ys) + max(ys)) / 2.0
    slots = tuple(
        Slot(vid, x + off_x, y + off_y, spec)
        for (vid, spec), (x, y) in zip(manifest, pts)
    )
    layout = LaunchZoneLayout(pattern=pattern, spacing=spacing, slots=slots)
    if check:
        violations = validate_layout(layout, world)
        if violations:
            raise LayoutError("; ".join(str(v) for v in violations[:3]))
    return layout


def validate_layout(layout: LaunchZoneLayout, world: World) -> list[Violation]:
    """One Violation per unsafe slot pair and per slot outside the zone.

    Violations are data, not errors; an empty list means the layout is safe.
    """
    out: list[Violation] = []
    zone = world.launch_zone
    for s in layout.slots:
        if not point_in_polygon(s.x, s.y, zone):
            out.append(Violation("outside", s.slot_id, None, 0.0, 0.0))
    slots = layout.slots
    for i in range(len(slots)):
        a = slots[i]
        for j in range(i + 1, len(slots)):
            b = slots[j]
            required = min_safe_distance(a.vehicle, b.vehicle)
            d = math.hypot(a.x - b.x, a.y - b.y)
            if d < required - DIST_TOL:
                out.append(Violation("spacing", a.slot_id, b.slot_id, d, required))
    return out


@dataclass(frozen=True)
class MixRule:
    """Grouping policy for capacity packing.

    policy "mixed": UGVs grouped contiguously at the start of every row;
    policy "block": UGV-only rows stacked after the UAV rows;
    policy "uav_only": no UGVs.
    Targets cap the counts (None = fill to capacity). max_cols caps
    vehicles per UAV row.
    """

    policy: str = "uav_only"
    ugv_target: int = 0
    uav_target: int | None = None
    max_cols: int | None = None


@dataclass(frozen=True)
class CapacityResult:
    ugv_count: int
    uav_count: int
    layout: LaunchZoneLayout


def _row_fill(length: float, n_ugv: int, uav_cap: int | None, uav_pitch=2.0,
              ugv_pitch=6.0, boundary=4.0):
    """x offsets for one row: n_ugv UGVs then as many UAVs as fit/capped."""
    xs_ugv = [i * ugv_pitch for i in range(n_ugv)]
    used = xs_ugv[-1] if xs_ugv else None
    if used is None:
        start = 0.0
    else:
        start = used + boundary
        if start > length:
            return xs_ugv, []
    n_uav = int(math.floor((length - start) / uav_pitch)) + 1
    if uav_cap is not None:
        n_uav = min(n_uav, uav_cap)
    xs_uav = [start + i * uav_pitch for i in range(max(0, n_uav))]
    return xs_ugv, xs_uav


def max_capacity(zone: Rect, mix: MixRule, pattern: str = SQUARE) -> CapacityResult:
    """Greedy row packing of a rectangular zone.

    Rows run along the zone's longer axis. Cross-row pitch is the safe
    distance between the largest vehicle kinds in the adjacent rows. The
    result always satisfies validate_layout; it is not an optimal 2-D
    packing.
    """
    length = max(zone.width, zone.height)
    width = min(zone.width, zone.height)
    if length <= 2.0 or width <= 0.0:
        raise LayoutError("zone too small for any vehicle")
    if pattern == HEXAGONAL and mix.policy != "uav_only":
        raise LayoutError("hexagonal capacity packing supports uav_only only")

    ugv = make_vehicle("R1_UGV")
    uav = make_vehicle("Solo")
    rows: list[list[tuple[float, VehicleSpec]]] = []
    hex_pitch = None

    if mix.policy == "mixed" and mix.ugv_target > 0:
        n_rows = int(math.floor(width / 6.0)) + 1
        base, extra = divmod(mix.ugv_target, n_rows)
        uav_left = mix.uav_target
        for r in range(n_rows):
            g = base + (1 if r < extra else 0)
            cap = None
            if uav_left is not None:
                cap = math.ceil(uav_left / (n_rows - r))
            xs_ugv, xs_uav = _row_fill(length, g, cap)
            if mix.max_cols is not None:
                xs_uav = xs_uav[: max(0, mix.max_cols - len(xs_ugv))]
            if uav_left is not None:
                xs_uav = xs_uav[:uav_left]
                uav_left -= len(xs_uav)
            rows.append([(x, ugv) for x in xs_ugv] + [(x, uav) for x in xs_uav])
    elif mix.policy in ("block", "uav_only"):
        ugv_rows = 0
        ugv_cols = 0
        if mix.policy == "block" and mix.ugv_target > 0:
            ugv_cols = min(int(math.floor(length / 6.0)) + 1, mix.ugv_target)
            ugv_rows = math.ceil(mix.ugv_target / ugv_cols)
        ugv_depth = (4.0 + 6.0 * (ugv_rows - 1)) if ugv_rows else 0.0
        if pattern == HEXAGONAL:
            hex_pitch = 2.0 * math.sqrt(3.0) / 2.0
        row_pitch = hex_pitch if hex_pitch is not None else 2.0
        odd_shift = 1.0 if pattern == HEXAGONAL else 0.0
        avail = width - ugv_depth
        if avail < 0:
            raise LayoutError("zone too small for the requested UGV block")
        uav_rows = int(math.floor(avail / row_pitch)) + 1
        uav_cols = int(math.floor(length / 2.0)) + 1
        if mix.max_cols is not None:
            uav_cols = min(uav_cols, mix.max_cols)
        uav_left = mix.uav_target
        for r in range(uav_rows):
            if uav_left is not None and uav_left <= 0:
                break
            n = uav_cols if uav_left is None else min(uav_cols, uav_left)
            shift = odd_shift if r % 2 == 1 else 0.0
            if shift and (n - 1) * 2.0 + shift > length:
                n -= 1
            row = [(shift + i * 2.0, uav) for i in range(max(0, n))]
            if uav_left is not None:
                uav_left -= len(row)
            rows.append(row)
        ugv_left = mix.ugv_target if mix.policy == "block" else 0
        while ugv_left > 0:
            n = min(ugv_cols, ugv_left)
            rows.append([(i * 6.0, ugv) for i in range(n)])
            ugv_left -= n
    else:
        raise LayoutError(f"unknown mix policy {mix.policy!r}")

    rows = [row for row in rows if row]
    if not rows:
        raise LayoutError("zone too small for any vehicle")

    # Cross-row pitch: safe distance between the largest kinds in the two
    # adjacent rows (hexagonal UAV rows keep their tighter staggered pitch).
    slots: list[Slot] = []
    y = 0.0
    n_ugv = n_uav = 0
    prev_r = None
    for row in rows:
        row_r = max(spec.safety_radius for _, spec in row)
        if prev_r is not None:
            if hex_pitch is not None and prev_r == 1.0 and row_r == 1.0:
                y += hex_pitch
            else:
                y += prev_r + row_r
        if y > width + DIST_TOL:
            break
        prev_r = row_r
        for x, spec in row:
            if spec.kind == UGV:
                sid = f"ugv-{n_ugv:03d}"
                n_ugv += 1
            else:
                sid = f"uav-{n_uav:03d}"
                n_uav += 1
            slots.append(Slot(sid, x, y, spec))
    if not slots:
        raise LayoutError("zone too small for any vehicle")

    # Map packed coordinates onto the zone (rows along the longer axis).
    if zone.width >= zone.height:
        placed = [replace(s, x=zone.min_x + s.x, y=zone.min_y + s.y) for s in slots]
    else:
        placed = [replace(s, x=zone.min_x + s.y, y=zone.min_y + s.x) for s in slots]
    layout = LaunchZoneLayout(pattern=pattern, spacing=2.0, slots=tuple(placed))
    return CapacityResult(n_ugv, n_uav, layout)


def rect_polygon(rect: Rect) -> tuple[tuple[float, float], ...]:
    return ((rect.min_x, rect.min_y), (rect.max_x, rect.min_y),
            (rect.max_x, rect.max_y), (rect.min_x, rect.max_y))


def zone_world(rect: Rect, name: str = "zone", pad: float = 10.0) -> World:
    """Minimal empty world whose launch zone is the given rectangle."""
    bounds = Rect(rect.min_x - pad, rect.min_y - pad, rect.max_x + pad, rect.max_y + pad)
    return World(name=name, bounds=bounds, launch_zone=rect_polygon(rect), buildings=())


def save_layout_config(layout: LaunchZoneLayout, rows: int, cols: int, path) -> None:
    """Write the launch-zone configuration file (vehicles, types, pattern)."""
    data = {
        "pattern": layout.pattern,
        "spacing_m": layout.spacing,
        "rows": rows,
        "cols": cols,
        "vehicles": [
            {"id": s.slot_id, "platform": s.vehicle.platform, "camera": s.vehicle.camera}
            for s in layout.slots
        ],
    }
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True))


def load_layout_config(path) -> tuple[str, float, int, int, list[tuple[str, VehicleSpec]]]:
    """Read a launch-zone configuration file; returns (pattern, spacing,
    rows, cols, manifest)."""
    data = json.loads(Path(path).read_text())
    manifest = [
        (str(v["id"]), make_vehicle(str(v["platform"]), v.get("camera")))
        for v in data["vehicles"]
    ]
    return (str(data["pattern"]), float(data["spacing_m"]),
            int(data["rows"]), int(data["cols"]), manifest)
