"""Fixed-step trial execution.

One trial advances on a single logical thread: agents are updated in slot
order each 100 ms step, and every move is validated against the current
positions of all other agents, so the pairwise-clearance invariant holds at
every step boundary. All randomness flows from per-agent streams spawned
from the trial seed, making logs a pure function of (inputs, seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from congestsim import kernels
from congestsim.launchzone import UAV, LaunchZoneLayout, min_safe_distance
from congestsim.mission import MissionPlan
from congestsim.sim.battery import Battery, drain_battery, sample_battery_capacity
from congestsim.sim.blocks import BlockTracker
from congestsim.sim.planner import AgentSnapshot, plan_path
from congestsim.world import World

STAGED = "Staged"
ASCENDING = "Ascending"
PLANNING = "Planning"
ENROUTE = "EnRoute"
SURVEILLING = "Surveilling"
RETURNING = "ReturningToLaunch"
LANDING = "Landing"
LANDED = "Landed"

GROUNDED = (STAGED, LANDED)

_SIDE_ORDER = ("east", "north", "west", "south")


@dataclass(frozen=True)
class SimParams:
    step_ms: int = 100
    cruise_speed: float = 5.0
    ascent_speed: float = 2.0
    descent_speed: float = 2.0
    hover_multiplier: float = 1.5
    rtl_threshold: float = 0.25
    dwell_s: float = 30.0
    surveil_agl: float = 5.0
    roof_clearance: float = 5.0
    station_standoff: float = 5.0
    alt_min: float = 25.0
    alt_max: float = 50.0
    z_window: float = 5.0
    clearance_tol: float = 1e-9
    plan_budget: int = 200
    replan_interval_ms: int = 500
    # Hovering station-keeping wander (GPS localization error); each step a
    # hovering agent attempts a validated micro-move around its hold point.
    hover_drift_sigma: float = 0.08
    hover_drift_reversion: float = 0.9


@dataclass(frozen=True)
class LogEvent:
    t_ms: int
    vehicle_id: str
    event: str
    x: float
    y: float
    z: float
    detail: str | None = None

    def to_json(self) -> str:
        rec = {"t_ms": self.t_ms, "vehicle_id": self.vehicle_id,
               "event": self.event, "x": self.x, "y": self.y, "z": self.z}
        if self.detail is not None:
            rec["detail"] = self.detail
        return json.dumps(rec, sort_keys=True, separators=(",", ":"))


@dataclass
class TrialLog:
    seed: int
    events: list[LogEvent] = field(default_factory=list)
    raw_blocks: dict[str, list] = field(default_factory=dict)
    min_separation: float = math.inf
    building_intrusions: int = 0
    unfilled_tactics: int = 0
    meta: dict = field(default_factory=dict)

    def to_jsonl(self) -> str:
        return "".join(ev.to_json() + "\n" for ev in self.events)

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_jsonl())

    def raw_block_records(self):
        """Flat (vehicle_id, raw event) list for the metrics layer."""
        from congestsim.metrics import RawBlock

        out = []
        for vid in sorted(self.raw_blocks):
            for ev in self.raw_blocks[vid]:
                out.append(RawBlock(vid, ev.start_ms, ev.end_ms, ev.x, ev.y))
        return out


class _Agent:
    __slots__ = (
        "idx", "vid", "spec", "radius", "home", "camera", "is_uav",
        "mode", "phase", "alt", "battery", "tracker", "rng",
        "tactic", "role", "station", "station_z", "dwell_left_ms",
        "path", "path_i", "last_plan_ms", "homebound", "battery_rtl_done",
        "hover_anchor",
    )

    def __init__(self, idx, slot, rng):
        self.idx = idx
        self.vid = slot.slot_id
        self.spec = slot.vehicle
        self.radius = slot.vehicle.safety_radius
        self.home = (slot.x, slot.y)
        self.camera = slot.vehicle.camera
        self.is_uav = slot.vehicle.kind == UAV
        self.mode = STAGED
        self.phase = None
        self.rng = rng
        self.tracker = BlockTracker()
        self.tactic = None
        self.role = None
        self.station = None
        self.station_z = 0.0
        self.dwell_left_ms = 0
        self.path = None
        self.path_i = 0
        self.last_plan_ms = None
        self.homebound = False
        self.battery_rtl_done = False
        self.hover_anchor = None
        self.alt = 0.0
        self.battery = Battery(capacity_s=1.0)

    @property
    def assigned(self) -> bool:
        return self.tactic is not None or self.homebound


class _Engine:
    def __init__(self, world: World, layout: LaunchZoneLayout, plan: MissionPlan,
                 seed: int, duration_after_last_wave_s: float,
                 rtl_injections, params: SimParams, audit: bool):
        self.world = world
        self.plan = plan
        self.params = params
        self.audit = audit
        self.log = TrialLog(seed=seed)

        n = len(layout.slots)
        self.pos = np.zeros((n, 3), dtype=np.float64)
        self.airborne = np.zeros(n, dtype=np.uint8)
        self.all_mask = np.ones(n, dtype=np.uint8)
        self.radius = np.zeros(n, dtype=np.float64)

        streams = np.random.SeedSequence(seed).spawn(n)
        self.agents: list[_Agent] = []
        for i, slot in enumerate(layout.slots):
            a = _Agent(i, slot, np.random.default_rng(streams[i]))
            self.pos[i, 0] = slot.x
            self.pos[i, 1] = slot.y
            self.radius[i] = a.radius
            if a.is_uav:
                a.alt = float(a.rng.uniform(params.alt_min, params.alt_max))
                cap = sample_battery_capacity(a.spec, a.rng)
                a.battery = Battery(capacity_s=cap,
                                    hover_multiplier=params.hover_multiplier,
                                    rtl_threshold=params.rtl_threshold)
            self.agents.append(a)
        self.uavs = [a for a in self.agents if a.is_uav]

        delay_ms = int(round(plan.inter_wave_delay_s * 1000.0))
        self.wave_times = [k * delay_ms for k in range(plan.num_waves)]
        self.t_end = self.wave_times[-1] + int(round(duration_after_last_wave_s * 1000.0))
        self.injections = sorted(
            (int(round(t_s * 1000.0)), vid) for t_s, vid in (rtl_injections or []))
        self._next_wave = 0
        self._next_injection = 0

    # -- logging helpers ---------------------------------------------------

    def _log(self, t, vid, event, x, y, z, detail=None):
        self.log.events.append(LogEvent(t, vid, event, float(x), float(y),
                                        float(z), detail))

    def _set_mode(self, a: _Agent, mode: str, t: int, detail: str | None = None):
        if a.mode != mode:
            a.mode = mode
            x, y, z = self.pos[a.idx]
            self._log(t, a.vid, "transition", x, y, z, detail or mode)

    def _block(self, a: _Agent, t: int):
        x, y, z = self.pos[a.idx]
        opened, closed, reset = a.tracker.update(True, t, (x, y, z))
        self._log_block_changes(a, opened, closed)
        if reset:
            self._log(t, a.vid, "transition", x, y, z, "planner_reset")
            a.last_plan_ms = None

    def _unblock(self, a: _Agent, t: int):
        if a.tracker.is_blocked:
            x, y, z = self.pos[a.idx]
            opened, closed, _ = a.tracker.update(False, t, (x, y, z))
            self._log_block_changes(a, opened, closed)

    def _log_block_changes(self, a: _Agent, opened, closed):
        # Interleave chronologically; a rollover closes one raw event and
        # opens the next at the same timestamp (end logged first).
        oi = ci = 0
        while ci < len(closed) or oi < len(opened):
            if ci < len(closed) and (oi >= len(opened)
                                     or closed[ci].end_ms <= opened[oi][0]):
                ev = closed[ci]
                self._log(ev.end_ms, a.vid, "block_end", ev.x, ev.y, ev.z)
                ci += 1
            else:
                t0, p = opened[oi]
                self._log(t0, a.vid, "block_start", p[0], p[1], p[2])
                oi += 1

    # -- movement ----------------------------------------------------------

    def _audit_segment(self, x0, y0, z0, x1, y1, z1):
        if not self.audit:
            return
        length = math.sqrt((x1 - x0) ** 2 + (y1 - y0) ** 2 + (z1 - z0) ** 2)
        steps = max(1, int(math.ceil(length / 0.25)))
        barr = self.world.building_array
        for k in range(steps + 1):
            f = k / steps
            if kernels.point_in_buildings(x0 + f * (x1 - x0), y0 + f * (y1 - y0),
                                          z0 + f * (z1 - z0), barr):
                self.log.building_intrusions += 1

    def _try_horizontal(self, a: _Agent, nx, ny) -> bool:
        p = self.params
        i = a.idx
        x, y, z = self.pos[i]
        if kernels.segment_hits_buildings(x, y, nx, ny, z, self.world.building_array):
            return False
        if not kernels.move_ok(self.pos, self.all_mask, self.radius, i,
                               nx, ny, z, p.z_window, a.radius, p.clearance_tol):
            return False
        self.pos[i, 0] = nx
        self.pos[i, 1] = ny
        self._audit_segment(x, y, z, nx, ny, z)
        return True

    def _try_vertical(self, a: _Agent, nz) -> bool:
        p = self.params
        i = a.idx
        x, y, z = self.pos[i]
        if kernels.point_in_buildings(x, y, min(z, nz), self.world.building_array):
            return False
        if not kernels.move_ok(self.pos, self.all_mask, self.radius, i,
                               x, y, nz, p.z_window, a.radius, p.clearance_tol):
            return False
        self.pos[i, 2] = nz
        self._audit_segment(x, y, z, x, y, nz)
        return True

    # -- dispatcher --------------------------------------------------------

    def _stations(self, building):
        fp = building.footprint
        cx, cy = fp.center()
        so = self.params.station_standoff
        b = self.world.bounds
        pts = [
            (fp.max_x + so, cy), (cx, fp.max_y + so),
            (fp.min_x - so, cy), (cx, fp.min_y - so),
        ]
        clamped = [
            (min(max(x, b.min_x + 1.0), b.max_x - 1.0),
             min(max(y, b.min_y + 1.0), b.max_y - 1.0))
            for x, y in pts
        ]
        return clamped, (cx, cy)

    def _bind_wave(self, wave_idx: int, t: int):
        for tactic in self.plan.waves[wave_idx]:
            building = self.world.building(tactic.target)
            bx, by = building.center()

            def ready(a: _Agent) -> bool:
                return (a.mode in GROUNDED and not a.assigned
                        and not a.battery.needs_rtl)

            def closest(agents):
                return sorted(agents, key=lambda a: (
                    math.hypot(a.home[0] - bx, a.home[1] - by), a.idx))

            fwd = closest([a for a in self.uavs if ready(a) and a.camera == "forward"])[:4]
            down = closest([a for a in self.uavs if ready(a) and a.camera == "downward"])[:1]
            shortfall = (4 - len(fwd)) + (1 - len(down))
            if shortfall:
                self.log.unfilled_tactics += 1
                self._log(t, "dispatcher", "transition", bx, by, 0.0,
                          f"unfilled_tactic:{tactic.target}:{shortfall}")
            side_pts, roof = self._stations(building)
            for k, a in enumerate(fwd):
                self._bind(a, t, tactic.target, f"forward-{_SIDE_ORDER[k]}",
                           side_pts[k], self.params.surveil_agl)
            for a in down:
                self._bind(a, t, tactic.target, "downward-roof", roof,
                           building.height + self.params.roof_clearance)

    def _bind(self, a: _Agent, t: int, target: str, role: str, station, station_z):
        a.tactic = target
        a.role = role
        a.station = station
        a.station_z = station_z
        a.homebound = False
        a.battery_rtl_done = False
        a.path = None
        a.last_plan_ms = None
        x, y, z = self.pos[a.idx]
        self._log(t, a.vid, "bind", x, y, z, f"surveil:{target}:{role}")

    def _force_rtl(self, a: _Agent, t: int, detail: str):
        a.tactic = None
        a.role = None
        a.homebound = True
        a.path = None
        a.last_plan_ms = None
        a.dwell_left_ms = 0
        z = self.pos[a.idx][2]
        a.phase = "climb" if z < a.alt else "plan"
        self._set_mode(a, RETURNING, t, detail)

    # -- agent state machine -----------------------------------------------

    def _snapshot(self, a: _Agent) -> AgentSnapshot:
        return AgentSnapshot(self.pos, self.all_mask, self.radius, a.idx)

    def _begin_outbound(self, a: _Agent, t: int):
        a.phase = "plan"
        a.last_plan_ms = None
        self._set_mode(a, PLANNING, t)

    def _attempt_plan(self, a: _Agent, t: int) -> bool:
        """Run the planner toward the agent's current goal; True on success."""
        p = self.params
        i = a.idx
        goal = a.home if a.homebound else a.station
        a.last_plan_ms = t
        path = plan_path((self.pos[i, 0], self.pos[i, 1]), a.alt, goal,
                         self.world, self._snapshot(a), a.radius, a.rng,
                         budget=p.plan_budget, z_win=p.z_window,
                         tol=p.clearance_tol)
        if path is None:
            return False
        a.path = path
        a.path_i = 1
        return True

    def _nav_plan_step(self, a: _Agent, t: int) -> str:
        p = self.params
        if a.last_plan_ms is None or t - a.last_plan_ms >= p.replan_interval_ms:
            if self._attempt_plan(a, t):
                self._unblock(a, t)
                a.phase = "enroute"
                if not a.homebound:
                    self._set_mode(a, ENROUTE, t)
            else:
                self._block(a, t)
        elif a.tracker.is_blocked:
            self._block(a, t)
        return "hover"

    def _nav_enroute_step(self, a: _Agent, t: int) -> str:
        p = self.params
        i = a.idx
        x, y = self.pos[i, 0], self.pos[i, 1]
        remaining = p.cruise_speed * p.step_ms / 1000.0
        nx, ny = x, y
        while remaining > 1e-12 and a.path_i < len(a.path):
            wx, wy = a.path[a.path_i]
            d = math.hypot(wx - nx, wy - ny)
            if d <= remaining:
                nx, ny = wx, wy
                remaining -= d
                a.path_i += 1
            else:
                nx += (wx - nx) / d * remaining
                ny += (wy - ny) / d * remaining
                remaining = 0.0
        if self._try_horizontal(a, nx, ny):
            self._unblock(a, t)
            if a.path_i >= len(a.path):
                self._arrived(a, t)
            return "cruise"
        # mobile obstruction: blocked immediately, replan next step
        a.path = None
        a.phase = "plan"
        a.last_plan_ms = None
        if not a.homebound:
            self._set_mode(a, PLANNING, t)
        self._block(a, t)
        return "hover"

    def _arrived(self, a: _Agent, t: int):
        a.path = None
        if a.homebound:
            self._set_mode(a, LANDING, t)
        else:
            a.phase = "descend"
            a.dwell_left_ms = int(round(self.params.dwell_s * 1000.0))
            self._set_mode(a, SURVEILLING, t)

    def _start_rtl(self, a: _Agent, t: int):
        a.tactic = None
        a.role = None
        a.homebound = True
        a.path = None
        a.last_plan_ms = None
        z = self.pos[a.idx][2]
        a.phase = "climb" if z < a.alt else "plan"
        self._set_mode(a, RETURNING, t)

    def _step_agent(self, a: _Agent, t: int) -> str:
        """Advance one agent one step; returns the battery activity."""
        p = self.params
        i = a.idx
        z = self.pos[i, 2]
        climb = p.ascent_speed * p.step_ms / 1000.0
        sink = p.descent_speed * p.step_ms / 1000.0

        if a.mode in GROUNDED:
            if not a.assigned:
                return "ground"
            if a.homebound:  # injected RTL while already home
                a.homebound = False
                return "ground"
            nz = min(z + climb, a.alt)
            if self._try_vertical(a, nz):
                self.airborne[i] = 1
                self._unblock(a, t)
                self._set_mode(a, ASCENDING, t)
                return "ascend"
            self._block(a, t)
            return "ground"

        if a.mode == ASCENDING:
            nz = min(z + climb, a.alt)
            if self._try_vertical(a, nz):
                self._unblock(a, t)
                if self.pos[i, 2] >= a.alt:
                    self._begin_outbound(a, t)
                return "ascend"
            self._block(a, t)
            return "hover"

        if a.mode == PLANNING:
            return self._nav_plan_step(a, t)

        if a.mode == ENROUTE:
            return self._nav_enroute_step(a, t)

        if a.mode == SURVEILLING:
            if a.phase == "descend":
                nz = max(z - sink, a.station_z)
                if self._try_vertical(a, nz):
                    self._unblock(a, t)
                    if self.pos[i, 2] <= a.station_z:
                        a.phase = "dwell"
                    return "descend"
                self._block(a, t)
                return "hover"
            if a.phase == "dwell":
                a.dwell_left_ms -= p.step_ms
                if a.dwell_left_ms <= 0:
                    a.phase = "ascend"
                return "hover"
            # ascend back to cruise altitude, then head home
            nz = min(z + climb, a.alt)
            if self._try_vertical(a, nz):
                self._unblock(a, t)
                if self.pos[i, 2] >= a.alt:
                    self._start_rtl(a, t)
                return "ascend"
            self._block(a, t)
            return "hover"

        if a.mode == RETURNING:
            if a.phase == "climb":
                nz = min(z + climb, a.alt)
                if self._try_vertical(a, nz):
                    self._unblock(a, t)
                    if self.pos[i, 2] >= a.alt:
                        a.phase = "plan"
                    return "ascend"
                self._block(a, t)
                return "hover"
            if a.phase == "plan":
                return self._nav_plan_step(a, t)
            return self._nav_enroute_step(a, t)

        if a.mode == LANDING:
            hx, hy = a.home
            # home slot must be clear of other agents near the ground
            if not kernels.move_ok(self.pos, self.all_mask, self.radius, i,
                                   hx, hy, 0.0, p.z_window, a.radius,
                                   p.clearance_tol):
                self._block(a, t)
                return "hover"
            nz = max(z - sink, 0.0)
            if self._try_vertical(a, nz):
                self._unblock(a, t)
                if self.pos[i, 2] <= 0.0:
                    self.airborne[i] = 0
                    a.homebound = False
                    a.phase = None
                    self._set_mode(a, LANDED, t)
                    self._log(t, a.vid, "land", hx, hy, 0.0)
                    return "ground"
                return "descend"
            self._block(a, t)
            return "hover"

        return "hover"

    def _hover_drift(self, a: _Agent):
        p = self.params
        if p.hover_drift_sigma <= 0.0:
            return
        i = a.idx
        x, y = self.pos[i, 0], self.pos[i, 1]
        if a.hover_anchor is None:
            a.hover_anchor = (x, y)
        ax, ay = a.hover_anchor
        rev = p.hover_drift_reversion
        nx = ax + rev * (x - ax) + a.rng.normal(0.0, p.hover_drift_sigma)
        ny = ay + rev * (y - ay) + a.rng.normal(0.0, p.hover_drift_sigma)
        if not self.world.bounds.contains(nx, ny):
            return
        self._try_horizontal(a, nx, ny)

    # -- main loop ----------------------------------------------------------

    def run(self) -> TrialLog:
        p = self.params
        t = 0
        while t <= self.t_end:
            while (self._next_wave < len(self.wave_times)
                   and t >= self.wave_times[self._next_wave]):
                self._bind_wave(self._next_wave, t)
                self._next_wave += 1
            while (self._next_injection < len(self.injections)
                   and t >= self.injections[self._next_injection][0]):
                _, vid = self.injections[self._next_injection]
                self._next_injection += 1
                for a in self.uavs:
                    if a.vid == vid:
                        if a.mode in GROUNDED:
                            break
                        self._force_rtl(a, t, "rtl_injected")
                        break
            for a in self.uavs:
                activity = self._step_agent(a, t)
                # station-keeping wander applies while hovering or on
                # vertical legs; landing keeps the final approach exact
                if activity in ("hover", "ascend", "descend") and a.mode != LANDING:
                    self._hover_drift(a)
                else:
                    a.hover_anchor = None
                a.battery = drain_battery(a.battery, p.step_ms, activity)
                if (self.airborne[a.idx] and a.battery.needs_rtl
                        and not a.battery_rtl_done
                        and a.mode not in (RETURNING, LANDING)):
                    a.battery_rtl_done = True
                    x, y, z = self.pos[a.idx]
                    self._log(t, a.vid, "battery_rtl", x, y, z)
                    self._force_rtl(a, t, "battery_rtl")
            gap = kernels.min_separation(self.pos, self.airborne, self.radius,
                                         p.z_window)
            if gap < self.log.min_separation:
                self.log.min_separation = gap
            t += p.step_ms

        for a in self.agents:
            if a.tracker.is_blocked:
                self._unblock(a, self.t_end)
            if a.tracker.events:
                self.log.raw_blocks[a.vid] = list(a.tracker.events)
        self.log.meta = {
            "world": self.world.name,
            "agents": len(self.agents),
            "waves": self.plan.num_waves,
            "step_ms": p.step_ms,
            "t_end_ms": self.t_end,
        }
        return self.log


def run_trial(world: World, layout: LaunchZoneLayout, plan: MissionPlan,
              seed: int, duration_after_last_wave_s: float = 1200.0,
              rtl_injections=None, params: SimParams | None = None,
              audit: bool = False) -> TrialLog:
    """Simulate one trial; identical inputs and seed yield identical logs.

    The trial runs from the first wave until ``duration_after_last_wave_s``
    after the last wave starts. ``rtl_injections`` is an optional list of
    (time_s, vehicle_id) forcing an immediate return to launch, emulating
    vehicles neutralized in the field.
    """
    params = params or SimParams()
    engine = _Engine(world, layout, plan, seed, duration_after_last_wave_s,
                     rtl_injections, params, audit)
    return engine.run()
