"""Altitude-layered sampling path planner.

Plans a constant-altitude polyline from the agent's position to the goal's
horizontal location. Every segment must keep at least the pairwise safe
distance from other agents at similar altitude (|dz| < 5 m) and stay out of
building volumes at the path altitude. The search draws random waypoints,
so repeated calls can find different routes; when the sampling budget runs
out the caller is told the agent is blocked (returns None).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from congestsim import kernels
from congestsim.world import World

# Local-trap probe geometry: 8 directions at three ranges, randomly rotated
# and stretched per call so the probes never resonate with a grid layout.
# If every probe point is unreachable the agent is ringed and sampling
# cannot help this cycle.
_PROBE_BASE_DISTS = (1.0, 2.0, 4.0)


@dataclass(frozen=True)
class AgentSnapshot:
    """Positions of the other agents as seen at planning time."""

    pos: np.ndarray       # (n, 3) float64
    active: np.ndarray    # (n,) uint8
    radius: np.ndarray    # (n,) float64
    exclude: int = -1     # index of the planning agent itself, if present


def _point_free(x, y, z, snap, self_radius, world, z_win, tol):
    if not world.bounds.contains(x, y):
        return False
    if kernels.point_in_buildings(x, y, z, world.building_array):
        return False
    return kernels.move_ok(snap.pos, snap.active, snap.radius, snap.exclude,
                           x, y, z, z_win, self_radius, tol)


def _segment_free(x0, y0, x1, y1, z, snap, self_radius, world, z_win, tol):
    return kernels.segment_ok(snap.pos, snap.active, snap.radius, snap.exclude,
                              x0, y0, x1, y1, z, z_win, self_radius, tol,
                              world.building_array)


def _locally_trapped(x, y, z, snap, self_radius, world, z_win, tol, rng):
    phase = rng.uniform(0.0, 2.0 * math.pi)
    stretch = rng.uniform(0.8, 1.3)
    for base in _PROBE_BASE_DISTS:
        d = base * stretch
        for k in range(8):
            a = phase + k * math.pi / 4.0
            if _point_free(x + d * math.cos(a), y + d * math.sin(a), z, snap,
                           self_radius, world, z_win, tol):
                return False
    return True


def plan_path(start_xy, altitude, goal_xy, world: World, snap: AgentSnapshot,
              self_radius: float, rng: np.random.Generator,
              budget: int = 200, z_win: float = 5.0, tol: float = 1e-9):
    """Find a clear polyline at the given altitude, or None when blocked.

    The straight line is tried first; otherwise up to ``budget`` random
    waypoints are drawn (biased toward the start-goal corridor, with
    occasional two-waypoint detours drawn from the whole site).
    """
    sx, sy = float(start_xy[0]), float(start_xy[1])
    gx, gy = float(goal_xy[0]), float(goal_xy[1])
    if not world.bounds.contains(gx, gy):
        raise ValueError(f"goal ({gx}, {gy}) outside world bounds")
    z = float(altitude)
    if _segment_free(sx, sy, gx, gy, z, snap, self_radius, world, z_win, tol):
        return [(sx, sy), (gx, gy)]
    if _locally_trapped(sx, sy, z, snap, self_radius, world, z_win, tol, rng):
        return None
    if not _point_free(gx, gy, z, snap, self_radius, world, z_win, tol) and \
            _locally_trapped(gx, gy, z, snap, self_radius, world, z_win, tol, rng):
        return None

    b = world.bounds
    pad = 15.0
    lo_x = max(b.min_x, min(sx, gx) - pad)
    hi_x = min(b.max_x, max(sx, gx) + pad)
    lo_y = max(b.min_y, min(sy, gy) - pad)
    hi_y = min(b.max_y, max(sy, gy) + pad)
    local_r = 12.0

    def draw():
        # Growth per replan cycle is limited like a real-time sampling
        # planner's: waypoints come mostly from the agent's vicinity, some
        # from the start-goal corridor, a few from the whole site.
        u = rng.random()
        if u < 0.5:
            r = local_r * math.sqrt(rng.random())
            a = rng.uniform(0.0, 2.0 * math.pi)
            x = min(max(sx + r * math.cos(a), b.min_x), b.max_x)
            y = min(max(sy + r * math.sin(a), b.min_y), b.max_y)
            return (x, y)
        if u < 0.8:
            return (rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y))
        return (rng.uniform(b.min_x, b.max_x), rng.uniform(b.min_y, b.max_y))

    samples = 0
    while samples < budget:
        if samples % 4 == 3 and samples + 2 <= budget:
            # two-waypoint detour
            w1 = draw()
            w2 = draw()
            samples += 2
            if (_segment_free(sx, sy, w1[0], w1[1], z, snap, self_radius, world, z_win, tol)
                    and _segment_free(w1[0], w1[1], w2[0], w2[1], z, snap, self_radius, world, z_win, tol)
                    and _segment_free(w2[0], w2[1], gx, gy, z, snap, self_radius, world, z_win, tol)):
                return [(sx, sy), w1, w2, (gx, gy)]
        else:
            w = draw()
            samples += 1
            if (_segment_free(sx, sy, w[0], w[1], z, snap, self_radius, world, z_win, tol)
                    and _segment_free(w[0], w[1], gx, gy, z, snap, self_radius, world, z_win, tol)):
                return [(sx, sy), w, (gx, gy)]
    return None
