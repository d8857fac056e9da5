"""Pure-numpy clearance and collision kernels.

Fallback twin of the compiled module ``congestsim.kernels._fast``. Both
backends perform the same elementwise IEEE-754 arithmetic, so every boolean
decision and every min-reduction is identical between them.

Conventions shared by both backends:
  pos       (n, 3) float64, C-contiguous: agent positions in meters
  active    (n,)  uint8: 1 = agent participates in clearance checks
  radius    (n,)  float64: per-agent safety radius
  buildings (b, 5) float64 rows [min_x, min_y, max_x, max_y, height]
Altitude similarity is strict (|dz| < z_win); the clearance threshold is
(r_i + r_j - tol) so exact-grid neighbor spacings remain legal.
"""

from __future__ import annotations

import numpy as np


def move_ok(pos, active, radius, idx, nx, ny, nz, z_win, self_radius, tol):
    """True iff agent ``idx`` may occupy point (nx, ny, nz)."""
    n = pos.shape[0]
    if n == 0:
        return True
    mask = active.astype(bool).copy()
    if 0 <= idx < n:
        mask[idx] = False
    dz = np.abs(pos[:, 2] - nz)
    mask &= dz < z_win
    if not mask.any():
        return True
    dx = pos[mask, 0] - nx
    dy = pos[mask, 1] - ny
    thr = self_radius + radius[mask] - tol
    return bool(np.all(dx * dx + dy * dy >= thr * thr))


def _point_segment_dist2(qx, qy, x0, y0, dx, dy, seg_len2):
    """Squared distance from points (qx, qy) to the segment, vectorized."""
    wx = qx - x0
    wy = qy - y0
    if seg_len2 > 0.0:
        t = (wx * dx + wy * dy) / seg_len2
        t = np.clip(t, 0.0, 1.0)
    else:
        t = np.zeros_like(qx)
    ex = x0 + t * dx - qx
    ey = y0 + t * dy - qy
    return ex * ex + ey * ey


def segment_hits_buildings(x0, y0, x1, y1, z, buildings):
    """True iff the constant-altitude segment enters any building volume.

    Liang-Barsky slab clipping against each closed footprint rectangle;
    touching a face counts as a hit. Buildings lower than z are ignored.
    """
    b = buildings
    if b.shape[0] == 0:
        return False
    rel = b[b[:, 4] >= z]
    if rel.shape[0] == 0:
        return False
    dx = x1 - x0
    dy = y1 - y0
    t0 = np.zeros(rel.shape[0])
    t1 = np.ones(rel.shape[0])
    alive = np.ones(rel.shape[0], dtype=bool)
    for p, q in (
        (-dx, x0 - rel[:, 0]),
        (dx, rel[:, 2] - x0),
        (-dy, y0 - rel[:, 1]),
        (dy, rel[:, 3] - y0),
    ):
        if p == 0.0:
            alive &= q >= 0.0
        else:
            t = q / p
            if p < 0.0:
                t0 = np.maximum(t0, t)
            else:
                t1 = np.minimum(t1, t)
    alive &= t0 <= t1
    return bool(alive.any())


def segment_ok(pos, active, radius, idx, x0, y0, x1, y1, z, z_win,
               self_radius, tol, buildings):
    """True iff a constant-altitude segment keeps clearance from all
    qualifying agents and avoids every building volume."""
    if segment_hits_buildings(x0, y0, x1, y1, z, buildings):
        return False
    n = pos.shape[0]
    if n == 0:
        return True
    mask = active.astype(bool).copy()
    if 0 <= idx < n:
        mask[idx] = False
    dz = np.abs(pos[:, 2] - z)
    mask &= dz < z_win
    if not mask.any():
        return True
    dx = x1 - x0
    dy = y1 - y0
    d2 = _point_segment_dist2(pos[mask, 0], pos[mask, 1], x0, y0, dx, dy,
                              dx * dx + dy * dy)
    thr = self_radius + radius[mask] - tol
    return bool(np.all(d2 >= thr * thr))


def point_in_buildings(x, y, z, buildings):
    """True iff (x, y, z) lies inside some building volume (closed box)."""
    b = buildings
    if b.shape[0] == 0 or z < 0.0:
        return False
    inside = (
        (b[:, 0] <= x) & (x <= b[:, 2])
        & (b[:, 1] <= y) & (y <= b[:, 3])
        & (z <= b[:, 4])
    )
    return bool(inside.any())


def min_separation(pos, active, radius, z_win):
    """Min over qualifying pairs of (horizontal distance - radius sum).

    Pairs qualify when both agents are active and |dz| < z_win. Returns
    +inf when no pair qualifies.
    """
    sel = active.astype(bool)
    p = pos[sel]
    r = radius[sel]
    n = p.shape[0]
    if n < 2:
        return float("inf")
    iu, ju = np.triu_indices(n, k=1)
    dz = np.abs(p[iu, 2] - p[ju, 2])
    near = dz < z_win
    if not near.any():
        return float("inf")
    iu, ju = iu[near], ju[near]
    dx = p[iu, 0] - p[ju, 0]
    dy = p[iu, 1] - p[ju, 1]
    gap = np.sqrt(dx * dx + dy * dy) - (r[iu] + r[ju])
    return float(gap.min())
