# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled clearance and collision kernels.

Scalar-loop twin of ``congestsim.kernels.pure``; performs the same
elementwise IEEE-754 arithmetic so both backends make identical decisions.
See the pure module docstring for array conventions.
"""

from libc.math cimport fabs, sqrt, INFINITY


def move_ok(double[:, ::1] pos, const unsigned char[::1] active,
            double[::1] radius, Py_ssize_t idx,
            double nx, double ny, double nz,
            double z_win, double self_radius, double tol):
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t j
    cdef double dx, dy, dz, thr
    for j in range(n):
        if j == idx or active[j] == 0:
            continue
        dz = fabs(pos[j, 2] - nz)
        if dz >= z_win:
            continue
        dx = pos[j, 0] - nx
        dy = pos[j, 1] - ny
        thr = self_radius + radius[j] - tol
        if dx * dx + dy * dy < thr * thr:
            return False
    return True


cdef bint _rect_hit(double x0, double y0, double dx, double dy,
                    double minx, double miny, double maxx, double maxy) noexcept:
    # Liang-Barsky slab clipping; touching a face counts as a hit.
    cdef double t0 = 0.0
    cdef double t1 = 1.0
    cdef double p, q, t
    cdef int k
    for k in range(4):
        if k == 0:
            p = -dx; q = x0 - minx
        elif k == 1:
            p = dx; q = maxx - x0
        elif k == 2:
            p = -dy; q = y0 - miny
        else:
            p = dy; q = maxy - y0
        if p == 0.0:
            if q < 0.0:
                return False
        else:
            t = q / p
            if p < 0.0:
                if t > t0:
                    t0 = t
            else:
                if t < t1:
                    t1 = t
    return t0 <= t1


def segment_hits_buildings(double x0, double y0, double x1, double y1,
                           double z, double[:, ::1] buildings):
    cdef Py_ssize_t nb = buildings.shape[0]
    cdef Py_ssize_t k
    cdef double dx = x1 - x0
    cdef double dy = y1 - y0
    for k in range(nb):
        if buildings[k, 4] < z:
            continue
        if _rect_hit(x0, y0, dx, dy, buildings[k, 0], buildings[k, 1],
                     buildings[k, 2], buildings[k, 3]):
            return True
    return False


def segment_ok(double[:, ::1] pos, const unsigned char[::1] active,
               double[::1] radius, Py_ssize_t idx,
               double x0, double y0, double x1, double y1,
               double z, double z_win, double self_radius, double tol,
               double[:, ::1] buildings):
    if segment_hits_buildings(x0, y0, x1, y1, z, buildings):
        return False
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t j
    cdef double dx = x1 - x0
    cdef double dy = y1 - y0
    cdef double seg_len2 = dx * dx + dy * dy
    cdef double wx, wy, t, ex, ey, thr, dz
    for j in range(n):
        if j == idx or active[j] == 0:
            continue
        dz = fabs(pos[j, 2] - z)
        if dz >= z_win:
            continue
        wx = pos[j, 0] - x0
        wy = pos[j, 1] - y0
        if seg_len2 > 0.0:
            t = (wx * dx + wy * dy) / seg_len2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        else:
            t = 0.0
        ex = x0 + t * dx - pos[j, 0]
        ey = y0 + t * dy - pos[j, 1]
        thr = self_radius + radius[j] - tol
        if ex * ex + ey * ey < thr * thr:
            return False
    return True


def point_in_buildings(double x, double y, double z, double[:, ::1] buildings):
    cdef Py_ssize_t nb = buildings.shape[0]
    cdef Py_ssize_t k
    if z < 0.0:
        return False
    for k in range(nb):
        if (buildings[k, 0] <= x <= buildings[k, 2]
                and buildings[k, 1] <= y <= buildings[k, 3]
                and z <= buildings[k, 4]):
            return True
    return False


def min_separation(double[:, ::1] pos, const unsigned char[::1] active,
                   double[::1] radius, double z_win):
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t i, j
    cdef double best = INFINITY
    cdef double dx, dy, dz, gap
    for i in range(n):
        if active[i] == 0:
            continue
        for j in range(i + 1, n):
            if active[j] == 0:
                continue
            dz = fabs(pos[i, 2] - pos[j, 2])
            if dz >= z_win:
                continue
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            gap = sqrt(dx * dx + dy * dy) - (radius[i] + radius[j])
            if gap < best:
                best = gap
    return best
