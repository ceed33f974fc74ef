# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: beam casting, footprint collision and the whole episode.

Operation order follows the scalar kernels in ``geometry`` so the two
backends agree on raycasts and collisions bit for bit.
"""

from libc.math cimport cos, sin, exp, fabs, copysign, fmod, M_PI
from libc.stdlib cimport malloc, free

import numpy as np

# same values as geometry.PARALLEL_TOL and geometry.COLLINEAR_TOL
cdef double PARALLEL_TOL = 1e-12
cdef double COLLINEAR_TOL = 1e-9

cdef enum:
    COLLISION = 0
    REACHED = 1
    TIMED_OUT = 2


cdef inline double _ray_hit(double ox, double oy, double dx, double dy,
                            double ax, double ay, double bx, double by) noexcept nogil:
    cdef double ex = bx - ax
    cdef double ey = by - ay
    cdef double wx = ax - ox
    cdef double wy = ay - oy
    cdef double denom = dx * ey - dy * ex
    cdef double unum = wx * dy - wy * dx
    cdef double t, u, ta, tb, lo, hi
    cdef double vnum
    if fabs(denom) > PARALLEL_TOL * (fabs(ex) + fabs(ey)):
        t = (wx * ey - wy * ex) / denom
        u = unum / denom
        if t >= 0.0 and 0.0 <= u <= 1.0:
            return t
        return -1.0
    vnum = unum - denom
    if not (fabs(unum) <= COLLINEAR_TOL or fabs(vnum) <= COLLINEAR_TOL or (unum < 0.0) != (vnum < 0.0)):
        return -1.0
    ta = wx * dx + wy * dy
    tb = (bx - ox) * dx + (by - oy) * dy
    lo = ta if ta < tb else tb
    hi = tb if ta < tb else ta
    if hi < 0.0:
        return -1.0
    if lo <= 0.0:
        return 0.0
    return lo


cdef inline bint _clip(double p, double q, double* t0, double* t1) noexcept nogil:
    cdef double r
    if p == 0.0:
        return q >= 0.0
    r = q / p
    if p < 0.0:
        if r > t1[0]:
            return False
        if r > t0[0]:
            t0[0] = r
    else:
        if r < t0[0]:
            return False
        if r < t1[0]:
            t1[0] = r
    return True


cdef inline bint _segment_hits_box(double px, double py, double qx, double qy,
                                   double hl, double hw) noexcept nogil:
    cdef double dx = qx - px
    cdef double dy = qy - py
    cdef double t0 = 0.0
    cdef double t1 = 1.0
    if not _clip(-dx, px + hl, &t0, &t1):
        return False
    if not _clip(dx, hl - px, &t0, &t1):
        return False
    if not _clip(-dy, py + hw, &t0, &t1):
        return False
    if not _clip(dy, hw - py, &t0, &t1):
        return False
    return True


cdef bint _rect_hits_any(const double[:, ::1] segs, double cx, double cy, double c, double s,
                         double hl, double hw) noexcept nogil:
    cdef Py_ssize_t j
    cdef double rax, ray, rbx, rby
    for j in range(segs.shape[0]):
        rax = segs[j, 0] - cx
        ray = segs[j, 1] - cy
        rbx = segs[j, 2] - cx
        rby = segs[j, 3] - cy
        if _segment_hits_box(rax * c + ray * s, ray * c - rax * s,
                             rbx * c + rby * s, rby * c - rbx * s, hl, hw):
            return True
    return False


cdef void _cast(const double[:, ::1] segs, double ox, double oy, const double* angles,
                Py_ssize_t n, double max_range, double* out) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double dx, dy, best, t
    for i in range(n):
        dx = cos(angles[i])
        dy = sin(angles[i])
        best = max_range
        for j in range(segs.shape[0]):
            t = _ray_hit(ox, oy, dx, dy, segs[j, 0], segs[j, 1], segs[j, 2], segs[j, 3])
            if t >= 0.0 and t < best:
                best = t
        out[i] = best


cdef inline double _act(double x) noexcept nogil:
    return copysign(1.0 / (1.0 + exp(-fabs(x))) - 0.5, x)


cdef inline double _normalize(double a) noexcept nogil:
    if -M_PI < a <= M_PI:
        return a
    a = fmod(a, 2.0 * M_PI)
    if a > M_PI:
        a -= 2.0 * M_PI
    elif a <= -M_PI:
        a += 2.0 * M_PI
    return a


cdef void _forward(const double* w, const Py_ssize_t* sizes, const unsigned char* con,
                   Py_ssize_t n_layers, double* x, double* y) noexcept nogil:
    # x holds the inputs; the outputs end up in x[0], x[1]
    cdef Py_ssize_t layer, o, k, fan_in, fan_out, h
    cdef double acc
    cdef const double* row
    cdef Py_ssize_t pos = 0
    for layer in range(n_layers):
        fan_in = sizes[layer]
        fan_out = sizes[layer + 1]
        for o in range(fan_out):
            row = w + pos + o * fan_in
            acc = 0.0
            if con[layer]:
                h = fan_in // 2
                for k in range(h):
                    acc = acc + row[k] * (x[k] - x[fan_in - 1 - k])
            else:
                for k in range(fan_in):
                    acc = acc + row[k] * x[k]
            y[o] = _act(acc)
        pos += fan_in * fan_out
        for o in range(fan_out):
            x[o] = y[o]


def cast_rays(const double[:, ::1] segs, double ox, double oy, const double[::1] angles,
              double max_range, double[::1] out):
    """Nearest hit per absolute beam angle, ``max_range`` when nothing is closer."""
    if angles.shape[0] != out.shape[0]:
        raise ValueError("angles and out differ in length")
    with nogil:
        _cast(segs, ox, oy, &angles[0], angles.shape[0], max_range, &out[0])


def rect_hits_any(const double[:, ::1] segs, double cx, double cy, double theta,
                  double half_length, double half_width):
    cdef double c = cos(theta)
    cdef double s = sin(theta)
    cdef bint hit
    with nogil:
        hit = _rect_hits_any(segs, cx, cy, c, s, half_length, half_width)
    return bool(hit)


def run_episode(const double[:, ::1] segs,
                double x, double y, double theta,
                double wheelbase, double half_length, double half_width, double speed,
                double max_steer, double max_steer_rate,
                const double[::1] offsets, double max_range,
                noise,
                const Py_ssize_t[::1] sizes, const unsigned char[::1] constrained,
                const double[::1] weights,
                Py_ssize_t max_ticks, double dest_x, double dest_y, double dest_radius,
                traj=None, scans=None):
    """Closed-loop episode. Returns (code, ticks, x, y, theta, delta).

    code: 0 collision, 1 destination reached, 2 timed out. ``traj`` receives
    rows (tick, x, y, theta, delta, steer_cmd) and ``scans`` the raw ranges.
    """
    cdef Py_ssize_t n = offsets.shape[0]
    cdef Py_ssize_t n_layers = sizes.shape[0] - 1
    if sizes[0] != n:
        raise ValueError(f"network expects {sizes[0]} inputs but the sensor has {n} beams")
    cdef Py_ssize_t width = 0
    cdef Py_ssize_t i
    for i in range(sizes.shape[0]):
        if sizes[i] > width:
            width = sizes[i]

    cdef const double[:, ::1] nz
    cdef bint noisy = noise is not None
    if noisy:
        nz = noise
        if nz.shape[0] < max_ticks or nz.shape[1] != n:
            raise ValueError("noise block must be (max_ticks, beams)")
    cdef double[:, ::1] tr
    cdef double[:, ::1] sc
    cdef bint rec = traj is not None
    cdef bint rec_scan = scans is not None
    if rec:
        tr = traj
    if rec_scan:
        sc = scans

    cdef double* angles = <double*> malloc(n * sizeof(double))
    cdef double* ranges = <double*> malloc(n * sizeof(double))
    cdef double* xa = <double*> malloc(width * sizeof(double))
    cdef double* ya = <double*> malloc(width * sizeof(double))
    if angles == NULL or ranges == NULL or xa == NULL or ya == NULL:
        free(angles); free(ranges); free(xa); free(ya)
        raise MemoryError()

    cdef double delta = 0.0
    cdef double cmd, target, dd, head, r, ddx, ddy
    cdef double r2 = dest_radius * dest_radius
    cdef Py_ssize_t tick = 0
    cdef int code = TIMED_OUT
    cdef Py_ssize_t ticks = max_ticks

    with nogil:
        if _rect_hits_any(segs, x, y, cos(theta), sin(theta), half_length, half_width):
            code = COLLISION
            ticks = 1
            if rec or rec_scan:
                for i in range(n):
                    angles[i] = theta + offsets[i]
                _cast(segs, x, y, angles, n, max_range, ranges)
                if rec:
                    tr[0, 0] = 1.0
                    tr[0, 1] = x
                    tr[0, 2] = y
                    tr[0, 3] = theta
                    tr[0, 4] = delta
                    tr[0, 5] = 0.0
                if rec_scan:
                    for i in range(n):
                        sc[0, i] = ranges[i]
        else:
            for tick in range(1, max_ticks + 1):
                for i in range(n):
                    angles[i] = theta + offsets[i]
                _cast(segs, x, y, angles, n, max_range, ranges)
                if noisy:
                    for i in range(n):
                        r = ranges[i] * nz[tick - 1, i]
                        if r < 0.0:
                            r = 0.0
                        elif r > max_range:
                            r = max_range
                        ranges[i] = r
                for i in range(n):
                    xa[i] = ranges[i] / max_range
                _forward(&weights[0], &sizes[0], &constrained[0], n_layers, xa, ya)
                cmd = (xa[0] - xa[1]) * max_steer / 0.5
                if cmd > max_steer:
                    cmd = max_steer
                elif cmd < -max_steer:
                    cmd = -max_steer

                target = cmd
                dd = target - delta
                if dd < -max_steer_rate:
                    dd = -max_steer_rate
                elif dd > max_steer_rate:
                    dd = max_steer_rate
                delta = delta + dd
                head = theta + delta
                x = x + speed * cos(head)
                y = y + speed * sin(head)
                theta = _normalize(theta + speed / wheelbase * sin(delta))

                if rec:
                    tr[tick - 1, 0] = <double> tick
                    tr[tick - 1, 1] = x
                    tr[tick - 1, 2] = y
                    tr[tick - 1, 3] = theta
                    tr[tick - 1, 4] = delta
                    tr[tick - 1, 5] = cmd
                if rec_scan:
                    for i in range(n):
                        sc[tick - 1, i] = ranges[i]

                if _rect_hits_any(segs, x, y, cos(theta), sin(theta), half_length, half_width):
                    code = COLLISION
                    ticks = tick
                    break
                ddx = x - dest_x
                ddy = y - dest_y
                if ddx * ddx + ddy * ddy <= r2:
                    code = REACHED
                    ticks = tick
                    break

    free(angles)
    free(ranges)
    free(xa)
    free(ya)
    return code, ticks, x, y, theta, delta
