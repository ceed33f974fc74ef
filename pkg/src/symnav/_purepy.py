"""Pure-Python kernels with the same signatures as the compiled ``_core``.

Used when the extension is not built. Raycasts and collisions reproduce the
compiled results exactly; the network sums go through numpy, so long episodes
may differ from the compiled core in the last few ulps.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import COLLINEAR_TOL, PARALLEL_TOL, normalize_angle, rect_hits_segment

COLLISION, REACHED, TIMED_OUT = 0, 1, 2


def _cast(segs: np.ndarray, ox: float, oy: float, angles: np.ndarray, max_range: float) -> np.ndarray:
    dx = np.array([math.cos(a) for a in angles])[:, None]
    dy = np.array([math.sin(a) for a in angles])[:, None]
    ax, ay, bx, by = segs[:, 0], segs[:, 1], segs[:, 2], segs[:, 3]
    ex = bx - ax
    ey = by - ay
    wx = ax - ox
    wy = ay - oy
    denom = dx * ey - dy * ex
    unum = wx * dy - wy * dx
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (wx * ey - wy * ex) / denom
        u = unum / denom
    par = np.abs(denom) <= PARALLEL_TOL * (np.abs(ex) + np.abs(ey))
    hit = ~par & (t >= 0.0) & (u >= 0.0) & (u <= 1.0)
    dist = np.where(hit, t, np.inf)
    vnum = unum - denom
    col = par & ((np.abs(unum) <= COLLINEAR_TOL) | (np.abs(vnum) <= COLLINEAR_TOL)
                 | ((unum < 0.0) != (vnum < 0.0)))
    if col.any():
        ta = wx * dx + wy * dy
        tb = (bx - ox) * dx + (by - oy) * dy
        lo = np.minimum(ta, tb)
        hi = np.maximum(ta, tb)
        ct = np.where(hi < 0.0, np.inf, np.where(lo <= 0.0, 0.0, lo))
        dist = np.where(col, ct, dist)
    best = dist.min(axis=1) if dist.shape[1] else np.full(len(angles), np.inf)
    return np.where(best < max_range, best, max_range)


def cast_rays(segs, ox, oy, angles, max_range, out):
    angles = np.asarray(angles, dtype=np.float64)
    if angles.shape[0] != out.shape[0]:
        raise ValueError("angles and out differ in length")
    out[:] = _cast(np.asarray(segs, dtype=np.float64), ox, oy, angles, max_range)


def _hits(segs, cx, cy, c, s, hl, hw) -> bool:
    for ax, ay, bx, by in segs:
        if rect_hits_segment(cx, cy, c, s, hl, hw, ax, ay, bx, by):
            return True
    return False


def rect_hits_any(segs, cx, cy, theta, half_length, half_width):
    return _hits(np.asarray(segs).tolist(), cx, cy, math.cos(theta), math.sin(theta),
                 half_length, half_width)


def _act(x: np.ndarray) -> np.ndarray:
    return np.copysign(1.0 / (1.0 + np.exp(-np.abs(x))) - 0.5, x)


def _layers(sizes, constrained, weights):
    out = []
    pos = 0
    for k in range(len(sizes) - 1):
        fi, fo = int(sizes[k]), int(sizes[k + 1])
        W = np.asarray(weights[pos:pos + fi * fo]).reshape(fo, fi)
        pos += fi * fo
        if constrained[k]:
            out.append((True, np.ascontiguousarray(W[:, : fi // 2])))
        else:
            out.append((False, W))
    return out


def run_episode(segs, x, y, theta, wheelbase, half_length, half_width, speed,
                max_steer, max_steer_rate, offsets, max_range, noise,
                sizes, constrained, weights, max_ticks, dest_x, dest_y, dest_radius,
                traj=None, scans=None):
    offsets = np.asarray(offsets, dtype=np.float64)
    n = offsets.shape[0]
    if int(sizes[0]) != n:
        raise ValueError(f"network expects {sizes[0]} inputs but the sensor has {n} beams")
    if noise is not None and (noise.shape[0] < max_ticks or noise.shape[1] != n):
        raise ValueError("noise block must be (max_ticks, beams)")
    segs = np.asarray(segs, dtype=np.float64)
    seg_list = segs.tolist()
    layers = _layers(sizes, constrained, weights)
    delta = 0.0
    r2 = dest_radius * dest_radius

    if _hits(seg_list, x, y, math.cos(theta), math.sin(theta), half_length, half_width):
        if traj is not None:
            traj[0] = (1.0, x, y, theta, delta, 0.0)
        if scans is not None:
            scans[0] = _cast(segs, x, y, theta + offsets, max_range)
        return COLLISION, 1, x, y, theta, delta

    for tick in range(1, max_ticks + 1):
        ranges = _cast(segs, x, y, theta + offsets, max_range)
        if noise is not None:
            ranges = np.clip(ranges * noise[tick - 1], 0.0, max_range)
        v = ranges / max_range
        for con, W in layers:
            if con:
                h = W.shape[1]
                v = _act(W @ (v[:h] - v[::-1][:h]))
            else:
                v = _act(W @ v)
        cmd = (float(v[0]) - float(v[1])) * max_steer / 0.5
        if cmd > max_steer:
            cmd = max_steer
        elif cmd < -max_steer:
            cmd = -max_steer

        dd = cmd - delta
        if dd < -max_steer_rate:
            dd = -max_steer_rate
        elif dd > max_steer_rate:
            dd = max_steer_rate
        delta = delta + dd
        head = theta + delta
        x = x + speed * math.cos(head)
        y = y + speed * math.sin(head)
        theta = normalize_angle(theta + speed / wheelbase * math.sin(delta))

        if traj is not None:
            traj[tick - 1] = (float(tick), x, y, theta, delta, cmd)
        if scans is not None:
            scans[tick - 1] = ranges

        if _hits(seg_list, x, y, math.cos(theta), math.sin(theta), half_length, half_width):
            return COLLISION, tick, x, y, theta, delta
        ddx = x - dest_x
        ddy = y - dest_y
        if ddx * ddx + ddy * ddy <= r2:
            return REACHED, tick, x, y, theta, delta
    return TIMED_OUT, max_ticks, x, y, theta, delta
