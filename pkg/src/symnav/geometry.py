"""Exact 2D primitives and the intersection kernels the simulator is built on.

World units are abstract pixels. The frame is right-handed (y up), so positive
angles turn counter-clockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional


def normalize_angle(angle: float) -> float:
    """Wrap ``angle`` into (-pi, pi]."""
    if -math.pi < angle <= math.pi:
        return angle
    angle = math.fmod(angle, 2.0 * math.pi)
    if angle > math.pi:
        angle -= 2.0 * math.pi
    elif angle <= -math.pi:
        angle += 2.0 * math.pi
    return angle


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"degenerate segment at ({self.a.x}, {self.a.y})")

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a.x, self.a.y, self.b.x, self.b.y)


@dataclass(frozen=True)
class Ray:
    origin: Point
    angle: float

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise ValueError("non-finite ray angle")
        object.__setattr__(self, "angle", normalize_angle(self.angle))


@dataclass(frozen=True)
class OrientedRect:
    center: Point
    half_length: float
    half_width: float
    heading: float = 0.0

    def __post_init__(self):
        if not (self.half_length > 0 and self.half_width > 0):
            raise ValueError(
                f"rectangle half extents must be positive, got "
                f"{self.half_length} x {self.half_width}"
            )

    def corners(self) -> list[Point]:
        """Corners counter-clockwise, starting at the front-left one."""
        c, s = math.cos(self.heading), math.sin(self.heading)
        out = []
        for lx, wy in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
            px = lx * self.half_length
            py = wy * self.half_width
            out.append(Point(self.center.x + c * px - s * py, self.center.y + s * px + c * py))
        return out

    def edges(self) -> list[Segment]:
        pts = self.corners()
        return [Segment(pts[i], pts[(i + 1) % 4]) for i in range(4)]


# Below these, a ray and a segment count as parallel (relative to the segment's
# L1 length) and an endpoint counts as lying on the ray line (world units).
# Without them rounding noise in a parallel pair's cross product reads as a hit.
PARALLEL_TOL = 1e-12
COLLINEAR_TOL = 1e-9

# Scalar kernels on raw floats. The compiled core and the pure-Python backend
# both follow these exact operation orders so results agree bit for bit.

def ray_hit(ox: float, oy: float, dx: float, dy: float,
            ax: float, ay: float, bx: float, by: float) -> float:
    """Distance along the unit direction (dx, dy) to segment a-b, or -1.0."""
    ex = bx - ax
    ey = by - ay
    wx = ax - ox
    wy = ay - oy
    denom = dx * ey - dy * ex
    unum = wx * dy - wy * dx
    if abs(denom) > PARALLEL_TOL * (abs(ex) + abs(ey)):
        t = (wx * ey - wy * ex) / denom
        u = unum / denom
        if t >= 0.0 and 0.0 <= u <= 1.0:
            return t
        return -1.0
    # parallel: unum and unum - denom are the endpoints' offsets from the ray line
    vnum = unum - denom
    if not (abs(unum) <= COLLINEAR_TOL or abs(vnum) <= COLLINEAR_TOL or (unum < 0.0) != (vnum < 0.0)):
        return -1.0
    # collinear: nearest point of the overlap
    ta = wx * dx + wy * dy
    tb = (bx - ox) * dx + (by - oy) * dy
    lo = min(ta, tb)
    hi = max(ta, tb)
    if hi < 0.0:
        return -1.0
    if lo <= 0.0:
        return 0.0
    return lo


def segment_hits_box(px: float, py: float, qx: float, qy: float,
                     hl: float, hw: float) -> bool:
    """Inclusive Liang-Barsky test of segment p-q against [-hl, hl] x [-hw, hw]."""
    dx = qx - px
    dy = qy - py
    t0 = 0.0
    t1 = 1.0
    for p, q in ((-dx, px + hl), (dx, hl - px), (-dy, py + hw), (dy, hw - py)):
        if p == 0.0:
            if q < 0.0:
                return False
        else:
            r = q / p
            if p < 0.0:
                if r > t1:
                    return False
                if r > t0:
                    t0 = r
            else:
                if r < t0:
                    return False
                if r < t1:
                    t1 = r
    return True


def rect_hits_segment(cx: float, cy: float, c: float, s: float, hl: float, hw: float,
                      ax: float, ay: float, bx: float, by: float) -> bool:
    """Segment test against a rectangle given by center, cos/sin of heading and half extents."""
    rax = ax - cx
    ray_ = ay - cy
    rbx = bx - cx
    rby = by - cy
    return segment_hits_box(
        rax * c + ray_ * s, ray_ * c - rax * s,
        rbx * c + rby * s, rby * c - rbx * s,
        hl, hw,
    )


def ray_segment_distance(ray: Ray, seg: Segment) -> Optional[float]:
    """Smallest t >= 0 with ``ray.origin + t * dir`` on ``seg``; None on a miss.

    Collinear overlap reports the nearest overlapping point.
    """
    t = ray_hit(
        ray.origin.x, ray.origin.y, math.cos(ray.angle), math.sin(ray.angle),
        seg.a.x, seg.a.y, seg.b.x, seg.b.y,
    )
    return None if t < 0.0 else t


def rect_segment_intersects(rect: OrientedRect, seg: Segment) -> bool:
    """True if the segment touches or crosses the rectangle boundary or interior."""
    return rect_hits_segment(
        rect.center.x, rect.center.y, math.cos(rect.heading), math.sin(rect.heading),
        rect.half_length, rect.half_width,
        seg.a.x, seg.a.y, seg.b.x, seg.b.y,
    )


def point_distance(a: Point, b: Point) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def point_segment_distance(p: Point, seg: Segment) -> float:
    ex = seg.b.x - seg.a.x
    ey = seg.b.y - seg.a.y
    t = ((p.x - seg.a.x) * ex + (p.y - seg.a.y) * ey) / (ex * ex + ey * ey)
    t = min(1.0, max(0.0, t))
    return math.hypot(p.x - (seg.a.x + t * ex), p.y - (seg.a.y + t * ey))
