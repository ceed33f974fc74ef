"""Track representation, the on-disk track format and a seeded track generator."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .geometry import OrientedRect, Point, Segment, rect_segment_intersects


class TrackError(ValueError):
    """Raised for malformed or invalid track documents.

    ``field`` names the offending key when one can be identified.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class Outcome(str, Enum):
    COLLISION = "Collision"
    REACHED_DESTINATION = "ReachedDestination"
    TIMED_OUT = "TimedOut"


@dataclass(frozen=True)
class TrackOutcome:
    terminal: Outcome
    final_position: Point
    ticks: int

    def __post_init__(self):
        if self.ticks < 1:
            raise ValueError("ticks must be >= 1")


@dataclass(frozen=True, eq=False)
class Track:
    walls: tuple[Segment, ...]
    obstacles: tuple[OrientedRect, ...]
    start: Point
    start_heading: float
    destination: Point
    track_width: float
    name: str = "track"

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if not self.walls:
            raise TrackError("track has no walls", "walls")
        if not (self.track_width > 0 and math.isfinite(self.track_width)):
            raise TrackError(f"track_width must be positive, got {self.track_width}", "track_width")
        for i, ob in enumerate(self.obstacles):
            if ob.heading != 0.0:
                raise TrackError(f"obstacle {i} is not axis-aligned", "obstacles")
            if _inside(ob, self.start):
                raise TrackError(f"start lies inside obstacle {i}", "start")
            if _inside(ob, self.destination):
                raise TrackError(f"destination lies inside obstacle {i}", "destination")

    def __eq__(self, other):
        if not isinstance(other, Track):
            return NotImplemented
        return dumps_track(self) == dumps_track(other)

    def __hash__(self):
        return hash(dumps_track(self))

    @cached_property
    def segments(self) -> np.ndarray:
        """All collision geometry (walls, then obstacle edges) as an (n, 4) array."""
        rows = [w.as_tuple() for w in self.walls]
        for ob in self.obstacles:
            rows.extend(e.as_tuple() for e in ob.edges())
        arr = np.ascontiguousarray(rows, dtype=np.float64)
        arr.setflags(write=False)
        return arr

    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) over walls, obstacles, start and destination."""
        seg = self.segments
        xs = np.concatenate([seg[:, 0], seg[:, 2], [self.start.x, self.destination.x]])
        ys = np.concatenate([seg[:, 1], seg[:, 3], [self.start.y, self.destination.y]])
        return float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max())


def _inside(rect: OrientedRect, p: Point) -> bool:
    return (abs(p.x - rect.center.x) < rect.half_length
            and abs(p.y - rect.center.y) < rect.half_width)


def first_collision(track: Track, footprint: OrientedRect) -> bool:
    """True if the footprint touches any wall or obstacle edge."""
    for w in track.walls:
        if rect_segment_intersects(footprint, w):
            return True
    for ob in track.obstacles:
        for e in ob.edges():
            if rect_segment_intersects(footprint, e):
                return True
    return False


def mirror_track(track: Track) -> Track:
    """Reflect a track about the line through its start along the start heading."""
    sx, sy = track.start.x, track.start.y
    c2 = math.cos(2.0 * track.start_heading)
    s2 = math.sin(2.0 * track.start_heading)
    # snap axis-aligned and diagonal headings so their mirrors are exact
    if abs(s2) < 1e-12:
        c2, s2 = math.copysign(1.0, c2), 0.0
    elif abs(c2) < 1e-12:
        c2, s2 = 0.0, math.copysign(1.0, s2)

    def refl(p: Point) -> Point:
        dx = p.x - sx
        dy = p.y - sy
        return Point(sx + (dx * c2 + dy * s2), sy + (dx * s2 - dy * c2))

    obstacles = []
    for ob in track.obstacles:
        if abs(s2) < 1e-9:
            ob2 = OrientedRect(refl(ob.center), ob.half_length, ob.half_width)
        elif abs(c2) < 1e-9:
            ob2 = OrientedRect(refl(ob.center), ob.half_width, ob.half_length)
        else:
            raise ValueError("mirroring would rotate obstacles off-axis")
        obstacles.append(ob2)
    return Track(
        walls=tuple(Segment(refl(w.a), refl(w.b)) for w in track.walls),
        obstacles=tuple(obstacles),
        start=track.start,
        start_heading=track.start_heading,
        destination=refl(track.destination),
        track_width=track.track_width,
        name=track.name + "-mirror",
    )


# --- file format -------------------------------------------------------------

def _num(v: float) -> str:
    v = float(v)
    if v == 0.0:
        return "0"
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _deg(rad: float) -> float:
    return round(math.degrees(rad), 12)


def _obj(pairs: Iterable[tuple[str, str]]) -> str:
    return "{" + ", ".join(f'"{k}": {v}' for k, v in pairs) + "}"


def _list(items: Sequence[str]) -> str:
    if not items:
        return "[]"
    return "[\n" + ",\n".join("    " + it for it in items) + "\n  ]"


def dumps_track(track: Track) -> str:
    """Canonical text form: fixed key order, shortest round-trip numbers."""
    walls = [
        _obj([("x1", _num(w.a.x)), ("y1", _num(w.a.y)), ("x2", _num(w.b.x)), ("y2", _num(w.b.y))])
        for w in track.walls
    ]
    obstacles = [
        _obj([("cx", _num(o.center.x)), ("cy", _num(o.center.y)),
              ("w", _num(2.0 * o.half_length)), ("h", _num(2.0 * o.half_width))])
        for o in track.obstacles
    ]
    lines = [
        "{",
        f'  "name": {json.dumps(track.name)},',
        f'  "track_width": {_num(track.track_width)},',
        '  "start": ' + _obj([("x", _num(track.start.x)), ("y", _num(track.start.y)),
                             ("heading_deg", _num(_deg(track.start_heading)))]) + ",",
        '  "destination": ' + _obj([("x", _num(track.destination.x)),
                                   ("y", _num(track.destination.y))]) + ",",
        '  "walls": ' + _list(walls) + ",",
        '  "obstacles": ' + _list(obstacles),
        "}",
    ]
    return "\n".join(lines) + "\n"


def save_track(track: Track, path: str | Path) -> None:
    Path(path).write_text(dumps_track(track))


def _get(doc: dict, key: str, where: str = "") -> Any:
    if key not in doc:
        raise TrackError(f"missing field {where}{key}", where + key)
    return doc[key]


def _float(doc: dict, key: str, where: str = "") -> float:
    v = _get(doc, key, where)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TrackError(f"field {where}{key} must be a number", where + key)
    v = float(v)
    if not math.isfinite(v):
        raise TrackError(f"field {where}{key} must be finite", where + key)
    return v


def track_from_dict(doc: Any) -> Track:
    if not isinstance(doc, dict):
        raise TrackError("track document must be an object")
    name = str(doc.get("name", "track"))
    width = _float(doc, "track_width")
    if width <= 0:
        raise TrackError(f"track_width must be positive, got {width}", "track_width")
    st = _get(doc, "start")
    if not isinstance(st, dict):
        raise TrackError("start must be an object", "start")
    start = Point(_float(st, "x", "start."), _float(st, "y", "start."))
    heading = math.radians(_float(st, "heading_deg", "start.")) if "heading_deg" in st else 0.0
    de = _get(doc, "destination")
    if not isinstance(de, dict):
        raise TrackError("destination must be an object", "destination")
    dest = Point(_float(de, "x", "destination."), _float(de, "y", "destination."))
    walls = []
    for i, w in enumerate(_get(doc, "walls")):
        where = f"walls[{i}]."
        try:
            walls.append(Segment(Point(_float(w, "x1", where), _float(w, "y1", where)),
                                 Point(_float(w, "x2", where), _float(w, "y2", where))))
        except TrackError:
            raise
        except (ValueError, TypeError) as exc:
            raise TrackError(f"{where[:-1]}: {exc}", where[:-1]) from exc
    obstacles = []
    for i, o in enumerate(doc.get("obstacles", [])):
        where = f"obstacles[{i}]."
        w, h = _float(o, "w", where), _float(o, "h", where)
        if w <= 0 or h <= 0:
            raise TrackError(f"{where[:-1]} needs positive w and h", where[:-1])
        obstacles.append(OrientedRect(Point(_float(o, "cx", where), _float(o, "cy", where)),
                                      w / 2.0, h / 2.0))
    return Track(walls=tuple(walls), obstacles=tuple(obstacles), start=start,
                 start_heading=heading, destination=dest, track_width=width, name=name)


def load_track(text: str) -> Track:
    """Parse and validate a track document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TrackError(f"malformed track file: {exc}") from exc
    return track_from_dict(doc)


def read_track(path: str | Path) -> Track:
    return load_track(Path(path).read_text())


BUNDLED = tuple(f"map{i}" for i in range(1, 11))
ALIASES = {"simple": "map1", "obstacles": "map6"}


def bundled_track(name: str) -> Track:
    name = ALIASES.get(name, name)
    if name not in BUNDLED:
        raise KeyError(f"no bundled track named {name!r}")
    text = resources.files("symnav").joinpath("tracks", f"{name}.json").read_text()
    return load_track(text)


def resolve_track(ref: str | Path) -> Track:
    """A bundled track name, or a path to a track file."""
    s = str(ref)
    if s in BUNDLED or s in ALIASES:
        return bundled_track(s)
    return read_track(s)


# --- construction ------------------------------------------------------------

def corridor_walls(path: Sequence[tuple[float, float]], width: float) -> list[Segment]:
    """Walls of a closed-end corridor of ``width`` around a rectilinear centerline."""
    pts = [np.asarray(p, dtype=float) for p in path]
    n = len(pts)
    if n < 2:
        raise ValueError("corridor needs at least two path points")
    dirs = []
    for i in range(n - 1):
        d = pts[i + 1] - pts[i]
        if d[0] != 0 and d[1] != 0:
            raise ValueError("corridor path must be axis-aligned")
        dirs.append(d / np.linalg.norm(d))
    half = width / 2.0
    left, right = [], []
    for i in range(n):
        if i == 0:
            nrm = np.array([-dirs[0][1], dirs[0][0]])
            off = nrm * half
        elif i == n - 1:
            nrm = np.array([-dirs[-1][1], dirs[-1][0]])
            off = nrm * half
        else:
            n1 = np.array([-dirs[i - 1][1], dirs[i - 1][0]])
            n2 = np.array([-dirs[i][1], dirs[i][0]])
            off = (n1 + n2) * half
        left.append(pts[i] + off)
        right.append(pts[i] - off)
    walls = []

    def seg(p, q):
        walls.append(Segment(Point(float(p[0]), float(p[1])), Point(float(q[0]), float(q[1]))))

    seg(right[0], left[0])
    for i in range(n - 1):
        seg(left[i], left[i + 1])
    seg(left[-1], right[-1])
    for i in range(n - 1, 0, -1):
        seg(right[i], right[i - 1])
    return walls


def corridor_track(name: str, path: Sequence[tuple[float, float]], width: float,
                   obstacles: Sequence[tuple[float, float, float, float]] = (),
                   start_offset: float | None = None,
                   end_offset: float | None = None) -> Track:
    """Track whose start sits near the first path point and destination near the last."""
    p0, p1 = np.asarray(path[0], float), np.asarray(path[1], float)
    q0, q1 = np.asarray(path[-2], float), np.asarray(path[-1], float)
    d0 = (p1 - p0) / np.linalg.norm(p1 - p0)
    d1 = (q1 - q0) / np.linalg.norm(q1 - q0)
    so = width / 2.0 if start_offset is None else start_offset
    eo = width / 2.0 if end_offset is None else end_offset
    start = p0 + d0 * so
    dest = q1 - d1 * eo
    heading = math.atan2(d0[1], d0[0])
    return Track(
        walls=tuple(corridor_walls(path, width)),
        obstacles=tuple(OrientedRect(Point(cx, cy), w / 2.0, h / 2.0) for cx, cy, w, h in obstacles),
        start=Point(float(start[0]), float(start[1])),
        start_heading=heading,
        destination=Point(float(dest[0]), float(dest[1])),
        track_width=width,
        name=name,
    )


@dataclass(frozen=True)
class Difficulty:
    """Knobs for :func:`generate_random_track`. Lengths are in world units."""

    legs: tuple[int, int] = (3, 5)
    leg_length: tuple[float, float] = (300.0, 600.0)
    width: tuple[float, float] = (90.0, 120.0)
    obstacle_density: float = 0.5
    obstacle_depth: tuple[float, float] = (0.25, 0.45)
    max_retries: int = 200

    def __post_init__(self):
        if self.legs[0] < 1 or self.legs[0] > self.legs[1]:
            raise ValueError("legs range must satisfy 1 <= lo <= hi")
        if self.width[0] <= 0 or self.width[0] > self.width[1]:
            raise ValueError("width range must be positive and ordered")
        if self.leg_length[0] <= 0 or self.leg_length[0] > self.leg_length[1]:
            raise ValueError("leg_length range must be positive and ordered")
        if not 0.0 <= self.obstacle_density:
            raise ValueError("obstacle_density must be >= 0")
        if not 0.0 < self.obstacle_depth[0] <= self.obstacle_depth[1] < 1.0:
            raise ValueError("obstacle_depth must lie in (0, 1)")


def _legs_overlap(path: list[np.ndarray], width: float) -> bool:
    """True if any two non-adjacent legs' corridor boxes come closer than one width."""
    boxes = []
    pad = width
    for a, b in zip(path[:-1], path[1:]):
        boxes.append((min(a[0], b[0]) - pad, min(a[1], b[1]) - pad,
                      max(a[0], b[0]) + pad, max(a[1], b[1]) + pad))
    for i in range(len(boxes)):
        for j in range(i + 2, len(boxes)):
            bi, bj = boxes[i], boxes[j]
            if bi[0] < bj[2] and bj[0] < bi[2] and bi[1] < bj[3] and bj[1] < bi[3]:
                return True
    return False


def generate_random_track(seed: int, difficulty: Difficulty = Difficulty()) -> Track:
    """Rectilinear corridor with rectangular obstacles, a pure function of its arguments."""
    rng = np.random.default_rng(seed)
    for _ in range(difficulty.max_retries):
        width = float(round(rng.uniform(*difficulty.width)))
        n_legs = int(rng.integers(difficulty.legs[0], difficulty.legs[1] + 1))
        path = [np.zeros(2)]
        heading = 0
        for k in range(n_legs):
            if k > 0:
                heading = (heading + (1 if rng.random() < 0.5 else 3)) % 4
            length = float(round(rng.uniform(*difficulty.leg_length)))
            step = np.array([(1, 0), (0, 1), (-1, 0), (0, -1)][heading], dtype=float)
            path.append(path[-1] + step * length)
        if _legs_overlap(path, width):
            continue
        obstacles = []
        for k in range(n_legs):
            a, b = path[k], path[k + 1]
            length = float(np.linalg.norm(b - a))
            d = (b - a) / length
            nrm = np.array([-d[1], d[0]])
            count = int(rng.poisson(difficulty.obstacle_density))
            # keep the first leg's opening and the last leg's end clear
            lo = 2.0 * width if k == 0 else width
            hi = length - (2.0 * width if k == n_legs - 1 else width)
            for _ in range(count):
                if hi <= lo:
                    break
                along = float(round(rng.uniform(lo, hi)))
                depth = float(round(rng.uniform(*difficulty.obstacle_depth) * width))
                thick = float(round(rng.uniform(0.15, 0.4) * width))
                side = 1.0 if rng.random() < 0.5 else -1.0
                centre = a + d * along + nrm * side * (width / 2.0 - depth / 2.0)
                if d[0] != 0:
                    w, h = thick, depth
                else:
                    w, h = depth, thick
                obstacles.append((float(centre[0]), float(centre[1]), w, h))
        try:
            return corridor_track(
                f"random-{seed}", [tuple(p) for p in path], width, obstacles,
            )
        except (TrackError, ValueError):
            continue
    raise TrackError(f"could not generate a valid track for seed {seed}")
