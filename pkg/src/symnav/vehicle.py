"""Front-drive kinematic bicycle model."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import OrientedRect, Point, normalize_angle


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 20.0
    body_length: float = 30.0
    body_width: float = 16.0
    speed: float = 5.0
    max_steer: float = math.radians(35.0)
    max_steer_rate: float = math.radians(5.0)

    def __post_init__(self):
        for name in ("wheelbase", "body_length", "body_width", "speed", "max_steer", "max_steer_rate"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive, got {v}")
        if self.max_steer >= math.pi / 2:
            raise ValueError("max_steer must be below pi/2")

    @property
    def turning_radius(self) -> float:
        """Steady-state radius of the front axle path at full lock."""
        return self.wheelbase / math.sin(self.max_steer)


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    theta: float = 0.0
    delta: float = 0.0

    @property
    def position(self) -> Point:
        return Point(self.x, self.y)

    def mirrored(self) -> "VehicleState":
        """Reflection across the x-axis."""
        return VehicleState(self.x, -self.y, normalize_angle(-self.theta), -self.delta)


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def step(state: VehicleState, steer_command: float, params: VehicleParams) -> VehicleState:
    """Advance one tick: rate-limited steering, then the front-drive update."""
    target = _clamp(steer_command, -params.max_steer, params.max_steer)
    delta = state.delta + _clamp(target - state.delta, -params.max_steer_rate, params.max_steer_rate)
    heading = state.theta + delta
    x = state.x + params.speed * math.cos(heading)
    y = state.y + params.speed * math.sin(heading)
    theta = normalize_angle(state.theta + params.speed / params.wheelbase * math.sin(delta))
    return VehicleState(x, y, theta, delta)


def footprint(state: VehicleState, params: VehicleParams) -> OrientedRect:
    return OrientedRect(Point(state.x, state.y), params.body_length / 2.0,
                        params.body_width / 2.0, state.theta)
