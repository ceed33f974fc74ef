"""Front-facing rangefinder models.

Beams are ordered leftmost first. In the y-up world frame the leftmost beam
points at ``theta + fov/2`` and the rightmost at ``theta - fov/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from . import _backend
from .track import Track
from .vehicle import VehicleState


class SensorKind(str, Enum):
    BASIC = "basic"
    CAMERA = "camera"
    LIDAR = "lidar"
    LONG_RADAR = "long_radar"
    MEDIUM_RADAR = "medium_radar"


# kind -> (fov degrees, noise mean, noise std)
PRESETS = {
    SensorKind.BASIC: (180.0, 1.0, 0.0),
    SensorKind.CAMERA: (100.0, 1.0, 0.0),
    SensorKind.LIDAR: (145.0, 1.0, 0.05),
    SensorKind.LONG_RADAR: (110.0, 1.0, 0.1),
    SensorKind.MEDIUM_RADAR: (160.0, 0.0, 0.15),
}

CAMERA_RANGE_FACTOR = 1.5
DEFAULT_RANGE_FACTOR = 3.0


@dataclass(frozen=True)
class SensorSpec:
    kind: SensorKind
    beam_count: int
    fov: float
    max_range: float
    noise_mean: float = 1.0
    noise_std: float = 0.0
    rng_stream: int = 0

    def __post_init__(self):
        if self.beam_count < 2:
            raise ValueError(f"beam_count must be >= 2, got {self.beam_count}")
        if not 0.0 < self.fov <= math.pi:
            raise ValueError(f"fov must lie in (0, pi], got {self.fov}")
        if not self.max_range > 0:
            raise ValueError(f"max_range must be positive, got {self.max_range}")
        if not self.noise_std >= 0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")

    @property
    def noisy(self) -> bool:
        return self.noise_std > 0.0


def make_sensor(kind: SensorKind | str, beam_count: int, track_width: float, *,
                fov: Optional[float] = None, max_range: Optional[float] = None,
                noise_mean: Optional[float] = None, noise_std: Optional[float] = None) -> SensorSpec:
    """Preset sensor for ``kind``; keyword arguments override the preset."""
    kind = SensorKind(kind)
    if beam_count < 2:
        raise ValueError(f"beam_count must be >= 2, got {beam_count}")
    fov_deg, mean, std = PRESETS[kind]
    factor = CAMERA_RANGE_FACTOR if kind is SensorKind.CAMERA else DEFAULT_RANGE_FACTOR
    return SensorSpec(
        kind=kind,
        beam_count=beam_count,
        fov=math.radians(fov_deg) if fov is None else fov,
        max_range=factor * track_width if max_range is None else max_range,
        noise_mean=mean if noise_mean is None else noise_mean,
        noise_std=std if noise_std is None else noise_std,
    )


def without_noise(spec: SensorSpec) -> SensorSpec:
    return replace(spec, noise_mean=1.0, noise_std=0.0)


def beam_offsets(spec: SensorSpec) -> np.ndarray:
    """Beam angles relative to the heading, leftmost first.

    Built from the left half and mirrored so that offset[n-1-i] == -offset[i]
    holds exactly; the mirror tests depend on this.
    """
    n = spec.beam_count
    gap = spec.fov / (n - 1)
    half = spec.fov / 2.0
    out = np.empty(n)
    for i in range(n // 2):
        out[i] = half - i * gap
        out[n - 1 - i] = -out[i]
    if n % 2:
        out[n // 2] = 0.0
    return out


def draw_noise(spec: SensorSpec, rng: np.random.Generator, ticks: int) -> Optional[np.ndarray]:
    """Multiplicative range factors, one row per tick; None for ideal sensors."""
    if not spec.noisy:
        return None
    return rng.normal(spec.noise_mean, spec.noise_std, size=(ticks, spec.beam_count))


def sense(spec: SensorSpec, state: VehicleState, track: Track,
          noise_draws: Optional[np.random.Generator] = None) -> np.ndarray:
    """One scan of ranges in [0, max_range].

    Noisy kinds consume ``beam_count`` normal draws from ``noise_draws``.
    """
    angles = state.theta + beam_offsets(spec)
    out = np.empty(spec.beam_count)
    _backend.kernels.cast_rays(track.segments, state.x, state.y, angles, spec.max_range, out)
    if spec.noisy:
        if noise_draws is None:
            raise ValueError(f"{spec.kind.value} sensor needs a noise stream")
        factors = draw_noise(spec, noise_draws, 1)[0]
        out = np.clip(out * factors, 0.0, spec.max_range)
    return out


def normalize(scan: np.ndarray, spec: SensorSpec) -> np.ndarray:
    return np.asarray(scan, dtype=float) / spec.max_range
