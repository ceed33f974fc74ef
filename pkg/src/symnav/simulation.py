"""Closed-loop episodes: sense, decide, steer, check, repeat.

Fitness is the squared straight-line distance from the track start to the
final position divided by the elapsed ticks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _backend
from .geometry import Point, point_distance
from .network import Chromosome, NetworkSpec, WeightMatrices, decode
from .sensors import SensorSpec, beam_offsets, draw_noise
from .track import Outcome, Track, TrackOutcome
from .vehicle import VehicleParams, VehicleState

_CODES = {0: Outcome.COLLISION, 1: Outcome.REACHED_DESTINATION, 2: Outcome.TIMED_OUT}

TRAJECTORY_HEADER = ("tick", "x", "y", "theta_rad", "delta_rad", "steer_cmd_rad")


class DistanceMode(str, Enum):
    EUCLIDEAN = "euclidean"
    PATH = "path"


@dataclass(frozen=True)
class EpisodeConfig:
    max_ticks: int = 2000
    record_trajectory: bool = False
    distance: DistanceMode = DistanceMode.EUCLIDEAN

    def __post_init__(self):
        if self.max_ticks < 1:
            raise ValueError("max_ticks must be >= 1")
        object.__setattr__(self, "distance", DistanceMode(self.distance))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Per-tick rows ``(tick, x, y, theta, delta, steer_cmd)`` and raw scans."""

    states: np.ndarray
    scans: np.ndarray

    def __len__(self):
        return self.states.shape[0]

    def state(self, i: int) -> VehicleState:
        _, x, y, th, de, _ = self.states[i]
        return VehicleState(float(x), float(y), float(th), float(de))

    @property
    def steering(self) -> np.ndarray:
        return self.states[:, 5]


@dataclass(frozen=True, eq=False)
class EpisodeResult:
    outcome: TrackOutcome
    fitness: float
    final_state: VehicleState
    trajectory: Optional[Trajectory] = None


def fitness_of(outcome_position: Point, start: Point, ticks: int) -> float:
    if ticks < 1:
        raise ValueError("ticks must be >= 1")
    d = point_distance(start, outcome_position)
    return d * d / ticks


def _pack(weights: WeightMatrices):
    sizes = np.array(weights.layer_sizes, dtype=np.intp)
    con = np.array(weights.constrained, dtype=np.uint8)
    return sizes, con, np.ascontiguousarray(weights.flat(), dtype=np.float64)


def run_episode(track: Track, vehicle: VehicleParams, sensor: SensorSpec,
                weights: WeightMatrices, config: EpisodeConfig = EpisodeConfig(),
                eval_seed: int | np.random.SeedSequence = 0) -> EpisodeResult:
    if weights.layer_sizes[0] != sensor.beam_count:
        raise ValueError(
            f"network expects {weights.layer_sizes[0]} inputs but the sensor has "
            f"{sensor.beam_count} beams"
        )
    sizes, con, flat = _pack(weights)
    noise = draw_noise(sensor, np.random.default_rng(eval_seed), config.max_ticks)
    traj = scans = None
    if config.record_trajectory:
        traj = np.zeros((config.max_ticks, 6))
        scans = np.zeros((config.max_ticks, sensor.beam_count))
    code, ticks, x, y, theta, delta = _backend.kernels.run_episode(
        track.segments, track.start.x, track.start.y, track.start_heading,
        vehicle.wheelbase, vehicle.body_length / 2.0, vehicle.body_width / 2.0, vehicle.speed,
        vehicle.max_steer, vehicle.max_steer_rate,
        beam_offsets(sensor), sensor.max_range, noise,
        sizes, con, flat,
        config.max_ticks, track.destination.x, track.destination.y, track.track_width / 2.0,
        traj, scans,
    )
    final = Point(x, y)
    outcome = TrackOutcome(_CODES[code], final, ticks)
    if config.distance is DistanceMode.PATH:
        # every completed tick covers exactly one speed-length of path
        moved = 0 if code == 0 and ticks == 1 and final == track.start else ticks
        fitness = (vehicle.speed * moved) ** 2 / ticks
    else:
        fitness = fitness_of(final, track.start, ticks)
    trajectory = None
    if traj is not None:
        trajectory = Trajectory(traj[:ticks].copy(), scans[:ticks].copy())
    return EpisodeResult(outcome, fitness, VehicleState(x, y, theta, delta), trajectory)


@dataclass(frozen=True)
class Evaluation:
    fitness: float
    solved: bool


class Evaluator:
    """Summed episode fitness over a set of tracks; solved means every track was completed.

    Plain picklable object so it can be shipped to worker processes.
    """

    def __init__(self, tracks: Sequence[Track], vehicle: VehicleParams, sensor: SensorSpec,
                 episode: EpisodeConfig = EpisodeConfig()):
        if not tracks:
            raise ValueError("need at least one track")
        self.tracks = tuple(tracks)
        self.vehicle = vehicle
        self.sensor = sensor
        self.episode = episode

    def check(self, spec: NetworkSpec) -> None:
        if spec.inputs != self.sensor.beam_count:
            raise ValueError(
                f"network expects {spec.inputs} inputs but the sensor has "
                f"{self.sensor.beam_count} beams"
            )

    def episodes(self, chrom: Chromosome, eval_seed: int) -> list[EpisodeResult]:
        weights = decode(chrom)
        return [
            run_episode(t, self.vehicle, self.sensor, weights, self.episode,
                        np.random.SeedSequence(eval_seed, spawn_key=(i,)))
            for i, t in enumerate(self.tracks)
        ]

    def __call__(self, chrom: Chromosome, eval_seed: int = 0) -> Evaluation:
        results = self.episodes(chrom, eval_seed)
        return Evaluation(
            fitness=float(sum(r.fitness for r in results)),
            solved=all(r.outcome.terminal is Outcome.REACHED_DESTINATION for r in results),
        )


def make_evaluator(tracks: Sequence[Track], vehicle: VehicleParams, sensor: SensorSpec,
                   episode: EpisodeConfig = EpisodeConfig()) -> Evaluator:
    return Evaluator(tracks, vehicle, sensor, episode)


def write_trajectory(traj: Trajectory, path: str | Path, scans_path: str | Path | None = None) -> None:
    lines = [",".join(TRAJECTORY_HEADER)]
    for row in traj.states:
        lines.append(",".join([str(int(row[0]))] + [repr(float(v)) for v in row[1:]]))
    Path(path).write_text("\n".join(lines) + "\n")
    if scans_path is not None:
        n = traj.scans.shape[1]
        lines = ["tick," + ",".join(f"beam{i}" for i in range(n))]
        for t, row in zip(traj.states[:, 0], traj.scans):
            lines.append(",".join([str(int(t))] + [repr(float(v)) for v in row]))
        Path(scans_path).write_text("\n".join(lines) + "\n")


def read_trajectory(path: str | Path, scans_path: str | Path | None = None) -> Trajectory:
    rows = Path(path).read_text().splitlines()
    if not rows or tuple(rows[0].split(",")) != TRAJECTORY_HEADER:
        raise ValueError(f"{path}: not a trajectory file")
    states = np.array([[float(v) for v in r.split(",")] for r in rows[1:] if r.strip()])
    states = states.reshape(-1, 6)
    if scans_path is not None:
        srows = Path(scans_path).read_text().splitlines()[1:]
        scans = np.array([[float(v) for v in r.split(",")[1:]] for r in srows if r.strip()])
    else:
        scans = np.zeros((states.shape[0], 0))
    return Trajectory(states, scans)
