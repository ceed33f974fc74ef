"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--track map6]

Reports the best-of-N wall time per call for a 25-beam raycast and for one
full training-style episode, plus the GA generation cost those imply.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from symnav import _backend
from symnav.config import parse_config
from symnav.experiments import run_training
from symnav.network import decode
from symnav.sensors import beam_offsets, make_sensor
from symnav.simulation import EpisodeConfig, run_episode
from symnav.track import bundled_track
from symnav.vehicle import VehicleParams


def _best(fn, number: int, repeat: int) -> float:
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def trained_controller(track_name: str):
    """A controller that completes the track, so the episode runs its full length."""
    doc = {"seed": 0, "tracks": [track_name], "sensor": {"beams": 25},
           "evolution": {"population_size": 60}}
    return run_training(parse_config(doc)).best


def bench(backend: str, track_name: str, chrom, repeat: int) -> dict:
    _backend.use(backend)
    k = _backend.kernels
    track = bundled_track(track_name)
    sensor = make_sensor("basic", 25, track.track_width)
    angles = track.start_heading + beam_offsets(sensor)
    out = np.empty(25)

    def cast():
        k.cast_rays(track.segments, track.start.x, track.start.y, angles, sensor.max_range, out)

    weights = decode(chrom)
    vehicle = VehicleParams()
    cfg = EpisodeConfig(max_ticks=2000)
    ticks = run_episode(track, vehicle, sensor, weights, cfg).outcome.ticks

    def episode():
        run_episode(track, vehicle, sensor, weights, cfg)

    scale = 10 if backend == "compiled" else 1
    return {
        "cast_rays": _best(cast, 200 * scale, repeat),
        "episode": _best(episode, scale, repeat),
        "ticks": ticks,
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--track", default="map6")
    args = ap.parse_args(argv)

    backends = _backend.available()
    chrom = trained_controller(args.track)
    results = {b: bench(b, args.track, chrom, args.repeat) for b in backends}
    _backend.use(backends[0])

    ticks = results[backends[-1]]["ticks"]
    print(f"track {args.track}, 25 beams, episode of {ticks} ticks, best of {args.repeat}")
    print(f"{'backend':>10} {'cast_rays (us)':>15} {'episode (ms)':>13} {'us/tick':>9} {'gen of 200 (s)':>15}")
    for b, r in results.items():
        print(f"{b:>10} {r['cast_rays'] * 1e6:15.2f} {r['episode'] * 1e3:13.3f} "
              f"{r['episode'] / r['ticks'] * 1e6:9.2f} {r['episode'] * 200:15.3f}")
    if len(results) == 2:
        c, p = results["compiled"], results["python"]
        print(f"speedup: cast_rays x{p['cast_rays'] / c['cast_rays']:.1f}, "
              f"episode x{p['episode'] / c['episode']:.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
