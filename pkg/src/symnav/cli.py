"""Command-line interface.

Exit codes: 0 solved (or every track completed), 2 finished without solving,
1 configuration or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, _backend
from .config import ConfigError, load_config, parse_config
from .experiments import Axis, SweepSpec, format_summary, run_sweep, run_training, summarize
from .network import decode, read_chromosome
from .render import steering_svg, track_svg
from .sensors import SensorKind, make_sensor
from .simulation import EpisodeConfig, read_trajectory, run_episode, write_trajectory
from .track import Difficulty, TrackError, dumps_track, generate_random_track, resolve_track
from .vehicle import VehicleParams

log = logging.getLogger("symnav")

OK, ERROR, UNSOLVED = 0, 1, 2


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return ERROR


def cmd_train(args) -> int:
    try:
        cfg = load_config(args.config, seed=args.seed)
    except (ConfigError, OSError) as exc:
        return _fail(str(exc))
    out = args.out or cfg.output or f"runs/{cfg.name}-seed{cfg.seed}"
    res = run_training(cfg, out, threads=args.threads, checkpoints=not args.no_checkpoints)
    g = res.generations_to_solve
    last = res.history[-1]
    print(f"{cfg.name}: {len(res.history)} generations, best fitness {last.best_fitness:.3f}, "
          + (f"solved at generation {g}" if g is not None else "not solved") + f" -> {out}")
    return OK if res.solved else UNSOLVED


def _eval_setup(args, chrom):
    """Vehicle, sensor and episode settings from --config, the run manifest, or flags."""
    doc = None
    if args.config:
        doc = json.loads(Path(args.config).read_text())
    else:
        manifest = Path(args.chromosome).parent / "manifest.json"
        if manifest.exists():
            doc = json.loads(manifest.read_text())
    tracks = [resolve_track(t) for t in args.tracks]
    if doc is not None:
        cfg = parse_config(doc, Path(args.config).parent if args.config else Path("."))
        vehicle, sensor, episode = cfg.vehicle, cfg.sensor, cfg.episode
    else:
        vehicle = VehicleParams()
        sensor = make_sensor("basic", chrom.spec.inputs, tracks[0].track_width)
        episode = EpisodeConfig()
    if args.sensor or args.beams:
        sensor = make_sensor(args.sensor or sensor.kind, args.beams or sensor.beam_count,
                             tracks[0].track_width)
    if args.max_ticks:
        episode = EpisodeConfig(max_ticks=args.max_ticks)
    return tracks, vehicle, sensor, EpisodeConfig(episode.max_ticks, True, episode.distance)


def cmd_eval(args) -> int:
    try:
        chrom = read_chromosome(args.chromosome)
        tracks, vehicle, sensor, episode = _eval_setup(args, chrom)
    except (ConfigError, TrackError, ValueError, OSError, KeyError) as exc:
        return _fail(str(exc))
    if sensor.beam_count != chrom.spec.inputs:
        return _fail(f"network expects {chrom.spec.inputs} inputs but the sensor has "
                     f"{sensor.beam_count} beams")
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    weights = decode(chrom)
    all_reached = True
    for track in tracks:
        res = run_episode(track, vehicle, sensor, weights, episode, eval_seed=args.seed or 0)
        o = res.outcome
        print(f"{track.name}\t{o.terminal.value}\tticks={o.ticks}\tfitness={res.fitness:.3f}")
        write_trajectory(res.trajectory, out / f"{track.name}.trajectory.csv",
                         out / f"{track.name}.scans.csv")
        all_reached &= o.terminal.value == "ReachedDestination"
    return OK if all_reached else UNSOLVED


def _parse_values(axis: Axis, raw: str) -> list:
    return [v.strip() for v in raw.split(",") if v.strip()]


def cmd_sweep(args) -> int:
    try:
        doc = json.loads(Path(args.config).read_text())
        if args.seed is not None:
            doc = dict(doc.get("config", doc), seed=args.seed)
        spec = SweepSpec(Axis(args.axis), tuple(_parse_values(Axis(args.axis), args.values)),
                         args.reps)
        parse_config(doc, Path(args.config).parent)
    except (ConfigError, ValueError, OSError) as exc:
        return _fail(str(exc))
    out = args.out or f"runs/sweep-{spec.axis.value}"
    rows = run_sweep(doc, spec, out, base=Path(args.config).parent, threads=args.threads,
                     parallel=args.parallel)
    print(format_summary(summarize(rows), spec.axis))
    print(f"summary written to {Path(out) / 'summary.csv'}")
    return OK if all(r.solved for r in rows) else UNSOLVED


def cmd_render(args) -> int:
    try:
        track = resolve_track(args.track)
        traj_path = Path(args.trajectory)
        scans_path = Path(args.scans) if args.scans else None
        if scans_path is None:
            guess = traj_path.with_name(traj_path.name.replace(".trajectory.csv", ".scans.csv"))
            scans_path = guess if guess.exists() and guess != traj_path else None
        traj = read_trajectory(traj_path, scans_path)
    except (TrackError, ValueError, OSError, KeyError) as exc:
        return _fail(str(exc))
    out = Path(args.out or traj_path.parent)
    out.mkdir(parents=True, exist_ok=True)
    stem = traj_path.name.replace(".trajectory.csv", "").replace(".csv", "")
    scans = traj.scans if traj.scans.size else None
    (out / f"{stem}.track.svg").write_text(track_svg(
        track, traj.states, scans, fov=math.radians(args.fov_deg), scan_every=args.scan_every))
    (out / f"{stem}.steering.svg").write_text(steering_svg(traj.states, f"{track.name}: steering"))
    print(f"wrote {out / (stem + '.track.svg')} and {out / (stem + '.steering.svg')}")
    return OK


def cmd_gen_track(args) -> int:
    try:
        diff = Difficulty(legs=(args.legs_min, args.legs_max), obstacle_density=args.obstacle_density,
                          width=(args.width_min, args.width_max))
        track = generate_random_track(args.seed if args.seed is not None else 0, diff)
    except (TrackError, ValueError) as exc:
        return _fail(str(exc))
    text = dumps_track(track)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed override")
    common.add_argument("--out", default=None, help="output file or directory")
    common.add_argument("--threads", type=int, default=1, help="fitness evaluation threads")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="symnav", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"symnav {__version__} ({_backend.name} core)")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", parents=[common], help="evolve a steering network")
    t.add_argument("config")
    t.add_argument("--no-checkpoints", action="store_true")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", parents=[common], help="drive tracks with a trained chromosome")
    e.add_argument("chromosome")
    e.add_argument("tracks", nargs="+", help="bundled track names or track files")
    e.add_argument("--config", default=None)
    e.add_argument("--sensor", choices=[k.value for k in SensorKind], default=None)
    e.add_argument("--beams", type=int, default=None)
    e.add_argument("--max-ticks", type=int, default=None)
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", parents=[common], help="train across one experiment axis")
    s.add_argument("config")
    s.add_argument("--axis", required=True, choices=[a.value for a in Axis])
    s.add_argument("--values", required=True, help="comma-separated axis values")
    s.add_argument("--reps", type=int, default=1, help="seeds per value")
    s.add_argument("--parallel", type=int, default=1, help="concurrent training runs")
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("render", parents=[common], help="SVG of a recorded trajectory")
    r.add_argument("trajectory")
    r.add_argument("track")
    r.add_argument("--scans", default=None)
    r.add_argument("--scan-every", type=int, default=0)
    r.add_argument("--fov-deg", type=float, default=180.0)
    r.set_defaults(func=cmd_render)

    g = sub.add_parser("gen-track", parents=[common], help="write a random rectilinear track")
    g.add_argument("--legs-min", type=int, default=3)
    g.add_argument("--legs-max", type=int, default=5)
    g.add_argument("--width-min", type=float, default=90.0)
    g.add_argument("--width-max", type=float, default=120.0)
    g.add_argument("--obstacle-density", type=float, default=0.5)
    g.set_defaults(func=cmd_gen_track)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
