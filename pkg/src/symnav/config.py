"""Experiment configuration files.

Configs use the same JSON-based text format as track files, with angles in
degrees. A run manifest is a resolved config with every track inlined, so it
can be fed back to ``train`` to reproduce a run exactly.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

from .evolution import EvolutionConfig
from .network import NetworkSpec, SymmetricDepth
from .sensors import SensorSpec, make_sensor
from .simulation import DistanceMode, EpisodeConfig
from .track import Difficulty, Track, TrackError, dumps_track, generate_random_track, resolve_track, track_from_dict
from .vehicle import VehicleParams


class ConfigError(ValueError):
    pass


SENSOR_OVERRIDES = ("fov_deg", "max_range", "noise_mean", "noise_std")


@dataclass
class ExperimentConfig:
    """Parsed experiment config. ``raw`` keeps the source document."""

    name: str
    seed: int
    tracks: list[Track]
    vehicle: VehicleParams
    sensor: SensorSpec
    network: NetworkSpec
    evolution: EvolutionConfig
    episode: EpisodeConfig
    output: Optional[str]
    raw: dict = field(repr=False, default_factory=dict)

    def manifest(self, version: str) -> dict:
        """Fully resolved, self-contained description of the run."""
        doc = resolved_document(self)
        return {"artifact": "symnav", "version": version, "seed": self.seed, "config": doc}


def _section(doc: dict, key: str) -> dict:
    v = doc.get(key, {})
    if not isinstance(v, dict):
        raise ConfigError(f"{key} must be an object")
    return v


def _check_keys(block: dict, allowed: set[str], where: str) -> None:
    extra = set(block) - allowed
    if extra:
        raise ConfigError(f"unknown {where} field(s): {', '.join(sorted(extra))}")


def _load_tracks(entries: Any, base: Path) -> list[Track]:
    if isinstance(entries, (str, dict)):
        entries = [entries]
    if not isinstance(entries, list) or not entries:
        raise ConfigError("tracks must be a non-empty list")
    out = []
    for i, e in enumerate(entries):
        try:
            if isinstance(e, str):
                p = Path(e)
                if not p.is_absolute() and (base / p).exists():
                    p = base / p
                out.append(resolve_track(p if p.exists() else e))
            elif isinstance(e, dict) and "generate" in e:
                diff = e.get("difficulty", {})
                kw = {k: tuple(v) if isinstance(v, list) else v for k, v in diff.items()}
                out.append(generate_random_track(int(e["generate"]), Difficulty(**kw)))
            elif isinstance(e, dict):
                out.append(track_from_dict(e))
            else:
                raise ConfigError(f"tracks[{i}]: unsupported entry")
        except (TrackError, KeyError, FileNotFoundError, TypeError) as exc:
            raise ConfigError(f"tracks[{i}]: {exc}") from exc
    return out


def parse_config(doc: dict, base: Path = Path("."), seed: Optional[int] = None) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be an object")
    if "config" in doc and isinstance(doc["config"], dict):  # a run manifest
        doc = doc["config"]
    doc = copy.deepcopy(doc)
    _check_keys(doc, {"name", "seed", "tracks", "vehicle", "sensor", "network", "evolution",
                      "episode", "output"}, "top-level")
    if seed is not None:
        doc["seed"] = seed
    master_seed = int(doc.get("seed", 0))
    tracks = _load_tracks(doc.get("tracks", ["simple"]), base)

    vb = _section(doc, "vehicle")
    _check_keys(vb, {"wheelbase", "body_length", "body_width", "speed", "max_steer_deg",
                     "max_steer_rate_deg"}, "vehicle")
    d = VehicleParams()
    try:
        vehicle = VehicleParams(
            wheelbase=float(vb.get("wheelbase", d.wheelbase)),
            body_length=float(vb.get("body_length", d.body_length)),
            body_width=float(vb.get("body_width", d.body_width)),
            speed=float(vb.get("speed", d.speed)),
            max_steer=math.radians(float(vb.get("max_steer_deg", 35.0))),
            max_steer_rate=math.radians(float(vb.get("max_steer_rate_deg", 5.0))),
        )
    except ValueError as exc:
        raise ConfigError(f"vehicle: {exc}") from exc

    sb = _section(doc, "sensor")
    _check_keys(sb, {"kind", "beams", *SENSOR_OVERRIDES}, "sensor")
    try:
        sensor = make_sensor(
            sb.get("kind", "basic"), int(sb.get("beams", 25)), tracks[0].track_width,
            fov=math.radians(sb["fov_deg"]) if "fov_deg" in sb else None,
            max_range=sb.get("max_range"), noise_mean=sb.get("noise_mean"),
            noise_std=sb.get("noise_std"),
        )
    except ValueError as exc:
        raise ConfigError(f"sensor: {exc}") from exc

    nb = _section(doc, "network")
    _check_keys(nb, {"hidden", "layer_sizes", "symmetric", "symmetric_depth"}, "network")
    if "layer_sizes" in nb:
        sizes = tuple(int(s) for s in nb["layer_sizes"])
    else:
        hidden = nb.get("hidden") or [sensor.beam_count]
        sizes = (sensor.beam_count, *[int(h) for h in hidden], 2)
    try:
        network = NetworkSpec(sizes, bool(nb.get("symmetric", True)),
                              SymmetricDepth(nb.get("symmetric_depth", "all_layers")))
    except ValueError as exc:
        raise ConfigError(f"network: {exc}") from exc
    if network.inputs != sensor.beam_count:
        raise ConfigError(
            f"network expects {network.inputs} inputs but the sensor has {sensor.beam_count} beams"
        )

    eb = _section(doc, "evolution")
    allowed = {f.name for f in fields(EvolutionConfig)} - {"master_seed"}
    _check_keys(eb, allowed, "evolution")
    try:
        evolution = EvolutionConfig(**eb, master_seed=master_seed)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"evolution: {exc}") from exc

    pb = _section(doc, "episode")
    _check_keys(pb, {"max_ticks", "distance"}, "episode")
    try:
        episode = EpisodeConfig(max_ticks=int(pb.get("max_ticks", 2000)),
                                distance=DistanceMode(pb.get("distance", "euclidean")))
    except ValueError as exc:
        raise ConfigError(f"episode: {exc}") from exc

    return ExperimentConfig(
        name=str(doc.get("name", "experiment")), seed=master_seed, tracks=tracks,
        vehicle=vehicle, sensor=sensor, network=network, evolution=evolution,
        episode=episode, output=doc.get("output"), raw=doc,
    )


def load_config(path: str | Path, seed: Optional[int] = None) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed config: {exc}") from exc
    return parse_config(doc, path.parent, seed)


def _r(x: float) -> float:
    return round(x, 12)


def resolved_document(cfg: ExperimentConfig) -> dict:
    """Config document with every default filled in and tracks inlined."""
    evo = asdict(cfg.evolution)
    evo.pop("master_seed")
    evo["selection"] = cfg.evolution.selection.value
    evo["mutation_mode"] = cfg.evolution.mutation_mode.value
    s = cfg.sensor
    return {
        "name": cfg.name,
        "seed": cfg.seed,
        "tracks": [json.loads(dumps_track(t)) for t in cfg.tracks],
        "vehicle": {
            "wheelbase": cfg.vehicle.wheelbase,
            "body_length": cfg.vehicle.body_length,
            "body_width": cfg.vehicle.body_width,
            "speed": cfg.vehicle.speed,
            "max_steer_deg": _r(math.degrees(cfg.vehicle.max_steer)),
            "max_steer_rate_deg": _r(math.degrees(cfg.vehicle.max_steer_rate)),
        },
        "sensor": {
            "kind": s.kind.value, "beams": s.beam_count, "fov_deg": _r(math.degrees(s.fov)),
            "max_range": s.max_range, "noise_mean": s.noise_mean, "noise_std": s.noise_std,
        },
        "network": {
            "layer_sizes": list(cfg.network.layer_sizes),
            "symmetric": cfg.network.symmetric,
            "symmetric_depth": cfg.network.symmetric_depth.value,
        },
        "evolution": evo,
        "episode": {"max_ticks": cfg.episode.max_ticks, "distance": cfg.episode.distance.value},
    }


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def with_override(doc: dict, block: str, **values) -> dict:
    """Copy of a config document with keys in one block replaced."""
    out = copy.deepcopy(doc)
    if "config" in out and isinstance(out["config"], dict):
        out = out["config"]
    b = dict(out.get(block, {}))
    b.update(values)
    out[block] = b
    return out
