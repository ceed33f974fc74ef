"""Neuroevolution of odd-symmetric steering networks for reactive collision avoidance."""

from . import _backend
from .geometry import OrientedRect, Point, Ray, Segment
from .network import Chromosome, NetworkSpec, SymmetricDepth
from .sensors import SensorKind, SensorSpec, make_sensor
from .track import Track, bundled_track, generate_random_track, load_track
from .vehicle import VehicleParams, VehicleState

__version__ = "0.1.0"

BACKEND = _backend.name

__all__ = [
    "Chromosome", "NetworkSpec", "OrientedRect", "Point", "Ray", "Segment",
    "SensorKind", "SensorSpec", "SymmetricDepth", "Track", "VehicleParams",
    "VehicleState", "bundled_track", "generate_random_track", "load_track",
    "make_sensor", "BACKEND", "__version__",
]
