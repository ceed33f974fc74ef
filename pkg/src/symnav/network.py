"""Bias-free feed-forward networks with an odd activation and their chromosome codec.

In a *symmetric* network every constrained neuron has an odd-symmetric weight
row, ``w[k] == -w[fan_in-1-k]``, so only the first ``fan_in // 2`` weights are
stored in the chromosome. Reversing the input vector then negates every output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np


class SymmetricDepth(str, Enum):
    FIRST_LAYER_ONLY = "first_layer_only"
    ALL_LAYERS = "all_layers"


@dataclass(frozen=True)
class NetworkSpec:
    layer_sizes: tuple[int, ...]
    symmetric: bool = True
    symmetric_depth: SymmetricDepth = SymmetricDepth.ALL_LAYERS

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "symmetric_depth", SymmetricDepth(self.symmetric_depth))
        if len(sizes) < 3:
            raise ValueError("need an input layer, at least one hidden layer and an output layer")
        if sizes[-1] != 2:
            raise ValueError(f"output layer must have 2 neurons, got {sizes[-1]}")
        if any(s < 1 for s in sizes):
            raise ValueError("layer sizes must be positive")

    @classmethod
    def default(cls, inputs: int, symmetric: bool = True, **kw) -> "NetworkSpec":
        return cls((inputs, inputs, 2), symmetric, **kw)

    @property
    def inputs(self) -> int:
        return self.layer_sizes[0]

    def constrained(self) -> tuple[bool, ...]:
        """Per weight layer, whether its neurons carry the odd-symmetry constraint."""
        n = len(self.layer_sizes) - 1
        if not self.symmetric:
            return (False,) * n
        if self.symmetric_depth is SymmetricDepth.FIRST_LAYER_ONLY:
            return (True,) + (False,) * (n - 1)
        return (True,) * n


def activation(x):
    """sigmoid(x) - 0.5, evaluated so that activation(-x) == -activation(x) exactly."""
    if isinstance(x, np.ndarray):
        a = np.abs(x)
        return np.copysign(1.0 / (1.0 + np.exp(-a)) - 0.5, x)
    a = abs(x)
    return math.copysign(1.0 / (1.0 + math.exp(-a)) - 0.5, x)


def genome_length(spec: NetworkSpec) -> int:
    total = 0
    for fan_in, fan_out, con in zip(spec.layer_sizes[:-1], spec.layer_sizes[1:], spec.constrained()):
        total += fan_out * (fan_in // 2 if con else fan_in)
    return total


@dataclass(frozen=True, eq=False)
class Chromosome:
    genes: np.ndarray
    spec: NetworkSpec

    def __post_init__(self):
        g = np.array(self.genes, dtype=np.float64)
        if g.ndim != 1:
            raise ValueError("genes must be a flat vector")
        if g.size != genome_length(self.spec):
            raise ValueError(
                f"chromosome has {g.size} genes, network {self.spec.layer_sizes} needs "
                f"{genome_length(self.spec)}"
            )
        if not np.all(np.isfinite(g)):
            raise ValueError("genes must be finite")
        g.setflags(write=False)
        object.__setattr__(self, "genes", g)

    def __eq__(self, other):
        if not isinstance(other, Chromosome):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.genes, other.genes)


@dataclass(frozen=True, eq=False)
class WeightMatrices:
    """Full (fan_out, fan_in) matrix per layer plus the constraint flags."""

    matrices: tuple[np.ndarray, ...]
    constrained: tuple[bool, ...]

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.matrices[0].shape[1],) + tuple(m.shape[0] for m in self.matrices)

    def flat(self) -> np.ndarray:
        return np.concatenate([m.ravel() for m in self.matrices])


def decode(chrom: Chromosome) -> WeightMatrices:
    """Fill each neuron's incoming row in gene order, mirroring constrained rows."""
    spec = chrom.spec
    genes = chrom.genes
    pos = 0
    mats = []
    for fan_in, fan_out, con in zip(spec.layer_sizes[:-1], spec.layer_sizes[1:], spec.constrained()):
        if con:
            h = fan_in // 2
            free = genes[pos:pos + fan_out * h].reshape(fan_out, h)
            pos += fan_out * h
            W = np.zeros((fan_out, fan_in))
            W[:, :h] = free
            W[:, fan_in - h:] = -free[:, ::-1]
        else:
            W = genes[pos:pos + fan_out * fan_in].reshape(fan_out, fan_in).copy()
            pos += fan_out * fan_in
        W.setflags(write=False)
        mats.append(W)
    return WeightMatrices(tuple(mats), spec.constrained())


def encode(weights: WeightMatrices) -> np.ndarray:
    """Read the free genes back out of decoded matrices."""
    parts = []
    for W, con in zip(weights.matrices, weights.constrained):
        parts.append((W[:, : W.shape[1] // 2] if con else W).ravel())
    return np.concatenate(parts)


def forward(weights: WeightMatrices, inputs: Sequence[float]) -> tuple[float, float]:
    """Dense pass with the odd activation at every hidden and output neuron.

    Constrained layers are evaluated in the paired form
    ``sum_k w[k] * (x[k] - x[n-1-k])`` which is exactly antisymmetric
    under input reversal.
    """
    x = np.asarray(inputs, dtype=np.float64)
    if x.shape != (weights.layer_sizes[0],):
        raise ValueError(
            f"network expects {weights.layer_sizes[0]} inputs, got {x.shape[0] if x.ndim else 0}"
        )
    for W, con in zip(weights.matrices, weights.constrained):
        if con:
            h = W.shape[1] // 2
            x = activation(W[:, :h] @ (x[:h] - x[::-1][:h]))
        else:
            x = activation(W @ x)
    return float(x[0]), float(x[1])


def steering_command(out_left: float, out_right: float, max_steer: float) -> float:
    """Output difference scaled to +/-max_steer; positive turns left."""
    cmd = (out_left - out_right) * max_steer / 0.5
    if cmd > max_steer:
        return max_steer
    if cmd < -max_steer:
        return -max_steer
    return cmd


# --- chromosome files --------------------------------------------------------

def dumps_chromosome(chrom: Chromosome) -> str:
    spec = chrom.spec
    head = " ".join(str(s) for s in spec.layer_sizes)
    if spec.symmetric:
        head += f" symmetric {spec.symmetric_depth.value}"
    else:
        head += " unconstrained"
    return head + "\n" + " ".join(repr(float(g)) for g in chrom.genes) + "\n"


def loads_chromosome(text: str) -> Chromosome:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty chromosome file")
    head = lines[0].split()
    sizes = []
    while head and head[0].lstrip("-").isdigit():
        sizes.append(int(head.pop(0)))
    if not head or head[0] not in ("symmetric", "unconstrained"):
        raise ValueError(f"bad chromosome header: {lines[0]!r}")
    symmetric = head[0] == "symmetric"
    depth = SymmetricDepth(head[1]) if symmetric and len(head) > 1 else SymmetricDepth.ALL_LAYERS
    genes = [float(t) for t in lines[1].split()] if len(lines) > 1 else []
    return Chromosome(np.array(genes), NetworkSpec(tuple(sizes), symmetric, depth))


def save_chromosome(chrom: Chromosome, path: str | Path) -> None:
    Path(path).write_text(dumps_chromosome(chrom))


def read_chromosome(path: str | Path) -> Chromosome:
    return loads_chromosome(Path(path).read_text())
