"""Genetic algorithm over chromosome gene vectors.

All selection, crossover and mutation draws come from one master
``numpy.random.Generator`` seeded with ``master_seed``. Fitness evaluations
get their own per-individual seeds, so results do not depend on how many
workers evaluate a generation.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .network import Chromosome, NetworkSpec, genome_length

log = logging.getLogger(__name__)

ROULETTE_FLOOR = 1e-9


class Selection(str, Enum):
    TOURNAMENT = "tournament"
    ELITISM = "elitism"
    ROULETTE = "roulette"


class MutationMode(str, Enum):
    CHROMOSOME = "chromosome"
    GENE = "gene"


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 200
    mutation_prob: float = 0.1
    crossover_prob: float = 1.0
    crossover_site_mean: float = 0.95
    crossover_site_std: float = 0.05
    selection: Selection = Selection.TOURNAMENT
    selection_group: int = 10
    init_weight_range: float = 1.0
    max_generations: int = 50
    target_fitness: Optional[float] = None
    master_seed: int = 0
    mutation_mode: MutationMode = MutationMode.CHROMOSOME
    stop_on_solve: bool = True

    def __post_init__(self):
        object.__setattr__(self, "selection", Selection(self.selection))
        object.__setattr__(self, "mutation_mode", MutationMode(self.mutation_mode))
        for name in ("mutation_prob", "crossover_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population_size must be even and >= 2")
        if not 1 <= self.selection_group <= self.population_size:
            raise ValueError("selection_group must lie in [1, population_size]")
        if self.selection is Selection.ELITISM and 2 * self.selection_group > self.population_size:
            raise ValueError("elitism needs population_size >= 2 * selection_group")
        if self.init_weight_range <= 0:
            raise ValueError("init_weight_range must be positive")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")


@dataclass
class Individual:
    chromosome: Chromosome
    fitness: Optional[float] = None
    solved: bool = False
    eval_seed: int = 0

    @property
    def genes(self) -> np.ndarray:
        return self.chromosome.genes


@dataclass(frozen=True, eq=False)
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_individual: Chromosome
    solved: bool
    winner: Optional[Chromosome] = None
    winner_fitness: Optional[float] = None

    def csv_row(self) -> str:
        return f"{self.generation},{self.best_fitness!r},{self.mean_fitness!r},{int(self.solved)}"


CSV_HEADER = "generation,best_fitness,mean_fitness,solved"

EvalResult = Union[float, tuple, object]
EvaluatorFn = Callable[[Chromosome, int], EvalResult]


class EvaluationError(RuntimeError):
    pass


def eval_seed(master_seed: int, generation: int, index: int) -> int:
    """Per-individual evaluation seed, stable across runs and worker counts."""
    ss = np.random.SeedSequence([master_seed, generation, index])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _random_genes(rng: np.random.Generator, n: int, r: float) -> np.ndarray:
    return rng.uniform(-r, r, size=n)


def init_population(config: EvolutionConfig, spec: NetworkSpec,
                    rng: Optional[np.random.Generator] = None) -> list[Individual]:
    """Uniform genes in [-init_weight_range, init_weight_range]."""
    if rng is None:
        rng = np.random.default_rng(config.master_seed)
    n = genome_length(spec)
    return [Individual(Chromosome(_random_genes(rng, n, config.init_weight_range), spec))
            for _ in range(config.population_size)]


def crossover_site(length: int, config: EvolutionConfig, rng: np.random.Generator) -> int:
    s = rng.normal(config.crossover_site_mean, config.crossover_site_std)
    s = min(1.0, max(0.0, s))
    return int(round(s * length))


def crossover_at(a: np.ndarray, b: np.ndarray, site: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-point exchange of the tails starting at ``site``."""
    ca = np.concatenate([a[:site], b[site:]])
    cb = np.concatenate([b[:site], a[site:]])
    return ca, cb


def crossover(parent_a: np.ndarray, parent_b: np.ndarray, rng: np.random.Generator,
              config: EvolutionConfig = EvolutionConfig()) -> tuple[np.ndarray, np.ndarray]:
    if len(parent_a) != len(parent_b):
        raise ValueError("parents differ in genome length")
    a = np.asarray(parent_a, dtype=float)
    b = np.asarray(parent_b, dtype=float)
    if rng.random() < config.crossover_prob:
        return crossover_at(a, b, crossover_site(len(a), config, rng))
    return a.copy(), b.copy()


def mutate(genes: np.ndarray, config: EvolutionConfig, rng: np.random.Generator) -> np.ndarray:
    """Replace one uniformly chosen gene with a fresh draw, with probability mutation_prob.

    In ``gene`` mode each gene is instead replaced independently with that probability.
    """
    g = np.array(genes, dtype=float)
    r = config.init_weight_range
    if config.mutation_mode is MutationMode.GENE:
        mask = rng.random(g.size) < config.mutation_prob
        g[mask] = rng.uniform(-r, r, size=int(mask.sum()))
        return g
    if rng.random() < config.mutation_prob:
        idx = int(rng.integers(g.size))
        g[idx] = rng.uniform(-r, r)
    return g


def roulette_probs(fitness: Sequence[float]) -> np.ndarray:
    """Selection probabilities proportional to fitness, floored at ROULETTE_FLOOR."""
    fit = np.maximum(np.asarray(fitness, dtype=float), ROULETTE_FLOOR)
    return fit / fit.sum()


def roulette_pick(probs: np.ndarray, rng: np.random.Generator) -> tuple[int, int]:
    """Two parent indices drawn independently (with replacement) by fitness share."""
    i, j = rng.choice(len(probs), size=2, p=probs)
    return int(i), int(j)


def _ranked(population: Sequence[Individual]) -> list[int]:
    fit = np.array([ind.fitness for ind in population], dtype=float)
    return [int(i) for i in np.argsort(-fit, kind="stable")]


def _breed_group(parents: list[np.ndarray], quota: int, config: EvolutionConfig,
                 rng: np.random.Generator) -> list[np.ndarray]:
    """Adjacent pairs (0,1), (2,3), ... wrapping around until ``quota`` children exist."""
    g = len(parents)
    kids: list[np.ndarray] = []
    k = 0
    while len(kids) < quota:
        a = parents[(2 * k) % g]
        b = parents[(2 * k + 1) % g]
        ca, cb = crossover(a, b, rng, config)
        kids.append(mutate(ca, config, rng))
        if len(kids) < quota:
            kids.append(mutate(cb, config, rng))
        k += 1
    return kids


def next_generation(population: Sequence[Individual], config: EvolutionConfig,
                    rng: np.random.Generator) -> list[Individual]:
    if any(ind.fitness is None for ind in population):
        raise ValueError("every individual needs a fitness before selection")
    spec = population[0].chromosome.spec
    n = len(population[0].genes)
    size = config.population_size
    G = config.selection_group
    new: list[np.ndarray] = []

    if config.selection is Selection.ROULETTE:
        probs = roulette_probs([ind.fitness for ind in population])
        for _ in range(size // 2):
            i, j = roulette_pick(probs, rng)
            ca, cb = crossover(population[i].genes, population[j].genes, rng, config)
            new.append(mutate(ca, config, rng))
            new.append(mutate(cb, config, rng))
    else:
        order = _ranked(population)
        parents = [population[i].genes for i in order[:G]]
        if config.selection is Selection.ELITISM:
            new.extend(p.copy() for p in parents)
        new.extend(_breed_group(parents, G, config, rng))
        while len(new) < size:
            new.append(_random_genes(rng, n, config.init_weight_range))

    return [Individual(Chromosome(g, spec)) for g in new]


def _unpack(result) -> tuple[float, bool]:
    if isinstance(result, tuple):
        return float(result[0]), bool(result[1])
    if hasattr(result, "fitness"):
        return float(result.fitness), bool(getattr(result, "solved", False))
    return float(result), False


def evaluate(population: list[Individual], evaluator: EvaluatorFn, generation: int,
             master_seed: int, threads: int = 1) -> None:
    """Fill in fitness in place. Results are independent of ``threads``."""
    for i, ind in enumerate(population):
        ind.eval_seed = eval_seed(master_seed, generation, i)

    def one(i: int):
        ind = population[i]
        try:
            return _unpack(evaluator(ind.chromosome, ind.eval_seed))
        except Exception as exc:
            raise EvaluationError(f"evaluation failed at generation {generation}, individual {i}: {exc}") from exc

    idx = range(len(population))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, idx))
    else:
        results = [one(i) for i in idx]
    for ind, (f, s) in zip(population, results):
        if not np.isfinite(f):
            raise EvaluationError(f"fitness must be finite, got {f}")
        ind.fitness = f
        ind.solved = s


def summarize(population: Sequence[Individual], generation: int) -> GenerationStats:
    fit = np.array([ind.fitness for ind in population], dtype=float)
    best = int(np.argmax(fit))
    winners = [i for i in _ranked(population) if population[i].solved]
    return GenerationStats(
        generation=generation,
        best_fitness=float(fit[best]),
        mean_fitness=float(fit.mean()),
        best_individual=population[best].chromosome,
        solved=bool(winners),
        winner=population[winners[0]].chromosome if winners else None,
        winner_fitness=population[winners[0]].fitness if winners else None,
    )


def evolve(config: EvolutionConfig, spec: NetworkSpec, evaluator: EvaluatorFn,
           threads: int = 1,
           on_generation: Optional[Callable[[GenerationStats], None]] = None) -> list[GenerationStats]:
    """Evaluate, record, breed; stop at max_generations, target fitness or (optionally) a solve."""
    rng = np.random.default_rng(config.master_seed)
    population = init_population(config, spec, rng)
    history: list[GenerationStats] = []
    for gen in range(config.max_generations):
        evaluate(population, evaluator, gen, config.master_seed, threads)
        stats = summarize(population, gen)
        history.append(stats)
        log.debug("gen %d best %.3f mean %.3f solved %s", gen, stats.best_fitness,
                  stats.mean_fitness, stats.solved)
        if on_generation is not None:
            on_generation(stats)
        if stats.solved and config.stop_on_solve:
            break
        if config.target_fitness is not None and stats.best_fitness >= config.target_fitness:
            break
        if gen + 1 < config.max_generations:
            population = next_generation(population, config, rng)
    return history


def generations_to_solve(history: Iterable[GenerationStats]) -> Optional[int]:
    """Index of the first generation holding a winning chromosome."""
    for s in history:
        if s.solved:
            return s.generation
    return None
