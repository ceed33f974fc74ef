import numpy as np
import pytest

from symnav.evolution import (
    EvaluationError,
    EvolutionConfig,
    Individual,
    MutationMode,
    Selection,
    crossover,
    crossover_at,
    crossover_site,
    evaluate,
    evolve,
    generations_to_solve,
    init_population,
    mutate,
    next_generation,
    roulette_pick,
    roulette_probs,
)
from symnav.network import Chromosome, NetworkSpec, genome_length

SPEC = NetworkSpec((4, 4, 2), symmetric=False)  # 24 genes
SYM = NetworkSpec((6, 6, 2))


def small(**kw):
    base = dict(population_size=40, selection_group=10, max_generations=10, master_seed=3)
    base.update(kw)
    return EvolutionConfig(**base)


def sphere(chrom, seed):
    return -float(np.sum(chrom.genes ** 2))


def test_config_validation():
    with pytest.raises(ValueError):
        EvolutionConfig(mutation_prob=1.5)
    with pytest.raises(ValueError):
        EvolutionConfig(population_size=7)
    with pytest.raises(ValueError):
        EvolutionConfig(population_size=10, selection_group=10, selection="elitism")
    with pytest.raises(ValueError):
        EvolutionConfig(selection="lottery")


def test_init_population():
    cfg = small(init_weight_range=0.5)
    a = init_population(cfg, SPEC)
    b = init_population(cfg, SPEC)
    assert all(np.array_equal(x.genes, y.genes) for x, y in zip(a, b))
    assert all(np.all(np.abs(x.genes) <= 0.5) for x in a)
    c = init_population(small(master_seed=4), SPEC)
    assert any(not np.array_equal(x.genes, y.genes) for x, y in zip(a, c))


def test_crossover_site_from_fraction():
    rng = np.random.default_rng(0)
    assert crossover_site(24, EvolutionConfig(crossover_site_std=0.0), rng) == 23
    assert crossover_site(24, EvolutionConfig(crossover_site_mean=3.0, crossover_site_std=0.0), rng) == 24
    assert crossover_site(24, EvolutionConfig(crossover_site_mean=-1.0, crossover_site_std=0.0), rng) == 0


def test_crossover_exchanges_tail():
    a, b = np.arange(24.0), -np.arange(24.0) - 1
    ca, cb = crossover_at(a, b, 23)
    assert np.array_equal(ca[:23], a[:23]) and ca[23] == b[23]
    assert np.array_equal(cb[:23], b[:23]) and cb[23] == a[23]
    same = crossover_at(a, b, 24)
    assert np.array_equal(same[0], a) and np.array_equal(same[1], b)
    swapped = crossover_at(a, b, 0)
    assert np.array_equal(swapped[0], b) and np.array_equal(swapped[1], a)


def test_crossover_probability_zero_copies_parents():
    a, b = np.zeros(8), np.ones(8)
    ca, cb = crossover(a, b, np.random.default_rng(1), EvolutionConfig(crossover_prob=0.0))
    assert np.array_equal(ca, a) and np.array_equal(cb, b)


def test_mutation_probability_bounds():
    g = np.linspace(-1, 1, 24)
    rng = np.random.default_rng(5)
    assert np.array_equal(mutate(g, EvolutionConfig(mutation_prob=0.0), rng), g)
    for _ in range(50):
        m = mutate(g, EvolutionConfig(mutation_prob=1.0), rng)
        assert m.shape == g.shape and np.count_nonzero(m != g) <= 1


def test_mutation_replays_seeded_stream():
    g = np.zeros(24)
    cfg = EvolutionConfig(mutation_prob=1.0, init_weight_range=2.0)
    m = mutate(g, cfg, np.random.default_rng(11))
    rng = np.random.default_rng(11)
    assert rng.random() < 1.0
    idx = int(rng.integers(24))
    val = rng.uniform(-2.0, 2.0)
    expect = g.copy()
    expect[idx] = val
    assert np.array_equal(m, expect)


def test_gene_mode_mutates_about_the_rate():
    cfg = EvolutionConfig(mutation_prob=0.25, mutation_mode=MutationMode.GENE)
    m = mutate(np.full(4000, 9.0), cfg, np.random.default_rng(2))
    assert 850 < np.count_nonzero(m != 9.0) < 1150


def scored(cfg, spec=SPEC, seed=0):
    pop = init_population(cfg, spec, np.random.default_rng(seed))
    for i, ind in enumerate(pop):
        ind.fitness = float(i)
    return pop


@pytest.mark.parametrize("sel", list(Selection))
def test_population_size_and_genome_length_preserved(sel):
    cfg = small(selection=sel)
    for spec in (SPEC, SYM):
        pop = scored(cfg, spec)
        new = next_generation(pop, cfg, np.random.default_rng(0))
        assert len(new) == cfg.population_size
        assert all(len(ind.genes) == genome_length(spec) for ind in new)
        assert all(ind.chromosome.spec == spec for ind in new)


def test_elitism_keeps_best_verbatim():
    cfg = small(selection="elitism")
    pop = scored(cfg)
    new = next_generation(pop, cfg, np.random.default_rng(0))
    best = pop[-1].genes
    assert np.array_equal(new[0].genes, best)
    top = [pop[-1 - k].genes for k in range(10)]
    assert all(np.array_equal(new[k].genes, top[k]) for k in range(10))


def test_tournament_replaces_parents():
    cfg = small(selection="tournament", crossover_site_mean=0.5, crossover_site_std=0.0,
                mutation_prob=1.0)
    pop = scored(cfg)
    new = next_generation(pop, cfg, np.random.default_rng(0))
    assert not any(np.array_equal(ind.genes, pop[-1].genes) for ind in new)
    # the first child carries the best chromosome's head, up to one mutated gene
    assert np.count_nonzero(new[0].genes[:12] != pop[-1].genes[:12]) <= 1


def test_roulette_favours_dominant_individual():
    fit = np.full(100, 0.001 / 99)
    fit[17] = 0.999
    probs = roulette_probs(fit)
    rng = np.random.default_rng(123)
    hits = sum(17 in roulette_pick(probs, rng) for _ in range(1000))
    assert hits >= 950


def test_roulette_handles_all_zero_fitness():
    probs = roulette_probs(np.zeros(10))
    assert np.allclose(probs, 0.1)


def test_selection_requires_fitness():
    cfg = small()
    pop = init_population(cfg, SPEC)
    with pytest.raises(ValueError):
        next_generation(pop, cfg, np.random.default_rng(0))


def test_constant_evaluator_keeps_best_constant():
    hist = evolve(small(), SPEC, lambda c, s: 3.5)
    assert [h.best_fitness for h in hist] == [3.5] * len(hist)


def test_sphere_improves():
    hist = evolve(small(population_size=60, max_generations=50), SPEC, sphere)
    assert len(hist) == 50
    assert hist[-1].best_fitness > hist[0].best_fitness
    assert max(h.best_fitness for h in hist[1:]) > hist[0].best_fitness


def test_elitism_best_is_monotone():
    hist = evolve(small(selection="elitism", max_generations=30), SPEC, sphere)
    best = [h.best_fitness for h in hist]
    assert all(b >= a for a, b in zip(best, best[1:]))


def test_evolve_is_deterministic_across_threads():
    def noisy(chrom, seed):
        return float(np.random.default_rng(seed).normal()) - float(np.sum(chrom.genes ** 2))

    a = evolve(small(), SPEC, noisy, threads=1)
    b = evolve(small(), SPEC, noisy, threads=3)
    assert [h.csv_row() for h in a] == [h.csv_row() for h in b]
    assert all(x.best_individual == y.best_individual for x, y in zip(a, b))


def test_stop_on_solve_and_generations_to_solve():
    def solver(chrom, seed):
        f = -float(np.sum(chrom.genes ** 2))
        return f, f > -3.0

    hist = evolve(small(max_generations=40), SPEC, solver)
    g = generations_to_solve(hist)
    assert g is not None and g == len(hist) - 1 and hist[-1].solved
    assert hist[-1].winner is not None
    never = evolve(small(max_generations=3), SPEC, lambda c, s: (1.0, False))
    assert generations_to_solve(never) is None and len(never) == 3


def test_target_fitness_stops_early():
    hist = evolve(small(target_fitness=-1e9), SPEC, sphere)
    assert len(hist) == 1


def test_evaluator_errors_are_wrapped():
    def bad(chrom, seed):
        raise RuntimeError("boom")

    with pytest.raises(EvaluationError, match="generation 0"):
        evolve(small(), SPEC, bad)
    with pytest.raises(EvaluationError):
        evolve(small(), SPEC, lambda c, s: float("nan"))


def test_eval_seeds_are_assigned_per_individual():
    pop = [Individual(Chromosome(np.zeros(24), SPEC)) for _ in range(6)]
    seen = []
    evaluate(pop, lambda c, s: seen.append(s) or 0.0, generation=2, master_seed=9)
    assert len(set(seen)) == 6
    assert [ind.eval_seed for ind in pop] == seen
