"""Self-balancing adaptive differential evolution over phase genomes.

Four mutation strategies compete through roulette selection. Per-strategy
selection probabilities (gamma) are relearned every mutation learning
period from counters of offspring that survived (xi) or failed (delta)
greedy selection. Crossover rates are per-member draws from a normal
distribution whose mean is relearned, every crossover learning period,
from the rates of surviving offspring.

All random draws happen on the orchestration thread from a single seeded
generator, so a run is bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EvaluationError, ShapeError
from .qubit import phase_of

# Roulette bin -> mutation strategy, in the training loop's order. The bins
# correspond to gamma 1..4; flip this tuple to explore other orderings.
ROULETTE_STRATEGIES = ("rand/1", "best/1", "current-to-best/1", "current-to-rand/1")

GAMMA_FLOOR = 0.01
GAMMA_CEIL = 0.97


@dataclass
class OptimizerConfig:
    population_size: int = 15
    max_generations: int = 250
    cr_mean: float = 0.5
    cr_sigma: float = 0.1
    f_mean: float = 0.5
    f_sigma: float = 0.3
    mutation_learning_period: int = 10
    crossover_learning_period: int = 10
    rng_seed: int = 0
    # Generations without validation improvement before stopping; None runs
    # all max_generations.
    patience: int | None = 50

    def __post_init__(self):
        if self.population_size < 5:
            raise ConfigError(
                f"population_size must be >= 5 so four distinct partner indices "
                f"besides the target exist, got {self.population_size}")
        if self.max_generations < 0:
            raise ConfigError("max_generations must be >= 0")
        if self.mutation_learning_period < 1 or self.crossover_learning_period < 1:
            raise ConfigError("learning periods must be >= 1")
        if self.cr_sigma <= 0 or self.f_sigma <= 0:
            raise ConfigError("cr_sigma and f_sigma must be > 0")
        if self.patience is not None and self.patience < 1:
            raise ConfigError("patience must be >= 1 or None")


@dataclass
class StrategyStats:
    """Roulette probabilities plus per-strategy survive/fail counters."""

    gamma: np.ndarray = field(default_factory=lambda: np.full(4, 0.25))
    success: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=int))
    failure: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=int))


@dataclass
class Population:
    """Optimizer state: genomes with their fitnesses and control parameters."""

    genomes: np.ndarray    # (N, D)
    fitness: np.ndarray    # (N,)
    cr_values: np.ndarray  # (N,) in [0, 1]
    f_values: np.ndarray   # (N,) in (0, 2]

    @property
    def best_index(self) -> int:
        # argmin breaks ties toward the lowest index.
        return int(np.argmin(self.fitness))


@dataclass
class GenerationRecord:
    generation: int
    best_rmse: float
    mean_rmse: float
    gammas: tuple[float, float, float, float]
    cr_mean: float
    successes: int = 0
    failures: int = 0
    val_rmse: float | None = None


@dataclass
class TrainResult:
    best_genome: np.ndarray
    best_fitness: float
    history: list[GenerationRecord]
    generations_run: int
    stopped_early: bool
    population: Population
    # Snapshot of the genome with the lowest validation score seen, when a
    # validation function was supplied; None otherwise.
    val_best_genome: np.ndarray | None = None
    val_best_fitness: float | None = None


def qubit_init_phase(rd: float) -> float:
    """One initial gene from a uniform draw rd in [0, 1].

    The amplitudes alpha = sqrt(rd), beta = sqrt(1 - rd) satisfy
    alpha^2 + beta^2 = 1; the gene is the phase of alpha + i*beta scaled
    by pi/2, landing in [0, pi^2/4].
    """
    alpha = math.sqrt(rd)
    beta = math.sqrt(1.0 - rd)
    return phase_of(complex(alpha, beta)) * (math.pi / 2)


def init_genome(length: int, rng: np.random.Generator) -> np.ndarray:
    """Random genome of `length` phases drawn by the amplitude procedure."""
    if length < 1:
        raise ConfigError(f"genome length must be >= 1, got {length}")
    rd = rng.random(length)
    return np.arctan2(np.sqrt(1.0 - rd), np.sqrt(rd)) * (np.pi / 2)


def draw_distinct_indices(rng: np.random.Generator, n_pop: int, target: int,
                          count: int = 4) -> tuple[int, ...]:
    """count indices in [0, n_pop), mutually distinct and != target."""
    if n_pop <= count:
        raise ConfigError(
            f"population of {n_pop} cannot supply {count} distinct partners")
    chosen: list[int] = []
    while len(chosen) < count:
        r = int(rng.integers(n_pop))
        if r != target and r not in chosen:
            chosen.append(r)
    return tuple(chosen)


def mutate(genomes: np.ndarray, best_index: int, target_index: int,
           strategy: str, mu: float, kappa: float,
           indices: tuple[int, int, int]) -> np.ndarray:
    """Componentwise mutant for one target under the named strategy.

    indices are the pre-drawn distinct partners (r1, r2, r3). Resulting
    phases are not clamped: the gate trigonometry is periodic.
    """
    r1, r2, r3 = indices
    x = genomes
    i = target_index
    if strategy == "best/1":
        return x[best_index] + mu * (x[r1] - x[r2])
    if strategy == "current-to-best/1":
        return x[i] + mu * (x[best_index] - x[i]) + mu * (x[r1] - x[r2])
    if strategy == "current-to-rand/1":
        return x[i] + kappa * (x[r1] - x[i]) + mu * (x[r2] - x[r3])
    if strategy == "rand/1":
        return x[r3] + mu * (x[r1] - x[r2])
    raise ConfigError(f"unknown mutation strategy {strategy!r}")


def select_strategy(gamma: np.ndarray, msp: float) -> int:
    """Roulette bin (0..3) for a selection probability draw msp in [0, 1]."""
    if msp <= gamma[0]:
        return 0
    if msp <= gamma[0] + gamma[1]:
        return 1
    if msp <= gamma[0] + gamma[1] + gamma[2]:
        return 2
    return 3


def crossover(target: np.ndarray, mutant: np.ndarray, cr: float,
              rng: np.random.Generator) -> np.ndarray:
    """Uniform gene-level crossover.

    Each gene takes the mutant's value when its uniform draw is <= cr; one
    uniformly chosen index always takes the mutant gene so the offspring
    differs from the target even at cr = 0.
    """
    if target.shape != mutant.shape:
        raise ShapeError(
            f"target and mutant lengths differ: {target.shape} vs {mutant.shape}")
    d = target.shape[0]
    k_rand = int(rng.integers(d))
    mask = rng.random(d) <= cr
    mask[k_rand] = True
    return np.where(mask, mutant, target)


def select_survivor(offspring_fitness: float, target_fitness: float) -> bool:
    """Greedy selection: keep the offspring iff its fitness is <= the target's."""
    return offspring_fitness <= target_fitness


def update_gammas(stats: StrategyStats) -> StrategyStats:
    """Relearn roulette probabilities from the survive/fail counters.

    The literal update mixes cubic and quadratic counter terms and does not
    normalize in general, so each probability is clamped to
    [GAMMA_FLOOR, GAMMA_CEIL] (no strategy starves, none monopolizes) and
    the vector renormalized to sum 1. A degenerate denominator (all
    counters zero, or no survivors at all) resets to uniform. Counters are
    reset for the next learning period.
    """
    xi = stats.success.astype(float)
    dl = stats.failure.astype(float)
    z = (2.0 * (xi[1] * xi[2] * xi[3] + xi[0] * xi[2] * xi[3]
                + xi[0] * xi[2] * xi[1] + xi[1] * xi[2] * xi[3])
         + dl[0] * (xi[1] + xi[2] + xi[3])
         + dl[1] * (xi[0] + xi[2] + xi[3])
         + dl[2] * (xi[0] + xi[1] + xi[3])
         + dl[3] * (xi[0] + xi[2] + xi[1]))
    if z == 0.0:
        gamma = np.full(4, 0.25)
    else:
        g1 = xi[0] * (xi[1] + dl[1] + xi[2] + dl[2] + xi[3] + dl[3]) / z
        g2 = xi[1] * (xi[0] + dl[0] + xi[2] + dl[2] + xi[3] + dl[3]) / z
        g3 = xi[2] * (xi[0] + dl[0] + xi[1] + dl[1] + xi[3] + dl[3]) / z
        g4 = 1.0 - (g1 + g2 + g3)
        gamma = np.clip([g1, g2, g3, g4], GAMMA_FLOOR, GAMMA_CEIL)
        gamma = gamma / gamma.sum()
    return StrategyStats(gamma=gamma)


def truncated_normal(rng: np.random.Generator, mean: float, sigma: float,
                     low: float, high: float, size: int,
                     low_open: bool = False) -> np.ndarray:
    """Normal draws redrawn (not clipped) until all land in the interval."""
    vals = rng.normal(mean, sigma, size)
    while True:
        bad = (vals < low) | (vals > high)
        if low_open:
            bad |= vals == low
        n_bad = int(bad.sum())
        if n_bad == 0:
            return vals
        vals[bad] = rng.normal(mean, sigma, n_bad)


def update_cr(rng: np.random.Generator, n: int, cr_mean: float, cr_sigma: float,
              successful_crs: list[float]) -> tuple[float, np.ndarray]:
    """New crossover-rate mean and per-member rates.

    The mean moves to the average of the rates whose offspring survived
    during the period (unchanged when there were none); sigma is held
    constant to keep rate diversity. Rates are redrawn truncated to [0, 1].
    """
    if successful_crs:
        cr_mean = float(np.mean(successful_crs))
    return cr_mean, truncated_normal(rng, cr_mean, cr_sigma, 0.0, 1.0, n)


def _evaluate(fitness_fn, genomes: np.ndarray) -> np.ndarray:
    out = np.empty(len(genomes))
    for i, g in enumerate(genomes):
        v = float(fitness_fn(g))
        if math.isnan(v):
            raise EvaluationError(f"fitness function returned NaN for genome index {i}")
        out[i] = v
    return out


def train(genome_length: int, config: OptimizerConfig, fitness_fn,
          validation_fn=None) -> TrainResult:
    """Evolve genomes of the given length against fitness_fn (lower is better).

    fitness_fn maps a genome vector to a finite non-negative score and is
    evaluated on training data only; validation_fn, when given, is evaluated
    on the generation's best genome and drives early stopping after
    config.patience generations without improvement.

    Returns the best genome plus a per-generation history (best/mean
    fitness, gamma trajectory, crossover-rate mean, survive/fail totals).
    """
    cfg = config
    rng = np.random.default_rng(cfg.rng_seed)
    n, d = cfg.population_size, genome_length

    genomes = np.stack([init_genome(d, rng) for _ in range(n)])
    fitness = _evaluate(fitness_fn, genomes)
    cr_mean = cfg.cr_mean
    pop = Population(
        genomes=genomes,
        fitness=fitness,
        cr_values=truncated_normal(rng, cr_mean, cfg.cr_sigma, 0.0, 1.0, n),
        f_values=truncated_normal(rng, cfg.f_mean, cfg.f_sigma, 0.0, 2.0, n,
                                  low_open=True),
    )
    stats = StrategyStats()
    successful_crs: list[float] = []

    def record(gen, successes=0, failures=0, val=None):
        return GenerationRecord(
            generation=gen,
            best_rmse=float(pop.fitness.min()),
            mean_rmse=float(pop.fitness.mean()),
            gammas=tuple(float(g) for g in stats.gamma),
            cr_mean=cr_mean,
            successes=successes,
            failures=failures,
            val_rmse=val,
        )

    best_val = math.inf
    val_best_genome = None
    stall = 0
    stopped_early = False
    history = [record(0)]
    gen = 0

    if validation_fn is not None:
        best_val = float(validation_fn(pop.genomes[pop.best_index]))
        val_best_genome = pop.genomes[pop.best_index].copy()

    for gen in range(1, cfg.max_generations + 1):
        # Fresh mutation-rate draws each generation.
        pop.f_values = truncated_normal(rng, cfg.f_mean, cfg.f_sigma, 0.0, 2.0,
                                        n, low_open=True)
        msp = rng.random(n)
        best_idx = pop.best_index

        offspring = np.empty_like(pop.genomes)
        bins = np.empty(n, dtype=int)
        for i in range(n):
            partners = draw_distinct_indices(rng, n, i, 4)
            kappa = rng.random()
            bins[i] = select_strategy(stats.gamma, msp[i])
            mutant = mutate(pop.genomes, best_idx, i,
                            ROULETTE_STRATEGIES[bins[i]], pop.f_values[i],
                            kappa, partners[:3])
            offspring[i] = crossover(pop.genomes[i], mutant, pop.cr_values[i], rng)

        off_fitness = _evaluate(fitness_fn, offspring)

        successes = failures = 0
        for i in range(n):
            if select_survivor(off_fitness[i], pop.fitness[i]):
                pop.genomes[i] = offspring[i]
                pop.fitness[i] = off_fitness[i]
                stats.success[bins[i]] += 1
                successful_crs.append(float(pop.cr_values[i]))
                successes += 1
            else:
                stats.failure[bins[i]] += 1
                failures += 1

        if gen % cfg.mutation_learning_period == 0:
            stats = update_gammas(stats)
        if gen % cfg.crossover_learning_period == 0:
            cr_mean, pop.cr_values = update_cr(rng, n, cr_mean, cfg.cr_sigma,
                                               successful_crs)
            successful_crs = []

        val = None
        if validation_fn is not None:
            val = float(validation_fn(pop.genomes[pop.best_index]))
            if math.isnan(val):
                raise EvaluationError(
                    f"validation function returned NaN for genome index {pop.best_index}")
            if val < best_val:
                best_val = val
                val_best_genome = pop.genomes[pop.best_index].copy()
                stall = 0
            else:
                stall += 1
        history.append(record(gen, successes, failures, val))

        if (validation_fn is not None and cfg.patience is not None
                and stall >= cfg.patience):
            stopped_early = True
            break

    best = pop.best_index
    return TrainResult(
        best_genome=pop.genomes[best].copy(),
        best_fitness=float(pop.fitness[best]),
        history=history,
        generations_run=gen,
        stopped_early=stopped_early,
        population=pop,
        val_best_genome=val_best_genome,
        val_best_fitness=None if val_best_genome is None else best_val,
    )
