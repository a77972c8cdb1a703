"""Genetic-algorithm calibration of price-expectation parameters.

A bounded real-valued genome encodes the linear price curve(s) (and for
the long-horizon layout the belief noise and nuclear subsidy); fitness
is the mean absolute electricity-mix error against a target trajectory.
The GA logs every generation to disk as soon as it is evaluated so an
interrupted run leaves complete records behind.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .engine import OBJECTIVE_TYPES, init_world, run
from .ingest import InputError

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Mix error objectives


def mix_error_validation(simulated: dict[str, float], target: dict[str, float],
                         types=OBJECTIVE_TYPES) -> float:
    """Mean absolute share error over the generation-type set."""
    for t in types:
        if t not in simulated:
            raise InputError(f"simulated mix missing type '{t}'")
        if t not in target:
            raise InputError(f"target mix missing type '{t}'")
    return sum(abs(target[t] - simulated[t]) for t in types) / len(types)


def mix_error_longterm(simulated: dict[int, dict[str, float]],
                       target: dict[int, dict[str, float]],
                       types=OBJECTIVE_TYPES) -> float:
    """Sum over years of the per-year mix error."""
    if set(simulated) != set(target):
        raise InputError(
            f"simulated years {sorted(simulated)} != target years {sorted(target)}")
    return sum(mix_error_validation(simulated[y], target[y], types) for y in sorted(simulated))


# ---------------------------------------------------------------------------
# Genome layouts


@dataclass(frozen=True)
class GenomeLayout:
    """Names and bounds of each gene plus how a genome maps onto the
    scenario fields it overrides."""

    kind: str  # "validation" | "longterm"
    gene_names: tuple[str, ...]
    bounds: tuple[tuple[float, float], ...]
    curve_years: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.gene_names)

    def decode(self, genome) -> dict:
        """Scenario field overrides encoded by a genome."""
        genome = np.asarray(genome, dtype=float)
        if len(genome) != len(self):
            raise InputError(f"genome length {len(genome)} != layout length {len(self)}")
        if self.kind == "validation":
            return {"price_curve": (float(genome[0]), float(genome[1])),
                    "price_curve_by_year": {}}
        n = len(self.curve_years)
        curves = {
            year: (float(genome[i]), float(genome[n + i]))
            for i, year in enumerate(self.curve_years)
        }
        return {
            "price_curve_by_year": curves,
            "sigma_m": float(genome[2 * n]),
            "sigma_c": float(genome[2 * n + 1]),
            "nuclear_subsidy": float(genome[2 * n + 2]),
        }


def validation_layout(m_bounds=(0.0, 0.004), c_bounds=(-30.0, 100.0)) -> GenomeLayout:
    """Two genes: the slope and intercept of a single price curve."""
    return GenomeLayout(
        kind="validation",
        gene_names=("m", "c"),
        bounds=(tuple(m_bounds), tuple(c_bounds)),
    )


def longterm_layout(start_year: int, end_year: int,
                    m_bounds=(0.0, 0.003), c_bounds=(-30.0, 50.0),
                    sigma_bounds=(0.0, 0.001),
                    subsidy_bounds=(0.0, 300.0)) -> GenomeLayout:
    """One curve per investing year (every simulated year except the
    last) plus belief noise and the nuclear subsidy."""
    years = tuple(range(start_year, end_year))
    names = tuple(f"m_{y}" for y in years) + tuple(f"c_{y}" for y in years) \
        + ("sigma_m", "sigma_c", "nuclear_subsidy")
    bounds = (tuple(m_bounds),) * len(years) + (tuple(c_bounds),) * len(years) \
        + (tuple(sigma_bounds), tuple(sigma_bounds), tuple(subsidy_bounds))
    return GenomeLayout(kind="longterm", gene_names=names, bounds=bounds,
                        curve_years=years)


# ---------------------------------------------------------------------------
# Simulation objectives


@dataclass(frozen=True)
class ScenarioBundle:
    """Everything an objective needs besides the genome: the fixed
    scenario, fleet, representative year and the target trajectory."""

    scenario: object
    registry: object
    rep_year: object
    cost_table: object
    target: dict[int, dict[str, float]]  # year -> type -> share
    include_first_year: bool = True


def _simulate(bundle: ScenarioBundle, overrides: dict, eval_seed: int):
    scenario = replace(bundle.scenario, **overrides)
    world = init_world(scenario, bundle.registry, bundle.rep_year,
                       bundle.cost_table, seed=eval_seed)
    horizon = scenario.end_year - scenario.start_year + 1
    return run(world, horizon)


def objective_validation(genome, bundle: ScenarioBundle, eval_seed: int = 0,
                         layout: GenomeLayout | None = None) -> float:
    """Mix error of the final simulated year against the target."""
    layout = layout or validation_layout()
    sim = _simulate(bundle, layout.decode(genome), eval_seed)
    final = sim.years[-1]
    return mix_error_validation(final.objective_mix(), bundle.target[final.year])


def objective_longterm(genome, bundle: ScenarioBundle, eval_seed: int = 0,
                       layout: GenomeLayout | None = None) -> float:
    """Summed per-year mix error over the whole simulated trajectory."""
    layout = layout or longterm_layout(bundle.scenario.start_year,
                                       bundle.scenario.end_year)
    sim = _simulate(bundle, layout.decode(genome), eval_seed)
    trajectory = sim.mix_trajectory()
    if not bundle.include_first_year:
        trajectory.pop(bundle.scenario.start_year, None)
    target = {y: bundle.target[y] for y in trajectory}
    return mix_error_longterm(trajectory, target)


class ValidationObjective:
    """Picklable callable wrapping objective_validation for worker pools."""

    def __init__(self, bundle: ScenarioBundle, layout: GenomeLayout | None = None):
        self.bundle = bundle
        self.layout = layout or validation_layout()

    def __call__(self, genome, eval_seed: int) -> float:
        return objective_validation(genome, self.bundle, eval_seed, self.layout)


class LongTermObjective:
    def __init__(self, bundle: ScenarioBundle, layout: GenomeLayout | None = None):
        self.bundle = bundle
        self.layout = layout or longterm_layout(bundle.scenario.start_year,
                                                bundle.scenario.end_year)

    def __call__(self, genome, eval_seed: int) -> float:
        return objective_longterm(genome, self.bundle, eval_seed, self.layout)


# ---------------------------------------------------------------------------
# Genetic algorithm


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 120
    crossover_prob: float = 0.5
    mutation_prob: float = 0.2
    max_generations: int = 50
    bounds: tuple[tuple[float, float], ...] = ()
    seed: int = 0
    parallel_workers: int = 1
    tournament_size: int = 3
    blend_alpha: float = 0.5
    mutation_sigma_frac: float = 0.1   # gaussian sigma as fraction of bound width
    survivor: str = "plus"             # "plus" (merge parents+offspring) | "generational"
    stall_generations: int = 20
    stall_tol: float = 1e-6

    def __post_init__(self):
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise InputError("crossover_prob must be in [0, 1]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise InputError("mutation_prob must be in [0, 1]")
        if not self.bounds:
            raise InputError("GAConfig needs per-gene bounds")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise InputError(f"gene bounds must satisfy lower < upper (got {lo}, {hi})")
        if self.population_size < 2:
            raise InputError("population_size must be >= 2")


@dataclass
class Individual:
    genome: np.ndarray
    fitness: float
    eval_seed: int


@dataclass
class GenerationRecord:
    generation: int
    genomes: np.ndarray   # (pop, genes)
    fitnesses: np.ndarray

    @property
    def best_fitness(self) -> float:
        return float(self.fitnesses.min())


@dataclass
class GAResult:
    best: Individual
    generations: list[GenerationRecord] = field(default_factory=list)

    @property
    def n_generations(self) -> int:
        return len(self.generations)


class _GenerationLogWriter:
    """Appends one CSV block per generation, flushed immediately so the
    log survives an interrupted run with only complete generations."""

    def __init__(self, path, n_genes: int):
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(
            ["generation", "individual", "fitness"] + [f"gene_{i}" for i in range(n_genes)]
        )
        self._fh.flush()

    def write(self, record: GenerationRecord) -> None:
        for i in range(len(record.fitnesses)):
            self._writer.writerow(
                [record.generation, i, repr(float(record.fitnesses[i]))]
                + [repr(float(g)) for g in record.genomes[i]]
            )
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def _evaluate(objective, genomes: np.ndarray, seeds: list[int], workers: int) -> np.ndarray:
    """Fitness per genome; failures score worst and are logged."""
    def call(genome, seed):
        try:
            return float(objective(genome, seed))
        except Exception:
            log.warning("objective failed; assigning worst fitness", exc_info=True)
            return math.inf

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            try:
                results = list(pool.map(objective, list(genomes), seeds))
                return np.array([float(v) for v in results])
            except Exception:
                log.warning("parallel evaluation failed; falling back to serial",
                            exc_info=True)
    return np.array([call(g, s) for g, s in zip(genomes, seeds)])


def ga_run(cfg: GAConfig, objective, log_path=None) -> GAResult:
    """Minimize `objective(genome, eval_seed)` with a real-valued GA.

    Tournament selection, blend crossover, per-gene gaussian mutation
    clamped to bounds; survivors are the best of parents plus offspring
    (or the offspring with a single elite under the generational
    strategy). Evaluation seeds derive from (seed, generation, index) so
    results are reproducible under any worker scheduling.
    """
    rng = np.random.default_rng(cfg.seed)
    lo = np.array([b[0] for b in cfg.bounds])
    hi = np.array([b[1] for b in cfg.bounds])
    n_genes = len(cfg.bounds)
    pop_size = cfg.population_size
    sigma = cfg.mutation_sigma_frac * (hi - lo)

    def seeds_for(generation: int) -> np.ndarray:
        # one stream per (run seed, generation, index): reproducible under
        # any evaluation order or worker count
        return np.array([
            int(np.random.SeedSequence((cfg.seed, generation, i)).generate_state(1)[0])
            for i in range(pop_size)
        ])

    population = rng.uniform(lo, hi, size=(pop_size, n_genes))
    pop_seeds = seeds_for(0)
    fitness = _evaluate(objective, population, list(pop_seeds), cfg.parallel_workers)

    writer = _GenerationLogWriter(log_path, n_genes) if log_path else None
    records: list[GenerationRecord] = []
    best_history: list[float] = []

    def record_generation(gen: int):
        rec = GenerationRecord(gen, population.copy(), fitness.copy())
        records.append(rec)
        best_history.append(rec.best_fitness)
        if writer:
            writer.write(rec)

    try:
        record_generation(0)
        for gen in range(1, cfg.max_generations + 1):
            # tournament selection from the current population
            contenders = rng.integers(0, pop_size, size=(pop_size, cfg.tournament_size))
            winners = contenders[np.arange(pop_size), np.argmin(fitness[contenders], axis=1)]
            offspring = population[winners].copy()

            # blend crossover on consecutive pairs
            for a in range(0, pop_size - 1, 2):
                if rng.random() < cfg.crossover_prob:
                    p1, p2 = offspring[a].copy(), offspring[a + 1].copy()
                    low = np.minimum(p1, p2)
                    high = np.maximum(p1, p2)
                    span = high - low
                    c_lo = low - cfg.blend_alpha * span
                    c_hi = high + cfg.blend_alpha * span
                    offspring[a] = rng.uniform(c_lo, c_hi)
                    offspring[a + 1] = rng.uniform(c_lo, c_hi)

            # per-gene gaussian mutation
            mask = rng.random(offspring.shape) < cfg.mutation_prob
            noise = rng.normal(0.0, 1.0, size=offspring.shape) * sigma
            offspring[mask] += noise[mask]
            np.clip(offspring, lo, hi, out=offspring)

            child_seeds = seeds_for(gen)
            child_fitness = _evaluate(objective, offspring, list(child_seeds),
                                      cfg.parallel_workers)

            if cfg.survivor == "plus":
                merged = np.vstack([population, offspring])
                merged_fit = np.concatenate([fitness, child_fitness])
                merged_seeds = np.concatenate([pop_seeds, child_seeds])
                order = np.argsort(merged_fit, kind="stable")[:pop_size]
                population = merged[order]
                fitness = merged_fit[order]
                pop_seeds = merged_seeds[order]
            else:
                elite = int(np.argmin(fitness))
                worst_child = int(np.argmax(child_fitness))
                if fitness[elite] < child_fitness[worst_child]:
                    offspring[worst_child] = population[elite]
                    child_fitness[worst_child] = fitness[elite]
                    child_seeds[worst_child] = pop_seeds[elite]
                population = offspring
                fitness = child_fitness
                pop_seeds = child_seeds

            record_generation(gen)

            if len(best_history) > cfg.stall_generations:
                recent = best_history[-(cfg.stall_generations + 1)]
                if recent - best_history[-1] < cfg.stall_tol:
                    log.info("fitness stalled after generation %d; stopping", gen)
                    break
    finally:
        if writer:
            writer.close()

    best_idx = int(np.argmin(fitness))
    best = Individual(population[best_idx].copy(), float(fitness[best_idx]),
                      int(pop_seeds[best_idx]))
    return GAResult(best=best, generations=records)


# ---------------------------------------------------------------------------
# Forecast quality metrics


def forecast_error_metrics(simulated: dict[int, dict[str, float]],
                           observed: dict[int, dict[str, float]],
                           baseline: dict[str, float]) -> dict[str, dict]:
    """MAE, MASE and RMSE per generation type over a forecast horizon.

    The naive reference predicts the baseline (last pre-forecast) value
    for every year; MASE is the forecast MAE over the naive MAE and is
    reported as None when the naive MAE is zero. A type missing from a
    year's mix (or from the baseline) counts as a zero share, since new
    technologies can enter a trajectory partway through.
    """
    years = sorted(simulated)
    for y in years:
        if y not in observed:
            raise InputError(f"observed trajectory missing year {y}")
    types = sorted({t for y in years for t in simulated[y]}
                   | {t for y in years for t in observed[y]})
    out: dict[str, dict] = {}
    for t in types:
        sim = np.array([simulated[y].get(t, 0.0) for y in years])
        obs = np.array([observed[y].get(t, 0.0) for y in years])
        err = sim - obs
        mae = float(np.mean(np.abs(err)))
        rmse = float(np.sqrt(np.mean(err ** 2)))
        naive_mae = float(np.mean(np.abs(baseline.get(t, 0.0) - obs)))
        mase = (mae / naive_mae) if naive_mae > 0 else None
        out[t] = {"mae": mae, "mase": mase, "rmse": rmse}
    return out
