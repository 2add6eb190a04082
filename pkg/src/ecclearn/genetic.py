"""Genetic search over polar information sets.

The loop keeps a fitness-sorted population of K-subsets, draws two
distinct parents with rank-exponential probabilities, merges their
index sets, injects a few uniformly chosen mutant indices from the
complement, resamples K indices from the merged pool, and inserts the
offspring back in sorted position. Fitness is the product of measured
BLERs at two SNR points and is cached per information set, so repeat
offspring never re-simulate.
"""

from __future__ import annotations

import bisect
import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from . import evaluate
from .channel import derive_seed
from .polar import PolarCode

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneticConfig:
    m: int
    alpha: float
    beta: float
    snr_pair: tuple
    t_max: int
    seed: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("population size must be >= 2")
        if self.alpha <= 0:
            raise ValueError("sample focus must be positive")
        if not 0 <= self.beta < 1:
            raise ValueError("mutation rate must lie in [0, 1)")


@dataclass
class Population:
    """Entries (info_set, fitness) sorted ascending by fitness, capacity m."""

    m: int
    entries: list = field(default_factory=list)

    def fitnesses(self) -> list[float]:
        return [f for _, f in self.entries]

    def best(self) -> tuple:
        return self.entries[0]

    def check_sorted(self) -> None:
        fits = self.fitnesses()
        assert all(a <= b for a, b in zip(fits, fits[1:])), "population unsorted"


def init_population(cfg: GeneticConfig, n: int, k: int, fitness, rng) -> Population:
    """Uniform K-subsets, evaluated and sorted; duplicates stay separate."""
    entries = []
    for _ in range(cfg.m):
        info = tuple(sorted(int(v) for v in rng.choice(n, size=k, replace=False)))
        entries.append((info, fitness(info)))
    entries.sort(key=lambda e: e[1])
    return Population(cfg.m, entries)


def _rank_cdf(m: int, alpha: float) -> np.ndarray:
    w = np.exp(-alpha * np.arange(1, m + 1))
    return np.cumsum(w) / w.sum()


def select_parents(pop: Population, alpha: float, rng):
    """Two distinct entries drawn by rank; better ranks are more likely."""
    m = len(pop.entries)
    if m < 2:
        raise ValueError("need at least two entries to select parents")
    cdf = _rank_cdf(m, alpha)
    first = int(np.searchsorted(cdf, rng.random(), side="right"))
    second = first
    while second == first:
        second = int(np.searchsorted(cdf, rng.random(), side="right"))
    return pop.entries[first][0], pop.entries[second][0]


def round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def merge_and_mutate(parent1, parent2, beta: float, n: int, k: int, rng) -> tuple:
    """Union the parents, add mutants from the complement, resample K."""
    union = np.union1d(np.asarray(parent1, dtype=np.int64),
                       np.asarray(parent2, dtype=np.int64))
    complement = np.setdiff1d(np.arange(n, dtype=np.int64), union,
                              assume_unique=True)
    n_mut = round_half_up(beta * union.size)
    if n_mut > complement.size:
        log.warning("mutant count %d exceeds complement size %d; taking all",
                    n_mut, complement.size)
        n_mut = complement.size
    if n_mut:
        mutants = rng.choice(complement, size=n_mut, replace=False)
        pool = np.union1d(union, mutants)
    else:
        pool = union
    offspring = rng.choice(pool, size=k, replace=False)
    return tuple(sorted(int(v) for v in offspring))


def insert_offspring(pop: Population, info, fitness_value: float) -> Population:
    """Sorted insert, then truncate to capacity; worst offspring is dropped."""
    pos = bisect.bisect_right(pop.fitnesses(), fitness_value)
    if pos >= pop.m:
        return pop
    pop.entries.insert(pos, (info, fitness_value))
    del pop.entries[pop.m:]
    return pop


@dataclass
class GeneticResult:
    best_set: tuple
    best_fitness: float
    iterations_used: int
    converged_at: int | None
    trace: list


def run_genetic(cfg: GeneticConfig, n: int, k: int, decoder: evaluate.DecoderSpec,
                budget: evaluate.EvalBudget, reference=None,
                stop_on_reference: bool = False, target_fitness: float | None = None,
                workers: int = 1) -> GeneticResult:
    """Full loop: init, then select / merge / mutate / insert until t_max.

    The trace records one row per iteration: (iteration, best fitness,
    offspring fitness, symmetric-difference size between the current best
    set and the reference set, or -1 when no reference is given).
    converged_at is the first iteration whose rank-1 set equals the
    reference (0 means the initial population already leads with it).
    """
    rng = np.random.default_rng(derive_seed(cfg.seed, "genetic"))
    cache: dict[tuple, float] = {}
    eval_count = 0

    def fitness(info: tuple) -> float:
        nonlocal eval_count
        if info not in cache:
            sub = evaluate.EvalBudget(derive_seed(cfg.seed, f"fit{eval_count}"),
                                      budget.min_error_events, budget.max_frames,
                                      budget.batch_frames)
            eval_count += 1
            cache[info] = evaluate.fitness_product(
                PolarCode(n, info), decoder, cfg.snr_pair, sub, workers)
        return cache[info]

    ref = None if reference is None else tuple(sorted(int(v) for v in reference))

    def diff_to_ref(info) -> int:
        if ref is None:
            return -1
        return len(set(info).symmetric_difference(ref))

    pop = init_population(cfg, n, k, fitness, rng)
    trace: list[tuple] = []
    converged_at = 0 if ref is not None and pop.best()[0] == ref else None
    iterations = 0
    for t in range(1, cfg.t_max + 1):
        if converged_at is not None and stop_on_reference:
            break
        if target_fitness is not None and pop.best()[1] <= target_fitness:
            break
        p1, p2 = select_parents(pop, cfg.alpha, rng)
        child = merge_and_mutate(p1, p2, cfg.beta, n, k, rng)
        child_fit = fitness(child)
        pop = insert_offspring(pop, child, child_fit)
        if __debug__:
            pop.check_sorted()
        iterations = t
        best_set, best_fit = pop.best()
        trace.append((t, best_fit, child_fit, diff_to_ref(best_set)))
        if converged_at is None and ref is not None and best_set == ref:
            converged_at = t
    best_set, best_fit = pop.best()
    return GeneticResult(best_set, best_fit, iterations, converged_at, trace)


TRACE_CSV_FIELDS = ["iteration", "best_fitness", "offspring_fitness",
                    "hamming_to_reference"]


def write_trace_csv(path, trace) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_CSV_FIELDS)
        for row in trace:
            writer.writerow([row[0], repr(float(row[1])), repr(float(row[2])),
                             row[3]])
