"""Evolving local explanations: chromosome decoding, fitness evaluation and
the generational GA loop.

Fitness of a chromosome is the classifier's probability for the original
image's predicted label, evaluated on the masked image. The GA is
generational with tournament selection, single-point crossover and bit-flip
mutation, plus a best-so-far archive.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import Chromosome, Explanation, RasterImage, SuperpixelMap
from .errors import EvoxplainError, InputError, ParameterError
from .classifier import ClassifierPort

EXHAUSTIVE_NS_LIMIT = 20


@dataclass(frozen=True)
class GaParams:
    population_size: int = 100
    generations: int = 50
    crossover_rate: float = 0.9
    mutation_rate: float = 0.2
    tournament_size: int = 3
    seed: int = 0
    seed_all_ones: bool = False  # optionally plant the identity mask in the init pop
    n_jobs: int = 1

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2:
            raise ParameterError("population_size must be even and >= 2")
        if self.generations < 1:
            raise ParameterError("generations must be >= 1")
        for name in ("crossover_rate", "mutation_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {v}")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ParameterError("tournament_size must be in [1, population_size]")
        if self.n_jobs < 1:
            raise ParameterError("n_jobs must be >= 1")

    def to_dict(self) -> dict:
        return {
            "population_size": self.population_size,
            "generations": self.generations,
            "crossover_rate": self.crossover_rate,
            "mutation_rate": self.mutation_rate,
            "tournament_size": self.tournament_size,
        }


@dataclass(frozen=True)
class EvaluatedIndividual:
    chromosome: Chromosome
    fitness: float

    def __post_init__(self):
        if not 0.0 <= self.fitness <= 1.0:
            raise InputError(f"fitness must be in [0, 1], got {self.fitness}")


def decode_mask(c: Chromosome, img: RasterImage, spmap: SuperpixelMap) -> RasterImage:
    """Keep superpixels with bit 1, blacken the rest."""
    if len(c) != spmap.ns:
        raise InputError(f"chromosome length {len(c)} != ns {spmap.ns}")
    if img.data.shape[:2] != spmap.labels.shape:
        raise InputError("image dimensions do not match the map")
    keep = c.bits[spmap.labels]
    return RasterImage(img.data * keep[..., None])


def evaluate_fitness(model: ClassifierPort, img_o: RasterImage, target: int,
                     c: Chromosome, spmap: SuperpixelMap) -> float:
    """Probability of `target` on the masked image."""
    if not 0 <= target < model.num_classes:
        raise ParameterError(f"target {target} out of range for K={model.num_classes}")
    return float(model.predict(decode_mask(c, img_o, spmap)).probs[target])


def _evaluate_all(model, img, target, spmap, bits_rows, n_jobs, context: str):
    fits = np.empty(len(bits_rows))

    def one(i):
        try:
            fits[i] = evaluate_fitness(model, img, target, Chromosome(bits_rows[i]), spmap)
        except EvoxplainError as exc:
            raise type(exc)(f"{context}, individual {i}: {exc}") from exc

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(one, range(len(bits_rows))))
    else:
        for i in range(len(bits_rows)):
            one(i)
    return fits


def _tournament(rng: np.random.Generator, fitnesses: np.ndarray, tsize: int) -> int:
    idxs = rng.integers(0, fitnesses.size, size=tsize)
    best = idxs[0]
    for i in idxs[1:]:
        if fitnesses[i] > fitnesses[best]:
            best = i
    return int(best)


def evolve(model: ClassifierPort, img: RasterImage, spmap: SuperpixelMap,
           params: GaParams) -> Explanation:
    """Run the GA and return the best mask found with its fitness trace.

    Issues exactly population_size * (generations + 1) + 1 classifier calls.
    All randomness comes from one seeded generator with a fixed consumption
    order, so results are independent of evaluation parallelism.
    """
    ns = spmap.ns
    pop_size = params.population_size
    rng = np.random.default_rng(params.seed)
    t0 = time.perf_counter()

    original = model.predict(img)
    target = original.argmax()
    original_probability = float(original.probs[target])

    pop = rng.integers(0, 2, size=(pop_size, ns), dtype=np.uint8)
    if params.seed_all_ones:
        pop[0, :] = 1
    fits = _evaluate_all(model, img, target, spmap, pop, params.n_jobs, "generation 0")

    best_idx = int(np.argmax(fits))
    best_bits = pop[best_idx].copy()
    best_fit = float(fits[best_idx])
    history = [best_fit]

    for gen in range(1, params.generations + 1):
        offspring = np.empty_like(pop)
        for pair in range(pop_size // 2):
            pa = pop[_tournament(rng, fits, params.tournament_size)]
            pb = pop[_tournament(rng, fits, params.tournament_size)]
            if rng.random() < params.crossover_rate:
                point = int(rng.integers(1, ns)) if ns > 1 else 1
                ca = np.concatenate([pa[:point], pb[point:]])
                cb = np.concatenate([pb[:point], pa[point:]])
            else:
                ca, cb = pa.copy(), pb.copy()
            for child in (ca, cb):
                if rng.random() < params.mutation_rate:
                    flips = rng.random(ns) < 1.0 / ns
                    child[flips] ^= 1
            offspring[2 * pair] = ca
            offspring[2 * pair + 1] = cb
        pop = offspring
        fits = _evaluate_all(model, img, target, spmap, pop, params.n_jobs,
                             f"generation {gen}")
        gen_best = int(np.argmax(fits))
        if fits[gen_best] > best_fit:  # strict: earlier equals win ties
            best_fit = float(fits[gen_best])
            best_bits = pop[gen_best].copy()
        history.append(best_fit)

    return Explanation(
        best=Chromosome(best_bits),
        best_fitness=best_fit,
        target_label=target,
        original_probability=original_probability,
        history=tuple(history),
        wall_time=time.perf_counter() - t0,
        seed=params.seed,
        method="elime",
        params=params.to_dict(),
    )


def exhaustive_best(model: ClassifierPort, img: RasterImage, spmap: SuperpixelMap,
                    target: int) -> EvaluatedIndividual:
    """Evaluate every one of the 2^ns masks; ties go to the lowest binary
    value with bits read MSB-first. Refuses ns > 20."""
    ns = spmap.ns
    if ns > EXHAUSTIVE_NS_LIMIT:
        raise ParameterError(f"exhaustive search refused for ns={ns} > {EXHAUSTIVE_NS_LIMIT}")
    shifts = np.arange(ns - 1, -1, -1, dtype=np.uint32)
    # closed-form route when available: independent of the decode/predict path
    closed_form = getattr(model, "predict_presence", None)
    best_bits = None
    best_fit = -1.0
    for value in range(1 << ns):
        bits = ((value >> shifts) & 1).astype(np.uint8)
        if closed_form is not None:
            fit = float(closed_form(bits).probs[target])
        else:
            fit = evaluate_fitness(model, img, target, Chromosome(bits), spmap)
        if fit > best_fit:
            best_fit = fit
            best_bits = bits
    return EvaluatedIndividual(Chromosome(best_bits), best_fit)
