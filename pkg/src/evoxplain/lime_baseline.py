"""Perturbation-sampling baseline: random masks around the identity mask,
distance-weighted ridge fit, top-k feature selection.

Used by the comparison protocol where its feature budget is set to the
cardinality of the evolved mask. Diverges from the original LIME in using
closed-form ridge regression instead of a Lasso path (see README).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .core import Chromosome, Explanation, RasterImage, SuperpixelMap
from .errors import NumericError, ParameterError
from .classifier import ClassifierPort
from .explainer import evaluate_fitness

COEF_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class LimeParams:
    num_samples: int = 1000
    kernel_width: float | None = None  # defaults to 0.25 * sqrt(ns)
    ridge_lambda: float = 1e-3
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.num_samples < 1:
            raise ParameterError("num_samples must be >= 1")
        if self.kernel_width is not None and self.kernel_width <= 0:
            raise ParameterError("kernel_width must be > 0")
        if self.ridge_lambda <= 0:
            raise ParameterError("ridge_lambda must be > 0")
        if self.n_jobs < 1:
            raise ParameterError("n_jobs must be >= 1")

    def width_for(self, ns: int) -> float:
        return self.kernel_width if self.kernel_width is not None else 0.25 * math.sqrt(ns)

    def to_dict(self) -> dict:
        return {
            "num_samples": self.num_samples,
            "kernel_width": self.kernel_width,
            "ridge_lambda": self.ridge_lambda,
        }


def sample_masks(ns: int, n: int, seed: int) -> list[Chromosome]:
    """n Bernoulli(0.5) masks with the all-ones mask prepended as sample 0."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    rng = np.random.default_rng(seed)
    out = [Chromosome.all_ones(ns)]
    if n > 1:
        rows = rng.integers(0, 2, size=(n - 1, ns), dtype=np.uint8)
        out.extend(Chromosome(row) for row in rows)
    return out


def kernel_weight(c: Chromosome, width: float) -> float:
    """exp(-d^2 / width^2), d = (#zero bits) / sqrt(ns)."""
    if width <= 0:
        raise ParameterError("width must be > 0")
    ns = len(c)
    d = (ns - c.ones()) / math.sqrt(ns)
    return math.exp(-(d * d) / (width * width))


def fit_and_select(masks: list[Chromosome], fitnesses: np.ndarray,
                   weights: np.ndarray, budget: int,
                   ridge_lambda: float = 1e-3) -> Chromosome:
    """Weighted ridge of fitness on mask bits (intercept unpenalized), then
    keep the `budget` features with the largest coefficients.

    Positive coefficients win first; ties break to the lower index; if fewer
    than `budget` are positive the rest fill by descending coefficient.
    """
    ns = len(masks[0])
    if not 1 <= budget <= ns:
        raise ParameterError(f"budget must be in [1, {ns}], got {budget}")
    X = np.empty((len(masks), ns + 1))
    X[:, 0] = 1.0
    for i, m in enumerate(masks):
        if len(m) != ns:
            raise ParameterError("masks have inconsistent lengths")
        X[i, 1:] = m.bits
    y = np.asarray(fitnesses, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    A = (X * w[:, None]).T @ X
    A[1:, 1:] += ridge_lambda * np.eye(ns)
    rhs = (X * w[:, None]).T @ y
    try:
        beta = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"ridge system is singular: {exc}") from exc
    coefs = beta[1:]
    coefs[np.abs(coefs) < COEF_ZERO_TOL] = 0.0  # deterministic tie handling
    order = sorted(range(ns), key=lambda j: (-coefs[j], j))
    bits = np.zeros(ns, dtype=np.uint8)
    bits[order[:budget]] = 1
    return Chromosome(bits)


def explain_lime(model: ClassifierPort, img: RasterImage, spmap: SuperpixelMap,
                 params: LimeParams, budget: int) -> Explanation:
    """Sample, evaluate, weight, fit, select.

    Issues exactly num_samples + 1 classifier calls: the original-image
    prediction doubles as the evaluation of the prepended all-ones sample
    (its decoded mask is byte-identical to the original image), and the
    final call scores the selected mask.
    """
    ns = spmap.ns
    if params.num_samples < ns + 1:
        raise ParameterError(
            f"num_samples must be >= ns + 1 = {ns + 1}, got {params.num_samples}")
    t0 = time.perf_counter()

    original = model.predict(img)
    target = original.argmax()
    original_probability = float(original.probs[target])

    masks = sample_masks(ns, params.num_samples, params.seed)
    fits = np.empty(len(masks))
    fits[0] = original_probability  # all-ones mask == original image
    for i in range(1, len(masks)):
        fits[i] = evaluate_fitness(model, img, target, masks[i], spmap)

    width = params.width_for(ns)
    weights = np.array([kernel_weight(m, width) for m in masks])
    selected = fit_and_select(masks, fits, weights, budget, params.ridge_lambda)
    best_fitness = evaluate_fitness(model, img, target, selected, spmap)

    return Explanation(
        best=selected,
        best_fitness=best_fitness,
        target_label=target,
        original_probability=original_probability,
        history=(best_fitness,),
        wall_time=time.perf_counter() - t0,
        seed=params.seed,
        method="lime-baseline",
        params={**params.to_dict(), "budget": budget},
    )
