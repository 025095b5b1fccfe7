"""Model-agnostic local explanations for image classifiers: evolve the
subset of SLIC superpixels that maximizes the classifier's confidence in
its original prediction on the masked image."""

from .core import (Chromosome, Explanation, LabImage, ProbDist, RasterImage,
                   SuperpixelMap, validate_chromosome)
from .classifier import (ClassifierPort, LinearSuperpixelClassifier,
                         RemoteClassifier, presence_vector, softmax)
from .explainer import (EvaluatedIndividual, GaParams, decode_mask,
                        evaluate_fitness, evolve, exhaustive_best)
from .lime_baseline import LimeParams, explain_lime, fit_and_select, kernel_weight, sample_masks
from .slic import SlicParams, rgb_to_lab, segment

__version__ = "0.1.0"

__all__ = [
    "Chromosome", "ClassifierPort", "EvaluatedIndividual", "Explanation",
    "GaParams", "LabImage", "LimeParams", "LinearSuperpixelClassifier",
    "ProbDist", "RasterImage", "RemoteClassifier", "SlicParams",
    "SuperpixelMap", "decode_mask", "evaluate_fitness", "evolve",
    "exhaustive_best", "explain_lime", "fit_and_select", "kernel_weight",
    "presence_vector", "rgb_to_lab", "sample_masks", "segment", "softmax",
    "validate_chromosome",
]
