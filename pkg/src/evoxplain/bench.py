"""Desk-scale benchmark harness: synthetic scenarios with known salient
superpixels, repeated seeded runs, and aggregate reports (original
probability, best / mean +- std fitness, wall times) plus oracle-gap and
IoU metrics that only a classifier with constructed ground truth can offer.
"""

from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .core import ProbDist, RasterImage, SuperpixelMap
from .errors import EvoxplainError, ParameterError
from .classifier import LinearSuperpixelClassifier
from .explainer import EXHAUSTIVE_NS_LIMIT, GaParams, evolve, exhaustive_best
from .lime_baseline import LimeParams, explain_lime
from . import slic


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    ns: int = 12
    salient: int = 4
    distractors: int = 2
    weight: float = 3.0
    image_size: int = 48
    seed: int = 7


@dataclass
class Scenario:
    name: str
    reference: RasterImage
    spmap: SuperpixelMap
    classifier: LinearSuperpixelClassifier
    salient: frozenset
    distractors: frozenset


@dataclass
class RunReport:
    scenario: str
    method: str
    original_probability: float
    best_fitness: list  # per run
    best: float
    mean_fitness: float
    std_fitness: float
    shortest_time_s: float
    mean_time_s: float
    std_time_s: float
    iou: list  # per run
    classifier_calls: list  # per run
    oracle_fitness: float | None = None
    oracle_gap: list | None = None  # per run, absent when ns is too large
    seeds: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return dict(self.__dict__)


class CountingClassifier:
    """Wrapper recording how many predict calls the wrapped model receives."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    @property
    def num_classes(self) -> int:
        return self.inner.num_classes

    def predict(self, img: RasterImage) -> ProbDist:
        self.calls += 1
        return self.inner.predict(img)


def make_scenario(spec: ScenarioSpec) -> Scenario:
    """Deterministic synthetic scenario: a tiled random-color image segmented
    by SLIC, recolored per superpixel, with a two-class linear classifier
    whose target-class weights are +w on salient and -w on distractor
    superpixels (ground truth by construction)."""
    if spec.salient < 0 or spec.distractors < 0:
        raise ParameterError("salient/distractor counts must be >= 0")
    if spec.salient + spec.distractors > spec.ns:
        raise ParameterError("salient + distractor counts exceed ns")
    if spec.distractors > 0 and spec.distractors >= spec.salient:
        # keeps the target class the argmax on the unmasked image
        raise ParameterError("need more salient than distractor superpixels")
    rng = np.random.default_rng(spec.seed)
    size = spec.image_size

    gx, gy = slic._grid_shape(spec.ns, size, size)
    tile_colors = rng.integers(32, 256, size=(gy, gx, 3), dtype=np.uint8)
    ty = np.minimum((np.arange(size) * gy) // size, gy - 1)
    tx = np.minimum((np.arange(size) * gx) // size, gx - 1)
    base = RasterImage(tile_colors[ty[:, None], tx[None, :]])

    spmap = slic.segment(base, slic.SlicParams(k=spec.ns))
    if spec.salient + spec.distractors > spmap.ns:
        raise ParameterError(
            f"segmentation produced ns={spmap.ns}, too few for the requested counts")

    region_colors = rng.integers(32, 256, size=(spmap.ns, 3), dtype=np.uint8)
    reference = RasterImage(region_colors[spmap.labels])

    picked = rng.choice(spmap.ns, size=spec.salient + spec.distractors, replace=False)
    salient = frozenset(int(i) for i in picked[:spec.salient])
    distractors = frozenset(int(i) for i in picked[spec.salient:])

    w_target = np.zeros(spmap.ns)
    w_target[list(salient)] = spec.weight
    w_target[list(distractors)] = -spec.weight
    weights = np.stack([w_target, -w_target])
    classifier = LinearSuperpixelClassifier(
        reference=reference, spmap=spmap, weights=weights, bias=np.zeros(2))
    return Scenario(spec.name, reference, spmap, classifier, salient, distractors)


def _iou(bits: np.ndarray, truth: frozenset) -> float:
    ones = {int(i) for i in np.flatnonzero(bits)}
    union = ones | truth
    if not union:
        return 1.0
    return len(ones & truth) / len(union)


def run_suite(scenarios, methods=("elime", "lime"), runs: int = 30,
              ga_params: GaParams | None = None,
              lime_params: LimeParams | None = None,
              seed0: int = 0) -> list[RunReport]:
    """Execute each method `runs` times per scenario with seeds
    seed0..seed0+runs-1. When both methods run, the baseline's budget for a
    seed is the cardinality evolved for the same seed (equal-cardinality
    comparison protocol)."""
    if runs < 1:
        raise ParameterError("runs must be >= 1")
    ga_params = ga_params or GaParams()
    lime_params = lime_params or LimeParams()
    reports = []

    for scenario in scenarios:
        oracle_fit = None
        if scenario.spmap.ns <= EXHAUSTIVE_NS_LIMIT:
            target = scenario.classifier.predict(scenario.reference).argmax()
            oracle_fit = exhaustive_best(
                scenario.classifier, scenario.reference, scenario.spmap, target).fitness

        per_method: dict[str, dict] = {
            m: {"exps": [], "calls": []} for m in methods}
        for run in range(runs):
            seed = seed0 + run
            budget = None
            for method in methods:
                counting = CountingClassifier(scenario.classifier)
                try:
                    if method == "elime":
                        exp = evolve(counting, scenario.reference, scenario.spmap,
                                     replace(ga_params, seed=seed))
                        budget = max(1, exp.best.ones())
                    elif method == "lime":
                        b = budget if budget is not None else max(1, scenario.spmap.ns // 4)
                        exp = explain_lime(counting, scenario.reference, scenario.spmap,
                                           replace(lime_params, seed=seed), b)
                    else:
                        raise ParameterError(f"unknown method {method!r}")
                except EvoxplainError as exc:
                    raise type(exc)(
                        f"scenario {scenario.name!r}, seed {seed}: {exc}") from exc
                per_method[method]["exps"].append(exp)
                per_method[method]["calls"].append(counting.calls)

        for method in methods:
            exps = per_method[method]["exps"]
            fits = [e.best_fitness for e in exps]
            times = [e.wall_time for e in exps]
            report = RunReport(
                scenario=scenario.name,
                method="elime" if method == "elime" else "lime-baseline",
                original_probability=exps[0].original_probability,
                best_fitness=fits,
                best=max(fits),
                mean_fitness=statistics.fmean(fits),
                std_fitness=statistics.pstdev(fits),
                shortest_time_s=min(times),
                mean_time_s=statistics.fmean(times),
                std_time_s=statistics.pstdev(times),
                iou=[_iou(e.best.bits, scenario.salient) for e in exps],
                classifier_calls=per_method[method]["calls"],
                oracle_fitness=oracle_fit,
                oracle_gap=None if oracle_fit is None
                else [oracle_fit - f for f in fits],
                seeds=list(range(seed0, seed0 + runs)),
            )
            reports.append(report)
    return reports


def default_suite() -> list[ScenarioSpec]:
    """Packaged scenarios; both contain distractors."""
    return [
        ScenarioSpec(name="tiles-12", ns=12, salient=4, distractors=2,
                     weight=3.0, image_size=48, seed=7),
        ScenarioSpec(name="tiles-16", ns=16, salient=6, distractors=3,
                     weight=2.5, image_size=64, seed=11),
    ]


def load_suite(path) -> tuple[list[ScenarioSpec], dict]:
    """Suite file: JSON {"scenarios": [{...spec fields...}], ...extras}."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "scenarios" not in data:
        raise ParameterError(f"suite file {path!r} lacks a 'scenarios' list")
    specs = []
    for entry in data["scenarios"]:
        try:
            specs.append(ScenarioSpec(**entry))
        except TypeError as exc:
            raise ParameterError(f"bad scenario entry {entry!r}: {exc}") from exc
    extras = {k: v for k, v in data.items() if k != "scenarios"}
    return specs, extras


def write_reports(reports: list[RunReport], out_dir) -> tuple[Path, Path]:
    """JSON (full per-run data) + CSV (one aggregate row per scenario x method)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "reports.json"
    with open(json_path, "w") as fh:
        json.dump([r.to_json_dict() for r in reports], fh, indent=2)
        fh.write("\n")
    csv_path = out_dir / "summary.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "scenario", "method", "original_probability", "best_fitness",
            "mean_fitness", "std_fitness", "shortest_time_s", "mean_time_s",
            "std_time_s", "mean_iou", "median_oracle_gap",
        ])
        for r in reports:
            writer.writerow([
                r.scenario, r.method, r.original_probability, r.best,
                r.mean_fitness, r.std_fitness, r.shortest_time_s, r.mean_time_s,
                r.std_time_s, statistics.fmean(r.iou),
                "" if r.oracle_gap is None else statistics.median(r.oracle_gap),
            ])
    return json_path, csv_path
