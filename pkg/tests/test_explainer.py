import numpy as np
import pytest

from evoxplain import (Chromosome, GaParams, LinearSuperpixelClassifier,
                       RasterImage, decode_mask, evaluate_fitness, evolve,
                       exhaustive_best, softmax)
from evoxplain.bench import CountingClassifier
from evoxplain.core import SuperpixelMap
from evoxplain.errors import InputError, ParameterError


def test_ga_params_validation():
    with pytest.raises(ParameterError):
        GaParams(population_size=3)  # odd
    with pytest.raises(ParameterError):
        GaParams(population_size=0)
    with pytest.raises(ParameterError):
        GaParams(crossover_rate=1.5)
    with pytest.raises(ParameterError):
        GaParams(tournament_size=0)
    with pytest.raises(ParameterError):
        GaParams(tournament_size=101, population_size=100)


def test_decode_mask_identity_and_black(tiles12):
    ns = tiles12.spmap.ns
    all_ones = decode_mask(Chromosome.all_ones(ns), tiles12.reference, tiles12.spmap)
    assert all_ones.same_pixels(tiles12.reference)
    all_zeros = decode_mask(Chromosome.all_zeros(ns), tiles12.reference, tiles12.spmap)
    assert (all_zeros.data == 0).all()


def test_decode_mask_single_bit(tiles12):
    spmap = tiles12.spmap
    for j in (0, spmap.ns - 1):
        bits = np.zeros(spmap.ns, np.uint8)
        bits[j] = 1
        masked = decode_mask(Chromosome(bits), tiles12.reference, spmap)
        inside = spmap.labels == j
        assert (masked.data[inside] == tiles12.reference.data[inside]).all()
        assert (masked.data[~inside] == 0).all()


def test_decode_mask_length_mismatch(tiles12):
    with pytest.raises(InputError):
        decode_mask(Chromosome.all_ones(tiles12.spmap.ns + 1),
                    tiles12.reference, tiles12.spmap)


def test_evaluate_fitness_identity_mask(tiles12):
    cls = tiles12.classifier
    original = cls.predict(tiles12.reference)
    target = original.argmax()
    fit = evaluate_fitness(cls, tiles12.reference, target,
                           Chromosome.all_ones(tiles12.spmap.ns), tiles12.spmap)
    assert fit == float(original.probs[target])


def test_evaluate_fitness_matches_closed_form(tiles12):
    cls = tiles12.classifier
    rng = np.random.default_rng(0)
    for _ in range(20):
        bits = rng.integers(0, 2, size=tiles12.spmap.ns, dtype=np.uint8)
        fit = evaluate_fitness(cls, tiles12.reference, 0, Chromosome(bits), tiles12.spmap)
        expected = softmax(cls.bias + cls.weights @ bits.astype(float)).probs[0]
        assert abs(fit - expected) < 1e-12


def test_evaluate_fitness_all_zeros_is_bias_only(tiles12):
    cls = tiles12.classifier
    fit = evaluate_fitness(cls, tiles12.reference, 0,
                           Chromosome.all_zeros(tiles12.spmap.ns), tiles12.spmap)
    assert abs(fit - softmax(cls.bias).probs[0]) < 1e-15


def test_evaluate_fitness_target_out_of_range(tiles12):
    with pytest.raises(ParameterError):
        evaluate_fitness(tiles12.classifier, tiles12.reference, 7,
                         Chromosome.all_ones(tiles12.spmap.ns), tiles12.spmap)


def test_evolve_deterministic(tiles12):
    params = GaParams(population_size=20, generations=5, seed=42)
    e1 = evolve(tiles12.classifier, tiles12.reference, tiles12.spmap, params)
    e2 = evolve(tiles12.classifier, tiles12.reference, tiles12.spmap, params)
    assert e1.to_json_dict() == {**e2.to_json_dict(), "wall_time_s": e1.wall_time}


def test_evolve_parallel_matches_sequential(tiles12):
    base = GaParams(population_size=20, generations=5, seed=9)
    seq = evolve(tiles12.classifier, tiles12.reference, tiles12.spmap, base)
    from dataclasses import replace
    par = evolve(tiles12.classifier, tiles12.reference, tiles12.spmap,
                 replace(base, n_jobs=4))
    assert seq.best == par.best and seq.history == par.history


def test_evolve_history_monotone_and_consistent(tiles12):
    e = evolve(tiles12.classifier, tiles12.reference, tiles12.spmap,
               GaParams(population_size=10, generations=8, seed=1))
    assert len(e.history) == 9
    assert all(b >= a for a, b in zip(e.history, e.history[1:]))
    assert e.best_fitness == e.history[-1]
    assert all(0.0 <= f <= 1.0 for f in e.history)


def test_evolve_seeded_identity_dominates(tiles12):
    e = evolve(tiles12.classifier, tiles12.reference, tiles12.spmap,
               GaParams(population_size=10, generations=1, seed=0, seed_all_ones=True))
    assert e.best_fitness >= e.original_probability


def test_evolve_call_count(tiles12):
    counting = CountingClassifier(tiles12.classifier)
    evolve(counting, tiles12.reference, tiles12.spmap,
           GaParams(population_size=8, generations=3, seed=0))
    assert counting.calls == 8 * (3 + 1) + 1


def test_evolve_reaches_exhaustive_optimum(tiles12):
    target = tiles12.classifier.predict(tiles12.reference).argmax()
    oracle = exhaustive_best(tiles12.classifier, tiles12.reference, tiles12.spmap, target)
    hits = 0
    for seed in range(5):
        e = evolve(tiles12.classifier, tiles12.reference, tiles12.spmap,
                   GaParams(seed=seed))
        assert e.best_fitness <= oracle.fitness + 1e-15
        hits += abs(e.best_fitness - oracle.fitness) <= 1e-9
    assert hits >= 4


def _tiny_classifier(weights):
    labels = np.zeros((2, 2), np.int32)
    spmap = SuperpixelMap(labels, 1)
    ref = RasterImage(np.full((2, 2, 3), 7, np.uint8))
    return LinearSuperpixelClassifier(ref, spmap, np.asarray(weights, float),
                                      np.zeros(2)), ref, spmap


def test_exhaustive_best_prefers_presence():
    cls, ref, spmap = _tiny_classifier([[2.0], [0.0]])
    best = exhaustive_best(cls, ref, spmap, 0)
    assert best.chromosome.bits.tolist() == [1]


def test_exhaustive_best_tie_rule_all_zeros():
    cls, ref, spmap = _tiny_classifier([[0.0], [0.0]])
    best = exhaustive_best(cls, ref, spmap, 0)
    assert best.chromosome.bits.tolist() == [0]


def test_exhaustive_best_matches_direct_argmax(tiles12):
    cls = tiles12.classifier
    best = exhaustive_best(cls, tiles12.reference, tiles12.spmap, 0)
    ns = tiles12.spmap.ns
    fits = []
    for value in range(1 << ns):
        bits = np.array([(value >> (ns - 1 - j)) & 1 for j in range(ns)], float)
        fits.append(softmax(cls.bias + cls.weights @ bits).probs[0])
    assert abs(best.fitness - max(fits)) < 1e-15


def test_exhaustive_best_refuses_large_ns():
    labels = np.arange(25, dtype=np.int32).reshape(5, 5)
    spmap = SuperpixelMap(labels, 25)
    ref = RasterImage(np.full((5, 5, 3), 7, np.uint8))
    cls = LinearSuperpixelClassifier(ref, spmap, np.zeros((2, 25)), np.zeros(2))
    with pytest.raises(ParameterError):
        exhaustive_best(cls, ref, spmap, 0)
