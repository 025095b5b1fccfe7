import math

import numpy as np
import pytest

from evoxplain import (Chromosome, LimeParams, explain_lime, fit_and_select,
                       kernel_weight, sample_masks)
from evoxplain.bench import CountingClassifier
from evoxplain.errors import ParameterError


def test_sample_masks_prepends_all_ones():
    masks = sample_masks(10, 1, seed=0)
    assert len(masks) == 1
    assert masks[0].bits.tolist() == [1] * 10


def test_sample_masks_deterministic():
    a = sample_masks(20, 50, seed=4)
    b = sample_masks(20, 50, seed=4)
    assert a == b


def test_sample_masks_mean_bit_value():
    masks = sample_masks(50, 10_000, seed=1)
    mean = np.mean([m.bits for m in masks[1:]])
    assert 0.48 <= mean <= 0.52


def test_kernel_weight_examples():
    assert kernel_weight(Chromosome.all_ones(100), 2.5) == 1.0
    w = kernel_weight(Chromosome.all_zeros(100), 2.5)
    assert abs(w - math.exp(-16)) < 1e-12
    # strictly decreasing in the number of zero bits
    prev = 2.0
    for zeros in range(0, 101, 10):
        bits = np.ones(100, np.uint8)
        bits[:zeros] = 0
        cur = kernel_weight(Chromosome(bits), 2.5)
        assert cur < prev
        prev = cur
    with pytest.raises(ParameterError):
        kernel_weight(Chromosome.all_ones(4), 0.0)


def test_fit_and_select_recovers_linear_coefficients():
    # noise-free linear fitness with distinct positive coefficients
    rng = np.random.default_rng(0)
    ns = 8
    coefs = np.array([0.5, 0.1, 0.9, 0.3, 0.7, 0.05, 0.2, 0.6])
    masks = [Chromosome(rng.integers(0, 2, ns, dtype=np.uint8)) for _ in range(200)]
    fitness = np.array([0.01 + 0.001 * (coefs @ m.bits) for m in masks])
    weights = np.ones(len(masks))
    chosen = fit_and_select(masks, fitness, weights, budget=3, ridge_lambda=1e-9)
    assert set(np.flatnonzero(chosen.bits)) == {2, 4, 7}  # three largest coefs


def test_fit_and_select_budget_equals_ns():
    masks = sample_masks(6, 40, seed=2)
    fitness = np.linspace(0, 1, len(masks))
    chosen = fit_and_select(masks, fitness, np.ones(len(masks)), budget=6)
    assert chosen.bits.tolist() == [1] * 6


def test_fit_and_select_constant_fitness_falls_back_to_index_order():
    masks = sample_masks(6, 100, seed=3)
    fitness = np.full(len(masks), 0.4)
    chosen = fit_and_select(masks, fitness, np.ones(len(masks)), budget=3)
    assert chosen.bits.tolist() == [1, 1, 1, 0, 0, 0]


def test_fit_and_select_order_free():
    rng = np.random.default_rng(5)
    masks = sample_masks(7, 60, seed=5)
    fitness = rng.random(len(masks))
    weights = rng.random(len(masks)) + 0.1
    a = fit_and_select(masks, fitness, weights, budget=3)
    perm = rng.permutation(len(masks))
    b = fit_and_select([masks[i] for i in perm], fitness[perm], weights[perm], budget=3)
    assert a == b


def test_fit_and_select_bad_budget():
    masks = sample_masks(5, 10, seed=0)
    with pytest.raises(ParameterError):
        fit_and_select(masks, np.zeros(10), np.ones(10), budget=0)
    with pytest.raises(ParameterError):
        fit_and_select(masks, np.zeros(10), np.ones(10), budget=6)


def test_explain_lime_finds_salient_superpixels(tiles12):
    hits = 0
    for seed in range(10):
        exp = explain_lime(tiles12.classifier, tiles12.reference, tiles12.spmap,
                           LimeParams(num_samples=500, seed=seed),
                           budget=len(tiles12.salient))
        if set(np.flatnonzero(exp.best.bits)) == tiles12.salient:
            hits += 1
    assert hits >= 9


def test_explain_lime_call_count_and_shape(tiles12):
    counting = CountingClassifier(tiles12.classifier)
    exp = explain_lime(counting, tiles12.reference, tiles12.spmap,
                       LimeParams(num_samples=100, seed=0), budget=4)
    assert counting.calls == 100 + 1
    assert exp.method == "lime-baseline"
    assert len(exp.history) == 1
    assert exp.best.ones() == 4


def test_explain_lime_rejects_too_few_samples(tiles12):
    with pytest.raises(ParameterError):
        explain_lime(tiles12.classifier, tiles12.reference, tiles12.spmap,
                     LimeParams(num_samples=tiles12.spmap.ns), budget=2)


def test_lime_params_validation():
    with pytest.raises(ParameterError):
        LimeParams(num_samples=0)
    with pytest.raises(ParameterError):
        LimeParams(kernel_width=-1.0)
    with pytest.raises(ParameterError):
        LimeParams(ridge_lambda=0.0)
    assert abs(LimeParams().width_for(100) - 2.5) < 1e-15
