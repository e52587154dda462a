import math
import random

import numpy as np
import pytest

from neqr_pprm.fit import (
    Family,
    FitModel,
    InsufficientPoints,
    InvalidParams,
    NonFiniteInput,
    fit,
    model_eval,
)


def test_model_eval_examples():
    assert model_eval(FitModel(Family.GROWTH, (1.33, 0.49)), 2) == pytest.approx(2.2589)
    decay = FitModel(Family.DECAY, (1.12, 1.60, 9.45, 2.10))
    assert model_eval(decay, 1000) == pytest.approx(2.10, abs=1e-12)
    flat = FitModel(Family.GROWTH, (1.0, 0.0))
    assert all(model_eval(flat, m) == 1 for m in range(10))


def test_negated_decay_approaches_from_below():
    ratio = FitModel(Family.DECAY, (2.43, 0.24, 4.54, 100.89), sign=-1)
    ys = model_eval(ratio, np.arange(2, 60))
    assert np.all(np.diff(ys) > 0)
    assert ys[-1] < 100.89
    assert ys[-1] == pytest.approx(100.89, abs=1e-3)


def test_invalid_params():
    with pytest.raises(InvalidParams):
        FitModel(Family.GROWTH, (1.3,))
    with pytest.raises(InvalidParams):
        FitModel(Family.DECAY, (0.9, 1.0, 0.0, 0.0))
    with pytest.raises(InvalidParams):
        FitModel(Family.DECAY, (1.5, -1.0, 0.0, 0.0))
    with pytest.raises(InvalidParams):
        FitModel(Family.GROWTH, (1.3, 0.0), sign=2)


def test_recovers_growth_exactly():
    pts = [(m, 1.33**m + 0.49) for m in range(2, 23, 2)]
    res = fit(pts, Family.GROWTH, (1.5, 0.0))
    assert res.converged
    assert abs(res.model.params[0] - 1.33) < 1e-6
    assert abs(res.model.params[1] - 0.49) < 1e-4


def test_true_params_converge_immediately():
    truth = FitModel(Family.GROWTH, (1.33, 0.49))
    pts = [(m, model_eval(truth, m)) for m in range(2, 23)]
    res = fit(pts, Family.GROWTH, truth.params)
    assert res.iterations <= 2 and res.residual_sum_squares < 1e-18
    truth = FitModel(Family.DECAY, (1.82, 0.24, 5.93, 52.27))
    pts = [(m, model_eval(truth, m)) for m in range(2, 23)]
    res = fit(pts, Family.DECAY, truth.params)
    assert res.iterations <= 2 and res.residual_sum_squares < 1e-18


def test_cost_history_non_increasing():
    rng = np.random.default_rng(4)
    truth = FitModel(Family.DECAY, (1.12, 1.60, 9.45, 2.10))
    ms = np.arange(2, 23)
    ys = model_eval(truth, ms) + rng.normal(0, 0.05, ms.size)
    res = fit(list(zip(ms, ys)), Family.DECAY)
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))
    assert res.residual_sum_squares == res.history[-1] >= 0


def test_order_independence():
    rng = np.random.default_rng(9)
    truth = FitModel(Family.DECAY, (1.82, 0.24, 5.93, 52.27))
    pts = [(m, model_eval(truth, m) + rng.normal(0, 0.2)) for m in range(2, 23)]
    shuffled = pts[:]
    random.Random(1).shuffle(shuffled)
    assert fit(pts, Family.DECAY) == fit(shuffled, Family.DECAY)


def test_negated_decay_fit():
    truth = FitModel(Family.DECAY, (2.43, 0.24, 4.54, 100.89), sign=-1)
    pts = [(m, model_eval(truth, m)) for m in range(2, 23)]
    res = fit(pts, Family.DECAY, sign=-1)
    assert res.model.params[3] == pytest.approx(100.89, abs=1e-3)
    assert res.residual_sum_squares < 1e-6


def test_input_errors():
    with pytest.raises(InsufficientPoints):
        fit([(1, 2.0), (2, 3.0)], Family.GROWTH)
    with pytest.raises(InsufficientPoints):
        fit([(m, 1.0) for m in range(4)], Family.DECAY)
    with pytest.raises(NonFiniteInput):
        fit([(1, 1.0), (2, math.nan), (3, 2.0)], Family.GROWTH)
    with pytest.raises(InvalidParams):
        fit([(1, 1.0), (2, 2.0), (3, 3.0)], Family.GROWTH, (0.5, 0.0))


def test_result_json():
    res = fit([(m, 1.33**m) for m in range(2, 12)], Family.GROWTH)
    import json

    obj = json.loads(res.to_json())
    assert set(obj) == {"family", "sign", "params", "rss", "iterations", "converged"}
    assert obj["family"] == "growth" and len(obj["params"]) == 2
