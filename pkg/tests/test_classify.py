"""Linear softmax models, the pairwise arbiter, and the ensemble decision."""

import numpy as np
import pytest

from nishigraph import (EnsembleConfig, LinearModel, PairwiseArbiter, accuracy,
                        arbiter_train, confusion_matrix, ensemble_decide,
                        per_class_metrics, predict, predict_labels,
                        train_linear)


def blobs(seed=0, per=30, spread=0.3):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]])
    X = np.vstack([c + spread * rng.standard_normal((per, 2)) for c in centers])
    y = np.repeat([0, 1, 2], per)
    return X, y


def test_train_linear_separable_blobs():
    X, y = blobs()
    model = train_linear(X, y, seed=0)
    P = predict(model, X)
    assert P.shape == (90, 3)
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
    assert accuracy(y, predict_labels(model, X)) == 1.0


def test_train_linear_is_deterministic():
    X, y = blobs(3)
    m1 = train_linear(X, y, seed=5)
    m2 = train_linear(X, y, seed=5)
    assert np.array_equal(m1.W, m2.W)
    assert np.array_equal(m1.b, m2.b)


def test_predict_labels_uses_original_class_ids():
    X, y = blobs()
    relabeled = np.array([3, 7, 9])[y]
    model = train_linear(X, relabeled, seed=0)
    assert set(predict_labels(model, X)) <= {3, 7, 9}
    assert model.classes == [3, 7, 9]


def test_train_linear_rejects_single_class():
    with pytest.raises(ValueError):
        train_linear(np.zeros((5, 2)), np.zeros(5, dtype=int))


def test_linear_model_json_round_trip():
    X, y = blobs()
    model = train_linear(X, y, seed=0)
    back = LinearModel.from_json(model.to_json())
    assert np.allclose(back.W, model.W)
    assert np.allclose(back.b, model.b)
    assert back.classes == model.classes
    with pytest.raises(ValueError):
        LinearModel.from_json('{"kind": "other"}')


def test_arbiter_separates_a_confusable_pair():
    rng = np.random.default_rng(1)
    Xa = rng.standard_normal((40, 3)) + np.array([1.5, 0, 0])
    Xb = rng.standard_normal((40, 3)) - np.array([1.5, 0, 0])
    X = np.vstack([Xa, Xb])
    y = np.repeat([0, 1], 40)
    arb = arbiter_train(X, y, [(0, 1)], seed=0)
    assert arb.pairs() == [(0, 1)]
    correct = sum(arb.decide(x, 0, 1) == t for x, t in zip(X, y))
    assert correct >= 72  # 90 percent on the training pair


def test_arbiter_needs_enough_samples_per_class():
    X = np.zeros((12, 2))
    y = np.array([0] * 9 + [1] * 3)
    with pytest.raises(ValueError):
        arbiter_train(X, y, [(0, 1)])


def test_arbiter_falls_back_without_a_trained_pair():
    arb = PairwiseArbiter({})
    assert arb.decide(np.zeros(2), 4, 9) == 4


def test_ensemble_config_validation():
    with pytest.raises(ValueError):
        EnsembleConfig(mode="mean")
    with pytest.raises(ValueError):
        EnsembleConfig(margin_threshold=-0.1)


def test_majority_vote_beats_a_dissenter():
    P = [np.array([0.8, 0.1, 0.1]), np.array([0.6, 0.3, 0.1]),
         np.array([0.1, 0.7, 0.2])]
    assert ensemble_decide(P, EnsembleConfig()) == 0


def test_three_way_split_without_arbiter_soft_averages():
    P = [np.array([0.9, 0.05, 0.05]), np.array([0.1, 0.6, 0.3]),
         np.array([0.2, 0.2, 0.6])]
    # votes 0, 1, 2; the mean posterior peaks at class 0
    assert ensemble_decide(P, EnsembleConfig()) == 0


def test_three_way_split_with_arbiter_hands_over_top_two():
    P = [np.array([0.9, 0.05, 0.05]), np.array([0.1, 0.6, 0.3]),
         np.array([0.2, 0.2, 0.6])]
    seen = []

    def arb(a, b):
        seen.append((a, b))
        return b

    cfg = EnsembleConfig(arbiter=arb)
    out = ensemble_decide(P, cfg)
    # mean posterior is [0.4, 0.283, 0.317]: top two are classes 0 and 2
    assert seen == [(0, 2)]
    assert out == 2


def test_margin_threshold_triggers_arbiter():
    P = [np.array([0.51, 0.49]), np.array([0.52, 0.48]),
         np.array([0.49, 0.51])]
    calls = []

    def arb(a, b):
        calls.append((a, b))
        return a

    assert ensemble_decide(P, EnsembleConfig(margin_threshold=0.2,
                                             arbiter=arb)) == 0
    assert calls == [(0, 1)]
    # without an arbiter the majority decision stands
    assert ensemble_decide(P, EnsembleConfig(margin_threshold=0.2)) == 0


def test_soft_mode_averages_posteriors():
    P = [np.array([0.6, 0.4]), np.array([0.1, 0.9]), np.array([0.2, 0.8])]
    assert ensemble_decide(P, EnsembleConfig(mode="soft")) == 1


def test_ensemble_decide_validation():
    with pytest.raises(ValueError):
        ensemble_decide([np.array([1.0])] * 2, EnsembleConfig())
    with pytest.raises(ValueError):
        ensemble_decide([np.array([1.0]), np.array([1.0]),
                         np.array([0.5, 0.5])], EnsembleConfig())


def test_metrics_hand_computed_case():
    y_true = [0, 0, 1, 1, 2, 2]
    y_pred = [0, 1, 1, 1, 2, 0]
    classes = [0, 1, 2]
    M = confusion_matrix(y_true, y_pred, classes)
    assert M.tolist() == [[1, 1, 0], [0, 2, 0], [1, 0, 1]]
    assert accuracy(y_true, y_pred) == pytest.approx(4 / 6)
    m = per_class_metrics(y_true, y_pred, classes)
    assert m[0]["precision"] == pytest.approx(0.5)
    assert m[0]["recall"] == pytest.approx(0.5)
    assert m[1]["precision"] == pytest.approx(2 / 3)
    assert m[1]["recall"] == pytest.approx(1.0)
    assert m[2]["precision"] == pytest.approx(1.0)
    assert m[2]["recall"] == pytest.approx(0.5)
    assert m[2]["f1"] == pytest.approx(2 / 3)
    assert all(m[c]["support"] == 2 for c in classes)
    assert accuracy([], []) == 0.0
