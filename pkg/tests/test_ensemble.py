import json
import math

import numpy as np
import pytest

from rpnb.data import permutation
from rpnb.ensemble import Combiner, Mode, RpnbConfig, RpnbModel
from rpnb.errors import (
    InvalidBatchError,
    InvalidClassError,
    InvalidDimensionError,
    InvalidParameterError,
)
from rpnb.gnb import GnbModel
from rpnb.projection import ProjectionMatrix, project


def brute_force_scores(model, x):
    """Sum over bases of log prior + per-feature Gaussian log densities, by loops."""
    scores = []
    for m in range(model.n_classes):
        total = 0.0
        for k in range(model.config.k):
            R = model.matrices[k].entries
            base = model.bases[k]
            counts = base.class_counts
            if base.prior_mode.value == "uniform":
                s = -math.log(model.n_classes)
            else:
                s = math.log((counts[m] + 1) / (counts.sum() + model.n_classes))
            for j in range(model.q):
                z = sum(x[i] * R[i, j] for i in range(model.p)) / math.sqrt(model.q)
                var = max(base.sigma2[m, j], base.variance_floor)
                s -= math.log(math.sqrt(2 * math.pi) * math.sqrt(var)) + 0.5 * (z - base.mu[m, j]) ** 2 / var
            total += s
        scores.append(total)
    return np.array(scores)


def randomize(model, rng):
    for base in model.bases:
        base.mu[:] = rng.normal(size=base.mu.shape)
        base.sigma2[:] = rng.uniform(0.2, 3.0, size=base.sigma2.shape)
    counts = rng.integers(0, 20, size=model.n_classes)
    model._counts[:] = counts


def state(model):
    return (model._mu.copy(), model._sigma2.copy(), model._counts.copy(), model.update_count)


def test_new_model_defaults():
    model = RpnbModel(RpnbConfig(k=200, seed=0), p=9, n_classes=2)
    assert model.q == 7
    assert len(model.matrices) == 200 and len(model.bases) == 200
    assert all(m.entries.shape == (9, 7) for m in model.matrices)
    assert all(np.all(b.mu == 0) and np.all(b.sigma2 == 1) for b in model.bases)
    assert model.update_count == model.seen_count == 0
    assert [m.seed for m in model.matrices[:3]] == [0, 1, 2]


def test_bases_are_views_of_shared_storage():
    model = RpnbModel(RpnbConfig(k=3, q=2), p=4, n_classes=2)
    model._mu[1, 0, 1] = 42.0
    assert model.bases[1].mu[0, 1] == 42.0


def test_single_base_is_projected_naive_bayes():
    rng = np.random.default_rng(3)
    model = RpnbModel(RpnbConfig(k=1, q=3, seed=9), p=5, n_classes=3)
    randomize(model, rng)
    g = GnbModel.from_arrays(model._mu[0].copy(), model._sigma2[0].copy(), model._counts[0].copy())
    for _ in range(10):
        x = rng.normal(size=5)
        z = project(model.matrices[0], x)
        np.testing.assert_allclose(model.predict(x).scores, g.log_posteriors(z), rtol=1e-12)


def test_same_seed_same_predictions():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(20, 6))
    y = rng.integers(0, 3, size=20)
    a = RpnbModel(RpnbConfig(k=7, seed=5), 6, 3)
    b = RpnbModel(RpnbConfig(k=7, seed=5), 6, 3)
    for x, label in zip(X, y):
        pa, pb = a.learn_one(x, int(label)), b.learn_one(x, int(label))
        assert pa.label == pb.label
        assert pa.scores.tobytes() == pb.scores.tobytes()


def test_nearest_mean_hand_case():
    model = RpnbModel(RpnbConfig(k=1, q=1), p=1, n_classes=2, matrices=[ProjectionMatrix.from_entries([[1.0]])])
    model.bases[0].mu[:, 0] = [0.0, 10.0]
    assert model.predict([0.1]).label == 0
    assert model.predict([9.0]).label == 1


def test_exact_tie_goes_to_smallest_class():
    model = RpnbModel(RpnbConfig(k=1, q=1), p=1, n_classes=2, matrices=[ProjectionMatrix.from_entries([[1.0]])])
    model.bases[0].mu[:, 0] = [-1.0, 1.0]
    pred = model.predict([0.0])
    assert pred.scores[0] == pred.scores[1]
    assert pred.label == 0


@pytest.mark.parametrize("prior", ["uniform", "empirical"])
def test_sum_rule_matches_brute_force(prior):
    rng = np.random.default_rng(12)
    model = RpnbModel(RpnbConfig(k=3, q=2, seed=4, prior_mode=prior), p=5, n_classes=3)
    randomize(model, rng)
    for _ in range(20):
        x = rng.normal(size=5)
        pred = model.predict(x)
        expected = brute_force_scores(model, x)
        np.testing.assert_allclose(pred.scores, expected, rtol=1e-10)
        assert pred.label == int(np.argmax(expected))


def test_majority_vote_counts_base_winners():
    rng = np.random.default_rng(2)
    model = RpnbModel(RpnbConfig(k=9, q=2, combiner=Combiner.VOTE), p=4, n_classes=3)
    randomize(model, rng)
    for _ in range(10):
        x = rng.normal(size=4)
        pred = model.predict(x)
        winners = [int(np.argmax(b.log_posteriors(project(m, x)))) for b, m in zip(model.bases, model.matrices)]
        expected = np.bincount(winners, minlength=3)
        np.testing.assert_array_equal(pred.scores, expected)
        assert pred.scores.sum() == 9
        assert pred.label == int(np.argmax(expected))


def test_vote_tie_goes_to_smallest_class():
    mats = [ProjectionMatrix.from_entries([[1.0]]) for _ in range(2)]
    model = RpnbModel(RpnbConfig(k=2, q=1, combiner="vote"), p=1, n_classes=2, matrices=mats)
    model.bases[0].mu[:, 0] = [0.0, 10.0]
    model.bases[1].mu[:, 0] = [10.0, 0.0]
    pred = model.predict([0.0])
    assert list(pred.scores) == [1.0, 1.0] and pred.label == 0


def test_correct_prediction_changes_nothing_but_seen_count():
    model = RpnbModel(RpnbConfig(k=4, q=2), p=3, n_classes=2)
    x = np.array([0.3, -0.2, 0.1])
    label = model.predict(x).label
    before = state(model)
    model.learn_one(x, label)
    after = state(model)
    for a, b in zip(before, after):
        assert np.array_equal(a, b)
    assert model.seen_count == 1


def test_mistake_updates_only_true_class_in_every_base():
    model = RpnbModel(RpnbConfig(k=5, q=2), p=3, n_classes=3)
    x = np.array([1.0, 2.0, -1.0])
    assert model.predict(x).label == 0
    mu0, s20, _, _ = state(model)
    model.learn_one(x, 2)
    Z = model.project(x)
    np.testing.assert_array_equal(model._mu[:, 2], Z)
    np.testing.assert_array_equal(model._sigma2[:, 2], 0.0)
    np.testing.assert_array_equal(model._mu[:, :2], mu0[:, :2])
    np.testing.assert_array_equal(model._sigma2[:, :2], s20[:, :2])
    assert list(model._counts[0]) == [0, 0, 1]
    assert model.update_count == 1 and model.seen_count == 1


def test_repeated_mistake_advances_step_count():
    model = RpnbModel(RpnbConfig(k=3, q=2, variance_floor=100.0), p=2, n_classes=2)
    x = np.array([4.0, -3.0])
    model._mu[:, 0] = model.project(x)
    # class 0 sits on x with unit variance; class 1's zero variance floors to 100
    model.learn_one(x, 1)
    model.learn_one(x, 1)
    assert model.update_count == 2
    assert list(model._counts[0]) == [0, 2]
    Z = model.project(x)
    np.testing.assert_allclose(model._mu[:, 1], Z, rtol=1e-15)
    np.testing.assert_array_equal(model._sigma2[:, 1], 0.0)


def test_second_update_hand_step():
    mats = [ProjectionMatrix.from_entries([[1.0]])]
    model = RpnbModel(RpnbConfig(k=1, q=1), p=1, n_classes=2, matrices=mats)
    model.learn_one([3.0], 1)          # predicted 0 by tie -> update, t = 1
    assert model.predict([7.0]).label == 0   # class 1 has floored variance at 3
    model.learn_one([7.0], 1)          # t = 2
    t = 2
    mu = ((t - 1) * 3.0 + 7.0) / t
    s2 = ((t - 1) * (0.0 + (3.0 - mu) ** 2) + (7.0 - mu) ** 2) / t
    assert model._mu[0, 1, 0] == pytest.approx(mu) == 5.0
    assert model._sigma2[0, 1, 0] == pytest.approx(s2) == 4.0


def _biased_model(mode, batch_size=4):
    config = RpnbConfig(k=3, q=2, mode=mode, batch_size=batch_size)
    model = RpnbModel(config, p=2, n_classes=3)
    # make class 1 dominant near the origin so rows get predicted as 1
    model._mu[:, 1] = 0.0
    model._sigma2[:, 1] = 1.0
    model._counts[:, 1] = 5
    model._sigma2[:, 0] = 1e-4
    model._mu[:, 0] = 50.0
    model._sigma2[:, 2] = 1e-4
    model._mu[:, 2] = -50.0
    return model


def test_learn_batch_no_updates_when_all_correct():
    model = _biased_model(Mode.MINI_BATCH)
    before = state(model)
    preds = model.learn_batch(np.zeros((3, 2)) + 0.1, [1, 1, 1])
    assert [p.label for p in preds] == [1, 1, 1]
    for a, b in zip(before, state(model)):
        assert np.array_equal(a, b)
    assert model.seen_count == 3


def test_learn_batch_groups_mistakes_by_true_class():
    model = _biased_model(Mode.MINI_BATCH)
    X = np.array([[0.1, 0.2], [0.3, -0.1], [-0.2, 0.0], [0.0, 0.05]])
    y = [0, 0, 2, 1]
    before_mu1 = model._mu[:, 1].copy()
    preds = model.learn_batch(X, y)
    assert [p.label for p in preds] == [1, 1, 1, 1]
    assert list(model._counts[0]) == [2, 5, 1]
    assert model.update_count == 3 and model.seen_count == 4
    Z = np.stack([model.project(x) for x in X])  # (n, K, q)
    np.testing.assert_allclose(model._mu[:, 0], Z[:2].mean(axis=0), rtol=1e-12)
    np.testing.assert_allclose(model._sigma2[:, 0], Z[:2].var(axis=0), rtol=1e-12)
    np.testing.assert_array_equal(model._mu[:, 2], Z[2])
    np.testing.assert_array_equal(model._mu[:, 1], before_mu1)


def test_learn_batch_predicts_with_pre_batch_model():
    model = _biased_model(Mode.MINI_BATCH)
    X = np.array([[0.1, 0.2]] * 3)
    preds = model.learn_batch(X, [0, 0, 0])
    # after the first row class 0 would win; within the batch it must not
    assert [p.label for p in preds] == [1, 1, 1]


def test_learn_batch_errors():
    model = _biased_model(Mode.MINI_BATCH)
    with pytest.raises(InvalidBatchError):
        model.learn_batch(np.zeros((3, 2)), [0, 1])
    with pytest.raises(InvalidBatchError):
        model.learn_batch(np.zeros((0, 2)), [])
    with pytest.raises(InvalidClassError):
        model.learn_batch(np.zeros((1, 2)), [3])


def test_mode_guards():
    with pytest.raises(InvalidParameterError):
        _biased_model(Mode.MINI_BATCH).learn_one([0.0, 0.0], 0)
    with pytest.raises(InvalidParameterError):
        _biased_model(Mode.ONE_BY_ONE).learn_batch(np.zeros((1, 2)), [0])


def test_batch_size_one_reproduces_one_by_one():
    rng = np.random.default_rng(7)
    X = np.vstack([rng.normal(c, 1.0 + c, size=(40, 6)) for c in range(3)])
    y = np.repeat(np.arange(3), 40)
    order = permutation(len(y), 3)
    a = RpnbModel(RpnbConfig(k=10, seed=2), 6, 3)
    b = RpnbModel(RpnbConfig(k=10, seed=2, mode="minibatch", batch_size=1), 6, 3)
    for i in order:
        pa = a.learn_one(X[i], int(y[i]))
        [pb] = b.learn_batch(X[i:i + 1], [int(y[i])])
        assert pa.label == pb.label
    np.testing.assert_allclose(a._mu, b._mu, rtol=1e-9)
    np.testing.assert_allclose(a._sigma2, b._sigma2, rtol=1e-9)
    assert a.update_count == b.update_count


def test_update_count_equals_mistakes():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(60, 4))
    y = (X[:, 0] > 0).astype(int)
    model = RpnbModel(RpnbConfig(k=5), 4, 2)
    mistakes = sum(model.learn_one(x, int(t)).label != t for x, t in zip(X, y))
    assert model.update_count == mistakes
    assert model.update_count <= model.seen_count == 60


def test_update_always_counts_every_observation():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(30, 4))
    model = RpnbModel(RpnbConfig(k=2, update_always=True), 4, 2)
    for x in X:
        model.learn_one(x, 0)
    assert model.update_count == 30
    Z = np.stack([model.project(x) for x in X])
    np.testing.assert_allclose(model._mu[:, 0], Z.mean(axis=0), rtol=1e-9)
    np.testing.assert_allclose(model._sigma2[:, 0], Z.var(axis=0), rtol=1e-9)


def test_equal_empirical_priors_do_not_change_labels():
    rng = np.random.default_rng(6)
    uni = RpnbModel(RpnbConfig(k=4, q=3, prior_mode="uniform"), 5, 3)
    emp = RpnbModel(RpnbConfig(k=4, q=3, prior_mode="empirical"), 5, 3)
    randomize(uni, rng)
    emp._mu[:], emp._sigma2[:] = uni._mu, uni._sigma2
    uni._counts[:] = 7
    emp._counts[:] = 7
    for _ in range(30):
        x = rng.normal(size=5) * 2
        assert uni.predict(x).label == emp.predict(x).label


def test_invalid_construction():
    for bad in (dict(k=0), dict(batch_size=0), dict(q=0), dict(sigma2_0=0.0), dict(scheme="sparse"), dict(seed=-1)):
        with pytest.raises(InvalidParameterError):
            RpnbConfig(**bad)
    with pytest.raises(InvalidParameterError):
        RpnbModel(RpnbConfig(k=1), p=0, n_classes=2)
    with pytest.raises(InvalidParameterError):
        RpnbModel(RpnbConfig(k=1), p=3, n_classes=1)


def test_dimension_and_class_errors():
    model = RpnbModel(RpnbConfig(k=2), 3, 2)
    with pytest.raises(InvalidDimensionError):
        model.predict([1.0, 2.0])
    with pytest.raises(InvalidClassError):
        model.learn_one([1.0, 2.0, 3.0], 2)


def test_snapshot_round_trip():
    rng = np.random.default_rng(10)
    model = RpnbModel(RpnbConfig(k=6, seed=11, prior_mode="empirical"), 7, 3)
    for x, t in zip(rng.normal(size=(50, 7)), rng.integers(0, 3, 50)):
        model.learn_one(x, int(t))
    doc = json.loads(json.dumps(model.to_dict()))
    assert doc["seed"] == 11 and doc["p"] == 7 and doc["M"] == 3 and len(doc["bases"]) == 6
    restored = RpnbModel.from_dict(doc)
    assert restored._mu.tobytes() == model._mu.tobytes()
    assert restored._sigma2.tobytes() == model._sigma2.tobytes()
    assert np.array_equal(restored._counts, model._counts)
    assert (restored.update_count, restored.seen_count) == (model.update_count, model.seen_count)
    x = rng.normal(size=7)
    assert restored.predict(x).scores.tobytes() == model.predict(x).scores.tobytes()
