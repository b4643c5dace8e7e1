import math

import numpy as np
import pytest

from atree.boosting import (BoostConfig, BoostedClassifier, DecisionStump,
                            adaboost_train, error_bound, prob_negative,
                            prob_positive, strong_score, train_stump)
from atree.errors import ValidationError
from oracles import brute_force_stump

# Unbalanced four-corner pattern: the best stump is the constant +1 vote,
# which still misclassifies the two negative corners (weight 0.25).
XOR_X = np.array([[0.0, 0.0]] * 4 + [[1.0, 1.0]] * 2 + [[0.0, 1.0], [1.0, 0.0]])
XOR_Y = np.array([1, 1, 1, 1, 1, 1, -1, -1])
XOR_W = np.full(8, 1 / 8)


class TestTrainStump:
    def test_separable_1d(self):
        X = np.array([[-1.0], [0.0], [1.0], [2.0]])
        y = np.array([1, 1, -1, -1])
        stump, err = train_stump(X, y, np.full(4, 0.25))
        assert (stump.feature_index, stump.threshold, stump.polarity) == (0, 0.5, -1)
        assert err == 0.0

    def test_xor_pattern_matches_brute_force(self):
        stump, err = train_stump(XOR_X, XOR_Y, XOR_W)
        oracle = brute_force_stump(XOR_X, XOR_Y, XOR_W)
        assert err == pytest.approx(0.25, abs=1e-15)
        assert (err, stump.feature_index, stump.threshold, stump.polarity) == oracle

    def test_concentrated_weight_dominates(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(11, 3))
        y = np.where(rng.random(11) > 0.5, 1, -1)
        y[0] = 1
        w = np.full(11, 0.003)
        w[0] = 0.97
        stump, err = train_stump(X, y, w)
        assert stump.predict(X[0]) == 1
        assert err <= 0.03 + 1e-12

    def test_matches_brute_force_on_random_data(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = int(rng.integers(5, 60))
            d = int(rng.integers(1, 5))
            X = rng.normal(size=(n, d))
            y = np.where(rng.random(n) > 0.5, 1, -1)
            w = rng.uniform(0.1, 1.0, size=n)
            w /= w.sum()
            stump, err = train_stump(X, y, w)
            o_err, o_f, o_t, o_p = brute_force_stump(X, y, w)
            assert (stump.feature_index, stump.threshold, stump.polarity) == (o_f, o_t, o_p)
            assert err == o_err

    def test_all_labels_identical_gives_zero_error_constant(self):
        X = np.array([[1.0], [2.0], [3.0]])
        y = np.array([1, 1, 1])
        stump, err = train_stump(X, y, np.full(3, 1 / 3))
        assert err == 0.0
        assert all(stump.predict(row) == 1 for row in X)

    def test_tie_breaks_to_lowest_feature(self):
        # both features separate perfectly; feature 0 must win
        X = np.array([[0.0, 0.0], [1.0, 1.0]])
        y = np.array([-1, 1])
        stump, err = train_stump(X, y, np.array([0.5, 0.5]))
        assert err == 0.0
        assert stump.feature_index == 0


class TestAdaboost:
    def test_alpha_matches_formula_at_quarter_error(self):
        model = adaboost_train(XOR_X, XOR_Y, XOR_W, BoostConfig(max_rounds=1))
        assert model.round_errors[0] == pytest.approx(0.25, abs=1e-15)
        expected = 0.5 * math.log((1 - 0.25) / 0.25)   # 0.5*ln(3)
        assert abs(model.rounds[0][0] - expected) < 1e-12
        assert abs(expected - 0.549306144334) < 5e-13

    def test_separable_data_stops_after_one_perfect_round(self):
        X = np.array([[-1.0], [0.0], [1.0], [2.0]])
        y = np.array([1, 1, -1, -1])
        model = adaboost_train(X, y, np.full(4, 0.25), BoostConfig(max_rounds=50))
        assert len(model.rounds) == 1
        assert model.round_errors == [0.0]
        assert not model.exited_early
        preds = [1 if strong_score(model, row) > 0 else -1 for row in X]
        assert preds == y.tolist()

    def test_gamma_exit_discards_round_and_keeps_none(self):
        # alternating labels along one feature: every stump stays >= 0.49
        m = 100
        X = np.arange(m, dtype=float).reshape(-1, 1)
        y = np.where(np.arange(m) % 2 == 0, 1, -1)
        w = np.full(m, 1 / m)
        best_err = brute_force_stump(X, y, w)[0]
        assert best_err >= 0.49
        model = adaboost_train(X, y, w, BoostConfig(max_rounds=10, gamma=0.48))
        assert model.exited_early
        assert model.rounds == []
        assert model.round_errors == []

    def test_single_label_input_flagged_pure(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([1, 1])
        model = adaboost_train(X, y, np.array([0.5, 0.5]), BoostConfig())
        assert model.pure
        assert len(model.rounds) == 1
        assert strong_score(model, np.array([5.0])) > 10

    def test_reweighting_identity_half_error_next_round(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(40, 3))
        y = np.where(X @ np.array([1.0, -0.5, 0.2]) + 0.4 * rng.normal(size=40) > 0, 1, -1)
        w = np.full(40, 1 / 40)
        model = adaboost_train(X, y, w, BoostConfig(max_rounds=8))
        current = w.copy()
        for t, (alpha, stump) in enumerate(model.rounds):
            eps = model.round_errors[t]
            if eps == 0.0:
                break
            pred = stump.predict_batch(X)
            nxt = current * np.exp(-alpha * y * pred)
            nxt /= nxt.sum()
            assert abs(nxt[pred != y].sum() - 0.5) < 1e-9
            current = nxt

    def test_alpha_positive_for_every_retained_round(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            X = rng.normal(size=(30, 2))
            y = np.where(rng.random(30) > 0.5, 1, -1)
            if len(np.unique(y)) < 2:
                continue
            model = adaboost_train(X, y, np.full(30, 1 / 30), BoostConfig(max_rounds=12))
            assert all(alpha > 0 for alpha, _ in model.rounds)

    def test_bad_labels_rejected(self):
        with pytest.raises(ValidationError):
            adaboost_train(np.zeros((2, 1)), np.array([0, 1]), np.array([0.5, 0.5]),
                           BoostConfig())

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            BoostConfig(gamma=0.6)
        with pytest.raises(ValidationError):
            BoostConfig(max_rounds=0)


class TestScoring:
    def _stump_always_positive(self):
        return DecisionStump(0, -10.0, 1)

    def test_empty_model_scores_zero(self):
        assert strong_score(BoostedClassifier(), np.array([1.0])) == 0.0

    def test_single_round_score(self):
        model = BoostedClassifier(rounds=[(0.5, self._stump_always_positive())])
        assert strong_score(model, np.array([0.0])) == 0.5

    def test_two_round_score_arithmetic(self):
        up = self._stump_always_positive()
        down = DecisionStump(0, 10.0, 1)   # predicts -1 below its threshold
        model = BoostedClassifier(rounds=[(0.5, up), (0.3, down)])
        assert strong_score(model, np.array([0.0])) == pytest.approx(0.2, abs=1e-15)

    def test_dimension_mismatch_rejected(self):
        model = BoostedClassifier(rounds=[(1.0, DecisionStump(2, 0.0, 1))])
        with pytest.raises(ValidationError):
            strong_score(model, np.array([1.0, 2.0]))

    def test_prob_half_at_zero_score(self):
        assert prob_positive(BoostedClassifier(), np.array([0.0])) == 0.5

    def test_prob_three_quarters_at_log_three(self):
        model = BoostedClassifier(rounds=[(math.log(3.0), self._stump_always_positive())])
        expected = 1.0 / (1.0 + math.exp(-math.log(3.0)))
        p = prob_positive(model, np.array([0.0]))
        assert p == pytest.approx(expected, abs=1e-15)
        assert p == pytest.approx(0.75, abs=1e-12)

    def test_saturated_scores_stay_inside_unit_interval(self):
        for sign in (1, -1):
            model = BoostedClassifier(rounds=[(800.0, DecisionStump(0, -10.0, sign))])
            p = prob_positive(model, np.array([0.0]))
            assert 0.0 < p < 1.0

    def test_prob_sides_sum_to_one(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(25, 2))
        y = np.where(X[:, 0] > 0, 1, -1)
        model = adaboost_train(X, y, np.full(25, 1 / 25), BoostConfig(max_rounds=5))
        for row in X:
            total = prob_positive(model, row) + prob_negative(model, row)
            assert abs(total - 1.0) < 1e-12


class TestErrorBound:
    def test_single_round_value(self):
        model = BoostedClassifier(round_errors=[0.25])
        assert error_bound(model) == pytest.approx(2.0 * math.sqrt(0.25 * 0.75), abs=1e-15)
        assert error_bound(model) == pytest.approx(0.8660254037844386, abs=1e-12)

    def test_zero_error_round_zeroes_bound(self):
        model = BoostedClassifier(round_errors=[0.3, 0.0, 0.4])
        assert error_bound(model) == 0.0

    def test_half_error_rounds_saturate_at_one(self):
        model = BoostedClassifier(round_errors=[0.5, 0.5, 0.5])
        assert error_bound(model) == pytest.approx(1.0, abs=1e-15)

    def test_requires_a_round(self):
        with pytest.raises(ValidationError):
            error_bound(BoostedClassifier())

    def test_bounds_empirical_weighted_error(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            n = int(rng.integers(20, 80))
            X = rng.normal(size=(n, 3))
            y = np.where(X @ rng.normal(size=3) + 0.5 * rng.normal(size=n) > 0, 1, -1)
            if len(np.unique(y)) < 2:
                continue
            w = np.full(n, 1 / n)
            model = adaboost_train(X, y, w, BoostConfig(max_rounds=10))
            if not model.rounds:
                continue
            h = np.zeros(n)
            for alpha, stump in model.rounds:
                h += alpha * stump.predict_batch(X)
            empirical = w[np.where(h > 0, 1, -1) != y].sum()
            assert empirical <= error_bound(model) + 1e-9
