import numpy as np
import pytest

from slackbandit import adversary as adv
from slackbandit.action_space import ActionSet, canonical_basis, hypercube_actions
from slackbandit.errors import ConfigurationError, InvalidHorizonError
from slackbandit.harness import (
    AdversaryConfig,
    ExperimentSpec,
    GameRecord,
    PolicyConfig,
    aggregate,
    pseudo_regret,
    run_game,
    run_replicated,
)


class Scripted:
    """Point-mass policy that plays a fixed sequence of action indices."""

    def __init__(self, n, script):
        self.n, self.script, self.t = n, list(script), 0
        self.seen = []

    @property
    def probabilities(self):
        p = np.zeros(self.n)
        p[self.script[self.t]] = 1.0
        return p

    def update(self, k, y):
        self.seen.append((k, y))
        self.t += 1


def fixed_cfg(loss):
    return AdversaryConfig(adv.FIXED, fixed_loss=np.asarray(loss, dtype=float))


class TestRunGame:
    def test_single_action_forced(self):
        rec = run_game(PolicyConfig("extexp2"), fixed_cfg([0.4, 0.2]), ActionSet([[1, 1]]), 20, seed=0)
        assert rec.chosen_indices.tolist() == [0] * 20

    @pytest.mark.parametrize("algo", ["extexp", "extexp2", "exp2", "exp3", "exp3p", "combband"])
    def test_deterministic(self, algo):
        A = canonical_basis(3)
        a = run_game(PolicyConfig(algo), fixed_cfg([0.1, 0.5, 0.9]), A, 40, seed=5)
        b = run_game(PolicyConfig(algo), fixed_cfg([0.1, 0.5, 0.9]), A, 40, seed=5)
        np.testing.assert_array_equal(a.chosen_indices, b.chosen_indices)
        np.testing.assert_array_equal(a.scalar_losses, b.scalar_losses)
        np.testing.assert_array_equal(a.loss_log, b.loss_log)

    def test_three_round_trace(self):
        A = canonical_basis(2)
        pol = Scripted(2, [1, 0, 1])
        rec = run_game(None, fixed_cfg([0.25, 0.75]), A, 3, seed=1, policy=pol, debug=True)
        assert rec.chosen_indices.tolist() == [1, 0, 1]
        assert rec.scalar_losses.tolist() == [0.75, 0.25, 0.75]
        assert pol.seen == [(1, 0.75), (0, 0.25), (1, 0.75)]
        np.testing.assert_array_equal(rec.loss_log, [[0.25, 0.75]] * 3)
        np.testing.assert_allclose(rec.cum_loss, [0.75, 1.0, 1.75])

    def test_dataset_adversary_is_reactive(self):
        ratings = np.array([[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]])
        pol = Scripted(2, [0, 1, 1, 0])
        rec = run_game(None, AdversaryConfig(adv.DATASET, ratings=ratings), canonical_basis(2), 4, 0, policy=pol)
        # row (last + t) mod 3 with last = 0 before round 1
        expected_rows = [(0 + 1) % 3, (0 + 2) % 3, (1 + 3) % 3, (1 + 4) % 3]
        np.testing.assert_array_equal(rec.loss_log, ratings[expected_rows])

    def test_scalar_consistency(self):
        A = hypercube_actions(4, 15)
        rec = run_game(PolicyConfig("exp2"), AdversaryConfig(adv.STOCHASTIC), A, 200, seed=3, debug=True)
        np.testing.assert_allclose(rec.scalar_losses, np.einsum("td,td->t", A.matrix[rec.chosen_indices], rec.loss_log),
                                   atol=1e-12)
        assert np.all((rec.loss_log >= 0) & (rec.loss_log <= 1))

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            run_game(PolicyConfig("exp2"), fixed_cfg([0.1, 0.2, 0.3]), canonical_basis(2), 5, 0)

    def test_bad_horizon(self):
        with pytest.raises(InvalidHorizonError):
            run_game(PolicyConfig("exp2"), fixed_cfg([0.1, 0.2]), canonical_basis(2), 0, 0)

    def test_verbose_trace(self):
        rec = run_game(PolicyConfig("extexp2"), fixed_cfg([0.1, 0.2, 0.7]), canonical_basis(3), 5, 0, verbose=True)
        assert len(rec.trace) == 5
        assert {"rank", "rel_error", "entropy", "log_support", "support", "weights"} <= set(rec.trace[0])


class TestPseudoRegret:
    def _record(self, chosen, loss_log, A):
        chosen = np.asarray(chosen)
        loss_log = np.asarray(loss_log, dtype=float)
        scal = np.einsum("td,td->t", A.matrix[chosen], loss_log)
        return GameRecord(chosen, scal, loss_log, seed=0)

    def test_zero_losses(self):
        A = canonical_basis(3)
        rec = self._record([0, 1, 2, 0], np.zeros((4, 3)), A)
        np.testing.assert_array_equal(pseudo_regret(rec, A), np.zeros(4))

    def test_best_action_every_round(self):
        A = hypercube_actions(3, 7)
        rec = self._record([1] * 6, np.tile([0.9, 0.05, 0.7], (6, 1)), A)
        np.testing.assert_allclose(pseudo_regret(rec, A), np.zeros(6), atol=1e-12)

    def test_alternating_two_arms(self):
        A = canonical_basis(2)
        rec = self._record([0, 1, 0, 1], np.tile([0.2, 0.9], (4, 1)), A)
        # play sums 0.2, 1.1, 1.3, 2.2 against best prefix sums 0.2, 0.4, 0.6, 0.8
        np.testing.assert_allclose(pseudo_regret(rec, A), [0.0, 0.7, 0.7, 1.4], atol=1e-12)

    def test_final_value_matches_comparator(self):
        A = hypercube_actions(3, 7)
        rec = run_game(PolicyConfig("exp2"), AdversaryConfig(adv.STOCHASTIC), A, 50, seed=2)
        expected = rec.scalar_losses.sum() - adv.best_fixed_action_value(A, rec.loss_log)
        assert pseudo_regret(rec, A)[-1] == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("algo", ["extexp2", "exp2", "combband"])
    def test_non_decreasing_under_fixed_losses(self, algo):
        A = hypercube_actions(3, 7)
        rec = run_game(PolicyConfig(algo), fixed_cfg([0.3, 0.1, 0.8]), A, 300, seed=4)
        assert np.all(np.diff(pseudo_regret(rec, A)) >= -1e-12)


class TestReplicated:
    def spec(self, algo="exp3", T=60):
        return ExperimentSpec(PolicyConfig(algo), fixed_cfg([0.2, 0.5, 0.8, 0.4]), canonical_basis(4), T)

    def test_one_run(self):
        s = self.spec()
        agg = run_replicated(s, 1, base_seed=7)
        single = pseudo_regret(run_game(s.policy, s.adversary, s.actions, s.horizon, 7), s.actions)
        np.testing.assert_array_equal(agg.mean, single)
        np.testing.assert_array_equal(agg.std, np.zeros(s.horizon))

    def test_no_variance_when_deterministic(self):
        s = ExperimentSpec(PolicyConfig("exp3"), fixed_cfg([0.3]), canonical_basis(1), 30)
        agg = run_replicated(s, 5)
        np.testing.assert_array_equal(agg.std, np.zeros(30))

    def test_mean_recomputed(self):
        s = self.spec("exp2")
        agg = run_replicated(s, 6, base_seed=3)
        runs = [pseudo_regret(run_game(s.policy, s.adversary, s.actions, s.horizon, 3 + i), s.actions)
                for i in range(6)]
        manual = [sum(r[t] for r in runs) / 6 for t in range(s.horizon)]
        np.testing.assert_allclose(agg.mean, manual, atol=1e-12, rtol=0)
        np.testing.assert_array_equal(agg.per_run, np.vstack(runs))

    def test_parallel_matches_serial(self):
        s = self.spec("extexp2", T=30)
        a = run_replicated(s, 3, base_seed=1, parallelism=1)
        b = run_replicated(s, 3, base_seed=1, parallelism=2)
        np.testing.assert_array_equal(a.mean, b.mean)
        np.testing.assert_array_equal(a.std, b.std)

    def test_needs_a_run(self):
        with pytest.raises(ConfigurationError):
            run_replicated(self.spec(), 0)

    def test_aggregate_order(self):
        agg = aggregate([np.array([1.0, 2.0]), np.array([3.0, 4.0])])
        np.testing.assert_array_equal(agg.mean, [2.0, 3.0])
        np.testing.assert_array_equal(agg.std, [1.0, 1.0])
