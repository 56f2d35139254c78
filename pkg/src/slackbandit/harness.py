"""Seeded policy-vs-adversary games, pseudo-regret and replicate aggregation."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import adversary as adv
from .action_space import ActionSet
from .errors import ConfigurationError, InvalidHorizonError
from .policies import NnmfConfig, Policy


@dataclass
class PolicyConfig:
    algo: str
    eta: float | None = None
    alpha: float | None = None
    nnmf: NnmfConfig = field(default_factory=NnmfConfig)
    slack_source: str = "estimate"


@dataclass
class AdversaryConfig:
    """Recipe for a per-replica adversary.

    ``fixed_loss`` / ``ratings`` are shared read-only across replicas; the
    stochastic stream is seeded from the replica seed.
    """

    kind: str
    fixed_loss: np.ndarray | None = None
    ratings: np.ndarray | None = None

    def build(self, dim: int, seed: int) -> adv.AdversaryState:
        if self.kind == adv.FIXED:
            return adv.AdversaryState(adv.FIXED, dim=dim, fixed_loss=self.fixed_loss)
        if self.kind == adv.STOCHASTIC:
            return adv.AdversaryState(adv.STOCHASTIC, dim=dim, rng_seed=seed)
        if self.kind == adv.DATASET:
            return adv.AdversaryState(adv.DATASET, dim=dim, ratings=self.ratings)
        raise ConfigurationError(f"unknown adversary kind {self.kind!r}")

    @property
    def dim(self) -> int | None:
        if self.fixed_loss is not None:
            return len(self.fixed_loss)
        if self.ratings is not None:
            return np.asarray(self.ratings).shape[1]
        return None


@dataclass
class GameRecord:
    chosen_indices: np.ndarray
    scalar_losses: np.ndarray
    loss_log: np.ndarray
    seed: int
    trace: list | None = None

    @property
    def horizon(self) -> int:
        return len(self.chosen_indices)

    @property
    def cum_loss(self) -> np.ndarray:
        return np.cumsum(self.scalar_losses)


@dataclass
class RegretSeries:
    mean: np.ndarray
    std: np.ndarray
    n_runs: int = 1
    per_run: np.ndarray | None = None  # n_runs x T

    def __len__(self):
        return len(self.mean)

    @property
    def per_round_cum_regret(self) -> np.ndarray:
        return self.mean


def _streams(seed: int):
    """Independent generators for action sampling and policy internals."""
    play, internal = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(play), np.random.default_rng(internal)


def run_game(policy_cfg: PolicyConfig, adversary_cfg: AdversaryConfig, actions: ActionSet, T: int,
             seed: int, verbose: bool = False, debug: bool = False, policy=None) -> GameRecord:
    """Play T rounds: sample from p_t, query the adversary, feed back a_t . l_t only.

    ``policy`` overrides the learner built from ``policy_cfg``; anything with
    a ``probabilities`` vector and an ``update(index, scalar)`` method works.
    """
    if T < 1:
        raise InvalidHorizonError(f"horizon must be >= 1, got {T}")
    dim = adversary_cfg.dim
    if dim is not None and dim != actions.dim:
        raise ConfigurationError(f"adversary has dimension {dim}, action set has {actions.dim}")
    play_rng, policy_rng = _streams(seed)
    if policy is None:
        policy = Policy(policy_cfg.algo, actions, T, eta=policy_cfg.eta, alpha=policy_cfg.alpha,
                        nnmf=policy_cfg.nnmf, rng=policy_rng, slack_source=policy_cfg.slack_source)
    opponent = adversary_cfg.build(actions.dim, seed)

    chosen = np.empty(T, dtype=np.int64)
    scalars = np.empty(T)
    losses = np.empty((T, actions.dim))
    trace = [] if verbose else None
    last = None
    A = actions.matrix
    for t in range(T):
        p = policy.probabilities
        k = int(play_rng.choice(actions.n, p=p))
        loss = adv.next_loss(opponent, t + 1, last)
        y = float(A[k] @ loss)
        chosen[t], scalars[t], losses[t] = k, y, loss
        if debug:
            assert np.all((loss >= 0) & (loss <= 1)), f"loss out of range at round {t + 1}"
            assert abs(scalars[t] - A[chosen[t]] @ losses[t]) <= 1e-12
        policy.update(k, y)
        if verbose:
            state = getattr(policy, "state", None)
            row = {"round": t + 1, "action": k, "scalar_loss": y,
                   "weights": np.array(state.weights if state is not None else p, copy=True)}
            if state is not None:
                row.update(state.diagnostics)
            trace.append(row)
        last = k
    return GameRecord(chosen, scalars, losses, seed, trace)


def pseudo_regret(rec: GameRecord, actions: ActionSet) -> np.ndarray:
    """Cumulative regret with the best fixed action re-chosen on every prefix.

    At t = T this is exactly the realized-loss form of the pseudo-regret.
    """
    cum_actions = np.cumsum(rec.loss_log, axis=0) @ actions.matrix.T  # T x N
    return np.cumsum(rec.scalar_losses) - cum_actions.min(axis=1)


@dataclass
class ExperimentSpec:
    """Everything one replica needs; picklable for worker processes."""

    policy: PolicyConfig
    adversary: AdversaryConfig
    actions: ActionSet
    horizon: int


def _replica(args):
    spec, seed = args
    rec = run_game(spec.policy, spec.adversary, spec.actions, spec.horizon, seed)
    return pseudo_regret(rec, spec.actions)


def aggregate(series) -> RegretSeries:
    runs = np.vstack(series)
    return RegretSeries(runs.mean(axis=0), runs.std(axis=0), runs.shape[0], runs)


def run_replicated(spec: ExperimentSpec, n_runs: int, base_seed: int = 0, parallelism: int = 1) -> RegretSeries:
    """Replicas use seeds base_seed .. base_seed + n_runs - 1.

    Results are reduced in seed order whatever the scheduling, so the
    aggregate is bit-identical for any ``parallelism``.
    """
    if n_runs < 1:
        raise ConfigurationError(f"n_runs must be >= 1, got {n_runs}")
    jobs = [(spec, base_seed + i) for i in range(n_runs)]
    if parallelism > 1 and n_runs > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            series = list(pool.map(_replica, jobs))
    else:
        series = [_replica(job) for job in jobs]
    return aggregate(series)
