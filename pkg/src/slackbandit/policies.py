"""Exponential-weights learners over combinatorial action sets.

Two slack-regularized learners:

* ``extexp``  - slack-weighted exponential update with uniform mixing; the
  non-negative rank of the recent weight matrix is tracked every round.
* ``extexp2`` - same update driven by the covariance loss estimate, with
  exploration drawn from a rank-1 term of the weight matrix factorization.

and four baselines: ``exp2``, ``exp3``, ``exp3p`` and ``combband``.

Each learner is a pair (state, step function). :func:`make_policy` bundles
them behind a small object interface used by the game harness.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .action_space import ActionSet
from .errors import ConfigurationError, DegenerateFactorizationError, PreconditionError, UnsupportedActionSetError
from .nnmf import exploration_entropy, factorize, min_nonneg_rank, sample_exploration
from .slack import SlackWeightMatrix, append_round, check_simplex, exp_weight_update, slack_vector

log = logging.getLogger(__name__)

ALGORITHMS = ("extexp", "extexp2", "exp2", "exp3", "exp3p", "combband")
PINV_RTOL = 1e-10


@dataclass
class NnmfConfig:
    tol: float = 1e-3  # rank-search acceptance; per-sweep improvement stop for single factorizations
    r_max: int | None = None  # None -> 2d
    restarts: int = 3
    max_iter: int = 500
    window: int = 64
    stop_tol: float = 1e-6  # per-sweep improvement stop inside the rank search


@dataclass
class PolicyState:
    weights: np.ndarray
    play_dist: np.ndarray
    eta: float
    alpha: float
    rank: int
    delta: int
    slack_matrix: SlackWeightMatrix
    explore: np.ndarray  # mixing distribution x of the current round
    round: int = 0
    log_weights: np.ndarray | None = None  # cumulative log-weights (baselines)
    beta: float = 0.0  # Exp3.P confidence bonus
    slack_source: str = "estimate"  # extexp2: "estimate" uses a.l_hat, "observed" the scalar
    diagnostics: dict = field(default_factory=dict)


@dataclass
class CovarianceState:
    P: np.ndarray
    pinv_P: np.ndarray
    rank_P: int


def default_eta(n_actions: int, horizon: int) -> float:
    return math.sqrt(2.0 * math.log(n_actions) / (horizon * n_actions))


def default_alpha(n_actions: int, horizon: int) -> float:
    return min(1.0, math.sqrt(n_actions * math.log(n_actions) / horizon))


def uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def _softmax(logw):
    w = np.exp(logw - logw.max())
    return w / w.sum()


def mix_distribution(w, x, alpha: float) -> np.ndarray:
    """Convex combination alpha * x + (1 - alpha) * w of two distributions."""
    w = check_simplex(w, "w")
    x = check_simplex(x, "x")
    if w.shape != x.shape:
        raise PreconditionError(f"w has shape {w.shape}, x has {x.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise PreconditionError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha * x + (1.0 - alpha) * w


def covariance_of(p, actions: ActionSet) -> CovarianceState:
    """Second-moment matrix sum_i p_i a_i a_i^T and its eigen-cutoff pseudo-inverse."""
    p = check_simplex(p)
    A = actions.matrix
    P = (A.T * p) @ A
    P = 0.5 * (P + P.T)
    vals, vecs = np.linalg.eigh(P)
    top = vals.max()
    keep = vals > PINV_RTOL * top if top > 0 else np.zeros_like(vals, dtype=bool)
    V = vecs[:, keep]
    pinv = (V / vals[keep]) @ V.T
    return CovarianceState(P, 0.5 * (pinv + pinv.T), int(keep.sum()))


def estimate_loss(cov: CovarianceState, a_played, scalar_loss: float) -> np.ndarray:
    """l_hat = P^+ a (a . l); unbiased on the span of the actions."""
    return cov.pinv_P @ np.asarray(a_played, dtype=float) * float(scalar_loss)


def init_state(actions: ActionSet, horizon: int, eta: float | None = None, alpha: float | None = None,
               window: int | None = 64) -> PolicyState:
    """Uniform start over the N actions, rank initialised to the set's dimensional rank."""
    n = actions.n
    eta = default_eta(n, horizon) if eta is None else float(eta)
    alpha = default_alpha(n, horizon) if alpha is None else float(alpha)
    if eta < 0:
        raise ConfigurationError(f"eta must be >= 0, got {eta}")
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError(f"alpha must lie in [0, 1], got {alpha}")
    p = uniform(n)
    return PolicyState(
        weights=p.copy(), play_dist=p.copy(), eta=eta, alpha=alpha,
        rank=actions.delta, delta=actions.delta,
        slack_matrix=SlackWeightMatrix(n, maxlen=window),
        explore=p.copy(), log_weights=np.zeros(n),
    )


def _nnmf_seed(rng):
    return int(rng.integers(2**63 - 1))


def extended_exp_step(state: PolicyState, actions: ActionSet, played: int, observed: float,
                      nnmf_cfg: NnmfConfig, rng) -> PolicyState:
    """One round of the slack-weighted learner with uniform mixing.

    ``played`` is the index of the action played this round and ``observed``
    its scalar loss a_t . l_t.
    """
    a = actions[played]
    slacks = slack_vector(a, observed, actions)
    w = exp_weight_update(state.play_dist, slacks, state.eta)
    append_round(state.slack_matrix, w)
    r_max = nnmf_cfg.r_max or 2 * actions.dim
    state.rank = min_nonneg_rank(state.slack_matrix.window(nnmf_cfg.window), tol=nnmf_cfg.tol,
                                 r_max=r_max, restarts=nnmf_cfg.restarts,
                                 seed=_nnmf_seed(rng), max_iter=nnmf_cfg.max_iter,
                                 stop_tol=nnmf_cfg.stop_tol)
    x = uniform(actions.n)
    state.weights = w
    state.explore = x
    state.play_dist = mix_distribution(w, x, state.alpha)
    state.round += 1
    state.diagnostics = {"rank": state.rank}
    return state


def extended_exp2_step(state: PolicyState, cov: CovarianceState, actions: ActionSet, played: int,
                       observed: float, nnmf_cfg: NnmfConfig, rng) -> tuple[PolicyState, CovarianceState]:
    """One round of the sampling variant.

    The loss is reconstructed with the covariance estimator, actions are
    re-weighted by their slack to the reconstructed hyperplane, the recent
    weight matrix is factorized at the current rank and one rank-1 term
    supplies the exploration distribution for the next round.
    """
    a = actions[played]
    l_hat = estimate_loss(cov, a, observed)
    offset = float(a @ l_hat) if state.slack_source == "estimate" else float(observed)
    slacks = slack_vector(a, offset, actions)
    w = exp_weight_update(state.play_dist, slacks, state.eta)
    append_round(state.slack_matrix, w)
    res = factorize(state.slack_matrix.window(nnmf_cfg.window), state.rank, tol=nnmf_cfg.tol,
                    max_iter=nnmf_cfg.max_iter, seed=_nnmf_seed(rng))
    diag = {"rank": state.rank, "rel_error": res.rel_error}
    try:
        sample = sample_exploration(res, rng)
        x = sample.gamma
        diag.update(component=sample.component_index, entropy=exploration_entropy(sample),
                    log_support=sample.log_support, support=sample.support.tolist())
    except DegenerateFactorizationError:
        log.info("round %d: degenerate factorization, exploring uniformly", state.round + 1)
        x = uniform(actions.n)
        diag["fallback"] = True
    state.weights = w
    state.explore = x
    state.play_dist = mix_distribution(w, x, state.alpha)
    state.round += 1
    state.diagnostics = diag
    return state, covariance_of(state.play_dist, actions)


def exp3p_beta(n_actions: int, horizon: int, confidence: float = 0.05) -> float:
    return math.sqrt(math.log(n_actions / confidence) / (n_actions * horizon))


def combband_alpha(actions: ActionSet, eta: float) -> float:
    """Mixing coefficient induced by the set: eta * max|a|^2 / lambda_min(E_mu[a a^T]).

    mu is uniform over the set and lambda_min the smallest eigenvalue on the
    span of the actions. Clipped to [0, 1].
    """
    cov = covariance_of(uniform(actions.n), actions)
    vals = np.linalg.eigvalsh(cov.P)
    lam = vals[vals > PINV_RTOL * vals.max()].min()
    radius = float(actions.matrix.sum(axis=1).max())
    return min(1.0, eta * radius / lam)


def baseline_step(kind: str, state: PolicyState, actions: ActionSet, played: int, observed: float,
                  rng=None, cov: CovarianceState | None = None):
    """Update rule of a baseline learner.

    exp3 / exp3p treat the canonical basis as a d-armed bandit with the
    importance-weighted estimate observed / p_k (exp3p works on gains
    1 - loss plus the bonus beta / p_i). exp2 / combband use the covariance
    estimator over the whole set. Returns the state, plus the next
    covariance for exp2 / combband.
    """
    n = actions.n
    p = state.play_dist
    if kind in ("exp3", "exp3p"):
        if not actions.is_canonical_basis():
            raise UnsupportedActionSetError(f"{kind} requires the canonical basis action set")
        if kind == "exp3":
            state.log_weights[played] -= state.eta * observed / p[played]
        else:
            gain = np.full(n, state.beta) / p
            gain[played] += (1.0 - observed) / p[played]
            state.log_weights += state.eta * gain
        x = uniform(n)
    elif kind in ("exp2", "combband"):
        if cov is None:
            raise PreconditionError(f"{kind} needs the current covariance state")
        l_hat = estimate_loss(cov, actions[played], observed)
        state.log_weights -= state.eta * (actions.matrix @ l_hat)
        x = uniform(n)
    else:
        raise ConfigurationError(f"unknown baseline {kind!r}")
    state.weights = _softmax(state.log_weights)
    state.explore = x
    state.play_dist = mix_distribution(state.weights, x, state.alpha)
    state.round += 1
    if kind in ("exp2", "combband"):
        return state, covariance_of(state.play_dist, actions)
    return state


class Policy:
    """Stateful wrapper: ``probabilities`` to sample from, ``update`` after each round."""

    def __init__(self, kind: str, actions: ActionSet, horizon: int, eta=None, alpha=None,
                 nnmf: NnmfConfig | None = None, rng=None, slack_source: str = "estimate"):
        if kind not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {kind!r}; choose from {ALGORITHMS}")
        if kind in ("exp3", "exp3p") and not actions.is_canonical_basis():
            raise UnsupportedActionSetError(f"{kind} requires the canonical basis action set")
        if slack_source not in ("estimate", "observed"):
            raise ConfigurationError(f"slack_source must be 'estimate' or 'observed', got {slack_source!r}")
        self.kind = kind
        self.actions = actions
        self.nnmf = nnmf or NnmfConfig()
        self.rng = rng if rng is not None else np.random.default_rng()
        if kind == "combband" and alpha is None:
            eta_ = default_eta(actions.n, horizon) if eta is None else eta
            alpha = combband_alpha(actions, eta_)
        self.state = init_state(actions, horizon, eta, alpha, window=self.nnmf.window)
        self.state.slack_source = slack_source
        if kind == "exp3p":
            self.state.beta = exp3p_beta(actions.n, horizon)
        self.cov = covariance_of(self.state.play_dist, actions) if kind in ("extexp2", "exp2", "combband") else None

    @property
    def probabilities(self) -> np.ndarray:
        return self.state.play_dist

    def update(self, played: int, observed: float) -> None:
        if self.kind == "extexp":
            extended_exp_step(self.state, self.actions, played, observed, self.nnmf, self.rng)
        elif self.kind == "extexp2":
            self.state, self.cov = extended_exp2_step(self.state, self.cov, self.actions, played,
                                                      observed, self.nnmf, self.rng)
        elif self.kind in ("exp2", "combband"):
            self.state, self.cov = baseline_step(self.kind, self.state, self.actions, played,
                                                 observed, self.rng, cov=self.cov)
        else:
            baseline_step(self.kind, self.state, self.actions, played, observed, self.rng)


def make_policy(kind, actions, horizon, **kwargs) -> Policy:
    return Policy(kind, actions, horizon, **kwargs)
