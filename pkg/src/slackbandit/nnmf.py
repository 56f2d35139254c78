"""Non-negative matrix factorization by multiplicative updates.

Besides plain factorization this provides the pieces the learners need:
a heuristic minimum-rank search, splitting a factorization into rank-1
terms, and drawing an exploration distribution from one of those terms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFactorizationError, DomainError, PreconditionError


@dataclass
class NnmfResult:
    left: np.ndarray  # m x r
    right: np.ndarray  # r x N
    rank: int
    rel_error: float
    n_iter: int = 0
    history: list = field(default_factory=list)

    def product(self) -> np.ndarray:
        return self.left @ self.right


@dataclass
class ExplorationSample:
    component_index: int
    gamma: np.ndarray
    support: np.ndarray

    @property
    def log_support(self) -> float:
        return float(np.log(len(self.support)))


def _check_nonneg(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DomainError(f"expected a matrix, got shape {M.shape}")
    if np.any(M < 0) or not np.all(np.isfinite(M)):
        raise DomainError("matrix has negative or non-finite entries")
    return M


_TINY = np.finfo(float).tiny


def _ratio(num, den):
    # den == 0 only where num == 0 too; the floor leaves every other quotient exact
    return num / np.maximum(den, _TINY)


def _fro(X):
    return math.sqrt(float(np.dot(X.ravel(), X.ravel())))


def factorize(M, r: int, tol: float = 1e-6, max_iter: int = 500, seed=0,
              target: float | None = None, track: bool = False) -> NnmfResult:
    """Lee-Seung multiplicative updates for min ||M - W H||_F with W, H >= 0.

    Factors start from seeded uniform (0, 1] draws. Iteration stops after
    ``max_iter`` sweeps, when the relative error improves by less than
    ``tol`` in one sweep, or once it drops to ``target`` (if given).

    With a ``target`` the run is also abandoned as soon as the last
    improvement, repeated for every remaining sweep, would still miss it.
    With ``track=True`` the relative error before the first and after every
    sweep is kept in ``history``.
    """
    M = _check_nonneg(M)
    if r < 1:
        raise PreconditionError(f"rank must be >= 1, got {r}")
    if max_iter < 1:
        raise PreconditionError(f"max_iter must be >= 1, got {max_iter}")
    m, n = M.shape
    norm = np.linalg.norm(M)
    if norm == 0.0:
        return NnmfResult(np.zeros((m, r)), np.zeros((r, n)), r, 0.0, 0, [0.0] if track else [])

    rng = np.random.default_rng(seed)
    W = 1.0 - rng.random((m, r))
    H = 1.0 - rng.random((r, n))
    err = _fro(M - W @ H) / norm
    history = [err] if track else []
    it = 0
    for it in range(1, max_iter + 1):
        H *= _ratio(W.T @ M, (W.T @ W) @ H)
        W *= _ratio(M @ H.T, W @ (H @ H.T))
        new_err = _fro(M - W @ H) / norm
        if track:
            history.append(new_err)
        improvement = err - new_err
        err = new_err
        if improvement < tol:
            break
        if target is not None and (err <= target or err - improvement * (max_iter - it) > target):
            break
    return NnmfResult(W, H, r, float(err), it, history)


def _restart_seed(seed, r, k):
    return np.random.SeedSequence([int(seed), int(r), int(k)])


def best_factorization(M, r: int, restarts: int = 3, seed=0, max_iter: int = 500,
                       stop_tol: float = 1e-9, target: float | None = None) -> NnmfResult:
    """Lowest-error result over ``restarts`` independently seeded runs."""
    best = None
    for k in range(max(1, restarts)):
        res = factorize(M, r, tol=stop_tol, max_iter=max_iter,
                        seed=_restart_seed(seed, r, k), target=target)
        if best is None or res.rel_error < best.rel_error:
            best = res
        if target is not None and best.rel_error <= target:
            break
    return best


def min_nonneg_rank(M, tol: float = 1e-3, r_max: int | None = None, restarts: int = 3,
                    seed=0, max_iter: int = 500, stop_tol: float = 1e-9) -> int:
    """Smallest r whose best seeded factorization reaches ``rel_error <= tol``.

    This is a heuristic upper estimate of the non-negative rank, not an
    exact computation. Falls back to ``r_max`` when no r succeeds and
    returns 0 for the zero matrix. ``r_max`` defaults to min(M.shape).
    Ranks whose truncated-SVD error already exceeds ``tol`` are skipped
    without running the updates; they cannot succeed.
    """
    M = _check_nonneg(M)
    if not np.any(M):
        return 0
    if r_max is None:
        r_max = min(M.shape)
    if r_max < 1:
        raise PreconditionError(f"r_max must be >= 1, got {r_max}")
    # no rank-r factorization, non-negative or not, beats the truncated SVD
    sv = np.linalg.svd(M, compute_uv=False)
    tail = np.sqrt(np.cumsum((sv**2)[::-1])[::-1]) / np.linalg.norm(M)
    for r in range(1, r_max + 1):
        if r < len(tail) and tail[r] > tol:
            continue
        res = best_factorization(M, r, restarts=restarts, seed=seed, max_iter=max_iter,
                                 stop_tol=stop_tol, target=tol)
        if res.rel_error <= tol:
            return r
    return r_max


def rank_one_components(res: NnmfResult) -> list[np.ndarray]:
    """P_k = outer(left[:, k], right[k]); the P_k sum to left @ right."""
    return [np.outer(res.left[:, k], res.right[k]) for k in range(res.right.shape[0])]


def sample_exploration(res: NnmfResult, rng) -> ExplorationSample:
    """Pick a rank-1 term uniformly and return its normalized column profile.

    Every row of a rank-1 matrix is a multiple of the same right-factor row,
    so that row, normalized, is the action distribution of the term.
    Terms whose right row is all zero are skipped.
    """
    sums = res.right.sum(axis=1)
    live = np.flatnonzero(sums > 0)
    if live.size == 0:
        raise DegenerateFactorizationError("every right-factor row is zero")
    k = int(live[rng.integers(live.size)])
    gamma = res.right[k] / sums[k]
    return ExplorationSample(k, gamma, np.flatnonzero(gamma > 0))


def exploration_entropy(sample: ExplorationSample) -> float:
    """Shannon entropy (nats) of gamma; never exceeds ``sample.log_support``."""
    g = sample.gamma[sample.gamma > 0]
    return float(max(0.0, -np.sum(g * np.log(g))))
