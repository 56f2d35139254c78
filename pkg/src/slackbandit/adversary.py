"""Loss generators: oblivious (fixed / i.i.d. uniform) and dataset-driven reactive."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, InvalidHorizonError, ParseError, ProtocolError, ShapeError

FIXED = "oblivious-fixed"
STOCHASTIC = "oblivious-stochastic"
DATASET = "dataset"
KINDS = (FIXED, STOCHASTIC, DATASET)


@dataclass
class AdversaryState:
    """Per-replica adversary. Only the fields belonging to ``kind`` are set.

    ``ratings`` is a U x d matrix in [0, 1] and is shared read-only between
    replicas; the random stream of the stochastic kind is private.
    """

    kind: str
    dim: int
    fixed_loss: np.ndarray | None = None
    ratings: np.ndarray | None = None
    rng_seed: int | None = None
    _rng: np.random.Generator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown adversary kind {self.kind!r}")
        populated = {
            FIXED: self.fixed_loss is not None,
            STOCHASTIC: self.rng_seed is not None,
            DATASET: self.ratings is not None,
        }
        if not populated[self.kind] or sum(populated.values()) != 1:
            raise ConfigurationError(f"{self.kind} adversary needs exactly its own field set")
        if self.kind == FIXED:
            self.fixed_loss = _check_loss(self.fixed_loss, self.dim)
            self.fixed_loss.setflags(write=False)
        elif self.kind == STOCHASTIC:
            self._rng = np.random.default_rng(self.rng_seed)
        else:
            r = np.asarray(self.ratings, dtype=float)
            if r.ndim != 2 or r.shape[1] != self.dim or r.shape[0] < 1:
                raise ShapeError(f"ratings must be U x {self.dim}, got {r.shape}")
            if np.any(r < 0) or np.any(r > 1):
                raise ConfigurationError("ratings must lie in [0, 1]")
            self.ratings = r


def _check_loss(vec, dim) -> np.ndarray:
    v = np.array(vec, dtype=float)
    if v.shape != (dim,):
        raise ShapeError(f"loss vector must have length {dim}, got shape {v.shape}")
    if np.any(v < 0) or np.any(v > 1) or not np.all(np.isfinite(v)):
        raise ConfigurationError("loss entries must lie in [0, 1]")
    return v


def fixed(loss) -> AdversaryState:
    loss = np.asarray(loss, dtype=float)
    return AdversaryState(FIXED, dim=loss.shape[0], fixed_loss=loss)


def stochastic(dim: int, seed: int) -> AdversaryState:
    return AdversaryState(STOCHASTIC, dim=dim, rng_seed=seed)


def dataset(ratings) -> AdversaryState:
    ratings = np.asarray(ratings, dtype=float)
    return AdversaryState(DATASET, dim=ratings.shape[1], ratings=ratings)


def next_loss(state: AdversaryState, round: int, last_action_index: int | None = None) -> np.ndarray:
    """Loss vector for ``round`` (1-based).

    The dataset kind is reactive: it serves rating row
    ``(last_action_index + round) mod U``. On round 1 no action has been
    played yet and index 0 is used.
    """
    if round < 1:
        raise ProtocolError(f"rounds are 1-based, got {round}")
    if state.kind == FIXED:
        return state.fixed_loss
    if state.kind == STOCHASTIC:
        return state._rng.random(state.dim)
    if last_action_index is None:
        if round > 1:
            raise ProtocolError("dataset adversary needs the previous action index after round 1")
        last_action_index = 0
    u = state.ratings.shape[0]
    return state.ratings[(int(last_action_index) + round) % u]


def best_fixed_action_value(actions, loss_log, T: int | None = None) -> float:
    """min over a in A of sum_t a . l_t on a realized loss log (exact enumeration)."""
    log = np.asarray(loss_log, dtype=float)
    if log.ndim != 2 or log.shape[0] == 0:
        raise InvalidHorizonError("loss log is empty")
    if T is not None and log.shape[0] != T:
        raise InvalidHorizonError(f"loss log has {log.shape[0]} rounds, expected {T}")
    mat = getattr(actions, "matrix", actions)
    return float(np.min(mat @ log.sum(axis=0)))


def load_fixed_loss(path) -> np.ndarray:
    """Read a one-line comma-separated file of d reals in [0, 1]."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if len(lines) != 1:
        raise ParseError(f"expected exactly one non-empty line, found {len(lines)}")
    try:
        vec = np.array([float(tok) for tok in lines[0].split(",")])
    except ValueError:
        raise ParseError(f"non-numeric entry in {lines[0]!r}", line=1) from None
    return _check_loss(vec, vec.shape[0])
