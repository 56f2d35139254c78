"""Slack regularity, the exponential slack update and the growing weight matrix."""
from __future__ import annotations

from collections import deque

import numpy as np

from .errors import NumericalUnderflowError, PreconditionError, ShapeError

SIMPLEX_ATOL = 1e-9


def check_simplex(p, name="p", atol=SIMPLEX_ATOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ShapeError(f"{name} must be a non-empty vector")
    if np.any(p < 0) or abs(p.sum() - 1.0) > atol or not np.all(np.isfinite(p)):
        raise PreconditionError(f"{name} is not a probability vector (sum={p.sum()!r})")
    return p


def slack_regularity(a_play, loss, a_ref) -> float:
    """|a_play . loss - a_play . a_ref|: distance of ``a_ref`` from the observed loss hyperplane."""
    a_play = np.asarray(a_play, dtype=float)
    loss = np.asarray(loss, dtype=float)
    a_ref = np.asarray(a_ref, dtype=float)
    if not (a_play.shape == loss.shape == a_ref.shape) or a_play.ndim != 1:
        raise ShapeError(f"shape mismatch: {a_play.shape}, {loss.shape}, {a_ref.shape}")
    return abs(float(a_play @ loss) - float(a_play @ a_ref))


def slack_vector(a_play, observed, actions) -> np.ndarray:
    """Slacks |observed - a_play . a_i| against every action a_i in the set.

    ``observed`` is the hyperplane offset, i.e. a_play . l (or a_play . l_hat).
    """
    mat = getattr(actions, "matrix", actions)
    a_play = np.asarray(a_play, dtype=float)
    if a_play.shape != (mat.shape[1],):
        raise ShapeError(f"played action has shape {a_play.shape}, set has d={mat.shape[1]}")
    return np.abs(float(observed) - mat @ a_play)


def raw_slack_row(a_play, loss, actions) -> np.ndarray:
    """Diagnostic row of raw slacks |a_t . l_t - a_t . a_i| (not used by the learners)."""
    return slack_vector(a_play, float(np.dot(a_play, loss)), actions)


def exp_weight_update(p, slacks, eta: float) -> np.ndarray:
    """w_i = p_i exp(-eta s_i) / sum_j p_j exp(-eta s_j).

    The minimum slack is subtracted first; this cancels in the
    normalization and keeps the largest factor at exactly 1.
    """
    p = check_simplex(p)
    s = np.asarray(slacks, dtype=float)
    if s.shape != p.shape:
        raise ShapeError(f"slacks have shape {s.shape}, p has {p.shape}")
    if np.any(s < 0):
        raise PreconditionError("slacks must be non-negative")
    if eta < 0:
        raise PreconditionError(f"eta must be >= 0, got {eta}")
    w = p * np.exp(-eta * (s - s.min()))
    z = w.sum()
    if not z > 0.0:
        raise NumericalUnderflowError("all exponential weights underflowed to zero")
    return w / z


class SlackWeightMatrix:
    """Rows are per-round weight vectors over N actions.

    ``maxlen`` bounds memory by keeping only the most recent rows; ``n_rows``
    still counts every append.
    """

    def __init__(self, n_actions: int, maxlen: int | None = None):
        self.n_actions = n_actions
        self._rows = deque(maxlen=maxlen)
        self.n_rows = 0

    def __len__(self):
        return self.n_rows

    @property
    def rows(self) -> list[np.ndarray]:
        return list(self._rows)

    def window(self, size: int | None = None) -> np.ndarray:
        """The most recent ``size`` rows as an (m x N) array (all retained rows if None)."""
        rows = list(self._rows)
        if size is not None:
            rows = rows[-size:]
        if not rows:
            return np.zeros((0, self.n_actions))
        return np.vstack(rows)


def append_round(M: SlackWeightMatrix, w) -> SlackWeightMatrix:
    w = np.asarray(w, dtype=float)
    if w.shape != (M.n_actions,):
        raise ShapeError(f"row has shape {w.shape}, matrix expects length {M.n_actions}")
    check_simplex(w, name="w")
    M._rows.append(w.copy())
    M.n_rows += 1
    return M
