"""Combinatorial action sets as binary incidence vectors over {0,1}^d."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateActionError, InvalidDimensionError, InvalidRouteError, ParseError

RANK_RTOL = 1e-10
# 2**62 - 1 still fits comfortably in a signed 64-bit index.
MAX_HYPERCUBE_DIM = 62


def dimensional_rank(actions) -> int:
    """Matrix rank of the stacked N x d incidence matrix.

    Singular values below ``1e-10`` times the largest are treated as zero.
    """
    mat = actions.matrix if isinstance(actions, ActionSet) else np.asarray(actions, dtype=float)
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_RTOL * s[0]))


class ActionSet:
    """Immutable ordered set of N distinct binary actions of dimension d.

    Rows of ``matrix`` are the incidence vectors. The array is marked
    read-only so a single instance can be shared by concurrent replicas.
    """

    def __init__(self, rows, name: str = "custom"):
        mat = np.array(rows, dtype=float, copy=True)
        if mat.ndim == 1:
            mat = mat[None, :]
        if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
            raise InvalidDimensionError(f"need a non-empty N x d array, got shape {mat.shape}")
        if not np.all((mat == 0.0) | (mat == 1.0)):
            raise InvalidDimensionError("action entries must be exactly 0 or 1")
        seen = {}
        for i, row in enumerate(mat.astype(np.uint8)):
            key = row.tobytes()
            if key in seen:
                raise DuplicateActionError(f"action {i} duplicates action {seen[key]}")
            seen[key] = i
        mat.setflags(write=False)
        self._matrix = mat
        self._index = seen
        self.name = name
        self.delta = dimensional_rank(mat)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[1]

    @property
    def n(self) -> int:
        return self._matrix.shape[0]

    def __len__(self):
        return self.n

    def __getitem__(self, i) -> np.ndarray:
        return self._matrix[i]

    def __iter__(self):
        return iter(self._matrix)

    def __eq__(self, other):
        return isinstance(other, ActionSet) and np.array_equal(self._matrix, other._matrix)

    def __hash__(self):
        return hash(self._matrix.tobytes())

    def __repr__(self):
        return f"ActionSet(name={self.name!r}, N={self.n}, d={self.dim}, delta={self.delta})"

    def index_of(self, action) -> int:
        key = np.asarray(action, dtype=np.uint8).tobytes()
        try:
            return self._index[key]
        except KeyError:
            raise KeyError("action not in set") from None

    def is_canonical_basis(self) -> bool:
        """True when the set is exactly {e_1..e_d} (in any order)."""
        return self.n == self.dim and np.all(self._matrix.sum(axis=1) == 1)

    def union(self, other: "ActionSet", name: str | None = None) -> "ActionSet":
        """Actions of ``self`` followed by those of ``other`` not already present."""
        if other.dim != self.dim:
            raise InvalidDimensionError("cannot merge action sets of different dimension")
        extra = [row for row in other.matrix if row.astype(np.uint8).tobytes() not in self._index]
        rows = np.vstack([self._matrix] + ([np.array(extra)] if extra else []))
        return ActionSet(rows, name=name or f"{self.name}+{other.name}")


def canonical_basis(d: int) -> ActionSet:
    if d < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {d}")
    return ActionSet(np.eye(d), name="basis")


def hypercube_actions(d: int, max_n: int) -> ActionSet:
    """First ``min(2^d - 1, max_n)`` nonzero corners of {0,1}^d.

    Corners are enumerated in binary-counting order 1, 2, 3, ... with
    bit j of the counter mapped to coordinate j, so index 1 is e_1.
    The zero corner is excluded.
    """
    if d < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {d}")
    if d > MAX_HYPERCUBE_DIM:
        raise InvalidDimensionError(f"d={d} exceeds the enumeration limit {MAX_HYPERCUBE_DIM}")
    if max_n < 1:
        raise InvalidDimensionError(f"max_n must be >= 1, got {max_n}")
    n = min((1 << d) - 1, max_n)
    codes = np.arange(1, n + 1, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(d, dtype=np.int64)[None, :]) & 1
    return ActionSet(bits, name="hypercube")


def path_actions(edge_lists: Iterable[Iterable[int]], d: int) -> ActionSet:
    """One incidence vector per route, each route a set of edge indices in [0, d)."""
    if d < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {d}")
    rows = []
    for k, edges in enumerate(edge_lists):
        edges = list(edges)
        if not edges:
            raise InvalidRouteError(f"route {k} is empty")
        row = np.zeros(d)
        for e in edges:
            if not 0 <= int(e) < d:
                raise InvalidRouteError(f"route {k}: edge index {e} outside [0, {d})")
            row[int(e)] = 1.0
        rows.append(row)
    if not rows:
        raise InvalidRouteError("no routes given")
    return ActionSet(np.array(rows), name="paths")


def basis_plus_hypercube(d: int, extra: int) -> ActionSet:
    """Canonical basis followed by the first ``extra`` hypercube corners not already in it."""
    return canonical_basis(d).union(hypercube_actions(d, extra), name="basis+hypercube")


def parse_routes(lines: Sequence[str]) -> list[list[int]]:
    routes = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            routes.append([int(tok) for tok in line.split(",") if tok.strip()])
        except ValueError:
            raise ParseError(f"bad route {line!r}", line=lineno) from None
    return routes


def load_routes(path, d: int) -> ActionSet:
    """Read a routes file: one route per line, comma-separated zero-based edge indices."""
    text = Path(path).read_text()
    return path_actions(parse_routes(text.splitlines()), d)
