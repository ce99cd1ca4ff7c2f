"""Dominance, non-dominated fronts and the parent-sampling weight laws.

All objectives are higher-is-better.  Strict dominance (``a`` beats ``b``
in every coordinate) is the default; weak dominance (no worse anywhere,
better somewhere) is available with ``strict=False``.
"""

from __future__ import annotations

import numpy as np


def dominates(a, b, strict: bool = True) -> bool:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if strict:
        return bool(np.all(a > b))
    return bool(np.all(a >= b) and np.any(a > b))


class _MaxFenwick:
    def __init__(self, n: int):
        self.tree = [-np.inf] * (n + 1)

    def update(self, i: int, value: float) -> None:
        i += 1
        while i < len(self.tree):
            if value > self.tree[i]:
                self.tree[i] = value
            i += i & -i

    def prefix_max(self, i: int) -> float:
        """Max over positions ``0..i-1``."""
        out = -np.inf
        while i > 0:
            if self.tree[i] > out:
                out = self.tree[i]
            i -= i & -i
        return out


def _strict_front_3d(F: np.ndarray) -> np.ndarray:
    # sweep x descending; a point is dominated iff some point with larger x
    # (an earlier group) has larger y and larger z
    n = len(F)
    ys = np.unique(F[:, 1])
    # position p holds y values in descending order so "y > y0" is a prefix
    y_pos = len(ys) - 1 - np.searchsorted(ys, F[:, 1])
    tree = _MaxFenwick(len(ys))
    keep = np.ones(n, dtype=bool)
    order = np.argsort(-F[:, 0], kind="stable")
    start = 0
    while start < n:
        stop = start
        x0 = F[order[start], 0]
        while stop < n and F[order[stop], 0] == x0:
            stop += 1
        group = order[start:stop]
        for i in group:
            if tree.prefix_max(int(y_pos[i])) > F[i, 2]:
                keep[i] = False
        for i in group:
            tree.update(int(y_pos[i]), F[i, 2])
        start = stop
    return keep


def _pairwise_front(F: np.ndarray, strict: bool) -> np.ndarray:
    keep = np.ones(len(F), dtype=bool)
    for i in range(len(F)):
        if strict:
            beaten = np.all(F > F[i], axis=1)
        else:
            beaten = np.all(F >= F[i], axis=1) & np.any(F > F[i], axis=1)
        keep[i] = not beaten.any()
    return keep


def non_dominated_mask(F, strict: bool = True) -> np.ndarray:
    """Boolean mask of points no other point dominates."""
    F = np.asarray(F, dtype=float)
    if F.ndim != 2:
        raise ValueError("objective matrix must be 2-D (n_points, n_objectives)")
    if len(F) == 0:
        return np.zeros(0, dtype=bool)
    if not np.all(np.isfinite(F)):
        raise ValueError("objective values must be finite")
    if strict and F.shape[1] == 3:
        return _strict_front_3d(F)
    return _pairwise_front(F, strict)


def pareto_ranks(F, max_rank: int | None = None, strict: bool = True) -> np.ndarray:
    """Front index (1 = non-dominated) by repeated peeling; 0 beyond ``max_rank``."""
    F = np.asarray(F, dtype=float)
    ranks = np.zeros(len(F), dtype=int)
    remaining = np.arange(len(F))
    rank = 1
    while len(remaining) and (max_rank is None or rank <= max_rank):
        mask = non_dominated_mask(F[remaining], strict)
        ranks[remaining[mask]] = rank
        remaining = remaining[~mask]
        rank += 1
    return ranks


def exponential_weights(phi, k: float) -> np.ndarray:
    """P(m) proportional to k**phi(m)."""
    phi = np.asarray(phi, dtype=float)
    if phi.size == 0:
        raise ValueError("cannot sample from an empty population")
    if k <= 1:
        raise ValueError("k must be > 1")
    logw = (phi - phi.max()) * np.log(k)
    w = np.exp(logw)
    return w / w.sum()


def rank_weights(ranks) -> np.ndarray:
    """P(m) proportional to 1 / (1 + rank)."""
    ranks = np.asarray(ranks, dtype=float)
    if ranks.size == 0:
        raise ValueError("cannot sample from an empty population")
    w = 1.0 / (1.0 + ranks)
    return w / w.sum()


def draw_pair(probabilities: np.ndarray, rng: np.random.Generator) -> tuple[int, int]:
    """Two independent draws (the same index may come up twice)."""
    i, j = rng.choice(len(probabilities), size=2, p=probabilities)
    return int(i), int(j)
