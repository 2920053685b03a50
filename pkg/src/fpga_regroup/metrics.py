"""Clustering quality against a reference: MI, entropy, NMI, pair counts, Rand accuracy.

A clustering is any 1-D integer sequence; position ``i`` is element ``i`` and
the value its group id (ids need not be dense).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _labels(u) -> np.ndarray:
    u = np.asarray(u)
    if u.ndim != 1:
        raise ValueError("a clustering must be a 1-D label array")
    return np.unique(u, return_inverse=True)[1].ravel()


def _pair(u, v) -> tuple[np.ndarray, np.ndarray]:
    u, v = _labels(u), _labels(v)
    if u.shape != v.shape:
        raise ValueError(f"clusterings differ in length: {u.size} vs {v.size}")
    return u, v


def contingency(u, v) -> np.ndarray:
    u, v = _pair(u, v)
    table = np.zeros((u.max(initial=-1) + 1, v.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (u, v), 1)
    return table


def mutual_information(u, v) -> float:
    """Natural-log mutual information of two clusterings."""
    table = contingency(u, v)
    n = table.sum()
    if n == 0:
        raise ValueError("clusterings must be non-empty")
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    i, j = np.nonzero(table)
    nij = table[i, j].astype(float)
    mi = np.sum(nij / n * (np.log(n * nij) - np.log(a[i] * b[j].astype(float))))
    return max(float(mi), 0.0)


def entropy(u) -> float:
    u = _labels(u)
    if u.size == 0:
        raise ValueError("clustering must be non-empty")
    p = np.bincount(u) / u.size
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def nmi(u, v) -> float:
    """MI over the arithmetic mean of the two entropies, clamped to [0, 1].

    When both clusterings are a single group the result is 1 if they are
    the same partition (always, for equal-length single-group labelings).
    """
    u, v = _pair(u, v)
    hu, hv = entropy(u), entropy(v)
    if hu == 0.0 and hv == 0.0:
        return 1.0 if np.array_equal(u, v) else 0.0
    value = mutual_information(u, v) / ((hu + hv) / 2)
    return float(min(1.0, max(0.0, value)))


@dataclass(frozen=True)
class PairwiseCounts:
    """Unordered element-pair decisions (each pair counted once)."""

    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def doubled(self) -> "PairwiseCounts":
        """Ordered-pair view (every count x2), the convention of published tables."""
        return PairwiseCounts(2 * self.tp, 2 * self.tn, 2 * self.fp, 2 * self.fn)


def _pairs(x: np.ndarray) -> int:
    x = x.astype(np.int64)
    return int(np.sum(x * (x - 1) // 2))


def pairwise_counts(pred, ref) -> PairwiseCounts:
    table = contingency(pred, ref)
    n = int(table.sum())
    tp = _pairs(table)
    same_pred = _pairs(table.sum(axis=1))
    same_ref = _pairs(table.sum(axis=0))
    fp = same_pred - tp
    fn = same_ref - tp
    tn = n * (n - 1) // 2 - tp - fp - fn
    return PairwiseCounts(tp, tn, fp, fn)


def accuracy(c: PairwiseCounts) -> float:
    """Rand index: share of pair decisions that agree with the reference."""
    if c.total <= 0:
        raise ValueError("accuracy needs at least one pair decision")
    return (c.tp + c.tn) / c.total


def metric_report(pred, ref, pair_convention: str = "unordered") -> dict:
    if pair_convention not in ("unordered", "doubled"):
        raise ValueError(f"pair_convention must be 'unordered' or 'doubled', got {pair_convention!r}")
    counts = pairwise_counts(pred, ref)
    shown = counts.doubled() if pair_convention == "doubled" else counts
    return {
        "nmi": nmi(pred, ref),
        "mi": mutual_information(pred, ref),
        "entropy_pred": entropy(pred),
        "entropy_ref": entropy(ref),
        "tp": shown.tp,
        "tn": shown.tn,
        "fp": shown.fp,
        "fn": shown.fn,
        "accuracy": accuracy(counts) if counts.total else 1.0,
        "pair_convention": pair_convention,
    }
