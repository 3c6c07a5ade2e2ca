"""Sorted disjoint interval sets along rays, single and batched.

A batch stores one interval set per ray as two ``(N, K)`` arrays ``lo`` and
``hi``, padded on the right with ``inf``. Boolean combination is an event
sweep: each child contributes +w at its entries and -w at its exits, and the
combined set is where the running coverage reaches a threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MERGE_TOL = 1e-12


@dataclass(frozen=True)
class IntervalSet:
    """Intervals ``[lo, hi]`` of a single ray, sorted and disjoint."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        prev = -np.inf
        for lo, hi in self.intervals:
            if not (lo < hi) or lo < 0 or not np.isfinite(hi) or lo <= prev:
                raise ValueError(f"malformed interval set {self.intervals}")
            prev = hi

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __getitem__(self, i):
        return self.intervals[i]

    def contains(self, t: float) -> bool:
        return any(lo <= t <= hi for lo, hi in self.intervals)

    def scaled(self, k: float) -> "IntervalSet":
        return IntervalSet(tuple((k * lo, k * hi) for lo, hi in self.intervals))

    def to_batch(self) -> "IntervalBatch":
        if not self.intervals:
            return IntervalBatch.empty(1)
        arr = np.asarray(self.intervals, dtype=float)
        return IntervalBatch(arr[None, :, 0].copy(), arr[None, :, 1].copy())


class IntervalBatch:
    """Interval sets for ``N`` rays at once."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: np.ndarray, hi: np.ndarray):
        self.lo = lo
        self.hi = hi

    @classmethod
    def empty(cls, n: int) -> "IntervalBatch":
        return cls(np.full((n, 0), np.inf), np.full((n, 0), np.inf))

    @classmethod
    def single(cls, lo: np.ndarray, hi: np.ndarray) -> "IntervalBatch":
        """One interval per ray; rays with ``hi <= lo`` get the empty set."""
        lo = np.maximum(lo, 0.0)
        ok = hi > lo + MERGE_TOL
        return cls(np.where(ok, lo, np.inf)[:, None], np.where(ok, hi, np.inf)[:, None])

    @property
    def n_rays(self) -> int:
        return self.lo.shape[0]

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.lo)

    @property
    def counts(self) -> np.ndarray:
        return self.valid.sum(axis=1)

    def row(self, i: int) -> IntervalSet:
        m = self.valid[i]
        return IntervalSet(tuple(zip(self.lo[i, m].tolist(), self.hi[i, m].tolist())))

    def scaled(self, k: float) -> "IntervalBatch":
        return IntervalBatch(self.lo * k, self.hi * k)

    def first(self) -> tuple[np.ndarray, np.ndarray]:
        """First interval of every ray, ``(inf, inf)`` where empty."""
        if self.lo.shape[1] == 0:
            inf = np.full(self.n_rays, np.inf)
            return inf, inf.copy()
        return self.lo[:, 0], self.hi[:, 0]

    def last_end(self) -> np.ndarray:
        """Largest ``hi`` per ray, 0 where empty."""
        if self.hi.shape[1] == 0:
            return np.zeros(self.n_rays)
        return np.where(self.valid, self.hi, 0.0).max(axis=1)

    def complement(self, world: float) -> "IntervalBatch":
        """Complement within ``[0, world]``."""
        n = self.n_rays
        lo = np.concatenate([np.zeros((n, 1)), np.where(self.valid, self.hi, np.inf)], axis=1)
        hi = np.concatenate([np.where(self.valid, self.lo, np.inf), np.full((n, 1), np.inf)], axis=1)
        # the gap after the last interval closes at ``world``
        cnt = self.counts
        hi[np.arange(n), cnt] = world
        return _normalize(lo, hi)


def _compact(values: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Move kept entries of each row to the front; pad with inf."""
    if values.shape[1] == 0:
        return values
    order = np.argsort(~keep, axis=1, kind="stable")
    out = np.take_along_axis(np.where(keep, values, np.inf), order, axis=1)
    width = int(keep.sum(axis=1).max(initial=0))
    return out[:, :width]


def _normalize(lo: np.ndarray, hi: np.ndarray) -> IntervalBatch:
    """Merge gaps <= MERGE_TOL and drop slivers from sorted disjoint rows."""
    if lo.shape[1] == 0:
        return IntervalBatch(lo, hi)
    valid = np.isfinite(lo) & (hi > lo)
    lo = _compact(lo, valid)
    hi = _compact(hi, valid)
    if lo.shape[1] == 0:
        return IntervalBatch(lo, hi)
    valid = np.isfinite(lo)
    with np.errstate(invalid="ignore"):
        joined = valid[:, 1:] & (lo[:, 1:] - hi[:, :-1] <= MERGE_TOL)
    keep_lo = valid.copy()
    keep_lo[:, 1:] &= ~joined
    keep_hi = valid.copy()
    keep_hi[:, :-1] &= ~joined
    lo = _compact(lo, keep_lo)
    hi = _compact(hi, keep_hi)
    with np.errstate(invalid="ignore"):
        keep = np.isfinite(lo) & (hi - lo > MERGE_TOL)
    return IntervalBatch(_compact(lo, keep), _compact(hi, keep))


def combine(sets: Sequence[IntervalBatch], weights: Sequence[float], threshold: float) -> IntervalBatch:
    """Where ``sum_i weights[i] * [t in sets[i]] >= threshold``."""
    n = sets[0].n_rays
    pos, dlt = [], []
    for s, w in zip(sets, weights):
        if s.lo.shape[1] == 0:
            continue
        v = s.valid * float(w)
        pos += [s.lo, s.hi]
        dlt += [v, -v]
    if not pos:
        return IntervalBatch.empty(n)
    pos = np.concatenate(pos, axis=1)
    dlt = np.concatenate(dlt, axis=1)
    # ties: larger delta first so touching pieces fuse
    order = np.lexsort((-dlt, pos), axis=-1)
    pos = np.take_along_axis(pos, order, axis=1)
    dlt = np.take_along_axis(dlt, order, axis=1)
    cov = np.cumsum(dlt, axis=1)
    # coverage before the first event is 0 for every child
    prev = cov - dlt
    starts = (prev < threshold) & (cov >= threshold)
    ends = (prev >= threshold) & (cov < threshold)
    return _normalize(_compact(pos, starts), _compact(pos, ends))


def union(*sets: IntervalBatch) -> IntervalBatch:
    return combine(sets, [1.0] * len(sets), 0.5)


def intersection(*sets: IntervalBatch) -> IntervalBatch:
    return combine(sets, [1.0] * len(sets), len(sets) - 0.5)


def difference(left: IntervalBatch, *right: IntervalBatch) -> IntervalBatch:
    rhs = union(*right) if len(right) > 1 else right[0]
    return combine([left, rhs], [1.0, -1.0], 0.5)


def raw_union(lo: np.ndarray, hi: np.ndarray) -> IntervalBatch:
    """Union of possibly overlapping intervals given as ``(N, K)`` bounds."""
    ok = hi > np.maximum(lo, 0.0) + MERGE_TOL
    b = IntervalBatch(np.where(ok, np.maximum(lo, 0.0), np.inf), np.where(ok, hi, np.inf))
    return union(b)
