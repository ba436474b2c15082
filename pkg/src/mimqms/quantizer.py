"""Mutual-information-maximizing quantization of binary-input pmfs.

A discrete channel output is described by a ConditionalPmf: two probability
rows p0 = P(Z = z | X = 0) and p1 = P(Z = z | X = 1) over a symbol alphabet
sorted by decreasing reliability (decreasing LLR).  dp_quantize finds the
K-cell contiguous partition of that alphabet which maximizes I(X; Z_coarse),
by dynamic programming over prefix partitions.  For binary-input memoryless
symmetric channels the optimal deterministic quantizer is of this
sequential form, so the DP search is exact.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "ConditionalPmf",
    "ThresholdSet",
    "mutual_information",
    "dp_quantize",
    "apply_partition",
]

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class ConditionalPmf:
    """Binary-input conditional pmf over a reliability-sorted alphabet.

    Attributes:
        p0: P(z | X=0), one entry per symbol.
        p1: P(z | X=1), same length.
        values: per-symbol label (LLR bin center, integer sum value, ...),
            strictly decreasing.  Index 0 is the strongest belief in bit 0.
    """

    p0: np.ndarray
    p1: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        p0 = np.asarray(self.p0, dtype=np.float64)
        p1 = np.asarray(self.p1, dtype=np.float64)
        values = np.asarray(self.values)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "values", values)
        if not (p0.shape == p1.shape == values.shape) or p0.ndim != 1 or p0.size == 0:
            raise ValueError("p0, p1, values must be equal-length 1-D arrays")
        if np.any(p0 < 0) or np.any(p1 < 0):
            raise ValueError("negative probability mass")
        for name, row in (("p0", p0), ("p1", p1)):
            if abs(row.sum() - 1.0) > _NORM_TOL:
                raise ValueError(f"{name} not normalized: sum = {row.sum()!r}")
        if values.size > 1 and not np.all(np.diff(values.astype(np.float64)) < 0):
            raise ValueError("values must be strictly decreasing (LLR-sorted)")

    def __len__(self):
        return self.p0.size

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        """True when the pmf has mirror symmetry P(z|0) = P(-z|1)."""
        vals = self.values.astype(np.float64)
        return bool(
            np.all(np.abs(self.p1 - self.p0[::-1]) <= tol)
            and np.all(np.abs(vals + vals[::-1]) <= 1e-9 * max(1.0, np.abs(vals).max()))
        )


@dataclass(frozen=True)
class ThresholdSet:
    """A contiguous K-cell partition of a sorted alphabet.

    cuts[k] is the symbol index where cell k+1 begins (strictly increasing,
    K-1 entries).  thresholds carries the decision boundary per cut in the
    symbol-value domain: a value v belongs to the lowest cell k such that
    v >= thresholds[k] ("equality joins the lower index" convention).
    """

    cuts: tuple
    thresholds: Optional[tuple] = None

    def __post_init__(self):
        cuts = tuple(int(c) for c in self.cuts)
        object.__setattr__(self, "cuts", cuts)
        if any(b <= a for a, b in zip(cuts, cuts[1:])) or any(c <= 0 for c in cuts):
            raise ValueError("cuts must be strictly increasing positive indices")
        if self.thresholds is not None:
            object.__setattr__(self, "thresholds", tuple(self.thresholds))

    @property
    def n_cells(self) -> int:
        return len(self.cuts) + 1


def mutual_information(pmf: ConditionalPmf, prior: float = 0.5) -> float:
    """I(X; Z) in bits for the given conditional pmf and P(X=0) = prior."""
    if not 0.0 < prior < 1.0:
        raise ValueError("prior must lie in (0, 1)")
    j0 = prior * pmf.p0
    j1 = (1.0 - prior) * pmf.p1
    m = j0 + j1
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = np.where(j0 > 0, j0 * np.log2(j0 / (prior * m)), 0.0)
        t1 = np.where(j1 > 0, j1 * np.log2(j1 / ((1.0 - prior) * m)), 0.0)
    return float(t0.sum() + t1.sum())


def _cell_terms(q0, q1, prior):
    """MI contribution of cells with conditional masses (q0, q1)."""
    j0 = prior * q0
    j1 = (1.0 - prior) * q1
    m = j0 + j1
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = np.where(j0 > 0, j0 * np.log2(q0 / m), 0.0)
        t1 = np.where(j1 > 0, j1 * np.log2(q1 / m), 0.0)
    return t0 + t1


def _dp_cuts(p0, p1, K, prior):
    """Exact DP over prefix partitions; returns cut indices (ascending).

    Ties in the stage argmax resolve to the lowest boundary index.  Memory
    is kept bounded by evaluating cell scores in column blocks.
    """
    N = p0.size
    c0 = np.concatenate(([0.0], np.cumsum(p0)))
    c1 = np.concatenate(([0.0], np.cumsum(p1)))

    def score_block(ms, ns):
        # ms: candidate cell starts (1-D), ns: cell ends (1-D); broadcast grid
        q0 = c0[ns][None, :] - c0[ms][:, None]
        q1 = c1[ns][None, :] - c1[ms][:, None]
        return _cell_terms(q0, q1, prior)

    S = np.full(N + 1, -np.inf)
    ends = np.arange(1, N + 1)
    S[1:] = score_block(np.array([0]), ends)[0]
    S[0] = -np.inf
    choice = np.zeros((K + 1, N + 1), dtype=np.int64)
    block = 512
    for k in range(2, K + 1):
        S_new = np.full(N + 1, -np.inf)
        for lo in range(k, N + 1, block):
            hi = min(lo + block, N + 1)
            ns = np.arange(lo, hi)
            ms = np.arange(k - 1, hi - 1)
            total = S[ms][:, None] + score_block(ms, ns)
            # cell start m must satisfy m < n
            mask = ms[:, None] >= ns[None, :]
            total[mask] = -np.inf
            best = np.argmax(total, axis=0)
            S_new[ns] = total[best, np.arange(ns.size)]
            choice[k, ns] = ms[best]
        S = S_new
    cuts = []
    n = N
    for k in range(K, 1, -1):
        n = int(choice[k, n])
        cuts.append(n)
    return cuts[::-1], float(S[N])


def _dp_cuts_symmetric(p0, p1, K, prior):
    """Best mirror-symmetric partition: solve the left half, mirror it.

    For mirror-symmetric input the two halves contribute equal MI, so the
    best partition with a forced central boundary scores twice the best
    K/2-cell left-half score.  The unrestricted optimum is not always
    symmetric, so this only serves as a tie-break candidate.
    """
    N = p0.size
    half = N // 2
    lcuts, lscore = _dp_cuts(p0[:half], p1[:half], K // 2, prior)
    cuts = lcuts + [half] + [N - c for c in reversed(lcuts)]
    return cuts, 2.0 * lscore


def _merge_zeros(pmf):
    """Drop zero-probability symbols (they join the higher-LLR neighbor)."""
    keep = (pmf.p0 > 0) | (pmf.p1 > 0)
    if keep.all():
        return pmf, np.arange(len(pmf))
    idx = np.flatnonzero(keep)
    if idx.size == 0:
        raise ValueError("pmf carries no probability mass")
    return (
        ConditionalPmf(pmf.p0[idx], pmf.p1[idx], pmf.values[idx]),
        idx,
    )


def dp_quantize(pmf: ConditionalPmf, K: int, prior: float = 0.5):
    """MI-maximizing contiguous K-cell quantizer of a sorted pmf.

    Args:
        pmf: LLR-sorted binary-input conditional pmf.
        K: number of output cells, 2 <= K <= number of nonzero symbols.
        prior: P(X = 0).

    Returns:
        (ThresholdSet, ConditionalPmf): the optimal partition (cut indices
        refer to the original alphabet; thresholds carry the smallest
        symbol value of each upper cell) and the induced coarse pmf.
    """
    reduced, idx = _merge_zeros(pmf)
    N = len(reduced)
    if not 1 <= K <= N:
        raise ValueError(f"K = {K} outside [1, {N}] (nonzero symbols)")
    if K == 1:
        rcuts = []
    elif K == N:
        rcuts = list(range(1, N))
    else:
        rcuts, score = _dp_cuts(reduced.p0, reduced.p1, K, prior)
        if prior == 0.5 and N % 2 == 0 and K % 2 == 0 and reduced.is_symmetric():
            scuts, sscore = _dp_cuts_symmetric(reduced.p0, reduced.p1, K, prior)
            # among MI ties prefer the mirror-symmetric partition
            if sscore >= score - 1e-13:
                rcuts = scuts
    # map cuts back to original indices; a dropped symbol between two cells
    # stays with the higher-LLR cell, so the cut lands on the next kept one
    cuts = [int(idx[c]) for c in rcuts]
    thresholds = tuple(pmf.values[idx[c - 1]] for c in rcuts)
    tset = ThresholdSet(tuple(cuts), thresholds)
    return tset, apply_partition(pmf, tset)


def apply_partition(pmf: ConditionalPmf, partition: Union[ThresholdSet, Sequence]) -> ConditionalPmf:
    """Coarse pmf induced by a partition (cut indices or a ThresholdSet)."""
    cuts = partition.cuts if isinstance(partition, ThresholdSet) else tuple(int(c) for c in partition)
    edges = [0, *cuts, len(pmf)]
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("cuts must be strictly increasing within the alphabet")
    q0 = np.add.reduceat(pmf.p0, edges[:-1])
    q1 = np.add.reduceat(pmf.p1, edges[:-1])
    # coarse symbol labels: one per cell, kept strictly decreasing
    vals = np.asarray(
        [pmf.values[a] for a in edges[:-1]], dtype=np.float64
    )
    return ConditionalPmf(q0, q1, vals)
