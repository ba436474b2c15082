"""Schedule compression: merge per-iteration LUTs into shared groups.

Consecutive iterations whose LUTs differ by a small Euclidean discrepancy
are merged (component-wise rounded mean) into one shared table.  The
discrepancy threshold is found by exhaustive search over the i_max - 1
consecutive-pair discrepancies: the largest threshold whose merged
schedule still reaches the target mutual information q_star at i_max
wins.  Each LUT kind (phi_v, phi_ch, gamma_v, gamma_e) is searched
independently, in that order, with earlier kinds' accepted merges kept
in place while later kinds are searched.
"""

import dataclasses
import math

import numpy as np

from .mimde import LutIterSet, ReconstructionFn, round_half_away, schedule_mi

__all__ = [
    "KINDS",
    "LutTrace",
    "GroupPartition",
    "OptimizeResult",
    "discrepancy",
    "merge_group",
    "trace_from_schedule",
    "partition_by_threshold",
    "apply_partitions",
    "optimize",
]

KINDS = ("phi_v", "phi_ch", "gamma_v", "gamma_e")


def discrepancy(y, y2):
    """Euclidean distance between two equal-length LUT rows."""
    a = np.asarray(y, dtype=np.float64)
    b = np.asarray(y2, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(math.sqrt(((a - b) ** 2).sum()))


def merge_group(rows):
    """Component-wise mean of the rows, rounded half away from zero."""
    if not len(rows):
        raise ValueError("cannot merge an empty group")
    mean = np.mean([np.asarray(r, dtype=np.float64) for r in rows], axis=0)
    return tuple(int(v) for v in round_half_away(mean))


@dataclasses.dataclass(frozen=True)
class LutTrace:
    """All i_max rows of one LUT kind, in iteration order."""

    kind: str
    rows: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown LUT kind {self.kind!r}")
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise ValueError("trace has no rows")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("trace rows differ in length")

    def __len__(self):
        return len(self.rows)

    def pair_discrepancies(self):
        """d(row_k, row_{k+1}) for k = 1 .. i_max - 1."""
        return tuple(
            discrepancy(a, b) for a, b in zip(self.rows, self.rows[1:])
        )


@dataclasses.dataclass(frozen=True)
class GroupPartition:
    """Contiguous iteration groups with one merged row each.

    groups holds 1-based inclusive spans (lo, hi) in order; merged the
    shared row for each span.
    """

    groups: tuple
    merged: tuple

    def __post_init__(self):
        groups = tuple((int(lo), int(hi)) for lo, hi in self.groups)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "merged", tuple(tuple(r) for r in self.merged))
        if len(groups) != len(self.merged):
            raise ValueError("need one merged row per group")
        expect = 1
        for lo, hi in groups:
            if lo != expect or hi < lo:
                raise ValueError("groups must be contiguous, ordered, disjoint")
            expect = hi + 1

    @property
    def m(self):
        return len(self.groups)

    def expand(self):
        """Per-iteration rows with each span's merged row repeated."""
        out = []
        for (lo, hi), row in zip(self.groups, self.merged):
            out.extend([row] * (hi - lo + 1))
        return tuple(out)


def trace_from_schedule(schedule, kind):
    """Extract one LUT kind's per-iteration rows from a schedule."""
    pick = {
        "phi_v": lambda it: it.phi_v.table,
        "phi_ch": lambda it: it.phi_ch.table,
        "gamma_v": lambda it: it.gamma_v,
        "gamma_e": lambda it: (it.gamma_e,),
    }[kind]
    return LutTrace(kind, tuple(pick(it) for it in schedule.iters))


def partition_by_threshold(trace, delta):
    """Greedy left-to-right grouping: extend while consecutive d <= delta."""
    if delta < 0:
        raise ValueError("discrepancy threshold must be >= 0")
    spans = []
    lo = 1
    for t, d in enumerate(trace.pair_discrepancies(), start=1):
        if d > delta:
            spans.append((lo, t))
            lo = t + 1
    spans.append((lo, len(trace)))
    merged = tuple(merge_group(trace.rows[lo - 1 : hi]) for lo, hi in spans)
    return GroupPartition(tuple(spans), merged)


def _with_rows(schedule, kind, rows):
    """Replace one LUT kind's per-iteration rows throughout a schedule."""
    field = {
        "phi_v": lambda row: {"phi_v": ReconstructionFn(row)},
        "phi_ch": lambda row: {"phi_ch": ReconstructionFn(row)},
        "gamma_v": lambda row: {"gamma_v": row},
        "gamma_e": lambda row: {"gamma_e": row[0]},
    }[kind]
    iters = tuple(
        dataclasses.replace(it, **field(row))
        for it, row in zip(schedule.iters, rows)
    )
    return dataclasses.replace(schedule, iters=iters, mi_trajectory=None)


def apply_partitions(schedule, partitions):
    """Rebuild a schedule with each kind's rows replaced by group merges."""
    out = schedule
    for kind, part in partitions.items():
        out = _with_rows(out, kind, part.expand())
    groups = {kind: part.groups for kind, part in partitions.items()}
    return dataclasses.replace(out, groups=groups)


@dataclasses.dataclass(frozen=True)
class OptimizeResult:
    """Merged schedule plus the per-kind partitions and accepted thresholds.

    merged is False when no candidate threshold reached q_star for any
    kind; the schedule then carries the original tables (identical
    consecutive rows still share a group, which changes no values).
    """

    schedule: object
    partitions: dict
    thresholds: dict
    merged: bool
    final_mi: float


def optimize(schedule, ensemble, sigma, q_star=0.9999):
    """Exhaustive per-kind discrepancy-threshold search (largest wins).

    For each kind, candidate thresholds are the consecutive-pair
    discrepancies of its trace, scanned in iteration order; candidates
    not exceeding the best accepted threshold are skipped.  A candidate
    is accepted when the schedule merged at that threshold (with all
    previously fixed kinds in place) still reaches q_star at i_max.
    """
    if not 0.0 < q_star < 1.0:
        raise ValueError("q_star must lie in (0, 1)")
    current = schedule
    partitions, thresholds = {}, {}
    merged_any = False
    for kind in KINDS:
        trace = trace_from_schedule(current, kind)
        best_delta = 0.0
        best_part = partition_by_threshold(trace, 0.0)
        for d_k in trace.pair_discrepancies():
            if d_k <= best_delta:
                continue
            part = partition_by_threshold(trace, d_k)
            q = schedule_mi(_with_rows(current, kind, part.expand()),
                            ensemble, sigma)
            if q >= q_star:
                best_delta, best_part = d_k, part
                merged_any = True
        current = _with_rows(current, kind, best_part.expand())
        partitions[kind] = best_part
        thresholds[kind] = best_delta
    groups = {kind: part.groups for kind, part in partitions.items()}
    current = dataclasses.replace(current, groups=groups)
    return OptimizeResult(
        schedule=current, partitions=partitions, thresholds=thresholds,
        merged=merged_any, final_mi=schedule_mi(current, ensemble, sigma),
    )
