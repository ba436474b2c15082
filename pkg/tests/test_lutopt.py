import dataclasses
from importlib import resources

import numpy as np
import pytest

from mimqms.codes import expand_base_matrix, joint_degree_distribution, parse_base_matrix
from mimqms.lutopt import (
    KINDS,
    GroupPartition,
    LutTrace,
    apply_partitions,
    discrepancy,
    merge_group,
    optimize,
    partition_by_threshold,
    trace_from_schedule,
)
from mimqms.mimde import design_schedule, schedule_mi
from mimqms.schedule_io import read_schedule, write_schedule

# published phi_v table repeats this row verbatim at iterations 15 and 16
PHI_V_LATE = (14, 10, 7, 5, 3, 2, 1, 0, 0, -1, -2, -3, -5, -7, -10, -14)


@pytest.fixture(scope="module")
def ens_r23():
    text = resources.files("mimqms.fixtures").joinpath("wifi_r23_z54.txt").read_text()
    code = expand_base_matrix(*parse_base_matrix(text))
    return joint_degree_distribution([code])


@pytest.fixture(scope="module")
def sched5(ens_r23):
    return design_schedule(ens_r23, 0.7016, i_max=5)


def test_discrepancy_identity():
    assert discrepancy((3, -1, 2), (3, -1, 2)) == 0.0
    assert discrepancy(PHI_V_LATE, PHI_V_LATE) == 0.0


def test_discrepancy_three_four_five():
    assert discrepancy((0, 3), (4, 0)) == pytest.approx(5.0, abs=1e-15)


def test_discrepancy_length_mismatch():
    with pytest.raises(ValueError, match="length mismatch"):
        discrepancy((1, 2), (1, 2, 3))


def test_merge_identical_rows():
    assert merge_group([(4, 2, -2, -4)] * 3) == (4, 2, -2, -4)


def test_merge_rounds_half_away_from_zero():
    assert merge_group([(2, 4), (3, 5)]) == (3, 5)
    assert merge_group([(1, -1), (2, -2)]) == (2, -2)


def test_merge_permutation_invariant_and_idempotent():
    rng = np.random.default_rng(7)
    for _ in range(20):
        rows = [tuple(rng.integers(-9, 10, size=6)) for _ in range(4)]
        merged = merge_group(rows)
        assert merge_group(rows[::-1]) == merged
        assert merge_group([merged]) == merged


def test_merge_empty_group_rejected():
    with pytest.raises(ValueError, match="empty group"):
        merge_group([])


def test_partition_zero_threshold_distinct_rows():
    trace = LutTrace("gamma_e", ((0,), (1,), (2,), (3,)))
    part = partition_by_threshold(trace, 0.0)
    assert part.groups == ((1, 1), (2, 2), (3, 3), (4, 4))
    assert part.m == 4


def test_partition_infinite_threshold_single_group():
    trace = LutTrace("gamma_e", ((0,), (1,), (5,), (6,)))
    part = partition_by_threshold(trace, np.inf)
    assert part.groups == ((1, 4),)
    assert part.merged == ((3,),)  # mean 3.0


def test_partition_hand_trace():
    trace = LutTrace("gamma_e", ((0,), (1,), (5,), (6,)))
    part = partition_by_threshold(trace, 1.0)
    assert part.groups == ((1, 2), (3, 4))
    assert part.merged == ((1,), (6,))  # means 0.5 and 5.5 round away


def test_partition_negative_threshold_rejected():
    trace = LutTrace("gamma_e", ((0,), (1,)))
    with pytest.raises(ValueError, match=">= 0"):
        partition_by_threshold(trace, -0.5)


def test_partition_covers_all_iterations():
    rng = np.random.default_rng(8)
    for _ in range(30):
        rows = tuple((int(v),) for v in rng.integers(0, 5, size=12))
        trace = LutTrace("gamma_e", rows)
        deltas = sorted(set(trace.pair_discrepancies())) + [np.inf]
        last_m = None
        for delta in deltas:
            part = partition_by_threshold(trace, delta)
            covered = [t for lo, hi in part.groups for t in range(lo, hi + 1)]
            assert covered == list(range(1, 13))
            # larger threshold never splits finer
            if last_m is not None:
                assert part.m <= last_m
            last_m = part.m


def test_group_partition_rejects_gaps():
    with pytest.raises(ValueError, match="contiguous"):
        GroupPartition(((1, 2), (4, 5)), ((0,), (0,)))


def test_trace_from_schedule_kinds(sched5):
    for kind, width in (("phi_v", 16), ("phi_ch", 16), ("gamma_v", 15), ("gamma_e", 1)):
        trace = trace_from_schedule(sched5, kind)
        assert len(trace) == 5
        assert all(len(r) == width for r in trace.rows)
    with pytest.raises(KeyError):
        trace_from_schedule(sched5, "phi_x")


def test_optimize_all_identical_schedule(sched5, ens_r23):
    it = sched5.iters[0]
    flat = dataclasses.replace(sched5, iters=(it,) * 5, mi_trajectory=None)
    res = optimize(flat, ens_r23, 0.7016, q_star=0.9999)
    assert res.merged is False
    for kind in KINDS:
        assert res.partitions[kind].m == 1
        assert res.thresholds[kind] == 0.0
    assert res.schedule.iters == flat.iters
    assert res.final_mi == pytest.approx(schedule_mi(flat, ens_r23, 0.7016), abs=1e-12)


def test_optimize_loose_target_merges(sched5, ens_r23):
    res = optimize(sched5, ens_r23, 0.7016, q_star=0.8)
    assert res.merged is True
    assert res.final_mi >= 0.8
    assert sum(res.partitions[k].m for k in KINDS) < 4 * 5
    assert set(res.schedule.groups) == set(KINDS)
    for kind in KINDS:
        assert res.schedule.groups[kind] == res.partitions[kind].groups


def test_optimize_unreachable_target_keeps_tables(sched5, ens_r23):
    res = optimize(sched5, ens_r23, 0.7016, q_star=0.9999)
    assert res.merged is False
    assert res.schedule.iters == sched5.iters
    assert all(d == 0.0 for d in res.thresholds.values())


def test_optimize_rejects_bad_target(sched5, ens_r23):
    with pytest.raises(ValueError, match="q_star"):
        optimize(sched5, ens_r23, 0.7016, q_star=1.0)


def test_optimized_schedule_serializes(sched5, ens_r23):
    res = optimize(sched5, ens_r23, 0.7016, q_star=0.8)
    again = read_schedule(write_schedule(res.schedule))
    assert again.iters == res.schedule.iters
    assert again.groups == res.schedule.groups


def test_apply_partitions_matches_optimize(sched5, ens_r23):
    res = optimize(sched5, ens_r23, 0.7016, q_star=0.8)
    rebuilt = apply_partitions(sched5, res.partitions)
    assert rebuilt.iters == res.schedule.iters
    assert rebuilt.groups == res.schedule.groups
