import dataclasses
from importlib import resources

import pytest

from mimqms.codes import expand_base_matrix, joint_degree_distribution, parse_base_matrix
from mimqms.mimde import design_schedule, schedule_mi
from mimqms.schedule_io import HEADER, read_schedule, write_schedule

FIXTURES = {
    "qms4_wifi_r23.txt": 0.7016,
    "qms4_wifi_r34.txt": 0.6266,
    "qms4_wifi_r56.txt": 0.5494,
    "qms4_wifi_ratecompat.txt": 0.6195,
}


def fixture_text(name):
    return resources.files("mimqms.fixtures").joinpath(name).read_text()


@pytest.fixture(scope="module")
def sched():
    base, lift = parse_base_matrix(fixture_text("wifi_r23_z54.txt"))
    ens = joint_degree_distribution([expand_base_matrix(base, lift)])
    return design_schedule(ens, 0.7016, i_max=3)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_schedules_load(name):
    s = read_schedule(fixture_text(name))
    assert s.q_m == 4 and s.q_v == 8 and s.i_max == 30
    assert len(s.iters) == 30
    assert len(s.channel_quantizer.thresholds) == 15
    assert s.design_sigma == pytest.approx(FIXTURES[name], abs=5e-5)
    for it in s.iters:
        assert len(it.phi_v) == 16 and len(it.gamma_v) == 15


def test_fixture_ratecompat_pools_degrees():
    s = read_schedule(fixture_text("qms4_wifi_ratecompat.txt"))
    assert s.ensemble.cn_degrees == (11, 14, 15, 21, 22)
    assert s.ensemble.vn_degrees == (2, 3, 4, 6, 7, 8)
    assert sum(s.ensemble.vn_coeffs.values()) == pytest.approx(1.0, abs=1e-9)


def test_round_trip_preserves_schedule(sched):
    text = write_schedule(sched)
    again = read_schedule(text)
    assert again.iters == sched.iters
    assert again.design_sigma == sched.design_sigma
    assert again.q_m == sched.q_m and again.q_v == sched.q_v
    assert again.i_max == sched.i_max
    assert again.fine_bins == sched.fine_bins
    assert again.fine_clip == sched.fine_clip
    assert again.channel_quantizer.thresholds == sched.channel_quantizer.thresholds
    assert again.ensemble.cn_coeffs == sched.ensemble.cn_coeffs
    assert again.ensemble.vn_coeffs == sched.ensemble.vn_coeffs
    assert write_schedule(again) == text


def test_round_trip_preserves_evolution(sched):
    again = read_schedule(write_schedule(sched))
    ens = sched.ensemble
    assert schedule_mi(again, ens, 0.72) == pytest.approx(
        schedule_mi(sched, ens, 0.72), abs=1e-15
    )


def test_identical_iterations_collapse_to_ranges(sched):
    frozen = dataclasses.replace(
        sched, i_max=6, iters=sched.iters + (sched.iters[-1],) * 3, frozen_from=4
    )
    text = write_schedule(frozen)
    assert "[iteration 3-6]" in text
    assert "frozen_from = 4" in text
    again = read_schedule(text)
    assert again.iters == frozen.iters
    assert again.frozen_from == 4


def test_groups_round_trip(sched):
    grouped = dataclasses.replace(
        sched, groups={"phi_v": ((1, 2), (3, 3)), "gamma_e": ((1, 3),)}
    )
    again = read_schedule(write_schedule(grouped))
    assert again.groups == grouped.groups


def test_header_required(sched):
    body = write_schedule(sched).splitlines()[1:]
    with pytest.raises(ValueError, match="missing header"):
        read_schedule("\n".join(body))


def test_comments_and_blank_lines_ignored(sched):
    lines = write_schedule(sched).splitlines()
    lines.insert(1, "# a note")
    lines.insert(4, "")
    lines[5] = lines[5] + "  # trailing remark"
    assert read_schedule("\n".join(lines)).iters == sched.iters


def test_unknown_section_rejected(sched):
    text = write_schedule(sched) + "\n[mystery]\nx = 1\n"
    with pytest.raises(ValueError, match=r"unknown section \[mystery\]"):
        read_schedule(text)


def test_unknown_top_key_rejected(sched):
    text = write_schedule(sched).replace("q_m = 4", "q_z = 4\nq_m = 4")
    with pytest.raises(ValueError, match="unknown key 'q_z'"):
        read_schedule(text)


def test_duplicate_iteration_rejected(sched):
    text = write_schedule(sched)
    block = text[text.index("[iteration 1]") :]
    block = block[: block.index("[iteration 2]")]
    with pytest.raises(ValueError, match="defined twice"):
        read_schedule(text + "\n" + block)


def test_missing_iteration_rejected(sched):
    text = write_schedule(sched).replace("[iteration 2]", "[iteration 3]", 1)
    with pytest.raises(ValueError, match=r"defined twice|without LUTs"):
        read_schedule(text)


def test_range_outside_bounds_rejected(sched):
    text = write_schedule(sched).replace("[iteration 3]", "[iteration 3-9]")
    with pytest.raises(ValueError, match="outside 1..3"):
        read_schedule(text)


def test_wrong_table_width_rejected(sched):
    text = write_schedule(sched)
    lines = text.splitlines()
    k = next(i for i, l in enumerate(lines) if l.startswith("gamma_v"))
    lines[k] = lines[k].rsplit(" ", 1)[0]  # drop one threshold
    with pytest.raises(ValueError, match="gamma_v needs 15 integers"):
        read_schedule("\n".join(lines))


def test_bad_coeff_token_rejected(sched):
    text = write_schedule(sched)
    bad = text.replace("cn = ", "cn = eleven:1.0 ", 1)
    with pytest.raises(ValueError, match="bad degree:fraction"):
        read_schedule(bad)


def test_missing_gamma_ch_rejected(sched):
    lines = write_schedule(sched).splitlines()
    k = lines.index("[gamma_ch]")
    del lines[k : k + 2]
    with pytest.raises(ValueError, match=r"missing \[gamma_ch\]"):
        read_schedule("\n".join(lines))
