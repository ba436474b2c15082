from fractions import Fraction
from importlib import resources

import numpy as np
import pytest

from mimqms.codes import (
    TannerCode,
    expand_base_matrix,
    edge_degree_distribution,
    joint_degree_distribution,
    load_alist,
    parse_base_matrix,
    syndrome,
)

TOY_ALIST = """\
3 2
2 2
1 2 1
2 2
1 0
1 2
2 0
1 2
2 3
"""


def fixture_text(name):
    return (resources.files("mimqms") / "fixtures" / name).read_text()


def wifi_code(rate_tag):
    base, lift = parse_base_matrix(fixture_text(f"wifi_{rate_tag}_z54.txt"))
    return expand_base_matrix(base, lift)


def to_alist(code):
    """Re-emit a TannerCode in alist layout (1-based, zero-padded rows)."""
    vdeg, cdeg = code.vn_degrees, code.cn_degrees
    lines = [
        f"{code.n_vars} {code.n_checks}",
        f"{vdeg.max()} {cdeg.max()}",
        " ".join(map(str, vdeg)),
        " ".join(map(str, cdeg)),
    ]
    for row, width in [(r, vdeg.max()) for r in code.var_adj] + [
        (r, cdeg.max()) for r in code.check_adj
    ]:
        padded = [str(e + 1) for e in row] + ["0"] * (width - len(row))
        lines.append(" ".join(padded))
    return "\n".join(lines) + "\n"


def test_load_alist_toy():
    code = load_alist(TOY_ALIST)
    assert code.n_vars == 3 and code.n_checks == 2
    assert code.check_adj == ((0, 1), (1, 2))
    assert code.var_adj == ((0,), (0, 1), (1,))
    assert tuple(code.cn_degrees) == (2, 2)
    assert tuple(code.vn_degrees) == (1, 2, 1)
    assert code.rate == Fraction(1, 3)


def test_load_alist_zero_index_rejected():
    bad = TOY_ALIST.replace("1 2\n2 0", "0 2\n2 0")
    with pytest.raises(ValueError, match="line 6.*index out of range"):
        load_alist(bad)


def test_load_alist_index_beyond_range_rejected():
    bad = TOY_ALIST.replace("2 3", "2 4")
    with pytest.raises(ValueError, match="index out of range"):
        load_alist(bad)


def test_load_alist_malformed_header():
    with pytest.raises(ValueError, match="line 1"):
        load_alist("3 -2\n" + TOY_ALIST.split("\n", 1)[1])


def test_load_alist_degree_mismatch():
    bad = TOY_ALIST.replace("1 2 1", "2 2 1")
    with pytest.raises(ValueError, match="line 5.*degree mismatch"):
        load_alist(bad)


def test_expand_identity_block():
    code = expand_base_matrix([[0]], 3)
    assert code.check_adj == ((0,), (1,), (2,))
    assert code.var_adj == ((0,), (1,), (2,))


def test_expand_single_rotation():
    code = expand_base_matrix([[1]], 3)
    # check k connects variable (k + 1) mod 3
    assert code.check_adj == ((1,), (2,), (0,))


def test_expand_shift_out_of_range():
    with pytest.raises(ValueError, match="shift"):
        expand_base_matrix([[3]], 3)


def test_expand_disconnected_variable_rejected():
    with pytest.raises(ValueError, match="degree >= 1"):
        expand_base_matrix([[0, -1]], 2)


def test_wifi_r23_shape_and_distribution():
    code = wifi_code("r23")
    assert code.n_vars == 1296 and code.n_checks == 432
    assert code.rate == Fraction(2, 3)
    dist = edge_degree_distribution(code)
    assert dist.cn_coeffs == {11: 1.0}
    expected_theta = {2: 0.1591, 3: 0.4091, 7: 0.1591, 8: 0.2727}
    assert set(dist.vn_coeffs) == set(expected_theta)
    for d, frac in expected_theta.items():
        assert dist.vn_coeffs[d] == pytest.approx(frac, abs=5e-5)


def test_wifi_r34_distribution():
    dist = edge_degree_distribution(wifi_code("r34"))
    for d, frac in {14: 0.3182, 15: 0.6818}.items():
        assert dist.cn_coeffs[d] == pytest.approx(frac, abs=5e-5)
    for d, frac in {2: 0.1136, 3: 0.4091, 6: 0.4773}.items():
        assert dist.vn_coeffs[d] == pytest.approx(frac, abs=5e-5)


def test_wifi_r56_shape_and_distribution():
    code = wifi_code("r56")
    assert code.n_vars == 1296 and code.n_checks == 216
    assert code.vn_degrees.max() == 4 and code.cn_degrees.max() == 22
    dist = edge_degree_distribution(wifi_code("r56"))
    for d, frac in {21: 0.7412, 22: 0.2588}.items():
        assert dist.cn_coeffs[d] == pytest.approx(frac, abs=5e-5)


def test_expand_edge_count_matches_base_occupancy():
    base, lift = parse_base_matrix(fixture_text("wifi_r23_z54.txt"))
    code = expand_base_matrix(base, lift)
    assert code.n_edges == lift * int((base >= 0).sum())


def test_alist_round_trip_wifi():
    code = wifi_code("r23")
    again = load_alist(to_alist(code), rate=code.rate)
    assert again.check_adj == code.check_adj
    assert again.var_adj == code.var_adj
    assert again.rate == code.rate


def test_transpose_mismatch_rejected():
    with pytest.raises(ValueError, match="not transposes"):
        TannerCode(((0, 1), (1, 2)), ((0,), (0,), (1,)), Fraction(1, 3))


def test_regular_code_distribution():
    code = TannerCode.from_check_adj([list(range(6))] * 3, 6, Fraction(1, 2))
    dist = edge_degree_distribution(code)
    assert dist.cn_coeffs == {6: 1.0}
    assert dist.vn_coeffs == {3: 1.0}


def test_joint_single_is_identity():
    code = wifi_code("r34")
    dist = edge_degree_distribution(code)
    joint = joint_degree_distribution([code])
    assert joint.cn_coeffs == pytest.approx(dist.cn_coeffs)
    assert joint.vn_coeffs == pytest.approx(dist.vn_coeffs)
    assert joint.cn_degrees == tuple(sorted(dist.cn_coeffs))


def test_joint_duplicated_inputs_unchanged():
    code = wifi_code("r56")
    one = joint_degree_distribution([code])
    two = joint_degree_distribution([code, code])
    assert two.cn_coeffs == pytest.approx(one.cn_coeffs, abs=1e-15)
    assert two.vn_coeffs == pytest.approx(one.vn_coeffs, abs=1e-15)


def test_joint_equal_weights_two_regulars():
    from mimqms.codes import DegreeDistribution

    d1 = DegreeDistribution({4: 1.0}, {3: 1.0})
    d2 = DegreeDistribution({6: 1.0}, {3: 1.0})
    joint = joint_degree_distribution([d1, d2], weights=[1, 1])
    assert joint.cn_coeffs == pytest.approx({4: 0.5, 6: 0.5})
    with pytest.raises(ValueError, match="explicit weights"):
        joint_degree_distribution([d1, d2])


def test_joint_wifi_family_edge_count_weights():
    codes = [wifi_code(tag) for tag in ("r23", "r34", "r56")]
    joint = joint_degree_distribution(codes)
    assert joint.vn_degrees == (2, 3, 4, 6, 7, 8)
    assert joint.cn_degrees == (11, 14, 15, 21, 22)
    assert joint.d_v_max == 8 and joint.d_c_max == 22
    # independent oracle: pool node degrees across the family directly
    total = sum(c.n_edges for c in codes)
    for deg in joint.cn_degrees:
        pooled = sum(int(c.cn_degrees[c.cn_degrees == deg].sum()) for c in codes)
        assert joint.cn_coeffs[deg] == pytest.approx(pooled / total, abs=1e-12)
    for deg in joint.vn_degrees:
        pooled = sum(int(c.vn_degrees[c.vn_degrees == deg].sum()) for c in codes)
        assert joint.vn_coeffs[deg] == pytest.approx(pooled / total, abs=1e-12)


def test_syndrome_all_zero_and_unit_vectors():
    code = wifi_code("r23")
    assert not syndrome(code, np.zeros(code.n_vars, dtype=np.uint8)).any()
    word = np.zeros(code.n_vars, dtype=np.uint8)
    word[100] = 1
    s = syndrome(code, word)
    assert sorted(np.flatnonzero(s)) == sorted(code.var_adj[100])


def test_syndrome_toy_by_hand():
    code = load_alist(TOY_ALIST)
    # H rows {v0,v1}, {v1,v2}
    assert tuple(syndrome(code, [1, 0, 1])) == (1, 1)
    assert tuple(syndrome(code, [1, 1, 0])) == (0, 1)
    assert tuple(syndrome(code, [0, 1, 1])) == (1, 0)


def test_syndrome_length_mismatch():
    code = load_alist(TOY_ALIST)
    with pytest.raises(ValueError, match="expected 3 bits"):
        syndrome(code, [0, 1])
