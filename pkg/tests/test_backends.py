import json
import subprocess
import sys
from fractions import Fraction
from importlib import resources

import numpy as np
import pytest

import mimqms._kernels_py as kpy
from mimqms.channel import quantize_observation, sigma_from_design_snr
from mimqms.codes import expand_base_matrix, parse_base_matrix
from mimqms.decoders import BpDecoder, NmsDecoder, QmsDecoder
from mimqms.schedule_io import read_schedule

kc = pytest.importorskip("mimqms._kernels", reason="compiled backend not built")


@pytest.fixture(scope="module")
def wifi_code():
    text = resources.files("mimqms.fixtures").joinpath("wifi_r23_z54.txt").read_text()
    return expand_base_matrix(*parse_base_matrix(text))


@pytest.fixture(scope="module")
def sched_rc():
    text = resources.files("mimqms.fixtures").joinpath("qms4_wifi_ratecompat.txt").read_text()
    return read_schedule(text)


def _frames(code, sched, n, seed, snr_db=2.4):
    sigma = sigma_from_design_snr(snr_db, Fraction(2, 3))
    rng = np.random.default_rng(seed)
    for _ in range(n):
        y = 1.0 + sigma * rng.standard_normal(code.n_vars)
        yield y, sigma, quantize_observation(sched.channel_quantizer, y, sigma)


def _run_both(frame_fn, args, scratch_dtype, n_edges, n_vars):
    out = []
    for mod in (kc, kpy):
        v2c = np.empty(n_edges, dtype=scratch_dtype)
        c2v = np.empty(n_edges, dtype=scratch_dtype)
        bits = np.empty(n_vars, dtype=np.uint8)
        iters, conv = getattr(mod, frame_fn)(*args, v2c, c2v, bits)
        out.append((bits.copy(), iters, conv, v2c.copy()))
    return out


def test_qms_backends_bit_exact(wifi_code, sched_rc):
    dec = QmsDecoder(wifi_code, sched_rc)
    for _, _, idx in _frames(wifi_code, sched_rc, 15, seed=3):
        args = dec._graph_args() + (
            idx, dec._phi_v, dec._phi_ch, dec._quant, dec._gamma_e,
            dec._half, dec._qv_max,
        )
        (b1, i1, c1, v1), (b2, i2, c2, v2) = _run_both(
            "qms_frame", args, np.int64, wifi_code.n_edges, wifi_code.n_vars
        )
        assert np.array_equal(b1, b2)
        assert (i1, c1) == (i2, c2)
        assert np.array_equal(v1, v2)


def test_nms_backends_bit_exact(wifi_code, sched_rc):
    dec = NmsDecoder(wifi_code)
    for y, sigma, _ in _frames(wifi_code, sched_rc, 15, seed=4):
        llrs = 2.0 * y / sigma**2
        qy = np.clip(
            np.where(llrs >= 0, np.floor(llrs + 0.5), np.ceil(llrs - 0.5)), -7, 7
        ).astype(np.int64)
        args = dec._graph_args() + (
            qy, dec._scale_tab, dec.i_max, dec._msg_max, dec._app_max,
        )
        (b1, i1, c1, v1), (b2, i2, c2, v2) = _run_both(
            "nms_frame", args, np.int64, wifi_code.n_edges, wifi_code.n_vars
        )
        assert np.array_equal(b1, b2)
        assert (i1, c1) == (i2, c2)
        assert np.array_equal(v1, v2)


def test_bp_backends_agree_on_decisions(wifi_code, sched_rc):
    dec = BpDecoder(wifi_code)
    for y, sigma, _ in _frames(wifi_code, sched_rc, 15, seed=5):
        llrs = np.ascontiguousarray(2.0 * y / sigma**2)
        args = dec._graph_args() + (llrs, dec.i_max, dec._mag_floor, dec._mag_cap)
        (b1, i1, c1, _), (b2, i2, c2, _) = _run_both(
            "bp_frame", args, np.float64, wifi_code.n_edges, wifi_code.n_vars
        )
        # float transcendentals may differ in the last ulp; decisions agree
        assert np.array_equal(b1, b2)
        assert (i1, c1) == (i2, c2)


def test_forced_python_backend_decodes_identically(wifi_code, sched_rc):
    dec = QmsDecoder(wifi_code, sched_rc)
    _, _, idx = next(_frames(wifi_code, sched_rc, 1, seed=6))
    res = dec.decode(idx)
    script = (
        "import json, sys\n"
        "import numpy as np\n"
        "from importlib import resources\n"
        "from mimqms.codes import expand_base_matrix, parse_base_matrix\n"
        "from mimqms.decoders import BACKEND, QmsDecoder\n"
        "from mimqms.schedule_io import read_schedule\n"
        "fx = resources.files('mimqms.fixtures')\n"
        "code = expand_base_matrix(*parse_base_matrix("
        "(fx / 'wifi_r23_z54.txt').read_text()))\n"
        "sched = read_schedule((fx / 'qms4_wifi_ratecompat.txt').read_text())\n"
        "idx = np.array(json.loads(sys.stdin.read()))\n"
        "r = QmsDecoder(code, sched).decode(idx)\n"
        "print(json.dumps({'backend': BACKEND, 'bits': r.bits.tolist(),"
        " 'iters': r.iterations_used, 'conv': r.converged}))\n"
    )
    proc = subprocess.run(
        [sys.executable, "-c", script],
        input=json.dumps(idx.tolist()),
        capture_output=True, text=True, check=True,
        env={"PATH": "/usr/bin:/bin", "MIMQMS_FORCE_PY": "1"},
    )
    got = json.loads(proc.stdout)
    assert got["backend"] == "python"
    assert got["bits"] == res.bits.tolist()
    assert (got["iters"], got["conv"]) == (res.iterations_used, res.converged)
