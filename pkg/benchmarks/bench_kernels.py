"""Throughput comparison: compiled decoder kernels vs the numpy fallback.

Runs the three decoders over the same noisy frames through both kernel
backends and reports frames/s and the speedup.  Usage:

    python3 benchmarks/bench_kernels.py [--frames 200] [--snr-db 2.6]
"""

import argparse
import time
from fractions import Fraction
from importlib import resources

import numpy as np

import mimqms._kernels_py as kernels_py
from mimqms.channel import quantize_observation, sigma_from_design_snr
from mimqms.codes import expand_base_matrix, parse_base_matrix
from mimqms.decoders import BpDecoder, NmsDecoder, QmsDecoder
from mimqms.schedule_io import read_schedule

try:
    import mimqms._kernels as kernels_c
except ImportError:
    kernels_c = None


def _frame_args(dec, kind, y, sigma, sched):
    if kind == "qms":
        idx = quantize_observation(sched.channel_quantizer, y, sigma)
        return dec._graph_args() + (
            idx, dec._phi_v, dec._phi_ch, dec._quant, dec._gamma_e,
            dec._half, dec._qv_max,
        )
    llrs = np.ascontiguousarray(2.0 * y / sigma**2)
    if kind == "nms":
        qy = np.clip(
            np.where(llrs >= 0, np.floor(llrs + 0.5), np.ceil(llrs - 0.5)), -7, 7
        ).astype(np.int64)
        return dec._graph_args() + (
            qy, dec._scale_tab, dec.i_max, dec._msg_max, dec._app_max,
        )
    return dec._graph_args() + (llrs, dec.i_max, dec._mag_floor, dec._mag_cap)


def bench(frames, snr_db):
    fx = resources.files("mimqms.fixtures")
    code = expand_base_matrix(*parse_base_matrix((fx / "wifi_r23_z54.txt").read_text()))
    sched = read_schedule((fx / "qms4_wifi_ratecompat.txt").read_text())
    sigma = sigma_from_design_snr(snr_db, Fraction(2, 3))
    rng = np.random.default_rng(0)
    ys = 1.0 + sigma * rng.standard_normal((frames, code.n_vars))

    decs = {
        "qms": (QmsDecoder(code, sched), np.int64),
        "nms": (NmsDecoder(code, delta=1.0 / sigma), np.int64),
        "bp": (BpDecoder(code), np.float64),
    }
    backends = [("numpy", kernels_py)]
    if kernels_c is not None:
        backends.insert(0, ("compiled", kernels_c))

    print(f"code n={code.n_vars}, {frames} frames at {snr_db} dB")
    print(f"{'decoder':8} " + " ".join(f"{name:>14}" for name, _ in backends)
          + ("  speedup" if kernels_c is not None else ""))
    for kind, (dec, dtype) in decs.items():
        rates = []
        for _, mod in backends:
            fn = getattr(mod, f"{kind}_frame")
            v2c = np.empty(code.n_edges, dtype=dtype)
            c2v = np.empty(code.n_edges, dtype=dtype)
            bits = np.empty(code.n_vars, dtype=np.uint8)
            args = [_frame_args(dec, kind, y, sigma, sched) for y in ys]
            t0 = time.perf_counter()
            for a in args:
                fn(*a, v2c, c2v, bits)
            rates.append(frames / (time.perf_counter() - t0))
        row = f"{kind:8} " + " ".join(f"{r:>12.1f}/s" for r in rates)
        if len(rates) == 2:
            row += f"  {rates[0] / rates[1]:6.1f}x"
        print(row)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=200)
    ap.add_argument("--snr-db", type=float, default=2.6)
    args = ap.parse_args()
    bench(args.frames, args.snr_db)


if __name__ == "__main__":
    main()
