"""Runtime LDPC decoders over a TannerCode.

QmsDecoder runs the LUT-scheduled quantized min-sum decoder: messages
are q_m-bit indices, variable nodes sum reconstructed integers on the
q_v-bit grid and re-quantize through per-iteration thresholds.  The
NMS and BP decoders are conventional baselines.  All three terminate
early on a zero syndrome.

The hot per-frame loops live in a compiled extension (mimqms._kernels)
when it was built, with a pure-numpy fallback (mimqms._kernels_py);
set MIMQMS_FORCE_PY=1 to force the fallback.  QMS and NMS results are
bit-exact across backends.
"""

import os
from dataclasses import dataclass

import numpy as np

from .mimde import round_half_away

if os.environ.get("MIMQMS_FORCE_PY"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

__all__ = [
    "BACKEND",
    "DecodeResult",
    "QmsDecoder",
    "NmsDecoder",
    "BpDecoder",
    "qms_decode",
    "nms_decode",
    "bp_decode",
]


@dataclass(frozen=True)
class DecodeResult:
    """Hard decisions plus how the decoder stopped."""

    bits: np.ndarray
    iterations_used: int
    converged: bool


class _GraphDecoder:
    """Shared per-code edge layout and scratch buffers."""

    def __init__(self, code):
        self.code = code
        self._check_ptr = code.check_ptr.astype(np.int64)
        self._edge_var = code.edge_var.astype(np.int64)
        self._coe = np.repeat(
            np.arange(code.n_checks, dtype=np.int64), code.cn_degrees
        )
        self._var_ptr = code.var_ptr.astype(np.int64)
        self._perm = code.var_edge_perm.astype(np.int64)
        self._vpe = np.repeat(
            np.arange(code.n_vars, dtype=np.int64), code.vn_degrees
        )

    def _buffers(self, dtype):
        e = self.code.n_edges
        return (
            np.empty(e, dtype=dtype),
            np.empty(e, dtype=dtype),
            np.empty(self.code.n_vars, dtype=np.uint8),
        )

    def _graph_args(self):
        return (
            self._check_ptr, self._edge_var, self._coe,
            self._var_ptr, self._perm, self._vpe,
        )


class QmsDecoder(_GraphDecoder):
    """LUT-scheduled (q_m, q_v) quantized min-sum decoder."""

    def __init__(self, code, schedule):
        super().__init__(code)
        self.schedule = schedule
        n = 2**schedule.q_m
        if schedule.channel_quantizer.n_levels != n:
            raise ValueError("schedule channel quantizer does not match q_m")
        d_v = int(code.vn_degrees.max())
        if d_v > schedule.ensemble.d_v_max:
            raise ValueError(
                f"code VN degree {d_v} exceeds the schedule design "
                f"(d_v_max = {schedule.ensemble.d_v_max})"
            )
        self._half = n // 2
        self._qv_max = 2 ** (schedule.q_v - 1) - 1
        i_max = schedule.i_max
        self._phi_v = np.empty((i_max, n), dtype=np.int64)
        self._phi_ch = np.empty((i_max, n), dtype=np.int64)
        self._gamma_e = np.empty(i_max, dtype=np.int64)
        self._quant = np.empty((i_max, 2 * self._qv_max + 1), dtype=np.int64)
        sums = np.arange(-self._qv_max, self._qv_max + 1, dtype=np.int64)
        for t, it in enumerate(schedule.iters):
            self._phi_v[t] = it.phi_v.table
            self._phi_ch[t] = it.phi_ch.table
            self._gamma_e[t] = it.gamma_e
            g = -np.asarray(it.gamma_v, dtype=np.int64)
            # index = count of thresholds above the sum; ties join the lower index
            self._quant[t] = np.searchsorted(g, -sums, side="left")
        self._v2c, self._c2v, self._bits = self._buffers(np.int64)

    def decode(self, channel_idx):
        """Decode one frame of channel quantizer indices."""
        idx = np.ascontiguousarray(channel_idx, dtype=np.int64)
        if idx.shape != (self.code.n_vars,):
            raise ValueError(f"need {self.code.n_vars} channel indices")
        if idx.min() < 0 or idx.max() >= 2 * self._half:
            raise ValueError("channel index outside the q_m-bit alphabet")
        iters, conv = _impl.qms_frame(
            *self._graph_args(), idx,
            self._phi_v, self._phi_ch, self._quant, self._gamma_e,
            self._half, self._qv_max,
            self._v2c, self._c2v, self._bits,
        )
        return DecodeResult(self._bits.copy(), iters, conv)


class NmsDecoder(_GraphDecoder):
    """Normalized min-sum on a uniform 4-bit message grid.

    Channel LLRs quantize as clip(round(llr / delta)) onto the integer
    grid [-msg_max, msg_max]; pick delta so msg_max * delta is about 4
    channel-LLR standard deviations (delta = 1/sigma for BPSK-AWGN,
    where the LLR std is 2/sigma and msg_max + 1 = 8).
    """

    def __init__(self, code, i_max=30, scale=0.75, delta=1.0,
                 msg_max=7, app_max=127):
        super().__init__(code)
        if not 0.0 < scale <= 1.0:
            raise ValueError("scale must lie in (0, 1]")
        if delta <= 0.0:
            raise ValueError("delta must be positive")
        self.i_max = int(i_max)
        self.scale = float(scale)
        self.delta = float(delta)
        self._msg_max = int(msg_max)
        self._app_max = int(app_max)
        mags = np.arange(msg_max + 1, dtype=np.float64)
        self._scale_tab = round_half_away(scale * mags).astype(np.int64)
        self._v2c, self._c2v, self._bits = self._buffers(np.int64)

    def decode(self, llrs):
        llrs = np.asarray(llrs, dtype=np.float64)
        if llrs.shape != (self.code.n_vars,):
            raise ValueError(f"need {self.code.n_vars} channel LLRs")
        qy = np.clip(
            round_half_away(llrs / self.delta), -self._msg_max, self._msg_max
        ).astype(np.int64)
        iters, conv = _impl.nms_frame(
            *self._graph_args(), qy, self._scale_tab, self.i_max,
            self._msg_max, self._app_max,
            self._v2c, self._c2v, self._bits,
        )
        return DecodeResult(self._bits.copy(), iters, conv)


class BpDecoder(_GraphDecoder):
    """Floating-point sum-product (tanh rule) decoder."""

    def __init__(self, code, i_max=30, mag_floor=1e-9, mag_cap=30.0):
        super().__init__(code)
        self.i_max = int(i_max)
        self._mag_floor = float(mag_floor)
        self._mag_cap = float(mag_cap)
        self._v2c, self._c2v, self._bits = self._buffers(np.float64)

    def decode(self, llrs):
        llrs = np.ascontiguousarray(llrs, dtype=np.float64)
        if llrs.shape != (self.code.n_vars,):
            raise ValueError(f"need {self.code.n_vars} channel LLRs")
        if not np.isfinite(llrs).all():
            raise ValueError("channel LLRs must be finite")
        iters, conv = _impl.bp_frame(
            *self._graph_args(), llrs, self.i_max,
            self._mag_floor, self._mag_cap,
            self._v2c, self._c2v, self._bits,
        )
        return DecodeResult(self._bits.copy(), iters, conv)


def qms_decode(code, channel_idx, schedule):
    """One-shot LUT-scheduled decode (see QmsDecoder for reuse)."""
    return QmsDecoder(code, schedule).decode(channel_idx)


def nms_decode(code, llrs, i_max=30, scale=0.75, delta=1.0):
    """One-shot normalized min-sum decode."""
    return NmsDecoder(code, i_max=i_max, scale=scale, delta=delta).decode(llrs)


def bp_decode(code, llrs, i_max=30):
    """One-shot sum-product decode."""
    return BpDecoder(code, i_max=i_max).decode(llrs)
