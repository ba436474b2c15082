"""Pure-numpy decoder kernels (fallback backend).

Each function decodes one frame over a flattened Tanner graph: edges are
numbered check-major (check_ptr delimits each check's edge block), and
var_edge_perm regroups those edge ids variable-major (var_ptr delimits
each variable's block).  coe[e] / vpe[p] give the check of edge e and
the variable of perm position p.  All integer work is int64; message
arrays v2c / c2v are caller-provided scratch, bits the output word.

The compiled backend (_kernels.pyx) implements the same signatures with
identical integer semantics; QMS and NMS results are bit-exact across
backends, BP agrees on decisions (float transcendentals may differ in
the last ulp).
"""

import numpy as np

__all__ = ["qms_frame", "nms_frame", "bp_frame"]


def _syndrome_zero(bits, edge_var, starts):
    par = np.bitwise_xor.reduceat(bits[edge_var].astype(np.int64), starts)
    return not par.any()


def _cn_exclusion_min(mag, neg, starts, coe, eids, big):
    """Per-edge sign and magnitude of the all-but-this-edge sign-min.

    Two-minima trick: the excluded min is min2 on the first edge attaining
    min1 and min1 everywhere else.  Degree-1 checks fall back to `big`
    (callers clamp to the strongest level).
    """
    parity = np.bitwise_xor.reduceat(neg, starts)
    min1 = np.minimum.reduceat(mag, starts)
    cand = np.where(mag == min1[coe], eids, eids.shape[0])
    first = np.minimum.reduceat(cand, starts)
    mag2 = mag.copy()
    mag2[first] = big
    min2 = np.minimum.reduceat(mag2, starts)
    mag_ex = np.where(eids == first[coe], min2[coe], min1[coe])
    sgn_ex = parity[coe] ^ neg
    return sgn_ex, mag_ex


def qms_frame(check_ptr, edge_var, coe, var_ptr, var_edge_perm, vpe,
              channel_idx, phi_v, phi_ch, quant, gamma_e, half, qv_max,
              v2c, c2v, bits):
    """Quantized min-sum over LUT schedule tables; returns (iters, converged).

    phi_v / phi_ch: (i_max, 2*half) reconstruction values per iteration;
    quant: (i_max, 2*qv_max + 1) maps an integer sum (offset by qv_max)
    to the next V2C index; gamma_e: per-iteration decision thresholds.
    """
    starts = check_ptr[:-1]
    vstarts = var_ptr[:-1]
    eids = np.arange(edge_var.shape[0], dtype=np.int64)
    i_max = phi_v.shape[0]
    big = half + 1
    v2c[:] = channel_idx[edge_var]
    for t in range(i_max):
        f = np.where(v2c < half, half - v2c, half - 1 - v2c)
        sgn, mag = _cn_exclusion_min(np.abs(f), (f < 0).astype(np.int64),
                                     starts, coe, eids, big)
        np.minimum(mag, half, out=mag)
        c2v[:] = np.where(sgn == 0, half - mag, half - 1 + mag)
        contrib = phi_v[t][c2v[var_edge_perm]]
        tot = np.add.reduceat(contrib, vstarts) + phi_ch[t][channel_idx]
        app = np.clip(tot, -qv_max, qv_max)
        bits[:] = app < gamma_e[t]
        s = np.clip(tot[vpe] - contrib, -qv_max, qv_max)
        v2c[var_edge_perm] = quant[t][s + qv_max]
        if _syndrome_zero(bits, edge_var, starts):
            return t + 1, True
    return i_max, False


def nms_frame(check_ptr, edge_var, coe, var_ptr, var_edge_perm, vpe,
              qy, scale_tab, i_max, msg_max, app_max, v2c, c2v, bits):
    """Normalized min-sum on the integer message grid [-msg_max, msg_max].

    qy: quantized channel values per variable; scale_tab[m] the scaled
    magnitude for an excluded min of m; APP accumulates saturating at
    app_max; hard decision is app < 0 -> bit 1.
    """
    starts = check_ptr[:-1]
    vstarts = var_ptr[:-1]
    eids = np.arange(edge_var.shape[0], dtype=np.int64)
    big = msg_max + 1
    v2c[:] = qy[edge_var]
    for t in range(i_max):
        sgn, mag = _cn_exclusion_min(np.abs(v2c), (v2c < 0).astype(np.int64),
                                     starts, coe, eids, big)
        np.minimum(mag, msg_max, out=mag)
        scaled = scale_tab[mag]
        c2v[:] = np.where(sgn == 0, scaled, -scaled)
        contrib = c2v[var_edge_perm]
        tot = np.add.reduceat(contrib, vstarts) + qy
        app = np.clip(tot, -app_max, app_max)
        bits[:] = app < 0
        v2c[var_edge_perm] = np.clip(tot[vpe] - contrib, -msg_max, msg_max)
        if _syndrome_zero(bits, edge_var, starts):
            return t + 1, True
    return i_max, False


def bp_frame(check_ptr, edge_var, coe, var_ptr, var_edge_perm, vpe,
             llr, i_max, mag_floor, mag_cap, v2c, c2v, bits):
    """Sum-product with the -log-tanh check rule in double precision.

    Message magnitudes entering the check are clipped to
    [mag_floor, mag_cap]; outgoing magnitudes cap at mag_cap.
    """
    starts = check_ptr[:-1]
    vstarts = var_ptr[:-1]
    v2c[:] = llr[edge_var]
    for t in range(i_max):
        mag = np.clip(np.abs(v2c), mag_floor, mag_cap)
        phi = -np.log(np.tanh(0.5 * mag))
        neg = (v2c < 0).astype(np.int64)
        parity = np.bitwise_xor.reduceat(neg, starts)
        tot_phi = np.add.reduceat(phi, starts)
        s_ex = np.maximum(tot_phi[coe] - phi, 1e-300)
        mag_out = np.minimum(-np.log(np.tanh(0.5 * s_ex)), mag_cap)
        sgn = parity[coe] ^ neg
        c2v[:] = np.where(sgn == 0, mag_out, -mag_out)
        contrib = c2v[var_edge_perm]
        tot = np.add.reduceat(contrib, vstarts) + llr
        bits[:] = tot < 0.0
        v2c[var_edge_perm] = tot[vpe] - contrib
        if _syndrome_zero(bits, edge_var, starts):
            return t + 1, True
    return i_max, False
