"""Density evolution and LUT design for the quantized min-sum decoder.

Messages are q_m-bit indices; index s maps to the signed level f(s) in
{2^{q_m-1}, ..., 1, -1, ..., -2^{q_m-1}} (index 0 = strongest belief in
bit 0).  Check-node evolution folds the sign-min combination pairwise in
the signed domain; variable-node evolution reconstructs integers through
phi tables and convolves them over the q_v-bit grid.  design_schedule runs
the evolution at a design noise level, deriving per-iteration phi_v /
phi_ch tables, variable thresholds gamma_v, and the decision threshold
gamma_e, all packaged as a LutSchedule.
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .channel import (
    design_channel_quantizer,
    fine_channel_pmf,
    quantizer_from_thresholds,
    sigma_from_design_snr,
)
from .quantizer import ConditionalPmf, dp_quantize, mutual_information

__all__ = [
    "ReconstructionFn",
    "LutIterSet",
    "LutSchedule",
    "signed_map",
    "signed_unmap",
    "round_half_away",
    "cn_evolve",
    "vn_evolve",
    "decision_evolve",
    "partition_by_thresholds",
    "derive_reconstruction",
    "design_schedule",
    "select_design_sigma",
    "schedule_mi",
]


def signed_map(s, q_m):
    """Index -> signed level: 0 -> +2^{q_m-1}, ..., 2^{q_m}-1 -> -2^{q_m-1}."""
    s = np.asarray(s)
    if np.any(s < 0) or np.any(s >= 2**q_m):
        raise ValueError("index outside the q_m-bit alphabet")
    half = 1 << (q_m - 1)
    out = np.where(s < half, half - s, half - 1 - s)
    return out if out.ndim else int(out)


def signed_unmap(value, q_m):
    """Inverse of signed_map; rejects 0 and values outside the image set."""
    v = np.asarray(value)
    half = 1 << (q_m - 1)
    if np.any(v == 0) or np.any(np.abs(v) > half):
        raise ValueError("value outside the signed image set")
    out = np.where(v > 0, half - v, half - 1 - v)
    return out if out.ndim else int(out)


def round_half_away(x):
    """Round half away from zero (symmetric under negation)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * np.floor(np.abs(x) + 0.5)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ReconstructionFn:
    """Signed-integer reconstruction table phi over the q_m-bit alphabet."""

    table: tuple

    def __post_init__(self):
        t = tuple(int(v) for v in self.table)
        object.__setattr__(self, "table", t)
        n = len(t)
        if n < 2 or n & (n - 1):
            raise ValueError("table length must be a power of two >= 2")
        if any(t[s] != -t[n - 1 - s] for s in range(n)):
            raise ValueError("table must be odd-symmetric")
        if any(b > a for a, b in zip(t, t[1:])):
            raise ValueError("table must be non-increasing")

    def __len__(self):
        return len(self.table)

    @property
    def max_abs(self):
        return max(abs(v) for v in self.table)


@dataclass(frozen=True)
class LutIterSet:
    """Per-iteration LUT bundle: phi_v, phi_ch, gamma_v, gamma_e."""

    phi_v: ReconstructionFn
    phi_ch: ReconstructionFn
    gamma_v: tuple
    gamma_e: int

    def __post_init__(self):
        g = tuple(int(v) for v in self.gamma_v)
        object.__setattr__(self, "gamma_v", g)
        object.__setattr__(self, "gamma_e", int(self.gamma_e))
        if len(g) != len(self.phi_v) - 1:
            raise ValueError("gamma_v needs one threshold fewer than levels")
        if any(b >= a for a, b in zip(g, g[1:])):
            raise ValueError("gamma_v must be strictly decreasing")


@dataclass(frozen=True, eq=False)
class LutSchedule:
    """Complete decoder schedule: channel quantizer plus i_max LUT bundles."""

    q_m: int
    q_v: int
    i_max: int
    design_sigma: float
    channel_quantizer: object
    iters: tuple
    ensemble: object
    fine_bins: int = 2000
    fine_clip: float = 30.0
    frozen_from: Optional[int] = None
    mi_trajectory: Optional[tuple] = None
    groups: Optional[dict] = None

    def __post_init__(self):
        object.__setattr__(self, "iters", tuple(self.iters))
        if self.q_v <= self.q_m:
            raise ValueError("q_v must exceed q_m to avoid clipping")
        if len(self.iters) != self.i_max:
            raise ValueError("need exactly i_max iteration LUT sets")
        qv_max = 2 ** (self.q_v - 1) - 1
        d_v_max = self.ensemble.d_v_max
        for t, it in enumerate(self.iters, start=1):
            if len(it.phi_v) != 2**self.q_m:
                raise ValueError(f"iteration {t}: phi table size != 2^q_m")
            worst = it.phi_ch.max_abs + d_v_max * it.phi_v.max_abs
            if worst > qv_max:
                raise ValueError(
                    f"iteration {t}: decision sum can reach {worst} > {qv_max}"
                )


@lru_cache(maxsize=None)
def _combine_index_table(q_m):
    """out[i, j] = index of sign-min combination of levels f(i), f(j)."""
    f = signed_map(np.arange(2**q_m), q_m)
    comb = np.sign(f[:, None] * f[None, :]) * np.minimum(
        np.abs(f)[:, None], np.abs(f)[None, :]
    )
    return signed_unmap(comb, q_m)


def _cn_pair(P, Q, table):
    """Combine two conditional message pmfs at a check node.

    P, Q are (2, n) arrays indexed by the conditioning bit.  The output
    edge bit is the XOR of the operand bits, each pair equally likely.
    """
    n = P.shape[1]
    flat = table.ravel()
    out = np.empty_like(P)
    for x in (0, 1):
        prod = 0.5 * (np.outer(P[0], Q[x]) + np.outer(P[1], Q[1 - x]))
        out[x] = np.bincount(flat, weights=prod.ravel(), minlength=n)
    return out


def cn_evolve(v2c, joint, q_m):
    """C2V message pmf: sign-min fold of i-1 inputs, mixed over degrees.

    The fold is pairwise in the signed domain (associative, so exact);
    the parity split over conditioning bits happens inside each pairwise
    combination.  Never enumerates the full R^{i-1} space.
    """
    n = 2**q_m
    if len(v2c) != n:
        raise ValueError(f"v2c must have {n} symbols")
    if joint.cn_degrees[0] < 2:
        raise ValueError("check degrees below 2 are not meaningful")
    table = _combine_index_table(q_m)
    P = np.vstack([v2c.p0, v2c.p1])
    acc = P.copy()  # one operand = degree-2 output
    out = np.zeros_like(P)
    for i in range(2, joint.d_c_max + 1):
        if i > 2:
            acc = _cn_pair(acc, P, table)
        out += joint.cn_coeffs.get(i, 0.0) * acc
    out /= out.sum(axis=1, keepdims=True)  # shed float drift of the fold
    return ConditionalPmf(out[0], out[1], signed_map(np.arange(n), q_m))


def _push_integer(rows, table, reach):
    """Pushforward of (2, n) message rows through an integer table."""
    idx = np.asarray(table, dtype=np.int64) + reach
    out = np.zeros((2, 2 * reach + 1))
    for x in (0, 1):
        out[x] = np.bincount(idx, weights=rows[x], minlength=2 * reach + 1)
    return out


def _vn_core(ch, c2v, phi_ch, phi_v, joint, q_v, extra):
    """Integer-sum pmf at a VN: phi_ch(L) + (j + extra) phi_v(S) terms.

    extra = -1 gives the V2C message sum (j - 1 incoming C2V edges),
    extra = 0 the decision sum over all j edges.  Mixture over theta.
    """
    tv = np.asarray(phi_v.table if isinstance(phi_v, ReconstructionFn) else phi_v)
    tc = np.asarray(phi_ch.table if isinstance(phi_ch, ReconstructionFn) else phi_ch)
    qv_max = 2 ** (q_v - 1) - 1
    n_terms = joint.d_v_max + extra
    reach = int(np.abs(tc).max() + n_terms * np.abs(tv).max())
    if reach > qv_max:
        raise ValueError(
            f"integer support reaches {reach} > {qv_max}: mis-scaled reconstruction"
        )
    reach = max(reach, 1)
    mv = int(np.abs(tv).max())
    base_ch = _push_integer(np.vstack([ch.p0, ch.p1]), tc, reach)
    kernel = _push_integer(np.vstack([c2v.p0, c2v.p1]), tv, mv)
    out = np.zeros((2, 2 * reach + 1))
    acc = base_ch
    n_used = 0
    for j in sorted(joint.vn_coeffs):
        want = j + extra
        while n_used < want:
            # partial sums never leave [-reach, reach], so the slice is lossless
            acc = np.stack(
                [np.convolve(acc[x], kernel[x])[mv : mv + 2 * reach + 1] for x in (0, 1)]
            )
            n_used += 1
        out += joint.vn_coeffs[j] * acc
    out /= out.sum(axis=1, keepdims=True)  # shed float drift of the convolutions
    values = np.arange(reach, -reach - 1, -1)
    return ConditionalPmf(out[0][::-1], out[1][::-1], values)


def vn_evolve(ch, c2v, phi_ch, phi_v, joint, q_v):
    """V2C integer-sum pmf: channel term plus j-1 reconstructed C2V terms."""
    return _vn_core(ch, c2v, phi_ch, phi_v, joint, q_v, extra=-1)


def decision_evolve(ch, c2v, phi_ch, phi_v, joint, q_v):
    """Decision (APP) integer-sum pmf: channel term plus all j C2V terms."""
    return _vn_core(ch, c2v, phi_ch, phi_v, joint, q_v, extra=0)


def partition_by_thresholds(pmf, thresholds):
    """Coarse pmf from fixed descending thresholds ("v >= t joins lower cell").

    Unlike dp_quantize this never optimizes and tolerates empty cells, so a
    schedule designed at one noise level can be evaluated at another.
    """
    t = np.asarray(thresholds, dtype=np.float64)
    if t.size and np.any(np.diff(t) >= 0):
        raise ValueError("thresholds must be strictly decreasing")
    cells = np.searchsorted(-t, -pmf.values.astype(np.float64), side="left")
    K = t.size + 1
    q0 = np.bincount(cells, weights=pmf.p0, minlength=K)
    q1 = np.bincount(cells, weights=pmf.p1, minlength=K)
    labels = np.concatenate((t, [t[-1] - 1.0])) if t.size else np.zeros(1)
    return ConditionalPmf(q0, q1, labels)


def _symmetric_monotone_llr(pmf):
    """Odd-symmetrized, non-increasing LLR profile of a message pmf."""
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.log(pmf.p0) - np.log(pmf.p1)
    lam = np.where(np.isnan(lam), 0.0, lam)  # 0/0 cells carry no information
    n = lam.size
    sym = (lam - lam[::-1]) / 2.0
    # guard rare non-monotone LLRs: global non-increase needs the first half
    # non-increasing and non-negative (the mirror flips sign at the center)
    half = np.maximum(np.minimum.accumulate(sym[: n // 2]), 0.0)
    return np.concatenate((half, -half[::-1]))


def _build_table(lam_sym, alpha, cap):
    """Integer table round(alpha * lam), clipped to +-cap."""
    with np.errstate(invalid="ignore"):
        scaled = np.clip(alpha * lam_sym, -float(cap), float(cap))
    return ReconstructionFn(tuple(int(v) for v in round_half_away(scaled)))


def _alpha_grid(lam_sym, cap, count):
    finite = np.abs(lam_sym[np.isfinite(lam_sym)])
    peak = finite.max() if finite.size and finite.max() > 0 else 1.0
    return np.geomspace(0.75 / peak, cap / peak, count)


def derive_reconstruction(pmf, cap, objective, n_alphas=64):
    """Pick phi = round(alpha * LLR) maximizing objective over an alpha sweep.

    The LLR profile is odd-symmetrized before rounding; magnitudes clip at
    cap (the q_v-safe bound).  Infinite LLRs (degenerate pmf) saturate at
    cap and emit a warning.  Ties resolve to the smallest alpha.
    """
    lam = _symmetric_monotone_llr(pmf)
    if np.any(np.isinf(lam)):
        warnings.warn("degenerate pmf: infinite LLR saturated to the q_v-safe bound")
    best, best_score = None, -np.inf
    for alpha in _alpha_grid(lam, cap, n_alphas):
        fn = _build_table(lam, alpha, cap)
        score = objective(fn)
        if score > best_score:
            best, best_score = fn, score
    return best


def _reconstruction_cap(q_v, d_v_max):
    # decision sums add d_v_max phi_v terms plus one phi_ch term; this cap
    # keeps even that worst case inside the q_v-bit signed range
    return (2 ** (q_v - 1) - 1) // (d_v_max + 1)


def design_schedule(ensemble, sigma, q_m=4, q_v=8, i_max=30,
                    fine_bins=2000, fine_clip=30.0, n_alphas=64, sat_tol=1e-9):
    """Design a complete LutSchedule at noise level sigma.

    Per iteration: CN evolution, a shared scale sweep deriving phi_v and
    phi_ch together (the pair maximizing post-quantization MI of the V2C
    sum), DP thresholds gamma_v, and the decision threshold gamma_e.  Once
    MI saturates, remaining iterations copy the last designed LUTs and the
    schedule is flagged via frozen_from.
    """
    if q_v <= q_m:
        raise ValueError("q_v must exceed q_m")
    fine = fine_channel_pmf(sigma, fine_bins, fine_clip, q_m=q_m)
    chq = design_channel_quantizer(fine, q_m)
    ch = chq.cond_pmf
    cap = _reconstruction_cap(q_v, ensemble.d_v_max)
    lam_ch = _symmetric_monotone_llr(ch)
    p_r = ch
    iters, mis = [], []
    frozen_from = None
    for t in range(1, i_max + 1):
        if frozen_from is not None:
            iters.append(iters[-1])
            mis.append(mis[-1])
            continue
        p_s = cn_evolve(p_r, ensemble, q_m)
        lam_s = _symmetric_monotone_llr(p_s)
        lam_all = np.concatenate((lam_ch, lam_s))
        best = None
        for alpha in _alpha_grid(lam_all, cap, n_alphas):
            phi_v = _build_table(lam_s, alpha, cap)
            phi_ch = _build_table(lam_ch, alpha, cap)
            b = vn_evolve(ch, p_s, phi_ch, phi_v, ensemble, q_v)
            try:
                tset, coarse = dp_quantize(b, 2**q_m)
            except ValueError:
                continue  # too few live cells at this scale
            mi = mutual_information(coarse)
            if best is None or mi > best[0]:
                best = (mi, phi_v, phi_ch, tset, coarse)
        if best is None:
            # evolution degenerated before any candidate worked
            if not iters:
                raise ValueError("density evolution degenerate at iteration 1")
            frozen_from = t
            iters.append(iters[-1])
            mis.append(mis[-1])
            continue
        mi, phi_v, phi_ch, tset, p_r = best
        dec = decision_evolve(ch, p_s, phi_ch, phi_v, ensemble, q_v)
        dts, _ = dp_quantize(dec, 2)
        gamma_v = tuple(int(v) for v in tset.thresholds)
        iters.append(LutIterSet(phi_v, phi_ch, gamma_v, int(dts.thresholds[0])))
        mis.append(mi)
        if mi >= 1.0 - sat_tol and t < i_max:
            frozen_from = t + 1
    return LutSchedule(
        q_m=q_m, q_v=q_v, i_max=i_max, design_sigma=float(sigma),
        channel_quantizer=chq, iters=tuple(iters), ensemble=ensemble,
        fine_bins=fine_bins, fine_clip=fine_clip, frozen_from=frozen_from,
        mi_trajectory=tuple(mis),
    )


def select_design_sigma(ensemble, q_m, q_v, i_max, tau_grid, rate,
                        tie_tol=1e-3, **design_kw):
    """Design at every grid SNR and return the MI-maximizing sigma.

    Final-MI ties within tie_tol resolve to the lowest tau (the noisiest
    design that still attains the best mutual information).
    """
    taus = sorted(float(t) for t in tau_grid)
    if not taus:
        raise ValueError("tau grid is empty")
    finals = []
    for tau in taus:
        sigma = sigma_from_design_snr(tau, rate)
        sched = design_schedule(ensemble, sigma, q_m, q_v, i_max, **design_kw)
        finals.append(sched.mi_trajectory[-1])
    best = max(finals)
    for tau, mi in zip(taus, finals):
        if mi >= best - tie_tol:
            return sigma_from_design_snr(tau, rate)
    raise AssertionError("unreachable: best grid point lost")


def schedule_mi(schedule, ensemble, sigma):
    """Re-run evolution with all LUTs fixed; returns I(X; R) at i_max."""
    fine = fine_channel_pmf(sigma, schedule.fine_bins, schedule.fine_clip,
                            q_m=schedule.q_m)
    chq = quantizer_from_thresholds(schedule.channel_quantizer.thresholds, fine)
    ch = chq.cond_pmf
    p_r = ch
    for it in schedule.iters:
        p_s = cn_evolve(p_r, ensemble, schedule.q_m)
        b = _vn_core(ch, p_s, it.phi_ch, it.phi_v, ensemble, schedule.q_v, extra=-1)
        p_r = partition_by_thresholds(b, it.gamma_v)
    return mutual_information(p_r)
