"""BPSK-AWGN channel model and the q_m-bit channel quantizer.

The design SNR tau (dB) and the noise deviation sigma are linked through
tau = -10 log10(2 R sigma^2), which is E_b/N_0 for code rate R.  The channel
LLR of an observation y is 2y/sigma^2; fine_channel_pmf discretizes its
conditional law onto a uniform LLR grid plus two tails, and
design_channel_quantizer compresses that fine pmf to 2^q_m cells with the
MI-maximizing partition, symmetrized so the threshold set is exactly odd.
"""

import math
from dataclasses import dataclass

import numpy as np

from .quantizer import ConditionalPmf, apply_partition, dp_quantize

__all__ = [
    "ChannelModel",
    "ChannelQuantizer",
    "sigma_from_design_snr",
    "design_snr_from_sigma",
    "bpsk_awgn_transmit",
    "fine_channel_pmf",
    "design_channel_quantizer",
    "quantizer_from_thresholds",
    "quantize_observation",
]


@dataclass(frozen=True)
class ChannelModel:
    """AWGN channel state: noise deviation and the rate used for E_b/N_0."""

    sigma: float
    rate: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0.0 < self.rate < 1.0:
            raise ValueError("rate must lie in (0, 1)")

    @classmethod
    def from_design_snr(cls, tau, rate):
        return cls(sigma_from_design_snr(tau, rate), float(rate))

    @property
    def design_snr(self):
        return design_snr_from_sigma(self.sigma, self.rate)


@dataclass(frozen=True)
class ChannelQuantizer:
    """Odd-symmetric LLR threshold set and the quantized channel pmf.

    thresholds: 2^q_m - 1 strictly decreasing LLR boundaries; an LLR equal
    to thresholds[k] belongs to cell k (">= joins the lower index").
    """

    thresholds: tuple
    cond_pmf: ConditionalPmf

    def __post_init__(self):
        t = tuple(float(x) for x in self.thresholds)
        object.__setattr__(self, "thresholds", t)
        if len(t) + 1 != len(self.cond_pmf):
            raise ValueError("need one threshold fewer than output cells")
        if any(b >= a for a, b in zip(t, t[1:])):
            raise ValueError("thresholds must be strictly decreasing")
        arr = np.asarray(t)
        if np.any(np.abs(arr + arr[::-1]) > 1e-9 * max(1.0, np.abs(arr).max())):
            raise ValueError("thresholds must be odd-symmetric")

    @property
    def n_levels(self):
        return len(self.thresholds) + 1


def sigma_from_design_snr(tau, rate):
    """sigma with tau = -20 log10(sqrt(2 R sigma^2))."""
    if not 0.0 < rate < 1.0:
        raise ValueError("rate must lie in (0, 1)")
    return math.sqrt(10.0 ** (-tau / 10.0) / (2.0 * rate))


def design_snr_from_sigma(sigma, rate):
    """Inverse of sigma_from_design_snr (dB)."""
    if not 0.0 < rate < 1.0:
        raise ValueError("rate must lie in (0, 1)")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return -10.0 * math.log10(2.0 * rate * sigma * sigma)


def bpsk_awgn_transmit(bits, sigma, rng):
    """BPSK map 1 - 2b plus Gaussian(0, sigma^2) noise from rng."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    bits = np.asarray(bits)
    return (1.0 - 2.0 * bits) + sigma * rng.standard_normal(bits.shape)


def _norm_cdf_diff(z_lo, z_hi):
    """P(z_lo <= Z < z_hi) for standard normal, stable in both tails."""
    if z_lo > 0.0:  # difference of survival functions avoids cancellation
        return 0.5 * (math.erfc(z_lo / math.sqrt(2)) - math.erfc(z_hi / math.sqrt(2)))
    return 0.5 * (math.erf(z_hi / math.sqrt(2)) - math.erf(z_lo / math.sqrt(2)))


def fine_channel_pmf(sigma, bins=2000, clip=30.0, q_m=None):
    """Conditional pmf of the channel LLR on a fine grid.

    The LLR axis 2y/sigma^2 is split into `bins` uniform cells on
    [-clip, clip] plus two open tails; cell probabilities come from the
    Gaussian CDF under each transmitted sign.  Cells are ordered by
    decreasing LLR (index 0 = strongest belief in bit 0).
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if bins < 2 or clip <= 0:
        raise ValueError("need bins >= 2 and clip > 0")
    if q_m is not None and bins < 2**q_m:
        raise ValueError(f"bins = {bins} below alphabet size {2**q_m}")
    llr_edges = np.linspace(-clip, clip, bins + 1)
    y_edges = llr_edges * sigma * sigma / 2.0
    z0 = np.concatenate(([-np.inf], (y_edges - 1.0) / sigma, [np.inf]))
    z1 = np.concatenate(([-np.inf], (y_edges + 1.0) / sigma, [np.inf]))
    p0 = np.array([_norm_cdf_diff(a, b) for a, b in zip(z0, z0[1:])])
    p1 = np.array([_norm_cdf_diff(a, b) for a, b in zip(z1, z1[1:])])
    width = llr_edges[1] - llr_edges[0]
    centers = np.concatenate(
        ([-clip - width / 2.0], (llr_edges[:-1] + llr_edges[1:]) / 2.0, [clip + width / 2.0])
    )
    order = slice(None, None, -1)  # descending LLR
    return ConditionalPmf(p0[order], p1[order], centers[order])


def _cuts_from_thresholds(values, thresholds):
    """Cut indices splitting descending `values` at descending thresholds.

    Symbol v joins the lowest cell k with v >= thresholds[k].
    """
    values = np.asarray(values, dtype=np.float64)
    t = np.asarray(thresholds, dtype=np.float64)
    cuts = np.searchsorted(-values, -t, side="right")
    if cuts[0] < 1 or cuts[-1] > values.size - 1 or np.any(np.diff(cuts) <= 0):
        raise ValueError("thresholds leave an empty quantizer cell")
    return [int(c) for c in cuts]


def design_channel_quantizer(fine, q_m):
    """MI-optimal 2^q_m-cell channel quantizer with odd thresholds.

    Boundaries are midpoints of the adjacent fine-cell labels at the DP
    cuts, then odd-symmetrized by averaging mirrored magnitudes; the
    conditional pmf is re-induced from the symmetrized thresholds so the
    stored pmf always matches what quantize_observation does.
    """
    K = 2**q_m
    tset, _ = dp_quantize(fine, K)
    vals = fine.values.astype(np.float64)
    raw = np.array([(vals[c - 1] + vals[c]) / 2.0 for c in tset.cuts])
    sym = (raw - raw[::-1]) / 2.0
    if np.any(np.diff(sym) >= 0):
        raise ValueError("degenerate input: symmetrized thresholds collapse")
    cuts = _cuts_from_thresholds(vals, sym)
    return ChannelQuantizer(tuple(sym), apply_partition(fine, cuts))


def quantizer_from_thresholds(thresholds, fine):
    """Rebuild a ChannelQuantizer from stored thresholds and a fine pmf."""
    cuts = _cuts_from_thresholds(fine.values.astype(np.float64), thresholds)
    return ChannelQuantizer(tuple(float(t) for t in thresholds), apply_partition(fine, cuts))


def quantize_observation(quantizer, y, sigma):
    """Channel output index of observation(s) y: count of thresholds > LLR."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    llr = 2.0 * np.asarray(y, dtype=np.float64) / (sigma * sigma)
    t = -np.asarray(quantizer.thresholds)  # ascending
    idx = np.searchsorted(t, -llr, side="left")
    return idx if np.ndim(y) else int(idx)
