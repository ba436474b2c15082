"""Monte-Carlo FER/BER/I_avg experiments, memory accounting and CSV output.

run_fer transmits the all-zero codeword over BPSK-AWGN (valid by channel
and schedule symmetry) and decodes until a frame-error or frame budget
is met.  Frames are drawn in fixed-size rounds with per-frame RNG
streams keyed by (seed, snr_index, frame_index), so results are
byte-identical for any worker count.

memory_report implements the bit-accounting model for LUT storage
(N * q_l bits per table) plus the arithmetic memory of min-sum style
decoders: two C2V minima per check node (2 q_m bits) and one APP
accumulator per variable node (q_v bits).  q_l-bit LUT entries assume
offset encoding of the monotone rows (the largest step between adjacent
entries in all shipped tables is 4, which fits q_l = 4 signed bits).
"""

import configparser
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import log

import numpy as np

from .channel import bpsk_awgn_transmit, quantize_observation, sigma_from_design_snr
from .codes import expand_base_matrix, load_alist, parse_base_matrix
from .decoders import BpDecoder, NmsDecoder, QmsDecoder
from .schedule_io import read_schedule

__all__ = [
    "CONFIG_HEADER",
    "CSV_HEADER",
    "ROUND_FRAMES",
    "ExperimentConfig",
    "FerRecord",
    "MemoryLine",
    "MemoryReport",
    "read_config",
    "write_config",
    "load_code",
    "run_fer",
    "emit_csv",
    "parse_csv",
    "snr_at_fer",
    "memory_report",
]

CONFIG_HEADER = "# mimqms-config v1"
CSV_HEADER = "snr_db,frames,frame_errors,bit_errors,fer,ber,i_avg"
# frames are decoded in fixed rounds; the stop rule runs between rounds so
# the set of decoded frames never depends on worker count or timing
ROUND_FRAMES = 256

_BASELINES = ("nms", "bp")


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation campaign: a code, a decoder and an SNR sweep."""

    code_ref: str
    schedule_ref: str  # schedule file path, or "nms" / "bp"
    snr_points: tuple
    min_frame_errors: int = 100
    max_frames: int = 100000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(
            self, "snr_points", tuple(float(s) for s in self.snr_points)
        )
        if not self.snr_points:
            raise ValueError("snr_points must be non-empty")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class FerRecord:
    """Aggregate decoding outcome at one SNR point."""

    snr_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    i_avg: float

    def __post_init__(self):
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if not 0 <= self.frame_errors <= self.frames:
            raise ValueError("frame_errors outside [0, frames]")


def read_config(text):
    """Parse a versioned key = value config; MIMQMS_SEED overrides seed."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != CONFIG_HEADER:
        raise ValueError(f"missing header {CONFIG_HEADER!r}")
    cp = configparser.ConfigParser()
    cp.read_string(text)
    if "experiment" not in cp:
        raise ValueError("missing [experiment] section")
    sec = cp["experiment"]
    known = {"code", "schedule", "snr_db", "min_frame_errors",
             "max_frames", "seed", "workers"}
    unknown = set(sec) - known
    if unknown:
        raise ValueError(f"unknown key {sorted(unknown)[0]!r}")
    for key in ("code", "schedule", "snr_db"):
        if key not in sec:
            raise ValueError(f"missing key {key!r}")
    seed = os.environ.get("MIMQMS_SEED")
    return ExperimentConfig(
        code_ref=sec["code"],
        schedule_ref=sec["schedule"],
        snr_points=tuple(float(tok) for tok in sec["snr_db"].split()),
        min_frame_errors=sec.getint("min_frame_errors", 100),
        max_frames=sec.getint("max_frames", 100000),
        seed=int(seed) if seed is not None else sec.getint("seed", 0),
        workers=sec.getint("workers", 1),
    )


def write_config(config):
    lines = [
        CONFIG_HEADER,
        "",
        "[experiment]",
        f"code = {config.code_ref}",
        f"schedule = {config.schedule_ref}",
        "snr_db = " + " ".join(f"{s:g}" for s in config.snr_points),
        f"min_frame_errors = {config.min_frame_errors}",
        f"max_frames = {config.max_frames}",
        f"seed = {config.seed}",
        f"workers = {config.workers}",
    ]
    return "\n".join(lines) + "\n"


def load_code(path):
    """Load a TannerCode from a base-matrix or alist file."""
    with open(path) as fh:
        text = fh.read()
    head = next(
        (ln for ln in text.splitlines() if ln.split() and not ln.startswith("#")),
        "",
    )
    if len(head.split()) == 3:  # rows cols lift
        return expand_base_matrix(*parse_base_matrix(text))
    return load_alist(text)


def _make_decoder(code, schedule_ref, schedule, sigma):
    if schedule_ref == "nms":
        # clip level 8 * delta = 4 channel-LLR standard deviations (4 * 2/sigma)
        return NmsDecoder(code, delta=1.0 / sigma)
    if schedule_ref == "bp":
        return BpDecoder(code)
    return QmsDecoder(code, schedule)


_WORKER = None


def _init_worker(code, schedule_ref, schedule, sigma):
    global _WORKER
    _WORKER = (code, schedule_ref, _make_decoder(code, schedule_ref, schedule, sigma),
               schedule, sigma)


def _decode_chunk(task):
    """Decode frames [lo, hi) of one SNR point; returns summed counts."""
    seed, snr_idx, lo, hi = task
    code, schedule_ref, dec, schedule, sigma = _WORKER
    zeros = np.zeros(code.n_vars, dtype=np.uint8)
    frame_errors = bit_errors = iter_sum = 0
    for frame_idx in range(lo, hi):
        rng = np.random.default_rng(
            np.random.SeedSequence((seed, snr_idx, frame_idx))
        )
        y = bpsk_awgn_transmit(zeros, sigma, rng)
        if schedule_ref in _BASELINES:
            res = dec.decode(2.0 * y / (sigma * sigma))
        else:
            res = dec.decode(
                quantize_observation(schedule.channel_quantizer, y, sigma)
            )
        wrong = int(res.bits.sum())
        bit_errors += wrong
        frame_errors += bool(wrong)
        iter_sum += res.iterations_used
    return frame_errors, bit_errors, iter_sum


def _run_point(pool, config, snr_idx, sigma):
    """One SNR point: rounds of ROUND_FRAMES until the stop rule fires."""
    chunk = max(1, ROUND_FRAMES // (8 * config.workers))
    frames = frame_errors = bit_errors = iter_sum = 0
    while True:
        n = min(ROUND_FRAMES, config.max_frames - frames)
        tasks = [
            (config.seed, snr_idx, frames + lo, frames + min(lo + chunk, n))
            for lo in range(0, n, chunk)
        ]
        if pool is None:
            parts = [_decode_chunk(t) for t in tasks]
        else:
            parts = list(pool.map(_decode_chunk, tasks))
        frames += n
        for fe, be, it in parts:
            frame_errors += fe
            bit_errors += be
            iter_sum += it
        if frame_errors >= config.min_frame_errors or frames >= config.max_frames:
            return frames, frame_errors, bit_errors, iter_sum


def run_fer(config, code=None, schedule=None):
    """Run the campaign; code / schedule may be passed to skip file loads."""
    if code is None:
        code = load_code(config.code_ref)
    if schedule is None and config.schedule_ref not in _BASELINES:
        with open(config.schedule_ref) as fh:
            schedule = read_schedule(fh.read())
    records = []
    for snr_idx, snr_db in enumerate(config.snr_points):
        sigma = sigma_from_design_snr(snr_db, code.rate)
        init_args = (code, config.schedule_ref, schedule, sigma)
        if config.workers == 1:
            _init_worker(*init_args)
            frames, fe, be, it = _run_point(None, config, snr_idx, sigma)
        else:
            with ProcessPoolExecutor(
                max_workers=config.workers,
                initializer=_init_worker,
                initargs=init_args,
            ) as pool:
                frames, fe, be, it = _run_point(pool, config, snr_idx, sigma)
        records.append(
            FerRecord(
                snr_db=snr_db,
                frames=frames,
                frame_errors=fe,
                bit_errors=be,
                fer=fe / frames,
                ber=be / (frames * code.n_vars),
                i_avg=it / frames,
            )
        )
    return records


def emit_csv(records):
    rows = [CSV_HEADER]
    for r in records:
        rows.append(
            f"{r.snr_db:.6g},{r.frames},{r.frame_errors},{r.bit_errors},"
            f"{r.fer:.6g},{r.ber:.6g},{r.i_avg:.6g}"
        )
    return "\n".join(rows) + "\n"


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"missing header {CSV_HEADER!r}")
    records = []
    for ln in lines[1:]:
        tok = ln.split(",")
        if len(tok) != 7:
            raise ValueError(f"bad row: {ln!r}")
        records.append(
            FerRecord(
                snr_db=float(tok[0]), frames=int(tok[1]),
                frame_errors=int(tok[2]), bit_errors=int(tok[3]),
                fer=float(tok[4]), ber=float(tok[5]), i_avg=float(tok[6]),
            )
        )
    return records


def snr_at_fer(records, target):
    """SNR where the FER curve crosses target (log-linear interpolation)."""
    pts = sorted((r.snr_db, r.fer) for r in records if r.fer > 0.0)
    for (s0, f0), (s1, f1) in zip(pts, pts[1:]):
        if f0 >= target >= f1:
            if f0 == f1:
                return s0
            w = (log(target) - log(f0)) / (log(f1) - log(f0))
            return s0 + w * (s1 - s0)
    raise ValueError(f"target FER {target:g} not bracketed by the records")


# entry counts per stored table row, q_m = 4: phi rows 2^q_m, gamma_v rows
# 2^q_m - 1, gamma_e one scalar per iteration, gamma_ch 2^q_m - 1 once
def _lut_entries(schedule, policy):
    n = 2**schedule.q_m
    if policy == "unmerged":
        m_v = m_ch = m_gv = schedule.i_max
    elif policy == "dedup":
        m_v = len(set(it.phi_v.table for it in schedule.iters))
        m_ch = len(set(it.phi_ch.table for it in schedule.iters))
        m_gv = len(set(it.gamma_v for it in schedule.iters))
    else:
        raise ValueError(f"unknown policy {policy!r}")
    return n * (m_v + m_ch) + (n - 1) * m_gv + schedule.i_max + (n - 1)


@dataclass(frozen=True)
class MemoryLine:
    """Bit accounting for one decoder in the comparison table."""

    label: str
    arithmetic_cn_bits: int
    arithmetic_vn_bits: int
    lut_bits: int

    @property
    def total_bits(self):
        return self.arithmetic_cn_bits + self.arithmetic_vn_bits + self.lut_bits


@dataclass(frozen=True)
class MemoryReport:
    """Memory comparison: schedule lines plus the LUT-chain decoder model."""

    q_l: int
    policy: str
    lines: tuple
    model_line: MemoryLine  # concatenated-LUT decoder, cost model only

    @property
    def reduction_vs_model(self):
        """Fractional total-memory reduction of the first line vs the model."""
        return 1.0 - self.lines[0].total_bits / self.model_line.total_bits

    def table(self):
        rows = [("decoder", "CN kB", "VN kB", "LUT kB", "total kB")]
        for ln in (*self.lines, self.model_line):
            rows.append(
                (
                    ln.label,
                    f"{ln.arithmetic_cn_bits / 8192:.2f}",
                    f"{ln.arithmetic_vn_bits / 8192:.2f}",
                    f"{ln.lut_bits / 8192:.4f}",
                    f"{ln.total_bits / 8192:.2f}",
                )
            )
        width = [max(len(r[i]) for r in rows) for i in range(5)]
        out = ["  ".join(c.ljust(w) for c, w in zip(r, width)).rstrip() for r in rows]
        out.append(
            f"reduction vs LUT-chain model: {100 * self.reduction_vs_model:.2f} %"
        )
        return "\n".join(out) + "\n"


def memory_report(schedules, codes, q_l=4, policy="dedup"):
    """Bit accounting for (label, schedule) pairs; schedule None = no LUTs.

    Arithmetic memory is sized for the largest code in the family.  The
    comparison baseline models the concatenated-LUT decoder: per iteration
    d_v_max + |D_v| tables of 2^(2 q_m) entries at q_m bits each, and no
    VN arithmetic (its VN update is pure table lookup).
    """
    if q_l < 1:
        raise ValueError("q_l must be >= 1")
    codes = [codes] if not isinstance(codes, (list, tuple)) else list(codes)
    ref = next(s for _, s in schedules if s is not None)
    cn_bits = max(c.n_checks for c in codes) * 2 * ref.q_m
    vn_bits = max(c.n_vars for c in codes) * ref.q_v
    lines = tuple(
        MemoryLine(
            label=label,
            arithmetic_cn_bits=cn_bits,
            arithmetic_vn_bits=vn_bits,
            lut_bits=0 if s is None else q_l * _lut_entries(s, policy),
        )
        for label, s in schedules
    )
    ens = ref.ensemble
    model_bits = (
        ref.i_max * (ens.d_v_max + len(ens.vn_degrees)) * 2 ** (2 * ref.q_m) * ref.q_m
    )
    model = MemoryLine(
        label="lut-chain model",
        arithmetic_cn_bits=cn_bits,
        arithmetic_vn_bits=0,
        lut_bits=model_bits,
    )
    return MemoryReport(q_l=q_l, policy=policy, lines=lines, model_line=model)
