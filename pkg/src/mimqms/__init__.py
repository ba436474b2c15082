"""Memory-efficient LUT-scheduled quantized min-sum decoding for LDPC codes.

Design pipeline: quantize the BPSK-AWGN channel by mutual-information
maximization, evolve message densities through the code ensemble to
derive per-iteration reconstruction and threshold tables, then merge
near-identical tables under a final-MI floor.  Runtime: a (q_m, q_v)
integer min-sum decoder driven by the resulting schedule, plus NMS and
BP baselines and a Monte-Carlo FER harness.
"""

from .channel import (
    ChannelQuantizer,
    bpsk_awgn_transmit,
    design_channel_quantizer,
    design_snr_from_sigma,
    fine_channel_pmf,
    quantize_observation,
    sigma_from_design_snr,
)
from .codes import (
    JointDegreeDistribution,
    TannerCode,
    expand_base_matrix,
    joint_degree_distribution,
    load_alist,
    parse_base_matrix,
    syndrome,
)
from .decoders import (
    BACKEND,
    BpDecoder,
    DecodeResult,
    NmsDecoder,
    QmsDecoder,
    bp_decode,
    nms_decode,
    qms_decode,
)
from .harness import (
    ExperimentConfig,
    FerRecord,
    MemoryReport,
    emit_csv,
    load_code,
    memory_report,
    parse_csv,
    read_config,
    run_fer,
    snr_at_fer,
    write_config,
)
from .lutopt import OptimizeResult, optimize
from .mimde import (
    LutIterSet,
    LutSchedule,
    ReconstructionFn,
    cn_evolve,
    design_schedule,
    schedule_mi,
    select_design_sigma,
)
from .quantizer import ConditionalPmf, dp_quantize, mutual_information
from .schedule_io import read_schedule, write_schedule

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "BpDecoder",
    "ChannelQuantizer",
    "DecodeResult",
    "ExperimentConfig",
    "FerRecord",
    "JointDegreeDistribution",
    "LutIterSet",
    "LutSchedule",
    "MemoryReport",
    "NmsDecoder",
    "OptimizeResult",
    "QmsDecoder",
    "ReconstructionFn",
    "TannerCode",
    "bp_decode",
    "bpsk_awgn_transmit",
    "cn_evolve",
    "ConditionalPmf",
    "design_channel_quantizer",
    "dp_quantize",
    "design_schedule",
    "design_snr_from_sigma",
    "emit_csv",
    "expand_base_matrix",
    "fine_channel_pmf",
    "joint_degree_distribution",
    "load_alist",
    "load_code",
    "memory_report",
    "mutual_information",
    "nms_decode",
    "optimize",
    "parse_base_matrix",
    "parse_csv",
    "qms_decode",
    "quantize_observation",
    "read_config",
    "read_schedule",
    "run_fer",
    "schedule_mi",
    "select_design_sigma",
    "sigma_from_design_snr",
    "snr_at_fer",
    "syndrome",
    "write_config",
    "write_schedule",
]
