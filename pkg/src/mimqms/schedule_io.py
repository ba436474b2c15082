"""Plain-text serialization of LutSchedule (format "mimqms-schedule v1").

Layout: a header comment line, top-level `key = value` pairs, then
sections.  [ensemble] holds the degree mixtures as "degree:fraction"
tokens; [gamma_ch] one line of descending LLR thresholds; [iteration N]
or [iteration A-B] the per-iteration integer LUTs (runs of identical
iterations are collapsed to ranges); an optional [groups] section records
iteration groupings per LUT kind for memory accounting.
"""

from .channel import fine_channel_pmf, quantizer_from_thresholds
from .codes import JointDegreeDistribution
from .mimde import LutIterSet, LutSchedule, ReconstructionFn

__all__ = ["read_schedule", "write_schedule", "HEADER"]

HEADER = "# mimqms-schedule v1"

_TOP_KEYS = {
    "q_m": int,
    "q_v": int,
    "i_max": int,
    "design_sigma": float,
    "fine_bins": int,
    "fine_clip": float,
    "frozen_from": int,
}


def _parse_range(token, i_max, lineno):
    a, _, b = token.partition("-")
    try:
        lo = int(a)
        hi = int(b) if b else lo
    except ValueError:
        raise ValueError(f"line {lineno}: bad iteration range {token!r}")
    if not 1 <= lo <= hi <= i_max:
        raise ValueError(f"line {lineno}: range {token!r} outside 1..{i_max}")
    return lo, hi


def _parse_coeffs(text, lineno):
    out = {}
    for token in text.split():
        deg, _, frac = token.partition(":")
        try:
            out[int(deg)] = float(frac)
        except ValueError:
            raise ValueError(f"line {lineno}: bad degree:fraction token {token!r}")
    return out


def read_schedule(text):
    """Parse a schedule document into a LutSchedule."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise ValueError(f"missing header {HEADER!r}")
    top = {}
    section = None
    ensemble_raw, gamma_ch, groups_raw = {}, None, {}
    iter_specs = []  # (lo, hi, {key: values}, lineno)
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip() if not raw.lstrip().startswith("#") else ""
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ValueError(f"line {lineno}: unterminated section name")
            name = line[1:-1].strip()
            if name.startswith("iteration"):
                token = name[len("iteration") :].strip()
                iter_specs.append([token, {}, lineno])
                section = "iteration"
            elif name in ("ensemble", "gamma_ch", "groups"):
                section = name
            else:
                raise ValueError(f"line {lineno}: unknown section [{name}]")
            continue
        if section == "gamma_ch":
            if gamma_ch is not None:
                raise ValueError(f"line {lineno}: duplicate gamma_ch row")
            gamma_ch = [float(t) for t in line.split()]
            continue
        key, eq, value = (p.strip() for p in line.partition("="))
        if not eq:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        if section is None:
            if key not in _TOP_KEYS:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            top[key] = _TOP_KEYS[key](value)
        elif section == "ensemble":
            ensemble_raw[key] = _parse_coeffs(value, lineno)
        elif section == "groups":
            groups_raw[key] = (value, lineno)
        elif section == "iteration":
            iter_specs[-1][1][key] = (value, lineno)

    for key in ("q_m", "q_v", "i_max", "design_sigma"):
        if key not in top:
            raise ValueError(f"missing top-level key {key!r}")
    if set(ensemble_raw) != {"cn", "vn"}:
        raise ValueError("ensemble section must define cn and vn")
    if gamma_ch is None:
        raise ValueError("missing [gamma_ch] section")
    i_max = top["i_max"]
    n_levels = 2 ** top["q_m"]
    if len(gamma_ch) != n_levels - 1:
        raise ValueError(f"gamma_ch needs {n_levels - 1} thresholds")

    iters = [None] * i_max
    for token, fields, lineno in iter_specs:
        lo, hi = _parse_range(token, i_max, lineno)
        needed = {"phi_v", "phi_ch", "gamma_v", "gamma_e"}
        if set(fields) != needed:
            raise ValueError(f"line {lineno}: iteration section needs {sorted(needed)}")

        def ints(key, want):
            value, vline = fields[key]
            out = [int(t) for t in value.split()]
            if len(out) != want:
                raise ValueError(f"line {vline}: {key} needs {want} integers")
            return out

        lut = LutIterSet(
            ReconstructionFn(tuple(ints("phi_v", n_levels))),
            ReconstructionFn(tuple(ints("phi_ch", n_levels))),
            tuple(ints("gamma_v", n_levels - 1)),
            ints("gamma_e", 1)[0],
        )
        for t in range(lo, hi + 1):
            if iters[t - 1] is not None:
                raise ValueError(f"line {lineno}: iteration {t} defined twice")
            iters[t - 1] = lut
    missing = [t + 1 for t, it in enumerate(iters) if it is None]
    if missing:
        raise ValueError(f"iterations without LUTs: {missing}")

    groups = None
    if groups_raw:
        groups = {}
        for kind, (value, lineno) in groups_raw.items():
            groups[kind] = tuple(_parse_range(t, i_max, lineno) for t in value.split())

    ensemble = JointDegreeDistribution(
        tuple(sorted(ensemble_raw["cn"])), tuple(sorted(ensemble_raw["vn"])),
        ensemble_raw["cn"], ensemble_raw["vn"],
    )
    fine = fine_channel_pmf(
        top["design_sigma"], top.get("fine_bins", 2000), top.get("fine_clip", 30.0),
        q_m=top["q_m"],
    )
    return LutSchedule(
        q_m=top["q_m"], q_v=top["q_v"], i_max=i_max,
        design_sigma=top["design_sigma"],
        channel_quantizer=quantizer_from_thresholds(gamma_ch, fine),
        iters=tuple(iters), ensemble=ensemble,
        fine_bins=top.get("fine_bins", 2000), fine_clip=top.get("fine_clip", 30.0),
        frozen_from=top.get("frozen_from"), groups=groups,
    )


def _fmt_coeffs(coeffs):
    return " ".join(f"{d}:{coeffs[d]!r}" for d in sorted(coeffs))


def _fmt_range(lo, hi):
    return str(lo) if lo == hi else f"{lo}-{hi}"


def write_schedule(schedule):
    """Render a LutSchedule as format-v1 text (inverse of read_schedule)."""
    out = [HEADER]
    out.append(f"q_m = {schedule.q_m}")
    out.append(f"q_v = {schedule.q_v}")
    out.append(f"i_max = {schedule.i_max}")
    out.append(f"design_sigma = {schedule.design_sigma!r}")
    out.append(f"fine_bins = {schedule.fine_bins}")
    out.append(f"fine_clip = {schedule.fine_clip!r}")
    if schedule.frozen_from is not None:
        out.append(f"frozen_from = {schedule.frozen_from}")
    out.append("")
    out.append("[ensemble]")
    out.append(f"cn = {_fmt_coeffs(schedule.ensemble.cn_coeffs)}")
    out.append(f"vn = {_fmt_coeffs(schedule.ensemble.vn_coeffs)}")
    out.append("")
    out.append("[gamma_ch]")
    out.append(" ".join(repr(t) for t in schedule.channel_quantizer.thresholds))
    start = 0
    while start < schedule.i_max:
        end = start
        while end + 1 < schedule.i_max and schedule.iters[end + 1] == schedule.iters[start]:
            end += 1
        lut = schedule.iters[start]
        out.append("")
        out.append(f"[iteration {_fmt_range(start + 1, end + 1)}]")
        out.append("phi_v = " + " ".join(map(str, lut.phi_v.table)))
        out.append("phi_ch = " + " ".join(map(str, lut.phi_ch.table)))
        out.append("gamma_v = " + " ".join(map(str, lut.gamma_v)))
        out.append(f"gamma_e = {lut.gamma_e}")
        start = end + 1
    if schedule.groups:
        out.append("")
        out.append("[groups]")
        for kind in sorted(schedule.groups):
            spans = " ".join(_fmt_range(lo, hi) for lo, hi in schedule.groups[kind])
            out.append(f"{kind} = {spans}")
    return "\n".join(out) + "\n"
