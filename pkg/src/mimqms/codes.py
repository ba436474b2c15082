"""LDPC code ingestion: alist files, quasi-cyclic base matrices, degree stats.

A TannerCode holds the bipartite adjacency of a parity-check matrix plus the
code rate.  Degree distributions are edge-perspective: the coefficient at
degree d is the fraction of edges incident to nodes of degree d.  A joint
distribution pools several codes into one mixture so a single decoder
schedule can be designed for a rate-compatible family.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

__all__ = [
    "TannerCode",
    "DegreeDistribution",
    "JointDegreeDistribution",
    "load_alist",
    "parse_base_matrix",
    "expand_base_matrix",
    "edge_degree_distribution",
    "joint_degree_distribution",
    "syndrome",
]

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class TannerCode:
    """Bipartite parity-check adjacency.

    Attributes:
        check_adj: per check node, ordered tuple of incident variable indices.
        var_adj: per variable node, ordered tuple of incident check indices.
        rate: code rate; (n_vars - n_checks) / n_vars for full-rank H (rank
            is taken on trust from the source metadata, not verified).
    """

    check_adj: tuple
    var_adj: tuple
    rate: Fraction

    def __post_init__(self):
        check_adj = tuple(tuple(int(v) for v in row) for row in self.check_adj)
        var_adj = tuple(tuple(int(c) for c in row) for row in self.var_adj)
        object.__setattr__(self, "check_adj", check_adj)
        object.__setattr__(self, "var_adj", var_adj)
        object.__setattr__(self, "rate", Fraction(self.rate))
        n_vars, n_checks = len(var_adj), len(check_adj)
        if n_vars == 0 or n_checks == 0:
            raise ValueError("empty code")
        if any(len(row) < 1 for row in check_adj):
            raise ValueError("every check node must have degree >= 1")
        if any(len(row) < 1 for row in var_adj):
            raise ValueError("every variable node must have degree >= 1")
        # transpose consistency: same edge multiset from either side
        from_checks = sorted(
            (c, v) for c, row in enumerate(check_adj) for v in row
        )
        from_vars = sorted(
            (c, v) for v, row in enumerate(var_adj) for c in row
        )
        if from_checks != from_vars:
            raise ValueError("check_adj and var_adj are not transposes")
        if not all(0 <= v < n_vars for _, v in from_checks):
            raise ValueError("variable index out of range")
        if not all(0 <= c < n_checks for c, _ in from_vars):
            raise ValueError("check index out of range")

    @classmethod
    def from_check_adj(cls, check_adj, n_vars, rate):
        """Build the variable-side adjacency from the check side."""
        var_adj = [[] for _ in range(n_vars)]
        for c, row in enumerate(check_adj):
            for v in row:
                if not 0 <= v < n_vars:
                    raise ValueError(f"variable index {v} out of range")
                var_adj[v].append(c)
        return cls(tuple(map(tuple, check_adj)), tuple(map(tuple, var_adj)), rate)

    @property
    def n_vars(self):
        return len(self.var_adj)

    @property
    def n_checks(self):
        return len(self.check_adj)

    @cached_property
    def n_edges(self):
        return sum(len(row) for row in self.check_adj)

    @cached_property
    def cn_degrees(self):
        return np.array([len(row) for row in self.check_adj], dtype=np.int64)

    @cached_property
    def vn_degrees(self):
        return np.array([len(row) for row in self.var_adj], dtype=np.int64)

    @cached_property
    def edge_var(self):
        """Variable index of every edge, check-major order."""
        return np.array(
            [v for row in self.check_adj for v in row], dtype=np.int64
        )

    @cached_property
    def check_ptr(self):
        """Edge offsets per check: edges of check c are [ptr[c], ptr[c+1])."""
        return np.concatenate(([0], np.cumsum(self.cn_degrees)))

    @cached_property
    def var_edge_perm(self):
        """Check-major edge ids regrouped by variable (stable order)."""
        return np.argsort(self.edge_var, kind="stable")

    @cached_property
    def var_ptr(self):
        """Edge offsets per variable into var_edge_perm."""
        return np.concatenate(([0], np.cumsum(self.vn_degrees)))


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective degree distribution of one code."""

    cn_coeffs: dict
    vn_coeffs: dict

    def __post_init__(self):
        for name, coeffs in (("cn", self.cn_coeffs), ("vn", self.vn_coeffs)):
            coeffs = {int(d): float(f) for d, f in coeffs.items()}
            object.__setattr__(self, f"{name}_coeffs", coeffs)
            if not coeffs:
                raise ValueError(f"{name}_coeffs is empty")
            if any(d < 1 for d in coeffs):
                raise ValueError("degrees must be positive integers")
            if any(not 0.0 <= f <= 1.0 for f in coeffs.values()):
                raise ValueError("edge fractions must lie in [0, 1]")
            if abs(sum(coeffs.values()) - 1.0) > _SUM_TOL:
                raise ValueError(f"{name} edge fractions must sum to 1")


@dataclass(frozen=True)
class JointDegreeDistribution:
    """Pooled degree mixture over a family of codes.

    cn_degrees / vn_degrees are the unions of the member degree sets;
    cn_coeffs / vn_coeffs the weighted edge-fraction mixtures over them.
    """

    cn_degrees: tuple
    vn_degrees: tuple
    cn_coeffs: dict
    vn_coeffs: dict

    def __post_init__(self):
        for name in ("cn", "vn"):
            degrees = tuple(sorted(int(d) for d in getattr(self, f"{name}_degrees")))
            coeffs = {int(d): float(f) for d, f in getattr(self, f"{name}_coeffs").items()}
            object.__setattr__(self, f"{name}_degrees", degrees)
            object.__setattr__(self, f"{name}_coeffs", coeffs)
            if degrees != tuple(sorted(coeffs)):
                raise ValueError(f"{name} degree set and coefficient keys differ")
            if abs(sum(coeffs.values()) - 1.0) > _SUM_TOL:
                raise ValueError(f"{name} mixture must sum to 1")

    @property
    def d_c_max(self):
        return self.cn_degrees[-1]

    @property
    def d_v_max(self):
        return self.vn_degrees[-1]


def _records(text):
    """Non-blank lines with their 1-based line numbers."""
    out = []
    for i, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if tokens:
            out.append((i, tokens))
    return out


def _ints(lineno, tokens):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ValueError(f"line {lineno}: expected integers, got {tokens!r}")


def load_alist(text, rate=None):
    """Parse a standard alist document into a TannerCode.

    Layout: "n m" header, max degrees, per-VN degrees, per-CN degrees, then
    n VN adjacency lines and m CN adjacency lines with 1-based indices.
    Zero entries pad short rows (as emitted by many alist writers) and are
    ignored.  rate defaults to (n - m) / n.
    """
    records = _records(text)
    if len(records) < 4:
        raise ValueError("line 1: truncated alist (need header and degree lists)")
    lineno, header = records[0]
    fields = _ints(lineno, header)
    if len(fields) != 2 or min(fields) < 1:
        raise ValueError(f"line {lineno}: malformed header {header!r}")
    n, m = fields
    if len(records) != 4 + n + m:
        raise ValueError(
            f"line {records[-1][0]}: expected {4 + n + m} records for n={n}, m={m}, "
            f"got {len(records)}"
        )
    vdeg = _ints(*records[2])
    cdeg = _ints(*records[3])
    if len(vdeg) != n:
        raise ValueError(f"line {records[2][0]}: expected {n} variable degrees")
    if len(cdeg) != m:
        raise ValueError(f"line {records[3][0]}: expected {m} check degrees")

    def read_rows(recs, count_limit, degrees, kind):
        rows = []
        for (lineno, tokens), want in zip(recs, degrees):
            entries = _ints(lineno, tokens)
            while entries and entries[-1] == 0:  # trailing zeros pad the row
                entries.pop()
            if any(not 1 <= e <= count_limit for e in entries):
                raise ValueError(f"line {lineno}: index out of range")
            if len(entries) != want:
                raise ValueError(
                    f"line {lineno}: {kind} degree mismatch "
                    f"(declared {want}, found {len(entries)})"
                )
            rows.append([e - 1 for e in entries])
        return rows

    var_adj = read_rows(records[4 : 4 + n], m, vdeg, "variable")
    check_adj = read_rows(records[4 + n :], n, cdeg, "check")
    if rate is None:
        rate = Fraction(n - m, n)
    return TannerCode(tuple(map(tuple, check_adj)), tuple(map(tuple, var_adj)), rate)


def parse_base_matrix(text):
    """Parse a 'rows cols Z' grid of shift values; -1 marks zero blocks."""
    records = _records(text)
    if not records:
        raise ValueError("empty base-matrix document")
    lineno, header = records[0]
    fields = _ints(lineno, header)
    if len(fields) != 3 or min(fields) < 1:
        raise ValueError(f"line {lineno}: malformed header {header!r}")
    rows, cols, lift = fields
    if len(records) != 1 + rows:
        raise ValueError(f"line {records[-1][0]}: expected {rows} matrix rows")
    base = []
    for lineno, tokens in records[1:]:
        row = _ints(lineno, tokens)
        if len(row) != cols:
            raise ValueError(f"line {lineno}: expected {cols} entries")
        base.append(row)
    return np.array(base, dtype=np.int64), lift


def expand_base_matrix(base, lift):
    """Lift a quasi-cyclic base matrix into a TannerCode.

    Entry s >= 0 becomes the Z x Z identity cyclically right-shifted by s
    (check k of the block connects variable (k + s) mod Z); -1 becomes the
    zero block.  Rate comes from the block shape.
    """
    base = np.asarray(base, dtype=np.int64)
    if base.ndim != 2:
        raise ValueError("base matrix must be 2-D")
    if base.max() >= lift or base.min() < -1:
        raise ValueError(f"shift values must lie in [-1, {lift - 1}]")
    rows, cols = base.shape
    check_adj = []
    for rb in range(rows):
        shifts = [(cb, s) for cb, s in enumerate(base[rb]) if s >= 0]
        for k in range(lift):
            check_adj.append(
                tuple(cb * lift + (k + s) % lift for cb, s in shifts)
            )
    rate = Fraction(cols - rows, cols)
    return TannerCode.from_check_adj(check_adj, cols * lift, rate)


def edge_degree_distribution(code):
    """Edge fractions per node degree: rho_i for CNs, theta_j for VNs."""
    total = code.n_edges

    def fractions(degrees):
        uniq, counts = np.unique(degrees, return_counts=True)
        return {int(d): float(Fraction(int(d) * int(c), total)) for d, c in zip(uniq, counts)}

    return DegreeDistribution(fractions(code.cn_degrees), fractions(code.vn_degrees))


def joint_degree_distribution(dists, weights=None):
    """Pool member degree distributions into one weighted mixture.

    dists entries may be TannerCode or DegreeDistribution.  weights default
    to each code's total edge count (pooling all edges of all graphs);
    passing explicit weights overrides that, which requires them when any
    entry is a bare DegreeDistribution.
    """
    if not dists:
        raise ValueError("need at least one degree distribution")
    resolved, default_w = [], []
    for d in dists:
        if isinstance(d, TannerCode):
            resolved.append(edge_degree_distribution(d))
            default_w.append(d.n_edges)
        else:
            resolved.append(d)
            default_w.append(None)
    if weights is None:
        if any(w is None for w in default_w):
            raise ValueError("explicit weights required for bare distributions")
        weights = default_w
    weights = [float(w) for w in weights]
    if len(weights) != len(resolved):
        raise ValueError("one weight per distribution")
    if any(w < 0 for w in weights) or sum(weights) <= 0:
        raise ValueError("weights must be nonnegative with positive sum")
    wsum = sum(weights)

    def mix(key):
        out = {}
        for dist, w in zip(resolved, weights):
            for deg, frac in getattr(dist, key).items():
                out[deg] = out.get(deg, 0.0) + w * frac / wsum
        return out

    cn, vn = mix("cn_coeffs"), mix("vn_coeffs")
    return JointDegreeDistribution(tuple(sorted(cn)), tuple(sorted(vn)), cn, vn)


def syndrome(code, bits):
    """Per-check XOR of the incident bits; all-zero means a codeword."""
    bits = np.asarray(bits)
    if bits.shape != (code.n_vars,):
        raise ValueError(f"expected {code.n_vars} bits, got shape {bits.shape}")
    on_edges = bits.astype(np.int64)[code.edge_var]
    return np.bitwise_xor.reduceat(on_edges, code.check_ptr[:-1]).astype(np.uint8)
