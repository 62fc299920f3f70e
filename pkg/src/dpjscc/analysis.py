"""Encoder/decoder complexity and latency estimates from protomatrix row
weights.

All quantities derive from row weights of the small base matrices (the
first lift preserves per-row weight, so protograph rows suffice).  XOR-gate
counts for the balanced-tree source encoder scale with the largest row
weight of [B_s | linking block] minus 2; check-node processors need
3*(x-2) tanh look-up tables at highest joint row weight x.  Latencies are
tree depths, ceil(log2(.)) of per-row operand counts.

Ratios are kept as exact fractions; rendering rounds half-up to one
decimal so reported percentages are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

import numpy as np

from .protograph import JointCode, assemble_joint


class DegenerateWeightError(ValueError):
    """Row weights too small for the gate/LUT model (needs weight >= 3)."""


def _ceil_log2(n: int) -> int:
    if n < 1:
        raise ValueError("operand count must be positive")
    return int(n - 1).bit_length()


def source_rows(code: JointCode):
    """Per-row weights (w_s, w_t) of the source and linking blocks."""
    w_s = code.source.row_weights()
    w_t = code.link.entries.sum(axis=1)
    return w_s, w_t


def source_encoder_gates(code: JointCode) -> int:
    """XOR gates of the balanced-tree source encoder (proportionality)."""
    w_s, w_t = source_rows(code)
    peak = int((w_s + w_t).max())
    if peak <= 2:
        raise DegenerateWeightError(f"largest source row weight {peak} <= 2")
    return peak - 2


def source_encoder_gate_ratio(new: JointCode, old: JointCode) -> Fraction:
    """Relative increase in source-encoder XOR gates, new vs old."""
    return Fraction(source_encoder_gates(new), source_encoder_gates(old)) - 1


def source_latency_units(code: JointCode) -> int:
    """Total tree depth of sequential group encoding."""
    w_s, w_t = source_rows(code)
    return sum(_ceil_log2(int(ws + wt - 1)) for ws, wt in zip(w_s, w_t))


def delta_latency_source(new: JointCode, old: JointCode) -> Fraction:
    """Relative increase in source-encoding latency, new vs old."""
    return Fraction(source_latency_units(new), source_latency_units(old)) - 1


def joint_row_weights(code: JointCode) -> np.ndarray:
    return assemble_joint(code).row_weights()


def lut_count(code: JointCode) -> int:
    """tanh look-up tables in the widest check-node processor: 3*(x-2)."""
    x = int(joint_row_weights(code).max())
    if x <= 2:
        raise DegenerateWeightError(f"highest joint row weight {x} <= 2")
    return 3 * (x - 2)


def cnp_lut_ratio(new: JointCode, old: JointCode) -> Fraction:
    """Relative increase in check-node LUTs, new vs old."""
    return Fraction(lut_count(new), lut_count(old)) - 1


def delta_latency_dec(new: JointCode, old: JointCode) -> Fraction:
    """Relative increase in decoding latency, new vs old.

    Numerator: per-row tree-depth differences of the joint matrices.
    Denominator: sum over rows of (depth - 1) for the old code; grouping
    the -1 inside the per-row sum is the reading consistent with the
    reference comparison table.
    """
    w_new = joint_row_weights(new)
    w_old = joint_row_weights(old)
    num = sum(_ceil_log2(int(w)) for w in w_new) - sum(_ceil_log2(int(w)) for w in w_old)
    den = sum(_ceil_log2(int(w)) - 1 for w in w_old)
    return Fraction(num, den)


def percent(frac: Fraction, decimals: int = 1) -> str:
    """Exact fraction -> percentage string, ROUND_HALF_UP."""
    value = Decimal(frac.numerator) / Decimal(frac.denominator) * 100
    quantum = Decimal(1).scaleb(-decimals)
    return str(value.quantize(quantum, rounding=ROUND_HALF_UP))


@dataclass
class LatencyReport:
    """The four comparison figures for a (new, old) code pair."""

    w_s: list
    w_t: list
    w_joint_new: list
    w_joint_old: list
    gate_increase: Fraction
    latency_source: Fraction
    lut_increase: Fraction
    latency_dec: Fraction

    def rows(self):
        return [
            ("complexity_increase_source_encoding_pct", percent(self.gate_increase)),
            ("delta_latency_source_pct", percent(self.latency_source)),
            ("complexity_increase_decoding_pct", percent(self.lut_increase)),
            ("delta_latency_dec_pct", percent(self.latency_dec)),
        ]


def compare(new: JointCode, old: JointCode) -> LatencyReport:
    w_s, w_t = source_rows(new)
    return LatencyReport(
        w_s=[int(v) for v in w_s],
        w_t=[int(v) for v in w_t],
        w_joint_new=[int(v) for v in joint_row_weights(new)],
        w_joint_old=[int(v) for v in joint_row_weights(old)],
        gate_increase=source_encoder_gate_ratio(new, old),
        latency_source=delta_latency_source(new, old),
        lut_increase=cnp_lut_ratio(new, old),
        latency_dec=delta_latency_dec(new, old),
    )


def report_csv(report: LatencyReport) -> str:
    lines = ["metric,value_pct"]
    lines += [f"{name},{value}" for name, value in report.rows()]
    return "\n".join(lines) + "\n"


def report_markdown(report: LatencyReport, new_name: str = "new", old_name: str = "old") -> str:
    lines = [
        f"| metric | {new_name} vs {old_name} |",
        "| --- | --- |",
    ]
    lines += [f"| {name} | {value}% |" for name, value in report.rows()]
    return "\n".join(lines) + "\n"
