#!/usr/bin/env python3
"""Encoder/decoder complexity and latency cost of non-identity linking.

Extra linking edges raise source-check row weights, which costs XOR gates
and tree depth in the source encoder and look-up tables in the widest
check-node processor.  The comparison is exact integer arithmetic on
protograph row weights.
"""

import dpjscc
from dpjscc.analysis import compare, lut_count, report_markdown

PAIRS = [
    ("p04_r1_opt", "p04_r1_base"),
    ("p01_r2_b_opt3", "p01_r2_b_base"),
    ("p14_r1_opt", "p14_r1_base"),
]

for new_id, old_id in PAIRS:
    new = dpjscc.load_fixture(new_id)
    old = dpjscc.load_fixture(old_id)
    report = compare(new, old)
    print(report_markdown(report, new_id, old_id))
    print(f"check-node LUTs: {lut_count(old)} -> {lut_count(new)}")
    print(f"source rows (B_s | link) weights: {report.w_s} + {report.w_t}")
    print()
