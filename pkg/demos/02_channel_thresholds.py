#!/usr/bin/env python3
"""Channel thresholds of the bundled codes via the EXIT-chart recursion.

Each threshold is the smallest Es/N0 (per transmitted symbol) at which the
mutual-information recursion over the joint protograph converges; designs
with overall rate R are also shown on the per-source-symbol scale
(10*log10(R) lower), the scale their reference values are quoted on.
"""

import math
import time

import dpjscc
from dpjscc.exit_chart import channel_threshold, shannon_limit, source_symbol_scale_db

print(f"{'code':16s} {'threshold':>10s} {'ref scale':>10s} {'reference':>10s} {'time':>6s}")
for fid in dpjscc.fixture_ids():
    code = dpjscc.load_fixture(fid)
    ref = dpjscc.fixture_meta(fid)["reference_threshold_db"]
    t0 = time.time()
    report = channel_threshold(code)
    scaled = source_symbol_scale_db(report.threshold_db, code)
    print(f"{fid:16s} {report.threshold_db:+10.3f} {scaled:+10.3f} "
          f"{ref:+10.3f} {time.time() - t0:5.1f}s")

print("\nShannon limits (Es/N0 dB, per transmitted symbol):")
for p1, rate in ((0.04, 1.0), (0.14, 1.0), (0.01, 2.0)):
    lim = shannon_limit(p1, rate)
    line = (f"  p1={p1:<5} R={rate}: Gaussian input {lim.gaussian_db:+.2f}, "
            f"binary input {lim.biawgn_db:+.2f}")
    if rate != 1.0:
        line += f", per-source-symbol Gaussian {lim.gaussian_db - 10 * math.log10(rate):+.2f}"
    print(line)
