from fractions import Fraction

import pytest

import dpjscc
from dpjscc.analysis import (
    DegenerateWeightError,
    cnp_lut_ratio,
    compare,
    delta_latency_dec,
    delta_latency_source,
    lut_count,
    percent,
    report_csv,
    report_markdown,
    source_encoder_gate_ratio,
    source_rows,
)
from dpjscc.protograph import JointCode, Protomatrix, TriangularLink, assemble_joint

PAIRS = [
    ("p04_r1_opt", "p04_r1_base", ("20.0", "0.0", "20.0", "0.0")),
    ("p01_r2_b_opt3", "p01_r2_b_base", ("23.1", "12.5", "23.1", "10.0")),
    ("p14_r1_opt", "p14_r1_base", ("33.3", "33.3", "0.0", "0.0")),
]


@pytest.mark.parametrize("new_id,old_id,expected", PAIRS)
def test_reference_comparison_table(new_id, old_id, expected):
    report = compare(dpjscc.load_fixture(new_id), dpjscc.load_fixture(old_id))
    assert tuple(v for _, v in report.rows()) == expected


def test_lut_counts():
    assert lut_count(dpjscc.load_fixture("p04_r1_base")) == 15
    assert lut_count(dpjscc.load_fixture("p04_r1_opt")) == 18
    assert lut_count(dpjscc.load_fixture("p01_r2_b_base")) == 39
    assert lut_count(dpjscc.load_fixture("p01_r2_b_opt3")) == 48
    assert lut_count(dpjscc.load_fixture("p14_r1_base")) == 18
    assert lut_count(dpjscc.load_fixture("p14_r1_opt")) == 18


def test_self_pair_is_zero():
    for fid in dpjscc.fixture_ids():
        code = dpjscc.load_fixture(fid)
        assert delta_latency_source(code, code) == 0
        assert delta_latency_dec(code, code) == 0
        assert source_encoder_gate_ratio(code, code) == 0
        assert cnp_lut_ratio(code, code) == 0


def test_row_weight_oracle():
    for fid in dpjscc.fixture_ids():
        code = dpjscc.load_fixture(fid)
        w_s, w_t = source_rows(code)
        # independent entry-summing oracle
        for j in range(code.m_s):
            assert w_s[j] == sum(int(v) for v in code.source.entries[j])
            assert w_t[j] == sum(int(v) for v in code.link.entries[j])
        joint = assemble_joint(code)
        for j in range(joint.rows):
            assert joint.row_weights()[j] == sum(int(v) for v in joint.entries[j])


def test_exact_fractions():
    new = dpjscc.load_fixture("p01_r2_b_opt3")
    old = dpjscc.load_fixture("p01_r2_b_base")
    assert source_encoder_gate_ratio(new, old) == Fraction(3, 13)
    assert delta_latency_source(new, old) == Fraction(1, 8)
    assert cnp_lut_ratio(new, old) == Fraction(3, 13)
    assert delta_latency_dec(new, old) == Fraction(1, 10)


def test_percent_rounding_half_up():
    assert percent(Fraction(3, 13)) == "23.1"
    assert percent(Fraction(1, 3)) == "33.3"
    assert percent(Fraction(1, 8)) == "12.5"
    assert percent(Fraction(1, 2000)) == "0.1"   # 0.05 rounds up
    assert percent(Fraction(0)) == "0.0"


def test_degenerate_weights_rejected():
    code = JointCode(
        source=Protomatrix([[1]]),
        channel=Protomatrix([[1, 1]]),
        link=TriangularLink([[1]]),
        p1=0.1,
    )
    with pytest.raises(DegenerateWeightError):
        source_encoder_gate_ratio(code, code)
    with pytest.raises(DegenerateWeightError):
        lut_count(code)


def test_report_rendering():
    report = compare(dpjscc.load_fixture("p04_r1_opt"), dpjscc.load_fixture("p04_r1_base"))
    csv_text = report_csv(report)
    assert csv_text.startswith("metric,value_pct\n")
    assert "complexity_increase_source_encoding_pct,20.0" in csv_text
    md = report_markdown(report, "new", "old")
    assert "| complexity_increase_decoding_pct | 20.0% |" in md
