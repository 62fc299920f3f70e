import math

import numpy as np
import pytest

import dpjscc
from dpjscc.exit_chart import (
    BracketError,
    binary_entropy,
    channel_threshold,
    j_fun,
    j_inv,
    pexit_converges,
    shannon_limit,
    source_prior_mi,
    source_symbol_scale_db,
)


def j_quadrature(sigma):
    """Independent high-accuracy J via adaptive quadrature."""
    from scipy.integrate import quad

    if sigma == 0:
        return 0.0

    def integrand(l):
        dens = math.exp(-((l - sigma * sigma / 2) ** 2) / (2 * sigma * sigma)) / math.sqrt(
            2 * math.pi * sigma * sigma
        )
        if l > 40:
            g = math.exp(-l) / math.log(2)
        elif l < -40:
            g = -l / math.log(2)
        else:
            g = math.log1p(math.exp(-l)) / math.log(2)
        return dens * g

    mid = sigma * sigma / 2
    val = quad(integrand, mid - 14 * sigma, 0, limit=400)[0]
    val += quad(integrand, 0, mid + 14 * sigma, limit=400)[0]
    return 1.0 - val


def test_j_limits():
    assert j_fun(0.0) == 0.0
    assert j_fun(20.0) > 0.9999


def test_j_monotone():
    grid = np.linspace(0.0, 14.0, 500)
    vals = j_fun(grid)
    assert np.all(np.diff(vals) >= 0)


@pytest.mark.parametrize("sigma", [0.01, 0.1, 0.5, 1.0, 2.0, 3.5, 5.0, 8.0])
def test_j_matches_quadrature(sigma):
    assert abs(j_fun(sigma) - j_quadrature(sigma)) <= 1e-6


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0, 5.0])
def test_j_inverse_round_trip(sigma):
    assert abs(j_inv(j_fun(sigma)) - sigma) <= 1e-4


def test_j_inv_forward_round_trip():
    for mi in [1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.9192, 0.99, 0.9999]:
        assert abs(j_fun(j_inv(mi)) - mi) <= 1e-6


def test_j_domain_errors():
    with pytest.raises(ValueError):
        j_fun(-0.1)
    with pytest.raises(ValueError):
        j_inv(1.0)
    with pytest.raises(ValueError):
        j_inv(-0.01)


def test_source_prior_values():
    i_s, sigma_s = source_prior_mi(0.5)
    assert i_s == 0.0 and sigma_s == 0.0
    i_s, _ = source_prior_mi(0.01)
    assert abs(i_s - (1 - 0.0808)) < 5e-4
    i_s, _ = source_prior_mi(0.04)
    assert abs(i_s - (1 - 0.2423)) < 5e-4
    with pytest.raises(ValueError):
        source_prior_mi(0.0)
    with pytest.raises(ValueError):
        source_prior_mi(0.6)


def test_binary_entropy_basics():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert abs(binary_entropy(0.11) - 0.4999) < 2e-4  # H_b(0.11) ~ 0.5


def test_pexit_far_from_threshold():
    code = dpjscc.load_fixture("p04_r1_base")
    assert pexit_converges(code, 5.0)
    assert not pexit_converges(code, -15.0)


def test_pexit_brackets_reference_threshold():
    code = dpjscc.load_fixture("p04_r1_base")
    assert pexit_converges(code, -5.0)
    assert not pexit_converges(code, -5.3)


def test_threshold_p04_pair():
    base = channel_threshold(dpjscc.load_fixture("p04_r1_base"))
    opt = channel_threshold(dpjscc.load_fixture("p04_r1_opt"))
    assert abs(base.threshold_db - (-5.127)) <= 0.1
    assert abs(opt.threshold_db - (-5.267)) <= 0.1
    assert opt.threshold_db < base.threshold_db


def test_threshold_trace_monotone():
    report = channel_threshold(dpjscc.load_fixture("p04_r1_opt"))
    # every converging probe lies above every failing probe
    fails = [db for db, ok in report.trace if not ok]
    convs = [db for db, ok in report.trace if ok]
    assert max(fails) < min(convs)
    assert min(convs) == report.threshold_db
    assert min(convs) - max(fails) <= report.resolution_db + 1e-12


def test_threshold_above_shannon_limit():
    for fid in ("p04_r1_base", "p14_r1_base", "p01_r2_a_base"):
        code = dpjscc.load_fixture(fid)
        rep = channel_threshold(code)
        from fractions import Fraction

        rate = float(dpjscc.code_rates(code).overall)
        lim = shannon_limit(code.p1, rate)
        assert rep.threshold_db >= lim.gaussian_db
        assert rep.threshold_db >= lim.biawgn_db


def test_unpunctured_never_worse():
    for fid in ("p04_r1_base", "p14_r1_base"):
        code = dpjscc.load_fixture(fid)
        rep = channel_threshold(code)
        bare = dpjscc.JointCode(
            source=code.source,
            channel=code.channel,
            link=code.link,
            punctured=frozenset(),
            p1=code.p1,
        )
        assert pexit_converges(bare, rep.threshold_db)


def test_shannon_limit_values():
    lim = shannon_limit(0.04, 1.0)
    assert abs(lim.gaussian_db - (-7.00)) <= 0.02
    lim = shannon_limit(0.14, 1.0)
    assert abs(lim.gaussian_db - (-2.05)) <= 0.02
    # binary-input capacity is below Gaussian capacity, so its limit is higher
    assert lim.biawgn_db >= lim.gaussian_db


def test_source_symbol_scale():
    code = dpjscc.load_fixture("p01_r2_a_base")  # overall rate 2
    assert abs(source_symbol_scale_db(0.0, code) - (-10 * math.log10(2))) < 1e-12
    code = dpjscc.load_fixture("p04_r1_base")  # overall rate 1
    assert source_symbol_scale_db(-5.0, code) == -5.0


def test_bracket_error_on_hopeless_bracket():
    code = dpjscc.load_fixture("p04_r1_base")
    with pytest.raises(BracketError):
        channel_threshold(code, bracket_db=(-15.0, -10.0))
