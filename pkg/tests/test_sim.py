import numpy as np
import pytest

import dpjscc
from dpjscc.sim import (
    ResumeMismatchError,
    SimConfig,
    frame_stream,
    gen_source,
    run_frame,
    run_point,
    run_sweep,
)
from dpjscc.codec import prepare


def small_config(fid="p04_r1_opt", **overrides):
    base = dict(
        code=dpjscc.load_fixture(fid),
        z1=4,
        z2=50,
        esn0_grid_db=[-4.0],
        i_max=50,
        max_frames=120,
        target_error_frames=8,
        min_frames=30,
        master_seed=3,
        lift_seed=1,
        lift_attempts=40,
        code_id=fid,
    )
    base.update(overrides)
    return SimConfig(**base)


def test_gen_source_deterministic_per_frame_index():
    a = gen_source(0.04, 4000, frame_stream(11, 77))
    b = gen_source(0.04, 4000, frame_stream(11, 77))
    c = gen_source(0.04, 4000, frame_stream(11, 78))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_gen_source_degenerate_and_mean():
    assert not gen_source(0.0, 500, frame_stream(0, 0)).any()
    draws = np.concatenate(
        [gen_source(0.04, 12800, frame_stream(5, i)) for i in range(40)]
    )
    n = draws.size
    sigma = np.sqrt(0.04 * 0.96 / n)
    assert abs(draws.mean() - 0.04) < 4 * sigma


def test_run_point_counts_consistent():
    pt = run_point(small_config(), -4.0)
    assert pt.error_frames <= pt.frames
    assert pt.bit_errors <= pt.source_bits
    assert pt.sser == pt.bit_errors / pt.source_bits
    assert pt.fer == pt.error_frames / pt.frames
    if pt.stop_reason == "error-target":
        assert pt.error_frames >= 9 and pt.frames >= 30
    else:
        assert pt.frames == 121  # strict reading: more than max_frames


def test_noiseless_point_sser_zero():
    cfg = small_config(esn0_grid_db=[20.0], max_frames=40, min_frames=10)
    pt = run_point(cfg, 20.0)
    assert pt.sser == 0.0
    assert pt.stop_reason == "frames-cap"
    assert pt.frames == 41


def test_real_mode_on_invertible_code():
    cfg = small_config("p14_r1_base", esn0_grid_db=[2.0], max_frames=50,
                       target_error_frames=5, min_frames=10)
    codec = prepare(cfg.code, cfg.z1, cfg.z2, cfg.lift_seed, cfg.lift_attempts)
    assert codec.structural_defect == 0
    errors, iters, conv = run_frame(codec, 20.0, cfg.master_seed, 0, "real", 50)
    assert errors == 0 and conv


def test_worker_count_independent():
    p1 = run_point(small_config(workers=1), -4.0)
    p2 = run_point(small_config(workers=2), -4.0)
    assert p1 == p2


def test_sweep_resume_and_mismatch(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = small_config(esn0_grid_db=[-3.0, 0.0], max_frames=40,
                       target_error_frames=5, min_frames=10)
    first = run_sweep(cfg, out)
    data = out.read_bytes()
    again = run_sweep(
        small_config(esn0_grid_db=[-3.0, 0.0], max_frames=40,
                     target_error_frames=5, min_frames=10), out
    )
    assert out.read_bytes() == data  # completed rows byte-identical
    assert [p.sser for p in again] == [p.sser for p in first]
    with pytest.raises(ResumeMismatchError):
        run_sweep(
            small_config(esn0_grid_db=[-3.0], master_seed=99, max_frames=40,
                         target_error_frames=5, min_frames=10), out
        )


def test_sweep_extends_existing_file(tmp_path):
    out = tmp_path / "sweep.csv"
    run_sweep(small_config(esn0_grid_db=[0.0], max_frames=30,
                           target_error_frames=5, min_frames=10), out)
    rows_before = out.read_text().strip().split("\n")
    run_sweep(small_config(esn0_grid_db=[0.0, 1.0], max_frames=30,
                           target_error_frames=5, min_frames=10), out)
    rows_after = out.read_text().strip().split("\n")
    assert rows_after[: len(rows_before)] == rows_before
    assert len(rows_after) == len(rows_before) + 1


def test_mode_validation():
    with pytest.raises(ValueError):
        small_config(mode="bogus")
