import math

import numpy as np
import pytest

import dpjscc
from dpjscc.lifting import (
    ACYCLIC,
    BinaryBaseMatrix,
    GirthError,
    LiftError,
    expand,
    expand_shifts,
    girth,
    lift_code,
    lift_peg,
    lift_qc,
    load_qc,
    qc_girth,
    save_qc,
    write_alist,
)
from dpjscc.protograph import assemble_joint


def oracle_expand(shifts, z2):
    """Independent dense expansion: roll an identity per block."""
    rows, cols = shifts.shape
    out = np.zeros((rows * z2, cols * z2), dtype=np.uint8)
    eye = np.eye(z2, dtype=np.uint8)
    for r in range(rows):
        for c in range(cols):
            h = shifts[r, c]
            if h >= 0:
                out[r * z2:(r + 1) * z2, c * z2:(c + 1) * z2] = np.roll(eye, int(h), axis=1)
    return out


@pytest.fixture(scope="module")
def p04_base():
    return lift_peg(dpjscc.load_fixture("p04_r1_opt"), 4, seed=1)


def test_peg_requires_large_enough_z1():
    code = dpjscc.load_fixture("p01_r2_a_base")  # contains entries of 3
    with pytest.raises(LiftError):
        lift_peg(code, 2, seed=0)


def test_peg_block_sums_match_protograph(p04_base):
    code = p04_base.code
    proto = assemble_joint(code).entries
    z1 = p04_base.z1
    for r in range(proto.shape[0]):
        for c in range(proto.shape[1]):
            block = p04_base.grid[r * z1:(r + 1) * z1, c * z1:(c + 1) * z1]
            # brute-force row/column counting oracle
            assert list(block.sum(axis=0)) == [proto[r, c]] * z1
            assert list(block.sum(axis=1)) == [proto[r, c]] * z1


def test_peg_linking_diagonal_blocks_are_identity(p04_base):
    code = p04_base.code
    z1 = p04_base.z1
    off = (code.n_s + code.m_c) * z1
    for i in range(code.m_s):
        block = p04_base.grid[i * z1:(i + 1) * z1, off + i * z1:off + (i + 1) * z1]
        assert np.array_equal(block, np.eye(z1, dtype=np.uint8))


def test_peg_zero_cells_stay_zero(p04_base):
    code = p04_base.code
    proto = assemble_joint(code).entries
    z1 = p04_base.z1
    for r, c in zip(*np.nonzero(proto == 0)):
        block = p04_base.grid[r * z1:(r + 1) * z1, c * z1:(c + 1) * z1]
        assert not block.any()


def test_peg_deterministic():
    code = dpjscc.load_fixture("p14_r1_opt")
    a = lift_peg(code, 4, seed=7)
    b = lift_peg(code, 4, seed=7)
    c = lift_peg(code, 4, seed=8)
    assert np.array_equal(a.grid, b.grid)
    assert a.grid.tobytes() == b.grid.tobytes()
    assert not np.array_equal(a.grid, c.grid)  # seeds explore different lifts


def test_qc_shift_zero_pattern(p04_base):
    qc = lift_qc(p04_base, 50, seed=3, attempts=40)
    assert np.array_equal(qc.shifts >= 0, p04_base.grid.astype(bool))
    assert qc.shifts.max() < 50
    for (i, j) in p04_base.t_diag_entries():
        assert qc.shifts[i, j] == 0


def test_qc_deterministic_byte_equality(p04_base):
    a = lift_qc(p04_base, 400, seed=5, attempts=60)
    b = lift_qc(p04_base, 400, seed=5, attempts=60)
    assert a.shifts.tobytes() == b.shifts.tobytes()
    assert a.girth == b.girth


def test_qc_girth_at_least_six(p04_base):
    qc = lift_qc(p04_base, 50, seed=3, attempts=40)
    assert qc.girth >= 6
    # exact agreement with full breadth-first search on the expansion
    assert qc_girth(qc) == girth(expand(qc))


def test_qc_rejects_tiny_z2():
    base = lift_peg(dpjscc.load_fixture("p04_r1_opt"), 4, seed=1)
    with pytest.raises(LiftError):
        lift_qc(base, 1)
    with pytest.raises(GirthError):
        lift_qc(base, 2, attempts=5)  # z2=2 cannot break the dense 4-cycles


def test_expand_shift_zero_is_identity():
    shifts = np.array([[0]])
    assert np.array_equal(expand_shifts(shifts, 4).toarray(), np.eye(4, dtype=np.uint8))


def test_expand_shift_one_rolls_right():
    shifts = np.array([[1]])
    out = expand_shifts(shifts, 4).toarray()
    assert np.array_equal(out, np.roll(np.eye(4, dtype=np.uint8), 1, axis=1))
    assert out[0, 1] == 1 and out[3, 0] == 1


def test_expand_matches_oracle_and_row_weights(p04_base):
    qc = lift_qc(p04_base, 7, seed=2, attempts=10)
    dense = expand(qc).toarray()
    assert np.array_equal(dense, oracle_expand(qc.shifts, 7))
    base_row_weights = p04_base.grid.sum(axis=1)
    for j in range(dense.shape[0]):
        assert dense[j].sum() == base_row_weights[j // 7]


def test_four_cycle_alternating_sum_condition():
    # single-block-row base with a guaranteed 4-cycle between two columns
    shifts = np.array([[1, 3], [2, 0]])
    z2 = 5
    # survives iff s11 - s21 + s22 - s12 = 1-2+0-3 = -4 = 1 (mod 5) != 0
    g = girth(expand_shifts(shifts, z2))
    assert g > 4
    shifts_surviving = np.array([[1, 3], [2, 4]])  # 1-2+4-3 = 0 (mod 5)
    assert girth(expand_shifts(shifts_surviving, z2)) == 4


def test_girth_identity_acyclic():
    assert girth(np.eye(5, dtype=np.uint8)) == ACYCLIC
    assert math.isinf(ACYCLIC)


def test_girth_all_ones_2x3():
    assert girth(np.ones((2, 3), dtype=np.uint8)) == 4


def test_double_lift_cell_multiplicity(p04_base):
    qc = lift_qc(p04_base, 7, seed=2, attempts=10)
    dense = expand(qc).toarray()
    code = p04_base.code
    proto = assemble_joint(code).entries
    zz = p04_base.z1 * qc.z2
    for r in range(proto.shape[0]):
        for c in range(proto.shape[1]):
            region = dense[r * zz:(r + 1) * zz, c * zz:(c + 1) * zz]
            assert (region.sum(axis=0) == proto[r, c]).all()
            assert (region.sum(axis=1) == proto[r, c]).all()


def test_expanded_lower_left_zero(p04_base):
    qc = lift_qc(p04_base, 7, seed=2, attempts=10)
    dense = expand(qc).toarray()
    code = p04_base.code
    zz = p04_base.z1 * qc.z2
    assert not dense[code.m_s * zz:, : code.n_s * zz].any()


def test_rates_invariant_under_lifting(p04_base):
    from fractions import Fraction

    code = p04_base.code
    rates = dpjscc.code_rates(code)
    z1, z2 = p04_base.z1, 7
    n_source_bits = code.n_s * z1 * z2
    n_sent_bits = (code.n_c - code.n_p) * z1 * z2
    assert Fraction(n_source_bits, n_sent_bits) == rates.overall


def test_qc_persistence_round_trip(tmp_path, p04_base):
    qc = lift_qc(p04_base, 50, seed=3, attempts=40)
    path = tmp_path / "lift.qc"
    save_qc(qc, path)
    loaded = load_qc(path, p04_base.code)
    assert np.array_equal(loaded.shifts, qc.shifts)
    assert loaded.girth == qc.girth
    assert loaded.z1 == qc.z1 and loaded.z2 == qc.z2 and loaded.seed == qc.seed


def test_alist_export(tmp_path, p04_base):
    qc = lift_qc(p04_base, 7, seed=2, attempts=10)
    h = expand(qc)
    path = tmp_path / "code.alist"
    write_alist(h, path)
    lines = path.read_text().strip().split("\n")
    n, m = map(int, lines[0].split())
    assert (n, m) == (h.shape[1], h.shape[0])
    col_degs = list(map(int, lines[2].split()))
    assert col_degs == list(np.diff(h.tocsc().indptr))


def test_lift_code_pipeline():
    qc = lift_code(dpjscc.load_fixture("p14_r1_base"), 4, 50, seed=0, attempts=60)
    assert qc.girth >= 6
    assert qc.shifts.shape == (7 * 4, 12 * 4)
