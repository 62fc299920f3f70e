"""GF(2) linear algebra helpers: bit-packed elimination and a circulant
block solver.

Parity submatrices of quasi-cyclic codes are grids of circulant
permutations, i.e. matrices over the ring GF(2)[x]/(x^z2 + 1).  Block
Gauss-Jordan over that ring inverts them at block dimension (tens) instead
of bit dimension (thousands); monomial entries are always units, and if
elimination ever stalls on a non-unit pivot the caller falls back to plain
bit-packed Gauss-Jordan.
"""

from __future__ import annotations

import numpy as np


class SingularMatrixError(ValueError):
    """The matrix has no GF(2) inverse."""


class RingStallError(RuntimeError):
    """Block elimination found no invertible pivot (matrix may still be
    invertible at bit level)."""


# --- bit-packed dense kernels -------------------------------------------------

def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 matrix row-wise into uint8 words (MSB first)."""
    return np.packbits(np.asarray(bits, dtype=np.uint8), axis=1)


def unpack_rows(packed: np.ndarray, n_cols: int) -> np.ndarray:
    return np.unpackbits(packed, axis=1, count=n_cols)


def gf2_inverse_packed(mat: np.ndarray) -> np.ndarray:
    """Inverse of a dense 0/1 square matrix, returned bit-packed row-wise.

    Gauss-Jordan on [A | I] with full elimination per pivot; raises
    SingularMatrixError when no pivot exists.
    """
    a = np.asarray(mat, dtype=np.uint8)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    left = pack_rows(a)
    right = pack_rows(np.eye(n, dtype=np.uint8))

    for col in range(n):
        byte, bit = divmod(col, 8)
        mask = np.uint8(1 << (7 - bit))
        has_bit = (left[:, byte] & mask).astype(bool)
        candidates = np.nonzero(has_bit[col:])[0]
        if candidates.size == 0:
            raise SingularMatrixError(f"no pivot in column {col}")
        pivot = col + int(candidates[0])
        if pivot != col:
            left[[col, pivot]] = left[[pivot, col]]
            right[[col, pivot]] = right[[pivot, col]]
            has_bit[[col, pivot]] = has_bit[[pivot, col]]
        flip = np.nonzero(has_bit)[0]
        flip = flip[flip != col]
        if flip.size:
            left[flip] ^= left[col]
            right[flip] ^= right[col]
    return right


def gf2_solve_factor(mat: np.ndarray):
    """Column-pivoted Gauss-Jordan factorization of a square 0/1 matrix,
    tolerating rank deficiency.

    Returns (r_packed, pivot_cols, pivot_rows, null_rows): r_packed is the
    accumulated row-op transform R (bit-packed rows) with R A in reduced
    form.  To solve A x = b: z = R b; the system is consistent iff
    z[null_rows] is all zero, and the canonical solution (free variables
    zero) is x[pivot_cols] = z[pivot_rows].
    """
    a = np.asarray(mat, dtype=np.uint8)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    width = ((n + 63) // 64) * 8  # bytes, uint64-aligned
    left = np.zeros((n, width), dtype=np.uint8)
    right = np.zeros((n, width), dtype=np.uint8)
    packed = pack_rows(a)
    left[:, : packed.shape[1]] = packed
    eye = pack_rows(np.eye(n, dtype=np.uint8))
    right[:, : eye.shape[1]] = eye
    left64 = left.view(np.uint64)
    right64 = right.view(np.uint64)

    used = np.zeros(n, dtype=bool)
    pivot_cols, pivot_rows = [], []
    for col in range(n):
        byte, bit = divmod(col, 8)
        mask = np.uint8(1 << (7 - bit))
        colbits = (left[:, byte] & mask) != 0
        cand = np.nonzero(colbits & ~used)[0]
        if cand.size == 0:
            continue  # free column
        p = int(cand[0])
        used[p] = True
        pivot_cols.append(col)
        pivot_rows.append(p)
        flip = np.nonzero(colbits)[0]
        flip = flip[flip != p]
        if flip.size:
            left64[flip] ^= left64[p]
            right64[flip] ^= right64[p]
    null_rows = np.nonzero(~used)[0]
    words = (n + 7) // 8
    return (
        right[:, :words].copy(),
        np.array(pivot_cols, dtype=np.int64),
        np.array(pivot_rows, dtype=np.int64),
        null_rows.astype(np.int64),
    )


def gf2_matvec_packed(packed: np.ndarray, vec_bits: np.ndarray) -> np.ndarray:
    """y = M x over GF(2) with M bit-packed row-wise and x a 0/1 vector."""
    vp = np.packbits(np.asarray(vec_bits, dtype=np.uint8))
    acc = np.bitwise_count(packed & vp[None, : packed.shape[1]])
    return (acc.sum(axis=1, dtype=np.uint64) & 1).astype(np.uint8)


# --- polynomial ring GF(2)[x]/(x^z2 + 1) --------------------------------------

def _poly_mulmod(a: int, b: int, z2: int, mask: int) -> int:
    res = 0
    while a:
        low = a & -a
        res ^= b << (low.bit_length() - 1)
        a ^= low
    while res >> z2:
        res = (res & mask) ^ (res >> z2)
    return res


def _poly_divmod(a: int, b: int):
    """Quotient/remainder of GF(2)[x] division."""
    if b == 0:
        raise ZeroDivisionError
    q = 0
    db = b.bit_length()
    while a.bit_length() >= db:
        shift = a.bit_length() - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _poly_divmod(a, b)[1]
    return a


def _poly_invmod(a: int, modulus: int) -> int:
    """Inverse of a modulo the given polynomial, or raise RingStallError."""
    r0, r1 = modulus, a
    s0, s1 = 0, 1
    while r1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        new_s = s0
        while q:
            low = q & -q
            new_s ^= s1 << (low.bit_length() - 1)
            q ^= low
        s0, s1 = s1, new_s
    if r0 != 1:
        raise RingStallError("entry is not a unit in the circulant ring")
    return _poly_divmod(s0, modulus)[1]


def circulant_block_inverse(shifts: np.ndarray, z2: int) -> list:
    """Inverse of a square grid of circulant permutations (shift -1 = zero
    block), as a grid of ring polynomials (Python ints, bit k = coeff x^k).

    Full pivoting over the remaining submatrix; when no single entry is a
    unit, tries pairwise row sums (the ring has zero divisors, so two
    non-units can sum to a unit).  Raises RingStallError when elimination
    still cannot proceed; the caller then falls back to bit level.
    """
    b_dim = shifts.shape[0]
    if shifts.shape[0] != shifts.shape[1]:
        raise ValueError("block grid must be square")
    modulus = (1 << z2) | 1  # x^z2 + 1
    mask = (1 << z2) - 1

    a = [[(1 << int(s)) if s >= 0 else 0 for s in row] for row in shifts]
    inv = [[1 if i == j else 0 for j in range(b_dim)] for i in range(b_dim)]
    colmap = list(range(b_dim))

    def is_unit(p):
        return p != 0 and _poly_gcd(p, modulus) == 1

    def swap_rows(r1, r2):
        a[r1], a[r2] = a[r2], a[r1]
        inv[r1], inv[r2] = inv[r2], inv[r1]

    def swap_cols(c1, c2):
        for row in a:
            row[c1], row[c2] = row[c2], row[c1]
        colmap[c1], colmap[c2] = colmap[c2], colmap[c1]

    def add_row(dst, src):  # rows of both the work matrix and the inverse
        a[dst] = [v ^ w for v, w in zip(a[dst], a[src])]
        inv[dst] = [v ^ w for v, w in zip(inv[dst], inv[src])]

    for step in range(b_dim):
        pivot = None
        best_weight = None
        for r in range(step, b_dim):
            for c in range(step, b_dim):
                entry = a[r][c]
                if entry and is_unit(entry):
                    w = bin(entry).count("1")
                    if best_weight is None or w < best_weight:
                        pivot, best_weight = (r, c), w
                        if w == 1:
                            break
            if best_weight == 1:
                break
        if pivot is None:
            # try to manufacture a unit from a pair of rows
            for c in range(step, b_dim):
                col_entries = [(r, a[r][c]) for r in range(step, b_dim) if a[r][c]]
                done = False
                for i in range(len(col_entries)):
                    for j in range(i + 1, len(col_entries)):
                        if is_unit(col_entries[i][1] ^ col_entries[j][1]):
                            add_row(col_entries[i][0], col_entries[j][0])
                            pivot = (col_entries[i][0], c)
                            done = True
                            break
                    if done:
                        break
                if done:
                    break
            if pivot is None:
                raise RingStallError(f"no unit pivot at elimination step {step}")
        pr, pc = pivot
        if pr != step:
            swap_rows(pr, step)
        if pc != step:
            swap_cols(pc, step)
        p_inv = _poly_invmod(a[step][step], modulus)
        a[step] = [_poly_mulmod(p_inv, v, z2, mask) if v else 0 for v in a[step]]
        inv[step] = [_poly_mulmod(p_inv, v, z2, mask) if v else 0 for v in inv[step]]
        for r in range(b_dim):
            if r == step or a[r][step] == 0:
                continue
            factor = a[r][step]
            a[r] = [
                v ^ (_poly_mulmod(factor, w, z2, mask) if w else 0)
                for v, w in zip(a[r], a[step])
            ]
            inv[r] = [
                v ^ (_poly_mulmod(factor, w, z2, mask) if w else 0)
                for v, w in zip(inv[r], inv[step])
            ]

    # column swaps permute the inverse's rows: row colmap[k] of the true
    # inverse is row k of the eliminated augmented block
    out = [None] * b_dim
    for k in range(b_dim):
        out[colmap[k]] = inv[k]
    return out


def circulant_grid_to_packed(polys: list, z2: int) -> np.ndarray:
    """Expand a grid of ring polynomials to a bit-packed dense matrix."""
    b_dim = len(polys)
    n = b_dim * z2
    words = (n + 7) // 8
    out = np.empty((n, words), dtype=np.uint8)
    for i in range(b_dim):
        slab = np.zeros((z2, n), dtype=np.uint8)
        for j, poly in enumerate(polys[i]):
            if poly == 0:
                continue
            coefs = np.frombuffer(
                poly.to_bytes((z2 + 7) // 8, "little"), dtype=np.uint8
            )
            bits = np.unpackbits(coefs, bitorder="little", count=z2)
            idx = np.nonzero(bits)[0]
            rows = np.repeat(np.arange(z2), idx.size)
            cols = j * z2 + (np.tile(idx, z2) + rows) % z2
            slab[rows, cols] ^= 1
        out[i * z2:(i + 1) * z2] = np.packbits(slab, axis=1)
    return out
