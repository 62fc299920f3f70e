"""Encoding, modulation, LLR formation, and joint BP decoding of lifted codes.

Source encoding follows the triangular back-substitution over circulant
groups: compressed group u_j is the GF(2) sum of rolled source groups plus
rolled earlier (or later, for upper orientation) compressed groups.

Channel parity solving is exact GF(2).  Some published channel protographs
have parity sub-blocks whose mod-2 row or column pattern is rank-deficient;
every multiplicity-preserving lift of such a block is singular, so the
solver factors the parity system once (ring fast path, then dense
column-pivoted elimination), records the rank defect, and solves any
consistent frame; frames whose compressed bits violate the defect
constraints raise FrameUnencodableError.  `structural_defect` reports the
protograph-level defect so callers can tell "retry another lift" apart
from "no lift can fix this".
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import gf2
from .lifting import QcMatrix, expand, lift_code
from .protograph import JointCode, serialize_code

LLR_CLIP = 50.0
_PHI_MIN = 1e-30
_PHI_MAX = 700.0


class FrameUnencodableError(RuntimeError):
    """The compressed bits violate the parity system's defect constraints."""


class SingularParityError(RuntimeError):
    """Parity sub-block singular though the protograph pattern is full rank;
    retrying with fresh lift seeds did not help."""


@dataclass
class Frame:
    """One simulation trial's vectors and decoder outcome."""

    s: np.ndarray
    u: np.ndarray
    p: Optional[np.ndarray]
    transmitted: np.ndarray
    received: Optional[np.ndarray] = None
    s_hat: Optional[np.ndarray] = None
    iterations: int = 0
    converged: bool = False


def proto_parity_defect(code: JointCode) -> int:
    """GF(2) rank defect of the channel parity pattern taken mod 2.

    A positive defect makes the lifted parity sub-block singular for every
    lift that preserves per-cell row/column multiplicities.
    """
    pattern = (code.channel.entries[:, : code.m_c] % 2).astype(np.uint8)
    m = pattern.copy()
    rank = 0
    for col in range(m.shape[1]):
        rows = np.nonzero(m[rank:, col])[0]
        if rows.size == 0:
            continue
        pivot = rank + rows[0]
        m[[rank, pivot]] = m[[pivot, rank]]
        flip = np.nonzero(m[:, col])[0]
        flip = flip[flip != rank]
        m[flip] ^= m[rank]
        rank += 1
        if rank == m.shape[0]:
            break
    return m.shape[0] - rank


def _cache_dir() -> Optional[Path]:
    env = os.environ.get("DPJSCC_CACHE")
    if env == "":
        return None
    path = Path(env) if env else Path.home() / ".cache" / "dpjscc"
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError:
        return None
    return path


class ChannelSolver:
    """Factored GF(2) solve of parity bits given compressed bits.

    Exposes `defect` (instance rank defect), `consistent(rhs)`, and
    `solve(rhs)` returning the canonical solution with free bits zero.
    """

    def __init__(self, a_shifts: np.ndarray, z2: int, cache_key: Optional[str] = None):
        n = a_shifts.shape[0] * z2
        self._n = n
        loaded = self._load(cache_key, n)
        if loaded is not None:
            return
        try:
            polys = gf2.circulant_block_inverse(a_shifts, z2)
            self.r_packed = gf2.circulant_grid_to_packed(polys, z2)
            self.pivot_cols = np.arange(n)
            self.pivot_rows = np.arange(n)
            self.null_rows = np.empty(0, dtype=np.int64)
        except (gf2.RingStallError, gf2.SingularMatrixError):
            from .lifting import expand_shifts

            dense = expand_shifts(a_shifts, z2).toarray()
            self.r_packed, self.pivot_cols, self.pivot_rows, self.null_rows = (
                gf2.gf2_solve_factor(dense)
            )
        self._store(cache_key)

    @property
    def defect(self) -> int:
        return int(self.null_rows.size)

    def _load(self, key, n) -> Optional[bool]:
        cache = _cache_dir()
        if cache is None or key is None:
            return None
        path = cache / f"solver-{key}.npz"
        if not path.exists():
            return None
        try:
            data = np.load(path)
            if data["n"] != n:
                return None
            self.r_packed = data["r_packed"]
            self.pivot_cols = data["pivot_cols"]
            self.pivot_rows = data["pivot_rows"]
            self.null_rows = data["null_rows"]
            return True
        except Exception:
            return None

    def _store(self, key) -> None:
        cache = _cache_dir()
        if cache is None or key is None:
            return
        try:
            np.savez(
                cache / f"solver-{key}.npz",
                n=self._n,
                r_packed=self.r_packed,
                pivot_cols=self.pivot_cols,
                pivot_rows=self.pivot_rows,
                null_rows=self.null_rows,
            )
        except OSError:
            pass

    def consistent(self, rhs: np.ndarray) -> bool:
        if self.null_rows.size == 0:
            return True
        z = gf2.gf2_matvec_packed(self.r_packed[self.null_rows], rhs)
        return not z.any()

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        z = gf2.gf2_matvec_packed(self.r_packed, rhs)
        if self.null_rows.size and z[self.null_rows].any():
            raise FrameUnencodableError(
                "compressed bits violate the parity defect constraints"
            )
        p = np.zeros(self._n, dtype=np.uint8)
        p[self.pivot_cols] = z[self.pivot_rows]
        return p


class Codec:
    """Everything needed to run frames through one lifted code."""

    def __init__(self, qc: QcMatrix):
        self.qc = qc
        code = qc.code
        self.code = code
        z1, z2 = qc.z1, qc.z2
        self.z1, self.z2 = z1, z2
        self.n_source = code.n_s * z1 * z2
        self.n_compressed = code.m_s * z1 * z2
        self.n_parity = code.m_c * z1 * z2
        self.n_channel = code.n_c * z1 * z2
        self.n_vars = self.n_source + self.n_channel
        self.prior_llr = math.log((1.0 - code.p1) / code.p1)
        self.structural_defect = proto_parity_defect(code)

        shifts = qc.shifts
        s_rows = code.m_s * z1
        c0 = code.n_s * z1
        t0 = (code.n_s + code.m_c) * z1
        # per compressed group j: (source group, shift) and (compressed group, shift)
        self._src_terms = []
        self._link_terms = []
        for j in range(s_rows):
            row = shifts[j]
            self._src_terms.append(
                [(i, int(row[i])) for i in range(code.n_s * z1) if row[i] >= 0]
            )
            self._link_terms.append(
                [
                    (k, int(row[t0 + k]))
                    for k in range(s_rows)
                    if k != j and row[t0 + k] >= 0
                ]
            )
        self._group_order = (
            range(s_rows) if code.link.orientation == "lower" else range(s_rows - 1, -1, -1)
        )
        # channel-check rows: terms over parity groups and compressed groups
        self._chan_parity_terms = []
        self._chan_u_terms = []
        for r in range(code.m_c * z1):
            row = shifts[s_rows + r]
            self._chan_parity_terms.append(
                [(k, int(row[c0 + k])) for k in range(code.m_c * z1) if row[c0 + k] >= 0]
            )
            self._chan_u_terms.append(
                [(k, int(row[t0 + k])) for k in range(code.m_s * z1) if row[t0 + k] >= 0]
            )

        key_material = (
            serialize_code(code) + f"|z1={z1}|z2={z2}|seed={qc.seed}|"
        ).encode() + shifts.tobytes()
        self._cache_key = hashlib.sha256(key_material).hexdigest()[:20]
        self._a_shifts = shifts[s_rows:, c0:c0 + code.m_c * z1]
        self._bu_shifts = shifts[s_rows:, t0:]
        self._solver = None
        self._conditioner = None

        h = expand(qc).tocsr()
        self._edge_var = h.indices.astype(np.int64)
        self._check_ptr = h.indptr.astype(np.int64)
        self._n_checks = h.shape[0]
        self._edge_check = np.repeat(
            np.arange(self._n_checks), np.diff(self._check_ptr)
        )
        # transmitted channel proto-columns, in order
        self.sent_cols = [j - 1 for j in code.transmitted_columns()]
        self.n_sent = len(self.sent_cols) * z1 * z2

    @property
    def solver(self) -> ChannelSolver:
        """Factored parity solver, built on first use (reference-codeword
        simulation never solves for parity, so construction is deferred)."""
        if self._solver is None:
            self._solver = ChannelSolver(self._a_shifts, self.z2, self._cache_key)
        return self._solver

    # --- source compression ---------------------------------------------------

    def _groups(self, bits, count):
        return np.asarray(bits, dtype=np.uint8).reshape(count, self.z2)

    def encode_source(self, s: np.ndarray) -> np.ndarray:
        """Compressed bits via triangular back-substitution (group by group)."""
        sg = self._groups(s, self.code.n_s * self.z1)
        u = np.zeros((self.code.m_s * self.z1, self.z2), dtype=np.uint8)
        for j in self._group_order:
            acc = np.zeros(self.z2, dtype=np.uint8)
            for i, h in self._src_terms[j]:
                acc ^= np.roll(sg[i], -h)
            for k, h in self._link_terms[j]:
                acc ^= np.roll(u[k], -h)
            u[j] = acc
        return u.ravel()

    def encode_source_traditional(self, s: np.ndarray) -> np.ndarray:
        """Fully parallel variant: valid only when the linking block is the
        identity (no cross-group terms)."""
        sg = self._groups(s, self.code.n_s * self.z1)
        u = np.zeros((self.code.m_s * self.z1, self.z2), dtype=np.uint8)
        for j in range(self.code.m_s * self.z1):
            acc = np.zeros(self.z2, dtype=np.uint8)
            for i, h in self._src_terms[j]:
                acc ^= np.roll(sg[i], -h)
            u[j] = acc
        return u.ravel()

    # --- channel code -----------------------------------------------------------

    def _channel_rhs(self, u: np.ndarray) -> np.ndarray:
        ug = self._groups(u, self.code.m_s * self.z1)
        rhs = np.zeros((self.code.m_c * self.z1, self.z2), dtype=np.uint8)
        for r, terms in enumerate(self._chan_u_terms):
            for k, h in terms:
                rhs[r] ^= np.roll(ug[k], -h)
        return rhs.ravel()

    def consistent(self, u: np.ndarray) -> bool:
        return self.solver.consistent(self._channel_rhs(u))

    def encode_channel(self, u: np.ndarray) -> np.ndarray:
        """Parity bits solving the channel checks for the given compressed
        bits.  Raises FrameUnencodableError when the defect constraints are
        violated (possible only when the parity pattern is rank-deficient)."""
        return self.solver.solve(self._channel_rhs(u))

    def compress_transpose(self, c: np.ndarray) -> np.ndarray:
        """Transpose of the source-compression map: returns w with
        w . s = c . encode_source(s) for every s (all over GF(2))."""
        cg = self._groups(c, self.code.m_s * self.z1).copy()
        n_groups = self.code.m_s * self.z1
        rev_link = [[] for _ in range(n_groups)]
        for j, terms in enumerate(self._link_terms):
            for k, h in terms:
                rev_link[k].append((j, h))
        v = np.zeros_like(cg)
        for k in reversed(list(self._group_order)):
            acc = cg[k].copy()
            for j, h in rev_link[k]:
                acc ^= np.roll(v[j], h)
            v[k] = acc
        w = np.zeros((self.code.n_s * self.z1, self.z2), dtype=np.uint8)
        for j, terms in enumerate(self._src_terms):
            for i, h in terms:
                w[i] ^= np.roll(v[j], h)
        return w.ravel()

    def sample_encodable_source(self, rng: np.random.Generator) -> np.ndarray:
        """Bernoulli(p1) source guaranteed channel-consistent.

        When the parity system has a rank defect, each defect constraint is
        a linear functional of the source bits; a handful of pinned source
        positions (one per independent functional) are solved instead of
        drawn, leaving every other bit Bernoulli."""
        s = (rng.random(self.n_source) < self.code.p1).astype(np.uint8)
        if self.solver.defect == 0:
            return s
        if self._conditioner is None:
            self._conditioner = _SourceConditioner(self)
        return self._conditioner.condition(s)

    # --- modulation and LLR -----------------------------------------------------

    def assemble_and_modulate(self, s, u, p) -> np.ndarray:
        """BPSK symbols of the transmitted channel columns ([parity | compressed]
        by proto column, punctured columns omitted); source bits never leave
        the encoder."""
        zz = self.z1 * self.z2
        c = np.concatenate([np.asarray(p, dtype=np.uint8), np.asarray(u, dtype=np.uint8)])
        pieces = [c[col * zz:(col + 1) * zz] for col in self.sent_cols]
        bits = np.concatenate(pieces) if pieces else np.empty(0, dtype=np.uint8)
        return 1.0 - 2.0 * bits.astype(np.float64)

    def channel_llr(self, received: np.ndarray, esn0_db: float) -> np.ndarray:
        """Per-variable LLRs: AWGN LLRs on transmitted positions, zero on
        punctured ones, the constant source prior on source positions."""
        zz = self.z1 * self.z2
        sigma2 = 1.0 / (2.0 * 10.0 ** (esn0_db / 10.0))
        llr = np.zeros(self.n_vars, dtype=np.float64)
        llr[: self.n_source] = min(self.prior_llr, LLR_CLIP)
        ch = np.clip(2.0 * np.asarray(received, dtype=np.float64) / sigma2,
                     -LLR_CLIP, LLR_CLIP)
        for idx, col in enumerate(self.sent_cols):
            llr[self.n_source + col * zz: self.n_source + (col + 1) * zz] = (
                ch[idx * zz:(idx + 1) * zz]
            )
        return llr

    # --- decoding ---------------------------------------------------------------

    @staticmethod
    def _phi(x: np.ndarray) -> np.ndarray:
        return np.log1p(2.0 / np.expm1(np.clip(x, _PHI_MIN, _PHI_MAX)))

    def decode(self, llr: np.ndarray, i_max: int = 200):
        """Flooding sum-product BP over the full joint graph.

        Returns (s_hat, iterations, converged); stops early as soon as the
        hard decision satisfies every check (checked before the first
        iteration as well)."""
        ev = self._edge_var
        ptr = self._check_ptr
        c2v = np.zeros(ev.size, dtype=np.float64)
        posterior = llr.astype(np.float64)

        def syndrome_ok(post):
            bits = (post < 0).astype(np.int64)
            sums = np.add.reduceat(bits[ev], ptr[:-1])
            return not (sums & 1).any()

        converged = syndrome_ok(posterior)
        iterations = 0
        row_idx = self._edge_check
        while not converged and iterations < i_max:
            v2c = posterior[ev] - c2v
            mag = self._phi(np.abs(v2c))
            neg = (v2c < 0).astype(np.int64)
            row_mag = np.add.reduceat(mag, ptr[:-1])
            row_neg = np.add.reduceat(neg, ptr[:-1])
            ext_mag = self._phi(np.maximum(row_mag[row_idx] - mag, 0.0))
            ext_sign = 1.0 - 2.0 * ((row_neg[row_idx] - neg) & 1)
            c2v = ext_sign * ext_mag
            posterior = llr + np.bincount(ev, weights=c2v, minlength=self.n_vars)
            iterations += 1
            converged = syndrome_ok(posterior)
        s_hat = (posterior[: self.n_source] < 0).astype(np.uint8)
        return s_hat, iterations, converged


class _SourceConditioner:
    """Maps Bernoulli draws onto channel-consistent sources.

    Each independent parity-defect constraint is a linear functional of the
    source bits (consistency row composed with the compression map's
    transpose).  One pinned source position per functional is solved
    instead of drawn; all other bits keep their Bernoulli values.
    """

    def __init__(self, codec: Codec):
        from .lifting import expand_shifts

        solver = codec.solver
        self.codec = codec
        y_bits = gf2.unpack_rows(
            solver.r_packed[solver.null_rows], codec.n_parity
        ).astype(np.int64)
        bu = expand_shifts(codec._bu_shifts, codec.z2).tocsr()
        c_all = (bu.T.dot(y_bits.T)).T % 2
        c_all = np.asarray(c_all, dtype=np.uint8)
        self.c_rows = c_all[c_all.any(axis=1)]
        d = self.c_rows.shape[0]
        self.pins = np.empty(0, dtype=np.int64)
        self.rank = 0
        if d == 0:
            self.w = np.eye(0, dtype=np.uint8)
            return
        g = np.array(
            [codec.compress_transpose(row) for row in self.c_rows], dtype=np.uint8
        )
        aug = np.hstack([g, np.eye(d, dtype=np.uint8)])
        pins = []
        rank = 0
        for col in range(codec.n_source):
            rows = np.nonzero(aug[rank:, col])[0]
            if rows.size == 0:
                continue
            p = rank + rows[0]
            aug[[rank, p]] = aug[[p, rank]]
            flip = np.nonzero(aug[:, col])[0]
            flip = flip[flip != rank]
            if flip.size:
                aug[flip] ^= aug[rank]
            pins.append(col)
            rank += 1
            if rank == d:
                break
        self.pins = np.array(pins, dtype=np.int64)
        self.w = aug[:, codec.n_source:]
        self.rank = rank

    def condition(self, s: np.ndarray) -> np.ndarray:
        if self.c_rows.shape[0] == 0:
            return s
        s = s.copy()
        s[self.pins] = 0
        u0 = self.codec.encode_source(s).astype(np.int64)
        r = (self.c_rows.astype(np.int64) @ u0) % 2
        beta = (self.w.astype(np.int64) @ r) % 2
        s[self.pins] = beta[: self.rank].astype(np.uint8)
        return s


_CODECS: dict = {}


def codec_for(qc: QcMatrix) -> Codec:
    key = id(qc)
    entry = _CODECS.get(key)
    if entry is None or entry[0] is not qc:
        entry = (qc, Codec(qc))
        _CODECS[key] = entry
    return entry[1]


def encode_source(s, qc: QcMatrix):
    return codec_for(qc).encode_source(s)


def encode_source_traditional(s, qc: QcMatrix):
    return codec_for(qc).encode_source_traditional(s)


def encode_channel(u, qc: QcMatrix):
    return codec_for(qc).encode_channel(u)


def assemble_and_modulate(s, u, p, qc: QcMatrix):
    return codec_for(qc).assemble_and_modulate(s, u, p)


def channel_llr(received, esn0_db, qc: QcMatrix):
    return codec_for(qc).channel_llr(received, esn0_db)


def decode_joint(llr, qc: QcMatrix, i_max: int = 200):
    return codec_for(qc).decode(llr, i_max)


def prepare(
    code: JointCode,
    z1: int,
    z2: int,
    seed: int = 0,
    attempts: int = 200,
    relift_retries: int = 10,
) -> Codec:
    """Lift a code and build its codec.

    If the parity pattern is full rank mod 2 but the drawn lift happens to
    be singular, retries with fresh seeds before failing loudly.  A
    rank-deficient pattern skips the retries (no lift can fix it) and uses
    the defect-aware solver.
    """
    if proto_parity_defect(code) > 0:
        return codec_for(lift_code(code, z1, z2, seed, attempts))
    last = None
    for trial in range(relift_retries + 1):
        qc = lift_code(code, z1, z2, seed + trial, attempts)
        codec = codec_for(qc)
        if codec.solver.defect == 0:
            return codec
        last = trial
    raise SingularParityError(
        f"parity sub-block singular for {relift_retries + 1} lift seeds starting at {seed}"
    )
