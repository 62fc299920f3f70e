"""Two-stage lifting of joint protomatrices to quasi-cyclic parity-check form.

Stage one replaces every protograph cell of value b by a z1 x z1 sum of b
distinct circulant permutations, chosen greedily to keep short cycles out
of the small binary base matrix; diagonal cells of the triangular linking
block are pinned to the identity so back-substitution encoding stays valid.

Stage two assigns each surviving 1 a circulant shift in [0, z2); a cycle
of the base matrix survives expansion iff its alternating shift sum is
0 mod z2, so candidates are scored by surviving short cycles and the best
of `attempts` seeded draws is kept.  Shift h expands to the z2 x z2
identity cyclically right-shifted by h columns; -1 marks a zero block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import sparse

from .protograph import JointCode, assemble_joint

ACYCLIC = math.inf


class LiftError(RuntimeError):
    """Lifting preconditions violated (e.g. z1 below the largest entry)."""


class GirthError(LiftError):
    """No shift assignment reached the target girth within the attempt budget."""


@dataclass(frozen=True, eq=False)
class BinaryBaseMatrix:
    """0/1 matrix from the first lift, plus its protograph bookkeeping."""

    code: JointCode
    z1: int
    grid: np.ndarray  # (rows*z1, cols*z1) uint8

    def __post_init__(self):
        self.grid.flags.writeable = False

    @property
    def rows(self) -> int:
        return self.grid.shape[0]

    @property
    def cols(self) -> int:
        return self.grid.shape[1]

    def proto_cell(self, i: int, j: int) -> tuple:
        return i // self.z1, j // self.z1

    def t_diag_entries(self):
        """Base-matrix positions of the lifted linking-block diagonal."""
        off = (self.code.n_s + self.code.m_c) * self.z1
        return [(i, off + i) for i in range(self.code.m_s * self.z1)]


@dataclass(frozen=True, eq=False)
class QcMatrix:
    """Circulant-shift grid over a BinaryBaseMatrix."""

    base: BinaryBaseMatrix
    z2: int
    shifts: np.ndarray  # int32, -1 where the base matrix is 0
    girth: float        # exact girth of the expanded graph (ACYCLIC if none)
    seed: int

    def __post_init__(self):
        self.shifts.flags.writeable = False

    @property
    def code(self) -> JointCode:
        return self.base.code

    @property
    def z1(self) -> int:
        return self.base.z1


def _bfs_shortest_cycle_through(adj_r, adj_c, row: int, col: int, cap: int = 16):
    """Length of the shortest cycle using edge (row, col), assuming the edge
    is present; equals 1 + the shortest alternative path col -> row."""
    # BFS from the column node over the bipartite graph, skipping the direct edge
    dist = {("c", col): 0}
    frontier = [("c", col)]
    d = 0
    while frontier and d < cap:
        nxt = []
        for side, node in frontier:
            if side == "c":
                for r in adj_c[node]:
                    if node == col and r == row:
                        continue  # the edge itself
                    key = ("r", r)
                    if key not in dist:
                        dist[key] = d + 1
                        if r == row:
                            return d + 2  # path length d+1 plus the edge
                        nxt.append(key)
            else:
                for c in adj_r[node]:
                    key = ("c", c)
                    if key not in dist:
                        dist[key] = d + 1
                        nxt.append(key)
        frontier = nxt
        d += 1
    return math.inf


def lift_peg(code: JointCode, z1: int, seed: int = 0) -> BinaryBaseMatrix:
    """First lift: spread each cell's b parallel edges over b distinct
    circulant offsets, greedily maximizing the shortest cycle through the
    newly placed edges.  Deterministic for a fixed seed."""
    proto = assemble_joint(code).entries
    if z1 < proto.max():
        raise LiftError(f"z1={z1} is below the largest protograph entry {proto.max()}")
    rng = np.random.default_rng(seed)
    n_rows, n_cols = proto.shape
    grid = np.zeros((n_rows * z1, n_cols * z1), dtype=np.uint8)
    adj_r = [set() for _ in range(n_rows * z1)]
    adj_c = [set() for _ in range(n_cols * z1)]
    diag_cells = {(i, code.n_s + code.m_c + i) for i in range(code.m_s)}

    def place(r, c, offset):
        for k in range(z1):
            rr, cc = r * z1 + k, c * z1 + (k + offset) % z1
            grid[rr, cc] = 1
            adj_r[rr].add(cc)
            adj_c[cc].add(rr)

    def remove(r, c, offset):
        for k in range(z1):
            rr, cc = r * z1 + k, c * z1 + (k + offset) % z1
            grid[rr, cc] = 0
            adj_r[rr].discard(cc)
            adj_c[cc].discard(rr)

    def min_cycle_with(r, c, offset):
        place(r, c, offset)
        worst = math.inf
        for k in range(z1):
            rr, cc = r * z1 + k, c * z1 + (k + offset) % z1
            worst = min(worst, _bfs_shortest_cycle_through(adj_r, adj_c, rr, cc))
            if worst == 4:
                break
        remove(r, c, offset)
        return worst

    for r in range(n_rows):
        for c in range(n_cols):
            b = int(proto[r, c])
            if b == 0:
                continue
            if (r, c) in diag_cells:
                place(r, c, 0)
                continue
            taken = []
            for _ in range(b):
                candidates = [o for o in range(z1) if o not in taken]
                rng.shuffle(candidates)
                best = max(candidates, key=lambda o: min_cycle_with(r, c, o))
                taken.append(best)
                place(r, c, best)
    return BinaryBaseMatrix(code, z1, grid)


# --- cycle templates of the binary base matrix -------------------------------

def _cycle_templates(grid: np.ndarray, cap8: int = 400000):
    """Edge-index sequences of simple 4-, 6-, and 8-cycles.

    Each template lists its edges in traversal order, so a cycle survives
    quasi-cyclic expansion iff the alternating sum of its edge shifts is
    0 mod z2.  The 8-cycle list is truncated at `cap8` (then only used
    opportunistically for ranking).
    """
    n_rows, n_cols = grid.shape
    eid = -np.ones(grid.shape, dtype=np.int64)
    rr, cc = np.nonzero(grid)
    eid[rr, cc] = np.arange(rr.size)
    row_cols = [np.nonzero(grid[r])[0] for r in range(n_rows)]
    common = {}
    for r1, r2 in combinations(range(n_rows), 2):
        shared = np.intersect1d(row_cols[r1], row_cols[r2], assume_unique=True)
        if shared.size:
            common[(r1, r2)] = shared

    def shared_cols(a, b):
        return common.get((a, b) if a < b else (b, a), ())

    four = []
    for (r1, r2), cols in common.items():
        for c1, c2 in combinations(cols, 2):
            four.append((eid[r1, c1], eid[r2, c1], eid[r2, c2], eid[r1, c2]))

    six = []
    for r1, r2, r3 in combinations(range(n_rows), 3):
        ab, bc, ca = shared_cols(r1, r2), shared_cols(r2, r3), shared_cols(r1, r3)
        if len(ab) == 0 or len(bc) == 0 or len(ca) == 0:
            continue
        for c1 in ab:
            for c2 in bc:
                if c2 == c1:
                    continue
                for c3 in ca:
                    if c3 == c1 or c3 == c2:
                        continue
                    six.append(
                        (eid[r1, c1], eid[r2, c1], eid[r2, c2],
                         eid[r3, c2], eid[r3, c3], eid[r1, c3])
                    )

    eight = []

    def collect_eight():
        for q0, q1, q2, q3 in combinations(range(n_rows), 4):
            for a, b, c, d in ((q0, q1, q2, q3), (q0, q1, q3, q2), (q0, q2, q1, q3)):
                pools = (
                    shared_cols(a, b), shared_cols(b, c), shared_cols(c, d), shared_cols(d, a)
                )
                if any(len(p) == 0 for p in pools):
                    continue
                for w in pools[0]:
                    for x in pools[1]:
                        if x == w:
                            continue
                        for y in pools[2]:
                            if y == w or y == x:
                                continue
                            for z in pools[3]:
                                if z == w or z == x or z == y:
                                    continue
                                eight.append(
                                    (eid[a, w], eid[b, w], eid[b, x], eid[c, x],
                                     eid[c, y], eid[d, y], eid[d, z], eid[a, z])
                                )
                                if len(eight) >= cap8:
                                    return False
        return True

    full8 = collect_eight()
    to_arr = lambda lst, k: np.array(lst, dtype=np.int64).reshape(-1, k)
    return to_arr(four, 4), to_arr(six, 6), to_arr(eight, 8), full8


_SIGNS = {k: np.array([1, -1] * (k // 2), dtype=np.int64) for k in (4, 6, 8)}


def _alt_sums(shifts: np.ndarray, templates: np.ndarray) -> np.ndarray:
    k = templates.shape[1]
    return shifts[templates] @ _SIGNS[k]


def lift_qc(base: BinaryBaseMatrix, z2: int, seed: int = 0, attempts: int = 200) -> QcMatrix:
    """Second lift: pick circulant shifts maximizing the expanded girth.

    Each attempt draws random shifts (linking-diagonal entries pinned to 0),
    greedily repairs surviving 4-cycles, and is ranked by (girth class,
    surviving-cycle count at that class, attempt index).  Raises GirthError
    if no attempt clears girth 6.
    """
    if z2 < 2:
        raise LiftError(f"z2 must be at least 2, got {z2}")
    grid = base.grid
    rr, cc = np.nonzero(grid)
    n_edges = rr.size
    eid = -np.ones(grid.shape, dtype=np.int64)
    eid[rr, cc] = np.arange(n_edges)
    pinned = np.zeros(n_edges, dtype=bool)
    for (i, j) in base.t_diag_entries():
        pinned[eid[i, j]] = True

    four, six, eight, full8 = _cycle_templates(grid)
    free_in_four = [np.array([e for e in t if not pinned[e]]) for t in four]

    best = None  # (class_rank, survivors, attempt, shifts)
    for attempt in range(attempts):
        rng = np.random.default_rng([seed, attempt])
        shifts = rng.integers(0, z2, size=n_edges, dtype=np.int64)
        shifts[pinned] = 0
        for _ in range(30):
            alive = np.nonzero(_alt_sums(shifts, four) % z2 == 0)[0] if four.size else []
            if len(alive) == 0:
                break
            for t_idx in alive:
                frees = free_in_four[t_idx]
                if frees.size == 0:
                    continue
                shifts[rng.choice(frees)] = rng.integers(0, z2)
        s4 = int(np.count_nonzero(_alt_sums(shifts, four) % z2 == 0)) if four.size else 0
        s6 = int(np.count_nonzero(_alt_sums(shifts, six) % z2 == 0)) if six.size else 0
        if s4:
            rank = (0, s4)
        elif s6:
            rank = (1, s6)
        else:
            s8 = 0
            if eight.size:
                s8 = int(np.count_nonzero(_alt_sums(shifts, eight) % z2 == 0))
            if four.size and z2 % 2 == 0:
                alt4 = _alt_sums(shifts, four) % z2
                s8 += int(np.count_nonzero(alt4 == z2 // 2))  # 4-cycles traversed twice
            rank = (2, s8 if full8 else 0)
        key = (-rank[0], rank[1], attempt)
        if best is None or key < best[0]:
            best = (key, shifts.copy())

    (neg_class, _, _), shifts = best
    if -neg_class < 1:
        raise GirthError(
            f"no shift assignment reached girth 6 in {attempts} attempts (z2={z2})"
        )
    grid_shifts = -np.ones(grid.shape, dtype=np.int32)
    grid_shifts[rr, cc] = shifts
    qc = QcMatrix(base, z2, grid_shifts, 0.0, seed)
    object.__setattr__(qc, "girth", qc_girth(qc))
    return qc


def lift_code(code: JointCode, z1: int, z2: int, seed: int = 0, attempts: int = 200) -> QcMatrix:
    """Convenience pipeline: first lift then quasi-cyclic lift."""
    return lift_qc(lift_peg(code, z1, seed), z2, seed, attempts)


def expand(qc: QcMatrix) -> sparse.csr_matrix:
    """Expanded binary parity-check matrix (each shift becomes a CPM)."""
    return expand_shifts(qc.shifts, qc.z2)


def expand_shifts(shifts: np.ndarray, z2: int) -> sparse.csr_matrix:
    """Expand a shift grid: entry h >= 0 becomes the identity cyclically
    right-shifted by h columns, -1 a zero block."""
    shifts = np.asarray(shifts)
    br, bc = np.nonzero(shifts >= 0)
    h = shifts[br, bc].astype(np.int64)
    k = np.arange(z2)
    rows = (br[:, None] * z2 + k[None, :]).ravel()
    cols = (bc[:, None] * z2 + (k[None, :] + h[:, None]) % z2).ravel()
    data = np.ones(rows.size, dtype=np.uint8)
    shape = (shifts.shape[0] * z2, shifts.shape[1] * z2)
    return sparse.csr_matrix((data, (rows, cols)), shape=shape)


def girth(matrix, sources=None):
    """Exact shortest-cycle length of a Tanner graph, or ACYCLIC.

    Truncated breadth-first search from every variable node (or from the
    given subset of variable-node indices); the first frontier collision
    at depth d certifies a cycle of length at most 2d, and scanning all
    sources makes the minimum exact.
    """
    h = sparse.csr_matrix(matrix)
    if h.nnz == 0:
        return ACYCLIC
    hc = h.tocsc()
    n_vars = h.shape[1]
    if sources is None:
        sources = range(n_vars)

    best = math.inf
    for src in sources:
        # node keys: checks 0..m-1, variables m..m+n-1
        var0 = h.shape[0]
        dist = {var0 + src: 0}
        parent = {var0 + src: -1}
        frontier = [var0 + src]
        depth = 0
        found = math.inf
        while frontier and math.isinf(found) and 2 * (depth + 1) < best:
            nxt = []
            for u in frontier:
                if u >= var0:
                    col = u - var0
                    nbrs = hc.indices[hc.indptr[col]:hc.indptr[col + 1]]
                    keys = nbrs
                else:
                    nbrs = h.indices[h.indptr[u]:h.indptr[u + 1]]
                    keys = nbrs + var0
                for key in keys:
                    if key == parent[u]:
                        continue
                    if key in dist:
                        found = min(found, dist[u] + dist[key] + 1)
                    else:
                        dist[key] = depth + 1
                        parent[key] = u
                        nxt.append(key)
            frontier = nxt
            depth += 1
        best = min(best, found)
        if best == 4:
            break
    return best if math.isfinite(best) else ACYCLIC


def qc_girth(qc: QcMatrix):
    """Exact expanded girth using circulant symmetry: one representative
    variable per block column suffices."""
    h = expand(qc)
    reps = [b * qc.z2 for b in range(qc.shifts.shape[1]) if (qc.shifts[:, b] >= 0).any()]
    return girth(h, sources=reps)


# --- persistence --------------------------------------------------------------

def save_qc(qc: QcMatrix, path) -> None:
    """Textual shift-grid file: header then one row of shifts per line."""
    with open(path, "w", encoding="utf-8") as fh:
        g = "acyclic" if math.isinf(qc.girth) else str(int(qc.girth))
        fh.write(f"z1 {qc.z1} z2 {qc.z2} rows {qc.shifts.shape[0]} "
                 f"cols {qc.shifts.shape[1]} girth {g} seed {qc.seed}\n")
        for row in qc.shifts:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def load_qc(path, code: JointCode) -> QcMatrix:
    """Rebuild a QcMatrix from its persistence file and its joint code."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.read().split("\n")
    fields = header[0].split()
    z1, z2 = int(fields[1]), int(fields[3])
    n_rows, n_cols = int(fields[5]), int(fields[7])
    girth_val = ACYCLIC if fields[9] == "acyclic" else float(int(fields[9]))
    seed = int(fields[11])
    shifts = np.array(
        [[int(v) for v in line.split()] for line in header[1:n_rows + 1]], dtype=np.int32
    )
    if shifts.shape != (n_rows, n_cols):
        raise LiftError(f"shift grid shape {shifts.shape} does not match header")
    grid = (shifts >= 0).astype(np.uint8)
    base = BinaryBaseMatrix(code, z1, grid)
    _validate_base(base)
    return QcMatrix(base, z2, shifts, girth_val, seed)


def _validate_base(base: BinaryBaseMatrix) -> None:
    proto = assemble_joint(base.code).entries
    z1 = base.z1
    for r in range(proto.shape[0]):
        for c in range(proto.shape[1]):
            block = base.grid[r * z1:(r + 1) * z1, c * z1:(c + 1) * z1]
            b = proto[r, c]
            if not ((block.sum(axis=0) == b).all() and (block.sum(axis=1) == b).all()):
                raise LiftError(f"block ({r},{c}) is not a sum of {b} disjoint permutations")
    for (i, j) in base.t_diag_entries():
        if base.grid[i, j] != 1:
            raise LiftError("lifted linking-block diagonal is not the identity")


def write_alist(matrix, path) -> None:
    """Export a binary parity-check matrix in alist format (1-based,
    zero-padded rows, variables first)."""
    h = sparse.csc_matrix(matrix)
    m, n = h.shape
    col_deg = np.diff(h.indptr)
    hr = h.tocsr()
    row_deg = np.diff(hr.indptr)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{n} {m}\n{col_deg.max()} {row_deg.max()}\n")
        fh.write(" ".join(map(str, col_deg)) + "\n")
        fh.write(" ".join(map(str, row_deg)) + "\n")
        for j in range(n):
            idx = h.indices[h.indptr[j]:h.indptr[j + 1]] + 1
            pad = [0] * (col_deg.max() - idx.size)
            fh.write(" ".join(map(str, list(idx) + pad)) + "\n")
        for i in range(m):
            idx = hr.indices[hr.indptr[i]:hr.indptr[i + 1]] + 1
            pad = [0] * (row_deg.max() - idx.size)
            fh.write(" ".join(map(str, list(idx) + pad)) + "\n")
