"""Monte Carlo source-symbol-error-rate simulation.

Protocol per point: draw a Bernoulli source, run it through the full
encode / BPSK / AWGN / LLR / joint-BP chain, compare decoded source bits,
and stop once (i) more than `max_frames` frames have run or (ii) more than
`target_error_frames` error frames have been seen and at least `min_frames`
frames have run.  An error frame is any frame with at least one source-bit
error.

Two frame protocols are available.  `real` encodes every frame explicitly
(requires an invertible parity system).  `reference` transmits the
reference codeword and flips the source-prior signs by the drawn source
bits, which simulates the decoder-referenced system exactly and works for
codes whose parity pattern is structurally rank-deficient (such codes
cannot encode arbitrary sources, yet their published error curves exist;
this is the standard methodology that produces them).  `auto` picks `real`
when the parity pattern is full rank mod 2, `reference` otherwise.

Every frame draws from its own counter-based substream of the master seed,
so results are bit-identical regardless of worker count or chunking.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .codec import Codec, prepare
from .protograph import JointCode

CSV_COLUMNS = [
    "code_id", "esn0_db", "frames", "source_bits", "bit_errors", "error_frames",
    "sser", "fer", "mean_iters", "stop_reason", "lift_seed", "sim_seed",
]


class ResumeMismatchError(RuntimeError):
    """An existing results file was produced with different settings."""


@dataclass
class SimConfig:
    code: JointCode
    z1: int = 4
    z2: int = 800
    esn0_grid_db: list = field(default_factory=list)
    i_max: int = 200
    max_frames: int = 200000
    target_error_frames: int = 100
    min_frames: int = 5000
    master_seed: int = 0
    lift_seed: int = 0
    lift_attempts: int = 200
    mode: str = "auto"  # real | reference | auto
    workers: Optional[int] = None
    code_id: str = ""

    def __post_init__(self):
        if self.mode not in ("real", "reference", "auto"):
            raise ValueError(f"unknown simulation mode {self.mode!r}")
        if self.max_frames < 1 or self.target_error_frames < 1 or self.min_frames < 1:
            raise ValueError("frame counts must be positive")
        if not self.code_id:
            self.code_id = self.code.name or "code"

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return max(1, int(self.workers))
        return max(1, int(os.environ.get("JSCC_WORKERS", "1")))


@dataclass
class SimPoint:
    esn0_db: float
    frames: int
    source_bits: int
    bit_errors: int
    error_frames: int
    sser: float
    fer: float
    mean_iters: float
    stop_reason: str  # frames-cap | error-target


def gen_source(p1: float, n_bits: int, stream: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli(p1) bits from a per-frame substream."""
    if not 0.0 <= p1 < 1.0:
        raise ValueError(f"p1 must lie in [0, 1), got {p1}")
    return (stream.random(n_bits) < p1).astype(np.uint8)


def frame_stream(master_seed: int, frame_index: int) -> np.random.Generator:
    """Counter-based substream: identical across runs and worker layouts."""
    return np.random.default_rng([master_seed, frame_index])


def _resolve_mode(mode: str, codec: Codec) -> str:
    if mode == "auto":
        return "real" if codec.structural_defect == 0 else "reference"
    return mode


def run_frame(codec: Codec, esn0_db: float, master_seed: int, frame_index: int,
              mode: str, i_max: int):
    """One trial; returns (bit_errors, iterations, converged)."""
    rng = frame_stream(master_seed, frame_index)
    sigma = math.sqrt(1.0 / (2.0 * 10.0 ** (esn0_db / 10.0)))
    if mode == "real":
        s = gen_source(codec.code.p1, codec.n_source, rng)
        u = codec.encode_source(s)
        p = codec.encode_channel(u)
        tx = codec.assemble_and_modulate(s, u, p)
        received = tx + sigma * rng.standard_normal(tx.size)
        llr = codec.channel_llr(received, esn0_db)
        s_hat, iters, conv = codec.decode(llr, i_max)
        errors = int((s_hat != s).sum())
    else:
        s = gen_source(codec.code.p1, codec.n_source, rng)
        received = 1.0 + sigma * rng.standard_normal(codec.n_sent)
        llr = codec.channel_llr(received, esn0_db)
        llr[: codec.n_source] *= 1.0 - 2.0 * s.astype(np.float64)
        s_hat, iters, conv = codec.decode(llr, i_max)
        errors = int(s_hat.sum())  # decisions relative to the reference word
    return errors, iters, conv


_WORKER_STATE: dict = {}


def _worker_frame(args):
    codec = _WORKER_STATE["codec"]
    esn0_db, master_seed, idx, mode, i_max = args
    return idx, run_frame(codec, esn0_db, master_seed, idx, mode, i_max)


def run_point(config: SimConfig, esn0_db: float, codec: Optional[Codec] = None) -> SimPoint:
    """Simulate one Es/N0 point under the stopping rule.

    The rule is evaluated on frames in index order, so results do not
    depend on worker count; frames past the stopping index are discarded.
    """
    if codec is None:
        codec = prepare(config.code, config.z1, config.z2,
                        config.lift_seed, config.lift_attempts)
    mode = _resolve_mode(config.mode, codec)
    workers = config.resolved_workers()

    frames = 0
    bit_errors = 0
    error_frames = 0
    iters_total = 0
    stop_reason = None

    def commit(result):
        nonlocal frames, bit_errors, error_frames, iters_total, stop_reason
        errors, iters, _ = result
        frames += 1
        bit_errors += errors
        error_frames += int(errors > 0)
        iters_total += iters
        if error_frames >= config.target_error_frames + 1 and frames >= config.min_frames:
            stop_reason = "error-target"
        elif frames >= config.max_frames + 1:
            stop_reason = "frames-cap"
        return stop_reason is None

    if workers == 1:
        idx = 0
        while stop_reason is None:
            commit(run_frame(codec, esn0_db, config.master_seed, idx, mode, config.i_max))
            idx += 1
    else:
        _WORKER_STATE["codec"] = codec
        chunk = max(8, 4 * workers)
        start = 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            while stop_reason is None:
                args = [
                    (esn0_db, config.master_seed, i, mode, config.i_max)
                    for i in range(start, start + chunk)
                ]
                results = dict(pool.map(_worker_frame, args))
                for i in range(start, start + chunk):
                    if not commit(results[i]):
                        break
                start += chunk

    return SimPoint(
        esn0_db=esn0_db,
        frames=frames,
        source_bits=frames * codec.n_source,
        bit_errors=bit_errors,
        error_frames=error_frames,
        sser=bit_errors / (frames * codec.n_source),
        fer=error_frames / frames,
        mean_iters=iters_total / frames,
        stop_reason=stop_reason,
    )


def _point_row(config: SimConfig, point: SimPoint) -> dict:
    return {
        "code_id": config.code_id,
        "esn0_db": repr(float(point.esn0_db)),
        "frames": point.frames,
        "source_bits": point.source_bits,
        "bit_errors": point.bit_errors,
        "error_frames": point.error_frames,
        "sser": repr(point.sser),
        "fer": repr(point.fer),
        "mean_iters": repr(point.mean_iters),
        "stop_reason": point.stop_reason,
        "lift_seed": config.lift_seed,
        "sim_seed": config.master_seed,
    }


def _load_completed(path: Path, config: SimConfig) -> dict:
    done = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ResumeMismatchError(f"{path}: unexpected columns {reader.fieldnames}")
        for row in reader:
            if (
                row["code_id"] != config.code_id
                or int(row["lift_seed"]) != config.lift_seed
                or int(row["sim_seed"]) != config.master_seed
            ):
                raise ResumeMismatchError(
                    f"{path}: rows belong to a different code or seed"
                )
            done[float(row["esn0_db"])] = row
    return done


def run_sweep(config: SimConfig, out_csv=None) -> list:
    """One SimPoint per grid value; rows stream to CSV as they finish,
    so an interrupted sweep resumes (same seeds required)."""
    if not config.esn0_grid_db:
        raise ValueError("empty Es/N0 grid")
    codec = prepare(config.code, config.z1, config.z2,
                    config.lift_seed, config.lift_attempts)

    done = {}
    path = Path(out_csv) if out_csv is not None else None
    if path is not None and path.exists():
        done = _load_completed(path, config)
    fh = None
    writer = None
    if path is not None:
        fresh = not path.exists()
        fh = open(path, "a", encoding="utf-8", newline="")
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        if fresh:
            writer.writeheader()
            fh.flush()

    points = []
    try:
        for esn0 in config.esn0_grid_db:
            if float(esn0) in done:
                row = done[float(esn0)]
                points.append(
                    SimPoint(
                        esn0_db=float(row["esn0_db"]),
                        frames=int(row["frames"]),
                        source_bits=int(row["source_bits"]),
                        bit_errors=int(row["bit_errors"]),
                        error_frames=int(row["error_frames"]),
                        sser=float(row["sser"]),
                        fer=float(row["fer"]),
                        mean_iters=float(row["mean_iters"]),
                        stop_reason=row["stop_reason"],
                    )
                )
                continue
            point = run_point(config, float(esn0), codec)
            points.append(point)
            if writer is not None:
                writer.writerow(_point_row(config, point))
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
    return points
