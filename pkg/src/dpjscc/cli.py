"""Command-line front end.

Subcommands: `codes list`, `lift`, `threshold`, `analyze`, `optimize`,
`simulate`.  Codes are referenced either by bundled id (see `codes list`)
or by path to a code-description JSON file.  Commands that write files
also write a `<out>.manifest.json` recording input hashes, seeds, and
output hashes, enough to reproduce the run byte for byte.

Es/N0 values are per transmitted symbol; designs with overall rate R are
often quoted per source symbol, 10*log10(R) lower.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, analysis, fixtures, optimize, sim
from .codec import prepare
from .exit_chart import channel_threshold, shannon_limit, source_symbol_scale_db
from .lifting import expand, lift_code, save_qc, write_alist
from .protograph import JointCode, code_rates, load_code, save_code, serialize_code


def _resolve_code(ref: str) -> JointCode:
    path = Path(ref)
    if path.exists():
        return load_code(path)
    try:
        return fixtures.load_fixture(ref)
    except KeyError:
        raise SystemExit(f"error: {ref!r} is neither a file nor a bundled code id")


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(subcommand: str, args: argparse.Namespace, inputs, outputs) -> None:
    if not outputs:
        return
    manifest = {
        "subcommand": subcommand,
        "tool_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "seeds": {
            name: getattr(args, name)
            for name in ("seed", "lift_seed", "attempts")
            if hasattr(args, name)
        },
        "inputs": {
            str(p): _sha256_file(Path(p)) for p in inputs if Path(p).exists()
        },
        "outputs": {str(p): _sha256_file(Path(p)) for p in outputs},
    }
    anchor = Path(outputs[0])
    path = anchor.with_name(anchor.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def _cmd_codes(args) -> int:
    if args.action != "list":
        raise SystemExit(f"error: unknown codes action {args.action!r}")
    print("id,p1,R,m_s,n_s,m_c,n_c,punctured,reference_threshold_db,z1,z2")
    for fid in fixtures.fixture_ids():
        code = fixtures.load_fixture(fid)
        meta = fixtures.fixture_meta(fid)
        rate = code_rates(code).overall
        punct = ";".join(str(j) for j in sorted(code.punctured))
        print(
            f"{fid},{code.p1},{rate},{code.m_s},{code.n_s},{code.m_c},{code.n_c},"
            f"{punct},{meta.get('reference_threshold_db', '')},"
            f"{meta.get('z1', '')},{meta.get('z2', '')}"
        )
    return 0


def _cmd_lift(args) -> int:
    code = _resolve_code(args.code)
    qc = lift_code(code, args.z1, args.z2, args.seed, args.attempts)
    outputs = []
    if args.out:
        save_qc(qc, args.out)
        outputs.append(args.out)
    if args.alist:
        write_alist(expand(qc), args.alist)
        outputs.append(args.alist)
    girth = "acyclic" if qc.girth == float("inf") else int(qc.girth)
    print(f"z1={qc.z1} z2={qc.z2} girth={girth} seed={qc.seed}")
    _write_manifest("lift", args, [args.code], outputs)
    return 0


def _cmd_threshold(args) -> int:
    code = _resolve_code(args.code)
    report = channel_threshold(code, resolution_db=args.resolution)
    rate = float(code_rates(code).overall)
    limits = shannon_limit(code.p1, rate)
    code_id = code.name or Path(args.code).stem
    line = (
        f"{code_id},{report.threshold_db:.3f},{limits.gaussian_db:.3f},"
        f"{limits.biawgn_db:.3f},{report.iterations_at_threshold}"
    )
    print("code_id,threshold_dB,shannon_gauss_dB,shannon_biawgn_dB,iterations_at_threshold")
    print(line)
    if rate != 1.0:
        scaled = source_symbol_scale_db(report.threshold_db, code)
        print(
            f"# per-source-symbol scale: threshold {scaled:.3f} dB, "
            f"limit {limits.gaussian_db - (report.threshold_db - scaled):.3f} dB",
            file=sys.stderr,
        )
    outputs = []
    if args.out:
        Path(args.out).write_text(
            "code_id,threshold_dB,shannon_gauss_dB,shannon_biawgn_dB,"
            "iterations_at_threshold\n" + line + "\n",
            encoding="utf-8",
        )
        outputs.append(args.out)
    _write_manifest("threshold", args, [args.code], outputs)
    return 0


def _cmd_analyze(args) -> int:
    new = _resolve_code(args.new)
    old = _resolve_code(args.old)
    report = analysis.compare(new, old)
    text = (
        analysis.report_markdown(report, new.name or "new", old.name or "old")
        if args.format == "markdown"
        else analysis.report_csv(report)
    )
    print(text, end="")
    outputs = []
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        outputs.append(args.out)
    _write_manifest("analyze", args, [args.new, args.old], outputs)
    return 0


def _cmd_optimize(args) -> int:
    template = _resolve_code(args.code)
    if args.orientation == "lower":
        space = optimize.lower_triangle_space(template, args.punctured_only)
    elif args.orientation == "both":
        space = optimize.off_diagonal_space(template, args.punctured_only)
    else:
        cells = tuple(
            (r, c)
            for r in range(template.m_s)
            for c in range(r + 1, template.m_s)
        )
        space = optimize.SearchSpace(template, cells, ("upper",), args.punctured_only)

    history_rows = []
    if args.method == "enumerate":
        ranked = optimize.enumerate_search(space)
        best_assignment, best_db = ranked[0]
        for rank, (assignment, value) in enumerate(ranked):
            history_rows.append((rank, value, assignment))
        evaluations = len(ranked)
    else:
        params = optimize.DEParams(
            pop_size=args.popsize, generations=args.generations
        )
        result = optimize.de_optimize(space, params, seed=args.seed)
        best_assignment, best_db = result.assignment, result.threshold_db
        history_rows = result.history
        evaluations = result.evaluations

    best_code = space.build(best_assignment)
    print(
        f"best assignment {best_assignment} on cells {space.free_cells}: "
        f"{best_db:.3f} dB ({evaluations} candidates evaluated)"
    )
    outputs = []
    if args.out:
        save_code(
            JointCode(
                source=best_code.source,
                channel=best_code.channel,
                link=best_code.link,
                punctured=best_code.punctured,
                p1=best_code.p1,
                name=(template.name or "code") + "_optimized",
            ),
            args.out,
        )
        outputs.append(args.out)
    if args.history:
        with open(args.history, "w", encoding="utf-8") as fh:
            fh.write("generation,best_threshold_db,assignment\n")
            for gen, value, assignment in history_rows:
                fh.write(f"{gen},{value!r},{';'.join(map(str, assignment))}\n")
        outputs.append(args.history)
    _write_manifest("optimize", args, [args.code], outputs)
    return 0


def _parse_grid(text: str) -> list:
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        if step <= 0:
            raise SystemExit("error: grid step must be positive")
        grid = []
        value = start
        while value <= stop + 1e-9:
            grid.append(round(value, 6))
            value += step
        return grid
    return [float(v) for v in text.split(",") if v.strip()]


def _cmd_simulate(args) -> int:
    code = _resolve_code(args.code)
    meta = {}
    try:
        meta = fixtures.fixture_meta(args.code)
    except KeyError:
        pass
    config = sim.SimConfig(
        code=code,
        z1=args.z1 or meta.get("z1", 4),
        z2=args.z2 or meta.get("z2", 800),
        esn0_grid_db=_parse_grid(args.esn0_grid),
        i_max=args.i_max,
        max_frames=args.max_frames,
        target_error_frames=args.target_error_frames,
        min_frames=args.min_frames,
        master_seed=args.seed,
        lift_seed=args.lift_seed,
        mode=args.mode,
        workers=args.workers,
        code_id=code.name or Path(args.code).stem,
    )
    points = sim.run_sweep(config, args.out)
    for point in points:
        print(
            f"{point.esn0_db:+.3f} dB: SSER {point.sser:.3e} FER {point.fer:.3e} "
            f"frames {point.frames} ({point.stop_reason})"
        )
    _write_manifest("simulate", args, [args.code], [args.out] if args.out else [])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpjscc",
        description="Design and evaluation toolkit for double-protograph "
        "joint source-channel LDPC codes with triangular linking matrices.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("codes", help="inspect bundled codes")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=_cmd_codes)

    p = sub.add_parser("lift", help="two-stage quasi-cyclic lift")
    p.add_argument("--code", required=True)
    p.add_argument("--z1", type=int, default=4)
    p.add_argument("--z2", type=int, default=800)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attempts", type=int, default=200)
    p.add_argument("--out", help="shift-grid output file")
    p.add_argument("--alist", help="alist export of the expanded matrix")
    p.set_defaults(func=_cmd_lift)

    p = sub.add_parser("threshold", help="EXIT-chart channel threshold")
    p.add_argument("--code", required=True)
    p.add_argument("--resolution", type=float, default=0.001)
    p.add_argument("--out", help="CSV output file")
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("analyze", help="complexity/latency comparison of two codes")
    p.add_argument("--new", required=True)
    p.add_argument("--old", required=True)
    p.add_argument("--format", choices=["csv", "markdown"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("optimize", help="search linking entries for lower thresholds")
    p.add_argument("--code", required=True, help="template code (id or file)")
    p.add_argument("--method", choices=["enumerate", "de"], default="enumerate")
    p.add_argument("--orientation", choices=["lower", "upper", "both"], default="lower")
    p.add_argument("--punctured-only", action="store_true",
                   help="allow non-zero entries only in punctured linking columns")
    p.add_argument("--popsize", type=int, default=50)
    p.add_argument("--generations", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="best code output file")
    p.add_argument("--history", help="search history CSV")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("simulate", help="Monte Carlo SSER sweep")
    p.add_argument("--code", required=True)
    p.add_argument("--z1", type=int)
    p.add_argument("--z2", type=int)
    p.add_argument("--esn0-grid", required=True,
                   help="comma list or start:stop:step, dB per transmitted symbol")
    p.add_argument("--seed", type=int, default=0, help="master simulation seed")
    p.add_argument("--lift-seed", type=int, default=0)
    p.add_argument("--i-max", type=int, default=200)
    p.add_argument("--max-frames", type=int, default=200000)
    p.add_argument("--target-error-frames", type=int, default=100)
    p.add_argument("--min-frames", type=int, default=5000)
    p.add_argument("--mode", choices=["auto", "real", "reference"], default="auto")
    p.add_argument("--workers", type=int, help="overrides JSCC_WORKERS")
    p.add_argument("--out", help="results CSV (appending resumes a sweep)")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
