"""``qoracle`` command line: encode, search, similarity, bench, simulate.

Results go to stdout (or ``--out``); logs and warnings go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bench, sim
from .circuit import export, import_circuit, lower, metrics
from .oracle import (
    METHODS,
    Label,
    SimilarityMeasure,
    build_grover,
    count_winners,
    default_contrast,
    encode_database,
    estimated_winners,
    iteration_count,
    load_database,
)

log = logging.getLogger("qoracle")


class CliError(Exception):
    pass


def _write(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        if not data.endswith(b"\n"):
            sys.stdout.buffer.write(b"\n")
        sys.stdout.flush()


def _max_qubits(args) -> int:
    if args.max_qubits is not None:
        return args.max_qubits
    return sim.max_qubits_default()


def _parse_iterations(text: str):
    if text in ("auto", "exact"):
        return text
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("iterations must be an integer, 'auto' or 'exact'") from None
    if v < 1:
        raise argparse.ArgumentTypeError("iterations must be >= 1")
    return v


def _parse_sizes(text: str) -> list[int]:
    """``4,8,16`` or the doubling range ``4..64``."""
    if ".." in text:
        lo, hi = (int(p) for p in text.split("..", 1))
        out = []
        while lo <= hi:
            out.append(lo)
            lo *= 2
        return out
    return [int(p) for p in text.split(",") if p]


def _load_db(args):
    try:
        return load_database(args.input)
    except FileNotFoundError:
        raise CliError(f"cannot read database {args.input!r}: no such file") from None
    except (OSError, ValueError) as e:
        raise CliError(f"cannot read database {args.input!r}: {e}") from None


def _query(db, args):
    kind = args.as_ or ("int" if db.all_integers() else "str")
    if kind == "label":
        try:
            return Label(args.query)
        except ValueError as e:
            raise CliError(str(e)) from None
    if kind == "int":
        try:
            return int(args.query)
        except ValueError:
            raise CliError(f"query {args.query!r} is not an integer") from None
    return args.query


def _encode(db, args):
    try:
        return encode_database(db, args.k, args.method)
    except ValueError as e:
        raise CliError(str(e)) from None


# --------------------------------------------------------------------------- commands


def cmd_encode(args) -> int:
    db = _load_db(args)
    enc = _encode(db, args)
    m = metrics(lower(enc.u_d))
    stats = {
        "N": enc.N, "n": enc.n, "k": enc.k, "method": enc.method,
        "column_methods": list(enc.column_methods), "ancillas": enc.ancillas,
        "cnot": m.cnot_count, "u": m.u_count, "tm": m.tm_total,
        "tm_histogram": {str(k): v for k, v in m.tm_histogram.items()},
        "t_order": m.t_order, "qubits": m.qubit_count,
        "labels": [lb.bits for lb in enc.labels],
    }
    _write(export(enc.u_d, "json"), args.out)
    if args.qasm:
        Path(args.qasm).write_bytes(export(lower(enc.u_d), "qasm2"))
    if args.stats:
        Path(args.stats).write_text(json.dumps(stats, indent=1))
    log.info("encoded %d entries: %d CNOT, T-order %d", enc.N, m.cnot_count, m.t_order)
    return 0


def _grover_probs(enc, query, tag, iterations, measure, cap):
    circ = build_grover(enc, query, tag, iterations, measure)
    if circ.num_qubits > cap:
        raise sim.ResourceError(f"{circ.num_qubits} qubits exceeds the simulation cap of {cap}")
    state = sim.run(circ, max_qubits=cap)
    return sim.measure_distribution(state, "index")


def _resolve_iterations(enc, query, requested):
    if requested == "exact":
        M = count_winners(enc, query)
        if M == 0:
            return iteration_count(1 << enc.n, estimated_winners(enc.N, enc.k)).optimal
        return iteration_count(1 << enc.n, M).optimal
    if requested == "auto":
        return iteration_count(1 << enc.n, estimated_winners(enc.N, enc.k)).optimal
    return requested


def _report(probs, iterations, est_m, top_n):
    order = sorted(range(len(probs)), key=lambda i: (-probs[i], i))[:top_n]
    return {
        "probabilities": [float(p) for p in probs],
        "top": [{"index": i, "p": float(probs[i])} for i in order],
        "iterations": iterations,
        "estimated_M": est_m,
    }


def cmd_search(args) -> int:
    db = _load_db(args)
    enc = _encode(db, args)
    query = _query(db, args)
    measure = None
    if args.tag == "dice":
        measure = SimilarityMeasure.dice(default_contrast if args.contrast == "default" else None)
    if args.tag == "exact" and count_winners(enc, query) == 0:
        log.warning("no entry carries the query label; expect a near-uniform distribution")
    iterations = _resolve_iterations(enc, query, args.iterations)
    probs = _grover_probs(enc, query, args.tag, iterations, measure, _max_qubits(args))
    rep = _report(probs, iterations, estimated_winners(enc.N, enc.k), args.top)
    if args.format == "csv":
        _write(sim.dump_distribution(probs, "csv", enc.n), args.out)
    else:
        _write(json.dumps(rep, indent=1).encode(), args.out)
    return 0


def cmd_similarity(args) -> int:
    db = _load_db(args)
    enc = _encode(db, args)
    query = _query(db, args)
    measure = None
    tag = args.tag
    if tag == "exact":
        raise CliError("similarity needs --tag hamming or --tag dice")
    if tag == "dice":
        if enc.k > 12:
            raise CliError(f"dice tags need k <= 12, got {enc.k}")
        measure = SimilarityMeasure.dice(default_contrast if args.contrast == "default" else None)
    iterations = _resolve_iterations(enc, query, args.iterations)
    probs = _grover_probs(enc, query, tag, iterations, measure, _max_qubits(args))
    if args.format == "csv":
        _write(sim.dump_distribution(probs, "csv", enc.n), args.out)
    else:
        rep = _report(probs, iterations, estimated_winners(enc.N, enc.k), args.top)
        rep["histogram"] = json.loads(sim.dump_distribution(probs, "json", enc.n))
        _write(json.dumps(rep, indent=1).encode(), args.out)
    return 0


def cmd_bench(args) -> int:
    cfg = bench.load_config(args.config) if args.config else bench.BenchConfig()
    if args.sizes:
        cfg.sizes = _parse_sizes(args.sizes)
    if args.methods:
        cfg.methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.trials is not None:
        cfg.trials = args.trials
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.no_verify:
        cfg.verify = False
    if args.timing:
        cfg.timing = True
    fmt = args.format or cfg.format
    out = args.out or cfg.output
    try:
        rows, _ = bench.run_suite(cfg.sizes, cfg.methods, cfg.trials, cfg.seed, cfg.verify, cfg.workers)
    except ValueError as e:
        raise CliError(str(e)) from None
    _write(bench.emit_report(rows, fmt, include_timing=cfg.timing), out)
    return 0


def cmd_simulate(args) -> int:
    try:
        circ = import_circuit(Path(args.circuit).read_bytes())
    except OSError as e:
        raise CliError(f"cannot read circuit {args.circuit!r}: {e}") from None
    state = sim.run(circ, args.initial, max_qubits=_max_qubits(args))
    if args.register:
        probs = sim.measure_distribution(state, args.register)
        width = circ.register(args.register).size
    else:
        probs = state.probabilities()
        width = circ.num_qubits
    _write(sim.dump_distribution(probs, args.format if args.format != "markdown" else "json", width),
           args.out)
    return 0


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qoracle", description="Grover oracle compiler and simulator")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, query=False):
        sp.add_argument("--input", "-i", required=True, help="database file (JSON array, NDJSON or fixture)")
        sp.add_argument("--k", type=int, default=None, help="label size (default log2 N)")
        sp.add_argument("--method", choices=METHODS, default="auto")
        sp.add_argument("--out", "-o", default=None)
        sp.add_argument("--max-qubits", type=int, default=None)
        if query:
            sp.add_argument("--query", "-q", required=True)
            sp.add_argument("--as", dest="as_", choices=("str", "int", "label"), default=None,
                            help="query type (default: int if every entry is an integer)")
            sp.add_argument("--iterations", type=_parse_iterations, default="auto")
            sp.add_argument("--contrast", choices=("default", "none"), default="default")
            sp.add_argument("--format", choices=("json", "csv"), default="json")
            sp.add_argument("--top", type=int, default=5)
            sp.add_argument("--seed", type=int, default=0, help="unused; everything is exact")

    sp = sub.add_parser("encode", help="synthesize a database circuit")
    common(sp)
    sp.add_argument("--qasm", default=None, help="also write lowered OpenQASM 2.0 here")
    sp.add_argument("--stats", default=None, help="write metrics JSON here")
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("search", help="run Grover for an exact query")
    common(sp, query=True)
    sp.add_argument("--tag", choices=("exact", "hamming", "dice"), default="exact")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("similarity", help="similarity search histogram")
    common(sp, query=True)
    sp.add_argument("--tag", "--measure", dest="tag", choices=("hamming", "dice", "exact"),
                    default="hamming")
    sp.set_defaults(func=cmd_similarity)

    sp = sub.add_parser("bench", help="run the synthesis benchmark")
    sp.add_argument("--config", default=None, help="JSON config file")
    sp.add_argument("--sizes", default=None, help="e.g. 4,8,16 or 4..1024")
    sp.add_argument("--methods", default=None, help="comma-separated method names")
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--format", choices=("csv", "json", "markdown"), default=None)
    sp.add_argument("--out", "-o", default=None)
    sp.add_argument("--timing", action="store_true", help="fill the ms column (nondeterministic)")
    sp.add_argument("--no-verify", action="store_true")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("simulate", help="simulate a circuit JSON file")
    sp.add_argument("--circuit", "--input", "-i", dest="circuit", required=True)
    sp.add_argument("--initial", type=int, default=0)
    sp.add_argument("--register", default=None)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", "-o", default=None)
    sp.add_argument("--max-qubits", type=int, default=None)
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    logging.captureWarnings(True)
    try:
        return args.func(args)
    except (CliError, sim.ResourceError) as e:
        print(f"qoracle: error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"qoracle: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
