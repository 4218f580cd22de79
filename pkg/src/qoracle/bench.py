"""Benchmark harness: random databases, per-method metrics, reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import mean
from typing import Iterable, Sequence

import numpy as np

from . import sim
from .circuit import lower, metrics
from .oracle import METHODS, Database, EncodedDatabase, encode_database

__all__ = [
    "DEFAULT_SIZES",
    "BenchmarkRow",
    "BenchConfig",
    "VerificationError",
    "random_database",
    "verify_encoding",
    "run_trial",
    "run_suite",
    "summarize",
    "emit_report",
    "load_config",
]

log = logging.getLogger(__name__)

DEFAULT_SIZES = (4, 8, 16, 32, 64, 128, 256, 512, 1024)
VERIFY_MAX_SIZE = 64
CSV_COLUMNS = ("size", "method", "seed", "cnot", "u", "tm", "t_order", "qubits", "ms")
METRIC_KEYS = ("cnot", "u", "tm", "t_order", "qubits")


class VerificationError(AssertionError):
    """A synthesized database circuit does not reproduce its label table."""


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def random_database(N: int, seed: int) -> Database:
    """``N`` random unsigned 64-bit integers from a seeded generator.

    Raises:
        ValueError: ``N`` not a power of two in ``4 .. 1024``.
    """
    if not (_is_pow2(N) and 4 <= N <= 1024):
        raise ValueError(f"N must be a power of two between 4 and 1024, got {N}")
    rng = np.random.default_rng(seed)
    vals = rng.integers(0, 2**64, size=N, dtype=np.uint64)
    return Database(tuple(int(v) for v in vals))


@dataclass(frozen=True)
class BenchmarkRow:
    size: int
    method: str
    seed: int
    cnot: int
    u: int
    tm: int
    t_order: int
    qubits: int
    ms: float | None = None

    def key(self):
        return (self.size, self.method, self.seed)


def verify_encoding(enc: EncodedDatabase, circuit=None) -> None:
    """Check ``|i>|0>|0> -> phase |i>|l(e_i)>|g>`` for every index row.

    Padding rows must map to the all-zero label. Uses the sparse simulator,
    so wide CSE circuits are fine.

    Raises:
        VerificationError: some row maps elsewhere or loses amplitude.
    """
    circ = enc.u_d if circuit is None else circuit
    off_idx, off_lab = circ.offset("index"), circ.offset("label")
    lab_mask = ((1 << enc.k) - 1) << off_lab
    idx_mask = ((1 << enc.n) - 1) << off_idx
    outs = sim.run_sparse_rows(circ, [i << off_idx for i in range(1 << enc.n)])
    for i, out in enumerate(outs):
        want = enc.labels[i].value if i < enc.N else 0
        live = {b: a for b, a in out.items() if abs(a) > 1e-9}
        if len(live) != 1:
            raise VerificationError(f"row {i}: output spread over {len(live)} basis states")
        (basis, amp), = live.items()
        if abs(abs(amp) - 1) > 1e-9:
            raise VerificationError(f"row {i}: amplitude magnitude {abs(amp)}")
        if (basis & idx_mask) >> off_idx != i or (basis & lab_mask) >> off_lab != want:
            raise VerificationError(f"row {i}: wrong output basis state {basis:b}")


def run_trial(size: int, method: str, seed: int, verify: bool = True) -> BenchmarkRow:
    db = random_database(size, seed)
    k = size.bit_length() - 1
    t0 = time.perf_counter()
    enc = encode_database(db, k, method)
    low = lower(enc.u_d)
    ms = (time.perf_counter() - t0) * 1000.0
    if verify and size <= VERIFY_MAX_SIZE:
        verify_encoding(enc, low)
    m = metrics(low)
    return BenchmarkRow(size, method, seed, m.cnot_count, m.u_count, m.tm_total, m.t_order,
                        m.qubit_count, ms)


def _run_job(job):
    return run_trial(*job)


def run_suite(
    sizes: Iterable[int] = DEFAULT_SIZES,
    methods: Sequence[str] = ("phase-tolerant", "phase-tolerant-htsp", "gray"),
    trials: int = 30,
    seed: int = 0,
    verify: bool = True,
    workers: int | None = None,
) -> tuple[list[BenchmarkRow], list[dict]]:
    """Run every (size, method, trial) and return rows plus per-cell averages.

    Trial ``t`` uses database seed ``seed + t`` for every method, so methods
    are compared on identical databases. Rows come back sorted by
    (size, method, seed) whatever the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for meth in methods:
        if meth not in METHODS:
            raise ValueError(f"unknown method {meth!r}")
    jobs = [(s, meth, seed + t, verify) for s in sizes for meth in methods for t in range(trials)]
    for s in sizes:
        random_database(s, seed)  # validate sizes before doing work
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = []
        for job in jobs:
            rows.append(_run_job(job))
            log.debug("size=%d method=%s seed=%d cnot=%d", job[0], job[1], job[2], rows[-1].cnot)
    rows.sort(key=BenchmarkRow.key)
    return rows, summarize(rows)


def _round_half_up(v: float) -> int:
    return int(np.floor(v + 0.5))


def summarize(rows: Sequence[BenchmarkRow]) -> list[dict]:
    """Integer-rounded averages per (size, method), plus mean wall time."""
    cells: dict[tuple[int, str], list[BenchmarkRow]] = {}
    for r in rows:
        cells.setdefault((r.size, r.method), []).append(r)
    out = []
    for (size, meth), rs in sorted(cells.items()):
        entry = {"size": size, "method": meth, "trials": len(rs)}
        for key in METRIC_KEYS:
            vals = [getattr(r, key) for r in rs]
            entry[key] = _round_half_up(mean(vals))
            entry[key + "_mean"] = mean(vals)
        times = [r.ms for r in rs if r.ms is not None]
        entry["ms"] = mean(times) if times else None
        out.append(entry)
    return out


def _difference(other: float, ours: float) -> str:
    if ours == 0:
        return "n/a"
    return f"{(other - ours) / ours * 100:.1f}%"


def _markdown(rows: Sequence[BenchmarkRow], reference: str | None) -> str:
    summary = summarize(rows)
    methods = list(dict.fromkeys(r.method for r in rows))
    sizes = sorted({r.size for r in rows})
    ref = reference if reference in methods else methods[0]
    cell = {(e["size"], e["method"]): e for e in summary}
    others = [m for m in methods if m != ref]
    blocks = []
    for key, title in (("cnot", "CNOT count"), ("u", "U count"), ("tm", "T_m count"),
                       ("t_order", "T-order"), ("qubits", "Qubits")):
        head = ["N", *methods, *(f"Difference {m}" for m in others)]
        lines = [f"### {title} (averages, reference {ref})", "",
                 "| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        for s in sizes:
            vals = [cell[(s, m)][key] if (s, m) in cell else None for m in methods]
            base = cell.get((s, ref), {}).get(key + "_mean")
            diffs = []
            for m in others:
                other = cell.get((s, m), {}).get(key + "_mean")
                diffs.append("n/a" if other is None or base is None else _difference(other, base))
            lines.append("| " + " | ".join([str(s), *("" if v is None else str(v) for v in vals),
                                            *diffs]) + " |")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def emit_report(
    rows: Sequence[BenchmarkRow], format: str = "csv", include_timing: bool = False,
    reference: str | None = "phase-tolerant",
) -> bytes:
    """Serialize rows as ``csv``, ``json`` or ``markdown``.

    Wall time is the only nondeterministic field; unless ``include_timing``
    is set the ``ms`` column is left empty so reruns are byte-identical.
    Markdown tables compare every method with ``reference`` as
    ``(other - reference) / reference``.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("emit_report needs at least one row")

    def ms(r):
        return None if not include_timing or r.ms is None else round(r.ms, 3)

    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            t = ms(r)
            w.writerow([r.size, r.method, r.seed, r.cnot, r.u, r.tm, r.t_order, r.qubits,
                        "" if t is None else f"{t:.3f}"])
        return buf.getvalue().encode()
    if format == "json":
        data = [{**asdict(r), "ms": ms(r)} for r in rows]
        return json.dumps(data, indent=1).encode()
    if format == "markdown":
        return _markdown(rows, reference).encode()
    raise ValueError(f"unknown report format {format!r}")


def rows_from_json(data: bytes | str) -> list[BenchmarkRow]:
    return [BenchmarkRow(**d) for d in json.loads(data)]


@dataclass
class BenchConfig:
    sizes: list[int] = field(default_factory=lambda: list(DEFAULT_SIZES))
    methods: list[str] = field(default_factory=lambda: ["phase-tolerant", "phase-tolerant-htsp", "gray"])
    trials: int = 30
    seed: int = 0
    verify: bool = True
    workers: int | None = None
    format: str = "csv"
    output: str | None = None
    timing: bool = False


def load_config(path: str | Path) -> BenchConfig:
    """Read a JSON benchmark config; unknown keys are rejected."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    allowed = set(BenchConfig.__dataclass_fields__)
    extra = set(data) - allowed
    if extra:
        raise ValueError(f"unknown config keys: {', '.join(sorted(extra))}")
    return BenchConfig(**data)
