"""Database labelling and encoding, query oracles, similarity tags and Grover.

Register names used throughout: ``index`` (n qubits), ``label`` (k qubits)
and ``anc`` (intermediate values of CSE synthesis, absent when unused).
"""

from __future__ import annotations

import json
import math
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .boolean import TruthTable, table_from_labels
from .circuit import Circuit, Register, h, inverse, lower, mcz, metrics, rz, x
from .synthesis.cse import cse_synthesize
from .synthesis.network import (
    COLUMN_METHODS,
    FULL_POOL,
    SynthesisError,
    column_gates,
    gray_synthesize_diagonal,
    select_best,
)

__all__ = [
    "METHODS",
    "PaddingLabelWarning",
    "Label",
    "label",
    "fnv1a_64",
    "canonical_bytes",
    "Database",
    "load_database",
    "EncodedDatabase",
    "encode_database",
    "phase_tag",
    "hamming_similarity_tag",
    "advanced_similarity_tag",
    "SimilarityMeasure",
    "dice_coefficient",
    "default_contrast",
    "identity_contrast",
    "build_query_oracle",
    "expected_collisions",
    "IterationCount",
    "iteration_count",
    "estimated_winners",
    "count_winners",
    "diffuser",
    "build_grover",
    "grover_success_probability",
    "Amplification",
    "amplification_analysis",
]

METHODS = (*COLUMN_METHODS, "cse", "auto")

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


class PaddingLabelWarning(UserWarning):
    """A query label coincides with the all-zero label used for padding rows."""


# --------------------------------------------------------------------------- labels


@dataclass(frozen=True, order=True)
class Label:
    """``bits[j]`` is label bit ``l_j``; the integer value is ``sum l_j 2^j``."""

    bits: str

    def __post_init__(self):
        if not self.bits or set(self.bits) - {"0", "1"}:
            raise ValueError(f"a label is a non-empty bit string, got {self.bits!r}")

    @property
    def k(self) -> int:
        return len(self.bits)

    @property
    def value(self) -> int:
        return sum(1 << j for j, b in enumerate(self.bits) if b == "1")

    @classmethod
    def from_int(cls, value: int, k: int) -> "Label":
        return cls("".join("1" if value >> j & 1 else "0" for j in range(k)))

    def is_zero(self) -> bool:
        return "1" not in self.bits

    def __str__(self):
        return self.bits


def fnv1a_64(data: bytes) -> int:
    h_ = FNV_OFFSET
    for b in data:
        h_ = ((h_ ^ b) * FNV_PRIME) & _MASK64
    return h_


def canonical_bytes(entry) -> bytes:
    """Byte encoding hashed for labels.

    Strings are UTF-8, integers 8 bytes little-endian (two's complement when
    negative), bytes-like objects are used as is.
    """
    if isinstance(entry, str):
        return entry.encode("utf-8")
    if isinstance(entry, (bytes, bytearray, memoryview)):
        return bytes(entry)
    if isinstance(entry, (int, np.integer)) and not isinstance(entry, bool):
        v = int(entry)
        if 0 <= v <= _MASK64:
            return struct.pack("<Q", v)
        if -(1 << 63) <= v < 0:
            return struct.pack("<q", v)
        raise ValueError(f"integer entry {v} does not fit in 64 bits")
    raise TypeError(f"cannot label entries of type {type(entry).__name__}")


def label(entry, k: int) -> Label:
    """Low ``k`` bits of the FNV-1a 64 hash of the entry's canonical bytes.

    Raises:
        ValueError: ``k`` outside ``1 .. 64``.
    """
    if not 1 <= k <= 64:
        raise ValueError(f"label size k={k} outside 1..64")
    return Label.from_int(fnv1a_64(canonical_bytes(entry)), k)


# --------------------------------------------------------------------------- databases


@dataclass(frozen=True)
class Database:
    """Ordered entries, optionally with fixed labels that bypass hashing."""

    entries: tuple
    labels: tuple[Label, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self.entries) < 2:
            raise ValueError("a database needs at least two entries")
        if self.labels is not None:
            labs = tuple(lb if isinstance(lb, Label) else Label(str(lb)) for lb in self.labels)
            if len(labs) != len(self.entries):
                raise ValueError("one label per entry is required")
            if len({lb.k for lb in labs}) != 1:
                raise ValueError("fixture labels must share one length")
            object.__setattr__(self, "labels", labs)

    @property
    def N(self) -> int:
        return len(self.entries)

    @classmethod
    def from_fixture(cls, rows: Iterable[dict]) -> "Database":
        rows = list(rows)
        return cls(tuple(r["entry"] for r in rows), tuple(Label(r["label"]) for r in rows))

    def label_size(self) -> int | None:
        return self.labels[0].k if self.labels else None

    def labels_for(self, k: int) -> list[Label]:
        if self.labels is not None:
            if k != self.labels[0].k:
                raise ValueError(f"fixture labels have k={self.labels[0].k}, asked for {k}")
            return list(self.labels)
        return [label(e, k) for e in self.entries]

    def label_of(self, query, k: int) -> Label:
        """Label of a query item; fixture databases look the entry up first."""
        if isinstance(query, Label):
            if query.k != k:
                raise ValueError(f"query label has {query.k} bits, database uses {k}")
            return query
        if self.labels is not None:
            for e, lb in zip(self.entries, self.labels):
                if e == query:
                    return lb
        return label(query, k)

    def all_integers(self) -> bool:
        return all(isinstance(e, int) and not isinstance(e, bool) for e in self.entries)


def load_database(path: str | Path) -> Database:
    """Read a JSON array, a JSON fixture ``[{"entry", "label"}]`` or NDJSON."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON array of entries")
    if data and all(isinstance(d, dict) for d in data):
        return Database.from_fixture(data)
    return Database(tuple(data))


def _log2_ceil(n: int) -> int:
    return max(1, (n - 1).bit_length())


@dataclass(frozen=True)
class EncodedDatabase:
    """``u_d |i>|0>|0> = phase * |i>|l(e_i)>|garbage>``."""

    u_d: Circuit
    db: Database
    labels: tuple[Label, ...]
    n: int
    k: int
    method: str
    column_methods: tuple[str, ...] = ()
    table: TruthTable | None = field(default=None, compare=False)

    @property
    def N(self) -> int:
        return self.db.N

    @property
    def padded(self) -> bool:
        return self.db.N < (1 << self.n)

    @property
    def index(self) -> Register:
        return self.u_d.register("index")

    @property
    def label_register(self) -> Register:
        return self.u_d.register("label")

    @property
    def ancillas(self) -> int:
        return sum(r.size for r in self.u_d.layout if r.name == "anc")

    @property
    def layout(self) -> tuple[Register, ...]:
        return self.u_d.layout

    def label_of(self, query) -> Label:
        return self.db.label_of(query, self.k)

    def lowered(self) -> Circuit:
        return lower(self.u_d)

    def metrics(self):
        return metrics(self.lowered())


def encode_database(
    db: Database | Sequence, k: int | None = None, method: str = "auto",
    ancilla_budget: int | None = None,
) -> EncodedDatabase:
    """Label, pad and synthesize a database circuit.

    ``k`` defaults to the fixture label size, else ``ceil(log2 N)``. Methods:
    ``pprm``, ``pprm-pt``, ``gray``, ``phase-tolerant``,
    ``phase-tolerant-htsp`` (cheaper of HTSP and Gray walk per column),
    ``cse`` and ``auto`` (per-column best of the full pool).
    """
    if not isinstance(db, Database):
        db = Database(tuple(db))
    if method not in METHODS:
        raise SynthesisError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    n = _log2_ceil(db.N)
    if k is None:
        k = db.label_size() or n
    labels = db.labels_for(k)
    table = table_from_labels([lb.bits for lb in labels])
    index, lab = Register("index", n), Register("label", k)
    tags: tuple[str, ...]
    if method == "cse":
        circ, report = cse_synthesize(table, index, lab, ancilla_budget)
        tags = report.methods
    elif method == "auto":
        res = select_best(table, index, lab, FULL_POOL)
        circ, tags = res.circuit, res.methods
    else:
        gates = []
        for c in range(k):
            gates.extend(column_gates(method, table.column(c), index.qubits(), lab[c]))
        circ, tags = Circuit((index, lab), gates), (method,) * k
    return EncodedDatabase(circ, db, tuple(labels), n, k, method, tuple(tags), table)


# --------------------------------------------------------------------------- tags


def phase_tag(target: Label | str, label_register: Register) -> Circuit:
    """Flip the sign of ``|target>`` only: X on zero bits, MCZ, X again."""
    target = target if isinstance(target, Label) else Label(target)
    if target.k != label_register.size:
        raise ValueError(f"label has {target.k} bits, register {label_register.size}")
    flips = [x(label_register[j]) for j, b in enumerate(target.bits) if b == "0"]
    return Circuit((label_register,), [*flips, mcz(label_register.qubits()), *flips])


def hamming_similarity_tag(target: Label | str, label_register: Register) -> Circuit:
    """Phase ``(pi/k) * sum_j (-1)^(l_j XOR t_j)``: pi on a match, less per mismatch."""
    target = target if isinstance(target, Label) else Label(target)
    k = label_register.size
    if target.k != k:
        raise ValueError(f"label has {target.k} bits, register {k}")
    gates = [
        rz(label_register[j], (1 if b == "1" else -1) * 2 * math.pi / k)
        for j, b in enumerate(target.bits)
    ]
    return Circuit((label_register,), gates)


def dice_coefficient(a: str, b: str) -> float:
    """``2|a & b| / (|a| + |b|)`` on bit strings; two all-zero strings give 1."""
    if len(a) != len(b):
        raise ValueError("dice_coefficient needs equal-length bit strings")
    inter = sum(1 for p, q in zip(a, b) if p == "1" and q == "1")
    total = a.count("1") + b.count("1")
    return 1.0 if total == 0 else 2.0 * inter / total


def default_contrast(v: float) -> float:
    """Logistic step centred at 0.78 with slope 30."""
    return 1.0 / (math.exp(30.0 * (0.78 - v)) + 1.0)


def identity_contrast(v: float) -> float:
    return v


@dataclass(frozen=True)
class SimilarityMeasure:
    """``f(query_bits, label_bits) -> [0, 1]``, optionally passed through a contrast."""

    evaluator: Callable[[Any, str], float]
    contrast: Callable[[float], float] | None = None

    def raw(self, query, bits: str) -> float:
        v = float(self.evaluator(query, bits))
        if not -1e-12 <= v <= 1 + 1e-12:
            raise ValueError(f"similarity {v} outside [0, 1]")
        return min(1.0, max(0.0, v))

    def __call__(self, query, bits: str) -> float:
        v = self.raw(query, bits)
        return v if self.contrast is None else float(self.contrast(v))

    @classmethod
    def dice(cls, contrast: Callable[[float], float] | None = default_contrast):
        return cls(lambda q, b: dice_coefficient(str(q), b), contrast)


ADVANCED_MAX_K = 12


def advanced_tag_phases(measure: SimilarityMeasure, query, k: int) -> np.ndarray:
    """``phi_y = (-1)^(y mod 2) * pi * measure(query, y)`` for every label value ``y``."""
    phis = np.empty(1 << k)
    for y in range(1 << k):
        sign = -1.0 if y & 1 else 1.0
        phis[y] = sign * math.pi * measure(query, Label.from_int(y, k).bits)
    return phis


def advanced_similarity_tag(measure: SimilarityMeasure, query, label_register: Register) -> Circuit:
    """Diagonal phase tag from an arbitrary similarity measure (k <= 12).

    Raises:
        ValueError: k too large, or the measure leaves [0, 1].
    """
    k = label_register.size
    if k > ADVANCED_MAX_K:
        raise ValueError(f"advanced tags evaluate 2^k phases; k={k} exceeds {ADVANCED_MAX_K}")
    return gray_synthesize_diagonal(advanced_tag_phases(measure, query, k), label_register)


def _tag(enc: EncodedDatabase, query, tag_kind, measure: SimilarityMeasure | None) -> Circuit:
    reg = enc.label_register
    if isinstance(tag_kind, SimilarityMeasure):
        measure, tag_kind = tag_kind, "advanced"
    if tag_kind in ("advanced", "dice"):
        if measure is None:
            measure = SimilarityMeasure.dice()
        q = query.bits if isinstance(query, Label) else enc.label_of(query).bits
        return advanced_similarity_tag(measure, q, reg)
    target = enc.label_of(query)
    if enc.padded and target.is_zero():
        warnings.warn(
            "query label is the all-zero padding label; padding rows will be tagged too",
            PaddingLabelWarning,
            stacklevel=3,
        )
    if tag_kind == "exact":
        return phase_tag(target, reg)
    if tag_kind == "hamming":
        return hamming_similarity_tag(target, reg)
    raise ValueError(f"unknown tag kind {tag_kind!r}")


def build_query_oracle(
    enc: EncodedDatabase, query, tag_kind="exact", measure: SimilarityMeasure | None = None
) -> Circuit:
    """``U_D``, then the tag on the label register, then ``U_D`` inverted.

    ``tag_kind`` is ``exact``, ``hamming``, ``advanced``/``dice`` or a
    :class:`SimilarityMeasure`. ``query`` is a database item or a
    :class:`Label`.
    """
    tag = _tag(enc, query, tag_kind, measure)
    return enc.u_d.then(tag.on(enc.layout), inverse(enc.u_d))


# --------------------------------------------------------------------------- Grover


def expected_collisions(N: int, k: int) -> float:
    """Expected number of entries sharing a given entry's label: ``1 + (N-1)/2^k``."""
    if N < 1 or k < 1:
        raise ValueError("expected_collisions needs N >= 1 and k >= 1")
    return 1.0 + (N - 1) * 2.0 ** (-k)


@dataclass(frozen=True)
class IterationCount:
    optimal: int
    bound: int


def iteration_count(N: int, M: int) -> IterationCount:
    """Best iteration count ``floor(pi / (4 asin sqrt(M/N)))`` (at least 1)
    and the looser ceiling bound ``ceil(pi/4 * sqrt(N/M))``.

    Raises:
        ValueError: ``M`` outside ``1 .. N``.
    """
    if not 1 <= M <= N:
        raise ValueError(f"need 1 <= M <= N, got M={M}, N={N}")
    optimal = max(1, math.floor(math.pi / (4 * math.asin(math.sqrt(M / N)))))
    bound = math.ceil(math.pi / 4 * math.sqrt(N / M))
    return IterationCount(optimal, bound)


def estimated_winners(N: int, k: int) -> int:
    return max(1, round(expected_collisions(N, k)))


def count_winners(enc: EncodedDatabase, query) -> int:
    """Rows of the (padded) table whose label equals the query label."""
    target = enc.label_of(query)
    hits = sum(1 for lb in enc.labels if lb == target)
    if target.is_zero():
        hits += (1 << enc.n) - enc.N
    return hits


def grover_success_probability(N: int, M: int, R: int) -> float:
    return math.sin((2 * R + 1) * math.asin(math.sqrt(M / N))) ** 2


def diffuser(index_register: Register) -> Circuit:
    """``2|s><s| - I`` up to global phase."""
    qs = index_register.qubits()
    hs = [h(q) for q in qs]
    xs = [x(q) for q in qs]
    return Circuit((index_register,), [*hs, *xs, mcz(qs), *xs, *hs])


def build_grover(
    enc: EncodedDatabase, query, tag_kind="exact", iterations: int | str | None = None,
    measure: SimilarityMeasure | None = None,
) -> Circuit:
    """Hadamards on the index register, then oracle + diffuser repeated.

    ``iterations`` of ``None``/``"auto"`` uses the optimal count for
    ``M = round(1 + (N-1)/2^k)``; ``"exact"`` counts the matching labels
    classically instead (a diagnostic, it costs a linear scan).
    """
    if iterations in (None, "auto"):
        iterations = iteration_count(1 << enc.n, min(1 << enc.n, estimated_winners(enc.N, enc.k))).optimal
    elif iterations == "exact":
        M = count_winners(enc, query)
        if M == 0:
            raise ValueError("no entry carries the query label")
        iterations = iteration_count(1 << enc.n, M).optimal
    iterations = int(iterations)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    oracle = build_query_oracle(enc, query, tag_kind, measure)
    diff = diffuser(enc.index).on(enc.layout)
    init = Circuit(enc.layout, [h(q) for q in enc.index])
    return init.then(*([oracle, diff] * iterations))


@dataclass(frozen=True)
class Amplification:
    r_cm: float
    phi_cm: float
    A: np.ndarray


def amplification_analysis(phases) -> Amplification:
    """Centre of mass of ``exp(i*phi_x)`` and the per-state diffuser gain ``A_x``."""
    phases = np.asarray(phases, dtype=float)
    cm = np.mean(np.exp(1j * phases))
    r = float(abs(cm))
    phi = float(np.angle(cm)) if r > 1e-12 else 0.0
    A = np.sqrt(np.maximum(0.0, 1 + 4 * r * r - 4 * r * np.cos(phases - phi)))
    return Amplification(r, phi, A)
