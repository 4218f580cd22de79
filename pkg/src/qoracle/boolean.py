"""Truth tables, F2 polynomials, Reed-Muller expansion and common-subexpression
elimination.

Polynomial variables are integers. Inputs are ``0 .. n-1`` (printed ``x0``...);
intermediates created by :func:`cse` are numbered from ``n`` upward and
printed ``g0, g1, ...``. A monomial is an ``int`` bitmask over variables, the
empty mask being the constant ``1``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "EvaluationError",
    "TruthTable",
    "F2Polynomial",
    "CseResult",
    "reed_muller_expand",
    "evaluate",
    "cse",
    "table_from_labels",
]


class EvaluationError(ValueError):
    """A polynomial references a variable the assignment does not cover."""


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# --------------------------------------------------------------------------- truth tables


@dataclass(frozen=True, eq=False)
class TruthTable:
    """``k`` output columns over ``n_inputs`` variables.

    ``columns[c][x]`` is output bit ``c`` on input row ``x`` (input variable ``j``
    is bit ``j`` of ``x``).
    """

    n_inputs: int
    columns: np.ndarray

    def __post_init__(self):
        cols = np.array(self.columns, dtype=np.uint8, ndmin=2)
        if self.n_inputs < 1:
            raise ValueError("a truth table needs at least one input")
        if cols.shape[1] != 1 << self.n_inputs:
            raise ValueError(
                f"columns have {cols.shape[1]} rows, expected {1 << self.n_inputs}"
            )
        if np.any(cols > 1):
            raise ValueError("truth table entries must be 0 or 1")
        cols.setflags(write=False)
        object.__setattr__(self, "columns", cols)

    @property
    def n_columns(self) -> int:
        return self.columns.shape[0]

    @property
    def n_rows(self) -> int:
        return self.columns.shape[1]

    def column(self, c: int) -> np.ndarray:
        return self.columns[c]

    def row(self, x: int) -> str:
        """Output bits of row ``x`` as a string, column 0 first."""
        return "".join(str(int(b)) for b in self.columns[:, x])

    def select(self, cols: Sequence[int]) -> "TruthTable":
        return TruthTable(self.n_inputs, self.columns[list(cols)])

    def __eq__(self, other):
        return (
            isinstance(other, TruthTable)
            and self.n_inputs == other.n_inputs
            and np.array_equal(self.columns, other.columns)
        )

    def __hash__(self):
        return hash((self.n_inputs, self.columns.tobytes()))

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_inputs": self.n_inputs,
                "columns": ["".join(map(str, col.tolist())) for col in self.columns],
            }
        )

    @classmethod
    def from_json(cls, text: str | bytes) -> "TruthTable":
        d = json.loads(text)
        cols = [[int(ch) for ch in s] for s in d["columns"]]
        return cls(int(d["n_inputs"]), np.array(cols, dtype=np.uint8))


def _as_bitstring(label) -> str:
    bits = getattr(label, "bits", label)
    if not isinstance(bits, str) or not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"labels must be non-empty bit strings, got {label!r}")
    return bits


def table_from_labels(labels: Sequence) -> TruthTable:
    """Build a truth table whose row ``i`` is label ``i``.

    Labels are bit strings with character ``j`` holding label bit ``j``. A list
    whose length is not a power of two is padded with all-zero labels.

    Raises:
        ValueError: empty list or labels of unequal length.
    """
    if not labels:
        raise ValueError("cannot build a truth table from an empty label list")
    strs = [_as_bitstring(lab) for lab in labels]
    k = len(strs[0])
    if any(len(s) != k for s in strs):
        raise ValueError("all labels must have the same length")
    n = max(1, (len(strs) - 1).bit_length())
    rows = np.zeros((1 << n, k), dtype=np.uint8)
    for i, s in enumerate(strs):
        rows[i] = [int(ch) for ch in s]
    return TruthTable(n, rows.T)


# --------------------------------------------------------------------------- polynomials


def _var_name(v: int, n_inputs: int | None) -> str:
    if n_inputs is None or v < n_inputs:
        return f"x{v}"
    return f"g{v - n_inputs}"


def _mono_key(m: int):
    # constant last, then by degree descending, then by variable list
    return (m == 0, -bin(m).count("1"), _bits(m))


@dataclass(frozen=True)
class F2Polynomial:
    """XOR of AND-monomials; ``monomials`` is a set of variable bitmasks."""

    monomials: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "monomials", frozenset(self.monomials))

    @classmethod
    def from_terms(cls, terms: Iterable[Iterable[int]]) -> "F2Polynomial":
        """Build from variable-index collections; repeated monomials cancel."""
        acc: set[int] = set()
        for t in terms:
            m = 0
            for v in t:
                m |= 1 << v
            acc ^= {m}
        return cls(frozenset(acc))

    @property
    def degree(self) -> int:
        return max((bin(m).count("1") for m in self.monomials), default=0)

    @property
    def support(self) -> int:
        """Bitmask of all variables that occur."""
        out = 0
        for m in self.monomials:
            out |= m
        return out

    def variables(self) -> list[int]:
        return _bits(self.support)

    def is_zero(self) -> bool:
        return not self.monomials

    def sorted_monomials(self) -> list[int]:
        return sorted(self.monomials, key=_mono_key)

    def to_text(self, n_inputs: int | None = None) -> str:
        """Canonical text such as ``x0*x2 + x1 + 1`` (``0`` for the zero polynomial)."""
        if not self.monomials:
            return "0"
        parts = []
        for m in self.sorted_monomials():
            parts.append("1" if m == 0 else "*".join(_var_name(v, n_inputs) for v in _bits(m)))
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()

    def __xor__(self, other: "F2Polynomial") -> "F2Polynomial":
        return F2Polynomial(self.monomials ^ other.monomials)

    def substitute(self, var: int, poly: "F2Polynomial") -> "F2Polynomial":
        """Replace variable ``var`` by ``poly``."""
        bit = 1 << var
        acc: set[int] = set()
        for m in self.monomials:
            if m & bit:
                rest = m & ~bit
                for pm in poly.monomials:
                    acc ^= {rest | pm}
            else:
                acc ^= {m}
        return F2Polynomial(frozenset(acc))

    def truth_column(self, variables: Sequence[int]) -> np.ndarray:
        """Truth table of the polynomial over ``variables`` (row bit j = variables[j])."""
        pos = {v: j for j, v in enumerate(variables)}
        col = np.zeros(1 << len(variables), dtype=np.uint8)
        rows = np.arange(1 << len(variables))
        for m in self.monomials:
            try:
                local = sum(1 << pos[v] for v in _bits(m))
            except KeyError as e:
                raise EvaluationError(f"variable {e.args[0]} not among {list(variables)}") from None
            col ^= ((rows & local) == local).astype(np.uint8)
        return col


def evaluate(poly: F2Polynomial, assignment) -> int:
    """Evaluate ``poly`` on an assignment.

    ``assignment`` is a sequence of bits indexed by variable, or a mapping
    from variable to bit.

    Raises:
        EvaluationError: a variable of ``poly`` is not assigned.
    """
    if isinstance(assignment, Mapping):
        value = 0
        for v, b in assignment.items():
            if b:
                value |= 1 << v
        covered = sum(1 << v for v in assignment)
    else:
        value = sum(1 << v for v, b in enumerate(assignment) if b)
        covered = (1 << len(assignment)) - 1
    missing = poly.support & ~covered
    if missing:
        raise EvaluationError(f"unassigned variable(s) {_bits(missing)}")
    acc = 0
    for m in poly.monomials:
        if value & m == m:
            acc ^= 1
    return acc


def reed_muller_expand(table: TruthTable, column: int) -> F2Polynomial:
    """Positive-polarity Reed-Muller form of one truth-table column.

    Computed with the binary Moebius transform: coefficient of monomial ``m``
    is the XOR of the column over all rows that are subsets of ``m``.
    """
    if not 0 <= column < table.n_columns:
        raise IndexError(f"column {column} out of range ({table.n_columns} columns)")
    a = table.columns[column].astype(np.uint8).copy()
    h = 1
    while h < a.size:
        v = a.reshape(-1, 2, h)
        v[:, 1, :] ^= v[:, 0, :]
        h <<= 1
    return F2Polynomial(frozenset(int(m) for m in np.flatnonzero(a)))


# --------------------------------------------------------------------------- CSE


@dataclass(frozen=True)
class CseResult:
    """Intermediates ``g_j`` (variable ``n_inputs + j``) and rewritten outputs."""

    n_inputs: int
    intermediates: tuple[F2Polynomial, ...]
    outputs: tuple[F2Polynomial, ...]

    def var(self, j: int) -> int:
        return self.n_inputs + j

    def expand(self) -> list[F2Polynomial]:
        """Outputs with every intermediate substituted back (inputs only)."""
        defs: list[F2Polynomial] = []
        for j, g in enumerate(self.intermediates):
            for i in range(j - 1, -1, -1):
                g = g.substitute(self.var(i), defs[i])
            defs.append(g)
        out = []
        for f in self.outputs:
            for j in range(len(defs) - 1, -1, -1):
                f = f.substitute(self.var(j), defs[j])
            out.append(f)
        return out

    def evaluate_all(self, x: int) -> tuple[list[int], list[int]]:
        """Values of (intermediates, outputs) on input row ``x``."""
        bits = [(x >> i) & 1 for i in range(self.n_inputs)]
        gvals = []
        for g in self.intermediates:
            v = evaluate(g, bits)
            gvals.append(v)
            bits.append(v)
        return gvals, [evaluate(f, bits) for f in self.outputs]

    def use_counts(self) -> list[int]:
        counts = [0] * len(self.intermediates)
        for p in (*self.intermediates, *self.outputs):
            for m in p.monomials:
                for v in _bits(m):
                    if v >= self.n_inputs:
                        counts[v - self.n_inputs] += 1
        return counts

    def max_degree(self) -> int:
        return max((p.degree for p in (*self.intermediates, *self.outputs)), default=0)

    def describe(self) -> str:
        lines = [f"g{j} = {g.to_text(self.n_inputs)}" for j, g in enumerate(self.intermediates)]
        lines += [f"f{c} = {f.to_text(self.n_inputs)}" for c, f in enumerate(self.outputs)]
        return "\n".join(lines)


def _toggle(poly: set[int], m: int) -> None:
    if m in poly:
        poly.remove(m)
    else:
        poly.add(m)


@lru_cache(maxsize=1 << 16)
def _pairs(m: int) -> tuple[tuple[int, int], ...]:
    return tuple(combinations(_bits(m), 2))


def _best_pair(polys: list[set[int]], skip: set[int]):
    counts: Counter = Counter(
        pair
        for i, p in enumerate(polys)
        if i not in skip
        for m in p
        if m & (m - 1)
        for pair in _pairs(m)
    )
    best = None
    for pair, c in counts.items():
        if c < 2:
            continue
        if best is None or c > best[1] or (c == best[1] and pair < best[0]):
            best = (pair, c)
    return best


def _frag_key(frag: frozenset[int]):
    return sorted(_mono_key(m) for m in frag)


def _best_xor_fragment(polys: list[set[int]], skip: set[int]):
    live = [i for i in range(len(polys)) if i not in skip and len(polys[i]) >= 2]
    seen: set[frozenset[int]] = set()
    best = None
    for a, b in combinations(live, 2):
        frag = frozenset(polys[a] & polys[b])
        if len(frag) < 2 or frag in seen:
            continue
        seen.add(frag)
        occ = sum(1 for i in live if frag <= polys[i])
        score = occ * (len(frag) - 1)
        if (
            best is None
            or score > best[1]
            or (score == best[1] and _frag_key(frag) < _frag_key(best[0]))
        ):
            best = (frag, score)
    return best


def cse(polys: Sequence[F2Polynomial], n_inputs: int | None = None) -> CseResult:
    """Greedy common-subexpression elimination over F2 polynomials.

    Each round extracts one shared fragment into a new intermediate ``g_j``:

    1. a variable pair occurring in the monomials of two or more polynomials
       (highest count wins, ties to the smallest pair); when none is left,
    2. a set of two or more monomials shared by several polynomials, scored
       ``occurrences * (size - 1)`` (ties to the lexicographically smallest set).

    Pair extraction runs first because it is what lowers monomial degree.
    Finally, intermediates used fewer than twice are inlined when that does not
    raise the degree of the polynomial that uses them.
    """
    if n_inputs is None:
        n_inputs = max((p.support.bit_length() for p in polys), default=0)
    work: list[set[int]] = [set(p.monomials) for p in polys]
    n_out = len(work)
    defs: list[set[int]] = []
    product_defs: set[int] = set()  # indices into `work` that are pair definitions

    while True:
        polys_now = defs + work[:n_out]
        skip = {i for i in product_defs}
        found = _best_pair(polys_now, skip)
        if found is not None:
            (u, v), _ = found
            pair = (1 << u) | (1 << v)
            g = n_inputs + len(defs)
            for i, p in enumerate(polys_now):
                if i in skip:
                    continue
                hits = [m for m in p if m & pair == pair]
                for m in hits:
                    p.remove(m)
                for m in hits:
                    _toggle(p, (m & ~pair) | (1 << g))
            product_defs.add(len(defs))
            defs.append({pair})
            continue
        found = _best_xor_fragment(polys_now, skip)
        if found is None or found[1] <= 0:
            break
        frag, _ = found
        g = n_inputs + len(defs)
        occ = [p for i, p in enumerate(polys_now) if i not in skip and frag <= p]
        if len(occ) < 2:
            break
        for p in occ:
            p -= frag
            _toggle(p, 1 << g)
        defs.append(set(frag))

    result = _inline_single_use(n_inputs, defs, work[:n_out])
    return result


def _inline_single_use(n_inputs: int, defs: list[set[int]], outs: list[set[int]]) -> CseResult:
    polys = [F2Polynomial(frozenset(d)) for d in defs]
    outputs = [F2Polynomial(frozenset(o)) for o in outs]
    alive = list(range(len(polys)))
    changed = True
    while changed:
        changed = False
        for j in list(alive):
            var = n_inputs + j
            bit = 1 << var
            users = [
                ("g", i) for i in alive if i != j and any(m & bit for m in polys[i].monomials)
            ] + [("f", c) for c, f in enumerate(outputs) if any(m & bit for m in f.monomials)]
            uses = sum(
                sum(1 for m in (polys[i] if kind == "g" else outputs[i]).monomials if m & bit)
                for kind, i in users
            )
            if uses >= 2:
                continue
            if uses == 1:
                kind, i = users[0]
                target = polys[i] if kind == "g" else outputs[i]
                new = target.substitute(var, polys[j])
                if new.degree > max(target.degree, 2):
                    continue
                if kind == "g":
                    polys[i] = new
                else:
                    outputs[i] = new
            alive.remove(j)
            changed = True
    # later fragments may have been pulled out of earlier definitions, so
    # renumber in dependency order to rule out forward references
    order: list[int] = []
    placed: set[int] = set()
    pending = list(alive)
    while pending:
        for j in pending:
            deps = {v - n_inputs for v in _bits(polys[j].support) if v >= n_inputs}
            if deps <= placed:
                order.append(j)
                placed.add(j)
                pending.remove(j)
                break
        else:  # pragma: no cover - extraction never creates cycles
            raise RuntimeError("cyclic intermediate definitions")
    alive = order
    remap = {n_inputs + j: n_inputs + k for k, j in enumerate(alive)}

    def rename(p: F2Polynomial) -> F2Polynomial:
        out = set()
        for m in p.monomials:
            nm = 0
            for v in _bits(m):
                nm |= 1 << remap.get(v, v)
            out ^= {nm}
        return F2Polynomial(frozenset(out))

    return CseResult(
        n_inputs,
        tuple(rename(polys[j]) for j in alive),
        tuple(rename(f) for f in outputs),
    )
