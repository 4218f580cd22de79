"""Dense state-vector simulation for verifying synthesized circuits.

Gates are applied exactly, composites (``mcx``/``mcz``) included, so lowering
is never needed before a run. A sparse basis-branch simulator is provided for
wide circuits that only ever hold a handful of basis states at once (database
circuits applied to a single index, possibly with many ancillas).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .circuit import Circuit, Register

__all__ = [
    "ResourceError",
    "StateVector",
    "max_qubits_default",
    "run",
    "matrix",
    "measure_distribution",
    "run_sparse",
    "run_sparse_rows",
    "equal_up_to_global_phase",
    "dump_distribution",
]

MATRIX_MAX_QUBITS = 10


class ResourceError(RuntimeError):
    """The circuit is too wide for dense simulation."""


def max_qubits_default() -> int:
    return int(os.environ.get("QORACLE_MAX_QUBITS", "24"))


@dataclass
class StateVector:
    amplitudes: np.ndarray
    layout: tuple[Register, ...]

    @property
    def num_qubits(self) -> int:
        return sum(r.size for r in self.layout)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _compile(circuit: Circuit):
    ops = []
    for g in circuit.gates:
        idx = [circuit.index_of(q) for q in g.qubits]
        if g.kind == "mcx":
            mask = 0
            for c in idx[:-1]:
                mask |= 1 << c
            ops.append(("mcx", mask, idx[-1]))
        elif g.kind == "mcz":
            mask = 0
            for c in idx:
                mask |= 1 << c
            ops.append(("mcz", mask))
        elif g.kind == "rz":
            ops.append(("rz", idx[0], g.angle))
        else:
            ops.append((g.kind, *idx))
    return ops


def _apply_ops(psi: np.ndarray, ops) -> None:
    k = kernels
    for op in ops:
        kind = op[0]
        if kind == "cx":
            k.apply_cx(psi, op[1], op[2])
        elif kind == "rz":
            k.apply_rz(psi, op[1], op[2])
        elif kind == "h":
            k.apply_h(psi, op[1])
        elif kind == "x":
            k.apply_x(psi, op[1])
        elif kind == "mcx":
            k.apply_mcx(psi, op[1], op[2])
        else:
            k.apply_mcz(psi, op[1])


def run(circuit: Circuit, initial=0, max_qubits: int | None = None) -> StateVector:
    """Apply ``circuit`` to a basis state (int) or a given amplitude vector.

    Raises:
        ResourceError: the layout exceeds ``max_qubits`` (default 24, or the
            ``QORACLE_MAX_QUBITS`` environment variable).
    """
    cap = max_qubits_default() if max_qubits is None else max_qubits
    q = circuit.num_qubits
    if q > cap:
        raise ResourceError(f"{q} qubits exceeds the dense simulation cap of {cap}")
    if isinstance(initial, StateVector):
        initial = initial.amplitudes
    if isinstance(initial, (int, np.integer)):
        if not 0 <= initial < (1 << q):
            raise ValueError(f"basis index {initial} out of range for {q} qubits")
        psi = np.zeros(1 << q, dtype=np.complex128)
        psi[initial] = 1.0
    else:
        psi = np.array(initial, dtype=np.complex128)
        if psi.shape != (1 << q,):
            raise ValueError(f"state has shape {psi.shape}, expected ({1 << q},)")
    _apply_ops(psi, _compile(circuit))
    return StateVector(psi, circuit.layout)


def matrix(circuit: Circuit, max_qubits: int = MATRIX_MAX_QUBITS) -> np.ndarray:
    """Full unitary of ``circuit``, column ``x`` = ``run(circuit, x)``."""
    q = circuit.num_qubits
    if q > max_qubits:
        raise ResourceError(f"matrix of {q} qubits exceeds cap of {max_qubits}")
    dim = 1 << q
    ops = _compile(circuit)
    out = np.empty((dim, dim), dtype=np.complex128)
    for col in range(dim):
        psi = np.zeros(dim, dtype=np.complex128)
        psi[col] = 1.0
        _apply_ops(psi, ops)
        out[:, col] = psi
    return out


def measure_distribution(state: StateVector, register: str | Register) -> np.ndarray:
    """Marginal outcome probabilities of one register, indexed by register value."""
    name = register.name if isinstance(register, Register) else register
    off = 0
    for reg in state.layout:
        if reg.name == name:
            qubits = np.arange(off, off + reg.size, dtype=np.int64)
            return kernels.marginal(np.ascontiguousarray(state.probabilities()), qubits)
        off += reg.size
    raise KeyError(f"register {name!r} not in layout")


def equal_up_to_global_phase(a, b, tol: float = 1e-9) -> bool:
    """``max|a - e^{ig} b| <= tol`` with ``g`` fixed by the largest amplitude of ``a``."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        return False
    k = int(np.argmax(np.abs(a)))
    if abs(b[k]) < 1e-15:
        return bool(np.max(np.abs(a)) <= tol and np.max(np.abs(b)) <= tol)
    phase = a[k] / b[k]
    phase /= abs(phase)
    return bool(np.max(np.abs(a - phase * b)) <= tol)


# --------------------------------------------------------------------------- sparse


_SQ = 1.0 / math.sqrt(2.0)


def run_sparse(circuit: Circuit, initial: int | dict = 0, prune: float = 1e-13) -> dict[int, complex]:
    """Simulate on a dict of basis index -> amplitude.

    Cost scales with the number of live basis states, not with 2^q, so it
    handles wide circuits applied to one basis input.
    """
    state = {initial: 1.0 + 0j} if isinstance(initial, int) else dict(initial)
    return _sparse_apply(_compile(circuit), state, prune)


def run_sparse_rows(circuit: Circuit, initials, prune: float = 1e-13) -> list[dict[int, complex]]:
    """:func:`run_sparse` for several basis inputs, compiling the circuit once."""
    ops = _compile(circuit)
    return [_sparse_apply(ops, {i: 1.0 + 0j}, prune) for i in initials]


def _sparse_apply(ops, state: dict[int, complex], prune: float) -> dict[int, complex]:
    for op in ops:
        kind = op[0]
        if kind == "cx":
            c, t = 1 << op[1], 1 << op[2]
            state = {(i ^ t if i & c else i): a for i, a in state.items()}
        elif kind == "rz":
            bit = 1 << op[1]
            p0 = complex(math.cos(op[2] / 2), -math.sin(op[2] / 2))
            p1 = p0.conjugate()
            state = {i: a * (p1 if i & bit else p0) for i, a in state.items()}
        elif kind == "x":
            bit = 1 << op[1]
            state = {i ^ bit: a for i, a in state.items()}
        elif kind == "h":
            bit = 1 << op[1]
            new: dict[int, complex] = {}
            for i, a in state.items():
                lo = i & ~bit
                a = a * _SQ
                new[lo] = new.get(lo, 0) + a
                new[lo | bit] = new.get(lo | bit, 0) + (-a if i & bit else a)
            state = {i: a for i, a in new.items() if abs(a) > prune}
        elif kind == "mcx":
            m, t = op[1], 1 << op[2]
            state = {(i ^ t if i & m == m else i): a for i, a in state.items()}
        else:
            m = op[1]
            state = {i: (-a if i & m == m else a) for i, a in state.items()}
    return state


# --------------------------------------------------------------------------- dumps


def dump_distribution(probs, format: str = "json", width: int | None = None) -> bytes:
    """Serialize a probability vector as rows of (index, bitstring, probability).

    Bitstrings are written most-significant bit first.
    """
    probs = np.asarray(probs, dtype=float)
    width = width or max(1, (probs.size - 1).bit_length())
    rows = [(i, format_bits(i, width), float(p)) for i, p in enumerate(probs)]
    if format == "json":
        return json.dumps(
            [{"index": i, "bitstring": b, "probability": p} for i, b, p in rows], indent=1
        ).encode()
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "bitstring", "probability"])
        w.writerows(rows)
        return buf.getvalue().encode()
    raise ValueError(f"unknown distribution format {format!r}")


def format_bits(value: int, width: int) -> str:
    return format(value, f"0{width}b")
