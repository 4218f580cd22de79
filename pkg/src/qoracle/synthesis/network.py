"""Circuit emission for phase networks and truth-table columns.

Column backends write output bit ``T(x)`` of a truth table into an output
qubit that starts in ``|0>``:

``gray``
    exact: H, full diagonal over inputs and output, H.
``phase-tolerant``
    only the parity operators that contain the output wire, so ``|x>|0>``
    maps to ``exp(i*chi_x)|x>|T(x)>``. The garbage phase depends on ``x``
    alone and cancels once the circuit is uncomputed.
``pprm``
    one multi-controlled X per Reed-Muller monomial.
``pprm-pt``
    as ``pprm``, with each multi-controlled X replaced by its
    phase-tolerant (relative-phase) version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..boolean import F2Polynomial, TruthTable, reed_muller_expand
from ..circuit import (
    Circuit,
    Gate,
    QubitRef,
    Register,
    cx,
    h,
    lower,
    mcx,
    metrics,
    rz,
    x,
)
from .routing import Route, diagonal_routes, gray_route, htsp_route
from .walsh import ZERO_TOL, PhaseSpec, ThetaSolution, fwht, solve_theta

__all__ = [
    "SynthesisError",
    "COLUMN_METHODS",
    "FULL_POOL",
    "synthesize_phase_network",
    "gray_synthesize_diagonal",
    "gray_synthesize_column",
    "phase_tolerant_synthesize_column",
    "pprm_synthesize",
    "pprm_column_gates",
    "column_gates",
    "select_best",
    "SelectResult",
    "minimal_layout",
]


class SynthesisError(ValueError):
    """Inputs cannot be synthesized as requested."""


COLUMN_METHODS = ("pprm", "pprm-pt", "gray", "phase-tolerant", "phase-tolerant-htsp")
FULL_POOL = ("pprm", "pprm-pt", "gray", "phase-tolerant")


def minimal_layout(*groups: Sequence[QubitRef] | QubitRef | Register) -> tuple[Register, ...]:
    """Smallest register layout that holds every given qubit (or register)."""
    sizes: dict[str, int] = {}
    for grp in groups:
        if isinstance(grp, Register):
            sizes[grp.name] = max(sizes.get(grp.name, 0), grp.size)
            continue
        for q in [grp] if isinstance(grp, QubitRef) else grp:
            sizes[q.register] = max(sizes.get(q.register, 0), q.index + 1)
    return tuple(Register(name, size) for name, size in sizes.items())


def _qubits(target) -> list[QubitRef]:
    return target.qubits() if isinstance(target, Register) else list(target)


# --------------------------------------------------------------------------- networks


def _route_gates(route: Route, thetas, wires: Sequence[QubitRef], placed: set[int]) -> list[Gate]:
    gates: list[Gate] = []
    rz_masks = route.rz_masks()
    loader = wires[route.loader]
    for fired, subset in zip(route.transitions(), route.steps):
        for c in fired:
            gates.append(cx(wires[c], loader))
        mask = route.to_mask(subset)
        if mask in placed or mask not in rz_masks:
            continue
        t = thetas.get(mask, 0.0)
        if abs(t) > ZERO_TOL:
            gates.append(rz(loader, t))
            placed.add(mask)
    return gates


def synthesize_phase_network(
    theta: ThetaSolution, route: Route | Sequence[Route], target: Register | Sequence[QubitRef]
) -> Circuit:
    """Emit the CNOT walk(s) of ``route`` with ``RZ(theta_p)`` at each operator.

    Raises:
        SynthesisError: an operator with a nonzero angle is never visited, or
            the target is narrower than ``theta.m``.
    """
    routes = [route] if isinstance(route, Route) else list(route)
    wires = _qubits(target)
    if len(wires) < theta.m:
        raise SynthesisError(f"target has {len(wires)} qubits, need {theta.m}")
    covered: set[int] = set()
    for r in routes:
        covered |= r.rz_masks()
    missing = [mk for mk in theta.thetas if mk not in covered]
    if missing:
        raise SynthesisError(f"route misses parity operators {sorted(missing)}")
    gates: list[Gate] = []
    placed: set[int] = set()
    for r in routes:
        gates.extend(_route_gates(r, theta.thetas, wires, placed))
    return Circuit(minimal_layout(target if isinstance(target, Register) else wires), gates)


def gray_synthesize_diagonal(spec, target: Register | Sequence[QubitRef]) -> Circuit:
    """Circuit for ``|y> -> exp(i*phi_y)|y>`` up to global phase.

    ``spec`` is a :class:`PhaseSpec` or a plain phase sequence of length
    ``2^m``. Uses at most ``2^m - 2`` CNOTs; an all-zero spec gives an empty
    circuit.

    Raises:
        SynthesisError: the target size does not match ``m``.
    """
    if not isinstance(spec, PhaseSpec):
        spec = PhaseSpec(spec)
    wires = _qubits(target)
    if len(wires) != spec.m:
        raise SynthesisError(f"phase spec needs {spec.m} qubits, target has {len(wires)}")
    layout = minimal_layout(target if isinstance(target, Register) else wires)
    sol = solve_theta(spec)
    if not sol.thetas:
        return Circuit(layout)
    return synthesize_phase_network(sol, diagonal_routes(spec.m), wires).on(layout)


# --------------------------------------------------------------------------- columns


def _column_phases(col: np.ndarray) -> np.ndarray:
    n = col.size
    return np.concatenate([np.zeros(n), math.pi * col.astype(np.float64)])


def _gray_column_gates(col: np.ndarray, ins: Sequence[QubitRef], out: QubitRef) -> list[Gate]:
    if not col.any():
        return []
    diag = gray_synthesize_diagonal(_column_phases(col), [*ins, out])
    return [h(out), *diag.gates, h(out)]


def pt_thetas(col: np.ndarray) -> dict[int, float]:
    """Angles on the output-containing operators, keyed by input subset."""
    n = col.size.bit_length() - 1
    w = fwht(col) * (math.pi / (1 << n))
    return {s: float(w[s]) for s in range(col.size) if abs(w[s]) > ZERO_TOL}


def pt_route(col: np.ndarray, ins: Sequence[QubitRef], routing: str = "gray") -> Route:
    """Route for a phase-tolerant column; ``routing`` is gray, htsp or best."""
    n = len(ins)
    thetas = pt_thetas(col)
    gray = gray_route(n, thetas.keys())
    if routing == "gray" or not thetas:
        return gray
    tour = htsp_route(thetas.keys(), n)
    if routing == "htsp":
        return tour
    if routing == "best":
        return tour if tour.cnot_cost < gray.cnot_cost else gray
    raise SynthesisError(f"unknown routing {routing!r}")


def _pt_column_gates(
    col: np.ndarray, ins: Sequence[QubitRef], out: QubitRef, routing: str = "gray"
) -> list[Gate]:
    # the gray walk is emitted even for constant columns so counts stay fixed
    route = pt_route(col, ins, routing)
    thetas = pt_thetas(col)
    wires = [*ins, out]
    keyed = {route.to_mask(s): t for s, t in thetas.items()}
    return [h(out), *_route_gates(route, keyed, wires, set()), h(out)]


def pprm_column_gates(
    poly: F2Polynomial, var_qubits: Sequence[QubitRef], out: QubitRef, phase_tolerant: bool = False
) -> list[Gate]:
    """One (possibly relative-phase) multi-controlled X per monomial."""
    gates: list[Gate] = []
    for m in poly.sorted_monomials():
        ctrls = [var_qubits[v] for v in range(m.bit_length()) if m >> v & 1]
        if phase_tolerant and len(ctrls) >= 2:
            and_col = np.zeros(1 << len(ctrls), dtype=np.uint8)
            and_col[-1] = 1
            gates.extend(_pt_column_gates(and_col, ctrls, out))
        else:
            gates.append(mcx(ctrls, out))
    return gates


def column_gates(
    method: str, col: np.ndarray, ins: Sequence[QubitRef], out: QubitRef,
    poly: F2Polynomial | None = None,
) -> list[Gate]:
    """Gates writing the column ``col`` (indexed by ``ins`` values) into ``out``."""
    if method == "gray":
        return _gray_column_gates(col, ins, out)
    if method == "phase-tolerant":
        return _pt_column_gates(col, ins, out, "gray")
    if method == "phase-tolerant-htsp":
        return _pt_column_gates(col, ins, out, "best")
    if method in ("pprm", "pprm-pt"):
        if poly is None:
            poly = reed_muller_expand(TruthTable(len(ins), col), 0)
        return pprm_column_gates(poly, list(ins), out, method == "pprm-pt")
    raise SynthesisError(f"unknown column method {method!r}")


def _column_circuit(method: str, table: TruthTable, column: int, inputs: Register, out: QubitRef):
    if table.n_inputs != inputs.size:
        raise SynthesisError(f"table has {table.n_inputs} inputs, register {inputs.size}")
    gates = column_gates(method, table.column(column), inputs.qubits(), out)
    return Circuit(minimal_layout(inputs, out), gates)


def gray_synthesize_column(table: TruthTable, column: int, inputs: Register, out: QubitRef) -> Circuit:
    """Exact ``|x>|0> -> |x>|T(x)>`` via a full diagonal over inputs and output."""
    return _column_circuit("gray", table, column, inputs, out)


def phase_tolerant_synthesize_column(
    table: TruthTable, column: int, inputs: Register, out: QubitRef, routing: str = "gray"
) -> Circuit:
    """``|x>|0> -> exp(i*chi_x)|x>|T(x)>`` using only output-wire operators.

    ``routing`` picks the walk: ``gray`` (always ``2^n`` CNOTs), ``htsp``
    (two-salesman tour over the nonzero angles) or ``best`` (cheaper of both).
    """
    if routing not in ("gray", "htsp", "best"):
        raise SynthesisError(f"unknown routing {routing!r}")
    if table.n_inputs != inputs.size:
        raise SynthesisError(f"table has {table.n_inputs} inputs, register {inputs.size}")
    gates = _pt_column_gates(table.column(column), inputs.qubits(), out, routing)
    return Circuit(minimal_layout(inputs, out), gates)


def pprm_synthesize(
    table: TruthTable, inputs: Register, outputs: Register, phase_tolerant: bool = False
) -> Circuit:
    """Reed-Muller synthesis of every column; composite gates are left unlowered."""
    if outputs.size < table.n_columns:
        raise SynthesisError(f"{table.n_columns} columns but only {outputs.size} outputs")
    gates: list[Gate] = []
    for c in range(table.n_columns):
        poly = reed_muller_expand(table, c)
        gates.extend(pprm_column_gates(poly, inputs.qubits(), outputs[c], phase_tolerant))
    return Circuit((inputs, outputs), gates)


# --------------------------------------------------------------------------- selection


@dataclass(frozen=True)
class SelectResult:
    circuit: Circuit
    methods: tuple[str, ...]

    @property
    def method(self) -> str:
        tags = set(self.methods)
        return self.methods[0] if len(tags) == 1 else "mixed"


def select_best(
    table: TruthTable, inputs: Register, outputs: Register, pool: Sequence[str] = FULL_POOL
) -> SelectResult:
    """Per column, keep the pool method whose lowered circuit has fewest CNOTs.

    Ties go to the earlier pool entry. The returned circuit is lowered.

    Raises:
        SynthesisError: empty pool or unknown method.
    """
    pool = list(pool)
    if not pool:
        raise SynthesisError("select_best needs a non-empty pool")
    for meth in pool:
        if meth not in COLUMN_METHODS:
            raise SynthesisError(f"unknown method {meth!r}")
    layout = (inputs, outputs)
    gates: list[Gate] = []
    tags: list[str] = []
    ins = inputs.qubits()
    for c in range(table.n_columns):
        col = table.column(c)
        poly = reed_muller_expand(table, c)
        best = None
        for meth in pool:
            cand = lower(Circuit(layout, column_gates(meth, col, ins, outputs[c], poly)))
            cost = metrics(cand).cnot_count
            if best is None or cost < best[0]:
                best = (cost, meth, cand)
        gates.extend(best[2].gates)
        tags.append(best[1])
    return SelectResult(Circuit(layout, gates), tuple(tags))
