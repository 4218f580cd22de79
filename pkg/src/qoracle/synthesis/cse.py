"""Truth-table synthesis through shared intermediate values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..boolean import CseResult, F2Polynomial, TruthTable, cse, reed_muller_expand
from ..circuit import Circuit, Gate, QubitRef, Register, lower, metrics, x
from .network import FULL_POOL, SynthesisError, column_gates

__all__ = ["AncillaBudgetError", "CseReport", "cse_synthesize", "synthesize_polynomial"]


class AncillaBudgetError(SynthesisError):
    """More intermediate values than the allowed ancilla qubits."""


@dataclass(frozen=True)
class CseReport:
    ancillas: int
    result: CseResult
    methods: tuple[str, ...]  # one per intermediate, then one per output


def synthesize_polynomial(
    poly: F2Polynomial,
    var_qubits: Sequence[QubitRef],
    out: QubitRef,
    pool: Sequence[str] = FULL_POOL,
    layout: Sequence[Register] = (),
) -> tuple[list[Gate], str]:
    """Lowered gates XOR-ing ``poly`` into ``out``, and the method used.

    Only the polynomial's own variables are wired in. Among pool methods whose
    T-order does not exceed the polynomial degree the fewest CNOTs wins; if
    none qualifies, the lowest T-order wins.
    """
    if poly.is_zero():
        return [], "none"
    vars_ = poly.variables()
    if not vars_:
        return [x(out)], "pprm"
    local = F2Polynomial(
        frozenset(
            sum(1 << vars_.index(v) for v in range(m.bit_length()) if m >> v & 1)
            for m in poly.monomials
        )
    )
    ins = [var_qubits[v] for v in vars_]
    col = local.truth_column(range(len(vars_)))
    best = None
    for meth in pool:
        gates = column_gates(meth, col, ins, out, local)
        met = metrics(lower(Circuit(tuple(layout), gates)))
        key = (met.t_order > poly.degree, met.t_order if met.t_order > poly.degree else 0,
               met.cnot_count)
        if best is None or key < best[0]:
            best = (key, meth, lower(Circuit(tuple(layout), gates)).gates)
    return list(best[2]), best[1]


def cse_synthesize(
    table: TruthTable,
    inputs: Register,
    outputs: Register,
    ancilla_budget: int | None = None,
    pool: Sequence[str] = FULL_POOL,
    ancilla_name: str = "anc",
) -> tuple[Circuit, CseReport]:
    """Compute intermediates into fresh ancillas, then the outputs.

    ``|x>|0>|0> -> exp(i*chi_x)|x>|T(x)>|g(x)>``. Ancillas are left holding
    the intermediates; uncomputing the whole circuit clears them. The layout
    omits the ancilla register when no intermediate is created.

    Raises:
        AncillaBudgetError: more intermediates than ``ancilla_budget``.
    """
    if table.n_inputs != inputs.size:
        raise SynthesisError(f"table has {table.n_inputs} inputs, register {inputs.size}")
    if outputs.size < table.n_columns:
        raise SynthesisError(f"{table.n_columns} columns but only {outputs.size} outputs")
    polys = [reed_muller_expand(table, c) for c in range(table.n_columns)]
    res = cse(polys, table.n_inputs)
    n_anc = len(res.intermediates)
    if ancilla_budget is not None and n_anc > ancilla_budget:
        raise AncillaBudgetError(f"{n_anc} intermediates exceed the budget of {ancilla_budget}")
    anc = Register(ancilla_name, n_anc)
    layout = (inputs, outputs, anc) if n_anc else (inputs, outputs)
    var_qubits = inputs.qubits() + anc.qubits()
    gates: list[Gate] = []
    tags: list[str] = []
    targets = [anc[j] for j in range(n_anc)] + [outputs[c] for c in range(table.n_columns)]
    for poly, out in zip((*res.intermediates, *res.outputs), targets):
        g, tag = synthesize_polynomial(poly, var_qubits, out, pool, layout)
        gates.extend(g)
        tags.append(tag)
    return Circuit(layout, gates), CseReport(n_anc, res, tuple(tags))
