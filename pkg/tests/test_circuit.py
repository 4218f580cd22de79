import json
import math

import numpy as np
import pytest

from qoracle import sim
from qoracle.circuit import (
    Circuit,
    CircuitError,
    Gate,
    LayoutError,
    MustLowerError,
    NonDyadicAngleError,
    QubitRef,
    Register,
    cx,
    dyadic_decomposition,
    export,
    h,
    import_circuit,
    inverse,
    lower,
    mcx,
    mcz,
    metrics,
    normalize_angle,
    rz,
    x,
)

Q = Register("q", 4)


def circ(*gates, layout=(Q,)):
    return Circuit(layout, gates)


def random_circuit(rng, n=4, depth=30):
    reg = Register("q", n)
    gates = []
    for _ in range(depth):
        kind = rng.integers(6)
        qs = [reg[int(i)] for i in rng.permutation(n)]
        if kind == 0:
            gates.append(h(qs[0]))
        elif kind == 1:
            gates.append(x(qs[0]))
        elif kind == 2:
            gates.append(rz(qs[0], math.pi * int(rng.integers(-8, 9)) / 8))
        elif kind == 3:
            gates.append(cx(qs[0], qs[1]))
        elif kind == 4:
            c = int(rng.integers(0, n))
            gates.append(mcx(qs[:c], qs[c]))
        else:
            gates.append(mcz(qs[: int(rng.integers(1, n + 1))]))
    return Circuit((reg,), gates)


class TestGates:
    def test_rz_angle_normalized(self):
        assert rz(Q[0], 3 * math.pi).angle == pytest.approx(math.pi)
        assert rz(Q[0], -math.pi).angle == pytest.approx(math.pi)
        assert normalize_angle(2 * math.pi) == pytest.approx(0.0)

    def test_mcz_operands_sorted(self):
        assert mcz([Q[2], Q[0], Q[1]]).qubits == (Q[0], Q[1], Q[2])

    def test_duplicate_operands_rejected(self):
        with pytest.raises(CircuitError):
            cx(Q[0], Q[0])

    def test_unknown_register(self):
        with pytest.raises(LayoutError):
            circ(h(QubitRef("other", 0)))

    def test_index_out_of_range(self):
        with pytest.raises(LayoutError):
            circ(h(QubitRef("q", 4)))


class TestLower:
    def test_ccx_six_cnots(self):
        m = metrics(lower(circ(mcx([Q[0], Q[1]], Q[2]))))
        assert m.cnot_count == 6
        assert m.t_order == 2

    def test_fixed_point(self):
        c = circ(h(Q[0]), cx(Q[0], Q[1]), rz(Q[2], 0.5))
        assert lower(c) == c

    def test_mcz3_matrix(self):
        c = lower(Circuit((Register("q", 3),), [mcz(Register("q", 3).qubits())]))
        assert c.is_lowered
        want = np.ones(8)
        want[7] = -1
        assert sim.equal_up_to_global_phase(sim.matrix(c), np.diag(want))

    @pytest.mark.parametrize("n_ctrl", [0, 1, 2, 3, 4])
    def test_mcx_equivalence(self, n_ctrl):
        reg = Register("q", n_ctrl + 1)
        c = Circuit((reg,), [mcx(reg.qubits()[:-1], reg[n_ctrl])])
        assert sim.equal_up_to_global_phase(sim.matrix(lower(c)), sim.matrix(c))

    @pytest.mark.parametrize("seed", range(8))
    def test_random_equivalence(self, seed):
        c = random_circuit(np.random.default_rng(seed))
        low = lower(c)
        assert low.is_lowered
        assert sim.equal_up_to_global_phase(sim.matrix(low), sim.matrix(c), 1e-9)


class TestInverse:
    def test_h_self_inverse(self):
        assert inverse(circ(h(Q[0]))) == circ(h(Q[0]))

    def test_reversal(self):
        c = circ(rz(Q[0], math.pi / 4), cx(Q[0], Q[1]))
        assert inverse(c) == circ(cx(Q[0], Q[1]), rz(Q[0], -math.pi / 4))

    @pytest.mark.parametrize("seed", range(5))
    def test_circuit_then_inverse_is_identity(self, seed):
        c = random_circuit(np.random.default_rng(seed))
        u = sim.matrix(c.then(inverse(c)))
        assert np.allclose(np.abs(np.diag(u)), 1.0, atol=1e-9)

    def test_double_inverse_structural(self):
        c = circ(h(Q[0]), rz(Q[1], 0.3), mcx([Q[0], Q[1]], Q[2]), mcz([Q[3], Q[0]]))
        assert inverse(inverse(c)) == c


class TestMetrics:
    def test_t_gate(self):
        m = metrics(circ(rz(Q[0], math.pi / 4)))
        assert m.tm_histogram == {2: 1}
        assert m.t_order == 2

    def test_three_quarter_pi(self):
        m = metrics(circ(rz(Q[0], 3 * math.pi / 4)))
        assert m.tm_histogram == {1: 1, 2: 1}
        assert m.t_order == 2

    def test_counts(self):
        m = metrics(circ(h(Q[0]), x(Q[1]), cx(Q[0], Q[1]), rz(Q[2], math.pi / 2)))
        assert (m.cnot_count, m.u_count, m.qubit_count) == (1, 3, 4)

    def test_empty(self):
        m = metrics(circ())
        assert m.t_order == 0 and m.tm_total == 0

    def test_non_dyadic(self):
        with pytest.raises(NonDyadicAngleError):
            dyadic_decomposition(float("nan"))

    def test_generic_angle_needs_deep_order(self):
        # with a 1e-9 tolerance any float snaps to some pi*a/2^m, m <= 40
        _, m = dyadic_decomposition(1.0)
        assert 25 <= m <= 40

    def test_needs_lowering(self):
        with pytest.raises(MustLowerError):
            metrics(circ(mcx([Q[0], Q[1]], Q[2])))

    def test_dyadic_decomposition(self):
        assert dyadic_decomposition(-3 * math.pi / 8) == (-3, 3)
        assert dyadic_decomposition(0.0) == (0, 0)

    @pytest.mark.parametrize("seed", range(4))
    def test_additive(self, seed):
        rng = np.random.default_rng(seed)
        a, b = lower(random_circuit(rng)), lower(random_circuit(rng))
        ma, mb, mab = metrics(a), metrics(b), metrics(a.then(b))
        assert mab.cnot_count == ma.cnot_count + mb.cnot_count
        assert mab.u_count == ma.u_count + mb.u_count
        assert mab.tm_histogram == (ma + mb).tm_histogram


class TestExport:
    def test_json_round_trip(self):
        c = circ(h(Q[0]), rz(Q[1], 0.25), mcx([Q[0], Q[1]], Q[2]), mcz([Q[3]]))
        assert import_circuit(export(c, "json")) == c
        d = json.loads(export(c, "json"))
        assert d["registers"] == [{"name": "q", "size": 4}]

    def test_qasm_empty(self):
        text = export(Circuit((Register("a", 2),)), "qasm2").decode()
        assert text.strip().splitlines() == ["OPENQASM 2.0;", 'include "qelib1.inc";', "qreg a[2];"]

    def test_qasm_cx_line(self):
        text = export(Circuit((Register("q", 2),), [cx(Register("q", 2)[0], Register("q", 2)[1])]), "qasm2")
        assert "cx q[0],q[1];" in text.decode()

    def test_qasm_rejects_composites(self):
        with pytest.raises(MustLowerError):
            export(circ(mcx([Q[0], Q[1]], Q[2])), "qasm2")
