import json
import subprocess
import sys

import numpy as np
import pytest

from qoracle import sim
from qoracle.circuit import import_circuit, lower
from qoracle.cli import main
from qoracle.fixtures import (
    SIMILARITY_QUERY,
    fixture_rows,
    names_database,
    similarity_database,
)
from qoracle.oracle import Label


@pytest.fixture
def names_file(tmp_path):
    p = tmp_path / "names.json"
    p.write_text(json.dumps(fixture_rows(names_database())))
    return p


@pytest.fixture
def sim_file(tmp_path):
    p = tmp_path / "sim.json"
    p.write_text(json.dumps(fixture_rows(similarity_database())))
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestEncode:
    def test_fixture_rows(self, capsys, names_file, tmp_path):
        stats = tmp_path / "stats.json"
        qasm = tmp_path / "u.qasm"
        code, out, _ = run(capsys, "encode", "-i", names_file, "--method", "phase-tolerant",
                           "--stats", stats, "--qasm", qasm)
        assert code == 0
        circ = lower(import_circuit(out))
        lab = circ.offset("label")
        for i, (_, bits) in enumerate(names_database_rows()):
            amp = sim.run(circ, i).amplitudes[i | Label(bits).value << lab]
            assert abs(abs(amp) - 1) <= 1e-9
        s = json.loads(stats.read_text())
        assert s["cnot"] == 4 * 8 and s["qubits"] == 7
        assert qasm.read_text().startswith("OPENQASM 2.0;")

    def test_two_entries(self, capsys, tmp_path):
        p = tmp_path / "two.json"
        p.write_text('[{"entry": 0, "label": "0"}, {"entry": 1, "label": "1"}]')
        code, out, _ = run(capsys, "encode", "-i", p, "--method", "gray")
        assert code == 0
        u = sim.matrix(lower(import_circuit(out)))
        cx = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])
        assert sim.equal_up_to_global_phase(u, cx)

    def test_bad_path(self, capsys, tmp_path):
        code, out, err = run(capsys, "encode", "-i", tmp_path / "missing.json")
        assert code == 2 and out == ""
        assert "no such file" in err

    def test_bad_method(self, capsys, names_file):
        with pytest.raises(SystemExit):
            main(["encode", "-i", str(names_file), "--method", "magic"])


def names_database_rows():
    db = names_database()
    return [(e, lb.bits) for e, lb in zip(db.entries, db.labels)]


class TestSearch:
    def test_eve(self, capsys, names_file):
        code, out, _ = run(capsys, "search", "-i", names_file, "-q", "Eve")
        rep = json.loads(out)
        assert code == 0
        assert rep["top"][0]["index"] == 4
        assert rep["top"][0]["p"] == pytest.approx(0.9453125, abs=1e-6)
        assert rep["iterations"] == 2 and rep["estimated_M"] == 1

    def test_bob_exact(self, capsys, names_file):
        code, out, _ = run(capsys, "search", "-i", names_file, "-q", "Bob", "--iterations", "exact")
        rep = json.loads(out)
        assert {t["index"] for t in rep["top"][:2]} == {1, 6}
        assert rep["top"][0]["p"] == pytest.approx(rep["top"][1]["p"], abs=1e-9)

    def test_absent_query(self, capsys, names_file):
        code, out, err = run(capsys, "search", "-i", names_file, "-q", "1111", "--as", "label")
        assert code == 0
        probs = json.loads(out)["probabilities"]
        assert np.allclose(probs, 1 / 8, atol=1e-9)
        assert "no entry carries the query label" in err

    def test_csv(self, capsys, names_file):
        code, out, _ = run(capsys, "search", "-i", names_file, "-q", "Eve", "--format", "csv")
        lines = out.strip().splitlines()
        assert len(lines) == 9
        assert lines[5].startswith("4,100,")  # bitstrings are written MSB first

    def test_qubit_cap(self, capsys, names_file):
        code, _, err = run(capsys, "search", "-i", names_file, "-q", "Eve", "--max-qubits", "4")
        assert code == 2 and "exceeds" in err

    def test_bad_iterations(self, names_file):
        with pytest.raises(SystemExit):
            main(["search", "-i", str(names_file), "-q", "Eve", "--iterations", "0"])

    def test_int_inference(self, capsys, tmp_path):
        p = tmp_path / "ints.json"
        p.write_text("[3, 1, 4, 15, 9, 2, 6, 5]")
        code, out, _ = run(capsys, "search", "-i", p, "-q", "9", "--k", "8")
        assert code == 0
        assert json.loads(out)["top"][0]["index"] == 4


class TestSimilarity:
    def test_ranking(self, capsys, sim_file):
        code, out, _ = run(capsys, "similarity", "-i", sim_file, "-q", SIMILARITY_QUERY, "--as",
                           "label", "--iterations", "2")
        assert code == 0
        p = json.loads(out)["probabilities"]
        assert p[6] > p[10] and p[6] > p[12]
        assert min(p[10], p[12]) > max(p[i] for i in range(16) if i not in (6, 10, 12))

    def test_histogram_csv(self, capsys, sim_file):
        code, out, _ = run(capsys, "similarity", "-i", sim_file, "-q", SIMILARITY_QUERY, "--as",
                           "label", "--format", "csv")
        assert code == 0 and len(out.strip().splitlines()) == 17

    def test_dice(self, capsys, sim_file):
        code, out, _ = run(capsys, "similarity", "-i", sim_file, "-q", SIMILARITY_QUERY, "--as",
                           "label", "--tag", "dice", "--iterations", "1")
        assert code == 0
        # the contrast saturates every label with dice >= 0.85, so 6, 10 and 12 lead together
        assert {t["index"] for t in json.loads(out)["top"][:3]} == {6, 10, 12}

    def test_exact_rejected(self, capsys, sim_file):
        code, _, err = run(capsys, "similarity", "-i", sim_file, "-q", SIMILARITY_QUERY, "--as",
                           "label", "--tag", "exact")
        assert code == 2


class TestBench:
    def test_csv_repeatable(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            code, _, _ = run(capsys, "bench", "--sizes", "4,8", "--methods", "phase-tolerant",
                             "--trials", "1", "--seed", "7", "-o", out)
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        lines = a.read_text().splitlines()
        f = lines[1].split(",")
        assert f[:4] == ["4", "phase-tolerant", "7", "8"] and f[7] == "4" and f[8] == ""

    def test_cse_t_order(self, capsys, tmp_path):
        out = tmp_path / "cse.json"
        code, _, _ = run(capsys, "bench", "--sizes", "8..32", "--methods", "cse", "--trials", "2",
                         "--format", "json", "-o", out)
        assert code == 0
        rows = json.loads(out.read_text())
        assert {r["size"] for r in rows} == {8, 16, 32}
        assert all(r["t_order"] <= 2 for r in rows)

    def test_config(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"sizes": [4], "methods": ["gray"], "trials": 1, "format": "markdown"}))
        code, out, _ = run(capsys, "bench", "--config", cfg)
        assert code == 0 and out.startswith("### CNOT count")

    def test_bad_size(self, capsys):
        code, _, err = run(capsys, "bench", "--sizes", "6", "--trials", "1")
        assert code == 2 and "power of two" in err


class TestSimulate:
    def test_register_distribution(self, capsys, names_file, tmp_path):
        circ = tmp_path / "u.json"
        run(capsys, "encode", "-i", names_file, "--method", "gray", "-o", circ)
        code, out, _ = run(capsys, "simulate", "--circuit", circ, "--initial", 4, "--register", "label")
        assert code == 0
        hist = {r["bitstring"]: r["probability"] for r in json.loads(out)}
        assert hist["1000"] == pytest.approx(1.0)  # label 0001 printed MSB first


def test_module_entry_point(names_file):
    res = subprocess.run([sys.executable, "-m", "qoracle", "search", "-i", str(names_file), "-q", "Eve"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["top"][0]["index"] == 4
