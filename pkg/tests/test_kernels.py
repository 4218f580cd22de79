"""The compiled and numpy kernel backends must agree bit for bit (or to rounding)."""

import numpy as np
import pytest

from qoracle import kernels

BACKENDS = ["python"]
try:
    kernels.load_backend("native")
    BACKENDS.append("native")
except ImportError:  # extension not built
    pass


@pytest.fixture(params=BACKENDS)
def backend(request):
    return kernels.load_backend(request.param)


def state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def reference(psi, op):
    """Apply op through an explicit dense matrix."""
    n = psi.size.bit_length() - 1
    kind = op[0]
    out = np.empty_like(psi)
    for i in range(psi.size):
        if kind == "x":
            out[i ^ (1 << op[1])] = psi[i]
        elif kind == "mcx":
            m, t = op[1], op[2]
            out[i ^ (1 << t) if i & m == m else i] = psi[i]
        elif kind == "mcz":
            out[i] = -psi[i] if i & op[1] == op[1] else psi[i]
        elif kind == "rz":
            s = 1 if i >> op[1] & 1 else -1
            out[i] = psi[i] * np.exp(1j * s * op[2] / 2)
    if kind == "h":
        q = op[1]
        for i in range(psi.size):
            if not i >> q & 1:
                j = i | 1 << q
                out[i] = (psi[i] + psi[j]) / np.sqrt(2)
                out[j] = (psi[i] - psi[j]) / np.sqrt(2)
    return out


@pytest.mark.parametrize(
    "op", [("h", 2), ("x", 0), ("rz", 1, 0.37), ("mcx", 0b1010, 0), ("mcz", 0b10011)]
)
def test_kernel_vs_reference(backend, op):
    psi = state(5, 0)
    want = reference(psi, op)
    got = psi.copy()
    fn = getattr(backend, "apply_" + op[0])
    fn(got, *op[1:])
    assert np.allclose(got, want, atol=1e-13)


def test_diagonal(backend):
    psi = state(4, 1)
    phases = np.exp(1j * np.arange(4))
    got = psi.copy()
    backend.apply_diagonal(got, np.array([3, 1]), phases)
    want = np.array([psi[i] * phases[(i >> 3 & 1) | (i >> 1 & 1) << 1] for i in range(16)])
    assert np.allclose(got, want)


def test_fwht(backend):
    a = np.random.default_rng(2).normal(size=64)
    h = np.array([[1.0]])
    for _ in range(6):
        h = np.block([[h, h], [h, -h]])
    assert np.allclose(backend.fwht(a.copy()), h @ a, atol=1e-12)


def test_marginal(backend):
    p = np.abs(state(4, 3)) ** 2
    got = backend.marginal(p, np.array([2, 0]))
    want = np.zeros(4)
    for i, v in enumerate(p):
        want[(i >> 2 & 1) | (i & 1) << 1] += v
    assert np.allclose(got, want)


def test_env_forces_fallback(monkeypatch):
    import importlib

    monkeypatch.setenv("QORACLE_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("QORACLE_PURE_PYTHON")
        importlib.reload(kernels)


@pytest.mark.parametrize("op", [("mcx", 0, 0), ("mcz", 0b1), ("mcx", 0b110, 0), ("mcz", 0b111)])
def test_every_axis_fixed(backend, op):
    n = 1 if op[1] <= 1 else 3
    psi = state(n, 3)
    want = reference(psi, op)
    if op[0] == "mcx":
        backend.apply_mcx(psi, op[1], op[2])
    else:
        backend.apply_mcz(psi, op[1])
    assert np.allclose(psi, want)
