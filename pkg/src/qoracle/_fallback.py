"""Pure numpy kernels; same API as the compiled ``_native`` module.

State vectors are viewed as ``(2,) * n`` tensors so that qubit ``q`` maps to
axis ``n - 1 - q`` (little-endian basis indexing).
"""

import math

import numpy as np


def _view(psi):
    n = psi.size.bit_length() - 1
    return psi.reshape((2,) * n), n


def _sel(n, fixed):
    idx = [slice(None)] * n
    for q, bit in fixed.items():
        idx[n - 1 - q] = bit
    # the trailing Ellipsis keeps a 0-d view when every axis is fixed
    return (*idx, Ellipsis)


def apply_h(psi, q):
    v, n = _view(psi)
    i0, i1 = _sel(n, {q: 0}), _sel(n, {q: 1})
    a0 = v[i0].copy()
    a1 = v[i1]
    s = 1.0 / math.sqrt(2.0)
    v[i0] = (a0 + a1) * s
    v[i1] = (a0 - a1) * s


def apply_x(psi, q):
    v, n = _view(psi)
    i0, i1 = _sel(n, {q: 0}), _sel(n, {q: 1})
    a0 = v[i0].copy()
    v[i0] = v[i1]
    v[i1] = a0


def apply_rz(psi, q, theta):
    v, n = _view(psi)
    v[_sel(n, {q: 0})] *= complex(math.cos(theta / 2), -math.sin(theta / 2))
    v[_sel(n, {q: 1})] *= complex(math.cos(theta / 2), math.sin(theta / 2))


def _controls(mask):
    out, q = [], 0
    while mask:
        if mask & 1:
            out.append(q)
        mask >>= 1
        q += 1
    return out


def apply_mcx(psi, ctrl_mask, t):
    v, n = _view(psi)
    fixed = {c: 1 for c in _controls(ctrl_mask)}
    a = v[_sel(n, {**fixed, t: 0})]
    b = v[_sel(n, {**fixed, t: 1})]
    tmp = a.copy()
    a[...] = b
    b[...] = tmp


def apply_cx(psi, c, t):
    apply_mcx(psi, 1 << c, t)


def apply_mcz(psi, mask):
    v, n = _view(psi)
    v[_sel(n, {q: 1 for q in _controls(mask)})] *= -1


def apply_diagonal(psi, qubits, phases):
    """Multiply amplitudes by ``phases[k]`` where k is the value of ``qubits``."""
    idx = np.arange(psi.size)
    key = np.zeros(psi.size, dtype=np.int64)
    for j, q in enumerate(qubits):
        key |= ((idx >> q) & 1) << j
    psi *= np.asarray(phases)[key]


def fwht(a):
    """In-place unnormalised Walsh-Hadamard transform of a float64 vector."""
    n = a.size
    h = 1
    while h < n:
        v = a.reshape(-1, 2, h)
        x = v[:, 0, :].copy()
        y = v[:, 1, :]
        v[:, 0, :] = x + y
        v[:, 1, :] = x - y
        h <<= 1
    return a


def marginal(probs, qubits):
    idx = np.arange(probs.size)
    key = np.zeros(probs.size, dtype=np.int64)
    for j, q in enumerate(qubits):
        key |= ((idx >> q) & 1) << j
    return np.bincount(key, weights=probs, minlength=1 << len(qubits))
