"""Walsh-Hadamard solution of phase equations.

An RZ(theta) acting on a wire that holds the parity ``p(x)`` multiplies
``|x>`` by ``exp(-i/2 * (-1)^p(x) * theta)``. A diagonal ``exp(i*phi_x)`` is
therefore reached, up to global phase, when ``phi = -1/2 * D @ theta`` where
``D[x, j] = (-1)^popcount(x & mask_j)``. Inverting ``D`` is a Walsh-Hadamard
transform, so ``theta_mask = -(2/N) * fwht(phi)[mask]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .. import kernels

__all__ = [
    "ZERO_TOL",
    "fwht",
    "naive_walsh",
    "PhaseSpec",
    "ThetaSolution",
    "solve_theta",
    "parity_matrix",
]

ZERO_TOL = 1e-12


def _log2_exact(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    return n.bit_length() - 1


def fwht(values) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform, ``O(N log N)``.

    Raises:
        ValueError: the length is not a power of two.
    """
    a = np.array(values, dtype=np.float64).ravel()
    _log2_exact(a.size)
    return np.asarray(kernels.fwht_inplace(a))


def naive_walsh(values) -> np.ndarray:
    """Reference ``O(N^2)`` transform (Sylvester Hadamard matrix product)."""
    a = np.asarray(values, dtype=np.float64).ravel()
    m = _log2_exact(a.size)
    h = np.array([[1.0]])
    for _ in range(m):
        h = np.block([[h, h], [h, -h]])
    return h @ a


def _popcount_parity(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    p = np.zeros_like(v)
    while np.any(v):
        p ^= v & 1
        v >>= 1
    return p


def parity_matrix(masks: Sequence[int], m: int) -> np.ndarray:
    """``D[x, j] = (-1)^popcount(x & masks[j])`` for ``x`` in ``0 .. 2^m - 1``."""
    xs = np.arange(1 << m, dtype=np.int64)[:, None]
    ms = np.asarray(list(masks), dtype=np.int64)[None, :]
    return 1 - 2 * _popcount_parity(xs & ms)


@dataclass(frozen=True)
class PhaseSpec:
    """Target phases, ``phis[x]`` radians on basis state ``|x>``."""

    phis: np.ndarray

    def __post_init__(self):
        a = np.array(self.phis, dtype=np.float64).ravel()
        _log2_exact(a.size)
        a.setflags(write=False)
        object.__setattr__(self, "phis", a)

    @property
    def m(self) -> int:
        return self.phis.size.bit_length() - 1


@dataclass(frozen=True)
class ThetaSolution:
    """Nonzero rotation angles keyed by parity mask over ``m`` wires."""

    thetas: Mapping[int, float]
    m: int
    global_term: float = field(default=0.0, compare=False)

    def support(self) -> list[int]:
        return sorted(self.thetas)

    def theta(self, mask: int) -> float:
        return self.thetas.get(mask, 0.0)

    def vector(self, masks: Sequence[int]) -> np.ndarray:
        return np.array([self.theta(mk) for mk in masks])

    def reconstruct(self) -> np.ndarray:
        """Phases produced by the rotations, ``-1/2 * D @ theta``."""
        masks = self.support()
        if not masks:
            return np.zeros(1 << self.m)
        return -0.5 * parity_matrix(masks, self.m) @ self.vector(masks)


def solve_theta(spec: PhaseSpec | Sequence[float], tol: float = ZERO_TOL) -> ThetaSolution:
    """Rotation angles realizing ``spec`` up to global phase.

    Walsh index ``i`` is paired with the parity operator whose mask is ``i``.
    The ``i = 0`` coefficient is only a global phase and is set aside in
    ``global_term``; coefficients with magnitude ``<= tol`` are dropped.
    """
    if not isinstance(spec, PhaseSpec):
        spec = PhaseSpec(spec)
    n = spec.phis.size
    w = -2.0 / n * fwht(spec.phis)
    thetas = {int(i): float(w[i]) for i in range(1, n) if abs(w[i]) > tol}
    return ThetaSolution(thetas, spec.m, float(w[0]))
