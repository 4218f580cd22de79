"""Parity-operator traversal routes.

A route keeps one *loader* wire fixed and walks over subsets of its control
wires. Visiting subset ``s`` means the loader holds ``x_loader XOR (XOR of
x_c for c in s)``; moving from ``s`` to ``t`` costs one CNOT per bit in
``s ^ t`` (control -> loader). Every route ends at the empty subset, which
restores the loader wire.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "ParityOperator",
    "Route",
    "gray_code",
    "gray_route",
    "htsp_route",
    "diagonal_routes",
    "route_cost",
]


@dataclass(frozen=True, order=True)
class ParityOperator:
    """Non-empty XOR of wire variables; bit ``w`` of ``mask`` selects ``x_w``."""

    mask: int

    def __post_init__(self):
        if self.mask <= 0:
            raise ValueError("a parity operator needs a non-empty mask")

    def wires(self) -> list[int]:
        return [w for w in range(self.mask.bit_length()) if self.mask >> w & 1]

    def value(self, x: int) -> int:
        return bin(x & self.mask).count("1") & 1

    def __int__(self):
        return self.mask


def gray_code(m: int) -> list[int]:
    """Reflected binary Gray code of ``m`` bits, starting at 0."""
    return [i ^ (i >> 1) for i in range(1 << m)]


@dataclass(frozen=True)
class Route:
    """A walk over control subsets with the loader wire as CNOT target.

    ``steps`` are local subset masks (bit ``j`` = ``controls[j]``) in visiting
    order, the last one always ``0``. ``rz_steps`` lists the subsets that carry
    a rotation; ``None`` means every visited subset does.
    """

    loader: int
    controls: tuple[int, ...]
    steps: tuple[int, ...]
    rz_steps: frozenset[int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(self.controls))
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps or self.steps[-1] != 0:
            raise ValueError("a route must end at the empty subset")
        if self.loader in self.controls:
            raise ValueError("the loader wire cannot be one of its controls")
        if self.rz_steps is not None:
            object.__setattr__(self, "rz_steps", frozenset(self.rz_steps))

    def to_mask(self, subset: int) -> int:
        """Parity mask over wire indices for a local control subset."""
        mask = 1 << self.loader
        j = 0
        while subset:
            if subset & 1:
                mask |= 1 << self.controls[j]
            subset >>= 1
            j += 1
        return mask

    def parity_masks(self) -> list[int]:
        """Wire-level parity masks of the visited operators, in order."""
        return [self.to_mask(s) for s in self.steps]

    def rz_masks(self) -> set[int]:
        subsets = self.steps if self.rz_steps is None else self.rz_steps
        return {self.to_mask(s) for s in subsets}

    def transitions(self) -> list[list[int]]:
        """Control wires fired before each step (one CNOT per entry)."""
        out, prev = [], 0
        for s in self.steps:
            diff = prev ^ s
            out.append([self.controls[j] for j in range(len(self.controls)) if diff >> j & 1])
            prev = s
        return out

    @property
    def cnot_cost(self) -> int:
        return sum(len(t) for t in self.transitions())

    def replay(self) -> list[int]:
        """Run the CNOTs on wire parities; returns the final mask per wire.

        Wire ``w`` starts as ``1 << w``; a well-formed route leaves it there.
        """
        wires = {w: 1 << w for w in (self.loader, *self.controls)}
        for fired in self.transitions():
            for c in fired:
                wires[self.loader] ^= wires[c]
        return [wires[w] for w in sorted(wires)]

    def dump(self, thetas=None) -> str:
        """One ``mask=0b... rz=...`` line per rotation-carrying visit."""
        lines = []
        rz = self.rz_masks()
        for mask in self.parity_masks():
            if mask not in rz:
                continue
            t = 0.0 if thetas is None else thetas.get(mask, 0.0)
            lines.append(f"mask={bin(mask)} rz={t:.10f}")
        return "\n".join(lines)


def route_cost(steps: Sequence[int]) -> int:
    """CNOTs needed to walk ``steps`` starting from the empty subset."""
    prev, cost = 0, 0
    for s in steps:
        cost += bin(prev ^ s).count("1")
        prev = s
    return cost


def gray_route(
    m: int,
    support: Iterable[int] | None = None,
    *,
    loader: int | None = None,
    controls: Sequence[int] | None = None,
) -> Route:
    """Cyclic reflected-Gray walk over all ``2^m`` control subsets.

    The walk visits every non-empty subset once and closes at the empty
    subset: ``2^m`` CNOTs. ``support`` restricts where rotations are placed but
    never changes the transitions. Controls default to wires ``0 .. m-1`` and
    the loader to wire ``m``.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    controls = tuple(range(m)) if controls is None else tuple(controls)
    if len(controls) != m:
        raise ValueError(f"expected {m} controls, got {len(controls)}")
    loader = m if loader is None else loader
    steps = gray_code(m)[1:] + [0]
    rz = None if support is None else frozenset(support)
    return Route(loader, controls, tuple(steps), rz)


def htsp_route(
    support: Iterable[int],
    m: int,
    *,
    loader: int | None = None,
    controls: Sequence[int] | None = None,
) -> Route:
    """Two-salesman greedy Hamming tour over the ``support`` subsets.

    Both salesmen start at the empty subset and alternate moves, salesman 1
    first. Each goes to the nearest unvisited subset by Hamming distance
    (ties to the smaller mask). The tour is salesman 1's path, then salesman
    2's path reversed, then back to the empty subset.

    Raises:
        ValueError: empty support.
    """
    todo = set(support)
    if not todo:
        raise ValueError("htsp_route needs a non-empty support")
    controls = tuple(range(m)) if controls is None else tuple(controls)
    loader = m if loader is None else loader
    rz = frozenset(todo)
    todo.discard(0)
    paths: list[list[int]] = [[], []]
    pos = [0, 0]
    turn = 0
    while todo:
        here = pos[turn]
        nxt = min(todo, key=lambda s: (bin(s ^ here).count("1"), s))
        todo.remove(nxt)
        paths[turn].append(nxt)
        pos[turn] = nxt
        turn ^= 1
    steps = paths[0] + paths[1][::-1] + [0]
    return Route(loader, controls, tuple(steps), rz)


def diagonal_routes(m: int) -> list[Route]:
    """Routes covering every non-empty parity operator on ``m`` wires.

    Loader ``w`` runs from ``m - 1`` down to ``0`` and walks the Gray code over
    wires ``0 .. w-1``, so each operator is visited exactly once with
    ``2^m - 2`` CNOTs in total.
    """
    return [gray_route(w, loader=w, controls=range(w)) for w in range(m - 1, -1, -1)]
